//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints exactly one line, pass or fail.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyspectra::chebyshev::chebyshev_u_sub;
use hyspectra::cli::{dist_table, GridSpec};
use hyspectra::eigenvectors::{
    eigenvector_gamma_prime, eigenvector_interior, eigenvector_top, keys_with_denominator, prefix_family_rank,
    residual, stationary_vector, Coefficient,
};
use hyspectra::oracle::{charpoly_of, pencil_det, t_pencil, verify_lemma_recursions, Backend, LemmaStatus};
use hyspectra::spectrum::{char_poly_factored, chebyshev_root_multiset, spectrum, spectrum_diff, SpectralKey};
use hyspectra::staircase::{
    devils_staircase, floor_series_closed_form, jump_form, jump_size, left_limit_closed_form, rational_to_f64,
    totient_sum, StaircaseArg, StaircaseMode, Value,
};
use hyspectra::stochastic::{
    empirical_stationary, leading_eigenvalue, power_iteration_stationary, simulate_absorbing, WalkConfig,
};
use hyspectra::{AdjacencyMatrix, AngleFraction, Budget, IntPolynomial, MemoryState, Variant};

type Outcome = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const VARIANTS: [Variant; 2] = [Variant::Gamma, Variant::GammaPrime];

fn budget() -> Budget {
    Budget::default()
}

fn key(r: u64, q: u64) -> AngleFraction {
    AngleFraction::new(r, q).unwrap()
}

fn bits(index: usize, len: usize) -> Vec<u8> {
    (0..len).rev().map(|i| ((index >> i) & 1) as u8).collect()
}

fn dense_rows(a: &AdjacencyMatrix) -> Vec<Vec<u8>> {
    (0..a.order())
        .map(|i| (0..a.order()).map(|j| u8::from(a.get(i, j))).collect())
        .collect()
}

fn structural_equality() -> Outcome {
    let b = budget();
    let start = Instant::now();
    for n in 1..=12 {
        for v in VARIANTS {
            let rules = AdjacencyMatrix::build_from_rules(n, v, &b).map_err(|e| e.to_string())?;
            let rec = AdjacencyMatrix::build_recursive(n, v, &b).map_err(|e| e.to_string())?;
            ensure!(rules == rec, "N = {n}, {v}: rule-built and recursive matrices differ");
        }
    }
    let elapsed = start.elapsed();
    let a1 = AdjacencyMatrix::build_recursive(1, Variant::Gamma, &b).unwrap();
    ensure!(dense_rows(&a1) == vec![vec![0, 1], vec![1, 0]], "A_1 = {:?}", dense_rows(&a1));
    let a2 = AdjacencyMatrix::build_recursive(2, Variant::Gamma, &b).unwrap();
    let want = vec![vec![0, 1, 1, 0], vec![1, 0, 0, 0], vec![0, 0, 0, 1], vec![0, 1, 1, 0]];
    ensure!(dense_rows(&a2) == want, "A_2 = {:?}", dense_rows(&a2));
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!("N = 1..12, both variants, A_1 and A_2 fixtures, {elapsed:.2?}"))
}

fn closed_vs_oracle(variant: Variant) -> Outcome {
    let b = budget();
    let mut slowest = Duration::ZERO;
    for n in 1..=8 {
        let closed = char_poly_factored(n, variant)
            .and_then(|f| f.expand(&b))
            .map_err(|e| e.to_string())?;
        let start = Instant::now();
        let a = AdjacencyMatrix::build_recursive(n, variant, &b).map_err(|e| e.to_string())?;
        let oracle = charpoly_of(&a, &b).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed());
        ensure!(closed == oracle, "N = {n}: closed {closed} vs oracle {oracle}");
    }
    ensure!(slowest < Duration::from_secs(600), "oracle took {slowest:?}");
    Ok(format!("N = 1..8, slowest oracle run {slowest:.2?}"))
}

fn charpoly_gamma() -> Outcome {
    let summary = closed_vs_oracle(Variant::Gamma)?;
    let b = budget();
    let chi0 = pencil_det(&t_pencil(0, &b).unwrap(), Backend::Auto, &b).unwrap().poly;
    ensure!(chi0 == IntPolynomial::from_i64(&[0, -1]), "χ_0 = {chi0}");
    let anchors: [&[i64]; 3] = [&[-1, 0, 1], &[0, 0, -2, 0, 1], &[0, 0, -1, 0, 4, 0, -4, 0, 1]];
    for (n, want) in (1..=3).zip(anchors) {
        let got = char_poly_factored(n, Variant::Gamma).unwrap().expand(&b).unwrap();
        ensure!(got == IntPolynomial::from_i64(want), "χ_{n} = {got}");
    }
    let u = chebyshev_u_sub;
    let chi3 = &(&(&u(1) * &u(1)) * &u(2)) * &u(4);
    let got = char_poly_factored(3, Variant::Gamma).unwrap().expand(&b).unwrap();
    ensure!(got == chi3, "χ_3 = {got}, Ũ_1²Ũ_2Ũ_4 = {chi3}");
    Ok(format!("{summary}; anchors χ_0..χ_3"))
}

fn charpoly_gamma_prime() -> Outcome {
    let summary = closed_vs_oracle(Variant::GammaPrime)?;
    for n in 1..=12u32 {
        let g = spectrum(n, Variant::Gamma).unwrap();
        let gp = spectrum(n, Variant::GammaPrime).unwrap();
        let (removed, added) = spectrum_diff(&g, &gp);
        let want_removed = chebyshev_root_multiset(u64::from(n) + 1);
        let mut want_added = chebyshev_root_multiset(u64::from(n));
        want_added.push((SpectralKey::Unit, BigUint::one()));
        ensure!(removed == want_removed, "N = {n}: removed {removed:?}");
        ensure!(added == want_added, "N = {n}: added {added:?}");
        let changed: BigUint = removed.iter().map(|(_, m)| m.clone()).sum();
        ensure!(changed == BigUint::from(n + 1), "N = {n}: {changed} eigenvalues changed");
    }
    Ok(format!("{summary}; Γ → Γ′ diff for N ≤ 12"))
}

fn multiplicity_sum() -> Outcome {
    let start = Instant::now();
    for n in 1..=20u32 {
        for v in VARIANTS {
            let total = spectrum(n, v).map_err(|e| e.to_string())?.total_multiplicity();
            ensure!(total == BigUint::one() << n, "N = {n}, {v}: total {total}");
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("N = 1..20, both variants, {elapsed:.2?}"))
}

fn distribution_limit() -> Outcome {
    let grid = GridSpec::default();
    let mut maxima = Vec::new();
    for n in [6u32, 8, 10, 12] {
        let rows = dist_table(&spectrum(n, Variant::Gamma).unwrap(), &grid);
        let max = rows.iter().filter(|r| !r.flagged).map(|r| r.diff).fold(0.0f64, f64::max);
        maxima.push((n, max));
    }
    for w in maxima.windows(2) {
        ensure!(w[1].1 <= w[0].1 + 1e-6, "max discrepancy rose from N = {} to N = {}: {maxima:?}", w[0].0, w[1].0);
    }
    let last = maxima.last().unwrap().1;
    ensure!(last <= 0.01, "max discrepancy at N = 12 is {last}");
    let shown: Vec<String> = maxima.iter().map(|(n, m)| format!("N={n}: {m:.4}")).collect();
    Ok(format!("512-point guarded grid, {}", shown.join(", ")))
}

fn staircase() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let q = rng.gen_range(2..=12i64);
        let r = rng.gen_range(1..q);
        let x = Ratio::new(r, q);
        let jump = devils_staircase(&StaircaseArg::Exact(x), StaircaseMode::JumpForm).map_err(|e| e.to_string())?;
        let floor = devils_staircase(&StaircaseArg::Exact(x), StaircaseMode::FloorSeries(60)).unwrap();
        let (Value::Exact(j), Value::Exact(f)) = (&jump.value, &floor.value) else {
            return Err(format!("{x}: expected exact values"));
        };
        let gap = rational_to_f64(&(j - f)).abs();
        ensure!(gap <= floor.error_bound, "{x}: gap {gap} exceeds bound {}", floor.error_bound);
        worst = worst.max(gap);
    }
    for q in 2..=12u64 {
        let want = BigRational::new(BigInt::one(), (BigInt::one() << q) - 1);
        ensure!(jump_size(q) == want, "jump size at q = {q}");
        for r in (1..q).filter(|&r| num_integer::gcd(r, q) == 1) {
            let jump = floor_series_closed_form(r, q) - left_limit_closed_form(r, q);
            ensure!(jump == want, "jump at {r}/{q} is {jump}");
            ensure!(jump_form(r, q) == floor_series_closed_form(r, q), "value at {r}/{q}");
        }
    }
    let total = rational_to_f64(&totient_sum(40).unwrap());
    ensure!((total - 1.0).abs() <= 1e-10, "totient sum to 40 is {total}");
    Ok(format!("100 random r/q with q ≤ 12, worst gap {worst:.1e}; jumps exact; Σφ(q)/(2^q−1) to 40 = {total:.12}"))
}

fn eigenvector_residuals() -> Outcome {
    let b = budget();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for n in 2..=10u32 {
        let a = AdjacencyMatrix::build_recursive(n, Variant::Gamma, &b).unwrap();
        let ap = AdjacencyMatrix::build_recursive(n, Variant::GammaPrime, &b).unwrap();
        for ell in 0..=n - 2 {
            let plen = (n - ell - 2) as usize;
            let family = 1usize << plen;
            let prefixes: Vec<usize> = if n <= 8 || family <= 64 {
                (0..family).collect()
            } else {
                (0..64).map(|_| rng.gen_range(0..family)).collect()
            };
            for k in keys_with_denominator(u64::from(ell) + 2) {
                for &p in &prefixes {
                    let v = eigenvector_interior(n, ell, k, &bits(p, plen)).map_err(|e| e.to_string())?;
                    let x = v.values();
                    for m in [&a, &ap] {
                        let res = residual(&x, m, k.cos()).unwrap();
                        ensure!(res <= 1e-10, "N = {n}, ℓ = {ell}, key {k}, prefix {p}: residual {res}");
                        worst = worst.max(res);
                    }
                    count += 1;
                }
            }
        }
        for k in keys_with_denominator(u64::from(n) + 2) {
            let res = residual(&eigenvector_top(n, k).unwrap().values(), &a, k.cos()).unwrap();
            ensure!(res <= 1e-10, "N = {n}, top key {k}: residual {res}");
            worst = worst.max(res);
            count += 1;
        }
        for k in keys_with_denominator(u64::from(n) + 1) {
            let res = residual(&eigenvector_gamma_prime(n, k).unwrap().values(), &ap, k.cos()).unwrap();
            ensure!(res <= 1e-10, "N = {n}, Γ′ top key {k}: residual {res}");
            worst = worst.max(res);
            count += 1;
        }
    }

    let v = eigenvector_interior(4, 2, key(1, 4), &[]).unwrap();
    let at = |s: &str| v.coefficient(&s.parse::<MemoryState>().unwrap()).clone();
    let table = [
        ("1000", Coefficient::one()),
        ("1001", Coefficient::new(1, vec![], vec![1])),
        ("1011", Coefficient::new(1, vec![], vec![2])),
        ("1010", Coefficient::new(1, vec![], vec![2, 1])),
        ("0100", Coefficient::new(-1, vec![], vec![])),
        ("0101", Coefficient::new(-1, vec![], vec![1])),
        ("0111", Coefficient::new(-1, vec![2], vec![])),
        ("0110", Coefficient::new(-1, vec![2], vec![1])),
    ];
    for (s, want) in table {
        ensure!(at(s) == want, "λ = 1/√2 table, state {s}: {:?}", at(s));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let u = [1.0, 2.0f64.sqrt(), 1.0];
    ensure!((at("1010").value(&u) - h).abs() < 1e-15, "c(1010) = 1/(u_1u_2) at λ = 1/√2");

    let v = eigenvector_interior(12, 10, key(1, 12), &[]).unwrap();
    let c = v.coefficient(&"100100100110".parse().unwrap());
    ensure!(c.sign == 1 && c.num.is_empty(), "m = 10 coefficient {c:?}");
    ensure!(c.den == vec![9, 8, 6, 5, 3, 1], "m = 10 denominator {:?}", c.den);
    Ok(format!(
        "{count} vectors for N = 2..10, worst residual {worst:.1e}; λ = 1/√2 table and m = 10 coefficient match"
    ))
}

fn geometric_multiplicity() -> Outcome {
    let mut families = 0;
    for n in 2..=8u32 {
        for ell in 0..=n - 2 {
            for k in keys_with_denominator(u64::from(ell) + 2) {
                let rep = prefix_family_rank(n, ell, k).map_err(|e| e.to_string())?;
                ensure!(rep.expected == 1 << (n - ell - 2), "N = {n}, ℓ = {ell}: family size {}", rep.expected);
                ensure!(
                    rep.numeric_rank == rep.expected && rep.pivots_certified,
                    "N = {n}, ℓ = {ell}, key {k}: rank {} of {}",
                    rep.numeric_rank,
                    rep.expected
                );
                families += 1;
            }
        }
    }
    Ok(format!("{families} prefix families for N ≤ 8 have full rank"))
}

fn stationary() -> Outcome {
    let b = budget();
    let mut worst_power = 0.0f64;
    for n in 1..=12u32 {
        let closed = stationary_vector(n).map_err(|e| e.to_string())?;
        let power = power_iteration_stationary(n, &b).map_err(|e| e.to_string())?;
        let d = closed.iter().zip(&power.vector).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        ensure!(d <= 1e-12, "N = {n}: closed vs power {d:e}");
        worst_power = worst_power.max(d);
    }
    let mut worst_mc = 0.0f64;
    for n in 1..=6u32 {
        let cfg = WalkConfig {
            n,
            variant: Variant::GammaPrime,
            seed: 2024,
            max_steps: 10_000,
            replications: 100,
        };
        let samples = (cfg.max_steps * cfg.replications) as f64;
        let tol = 4.0 / samples.sqrt();
        let mc = empirical_stationary(&cfg, None).map_err(|e| e.to_string())?;
        let closed = stationary_vector(n).unwrap();
        let d = closed.iter().zip(&mc).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        ensure!(d <= tol, "N = {n}: closed vs Monte Carlo {d:e} > {tol:e}");
        worst_mc = worst_mc.max(d);
    }
    let s2 = stationary_vector(2).unwrap();
    let want = [1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0];
    ensure!(s2.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-15), "N = 2: {s2:?}");
    Ok(format!(
        "power iteration N ≤ 12 within {worst_power:.1e}; Monte Carlo N ≤ 6 at 10^6 steps within {worst_mc:.1e}; N = 2 fixture"
    ))
}

fn lemmas() -> Outcome {
    let report = verify_lemma_recursions(5, 50, &budget()).map_err(|e| e.to_string())?;
    if let Some(bad) = report.iter().find(|c| c.status == LemmaStatus::Fail) {
        return Err(format!("{} at k = {}: {:?}", bad.identity, bad.k, bad.witness));
    }
    for name in ["master-recursion", "chi-recursion", "phi-recursion", "psi-recursion", "cofactor-expansion"] {
        ensure!(report.iter().any(|c| c.identity == name && c.k == 5), "{name} not checked at k = 5");
    }
    ensure!(report.iter().any(|c| c.identity == "pell" && c.k == 50), "Pell not checked at k = 50");
    Ok(format!("{} exact identities for k ≤ 5, Pell for k ≤ 50", report.len()))
}

fn leading_and_termination() -> Outcome {
    for n in 1..=20u32 {
        let lead = leading_eigenvalue(n, Variant::Gamma).map_err(|e| e.to_string())?;
        let want = SpectralKey::Angle(key(1, u64::from(n) + 2));
        ensure!(lead.key == want, "N = {n}: leading key {:?}", lead.key);
        let top = spectrum(n, Variant::Gamma).unwrap().leading();
        ensure!(top == Some(want), "N = {n}: spectrum maximum {top:?}");
    }
    let mut means = Vec::new();
    for n in [2u32, 4, 6, 8] {
        let cfg = WalkConfig {
            n,
            variant: Variant::Gamma,
            seed: 42,
            max_steps: 1_000_000,
            replications: 100_000,
        };
        let s = simulate_absorbing(&cfg, MemoryState::zeros(n).unwrap())
            .map_err(|e| e.to_string())?
            .summary();
        ensure!(s.censored_count == 0, "N = {n}: {} censored walks", s.censored_count);
        means.push((n, s.mean));
    }
    for w in means.windows(2) {
        ensure!(w[1].1 > w[0].1, "mean termination time did not increase: {means:?}");
    }
    let shown: Vec<String> = means.iter().map(|(n, m)| format!("N={n}: {m:.1}")).collect();
    Ok(format!("leading key 1/(N+2) for N ≤ 20; mean termination {}", shown.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 11] = [
        (1, "structural equality", structural_equality),
        (2, "characteristic polynomial of Γ", charpoly_gamma),
        (3, "characteristic polynomial of Γ′", charpoly_gamma_prime),
        (4, "multiplicities sum to 2^N", multiplicity_sum),
        (5, "eigenvalue distribution limit", distribution_limit),
        (6, "devil's staircase", staircase),
        (7, "explicit eigenvectors", eigenvector_residuals),
        (8, "geometric multiplicity", geometric_multiplicity),
        (9, "stationary distribution", stationary),
        (10, "lemma suite", lemmas),
        (11, "leading eigenvalue and termination time", leading_and_termination),
    ];
    let filter: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (id, name, check) in criteria {
        if filter.is_some_and(|f| f != id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS criterion {id} ({name}): {detail} [{t:.2?}]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id} ({name}): {detail} [{t:.2?}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
