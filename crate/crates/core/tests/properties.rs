use num_bigint::BigUint;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use proptest::prelude::*;

use hyspectra::chebyshev::{chebyshev_u, chebyshev_u_sub, chebyshev_u_values, chebyshev_zeros};
use hyspectra::eigenvectors::{complement_vector, residual, stationary_vector};
use hyspectra::oracle::{charpoly_dense, charpoly_dense_with, Backend};
use hyspectra::spectrum::{spectrum, SpectralKey};
use hyspectra::staircase::{
    devils_staircase, jump_size, rational_to_f64, totient_sum, StaircaseArg, StaircaseMode, Value,
};
use hyspectra::state::run_decomposition;
use hyspectra::stochastic::{simulate_absorbing, transition_counts, WalkConfig};
use hyspectra::{AdjacencyMatrix, Budget, MemoryState, Variant};

fn state_strategy(max_n: u32) -> impl Strategy<Value = MemoryState> {
    (1..=max_n).prop_flat_map(|n| (0..(1u64 << n)).prop_map(move |i| MemoryState::from_index(n, i).unwrap()))
}

proptest! {
    #[test]
    fn up_raises_input_by_one(x in state_strategy(20)) {
        prop_assume!(!x.is_all_ones());
        prop_assert_eq!(x.step_up().unwrap().input_value(), x.input_value() + 1);
    }

    #[test]
    fn down_lowers_input_by_one(x in state_strategy(20)) {
        prop_assume!(!x.is_all_zeros());
        prop_assert_eq!(x.step_down().unwrap().input_value() + 1, x.input_value());
    }

    #[test]
    fn complement_swaps_moves(x in state_strategy(20)) {
        prop_assume!(!x.is_all_ones());
        prop_assert_eq!(x.step_up().unwrap().complement(), x.complement().step_down().unwrap());
    }

    #[test]
    fn complement_areas_fill_triangle(x in state_strategy(20)) {
        let n = u64::from(x.len());
        prop_assert_eq!(x.output_area() + x.complement().output_area(), n * (n + 1) / 2);
    }

    #[test]
    fn runs_round_trip(bits in proptest::collection::vec(0u8..=1, 0..40)) {
        let runs = run_decomposition(&bits);
        prop_assert_eq!(runs.k() % 2, 1);
        prop_assert_eq!(runs.to_bits(), bits);
    }

    #[test]
    fn out_degrees(x in state_strategy(16)) {
        let extreme = x.is_all_zeros() || x.is_all_ones();
        prop_assert_eq!(x.successors(Variant::Gamma).len(), if extreme { 1 } else { 2 });
        prop_assert_eq!(x.successors(Variant::GammaPrime).len(), 2);
    }

    #[test]
    fn floor_and_jump_agree(q in 2i64..=40, r in 1i64..40) {
        prop_assume!(r < q);
        let x = Ratio::new(r, q);
        let jump = devils_staircase(&StaircaseArg::Exact(x), StaircaseMode::JumpForm).unwrap();
        let floor = devils_staircase(&StaircaseArg::Exact(x), StaircaseMode::FloorSeries(80)).unwrap();
        let (Value::Exact(j), Value::Exact(f)) = (jump.value, floor.value) else { unreachable!() };
        prop_assert!(rational_to_f64(&(j - f)).abs() <= floor.error_bound);
    }

    #[test]
    fn staircase_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let f = |x| devils_staircase(&StaircaseArg::Float(x), StaircaseMode::FloorSeries(60)).unwrap().value.to_f64();
        prop_assert!(f(lo) <= f(hi));
        prop_assert!((0.0..=1.0).contains(&f(hi)));
    }

    #[test]
    fn distribution_is_monotone(n in 1u32..=16, a in -1.0f64..=1.0, b in -1.0f64..=1.0) {
        let t = spectrum(n, Variant::Gamma).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(t.distribution(lo).value <= t.distribution(hi).value);
    }

    #[test]
    fn walks_are_reproducible(n in 1u32..=8, seed in any::<u64>()) {
        let cfg = WalkConfig { n, variant: Variant::Gamma, seed, max_steps: 10_000, replications: 20 };
        let a = simulate_absorbing(&cfg, MemoryState::zeros(n).unwrap()).unwrap();
        let b = simulate_absorbing(&cfg, MemoryState::zeros(n).unwrap()).unwrap();
        prop_assert_eq!(a.to_csv(), b.to_csv());
        prop_assert!(a.samples.iter().all(|x| x.termination_step >= 1));
    }
}

#[test]
fn up_then_down_when_last_slot_empty() {
    for n in 1..=12 {
        for x in MemoryState::all(n).unwrap() {
            if x.bit(n - 1) == 0 {
                assert_eq!(x.step_up().unwrap().step_down().unwrap(), x);
            }
        }
    }
}

#[test]
fn entry_counts_and_rotation() {
    let b = Budget::default();
    for n in 1..=12u32 {
        let a = AdjacencyMatrix::build_recursive(n, Variant::Gamma, &b).unwrap();
        let ap = AdjacencyMatrix::build_recursive(n, Variant::GammaPrime, &b).unwrap();
        assert_eq!(a.nnz(), (1 << (n + 1)) - 2);
        assert_eq!(ap.nnz(), 1 << (n + 1));
        assert_eq!(a.rotated(), a);
        // column-stochastic after halving
        assert!(ap.column_sums().iter().all(|&s| s == 2));
    }
}

#[test]
fn chebyshev_degrees_and_parity() {
    for k in 0..=100usize {
        let u = chebyshev_u(k);
        assert_eq!(u.degree(), Some(k));
        assert_eq!(u.leading_coefficient(), num_bigint::BigInt::one() << k);
        assert!(u.has_parity(k));
        let us = chebyshev_u_sub(k);
        assert_eq!(us.degree(), Some(k));
        assert_eq!(us.leading_coefficient(), num_bigint::BigInt::from(if k % 2 == 0 { 1 } else { -1 }));
    }
}

#[test]
fn chebyshev_zeros_are_zeros() {
    for k in 1..=50u64 {
        let zs = chebyshev_zeros(k).unwrap();
        assert_eq!(zs.len() as u64, k);
        let mut last = 1.0;
        for z in zs {
            let c = z.cos();
            assert!(c < last && c > -1.0);
            let u = chebyshev_u_values(k as usize, c)[k as usize];
            assert!(u.abs() < 1e-12, "U_{k} at {z}: {u}");
            last = c;
        }
    }
}

#[test]
fn distribution_endpoints_and_jumps() {
    for n in 1..=12u32 {
        let t = spectrum(n, Variant::Gamma).unwrap();
        assert!(t.distribution(-1.0).value.is_zero());
        assert!(t.distribution(1.0).value.is_one());
        let size = BigUint::one() << n;
        for (k, m) in t.entries() {
            let SpectralKey::Angle(a) = k else { continue };
            let below = t.distribution_at_key(k);
            let above = rational_to_f64(&t.distribution(a.cos() + 1e-9).value);
            let jump = rational_to_f64(&BigRational::new(m.clone().into(), size.clone().into()));
            assert!((above - rational_to_f64(&below) - jump).abs() < 1e-12);
        }
    }
}

#[test]
fn jumps_approach_staircase_jumps() {
    for q in 2..=6u64 {
        let target = rational_to_f64(&jump_size(q));
        let m = spectrum(20, Variant::Gamma)
            .unwrap()
            .multiplicity(&SpectralKey::Angle(hyspectra::AngleFraction::new(1, q).unwrap()));
        let jump = rational_to_f64(&BigRational::new(m.into(), (BigUint::one() << 20u32).into()));
        assert!((jump - target).abs() < 1e-4, "q = {q}: {jump} vs {target}");
    }
}

#[test]
fn totient_sum_below_one() {
    let mut last = 0.0;
    for q in 2..=40 {
        let s = totient_sum(q).unwrap();
        assert!(s < BigRational::one());
        let f = rational_to_f64(&s);
        assert!(f > last);
        last = f;
    }
}

#[test]
fn oracle_transpose_invariance() {
    let b = Budget::default();
    for n in 1..=6u32 {
        for v in [Variant::Gamma, Variant::GammaPrime] {
            let a = AdjacencyMatrix::build_recursive(n, v, &b).unwrap();
            let d = a.to_dense(&b).unwrap();
            let t = a.transposed().to_dense(&b).unwrap();
            assert_eq!(charpoly_dense(&d, &b).unwrap(), charpoly_dense(&t, &b).unwrap());
            let modular = charpoly_dense_with(&d, Backend::Modular, &b).unwrap();
            assert!(modular.self_check);
            assert_eq!(modular.poly, charpoly_dense(&d, &b).unwrap());
        }
    }
}

#[test]
fn transition_law_is_fair() {
    for n in 1..=4u32 {
        let cfg = WalkConfig { n, variant: Variant::GammaPrime, seed: 3, max_steps: 100_000, replications: 1 };
        let counts = transition_counts(&cfg).unwrap();
        let chi2: f64 = counts
            .iter()
            .filter(|(v, _)| *v > 0)
            .map(|&(v, u)| {
                let e = v as f64 / 2.0;
                2.0 * (u as f64 - e).powi(2) / e
            })
            .sum();
        // df = 2^n; 99.9% quantile of χ²_16 is about 39
        assert!(chi2 < 40.0, "N = {n}: χ² = {chi2}");
    }
}

#[test]
fn stationary_is_symmetric_and_invariant() {
    let b = Budget::default();
    for n in 1..=12u32 {
        let v = stationary_vector(n).unwrap();
        assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(v, complement_vector(&v));
        let a = AdjacencyMatrix::build_recursive(n, Variant::GammaPrime, &b).unwrap();
        assert!(residual(&v, &a, 1.0).unwrap() < 1e-12);
    }
}
