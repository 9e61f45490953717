//! Explicit eigenvectors of `½A_N` and `½A′_N`.
//!
//! Coefficients are kept symbolically as `±∏ u_a / ∏ u_b` with
//! `u_j = U_j(λ)`, plus a floating-point realization. Index `0` is dropped
//! (`U_0 = 1`) and common indices cancel, so two coefficients are equal iff
//! their signs and index multisets are.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::chebyshev::{chebyshev_u_values, AngleFraction};
use crate::error::{Error, Result};
use crate::matrix::AdjacencyMatrix;
use crate::state::{run_decomposition, MemoryState};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Coefficient {
    /// `-1`, `0` or `1`; the index lists are empty when it is `0`.
    pub sign: i8,
    /// Numerator indices, descending.
    pub num: Vec<usize>,
    /// Denominator indices, descending.
    pub den: Vec<usize>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient {
            sign: 0,
            num: Vec::new(),
            den: Vec::new(),
        }
    }

    pub fn one() -> Self {
        Coefficient {
            sign: 1,
            num: Vec::new(),
            den: Vec::new(),
        }
    }

    pub fn new(sign: i8, num: Vec<usize>, den: Vec<usize>) -> Self {
        if sign == 0 {
            return Coefficient::zero();
        }
        let mut num: Vec<usize> = num.into_iter().filter(|&i| i != 0).collect();
        let mut den: Vec<usize> = den.into_iter().filter(|&i| i != 0).collect();
        num.sort_unstable_by(|a, b| b.cmp(a));
        den.sort_unstable_by(|a, b| b.cmp(a));
        // cancel common indices (both lists are sorted)
        let (mut i, mut j) = (0, 0);
        let (mut n_out, mut d_out) = (Vec::new(), Vec::new());
        while i < num.len() && j < den.len() {
            match num[i].cmp(&den[j]) {
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Greater => {
                    n_out.push(num[i]);
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    d_out.push(den[j]);
                    j += 1;
                }
            }
        }
        n_out.extend_from_slice(&num[i..]);
        d_out.extend_from_slice(&den[j..]);
        Coefficient {
            sign: sign.signum(),
            num: n_out,
            den: d_out,
        }
    }

    /// `1 / ∏ u_{s_i}`.
    pub fn reciprocal_product(s: &[usize]) -> Self {
        Coefficient::new(1, Vec::new(), s.to_vec())
    }

    /// `sign · u_idx · self`.
    pub fn times_u(&self, idx: usize, sign: i8) -> Self {
        let mut num = self.num.clone();
        num.push(idx);
        Coefficient::new(self.sign * sign, num, self.den.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Float value given `u[j] = U_j(λ)`.
    pub fn value(&self, u: &[f64]) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let n: f64 = self.num.iter().map(|&i| u[i]).product();
        let d: f64 = self.den.iter().map(|&i| u[i]).product();
        f64::from(self.sign) * n / d
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EigenvectorClass {
    Interior { ell: u32, prefix: String },
    Top,
    TopGammaPrime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenvector {
    pub n: u32,
    /// Key of the eigenvalue `cos(πr/q)` of `½A`.
    pub key: AngleFraction,
    pub class: EigenvectorClass,
    /// Dense, indexed by packed state.
    pub coefficients: Vec<Coefficient>,
}

impl Eigenvector {
    pub fn eigenvalue(&self) -> f64 {
        self.key.cos()
    }

    fn u_values(&self) -> Vec<f64> {
        chebyshev_u_values(self.n as usize + 1, self.key.cos())
    }

    pub fn values(&self) -> Vec<f64> {
        let u = self.u_values();
        self.coefficients.iter().map(|c| c.value(&u)).collect()
    }

    pub fn coefficient(&self, state: &MemoryState) -> &Coefficient {
        &self.coefficients[state.index() as usize]
    }

    /// `{n, eigenvalue, class, coefficients}` with the zero entries omitted.
    pub fn to_json(&self) -> serde_json::Value {
        let u = self.u_values();
        let mut coefficients = BTreeMap::new();
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let state = MemoryState::from_index(self.n, i as u64).expect("index in range");
            coefficients.insert(
                state.to_string(),
                serde_json::json!({
                    "sign": c.sign,
                    "u_indices_num": c.num,
                    "u_indices_den": c.den,
                    "float": crate::fmt::f64_17(c.value(&u)),
                }),
            );
        }
        serde_json::json!({
            "n": self.n,
            "eigenvalue": {
                "r": self.key.r(),
                "q": self.key.q(),
                "float": crate::fmt::f64_17(self.eigenvalue()),
            },
            "class": self.class,
            "coefficients": coefficients,
        })
    }
}

fn bits_to_index(bits: impl IntoIterator<Item = u8>) -> usize {
    bits.into_iter().fold(0usize, |acc, b| (acc << 1) | b as usize)
}

fn complement_bits(bits: &[u8]) -> Vec<u8> {
    bits.iter().map(|b| 1 - b).collect()
}

fn index_bits(index: usize, len: usize) -> Vec<u8> {
    (0..len).rev().map(|i| ((index >> i) & 1) as u8).collect()
}

/// Interior eigenvector for a key with `q = ℓ + 2`, labelled by `prefix`.
pub fn eigenvector_interior(n: u32, ell: u32, root: AngleFraction, prefix: &[u8]) -> Result<Eigenvector> {
    if n < 2 || ell > n - 2 {
        return Err(Error::Precondition(format!("need ℓ ≤ N - 2, got ℓ = {ell}, N = {n}")));
    }
    if root.q() != u64::from(ell) + 2 {
        return Err(Error::Precondition(format!(
            "eigenvalue key {root} is not a root of U_{} alone (needs denominator {})",
            ell + 1,
            ell + 2
        )));
    }
    let plen = (n - ell - 2) as usize;
    if prefix.len() != plen || prefix.iter().any(|&b| b > 1) {
        return Err(Error::Precondition(format!("prefix must be a bitstring of length {plen}")));
    }
    let ell_us = ell as usize;
    let mut coefficients = vec![Coefficient::zero(); 1usize << n];
    let base = bits_to_index(prefix.iter().copied()) << (ell + 2);
    let ten = 0b10usize << ell;
    let one_zero = 0b01usize << ell;
    for p in 0..(1usize << ell) {
        let pb = index_bits(p, ell_us);
        let s = run_decomposition(&pb).partial_sums();
        coefficients[base | ten | p] = Coefficient::reciprocal_product(&s);
        let sp = run_decomposition(&complement_bits(&pb)).partial_sums();
        coefficients[base | one_zero | p] = Coefficient::reciprocal_product(&sp).times_u(ell_us, -1);
    }
    Ok(Eigenvector {
        n,
        key: root,
        class: EigenvectorClass::Interior {
            ell,
            prefix: prefix.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect(),
        },
        coefficients,
    })
}

fn top_like(n: u32, root: AngleFraction, complement_u: usize, complement_sign: i8, class: EigenvectorClass) -> Eigenvector {
    let size = 1usize << n;
    let mut coefficients = vec![Coefficient::zero(); size];
    for x in 0..size / 2 {
        let s = run_decomposition(&index_bits(x, n as usize)).partial_sums();
        let c = Coefficient::reciprocal_product(&s);
        coefficients[size - 1 - x] = c.times_u(complement_u, complement_sign);
        coefficients[x] = c;
    }
    Eigenvector {
        n,
        key: root,
        class,
        coefficients,
    }
}

/// Eigenvector of `½A_N` for a key with `q = N + 2`; `c(0^N) = 1`.
pub fn eigenvector_top(n: u32, root: AngleFraction) -> Result<Eigenvector> {
    if n < 1 || root.q() != u64::from(n) + 2 {
        return Err(Error::Precondition(format!(
            "eigenvalue key {root} needs denominator N + 2 = {}",
            n + 2
        )));
    }
    Ok(top_like(n, root, n as usize, 1, EigenvectorClass::Top))
}

/// Eigenvector of `½A′_N` for a key with `q = N + 1`.
pub fn eigenvector_gamma_prime(n: u32, root: AngleFraction) -> Result<Eigenvector> {
    if n < 1 || root.q() != u64::from(n) + 1 {
        return Err(Error::Precondition(format!(
            "eigenvalue key {root} needs denominator N + 1 = {}",
            n + 1
        )));
    }
    Ok(top_like(n, root, n as usize - 1, -1, EigenvectorClass::TopGammaPrime))
}

/// How the run-product of the stationary vector is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StationaryReading {
    /// `∏_i (1 + j_1 + ... + j_i)`.
    PartialSums,
    /// `∏_i (1 + i·j_i)`: the inner sum taken literally over a constant term.
    Literal,
}

fn stationary_weight(bits: &[u8], reading: StationaryReading) -> u64 {
    let rd = run_decomposition(bits);
    match reading {
        StationaryReading::PartialSums => rd.partial_sums().iter().map(|&s| 1 + s as u64).product(),
        StationaryReading::Literal => rd.runs()[..rd.k()]
            .iter()
            .enumerate()
            .map(|(i, &j)| 1 + (i as u64 + 1) * j as u64)
            .product(),
    }
}

/// Unnormalized weights `1/∏(...)` for strings starting with `0`, mirrored
/// onto their complements, as exact rationals normalized to sum `1`.
pub fn stationary_vector_exact(n: u32, reading: StationaryReading) -> Result<Vec<BigRational>> {
    if n < 1 {
        return Err(Error::Precondition("stationary vector needs N ≥ 1".into()));
    }
    crate::budget::check("N for exact stationary vector", u64::from(n), 16)?;
    let size = 1usize << n;
    let mut c = vec![BigRational::zero(); size];
    for x in 0..size / 2 {
        let w = stationary_weight(&index_bits(x, n as usize), reading);
        let v = BigRational::new(BigInt::one(), BigInt::from(w));
        c[size - 1 - x] = v.clone();
        c[x] = v;
    }
    let total: BigRational = c.iter().sum();
    Ok(c.into_iter().map(|v| v / &total).collect())
}

/// Stationary distribution of the `½A′_N` chain from the closed form.
pub fn stationary_vector(n: u32) -> Result<Vec<f64>> {
    stationary_vector_with(n, StationaryReading::PartialSums)
}

pub fn stationary_vector_with(n: u32, reading: StationaryReading) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(Error::Precondition("stationary vector needs N ≥ 1".into()));
    }
    crate::budget::check("N for stationary vector", u64::from(n), 20)?;
    let size = 1usize << n;
    let mut c = vec![0.0; size];
    for x in 0..size / 2 {
        let w = stationary_weight(&index_bits(x, n as usize), reading) as f64;
        c[x] = 1.0 / w;
        c[size - 1 - x] = 1.0 / w;
    }
    let total: f64 = c.iter().sum();
    c.iter_mut().for_each(|v| *v /= total);
    Ok(c)
}

/// `max |½A v - λ v|` with `v` scaled to max-norm `1`.
pub fn residual(v: &[f64], matrix: &AdjacencyMatrix, lambda: f64) -> Result<f64> {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Err(Error::Precondition("residual of the zero vector".into()));
    }
    let w: Vec<f64> = v.iter().map(|x| x / scale).collect();
    let av = matrix.mul_vec(&w)?;
    Ok(av
        .iter()
        .zip(&w)
        .fold(0.0f64, |m, (a, x)| m.max((0.5 * a - lambda * x).abs())))
}

/// `v ∘ S`: the vector with each state replaced by its complement.
pub fn complement_vector(v: &[f64]) -> Vec<f64> {
    v.iter().rev().copied().collect()
}

/// Keys whose denominator is exactly `q`, in decreasing order of the cosine.
pub fn keys_with_denominator(q: u64) -> Vec<AngleFraction> {
    (1..q)
        .filter_map(|r| AngleFraction::new(r, q).ok())
        .filter(|a| a.q() == q)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub n: u32,
    pub ell: u32,
    pub key: String,
    pub expected: usize,
    /// Rank from floating-point elimination.
    pub numeric_rank: usize,
    /// The pivot states `prefix·1·0^{ℓ+1}` carry an exact identity block.
    pub pivots_certified: bool,
}

/// Rank of the `2^{N-ℓ-2}` prefix-labelled interior vectors for one key.
pub fn prefix_family_rank(n: u32, ell: u32, root: AngleFraction) -> Result<RankReport> {
    let plen = (n - ell - 2) as usize;
    let count = 1usize << plen;
    let vectors: Vec<Eigenvector> = (0..count)
        .map(|p| eigenvector_interior(n, ell, root, &index_bits(p, plen)))
        .collect::<Result<_>>()?;
    let pivot = |p: usize| (p << (ell + 2)) | (0b10usize << ell);
    let one = Coefficient::one();
    let pivots_certified = vectors.iter().enumerate().all(|(a, v)| {
        (0..count).all(|b| {
            let c = &v.coefficients[pivot(b)];
            if a == b {
                *c == one
            } else {
                c.is_zero()
            }
        })
    });
    let rows: Vec<Vec<f64>> = vectors.iter().map(Eigenvector::values).collect();
    Ok(RankReport {
        n,
        ell,
        key: root.to_string(),
        expected: count,
        numeric_rank: numeric_rank(rows, 1e-9),
        pivots_certified,
    })
}

/// Row rank by Gaussian elimination with partial pivoting.
pub fn numeric_rank(mut rows: Vec<Vec<f64>>, tol: f64) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        if rank == rows.len() {
            break;
        }
        let (best, mag) = (rank..rows.len())
            .map(|r| (r, rows[r][col].abs()))
            .fold((rank, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= tol {
            continue;
        }
        rows.swap(rank, best);
        let pivot_row = rows[rank].clone();
        for r in rank + 1..rows.len() {
            let f = rows[r][col] / pivot_row[col];
            if f != 0.0 {
                for (x, p) in rows[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationCheck {
    pub relation: &'static str,
    pub instances: usize,
    pub max_error: f64,
}

/// Evaluates the boundary relations between coefficients of an eigenvector
/// of `½A_N` (for the runs `0 1^a 0^b`, `1 0^a 1^b` and the extreme states)
/// and reports the largest violation of each.
///
/// `key` is `None` for `λ = 1`. Relations whose `u_j ≠ 0` provisos fail for
/// the key are skipped.
pub fn check_coefficient_relations(v: &[f64], n: u32, key: Option<AngleFraction>) -> Vec<RelationCheck> {
    let lambda = key.map_or(1.0, |k| k.cos());
    let u = chebyshev_u_values(n as usize + 1, lambda);
    let u_nonzero = |j: usize| key.is_none_or(|k| !(j as u64 + 1).is_multiple_of(k.q()));
    let provisos = |upto: usize| (1..upto).all(u_nonzero);
    let nn = n as usize;
    let c = |parts: &[&[(u8, usize)]]| -> f64 {
        let bits: Vec<u8> = parts
            .iter()
            .flat_map(|p| p.iter().flat_map(|&(b, len)| std::iter::repeat_n(b, len)))
            .collect();
        debug_assert_eq!(bits.len(), nn);
        v[bits_to_index(bits)]
    };
    let mut out = Vec::new();
    let mut record = |relation: &'static str, errs: Vec<f64>| {
        out.push(RelationCheck {
            relation,
            instances: errs.len(),
            max_error: errs.into_iter().fold(0.0, f64::max),
        });
    };

    let (mut r1, mut r2, mut r3, mut r4) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for m in 0..=nn.saturating_sub(2) {
        if nn < m + 2 || !provisos(m) {
            continue;
        }
        let plen = nn - m - 2;
        for p in 0..(1usize << plen) {
            let pre: Vec<(u8, usize)> = index_bits(p, plen).into_iter().map(|b| (b, 1)).collect();
            let pre = pre.as_slice();
            for (a, b, rel) in [(0u8, 1u8, &mut r1), (1, 0, &mut r3)] {
                for j in 1..=m {
                    let lhs = c(&[pre, &[(a, 1), (b, m + 1 - j), (a, j)]])
                        + u[j - 1]
                            * (j..=m)
                                .map(|i| c(&[pre, &[(a, 1), (b, m - i), (a, 1), (b, i)]]))
                                .sum::<f64>();
                    let rhs = u[j] * c(&[pre, &[(a, 1), (b, m + 1)]]);
                    rel.push((lhs - rhs).abs());
                }
            }
            r2.push((c(&[pre, &[(0, m + 2)]]) - u[m + 1] * c(&[pre, &[(0, 1), (1, m + 1)]])).abs());
            r4.push((c(&[pre, &[(1, m + 2)]]) - u[m + 1] * c(&[pre, &[(1, 1), (0, m + 1)]])).abs());
        }
    }
    record("zero-one-runs", r1);
    record("all-zero-tail", r2);
    record("one-zero-runs", r3);
    record("all-one-tail", r4);

    if nn >= 1 && provisos(nn.saturating_sub(1)) {
        let (mut r5, mut r5d) = (Vec::new(), Vec::new());
        for j in 1..nn {
            for (a, b, rel) in [(1u8, 0u8, &mut r5), (0, 1, &mut r5d)] {
                let lhs = c(&[&[(a, nn - j), (b, j)]])
                    + u[j - 1]
                        * (j..nn)
                            .map(|i| c(&[&[(a, nn - 1 - i), (b, 1), (a, i)]]))
                            .sum::<f64>();
                let rhs = u[j] * c(&[&[(a, nn)]]);
                rel.push((lhs - rhs).abs());
            }
        }
        record("extreme-ones", r5);
        record("extreme-zeros", r5d);
        let z = c(&[&[(0, nn)]]);
        let o = c(&[&[(1, nn)]]);
        record("extremes", vec![(z - u[nn] * o).abs(), (o - u[nn] * z).abs()]);
    }
    out
}
