//! Brute-force verification: exact characteristic polynomials by
//! evaluation and interpolation, symbolic minors of `T_k = A_k - λI`, and
//! the recursion identities between them.
//!
//! Determinants are evaluated at the consecutive integers
//! `-⌊n/2⌋, ..., n - ⌊n/2⌋`. Up to order [`BAREISS_MAX_ORDER`] each value is
//! an exact fraction-free (Bareiss) elimination over big integers. Above it,
//! each value is computed modulo a set of primes below `2^31`, interpolated
//! modulo each prime and recombined by Chinese remaindering, with enough
//! primes to cover a priori coefficient bounds. No floating point is used.

mod lemmas;
pub mod modular;

pub use lemmas::{verify_lemma_recursions, LemmaCheck, LemmaStatus};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::{check, Budget};
use crate::error::{Error, Result};
use crate::matrix::AdjacencyMatrix;
use crate::poly::IntPolynomial;
use modular::{det_mont, interpolate_consecutive_mod, modulus_covers, primes_below_2_31, Crt, Mont};

pub const BAREISS_MAX_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Auto,
    Bareiss,
    Modular,
}

/// A square pencil `M0 - λ M1` with small integer entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pencil {
    pub m0: Vec<Vec<i64>>,
    pub m1: Vec<Vec<i64>>,
}

impl Pencil {
    /// `M - λI`.
    pub fn shifted(m: Vec<Vec<i64>>) -> Self {
        let n = m.len();
        let m1 = (0..n)
            .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
            .collect();
        Pencil { m0: m, m1 }
    }

    pub fn order(&self) -> usize {
        self.m0.len()
    }

    fn at(&self, x: i64) -> Vec<Vec<i64>> {
        self.m0
            .iter()
            .zip(&self.m1)
            .map(|(r0, r1)| r0.iter().zip(r1).map(|(a, b)| a - x * b).collect())
            .collect()
    }

    /// Deletes one row and one column.
    pub fn minor(&self, row: usize, col: usize) -> Pencil {
        let cut = |m: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
            m.iter()
                .enumerate()
                .filter(|(i, _)| *i != row)
                .map(|(_, r)| {
                    r.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != col)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect()
        };
        Pencil {
            m0: cut(&self.m0),
            m1: cut(&self.m1),
        }
    }

    /// 180° rotation of both matrices.
    pub fn rotated(&self) -> Pencil {
        let rot = |m: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
            m.iter().rev().map(|r| r.iter().rev().copied().collect()).collect()
        };
        Pencil {
            m0: rot(&self.m0),
            m1: rot(&self.m1),
        }
    }

    pub fn transposed(&self) -> Pencil {
        let tr = |m: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
            let n = m.len();
            (0..n).map(|j| (0..n).map(|i| m[i][j]).collect()).collect()
        };
        Pencil {
            m0: tr(&self.m0),
            m1: tr(&self.m1),
        }
    }

    /// `B` with `|coeff| ≤ B` for every coefficient of `det(M0 - λ M1)`,
    /// returned as `B^2 = 4^n Π_j max(1, |col_j(M0)|^2, |col_j(M1)|^2)`.
    ///
    /// Each coefficient is a sum of at most `2^n` determinants whose columns
    /// are taken from `M0` or `M1`; Hadamard bounds each of them.
    pub fn coefficient_bound_sq(&self) -> BigInt {
        let n = self.order();
        let mut b2 = BigInt::one() << (2 * n);
        for j in 0..n {
            let s0: i64 = (0..n).map(|i| self.m0[i][j] * self.m0[i][j]).sum();
            let s1: i64 = (0..n).map(|i| self.m1[i][j] * self.m1[i][j]).sum();
            b2 *= BigInt::from(s0.max(s1).max(1));
        }
        b2
    }
}

/// Exact fraction-free determinant.
pub fn det_bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, r);
            negate = !negate;
        }
        let (top, bottom) = a.split_at_mut(k + 1);
        let prow = &top[k];
        for row in bottom.iter_mut() {
            for j in k + 1..n {
                let v = &row[j] * &prow[k] - &row[k] * &prow[j];
                row[j] = v / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = prow[k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

pub fn det_bareiss_i64(a: &[Vec<i64>]) -> BigInt {
    det_bareiss(a.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect())
}

/// First evaluation point for an order-`n` determinant.
fn first_point(n: usize) -> i64 {
    -((n / 2) as i64)
}

/// Exact interpolation through `(x0 + i, y[i])` by forward differences:
/// `n!·P(x) = Σ_k Δ^k y_0 · (n!/k!) · Π_{i<k} (x - x0 - i)`.
pub fn interpolate_consecutive(x0: i64, y: &[BigInt]) -> IntPolynomial {
    let n = y.len();
    let mut diffs = y.to_vec();
    let mut lead = Vec::with_capacity(n);
    for k in 0..n {
        lead.push(diffs[0].clone());
        for i in 0..n - k - 1 {
            diffs[i] = &diffs[i + 1] - &diffs[i];
        }
    }
    let deg = n.saturating_sub(1);
    let fact = |k: usize| (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
    let total = fact(deg);
    let mut acc = vec![BigInt::zero(); n.max(1)];
    let mut basis = vec![BigInt::one()];
    let mut ratio = total.clone(); // deg!/k!
    for (k, d) in lead.iter().enumerate() {
        if k > 0 {
            ratio /= BigInt::from(k);
        }
        let scale = d * &ratio;
        for (o, b) in acc.iter_mut().zip(&basis) {
            *o += &scale * b;
        }
        let root = BigInt::from(x0 + k as i64);
        let mut next = vec![BigInt::zero(); basis.len() + 1];
        for (i, b) in basis.iter().enumerate() {
            next[i + 1] += b;
            next[i] -= &root * b;
        }
        basis = next;
    }
    IntPolynomial::new(
        acc.into_iter()
            .map(|c| {
                debug_assert!((&c % &total).is_zero());
                c / &total
            })
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PencilDetReport {
    pub poly: IntPolynomial,
    pub backend: Backend,
    pub order: usize,
    pub points: usize,
    /// Number of primes used by the modular backend.
    pub primes: usize,
    /// The interpolant reproduced direct determinants at three fresh points.
    pub self_check: bool,
}

/// `det(M0 - λ M1)` as an exact polynomial.
pub fn pencil_det(p: &Pencil, backend: Backend, budget: &Budget) -> Result<PencilDetReport> {
    let n = p.order();
    check("oracle matrix order", n as u64, budget.max_oracle_order as u64)?;
    if p.m0.iter().chain(&p.m1).any(|r| r.len() != n) || p.m1.len() != n {
        return Err(Error::Precondition("pencil matrices must be square and equal-sized".into()));
    }
    let use_bareiss = match backend {
        Backend::Auto => n <= BAREISS_MAX_ORDER,
        Backend::Bareiss => true,
        Backend::Modular => false,
    };
    if use_bareiss {
        Ok(bareiss_pencil(p))
    } else {
        Ok(modular_pencil(p))
    }
}

fn bareiss_pencil(p: &Pencil) -> PencilDetReport {
    let n = p.order();
    let x0 = first_point(n);
    let values: Vec<BigInt> = (0..=n as i64)
        .into_par_iter()
        .map(|i| det_bareiss_i64(&p.at(x0 + i)))
        .collect();
    let poly = interpolate_consecutive(x0, &values);
    let self_check = (1..=3).all(|i| {
        let x = x0 + n as i64 + i;
        poly.eval_int(&BigInt::from(x)) == det_bareiss_i64(&p.at(x))
    });
    PencilDetReport {
        poly,
        backend: Backend::Bareiss,
        order: n,
        points: n + 1,
        primes: 0,
        self_check,
    }
}

fn det_mod_at(p: &Pencil, x: i64, m: &Mont) -> u32 {
    let n = p.order();
    let mut flat = Vec::with_capacity(n * n);
    for (r0, r1) in p.m0.iter().zip(&p.m1) {
        for (a, b) in r0.iter().zip(r1) {
            flat.push(m.to_mont(m.reduce_i64(a - x * b)));
        }
    }
    det_mont(m, &mut flat, n)
}

fn modular_pencil(p: &Pencil) -> PencilDetReport {
    let n = p.order();
    let x0 = first_point(n);
    let bound_sq = p.coefficient_bound_sq();
    let mut crt = Crt::new(n + 1);
    let mut primes = primes_below_2_31();
    let mut used = Vec::new();
    while !modulus_covers(&crt.modulus, &bound_sq) {
        let q = primes.next().expect("enough primes below 2^31");
        let m = Mont::new(q);
        let values: Vec<u32> = (0..=n as i64)
            .into_par_iter()
            .map(|i| det_mod_at(p, x0 + i, &m))
            .collect();
        crt.add(&interpolate_consecutive_mod(x0, &values, q), q);
        used.push(q);
    }
    let poly = IntPolynomial::new(crt.symmetric());
    // an unused prime makes the check independent of the reconstruction
    let fresh = Mont::new(primes.next().expect("a spare prime"));
    let fp = BigInt::from(fresh.p);
    let self_check = (1..=3).all(|i| {
        let x = x0 + n as i64 + i;
        let direct = det_mod_at(p, x, &fresh);
        let mut v = poly.eval_int(&BigInt::from(x)) % &fp;
        if v.is_negative() {
            v += &fp;
        }
        v == BigInt::from(direct)
    });
    PencilDetReport {
        poly,
        backend: Backend::Modular,
        order: n,
        points: n + 1,
        primes: used.len(),
        self_check,
    }
}

/// `det(M - λI)` for a dense integer matrix.
pub fn charpoly_dense(m: &[Vec<i64>], budget: &Budget) -> Result<IntPolynomial> {
    Ok(charpoly_dense_with(m, Backend::Auto, budget)?.poly)
}

pub fn charpoly_dense_with(m: &[Vec<i64>], backend: Backend, budget: &Budget) -> Result<PencilDetReport> {
    check("oracle matrix order", m.len() as u64, budget.max_oracle_order as u64)?;
    pencil_det(&Pencil::shifted(m.to_vec()), backend, budget)
}

/// `det(A - λI)` of an adjacency matrix.
pub fn charpoly_of(a: &AdjacencyMatrix, budget: &Budget) -> Result<IntPolynomial> {
    check("oracle matrix order", a.order() as u64, budget.max_oracle_order as u64)?;
    charpoly_dense(&a.to_dense(budget)?, budget)
}

/// Which row and column of `T_k` are deleted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MinorKind {
    /// Upper row, right column: `φ_k = det Q_k`.
    Q,
    /// Lower row, right column: `ψ_k = det P_k`.
    P,
    /// Lower row, left column.
    S,
}

impl std::str::FromStr for MinorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Q" | "q" => Ok(MinorKind::Q),
            "P" | "p" => Ok(MinorKind::P),
            "S" | "s" => Ok(MinorKind::S),
            _ => Err(Error::Usage(format!("unknown minor kind {s:?} (expected Q, P or S)"))),
        }
    }
}

/// `T_k = A_k - λI` as a pencil.
pub fn t_pencil(k: u32, budget: &Budget) -> Result<Pencil> {
    let a = AdjacencyMatrix::build_recursive(k, crate::state::Variant::Gamma, budget)?;
    Ok(Pencil::shifted(a.to_dense(budget)?))
}

pub fn minor_pencil(k: u32, kind: MinorKind, budget: &Budget) -> Result<Pencil> {
    if k == 0 {
        return Err(Error::Precondition("minors need k ≥ 1".into()));
    }
    check("minor level k", u64::from(k), u64::from(budget.max_minor_k))?;
    let t = t_pencil(k, budget)?;
    let last = t.order() - 1;
    Ok(match kind {
        MinorKind::Q => t.minor(0, last),
        MinorKind::P => t.minor(last, last),
        MinorKind::S => t.minor(last, 0),
    })
}

/// Determinant of a minor of `T_k` as a polynomial in `λ`.
pub fn minor_det(k: u32, kind: MinorKind, budget: &Budget) -> Result<IntPolynomial> {
    Ok(pencil_det(&minor_pencil(k, kind, budget)?, Backend::Auto, budget)?.poly)
}
