//! Chebyshev polynomials of the second kind and exact eigenvalue keys.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::IntPolynomial;

/// `U_k`: `U_0 = 1`, `U_1 = 2λ`, `U_{k+1} = 2λ U_k - U_{k-1}`.
pub fn chebyshev_u(k: usize) -> IntPolynomial {
    chebyshev_u_family(k).pop().unwrap()
}

/// `U_0, ..., U_k`.
pub fn chebyshev_u_family(k: usize) -> Vec<IntPolynomial> {
    let two_x = IntPolynomial::from_i64(&[0, 2]);
    recurrence(k, IntPolynomial::one(), two_x.clone(), &two_x)
}

/// `Ũ_k(λ) = U_k(-λ/2)` from its own integer recursion
/// `Ũ_0 = 1`, `Ũ_1 = -λ`, `Ũ_{k+1} = -λ Ũ_k - Ũ_{k-1}`.
pub fn chebyshev_u_sub(k: usize) -> IntPolynomial {
    chebyshev_u_sub_family(k).pop().unwrap()
}

/// `Ũ_0, ..., Ũ_k`.
pub fn chebyshev_u_sub_family(k: usize) -> Vec<IntPolynomial> {
    let minus_x = IntPolynomial::from_i64(&[0, -1]);
    recurrence(k, IntPolynomial::one(), minus_x.clone(), &minus_x)
}

fn recurrence(
    k: usize,
    p0: IntPolynomial,
    p1: IntPolynomial,
    step: &IntPolynomial,
) -> Vec<IntPolynomial> {
    let mut out = vec![p0, p1];
    while out.len() <= k {
        let len = out.len();
        let next = &(step * &out[len - 1]) - &out[len - 2];
        out.push(next);
    }
    out.truncate(k + 1);
    out
}

/// `U_0(x), ..., U_k(x)` in floating point by the three-term recursion.
pub fn chebyshev_u_values(k: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(1.0);
    if k >= 1 {
        out.push(2.0 * x);
    }
    for i in 2..=k {
        let v = 2.0 * x * out[i - 1] - out[i - 2];
        out.push(v);
    }
    out
}

/// `(U_{k+1})^2 - U_{k+2} U_k == 1` as an exact polynomial identity, for
/// both `U` and `Ũ`.
pub fn verify_pell_identity(k: usize) -> bool {
    let check = |fam: &[IntPolynomial]| {
        let lhs = &(&fam[k + 1] * &fam[k + 1]) - &(&fam[k + 2] * &fam[k]);
        lhs == IntPolynomial::one()
    };
    check(&chebyshev_u_family(k + 2)) && check(&chebyshev_u_sub_family(k + 2))
}

/// A reduced fraction `r/q` with `0 < r < q`, standing for the angle `πr/q`.
///
/// It keys the eigenvalue `cos(πr/q)` of `½A_N` (equivalently `2cos(πr/q)` of
/// `A_N`) exactly. The ordering follows the cosine: `a < b` iff
/// `cos(π a) < cos(π b)`, i.e. iff `a.r * b.q > b.r * a.q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AngleFraction {
    r: u64,
    q: u64,
}

impl AngleFraction {
    /// Reduces `r/q`; fails unless `0 < r < q`.
    pub fn new(r: u64, q: u64) -> Result<Self> {
        if r == 0 || r >= q {
            return Err(Error::Precondition(format!(
                "angle fraction {r}/{q} must satisfy 0 < r < q"
            )));
        }
        let g = r.gcd(&q);
        Ok(AngleFraction { r: r / g, q: q / g })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `cos(πr/q)`, an eigenvalue of `½A_N`.
    pub fn cos(&self) -> f64 {
        (std::f64::consts::PI * self.r as f64 / self.q as f64).cos()
    }

    /// `2cos(πr/q)`, an eigenvalue of `A_N`.
    pub fn eigenvalue(&self) -> f64 {
        2.0 * self.cos()
    }

    /// The angle as a fraction of π.
    pub fn turn(&self) -> f64 {
        self.r as f64 / self.q as f64
    }

    /// True iff `cos(πr/q)` is a zero of `U_k`, i.e. `q | k + 1`.
    pub fn is_zero_of_u(&self, k: u64) -> bool {
        (k + 1).is_multiple_of(self.q)
    }
}

impl Ord for AngleFraction {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = u128::from(other.r) * u128::from(self.q);
        let rhs = u128::from(self.r) * u128::from(other.q);
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for AngleFraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for AngleFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.r, self.q)
    }
}

impl std::str::FromStr for AngleFraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (r, q) = s
            .split_once('/')
            .ok_or_else(|| Error::Usage(format!("expected r/q, got {s:?}")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Error::Usage(format!("expected r/q, got {s:?}")))
        };
        AngleFraction::new(parse(r)?, parse(q)?)
    }
}

/// The zeros `cos(π(i+1)/(k+1))`, `i = 0..k`, of `U_k` as reduced keys, in
/// decreasing order of the cosine.
pub fn chebyshev_zeros(k: u64) -> Result<Vec<AngleFraction>> {
    if k == 0 {
        return Err(Error::Precondition("U_0 has no zeros".into()));
    }
    (1..=k).map(|j| AngleFraction::new(j, k + 1)).collect()
}

/// Exact sign of `U_ℓ(cos(πr/q))` when `q = ℓ + 2`: the value is `(-1)^(r+1)`.
pub fn u_before_root_sign(root: &AngleFraction) -> i8 {
    if root.r() % 2 == 1 {
        1
    } else {
        -1
    }
}

/// `U_k` evaluated at a BigInt point; test helper for exact checks.
pub fn eval_u_int(k: usize, x: &BigInt) -> BigInt {
    chebyshev_u(k).eval_int(x)
}
