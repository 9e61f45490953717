//! The Devil's staircase `f(x) = Σ_{k≥1} ⌊kx⌋ / 2^k` and the limit of the
//! eigenvalue distribution, `F_∞(x) = 1 - f(arccos(x)/π)`.
//!
//! `f` is extended by `0` for `x < 0` and `1` for `x ≥ 1`. It is right
//! continuous and jumps by `1/(2^q - 1)` at every reduced `r/q ∈ (0, 1)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};

use crate::chebyshev::AngleFraction;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum StaircaseArg {
    Exact(Ratio<i64>),
    Float(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StaircaseMode {
    /// The defining series truncated after `K` terms.
    FloorSeries(u32),
    /// Closed-form sum over one period, exact at rationals.
    JumpForm,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rational_to_f64(r),
            Value::Float(x) => *x,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaircaseValue {
    pub value: Value,
    /// Upper bound on `f(x) - value`, which is never negative.
    pub error_bound: f64,
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `(K + 2) / 2^K`, the tail `Σ_{k>K} k/2^k`.
pub fn truncation_bound(terms: u32) -> f64 {
    (f64::from(terms) + 2.0) * (-f64::from(terms)).exp2()
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

/// Evaluates `f` in the requested mode.
pub fn devils_staircase(x: &StaircaseArg, mode: StaircaseMode) -> Result<StaircaseValue> {
    match (x, mode) {
        (StaircaseArg::Float(x), StaircaseMode::FloorSeries(k)) => Ok(floor_series_f64(*x, k)),
        (StaircaseArg::Exact(x), StaircaseMode::FloorSeries(k)) => {
            let x = BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()));
            Ok(StaircaseValue {
                value: Value::Exact(floor_series_exact(&x, k)),
                error_bound: if x > BigRational::zero() && x < BigRational::one() {
                    truncation_bound(k)
                } else {
                    0.0
                },
            })
        }
        (StaircaseArg::Exact(x), StaircaseMode::JumpForm) => {
            if *x.numer() <= 0 || x.numer() >= x.denom() {
                return Err(Error::Usage(format!("jump form needs a rational in (0,1), got {x}")));
            }
            Ok(StaircaseValue {
                value: Value::Exact(jump_form(*x.numer() as u64, *x.denom() as u64)),
                error_bound: 0.0,
            })
        }
        (StaircaseArg::Float(x), StaircaseMode::JumpForm) => Err(Error::Usage(format!(
            "jump form needs an exact rational argument, got float {x}"
        ))),
    }
}

/// Truncated series in floating point.
pub fn floor_series_f64(x: f64, terms: u32) -> StaircaseValue {
    if x < 0.0 {
        return StaircaseValue {
            value: Value::Float(0.0),
            error_bound: 0.0,
        };
    }
    if x >= 1.0 {
        return StaircaseValue {
            value: Value::Float(1.0),
            error_bound: 0.0,
        };
    }
    let mut sum = 0.0;
    for k in 1..=terms {
        sum += (f64::from(k) * x).floor() * (-f64::from(k)).exp2();
    }
    StaircaseValue {
        value: Value::Float(sum),
        error_bound: truncation_bound(terms),
    }
}

/// Truncated series in exact arithmetic (a lower bound on `f(x)`).
pub fn floor_series_exact(x: &BigRational, terms: u32) -> BigRational {
    if *x < BigRational::zero() {
        return BigRational::zero();
    }
    if *x >= BigRational::one() {
        return BigRational::one();
    }
    let denom = pow2(u64::from(terms));
    let mut numer = BigInt::zero();
    for k in 1..=u64::from(terms) {
        let fl = (x * BigRational::from_integer(BigInt::from(k))).floor().to_integer();
        numer += fl * pow2(u64::from(terms) - k);
    }
    BigRational::new(numer, denom)
}

/// `f(r/q) = Σ_{p≥1} 2^(-⌊pq/r⌋) + 1/(2^q - 1)` for reduced `0 < r/q < 1`.
///
/// Writing `p = p0 + r t` gives `⌊pq/r⌋ = ⌊p0 q/r⌋ + q t`, so the series is
/// `2^q/(2^q - 1)` times the finite sum over `p0 = 1..=r`.
pub fn jump_form(r: u64, q: u64) -> BigRational {
    let g = r.gcd(&q);
    let (r, q) = (r / g, q / g);
    let period: BigRational = (1..=r)
        .map(|p0| BigRational::new(BigInt::one(), pow2(p0 * q / r)))
        .sum();
    let two_q = BigRational::from_integer(pow2(q));
    let geometric = &two_q / (&two_q - BigRational::one());
    period * geometric + jump_size(q)
}

/// `Δf = 1/(2^q - 1)` at any reduced `r/q`.
pub fn jump_size(q: u64) -> BigRational {
    BigRational::new(BigInt::one(), pow2(q) - BigInt::one())
}

/// The full floor series at `r/q` summed in closed form.
///
/// With `k = k0 + q t`, `⌊k r/q⌋ = ⌊k0 r/q⌋ + r t`; the sums over `t` are
/// `Σ z^t = 1/(1-z)` and `Σ t z^t = z/(1-z)^2` with `z = 2^(-q)`.
pub fn floor_series_closed_form(r: u64, q: u64) -> BigRational {
    periodic_series(r, q, |k0| (k0 * r) / q)
}

/// `f(r/q - 0) = Σ_k (⌈k r/q⌉ - 1)/2^k`, the left limit, in closed form.
pub fn left_limit_closed_form(r: u64, q: u64) -> BigRational {
    periodic_series(r, q, |k0| (k0 * r).div_ceil(q) - 1)
}

fn periodic_series(r: u64, q: u64, head: impl Fn(u64) -> u64) -> BigRational {
    let z = BigRational::new(BigInt::one(), pow2(q));
    let one = BigRational::one();
    let s0 = &one / (&one - &z);
    let s1 = &z / ((&one - &z) * (&one - &z));
    let r_big = BigRational::from_integer(BigInt::from(r));
    (1..=q)
        .map(|k0| {
            let w = BigRational::new(BigInt::one(), pow2(k0));
            let h = BigRational::from_integer(BigInt::from(head(k0)));
            w * (h * &s0 + &r_big * &s1)
        })
        .sum()
}

/// `Σ_{q=2}^{Q} φ(q)/(2^q - 1)`; tends to `1`.
pub fn totient_sum(max_q: u64) -> Result<BigRational> {
    if max_q < 2 {
        return Err(Error::Precondition("totient sum needs Q ≥ 2".into()));
    }
    Ok((2..=max_q)
        .map(|q| BigRational::from_integer(BigInt::from(euler_phi(q))) * jump_size(q))
        .sum())
}

pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitValue {
    pub value: f64,
    pub error_bound: f64,
}

/// `F_∞(x) = 1 - f(arccos(x)/π)` with the truncated floor series.
pub fn limit_distribution(x: f64, terms: u32) -> LimitValue {
    if x <= -1.0 {
        return LimitValue {
            value: 0.0,
            error_bound: 0.0,
        };
    }
    if x >= 1.0 {
        return LimitValue {
            value: 1.0,
            error_bound: 0.0,
        };
    }
    let t = x.acos() / std::f64::consts::PI;
    let f = floor_series_f64(t, terms);
    LimitValue {
        value: 1.0 - f.value.to_f64(),
        error_bound: f.error_bound,
    }
}

/// `F_∞` at `cos(π a)` exactly, using the right-continuous value of `f`.
pub fn limit_distribution_at(a: &AngleFraction) -> BigRational {
    BigRational::one() - jump_form(a.r(), a.q())
}

/// The finite-`n` function of the limit argument,
/// `f_n(x) = Σ_{p=1}^{n-1} 2^(1-⌈p/x⌉) - (n-1) 2^(-n)`.
///
/// A convergence diagnostic only; `F_N` itself comes from the exact spectrum.
pub fn finite_fn(n: u32, x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) || n < 1 {
        return Err(Error::Precondition(format!("finite f_n needs n ≥ 1 and 0 < x < 1, got n = {n}, x = {x}")));
    }
    let mut sum = 0.0;
    for p in 1..n {
        let c = (f64::from(p) / x).ceil();
        sum += (1.0 - c.min(2000.0)).exp2();
    }
    Ok(sum - f64::from(n - 1) * (-f64::from(n)).exp2())
}
