//! Closed-form characteristic polynomials and spectra of `A_N` and `A′_N`.
//!
//! Γ:  `χ_N(λ) = Ũ_{N+1} · Π_{i=0}^{N-1} Ũ_i^(2^(N-i-1))`
//! Γ′: `χ′_N(λ) = (2 - λ) · Ũ_N · Π_{i=0}^{N-1} Ũ_i^(2^(N-i-1))`
//!
//! with `Ũ_k(λ) = U_k(-λ/2)`. The zeros of `Ũ_i` are `2cos(πj/(i+1))`, so a
//! reduced key `r/q` is an eigenvalue of every factor `Ũ_i` with `q | i + 1`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::budget::Budget;
use crate::chebyshev::{chebyshev_u_sub_family, AngleFraction};
use crate::error::{Error, Result};
use crate::fmt::f64_17;
use crate::poly::IntPolynomial;
use crate::state::Variant;

/// Width of the band around an eigenvalue inside which a floating-point
/// query is reported as ambiguous.
pub const GUARD_BAND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CharFactor {
    /// `Ũ_i(λ) = U_i(-λ/2)`.
    #[serde(rename = "U")]
    ChebyshevSub(usize),
    /// `2 - λ`.
    #[serde(rename = "two_minus_lambda")]
    TwoMinusLambda,
}

impl CharFactor {
    pub fn degree(&self) -> usize {
        match self {
            CharFactor::ChebyshevSub(i) => *i,
            CharFactor::TwoMinusLambda => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactoredCharPoly {
    pub n: u32,
    pub variant: Variant,
    /// `(factor, multiplicity)`; the trivial factor `Ũ_0 = 1` is kept so the
    /// exponent pattern `2^(N-i-1)` is visible.
    #[serde(serialize_with = "factors_as_strings")]
    pub factors: Vec<(CharFactor, BigUint)>,
}

fn factors_as_strings<S: serde::Serializer>(
    factors: &[(CharFactor, BigUint)],
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = serializer.serialize_seq(Some(factors.len()))?;
    for (f, m) in factors {
        seq.serialize_element(&(f, m.to_string()))?;
    }
    seq.end()
}

/// Factor list of the characteristic polynomial.
pub fn char_poly_factored(n: u32, variant: Variant) -> Result<FactoredCharPoly> {
    if n == 0 {
        return Err(Error::Precondition("closed form needs N ≥ 1".into()));
    }
    let mut factors = Vec::with_capacity(n as usize + 2);
    match variant {
        Variant::Gamma => {
            factors.push((CharFactor::ChebyshevSub(n as usize + 1), BigUint::one()));
        }
        Variant::GammaPrime => {
            factors.push((CharFactor::TwoMinusLambda, BigUint::one()));
            factors.push((CharFactor::ChebyshevSub(n as usize), BigUint::one()));
        }
    }
    for i in (0..n).rev() {
        factors.push((
            CharFactor::ChebyshevSub(i as usize),
            BigUint::one() << (n - i - 1),
        ));
    }
    Ok(FactoredCharPoly {
        n,
        variant,
        factors,
    })
}

impl FactoredCharPoly {
    pub fn degree(&self) -> BigUint {
        self.factors
            .iter()
            .map(|(f, m)| BigUint::from(f.degree()) * m)
            .sum()
    }

    /// Multiplies the factors out exactly.
    pub fn expand(&self, budget: &Budget) -> Result<IntPolynomial> {
        Budget::check("N (expand)", u64::from(self.n), u64::from(budget.max_expand_n))?;
        let top = self
            .factors
            .iter()
            .filter_map(|(f, _)| match f {
                CharFactor::ChebyshevSub(i) => Some(*i),
                CharFactor::TwoMinusLambda => None,
            })
            .max()
            .unwrap_or(0);
        let family = chebyshev_u_sub_family(top);
        let mut acc = IntPolynomial::one();
        for (factor, mult) in &self.factors {
            let base = match factor {
                CharFactor::ChebyshevSub(i) => family[*i].clone(),
                CharFactor::TwoMinusLambda => IntPolynomial::from_i64(&[2, -1]),
            };
            // multiplicities are ≤ 2^(N-1) with N capped above
            let e = mult.to_u64().expect("multiplicity fits in u64 under the expand cap");
            acc = &acc * &base.pow(e);
        }
        Ok(acc)
    }

    /// Human-readable factor product, e.g. `U_1(-λ/2)^2 · U_2(-λ/2) · U_4(-λ/2)`.
    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self
            .factors
            .iter()
            .filter(|(f, _)| *f != CharFactor::ChebyshevSub(0))
            .map(|(f, m)| {
                let base = match f {
                    CharFactor::ChebyshevSub(i) => format!("U_{i}(-λ/2)"),
                    CharFactor::TwoMinusLambda => "(2 - λ)".to_string(),
                };
                if m.is_one() {
                    base
                } else {
                    format!("{base}^{m}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" · ")
        }
    }
}

/// Exact spectral key: an angle fraction, or the eigenvalue `2` of `A′_N`
/// (eigenvalue `1` of `½A′_N`), which sorts above every angle key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectralKey {
    Angle(AngleFraction),
    Unit,
}

impl SpectralKey {
    /// Eigenvalue of `½A`.
    pub fn half_eigenvalue(&self) -> f64 {
        match self {
            SpectralKey::Angle(a) => a.cos(),
            SpectralKey::Unit => 1.0,
        }
    }

    /// Eigenvalue of `A`.
    pub fn eigenvalue(&self) -> f64 {
        2.0 * self.half_eigenvalue()
    }

    /// `(r, q)` with `Unit` written as `0/1`.
    pub fn as_pair(&self) -> (u64, u64) {
        match self {
            SpectralKey::Angle(a) => (a.r(), a.q()),
            SpectralKey::Unit => (0, 1),
        }
    }
}

impl Serialize for SpectralKey {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let (r, q) = self.as_pair();
        let mut s = serializer.serialize_struct("SpectralKey", 2)?;
        s.serialize_field("r", &r)?;
        s.serialize_field("q", &q)?;
        s.end()
    }
}

impl Ord for SpectralKey {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (SpectralKey::Unit, SpectralKey::Unit) => Ordering::Equal,
            (SpectralKey::Unit, _) => Ordering::Greater,
            (_, SpectralKey::Unit) => Ordering::Less,
            (SpectralKey::Angle(a), SpectralKey::Angle(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for SpectralKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Algebraic multiplicities keyed exactly, sorted by increasing eigenvalue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumTable {
    pub n: u32,
    pub variant: Variant,
    entries: Vec<(SpectralKey, BigUint)>,
}

/// Multiplicity shared by every reduced key with denominator `q`.
fn multiplicity_for_denominator(n: u64, q: u64, variant: Variant) -> BigUint {
    let mut mult = BigUint::zero();
    // factors Ũ_i, i = m q - 1 ∈ [1, N-1], each with multiplicity 2^(N-i-1)
    let mut mq = q;
    while mq <= n {
        mult += BigUint::one() << (n - mq);
        mq += q;
    }
    let top = match variant {
        Variant::Gamma => n + 2,
        Variant::GammaPrime => n + 1,
    };
    if top % q == 0 {
        mult += BigUint::one();
    }
    mult
}

/// Exact spectrum from the closed form; no matrix is built.
pub fn spectrum(n: u32, variant: Variant) -> Result<SpectrumTable> {
    if n == 0 {
        return Err(Error::Precondition("closed form needs N ≥ 1".into()));
    }
    let n64 = u64::from(n);
    let mut entries = Vec::new();
    for q in 2..=n64 + 2 {
        let mult = multiplicity_for_denominator(n64, q, variant);
        if mult.is_zero() {
            continue;
        }
        for r in 1..q {
            if num_integer::gcd(r, q) == 1 {
                entries.push((SpectralKey::Angle(AngleFraction::new(r, q)?), mult.clone()));
            }
        }
    }
    if variant == Variant::GammaPrime {
        entries.push((SpectralKey::Unit, BigUint::one()));
    }
    entries.sort_by_key(|a| a.0);
    Ok(SpectrumTable {
        n,
        variant,
        entries,
    })
}

/// Zeros of all factors, aggregated by exact key. Independent of the
/// per-denominator formula used by [`spectrum`]; used as a cross-check.
pub fn spectrum_by_factor_roots(f: &FactoredCharPoly) -> SpectrumTable {
    let mut acc: BTreeMap<SpectralKey, BigUint> = BTreeMap::new();
    for (factor, mult) in &f.factors {
        match factor {
            CharFactor::ChebyshevSub(i) => {
                for j in 1..=*i as u64 {
                    let key = SpectralKey::Angle(AngleFraction::new(j, *i as u64 + 1).unwrap());
                    *acc.entry(key).or_default() += mult;
                }
            }
            CharFactor::TwoMinusLambda => *acc.entry(SpectralKey::Unit).or_default() += mult,
        }
    }
    SpectrumTable {
        n: f.n,
        variant: f.variant,
        entries: acc.into_iter().collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionValue {
    pub value: BigRational,
    /// The float query fell within [`GUARD_BAND`] of an eigenvalue, so the
    /// strict comparison may be decided by rounding.
    pub ambiguous: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRow {
    pub r: u64,
    pub q: u64,
    pub eigenvalue_float: f64,
    pub multiplicity: String,
}

impl SpectrumTable {
    pub fn entries(&self) -> &[(SpectralKey, BigUint)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_multiplicity(&self) -> BigUint {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    pub fn multiplicity(&self, key: &SpectralKey) -> BigUint {
        self.entries
            .binary_search_by(|(k, _)| k.cmp(key))
            .map(|i| self.entries[i].1.clone())
            .unwrap_or_default()
    }

    /// Largest key (the leading eigenvalue).
    pub fn leading(&self) -> Option<SpectralKey> {
        self.entries.last().map(|(k, _)| *k)
    }

    fn normalizer(&self) -> BigInt {
        BigInt::one() << self.n
    }

    /// `F_N` at an exact key: the fraction of eigenvalues of `½A` strictly
    /// below `cos(π·key)`.
    pub fn distribution_at_key(&self, key: &SpectralKey) -> BigRational {
        let below: BigUint = self
            .entries
            .iter()
            .take_while(|(k, _)| k < key)
            .map(|(_, m)| m)
            .sum();
        BigRational::new(BigInt::from(below), self.normalizer())
    }

    /// `F_N(x)` for a float query.
    pub fn distribution(&self, x: f64) -> DistributionValue {
        let mut below = BigUint::zero();
        let mut ambiguous = false;
        for (k, m) in &self.entries {
            let ev = k.half_eigenvalue();
            if (ev - x).abs() <= GUARD_BAND {
                ambiguous = true;
            }
            if ev < x {
                below += m;
            }
        }
        DistributionValue {
            value: BigRational::new(BigInt::from(below), self.normalizer()),
            ambiguous,
        }
    }

    pub fn rows(&self) -> Vec<SpectrumRow> {
        self.entries
            .iter()
            .map(|(k, m)| {
                let (r, q) = k.as_pair();
                SpectrumRow {
                    r,
                    q,
                    eigenvalue_float: k.eigenvalue(),
                    multiplicity: m.to_string(),
                }
            })
            .collect()
    }

    /// CSV with a schema comment line, then the header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# schema: hyspectra.spectrum.v1\nr,q,eigenvalue_float,multiplicity\n");
        for row in self.rows() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.r,
                row.q,
                f64_17(row.eigenvalue_float),
                row.multiplicity
            ));
        }
        out
    }
}

/// Multiplicity changes from `from` to `to`: `(removed, added)`.
pub fn spectrum_diff(
    from: &SpectrumTable,
    to: &SpectrumTable,
) -> (Vec<(SpectralKey, BigUint)>, Vec<(SpectralKey, BigUint)>) {
    let mut keys: Vec<SpectralKey> = from
        .entries
        .iter()
        .chain(to.entries.iter())
        .map(|(k, _)| *k)
        .collect();
    keys.sort();
    keys.dedup();
    let (mut removed, mut added) = (Vec::new(), Vec::new());
    for k in keys {
        let a = from.multiplicity(&k);
        let b = to.multiplicity(&k);
        match a.cmp(&b) {
            Ordering::Greater => removed.push((k, a - b)),
            Ordering::Less => added.push((k, b - a)),
            Ordering::Equal => {}
        }
    }
    (removed, added)
}

/// Zeros of `U_k` aggregated by reduced key (all multiplicity one).
pub fn chebyshev_root_multiset(k: u64) -> Vec<(SpectralKey, BigUint)> {
    let mut keys: Vec<SpectralKey> = (1..=k)
        .map(|j| SpectralKey::Angle(AngleFraction::new(j, k + 1).unwrap()))
        .collect();
    keys.sort();
    keys.into_iter().map(|k| (k, BigUint::one())).collect()
}
