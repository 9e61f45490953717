//! Preisach / LIFO states and the transition rules of the graphs Γ and Γ′.
//!
//! A state is an `N`-tuple `(x_0, ..., x_{N-1})` read left to right. It is
//! packed into a `u64` with `x_0` as the most significant of the `N` low bits,
//! so the packed value is also the vertex index used by [`crate::matrix`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest state representable by the packed encoding.
pub const MAX_STATE_LEN: u32 = 63;

/// Which transition graph: Γ has no self-loops, Γ′ adds self-loops at the
/// all-zeros and all-ones states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "gamma")]
    Gamma,
    #[serde(rename = "gamma-prime")]
    GammaPrime,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Gamma => "gamma",
            Variant::GammaPrime => "gamma-prime",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma" => Ok(Variant::Gamma),
            "gamma-prime" | "gamma'" => Ok(Variant::GammaPrime),
            _ => Err(Error::Usage(format!("unknown variant {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MemoryState {
    bits: u64,
    n: u32,
}

impl MemoryState {
    /// Builds a state of length `n` from its packed index.
    pub fn from_index(n: u32, index: u64) -> Result<Self> {
        if n == 0 || n > MAX_STATE_LEN {
            return Err(Error::Precondition(format!(
                "state length must be in 1..={MAX_STATE_LEN}, got {n}"
            )));
        }
        if index >> n != 0 {
            return Err(Error::Precondition(format!(
                "index {index} does not fit in {n} bits"
            )));
        }
        Ok(MemoryState { bits: index, n })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let n = bits.len() as u32;
        let mut index = 0u64;
        for &b in bits {
            if b > 1 {
                return Err(Error::InvalidState(format!("{bits:?}")));
            }
            index = (index << 1) | u64::from(b);
        }
        MemoryState::from_index(n, index)
    }

    pub fn zeros(n: u32) -> Result<Self> {
        MemoryState::from_index(n, 0)
    }

    pub fn ones(n: u32) -> Result<Self> {
        MemoryState::from_index(n, 0).map(|s| MemoryState {
            bits: s.mask(),
            n,
        })
    }

    #[inline]
    fn mask(&self) -> u64 {
        (1u64 << self.n) - 1
    }

    #[inline]
    pub fn len(&self) -> u32 {
        self.n
    }

    /// Always false: states have positive length.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Vertex index: binary value with `x_0` most significant.
    #[inline]
    pub fn index(&self) -> u64 {
        self.bits
    }

    /// The symbol `x_i`, counted from the left.
    #[inline]
    pub fn bit(&self, i: u32) -> u8 {
        ((self.bits >> (self.n - 1 - i)) & 1) as u8
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.n).map(|i| self.bit(i)).collect()
    }

    #[inline]
    pub fn is_all_zeros(&self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn is_all_ones(&self) -> bool {
        self.bits == self.mask()
    }

    /// Replaces the rightmost `0` with `1`.
    pub fn step_up(&self) -> Result<Self> {
        if self.is_all_ones() {
            return Err(Error::NoUpSuccessor(self.to_string()));
        }
        Ok(MemoryState {
            bits: self.bits | (self.bits + 1),
            n: self.n,
        })
    }

    /// Replaces the rightmost `1` with `0`.
    pub fn step_down(&self) -> Result<Self> {
        if self.is_all_zeros() {
            return Err(Error::NoDownSuccessor(self.to_string()));
        }
        Ok(MemoryState {
            bits: self.bits & (self.bits - 1),
            n: self.n,
        })
    }

    /// Direct successors in the chosen graph, down-move first.
    ///
    /// In Γ the all-zeros and all-ones states have a single successor; in Γ′
    /// they additionally loop to themselves.
    pub fn successors(&self, variant: Variant) -> Vec<MemoryState> {
        let mut out = Vec::with_capacity(2);
        if let Ok(down) = self.step_down() {
            out.push(down);
        }
        if let Ok(up) = self.step_up() {
            out.push(up);
        }
        if variant == Variant::GammaPrime && (self.is_all_zeros() || self.is_all_ones()) {
            out.push(*self);
        }
        out
    }

    /// The Preisach input / LIFO stock level: the number of `1`s.
    pub fn input_value(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Area of the "up" region of the Preisach triangle.
    ///
    /// The staircase starts at `(0, N)`; a `1` is a unit step right and a `0`
    /// a unit step down. A horizontal segment at height `b` starting at
    /// abscissa `a` covers `b - a` unit boxes of the triangle `α ≤ β`.
    pub fn output_area(&self) -> u64 {
        let (mut a, mut b) = (0u64, u64::from(self.n));
        let mut area = 0;
        for i in 0..self.n {
            if self.bit(i) == 1 {
                area += b - a;
                a += 1;
            } else {
                b -= 1;
            }
        }
        area
    }

    /// Flips every symbol (the symmetry `S`).
    pub fn complement(&self) -> Self {
        MemoryState {
            bits: !self.bits & self.mask(),
            n: self.n,
        }
    }

    pub fn runs(&self) -> RunDecomposition {
        run_decomposition(&self.to_bits())
    }

    /// All `2^n` states in index order.
    pub fn all(n: u32) -> Result<impl Iterator<Item = MemoryState>> {
        MemoryState::zeros(n)?;
        Ok((0..1u64 << n).map(move |bits| MemoryState { bits, n }))
    }
}

impl fmt::Display for MemoryState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.bit(i) == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for MemoryState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = parse_bits(s)?;
        MemoryState::from_bits(&bits).map_err(|_| Error::InvalidState(s.to_string()))
    }
}

impl Serialize for MemoryState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MemoryState {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a (possibly empty) string of `0`/`1` characters.
pub fn parse_bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::InvalidState(s.to_string())),
        })
        .collect()
}

/// Maximal runs of a bitstring read right to left:
/// `1^{j_1} 0^{j_2} 1^{j_3} ... 0^{j_{k+1}}`.
///
/// `runs[0] = j_1` is the trailing run of `1`s and may be empty, as may the
/// final `0`-run `j_{k+1}`; all runs in between are nonempty. Odd positions
/// (1-based) are always `1`-runs, so `k` is odd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunDecomposition {
    runs: Vec<usize>,
}

impl RunDecomposition {
    /// `(j_1, ..., j_{k+1})`.
    pub fn runs(&self) -> &[usize] {
        &self.runs
    }

    pub fn k(&self) -> usize {
        self.runs.len() - 1
    }

    /// `s_i = j_1 + ... + j_i` for `i = 1..=k`.
    pub fn partial_sums(&self) -> Vec<usize> {
        self.runs[..self.k()]
            .iter()
            .scan(0, |acc, &j| {
                *acc += j;
                Some(*acc)
            })
            .collect()
    }

    /// Total length of the decomposed string.
    pub fn len(&self) -> usize {
        self.runs.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Reassembles `0^{j_{k+1}} 1^{j_k} ... 0^{j_2} 1^{j_1}`.
    pub fn to_bits(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len());
        for (idx, &j) in self.runs.iter().enumerate().rev() {
            let symbol = if idx % 2 == 0 { 1 } else { 0 };
            out.extend(std::iter::repeat_n(symbol, j));
        }
        out
    }
}

pub fn run_decomposition(bits: &[u8]) -> RunDecomposition {
    let mut runs = Vec::new();
    let mut current = 1u8;
    let mut len = 0usize;
    for &b in bits.iter().rev() {
        if b == current {
            len += 1;
        } else {
            runs.push(len);
            current = b;
            len = 1;
        }
    }
    runs.push(len);
    // end on a 0-run so that the run count k + 1 is even
    if runs.len() % 2 == 1 {
        runs.push(0);
    }
    RunDecomposition { runs }
}

/// What to do with an input step that has no successor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryPolicy {
    #[default]
    Strict,
    /// Keep the state unchanged, emulating the self-loops of Γ′.
    Clip,
}

/// Drives the state with a sequence of `±1` input increments.
pub fn apply_input_sequence(
    initial: MemoryState,
    deltas: &[i8],
    policy: BoundaryPolicy,
) -> Result<Vec<MemoryState>> {
    let mut trajectory = Vec::with_capacity(deltas.len() + 1);
    trajectory.push(initial);
    let mut state = initial;
    for (index, &delta) in deltas.iter().enumerate() {
        let next = match delta {
            1 => state.step_up(),
            -1 => state.step_down(),
            _ => {
                return Err(Error::Usage(format!(
                    "input step {index} must be +1 or -1, got {delta}"
                )))
            }
        };
        state = match (next, policy) {
            (Ok(s), _) => s,
            (Err(_), BoundaryPolicy::Clip) => state,
            (Err(_), BoundaryPolicy::Strict) => {
                return Err(Error::InadmissibleStep {
                    index,
                    delta,
                    state: state.to_string(),
                })
            }
        };
        trajectory.push(state);
    }
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> MemoryState {
        s.parse().unwrap()
    }

    #[test]
    fn step_up_examples() {
        assert_eq!(st("10100").step_up().unwrap(), st("10101"));
        assert_eq!(st("00000").step_up().unwrap(), st("00001"));
        assert_eq!(st("01").step_up().unwrap(), st("11"));
        assert!(matches!(st("111").step_up(), Err(Error::NoUpSuccessor(_))));
    }

    #[test]
    fn step_down_examples() {
        assert_eq!(st("10110").step_down().unwrap(), st("10100"));
        assert_eq!(st("11111").step_down().unwrap(), st("11110"));
        assert_eq!(st("10").step_down().unwrap(), st("00"));
        assert!(matches!(st("000").step_down(), Err(Error::NoDownSuccessor(_))));
    }

    #[test]
    fn successor_sets() {
        let mut s = st("10101").successors(Variant::Gamma);
        s.sort();
        assert_eq!(s, vec![st("10100"), st("10111")]);
        assert_eq!(st("00").successors(Variant::Gamma), vec![st("01")]);
        let mut s = st("00").successors(Variant::GammaPrime);
        s.sort();
        assert_eq!(s, vec![st("00"), st("01")]);
        let mut s = st("11").successors(Variant::GammaPrime);
        s.sort();
        assert_eq!(s, vec![st("10"), st("11")]);
    }

    #[test]
    fn input_value_and_area() {
        assert_eq!(st("10110").input_value(), 3);
        assert_eq!(st("0000").input_value(), 0);
        assert_eq!(st("1111111").input_value(), 7);
        assert_eq!(st("10110").output_area(), 10);
        assert_eq!(st("000000").output_area(), 0);
        assert_eq!(st("111111").output_area(), 21);
    }

    #[test]
    fn complement_example() {
        assert_eq!(st("11001").complement(), st("00110"));
        assert_eq!(st("0000").complement(), st("1111"));
    }

    #[test]
    fn runs_of_long_suffix() {
        let r = run_decomposition(&parse_bits("0100100110").unwrap());
        assert_eq!(r.runs(), &[0, 1, 2, 2, 1, 2, 1, 1]);
        assert_eq!(r.k(), 7);
        assert_eq!(r.partial_sums(), vec![0, 1, 3, 5, 6, 8, 9]);
    }

    #[test]
    fn runs_small_cases() {
        let r = run_decomposition(&parse_bits("11").unwrap());
        assert_eq!(r.runs(), &[2, 0]);
        assert_eq!(r.k(), 1);
        let r = run_decomposition(&parse_bits("10").unwrap());
        assert_eq!(r.runs(), &[0, 1, 1, 0]);
        assert_eq!(r.k(), 3);
        assert_eq!(r.partial_sums(), vec![0, 1, 2]);
        let r = run_decomposition(&[]);
        assert_eq!(r.runs(), &[0, 0]);
        assert_eq!(r.partial_sums(), vec![0]);
    }

    #[test]
    fn input_sequences() {
        let t = apply_input_sequence(st("10110"), &[-1, 1], BoundaryPolicy::Strict).unwrap();
        assert_eq!(t, vec![st("10110"), st("10100"), st("10101")]);
        let t = apply_input_sequence(st("101"), &[], BoundaryPolicy::Strict).unwrap();
        assert_eq!(t, vec![st("101")]);
        let t = apply_input_sequence(st("00"), &[1, 1, -1], BoundaryPolicy::Strict).unwrap();
        assert_eq!(t, vec![st("00"), st("01"), st("11"), st("10")]);
    }

    #[test]
    fn strict_policy_names_step() {
        let err = apply_input_sequence(st("01"), &[1, 1], BoundaryPolicy::Strict).unwrap_err();
        assert_eq!(
            err,
            Error::InadmissibleStep {
                index: 1,
                delta: 1,
                state: "11".into()
            }
        );
        let t = apply_input_sequence(st("01"), &[1, 1, -1], BoundaryPolicy::Clip).unwrap();
        assert_eq!(t, vec![st("01"), st("11"), st("11"), st("10")]);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("10a".parse::<MemoryState>().is_err());
        assert!("".parse::<MemoryState>().is_err());
    }

    #[test]
    fn serde_as_string() {
        let t = vec![st("00"), st("01")];
        assert_eq!(serde_json::to_string(&t).unwrap(), r#"["00","01"]"#);
        let back: Vec<MemoryState> = serde_json::from_str(r#"["00","01"]"#).unwrap();
        assert_eq!(back, t);
    }
}
