//! Arithmetic modulo word-sized primes: Montgomery multiplication,
//! Gaussian elimination, interpolation and Chinese remaindering.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Montgomery form modulo an odd prime `p < 2^31`, with `R = 2^32`.
#[derive(Debug, Clone, Copy)]
pub struct Mont {
    pub p: u32,
    neg_inv: u32,
    r2: u32,
}

impl Mont {
    pub fn new(p: u32) -> Self {
        assert!(p % 2 == 1 && p < (1 << 31));
        let mut inv = p;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u32.wrapping_sub(p.wrapping_mul(inv)));
        }
        let r2 = ((1u128 << 64) % u128::from(p)) as u32;
        Mont {
            p,
            neg_inv: inv.wrapping_neg(),
            r2,
        }
    }

    /// `t · R^{-1} mod p` for `t < p · 2^32`.
    #[inline(always)]
    pub fn redc(&self, t: u64) -> u32 {
        let m = (t as u32).wrapping_mul(self.neg_inv);
        let u = ((t + u64::from(m) * u64::from(self.p)) >> 32) as u32;
        if u >= self.p {
            u - self.p
        } else {
            u
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.redc(u64::from(a) * u64::from(b))
    }

    #[inline(always)]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn to_mont(&self, a: u32) -> u32 {
        self.mul(a, self.r2)
    }

    pub fn from_mont(&self, a: u32) -> u32 {
        self.redc(u64::from(a))
    }

    pub fn reduce_i64(&self, a: i64) -> u32 {
        a.rem_euclid(i64::from(self.p)) as u32
    }
}

/// Inverse of a nonzero residue by the extended Euclidean algorithm.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (i64::from(p), i64::from(a));
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "{a} is not invertible mod {p}");
    t.rem_euclid(i64::from(p)) as u32
}

pub fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    (u64::from(a) * u64::from(b) % u64::from(p)) as u32
}

/// Determinant of a row-major `n × n` matrix given in Montgomery form.
/// The matrix is destroyed. Returns the plain residue.
pub fn det_mont(m: &Mont, a: &mut [u32], n: usize) -> u32 {
    let mut det = m.to_mont(1);
    let mut nz = Vec::with_capacity(n);
    for k in 0..n {
        let Some(piv) = (k..n).find(|&r| a[r * n + k] != 0) else {
            return 0;
        };
        if piv != k {
            for j in k..n {
                a.swap(piv * n + j, k * n + j);
            }
            det = m.sub(0, det);
        }
        let pivot = a[k * n + k];
        det = m.mul(det, pivot);
        let inv = m.to_mont(inv_mod(m.from_mont(pivot), m.p));
        nz.clear();
        nz.extend((k + 1..n).filter(|&j| a[k * n + j] != 0));
        let (top, bottom) = a.split_at_mut((k + 1) * n);
        let prow = &top[k * n..];
        for row in bottom.chunks_exact_mut(n) {
            if row[k] == 0 {
                continue;
            }
            let f = m.mul(row[k], inv);
            for &j in &nz {
                row[j] = m.sub(row[j], m.mul(f, prow[j]));
            }
        }
    }
    m.from_mont(det)
}

/// Coefficients (ascending) of the unique polynomial of degree `≤ n - 1`
/// through `(x0 + i, y[i])`, `i = 0..n`, modulo `p > n`.
///
/// Newton forward differences: `P(x) = Σ_k Δ^k y_0 / k! · Π_{i<k} (x - x0 - i)`.
pub fn interpolate_consecutive_mod(x0: i64, y: &[u32], p: u32) -> Vec<u32> {
    let n = y.len();
    let mut diffs = y.to_vec();
    let mut lead = Vec::with_capacity(n);
    for k in 0..n {
        lead.push(diffs[0]);
        for i in 0..n - k - 1 {
            diffs[i] = sub_mod(diffs[i + 1], diffs[i], p);
        }
    }
    let mut out = vec![0u32; n];
    // basis = Π_{i<k} (x - x0 - i), ascending coefficients
    let mut basis = vec![1u32];
    let mut inv_fact = 1u32;
    for (k, d) in lead.iter().enumerate() {
        if k > 0 {
            inv_fact = mul_mod(inv_fact, inv_mod(k as u32 % p, p), p);
        }
        let scale = mul_mod(*d, inv_fact, p);
        for (o, b) in out.iter_mut().zip(&basis) {
            *o = add_mod(*o, mul_mod(scale, *b, p), p);
        }
        let root = (x0 + k as i64).rem_euclid(i64::from(p)) as u32;
        let mut next = vec![0u32; basis.len() + 1];
        for (i, b) in basis.iter().enumerate() {
            next[i + 1] = add_mod(next[i + 1], *b, p);
            next[i] = sub_mod(next[i], mul_mod(root, *b, p), p);
        }
        basis = next;
    }
    out
}

pub fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    let s = u64::from(a) + u64::from(b);
    (if s >= u64::from(p) { s - u64::from(p) } else { s }) as u32
}

pub fn sub_mod(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes just below `2^31`, descending.
pub fn primes_below_2_31() -> impl Iterator<Item = u32> {
    ((1u32 << 30)..(1u32 << 31)).rev().filter(|&n| is_prime(n))
}

/// Incremental Chinese remaindering of coefficient vectors.
#[derive(Debug, Clone)]
pub struct Crt {
    pub modulus: BigInt,
    values: Vec<BigInt>,
}

impl Crt {
    pub fn new(len: usize) -> Self {
        Crt {
            modulus: BigInt::one(),
            values: vec![BigInt::zero(); len],
        }
    }

    /// Garner step: lift `x ≡ values (mod M)` and `x ≡ residues (mod p)`.
    pub fn add(&mut self, residues: &[u32], p: u32) {
        let pb = BigInt::from(p);
        let m_mod_p = self.modulus.mod_floor(&pb);
        let m_inv = inv_mod(u32::try_from(m_mod_p).unwrap(), p);
        for (v, &r) in self.values.iter_mut().zip(residues) {
            let v_mod_p = u32::try_from(v.mod_floor(&pb)).unwrap();
            let t = mul_mod(sub_mod(r, v_mod_p, p), m_inv, p);
            *v += &self.modulus * BigInt::from(t);
        }
        self.modulus *= pb;
    }

    /// Values mapped to the symmetric range `(-M/2, M/2]`.
    pub fn symmetric(&self) -> Vec<BigInt> {
        let half: BigInt = &self.modulus >> 1;
        self.values
            .iter()
            .map(|v| if *v > half { v - &self.modulus } else { v.clone() })
            .collect()
    }
}

/// True if `|c| < M/2` is guaranteed for every `|c| ≤ bound`.
pub fn modulus_covers(modulus: &BigInt, bound_sq: &BigInt) -> bool {
    // M > 2B  ⟺  M^2 > 4 B^2
    let m2 = modulus * modulus;
    m2 > (bound_sq << 2u32) && modulus.is_positive()
}
