//! Recursions between `χ_k = det T_k`, `φ_k = det Q_k` and `ψ_k = det P_k`,
//! checked as exact polynomial identities.

use serde::Serialize;

use super::{minor_det, minor_pencil, t_pencil, Backend, MinorKind};
use crate::budget::{check, Budget};
use crate::chebyshev::{chebyshev_u_family, chebyshev_u_sub_family};
use crate::error::Result;
use crate::matrix::AdjacencyMatrix;
use crate::poly::IntPolynomial;
use crate::state::Variant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaCheck {
    pub identity: &'static str,
    pub k: u32,
    pub status: LemmaStatus,
    /// First differing coefficient, `"λ^i: lhs vs rhs"`.
    pub witness: Option<String>,
}

fn compare(identity: &'static str, k: u32, lhs: &IntPolynomial, rhs: &IntPolynomial) -> LemmaCheck {
    let len = lhs.coeffs().len().max(rhs.coeffs().len());
    let witness = (0..len)
        .find(|&i| lhs.coeff(i) != rhs.coeff(i))
        .map(|i| format!("λ^{i}: {} vs {}", lhs.coeff(i), rhs.coeff(i)));
    LemmaCheck {
        identity,
        k,
        status: if witness.is_none() { LemmaStatus::Pass } else { LemmaStatus::Fail },
        witness,
    }
}

fn boolean(identity: &'static str, k: u32, ok: bool) -> LemmaCheck {
    LemmaCheck {
        identity,
        k,
        status: if ok { LemmaStatus::Pass } else { LemmaStatus::Fail },
        witness: (!ok).then(|| "matrices differ".to_string()),
    }
}

fn product(items: impl IntoIterator<Item = IntPolynomial>) -> IntPolynomial {
    items.into_iter().fold(IntPolynomial::one(), |a, b| &a * &b)
}

/// Every identity for `k ≤ k_max` (which may not exceed
/// `budget.max_minor_k - 1`, since `φ_{k+1}` and `ψ_{k+1}` are needed), plus
/// the Pell identity for `k ≤ pell_max`.
pub fn verify_lemma_recursions(k_max: u32, pell_max: usize, budget: &Budget) -> Result<Vec<LemmaCheck>> {
    check("lemma level k", u64::from(k_max) + 1, u64::from(budget.max_minor_k))?;
    let chi: Vec<IntPolynomial> = (0..=k_max + 1)
        .map(|k| {
            let t = t_pencil(k, budget)?;
            Ok(super::pencil_det(&t, Backend::Auto, budget)?.poly)
        })
        .collect::<Result<_>>()?;
    let mut phi = vec![IntPolynomial::zero()];
    let mut psi = vec![IntPolynomial::zero()];
    let mut s_det = vec![IntPolynomial::zero()];
    for k in 1..=k_max + 1 {
        phi.push(minor_det(k, MinorKind::Q, budget)?);
        psi.push(minor_det(k, MinorKind::P, budget)?);
        s_det.push(minor_det(k, MinorKind::S, budget)?);
    }

    let mut out = Vec::new();
    out.push(compare("chi_0", 0, &chi[0], &IntPolynomial::from_i64(&[0, -1])));
    out.push(compare("chi_1", 1, &chi[1], &IntPolynomial::from_i64(&[-1, 0, 1])));
    if k_max >= 1 {
        out.push(compare("chi_2", 2, &chi[2], &IntPolynomial::from_i64(&[0, 0, -2, 0, 1])));
    }
    out.push(compare("phi_1", 1, &phi[1], &IntPolynomial::one()));
    out.push(compare("psi_1", 1, &psi[1], &IntPolynomial::from_i64(&[0, -1])));

    for k in 0..=k_max {
        let a = AdjacencyMatrix::build_recursive(k, Variant::Gamma, budget)?;
        out.push(boolean("rotation-invariance", k, a.rotated() == a));
    }
    for k in 1..=k_max {
        let kk = k as usize;
        let rotated_q = minor_pencil(k, MinorKind::Q, budget)?.rotated();
        out.push(boolean("s-is-rotated-q", k, rotated_q == minor_pencil(k, MinorKind::S, budget)?));
        out.push(compare("det-s-equals-det-q", k, &s_det[kk], &phi[kk]));
        out.push(compare(
            "cofactor-expansion",
            k,
            &chi[kk + 1],
            &(&(&chi[kk] * &chi[kk]) - &(&phi[kk] * &s_det[kk])),
        ));
        out.push(compare(
            "chi-recursion",
            k,
            &chi[kk + 1],
            &(&(&chi[kk] * &chi[kk]) - &(&phi[kk] * &phi[kk])),
        ));
        out.push(compare("phi-recursion", k, &phi[kk + 1], &-(&phi[kk] * &psi[kk])));
        out.push(compare("psi-recursion", k, &psi[kk + 1], &(&chi[kk] * &psi[kk])));
        out.push(compare("psi-product", k, &psi[kk], &product(chi[..kk].iter().cloned())));
        if k >= 2 {
            let p = product((0..kk - 1).map(|i| chi[i].pow((kk - 1 - i) as u64)));
            let want = if k % 2 == 0 { -&p } else { p };
            out.push(compare("phi-product", k, &phi[kk], &want));
            let q = product((0..kk - 1).map(|i| chi[i].pow(2 * (kk - 1 - i) as u64)));
            out.push(compare("master-recursion", k, &chi[kk + 1], &(&(&chi[kk] * &chi[kk]) - &q)));
        }
    }

    let u = chebyshev_u_family(pell_max + 2);
    let us = chebyshev_u_sub_family(pell_max + 2);
    for k in 0..=pell_max {
        let one = IntPolynomial::one();
        for (name, fam) in [("pell", &u), ("pell-substituted", &us)] {
            let lhs = &(&fam[k + 1] * &fam[k + 1]) - &(&fam[k + 2] * &fam[k]);
            out.push(compare(name, k as u32, &lhs, &one));
        }
    }
    Ok(out)
}
