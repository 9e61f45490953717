//! Resource caps. Defaults are sized so every operation finishes within
//! about a minute on a laptop; `HYSPECTRA_BUDGET` overrides them.

use crate::error::{Error, Result};

pub const BUDGET_ENV: &str = "HYSPECTRA_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest `N` for sparse matrix construction and matrix-vector work.
    pub max_sparse_n: u32,
    /// Largest `N` for which a dense `2^N x 2^N` matrix may be materialised.
    pub max_dense_n: u32,
    /// Largest matrix order accepted by the determinant oracle.
    pub max_oracle_order: usize,
    /// Largest `N` for which a factored characteristic polynomial is expanded.
    pub max_expand_n: u32,
    /// Largest level `k` for symbolic minors of `A_k - λI`.
    pub max_minor_k: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_sparse_n: 20,
            max_dense_n: 12,
            max_oracle_order: 1024,
            max_expand_n: 12,
            max_minor_k: 6,
        }
    }
}

impl Budget {
    /// Defaults, overridden by `HYSPECTRA_BUDGET` when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(spec) => Budget::default().with_overrides(&spec),
            Err(_) => Ok(Budget::default()),
        }
    }

    /// Parses a comma-separated `key=value` list, e.g.
    /// `max_sparse_n=22,max_oracle_order=2048`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("{BUDGET_ENV}: expected key=value, got {item:?}")))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Usage(format!("{BUDGET_ENV}: {key} is not an integer")))?;
            match key.trim() {
                "max_sparse_n" => self.max_sparse_n = value as u32,
                "max_dense_n" => self.max_dense_n = value as u32,
                "max_oracle_order" => self.max_oracle_order = value as usize,
                "max_expand_n" => self.max_expand_n = value as u32,
                "max_minor_k" => self.max_minor_k = value as u32,
                other => return Err(Error::Usage(format!("{BUDGET_ENV}: unknown key {other:?}"))),
            }
        }
        Ok(self)
    }

    pub(crate) fn check(what: &'static str, requested: u64, limit: u64) -> Result<()> {
        if requested > limit {
            Err(Error::Budget {
                what,
                requested,
                limit,
            })
        } else {
            Ok(())
        }
    }
}

pub(crate) fn check(what: &'static str, requested: u64, limit: u64) -> Result<()> {
    Budget::check(what, requested, limit)
}
