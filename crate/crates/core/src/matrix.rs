//! Adjacency matrices `A_N` (graph Γ) and `A′_N` (graph Γ′).
//!
//! Vertices are ordered by the packed state index (`x_0` most significant).
//! Entry `(i, j)` is `1` iff there is an edge `j → i`: columns index the
//! source vertex, so `½A′_N` is column-stochastic.

use std::fmt::Write as _;

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::state::{MemoryState, Variant};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    n: u32,
    variant: Variant,
    /// Sorted `(row, col)` positions of the ones, 0-based.
    entries: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureFormat {
    /// `row col` pairs, 1-based.
    CoordinateList,
    /// `source target` state strings, one edge per line.
    EdgeList,
}

impl std::str::FromStr for StructureFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coordinate-list" | "coo" => Ok(StructureFormat::CoordinateList),
            "edge-list" | "edges" => Ok(StructureFormat::EdgeList),
            _ => Err(Error::Usage(format!("unknown structure format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct MatrixMetadata {
    pub n: u32,
    pub variant: Variant,
    pub order: u64,
    pub nnz: usize,
}

impl AdjacencyMatrix {
    /// Builds the matrix from the block recursion
    /// `A_0 = (0)`, `A_{k+1} = [[A_k, J_k], [J′_k, A_k]]` with
    /// `J_k = diag(1, 0, ..., 0)` and `J′_k = diag(0, ..., 0, 1)`.
    ///
    /// For Γ′ the two self-loops are added on the diagonal afterwards.
    pub fn build_recursive(n: u32, variant: Variant, budget: &Budget) -> Result<Self> {
        Budget::check("N (sparse build)", u64::from(n), u64::from(budget.max_sparse_n))?;
        if variant == Variant::GammaPrime && n == 0 {
            return Err(Error::Precondition("Γ′ requires N ≥ 1".into()));
        }
        let mut entries: Vec<(u32, u32)> = Vec::new();
        for k in 0..n {
            let half = 1u32 << k;
            let mut next = Vec::with_capacity(2 * entries.len() + 2);
            next.extend(entries.iter().copied());
            next.extend(entries.iter().map(|&(r, c)| (r + half, c + half)));
            // J_k in the top-right block, J′_k in the bottom-left block
            next.push((0, half));
            next.push((2 * half - 1, half - 1));
            entries = next;
        }
        if variant == Variant::GammaPrime {
            let last = (1u32 << n) - 1;
            entries.push((0, 0));
            entries.push((last, last));
        }
        entries.sort_unstable();
        Ok(AdjacencyMatrix {
            n,
            variant,
            entries,
        })
    }

    /// Builds the matrix by applying the transition rules to every state.
    pub fn build_from_rules(n: u32, variant: Variant, budget: &Budget) -> Result<Self> {
        Budget::check("N (sparse build)", u64::from(n), u64::from(budget.max_sparse_n))?;
        let mut entries = Vec::with_capacity(2usize << n);
        for source in MemoryState::all(n)? {
            for target in source.successors(variant) {
                entries.push((target.index() as u32, source.index() as u32));
            }
        }
        entries.sort_unstable();
        Ok(AdjacencyMatrix {
            n,
            variant,
            entries,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn order(&self) -> usize {
        1usize << self.n
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(u32, u32)] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.entries
            .binary_search(&(row as u32, col as u32))
            .is_ok()
    }

    pub fn metadata(&self) -> MatrixMetadata {
        MatrixMetadata {
            n: self.n,
            variant: self.variant,
            order: self.order() as u64,
            nnz: self.nnz(),
        }
    }

    /// Exact per-column sums (out-degrees of the source vertices).
    pub fn column_sums(&self) -> Vec<u32> {
        let mut sums = vec![0u32; self.order()];
        for &(_, c) in &self.entries {
            sums[c as usize] += 1;
        }
        sums
    }

    pub fn row_sums(&self) -> Vec<u32> {
        let mut sums = vec![0u32; self.order()];
        for &(r, _) in &self.entries {
            sums[r as usize] += 1;
        }
        sums
    }

    /// The matrix rotated by 180°: entry `(i, j)` moves to `(n-1-i, n-1-j)`.
    pub fn rotated(&self) -> Self {
        let last = self.order() as u32 - 1;
        let mut entries: Vec<_> = self
            .entries
            .iter()
            .map(|&(r, c)| (last - r, last - c))
            .collect();
        entries.sort_unstable();
        AdjacencyMatrix {
            n: self.n,
            variant: self.variant,
            entries,
        }
    }

    pub fn transposed(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|&(r, c)| (c, r)).collect();
        entries.sort_unstable();
        AdjacencyMatrix {
            n: self.n,
            variant: self.variant,
            entries,
        }
    }

    /// Dense row-major 0/1 matrix. Only allowed up to the dense cap.
    pub fn to_dense(&self, budget: &Budget) -> Result<Vec<Vec<i64>>> {
        Budget::check("N (dense)", u64::from(self.n), u64::from(budget.max_dense_n))?;
        let order = self.order();
        let mut dense = vec![vec![0i64; order]; order];
        for &(r, c) in &self.entries {
            dense[r as usize][c as usize] = 1;
        }
        Ok(dense)
    }

    /// Entries inside the block `[row0, row0+size) x [col0, col0+size)`,
    /// relative to the block origin.
    pub fn block_entries(&self, row0: usize, col0: usize, size: usize) -> Vec<(usize, usize)> {
        self.entries
            .iter()
            .map(|&(r, c)| (r as usize, c as usize))
            .filter(|&(r, c)| r >= row0 && r < row0 + size && c >= col0 && c < col0 + size)
            .map(|(r, c)| (r - row0, c - col0))
            .collect()
    }

    /// `y = A x` with `A` applied as stored (sum over the sources of each row).
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.order() {
            return Err(Error::DimensionMismatch {
                expected: self.order(),
                got: x.len(),
            });
        }
        let mut y = vec![0.0; x.len()];
        for &(r, c) in &self.entries {
            y[r as usize] += x[c as usize];
        }
        Ok(y)
    }

    /// Deterministic structure dump, without trailing newline.
    pub fn export_structure(&self, format: StructureFormat) -> String {
        let mut out = String::with_capacity(self.entries.len() * 8);
        match format {
            StructureFormat::CoordinateList => {
                for (i, &(r, c)) in self.entries.iter().enumerate() {
                    if i > 0 {
                        out.push('\n');
                    }
                    let _ = write!(out, "{} {}", r + 1, c + 1);
                }
            }
            StructureFormat::EdgeList => {
                let mut edges: Vec<(u32, u32)> = self.entries.iter().map(|&(r, c)| (c, r)).collect();
                edges.sort_unstable();
                for (i, &(src, dst)) in edges.iter().enumerate() {
                    if i > 0 {
                        out.push('\n');
                    }
                    // indices always fit: n ≤ max_sparse_n < 63
                    let s = MemoryState::from_index(self.n.max(1), u64::from(src)).unwrap();
                    let t = MemoryState::from_index(self.n.max(1), u64::from(dst)).unwrap();
                    let _ = write!(out, "{s} {t}");
                }
            }
        }
        out
    }
}
