//! Thin wrappers over `faer` for the factorizations used by the solvers.
//!
//! All factorizations run sequentially so that results are bitwise
//! reproducible across machines with different thread counts.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Mat, MatRef, Par, Side};

use crate::{Error, Result};

fn sequential() {
    faer::set_global_parallelism(Par::Seq);
}

/// Dense symmetric positive definite factorization `A = L Lᵀ`.
pub struct DenseCholesky {
    llt: faer::linalg::solvers::Llt<f64>,
    n: usize,
}

impl DenseCholesky {
    /// Factorizes the lower triangle of `a`; `what` names the matrix in errors.
    pub fn factor(a: &Mat<f64>, what: &str) -> Result<Self> {
        sequential();
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                context: "dense Cholesky",
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        if a.nrows() == 0 {
            return Err(Error::NotSpd { what: format!("{what} (empty)") });
        }
        let llt = a
            .llt(Side::Lower)
            .map_err(|_| Error::NotSpd { what: what.to_string() })?;
        Ok(Self { llt, n: a.nrows() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> MatRef<'_, f64> {
        self.llt.L()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = Col::<f64>::from_fn(b.len(), |i| b[i]);
        let x = self.llt.solve(&rhs);
        (0..x.nrows()).map(|i| x[i]).collect()
    }

    /// Overwrites `b` with `L⁻¹ b`.
    pub fn forward_in_place(&self, b: &mut Mat<f64>) {
        faer::linalg::triangular_solve::solve_lower_triangular_in_place(
            self.llt.L(),
            b.as_mut(),
            Par::Seq,
        );
    }

    /// `bᵀ A⁻¹ b` computed as `|L⁻¹ b|²`.
    pub fn inverse_quadratic_form(&self, b: &[f64]) -> f64 {
        let mut m = Mat::<f64>::from_fn(b.len(), 1, |i, _| b[i]);
        self.forward_in_place(&mut m);
        (0..b.len()).map(|i| m[(i, 0)] * m[(i, 0)]).sum()
    }
}

/// Coordinate-format accumulator for a sparse matrix; duplicates are summed.
#[derive(Debug, Clone, Default)]
pub struct TripletMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl TripletMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.nrows && j < self.ncols);
        self.entries.push((i, j, v));
    }

    pub fn to_csc(&self) -> Result<SparseColMat<usize, f64>> {
        let t: Vec<_> = self
            .entries
            .iter()
            .map(|&(i, j, v)| Triplet::new(i, j, v))
            .collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &t)
            .map_err(|e| Error::InvalidInput(format!("sparse matrix construction: {e:?}")))
    }
}

/// `y = A x` for a CSC matrix.
pub fn csc_mul(a: &SparseColMat<usize, f64>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.nrows()];
    let col_ptr = a.col_ptr();
    let row_idx = a.row_idx();
    let val = a.val();
    for j in 0..a.ncols() {
        for k in col_ptr[j]..col_ptr[j + 1] {
            y[row_idx[k]] += val[k] * x[j];
        }
    }
    y
}

/// Largest `|a_ij - a_ji|` relative to the largest `|a_ij|`.
pub fn csc_symmetry_defect(a: &SparseColMat<usize, f64>) -> f64 {
    let dense = csc_entries(a);
    let mut max_entry: f64 = 0.0;
    let mut max_defect: f64 = 0.0;
    for (&(i, j), &v) in &dense {
        max_entry = max_entry.max(v.abs());
        let w = dense.get(&(j, i)).copied().unwrap_or(0.0);
        max_defect = max_defect.max((v - w).abs());
    }
    if max_entry == 0.0 {
        0.0
    } else {
        max_defect / max_entry
    }
}

fn csc_entries(a: &SparseColMat<usize, f64>) -> std::collections::HashMap<(usize, usize), f64> {
    let mut m = std::collections::HashMap::new();
    let col_ptr = a.col_ptr();
    let row_idx = a.row_idx();
    let val = a.val();
    for j in 0..a.ncols() {
        for k in col_ptr[j]..col_ptr[j + 1] {
            *m.entry((row_idx[k], j)).or_insert(0.0) += val[k];
        }
    }
    m
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Sparse symmetric positive definite factorization with a fill-reducing
/// ordering.
pub struct SparseCholesky {
    llt: faer::sparse::linalg::solvers::Llt<usize, f64>,
}

impl SparseCholesky {
    pub fn factor(a: &SparseColMat<usize, f64>, what: &str) -> Result<Self> {
        sequential();
        let llt = a
            .sp_cholesky(Side::Lower)
            .map_err(|_| Error::NotSpd { what: what.to_string() })?;
        Ok(Self { llt })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = Col::<f64>::from_fn(b.len(), |i| b[i]);
        let x = self.llt.solve(&rhs);
        (0..x.nrows()).map(|i| x[i]).collect()
    }
}

/// Sparse LU with partial pivoting, for the nonsymmetric coupling.
pub struct SparseLu {
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
}

impl SparseLu {
    pub fn factor(a: &SparseColMat<usize, f64>, what: &str) -> Result<Self> {
        sequential();
        let lu = a
            .sp_lu()
            .map_err(|e| Error::Singular(format!("{what}: {e:?}")))?;
        Ok(Self { lu })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = Col::<f64>::from_fn(b.len(), |i| b[i]);
        let x = self.lu.solve(&rhs);
        (0..x.nrows()).map(|i| x[i]).collect()
    }
}
