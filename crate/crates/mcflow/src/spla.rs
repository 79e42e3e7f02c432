//! Sparse linear algebra: column-oriented sparse matrices, a dense LU
//! kernel, the localized solver, and the incremental solver.
//!
//! The localized solver ([`loc_solve`]) exploits sparsity of both the
//! coefficient matrix and the right-hand side: it restricts the system
//! to the rows and columns reachable from the support of `b` in the
//! matrix's bipartite graph, solves that projection densely, and lifts
//! the result back. The incremental solver ([`IncContext::solve`])
//! reuses the previous solution of a similar system: it solves for the
//! correction `Δξ` with `A·Δξ = b − A·ξ′`, whose right-hand side is
//! sparse when the systems are similar. Reachability is replaced across
//! calls by an *over disjoint cover* of the bipartite graph, maintained
//! by merging groups along changed entries.

use std::collections::HashMap;
use std::collections::HashSet;
use std::fmt;
use std::io::{self, Write};

use crate::tol;

/// Column-oriented sparse matrix. Row indices are strictly increasing
/// within each column; no explicit zeros, no duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMat {
    nrows: usize,
    ncols: usize,
    cols: Vec<Vec<(usize, f64)>>,
}

/// Errors raised by the solvers in this module.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    /// Matrix or vector dimensions disagree.
    Shape { expected: usize, got: usize },
    /// The system is infeasible: some nonzero entry of `b` sits on a row
    /// outside the rows reachable from the support of `b`.
    NoSolution,
    /// A pivot fell below the tolerance, or the projection of a singular
    /// matrix came out non-square.
    Singular,
    /// The computed solution failed its residual bound.
    Residual { residual: f64, bound: f64 },
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::Shape { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            SolveError::NoSolution => write!(f, "system has no solution"),
            SolveError::Singular => write!(f, "matrix is singular to working tolerance"),
            SolveError::Residual { residual, bound } => {
                write!(f, "residual {residual:e} exceeds bound {bound:e}")
            }
        }
    }
}

impl std::error::Error for SolveError {}

impl SparseMat {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseMat {
            nrows,
            ncols,
            cols: vec![Vec::new(); ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let cols = (0..n).map(|j| vec![(j, 1.0)]).collect();
        SparseMat {
            nrows: n,
            ncols: n,
            cols,
        }
    }

    /// Builds from triplets. Duplicate positions are summed and entries
    /// that cancel to zero are dropped.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        entries: &[(usize, usize, f64)],
    ) -> Result<Self, SolveError> {
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); ncols];
        for &(r, c, v) in entries {
            if r >= nrows {
                return Err(SolveError::Shape {
                    expected: nrows,
                    got: r,
                });
            }
            if c >= ncols {
                return Err(SolveError::Shape {
                    expected: ncols,
                    got: c,
                });
            }
            cols[c].push((r, v));
        }
        for col in cols.iter_mut() {
            col.sort_by_key(|&(r, _)| r);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(col.len());
            for &(r, v) in col.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == r => last.1 += v,
                    _ => merged.push((r, v)),
                }
            }
            merged.retain(|&(_, v)| v != 0.0);
            *col = merged;
        }
        Ok(SparseMat {
            nrows,
            ncols,
            cols,
        })
    }

    /// Builds from per-column entry lists that are already sorted by row
    /// and free of duplicates and zeros.
    pub fn from_sorted_cols(nrows: usize, cols: Vec<Vec<(usize, f64)>>) -> Self {
        debug_assert!(cols.iter().all(|col| {
            col.windows(2).all(|w| w[0].0 < w[1].0)
                && col.iter().all(|&(r, v)| r < nrows && v != 0.0)
        }));
        SparseMat {
            nrows,
            ncols: cols.len(),
            cols,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn col(&self, j: usize) -> &[(usize, f64)] {
        &self.cols[j]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.cols[j].binary_search_by_key(&i, |&(r, _)| r) {
            Ok(k) => self.cols[j][k].1,
            Err(_) => 0.0,
        }
    }

    /// `A · x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "matvec dimension mismatch");
        let mut y = vec![0.0; self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            let xj = x[j];
            if xj != 0.0 {
                for &(i, v) in col {
                    y[i] += v * xj;
                }
            }
        }
        y
    }

    /// `Aᵀ · x`, computed column-wise without forming the transpose.
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.nrows, "matvec_t dimension mismatch");
        self.cols
            .iter()
            .map(|col| col.iter().map(|&(i, v)| v * x[i]).sum())
            .collect()
    }

    pub fn transpose(&self) -> SparseMat {
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                cols[i].push((j, v));
            }
        }
        // pushed in increasing j per row, already sorted
        SparseMat {
            nrows: self.ncols,
            ncols: self.nrows,
            cols,
        }
    }

    /// Sparse product `A · B` using a dense accumulator per column.
    pub fn mul(&self, rhs: &SparseMat) -> SparseMat {
        assert_eq!(self.ncols, rhs.nrows, "mul dimension mismatch");
        let mut acc = vec![0.0; self.nrows];
        let mut touched = Vec::new();
        let mut cols = Vec::with_capacity(rhs.ncols);
        for bcol in &rhs.cols {
            for &(k, bv) in bcol {
                for &(i, av) in &self.cols[k] {
                    if acc[i] == 0.0 {
                        touched.push(i);
                    }
                    acc[i] += av * bv;
                }
            }
            touched.sort_unstable();
            let mut col = Vec::with_capacity(touched.len());
            for &i in &touched {
                if acc[i] != 0.0 {
                    col.push((i, acc[i]));
                }
                acc[i] = 0.0;
            }
            touched.clear();
            cols.push(col);
        }
        SparseMat {
            nrows: self.nrows,
            ncols: rhs.ncols,
            cols,
        }
    }

    /// Sparse difference `A − B`.
    pub fn sub(&self, rhs: &SparseMat) -> SparseMat {
        assert_eq!(self.nrows, rhs.nrows, "sub dimension mismatch");
        assert_eq!(self.ncols, rhs.ncols, "sub dimension mismatch");
        let cols = self
            .cols
            .iter()
            .zip(&rhs.cols)
            .map(|(a, b)| {
                let mut col = Vec::with_capacity(a.len() + b.len());
                let (mut ia, mut ib) = (0, 0);
                while ia < a.len() || ib < b.len() {
                    match (a.get(ia), b.get(ib)) {
                        (Some(&(ra, va)), Some(&(rb, vb))) if ra == rb => {
                            let v = va - vb;
                            if v != 0.0 {
                                col.push((ra, v));
                            }
                            ia += 1;
                            ib += 1;
                        }
                        (Some(&(ra, va)), Some(&(rb, _))) if ra < rb => {
                            col.push((ra, va));
                            ia += 1;
                        }
                        (Some(_), Some(&(rb, vb))) => {
                            col.push((rb, -vb));
                            ib += 1;
                        }
                        (Some(&(ra, va)), None) => {
                            col.push((ra, va));
                            ia += 1;
                        }
                        (None, Some(&(rb, vb))) => {
                            col.push((rb, -vb));
                            ib += 1;
                        }
                        (None, None) => unreachable!(),
                    }
                }
                col
            })
            .collect();
        SparseMat {
            nrows: self.nrows,
            ncols: self.ncols,
            cols,
        }
    }

    /// Positions where `self` and `other` hold different values
    /// (exact comparison). Both matrices must have the same shape.
    pub fn diff_positions(&self, other: &SparseMat) -> Vec<(usize, usize)> {
        assert_eq!(self.nrows, other.nrows);
        assert_eq!(self.ncols, other.ncols);
        let mut delta = Vec::new();
        for (j, (a, b)) in self.cols.iter().zip(&other.cols).enumerate() {
            let (mut ia, mut ib) = (0, 0);
            while ia < a.len() || ib < b.len() {
                match (a.get(ia), b.get(ib)) {
                    (Some(&(ra, va)), Some(&(rb, vb))) if ra == rb => {
                        if va != vb {
                            delta.push((ra, j));
                        }
                        ia += 1;
                        ib += 1;
                    }
                    (Some(&(ra, _)), Some(&(rb, _))) if ra < rb => {
                        delta.push((ra, j));
                        ia += 1;
                    }
                    (Some(_), Some(&(rb, _))) => {
                        delta.push((rb, j));
                        ib += 1;
                    }
                    (Some(&(ra, _)), None) => {
                        delta.push((ra, j));
                        ia += 1;
                    }
                    (None, Some(&(rb, _))) => {
                        delta.push((rb, j));
                        ib += 1;
                    }
                    (None, None) => unreachable!(),
                }
            }
        }
        delta
    }

    /// Appends an empty column and an (implicit) empty row, growing a
    /// square matrix by one dimension.
    pub fn grow_square(&mut self) {
        assert_eq!(self.nrows, self.ncols);
        self.nrows += 1;
        self.ncols += 1;
        self.cols.push(Vec::new());
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.nrows * self.ncols];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                d[i * self.ncols + j] = v;
            }
        }
        d
    }

    /// Gathers the `(rows, cols)` projection into a sparse block.
    pub fn gather_sparse(&self, rows: &[usize], cols: &[usize]) -> SparseMat {
        let mut pos = vec![usize::MAX; self.nrows];
        for (k, &r) in rows.iter().enumerate() {
            pos[r] = k;
        }
        let gathered = cols
            .iter()
            .map(|&j| {
                self.cols[j]
                    .iter()
                    .filter_map(|&(i, v)| (pos[i] != usize::MAX).then_some((pos[i], v)))
                    .collect()
            })
            .collect();
        SparseMat::from_sorted_cols(rows.len(), gathered)
    }

    /// Gathers the `(rows, cols)` projection into a dense row-major block.
    pub fn gather_dense(&self, rows: &[usize], cols: &[usize]) -> Vec<f64> {
        let mut pos = vec![usize::MAX; self.nrows];
        for (k, &r) in rows.iter().enumerate() {
            pos[r] = k;
        }
        let mut block = vec![0.0; rows.len() * cols.len()];
        for (jk, &j) in cols.iter().enumerate() {
            for &(i, v) in &self.cols[j] {
                let ik = pos[i];
                if ik != usize::MAX {
                    block[ik * cols.len() + jk] = v;
                }
            }
        }
        block
    }

    /// Matrix-Market-style coordinate dump (1-based indices), used for
    /// test fixtures.
    pub fn write_triplet_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(out, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                writeln!(out, "{} {} {}", i + 1, j + 1, v)?;
            }
        }
        Ok(())
    }

    /// Reads the coordinate format written by [`Self::write_triplet_text`].
    pub fn parse_triplet_text(text: &str) -> Result<SparseMat, SolveError> {
        let mut lines = text.lines().filter(|l| !l.trim_start().starts_with('%'));
        let header = lines.next().unwrap_or("");
        let mut it = header.split_whitespace().map(|t| t.parse::<usize>());
        let bad = || SolveError::Shape {
            expected: 3,
            got: 0,
        };
        let nrows = it.next().and_then(Result::ok).ok_or_else(bad)?;
        let ncols = it.next().and_then(Result::ok).ok_or_else(bad)?;
        let _nnz = it.next().and_then(Result::ok).ok_or_else(bad)?;
        let mut entries = Vec::new();
        for line in lines {
            let mut toks = line.split_whitespace();
            let (r, c, v) = match (toks.next(), toks.next(), toks.next()) {
                (Some(r), Some(c), Some(v)) => (r, c, v),
                (None, None, None) => continue,
                _ => return Err(bad()),
            };
            let r: usize = r.parse().map_err(|_| bad())?;
            let c: usize = c.parse().map_err(|_| bad())?;
            let v: f64 = v.parse().map_err(|_| bad())?;
            entries.push((r - 1, c - 1, v));
        }
        SparseMat::from_triplets(nrows, ncols, &entries)
    }
}

/// `‖A·x − b‖∞`.
pub fn residual_inf(a: &SparseMat, x: &[f64], b: &[f64]) -> f64 {
    a.matvec(x)
        .iter()
        .zip(b)
        .map(|(ax, bi)| (ax - bi).abs())
        .fold(0.0, f64::max)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

// ---------------------------------------------------------------------------
// Dense LU kernel
// ---------------------------------------------------------------------------

/// LU factorization with partial pivoting of a dense row-major matrix.
#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl DenseLu {
    pub fn factor(n: usize, mut a: Vec<f64>) -> Result<DenseLu, SolveError> {
        assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut piv = k;
            let mut best = a[k * n + k].abs();
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best < tol::EPS_PIV {
                return Err(SolveError::Singular);
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let m = a[i * n + k] / pivot;
                a[i * n + k] = m;
                if m != 0.0 {
                    for j in k + 1..n {
                        a[i * n + j] -= m * a[k * n + j];
                    }
                }
            }
        }
        Ok(DenseLu { n, lu: a, perm })
    }

    /// Solves `A·x = b` given the factorization `P·A = L·U`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    /// Solves `Aᵀ·x = b` using the same factorization:
    /// `Aᵀ = Uᵀ·Lᵀ·P`, so forward-substitute with `Uᵀ`, back-substitute
    /// with `Lᵀ`, then undo the row permutation.
    pub fn solve_transposed(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= self.lu[j * n + i] * y[j];
            }
            y[i] = s / self.lu[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.lu[j * n + i] * y[j];
            }
            y[i] = s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }
}

/// Left-looking sparse LU with partial pivoting (`P·A = L·U`), column by
/// column: each column is solved against the finished part of `L` along
/// the reachable pattern, then the largest remaining entry pivots.
/// Factors the projection systems, whose nonzero count stays near their
/// dimension.
#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    /// Unit-diagonal L by column, rows in original indices.
    lower: Vec<Vec<(usize, f64)>>,
    /// U by column; entries keyed by pivot step, diagonal last.
    upper: Vec<Vec<(usize, f64)>>,
    /// Original row index chosen as pivot of each step.
    pivot_row: Vec<usize>,
}

impl SparseLu {
    pub fn factor(a: &SparseMat) -> Result<SparseLu, SolveError> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "sparse LU needs a square matrix");
        let mut lower: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        let mut upper: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
        let mut pivot_row = Vec::with_capacity(n);
        // pivot step of each original row, usize::MAX while unpivoted
        let mut pinv = vec![usize::MAX; n];
        let mut work = vec![0.0; n];
        let mut visited = vec![false; n];
        let mut topo: Vec<usize> = Vec::with_capacity(n);
        let mut dfs_stack: Vec<(usize, usize)> = Vec::new();

        for j in 0..n {
            // symbolic: rows reachable from the column pattern through
            // finished L columns, in topological (postorder) sequence
            topo.clear();
            for &(r, _) in a.col(j) {
                if visited[r] {
                    continue;
                }
                dfs_stack.push((r, 0));
                visited[r] = true;
                while let Some(&mut (node, ref mut next)) = dfs_stack.last_mut() {
                    let deps: &[(usize, f64)] = if pinv[node] == usize::MAX {
                        &[]
                    } else {
                        &lower[pinv[node]]
                    };
                    if *next < deps.len() {
                        let child = deps[*next].0;
                        *next += 1;
                        if !visited[child] {
                            visited[child] = true;
                            dfs_stack.push((child, 0));
                        }
                    } else {
                        topo.push(node);
                        dfs_stack.pop();
                    }
                }
            }
            // numeric: scatter the column and eliminate in reverse
            // topological order
            for &(r, v) in a.col(j) {
                work[r] = v;
            }
            for idx in (0..topo.len()).rev() {
                let r = topo[idx];
                let step = pinv[r];
                if step == usize::MAX {
                    continue;
                }
                let xr = work[r];
                if xr != 0.0 {
                    for &(i, lv) in &lower[step] {
                        work[i] -= lv * xr;
                    }
                }
            }
            // pivot: largest remaining entry among unpivoted rows
            let mut piv = usize::MAX;
            let mut best = 0.0;
            for &r in &topo {
                if pinv[r] == usize::MAX {
                    let v = work[r].abs();
                    if v > best {
                        best = v;
                        piv = r;
                    }
                }
            }
            if piv == usize::MAX || best < tol::EPS_PIV {
                return Err(SolveError::Singular);
            }
            let pivot_val = work[piv];
            let mut ucol: Vec<(usize, f64)> = Vec::new();
            let mut lcol: Vec<(usize, f64)> = Vec::new();
            for &r in &topo {
                visited[r] = false;
                let v = work[r];
                work[r] = 0.0;
                if v == 0.0 || r == piv {
                    continue;
                }
                if pinv[r] != usize::MAX {
                    ucol.push((pinv[r], v));
                } else {
                    lcol.push((r, v / pivot_val));
                }
            }
            ucol.sort_unstable_by_key(|&(s, _)| s);
            ucol.push((j, pivot_val));
            pinv[piv] = j;
            pivot_row.push(piv);
            upper.push(ucol);
            lower.push(lcol);
        }
        Ok(SparseLu {
            n,
            lower,
            upper,
            pivot_row,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        // forward: L y = b in pivot order, y indexed by original rows
        let mut y = b.to_vec();
        for step in 0..self.n {
            let v = y[self.pivot_row[step]];
            if v != 0.0 {
                for &(i, lv) in &self.lower[step] {
                    y[i] -= lv * v;
                }
            }
        }
        // backward: U x = y, column-oriented
        let mut z: Vec<f64> = (0..self.n).map(|s| y[self.pivot_row[s]]).collect();
        let mut x = vec![0.0; self.n];
        for j in (0..self.n).rev() {
            let (_, diag) = *self.upper[j].last().expect("diagonal entry");
            let xj = z[j] / diag;
            x[j] = xj;
            if xj != 0.0 {
                for &(s, uv) in &self.upper[j][..self.upper[j].len() - 1] {
                    z[s] -= uv * xj;
                }
            }
        }
        x
    }
}

/// Densifies `A` and solves `A·x = b` by LU with partial pivoting.
/// Serves as the small-projection kernel and as the `dense` backend.
pub fn lu_solve_dense(a: &SparseMat, b: &[f64]) -> Result<Vec<f64>, SolveError> {
    if a.nrows() != a.ncols() {
        return Err(SolveError::Shape {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    if b.len() != a.nrows() {
        return Err(SolveError::Shape {
            expected: a.nrows(),
            got: b.len(),
        });
    }
    let lu = DenseLu::factor(a.nrows(), a.to_dense())?;
    let x = lu.solve(b);
    let res = residual_inf(a, &x, b);
    let bound = tol::EPS_RES * (1.0 + inf_norm(b));
    if res > bound {
        return Err(SolveError::Residual {
            residual: res,
            bound,
        });
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// Bipartite graph, reach, projections
// ---------------------------------------------------------------------------

/// Adjacency of the bipartite undirected graph `G(A)` that has an edge
/// `(row i, col j)` for every nonzero `A[i,j]`.
#[derive(Debug, Clone)]
pub struct MatrixGraph {
    row_cols: Vec<Vec<usize>>,
    col_rows: Vec<Vec<usize>>,
}

impl MatrixGraph {
    pub fn new(a: &SparseMat) -> MatrixGraph {
        let mut row_cols = vec![Vec::new(); a.nrows()];
        let mut col_rows = vec![Vec::new(); a.ncols()];
        for j in 0..a.ncols() {
            for &(i, _) in a.col(j) {
                row_cols[i].push(j);
                col_rows[j].push(i);
            }
        }
        MatrixGraph { row_cols, col_rows }
    }

    /// Rows and columns reachable from the seed rows `b_rows` (sorted).
    /// A seed row with no incident edge is unreachable, which is what
    /// makes the no-solution test work on zero rows.
    pub fn reach(&self, b_rows: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut row_seen = vec![false; self.row_cols.len()];
        let mut col_seen = vec![false; self.col_rows.len()];
        let mut stack: Vec<usize> = Vec::new();
        for &r in b_rows {
            if !self.row_cols[r].is_empty() && !row_seen[r] {
                row_seen[r] = true;
                stack.push(r);
            }
        }
        // nodes on the stack are rows; expand alternately
        while let Some(r) = stack.pop() {
            for &j in &self.row_cols[r] {
                if !col_seen[j] {
                    col_seen[j] = true;
                    for &i in &self.col_rows[j] {
                        if !row_seen[i] {
                            row_seen[i] = true;
                            stack.push(i);
                        }
                    }
                }
            }
        }
        let rows = (0..row_seen.len()).filter(|&i| row_seen[i]).collect();
        let cols = (0..col_seen.len()).filter(|&j| col_seen[j]).collect();
        (rows, cols)
    }
}

/// Index pair selecting the `A[rows, cols]` submatrix to solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// How [`loc_solve`] obtains its projection: a fresh reachability sweep,
/// or a maintained over-disjoint cover.
#[derive(Debug, Clone, Copy)]
pub enum ProjectionSource<'a> {
    Reach,
    Cover(&'a Cover),
}

/// Checks the computable-projection conditions: the support of `b` lies
/// in `rows`, every row touching a selected column is selected, and
/// every column touching a selected row is selected.
pub fn certify_computable(a: &SparseMat, b: &[f64], rows: &[usize], cols: &[usize]) -> bool {
    let mut in_rows = vec![false; a.nrows()];
    let mut in_cols = vec![false; a.ncols()];
    for &r in rows {
        in_rows[r] = true;
    }
    for &c in cols {
        in_cols[c] = true;
    }
    if b.iter().enumerate().any(|(i, &v)| v != 0.0 && !in_rows[i]) {
        return false;
    }
    for j in 0..a.ncols() {
        for &(i, _) in a.col(j) {
            if in_cols[j] && !in_rows[i] {
                return false;
            }
            if in_rows[i] && !in_cols[j] {
                return false;
            }
        }
    }
    true
}

/// Scatters `alpha` to the positions `idx` of a length-`n` zero vector.
pub fn lift(alpha: &[f64], idx: &[usize], n: usize) -> Vec<f64> {
    assert_eq!(alpha.len(), idx.len(), "lift dimension mismatch");
    let mut out = vec![0.0; n];
    for (&v, &i) in alpha.iter().zip(idx) {
        assert!(i < n, "lift index out of range");
        out[i] = v;
    }
    out
}

/// Computes the projection used by [`loc_solve`] for the system
/// `A·x = b` from the requested source.
pub fn compute_projection(a: &SparseMat, b: &[f64], source: ProjectionSource) -> Projection {
    let supp: Vec<usize> = b
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, _)| i)
        .collect();
    let (rows, cols) = match source {
        ProjectionSource::Reach => MatrixGraph::new(a).reach(&supp),
        ProjectionSource::Cover(cover) => cover.projection(&supp),
    };
    Projection { rows, cols }
}

/// The localized solver. Restricts `A·x = b` to the projection induced
/// by the support of `b`, solves the projected system densely, and lifts
/// the result. Returns [`SolveError::NoSolution`] when a nonzero entry
/// of `b` lies on an unreachable (all-zero) row.
pub fn loc_solve(a: &SparseMat, b: &[f64], source: ProjectionSource) -> Result<Vec<f64>, SolveError> {
    if a.nrows() != a.ncols() {
        return Err(SolveError::Shape {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    if b.len() != a.nrows() {
        return Err(SolveError::Shape {
            expected: a.nrows(),
            got: b.len(),
        });
    }
    let proj = compute_projection(a, b, source);
    solve_projected(a, b, &proj)
}

/// Solves `A·x = b` restricted to an already-computed computable
/// projection, then lifts.
pub fn solve_projected(a: &SparseMat, b: &[f64], proj: &Projection) -> Result<Vec<f64>, SolveError> {
    let mut in_rows = vec![false; a.nrows()];
    for &r in &proj.rows {
        in_rows[r] = true;
    }
    if b.iter().enumerate().any(|(i, &v)| v != 0.0 && !in_rows[i]) {
        return Err(SolveError::NoSolution);
    }
    if proj.rows.len() != proj.cols.len() {
        return Err(SolveError::Singular);
    }
    let dim = proj.rows.len();
    let b_proj: Vec<f64> = proj.rows.iter().map(|&r| b[r]).collect();
    let y = if dim <= tol::DENSE_KERNEL_MAX {
        let block = a.gather_dense(&proj.rows, &proj.cols);
        DenseLu::factor(dim, block)?.solve(&b_proj)
    } else {
        let block = a.gather_sparse(&proj.rows, &proj.cols);
        SparseLu::factor(&block)?.solve(&b_proj)
    };
    let x = lift(&y, &proj.cols, a.ncols());
    let res = residual_inf(a, &x, b);
    let bound = tol::EPS_RES * (1.0 + inf_norm(b));
    if res > bound {
        return Err(SolveError::Residual {
            residual: res,
            bound,
        });
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// Over disjoint cover
// ---------------------------------------------------------------------------

/// Disjoint node groups of the bipartite graph of an `n×n` matrix, with
/// every nonzero's edge recorded inside exactly one group. Initialized
/// from connected components; updated by merging groups along changed
/// entries, so groups only grow or merge, never split.
///
/// Nodes are encoded as `2·row` and `2·col + 1`, which keeps node
/// identities stable when the matrix grows by one dimension.
#[derive(Debug, Clone)]
pub struct Cover {
    dim: usize,
    parent: Vec<usize>,
    size: Vec<usize>,
    edges: HashMap<usize, Vec<(usize, usize)>>,
    edge_set: HashSet<(usize, usize)>,
    largest: usize,
    /// `largest` right after the last from-scratch build; rebuilding
    /// again only pays once groups have grown past it.
    rebuilt_at: usize,
}

impl Cover {
    /// The cover whose groups are the connected components of `G(A)`.
    pub fn init(a: &SparseMat) -> Cover {
        assert_eq!(a.nrows(), a.ncols(), "cover is defined for square matrices");
        let n = a.nrows();
        let mut cover = Cover {
            dim: n,
            parent: (0..2 * n).collect(),
            size: vec![1; 2 * n],
            edges: HashMap::new(),
            edge_set: HashSet::new(),
            largest: if n == 0 { 0 } else { 1 },
            rebuilt_at: 0,
        };
        for j in 0..n {
            for &(i, _) in a.col(j) {
                cover.add_edge(i, j);
            }
        }
        cover.rebuilt_at = cover.largest;
        cover
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn find_compress(&mut self, x: usize) -> usize {
        let root = self.find(x);
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, x: usize, y: usize) -> usize {
        let rx = self.find_compress(x);
        let ry = self.find_compress(y);
        if rx == ry {
            return rx;
        }
        let (big, small) = if self.size[rx] >= self.size[ry] {
            (rx, ry)
        } else {
            (ry, rx)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        self.largest = self.largest.max(self.size[big]);
        if let Some(moved) = self.edges.remove(&small) {
            self.edges.entry(big).or_default().extend(moved);
        }
        big
    }

    fn add_edge(&mut self, i: usize, j: usize) {
        if !self.edge_set.insert((i, j)) {
            return;
        }
        let root = self.union(2 * i, 2 * j + 1);
        self.edges.entry(root).or_default().push((i, j));
    }

    /// Merges groups along the changed positions, per the cover update
    /// rule. Vanished entries keep their (now stale) edge; stale edges
    /// only enlarge projections, they cannot make one non-computable
    /// because group selection always takes whole groups.
    pub fn update(&mut self, delta: &[(usize, usize)]) {
        for &(i, j) in delta {
            assert!(i < self.dim && j < self.dim, "cover delta out of range");
            self.add_edge(i, j);
        }
    }

    /// Grows the node universe to match a matrix one dimension larger.
    pub fn grow(&mut self) {
        self.dim += 1;
        self.parent.push(self.parent.len());
        self.parent.push(self.parent.len());
        self.size.push(1);
        self.size.push(1);
        self.largest = self.largest.max(1);
    }

    /// True when the largest group holds more than half of the `2n`
    /// nodes and has grown appreciably since the last from-scratch
    /// build. The growth condition stops a legitimately giant connected
    /// component from triggering a rebuild on every update.
    pub fn needs_rebuild(&self) -> bool {
        self.largest > self.dim && self.largest > self.rebuilt_at + self.rebuilt_at / 8 + 8
    }

    /// Projection per the cover rule: all edges of every group that
    /// contains a support row.
    pub fn projection(&self, supp_rows: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut roots: Vec<usize> = supp_rows.iter().map(|&r| self.find(2 * r)).collect();
        roots.sort_unstable();
        roots.dedup();
        let mut rows = Vec::new();
        let mut cols = Vec::new();
        for root in roots {
            if let Some(edges) = self.edges.get(&root) {
                for &(i, j) in edges {
                    rows.push(i);
                    cols.push(j);
                }
            }
        }
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        (rows, cols)
    }

    /// Validates the cover against a matrix: every nonzero's edge must be
    /// recorded and have both endpoints in the same group. (Group
    /// disjointness is structural in the union-find representation.)
    pub fn is_valid_for(&self, a: &SparseMat) -> bool {
        if a.nrows() != a.ncols() || a.nrows() != self.dim {
            return false;
        }
        for j in 0..a.ncols() {
            for &(i, _) in a.col(j) {
                if !self.edge_set.contains(&(i, j)) {
                    return false;
                }
                if self.find(2 * i) != self.find(2 * j + 1) {
                    return false;
                }
            }
        }
        // recorded edges must lie within their group
        for (root, edges) in &self.edges {
            for &(i, j) in edges {
                if self.find(2 * i) != self.find(*root) || self.find(2 * j + 1) != self.find(*root)
                {
                    return false;
                }
            }
        }
        true
    }
}

/// Builds the connected-component cover of `G(A)`.
pub fn cover_init(a: &SparseMat) -> Cover {
    Cover::init(a)
}

/// Applies a change set to a cover (merge-only update rule).
pub fn cover_update(cover: &mut Cover, delta: &[(usize, usize)]) {
    cover.update(delta);
}

// ---------------------------------------------------------------------------
// Incremental solver
// ---------------------------------------------------------------------------

/// How the system dimension moved relative to the previous call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimChange {
    Same,
    /// One row and column appended at the end.
    Grew,
    /// Row and column at this index removed; later indices shift down.
    Shrank(usize),
}

/// State carried between incremental solves: the previous system, its
/// solution, and the cover of the previous matrix's graph.
#[derive(Debug, Clone)]
pub struct IncContext {
    prev_a: SparseMat,
    prev_b: Vec<f64>,
    prev_x: Vec<f64>,
    cover: Cover,
    /// Covers rebuilt from scratch (dimension shrink or size trigger).
    pub rebuilds: usize,
    /// Solves redone from scratch after a failed residual check.
    pub fallbacks: usize,
    /// Incremental solves performed (excluding the `ξ′ = 0` branch).
    pub delta_solves: usize,
    /// Sum over incremental solves of the support size of `Δb`.
    pub supp_rows_total: usize,
    /// Sum over incremental solves of the projection row count.
    pub proj_rows_total: usize,
}

impl IncContext {
    /// Fresh context with no previous solution; the first solve takes the
    /// `ξ′ = 0` branch and solves from scratch.
    pub fn new() -> IncContext {
        let empty = SparseMat::zero(0, 0);
        let cover = Cover::init(&empty);
        IncContext {
            prev_a: empty,
            prev_b: Vec::new(),
            prev_x: Vec::new(),
            cover,
            rebuilds: 0,
            fallbacks: 0,
            delta_solves: 0,
            supp_rows_total: 0,
            proj_rows_total: 0,
        }
    }

    /// Context seeded with a known solution of `A·x = b`.
    pub fn from_solution(a: SparseMat, b: Vec<f64>, x: Vec<f64>) -> Result<IncContext, SolveError> {
        let res = residual_inf(&a, &x, &b);
        let bound = tol::EPS_RES * (1.0 + inf_norm(&b));
        if res > bound {
            return Err(SolveError::Residual {
                residual: res,
                bound,
            });
        }
        let cover = Cover::init(&a);
        Ok(IncContext {
            prev_a: a,
            prev_b: b,
            prev_x: x,
            cover,
            rebuilds: 0,
            fallbacks: 0,
            delta_solves: 0,
            supp_rows_total: 0,
            proj_rows_total: 0,
        })
    }

    pub fn cover(&self) -> &Cover {
        &self.cover
    }

    /// Aligns the carried state with the new matrix: pads or truncates
    /// the previous solution on a dimension change and brings the cover
    /// up to date (merge along the diff, or rebuild on a shrink).
    fn reconcile(&mut self, a: &SparseMat, change: DimChange) {
        let n = a.nrows();
        let matches = match change {
            DimChange::Same => self.prev_a.nrows() == n,
            DimChange::Grew => self.prev_a.nrows() + 1 == n,
            DimChange::Shrank(d) => self.prev_a.nrows() == n + 1 && d < self.prev_a.nrows(),
        };
        if !matches {
            // unknown provenance: reset to the scratch branch
            self.prev_x = vec![0.0; n];
            self.cover = Cover::init(a);
            self.rebuilds += 1;
            return;
        }
        match change {
            DimChange::Same => {
                let delta = self.prev_a.diff_positions(a);
                self.cover.update(&delta);
            }
            DimChange::Grew => {
                self.prev_x.push(0.0);
                self.prev_a.grow_square();
                self.cover.grow();
                let delta = self.prev_a.diff_positions(a);
                self.cover.update(&delta);
            }
            DimChange::Shrank(d) => {
                // indices after d shift; cheapest sound cover is a rebuild
                self.prev_x.remove(d);
                self.cover = Cover::init(a);
                self.rebuilds += 1;
            }
        }
        if self.cover.needs_rebuild() {
            self.cover = Cover::init(a);
            self.rebuilds += 1;
        }
    }

    /// The incremental solve: `Δb = b − A·ξ′`, solve `A·Δξ = Δb`
    /// localized over the cover, return `ξ = ξ′ + Δξ`. Falls back to a
    /// from-scratch localized solve if the combined result misses the
    /// residual bound.
    pub fn solve(
        &mut self,
        a: &SparseMat,
        b: &[f64],
        change: DimChange,
    ) -> Result<Vec<f64>, SolveError> {
        self.solve_owned(a.clone(), b, change)
    }

    /// Like [`Self::solve`] but takes the matrix by value, sparing a
    /// clone when the caller built it fresh.
    pub fn solve_owned(
        &mut self,
        a: SparseMat,
        b: &[f64],
        change: DimChange,
    ) -> Result<Vec<f64>, SolveError> {
        if a.nrows() != a.ncols() {
            return Err(SolveError::Shape {
                expected: a.nrows(),
                got: a.ncols(),
            });
        }
        if b.len() != a.nrows() {
            return Err(SolveError::Shape {
                expected: a.nrows(),
                got: b.len(),
            });
        }
        self.reconcile(&a, change);
        let x = if self.prev_x.iter().all(|&v| v == 0.0) {
            loc_solve(&a, b, ProjectionSource::Cover(&self.cover))?
        } else {
            let refresh = tol::EPS_INC_REFRESH * (1.0 + inf_norm(b));
            let cutoff = tol::EPS_INC_SUPP * (1.0 + inf_norm(b));
            let ax = a.matvec(&self.prev_x);
            let mut delta_b: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
            for v in delta_b.iter_mut() {
                if v.abs() <= cutoff {
                    *v = 0.0;
                }
            }
            self.delta_solves += 1;
            self.supp_rows_total += delta_b.iter().filter(|v| **v != 0.0).count();
            let proj = compute_projection(&a, &delta_b, ProjectionSource::Cover(&self.cover));
            self.proj_rows_total += proj.rows.len();
            let dx = solve_projected(&a, &delta_b, &proj)?;
            let mut x: Vec<f64> = self.prev_x.iter().zip(&dx).map(|(p, d)| p + d).collect();
            if residual_inf(&a, &x, b) > refresh {
                self.fallbacks += 1;
                x = loc_solve(&a, b, ProjectionSource::Cover(&self.cover))?;
            }
            x
        };
        self.prev_a = a;
        self.prev_b = b.to_vec();
        self.prev_x = x.clone();
        Ok(x)
    }
}

impl Default for IncContext {
    fn default() -> Self {
        IncContext::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dense_matvec(d: &[f64], nrows: usize, ncols: usize, x: &[f64]) -> Vec<f64> {
        (0..nrows)
            .map(|i| (0..ncols).map(|j| d[i * ncols + j] * x[j]).sum())
            .collect()
    }

    /// Random sparse matrix with a guaranteed nonzero diagonal, which is
    /// nonsingular in practice for the densities used here.
    fn random_diag_dominantish(n: usize, extra: usize, rng: &mut ChaCha8Rng) -> SparseMat {
        let mut entries: Vec<(usize, usize, f64)> = (0..n)
            .map(|i| (i, i, 1.0 + rng.gen_range(0.0..2.0)))
            .collect();
        for _ in 0..extra {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i != j {
                entries.push((i, j, rng.gen_range(-1.0..1.0)));
            }
        }
        SparseMat::from_triplets(n, n, &entries).unwrap()
    }

    #[test]
    fn triplets_diag() {
        let a = SparseMat::from_triplets(2, 2, &[(0, 0, 2.0), (1, 1, 3.0)]).unwrap();
        assert_eq!(a.get(0, 0), 2.0);
        assert_eq!(a.get(1, 1), 3.0);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn triplets_cancel_to_empty() {
        let a = SparseMat::from_triplets(2, 2, &[(0, 0, 1.0), (0, 0, -1.0)]).unwrap();
        assert_eq!(a.nnz(), 0);
    }

    #[test]
    fn triplets_out_of_range() {
        assert!(SparseMat::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn matvec_identity_and_zero() {
        let x = vec![3.0, -1.0, 2.5];
        assert_eq!(SparseMat::identity(3).matvec(&x), x);
        assert_eq!(SparseMat::zero(3, 3).matvec(&x), vec![0.0; 3]);
    }

    #[test]
    fn lu_solve_diag() {
        let a = SparseMat::from_triplets(2, 2, &[(0, 0, 2.0), (1, 1, 3.0)]).unwrap();
        let x = lu_solve_dense(&a, &[4.0, 3.0]).unwrap();
        assert_eq!(x, vec![2.0, 1.0]);
    }

    #[test]
    fn lu_solve_identity() {
        let b = vec![1.0, -2.0, 0.5, 9.0];
        assert_eq!(lu_solve_dense(&SparseMat::identity(4), &b).unwrap(), b);
    }

    #[test]
    fn lu_solve_random_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let a = random_diag_dominantish(30, 120, &mut rng);
        let b: Vec<f64> = (0..30).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let x = lu_solve_dense(&a, &b).unwrap();
        assert!(residual_inf(&a, &x, &b) <= tol::EPS_RES * (1.0 + 5.0));
    }

    #[test]
    fn lu_detects_singular() {
        let a = SparseMat::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0)]).unwrap();
        assert_eq!(lu_solve_dense(&a, &[1.0, 1.0]), Err(SolveError::Singular));
    }

    #[test]
    fn sparse_lu_matches_dense_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for t in 0..200 {
            let n = 2 + t % 60;
            let a = random_diag_dominantish(n, 3 * n, &mut rng);
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let dense = DenseLu::factor(n, a.to_dense()).unwrap().solve(&b);
            let sparse = SparseLu::factor(&a).unwrap().solve(&b);
            for (u, v) in sparse.iter().zip(&dense) {
                assert!((u - v).abs() < 1e-9, "t={t} n={n}: {u} vs {v}");
            }
        }
    }

    #[test]
    fn sparse_lu_needs_pivoting() {
        // zero diagonal head forces a row exchange
        let a = SparseMat::from_triplets(
            3,
            3,
            &[(1, 0, 2.0), (0, 1, 1.0), (0, 0, 1e-14), (2, 2, 4.0), (1, 2, 1.0)],
        )
        .unwrap();
        let b = vec![3.0, 8.0, 4.0];
        let x = SparseLu::factor(&a).unwrap().solve(&b);
        assert!(residual_inf(&a, &x, &b) < 1e-9);
    }

    #[test]
    fn sparse_lu_detects_singular() {
        let a =
            SparseMat::from_triplets(3, 3, &[(0, 0, 1.0), (1, 1, 1.0), (0, 2, 1.0)]).unwrap();
        assert!(matches!(SparseLu::factor(&a), Err(SolveError::Singular)));
    }

    #[test]
    fn lu_transposed_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_diag_dominantish(12, 40, &mut rng);
        let b: Vec<f64> = (0..12).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let lu = DenseLu::factor(12, a.to_dense()).unwrap();
        let x = lu.solve_transposed(&b);
        let at = a.transpose();
        assert!(residual_inf(&at, &x, &b) < 1e-9);
    }

    #[test]
    fn reach_isolated_diag() {
        let a = SparseMat::from_triplets(3, 3, &[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]).unwrap();
        let (rows, cols) = MatrixGraph::new(&a).reach(&[1]);
        assert_eq!(rows, vec![1]);
        assert_eq!(cols, vec![1]);
    }

    #[test]
    fn reach_upper_triangular_chain() {
        // [[1,1],[0,1]]: row 0 → cols 0,1 → row 1
        let a =
            SparseMat::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0)]).unwrap();
        let (rows, cols) = MatrixGraph::new(&a).reach(&[0]);
        assert_eq!(rows, vec![0, 1]);
        assert_eq!(cols, vec![0, 1]);
    }

    #[test]
    fn reach_empty_seed() {
        let a = SparseMat::identity(4);
        let (rows, cols) = MatrixGraph::new(&a).reach(&[]);
        assert!(rows.is_empty() && cols.is_empty());
    }

    #[test]
    fn certify_reach_output_and_full_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_diag_dominantish(20, 30, &mut rng);
        let mut b = vec![0.0; 20];
        b[4] = 1.0;
        b[11] = -2.0;
        let proj = compute_projection(&a, &b, ProjectionSource::Reach);
        assert!(certify_computable(&a, &b, &proj.rows, &proj.cols));
        let all: Vec<usize> = (0..20).collect();
        assert!(certify_computable(&a, &b, &all, &all));
        // dropping a required row violates the closure conditions
        let mut rows = proj.rows.clone();
        rows.pop();
        assert!(!certify_computable(&a, &b, &rows, &proj.cols));
    }

    #[test]
    fn lift_examples() {
        assert_eq!(lift(&[5.0], &[1], 3), vec![0.0, 5.0, 0.0]);
        assert_eq!(lift(&[], &[], 4), vec![0.0; 4]);
        let alpha = [1.5, -2.0, 3.0];
        let idx = [0, 2, 4];
        let lifted = lift(&alpha, &idx, 6);
        let gathered: Vec<f64> = idx.iter().map(|&i| lifted[i]).collect();
        assert_eq!(gathered, alpha);
    }

    #[test]
    fn loc_solve_identity_single_entry() {
        let a = SparseMat::identity(3);
        let b = vec![0.0, 5.0, 0.0];
        let proj = compute_projection(&a, &b, ProjectionSource::Reach);
        assert_eq!((proj.rows.len(), proj.cols.len()), (1, 1));
        assert_eq!(loc_solve(&a, &b, ProjectionSource::Reach).unwrap(), b);
    }

    #[test]
    fn loc_solve_zero_rhs() {
        let a = SparseMat::identity(3);
        let x = loc_solve(&a, &[0.0; 3], ProjectionSource::Reach).unwrap();
        assert_eq!(x, vec![0.0; 3]);
    }

    #[test]
    fn loc_solve_small_projection_matches_dense() {
        // [[1,1,0],[0,1,0],[0,0,2]] with b=[1,1,0]: projection {0,1}
        let a = SparseMat::from_triplets(
            3,
            3,
            &[(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0), (2, 2, 2.0)],
        )
        .unwrap();
        let b = vec![1.0, 1.0, 0.0];
        let proj = compute_projection(&a, &b, ProjectionSource::Reach);
        assert_eq!(proj.rows, vec![0, 1]);
        assert_eq!(proj.cols, vec![0, 1]);
        let x = loc_solve(&a, &b, ProjectionSource::Reach).unwrap();
        assert_eq!(x, vec![0.0, 1.0, 0.0]);
        assert_eq!(x, lu_solve_dense(&a, &b).unwrap());
    }

    #[test]
    fn loc_solve_zero_row_infeasible() {
        // row 1 is all zeros but b[1] != 0
        let a = SparseMat::from_triplets(3, 3, &[(0, 0, 1.0), (2, 2, 1.0), (0, 1, 1.0)]).unwrap();
        let b = vec![0.0, 7.0, 0.0];
        assert_eq!(
            loc_solve(&a, &b, ProjectionSource::Reach),
            Err(SolveError::NoSolution)
        );
    }

    #[test]
    fn loc_solve_zero_row_feasible_elsewhere() {
        // same singular matrix, but the rhs support avoids the zero row
        let a = SparseMat::from_triplets(3, 3, &[(0, 0, 2.0), (2, 2, 1.0)]).unwrap();
        let b = vec![4.0, 0.0, 0.0];
        let x = loc_solve(&a, &b, ProjectionSource::Reach).unwrap();
        assert_eq!(x, vec![2.0, 0.0, 0.0]);
    }

    #[test]
    fn cover_init_components() {
        // two diagonal blocks → two groups
        let a = SparseMat::from_triplets(
            4,
            4,
            &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (2, 2, 1.0), (3, 2, 1.0), (3, 3, 1.0)],
        )
        .unwrap();
        let cover = Cover::init(&a);
        assert!(cover.is_valid_for(&a));
        let (r1, c1) = cover.projection(&[0]);
        assert_eq!(r1, vec![0, 1]);
        assert_eq!(c1, vec![0, 1]);
        let (r2, c2) = cover.projection(&[2]);
        assert_eq!(r2, vec![2, 3]);
        assert_eq!(c2, vec![2, 3]);
    }

    #[test]
    fn cover_dense_single_group() {
        let entries: Vec<(usize, usize, f64)> = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j, 1.0)))
            .collect();
        let a = SparseMat::from_triplets(3, 3, &entries).unwrap();
        let cover = Cover::init(&a);
        let (rows, cols) = cover.projection(&[1]);
        assert_eq!(rows, vec![0, 1, 2]);
        assert_eq!(cols, vec![0, 1, 2]);
    }

    #[test]
    fn cover_update_merges_groups() {
        let a = SparseMat::from_triplets(4, 4, &[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0), (3, 3, 1.0)])
            .unwrap();
        let mut cover = Cover::init(&a);
        // delta inside one group: no observable change
        cover.update(&[(0, 0)]);
        let (r, _) = cover.projection(&[0]);
        assert_eq!(r, vec![0]);
        // bridge groups 0 and 1
        cover.update(&[(0, 1)]);
        let (r, c) = cover.projection(&[0]);
        assert_eq!(r, vec![0, 1]);
        assert_eq!(c, vec![0, 1]);
        let b = SparseMat::from_triplets(
            4,
            4,
            &[(0, 0, 1.0), (0, 1, 0.5), (1, 1, 1.0), (2, 2, 1.0), (3, 3, 1.0)],
        )
        .unwrap();
        assert!(cover.is_valid_for(&b));
    }

    #[test]
    fn cover_update_sequence_stays_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut a = random_diag_dominantish(25, 20, &mut rng);
        let mut cover = Cover::init(&a);
        for _ in 0..30 {
            let mut entries: Vec<(usize, usize, f64)> = Vec::new();
            for j in 0..25 {
                for &(i, v) in a.col(j) {
                    entries.push((i, j, v));
                }
            }
            for _ in 0..rng.gen_range(1..=5) {
                entries.push((rng.gen_range(0..25), rng.gen_range(0..25), rng.gen_range(-1.0..1.0)));
            }
            let next = SparseMat::from_triplets(25, 25, &entries).unwrap();
            let delta = a.diff_positions(&next);
            cover.update(&delta);
            assert!(cover.is_valid_for(&next));
            a = next;
        }
    }

    #[test]
    fn inc_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_diag_dominantish(15, 30, &mut rng);
        let b: Vec<f64> = (0..15).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let x = lu_solve_dense(&a, &b).unwrap();
        let mut ctx = IncContext::from_solution(a.clone(), b.clone(), x.clone()).unwrap();
        let x2 = ctx.solve(&a, &b, DimChange::Same).unwrap();
        assert_eq!(x2, x, "identical system must return the carried solution");
    }

    #[test]
    fn inc_hand_case() {
        // prev: I₂·[1,2] = [1,2]; new: diag(1,2)·x = [1,2] → x = [1,1]
        let a = SparseMat::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 2.0)]).unwrap();
        let mut ctx = IncContext::from_solution(
            SparseMat::identity(2),
            vec![1.0, 2.0],
            vec![1.0, 2.0],
        )
        .unwrap();
        let x = ctx.solve(&a, &[1.0, 2.0], DimChange::Same).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inc_zero_prev_equals_loc() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = random_diag_dominantish(10, 18, &mut rng);
        let mut b = vec![0.0; 10];
        b[3] = 2.0;
        let mut ctx = IncContext::new();
        let xi = ctx.solve(&a, &b, DimChange::Same).unwrap();
        let xl = loc_solve(&a, &b, ProjectionSource::Reach).unwrap();
        for (u, v) in xi.iter().zip(&xl) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn inc_dimension_changes() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let a = random_diag_dominantish(8, 12, &mut rng);
        let b: Vec<f64> = (0..8).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut ctx = IncContext::new();
        let x0 = ctx.solve(&a, &b, DimChange::Same).unwrap();
        assert!(residual_inf(&a, &x0, &b) <= tol::EPS_RES * (1.0 + 2.0));

        // grow by one: border column/row
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for j in 0..8 {
            for &(i, v) in a.col(j) {
                entries.push((i, j, v));
            }
        }
        entries.push((8, 8, 2.0));
        entries.push((0, 8, 0.5));
        entries.push((8, 1, -0.5));
        let grown = SparseMat::from_triplets(9, 9, &entries).unwrap();
        let mut b2 = b.clone();
        b2.push(1.0);
        let x1 = ctx.solve(&grown, &b2, DimChange::Grew).unwrap();
        assert!(residual_inf(&grown, &x1, &b2) <= tol::EPS_RES * (1.0 + 2.0));
        let oracle = lu_solve_dense(&grown, &b2).unwrap();
        for (u, v) in x1.iter().zip(&oracle) {
            assert!((u - v).abs() < 1e-7);
        }

        // shrink back: drop index 4
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for j in 0..9 {
            for &(i, v) in grown.col(j) {
                if i != 4 && j != 4 {
                    let ii = if i > 4 { i - 1 } else { i };
                    let jj = if j > 4 { j - 1 } else { j };
                    entries.push((ii, jj, v));
                }
            }
        }
        let shrunk = SparseMat::from_triplets(8, 8, &entries).unwrap();
        let mut b3 = b2.clone();
        b3.remove(4);
        let x2 = ctx.solve(&shrunk, &b3, DimChange::Shrank(4)).unwrap();
        let oracle = lu_solve_dense(&shrunk, &b3).unwrap();
        for (u, v) in x2.iter().zip(&oracle) {
            assert!((u - v).abs() < 1e-7);
        }
    }

    #[test]
    fn triplet_text_roundtrip() {
        let a = SparseMat::from_triplets(3, 4, &[(0, 1, 2.5), (2, 0, -1.0), (2, 3, 4.0)]).unwrap();
        let mut buf = Vec::new();
        a.write_triplet_text(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(SparseMat::parse_triplet_text(&text).unwrap(), a);
    }

    proptest! {
        #[test]
        fn triplets_match_dense_accumulation(
            seed in 0u64..1000, n in 1usize..12, k in 0usize..40
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let entries: Vec<(usize, usize, f64)> = (0..k)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(-3..=3) as f64))
                .collect();
            let a = SparseMat::from_triplets(n, n, &entries).unwrap();
            let mut dense = vec![0.0; n * n];
            for &(r, c, v) in &entries {
                dense[r * n + c] += v;
            }
            prop_assert_eq!(a.to_dense(), dense);
        }

        #[test]
        fn matvec_matches_dense(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 20;
            let a = random_diag_dominantish(n, 60, &mut rng);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let dense = a.to_dense();
            let want = dense_matvec(&dense, n, n, &x);
            let got = a.matvec(&x);
            for (u, v) in got.iter().zip(&want) {
                prop_assert!((u - v).abs() < 1e-12);
            }
        }

        #[test]
        fn mul_matches_dense(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (n, m, p) = (6, 5, 7);
            let mut ea = Vec::new();
            let mut eb = Vec::new();
            for _ in 0..12 {
                ea.push((rng.gen_range(0..n), rng.gen_range(0..m), rng.gen_range(-2..=2) as f64));
                eb.push((rng.gen_range(0..m), rng.gen_range(0..p), rng.gen_range(-2..=2) as f64));
            }
            let a = SparseMat::from_triplets(n, m, &ea).unwrap();
            let b = SparseMat::from_triplets(m, p, &eb).unwrap();
            let c = a.mul(&b);
            let (da, db) = (a.to_dense(), b.to_dense());
            for i in 0..n {
                for j in 0..p {
                    let want: f64 = (0..m).map(|k| da[i * m + k] * db[k * p + j]).sum();
                    prop_assert!((c.get(i, j) - want).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn reach_projection_always_certifies(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 15;
            let a = random_diag_dominantish(n, rng.gen_range(0..40), &mut rng);
            let mut b = vec![0.0; n];
            for _ in 0..rng.gen_range(1..4) {
                b[rng.gen_range(0..n)] = rng.gen_range(-2.0..2.0);
            }
            let proj = compute_projection(&a, &b, ProjectionSource::Reach);
            prop_assert!(certify_computable(&a, &b, &proj.rows, &proj.cols));
            // cover-based projections certify as well
            let cover = Cover::init(&a);
            let proj = compute_projection(&a, &b, ProjectionSource::Cover(&cover));
            prop_assert!(certify_computable(&a, &b, &proj.rows, &proj.cols));
        }
    }
}
