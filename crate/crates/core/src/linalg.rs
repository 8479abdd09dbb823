//! Internal dense linear algebra helpers.
//!
//! Matrix products route through `matrixmultiply`'s blocked dgemm, which is
//! substantially faster than naive loops on the tall/skinny shapes produced by
//! sketched compression. Decompositions (QR, symmetric eigen) come from
//! nalgebra; buffers are column-major throughout, so tensor unfoldings can be
//! multiplied without copies.

use nalgebra::DMatrix;

/// Column-major matrix view over a raw buffer, optionally transposed.
#[derive(Copy, Clone)]
pub(crate) struct MatRef<'a> {
    data: &'a [f64],
    rows: usize,
    cols: usize,
    trans: bool,
}

impl<'a> MatRef<'a> {
    pub fn new(data: &'a [f64], rows: usize, cols: usize) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self {
            data,
            rows,
            cols,
            trans: false,
        }
    }

    pub fn from_mat(m: &'a DMatrix<f64>) -> Self {
        Self::new(m.as_slice(), m.nrows(), m.ncols())
    }

    pub fn t(mut self) -> Self {
        self.trans = !self.trans;
        self
    }

    /// Logical row count (after any transposition).
    pub fn m(&self) -> usize {
        if self.trans {
            self.cols
        } else {
            self.rows
        }
    }

    /// Logical column count.
    pub fn n(&self) -> usize {
        if self.trans {
            self.rows
        } else {
            self.cols
        }
    }

    fn strides(&self) -> (isize, isize) {
        if self.trans {
            (self.rows as isize, 1)
        } else {
            (1, self.rows as isize)
        }
    }
}

/// `alpha * a * b`, allocated fresh.
pub(crate) fn mm_ref(alpha: f64, a: MatRef, b: MatRef) -> DMatrix<f64> {
    let (m, k, n) = (a.m(), a.n(), b.n());
    debug_assert_eq!(k, b.m());
    let mut c = DMatrix::<f64>::zeros(m, n);
    if m == 0 || n == 0 || k == 0 {
        return c;
    }
    let (rsa, csa) = a.strides();
    let (rsb, csb) = b.strides();
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.data.as_ptr(),
            rsa,
            csa,
            b.data.as_ptr(),
            rsb,
            csb,
            0.0,
            c.as_mut_slice().as_mut_ptr(),
            1,
            m as isize,
        );
    }
    c
}

pub(crate) fn mm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    mm_ref(1.0, MatRef::from_mat(a), MatRef::from_mat(b))
}

pub(crate) fn mm_tn(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    mm_ref(1.0, MatRef::from_mat(a).t(), MatRef::from_mat(b))
}

pub(crate) fn mm_nt(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    mm_ref(1.0, MatRef::from_mat(a), MatRef::from_mat(b).t())
}

/// Thin Q factor of a QR factorization.
pub(crate) fn thin_q(a: &DMatrix<f64>) -> DMatrix<f64> {
    a.clone().qr().q()
}

/// Eigendecomposition of a symmetric PSD matrix, eigenvalues descending and
/// clamped at zero.
pub(crate) fn sym_eig_desc(g: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = g.nrows();
    let eig = nalgebra::SymmetricEigen::new(g.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Economic SVD computed from the Gram matrix of the shorter side.
///
/// For `m >= n`: `A^T A = V S^2 V^T` by symmetric eigendecomposition and
/// `U = A V S^{-1}`; the roles swap for wide matrices. Singular values below
/// `1e-12 * sigma_1` are dropped, so the returned factors may have fewer than
/// `min(m, n)` columns.
pub(crate) fn eig_svd_impl(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (m, n) = (a.nrows(), a.ncols());
    if m < n {
        let at = a.transpose();
        let (u, s, v) = eig_svd_impl(&at);
        return (v, s, u);
    }
    let gram = mm_tn(a, a);
    let (vals, vecs) = sym_eig_desc(&gram);
    let sigma: Vec<f64> = vals.iter().map(|&l| l.sqrt()).collect();
    let cutoff = sigma.first().copied().unwrap_or(0.0) * 1e-12;
    let rank = sigma.iter().take_while(|&&s| s > cutoff).count();
    let v = vecs.columns(0, rank).into_owned();
    // U = A V S^{-1}
    let mut u = mm(a, &v);
    for j in 0..rank {
        let inv = 1.0 / sigma[j];
        for i in 0..m {
            u[(i, j)] *= inv;
        }
    }
    (u, sigma[..rank].to_vec(), v)
}

/// Singular values only, descending. Computed by nalgebra's bidiagonal SVD:
/// each value is accurate to machine precision relative to `sigma_1`, which
/// the Gram route cannot deliver for the small tail values.
pub(crate) fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let svd = nalgebra::SVD::new_unordered(a.clone(), false, false);
    let mut vals: Vec<f64> = svd.singular_values.iter().copied().collect();
    vals.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    vals
}

/// Moore-Penrose pseudo-inverse with singular values below
/// `1e-12 * sigma_1` truncated.
pub(crate) fn pinv(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (u, s, v) = eig_svd_impl(a);
    if s.is_empty() {
        return DMatrix::zeros(a.ncols(), a.nrows());
    }
    let mut vs = v;
    for j in 0..s.len() {
        let inv = 1.0 / s[j];
        for i in 0..vs.nrows() {
            vs[(i, j)] *= inv;
        }
    }
    mm_nt(&vs, &u)
}

/// Solves `Z X = B` for symmetric PSD `Z` via truncated eigendecomposition
/// (eigenvalues below `1e-12 * lambda_1` are discarded).
pub(crate) fn psd_solve(z: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = sym_eig_desc(z);
    let cutoff = vals.first().copied().unwrap_or(0.0) * 1e-12;
    let rank = vals.iter().take_while(|&&l| l > cutoff).count();
    let vr = vecs.columns(0, rank).into_owned();
    let mut coeff = mm_tn(&vr, b);
    for i in 0..rank {
        let inv = 1.0 / vals[i];
        for j in 0..coeff.ncols() {
            coeff[(i, j)] *= inv;
        }
    }
    mm(&vr, &coeff)
}

/// `tr(T Z^+)` for symmetric PSD `T`, `Z`, with the same truncation rule as
/// [`psd_solve`].
pub(crate) fn trace_psd_solve(t: &DMatrix<f64>, z: &DMatrix<f64>) -> f64 {
    let x = psd_solve(z, t);
    (0..x.nrows()).map(|i| x[(i, i)]).sum()
}

/// Max-norm departure from orthonormal columns, `max |Q^T Q - I|`.
pub(crate) fn orthonormality_defect(q: &DMatrix<f64>) -> f64 {
    let g = mm_tn(q, q);
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mm_matches_nalgebra() {
        let a = DMatrix::<f64>::from_fn(4, 3, |i, j| (i * 3 + j) as f64 * 0.25 - 1.0);
        let b = DMatrix::<f64>::from_fn(3, 5, |i, j| ((i + 2 * j) as f64).cos());
        assert!((mm(&a, &b) - &a * &b).abs().max() < 1e-12);
        assert!((mm_tn(&a, &a) - a.transpose() * &a).abs().max() < 1e-12);
        assert!((mm_nt(&b, &b) - &b * b.transpose()).abs().max() < 1e-12);
    }

    #[test]
    fn pinv_of_full_rank_square_inverts() {
        let a = DMatrix::<f64>::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 3.0]);
        let p = pinv(&a);
        assert!((mm(&a, &p) - DMatrix::identity(2, 2)).abs().max() < 1e-12);
    }

    #[test]
    fn psd_solve_matches_direct_inverse() {
        let a = DMatrix::<f64>::from_fn(6, 4, |i, j| ((i * j + 1) as f64).sin());
        let z = mm_tn(&a, &a);
        let b = DMatrix::<f64>::from_fn(4, 2, |i, j| (i + j) as f64);
        let x = psd_solve(&z, &b);
        assert!((mm(&z, &x) - &b).abs().max() < 1e-8);
    }
}
