//! Randomized Tucker compression.
//!
//! Two sketching-based compressors plus a deterministic baseline:
//!
//! - [`sthosvd`]: sequentially truncated HOSVD, the deterministic reference.
//! - [`compress_fixed_rank`]: per mode, sketch the current core's unfolding,
//!   run power iterations, orthonormalize both sides, decompose the small
//!   compressed core with a column-pivoted QR, and keep the leading columns.
//! - [`compress_fixed_accuracy`]: per mode, grow an incremental QB
//!   factorization block by block with shifted power iterations until the
//!   Frobenius error estimate drops below the tolerance; the rank is
//!   discovered rather than prescribed.
//!
//! All sketches are deterministic for a fixed seed.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg::{self, MatRef};
use crate::rng::derive_seed;
use crate::sketch::{make_sketch, SketchError, SketchSpec};
use crate::tensor::{DenseTensor, Permutation, TensorError};

#[derive(Debug, Error)]
pub enum CompressError {
    #[error("rank {rank} exceeds extent {extent} of mode {mode}")]
    RankExceedsExtent {
        mode: usize,
        rank: usize,
        extent: usize,
    },
    #[error("sketch size {l} for mode {mode} outside [{min}, {max}]")]
    SketchSizeOutOfRange {
        mode: usize,
        l: usize,
        min: usize,
        max: usize,
    },
    #[error("config vector {name} has length {got}, tensor order is {order}")]
    ConfigLength {
        name: &'static str,
        got: usize,
        order: usize,
    },
    #[error("tolerance must be in (0, 1), got {0}")]
    BadTolerance(f64),
    #[error("block size must be >= 1")]
    ZeroBlock,
    #[error("processing order {0:?} is not a permutation of the modes")]
    BadOrder(Vec<usize>),
    #[error("factor {mode} departs from orthonormality by {defect:e}")]
    NotOrthonormal { mode: usize, defect: f64 },
    #[error(transparent)]
    Sketch(#[from] SketchError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Tucker representation: a small core and one orthonormal factor per mode.
#[derive(Debug, Clone)]
pub struct TuckerApprox {
    core: DenseTensor,
    factors: Vec<DMatrix<f64>>,
}

impl TuckerApprox {
    /// Validates shape consistency and per-factor orthonormality
    /// (`max |F^T F - I| <= 1e-10`).
    pub fn new(core: DenseTensor, factors: Vec<DMatrix<f64>>) -> Result<Self, CompressError> {
        if factors.len() != core.order() {
            return Err(CompressError::ConfigLength {
                name: "factors",
                got: factors.len(),
                order: core.order(),
            });
        }
        for (mode, f) in factors.iter().enumerate() {
            if f.ncols() != core.shape()[mode] {
                return Err(CompressError::ConfigLength {
                    name: "factor columns",
                    got: f.ncols(),
                    order: core.shape()[mode],
                });
            }
            let defect = linalg::orthonormality_defect(f);
            if defect > 1e-10 {
                return Err(CompressError::NotOrthonormal { mode, defect });
            }
        }
        Ok(Self { core, factors })
    }

    pub fn core(&self) -> &DenseTensor {
        &self.core
    }

    pub fn factors(&self) -> &[DMatrix<f64>] {
        &self.factors
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.core.shape().to_vec()
    }

    /// Multiplies the core by every factor: the full-size approximation.
    pub fn reconstruct(&self) -> DenseTensor {
        let mut x = self.core.clone();
        for (mode, f) in self.factors.iter().enumerate() {
            x = x.mode_product(f, mode).expect("factor shapes validated");
        }
        x
    }

    /// `||x - reconstruct()||_F / ||x||_F`.
    pub fn relative_error(&self, x: &DenseTensor) -> f64 {
        self.reconstruct().sub(x).frobenius_norm() / x.frobenius_norm().max(f64::MIN_POSITIVE)
    }
}

/// Configuration for the fixed-rank compressor.
#[derive(Debug, Clone)]
pub struct FixedRankConfig {
    /// Target multilinear rank, one entry per mode.
    pub rank: Vec<usize>,
    /// Per-mode sketch widths; `None` selects `min(rank + oversample, full)`.
    pub sketch_size: Option<Vec<usize>>,
    /// Mode processing order; `None` processes the largest extent first.
    pub order: Option<Vec<usize>>,
    /// Extra sketch columns beyond the target rank.
    pub oversample: usize,
    /// Power iterations refining the sketched subspace.
    pub power_iters: usize,
    pub sketch: SketchSpec,
    /// Compute the compressed core as `Q1^T A Q2` instead of reusing the
    /// sketches (one extra pass over the data, slightly more accurate).
    pub exact_core: bool,
}

impl FixedRankConfig {
    pub fn new(rank: Vec<usize>, seed: u64) -> Self {
        Self {
            rank,
            sketch_size: None,
            order: None,
            oversample: 5,
            power_iters: 1,
            sketch: SketchSpec::gaussian(seed),
            exact_core: false,
        }
    }
}

/// Configuration for the fixed-accuracy compressor.
#[derive(Debug, Clone)]
pub struct FixedAccuracyConfig {
    /// Relative Frobenius error target, in (0, 1).
    pub tolerance: f64,
    /// Columns added per block.
    pub block: usize,
    /// Shifted power iterations per block.
    pub power_iters: usize,
    /// Mode processing order; `None` processes the largest extent first.
    pub order: Option<Vec<usize>>,
    pub sketch: SketchSpec,
    /// Per-mode cap on the discovered rank.
    pub max_rank: Option<Vec<usize>>,
}

impl FixedAccuracyConfig {
    pub fn new(tolerance: f64, seed: u64) -> Self {
        Self {
            tolerance,
            block: 10,
            power_iters: 1,
            order: None,
            sketch: SketchSpec::gaussian(seed),
            max_rank: None,
        }
    }
}

/// Diagnostics from the fixed-accuracy run.
#[derive(Debug, Clone)]
pub struct FixedAccuracyReport {
    /// Rank retained per mode (in mode order, not processing order).
    pub ranks: Vec<usize>,
    /// Estimated relative error of the returned approximation.
    pub est_error: f64,
    /// True when some mode hit its rank cap before reaching the tolerance.
    pub hit_cap: bool,
}

/// Largest-extent-first processing order (stable on ties).
fn default_order(shape: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..shape.len()).collect();
    order.sort_by_key(|&m| std::cmp::Reverse(shape[m]));
    order
}

fn validate_order(order: &Option<Vec<usize>>, n: usize, shape: &[usize]) -> Result<Vec<usize>, CompressError> {
    match order {
        None => Ok(default_order(shape)),
        Some(o) => {
            let mut seen = vec![false; n];
            if o.len() != n || o.iter().any(|&m| m >= n || std::mem::replace(&mut seen[m], true)) {
                return Err(CompressError::BadOrder(o.clone()));
            }
            Ok(o.clone())
        }
    }
}

/// Mode-first unfolding that borrows the buffer when mode 0 is requested
/// (no data movement) and materializes a permuted copy otherwise.
enum Unfolding<'a> {
    Borrowed(&'a [f64]),
    Owned(Vec<f64>),
}

impl<'a> Unfolding<'a> {
    fn slice(&self) -> &[f64] {
        match self {
            Unfolding::Borrowed(s) => s,
            Unfolding::Owned(v) => v,
        }
    }
}

fn mode_first_unfold(x: &DenseTensor, t: usize) -> Result<(Unfolding<'_>, usize, usize), CompressError> {
    let rows = x.shape()[t];
    let cols = x.len() / rows;
    if t == 0 {
        return Ok((Unfolding::Borrowed(x.data()), rows, cols));
    }
    let n = Permutation::mode_first(t, x.order())?;
    let permuted = x.permute(&n)?;
    Ok((Unfolding::Owned(permuted.into_data()), rows, cols))
}

/// Replaces mode `t` of `x` by the projected core `F^T * unfold_t(x)`.
fn project_mode(x: &DenseTensor, f: &DMatrix<f64>, t: usize) -> Result<DenseTensor, CompressError> {
    let (buf, rows, cols) = mode_first_unfold(x, t)?;
    let a = MatRef::new(buf.slice(), rows, cols);
    let projected = linalg::mm_ref(1.0, MatRef::from_mat(f).t(), a);
    let mut new_shape = Vec::with_capacity(x.order());
    new_shape.push(f.ncols());
    new_shape.extend(x.shape().iter().enumerate().filter(|&(m, _)| m != t).map(|(_, &e)| e));
    let r = projected.ncols(); // columns unchanged
    debug_assert_eq!(r, cols);
    let permuted = DenseTensor::new(new_shape, projected.as_slice().to_vec())?;
    let n = Permutation::mode_first(t, x.order())?;
    Ok(permuted.ipermute(&n)?)
}

/// Extents of the modes other than `t`, in unfolding column order.
fn other_dims(shape: &[usize], t: usize) -> Vec<usize> {
    shape
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != t)
        .map(|(_, &e)| e)
        .collect()
}

/// Sequentially truncated HOSVD: per mode (in processing order), the factor is
/// the top-`r` left singular vectors of the current core's unfolding and the
/// core is projected before the next mode is handled.
pub fn sthosvd(
    x: &DenseTensor,
    rank: &[usize],
    order: Option<Vec<usize>>,
) -> Result<TuckerApprox, CompressError> {
    let n = x.order();
    if rank.len() != n {
        return Err(CompressError::ConfigLength {
            name: "rank",
            got: rank.len(),
            order: n,
        });
    }
    for (mode, (&r, &e)) in rank.iter().zip(x.shape()).enumerate() {
        if r == 0 || r > e {
            return Err(CompressError::RankExceedsExtent {
                mode,
                rank: r,
                extent: e,
            });
        }
    }
    let order = validate_order(&order, n, x.shape())?;
    let mut core = x.clone();
    let mut factors: Vec<Option<DMatrix<f64>>> = vec![None; n];
    for &v in &order {
        let r = rank[v];
        let (buf, m, cols) = mode_first_unfold(&core, v)?;
        let a = MatRef::new(buf.slice(), m, cols);
        // top-r left singular vectors from the m x m Gram
        let gram = linalg::mm_ref(1.0, a, a.t());
        let (_, vecs) = linalg::sym_eig_desc(&gram);
        let f = vecs.columns(0, r).into_owned();
        core = project_mode(&core, &f, v)?;
        factors[v] = Some(f);
    }
    TuckerApprox::new(core, factors.into_iter().map(|f| f.unwrap()).collect())
}

/// Fixed-rank randomized compression.
///
/// Per mode: draw a sketch of the unfolding's row space, refine it with
/// `power_iters` rounds of `T1 = A T2`, `T2 = A^T T1`, orthonormalize both
/// sides, compress to the small matrix `D` (either `Q1^T T1 (Q2^T T2)^+`
/// reusing the sketches, or `Q1^T A Q2` exactly), take a column-pivoted QR of
/// `D`, and keep the leading `r` columns of `Q1 * Q_tilde` as the factor.
pub fn compress_fixed_rank(
    x: &DenseTensor,
    cfg: &FixedRankConfig,
) -> Result<TuckerApprox, CompressError> {
    let n = x.order();
    if cfg.rank.len() != n {
        return Err(CompressError::ConfigLength {
            name: "rank",
            got: cfg.rank.len(),
            order: n,
        });
    }
    if let Some(l) = &cfg.sketch_size {
        if l.len() != n {
            return Err(CompressError::ConfigLength {
                name: "sketch_size",
                got: l.len(),
                order: n,
            });
        }
    }
    for (mode, (&r, &e)) in cfg.rank.iter().zip(x.shape()).enumerate() {
        if r == 0 || r > e {
            return Err(CompressError::RankExceedsExtent {
                mode,
                rank: r,
                extent: e,
            });
        }
    }
    let order = validate_order(&cfg.order, n, x.shape())?;
    let mut core = x.clone();
    let mut factors: Vec<Option<DMatrix<f64>>> = vec![None; n];
    for (step, &v) in order.iter().enumerate() {
        let r = cfg.rank[v];
        let (buf, m, cols) = mode_first_unfold(&core, v)?;
        let a = MatRef::new(buf.slice(), m, cols);
        let full = m.min(cols);
        if r > full {
            return Err(CompressError::RankExceedsExtent {
                mode: v,
                rank: r,
                extent: full,
            });
        }
        // Admissible sketch width r <= l <= min(m, cols); the default adds
        // `oversample` columns, clamped when the mode is already at full width.
        let l = match &cfg.sketch_size {
            Some(ls) => {
                let l = ls[v];
                if l < r || l > full {
                    return Err(CompressError::SketchSizeOutOfRange {
                        mode: v,
                        l,
                        min: r,
                        max: full,
                    });
                }
                l
            }
            None => (r + cfg.oversample).min(full),
        };
        let spec = cfg
            .sketch
            .reseeded(derive_seed(cfg.sketch.seed, "fixed-rank", step as u64))
            .for_unfolding(&other_dims(core.shape(), v), cols, l);
        let g = make_sketch(&spec, cols, l)?;
        let mut t2 = g;
        let mut t1 = DMatrix::zeros(m, l);
        for _ in 0..=cfg.power_iters {
            t1 = linalg::mm_ref(1.0, a, MatRef::from_mat(&t2));
            t2 = linalg::mm_ref(1.0, a.t(), MatRef::from_mat(&t1));
        }
        let q1 = linalg::thin_q(&t1);
        let q2 = linalg::thin_q(&t2);
        let d = if cfg.exact_core {
            // Q1^T A Q2
            let aq2 = linalg::mm_ref(1.0, a, MatRef::from_mat(&q2));
            linalg::mm_tn(&q1, &aq2)
        } else {
            // Sketch-reuse core: A Q2 ~ Q1 D with T1^T (A Q2) = T2^T Q2
            // (T2 = A^T T1 at loop exit), so D = (T1^T Q1)^+ (T2^T Q2).
            let t1q1 = linalg::mm_tn(&t1, &q1);
            let t2q2 = linalg::mm_tn(&t2, &q2);
            linalg::mm(&linalg::pinv(&t1q1), &t2q2)
        };
        let qrcp = d.col_piv_qr();
        let q_tilde = qrcp.q();
        let u = linalg::mm(&q1, &q_tilde);
        let f = u.columns(0, r).into_owned();
        core = project_mode(&core, &f, v)?;
        factors[v] = Some(f);
    }
    TuckerApprox::new(core, factors.into_iter().map(|f| f.unwrap()).collect())
}

/// Frobenius error identity of the incremental QB factorization:
/// `||A - QB||_F^2 = ||A||_F^2 - tr(W^T W (Y^T Y)^-1)` for `Y = A Omega`,
/// `W = A^T Y`. An empty sketch returns `||A||_F^2`; the Gram solve uses the
/// truncated pseudo-inverse.
pub fn qb_error_sq(norm_a_sq: f64, y: &DMatrix<f64>, w: &DMatrix<f64>) -> f64 {
    if y.ncols() == 0 {
        return norm_a_sq;
    }
    let z = linalg::mm_tn(y, y);
    let t = linalg::mm_tn(w, w);
    (norm_a_sq - linalg::trace_psd_solve(&t, &z)).max(0.0)
}

/// Economic SVD via the Gram matrix of the shorter side: `A^T A = V S^2 V^T`,
/// `U = A V S^{-1}`. Columns whose singular value falls below
/// `1e-12 * sigma_1` are dropped.
pub fn eig_svd(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    linalg::eig_svd_impl(a)
}

/// Fixed-accuracy randomized compression (rank discovery).
///
/// Per mode the sketch grows in blocks of `block` columns; each block is
/// refined by shifted power iterations on the residual, and the mode stops
/// when the error estimate of [`qb_error_sq`] drops below its share of the
/// squared tolerance. The tolerance is interpreted relative to `||x||_F` and
/// split evenly across modes, so the returned approximation satisfies
/// `||x - xhat||_F <= tolerance * ||x||_F` whenever no rank cap is hit.
pub fn compress_fixed_accuracy(
    x: &DenseTensor,
    cfg: &FixedAccuracyConfig,
) -> Result<(TuckerApprox, FixedAccuracyReport), CompressError> {
    if !(cfg.tolerance > 0.0 && cfg.tolerance < 1.0) {
        return Err(CompressError::BadTolerance(cfg.tolerance));
    }
    if cfg.block == 0 {
        return Err(CompressError::ZeroBlock);
    }
    let n = x.order();
    if let Some(caps) = &cfg.max_rank {
        if caps.len() != n {
            return Err(CompressError::ConfigLength {
                name: "max_rank",
                got: caps.len(),
                order: n,
            });
        }
    }
    let order = validate_order(&cfg.order, n, x.shape())?;
    let total_norm_sq = x.data().iter().map(|v| v * v).sum::<f64>();
    let tol_mode = cfg.tolerance * cfg.tolerance * total_norm_sq / n as f64;

    let mut core = x.clone();
    let mut factors: Vec<Option<DMatrix<f64>>> = vec![None; n];
    let mut ranks = vec![0usize; n];
    let mut err_acc = 0.0;
    let mut hit_cap = false;

    for (step, &v) in order.iter().enumerate() {
        let (buf, m, cols) = mode_first_unfold(&core, v)?;
        let a = MatRef::new(buf.slice(), m, cols);
        let norm_a_sq: f64 = buf.slice().iter().map(|x| x * x).sum();
        let cap = cfg
            .max_rank
            .as_ref()
            .map(|c| c[v])
            .unwrap_or(usize::MAX)
            .min(m.min(cols));

        let mut y = DMatrix::<f64>::zeros(m, 0);
        let mut w = DMatrix::<f64>::zeros(cols, 0);
        let mut z = DMatrix::<f64>::zeros(0, 0);
        let mut err = norm_a_sq;

        if err > tol_mode {
            for block_idx in 0.. {
                let b_eff = cfg.block.min(cap - y.ncols());
                if b_eff == 0 {
                    hit_cap = true;
                    break;
                }
                let spec = cfg
                    .sketch
                    .reseeded(derive_seed(
                        cfg.sketch.seed,
                        "fixed-accuracy",
                        (step * 1_000_000 + block_idx) as u64,
                    ))
                    .for_unfolding(&other_dims(core.shape(), v), cols, b_eff);
                let mut omega = make_sketch(&spec, cols, b_eff)?;
                let mut alpha = 0.0f64;
                for j in 0..cfg.power_iters {
                    // W_i = A^T A Omega - W Z^{-1} W^T Omega - alpha Omega
                    let a_omega = linalg::mm_ref(1.0, a, MatRef::from_mat(&omega));
                    let mut wi = linalg::mm_ref(1.0, a.t(), MatRef::from_mat(&a_omega));
                    if y.ncols() > 0 {
                        let wt_omega = linalg::mm_tn(&w, &omega);
                        let solved = linalg::psd_solve(&z, &wt_omega);
                        wi -= linalg::mm(&w, &solved);
                    }
                    if alpha != 0.0 {
                        wi -= &omega * alpha;
                    }
                    let (u_i, s_i, _) = eig_svd(&wi);
                    if u_i.ncols() == 0 {
                        break;
                    }
                    omega = u_i;
                    let smallest = *s_i.last().unwrap();
                    if j > 0 && alpha < smallest {
                        alpha = 0.5 * (smallest + alpha);
                    }
                }
                let yi = linalg::mm_ref(1.0, a, MatRef::from_mat(&omega));
                let wi = linalg::mm_ref(1.0, a.t(), MatRef::from_mat(&yi));
                if yi.ncols() == 0 {
                    break;
                }
                y = join_cols(&y, &yi);
                w = join_cols(&w, &wi);
                z = linalg::mm_tn(&y, &y);
                let t = linalg::mm_tn(&w, &w);
                err = (norm_a_sq - linalg::trace_psd_solve(&t, &z)).max(0.0);
                if err < tol_mode || y.ncols() >= cap {
                    if err >= tol_mode {
                        hit_cap = true;
                    }
                    break;
                }
            }
        }

        // factor from the eigendecomposition of Z = Y^T Y
        let f = if y.ncols() == 0 {
            canonical_column(m)
        } else {
            let (vals, vecs) = linalg::sym_eig_desc(&z);
            let sigma_max = vals.first().copied().unwrap_or(0.0).sqrt();
            let rank = vals
                .iter()
                .take_while(|&&l| l.sqrt() > sigma_max * 1e-12)
                .count();
            if rank == 0 {
                canonical_column(m)
            } else {
                let mut vr = vecs.columns(0, rank).into_owned();
                for j in 0..rank {
                    let inv = 1.0 / vals[j].sqrt();
                    for i in 0..vr.nrows() {
                        vr[(i, j)] *= inv;
                    }
                }
                let u = linalg::mm(&y, &vr);
                // Gram conditioning can erode orthonormality; polish with QR
                linalg::thin_q(&u)
            }
        };
        ranks[v] = f.ncols();
        err_acc += err;
        core = project_mode(&core, &f, v)?;
        factors[v] = Some(f);
    }

    let approx = TuckerApprox::new(core, factors.into_iter().map(|f| f.unwrap()).collect())?;
    let est_error = if total_norm_sq > 0.0 {
        (err_acc / total_norm_sq).sqrt()
    } else {
        0.0
    };
    Ok((
        approx,
        FixedAccuracyReport {
            ranks,
            est_error,
            hit_cap,
        },
    ))
}

fn canonical_column(m: usize) -> DMatrix<f64> {
    let mut f = DMatrix::zeros(m, 1);
    f[(0, 0)] = 1.0;
    f
}

fn join_cols(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    if a.ncols() == 0 {
        return b.clone();
    }
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from;
    use rand::Rng;
    use rand_distr::StandardNormal;

    /// Exact multilinear-rank tensor: random core times orthonormal factors.
    fn synthetic_tucker(shape: &[usize], rank: &[usize], seed: u64) -> DenseTensor {
        let core = DenseTensor::random_normal(rank, derive_seed(seed, "core", 0));
        let mut x = core;
        for (mode, (&e, &r)) in shape.iter().zip(rank).enumerate() {
            let g = DMatrix::from_fn(e, r, |i, j| {
                let mut rng = rng_from(derive_seed(seed, "factor", (mode * 9973 + i * 131 + j) as u64));
                rng.sample::<f64, _>(StandardNormal)
            });
            let q = linalg::thin_q(&g);
            x = x.mode_product(&q, mode).unwrap();
        }
        x
    }

    /// Orthogonal CP tensor whose every mode unfolding has the prescribed
    /// singular values.
    fn spectrum_tensor(shape: &[usize], sv: &[f64], seed: u64) -> DenseTensor {
        let k = sv.len();
        let qs: Vec<DMatrix<f64>> = shape
            .iter()
            .enumerate()
            .map(|(mode, &e)| {
                let g = DMatrix::from_fn(e, k, |i, j| {
                    let mut rng =
                        rng_from(derive_seed(seed, "cp", (mode * 7919 + i * 127 + j) as u64));
                    rng.sample::<f64, _>(StandardNormal)
                });
                linalg::thin_q(&g)
            })
            .collect();
        let mut x = DenseTensor::zeros(shape);
        for t in 0..k {
            let mut idx = vec![0usize; shape.len()];
            let rank1 = DenseTensor::from_fn(shape, |full_idx| {
                idx.copy_from_slice(full_idx);
                full_idx
                    .iter()
                    .enumerate()
                    .map(|(m, &i)| qs[m][(i, t)])
                    .product()
            });
            x.axpy(sv[t], &rank1);
        }
        x
    }

    #[test]
    fn sthosvd_full_rank_is_exact() {
        let x = DenseTensor::random_normal(&[6, 5, 4], 1);
        let approx = sthosvd(&x, &[6, 5, 4], None).unwrap();
        assert!(approx.relative_error(&x) < 1e-12);
    }

    #[test]
    fn sthosvd_recovers_exact_multilinear_rank() {
        let x = synthetic_tucker(&[20, 20, 20], &[2, 2, 2], 3);
        let approx = sthosvd(&x, &[2, 2, 2], None).unwrap();
        assert!(approx.relative_error(&x) < 1e-10);
        assert_eq!(approx.ranks(), vec![2, 2, 2]);
    }

    #[test]
    fn sthosvd_error_monotone_in_rank() {
        let x = DenseTensor::random_normal(&[10, 10, 10], 5);
        let lo = sthosvd(&x, &[3, 3, 3], None).unwrap().relative_error(&x);
        let hi = sthosvd(&x, &[6, 6, 6], None).unwrap().relative_error(&x);
        assert!(hi <= lo + 1e-12);
    }

    #[test]
    fn sthosvd_rejects_rank_above_extent() {
        let x = DenseTensor::zeros(&[4, 4, 4]);
        assert!(matches!(
            sthosvd(&x, &[5, 4, 4], None),
            Err(CompressError::RankExceedsExtent { .. })
        ));
    }

    #[test]
    fn fixed_rank_recovers_exact_multilinear_rank() {
        let x = synthetic_tucker(&[20, 24, 16], &[2, 3, 2], 7);
        let cfg = FixedRankConfig::new(vec![2, 3, 2], 11);
        let approx = compress_fixed_rank(&x, &cfg).unwrap();
        assert!(approx.relative_error(&x) < 1e-8);
    }

    #[test]
    fn fixed_rank_full_width_no_truncation() {
        let x = DenseTensor::random_normal(&[6, 5, 4], 9);
        let mut cfg = FixedRankConfig::new(vec![6, 5, 4], 13);
        cfg.sketch_size = Some(vec![6, 5, 4]);
        cfg.power_iters = 0;
        let approx = compress_fixed_rank(&x, &cfg).unwrap();
        assert!(approx.relative_error(&x) < 1e-10);
    }

    #[test]
    fn fixed_rank_close_to_sthosvd_on_decaying_spectrum() {
        let sv: Vec<f64> = (1..=12).map(|i| 2.0f64.powi(-i)).collect();
        let x = spectrum_tensor(&[18, 18, 18], &sv, 15);
        let r = vec![4, 4, 4];
        let base = sthosvd(&x, &r, None).unwrap().relative_error(&x);
        let mut errs: Vec<f64> = (0..10)
            .map(|s| {
                let mut cfg = FixedRankConfig::new(r.clone(), 100 + s);
                cfg.power_iters = 2;
                compress_fixed_rank(&x, &cfg).unwrap().relative_error(&x)
            })
            .collect();
        errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = errs[errs.len() / 2];
        assert!(median <= 1.5 * base, "median {median} vs sthosvd {base}");
    }

    #[test]
    fn fixed_rank_power_iterations_do_not_hurt() {
        let sv: Vec<f64> = (1..=15).map(|i| 1.0 / i as f64).collect();
        let x = spectrum_tensor(&[16, 16, 16], &sv, 21);
        let median_err = |q: usize| {
            let mut errs: Vec<f64> = (0..10)
                .map(|s| {
                    let mut cfg = FixedRankConfig::new(vec![4, 4, 4], 300 + s);
                    cfg.power_iters = q;
                    compress_fixed_rank(&x, &cfg).unwrap().relative_error(&x)
                })
                .collect();
            errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            errs[errs.len() / 2]
        };
        assert!(median_err(2) <= median_err(0) + 1e-12);
    }

    #[test]
    fn fixed_rank_deterministic_per_seed() {
        let x = DenseTensor::random_normal(&[12, 10, 8], 31);
        let cfg = FixedRankConfig::new(vec![3, 3, 3], 17);
        let a = compress_fixed_rank(&x, &cfg).unwrap();
        let b = compress_fixed_rank(&x, &cfg).unwrap();
        assert_eq!(a.core().data(), b.core().data());
        for (fa, fb) in a.factors().iter().zip(b.factors()) {
            assert_eq!(fa, fb);
        }
    }

    #[test]
    fn fixed_rank_exact_core_option() {
        let x = synthetic_tucker(&[14, 12, 10], &[3, 2, 2], 37);
        let mut cfg = FixedRankConfig::new(vec![3, 2, 2], 19);
        cfg.exact_core = true;
        let approx = compress_fixed_rank(&x, &cfg).unwrap();
        assert!(approx.relative_error(&x) < 1e-8);
    }

    #[test]
    fn factors_orthonormal_both_algorithms() {
        let x = DenseTensor::random_normal(&[12, 11, 9], 41);
        let fr = compress_fixed_rank(&x, &FixedRankConfig::new(vec![4, 4, 4], 1)).unwrap();
        for f in fr.factors() {
            assert!(linalg::orthonormality_defect(f) <= 1e-8);
        }
        let (fa, _) = compress_fixed_accuracy(&x, &FixedAccuracyConfig::new(0.5, 2)).unwrap();
        for f in fa.factors() {
            assert!(linalg::orthonormality_defect(f) <= 1e-8);
        }
    }

    #[test]
    fn fixed_accuracy_discovers_exact_ranks() {
        let x = synthetic_tucker(&[30, 30, 30], &[3, 3, 3], 43);
        let mut cfg = FixedAccuracyConfig::new(1e-6, 23);
        cfg.block = 4;
        let (approx, report) = compress_fixed_accuracy(&x, &cfg).unwrap();
        assert_eq!(report.ranks, vec![3, 3, 3]);
        assert!(!report.hit_cap);
        let err = approx.reconstruct().sub(&x).frobenius_norm();
        assert!(err <= 1e-6 * x.frobenius_norm(), "err {err}");
    }

    #[test]
    fn fixed_accuracy_meets_loose_tolerance() {
        let x = DenseTensor::random_normal(&[20, 20, 20], 47);
        let (approx, report) = compress_fixed_accuracy(&x, &FixedAccuracyConfig::new(0.5, 29)).unwrap();
        let rel = approx.relative_error(&x);
        assert!(rel <= 0.6, "rel {rel}");
        assert!((report.est_error - rel).abs() < 0.05, "estimate {} vs {}", report.est_error, rel);
    }

    #[test]
    fn fixed_accuracy_zero_tensor_minimal_ranks() {
        let x = DenseTensor::zeros(&[8, 8, 8]);
        let (approx, report) = compress_fixed_accuracy(&x, &FixedAccuracyConfig::new(0.5, 1)).unwrap();
        assert!(report.ranks.iter().all(|&r| r <= 1));
        assert_eq!(approx.reconstruct().frobenius_norm(), 0.0);
        assert_eq!(report.est_error, 0.0);
    }

    #[test]
    fn fixed_accuracy_respects_rank_cap() {
        let x = DenseTensor::random_normal(&[16, 16, 16], 53);
        let mut cfg = FixedAccuracyConfig::new(0.01, 31);
        cfg.max_rank = Some(vec![2, 2, 2]);
        let (approx, report) = compress_fixed_accuracy(&x, &cfg).unwrap();
        assert!(report.hit_cap);
        assert!(report.ranks.iter().all(|&r| r <= 2));
        assert!(report.est_error > 0.01);
        assert!(approx.relative_error(&x) <= 1.0);
    }

    #[test]
    fn qb_error_identity_against_direct_residual() {
        let a = DenseTensor::random_normal(&[30, 20], 59);
        let am = DMatrix::from_column_slice(30, 20, a.data());
        let norm_sq = am.norm_squared();
        let omega = make_sketch(&SketchSpec::gaussian(61), 20, 5).unwrap();
        let y = linalg::mm(&am, &omega);
        let w = linalg::mm_tn(&am, &y);
        // direct residual: Q = Y Vhat S^{-1}, B = (W Vhat S^{-1})^T
        let (q, _, _) = eig_svd(&y);
        let b = linalg::mm_tn(&q, &am);
        let direct = (&am - linalg::mm(&q, &b)).norm_squared();
        let est = qb_error_sq(norm_sq, &y, &w);
        assert!(
            (est - direct).abs() <= 1e-8 * norm_sq,
            "est {est} direct {direct}"
        );
    }

    #[test]
    fn qb_error_rank_captured_and_empty_sketch() {
        let x = synthetic_tucker(&[25, 15, 1], &[3, 3, 1], 67);
        let am = DMatrix::from_column_slice(25, 15, x.data());
        let norm_sq = am.norm_squared();
        let omega = make_sketch(&SketchSpec::gaussian(71), 15, 4).unwrap();
        let y = linalg::mm(&am, &omega);
        let w = linalg::mm_tn(&am, &y);
        assert!(qb_error_sq(norm_sq, &y, &w) <= 1e-9 * norm_sq);
        let empty_y = DMatrix::<f64>::zeros(25, 0);
        let empty_w = DMatrix::<f64>::zeros(15, 0);
        assert_eq!(qb_error_sq(norm_sq, &empty_y, &empty_w), norm_sq);
    }

    #[test]
    fn eig_svd_contracts() {
        // orthonormal input: unit singular values
        let q = linalg::thin_q(&DMatrix::<f64>::from_fn(10, 4, |i, j| {
            ((i * 7 + j * 3) as f64).sin()
        }));
        let (_, s, _) = eig_svd(&q);
        assert!(s.iter().all(|&x| (x - 1.0).abs() < 1e-10));

        let a = DenseTensor::random_normal(&[50, 5], 73);
        let am = DMatrix::from_column_slice(50, 5, a.data());
        let (u, s, v) = eig_svd(&am);
        assert!(linalg::orthonormality_defect(&u) < 1e-8);
        let mut us = u.clone();
        for j in 0..s.len() {
            for i in 0..us.nrows() {
                us[(i, j)] *= s[j];
            }
        }
        let recon = linalg::mm_nt(&us, &v);
        assert!((recon - &am).norm() / am.norm() < 1e-8);

        let d = DMatrix::<f64>::from_partial_diagonal(4, 2, &[3.0, 1.0]);
        let (_, s, _) = eig_svd(&d);
        assert!((s[0] - 3.0).abs() < 1e-10 && (s[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fixed_accuracy_deterministic_per_seed() {
        let x = DenseTensor::random_normal(&[14, 12, 10], 79);
        let cfg = FixedAccuracyConfig::new(0.3, 83);
        let (a, ra) = compress_fixed_accuracy(&x, &cfg).unwrap();
        let (b, rb) = compress_fixed_accuracy(&x, &cfg).unwrap();
        assert_eq!(a.core().data(), b.core().data());
        assert_eq!(ra.ranks, rb.ranks);
    }
}
