//! Nonconvex sparsity penalties and their proximal operators.
//!
//! Every penalty is symmetric, concave and nondecreasing on `[0, inf)` with
//! `phi(0) = 0`. The scalar proximal map minimizes
//! `mu * phi(x) + (x - v)^2 / 2` globally by enumerating the stationary points
//! of each smooth branch together with the branch boundaries; ties are broken
//! toward the smaller magnitude. On top of the scalar map sit the generalized
//! singular-value thresholding operator (exact and sketched), the entrywise
//! noise prox, and the tube-wise noise prox.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::linalg;
use crate::rng::{derive_seed, rng_from};
use crate::tensor::DenseTensor;

#[derive(Debug, Error)]
pub enum ProxError {
    #[error("invalid penalty parameter: {0}")]
    InvalidParameter(String),
    #[error("prox weight must be nonnegative, got {0}")]
    NegativeWeight(f64),
    #[error("tube prox needs order >= 3, got {0}")]
    TubeOrderTooLow(usize),
}

/// Choice of nonconvex scalar penalty with its shape parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty {
    /// `|x|` (the convex reference point of the family).
    L1,
    /// Quadratically flattened below `threshold`, constant above.
    Firm { threshold: f64 },
    /// `|x|^q` with `q` in (0, 1).
    Lq { q: f64 },
    /// Minimax concave penalty with knee `gamma > 1`.
    Mcp { gamma: f64 },
    /// Smoothly clipped absolute deviation with `a > 2`.
    Scad { a: f64 },
    /// `ln(1 + |x| / eps)`.
    Log { eps: f64 },
    /// `min(|x|, threshold)^q`.
    CappedLq { q: f64, threshold: f64 },
}

impl Penalty {
    pub fn validate(&self) -> Result<(), ProxError> {
        let bad = |msg: String| Err(ProxError::InvalidParameter(msg));
        match *self {
            Penalty::L1 => Ok(()),
            Penalty::Firm { threshold } if !(threshold > 0.0) => {
                bad(format!("firm threshold must be > 0, got {threshold}"))
            }
            Penalty::Lq { q } if !(q > 0.0 && q < 1.0) => {
                bad(format!("lq exponent must be in (0,1), got {q}"))
            }
            Penalty::Mcp { gamma } if !(gamma > 1.0) => {
                bad(format!("mcp gamma must be > 1, got {gamma}"))
            }
            Penalty::Scad { a } if !(a > 2.0) => bad(format!("scad a must be > 2, got {a}")),
            Penalty::Log { eps } if !(eps > 0.0) => {
                bad(format!("log eps must be > 0, got {eps}"))
            }
            Penalty::CappedLq { q, threshold } if !(q > 0.0 && q < 1.0 && threshold > 0.0) => {
                bad(format!(
                    "capped-lq needs q in (0,1) and threshold > 0, got q={q}, threshold={threshold}"
                ))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Penalty::L1 => "l1",
            Penalty::Firm { .. } => "firm",
            Penalty::Lq { .. } => "lq",
            Penalty::Mcp { .. } => "mcp",
            Penalty::Scad { .. } => "scad",
            Penalty::Log { .. } => "log",
            Penalty::CappedLq { .. } => "capped-lq",
        }
    }
}

/// `phi(|x|)`.
pub fn penalty_eval(spec: &Penalty, x: f64) -> f64 {
    let w = x.abs();
    match *spec {
        Penalty::L1 => w,
        Penalty::Firm { threshold } | Penalty::Mcp { gamma: threshold } => {
            if w <= threshold {
                w - w * w / (2.0 * threshold)
            } else {
                threshold / 2.0
            }
        }
        Penalty::Lq { q } => w.powf(q),
        Penalty::Scad { a } => {
            if w <= 1.0 {
                w
            } else if w <= a {
                (-w * w + 2.0 * a * w - 1.0) / (2.0 * (a - 1.0))
            } else {
                (a + 1.0) / 2.0
            }
        }
        Penalty::Log { eps } => (1.0 + w / eps).ln(),
        Penalty::CappedLq { q, threshold } => w.min(threshold).powf(q),
    }
}

fn objective(spec: &Penalty, mu: f64, w: f64, x: f64) -> f64 {
    mu * penalty_eval(spec, x) + 0.5 * (x - w) * (x - w)
}

/// Larger positive root of `x + mu q x^(q-1) = w`, if it exists.
fn lq_stationary(q: f64, mu: f64, w: f64) -> Option<f64> {
    // g(x) = x + mu q x^(q-1) - w is minimized at xbar and increases beyond it
    let xbar = (mu * q * (1.0 - q)).powf(1.0 / (2.0 - q));
    let g = |x: f64| x + mu * q * x.powf(q - 1.0) - w;
    if xbar >= w || g(xbar) > 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (xbar, w);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Global minimizer of `mu * phi(x) + (x - v)^2 / 2`.
///
/// Odd in `v`, never grows the magnitude, and breaks ties between equal
/// minima toward zero. `mu = 0` returns `v`.
pub fn prox_scalar(spec: &Penalty, mu: f64, v: f64) -> Result<f64, ProxError> {
    spec.validate()?;
    if !(mu >= 0.0) {
        return Err(ProxError::NegativeWeight(mu));
    }
    if mu == 0.0 || v == 0.0 {
        return Ok(v);
    }
    let w = v.abs();
    let sign = v.signum();

    if let Penalty::L1 = spec {
        return Ok(sign * (w - mu).max(0.0));
    }

    let mut candidates: Vec<f64> = vec![0.0];
    match *spec {
        Penalty::L1 => unreachable!(),
        Penalty::Firm { threshold: t } | Penalty::Mcp { gamma: t } => {
            if mu < t {
                let x = t * (w - mu) / (t - mu);
                if x > 0.0 && x <= t {
                    candidates.push(x);
                }
            }
            candidates.push(t.min(w));
            if w >= t {
                candidates.push(w);
            }
        }
        Penalty::Lq { q } => {
            if let Some(x) = lq_stationary(q, mu, w) {
                candidates.push(x);
            }
        }
        Penalty::Scad { a } => {
            let x1 = w - mu;
            if x1 > 0.0 && x1 <= 1.0 {
                candidates.push(x1);
            }
            let denom = a - 1.0 - mu;
            if denom.abs() > 1e-15 {
                let x2 = (w * (a - 1.0) - mu * a) / denom;
                if x2 >= 1.0 && x2 <= a {
                    candidates.push(x2);
                }
            }
            candidates.push(1.0_f64.min(w));
            candidates.push(a.min(w));
            if w >= a {
                candidates.push(w);
            }
        }
        Penalty::Log { eps } => {
            let disc = (w + eps) * (w + eps) - 4.0 * mu;
            if disc >= 0.0 {
                let x = 0.5 * ((w - eps) + disc.sqrt());
                if x > 0.0 {
                    candidates.push(x);
                }
            }
        }
        Penalty::CappedLq { q, threshold: t } => {
            if let Some(x) = lq_stationary(q, mu, w) {
                if x <= t {
                    candidates.push(x);
                }
            }
            candidates.push(t.min(w));
            if w >= t {
                candidates.push(w);
            }
        }
    }

    let mut best_x = 0.0;
    let mut best_f = objective(spec, mu, w, 0.0);
    for &c in &candidates[1..] {
        let x = c.clamp(0.0, w);
        let f = objective(spec, mu, w, x);
        if f < best_f || (f == best_f && x < best_x) {
            best_f = f;
            best_x = x;
        }
    }
    Ok(sign * best_x)
}

/// Largest `v >= 0` mapped to zero by [`prox_scalar`]; inputs at or below it
/// are annihilated.
pub fn kill_threshold(spec: &Penalty, mu: f64) -> Result<f64, ProxError> {
    spec.validate()?;
    if !(mu >= 0.0) {
        return Err(ProxError::NegativeWeight(mu));
    }
    if mu == 0.0 {
        return Ok(0.0);
    }
    if let Penalty::L1 = spec {
        return Ok(mu);
    }
    // prox output is monotone in v with a single zero/nonzero boundary
    let mut hi = mu.max(1.0);
    let mut grow = 0;
    while prox_scalar(spec, mu, hi)? == 0.0 && grow < 200 {
        hi *= 2.0;
        grow += 1;
    }
    if grow == 200 {
        return Ok(hi);
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if prox_scalar(spec, mu, mid)? == 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Economic SVD via Gram eigendecomposition, with singular values below
/// `1e-12 * sigma_1` dropped. Returns `(U, sigma, V)` with `A ~ U S V^T`.
pub use crate::rcompress::eig_svd;

/// Result of a singular-value thresholding step, with the data the solvers
/// need for bookkeeping.
#[derive(Debug, Clone)]
pub struct SvtOutcome {
    pub matrix: DMatrix<f64>,
    /// Sum of `phi` over the surviving singular values.
    pub penalty_value: f64,
    /// Number of nonzero singular values after thresholding.
    pub rank: usize,
}

fn rebuild(
    u: &DMatrix<f64>,
    thresholded: &[f64],
    v: &DMatrix<f64>,
    rows: usize,
    cols: usize,
    spec: &Penalty,
) -> SvtOutcome {
    let keep: Vec<usize> = (0..thresholded.len())
        .filter(|&i| thresholded[i] != 0.0)
        .collect();
    if keep.is_empty() {
        return SvtOutcome {
            matrix: DMatrix::zeros(rows, cols),
            penalty_value: 0.0,
            rank: 0,
        };
    }
    let mut us = DMatrix::zeros(rows, keep.len());
    let mut vs = DMatrix::zeros(cols, keep.len());
    let mut penalty_value = 0.0;
    for (j, &i) in keep.iter().enumerate() {
        penalty_value += penalty_eval(spec, thresholded[i]);
        for r in 0..rows {
            us[(r, j)] = u[(r, i)] * thresholded[i];
        }
        for r in 0..cols {
            vs[(r, j)] = v[(r, i)];
        }
    }
    SvtOutcome {
        matrix: linalg::mm_nt(&us, &vs),
        penalty_value,
        rank: keep.len(),
    }
}

/// Generalized singular-value thresholding
/// `argmin_X tau * sum_i phi(sigma_i(X)) + ||X - Y||_F^2 / 2`
/// computed by applying the scalar prox to each singular value.
pub fn svt_generalized(y: &DMatrix<f64>, spec: &Penalty, tau: f64) -> Result<DMatrix<f64>, ProxError> {
    Ok(svt_generalized_detailed(y, spec, tau)?.matrix)
}

pub fn svt_generalized_detailed(
    y: &DMatrix<f64>,
    spec: &Penalty,
    tau: f64,
) -> Result<SvtOutcome, ProxError> {
    spec.validate()?;
    if tau == 0.0 {
        return Ok(SvtOutcome {
            matrix: y.clone(),
            penalty_value: 0.0,
            rank: y.nrows().min(y.ncols()),
        });
    }
    let (u, sigma, v) = eig_svd(y);
    let thresholded: Vec<f64> = sigma
        .iter()
        .map(|&s| prox_scalar(spec, tau, s))
        .collect::<Result<_, _>>()?;
    Ok(rebuild(&u, &thresholded, &v, y.nrows(), y.ncols(), spec))
}

/// Sketch-accelerated singular-value thresholding with the same contract as
/// [`svt_generalized`].
///
/// A Gaussian range finder with `q` power iterations captures the leading
/// `rank_guess + p` directions; singular values below the prox kill threshold
/// never need to be computed. If the smallest retained singular value still
/// exceeds the kill threshold the rank guess is doubled (at most four times)
/// before falling back to the exact path.
pub fn svt_randomized(
    y: &DMatrix<f64>,
    spec: &Penalty,
    tau: f64,
    rank_guess: usize,
    p: usize,
    q: usize,
    seed: u64,
) -> Result<DMatrix<f64>, ProxError> {
    Ok(svt_randomized_detailed(y, spec, tau, rank_guess, p, q, seed)?.matrix)
}

pub fn svt_randomized_detailed(
    y: &DMatrix<f64>,
    spec: &Penalty,
    tau: f64,
    rank_guess: usize,
    p: usize,
    q: usize,
    seed: u64,
) -> Result<SvtOutcome, ProxError> {
    spec.validate()?;
    if tau == 0.0 {
        return svt_generalized_detailed(y, spec, tau);
    }
    let (m, n) = (y.nrows(), y.ncols());
    let max_rank = m.min(n);
    let kill = kill_threshold(spec, tau)?;
    let mut k = rank_guess.max(1);
    for attempt in 0..=4u32 {
        let l = k + p;
        if l >= max_rank {
            return svt_generalized_detailed(y, spec, tau);
        }
        let mut rng = rng_from(derive_seed(seed, "svt-rand", attempt as u64));
        // range finder on the shorter side
        let wide = n >= m;
        let omega_rows = if wide { n } else { m };
        let omega = DMatrix::from_fn(omega_rows, l, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut q_basis = if wide {
            linalg::thin_q(&linalg::mm(y, &omega))
        } else {
            linalg::thin_q(&linalg::mm_tn(y, &omega))
        };
        for _ in 0..q {
            let z = if wide {
                linalg::thin_q(&linalg::mm_tn(y, &q_basis))
            } else {
                linalg::thin_q(&linalg::mm(y, &q_basis))
            };
            q_basis = if wide {
                linalg::thin_q(&linalg::mm(y, &z))
            } else {
                linalg::thin_q(&linalg::mm_tn(y, &z))
            };
        }
        // b = Q^T Y (or Y Q for the tall case), small exact SVD
        let b = if wide {
            linalg::mm_tn(&q_basis, y)
        } else {
            linalg::mm(y, &q_basis)
        };
        let (ub, sigma, vb) = eig_svd(&b);
        let spectrum_exhausted = sigma.len() < l;
        if !spectrum_exhausted && sigma.last().copied().unwrap_or(0.0) > kill {
            k *= 2;
            continue;
        }
        let thresholded: Vec<f64> = sigma
            .iter()
            .map(|&s| prox_scalar(spec, tau, s))
            .collect::<Result<_, _>>()?;
        let outcome = if wide {
            // Y ~ (Q ub) s vb^T
            let u = linalg::mm(&q_basis, &ub);
            rebuild(&u, &thresholded, &vb, m, n, spec)
        } else {
            // Y ~ ub s (Q vb)^T
            let v = linalg::mm(&q_basis, &vb);
            rebuild(&ub, &thresholded, &v, m, n, spec)
        };
        return Ok(outcome);
    }
    svt_generalized_detailed(y, spec, tau)
}

/// Applies the scalar prox to every entry; the prox of
/// `lambda * sum psi(|e_i|) + ||E - A||_F^2 / 2`.
pub fn prox_entrywise(
    a: &DenseTensor,
    spec: &Penalty,
    lambda: f64,
) -> Result<DenseTensor, ProxError> {
    spec.validate()?;
    if !(lambda >= 0.0) {
        return Err(ProxError::NegativeWeight(lambda));
    }
    let mut out = a.clone();
    for v in out.data_mut() {
        *v = prox_scalar(spec, lambda, *v)?;
    }
    Ok(out)
}

/// Tube-wise prox: each fiber obtained by fixing the first two indices is
/// rescaled by `prox(lambda, ||tube||) / ||tube||`; the prox of
/// `lambda * sum psi(||tube||_F) + ||E - A||_F^2 / 2`.
pub fn prox_tube(a: &DenseTensor, spec: &Penalty, lambda: f64) -> Result<DenseTensor, ProxError> {
    spec.validate()?;
    if !(lambda >= 0.0) {
        return Err(ProxError::NegativeWeight(lambda));
    }
    if a.order() < 3 {
        return Err(ProxError::TubeOrderTooLow(a.order()));
    }
    let tube_count = a.shape()[0] * a.shape()[1];
    let depth = a.len() / tube_count;
    let mut out = a.clone();
    let data = out.data_mut();
    for t in 0..tube_count {
        let mut norm_sq = 0.0;
        for d in 0..depth {
            let v = data[t + d * tube_count];
            norm_sq += v * v;
        }
        let norm = norm_sq.sqrt();
        let scale = if norm == 0.0 {
            0.0
        } else {
            prox_scalar(spec, lambda, norm)? / norm
        };
        for d in 0..depth {
            data[t + d * tube_count] *= scale;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const KINDS: [Penalty; 7] = [
        Penalty::L1,
        Penalty::Firm { threshold: 1.5 },
        Penalty::Lq { q: 0.5 },
        Penalty::Mcp { gamma: 3.0 },
        Penalty::Scad { a: 3.7 },
        Penalty::Log { eps: 0.5 },
        Penalty::CappedLq {
            q: 0.5,
            threshold: 2.0,
        },
    ];

    /// Independent oracle: dense grid scan of the prox objective.
    fn grid_min(spec: &Penalty, mu: f64, v: f64, points: usize) -> (f64, f64) {
        let hi = v.abs() + 0.5;
        let mut best = (0.0, objective(spec, mu, v.abs(), 0.0));
        for i in 0..=points {
            let x = -hi + 2.0 * hi * i as f64 / points as f64;
            let f = mu * penalty_eval(spec, x) + 0.5 * (x - v) * (x - v);
            if f < best.1 {
                best = (x, f);
            }
        }
        best
    }

    #[test]
    fn penalty_zero_at_zero() {
        for spec in KINDS {
            assert_eq!(penalty_eval(&spec, 0.0), 0.0);
        }
    }

    #[test]
    fn penalty_examples() {
        assert_eq!(penalty_eval(&Penalty::L1, -2.5), 2.5);
        assert!((penalty_eval(&Penalty::Lq { q: 0.5 }, 4.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn l1_prox_is_soft_threshold() {
        let got = prox_scalar(&Penalty::L1, 0.5, 1.2).unwrap();
        assert!((got - 0.7).abs() < 1e-15);
        for v in [-3.0, -0.3, 0.0, 0.2, 5.0] {
            for mu in [0.1, 1.0, 2.5] {
                let got = prox_scalar(&Penalty::L1, mu, v).unwrap();
                let expect = v.signum() * (v.abs() - mu).max(0.0);
                assert!((got - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn prox_zero_input_stays_zero() {
        for spec in KINDS {
            assert_eq!(prox_scalar(&spec, 0.8, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn mcp_prox_matches_dense_grid() {
        let spec = Penalty::Mcp { gamma: 3.0 };
        let got = prox_scalar(&spec, 0.8, 1.5).unwrap();
        let (_, f_grid) = grid_min(&spec, 0.8, 1.5, 1_000_000);
        let f_got = objective(&spec, 0.8, 1.5, got);
        assert!(f_got <= f_grid + 1e-4, "f_got={f_got} f_grid={f_grid}");
    }

    #[test]
    fn all_kinds_beat_grid_oracle() {
        let mut rng = rng_from(99);
        for spec in KINDS {
            for _ in 0..100 {
                let mu = 0.05 + 2.0 * rng.random::<f64>();
                let v = 6.0 * (rng.random::<f64>() - 0.5);
                let x = prox_scalar(&spec, mu, v).unwrap();
                let f_got = objective(&spec, mu, v.abs(), x.abs());
                let (_, f_grid) = grid_min(&spec, mu, v, 200_000);
                assert!(
                    f_got <= f_grid + 1e-6,
                    "{spec:?} mu={mu} v={v}: {f_got} vs grid {f_grid}"
                );
            }
        }
    }

    #[test]
    fn kill_threshold_is_the_zero_boundary() {
        // the objective comparison saturates in floating point, so the
        // empirical boundary is only sharp to ~1e-8 of the input scale
        for spec in KINDS {
            for mu in [0.3, 1.0] {
                let t = kill_threshold(&spec, mu).unwrap();
                assert!(t > 0.0);
                assert_eq!(prox_scalar(&spec, mu, 0.99 * t).unwrap(), 0.0);
                let at_boundary = prox_scalar(&spec, mu, t * (1.0 - 1e-9)).unwrap();
                assert!(at_boundary.abs() <= 1e-6, "{spec:?}: {at_boundary}");
                assert!(prox_scalar(&spec, mu, t * (1.0 + 1e-6)).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Penalty::Lq { q: 1.0 }.validate().is_err());
        assert!(Penalty::Mcp { gamma: 1.0 }.validate().is_err());
        assert!(Penalty::Scad { a: 2.0 }.validate().is_err());
        assert!(Penalty::Log { eps: 0.0 }.validate().is_err());
        assert!(prox_scalar(&Penalty::L1, -1.0, 0.5).is_err());
    }

    #[test]
    fn svt_tau_zero_is_identity() {
        let y = DMatrix::<f64>::from_fn(4, 3, |i, j| (i + j) as f64);
        let out = svt_generalized(&y, &Penalty::L1, 0.0).unwrap();
        assert_eq!(out, y);
    }

    #[test]
    fn svt_l1_on_diagonal() {
        let y = DMatrix::<f64>::from_partial_diagonal(2, 2, &[3.0, 1.0]);
        let out = svt_generalized(&y, &Penalty::L1, 2.0).unwrap();
        let expect = DMatrix::<f64>::from_partial_diagonal(2, 2, &[1.0, 0.0]);
        assert!((out - expect).abs().max() < 1e-10);
    }

    fn spectral_objective(spec: &Penalty, tau: f64, x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
        let sv = crate::linalg::singular_values(x);
        let pen: f64 = sv.iter().map(|&s| penalty_eval(spec, s)).sum();
        tau * pen + 0.5 * (x - y).norm_squared()
    }

    #[test]
    fn svt_improves_objective_over_input_and_l1_svt() {
        let y = DMatrix::<f64>::from_fn(6, 4, |i, j| ((i * 3 + j) as f64 * 0.7).sin());
        for spec in [Penalty::Scad { a: 3.7 }, Penalty::Log { eps: 0.3 }] {
            let tau = 0.8;
            let out = svt_generalized(&y, &spec, tau).unwrap();
            let l1 = svt_generalized(&y, &Penalty::L1, tau).unwrap();
            let f_out = spectral_objective(&spec, tau, &out, &y);
            let f_y = spectral_objective(&spec, tau, &y, &y);
            let f_l1 = spectral_objective(&spec, tau, &l1, &y);
            assert!(f_out <= f_y + 1e-10);
            assert!(f_out <= f_l1 + 1e-10);
        }
    }

    /// Low-rank matrix with prescribed singular values.
    fn synthetic_spectrum(m: usize, n: usize, sv: &[f64], seed: u64) -> DMatrix<f64> {
        let u = linalg::thin_q(&DMatrix::from_fn(m, sv.len(), |i, j| {
            let mut r = rng_from(derive_seed(seed, "u", (i * 131 + j) as u64));
            r.sample::<f64, _>(StandardNormal)
        }));
        let v = linalg::thin_q(&DMatrix::from_fn(n, sv.len(), |i, j| {
            let mut r = rng_from(derive_seed(seed, "v", (i * 131 + j) as u64));
            r.sample::<f64, _>(StandardNormal)
        }));
        let mut us = u;
        for j in 0..sv.len() {
            for i in 0..m {
                us[(i, j)] *= sv[j];
            }
        }
        linalg::mm_nt(&us, &v)
    }

    #[test]
    fn svt_randomized_matches_exact_on_low_rank() {
        let y = synthetic_spectrum(40, 30, &[5.0, 3.0, 2.0], 11);
        let exact = svt_generalized(&y, &Penalty::L1, 0.5).unwrap();
        let fast = svt_randomized(&y, &Penalty::L1, 0.5, 3, 5, 1, 123).unwrap();
        let rel = (&fast - &exact).norm() / exact.norm();
        assert!(rel < 1e-6, "rel={rel}");
    }

    #[test]
    fn svt_randomized_kills_everything_above_sigma1() {
        let y = synthetic_spectrum(30, 20, &[2.0, 1.0], 13);
        let out = svt_randomized(&y, &Penalty::L1, 3.0, 2, 3, 1, 7).unwrap();
        assert!(out.norm() < 1e-12);
    }

    #[test]
    fn svt_randomized_decaying_spectrum_close_to_exact() {
        let sv: Vec<f64> = (1..=20).map(|i| 0.8f64.powi(i)).collect();
        let mut rels = Vec::new();
        for seed in 0..10u64 {
            let y = synthetic_spectrum(60, 40, &sv, 17);
            let tau = 0.05;
            let exact = svt_generalized(&y, &Penalty::L1, tau).unwrap();
            let fast = svt_randomized(&y, &Penalty::L1, tau, 8, 5, 2, seed).unwrap();
            rels.push((&fast - &exact).norm() / exact.norm().max(1e-30));
        }
        rels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(rels[rels.len() / 2] < 1e-4, "median rel {}", rels[rels.len() / 2]);
    }

    #[test]
    fn svt_randomized_rank_guess_above_dim_falls_back() {
        let y = synthetic_spectrum(8, 6, &[2.0, 1.0], 19);
        let exact = svt_generalized(&y, &Penalty::L1, 0.3).unwrap();
        let fast = svt_randomized(&y, &Penalty::L1, 0.3, 10, 5, 1, 3).unwrap();
        assert!((&fast - &exact).norm() < 1e-10);
    }

    #[test]
    fn entrywise_prox_is_elementwise_scalar_prox() {
        let a = DenseTensor::random_normal(&[3, 4, 2], 23);
        let out = prox_entrywise(&a, &Penalty::Scad { a: 3.7 }, 0.4).unwrap();
        for (x, y) in a.data().iter().zip(out.data()) {
            let expect = prox_scalar(&Penalty::Scad { a: 3.7 }, 0.4, *x).unwrap();
            assert!((y - expect).abs() < 1e-15);
        }
        let z = DenseTensor::zeros(&[2, 2, 2]);
        assert_eq!(
            prox_entrywise(&z, &Penalty::L1, 0.5).unwrap().data(),
            z.data()
        );
    }

    #[test]
    fn tube_prox_single_tube_example() {
        // one tube of norm 2, l1 penalty, lambda = 0.5 -> scaled by 0.75
        let mut a = DenseTensor::zeros(&[2, 2, 4]);
        for d in 0..4 {
            a.set(&[0, 1, d], 1.0);
        }
        let out = prox_tube(&a, &Penalty::L1, 0.5).unwrap();
        for d in 0..4 {
            assert!((out.at(&[0, 1, d]) - 0.75).abs() < 1e-14);
            assert_eq!(out.at(&[1, 0, d]), 0.0);
        }
    }

    #[test]
    fn tube_prox_matches_per_tube_scalar_objective() {
        let a = DenseTensor::random_normal(&[3, 3, 4], 29);
        let spec = Penalty::Mcp { gamma: 2.5 };
        let out = prox_tube(&a, &spec, 0.6).unwrap();
        for i0 in 0..3 {
            for i1 in 0..3 {
                let norm = (0..4)
                    .map(|d| a.at(&[i0, i1, d]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let out_norm = (0..4)
                    .map(|d| out.at(&[i0, i1, d]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                // per-tube problem reduces to a scalar prox on the tube norm
                let (_, f_grid) = grid_min(&spec, 0.6, norm, 200_000);
                let f_got = objective(&spec, 0.6, norm, out_norm);
                assert!(f_got <= f_grid + 1e-4);
            }
        }
    }

    #[test]
    fn tube_prox_rejects_low_order() {
        let a = DenseTensor::zeros(&[3, 3]);
        assert!(matches!(
            prox_tube(&a, &Penalty::L1, 0.5),
            Err(ProxError::TubeOrderTooLow(2))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

        #[test]
        fn prop_prox_shrinks_and_is_odd(kind in 0usize..7, mu in 0.01f64..3.0, v in -5.0f64..5.0) {
            let spec = KINDS[kind];
            let x = prox_scalar(&spec, mu, v).unwrap();
            prop_assert!(x.abs() <= v.abs() + 1e-12);
            let neg = prox_scalar(&spec, mu, -v).unwrap();
            prop_assert!((x + neg).abs() < 1e-12);
        }

        #[test]
        fn prop_prox_monotone_on_nonnegatives(kind in 0usize..7, mu in 0.01f64..3.0, a in 0.0f64..4.0, delta in 0.0f64..2.0) {
            let spec = KINDS[kind];
            let lo = prox_scalar(&spec, mu, a).unwrap();
            let hi = prox_scalar(&spec, mu, a + delta).unwrap();
            prop_assert!(hi >= lo - 1e-10);
        }
    }
}
