//! ADMM solvers for gradient-regularized tensor completion.
//!
//! Four models share one splitting skeleton. Writing `R(L)` for the weighted
//! spectral penalty of the balanced unfoldings of every mode-`t` gradient
//! (`t` in the prior direction set) and `psi` for the noise penalty:
//!
//! - completion: `min R(L)` s.t. the observed entries of `L` match the data;
//! - robust completion: `min R(L) + lambda psi(E)` s.t. observed entries of
//!   `L + E` match the data;
//! - quantized completion: `min (1/2m) sum (<P_k, L> - y_k)^2 + lambda1 R(L)`
//!   s.t. `|L|_inf <= alpha`;
//! - robust quantized completion: the data term reads `L + E` and
//!   `lambda2 psi(E)` is added.
//!
//! Every gradient unfolding gets its own splitting variable `Z_{t,k}` with
//! multiplier `Lambda_{t,k}`, solved by singular-value thresholding (exact or
//! sketched). The masked equality is handled by an auxiliary `W = L` (an
//! indicator projection), and the box constraint by `B = L` (a clip), so the
//! `L` update is an unconstrained quadratic: cyclic-difference normal
//! equations solved in closed form by FFT diagonalization, plus a masked
//! diagonal term in the quantized models handled by a few preconditioned
//! conjugate-gradient refinements.

use std::time::Instant;

use thiserror::Error;

use crate::degrade::Observation;
use crate::fft::GradFftSolver;
use crate::prox::{
    penalty_eval, prox_entrywise, prox_tube, svt_generalized_detailed,
    svt_randomized_detailed, Penalty, ProxError, SvtOutcome,
};
use crate::regularizer::{balanced_unfoldings, GntctvSpec, RegularizerError};
use crate::rng::derive_seed;
use crate::tensor::{DenseTensor, Permutation, TensorError};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("this model expects unquantized observations")]
    ExpectsUnquantized,
    #[error("this model expects quantized observations (delta set or one-bit)")]
    ExpectsQuantized,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Regularizer(#[from] RegularizerError),
    #[error(transparent)]
    Prox(#[from] ProxError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Structure of the noise penalty `psi(h(E))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseStructure {
    /// `h` is the entrywise l1 template: `sum psi(|e_i|)`.
    Entrywise,
    /// `h` is the tube template: `sum psi(||E_{i1 i2 : ... :}||_F)`.
    Tube,
}

/// Which SVD powers the singular-value thresholding steps.
#[derive(Debug, Clone, Copy)]
pub enum SvdBackend {
    Exact,
    /// Sketched thresholding with a warm-started rank schedule: the first
    /// call guesses rank 10, later calls reuse the previous retained rank
    /// plus a 5-column buffer.
    Randomized {
        oversample: usize,
        power_iters: usize,
        seed: u64,
    },
}

impl SvdBackend {
    pub fn randomized(seed: u64) -> Self {
        SvdBackend::Randomized {
            oversample: 5,
            power_iters: 1,
            seed,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SvdBackend::Exact => "exact",
            SvdBackend::Randomized { .. } => "randomized",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub reg: GntctvSpec,
    pub noise_penalty: Penalty,
    pub noise_structure: NoiseStructure,
    /// Robust trade-off for the unquantized model; `None` selects
    /// `1 / sqrt(max extent)`.
    pub lambda: Option<f64>,
    /// Regularizer weight in the quantized models.
    pub lambda1: f64,
    /// Noise-penalty weight in the quantized models.
    pub lambda2: f64,
    /// Infinity-norm box bound for the quantized models.
    pub alpha_box: f64,
    pub rho0: f64,
    pub rho_growth: f64,
    pub rho_max: f64,
    /// Stop when the relative change of `L` falls below this.
    pub tol: f64,
    pub max_iters: usize,
    pub backend: SvdBackend,
}

impl SolverConfig {
    pub fn new(reg: GntctvSpec) -> Self {
        Self {
            reg,
            noise_penalty: Penalty::L1,
            noise_structure: NoiseStructure::Entrywise,
            lambda: None,
            lambda1: 0.1,
            lambda2: 0.1,
            alpha_box: 1.0,
            rho0: 1e-2,
            rho_growth: 1.1,
            rho_max: 1e6,
            tol: 1e-5,
            max_iters: 200,
            backend: SvdBackend::Exact,
        }
    }

    fn validate(&self, order: usize) -> Result<(), SolverError> {
        self.reg.validate(order)?;
        self.noise_penalty.validate()?;
        if let Some(l) = self.lambda {
            if !(l > 0.0) {
                return Err(SolverError::InvalidParameter(format!("lambda = {l}")));
            }
        }
        if !(self.lambda1 > 0.0) || !(self.lambda2 > 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "lambda1 = {}, lambda2 = {}",
                self.lambda1, self.lambda2
            )));
        }
        if !(self.rho0 > 0.0) || !(self.rho_growth >= 1.0) || !(self.rho_max >= self.rho0) {
            return Err(SolverError::InvalidParameter(format!(
                "rho0 = {}, growth = {}, max = {}",
                self.rho0, self.rho_growth, self.rho_max
            )));
        }
        if !(self.tol > 0.0) {
            return Err(SolverError::InvalidParameter(format!("tol = {}", self.tol)));
        }
        if !(self.alpha_box > 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "alpha_box = {}",
                self.alpha_box
            )));
        }
        Ok(())
    }
}

/// Per-run diagnostics. `primal_residuals` tracks the worst scaled constraint
/// violation, `dual_residuals` the scaled movement of `L`; both have exactly
/// `iterations` entries.
#[derive(Debug, Clone)]
pub struct SolverReport {
    pub iterations: usize,
    pub primal_residuals: Vec<f64>,
    pub dual_residuals: Vec<f64>,
    pub objective: Vec<f64>,
    pub wall_time_secs: f64,
    /// Max-norm violation of the hard constraints before the final exact
    /// enforcement.
    pub constraint_violation: f64,
    /// Retained rank of every thresholding step, in call order.
    pub svt_ranks: Vec<usize>,
    pub converged: bool,
}

impl SolverReport {
    fn new() -> Self {
        Self {
            iterations: 0,
            primal_residuals: Vec::new(),
            dual_residuals: Vec::new(),
            objective: Vec::new(),
            wall_time_secs: 0.0,
            constraint_violation: 0.0,
            svt_ranks: Vec::new(),
            converged: false,
        }
    }
}

/// Shared state for the gradient-unfolding splitting variables.
struct GradSplit {
    directions: Vec<usize>,
    perms: Vec<Permutation>,
    split: usize,
    weights: Vec<f64>,
    z: Vec<Vec<DenseTensor>>,
    multipliers: Vec<Vec<DenseTensor>>,
    rank_memory: Vec<Vec<usize>>,
}

impl GradSplit {
    fn new(shape: &[usize], reg: &GntctvSpec) -> Result<Self, SolverError> {
        let order = shape.len();
        let unfoldings = balanced_unfoldings(order)?;
        let perms = unfoldings
            .iter()
            .map(|(a, b)| {
                Permutation::new(a.iter().chain(b.iter()).copied().collect())
                    .map_err(SolverError::Tensor)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let zeros = DenseTensor::zeros(shape);
        let z = vec![vec![zeros.clone(); perms.len()]; reg.directions.len()];
        let multipliers = vec![vec![zeros; perms.len()]; reg.directions.len()];
        Ok(Self {
            directions: reg.directions.clone(),
            perms,
            split: order / 2,
            weights: reg.weights.clone(),
            z,
            multipliers,
            rank_memory: vec![vec![0; 0]; 0],
        })
    }

    fn unfolding_count(&self) -> usize {
        self.perms.len()
    }
}

fn svt_dispatch(
    arg: &nalgebra::DMatrix<f64>,
    penalty: &Penalty,
    tau: f64,
    backend: &SvdBackend,
    memory: &mut usize,
    call_salt: u64,
) -> Result<SvtOutcome, ProxError> {
    let outcome = match backend {
        SvdBackend::Exact => svt_generalized_detailed(arg, penalty, tau)?,
        SvdBackend::Randomized {
            oversample,
            power_iters,
            seed,
        } => {
            let guess = if *memory == 0 { 10 } else { *memory + 5 };
            svt_randomized_detailed(
                arg,
                penalty,
                tau,
                guess,
                *oversample,
                *power_iters,
                derive_seed(*seed, "solver-svt", call_salt),
            )?
        }
    };
    *memory = outcome.rank;
    Ok(outcome)
}

/// One sweep of thresholding over every (direction, unfolding) pair. Returns
/// the weighted penalty value and the worst scaled constraint violation.
#[allow(clippy::too_many_arguments)]
fn z_step(
    split: &mut GradSplit,
    l: &DenseTensor,
    rho: f64,
    reg_weight: f64,
    penalty: &Penalty,
    backend: &SvdBackend,
    iter: usize,
    report: &mut SolverReport,
) -> Result<(f64, f64), SolverError> {
    let gamma = split.directions.len() as f64;
    let nbar = split.unfolding_count();
    if split.rank_memory.is_empty() {
        split.rank_memory = vec![vec![0; nbar]; split.directions.len()];
    }
    let shape = l.shape().to_vec();
    let grads = split
        .directions
        .iter()
        .map(|&t| l.gradient(t))
        .collect::<Result<Vec<_>, _>>()?;

    // the (direction, unfolding) subproblems are independent; results are
    // reduced in fixed order below, so any thread count gives the same report
    let mut jobs = Vec::with_capacity(split.directions.len() * nbar);
    for ti in 0..split.directions.len() {
        for k in 0..nbar {
            let mut arg = grads[ti].clone();
            arg.axpy(1.0 / rho, &split.multipliers[ti][k]);
            let tau = split.weights[k] * reg_weight / (gamma * rho);
            let salt = (iter * split.directions.len() * nbar + ti * nbar + k) as u64;
            jobs.push((ti, k, arg, tau, salt, split.rank_memory[ti][k]));
        }
    }
    let perms = &split.perms;
    let d = split.split;
    let outcomes = crate::par::par_map(jobs, |_, (ti, k, arg, tau, salt, mem_in)| {
        let m = arg.unfold(&perms[k], d)?;
        let mut mem = mem_in;
        let outcome = svt_dispatch(&m, penalty, tau, backend, &mut mem, salt)?;
        let z_new = DenseTensor::fold(&outcome.matrix, &shape, &perms[k], d)
            .map_err(SolverError::Tensor)?;
        Ok::<_, SolverError>((ti, k, outcome, z_new, mem))
    });

    let mut reg_value = 0.0;
    let mut worst_gap = 0.0f64;
    for res in outcomes {
        let (ti, k, outcome, z_new, mem) = res?;
        split.rank_memory[ti][k] = mem;
        report.svt_ranks.push(outcome.rank);
        reg_value += split.weights[k] * outcome.penalty_value;
        worst_gap = worst_gap.max(grads[ti].sub(&z_new).frobenius_norm());
        split.z[ti][k] = z_new;
    }
    Ok((reg_value / gamma, worst_gap))
}

/// `sum_{t,k} grad_t^T (Z_{t,k} - Lambda_{t,k} / rho)` accumulated into `acc`.
fn accumulate_adjoint_terms(split: &GradSplit, rho: f64, acc: &mut DenseTensor) {
    for (ti, &t) in split.directions.iter().enumerate() {
        for k in 0..split.unfolding_count() {
            let mut term = split.z[ti][k].clone();
            term.axpy(-1.0 / rho, &split.multipliers[ti][k]);
            let adj = term.gradient_adjoint(t).expect("validated direction");
            acc.axpy(1.0, &adj);
        }
    }
}

fn update_grad_multipliers(split: &mut GradSplit, l: &DenseTensor, rho: f64) {
    for (ti, &t) in split.directions.iter().enumerate() {
        let grad = l.gradient(t).expect("validated direction");
        for k in 0..split.unfolding_count() {
            let mut residual = grad.clone();
            residual.axpy(-1.0, &split.z[ti][k]);
            split.multipliers[ti][k].axpy(rho, &residual);
        }
    }
}

fn noise_penalty_value(e: &DenseTensor, penalty: &Penalty, structure: NoiseStructure) -> f64 {
    match structure {
        NoiseStructure::Entrywise => e.data().iter().map(|&v| penalty_eval(penalty, v)).sum(),
        NoiseStructure::Tube => {
            let tubes = e.shape()[0] * e.shape()[1];
            let depth = e.len() / tubes;
            (0..tubes)
                .map(|t| {
                    let norm = (0..depth)
                        .map(|d| e.data()[t + d * tubes].powi(2))
                        .sum::<f64>()
                        .sqrt();
                    penalty_eval(penalty, norm)
                })
                .sum()
        }
    }
}

fn noise_prox(
    v: &DenseTensor,
    penalty: &Penalty,
    weight: f64,
    structure: NoiseStructure,
) -> Result<DenseTensor, ProxError> {
    match structure {
        NoiseStructure::Entrywise => prox_entrywise(v, penalty, weight),
        NoiseStructure::Tube => prox_tube(v, penalty, weight),
    }
}

fn masked_fill(template: &DenseTensor, mask: &[bool], on: &DenseTensor, off: &DenseTensor) -> DenseTensor {
    let mut out = template.clone();
    let data = out.data_mut();
    for i in 0..data.len() {
        data[i] = if mask[i] { on.data()[i] } else { off.data()[i] };
    }
    out
}

/// Completion and robust completion (unquantized observations).
fn solve_unquantized(
    obs: &Observation,
    cfg: &SolverConfig,
    robust: bool,
) -> Result<(DenseTensor, DenseTensor, SolverReport), SolverError> {
    if obs.delta.is_some() || obs.one_bit {
        return Err(SolverError::ExpectsUnquantized);
    }
    let start = Instant::now();
    let shape = obs.shape().to_vec();
    cfg.validate(shape.len())?;
    let m_tensor = obs.observed_tensor();
    let mask = obs.mask();
    let mut report = SolverReport::new();

    // fully observed completion pins every entry
    if !robust && mask.iter().all(|&b| b) {
        report.converged = true;
        report.wall_time_secs = start.elapsed().as_secs_f64();
        return Ok((m_tensor.clone(), DenseTensor::zeros(&shape), report));
    }

    let lambda = cfg
        .lambda
        .unwrap_or_else(|| 1.0 / (*shape.iter().max().unwrap() as f64).sqrt());
    let mut split = GradSplit::new(&shape, &cfg.reg)?;
    let nbar = split.unfolding_count() as f64;
    let mut fft = GradFftSolver::new(&shape, &cfg.reg.directions);

    let mut l = m_tensor.clone();
    let mut e = DenseTensor::zeros(&shape);
    let mut w = l.clone();
    let mut y = DenseTensor::zeros(&shape);
    let mut rho = cfg.rho0;
    let scale = m_tensor.frobenius_norm().max(1.0);

    for iter in 0..cfg.max_iters {
        let (reg_value, grad_gap) = z_step(
            &mut split,
            &l,
            rho,
            1.0,
            &cfg.reg.penalty,
            &cfg.backend,
            iter,
            &mut report,
        )?;

        // joint (E, W) step under the masked equality
        if robust {
            let mut v = m_tensor.sub(&l);
            v.axpy(1.0 / rho, &y);
            let masked_v = masked_fill(&v, mask, &v, &DenseTensor::zeros(&shape));
            e = noise_prox(&masked_v, &cfg.noise_penalty, lambda / rho, cfg.noise_structure)?;
        }
        let mut off = l.clone();
        off.axpy(-1.0 / rho, &y);
        let on = m_tensor.sub(&e);
        w = masked_fill(&w, mask, &on, &off);

        // L step: (sum grad^T grad + I) L = adjoint terms + W + Y / rho
        let mut rhs = w.clone();
        rhs.axpy(1.0 / rho, &y);
        accumulate_adjoint_terms(&split, rho, &mut rhs);
        let l_new = fft.solve(&rhs, nbar, 1.0);

        let movement = l_new.sub(&l).frobenius_norm();
        let rel_change = movement / l.frobenius_norm().max(1e-12);
        l = l_new;

        update_grad_multipliers(&mut split, &l, rho);
        let mut w_residual = w.sub(&l);
        y.axpy(rho, &w_residual);
        // constraint violation on the data: P_Omega(L + E - M)
        for (i, &m) in mask.iter().enumerate() {
            if !m {
                w_residual.data_mut()[i] = 0.0;
            }
        }
        let data_gap = {
            let mut g = l.add(&e).sub(&m_tensor);
            for (i, &m) in mask.iter().enumerate() {
                if !m {
                    g.data_mut()[i] = 0.0;
                }
            }
            g.max_abs()
        };

        report.primal_residuals.push(grad_gap.max(l.sub(&w).frobenius_norm()) / scale);
        report.dual_residuals.push(movement / scale);
        report
            .objective
            .push(reg_value + lambda * noise_penalty_value(&e, &cfg.noise_penalty, cfg.noise_structure));
        report.iterations = iter + 1;
        report.constraint_violation = data_gap;

        rho = (rho * cfg.rho_growth).min(cfg.rho_max);
        if rel_change < cfg.tol {
            report.converged = true;
            break;
        }
    }

    // exact enforcement of the masked equality at return
    let data = l.data_mut();
    for (i, &m) in mask.iter().enumerate() {
        if m {
            data[i] = m_tensor.data()[i] - e.data()[i];
        }
    }
    report.wall_time_secs = start.elapsed().as_secs_f64();
    Ok((l, e, report))
}

/// Quantized completion and robust quantized completion.
fn solve_quantized(
    obs: &Observation,
    cfg: &SolverConfig,
    robust: bool,
) -> Result<(DenseTensor, DenseTensor, SolverReport), SolverError> {
    if obs.delta.is_none() && !obs.one_bit {
        return Err(SolverError::ExpectsQuantized);
    }
    let start = Instant::now();
    let shape = obs.shape().to_vec();
    cfg.validate(shape.len())?;
    let y_tensor = obs.observed_tensor();
    let mask = obs.mask();
    let m_count = obs.sample_count().max(1) as f64;
    let alpha = cfg.alpha_box;
    let mut report = SolverReport::new();

    let mut split = GradSplit::new(&shape, &cfg.reg)?;
    let nbar = split.unfolding_count() as f64;
    let mut fft = GradFftSolver::new(&shape, &cfg.reg.directions);

    let mut l = y_tensor.map(|v| v.clamp(-alpha, alpha));
    let mut e = DenseTensor::zeros(&shape);
    let mut b = l.clone();
    let mut y_b = DenseTensor::zeros(&shape);
    let mut rho = cfg.rho0;
    let scale = y_tensor.frobenius_norm().max(1.0);
    let mask_fraction = obs.sample_count() as f64 / l.len() as f64;

    // The iteration minimizes the objective scaled by m (same minimizer):
    // (1/2) sum (<P_k, L + E> - y_k)^2 + m lambda1 R(L) + m lambda2 psi(E),
    // which keeps the quadratic data term commensurate with the penalty rho.
    let reg_weight = m_count * cfg.lambda1;
    let noise_weight = m_count * cfg.lambda2;

    for iter in 0..cfg.max_iters {
        let (reg_value, grad_gap) = z_step(
            &mut split,
            &l,
            rho,
            reg_weight,
            &cfg.reg.penalty,
            &cfg.backend,
            iter,
            &mut report,
        )?;

        // E step: separable prox against the quadratic data term
        if robust {
            let mut v = y_tensor.sub(&l);
            for (i, &m) in mask.iter().enumerate() {
                if !m {
                    v.data_mut()[i] = 0.0;
                }
            }
            e = noise_prox(&v, &cfg.noise_penalty, noise_weight, cfg.noise_structure)?;
        }

        // B step: box projection
        let mut b_target = l.clone();
        b_target.axpy(-1.0 / rho, &y_b);
        b = b_target.map(|v| v.clamp(-alpha, alpha));

        // L step by preconditioned CG on
        // (mask + rho (nbar Lap + I)) L = rhs
        let mut rhs = b.clone();
        rhs.axpy(1.0 / rho, &y_b);
        accumulate_adjoint_terms(&split, rho, &mut rhs);
        rhs.scale_in_place(rho);
        for (i, &msk) in mask.iter().enumerate() {
            if msk {
                rhs.data_mut()[i] += y_tensor.data()[i] - e.data()[i];
            }
        }
        let l_new = pcg_masked(
            &mut fft,
            mask,
            1.0,
            rho * nbar,
            rho,
            mask_fraction,
            &rhs,
            &l,
        );

        let movement = l_new.sub(&l).frobenius_norm();
        let rel_change = movement / l.frobenius_norm().max(1e-12);
        l = l_new;

        update_grad_multipliers(&mut split, &l, rho);
        let mut b_residual = b.sub(&l);
        y_b.axpy(rho, &b_residual);

        let box_gap = l.data().iter().fold(0.0f64, |g, &v| g.max(v.abs() - alpha)).max(0.0);
        let data_term = {
            let mut acc = 0.0;
            for (i, &msk) in mask.iter().enumerate() {
                if msk {
                    let d = l.data()[i] + e.data()[i] - y_tensor.data()[i];
                    acc += d * d;
                }
            }
            acc / (2.0 * m_count)
        };
        report
            .primal_residuals
            .push(grad_gap.max(b.sub(&l).frobenius_norm()) / scale);
        report.dual_residuals.push(movement / scale);
        // reported in the model's own units, not the m-scaled ones
        report.objective.push(
            data_term
                + cfg.lambda1 * reg_value
                + cfg.lambda2 * noise_penalty_value(&e, &cfg.noise_penalty, cfg.noise_structure),
        );
        report.iterations = iter + 1;
        report.constraint_violation = box_gap;

        rho = (rho * cfg.rho_growth).min(cfg.rho_max);
        if rel_change < cfg.tol {
            report.converged = true;
            break;
        }
    }

    // exact box enforcement at return
    let clipped = l.map(|v| v.clamp(-alpha, alpha));
    report.wall_time_secs = start.elapsed().as_secs_f64();
    Ok((clipped, e, report))
}

/// Preconditioned conjugate gradients for the quantized normal equations,
/// warm-started at `x0`; at most 20 steps or a 1e-8 relative residual.
#[allow(clippy::too_many_arguments)]
fn pcg_masked(
    fft: &mut GradFftSolver,
    mask: &[bool],
    diag_coeff: f64,
    lap_coeff: f64,
    ident_coeff: f64,
    mask_fraction: f64,
    rhs: &DenseTensor,
    x0: &DenseTensor,
) -> DenseTensor {
    let apply = |x: &DenseTensor, fft: &GradFftSolver| -> DenseTensor {
        let mut out = fft.apply_laplacian(x);
        out.scale_in_place(lap_coeff);
        out.axpy(ident_coeff, x);
        for (i, &m) in mask.iter().enumerate() {
            if m {
                out.data_mut()[i] += diag_coeff * x.data()[i];
            }
        }
        out
    };
    let precond_ident = ident_coeff + diag_coeff * mask_fraction;
    let mut x = x0.clone();
    let mut r = rhs.sub(&apply(&x, fft));
    let rhs_norm = rhs.frobenius_norm().max(1e-300);
    let mut z = fft.solve(&r, lap_coeff, precond_ident);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    for _ in 0..20 {
        if r.frobenius_norm() <= 1e-8 * rhs_norm {
            break;
        }
        let ap = apply(&p, fft);
        let denom = p.dot(&ap);
        if denom <= 0.0 {
            break;
        }
        let alpha = rz / denom;
        x.axpy(alpha, &p);
        r.axpy(-alpha, &ap);
        z = fft.solve(&r, lap_coeff, precond_ident);
        let rz_new = r.dot(&z);
        let beta = rz_new / rz;
        rz = rz_new;
        let mut p_new = z.clone();
        p_new.axpy(beta, &p);
        p = p_new;
    }
    x
}

/// Completion from exact partial observations.
pub fn solve_gntc(
    obs: &Observation,
    cfg: &SolverConfig,
) -> Result<(DenseTensor, SolverReport), SolverError> {
    let (l, _, report) = solve_unquantized(obs, cfg, false)?;
    Ok((l, report))
}

/// Robust completion: recovers the smooth low-rank part and a structured
/// noise tensor supported on the observed entries.
pub fn solve_gnrtc(
    obs: &Observation,
    cfg: &SolverConfig,
) -> Result<(DenseTensor, DenseTensor, SolverReport), SolverError> {
    solve_unquantized(obs, cfg, true)
}

/// Completion from dithered quantized measurements.
pub fn solve_gnqtc(
    obs: &Observation,
    cfg: &SolverConfig,
) -> Result<(DenseTensor, SolverReport), SolverError> {
    let (l, _, report) = solve_quantized(obs, cfg, false)?;
    Ok((l, report))
}

/// Robust completion from dithered quantized measurements.
pub fn solve_gnqrtc(
    obs: &Observation,
    cfg: &SolverConfig,
) -> Result<(DenseTensor, DenseTensor, SolverReport), SolverError> {
    solve_quantized(obs, cfg, true)
}
