//! Random sketching matrix families for the compression algorithms.
//!
//! Four families are supported: dense Gaussian, dense uniform (scaled to unit
//! variance), columnwise Khatri-Rao products of Gaussian or uniform factors,
//! and Kronecker products of subsampled randomized Fourier blocks. Every
//! family is deterministic for a fixed seed; the sketches are only ever used
//! to span subspaces, so their overall scale is free and each family uses its
//! natural normalization.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::rng::{derive_seed, rng_from, ChaCha8Rng};

#[derive(Debug, Error)]
pub enum SketchError {
    #[error("factor rows {got:?} must multiply to {rows}")]
    FactorRowsMismatch { rows: usize, got: Vec<usize> },
    #[error("Khatri-Rao factors must all have {cols} columns, got {got:?}")]
    KrColsMismatch { cols: usize, got: Vec<usize> },
    #[error("Kronecker factor columns {got:?} must multiply to {cols}")]
    KroneckerColsMismatch { cols: usize, got: Vec<usize> },
    #[error("SRFT block can subsample at most {rows} of {rows} columns, asked for {cols}")]
    SrftOversubsampled { rows: usize, cols: usize },
    #[error("sketch dimensions must be positive, got {rows}x{cols}")]
    EmptySketch { rows: usize, cols: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SketchFamily {
    Gaussian,
    Uniform,
    KrGaussian,
    KrUniform,
    KroneckerSrft,
}

impl SketchFamily {
    pub fn name(&self) -> &'static str {
        match self {
            SketchFamily::Gaussian => "gaussian",
            SketchFamily::Uniform => "uniform",
            SketchFamily::KrGaussian => "kr-gaussian",
            SketchFamily::KrUniform => "kr-uniform",
            SketchFamily::KroneckerSrft => "kronecker-srft",
        }
    }
}

/// Which random family to draw, optional per-factor shapes for the structured
/// families, and the seed that makes the draw reproducible.
#[derive(Debug, Clone)]
pub struct SketchSpec {
    pub family: SketchFamily,
    /// `(rows, cols)` of each factor for the KR and Kronecker families.
    /// `None` means a single unstructured factor.
    pub factor_shapes: Option<Vec<(usize, usize)>>,
    pub seed: u64,
}

impl SketchSpec {
    pub fn gaussian(seed: u64) -> Self {
        Self {
            family: SketchFamily::Gaussian,
            factor_shapes: None,
            seed,
        }
    }

    pub fn new(family: SketchFamily, seed: u64) -> Self {
        Self {
            family,
            factor_shapes: None,
            seed,
        }
    }

    pub fn reseeded(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    /// Fills in factor shapes for the structured families from the mode
    /// extents that make up the unfolding's column space. Unstructured
    /// families and explicit shapes pass through unchanged.
    pub fn for_unfolding(&self, other_dims: &[usize], rows: usize, cols: usize) -> SketchSpec {
        if self.factor_shapes.is_some() || other_dims.len() < 2 {
            return self.clone();
        }
        let shapes = match self.family {
            SketchFamily::KrGaussian | SketchFamily::KrUniform => {
                Some(other_dims.iter().map(|&d| (d, cols)).collect())
            }
            SketchFamily::KroneckerSrft => near_uniform_split(cols, other_dims)
                .map(|split| other_dims.iter().copied().zip(split).collect()),
            _ => None,
        };
        debug_assert_eq!(other_dims.iter().product::<usize>(), rows);
        SketchSpec {
            family: self.family,
            factor_shapes: shapes,
            seed: self.seed,
        }
    }
}

/// Draws a `rows x cols` sketching matrix according to `spec`.
pub fn make_sketch(spec: &SketchSpec, rows: usize, cols: usize) -> Result<DMatrix<f64>, SketchError> {
    if rows == 0 || cols == 0 {
        return Err(SketchError::EmptySketch { rows, cols });
    }
    let mut rng = rng_from(derive_seed(spec.seed, "sketch", 0));
    match spec.family {
        SketchFamily::Gaussian => Ok(dense(rows, cols, &mut rng, gaussian_entry)),
        SketchFamily::Uniform => Ok(dense(rows, cols, &mut rng, uniform_entry)),
        SketchFamily::KrGaussian => khatri_rao(spec, rows, cols, gaussian_entry),
        SketchFamily::KrUniform => khatri_rao(spec, rows, cols, uniform_entry),
        SketchFamily::KroneckerSrft => kronecker_srft(spec, rows, cols),
    }
}

fn gaussian_entry(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Unif(-sqrt(3), sqrt(3)): zero mean, unit variance.
fn uniform_entry(rng: &mut ChaCha8Rng) -> f64 {
    let r: f64 = rng.random();
    (2.0 * r - 1.0) * 3.0_f64.sqrt()
}

fn dense(rows: usize, cols: usize, rng: &mut ChaCha8Rng, entry: fn(&mut ChaCha8Rng) -> f64) -> DMatrix<f64> {
    let data: Vec<f64> = (0..rows * cols).map(|_| entry(rng)).collect();
    DMatrix::from_vec(rows, cols, data)
}

fn factor_shapes_or_single(
    spec: &SketchSpec,
    rows: usize,
    cols: usize,
) -> Vec<(usize, usize)> {
    spec.factor_shapes
        .clone()
        .unwrap_or_else(|| vec![(rows, cols)])
}

/// Columnwise Khatri-Rao product: column j of the result is the Kronecker
/// product of column j of every factor.
fn khatri_rao(
    spec: &SketchSpec,
    rows: usize,
    cols: usize,
    entry: fn(&mut ChaCha8Rng) -> f64,
) -> Result<DMatrix<f64>, SketchError> {
    let shapes = factor_shapes_or_single(spec, rows, cols);
    let row_prod: usize = shapes.iter().map(|s| s.0).product();
    if row_prod != rows {
        return Err(SketchError::FactorRowsMismatch {
            rows,
            got: shapes.iter().map(|s| s.0).collect(),
        });
    }
    if shapes.iter().any(|s| s.1 != cols) {
        return Err(SketchError::KrColsMismatch {
            cols,
            got: shapes.iter().map(|s| s.1).collect(),
        });
    }
    let factors: Vec<DMatrix<f64>> = shapes
        .iter()
        .enumerate()
        .map(|(h, &(r, c))| {
            let mut rng = rng_from(derive_seed(spec.seed, "sketch-factor", h as u64));
            dense(r, c, &mut rng, entry)
        })
        .collect();
    let mut out = DMatrix::zeros(rows, cols);
    let mut col = vec![0.0f64; rows];
    for j in 0..cols {
        col.clear();
        col.push(1.0);
        for f in &factors {
            // col <- col (x) f[:, j]
            let mut next = Vec::with_capacity(col.len() * f.nrows());
            for &a in col.iter() {
                for i in 0..f.nrows() {
                    next.push(a * f[(i, j)]);
                }
            }
            col = next;
        }
        for i in 0..rows {
            out[(i, j)] = col[i];
        }
    }
    Ok(out)
}

/// Kronecker product of per-factor SRFT blocks.
///
/// Each block is (random sign diagonal) x (real Fourier basis) x (uniform
/// column subsample without replacement). The real basis columns are the
/// normalized cosine/sine harmonics, which are exactly orthonormal, so each
/// block (and hence the full Kronecker product) has exactly orthonormal
/// columns and the expected Gram is the identity.
fn kronecker_srft(spec: &SketchSpec, rows: usize, cols: usize) -> Result<DMatrix<f64>, SketchError> {
    let shapes = factor_shapes_or_single(spec, rows, cols);
    let row_prod: usize = shapes.iter().map(|s| s.0).product();
    if row_prod != rows {
        return Err(SketchError::FactorRowsMismatch {
            rows,
            got: shapes.iter().map(|s| s.0).collect(),
        });
    }
    let col_prod: usize = shapes.iter().map(|s| s.1).product();
    if col_prod != cols {
        return Err(SketchError::KroneckerColsMismatch {
            cols,
            got: shapes.iter().map(|s| s.1).collect(),
        });
    }
    let blocks: Vec<DMatrix<f64>> = shapes
        .iter()
        .enumerate()
        .map(|(h, &(r, c))| {
            let mut rng = rng_from(derive_seed(spec.seed, "sketch-srft", h as u64));
            srft_block(r, c, &mut rng)
        })
        .collect::<Result<_, _>>()?;
    let mut out = DMatrix::from_element(1, 1, 1.0);
    for b in &blocks {
        out = out.kronecker(b);
    }
    Ok(out)
}

/// One n x l SRFT block.
fn srft_block(n: usize, l: usize, rng: &mut ChaCha8Rng) -> Result<DMatrix<f64>, SketchError> {
    if l > n {
        return Err(SketchError::SrftOversubsampled { rows: n, cols: l });
    }
    // The n distinct real harmonics: cos_k for k = 0..=n/2 and sin_k for
    // k = 1..ceil(n/2); unit-normalized they form an orthonormal basis.
    #[derive(Copy, Clone)]
    enum Harmonic {
        Cos(usize),
        Sin(usize),
    }
    let mut candidates = Vec::with_capacity(n);
    for k in 0..=n / 2 {
        candidates.push(Harmonic::Cos(k));
    }
    for k in 1..n.div_ceil(2) {
        candidates.push(Harmonic::Sin(k));
    }
    debug_assert_eq!(candidates.len(), n);
    // uniform subsample without replacement (partial Fisher-Yates)
    for i in 0..l {
        let j = i + (rng.random::<u64>() as usize) % (n - i);
        candidates.swap(i, j);
    }
    let signs: Vec<f64> = (0..n)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let mut out = DMatrix::zeros(n, l);
    for (j, &h) in candidates[..l].iter().enumerate() {
        let mut norm_sq = 0.0;
        for i in 0..n {
            let theta = match h {
                Harmonic::Cos(k) => 2.0 * std::f64::consts::PI * (i * k) as f64 / n as f64,
                Harmonic::Sin(k) => 2.0 * std::f64::consts::PI * (i * k) as f64 / n as f64,
            };
            let v = match h {
                Harmonic::Cos(_) => theta.cos(),
                Harmonic::Sin(_) => theta.sin(),
            };
            out[(i, j)] = v;
            norm_sq += v * v;
        }
        let inv = 1.0 / norm_sq.sqrt();
        for i in 0..n {
            out[(i, j)] *= inv * signs[i];
        }
    }
    Ok(out)
}

/// Splits `cols` into one factor per capacity in `caps`, with each factor no
/// larger than its capacity and the split as balanced as the prime
/// factorization allows. Returns `None` when no such split exists.
pub fn near_uniform_split(cols: usize, caps: &[usize]) -> Option<Vec<usize>> {
    let mut primes = Vec::new();
    let mut rem = cols;
    let mut p = 2;
    while p * p <= rem {
        while rem % p == 0 {
            primes.push(p);
            rem /= p;
        }
        p += 1;
    }
    if rem > 1 {
        primes.push(rem);
    }
    primes.sort_unstable_by(|a, b| b.cmp(a));
    let mut split = vec![1usize; caps.len()];
    for prime in primes {
        // place into the smallest bucket that can still accept the prime
        let mut best: Option<usize> = None;
        for (i, &cap) in caps.iter().enumerate() {
            if split[i] * prime <= cap && best.map_or(true, |b| split[i] < split[b]) {
                best = Some(i);
            }
        }
        split[best?] *= prime;
    }
    Some(split)
}
