//! Observation-model synthesis: sampling masks, impulsive and Gaussian noise,
//! and dithered uniform scalar quantization.
//!
//! The quantizer is `Q_delta(x) = delta * (floor(x / delta) + 1/2)`; adding a
//! uniform dither on `[-delta/2, delta/2]` before quantizing makes the
//! quantized value an unbiased estimate of the input. Every generator is
//! deterministic for a fixed seed, with stage sub-seeds derived from the one
//! seed so stages can be reproduced independently.

use thiserror::Error;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::{derive_seed, rng_from};
use crate::tensor::DenseTensor;

#[derive(Debug, Error)]
pub enum DegradeError {
    #[error("fraction {name} must lie in [0, 1], got {value}")]
    FractionOutOfRange { name: &'static str, value: f64 },
    #[error("sigma must be nonnegative, got {0}")]
    NegativeSigma(f64),
    #[error("quantizer resolution must be positive, got {0}")]
    BadResolution(f64),
    #[error("one-bit quantization and a resolution delta are mutually exclusive")]
    OneBitWithDelta,
}

/// A synthesized set of measurements: which entries were sampled, the measured
/// values (in ascending linear-index order of the mask), and the degradation
/// metadata used to generate them.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    shape: Vec<usize>,
    mask: Vec<bool>,
    values: Vec<f64>,
    /// Quantizer resolution; `None` means unquantized measurements.
    pub delta: Option<f64>,
    /// Sign quantization (one-bit) instead of a uniform quantizer.
    pub one_bit: bool,
    /// Impulsive-noise corruption rate used during generation.
    pub noise_rate: f64,
    /// Gaussian noise level used during generation.
    pub sigma: f64,
}

impl Observation {
    pub fn new(
        shape: Vec<usize>,
        mask: Vec<bool>,
        values: Vec<f64>,
        delta: Option<f64>,
    ) -> Self {
        assert_eq!(mask.len(), shape.iter().product::<usize>());
        assert_eq!(values.len(), mask.iter().filter(|&&b| b).count());
        Self {
            shape,
            mask,
            values,
            delta,
            one_bit: false,
            noise_rate: 0.0,
            sigma: 0.0,
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sample_count(&self) -> usize {
        self.values.len()
    }

    /// Measured values scattered into their positions, zeros elsewhere.
    pub fn observed_tensor(&self) -> DenseTensor {
        let mut out = DenseTensor::zeros(&self.shape);
        let data = out.data_mut();
        let mut next = 0;
        for (i, &m) in self.mask.iter().enumerate() {
            if m {
                data[i] = self.values[next];
                next += 1;
            }
        }
        out
    }
}

/// Uniformly random boolean mask with exactly `round(sr * total)` set entries.
pub fn sample_mask(shape: &[usize], sr: f64, seed: u64) -> Result<Vec<bool>, DegradeError> {
    if !(0.0..=1.0).contains(&sr) {
        return Err(DegradeError::FractionOutOfRange {
            name: "sampling ratio",
            value: sr,
        });
    }
    let total: usize = shape.iter().product();
    let count = (sr * total as f64).round() as usize;
    let mut idx: Vec<usize> = (0..total).collect();
    let mut rng = rng_from(derive_seed(seed, "mask", 0));
    for i in 0..count.min(total.saturating_sub(1)) {
        let j = i + (rng.random::<u64>() as usize) % (total - i);
        idx.swap(i, j);
    }
    let mut mask = vec![false; total];
    for &i in &idx[..count] {
        mask[i] = true;
    }
    Ok(mask)
}

/// Replaces a uniformly chosen fraction `nr` of the entries, half (rounded
/// down) by 0 and the rest by 1. Inputs are expected in `[0, 1]`.
pub fn add_salt_pepper(x: &DenseTensor, nr: f64, seed: u64) -> Result<DenseTensor, DegradeError> {
    if !(0.0..=1.0).contains(&nr) {
        return Err(DegradeError::FractionOutOfRange {
            name: "noise rate",
            value: nr,
        });
    }
    let total = x.len();
    let count = (nr * total as f64).round() as usize;
    let mut idx: Vec<usize> = (0..total).collect();
    let mut rng = rng_from(derive_seed(seed, "salt-pepper", 0));
    for i in 0..count.min(total.saturating_sub(1)) {
        let j = i + (rng.random::<u64>() as usize) % (total - i);
        idx.swap(i, j);
    }
    let mut out = x.clone();
    let data = out.data_mut();
    let pepper = count / 2;
    for (k, &i) in idx[..count].iter().enumerate() {
        data[i] = if k < pepper { 0.0 } else { 1.0 };
    }
    Ok(out)
}

/// Adds i.i.d. `N(0, sigma^2)` noise.
pub fn add_gaussian(x: &DenseTensor, sigma: f64, seed: u64) -> Result<DenseTensor, DegradeError> {
    if sigma < 0.0 {
        return Err(DegradeError::NegativeSigma(sigma));
    }
    let mut rng = rng_from(derive_seed(seed, "gaussian", 0));
    let mut out = x.clone();
    for v in out.data_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *v += sigma * z;
    }
    Ok(out)
}

/// Uniform scalar quantizer applied to the dithered input:
/// `delta * (floor((u + xi) / delta) + 1/2)`. The output is always within
/// `delta / 2` of `u + xi`.
pub fn quantize_dithered(u: f64, delta: f64, xi: f64) -> f64 {
    debug_assert!(delta > 0.0);
    delta * (((u + xi) / delta).floor() + 0.5)
}

/// Synthesizes an observation from ground truth: impulsive corruption at rate
/// `nr`, additive Gaussian noise at level `sigma`, uniform sampling at ratio
/// `sr`, and optionally dithered quantization at resolution `delta` (or sign
/// quantization when `one_bit`, with dither drawn uniformly on
/// `[-1/2, 1/2]`). Dithers are drawn per measurement and not retained.
#[allow(clippy::too_many_arguments)]
pub fn observe(
    truth: &DenseTensor,
    sr: f64,
    nr: f64,
    sigma: f64,
    delta: Option<f64>,
    one_bit: bool,
    seed: u64,
) -> Result<Observation, DegradeError> {
    if one_bit && delta.is_some() {
        return Err(DegradeError::OneBitWithDelta);
    }
    if let Some(d) = delta {
        if d <= 0.0 {
            return Err(DegradeError::BadResolution(d));
        }
    }
    let corrupted = if nr > 0.0 {
        add_salt_pepper(truth, nr, derive_seed(seed, "observe-sp", 0))?
    } else {
        if !(0.0..=1.0).contains(&nr) {
            return Err(DegradeError::FractionOutOfRange {
                name: "noise rate",
                value: nr,
            });
        }
        truth.clone()
    };
    let mask = sample_mask(truth.shape(), sr, derive_seed(seed, "observe-mask", 0))?;
    if sigma < 0.0 {
        return Err(DegradeError::NegativeSigma(sigma));
    }
    let mut gauss = rng_from(derive_seed(seed, "observe-gauss", 0));
    let mut dither = rng_from(derive_seed(seed, "observe-dither", 0));
    let mut values = Vec::with_capacity(mask.iter().filter(|&&b| b).count());
    for (i, &m) in mask.iter().enumerate() {
        if !m {
            continue;
        }
        let eps: f64 = if sigma > 0.0 {
            sigma * gauss.sample::<f64, _>(StandardNormal)
        } else {
            0.0
        };
        let u = corrupted.data()[i] + eps;
        let y = if let Some(d) = delta {
            let xi = (dither.random::<f64>() - 0.5) * d;
            quantize_dithered(u, d, xi)
        } else if one_bit {
            let xi = dither.random::<f64>() - 0.5;
            if u + xi >= 0.0 {
                1.0
            } else {
                -1.0
            }
        } else {
            u
        };
        values.push(y);
    }
    let mut obs = Observation::new(truth.shape().to_vec(), mask, values, delta);
    obs.one_bit = one_bit;
    obs.noise_rate = nr;
    obs.sigma = sigma;
    Ok(obs)
}
