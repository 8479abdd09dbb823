//! Quality metrics: relative squared error, slice-averaged PSNR, and
//! slice-averaged SSIM.
//!
//! "Slices" are the 2-D sections obtained by fixing every mode except the
//! first two; the slice means below follow that convention throughout.

use thiserror::Error;

use crate::tensor::DenseTensor;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("shape mismatch: {0:?} vs {1:?}")]
    ShapeMismatch(Vec<usize>, Vec<usize>),
    #[error("reference tensor is zero")]
    ZeroReference,
}

/// The standard quantitative summary of one recovery run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub mpsnr: f64,
    pub mssim: f64,
    pub mrse: f64,
    pub seconds: f64,
}

/// `||x - reference||_F / ||reference||_F`.
pub fn rse(x: &DenseTensor, reference: &DenseTensor) -> Result<f64, MetricsError> {
    if x.shape() != reference.shape() {
        return Err(MetricsError::ShapeMismatch(
            x.shape().to_vec(),
            reference.shape().to_vec(),
        ));
    }
    let denom = reference.frobenius_norm();
    if denom == 0.0 {
        return Err(MetricsError::ZeroReference);
    }
    Ok(x.sub(reference).frobenius_norm() / denom)
}

const PSNR_CAP_DB: f64 = 100.0;

fn slice_dims(shape: &[usize]) -> (usize, usize, usize) {
    let h = shape[0];
    let w = if shape.len() > 1 { shape[1] } else { 1 };
    let slices: usize = shape.iter().skip(2).product();
    (h, w, slices)
}

/// Mean over 2-D slices of `10 log10(peak^2 / MSE)`, capped at 100 dB so an
/// exact slice keeps the mean finite.
pub fn mpsnr(x: &DenseTensor, reference: &DenseTensor, peak: f64) -> Result<f64, MetricsError> {
    if x.shape() != reference.shape() {
        return Err(MetricsError::ShapeMismatch(
            x.shape().to_vec(),
            reference.shape().to_vec(),
        ));
    }
    let (h, w, slices) = slice_dims(x.shape());
    let slice_len = h * w;
    let mut total = 0.0;
    for s in 0..slices {
        let offset = s * slice_len;
        let mse: f64 = (0..slice_len)
            .map(|i| {
                let d = x.data()[offset + i] - reference.data()[offset + i];
                d * d
            })
            .sum::<f64>()
            / slice_len as f64;
        let psnr = if mse == 0.0 {
            PSNR_CAP_DB
        } else {
            (10.0 * (peak * peak / mse).log10()).min(PSNR_CAP_DB)
        };
        total += psnr;
    }
    Ok(total / slices as f64)
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

fn gaussian_window() -> [f64; SSIM_WINDOW * SSIM_WINDOW] {
    let mut w = [0.0; SSIM_WINDOW * SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    let mut sum = 0.0;
    for i in 0..SSIM_WINDOW {
        for j in 0..SSIM_WINDOW {
            let d2 = ((i as f64) - c).powi(2) + ((j as f64) - c).powi(2);
            let v = (-d2 / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
            w[i * SSIM_WINDOW + j] = v;
            sum += v;
        }
    }
    for v in w.iter_mut() {
        *v /= sum;
    }
    w
}

fn ssim_from_stats(mx: f64, my: f64, vx: f64, vy: f64, cov: f64) -> f64 {
    let c1 = (SSIM_K1 * 1.0_f64).powi(2);
    let c2 = (SSIM_K2 * 1.0_f64).powi(2);
    ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
}

/// SSIM of one `h x w` slice stored column-major: mean over all 11x11
/// Gaussian-weighted windows, or global statistics when the slice is smaller
/// than the window.
fn ssim_slice(x: &[f64], y: &[f64], h: usize, w: usize) -> f64 {
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        // global-statistics fallback
        let n = (h * w) as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let mut vx = 0.0;
        let mut vy = 0.0;
        let mut cov = 0.0;
        for i in 0..h * w {
            vx += (x[i] - mx) * (x[i] - mx);
            vy += (y[i] - my) * (y[i] - my);
            cov += (x[i] - mx) * (y[i] - my);
        }
        return ssim_from_stats(mx, my, vx / n, vy / n, cov / n);
    }
    let win = gaussian_window();
    let mut total = 0.0;
    let mut count = 0usize;
    for j0 in 0..=(w - SSIM_WINDOW) {
        for i0 in 0..=(h - SSIM_WINDOW) {
            let mut mx = 0.0;
            let mut my = 0.0;
            for dj in 0..SSIM_WINDOW {
                for di in 0..SSIM_WINDOW {
                    let idx = (i0 + di) + (j0 + dj) * h;
                    let wgt = win[di * SSIM_WINDOW + dj];
                    mx += wgt * x[idx];
                    my += wgt * y[idx];
                }
            }
            let mut vx = 0.0;
            let mut vy = 0.0;
            let mut cov = 0.0;
            for dj in 0..SSIM_WINDOW {
                for di in 0..SSIM_WINDOW {
                    let idx = (i0 + di) + (j0 + dj) * h;
                    let wgt = win[di * SSIM_WINDOW + dj];
                    vx += wgt * (x[idx] - mx) * (x[idx] - mx);
                    vy += wgt * (y[idx] - my) * (y[idx] - my);
                    cov += wgt * (x[idx] - mx) * (y[idx] - my);
                }
            }
            total += ssim_from_stats(mx, my, vx, vy, cov);
            count += 1;
        }
    }
    total / count as f64
}

/// Mean structural similarity over 2-D slices, with an 11x11 Gaussian window
/// (sigma 1.5), K1 = 0.01, K2 = 0.03, dynamic range 1.
pub fn mssim(x: &DenseTensor, reference: &DenseTensor) -> Result<f64, MetricsError> {
    if x.shape() != reference.shape() {
        return Err(MetricsError::ShapeMismatch(
            x.shape().to_vec(),
            reference.shape().to_vec(),
        ));
    }
    let (h, w, slices) = slice_dims(x.shape());
    let slice_len = h * w;
    let mut total = 0.0;
    for s in 0..slices {
        let o = s * slice_len;
        total += ssim_slice(
            &x.data()[o..o + slice_len],
            &reference.data()[o..o + slice_len],
            h,
            w,
        );
    }
    Ok(total / slices as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rse_reference_cases() {
        let r = DenseTensor::random_normal(&[4, 5, 3], 1);
        assert_eq!(rse(&r, &r).unwrap(), 0.0);
        let zero = DenseTensor::zeros(&[4, 5, 3]);
        assert!((rse(&zero, &r).unwrap() - 1.0).abs() < 1e-12);
        let double = r.map(|v| 2.0 * v);
        assert!((rse(&double, &r).unwrap() - 1.0).abs() < 1e-12);
        assert!(rse(&r, &zero).is_err());
        assert!(rse(&zero, &DenseTensor::zeros(&[4, 5, 2])).is_err());
    }

    #[test]
    fn mpsnr_exact_and_offset_slices() {
        let r = DenseTensor::random_uniform(&[16, 16, 2], 0.0, 1.0, 2);
        assert_eq!(mpsnr(&r, &r, 1.0).unwrap(), 100.0);
        // offset one slice by 0.1: MSE 0.01 -> 20 dB; other slice exact -> 100
        let mut x = r.clone();
        for i in 0..256 {
            x.data_mut()[i] += 0.1;
        }
        let got = mpsnr(&x, &r, 1.0).unwrap();
        assert!((got - 60.0).abs() < 1e-9, "got {got}");
    }

    #[test]
    fn mpsnr_matches_independent_formula() {
        let x = DenseTensor::random_uniform(&[12, 10, 3], 0.0, 1.0, 3);
        let y = DenseTensor::random_uniform(&[12, 10, 3], 0.0, 1.0, 4);
        let got = mpsnr(&x, &y, 1.0).unwrap();
        // independent re-implementation over explicit indices
        let mut acc = 0.0;
        for s in 0..3 {
            let mut mse = 0.0;
            for j in 0..10 {
                for i in 0..12 {
                    let d = x.at(&[i, j, s]) - y.at(&[i, j, s]);
                    mse += d * d;
                }
            }
            mse /= 120.0;
            acc += 10.0 * (1.0 / mse).log10();
        }
        assert!((got - acc / 3.0).abs() < 1e-12);
    }

    #[test]
    fn mssim_identity_and_symmetry() {
        let x = DenseTensor::random_uniform(&[24, 24], 0.0, 1.0, 5);
        assert!((mssim(&x, &x).unwrap() - 1.0).abs() < 1e-12);
        let y = DenseTensor::random_uniform(&[24, 24], 0.0, 1.0, 6);
        let a = mssim(&x, &y).unwrap();
        let b = mssim(&y, &x).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn mssim_constant_shift_closed_form() {
        // zero-variance slices: SSIM = (2 m1 m2 + C1) C2 / ((m1^2 + m2^2 + C1) C2)
        let x = DenseTensor::constant(&[16, 16], 0.4);
        let y = DenseTensor::constant(&[16, 16], 0.6);
        let c1 = 0.01f64.powi(2);
        let expect = (2.0 * 0.4 * 0.6 + c1) / (0.4f64.powi(2) + 0.6f64.powi(2) + c1);
        assert!((mssim(&x, &y).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn mssim_inverted_image_scores_low() {
        // smooth natural-image-like slice: sum of low-frequency waves
        let img = DenseTensor::from_fn(&[32, 32], |idx| {
            let (i, j) = (idx[0] as f64 / 32.0, idx[1] as f64 / 32.0);
            0.5 + 0.25 * (2.0 * std::f64::consts::PI * i).sin()
                + 0.2 * (3.0 * std::f64::consts::PI * j).cos()
        });
        let inverted = img.map(|v| 1.0 - v);
        let v = mssim(&inverted, &img).unwrap();
        assert!(v < 0.3, "inverted image SSIM {v}");
    }

    #[test]
    fn mssim_small_slice_fallback() {
        let x = DenseTensor::random_uniform(&[5, 5], 0.0, 1.0, 7);
        assert!((mssim(&x, &x).unwrap() - 1.0).abs() < 1e-12);
        let y = x.map(|v| 1.0 - v);
        assert!(mssim(&x, &y).unwrap() < 1.0);
    }

    #[test]
    fn mpsnr_consistent_with_mse_ordering() {
        let r = DenseTensor::random_uniform(&[16, 16], 0.0, 1.0, 8);
        let near = r.map(|v| v + 0.01);
        let far = r.map(|v| v + 0.1);
        assert!(mpsnr(&near, &r, 1.0).unwrap() > mpsnr(&far, &r, 1.0).unwrap());
    }
}
