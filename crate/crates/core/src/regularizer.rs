//! Gradient-domain spectral regularizer over balanced unfoldings.
//!
//! For each direction `t` in the prior set, the mode-`t` gradient tensor is
//! unfolded along every balanced split (first half `floor(N/2)` modes) and a
//! nonconvex penalty is summed over the singular values of each unfolding:
//!
//! `(1/gamma) * sum_{t} sum_k alpha_k * sum_i phi(sigma_i(unfold_k(grad_t x)))`

use thiserror::Error;

use crate::linalg::singular_values;
use crate::prox::{penalty_eval, Penalty, ProxError};
use crate::tensor::{DenseTensor, Permutation, TensorError};

#[derive(Debug, Error)]
pub enum RegularizerError {
    #[error("order must be >= 2, got {0}")]
    OrderTooLow(usize),
    #[error("direction set is empty")]
    EmptyDirections,
    #[error("direction {mode} out of range for order {order}")]
    ModeOutOfRange { mode: usize, order: usize },
    #[error("expected {expected} weights for order {order}, got {got}")]
    WeightCount {
        expected: usize,
        order: usize,
        got: usize,
    },
    #[error("weights must be nonnegative and sum to 1, got sum {0}")]
    WeightSum(f64),
    #[error(transparent)]
    Prox(#[from] ProxError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// All balanced unfoldings of an order-`n` tensor: every `floor(n/2)`-subset
/// of the modes as the first half (ascending within each half, lexicographic
/// across subsets). For even `n` exactly one representative of each
/// complementary pair is kept, the one whose first half contains mode 0.
pub fn balanced_unfoldings(n: usize) -> Result<Vec<(Vec<usize>, Vec<usize>)>, RegularizerError> {
    if n < 2 {
        return Err(RegularizerError::OrderTooLow(n));
    }
    let d = n / 2;
    let mut out = Vec::new();
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        let keep = n % 2 == 1 || subset[0] == 0;
        if keep {
            let complement: Vec<usize> = (0..n).filter(|m| !subset.contains(m)).collect();
            out.push((subset.clone(), complement));
        }
        // next lexicographic d-subset of 0..n
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if subset[i] != i + n - d {
                break;
            }
        }
        subset[i] += 1;
        for j in i + 1..d {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Number of balanced unfoldings of an order-`n` tensor.
pub fn balanced_unfolding_count(n: usize) -> Result<usize, RegularizerError> {
    Ok(balanced_unfoldings(n)?.len())
}

/// Direction set, per-unfolding weights, and the spectral penalty.
#[derive(Debug, Clone)]
pub struct GntctvSpec {
    /// Modes along which gradients are penalized (0-based, nonempty).
    pub directions: Vec<usize>,
    /// Nonnegative weights over the balanced unfoldings, summing to 1.
    pub weights: Vec<f64>,
    pub penalty: Penalty,
}

impl GntctvSpec {
    /// All directions, uniform weights.
    pub fn uniform(order: usize, penalty: Penalty) -> Result<Self, RegularizerError> {
        let count = balanced_unfolding_count(order)?;
        Ok(Self {
            directions: (0..order).collect(),
            weights: vec![1.0 / count as f64; count],
            penalty,
        })
    }

    pub fn validate(&self, order: usize) -> Result<(), RegularizerError> {
        if self.directions.is_empty() {
            return Err(RegularizerError::EmptyDirections);
        }
        for &t in &self.directions {
            if t >= order {
                return Err(RegularizerError::ModeOutOfRange { mode: t, order });
            }
        }
        let expected = balanced_unfolding_count(order)?;
        if self.weights.len() != expected {
            return Err(RegularizerError::WeightCount {
                expected,
                order,
                got: self.weights.len(),
            });
        }
        let sum: f64 = self.weights.iter().sum();
        if self.weights.iter().any(|&w| w < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(RegularizerError::WeightSum(sum));
        }
        self.penalty.validate()?;
        Ok(())
    }
}

/// Evaluates the regularizer at `x`.
pub fn gntctv(x: &DenseTensor, spec: &GntctvSpec) -> Result<f64, RegularizerError> {
    let order = x.order();
    spec.validate(order)?;
    let unfoldings = balanced_unfoldings(order)?;
    let d = order / 2;
    let gamma = spec.directions.len() as f64;
    let mut total = 0.0;
    for &t in &spec.directions {
        let grad = x.gradient(t)?;
        for (k, (first, second)) in unfoldings.iter().enumerate() {
            if spec.weights[k] == 0.0 {
                continue;
            }
            let perm: Vec<usize> = first.iter().chain(second.iter()).copied().collect();
            let m = grad.unfold(&Permutation::new(perm)?, d)?;
            let sv = singular_values(&m);
            let spectral: f64 = sv.iter().map(|&s| penalty_eval(&spec.penalty, s)).sum();
            total += spec.weights[k] * spectral;
        }
    }
    Ok(total / gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unfolding_sets_for_small_orders() {
        assert_eq!(
            balanced_unfoldings(2).unwrap(),
            vec![(vec![0], vec![1])]
        );
        assert_eq!(
            balanced_unfoldings(3).unwrap(),
            vec![
                (vec![0], vec![1, 2]),
                (vec![1], vec![0, 2]),
                (vec![2], vec![0, 1]),
            ]
        );
        assert_eq!(
            balanced_unfoldings(4).unwrap(),
            vec![
                (vec![0, 1], vec![2, 3]),
                (vec![0, 2], vec![1, 3]),
                (vec![0, 3], vec![1, 2]),
            ]
        );
        assert!(balanced_unfoldings(1).is_err());
    }

    #[test]
    fn unfolding_counts_match_binomials() {
        // C(n, floor(n/2)), halved for even n
        assert_eq!(balanced_unfolding_count(2).unwrap(), 1);
        assert_eq!(balanced_unfolding_count(3).unwrap(), 3);
        assert_eq!(balanced_unfolding_count(4).unwrap(), 3);
        assert_eq!(balanced_unfolding_count(5).unwrap(), 10);
        assert_eq!(balanced_unfolding_count(6).unwrap(), 10);
    }

    #[test]
    fn zero_and_constant_tensors_have_zero_value() {
        let spec = GntctvSpec::uniform(3, Penalty::L1).unwrap();
        let zero = DenseTensor::zeros(&[4, 5, 3]);
        assert_eq!(gntctv(&zero, &spec).unwrap(), 0.0);
        let constant = DenseTensor::constant(&[4, 5, 3], 0.7);
        assert!(gntctv(&constant, &spec).unwrap() < 1e-12);
    }

    #[test]
    fn matches_composition_oracle() {
        // independently compose gradient -> unfold -> singular values -> sum
        let x = DenseTensor::random_normal(&[4, 5, 3], 31);
        let spec = GntctvSpec::uniform(3, Penalty::L1).unwrap();
        let got = gntctv(&x, &spec).unwrap();
        let mut expect = 0.0;
        for t in 0..3 {
            let g = x.gradient(t).unwrap();
            for (first, second) in balanced_unfoldings(3).unwrap() {
                let perm: Vec<usize> = first.iter().chain(second.iter()).copied().collect();
                let m = g.unfold(&Permutation::new(perm).unwrap(), 1).unwrap();
                let nuclear: f64 = singular_values(&m).iter().sum();
                expect += nuclear / 3.0;
            }
        }
        expect /= 3.0;
        assert!((got - expect).abs() / expect < 1e-10);
    }

    #[test]
    fn l1_penalty_absolutely_homogeneous() {
        let x = DenseTensor::random_normal(&[3, 4, 3], 37);
        let spec = GntctvSpec::uniform(3, Penalty::L1).unwrap();
        let base = gntctv(&x, &spec).unwrap();
        for c in [0.5, -2.0] {
            let scaled = gntctv(&x.map(|v| c * v), &spec).unwrap();
            assert!((scaled - c.abs() * base).abs() / base < 1e-10);
        }
    }

    #[test]
    fn invariant_under_mode_permutation() {
        let x = DenseTensor::random_normal(&[3, 4, 5], 41);
        let spec = GntctvSpec::uniform(3, Penalty::L1).unwrap();
        let base = gntctv(&x, &spec).unwrap();
        for perm in [vec![1, 2, 0], vec![2, 1, 0], vec![0, 2, 1]] {
            let y = x.permute(&Permutation::new(perm).unwrap()).unwrap();
            let v = gntctv(&y, &spec).unwrap();
            assert!((v - base).abs() / base < 1e-10);
        }
    }

    #[test]
    fn nonnegative_and_zero_only_for_vanishing_gradients() {
        let x = DenseTensor::random_normal(&[3, 3, 3], 43);
        let spec = GntctvSpec::uniform(3, Penalty::Scad { a: 3.7 }).unwrap();
        assert!(gntctv(&x, &spec).unwrap() > 0.0);
    }

    #[test]
    fn validation_errors() {
        let spec = GntctvSpec {
            directions: vec![],
            weights: vec![1.0],
            penalty: Penalty::L1,
        };
        assert!(matches!(
            spec.validate(3),
            Err(RegularizerError::EmptyDirections)
        ));
        let spec = GntctvSpec {
            directions: vec![0, 5],
            weights: vec![1.0 / 3.0; 3],
            penalty: Penalty::L1,
        };
        assert!(matches!(
            spec.validate(3),
            Err(RegularizerError::ModeOutOfRange { .. })
        ));
        let spec = GntctvSpec {
            directions: vec![0],
            weights: vec![0.5, 0.4, 0.2],
            penalty: Penalty::L1,
        };
        assert!(matches!(spec.validate(3), Err(RegularizerError::WeightSum(_))));
    }
}
