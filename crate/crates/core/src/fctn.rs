//! Fully-connected tensor-network factors and their contraction.
//!
//! An order-N tensor factors into N order-N cores, every pair of which shares
//! a bond of size `R[i][j]`. Factor `k` carries the physical mode `I_k` in
//! slot `k` and the bond to factor `j` in slot `j`, so its extents read
//! `(R[0][k], ..., R[k-1][k], I_k, R[k][k+1], ..., R[k][N-1])`.

use thiserror::Error;

use crate::linalg;
use crate::tensor::{DenseTensor, Permutation, TensorError};

#[derive(Debug, Error)]
pub enum FctnError {
    #[error("need at least 2 factors, got {0}")]
    TooFewFactors(usize),
    #[error("rank matrix must be {n}x{n} and symmetric off the diagonal")]
    BadRankMatrix { n: usize },
    #[error("factor {k} has shape {got:?}, expected {expected:?}")]
    FactorShapeMismatch {
        k: usize,
        got: Vec<usize>,
        expected: Vec<usize>,
    },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// The N factors of a fully-connected tensor network together with the
/// symmetric bond-size matrix (diagonal unused).
#[derive(Debug, Clone)]
pub struct FctnFactors {
    factors: Vec<DenseTensor>,
    rank: Vec<Vec<usize>>,
}

/// Expected extents of factor `k` given physical extents and bond sizes.
fn factor_shape(k: usize, phys: &[usize], rank: &[Vec<usize>]) -> Vec<usize> {
    (0..phys.len())
        .map(|j| {
            if j == k {
                phys[k]
            } else {
                rank[j.min(k)][j.max(k)]
            }
        })
        .collect()
}

impl FctnFactors {
    pub fn new(factors: Vec<DenseTensor>, rank: Vec<Vec<usize>>) -> Result<Self, FctnError> {
        let n = factors.len();
        if n < 2 {
            return Err(FctnError::TooFewFactors(n));
        }
        if rank.len() != n || rank.iter().any(|row| row.len() != n) {
            return Err(FctnError::BadRankMatrix { n });
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && (rank[i][j] != rank[j][i] || rank[i][j] == 0) {
                    return Err(FctnError::BadRankMatrix { n });
                }
            }
        }
        let phys: Vec<usize> = (0..n)
            .map(|k| {
                factors[k]
                    .shape()
                    .get(k)
                    .copied()
                    .unwrap_or(0)
            })
            .collect();
        for (k, f) in factors.iter().enumerate() {
            let expected = factor_shape(k, &phys, &rank);
            if f.shape() != expected.as_slice() {
                return Err(FctnError::FactorShapeMismatch {
                    k,
                    got: f.shape().to_vec(),
                    expected,
                });
            }
        }
        Ok(Self { factors, rank })
    }

    /// Random factors with standard normal entries for the given physical
    /// extents and bond sizes, deterministic per seed.
    pub fn random(
        phys: &[usize],
        rank: Vec<Vec<usize>>,
        seed: u64,
    ) -> Result<Self, FctnError> {
        let n = phys.len();
        let factors = (0..n)
            .map(|k| {
                let shape = factor_shape(k, phys, &rank);
                DenseTensor::random_normal(&shape, crate::rng::derive_seed(seed, "fctn", k as u64))
            })
            .collect();
        Self::new(factors, rank)
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[DenseTensor] {
        &self.factors
    }

    pub fn rank(&self) -> &[Vec<usize>] {
        &self.rank
    }

    /// Physical extents `(I_0, ..., I_{N-1})`.
    pub fn physical_shape(&self) -> Vec<usize> {
        (0..self.order()).map(|k| self.factors[k].shape()[k]).collect()
    }

    /// Factors of the transposed network: position `k` receives factor
    /// `n[k]` with its modes reordered by `n`, and the bond matrix is
    /// reindexed accordingly. Contracting the result equals permuting the
    /// contraction of `self`.
    pub fn permuted(&self, n: &Permutation) -> Result<Self, FctnError> {
        let len = self.order();
        if n.len() != len {
            return Err(FctnError::Tensor(TensorError::InvalidPermutation(
                n.as_slice().to_vec(),
                len,
            )));
        }
        let factors = n
            .as_slice()
            .iter()
            .map(|&k| self.factors[k].permute(n))
            .collect::<Result<Vec<_>, _>>()?;
        let rank = (0..len)
            .map(|i| {
                (0..len)
                    .map(|j| self.rank[n[i]][n[j]])
                    .collect::<Vec<_>>()
            })
            .collect();
        Self::new(factors, rank)
    }

    /// Contracts the network into the full tensor.
    ///
    /// Factors are absorbed left to right: after step `k` the running tensor
    /// carries physical modes `0..=k` and the bonds connecting them to the
    /// factors not yet absorbed. The result is independent of this order and
    /// equals the elementwise sum over all bond indices.
    pub fn contract(&self) -> Result<DenseTensor, FctnError> {
        let n = self.order();
        // axis labels: physical mode p is `p`, bond (i,j) with i<j is `n + i*n + j`
        let bond = |i: usize, j: usize| n + i.min(j) * n + i.max(j);
        let labels_of = |k: usize| -> Vec<usize> {
            (0..n)
                .map(|j| if j == k { k } else { bond(j, k) })
                .collect()
        };
        let mut state = self.factors[0].clone();
        let mut labels = labels_of(0);
        for k in 1..n {
            let fk = &self.factors[k];
            let flabels = labels_of(k);
            let common: Vec<usize> = labels
                .iter()
                .copied()
                .filter(|l| flabels.contains(l))
                .collect();
            let (next, next_labels) =
                contract_pair(&state, &labels, fk, &flabels, &common)?;
            state = next;
            labels = next_labels;
        }
        // remaining labels are exactly the physical modes; sort into 0..n
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&slot| labels[slot]);
        let perm = Permutation::new(order)?;
        Ok(state.permute(&perm)?)
    }
}

/// Contracts two labeled tensors over the axes named in `common`.
fn contract_pair(
    a: &DenseTensor,
    a_labels: &[usize],
    b: &DenseTensor,
    b_labels: &[usize],
    common: &[usize],
) -> Result<(DenseTensor, Vec<usize>), FctnError> {
    let a_free: Vec<usize> = (0..a_labels.len())
        .filter(|&i| !common.contains(&a_labels[i]))
        .collect();
    let a_com: Vec<usize> = common
        .iter()
        .map(|l| a_labels.iter().position(|x| x == l).unwrap())
        .collect();
    let b_com: Vec<usize> = common
        .iter()
        .map(|l| b_labels.iter().position(|x| x == l).unwrap())
        .collect();
    let b_free: Vec<usize> = (0..b_labels.len())
        .filter(|&i| !common.contains(&b_labels[i]))
        .collect();

    let pa = Permutation::new(a_free.iter().chain(a_com.iter()).copied().collect())
        .map_err(FctnError::Tensor)?;
    let pb = Permutation::new(b_com.iter().chain(b_free.iter()).copied().collect())
        .map_err(FctnError::Tensor)?;
    let am = if a_free.is_empty() {
        // contraction consumes every axis of a; treat as a row vector
        let flat = a.permute(&pa)?;
        nalgebra::DMatrix::from_vec(1, flat.len(), flat.into_data())
    } else {
        a.unfold(&pa, a_free.len())?
    };
    let bm = if b_free.is_empty() {
        // contraction consumes every axis of b; treat as a column vector
        let flat = b.permute(&pb)?;
        nalgebra::DMatrix::from_vec(flat.len(), 1, flat.into_data())
    } else {
        b.unfold(&pb, b_com.len())?
    };
    let cm = linalg::mm(&am, &bm);

    let mut shape: Vec<usize> = a_free.iter().map(|&i| a.shape()[i]).collect();
    shape.extend(b_free.iter().map(|&i| b.shape()[i]));
    let mut labels: Vec<usize> = a_free.iter().map(|&i| a_labels[i]).collect();
    labels.extend(b_free.iter().map(|&i| b_labels[i]));
    if shape.is_empty() {
        shape.push(1);
        labels.push(usize::MAX);
    }
    let data = cm.as_slice().to_vec();
    Ok((
        DenseTensor::new(shape.clone(), data).map_err(FctnError::Tensor)?,
        labels,
    ))
}

/// Upper bound on the rank of the `(n, d)` generalized unfolding of a tensor
/// with bond-size matrix `rank`: the product of all bond sizes crossing the
/// split.
pub fn fctn_rank_bound(rank: &[Vec<usize>], n: &Permutation, d: usize) -> usize {
    let len = n.len();
    let mut bound = 1usize;
    for i in 0..d {
        for j in d..len {
            let (a, b) = (n[i], n[j]);
            bound *= rank[a.min(b)][a.max(b)];
        }
    }
    bound
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::singular_values;
    use nalgebra::DMatrix;

    fn rank_matrix(n: usize, vals: &[(usize, usize, usize)]) -> Vec<Vec<usize>> {
        let mut r = vec![vec![1usize; n]; n];
        for &(i, j, v) in vals {
            r[i][j] = v;
            r[j][i] = v;
        }
        r
    }

    /// Direct elementwise evaluation of the contraction for N=3: a brute-force
    /// sum over every bond index combination.
    fn brute_force_n3(f: &FctnFactors) -> DenseTensor {
        let phys = f.physical_shape();
        let r = f.rank();
        let (r01, r02, r12) = (r[0][1], r[0][2], r[1][2]);
        let g = f.factors();
        DenseTensor::from_fn(&phys, |idx| {
            let (i0, i1, i2) = (idx[0], idx[1], idx[2]);
            let mut sum = 0.0;
            for a in 0..r01 {
                for b in 0..r02 {
                    for c in 0..r12 {
                        sum += g[0].at(&[i0, a, b]) * g[1].at(&[a, i1, c]) * g[2].at(&[b, c, i2]);
                    }
                }
            }
            sum
        })
    }

    #[test]
    fn two_factor_network_is_matrix_product() {
        // N=2: factor 0 is I0 x R, factor 1 is R x I1, contraction = G0 * G1
        let r = rank_matrix(2, &[(0, 1, 3)]);
        let f = FctnFactors::random(&[4, 5], r, 42).unwrap();
        let x = f.contract().unwrap();
        let g0 = DMatrix::from_column_slice(4, 3, f.factors()[0].data());
        let g1 = DMatrix::from_column_slice(3, 5, f.factors()[1].data());
        let expect = &g0 * &g1;
        let got = DMatrix::from_column_slice(4, 5, x.data());
        assert!((expect - got).abs().max() < 1e-12);
    }

    #[test]
    fn all_ones_factors_with_unit_bonds_contract_to_ones() {
        let n = 4;
        let r = vec![vec![1usize; n]; n];
        let factors: Vec<DenseTensor> = (0..n)
            .map(|k| DenseTensor::constant(&factor_shape(k, &[2, 3, 2, 2], &r), 1.0))
            .collect();
        let f = FctnFactors::new(factors, r).unwrap();
        let x = f.contract().unwrap();
        assert_eq!(x.shape(), &[2, 3, 2, 2]);
        assert!(x.data().iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn pairwise_contraction_matches_elementwise_sum() {
        let r = rank_matrix(3, &[(0, 1, 2), (0, 2, 2), (1, 2, 2)]);
        let f = FctnFactors::random(&[2, 3, 2], r, 7).unwrap();
        let fast = f.contract().unwrap();
        let slow = brute_force_n3(&f);
        let rel = fast.sub(&slow).frobenius_norm() / slow.frobenius_norm();
        assert!(rel < 1e-12, "rel={rel}");
    }

    #[test]
    fn transpositional_invariance() {
        for (order, seed) in [(3usize, 11u64), (4, 13)] {
            let mut r = vec![vec![1usize; order]; order];
            for i in 0..order {
                for j in i + 1..order {
                    let v = 2 + (i + j) % 2;
                    r[i][j] = v;
                    r[j][i] = v;
                }
            }
            let phys: Vec<usize> = (0..order).map(|k| 2 + k % 2).collect();
            let f = FctnFactors::random(&phys, r, seed).unwrap();
            let x = f.contract().unwrap();
            let perm = if order == 3 {
                Permutation::new(vec![2, 0, 1]).unwrap()
            } else {
                Permutation::new(vec![1, 3, 0, 2]).unwrap()
            };
            let lhs = x.permute(&perm).unwrap();
            let rhs = f.permuted(&perm).unwrap().contract().unwrap();
            let rel = lhs.sub(&rhs).frobenius_norm() / lhs.frobenius_norm();
            assert!(rel < 1e-12, "rel={rel}");
        }
    }

    #[test]
    fn rank_bound_products() {
        let r = rank_matrix(3, &[(0, 1, 2), (0, 2, 3), (1, 2, 4)]);
        let n = Permutation::identity(3);
        assert_eq!(fctn_rank_bound(&r, &n, 1), 6); // R01 * R02
        assert_eq!(fctn_rank_bound(&r, &n, 2), 12); // R02 * R12
        let ones = rank_matrix(3, &[]);
        assert_eq!(fctn_rank_bound(&ones, &n, 1), 1);
    }

    #[test]
    fn unfolding_rank_bounded_by_bond_products() {
        let r = rank_matrix(3, &[(0, 1, 2), (0, 2, 2), (1, 2, 3)]);
        let f = FctnFactors::random(&[5, 6, 4], r.clone(), 23).unwrap();
        let x = f.contract().unwrap();
        for perm in [vec![0, 1, 2], vec![1, 0, 2], vec![2, 0, 1]] {
            let n = Permutation::new(perm).unwrap();
            for d in 1..3 {
                let m = x.unfold(&n, d).unwrap();
                let sv = singular_values(&m);
                let cutoff = sv[0] * 1e-9;
                let numerical_rank = sv.iter().filter(|&&s| s > cutoff).count();
                assert!(numerical_rank <= fctn_rank_bound(&r, &n, d));
            }
        }
    }

    #[test]
    fn rejects_malformed_networks() {
        let r = rank_matrix(3, &[(0, 1, 2), (0, 2, 2), (1, 2, 2)]);
        let mut bad = r.clone();
        bad[0][1] = 3; // asymmetric
        assert!(FctnFactors::random(&[2, 2, 2], bad, 1).is_err());
        let factors = vec![
            DenseTensor::zeros(&[2, 2, 2]),
            DenseTensor::zeros(&[3, 2, 2]), // bond to factor 0 should be 2
            DenseTensor::zeros(&[2, 2, 2]),
        ];
        assert!(FctnFactors::new(factors, r).is_err());
    }
}
