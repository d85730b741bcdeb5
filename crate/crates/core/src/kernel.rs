//! Discretized feature spaces and transmission kernels.
//!
//! A [`KernelModel`] stores the kernel as the matrix `kappa[i][j]`, the rate
//! at which atom `j` as a whole infects atom `i`. The density with respect
//! to the atom weights, `kappa[i][j] / mu_j`, is only defined on
//! positive-mass columns; the spectral code always works with `kappa`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::support;

/// Weighted finite set of feature atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSpace {
    labels: Vec<String>,
    weights: Vec<f64>,
}

impl DiscreteSpace {
    pub fn new(labels: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidValue("space must have at least one atom".into()));
        }
        if labels.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                got: labels.len(),
            });
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::InvalidValue(format!("weight {index} is not finite")));
            }
            if value < 0.0 {
                return Err(Error::NegativeWeight { index, value });
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidValue("total mass must be positive".into()));
        }
        Ok(DiscreteSpace { labels, weights })
    }

    /// Atoms labelled `0..n` with the given weights.
    pub fn with_weights(weights: Vec<f64>) -> Result<Self> {
        let labels = (0..weights.len()).map(|i| i.to_string()).collect();
        DiscreteSpace::new(labels, weights)
    }

    /// `n` atoms of mass `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        DiscreteSpace::with_weights(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weights rescaled to total mass one.
    pub fn probability_weights(&self) -> Vec<f64> {
        let total = self.total_mass();
        self.weights.iter().map(|w| w / total).collect()
    }

    pub fn positive_mass_atoms(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.weights[i] > 0.0).collect()
    }

    /// Mass-weighted mean `sum u_i mu_i / sum mu_i`.
    pub fn mean(&self, u: &[f64]) -> f64 {
        let total = self.total_mass();
        u.iter().zip(&self.weights).map(|(a, w)| a * w).sum::<f64>() / total
    }
}

/// Transmission kernel together with recovery rates on a discrete space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelModel {
    space: DiscreteSpace,
    kappa: Matrix,
    gamma: Vec<f64>,
}

/// Summary produced by [`KernelModel::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub sup_row_sum: f64,
    pub zero_mass_atoms: Vec<usize>,
}

impl KernelModel {
    pub fn new(space: DiscreteSpace, kappa: Matrix, gamma: Vec<f64>) -> Result<Self> {
        let model = KernelModel { space, kappa, gamma };
        model.validate()?;
        Ok(model)
    }

    /// Kernel with uniform unit-total weights.
    pub fn from_matrix(kappa: Matrix, gamma: Vec<f64>) -> Result<Self> {
        let space = DiscreteSpace::uniform(kappa.rows())?;
        KernelModel::new(space, kappa, gamma)
    }

    /// Checks the structural assumptions on the model.
    pub fn validate(&self) -> Result<ValidationReport> {
        let n = self.space.len();
        if !self.kappa.is_square() {
            return Err(Error::NotSquare {
                rows: self.kappa.rows(),
                cols: self.kappa.cols(),
            });
        }
        if self.kappa.rows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.kappa.rows(),
            });
        }
        if self.gamma.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.gamma.len(),
            });
        }
        for (index, &value) in self.gamma.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveRecovery { index, value });
            }
        }
        for (row, col, value) in self.kappa.iter_entries() {
            if !value.is_finite() {
                return Err(Error::InvalidValue(format!(
                    "transmission rate ({row}, {col}) is not finite"
                )));
            }
            if value < 0.0 {
                return Err(Error::NegativeRate { row, col, value });
            }
        }
        Ok(ValidationReport {
            gamma_min: self.gamma.iter().copied().fold(f64::INFINITY, f64::min),
            gamma_max: self.gamma.iter().copied().fold(0.0, f64::max),
            sup_row_sum: self.kappa.norm_inf(),
            zero_mass_atoms: (0..n).filter(|&i| self.space.weights()[i] == 0.0).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn space(&self) -> &DiscreteSpace {
        &self.space
    }

    pub fn kappa(&self) -> &Matrix {
        &self.kappa
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn gamma_sup(&self) -> f64 {
        self.gamma.iter().copied().fold(0.0, f64::max)
    }

    pub fn gamma_min(&self) -> f64 {
        self.gamma.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Density `kappa[i][j] / mu_j`, or `None` on a zero-mass column.
    pub fn density(&self, i: usize, j: usize) -> Option<f64> {
        let mass = self.space.weights()[j];
        (mass > 0.0).then(|| self.kappa[(i, j)] / mass)
    }

    /// Next-generation matrix `kappa[i][j] / gamma_j`.
    pub fn next_generation(&self) -> Matrix {
        let inv: Vec<f64> = self.gamma.iter().map(|g| 1.0 / g).collect();
        self.kappa.scale_rows_cols(None, Some(&inv))
    }

    /// Same space and recovery rates, new kernel.
    pub fn with_kappa(&self, kappa: Matrix) -> Result<Self> {
        KernelModel::new(self.space.clone(), kappa, self.gamma.clone())
    }

    /// Applies the transmission operator: `(T g)_i = sum_j kappa[i][j] g_j`.
    pub fn apply_t(&self, g: &[f64]) -> Result<Vec<f64>> {
        if g.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: g.len(),
            });
        }
        Ok(self.kappa.mul_vec(g))
    }

    /// Connectivity of the kernel: the support graph restricted to
    /// positive-mass atoms is strongly connected.
    pub fn is_connected(&self) -> bool {
        let nodes = self.space.positive_mass_atoms();
        support::strongly_connected_components(&self.kappa, &nodes).len() <= 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two(k: [[f64; 2]; 2], gamma: [f64; 2]) -> Result<KernelModel> {
        KernelModel::from_matrix(
            Matrix::from_rows(k.iter().map(|r| r.to_vec()).collect()).unwrap(),
            gamma.to_vec(),
        )
    }

    #[test]
    fn validation_passes_on_valid_model() {
        let m = two_by_two([[1.0, 2.0], [3.0, 1.0]], [1.0, 1.0]).unwrap();
        let report = m.validate().unwrap();
        assert_eq!(report.gamma_min, 1.0);
        assert_eq!(report.gamma_max, 1.0);
        assert_eq!(report.sup_row_sum, 4.0);
        assert!(report.zero_mass_atoms.is_empty());
    }

    #[test]
    fn zero_recovery_rejected() {
        let err = two_by_two([[1.0, 2.0], [3.0, 1.0]], [1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveRecovery { index: 1, .. }));
        assert!(err.to_string().contains("recovery rate not positive"));
    }

    #[test]
    fn negative_rate_rejected() {
        let err = two_by_two([[1.0, -0.1], [3.0, 1.0]], [1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NegativeRate { row: 0, col: 1, .. }));
        assert!(err.to_string().contains("negative transmission rate"));
    }

    #[test]
    fn negative_weight_rejected() {
        assert!(matches!(
            DiscreteSpace::with_weights(vec![0.5, -0.5, 1.0]),
            Err(Error::NegativeWeight { index: 1, .. })
        ));
        assert!(DiscreteSpace::with_weights(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn zero_mass_atoms_are_flagged() {
        let space = DiscreteSpace::with_weights(vec![0.5, 0.0, 0.5]).unwrap();
        let m = KernelModel::new(space, Matrix::from_fn(3, 3, |_, _| 1.0), vec![1.0; 3]).unwrap();
        assert_eq!(m.validate().unwrap().zero_mass_atoms, vec![1]);
        assert_eq!(m.density(0, 1), None);
        assert_eq!(m.density(0, 0), Some(2.0));
    }

    #[test]
    fn apply_t_checks_dimension() {
        let m = two_by_two([[1.0, 2.0], [3.0, 1.0]], [1.0, 1.0]).unwrap();
        assert_eq!(m.apply_t(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(m.apply_t(&[1.0, 1.0]).unwrap(), vec![3.0, 4.0]);
        assert!(m.apply_t(&[1.0]).is_err());
    }

    #[test]
    fn connectivity() {
        assert!(two_by_two([[1.0, 2.0], [3.0, 1.0]], [1.0, 1.0])
            .unwrap()
            .is_connected());
        assert!(!two_by_two([[1.0, 0.0], [0.0, 1.0]], [1.0, 1.0])
            .unwrap()
            .is_connected());
        // One-way coupling is not enough.
        assert!(!two_by_two([[1.0, 1.0], [0.0, 1.0]], [1.0, 1.0])
            .unwrap()
            .is_connected());
    }

    #[test]
    fn zero_mass_atoms_ignored_for_connectivity() {
        // Atom 1 has no mass; atoms 0 and 2 are linked in both directions.
        let space = DiscreteSpace::with_weights(vec![0.5, 0.0, 0.5]).unwrap();
        let kappa = Matrix::from_rows(vec![
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        let m = KernelModel::new(space, kappa, vec![1.0; 3]).unwrap();
        assert!(m.is_connected());
    }
}
