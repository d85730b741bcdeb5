//! SIS dynamics on a kernel model: the vector field
//! `F(g) = (1 - g) T_kappa(g) - gamma g`, its semiflow on the unit box,
//! equilibria and closed-form reference solutions.

mod closed_form;
mod equilibrium;
mod integrate;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelModel;

pub use closed_form::{
    counterexample_equilibria, counterexample_sequence, one_group_closed_form,
    CounterexampleReport,
};
pub use equilibrium::{
    classify_regime, classify_regime_with, maximal_equilibrium, maximal_equilibrium_with,
    EquilibriumConfig, EquilibriumMethod, EquilibriumReport, Regime, RegimeDiagnostics,
    REGIME_TOL,
};
pub use integrate::{default_dt, integrate, integrate_with, Trajectory};

/// Slack allowed when checking membership in the unit box.
pub const BOX_TOL: f64 = 1e-9;

/// Infection probabilities per atom, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::OutsideUnitBox {
                index,
                value: values[index],
            });
        }
        Ok(StateVector(values))
    }

    /// Clamps into `[0, 1]` after checking the violation is within [`BOX_TOL`].
    pub fn new_clamped(mut values: Vec<f64>) -> Result<Self> {
        check_box(&values)?;
        for v in &mut values {
            *v = v.clamp(0.0, 1.0);
        }
        Ok(StateVector(values))
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        StateVector::new(vec![value; n])
    }

    pub fn zeros(n: usize) -> Self {
        StateVector(vec![0.0; n])
    }

    pub fn ones(n: usize) -> Self {
        StateVector(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn sup(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for StateVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        StateVector::new(values)
    }
}

impl From<StateVector> for Vec<f64> {
    fn from(s: StateVector) -> Self {
        s.0
    }
}

impl AsRef<[f64]> for StateVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

fn check_box(g: &[f64]) -> Result<()> {
    match g
        .iter()
        .position(|v| !(*v >= -BOX_TOL && *v <= 1.0 + BOX_TOL))
    {
        Some(index) => Err(Error::OutsideUnitBox {
            index,
            value: g[index],
        }),
        None => Ok(()),
    }
}

/// `F(g)_i = (1 - g_i) sum_j kappa[i][j] g_j - gamma_i g_i`.
pub fn vector_field(model: &KernelModel, g: &[f64]) -> Result<Vec<f64>> {
    if g.len() != model.len() {
        return Err(Error::DimensionMismatch {
            expected: model.len(),
            got: g.len(),
        });
    }
    check_box(g)?;
    let mut out = vec![0.0; g.len()];
    field_into(model, g, &mut out);
    Ok(out)
}

pub(crate) fn field_into(model: &KernelModel, g: &[f64], out: &mut [f64]) {
    model.kappa().mul_vec_into(g, out);
    for ((o, gi), gamma) in out.iter_mut().zip(g).zip(model.gamma()) {
        *o = (1.0 - gi) * *o - gamma * gi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use approx::assert_relative_eq;

    fn model(rows: Vec<Vec<f64>>, gamma: Vec<f64>) -> KernelModel {
        KernelModel::from_matrix(Matrix::from_rows(rows).unwrap(), gamma).unwrap()
    }

    #[test]
    fn field_at_corners() {
        let m = model(vec![vec![1.0, 2.0], vec![3.0, 1.0]], vec![0.5, 2.0]);
        assert_eq!(vector_field(&m, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(vector_field(&m, &[1.0, 1.0]).unwrap(), vec![-0.5, -2.0]);
    }

    #[test]
    fn field_one_group() {
        let m = model(vec![vec![2.0]], vec![1.0]);
        assert_relative_eq!(vector_field(&m, &[0.25]).unwrap()[0], 0.125);
    }

    #[test]
    fn field_rejects_states_outside_box() {
        let m = model(vec![vec![2.0]], vec![1.0]);
        assert!(vector_field(&m, &[1.1]).is_err());
        assert!(vector_field(&m, &[-1e-6]).is_err());
        assert!(vector_field(&m, &[1.0 + 1e-12]).is_ok());
        assert!(vector_field(&m, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn state_vector_validation() {
        assert!(StateVector::new(vec![0.0, 1.0, 0.5]).is_ok());
        assert!(StateVector::new(vec![1.5]).is_err());
        assert!(StateVector::new(vec![f64::NAN]).is_err());
        let s = StateVector::new_clamped(vec![-1e-12, 1.0 + 1e-12]).unwrap();
        assert_eq!(s.as_slice(), &[0.0, 1.0]);
        assert!(StateVector::new_clamped(vec![-1e-3]).is_err());
    }
}
