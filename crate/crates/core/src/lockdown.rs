//! Lockdown policies as graphon modifications on a fixed grid, with the
//! degree-based bounds on R0
//! `d_W / |gamma/(beta theta)|_1 <= R0 <= |beta theta/gamma|_inf sup deg_W`.

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{GraphonForm, KernelSpec};
use crate::linalg::Matrix;
use crate::spectral::r0;

const LOCKDOWN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LockdownReport {
    pub perfect: bool,
    pub partial: bool,
    pub constant_c: f64,
    pub sup_degree_after: f64,
    pub mean_degree_before: f64,
    pub r0_before: f64,
    pub r0_after: f64,
    /// Bounds on `r0_after`.
    pub lower_bound: f64,
    pub upper_bound: f64,
}

/// `W_after <= W_before` entrywise.
pub fn is_perfect_lockdown(after: &Matrix, before: &Matrix) -> Result<bool> {
    if after.rows() != before.rows() || after.cols() != before.cols() {
        return Err(Error::DimensionMismatch {
            expected: before.rows() * before.cols(),
            got: after.rows() * after.cols(),
        });
    }
    Ok(after
        .as_slice()
        .iter()
        .zip(before.as_slice())
        .all(|(a, b)| *a <= b + LOCKDOWN_TOL))
}

/// Weighted norms of `beta theta / gamma` over positive-mass atoms, with the
/// weights normalized to a probability. `l1_inverse` is undefined when
/// `beta theta` vanishes at a positive-mass atom.
struct RateNorms {
    sup_ratio: f64,
    l1_inverse: Option<f64>,
    degenerate_atom: Option<usize>,
}

impl RateNorms {
    fn l1_inverse(&self) -> Result<f64> {
        match (self.l1_inverse, self.degenerate_atom) {
            (Some(v), _) => Ok(v),
            (None, index) => Err(Error::UndefinedConstant {
                index: index.unwrap_or(0),
            }),
        }
    }
}

fn normalized(form: &GraphonForm) -> GraphonForm {
    let total: f64 = form.weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        warn!("graphon weights have total mass {total}; rescaling to 1");
    }
    GraphonForm {
        weights: form.probability_weights(),
        ..form.clone()
    }
}

fn rate_norms(form: &GraphonForm) -> RateNorms {
    let mut sup_ratio: f64 = 0.0;
    let mut l1_inverse = 0.0;
    let mut degenerate_atom = None;
    for i in 0..form.len() {
        let mu = form.weights[i];
        if mu <= 0.0 {
            continue;
        }
        let bt = form.beta[i] * form.theta[i];
        sup_ratio = sup_ratio.max(bt / form.gamma[i]);
        if bt <= 0.0 {
            degenerate_atom.get_or_insert(i);
        } else {
            l1_inverse += mu * form.gamma[i] / bt;
        }
    }
    RateNorms {
        sup_ratio,
        l1_inverse: degenerate_atom.is_none().then_some(l1_inverse),
        degenerate_atom,
    }
}

fn sup_degree(form: &GraphonForm, degrees: &[f64]) -> f64 {
    degrees
        .iter()
        .zip(&form.weights)
        .filter(|(_, mu)| **mu > 0.0)
        .map(|(d, _)| *d)
        .fold(0.0, f64::max)
}

/// Lower and upper degree bounds on R0 of a graphon-form kernel.
pub fn r0_bounds(spec: &KernelSpec) -> Result<(f64, f64)> {
    let form = normalized(&spec.graphon_form()?);
    let norms = rate_norms(&form);
    let deg = form.degrees();
    Ok((
        deg.mean_degree / norms.l1_inverse()?,
        norms.sup_ratio * sup_degree(&form, &deg.degrees),
    ))
}

/// R0 of a graphon-form kernel with weights normalized to total mass one.
pub fn graphon_r0(form: &GraphonForm) -> Result<f64> {
    r0(&normalized(form).to_model()?)
}

/// Compares a lockdown graphon against the original one. Both specs must
/// share the grid and the rates `beta`, `theta`, `gamma`.
pub fn partial_lockdown_check(after: &KernelSpec, before: &KernelSpec) -> Result<LockdownReport> {
    let before = normalized(&before.graphon_form()?);
    let after = normalized(&after.graphon_form()?);
    if after.len() != before.len() {
        return Err(Error::DimensionMismatch {
            expected: before.len(),
            got: after.len(),
        });
    }
    if after.weights != before.weights
        || after.beta != before.beta
        || after.theta != before.theta
        || after.gamma != before.gamma
    {
        return Err(Error::InvalidValue(
            "lockdown must keep the grid and the rates beta, theta, gamma".into(),
        ));
    }
    lockdown_report(&before, &after.w)
}

/// Report for replacing the graphon of `before` by `w_after`.
pub fn lockdown_report(before: &GraphonForm, w_after: &Matrix) -> Result<LockdownReport> {
    let summary = lockdown_summary(before, w_after)?;
    let undefined = || Error::UndefinedConstant {
        index: summary.degenerate_atom.unwrap_or(0),
    };
    Ok(LockdownReport {
        perfect: summary.perfect,
        partial: summary.partial.ok_or_else(undefined)?,
        constant_c: summary.constant_c.ok_or_else(undefined)?,
        sup_degree_after: summary.sup_degree_after,
        mean_degree_before: summary.mean_degree_before,
        r0_before: summary.r0_before,
        r0_after: summary.r0_after,
        lower_bound: summary.lower_bound.ok_or_else(undefined)?,
        upper_bound: summary.upper_bound,
    })
}

/// Like [`LockdownReport`], but the quantities that need `beta theta > 0`
/// on every positive-mass atom are `None` when that fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LockdownSummary {
    pub perfect: bool,
    pub partial: Option<bool>,
    pub constant_c: Option<f64>,
    pub sup_degree_after: f64,
    pub mean_degree_before: f64,
    pub r0_before: f64,
    pub r0_after: f64,
    pub lower_bound: Option<f64>,
    pub upper_bound: f64,
    /// First positive-mass atom where `beta theta = 0`.
    pub degenerate_atom: Option<usize>,
}

pub fn lockdown_summary(before: &GraphonForm, w_after: &Matrix) -> Result<LockdownSummary> {
    let before = normalized(before);
    let after = before.with_graphon(w_after.clone())?;
    let norms = rate_norms(&before);
    let constant_c = norms.l1_inverse.map(|l1| 1.0 / (norms.sup_ratio * l1));
    let deg_after = after.degrees();
    let sup_degree_after = sup_degree(&after, &deg_after.degrees);
    let mean_degree_before = before.degrees().mean_degree;
    Ok(LockdownSummary {
        perfect: is_perfect_lockdown(&after.w, &before.w)?,
        partial: constant_c.map(|c| sup_degree_after <= c * mean_degree_before + LOCKDOWN_TOL),
        constant_c,
        sup_degree_after,
        mean_degree_before,
        r0_before: r0(&before.to_model()?)?,
        r0_after: r0(&after.to_model()?)?,
        lower_bound: norms.l1_inverse.map(|l1| deg_after.mean_degree / l1),
        upper_bound: norms.sup_ratio * sup_degree_after,
        degenerate_atom: norms.degenerate_atom,
    })
}
