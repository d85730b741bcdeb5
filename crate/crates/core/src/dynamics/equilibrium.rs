use log::warn;
use serde::Serialize;

use super::{field_into, StateVector};
use crate::error::Result;
use crate::kernel::KernelModel;
use crate::linalg::sup_norm;
use crate::spectral::{r0_with, spectral_bound_with, SpectralConfig};

/// Width of the band around `s = 0` classified as critical.
pub const REGIME_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeDiagnostics {
    pub regime: Regime,
    pub r0: f64,
    pub spectral_bound: f64,
    /// Uniqueness of the endemic state needs a connected kernel.
    pub connected: bool,
}

pub fn classify_regime(model: &KernelModel) -> Result<RegimeDiagnostics> {
    classify_regime_with(model, &SpectralConfig::default(), REGIME_TOL)
}

pub fn classify_regime_with(
    model: &KernelModel,
    cfg: &SpectralConfig,
    tol: f64,
) -> Result<RegimeDiagnostics> {
    let s = spectral_bound_with(model, cfg)?;
    let regime = if s > tol {
        Regime::Supercritical
    } else if s < -tol {
        Regime::Subcritical
    } else {
        Regime::Critical
    };
    Ok(RegimeDiagnostics {
        regime,
        r0: r0_with(model, cfg)?,
        spectral_bound: s,
        connected: model.is_connected(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumMethod {
    FixedPoint,
    LongTimeIntegration,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumConfig {
    pub step_tol: f64,
    pub max_iter: usize,
    pub residual_tol: f64,
    pub spectral: SpectralConfig,
    pub regime_tol: f64,
}

impl Default for EquilibriumConfig {
    fn default() -> Self {
        EquilibriumConfig {
            step_tol: 1e-12,
            max_iter: 1_000_000,
            residual_tol: 1e-10,
            spectral: SpectralConfig::default(),
            regime_tol: REGIME_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub g_star: StateVector,
    /// `|F(g*)|_inf`
    pub residual: f64,
    pub method: EquilibriumMethod,
    pub regime: Regime,
    pub r0: f64,
    pub spectral_bound: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn maximal_equilibrium(model: &KernelModel) -> Result<EquilibriumReport> {
    maximal_equilibrium_with(model, &EquilibriumConfig::default())
}

/// Maximal equilibrium by the monotone iteration
/// `g <- T(g) / (gamma + T(g))` started from `g = 1`.
///
/// The map is order preserving and sends 1 below 1, so the iterates
/// decrease to the largest fixed point. Fixed points are exactly the zeros
/// of the field since `F(g) = (gamma + T g)(Phi(g) - g)`.
pub fn maximal_equilibrium_with(
    model: &KernelModel,
    cfg: &EquilibriumConfig,
) -> Result<EquilibriumReport> {
    let diagnostics = classify_regime_with(model, &cfg.spectral, cfg.regime_tol)?;
    let n = model.len();
    let gamma = model.gamma();
    let mut g = vec![1.0; n];
    let mut tg = vec![0.0; n];
    let mut iterations = 0;
    let mut step = f64::INFINITY;
    while iterations < cfg.max_iter {
        iterations += 1;
        model.kappa().mul_vec_into(&g, &mut tg);
        step = 0.0;
        for ((gi, t), c) in g.iter_mut().zip(&tg).zip(gamma) {
            let next = t / (c + t);
            step = step.max((next - *gi).abs());
            *gi = next;
        }
        if step < cfg.step_tol {
            break;
        }
    }
    let mut field = vec![0.0; n];
    field_into(model, &g, &mut field);
    let residual = sup_norm(&field);
    let converged = residual <= cfg.residual_tol;
    if !converged {
        warn!(
            "maximal equilibrium not converged: residual {residual:e} after {iterations} iterations (last step {step:e}, s = {:e})",
            diagnostics.spectral_bound
        );
    }
    Ok(EquilibriumReport {
        g_star: StateVector(g),
        residual,
        method: EquilibriumMethod::FixedPoint,
        regime: diagnostics.regime,
        r0: diagnostics.r0,
        spectral_bound: diagnostics.spectral_bound,
        iterations,
        converged,
    })
}
