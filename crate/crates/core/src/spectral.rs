//! Spectral radius of non-negative matrices, the basic reproduction number,
//! the spectral bound of the linearized field and Perron vectors.
//!
//! The radius is computed by shifted power iteration started from the
//! all-ones vector. For `x > 0` the Collatz–Wielandt ratios
//! `min_i (Ax)_i / x_i <= r(A) <= max_i (Ax)_i / x_i` bracket the radius, and
//! the iteration stops once that bracket is narrow enough, so every
//! converged result carries its own certificate.
//!
//! Reducible matrices are split into strongly connected components of the
//! support graph. The radius is the largest block radius; the Perron vector
//! is supported on a dominant block and the atoms that can reach it.

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::chain_rate;
use crate::kernel::KernelModel;
use crate::linalg::{dot, sup_norm, Matrix};
use crate::support;

/// Tolerances for the power iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConfig {
    /// Stop when the bracket width is below `rel_tol * max(1, radius)`.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            rel_tol: 1e-10,
            max_iter: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResult {
    pub radius: f64,
    /// Non-negative, sup-norm one.
    pub right_vector: Vec<f64>,
    /// Non-negative, normalized so that `<left, right> = 1`.
    pub left_vector: Option<Vec<f64>>,
    pub cw_lower: f64,
    pub cw_upper: f64,
    pub iterations: usize,
    pub certified: bool,
}

/// `lambda` and `w` with `(1 - eps) T_k(w) = (gamma + lambda) w`, `|w| = eps / 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdEigenpair {
    pub epsilon: f64,
    pub lambda: f64,
    pub w: Vec<f64>,
    pub residual: f64,
}

struct PowerOutcome {
    radius: f64,
    vector: Vec<f64>,
    lower: f64,
    upper: f64,
    iterations: usize,
    converged: bool,
}

/// Collatz–Wielandt ratios `(min_i, max_i)` of `(Ax)_i / x_i` at a positive `x`.
pub fn collatz_wielandt_bounds(a: &Matrix, x: &[f64]) -> (f64, f64) {
    let y = a.mul_vec(x);
    y.iter()
        .zip(x)
        .map(|(yi, xi)| yi / xi)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r), hi.max(r))
        })
}

fn power_iterate(a: &Matrix, cfg: &SpectralConfig) -> PowerOutcome {
    let n = a.rows();
    if n == 1 {
        let r = a[(0, 0)];
        return PowerOutcome {
            radius: r,
            vector: vec![1.0],
            lower: r,
            upper: r,
            iterations: 0,
            converged: true,
        };
    }
    // A + shift*I is primitive whenever A is irreducible; its spectrum is
    // that of A translated by the shift.
    let shift = 1e-3 * (1.0 + a.max_entry());
    let mut x = vec![1.0; n];
    let mut y = vec![0.0; n];
    let (mut lower, mut upper) = (0.0, f64::INFINITY);
    let mut iterations = 0;
    let mut converged = false;
    // Once the tolerance is met, keep iterating toward rounding level while
    // the bracket still shrinks.
    let mut polish_left = 0usize;
    let mut stalled = 0;
    while iterations < cfg.max_iter {
        iterations += 1;
        a.mul_vec_into(&x, &mut y);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += shift * xi;
            let ratio = *yi / xi;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        let scale = y.iter().copied().fold(0.0, f64::max);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / scale;
        }
        let width = upper - lower;
        lower = (lo - shift).max(0.0);
        upper = hi - shift;
        let mid = 0.5 * (lower + upper);
        if converged {
            stalled = if upper - lower < width { 0 } else { stalled + 1 };
            polish_left -= 1;
            if polish_left == 0 || stalled >= 3 || upper - lower <= 8.0 * f64::EPSILON * mid {
                break;
            }
        } else if upper - lower <= cfg.rel_tol * mid.max(1.0) {
            converged = true;
            polish_left = iterations.max(8);
        }
    }
    PowerOutcome {
        radius: 0.5 * (lower + upper),
        vector: x,
        lower,
        upper,
        iterations,
        converged,
    }
}

/// Gelfand's formula `|A^(2^k)|^(1/2^k)` by repeated squaring with
/// rescaling. Converges from above; used when power iteration stalls.
pub fn gelfand_radius(a: &Matrix) -> f64 {
    let norm = a.norm_inf();
    if norm == 0.0 {
        return 0.0;
    }
    let mut b = a.map(|v| v / norm);
    let mut log_scale = norm.ln();
    let mut exponent = 1.0_f64;
    let mut estimate = norm;
    for _ in 0..64 {
        b = b.matmul(&b);
        let s = b.norm_inf();
        if s == 0.0 {
            return 0.0;
        }
        b = b.map(|v| v / s);
        log_scale = 2.0 * log_scale + s.ln();
        exponent *= 2.0;
        let next = (log_scale / exponent).exp();
        let done = (next - estimate).abs() <= 1e-15 * next;
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}

fn check_nonnegative_square(a: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.rows() == 0 {
        return Err(Error::InvalidValue("empty matrix".into()));
    }
    if let Some((row, col, value)) = a.iter_entries().find(|(_, _, v)| !(*v >= 0.0) || !v.is_finite())
    {
        return Err(Error::NegativeRate { row, col, value });
    }
    Ok(())
}

/// Spectral radius of a non-negative square matrix with default tolerances.
pub fn spectral_radius(a: &Matrix) -> Result<SpectralResult> {
    spectral_radius_with(a, &SpectralConfig::default())
}

pub fn spectral_radius_with(a: &Matrix, cfg: &SpectralConfig) -> Result<SpectralResult> {
    check_nonnegative_square(a)?;
    let n = a.rows();
    let all: Vec<usize> = (0..n).collect();
    let components = support::strongly_connected_components(a, &all);

    if components.len() == 1 {
        let out = power_iterate(a, cfg);
        return Ok(finish(a, out, 0));
    }

    // Reducible: radius is the largest block radius.
    let mut block_iters = 0;
    let mut block_ok = true;
    let radii: Vec<f64> = components
        .iter()
        .map(|comp| {
            let out = power_iterate(&a.submatrix(comp), cfg);
            block_iters += out.iterations;
            if !out.converged {
                block_ok = false;
                gelfand_radius(&a.submatrix(comp))
            } else {
                out.radius
            }
        })
        .collect();
    let r = radii.iter().copied().fold(0.0, f64::max);
    let near = cfg.rel_tol * r.max(1.0);
    // Components come sinks first, so the last near-maximal one has no
    // near-maximal ancestor.
    let dominant = (0..components.len())
        .rev()
        .find(|&c| radii[c] >= r - near)
        .expect("at least one component");
    let support_set = support::ancestors(a, &components[dominant]);
    let sub = a.submatrix(&support_set);
    let out = power_iterate(&sub, cfg);

    let mut right = vec![0.0; n];
    for (k, &i) in support_set.iter().enumerate() {
        right[i] = out.vector[k];
    }
    let certified = block_ok && out.converged;
    // Block radii are sharper than the bracket on the larger support.
    let (radius, lower, upper) = if out.converged {
        (r, out.lower, out.upper)
    } else {
        (r, r, r)
    };
    Ok(SpectralResult {
        radius: radius.max(0.0),
        right_vector: right,
        left_vector: None,
        cw_lower: lower,
        cw_upper: upper,
        iterations: out.iterations + block_iters,
        certified,
    })
}

fn finish(a: &Matrix, out: PowerOutcome, extra_iters: usize) -> SpectralResult {
    if out.converged {
        SpectralResult {
            radius: out.radius.max(0.0),
            right_vector: out.vector,
            left_vector: None,
            cw_lower: out.lower,
            cw_upper: out.upper,
            iterations: out.iterations + extra_iters,
            certified: true,
        }
    } else {
        warn!(
            "power iteration did not contract after {} iterations; using Gelfand estimate",
            out.iterations
        );
        let r = gelfand_radius(a);
        SpectralResult {
            radius: r,
            right_vector: out.vector,
            left_vector: None,
            cw_lower: out.lower,
            cw_upper: out.upper,
            iterations: out.iterations + extra_iters,
            certified: false,
        }
    }
}

/// Basic reproduction number: spectral radius of `kappa[i][j] / gamma_j`.
pub fn r0(model: &KernelModel) -> Result<f64> {
    r0_with(model, &SpectralConfig::default())
}

pub fn r0_with(model: &KernelModel, cfg: &SpectralConfig) -> Result<f64> {
    Ok(spectral_radius_with(&model.next_generation(), cfg)?.radius)
}

fn check_unit_box(g: &[f64], n: usize) -> Result<()> {
    if g.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: g.len(),
        });
    }
    match g.iter().position(|v| !(*v >= -1e-9 && *v <= 1.0 + 1e-9)) {
        Some(index) => Err(Error::OutsideUnitBox {
            index,
            value: g[index],
        }),
        None => Ok(()),
    }
}

/// Effective reproduction number `r(diag(g) M)` for a susceptible profile `g`.
pub fn r0_effective(model: &KernelModel, g: &[f64]) -> Result<f64> {
    check_unit_box(g, model.len())?;
    let g: Vec<f64> = g.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let m = model.next_generation().scale_rows_cols(Some(&g), None);
    Ok(spectral_radius(&m)?.radius)
}

/// Spectral bound `s(T_kappa - gamma)`, computed as
/// `r(kappa - diag(gamma) + |gamma| I) - |gamma|`.
pub fn spectral_bound(model: &KernelModel) -> Result<f64> {
    spectral_bound_with(model, &SpectralConfig::default())
}

pub fn spectral_bound_with(model: &KernelModel, cfg: &SpectralConfig) -> Result<f64> {
    let c = model.gamma_sup();
    let mut a = model.kappa().clone();
    for (i, g) in model.gamma().iter().enumerate() {
        a[(i, i)] += c - g;
    }
    Ok(spectral_radius_with(&a, cfg)?.radius - c)
}

/// Right and left Perron vectors of the next-generation matrix.
pub fn perron_vectors(model: &KernelModel) -> Result<SpectralResult> {
    let m = model.next_generation();
    let mut result = spectral_radius(&m)?;
    if result.radius <= f64::EPSILON * m.norm_inf() {
        return Err(Error::ZeroRadius);
    }
    let left = spectral_radius(&m.transpose())?;
    let mut left_vec = left.right_vector;
    let pairing = dot(&left_vec, &result.right_vector);
    if pairing > 0.0 {
        for v in &mut left_vec {
            *v /= pairing;
        }
    }
    result.certified &= left.certified;
    if !model.is_connected() {
        warn!("kernel is not connected; Perron vectors need not be unique");
        result.certified = false;
    }
    result.left_vector = Some(left_vec);
    Ok(result)
}

/// Solves `(1 - eps) T_k(w) = (gamma + lambda) w` with `lambda > 0` by
/// bisection on `a -> r((1 - eps) kappa / (gamma + a))`, which decreases in `a`.
pub fn eigen_threshold(model: &KernelModel, epsilon: f64) -> Result<ThresholdEigenpair> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidValue(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let n = model.len();
    let r0_eff = r0_effective(model, &vec![1.0 - epsilon; n])?;
    if !(r0_eff > 1.0) {
        return Err(Error::NotSupercritical {
            epsilon,
            r0_effective: r0_eff,
        });
    }
    let kappa = model.kappa();
    let gamma = model.gamma();
    let shifted = |a: f64| {
        let inv: Vec<f64> = gamma.iter().map(|g| (1.0 - epsilon) / (g + a)).collect();
        kappa.scale_rows_cols(None, Some(&inv))
    };
    let psi = |a: f64| spectral_radius(&shifted(a)).map(|r| r.radius);

    let (mut lo, mut hi) = (0.0, kappa.norm_inf());
    for _ in 0..200 {
        if hi - lo <= 1e-10 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if psi(mid)? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);

    let v = spectral_radius(&shifted(lambda))?.right_vector;
    let mut w: Vec<f64> = v.iter().zip(gamma).map(|(vi, g)| vi / (g + lambda)).collect();
    let scale = 0.5 * epsilon / sup_norm(&w);
    for wi in &mut w {
        *wi *= scale;
    }
    let tw = kappa.mul_vec(&w);
    let residual = tw
        .iter()
        .zip(&w)
        .zip(gamma)
        .map(|((t, wi), g)| ((1.0 - epsilon) * t - (g + lambda) * wi).abs())
        .fold(0.0, f64::max);
    if residual > 1e-8 {
        return Err(Error::NotConverged {
            what: "threshold eigenpair",
            iterations: 200,
            residual,
        });
    }
    Ok(ThresholdEigenpair {
        epsilon,
        lambda,
        w,
        residual,
    })
}

/// `(prod_{i<=n} (2i+2)/(2i-1))^(1/n)`: the Gelfand sequence `|T^n|^(1/n)`
/// of the infinite chain kernel, accumulated in log space.
pub fn gelfand_sequence(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidValue("n must be at least 1".into()));
    }
    let log_sum: f64 = (1..=n).map(|i| chain_rate(i).ln()).sum();
    Ok((log_sum / n as f64).exp())
}
