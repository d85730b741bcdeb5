use std::io::Write;

use serde::Serialize;

use super::{field_into, StateVector, BOX_TOL};
use crate::error::{Error, Result};
use crate::kernel::KernelModel;

/// Recorded solution of the SIS equation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// Mass-weighted mean infection at each recorded time.
    pub prevalence: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory has at least the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("non-empty")
    }

    /// State at time `t`, linearly interpolated between recorded steps.
    pub fn state_at(&self, t: f64) -> Vec<f64> {
        let k = self.times.partition_point(|&s| s < t);
        if k == 0 {
            return self.states[0].as_slice().to_vec();
        }
        if k >= self.times.len() {
            return self.final_state().as_slice().to_vec();
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let w = (t - t0) / (t1 - t0);
        self.states[k - 1]
            .as_slice()
            .iter()
            .zip(self.states[k].as_slice())
            .map(|(a, b)| a + w * (b - a))
            .collect()
    }

    /// CSV with header `t,prevalence[,u_1,...,u_n]`; one row per recorded time.
    pub fn write_csv<W: Write>(&self, out: W, per_atom: bool) -> std::io::Result<()> {
        self.write_csv_with(out, per_atom, Some(&self.prevalence))
    }

    /// Same as [`Trajectory::write_csv`] with an externally computed
    /// prevalence column, or none.
    pub fn write_csv_with<W: Write>(
        &self,
        mut out: W,
        per_atom: bool,
        prevalence: Option<&[f64]>,
    ) -> std::io::Result<()> {
        let n = self.states.first().map_or(0, StateVector::len);
        write!(out, "t")?;
        if prevalence.is_some() {
            write!(out, ",prevalence")?;
        }
        if per_atom {
            for i in 1..=n {
                write!(out, ",u_{i}")?;
            }
        }
        writeln!(out)?;
        for (k, (t, state)) in self.times.iter().zip(&self.states).enumerate() {
            write!(out, "{t}")?;
            if let Some(p) = prevalence {
                write!(out, ",{}", p[k])?;
            }
            if per_atom {
                for u in state.as_slice() {
                    write!(out, ",{u}")?;
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// `min(0.01, 0.1 / (|T_kappa| + |gamma|))`.
pub fn default_dt(model: &KernelModel) -> f64 {
    (0.1 / (model.kappa().norm_inf() + model.gamma_sup())).min(0.01)
}

/// Classic RK4 with fixed step, recording every step.
pub fn integrate(model: &KernelModel, g0: &StateVector, t_end: f64, dt: f64) -> Result<Trajectory> {
    integrate_with(model, g0, t_end, dt, 1)
}

/// RK4 with fixed step; records the initial state, every `record_every`-th
/// step and the final state. The step is `t_end / ceil(t_end / dt)` so the
/// last recorded time is exactly `t_end`.
pub fn integrate_with(
    model: &KernelModel,
    g0: &StateVector,
    t_end: f64,
    dt: f64,
    record_every: usize,
) -> Result<Trajectory> {
    let n = model.len();
    if g0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: g0.len(),
        });
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidValue(format!("dt must be positive, got {dt}")));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidValue(format!(
            "t_end must be non-negative, got {t_end}"
        )));
    }
    let record_every = record_every.max(1);
    let steps = if t_end == 0.0 {
        0
    } else {
        (t_end / dt - 1e-9).ceil().max(1.0) as usize
    };
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    let weights = model.space();

    let mut times = vec![0.0];
    let mut states = vec![g0.clone()];
    let mut prevalence = vec![weights.mean(g0.as_slice())];

    // The disease-free state is an equilibrium.
    let zero_start = g0.as_slice().iter().all(|v| *v == 0.0);

    let mut u = g0.as_slice().to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    for step in 1..=steps {
        if !zero_start {
            field_into(model, &u, &mut k1);
            for i in 0..n {
                tmp[i] = u[i] + 0.5 * h * k1[i];
            }
            field_into(model, &tmp, &mut k2);
            for i in 0..n {
                tmp[i] = u[i] + 0.5 * h * k2[i];
            }
            field_into(model, &tmp, &mut k3);
            for i in 0..n {
                tmp[i] = u[i] + h * k3[i];
            }
            field_into(model, &tmp, &mut k4);
            let mut overshoot: f64 = 0.0;
            for i in 0..n {
                u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                overshoot = overshoot.max(-u[i]).max(u[i] - 1.0);
            }
            let t = step as f64 * h;
            if overshoot > BOX_TOL || u.iter().any(|v| !v.is_finite()) {
                return Err(Error::StepTooLarge {
                    time: t,
                    overshoot,
                });
            }
            for v in &mut u {
                *v = v.clamp(0.0, 1.0);
            }
        }
        if step % record_every == 0 || step == steps {
            times.push(step as f64 * h);
            prevalence.push(weights.mean(&u));
            states.push(StateVector(u.clone()));
        }
    }
    if let Some(last) = times.last_mut() {
        if steps > 0 {
            *last = t_end;
        }
    }
    Ok(Trajectory {
        times,
        states,
        prevalence,
    })
}
