use num_traits::{FromPrimitive, Num};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::chain_rate;

/// Infected proportion `V(t)` of the one-group model in rescaled time
/// (`U(gamma t) = V(t)`, `R0 = K / gamma`), started from `V(0) = v0`.
///
/// For `R0 != 1` this is the logistic solution
/// `(R0 - 1) / (R0 + ((R0 - 1)/v0 - R0) e^{-(R0 - 1) t})`; for `R0 = 1`
/// it is `1 / (1/v0 + t)`.
pub fn one_group_closed_form(r0: f64, v0: f64, t: f64) -> Result<f64> {
    if !(v0 > 0.0 && v0 <= 1.0) {
        return Err(Error::InvalidValue(format!("V0 must lie in (0, 1], got {v0}")));
    }
    if !(r0 >= 0.0) {
        return Err(Error::InvalidValue(format!("R0 must be non-negative, got {r0}")));
    }
    let a = r0 - 1.0;
    if a == 0.0 {
        return Ok(1.0 / (1.0 / v0 + t));
    }
    // Denominator rewritten with expm1 so R0 close to 1 stays accurate.
    let decay = (-a * t).exp();
    Ok(a / (-r0 * (-a * t).exp_m1() + a / v0 * decay))
}

/// Sequence `g(1) = alpha`, `g(n+1) = (2n-1)/(2n+2) * g(n) / (1 - g(n))`,
/// cut to 0 after the first term that reaches 1.
pub fn counterexample_sequence<T>(alpha: T, len: usize) -> Vec<T>
where
    T: Num + PartialOrd + Copy + FromPrimitive,
{
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    out.push(alpha);
    for n in 1..len {
        let prev = out[n - 1];
        let next = if prev < T::one() {
            let num = T::from_usize(2 * n - 1).expect("representable");
            let den = T::from_usize(2 * n + 2).expect("representable");
            num / den * prev / (T::one() - prev)
        } else {
            T::zero()
        };
        out.push(next);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub alpha: f64,
    pub values: Vec<f64>,
    /// 1-based index of the first term `>= 1`, if any.
    pub first_blowup: Option<usize>,
    /// `|F(g)|_inf` over coordinates `1..N-1` of the truncated chain.
    pub residual: f64,
    pub is_equilibrium: bool,
}

/// Candidate equilibria of the chain kernel (`gamma = 1`) and their field
/// residual. Coordinate `N` is left out of the residual because its field
/// value depends on the truncated atom `N + 1`.
pub fn counterexample_equilibria(alpha: f64, n: usize) -> Result<CounterexampleReport> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidValue(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidValue("N must be at least 2".into()));
    }
    let values = counterexample_sequence(alpha, n);
    let first_blowup = values.iter().position(|v| *v >= 1.0).map(|i| i + 1);
    let residual = (0..n - 1)
        .map(|i| {
            let field = (1.0 - values[i]) * chain_rate(i + 1) * values[i + 1] - values[i];
            field.abs()
        })
        .fold(0.0, f64::max);
    Ok(CounterexampleReport {
        alpha,
        is_equilibrium: first_blowup.is_none() && residual <= 1e-12,
        values,
        first_blowup,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn critical_formula() {
        assert_relative_eq!(one_group_closed_form(1.0, 0.5, 2.0).unwrap(), 0.25);
    }

    #[test]
    fn initial_condition_and_limit() {
        assert_relative_eq!(one_group_closed_form(2.0, 0.1, 0.0).unwrap(), 0.1, epsilon = 1e-15);
        assert_relative_eq!(one_group_closed_form(2.0, 0.1, 100.0).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(one_group_closed_form(0.5, 0.1, 0.0).unwrap(), 0.1, epsilon = 1e-15);
        assert!(one_group_closed_form(0.5, 0.1, 100.0).unwrap() < 1e-20);
        assert_relative_eq!(
            one_group_closed_form(2.0, 0.1, 1.0).unwrap(),
            1.0 / (2.0 + 8.0 * (-1.0f64).exp()),
            epsilon = 1e-15
        );
    }

    #[test]
    fn continuous_through_r0_equal_one() {
        let at_one = one_group_closed_form(1.0, 0.3, 4.0).unwrap();
        for r0 in [1.0 - 1e-12, 1.0 + 1e-12, 1.0 + 1e-7] {
            assert_relative_eq!(
                one_group_closed_form(r0, 0.3, 4.0).unwrap(),
                at_one,
                epsilon = 1e-6
            );
        }
    }

    #[test]
    fn rejects_bad_v0() {
        assert!(one_group_closed_form(2.0, 0.0, 1.0).is_err());
        assert!(one_group_closed_form(2.0, 1.5, 1.0).is_err());
        assert!(one_group_closed_form(-1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn maximal_counterexample_equilibrium() {
        let rep = counterexample_equilibria(0.5, 5).unwrap();
        for (i, v) in rep.values.iter().enumerate() {
            assert_relative_eq!(*v, 1.0 / (2.0 * (i + 1) as f64), epsilon = 1e-15);
        }
        assert!(rep.is_equilibrium);
    }

    #[test]
    fn zero_alpha_is_disease_free() {
        let rep = counterexample_equilibria(0.0, 10).unwrap();
        assert!(rep.values.iter().all(|v| *v == 0.0));
        assert_eq!(rep.residual, 0.0);
    }

    #[test]
    fn alpha_above_half_blows_up() {
        let rep = counterexample_equilibria(0.6, 50).unwrap();
        assert_eq!(rep.first_blowup, Some(12));
        assert!(!rep.is_equilibrium);
        assert!(rep.values[12..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn invalid_arguments() {
        assert!(counterexample_equilibria(1.5, 10).is_err());
        assert!(counterexample_equilibria(0.5, 1).is_err());
    }
}
