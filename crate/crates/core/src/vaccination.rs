//! Vaccination as a kernel on the product space of features and vaccine
//! types. Atom `(x, xi)` carries mass `mu_x * eta(x, xi)`; vaccine type 0 is
//! "not vaccinated" and has no effect.
//!
//! * Leaky: `kappa((x,xi),(y,z)) = (1 - e(x,xi)) (1 - delta(y,z)) kappa(x,y) eta(y,z)`
//! * All-or-nothing: the same with `1 - e(y,z)` in place of `1 - e(x,xi)`.
//!
//! For all-or-nothing the state is `v = u / (1 - e)`, the infected fraction
//! among the non-immunized, so that `v` lives in the unit box like any other
//! SIS state.

use serde::{Deserialize, Serialize};

use crate::dynamics::StateVector;
use crate::error::{Error, Result};
use crate::kernel::{DiscreteSpace, KernelModel};
use crate::linalg::Matrix;
use crate::spectral::spectral_radius;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mechanism {
    Leaky,
    AllOrNothing,
}

/// Per-feature vaccine effects, `n x m` with column 0 the unvaccinated type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VaccineSet {
    pub efficacy: Matrix,
    pub infectiousness_reduction: Matrix,
    /// Recovery rate per `(x, xi)`; defaults to the base rate of `x`.
    #[serde(default)]
    pub recovery: Option<Matrix>,
}

impl VaccineSet {
    pub fn new(
        efficacy: Matrix,
        infectiousness_reduction: Matrix,
        recovery: Option<Matrix>,
    ) -> Result<Self> {
        let set = VaccineSet {
            efficacy,
            infectiousness_reduction,
            recovery,
        };
        set.check()?;
        Ok(set)
    }

    /// A single vaccine with the same efficacy for every feature.
    pub fn single(n: usize, efficacy: f64, infectiousness_reduction: f64) -> Result<Self> {
        VaccineSet::new(
            Matrix::from_fn(n, 2, |_, j| if j == 0 { 0.0 } else { efficacy }),
            Matrix::from_fn(n, 2, |_, j| {
                if j == 0 {
                    0.0
                } else {
                    infectiousness_reduction
                }
            }),
            None,
        )
    }

    pub fn n_features(&self) -> usize {
        self.efficacy.rows()
    }

    pub fn n_types(&self) -> usize {
        self.efficacy.cols()
    }

    fn check(&self) -> Result<()> {
        let (n, m) = (self.efficacy.rows(), self.efficacy.cols());
        if m == 0 {
            return Err(Error::InvalidValue("at least the unvaccinated type is required".into()));
        }
        for mat in [&self.infectiousness_reduction]
            .into_iter()
            .chain(self.recovery.as_ref())
        {
            if mat.rows() != n || mat.cols() != m {
                return Err(Error::DimensionMismatch {
                    expected: n * m,
                    got: mat.rows() * mat.cols(),
                });
            }
        }
        for (name, mat) in [
            ("efficacy", &self.efficacy),
            ("infectiousness reduction", &self.infectiousness_reduction),
        ] {
            for (x, xi, v) in mat.iter_entries() {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidValue(format!(
                        "{name} ({x}, {xi}) = {v} outside [0, 1]"
                    )));
                }
                if xi == 0 && v != 0.0 {
                    return Err(Error::InvalidValue(format!(
                        "{name} of the unvaccinated type must be 0 (feature {x})"
                    )));
                }
            }
        }
        if let Some(rec) = &self.recovery {
            if let Some((x, xi, v)) = rec.iter_entries().find(|(_, _, v)| !(*v > 0.0)) {
                return Err(Error::NonPositiveRecovery {
                    index: x * m + xi,
                    value: v,
                });
            }
        }
        Ok(())
    }
}

/// Row-stochastic `eta[x][xi]`: probability that feature `x` gets vaccine `xi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix", into = "Matrix")]
pub struct VaccinationPolicy {
    eta: Matrix,
}

impl VaccinationPolicy {
    pub fn new(eta: Matrix) -> Result<Self> {
        for x in 0..eta.rows() {
            let row = eta.row(x);
            if let Some(v) = row.iter().find(|v| !(**v >= 0.0)) {
                return Err(Error::InvalidPolicy(format!("negative entry {v} in row {x}")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidPolicy(format!("row {x} sums to {sum}")));
            }
        }
        Ok(VaccinationPolicy { eta })
    }

    /// Two types: unvaccinated with probability `eta0[x]`, vaccinated otherwise.
    pub fn two_type(eta0: &[f64]) -> Result<Self> {
        VaccinationPolicy::new(Matrix::from_fn(eta0.len(), 2, |x, j| {
            if j == 0 {
                eta0[x]
            } else {
                1.0 - eta0[x]
            }
        }))
    }

    pub fn eta(&self) -> &Matrix {
        &self.eta
    }
}

impl TryFrom<Matrix> for VaccinationPolicy {
    type Error = Error;

    fn try_from(eta: Matrix) -> Result<Self> {
        VaccinationPolicy::new(eta)
    }
}

impl From<VaccinationPolicy> for Matrix {
    fn from(p: VaccinationPolicy) -> Self {
        p.eta
    }
}

/// Kernel model on `n * m` product atoms, indexed `x * m + xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductModel {
    pub model: KernelModel,
    pub mechanism: Mechanism,
    n: usize,
    m: usize,
    eta: Matrix,
    efficacy: Matrix,
    base_weights: Vec<f64>,
}

impl ProductModel {
    pub fn index(&self, x: usize, xi: usize) -> usize {
        x * self.m + xi
    }

    pub fn n_features(&self) -> usize {
        self.n
    }

    pub fn n_types(&self) -> usize {
        self.m
    }

    /// Product state with the given infection on unvaccinated atoms and none
    /// among the vaccinated.
    pub fn initial_state(&self, unvaccinated: &[f64]) -> Result<StateVector> {
        if unvaccinated.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: unvaccinated.len(),
            });
        }
        let mut u = vec![0.0; self.n * self.m];
        for (x, v) in unvaccinated.iter().enumerate() {
            u[self.index(x, 0)] = *v;
        }
        StateVector::new(u)
    }

    /// Infected probabilities `u` from the simulated state: `(1 - e) v` for
    /// all-or-nothing, the state itself for leaky.
    pub fn infected(&self, state: &[f64]) -> Vec<f64> {
        match self.mechanism {
            Mechanism::Leaky => state.to_vec(),
            Mechanism::AllOrNothing => state
                .iter()
                .enumerate()
                .map(|(k, v)| (1.0 - self.efficacy[(k / self.m, k % self.m)]) * v)
                .collect(),
        }
    }
}

fn check_dims(base: &KernelModel, vaccines: &VaccineSet, policy: &VaccinationPolicy) -> Result<()> {
    let n = base.len();
    if vaccines.n_features() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: vaccines.n_features(),
        });
    }
    if policy.eta.rows() != n || policy.eta.cols() != vaccines.n_types() {
        return Err(Error::DimensionMismatch {
            expected: n * vaccines.n_types(),
            got: policy.eta.rows() * policy.eta.cols(),
        });
    }
    Ok(())
}

fn product_recovery(base: &KernelModel, vaccines: &VaccineSet) -> Vec<f64> {
    let (n, m) = (base.len(), vaccines.n_types());
    (0..n * m)
        .map(|k| match &vaccines.recovery {
            Some(rec) => rec[(k / m, k % m)],
            None => base.gamma()[k / m],
        })
        .collect()
}

pub fn build_vaccinated_model(
    base: &KernelModel,
    vaccines: &VaccineSet,
    policy: &VaccinationPolicy,
    mechanism: Mechanism,
) -> Result<ProductModel> {
    check_dims(base, vaccines, policy)?;
    let (n, m) = (base.len(), vaccines.n_types());
    let e = &vaccines.efficacy;
    let delta = &vaccines.infectiousness_reduction;
    let eta = &policy.eta;
    let kappa = Matrix::from_fn(n * m, n * m, |a, b| {
        let (x, xi) = (a / m, a % m);
        let (y, zeta) = (b / m, b % m);
        let susceptibility = match mechanism {
            Mechanism::Leaky => 1.0 - e[(x, xi)],
            Mechanism::AllOrNothing => 1.0 - e[(y, zeta)],
        };
        susceptibility * (1.0 - delta[(y, zeta)]) * base.kappa()[(x, y)] * eta[(y, zeta)]
    });
    let mu = base.space().weights();
    let weights: Vec<f64> = (0..n * m).map(|k| mu[k / m] * eta[(k / m, k % m)]).collect();
    let labels = (0..n * m)
        .map(|k| format!("{}:{}", base.space().labels()[k / m], k % m))
        .collect();
    let space = DiscreteSpace::new(labels, weights)?;
    let model = KernelModel::new(space, kappa, product_recovery(base, vaccines))?;
    Ok(ProductModel {
        model,
        mechanism,
        n,
        m,
        eta: eta.clone(),
        efficacy: e.clone(),
        base_weights: mu.to_vec(),
    })
}

/// Reproduction number under vaccination: `r(MT)` (leaky) or `r(TM)`
/// (all-or-nothing), where `T` is the vaccinated next-generation integral
/// operator and `M` multiplies by `1 - e`.
pub fn r0_vaccinated(
    base: &KernelModel,
    vaccines: &VaccineSet,
    policy: &VaccinationPolicy,
    mechanism: Mechanism,
) -> Result<f64> {
    check_dims(base, vaccines, policy)?;
    let (n, m) = (base.len(), vaccines.n_types());
    let gamma = product_recovery(base, vaccines);
    let delta = &vaccines.infectiousness_reduction;
    let eta = &policy.eta;
    let t = Matrix::from_fn(n * m, n * m, |a, b| {
        let (x, y, zeta) = (a / m, b / m, b % m);
        (1.0 - delta[(y, zeta)]) * base.kappa()[(x, y)] * eta[(y, zeta)] / gamma[b]
    });
    let susceptibility: Vec<f64> = (0..n * m)
        .map(|k| 1.0 - vaccines.efficacy[(k / m, k % m)])
        .collect();
    let product = match mechanism {
        Mechanism::Leaky => t.scale_rows_cols(Some(&susceptibility), None),
        Mechanism::AllOrNothing => t.scale_rows_cols(None, Some(&susceptibility)),
    };
    Ok(spectral_radius(&product)?.radius)
}

/// Perfect vaccine given to a fraction `1 - eta0[x]` of each feature: only
/// the unvaccinated evolve, with kernel `eta0[y] kappa(x, y)`.
pub fn build_perfect_vaccine_model(base: &KernelModel, eta0: &[f64]) -> Result<KernelModel> {
    if eta0.len() != base.len() {
        return Err(Error::DimensionMismatch {
            expected: base.len(),
            got: eta0.len(),
        });
    }
    if let Some(v) = eta0.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidValue(format!("eta0 entry {v} outside [0, 1]")));
    }
    base.with_kappa(base.kappa().scale_rows_cols(None, Some(eta0)))
}

/// `sum_{x,xi} u(x,xi) eta(x,xi) mu_x / sum_x mu_x`.
pub fn total_prevalence(product: &ProductModel, u: &[f64]) -> Result<f64> {
    let nm = product.n * product.m;
    if u.len() != nm {
        return Err(Error::DimensionMismatch {
            expected: nm,
            got: u.len(),
        });
    }
    let total: f64 = product.base_weights.iter().sum();
    let infected: f64 = u
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let (x, xi) = (k / product.m, k % product.m);
            v * product.eta[(x, xi)] * product.base_weights[x]
        })
        .sum();
    Ok(infected / total)
}
