//! JSON scenario files and the commands of the `sis` tool.
//!
//! A scenario names a kernel (inline [`KernelSpec`] or CSV files), an initial
//! condition, a horizon and optional vaccination or lockdown settings. Paths
//! inside a scenario are resolved relative to the scenario file.
//!
//! When a vaccination is present, `analyze`, `equilibrium` and `simulate`
//! work on the vaccinated model; `vaccinate` compares it with the base one.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::{
    counterexample_equilibria, default_dt, integrate, maximal_equilibrium_with,
    CounterexampleReport, EquilibriumConfig, EquilibriumReport, Regime, StateVector, Trajectory,
};
use crate::error::{Error, Result};
use crate::families::{DegreeReport, KernelSpec};
use crate::io::{load_matrix_csv, load_vector_csv};
use crate::kernel::{DiscreteSpace, KernelModel};
use crate::linalg::{sup_norm, Matrix};
use crate::lockdown::{lockdown_summary, r0_bounds, LockdownSummary};
use crate::spectral::{
    eigen_threshold, gelfand_sequence, r0_with, spectral_bound_with, spectral_radius_with,
    SpectralConfig,
};
use crate::vaccination::{
    build_perfect_vaccine_model, build_vaccinated_model, r0_vaccinated, total_prevalence,
    Mechanism, ProductModel, VaccinationPolicy, VaccineSet,
};

/// Environment variable overriding the numerical tolerances.
pub const TOL_ENV: &str = "SIS_TOL";

/// Length of the Gelfand sequence reported for the chain kernel.
const CHAIN_GELFAND_LEN: usize = 10_000;

/// Kernel given by CSV files: `kappa` (square matrix), `gamma` (one value
/// per line) and optional `weights` (uniform `1/n` when absent).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvKernel {
    pub kappa: PathBuf,
    pub gamma: PathBuf,
    #[serde(default)]
    pub weights: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Value", into = "Value")]
pub enum KernelSource {
    Inline(KernelSpec),
    Csv(CsvKernel),
}

impl TryFrom<Value> for KernelSource {
    type Error = serde_json::Error;

    fn try_from(value: Value) -> std::result::Result<Self, Self::Error> {
        match value {
            Value::Object(mut map) if map.contains_key("csv") => {
                if map.len() != 1 {
                    return Err(serde::de::Error::custom(
                        "a csv kernel source takes no other fields",
                    ));
                }
                let csv = map.remove("csv").expect("checked");
                Ok(KernelSource::Csv(serde_json::from_value(csv)?))
            }
            other => Ok(KernelSource::Inline(serde_json::from_value(other)?)),
        }
    }
}

impl From<KernelSource> for Value {
    fn from(source: KernelSource) -> Self {
        match source {
            KernelSource::Inline(spec) => serde_json::to_value(spec),
            KernelSource::Csv(csv) => serde_json::to_value(serde_json::json!({ "csv": csv })),
        }
        .expect("kernel sources serialize")
    }
}

/// `0.1`, `[0.1, 0.2, ...]`, `"ones"` or `"eigen_threshold:0.05"`.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialCondition {
    Constant(f64),
    PerAtom(Vec<f64>),
    #[default]
    Ones,
    /// The positive sub-solution `w` of level `epsilon`; trajectories from it
    /// increase to the maximal equilibrium.
    EigenThreshold(f64),
}

impl<'de> Deserialize<'de> for InitialCondition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match Value::deserialize(d)? {
            Value::Number(n) => Ok(InitialCondition::Constant(
                n.as_f64().ok_or_else(|| D::Error::custom("not a finite number"))?,
            )),
            Value::Array(values) => values
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| D::Error::custom("expected numbers")))
                .collect::<std::result::Result<_, _>>()
                .map(InitialCondition::PerAtom),
            Value::String(s) if s == "ones" => Ok(InitialCondition::Ones),
            Value::String(s) => match s.strip_prefix("eigen_threshold:") {
                Some(eps) => eps
                    .trim()
                    .parse()
                    .map(InitialCondition::EigenThreshold)
                    .map_err(|_| D::Error::custom(format!("bad epsilon in {s:?}"))),
                None => Err(D::Error::custom(format!(
                    "unknown initial condition {s:?}; expected \"ones\" or \"eigen_threshold:<eps>\""
                ))),
            },
            other => Err(D::Error::custom(format!("unsupported initial condition {other}"))),
        }
    }
}

impl Serialize for InitialCondition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            InitialCondition::Constant(v) => s.serialize_f64(*v),
            InitialCondition::PerAtom(v) => v.serialize(s),
            InitialCondition::Ones => s.serialize_str("ones"),
            InitialCondition::EigenThreshold(eps) => {
                s.serialize_str(&format!("eigen_threshold:{eps}"))
            }
        }
    }
}

impl InitialCondition {
    pub fn resolve(&self, model: &KernelModel) -> Result<StateVector> {
        let n = model.len();
        match self {
            InitialCondition::Constant(v) => StateVector::constant(n, *v),
            InitialCondition::PerAtom(v) => {
                if v.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: v.len(),
                    });
                }
                StateVector::new(v.clone())
            }
            InitialCondition::Ones => Ok(StateVector::ones(n)),
            InitialCondition::EigenThreshold(eps) => {
                StateVector::new_clamped(eigen_threshold(model, *eps)?.w)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub per_atom_series: bool,
    pub prevalence_series: bool,
    pub equilibrium: bool,
    pub spectral_report: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            per_atom_series: false,
            prevalence_series: true,
            equilibrium: false,
            spectral_report: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VaccinationSpec {
    /// Fully protective vaccine; `eta0[x]` is the unvaccinated fraction.
    Perfect { eta0: Vec<f64> },
    Product {
        mechanism: Mechanism,
        efficacy: Matrix,
        infectiousness_reduction: Matrix,
        #[serde(default)]
        recovery: Option<Matrix>,
        policy: Matrix,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LockdownSpec {
    /// CSV file with the lockdown graphon on the same grid.
    pub after: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub kernel: KernelSource,
    #[serde(default)]
    pub initial_condition: InitialCondition,
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub vaccination: Option<VaccinationSpec>,
    #[serde(default)]
    pub lockdown: Option<LockdownSpec>,
}

/// Tolerances, optionally overridden by `SIS_TOL`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tolerances {
    pub spectral: SpectralConfig,
    pub equilibrium: EquilibriumConfig,
}

impl Tolerances {
    /// `SIS_TOL` sets both the relative stopping width of the power iteration
    /// and the residual accepted for the maximal equilibrium.
    pub fn from_env() -> Result<Self> {
        match std::env::var(TOL_ENV) {
            Ok(raw) => Tolerances::with_tol(raw.trim().parse().map_err(|_| {
                Error::InvalidValue(format!("{TOL_ENV} must be a positive number, got {raw:?}"))
            })?),
            Err(_) => Ok(Tolerances::default()),
        }
    }

    pub fn with_tol(tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidValue(format!(
                "tolerance must lie in (0, 1), got {tol}"
            )));
        }
        let spectral = SpectralConfig {
            rel_tol: tol,
            ..SpectralConfig::default()
        };
        Ok(Tolerances {
            spectral,
            equilibrium: EquilibriumConfig {
                residual_tol: tol,
                spectral,
                ..EquilibriumConfig::default()
            },
        })
    }
}

/// Model the commands act on.
#[derive(Debug, Clone, PartialEq)]
pub enum Effective {
    Plain(KernelModel),
    Product(ProductModel),
}

impl Effective {
    pub fn model(&self) -> &KernelModel {
        match self {
            Effective::Plain(m) => m,
            Effective::Product(p) => &p.model,
        }
    }
}

/// Scenario with its kernel built and paths resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub base_dir: PathBuf,
    /// Inline spec, when the kernel was not read from CSV.
    pub spec: Option<KernelSpec>,
    pub base: KernelModel,
    pub effective: Effective,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let scenario: Scenario = serde_json::from_str(text)?;
        if let Some(h) = scenario.horizon {
            if !(h >= 0.0) || !h.is_finite() {
                return Err(Error::InvalidValue(format!("horizon must be non-negative, got {h}")));
            }
        }
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<LoadedScenario> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let scenario = Scenario::from_json(&text).map_err(|e| match e {
            Error::Json(e) => Error::Parse {
                path: path.to_path_buf(),
                message: e.to_string(),
            },
            other => other,
        })?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        scenario.resolve(base_dir)
    }

    /// Builds the models, reading any CSV files relative to `base_dir`.
    pub fn resolve(self, base_dir: PathBuf) -> Result<LoadedScenario> {
        let (spec, base) = match &self.kernel {
            KernelSource::Inline(spec) => (Some(spec.clone()), spec.build()?),
            KernelSource::Csv(csv) => {
                let kappa = load_matrix_csv(base_dir.join(&csv.kappa))?;
                let gamma = load_vector_csv(base_dir.join(&csv.gamma))?;
                let space = match &csv.weights {
                    Some(w) => DiscreteSpace::with_weights(load_vector_csv(base_dir.join(w))?)?,
                    None => DiscreteSpace::uniform(kappa.rows())?,
                };
                (None, KernelModel::new(space, kappa, gamma)?)
            }
        };
        let effective = match &self.vaccination {
            None => Effective::Plain(base.clone()),
            Some(VaccinationSpec::Perfect { eta0 }) => {
                Effective::Plain(build_perfect_vaccine_model(&base, eta0)?)
            }
            Some(VaccinationSpec::Product {
                mechanism,
                efficacy,
                infectiousness_reduction,
                recovery,
                policy,
            }) => {
                let vaccines = VaccineSet::new(
                    efficacy.clone(),
                    infectiousness_reduction.clone(),
                    recovery.clone(),
                )?;
                let policy = VaccinationPolicy::new(policy.clone())?;
                Effective::Product(build_vaccinated_model(&base, &vaccines, &policy, *mechanism)?)
            }
        };
        Ok(LoadedScenario {
            scenario: self,
            base_dir,
            spec,
            base,
            effective,
        })
    }
}

impl LoadedScenario {
    fn is_chain(&self) -> bool {
        matches!(self.spec, Some(KernelSpec::CounterexampleChain { .. }))
    }

    /// Inline graphon-form spec without vaccination, for degree statistics.
    fn graphon_spec(&self) -> Option<&KernelSpec> {
        self.spec
            .as_ref()
            .filter(|s| s.is_graphon_form() && self.scenario.vaccination.is_none())
    }

    /// Initial state of the effective model. With a product vaccination the
    /// condition is per base atom and placed on unvaccinated atoms only.
    pub fn initial_state(&self) -> Result<StateVector> {
        match &self.effective {
            Effective::Plain(m) => self.scenario.initial_condition.resolve(m),
            Effective::Product(p) => {
                let g0 = self.scenario.initial_condition.resolve(&self.base)?;
                p.initial_state(g0.as_slice())
            }
        }
    }

    /// Infected proportion over the whole population.
    fn prevalence(&self, state: &[f64]) -> Result<f64> {
        match &self.effective {
            Effective::Plain(m) => Ok(m.space().mean(state)),
            Effective::Product(p) => total_prevalence(p, &p.infected(state)),
        }
    }

    /// Infected probabilities per atom.
    fn infected(&self, state: &[f64]) -> Vec<f64> {
        match &self.effective {
            Effective::Plain(_) => state.to_vec(),
            Effective::Product(p) => p.infected(state),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSummary {
    pub cw_lower: f64,
    pub cw_upper: f64,
    pub iterations: usize,
    pub certified: bool,
    pub perron_vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumSummary {
    pub sup: f64,
    /// Infected proportion over the whole population.
    pub mean: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bounds {
    pub lower: Option<f64>,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GelfandValue {
    pub n: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub atoms: usize,
    pub r0: Option<f64>,
    pub spectral_bound: Option<f64>,
    pub regime: Option<Regime>,
    pub connected: bool,
    pub degrees: Option<DegreeReport>,
    pub r0_bounds: Option<Bounds>,
    pub equilibrium: Option<EquilibriumSummary>,
    pub spectral: Option<SpectralSummary>,
    pub gelfand_sequence: Option<GelfandValue>,
    pub caveats: Vec<String>,
}

impl AnalysisReport {
    pub fn converged(&self) -> bool {
        self.equilibrium.as_ref().is_none_or(|e| e.converged)
    }
}

fn classify(s: f64, tol: f64) -> Regime {
    if s > tol {
        Regime::Supercritical
    } else if s < -tol {
        Regime::Subcritical
    } else {
        Regime::Critical
    }
}

pub fn analyze(loaded: &LoadedScenario, tol: &Tolerances) -> Result<AnalysisReport> {
    let model = loaded.effective.model();
    let connected = model.is_connected();
    if loaded.is_chain() {
        return Ok(AnalysisReport {
            atoms: model.len(),
            r0: None,
            spectral_bound: None,
            regime: None,
            connected,
            degrees: None,
            r0_bounds: None,
            equilibrium: None,
            spectral: None,
            gelfand_sequence: Some(GelfandValue {
                n: CHAIN_GELFAND_LEN,
                value: gelfand_sequence(CHAIN_GELFAND_LEN)?,
            }),
            caveats: vec![
                "truncated-spectrum: every finite truncation of the chain kernel is nilpotent, \
                 so its spectral radius is 0 while the infinite kernel has R0 = 1; the Gelfand \
                 sequence of the infinite kernel is reported instead"
                    .into(),
            ],
        });
    }
    let r0 = r0_with(model, &tol.spectral)?;
    let s = spectral_bound_with(model, &tol.spectral)?;
    let eq = maximal_equilibrium_with(model, &tol.equilibrium)?;
    let infected = loaded.infected(eq.g_star.as_slice());
    let spectral = if loaded.scenario.outputs.spectral_report {
        let res = spectral_radius_with(&model.next_generation(), &tol.spectral)?;
        Some(SpectralSummary {
            cw_lower: res.cw_lower,
            cw_upper: res.cw_upper,
            iterations: res.iterations,
            certified: res.certified,
            perron_vector: res.right_vector,
        })
    } else {
        None
    };
    let (degrees, bounds) = match loaded.graphon_spec() {
        Some(spec) => {
            let form = spec.graphon_form()?;
            let summary = lockdown_summary(&form, &form.w)?;
            let lower = match r0_bounds(spec) {
                Ok((lo, _)) => Some(lo),
                Err(Error::UndefinedConstant { .. }) => None,
                Err(e) => return Err(e),
            };
            (
                Some(spec.degrees()?),
                Some(Bounds {
                    lower,
                    upper: summary.upper_bound,
                }),
            )
        }
        None => (None, None),
    };
    let mut caveats = Vec::new();
    if !connected {
        caveats.push(
            "kernel is not connected: the endemic equilibrium need not be unique".to_string(),
        );
    }
    Ok(AnalysisReport {
        atoms: model.len(),
        r0: Some(r0),
        spectral_bound: Some(s),
        regime: Some(classify(s, tol.equilibrium.regime_tol)),
        connected,
        degrees,
        r0_bounds: bounds,
        equilibrium: Some(EquilibriumSummary {
            sup: sup_norm(&infected),
            mean: loaded.prevalence(eq.g_star.as_slice())?,
            residual: eq.residual,
            iterations: eq.iterations,
            converged: eq.converged,
        }),
        spectral,
        gelfand_sequence: None,
        caveats,
    })
}

pub fn run_analyze(path: impl AsRef<Path>, tol: &Tolerances) -> Result<AnalysisReport> {
    analyze(&Scenario::load(path)?, tol)
}

pub fn run_equilibrium(path: impl AsRef<Path>, tol: &Tolerances) -> Result<EquilibriumReport> {
    let loaded = Scenario::load(path)?;
    maximal_equilibrium_with(loaded.effective.model(), &tol.equilibrium)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub steps: usize,
    pub dt: f64,
    pub final_time: f64,
    pub final_prevalence: f64,
    pub r0: f64,
    pub regime: Regime,
    /// Sup-norm distance of the final state to the maximal equilibrium.
    pub distance_to_equilibrium: Option<f64>,
    pub equilibrium_converged: Option<bool>,
}

impl SimulationSummary {
    pub fn converged(&self) -> bool {
        self.equilibrium_converged.unwrap_or(true)
    }
}

/// Integrates the scenario and writes the trajectory CSV to `out`.
pub fn simulate<W: Write>(
    loaded: &LoadedScenario,
    out: W,
    per_atom: bool,
    tol: &Tolerances,
) -> Result<SimulationSummary> {
    let model = loaded.effective.model();
    let horizon = loaded
        .scenario
        .horizon
        .ok_or_else(|| Error::InvalidValue("simulate needs a horizon".into()))?;
    let dt = loaded.scenario.dt.unwrap_or_else(|| default_dt(model));
    let g0 = loaded.initial_state()?;
    let traj = integrate(model, &g0, horizon, dt)?;

    let prevalence = traj
        .states
        .iter()
        .map(|s| loaded.prevalence(s.as_slice()))
        .collect::<Result<Vec<f64>>>()?;
    let infected = Trajectory {
        times: traj.times.clone(),
        states: traj
            .states
            .iter()
            .map(|s| StateVector::new_clamped(loaded.infected(s.as_slice())))
            .collect::<Result<_>>()?,
        prevalence: prevalence.clone(),
    };
    infected
        .write_csv_with(
            out,
            per_atom || loaded.scenario.outputs.per_atom_series,
            loaded
                .scenario
                .outputs
                .prevalence_series
                .then_some(prevalence.as_slice()),
        )
        .map_err(|source| Error::Io {
            path: PathBuf::from("<trajectory output>"),
            source,
        })?;

    let s = spectral_bound_with(model, &tol.spectral)?;
    let (distance, converged) = if loaded.scenario.outputs.equilibrium {
        let eq = maximal_equilibrium_with(model, &tol.equilibrium)?;
        let last = infected.final_state().as_slice();
        let star = loaded.infected(eq.g_star.as_slice());
        let gap = last.iter().zip(&star).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        (Some(gap), Some(eq.converged))
    } else {
        (None, None)
    };
    Ok(SimulationSummary {
        steps: traj.len() - 1,
        dt: if traj.len() > 1 { traj.times[1] } else { dt },
        final_time: traj.final_time(),
        final_prevalence: *prevalence.last().expect("non-empty"),
        r0: r0_with(model, &tol.spectral)?,
        regime: classify(s, tol.equilibrium.regime_tol),
        distance_to_equilibrium: distance,
        equilibrium_converged: converged,
    })
}

pub fn run_simulate(
    path: impl AsRef<Path>,
    out: impl AsRef<Path>,
    per_atom: bool,
    tol: &Tolerances,
) -> Result<SimulationSummary> {
    let loaded = Scenario::load(path)?;
    let out = out.as_ref();
    let file = fs::File::create(out).map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })?;
    let mut writer = std::io::BufWriter::new(file);
    let summary = simulate(&loaded, &mut writer, per_atom, tol)?;
    writer.flush().map_err(|source| Error::Io {
        path: out.to_path_buf(),
        source,
    })?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VaccinationReport {
    pub kind: String,
    pub r0_base: f64,
    pub r0_vaccinated: f64,
    /// Both mechanisms for product vaccinations; they agree in theory.
    pub r0_leaky: Option<f64>,
    pub r0_all_or_nothing: Option<f64>,
    pub regime: Regime,
    pub equilibrium_prevalence: f64,
    pub equilibrium_converged: bool,
}

pub fn vaccinate(loaded: &LoadedScenario, tol: &Tolerances) -> Result<VaccinationReport> {
    let spec = loaded
        .scenario
        .vaccination
        .as_ref()
        .ok_or_else(|| Error::InvalidValue("scenario has no vaccination section".into()))?;
    let model = loaded.effective.model();
    let (kind, r0_leaky, r0_aon, r0_vacc) = match spec {
        VaccinationSpec::Perfect { .. } => {
            ("perfect".to_string(), None, None, r0_with(model, &tol.spectral)?)
        }
        VaccinationSpec::Product {
            mechanism,
            efficacy,
            infectiousness_reduction,
            recovery,
            policy,
        } => {
            let vaccines = VaccineSet::new(
                efficacy.clone(),
                infectiousness_reduction.clone(),
                recovery.clone(),
            )?;
            let policy = VaccinationPolicy::new(policy.clone())?;
            let leaky = r0_vaccinated(&loaded.base, &vaccines, &policy, Mechanism::Leaky)?;
            let aon = r0_vaccinated(&loaded.base, &vaccines, &policy, Mechanism::AllOrNothing)?;
            let own = match mechanism {
                Mechanism::Leaky => leaky,
                Mechanism::AllOrNothing => aon,
            };
            let kind = match mechanism {
                Mechanism::Leaky => "leaky",
                Mechanism::AllOrNothing => "all_or_nothing",
            };
            (kind.to_string(), Some(leaky), Some(aon), own)
        }
    };
    let eq = maximal_equilibrium_with(model, &tol.equilibrium)?;
    let equilibrium_prevalence = match (spec, &loaded.effective) {
        // Vaccinated individuals are never infected.
        (VaccinationSpec::Perfect { eta0 }, Effective::Plain(m)) => {
            let masked: Vec<f64> = eq.g_star.as_slice().iter().zip(eta0).map(|(g, e)| g * e).collect();
            m.space().mean(&masked)
        }
        _ => loaded.prevalence(eq.g_star.as_slice())?,
    };
    Ok(VaccinationReport {
        kind,
        r0_base: r0_with(&loaded.base, &tol.spectral)?,
        r0_vaccinated: r0_vacc,
        r0_leaky,
        r0_all_or_nothing: r0_aon,
        regime: eq.regime,
        equilibrium_prevalence,
        equilibrium_converged: eq.converged,
    })
}

pub fn run_vaccinate(path: impl AsRef<Path>, tol: &Tolerances) -> Result<VaccinationReport> {
    vaccinate(&Scenario::load(path)?, tol)
}

/// Lockdown report for the scenario kernel and the graphon in `after`
/// (or the scenario's `lockdown.after` when `None`).
pub fn run_lockdown(path: impl AsRef<Path>, after: Option<&Path>) -> Result<LockdownSummary> {
    let loaded = Scenario::load(path)?;
    let after = match after {
        Some(p) => p.to_path_buf(),
        None => loaded
            .scenario
            .lockdown
            .as_ref()
            .map(|l| loaded.base_dir.join(&l.after))
            .ok_or_else(|| {
                Error::InvalidValue("no lockdown graphon given (--after or lockdown.after)".into())
            })?,
    };
    let spec = loaded.spec.as_ref().ok_or(Error::NotGraphonForm)?;
    let before = spec.graphon_form()?;
    lockdown_summary(&before, &load_matrix_csv(after)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleOutput {
    #[serde(flatten)]
    pub report: CounterexampleReport,
    pub gelfand_sequence: f64,
}

pub fn run_counterexample(alpha: f64, n: usize) -> Result<CounterexampleOutput> {
    Ok(CounterexampleOutput {
        report: counterexample_equilibria(alpha, n)?,
        gelfand_sequence: gelfand_sequence(n)?,
    })
}

/// Process exit code for an error: 2 for invalid input, 3 for numerical
/// non-convergence, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotConverged { .. } | Error::ZeroRadius => 3,
        Error::StepTooLarge { .. } => 1,
        e if e.is_validation() => 2,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn load(json: &str) -> LoadedScenario {
        Scenario::from_json(json)
            .unwrap()
            .resolve(PathBuf::new())
            .unwrap()
    }

    const ONE_GROUP: &str = r#"{
        "kernel": {"type": "matrix", "k": [[2.0]], "gamma": [1.0]},
        "initial_condition": 0.1,
        "horizon": 10.0,
        "dt": 0.001,
        "outputs": {"equilibrium": true}
    }"#;

    #[test]
    fn one_group_analysis() {
        let rep = analyze(&load(ONE_GROUP), &Tolerances::default()).unwrap();
        assert_relative_eq!(rep.r0.unwrap(), 2.0, epsilon = 1e-12);
        assert_eq!(rep.regime, Some(Regime::Supercritical));
        assert_relative_eq!(rep.equilibrium.as_ref().unwrap().sup, 0.5, epsilon = 1e-10);
        assert!(rep.converged());
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("\"regime\":\"Supercritical\""));
    }

    #[test]
    fn initial_condition_forms() {
        let parse = |s: &str| serde_json::from_str::<InitialCondition>(s).unwrap();
        assert_eq!(parse("0.2"), InitialCondition::Constant(0.2));
        assert_eq!(parse("[0.1, 0.3]"), InitialCondition::PerAtom(vec![0.1, 0.3]));
        assert_eq!(parse("\"ones\""), InitialCondition::Ones);
        assert_eq!(parse("\"eigen_threshold:0.05\""), InitialCondition::EigenThreshold(0.05));
        assert!(serde_json::from_str::<InitialCondition>("\"zeros\"").is_err());
        assert!(serde_json::from_str::<InitialCondition>("\"eigen_threshold:x\"").is_err());
        for ic in [
            InitialCondition::Constant(0.2),
            InitialCondition::Ones,
            InitialCondition::EigenThreshold(0.05),
        ] {
            let text = serde_json::to_string(&ic).unwrap();
            assert_eq!(serde_json::from_str::<InitialCondition>(&text).unwrap(), ic);
        }
    }

    #[test]
    fn simulate_one_group() {
        let loaded = load(ONE_GROUP);
        let mut buf = Vec::new();
        let summary = simulate(&loaded, &mut buf, false, &Tolerances::default()).unwrap();
        // Still 9e-5 away from the endemic level 0.5 at t = 10.
        let exact = crate::dynamics::one_group_closed_form(2.0, 0.1, 10.0).unwrap();
        assert_relative_eq!(summary.final_prevalence, exact, epsilon = 1e-9);
        assert_relative_eq!(summary.distance_to_equilibrium.unwrap(), 0.5 - exact, epsilon = 1e-9);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,prevalence\n0,0.1\n"));
    }

    #[test]
    fn perfect_vaccine_flips_regime() {
        let loaded = load(
            r#"{
            "kernel": {"type": "matrix", "k": [[2.0]], "gamma": [1.0]},
            "initial_condition": 0.5,
            "horizon": 30.0,
            "vaccination": {"kind": "perfect", "eta0": [0.4]}
        }"#,
        );
        let tol = Tolerances::default();
        let rep = vaccinate(&loaded, &tol).unwrap();
        assert_relative_eq!(rep.r0_base, 2.0, epsilon = 1e-12);
        assert_relative_eq!(rep.r0_vaccinated, 0.8, epsilon = 1e-12);
        assert_eq!(rep.regime, Regime::Subcritical);
        let summary = simulate(&loaded, std::io::sink(), false, &tol).unwrap();
        assert_eq!(summary.regime, Regime::Subcritical);
        assert!(summary.final_prevalence < 1e-2);
    }

    #[test]
    fn product_vaccination_scenario() {
        let loaded = load(
            r#"{
            "kernel": {"type": "matrix", "k": [[3.0]], "gamma": [1.0]},
            "initial_condition": 0.2,
            "horizon": 1.0,
            "vaccination": {
                "kind": "product",
                "mechanism": "all_or_nothing",
                "efficacy": [[0.0, 0.5]],
                "infectiousness_reduction": [[0.0, 0.2]],
                "policy": [[0.5, 0.5]]
            }
        }"#,
        );
        let rep = vaccinate(&loaded, &Tolerances::default()).unwrap();
        assert_relative_eq!(rep.r0_vaccinated, 2.1, epsilon = 1e-10);
        assert_relative_eq!(rep.r0_leaky.unwrap(), 2.1, epsilon = 1e-10);
        let init = loaded.initial_state().unwrap();
        assert_eq!(init.as_slice(), &[0.2, 0.0]);
    }

    #[test]
    fn chain_analysis_reports_gelfand_value() {
        let rep = analyze(
            &load(r#"{"kernel": {"type": "counterexample_chain", "n": 100}}"#),
            &Tolerances::default(),
        )
        .unwrap();
        assert!(rep.r0.is_none() && rep.regime.is_none());
        let g = rep.gelfand_sequence.unwrap();
        assert_eq!(g.n, 10_000);
        assert!(g.value > 1.0 && g.value < 1.01);
        assert!(rep.caveats[0].starts_with("truncated-spectrum"));
    }

    #[test]
    fn graphon_scenarios_report_degrees() {
        let rep = analyze(
            &load(
                r#"{"kernel": {"type": "constant_graphon", "p": 0.5, "beta": 1.0,
                    "theta": 1.0, "gamma": 1.0, "n": 4}}"#,
            ),
            &Tolerances::default(),
        )
        .unwrap();
        assert_relative_eq!(rep.r0.unwrap(), 0.5, epsilon = 1e-12);
        let b = rep.r0_bounds.unwrap();
        assert_relative_eq!(b.lower.unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(b.upper, 0.5, epsilon = 1e-12);
        assert_relative_eq!(rep.degrees.unwrap().mean_degree, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn rejects_malformed_scenarios() {
        assert!(Scenario::from_json("{").is_err());
        assert!(Scenario::from_json(r#"{"kernel": {"type": "matrix", "k": [[1]], "gamma": [1]}, "horizon": -1}"#).is_err());
        assert!(Scenario::from_json(r#"{"kernel": {"type": "nope"}}"#).is_err());
        assert!(Scenario::from_json(r#"{"kernel": {"csv": {"kappa": "k.csv", "gamma": "g.csv"}, "extra": 1}}"#).is_err());
        let bad = Scenario::from_json(r#"{"kernel": {"type": "matrix", "k": [[1]], "gamma": [0]}}"#)
            .unwrap()
            .resolve(PathBuf::new());
        assert!(matches!(bad, Err(Error::NonPositiveRecovery { .. })));
    }

    #[test]
    fn tolerance_override() {
        let tol = Tolerances::with_tol(1e-6).unwrap();
        assert_eq!(tol.spectral.rel_tol, 1e-6);
        assert_eq!(tol.equilibrium.residual_tol, 1e-6);
        assert!(Tolerances::with_tol(0.0).is_err());
        assert!(Tolerances::with_tol(f64::NAN).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::InvalidValue("x".into())), 2);
        assert_eq!(
            exit_code(&Error::NotConverged {
                what: "x",
                iterations: 1,
                residual: 1.0
            }),
            3
        );
    }
}
