//! Kernel families: explicit matrices, graphs, graphons (general, constant,
//! stochastic block, geometric) and the critical chain kernel.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{DiscreteSpace, KernelModel};
use crate::linalg::Matrix;

const SYMMETRY_TOL: f64 = 1e-12;

/// Declarative description of a kernel. Graphon values are supplied already
/// sampled on the atom grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `kappa = k` as given.
    Matrix {
        k: Matrix,
        gamma: Vec<f64>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
    /// `kappa[i][j] = beta_i * theta_j` on the edges of a graph.
    Graph {
        adjacency: Matrix,
        beta: Vec<f64>,
        theta: Vec<f64>,
        gamma: Vec<f64>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
    /// `kappa[i][j] = beta_i * w[i][j] * theta_j * mu_j`.
    Graphon {
        w: Matrix,
        beta: Vec<f64>,
        theta: Vec<f64>,
        gamma: Vec<f64>,
        weights: Vec<f64>,
    },
    /// `w = p` on `n` atoms of mass `1/n`.
    ConstantGraphon {
        p: f64,
        beta: f64,
        theta: f64,
        gamma: f64,
        n: usize,
    },
    /// One atom per block, weighted by the block mass.
    Sbm {
        masses: Vec<f64>,
        w: Matrix,
        beta: Vec<f64>,
        theta: Vec<f64>,
        gamma: Vec<f64>,
    },
    /// `w[i][j] = f(x_i - x_j)` on the uniform circle grid
    /// `x_i = 2 pi (i - 1/2) / n`; `f[k]` is `f` at offset `2 pi k / n`.
    Geometric {
        f: Vec<f64>,
        beta: f64,
        theta: f64,
        gamma: f64,
    },
    /// `kappa[i][i+1] = (2i+2)/(2i-1)` (1-based), `gamma = 1`; critical in the
    /// infinite limit but nilpotent once truncated.
    CounterexampleChain {
        n: usize,
        #[serde(default)]
        weights: Option<Vec<f64>>,
    },
}

/// `(mu, W, beta, theta, gamma)` of a graphon-form kernel on atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphonForm {
    pub weights: Vec<f64>,
    pub w: Matrix,
    pub beta: Vec<f64>,
    pub theta: Vec<f64>,
    pub gamma: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeReport {
    pub degrees: Vec<f64>,
    pub mean_degree: f64,
}

impl KernelSpec {
    /// Geometric graphon from a function on `(-pi, pi]` sampled at the grid offsets.
    pub fn geometric_from_fn(
        n: usize,
        f: impl Fn(f64) -> f64,
        beta: f64,
        theta: f64,
        gamma: f64,
    ) -> Self {
        let f = (0..n)
            .map(|k| {
                let mut r = 2.0 * PI * k as f64 / n as f64;
                if r > PI {
                    r -= 2.0 * PI;
                }
                f(r)
            })
            .collect();
        KernelSpec::Geometric {
            f,
            beta,
            theta,
            gamma,
        }
    }

    pub fn is_graphon_form(&self) -> bool {
        matches!(
            self,
            KernelSpec::Graphon { .. }
                | KernelSpec::ConstantGraphon { .. }
                | KernelSpec::Sbm { .. }
                | KernelSpec::Geometric { .. }
        )
    }

    /// Expands any graphon variant to per-atom arrays; validates it.
    pub fn graphon_form(&self) -> Result<GraphonForm> {
        let form = match self {
            KernelSpec::Graphon {
                w,
                beta,
                theta,
                gamma,
                weights,
            } => GraphonForm {
                weights: weights.clone(),
                w: w.clone(),
                beta: beta.clone(),
                theta: theta.clone(),
                gamma: gamma.clone(),
            },
            KernelSpec::ConstantGraphon {
                p,
                beta,
                theta,
                gamma,
                n,
            } => GraphonForm {
                weights: vec![1.0 / *n as f64; *n],
                w: Matrix::from_fn(*n, *n, |_, _| *p),
                beta: vec![*beta; *n],
                theta: vec![*theta; *n],
                gamma: vec![*gamma; *n],
            },
            KernelSpec::Sbm {
                masses,
                w,
                beta,
                theta,
                gamma,
            } => GraphonForm {
                weights: masses.clone(),
                w: w.clone(),
                beta: beta.clone(),
                theta: theta.clone(),
                gamma: gamma.clone(),
            },
            KernelSpec::Geometric {
                f,
                beta,
                theta,
                gamma,
            } => {
                let n = f.len();
                GraphonForm {
                    weights: vec![1.0 / n as f64; n],
                    w: Matrix::from_fn(n, n, |i, j| f[(i + n - j) % n]),
                    beta: vec![*beta; n],
                    theta: vec![*theta; n],
                    gamma: vec![*gamma; n],
                }
            }
            _ => return Err(Error::NotGraphonForm),
        };
        form.check()?;
        Ok(form)
    }

    /// Builds the kernel model described by this spec.
    pub fn build(&self) -> Result<KernelModel> {
        match self {
            KernelSpec::Matrix { k, gamma, weights } => {
                let space = space_or_uniform(weights.as_deref(), k.rows())?;
                KernelModel::new(space, k.clone(), gamma.clone())
            }
            KernelSpec::Graph {
                adjacency,
                beta,
                theta,
                gamma,
                weights,
            } => {
                let n = adjacency.rows();
                check_len(beta, n)?;
                check_len(theta, n)?;
                check_nonneg("beta", beta)?;
                check_nonneg("theta", theta)?;
                for (i, j, a) in adjacency.iter_entries() {
                    if a != 0.0 && a != 1.0 {
                        return Err(Error::InvalidValue(format!(
                            "adjacency entry ({i}, {j}) must be 0 or 1, got {a}"
                        )));
                    }
                }
                let kappa = Matrix::from_fn(n, n, |i, j| beta[i] * adjacency[(i, j)] * theta[j]);
                let space = space_or_uniform(weights.as_deref(), n)?;
                KernelModel::new(space, kappa, gamma.clone())
            }
            KernelSpec::CounterexampleChain { n, weights } => {
                if *n == 0 {
                    return Err(Error::InvalidValue("chain needs at least one atom".into()));
                }
                let kappa = Matrix::from_fn(*n, *n, |i, j| {
                    if j == i + 1 {
                        chain_rate(i + 1)
                    } else {
                        0.0
                    }
                });
                let space = space_or_uniform(weights.as_deref(), *n)?;
                KernelModel::new(space, kappa, vec![1.0; *n])
            }
            _ => self.graphon_form()?.to_model(),
        }
    }

    /// Degrees `deg_i = sum_j W_ij mu_j` and mean degree, with `mu`
    /// normalized to total mass one.
    pub fn degrees(&self) -> Result<DegreeReport> {
        Ok(self.graphon_form()?.degrees())
    }
}

/// Rate `kappa(i, {i+1}) = (2i+2)/(2i-1)` of the chain kernel, 1-based `i`.
pub fn chain_rate(i: usize) -> f64 {
    let i = i as f64;
    (2.0 * i + 2.0) / (2.0 * i - 1.0)
}

impl GraphonForm {
    fn check(&self) -> Result<()> {
        let n = self.weights.len();
        if !self.w.is_square() {
            return Err(Error::NotSquare {
                rows: self.w.rows(),
                cols: self.w.cols(),
            });
        }
        check_len_matrix(&self.w, n)?;
        check_len(&self.beta, n)?;
        check_len(&self.theta, n)?;
        check_len(&self.gamma, n)?;
        check_nonneg("beta", &self.beta)?;
        check_nonneg("theta", &self.theta)?;
        for (i, j, v) in self.w.iter_entries() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidValue(format!(
                    "graphon value ({i}, {j}) = {v} outside [0, 1]"
                )));
            }
            if j > i && (v - self.w[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
        DiscreteSpace::with_weights(self.weights.clone())?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn to_model(&self) -> Result<KernelModel> {
        let n = self.len();
        let kappa = Matrix::from_fn(n, n, |i, j| {
            self.beta[i] * self.w[(i, j)] * self.theta[j] * self.weights[j]
        });
        let space = DiscreteSpace::with_weights(self.weights.clone())?;
        KernelModel::new(space, kappa, self.gamma.clone())
    }

    /// Same form with a different graphon on the same grid.
    pub fn with_graphon(&self, w: Matrix) -> Result<Self> {
        let out = GraphonForm {
            w,
            ..self.clone()
        };
        out.check()?;
        Ok(out)
    }

    pub fn probability_weights(&self) -> Vec<f64> {
        let total: f64 = self.weights.iter().sum();
        self.weights.iter().map(|w| w / total).collect()
    }

    pub fn degrees(&self) -> DegreeReport {
        let mu = self.probability_weights();
        let degrees = self.w.mul_vec(&mu);
        let mean_degree = degrees.iter().zip(&mu).map(|(d, m)| d * m).sum();
        DegreeReport {
            degrees,
            mean_degree,
        }
    }
}

fn space_or_uniform(weights: Option<&[f64]>, n: usize) -> Result<DiscreteSpace> {
    match weights {
        Some(w) => {
            check_len(w, n)?;
            DiscreteSpace::with_weights(w.to_vec())
        }
        None => DiscreteSpace::uniform(n),
    }
}

fn check_len(v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    Ok(())
}

fn check_len_matrix(m: &Matrix, n: usize) -> Result<()> {
    if m.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.rows(),
        });
    }
    Ok(())
}

fn check_nonneg(name: &str, v: &[f64]) -> Result<()> {
    match v.iter().position(|x| !(*x >= 0.0) || !x.is_finite()) {
        Some(i) => Err(Error::InvalidValue(format!(
            "{name}[{i}] = {} must be non-negative",
            v[i]
        ))),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn constant_graphon_kernel() {
        let spec = KernelSpec::ConstantGraphon {
            p: 0.5,
            beta: 1.0,
            theta: 1.0,
            gamma: 1.0,
            n: 4,
        };
        let model = spec.build().unwrap();
        for (_, _, v) in model.kappa().iter_entries() {
            assert_eq!(v, 0.125);
        }
        // T applied to a constant is p times the constant.
        let t = model.apply_t(&[0.3; 4]).unwrap();
        for v in t {
            assert_relative_eq!(v, 0.5 * 0.3, epsilon = 1e-15);
        }
    }

    #[test]
    fn chain_kernel_entries() {
        let model = KernelSpec::CounterexampleChain { n: 3, weights: None }
            .build()
            .unwrap();
        let expected = m(&[&[0.0, 4.0, 0.0], &[0.0, 0.0, 2.0], &[0.0, 0.0, 0.0]]);
        assert_eq!(model.kappa(), &expected);
        assert_eq!(model.gamma(), &[1.0, 1.0, 1.0]);
        assert_eq!(model.apply_t(&[1.0, 1.0, 1.0]).unwrap(), vec![4.0, 2.0, 0.0]);
        assert!(!model.is_connected());
    }

    #[test]
    fn chain_kernel_is_nilpotent() {
        for n in 1..8 {
            let model = KernelSpec::CounterexampleChain { n, weights: None }
                .build()
                .unwrap();
            let mut power = Matrix::identity(n);
            for _ in 0..n {
                power = power.matmul(model.kappa());
            }
            assert!(power.as_slice().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn matrix_spec_is_identity_embedding() {
        let k = m(&[&[1.0, 2.0], &[3.0, 1.0]]);
        let model = KernelSpec::Matrix {
            k: k.clone(),
            gamma: vec![1.0, 1.0],
            weights: None,
        }
        .build()
        .unwrap();
        assert_eq!(model.kappa(), &k);
    }

    #[test]
    fn graph_kernel() {
        let adjacency = m(&[&[0.0, 1.0, 1.0], &[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]]);
        let model = KernelSpec::Graph {
            adjacency,
            beta: vec![1.0, 2.0, 3.0],
            theta: vec![0.5, 1.0, 2.0],
            gamma: vec![1.0; 3],
            weights: None,
        }
        .build()
        .unwrap();
        assert_eq!(model.kappa()[(0, 2)], 2.0);
        assert_eq!(model.kappa()[(1, 0)], 1.0);
        assert_eq!(model.kappa()[(2, 0)], 1.5);
        assert_eq!(model.kappa()[(1, 2)], 0.0);
        assert!(model.is_connected());
    }

    #[test]
    fn non_binary_adjacency_rejected() {
        let spec = KernelSpec::Graph {
            adjacency: m(&[&[0.0, 0.5], &[0.5, 0.0]]),
            beta: vec![1.0; 2],
            theta: vec![1.0; 2],
            gamma: vec![1.0; 2],
            weights: None,
        };
        assert!(spec.build().is_err());
    }

    #[test]
    fn asymmetric_graphon_rejected() {
        let spec = KernelSpec::Graphon {
            w: m(&[&[0.5, 0.2], &[0.3, 0.5]]),
            beta: vec![1.0; 2],
            theta: vec![1.0; 2],
            gamma: vec![1.0; 2],
            weights: vec![0.5; 2],
        };
        assert!(matches!(spec.build(), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn graphon_out_of_range_and_negative_rates_rejected() {
        let base = |w: Matrix, beta: Vec<f64>, weights: Vec<f64>| KernelSpec::Graphon {
            w,
            beta,
            theta: vec![1.0; 2],
            gamma: vec![1.0; 2],
            weights,
        };
        assert!(base(m(&[&[1.5, 0.0], &[0.0, 1.0]]), vec![1.0; 2], vec![0.5; 2])
            .build()
            .is_err());
        assert!(base(m(&[&[1.0, 0.0], &[0.0, 1.0]]), vec![1.0, -1.0], vec![0.5; 2])
            .build()
            .is_err());
        assert!(matches!(
            base(m(&[&[1.0, 0.0], &[0.0, 1.0]]), vec![1.0; 2], vec![0.5, -0.5]).build(),
            Err(Error::NegativeWeight { .. })
        ));
    }

    #[test]
    fn constant_graphon_degrees() {
        let spec = KernelSpec::ConstantGraphon {
            p: 0.3,
            beta: 1.0,
            theta: 1.0,
            gamma: 1.0,
            n: 7,
        };
        let d = spec.degrees().unwrap();
        for v in &d.degrees {
            assert_relative_eq!(*v, 0.3, epsilon = 1e-15);
        }
        assert_relative_eq!(d.mean_degree, 0.3, epsilon = 1e-15);
    }

    #[test]
    fn geometric_indicator_half_circle_degree() {
        // n = 2 mod 4: offsets with |r| <= pi/2 are exactly half of the grid.
        for n in [6, 10, 30, 102] {
            let spec = KernelSpec::geometric_from_fn(
                n,
                |r| if r.abs() <= PI / 2.0 { 1.0 } else { 0.0 },
                1.0,
                1.0,
                1.0,
            );
            let d = spec.degrees().unwrap();
            for v in &d.degrees {
                assert_relative_eq!(*v, 0.5, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn sbm_degrees() {
        let spec = KernelSpec::Sbm {
            masses: vec![0.5, 0.5],
            w: m(&[&[1.0, 0.0], &[0.0, 1.0]]),
            beta: vec![1.0; 2],
            theta: vec![1.0; 2],
            gamma: vec![1.0; 2],
        };
        let d = spec.degrees().unwrap();
        assert_eq!(d.degrees, vec![0.5, 0.5]);
        assert_eq!(d.mean_degree, 0.5);
        assert!(!spec.build().unwrap().is_connected());
    }

    #[test]
    fn degrees_need_graphon_form() {
        let spec = KernelSpec::CounterexampleChain { n: 3, weights: None };
        assert!(matches!(spec.degrees(), Err(Error::NotGraphonForm)));
    }

    #[test]
    fn spec_json_round_trip() {
        let spec: KernelSpec = serde_json::from_str(
            r#"{"type": "constant_graphon", "p": 0.5, "beta": 1, "theta": 1, "gamma": 1, "n": 3}"#,
        )
        .unwrap();
        assert_eq!(spec.build().unwrap().len(), 3);
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<KernelSpec>(&s).unwrap(), spec);
    }
}
