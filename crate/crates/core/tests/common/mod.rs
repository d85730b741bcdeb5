//! Random model generators and property checks shared by the property
//! suites and the acceptance runner.
#![allow(dead_code)]

use graphon_sis::dynamics::{default_dt, integrate, maximal_equilibrium, vector_field, StateVector};
use graphon_sis::spectral::{collatz_wielandt_bounds, spectral_radius};
use graphon_sis::{r0, spectral_bound, DiscreteSpace, KernelModel, Matrix};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::Rng;

pub type CheckResult = Result<(), TestCaseError>;

// ---- proptest strategies ----

fn square(n: usize, entry: BoxedStrategy<f64>) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop::collection::vec(entry, n), n)
        .prop_map(|rows| Matrix::from_rows(rows).unwrap())
}

/// Sparse non-negative entries: about a third are exactly zero.
pub fn sparse_entry() -> BoxedStrategy<f64> {
    prop_oneof![1 => Just(0.0), 2 => 0.0..2.0f64].boxed()
}

pub fn arb_matrix(max_n: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_n).prop_flat_map(|n| square(n, sparse_entry()))
}

/// Square matrix together with a non-negative perturbation of the same size.
pub fn arb_matrix_pair(max_n: usize) -> impl Strategy<Value = (Matrix, Matrix)> {
    (1..=max_n).prop_flat_map(|n| (square(n, sparse_entry()), square(n, sparse_entry())))
}

fn model_from(kappa: Matrix, gamma: Vec<f64>, weights: Vec<f64>) -> KernelModel {
    KernelModel::new(DiscreteSpace::with_weights(weights).unwrap(), kappa, gamma).unwrap()
}

/// Models with sparse kernels, recovery in `[0.2, 2]` and positive weights.
pub fn arb_model(max_n: usize) -> impl Strategy<Value = KernelModel> {
    (1..=max_n).prop_flat_map(|n| {
        (
            square(n, sparse_entry()),
            prop::collection::vec(0.2..2.0f64, n),
            prop::collection::vec(0.1..1.0f64, n),
        )
            .prop_map(|(k, g, w)| model_from(k, g, w))
    })
}

/// Dense positive kernels, hence connected.
pub fn arb_connected_model(max_n: usize) -> impl Strategy<Value = KernelModel> {
    (1..=max_n).prop_flat_map(|n| {
        (
            square(n, (0.05..2.0f64).boxed()),
            prop::collection::vec(0.2..2.0f64, n),
            prop::collection::vec(0.1..1.0f64, n),
        )
            .prop_map(|(k, g, w)| model_from(k, g, w))
    })
}

/// Model rescaled to a reproduction number drawn around the threshold.
pub fn arb_model_near_threshold(max_n: usize) -> impl Strategy<Value = KernelModel> {
    (arb_connected_model(max_n), prop_oneof![0.1..3.0f64, 0.95..1.05f64])
        .prop_map(|(m, target)| scale_to_r0(&m, target))
}

pub fn arb_state(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 1 => Just(1.0), 4 => 0.0..=1.0f64], n)
}

/// Model with two states `g <= h` in the unit box.
pub fn arb_model_with_ordered_states(
    max_n: usize,
) -> impl Strategy<Value = (KernelModel, Vec<f64>, Vec<f64>)> {
    arb_model(max_n).prop_flat_map(|m| {
        let n = m.len();
        (Just(m), arb_state(n), prop::collection::vec(0.0..=1.0f64, n)).prop_map(
            |(m, g, frac)| {
                let h = g.iter().zip(&frac).map(|(a, f)| a + f * (1.0 - a)).collect();
                (m, g, h)
            },
        )
    })
}

pub fn arb_model_with_state(max_n: usize) -> impl Strategy<Value = (KernelModel, Vec<f64>)> {
    arb_model(max_n).prop_flat_map(|m| {
        let n = m.len();
        (Just(m), arb_state(n))
    })
}

// ---- seeded generators ----

pub fn scale_to_r0(model: &KernelModel, target: f64) -> KernelModel {
    let current = r0(model).unwrap();
    let factor = target / current;
    model.with_kappa(model.kappa().map(|v| v * factor)).unwrap()
}

/// Dense random kernel `kappa_ij ~ U(0, 1)`, recovery in `gamma_range`,
/// uniform weights, rescaled to reproduction number `target`.
pub fn random_connected_model<R: Rng>(
    rng: &mut R,
    n: usize,
    gamma_range: (f64, f64),
    target: f64,
) -> KernelModel {
    let kappa = Matrix::from_fn(n, n, |_, _| rng.gen_range(0.01..1.0));
    let gamma = (0..n).map(|_| rng.gen_range(gamma_range.0..gamma_range.1)).collect();
    scale_to_r0(&KernelModel::from_matrix(kappa, gamma).unwrap(), target)
}

pub fn random_symmetric_graphon<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..=1.0) };
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    w
}

// ---- checks ----

pub fn le_all(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| *x <= y + tol)
}

/// Every recorded state stays in the unit box; overshoot beyond 1e-9
/// before clamping makes `integrate` fail.
pub fn check_box_invariance(model: &KernelModel, g0: &[f64]) -> CheckResult {
    let traj = integrate(model, &StateVector::new(g0.to_vec()).unwrap(), 5.0, default_dt(model))
        .map_err(|e| TestCaseError::fail(format!("integration failed: {e}")))?;
    for s in &traj.states {
        prop_assert!(s.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
    }
    Ok(())
}

pub fn check_order_preservation(model: &KernelModel, g: &[f64], h: &[f64]) -> CheckResult {
    let dt = default_dt(model);
    let tg = integrate(model, &StateVector::new(g.to_vec()).unwrap(), 5.0, dt).unwrap();
    let th = integrate(model, &StateVector::new(h.to_vec()).unwrap(), 5.0, dt).unwrap();
    for (a, b) in tg.states.iter().zip(&th.states) {
        prop_assert!(le_all(a.as_slice(), b.as_slice(), 1e-8), "{:?} !<= {:?}", a, b);
    }
    Ok(())
}

/// Checks monotonicity of each component and of the prevalence, in the
/// direction given by `increasing`.
pub fn check_monotone(model: &KernelModel, g0: &[f64], increasing: bool) -> CheckResult {
    let traj = integrate(model, &StateVector::new(g0.to_vec()).unwrap(), 5.0, default_dt(model)).unwrap();
    let sign = if increasing { 1.0 } else { -1.0 };
    for w in traj.states.windows(2) {
        for (a, b) in w[0].as_slice().iter().zip(w[1].as_slice()) {
            prop_assert!(sign * (b - a) >= -1e-9, "component moved the wrong way: {a} -> {b}");
        }
    }
    for w in traj.prevalence.windows(2) {
        prop_assert!(sign * (w[1] - w[0]) >= -1e-9);
    }
    Ok(())
}

/// Starting points with a signed field: `s g*` (field >= 0) and the all-ones
/// state (field <= 0).
pub fn check_monotone_trajectories(model: &KernelModel, s: f64) -> CheckResult {
    let eq = maximal_equilibrium(model).unwrap();
    let below: Vec<f64> = eq.g_star.as_slice().iter().map(|v| s * v).collect();
    let f = vector_field(model, &below).unwrap();
    prop_assert!(f.iter().all(|v| *v >= -1e-9));
    check_monotone(model, &below, true)?;
    let ones = vec![1.0; model.len()];
    prop_assert!(vector_field(model, &ones).unwrap().iter().all(|v| *v <= 0.0));
    check_monotone(model, &ones, false)
}

pub fn check_cw_bracket(a: &Matrix, x: &[f64]) -> CheckResult {
    let r = spectral_radius(a).unwrap().radius;
    let (lo, hi) = collatz_wielandt_bounds(a, x);
    let tol = 1e-9 * r.max(1.0);
    prop_assert!(lo <= r + tol && r <= hi + tol, "{lo} <= {r} <= {hi} fails");
    Ok(())
}

pub fn check_radius_monotone(a: &Matrix, extra: &Matrix) -> CheckResult {
    let b = Matrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)] + extra[(i, j)]);
    let ra = spectral_radius(a).unwrap().radius;
    let rb = spectral_radius(&b).unwrap().radius;
    prop_assert!(ra <= rb + 1e-9 * rb.max(1.0), "r(A) = {ra} > r(B) = {rb}");
    Ok(())
}

pub fn check_sign_equivalence(model: &KernelModel) -> CheckResult {
    let r = r0(model).unwrap();
    let s = spectral_bound(model).unwrap();
    if r > 1.0 + 1e-8 {
        prop_assert!(s > 0.0, "R0 = {r} but s = {s}");
    }
    if r < 1.0 - 1e-8 {
        prop_assert!(s < 0.0, "R0 = {r} but s = {s}");
    }
    if s.abs() > 1e-8 {
        prop_assert_eq!(s > 0.0, r > 1.0, "s = {}, R0 = {}", s, r);
    }
    Ok(())
}

pub fn check_r0_s_inequality(model: &KernelModel) -> CheckResult {
    let r = r0(model).unwrap();
    let s = spectral_bound(model).unwrap();
    prop_assert!(s <= (model.gamma_sup() * (r - 1.0)).max(0.0) + 1e-9);
    Ok(())
}
