// Maximal equilibrium by monotone iteration, compared with long-time
// integration from above (all infected) and from below (threshold
// eigenvector).

use graphon_sis::dynamics::{integrate_with, StateVector};
use graphon_sis::linalg::sup_norm;
use graphon_sis::{eigen_threshold, maximal_equilibrium, KernelModel, Matrix, Result};

fn main() -> Result<()> {
    let kappa = Matrix::from_rows(vec![
        vec![1.2, 0.4, 0.0],
        vec![0.3, 0.8, 0.6],
        vec![0.1, 0.5, 1.5],
    ])?;
    let model = KernelModel::from_matrix(kappa, vec![0.5, 0.6, 0.7])?;
    let eq = maximal_equilibrium(&model)?;
    println!("g* = {:?}", eq.g_star.as_slice());
    println!("residual {:.2e}, {} iterations, regime {:?}", eq.residual, eq.iterations, eq.regime);

    let from_above = integrate_with(&model, &StateVector::ones(3), 200.0, 0.01, 1000)?;
    let low = eigen_threshold(&model, 0.05)?;
    let from_below = integrate_with(&model, &StateVector::new_clamped(low.w.clone())?, 200.0, 0.01, 1000)?;
    for (name, traj) in [("ones", &from_above), ("threshold", &from_below)] {
        let gap: Vec<f64> = traj
            .final_state()
            .as_slice()
            .iter()
            .zip(eq.g_star.as_slice())
            .map(|(a, b)| a - b)
            .collect();
        println!("start {name:<9}: |u(200) - g*| = {:.2e}", sup_norm(&gap));
    }
    println!("threshold pair: lambda = {:.6}, residual {:.1e}", low.lambda, low.residual);
    Ok(())
}
