// Sub-, critical and supercritical behaviour of one group, and the
// exponential extinction rate of a subcritical multi-group model.

use graphon_sis::dynamics::{integrate, StateVector};
use graphon_sis::{classify_regime, spectral_bound, KernelModel, Matrix, Result};

fn main() -> Result<()> {
    for k in [0.5, 1.0, 2.0] {
        let model = KernelModel::from_matrix(Matrix::from_rows(vec![vec![k]])?, vec![1.0])?;
        let d = classify_regime(&model)?;
        println!("K = {k}: {:?} (R0 = {}, s = {})", d.regime, d.r0, d.spectral_bound);
    }

    let kappa = Matrix::from_fn(4, 4, |i, j| 0.1 + 0.05 * ((i * 3 + j) % 4) as f64);
    let model = KernelModel::from_matrix(kappa, vec![1.0, 1.2, 0.9, 1.5])?;
    let s = spectral_bound(&model)?;
    let traj = integrate(&model, &StateVector::ones(4), 30.0, 0.01)?;
    let sup = |t: f64| traj.state_at(t).into_iter().fold(0.0, f64::max);
    let slope = (sup(30.0).ln() - sup(10.0).ln()) / 20.0;
    println!("subcritical 4 groups: s = {s:.6}, observed decay rate {slope:.6}");
    Ok(())
}
