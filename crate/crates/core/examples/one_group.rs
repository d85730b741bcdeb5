// One homogeneous group: RK4 against the logistic closed form, in the
// supercritical and critical cases.

use graphon_sis::dynamics::{integrate, one_group_closed_form, StateVector};
use graphon_sis::{KernelModel, Matrix, Result};

fn main() -> Result<()> {
    for (k, v0) in [(2.0, 0.1), (1.0, 0.5)] {
        let model = KernelModel::from_matrix(Matrix::from_rows(vec![vec![k]])?, vec![1.0])?;
        let traj = integrate(&model, &StateVector::new(vec![v0])?, 10.0, 1e-3)?;
        println!("K = {k}, U0 = {v0}");
        for t in [1.0, 2.0, 5.0, 10.0] {
            let numeric = traj.state_at(t)[0];
            let exact = one_group_closed_form(k, v0, t)?;
            println!("  t = {t:>4}: rk4 {numeric:.10}  exact {exact:.10}  gap {:.1e}", (numeric - exact).abs());
        }
    }
    Ok(())
}
