// R0 and the spectral bound of a two-group kernel, with the
// Collatz–Wielandt certificate and the Perron vectors.

use graphon_sis::spectral::{perron_vectors, spectral_radius};
use graphon_sis::{r0, spectral_bound, KernelModel, Matrix, Result};

fn main() -> Result<()> {
    let kappa = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 1.0]])?;
    let model = KernelModel::from_matrix(kappa, vec![1.0, 1.0])?;

    let res = spectral_radius(&model.next_generation())?;
    println!("R0            = {:.12} (1 + sqrt 6 = {:.12})", res.radius, 1.0 + 6f64.sqrt());
    println!("bracket       = [{:.12}, {:.12}] after {} iterations", res.cw_lower, res.cw_upper, res.iterations);
    println!("r0()          = {:.12}", r0(&model)?);
    println!("spectral bound = {:.12}", spectral_bound(&model)?);

    let pv = perron_vectors(&model)?;
    println!("right vector  = {:?}", pv.right_vector);
    println!("left vector   = {:?}", pv.left_vector.unwrap_or_default());

    // Non-uniform recovery: R0 and s change sign together.
    let slow = KernelModel::from_matrix(
        Matrix::from_rows(vec![vec![0.5, 0.2], vec![0.1, 0.3]])?,
        vec![0.4, 2.0],
    )?;
    println!("slow recovery: R0 = {:.6}, s = {:.6}", r0(&slow)?, spectral_bound(&slow)?);
    Ok(())
}
