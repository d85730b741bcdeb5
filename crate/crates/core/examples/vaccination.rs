// Perfect, leaky and all-or-nothing vaccination of a two-group population.

use graphon_sis::dynamics::{integrate, maximal_equilibrium};
use graphon_sis::vaccination::total_prevalence;
use graphon_sis::{
    build_perfect_vaccine_model, build_vaccinated_model, r0, r0_vaccinated, KernelModel, Matrix,
    Mechanism, Result, VaccinationPolicy, VaccineSet,
};

fn main() -> Result<()> {
    let base = KernelModel::new(
        graphon_sis::DiscreteSpace::with_weights(vec![0.6, 0.4])?,
        Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 3.0]])?,
        vec![1.0, 1.0],
    )?;
    println!("base R0 = {:.6}", r0(&base)?);

    let perfect = build_perfect_vaccine_model(&base, &[0.3, 0.3])?;
    println!("perfect vaccine, 70% coverage: R0 = {:.6}", r0(&perfect)?);

    let vaccines = VaccineSet::new(
        Matrix::from_rows(vec![vec![0.0, 0.7], vec![0.0, 0.5]])?,
        Matrix::from_rows(vec![vec![0.0, 0.3], vec![0.0, 0.3]])?,
        None,
    )?;
    let policy = VaccinationPolicy::new(Matrix::from_rows(vec![vec![0.5, 0.5], vec![0.2, 0.8]])?)?;
    for mech in [Mechanism::Leaky, Mechanism::AllOrNothing] {
        let product = build_vaccinated_model(&base, &vaccines, &policy, mech)?;
        let eq = maximal_equilibrium(&product.model)?;
        let g0 = product.initial_state(&[0.1, 0.1])?;
        let traj = integrate(&product.model, &g0, 30.0, 0.01)?;
        let last = product.infected(traj.final_state().as_slice());
        println!(
            "{mech:?}: R0 = {:.10}, endemic prevalence {:.6}, prevalence at t = 30 {:.6}",
            r0_vaccinated(&base, &vaccines, &policy, mech)?,
            total_prevalence(&product, &product.infected(eq.g_star.as_slice()))?,
            total_prevalence(&product, &last)?,
        );
    }
    Ok(())
}
