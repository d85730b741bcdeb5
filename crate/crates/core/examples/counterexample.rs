// The critical chain kernel: a continuum of equilibria although R0 = 1.

use graphon_sis::dynamics::counterexample_sequence;
use num_rational::Ratio;
use graphon_sis::{counterexample_equilibria, gelfand_sequence, Result};

fn main() -> Result<()> {
    for alpha in [0.0, 0.25, 0.5, 0.6] {
        let rep = counterexample_equilibria(alpha, 1000)?;
        println!(
            "alpha = {alpha}: first terms {:?}, blow-up at {:?}, residual {:.1e}, equilibrium {}",
            &rep.values[..4],
            rep.first_blowup,
            rep.residual,
            rep.is_equilibrium
        );
    }
    let exact = counterexample_sequence(Ratio::new(1i64, 2), 6);
    let shown: Vec<String> = exact.iter().map(|r| r.to_string()).collect();
    println!("alpha = 1/2 in exact arithmetic: {}", shown.join(", "));
    for n in [10, 100, 1000, 10_000] {
        println!("Gelfand sequence at {n:>5}: {:.8}", gelfand_sequence(n)?);
    }
    Ok(())
}
