// Lockdowns as graphon modifications: perfect and partial lockdowns and
// the degree bounds on R0 after lockdown.

use graphon_sis::lockdown::lockdown_report;
use graphon_sis::{KernelSpec, Matrix, Result};

fn main() -> Result<()> {
    let before = KernelSpec::Sbm {
        masses: vec![0.5, 0.5],
        w: Matrix::from_rows(vec![vec![1.0, 0.2], vec![0.2, 0.4]])?,
        beta: vec![3.0; 2],
        theta: vec![1.0; 2],
        gamma: vec![1.0; 2],
    }
    .graphon_form()?;

    let candidates = [
        ("halve block 1", vec![vec![0.5, 0.2], vec![0.2, 0.4]]),
        ("flatten", vec![vec![0.45, 0.45], vec![0.45, 0.45]]),
        ("reshuffle", vec![vec![0.3, 0.5], vec![0.5, 0.3]]),
    ];
    for (name, rows) in candidates {
        let rep = lockdown_report(&before, &Matrix::from_rows(rows)?)?;
        println!(
            "{name:<14} perfect {:<5} partial {:<5} R0 {:.4} -> {:.4} in [{:.4}, {:.4}]",
            rep.perfect, rep.partial, rep.r0_before, rep.r0_after, rep.lower_bound, rep.upper_bound
        );
    }
    Ok(())
}
