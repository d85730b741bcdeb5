// Kernel families in graphon form: constant, stochastic block, geometric
// and graph kernels, with degrees and the degree bounds on R0.

use graphon_sis::{r0, r0_bounds, KernelSpec, Matrix, Result};

fn report(name: &str, spec: &KernelSpec) -> Result<()> {
    let r = r0(&spec.build()?)?;
    let (lo, hi) = r0_bounds(spec)?;
    let deg = spec.degrees()?;
    println!("{name:<10} R0 = {r:.10}  bounds [{lo:.6}, {hi:.6}]  mean degree {:.4}", deg.mean_degree);
    Ok(())
}

fn main() -> Result<()> {
    report(
        "constant",
        &KernelSpec::ConstantGraphon { p: 0.5, beta: 1.0, theta: 1.0, gamma: 1.0, n: 10 },
    )?;
    report(
        "sbm",
        &KernelSpec::Sbm {
            masses: vec![0.5, 0.5],
            w: Matrix::from_rows(vec![vec![1.0, 0.2], vec![0.2, 0.4]])?,
            beta: vec![1.0; 2],
            theta: vec![1.0; 2],
            gamma: vec![1.0; 2],
        },
    )?;
    // Mean 0.8 on the circle: R0 = 0.8 * beta theta / gamma whatever the shape.
    let geo = KernelSpec::geometric_from_fn(64, |r| 0.8 + 0.2 * r.cos(), 2.0, 1.0, 1.0);
    report("geometric", &geo)?;

    // A 5-cycle as a graph kernel: kappa = beta A theta.
    let ring = Matrix::from_fn(5, 5, |i, j| if (i + 1) % 5 == j || (j + 1) % 5 == i { 1.0 } else { 0.0 });
    let graph = KernelSpec::Graph {
        adjacency: ring,
        beta: vec![0.3; 5],
        theta: vec![1.0; 5],
        gamma: vec![1.0; 5],
        weights: None,
    };
    println!("{:<10} R0 = {:.10}", "5-cycle", r0(&graph.build()?)?);
    println!("scenario form: {}", serde_json::to_string(&graph).expect("serializable"));
    Ok(())
}
