//! Budget sweep on a synthetic Gaussian-mixture instance.
//!
//! Usage: `cargo run --release --example fig4 -- [n] [budget_max] [step]`

use supermodular_core::coverage::{build_coverage_objective, eps_percentile, gen_gaussian_mixture};
use supermodular_core::minimize::{coverage_experiment, CuttingPlaneOptions, KindsMode};

fn main() -> supermodular_core::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let n = args.first().copied().unwrap_or(400);
    let top = args.get(1).copied().unwrap_or(160);
    let step = args.get(2).copied().unwrap_or(10);
    let pts = gen_gaussian_mixture(n, 32, 10, 42)?;
    let eps = eps_percentile(&pts, 0.9)?;
    let (inst, g) = build_coverage_objective(pts, eps)?;
    let budgets: Vec<usize> = (step..=top).step_by(step).collect();
    let t = std::time::Instant::now();
    let res = coverage_experiment(&inst, &g, &budgets, KindsMode::Both, &CuttingPlaneOptions::default())?;
    println!("eps {eps:.4} gamma {:.6}", res.gamma);
    println!("{:>6} {:>12} {:>12} {:>9} {:>6} {:>6}", "C", "margin", "joint", "greedy", "it_m", "it_j");
    for r in &res.rows {
        println!(
            "{:>6} {:>12.3} {:>12.3} {:>9} {:>6} {:>6}",
            r.budget,
            r.lp_bound_margin.unwrap_or(f64::NAN),
            r.lp_bound_joint.unwrap_or(f64::NAN),
            r.greedy_value,
            r.iters_margin.unwrap_or(0),
            r.iters_joint.unwrap_or(0)
        );
    }
    println!("total {:.1}s", t.elapsed().as_secs_f64());
    Ok(())
}
