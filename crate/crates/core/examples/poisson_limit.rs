//! Binomial(N, x/N) against Poisson(x), before and after removing the 1/N term.

use szasz_lab::asymptotics::{
    binomial_pmf_scaled, default_grid, first_order_pmf_correction, poisson_pmf, poisson_refinement,
};

fn main() -> szasz_lab::Result<()> {
    println!("x = 1, N = 10, k = 0: {:.10} vs {:.10}", binomial_pmf_scaled(10, 1.0, 0), poisson_pmf(1.0, 0));
    let r = poisson_refinement(1.0, 12, &default_grid())?;
    for row in &r.rows {
        println!(
            "N = {:5}  sup |diff| = {:.3e} at k = {}  after correction {:.3e}",
            row.n, row.sup_residual, row.argmax_k, row.sup_corrected
        );
    }
    println!("slopes: {:?} -> {:?}", r.slope, r.corrected_slope);
    for k in 0..4 {
        println!("a_{k}: fitted {:+.10}  formula {:+.10}", r.first_order[k], first_order_pmf_correction(1.0, k as u32));
    }
    Ok(())
}
