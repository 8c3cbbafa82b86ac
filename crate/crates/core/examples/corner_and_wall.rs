//! Corner and wall dilations converging to the unit Szasz operator.

use szasz_lab::asymptotics::{corner_b1_fit, corner_convergence, default_grid, doubling_grid, wall_convergence};
use szasz_lab::{TestFunction, ToricModel, TruncationPolicy};

fn main() -> szasz_lab::Result<()> {
    let p = TruncationPolicy::default();
    let grid = default_grid();
    let bump = TestFunction::from_spec("cosine-window:1:2", 1)?;
    let t2 = TestFunction::from_spec("t^2", 1)?;
    for model in [ToricModel::fubini_study(1), ToricModel::bergman_ball(1), ToricModel::bargmann_fock(1)] {
        let c = corner_convergence(&model, &bump, &[0.7], &grid, &p)?;
        println!("{:<16} corner, bump: limit {:.12}, slope {:?}", model.name(), c.limit, c.slope);
        let r = corner_b1_fit(&model, &t2, &[0.7], &grid, &p)?;
        println!(
            "{:<16} corner, t^2: c0 = {:.10} (limit {:.10}), c1 = {:+.8}, b1 formula = {:+.8}, same sign: {}",
            "",
            r.fit.c0(),
            r.limit,
            r.c1_fitted,
            r.b1_formula,
            r.sign_agrees
        );
    }
    let cp1xcp1 = ToricModel::from_name("product:fubini-study-cp1xfubini-study-cp1")?;
    let f = TestFunction::from_spec("cosine-window:1:2", 2)?;
    let w = wall_convergence(&cp1xcp1, &f, &[1.0], &[0.3], &doubling_grid(8, 1024), &p)?;
    println!("wall on CP1 x CP1: limit {:.12}, distances {:?}, slope {:?}", w.limit, w.distances, w.slope);
    Ok(())
}
