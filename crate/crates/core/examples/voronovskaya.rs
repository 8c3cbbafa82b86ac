//! First-order coefficient of S_N f(x) against the Hessian prediction.

use szasz_lab::asymptotics::{default_grid, voronovskaya_report};
use szasz_lab::{TestFunction, ToricModel, TruncationPolicy};

fn main() -> szasz_lab::Result<()> {
    let grid = default_grid();
    let p = TruncationPolicy::default();
    for (model, x) in
        [(ToricModel::bargmann_fock(1), 1.0), (ToricModel::fubini_study(1), 0.5), (ToricModel::bergman_ball(1), 1.0)]
    {
        for f in ["t^2", "t^3", "gaussian-bump"] {
            let f = TestFunction::from_spec(f, 1)?;
            let r = voronovskaya_report(&model, &f, &[x], &grid, &p)?;
            println!(
                "{:<16} {:<14} c0 = {:.10} (f = {:.10})  c1 = {:+.8}  theory f''-part = {:+.8}  residual slope = {:?}  [{:?}]",
                model.name(),
                f.tag(),
                r.fit.c0(),
                r.f_x,
                r.fit.c1(),
                r.theory_c1,
                r.fit.residual_slope,
                r.regime
            );
        }
    }
    Ok(())
}
