//! Legendre duality on the built-in models: x -> rho(x) -> x, and u(x) against its closed form.

use szasz_lab::toric::{legendre_invert, ToricModel};

fn main() -> szasz_lab::Result<()> {
    let cases = [
        (ToricModel::bargmann_fock(1), vec![1.3]),
        (ToricModel::fubini_study(1), vec![0.25]),
        (ToricModel::bergman_ball(1), vec![2.0]),
        (ToricModel::fubini_study(2), vec![0.2, 0.5]),
    ];
    for (model, x) in cases {
        let d = legendre_invert(&model, &x, None)?;
        let back = model.moment_map(&d.rho)?;
        let closed = model.closed_symplectic_potential(&x);
        println!(
            "{:<18} x = {:?}  rho = {:?}  mu(rho) = {:?}  u = {:.12}  closed u = {:?}  newton iters = {}",
            model.name(),
            x,
            d.rho,
            back,
            d.u_value,
            closed,
            d.iterations
        );
        let id = &d.hessian_g * &d.hessian_h;
        println!("{:<18} G * H = {:?}", "", id.as_slice());
    }
    Ok(())
}
