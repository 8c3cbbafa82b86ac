//! Monomial norms by quadrature against the closed forms, and the kernel diagonal they produce.

use szasz_lab::quadrature::{kernel_diag_with, monomial_norm, tyz_ratio, QuadratureNorms, QuadratureSpec};
use szasz_lab::{ToricModel, TruncationPolicy};

fn main() -> szasz_lab::Result<()> {
    let spec = QuadratureSpec::default();
    for model in [ToricModel::bargmann_fock(1), ToricModel::fubini_study(1), ToricModel::bergman_ball(1)] {
        let n = 12;
        println!("{}:", model.name());
        for a in [0i64, 1, 5, 12] {
            let e = monomial_norm(&model, n, &[a], &spec)?;
            let closed = model.closed_form_log_norm(&[a], n).map(f64::exp);
            println!(
                "  N = {n}, alpha = {a:2}: quadrature {:.12e}  closed {:.12e}  est. rel. error {:.1e}",
                e.norm(),
                closed.unwrap_or(f64::NAN),
                e.rel_error
            );
        }
        let norms = QuadratureNorms::new(model.clone(), spec.clone());
        let x = model.reference_point();
        let k = kernel_diag_with(&model, n, &x, &norms, &TruncationPolicy::default())?;
        println!("  B_N(x) = {:.12}  closed form {:?}  stated {:?}", k.b, k.closed_form, k.stated);
        let r = tyz_ratio(&model, &[8, 16, 32], &x, &norms)?;
        println!("  B/N^m = {:?}  fitted a1 = {:.6}", r.ratio, r.a1);
    }
    Ok(())
}
