//! The generalized operator on CP^2 and its lattice weight table.

use szasz_lab::{generalized_operator, TestFunction, ToricModel, TruncationPolicy};

fn main() -> szasz_lab::Result<()> {
    let model = ToricModel::fubini_study(2);
    let f = TestFunction::from_spec("s*t + s^2", 2)?;
    let x = [0.2, 0.5];
    for n in [2, 8, 32, 128] {
        let r = generalized_operator(&model, &f, n, &x, &TruncationPolicy::default())?;
        println!(
            "N = {n:4}  S_N f(x) = {:.12}  f(x) = {:.12}  normalizer = {:.6e}  partition residual = {:.1e}",
            r.value,
            f.eval(&x),
            r.table.normalizer(),
            r.table.partition_of_unity_residual()
        );
    }
    let r = generalized_operator(&model, &f, 3, &x, &TruncationPolicy::default())?;
    println!("\nweight table at N = 3:");
    r.table.write_csv(std::io::stdout().lock())?;
    Ok(())
}
