//! The three classical operators and the two normalizations of the disk operator.

use szasz_lab::lattice::{bernstein, pascal_disk, szasz_classical, DiskNormalization};
use szasz_lab::{TestFunction, TruncationPolicy};

fn main() -> szasz_lab::Result<()> {
    let p = TruncationPolicy::default();
    let t2 = TestFunction::from_spec("t^2", 1)?;
    let bump = TestFunction::from_spec("cosine-window:1:1", 1)?;
    for n in [4, 16, 64] {
        let s = szasz_classical(&t2, n, &[1.0], &p)?;
        println!(
            "Szasz     t^2  N = {n:3}  x = 1.0  value = {:.15}  (exact {:.15}, terms {})",
            s.value,
            1.0 + 1.0 / n as f64,
            s.terms
        );
        let b = bernstein(&t2, n, &[0.5])?;
        println!("Bernstein t^2  N = {n:3}  x = 0.5  value = {b:.15}  (exact {:.15})", 0.25 + 0.25 / n as f64);
        for norm in [DiskNormalization::KernelSum, DiskNormalization::PaperPrefactor] {
            let d = pascal_disk(&bump, n, 0.8, &p, norm)?;
            println!("disk      bump N = {n:3}  x = 0.8  {norm:?}: {:.15}", d.value);
        }
    }
    Ok(())
}
