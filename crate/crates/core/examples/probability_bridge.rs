//! Operators as expectations: exact sums, Monte Carlo, and the two Pascal readings.

use szasz_lab::lattice::{bernstein, pascal_disk, szasz_classical, DiskNormalization};
use szasz_lab::prob::{expectation, monte_carlo_check, pascal_decay, LatticeDistribution};
use szasz_lab::{TestFunction, TruncationPolicy};

fn main() -> szasz_lab::Result<()> {
    let f = TestFunction::from_spec("gaussian-bump", 1)?;
    let p = TruncationPolicy::default();
    let (n, x) = (40u32, 0.6);
    let g = |j: u64| f.eval(&[j as f64 / n as f64]);
    let pairs = [
        (LatticeDistribution::binomial(n, x)?, bernstein(&f, n, &[x])?),
        (LatticeDistribution::poisson(n as f64 * x)?, szasz_classical(&f, n, &[x], &p)?.value),
        (
            LatticeDistribution::negbinomial_failures(n, 1.0 / (1.0 + x))?,
            pascal_disk(&f, n, x, &p, DiskNormalization::KernelSum)?.value,
        ),
    ];
    for (i, (dist, op)) in pairs.iter().enumerate() {
        let e = expectation(dist, &g, 1e-15)?;
        let mc = monte_carlo_check(dist, &g, 200_000, 42 + i as u64, 1e-15)?;
        println!(
            "{:<22} operator {:.15}  E = {:.15}  |diff| = {:.1e}  MC {:.5} ± {:.5} (z = {:+.2})",
            dist.kind(),
            op,
            e.value,
            (op - e.value).abs(),
            mc.mean,
            mc.stderr,
            mc.z_score
        );
    }
    let d = pascal_decay(&f, x, &[32, 64, 128, 256, 512], 1e-15, 0.2)?;
    for (name, slope) in d.pairings.iter().zip(&d.slopes) {
        println!("Pascal {name:<28} distance slope {slope:?}");
    }
    println!("first-order pairings: {:?}", d.first_order);
    Ok(())
}
