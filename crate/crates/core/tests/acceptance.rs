//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test --test acceptance` (add `-- --verbose` for per-check details).

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use szasz_lab::asymptotics::{
    binomial_pmf_scaled, corner_b1_fit, corner_convergence, corner_scaled_operator, default_grid, doubling_grid,
    geometric_grid, poisson_pmf, poisson_refinement, szasz_unit, voronovskaya_extract, voronovskaya_theory,
    wall_convergence,
};
use szasz_lab::lattice::{
    bernstein, generalized_operator_with, generalized_weight, kahler_side_log_term, pascal_disk, szasz_classical,
    ClosedFormNorms, DiskNormalization, NormSource, ScaledNorms,
};
use szasz_lab::prob::{
    expectation, monte_carlo_check, pascal_decay, sample, total_variation, LatticeDistribution, PAIRINGS,
};
use szasz_lab::quadrature::{kernel_diag_with, monomial_norm, QuadratureNorms, QuadratureSpec};
use szasz_lab::toric::{legendre_invert, symplectic_potential};
use szasz_lab::{Result, TestFunction, ToricModel, TruncationPolicy};

/// Outcome of one criterion: pass flag plus a short summary of the worst observed values.
struct Verdict {
    pass: bool,
    summary: String,
    notes: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Verdict { pass: true, summary: String::new(), notes: Vec::new() }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.pass = false;
            self.notes.push(format!("FAILED {}", what.into()));
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn builtins() -> Vec<(ToricModel, Vec<Vec<f64>>)> {
    let line = |a, b| linspace(a, b, 10).into_iter().map(|v| vec![v]).collect::<Vec<_>>();
    let square: Vec<Vec<f64>> =
        linspace(0.1, 0.9, 10).iter().zip(linspace(0.85, 0.15, 10)).map(|(a, b)| vec![*a, b]).collect();
    let tri: Vec<Vec<f64>> =
        linspace(0.05, 0.45, 10).iter().zip(linspace(0.5, 0.1, 10)).map(|(a, b)| vec![*a, b]).collect();
    vec![
        (ToricModel::bargmann_fock(1), line(0.1, 5.0)),
        (ToricModel::fubini_study(1), line(0.05, 0.95)),
        (ToricModel::bergman_ball(1), line(0.1, 5.0)),
        (ToricModel::from_name("product:fubini-study-cp1xfubini-study-cp1").unwrap(), square),
        (ToricModel::fubini_study(2), tri),
    ]
}

fn tf(spec: &str, m: usize) -> TestFunction {
    TestFunction::from_spec(spec, m).unwrap()
}

fn exact_identities() -> Result<Verdict> {
    let mut v = Verdict::new();
    let p = TruncationPolicy::default();
    let (mut pou, mut weight, mut scale) = (0.0f64, 0.0f64, 0.0f64);
    for (model, xs) in builtins() {
        let m = model.dimension();
        let one = TestFunction::constant(1.0, m);
        let norms = ClosedFormNorms(&model);
        let scaled = ScaledNorms { inner: ClosedFormNorms(&model), log_scale: 3.7f64.ln() };
        let f = tf("cosine-window:0.5:1", m);
        for n in model.min_power().max(2)..=64 {
            for x in &xs {
                let r = generalized_operator_with(&model, &one, n, x, &p, &norms)?;
                pou = pou.max((r.value - 1.0).abs());
                let a = generalized_operator_with(&model, &f, n, x, &p, &norms)?.value;
                let b = generalized_operator_with(&model, &f, n, x, &p, &scaled)?.value;
                scale = scale.max((a - b).abs());
                if n % 9 == 1 {
                    for e in r.table.entries.iter().step_by(7) {
                        let w = generalized_weight(&model, n, x, &e.alpha, &norms)? + norms.log_norm(&e.alpha, n)?;
                        let k = kahler_side_log_term(&model, n, x, &e.alpha)?;
                        weight = weight.max((w - k).abs());
                    }
                }
            }
        }
    }
    v.require(pou <= 1e-12, format!("partition of unity {pou:.2e}"));
    v.require(weight <= 1e-10, format!("weight identity {weight:.2e}"));
    v.require(scale <= 1e-13, format!("measure-constant invariance {scale:.2e}"));
    v.summary = format!("max |S(1)-1| = {pou:.1e}, weight identity {weight:.1e}, constant invariance {scale:.1e}");
    Ok(v)
}

fn duality() -> Result<Verdict> {
    let mut v = Verdict::new();
    let custom = ToricModel::from_json(
        r#"{"name":"custom-cp1","dimension":1,"phi":"log(1 + exp(r))",
            "facets":[{"normal":[1],"offset":0},{"normal":[-1],"offset":-1}]}"#,
    )?;
    let mut models = builtins();
    models.push((ToricModel::bergman_ball(2), vec![vec![0.3, 0.9], vec![2.0, 0.1], vec![1e-3, 4.0]]));
    models.push((custom, linspace(0.02, 0.98, 10).into_iter().map(|x| vec![x]).collect()));
    let (mut rt, mut gh, mut uu) = (0.0f64, 0.0f64, 0.0f64);
    for (model, xs) in &models {
        for x in xs {
            let d = legendre_invert(model, x, Some(&vec![0.0; x.len()]))?;
            let back = model.moment_map(&d.rho)?;
            let scale = x.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-300);
            rt = rt.max(back.iter().zip(x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale);
            let id = &d.hessian_g * &d.hessian_h;
            let dev = (id - nalgebra::DMatrix::identity(x.len(), x.len())).abs().max();
            gh = gh.max(dev);
            if let Some(u) = model.closed_symplectic_potential(x) {
                uu = uu.max((symplectic_potential(model, x)? - u).abs() / u.abs().max(1.0));
            }
        }
    }
    v.require(rt <= 1e-10, format!("round trip {rt:.2e}"));
    v.require(gh <= 1e-8, format!("G H = I {gh:.2e}"));
    v.require(uu <= 1e-10, format!("closed u {uu:.2e}"));
    v.summary = format!("round trip {rt:.1e}, |GH - I| {gh:.1e}, u vs closed form {uu:.1e}");
    Ok(v)
}

fn quadrature() -> Result<Verdict> {
    let mut v = Verdict::new();
    let spec = QuadratureSpec::default();
    let p = TruncationPolicy::default();
    let (mut norm_err, mut count) = (0.0f64, 0usize);
    let (mut kern_err, mut spread) = (0.0f64, 0.0f64);
    for (model, reach) in
        [(ToricModel::bargmann_fock(1), 8i64), (ToricModel::fubini_study(1), 4), (ToricModel::bergman_ball(1), 4)]
    {
        let norms = QuadratureNorms::new(model.clone(), spec.clone());
        for n in [1u32, 2, 3, 4, 8, 16, 32].into_iter().filter(|&n| n >= model.min_power()) {
            let top = (reach * n as i64).min(model.polytope().lattice_axis_bounds(n)[0].1.unwrap_or(i64::MAX));
            for a in 0..=top {
                let q = norms.log_norm(&[a], n)?;
                let c = model.closed_form_log_norm(&[a], n).unwrap();
                norm_err = norm_err.max((q - c).exp_m1().abs());
                count += 1;
            }
            // uncalibrated spot check: the measure constant really is 1 for built-ins
            let raw = monomial_norm(
                &model,
                n,
                &[n as i64 / 2],
                &QuadratureSpec { calibration_constant: Some(1.0), ..spec.clone() },
            )?;
            norm_err =
                norm_err.max((raw.log_norm - model.closed_form_log_norm(&[n as i64 / 2], n).unwrap()).exp_m1().abs());
        }
        let xs: Vec<f64> =
            if model.polytope().is_unbounded() { linspace(0.1, 4.0, 20) } else { linspace(0.03, 0.97, 20) };
        for n in [2u32, 4, 8, 16, 32].into_iter().filter(|&n| n >= model.min_power()) {
            let bs: Vec<f64> =
                xs.iter().map(|&x| Ok(kernel_diag_with(&model, n, &[x], &norms, &p)?.b)).collect::<Result<_>>()?;
            let want = match () {
                _ if model.is_bargmann_fock() => n as f64,
                _ if model.is_ball() => n as f64 - 1.0,
                _ => n as f64 + 1.0,
            };
            let mean = bs.iter().sum::<f64>() / bs.len() as f64;
            for b in &bs {
                kern_err = kern_err.max((b - want).abs() / want);
                spread = spread.max((b - mean).abs() / mean);
            }
        }
    }
    v.require(norm_err <= 1e-8, format!("norms {norm_err:.2e}"));
    v.require(kern_err <= 1e-8, format!("kernel {kern_err:.2e}"));
    v.require(spread <= 1e-8, format!("x-spread {spread:.2e}"));
    v.summary = format!(
        "{count} norms max rel err {norm_err:.1e}; kernel vs N, N+1, N-1 {kern_err:.1e}; x-spread {spread:.1e}"
    );
    Ok(v)
}

fn voronovskaya() -> Result<Verdict> {
    let mut v = Verdict::new();
    let p = TruncationPolicy::default();
    let grid = geometric_grid(32, 2048);
    let (mut c1_worst, mut c0_worst) = (0.0f64, 0.0f64);
    let mut slopes: Vec<f64> = Vec::new();
    let models = [
        (ToricModel::bargmann_fock(1), linspace(0.2, 2.0, 10)),
        (ToricModel::fubini_study(1), linspace(0.1, 0.9, 10)),
        (ToricModel::bergman_ball(1), linspace(0.2, 2.0, 10)),
    ];
    for (model, xs) in &models {
        for f in ["t^2", "3*t^2 - t + 2"] {
            let f = tf(f, 1);
            for &x in xs {
                let fit = voronovskaya_extract(model, &f, &[x], &grid, &p)?;
                let theory = voronovskaya_theory(model, &f, &[x])?;
                c1_worst = c1_worst.max((fit.c1() - theory).abs() / theory.abs());
                c0_worst = c0_worst.max((fit.c0() - f.eval(&[x])).abs() / f.eval(&[x]).abs());
            }
        }
        // quadratics leave no remainder; the slope is read off smooth non-quadratic f
        for name in ["t^3", "gaussian-bump"] {
            let f = tf(name, 1);
            for &x in xs {
                if let Some(s) = voronovskaya_extract(model, &f, &[x], &grid, &p)?.residual_slope {
                    if !(-2.3..=-1.7).contains(&s) {
                        v.note(format!("{} {} x={x}: slope {s:.3}", model.name(), name));
                    }
                    slopes.push(s);
                }
            }
        }
    }
    let lo = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    v.require(c1_worst <= 0.01, format!("c1 rel {c1_worst:.2e}"));
    v.require(c0_worst <= 1e-6, format!("c0 rel {c0_worst:.2e}"));
    v.require(
        slopes.len() >= 30 && lo >= -2.3 && hi <= -1.7,
        format!("residual slopes [{lo:.3}, {hi:.3}] over {}", slopes.len()),
    );
    v.summary = format!(
        "c1 vs Hessian max rel {c1_worst:.1e}; c0 rel {c0_worst:.1e}; {} residual slopes in [{lo:.3}, {hi:.3}]",
        slopes.len()
    );
    Ok(v)
}

fn corner() -> Result<Verdict> {
    let mut v = Verdict::new();
    let p = TruncationPolicy::default();
    let grid = geometric_grid(16, 2048);
    let mut slopes = Vec::new();
    for model in [ToricModel::fubini_study(1), ToricModel::bergman_ball(1)] {
        for f in ["cosine-window:1:2", "smooth-bump:1.5:1.5"] {
            for x in [0.5, 1.0] {
                let c = corner_convergence(&model, &tf(f, 1), &[x], &grid, &p)?;
                let s = c.slope.unwrap_or(f64::NAN);
                v.require((s + 1.0).abs() <= 0.15, format!("{} {f} x={x}: slope {s:.3}", model.name()));
                slopes.push(s);
            }
        }
    }
    let bf = ToricModel::bargmann_fock(1);
    let mut fixed = 0.0f64;
    for f in ["cosine-window:1:2", "t^2"] {
        let f = tf(f, 1);
        let limit = szasz_unit(&f, &[0.8], &p)?;
        for n in [1, 3, 17, 256, 2048] {
            fixed = fixed.max((corner_scaled_operator(&bf, &f, &[0.8], n, &p)? - limit).abs());
        }
    }
    v.require(fixed <= 1e-12, format!("BF fixed point {fixed:.2e}"));
    let mut gaps = Vec::new();
    let mut signs = Vec::new();
    for (model, sign) in [(ToricModel::fubini_study(1), -1.0), (ToricModel::bergman_ball(1), 1.0)] {
        for x in [0.3, 0.7, 1.0] {
            let r = corner_b1_fit(&model, &tf("t^2", 1), &[x], &default_grid(), &p)?;
            let want = sign * x * x;
            let rel = (r.c1_fitted - want).abs() / want.abs();
            v.require(rel <= 0.02, format!("{} x={x}: c1 {:.6} vs {want:.6}", model.name(), r.c1_fitted));
            v.require(
                r.magnitude_rel_gap <= 0.02,
                format!("{} x={x}: |b1| gap {:.2e}", model.name(), r.magnitude_rel_gap),
            );
            gaps.push(rel.max(r.magnitude_rel_gap));
            signs.push(format!(
                "{}@{x}: c1 {:+.4} b1 {:+.4} same_sign={}",
                model.name(),
                r.c1_fitted,
                r.b1_formula,
                r.sign_agrees
            ));
        }
    }
    for s in &signs {
        v.note(s.clone());
    }
    let lo = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let agree = signs.iter().filter(|s| s.ends_with("true")).count();
    v.summary = format!(
        "slopes [{lo:.3}, {hi:.3}]; BF fixed point {fixed:.1e}; t^2 c1 and |b1| within {:.1e}; b1 sign agrees in {agree}/{} cases",
        gaps.iter().cloned().fold(0.0, f64::max),
        signs.len()
    );
    Ok(v)
}

fn wall() -> Result<Verdict> {
    let mut v = Verdict::new();
    let p = TruncationPolicy::default();
    let model = ToricModel::from_name("product:fubini-study-cp1xfubini-study-cp1")?;
    let grid = doubling_grid(8, 1024);
    let mut slopes = Vec::new();
    for (f, xd, xk) in [("cosine-window:1:2", 1.0, 0.3), ("cosine-window:1:2", 0.5, 0.6)] {
        let r = wall_convergence(&model, &tf(f, 2), &[xd], &[xk], &grid, &p)?;
        let s = r.slope.unwrap_or(f64::NAN);
        v.require((s + 1.0).abs() <= 0.15, format!("{f} x'={xd} x''={xk}: slope {s:.3}"));
        slopes.push(s);
    }
    // the C-infinity bump is still pre-asymptotic below N ~ 64; report it there, gate it further out
    let bump = tf("smooth-bump:1.5:1.5", 2);
    let early = wall_convergence(&model, &bump, &[1.0], &[0.4], &grid, &p)?.slope.unwrap_or(f64::NAN);
    let late = wall_convergence(&model, &bump, &[1.0], &[0.4], &doubling_grid(64, 8192), &p)?.slope.unwrap_or(f64::NAN);
    v.note(format!("smooth-bump:1.5:1.5 x'=1 x''=0.4: slope {early:.3} over 8..1024, {late:.3} over 64..8192"));
    v.require((late + 1.0).abs() <= 0.15, format!("smooth-bump over 64..8192: slope {late:.3}"));
    slopes.push(late);
    let exact = (wall_convergence(&model, &tf("s", 2), &[0.6], &[0.3], &grid, &p)?.distances)
        .iter()
        .fold(0.0f64, |a, b| a.max(*b));
    v.require(exact <= 1e-12, format!("f = s not exact: {exact:.2e}"));
    v.summary = format!(
        "slopes {:?}; f = s exact to {exact:.1e}",
        slopes.iter().map(|s| format!("{s:.3}")).collect::<Vec<_>>()
    );
    Ok(v)
}

fn poisson() -> Result<Verdict> {
    let mut v = Verdict::new();
    let spot = (binomial_pmf_scaled(10, 1.0, 0) - poisson_pmf(1.0, 0)).abs();
    let want = (0.34867844 - 0.36787944f64).abs();
    v.require((spot - want).abs() <= 1e-8, format!("spot {spot:.10}"));
    let mut parts = Vec::new();
    for x in [0.5, 1.0, 2.0] {
        let r = poisson_refinement(x, 15, &default_grid())?;
        let (s1, s2) = (r.slope.unwrap_or(f64::NAN), r.corrected_slope.unwrap_or(f64::NAN));
        v.require((s1 + 1.0).abs() <= 0.1, format!("x={x} slope {s1:.3}"));
        v.require((s2 + 2.0).abs() <= 0.2, format!("x={x} corrected slope {s2:.3}"));
        parts.push(format!("x={x}: {s1:.3} -> {s2:.3}"));
    }
    v.summary = format!("spot |diff| = {spot:.8}; slopes {}", parts.join(", "));
    Ok(v)
}

fn probability() -> Result<Verdict> {
    let mut v = Verdict::new();
    let p = TruncationPolicy::tail_bound(1e-15);
    let eps = 1e-15;
    let mut worst = 0.0f64;
    for spec in ["t^2", "gaussian-bump", "cosine-window:0.7:0.5"] {
        let f = tf(spec, 1);
        for n in [5u32, 20, 64, 200] {
            let nf = n as f64;
            let g = |j: u64| f.eval(&[j as f64 / nf]);
            for x in [0.15, 0.5, 0.9] {
                let e = expectation(&LatticeDistribution::binomial(n, x)?, &g, eps)?.value;
                worst = worst.max((e - bernstein(&f, n, &[x])?).abs());
            }
            if f.has_compact_support() || spec == "gaussian-bump" {
                for x in [0.3, 1.0, 2.5] {
                    let e = expectation(&LatticeDistribution::poisson(nf * x)?, &g, eps)?;
                    let s = szasz_classical(&f, n, &[x], &p)?;
                    worst = worst.max((e.value - s.value).abs() - e.tail_bound - s.tail_bound);
                    let e = expectation(&LatticeDistribution::negbinomial_failures(n, 1.0 / (1.0 + x))?, &g, eps)?;
                    let d = pascal_disk(&f, n, x, &p, DiskNormalization::KernelSum)?;
                    worst = worst.max((e.value - d.value).abs() - e.tail_bound - d.tail_bound);
                }
            }
        }
    }
    v.require(worst <= 1e-12, format!("operator/expectation {worst:.2e}"));

    let dists = [
        LatticeDistribution::binomial(10, 0.3)?,
        LatticeDistribution::binomial(200, 0.45)?,
        LatticeDistribution::poisson(4.0)?,
        LatticeDistribution::poisson(75.0)?,
        LatticeDistribution::negbinomial_failures(5, 0.5)?,
        LatticeDistribution::pascal_trials(7, 0.35)?,
    ];
    let (mut zmax, mut tvmax) = (0.0f64, 0.0f64);
    for (i, d) in dists.iter().enumerate() {
        let r = monte_carlo_check(d, &|j| j as f64, 1_000_000, 9000 + i as u64, 1e-15)?;
        zmax = zmax.max(r.z_score.abs());
        let tv = total_variation(d, &sample(d, 1_000_000, 77 + i as u64)?);
        tvmax = tvmax.max(tv);
    }
    let f = tf("gaussian-bump", 1);
    for (i, x) in [0.4, 1.2].into_iter().enumerate() {
        let n = 50;
        let g = |j: u64| f.eval(&[j as f64 / n as f64]);
        let r = monte_carlo_check(&LatticeDistribution::poisson(n as f64 * x)?, &g, 1_000_000, 555 + i as u64, 1e-15)?;
        zmax = zmax.max(r.z_score.abs());
    }
    v.require(zmax <= 4.0, format!("z-score {zmax:.2}"));
    v.require(tvmax <= 5e-3, format!("total variation {tvmax:.2e}"));

    let d = pascal_decay(&tf("gaussian-bump", 1), 0.9, &doubling_grid(32, 1024), 1e-15, 0.2)?;
    v.require(d.passes(), "no Pascal pairing decays like 1/N");
    for (name, s) in PAIRINGS.iter().zip(&d.slopes) {
        let last = d.rows.last().unwrap();
        let k = PAIRINGS.iter().position(|p| p == name).unwrap();
        v.note(format!("Pascal {name}: slope {s:?}, distance at N={} is {:.3e}", last.n, last.distances[k]));
    }
    v.summary = format!(
        "identities {worst:.1e}; max |z| {zmax:.2}; max TV {tvmax:.1e}; Pascal O(1/N) pairings {:?}",
        d.first_order
    );
    Ok(v)
}

type Criterion = fn() -> Result<Verdict>;

fn main() -> ExitCode {
    let verbose = std::env::args().any(|a| a == "--verbose");
    let criteria: [(&str, Criterion); 8] = [
        ("exact identities", exact_identities),
        ("Legendre duality", duality),
        ("quadrature oracles", quadrature),
        ("Voronovskaya coefficient", voronovskaya),
        ("corner limit and b1", corner),
        ("wall limit", wall),
        ("refined Poisson limit", poisson),
        ("probability bridge", probability),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f));
        let secs = start.elapsed().as_secs_f64();
        let (pass, line, notes) = match outcome {
            Ok(Ok(v)) => (v.pass, v.summary, v.notes),
            Ok(Err(e)) => (false, format!("error: {e}"), Vec::new()),
            Err(_) => (false, "panicked".to_string(), Vec::new()),
        };
        if !pass {
            failed += 1;
        }
        println!("{} [{}] {name}: {line} ({secs:.1}s)", if pass { "PASS" } else { "FAIL" }, i + 1);
        for n in notes.iter().filter(|n| verbose || n.starts_with("FAILED")) {
            println!("       {n}");
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
