//! A model given only by its potential: log(1 + e^r) on [0, 1] reproduces Bernstein,
//! with every norm computed by quadrature.

use szasz_lab::lattice::{bernstein, generalized_operator_with};
use szasz_lab::quadrature::{QuadratureNorms, QuadratureSpec};
use szasz_lab::{TestFunction, ToricModel, TruncationPolicy};

const DOC: &str = r#"{
  "name": "custom-cp1",
  "dimension": 1,
  "phi": "log(1 + exp(r))",
  "facets": [ { "normal": [1], "offset": 0 }, { "normal": [-1], "offset": -1 } ]
}"#;

fn main() -> szasz_lab::Result<()> {
    let model = ToricModel::from_json(DOC)?;
    let norms = QuadratureNorms::new(model.clone(), QuadratureSpec::default());
    let f = TestFunction::from_spec("cosine-window:0.5:0.5", 1)?;
    for n in [4, 16, 64] {
        let r = generalized_operator_with(&model, &f, n, &[0.3], &TruncationPolicy::default(), &norms)?;
        let b = bernstein(&f, n, &[0.3])?;
        println!("N = {n:3}  custom {:.14}  Bernstein {:.14}  |diff| = {:.1e}", r.value, b, (r.value - b).abs());
    }
    Ok(())
}
