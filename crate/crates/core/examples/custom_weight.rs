//! Loading a weight from JSON and validating it before running checks.

use fockdual::moments::MomentTable;
use fockdual::weights::{validate_class_v, ClassVSampling, WeightFunction, WeightSpec};

fn main() -> fockdual::Result<()> {
    let spec: WeightSpec = serde_json::from_str(
        r#"{"n": 2, "terms": [{"type": "power", "p": 2.0, "coef": 0.5}, {"type": "radial_power", "p": 3.0, "coef": 1.0}]}"#,
    )?;
    let phi = WeightFunction::from_spec(&spec)?;
    let report = validate_class_v(&phi, &ClassVSampling::default())?;
    println!("{}: admissible {}", phi.label(), report.all_ok());
    let table = MomentTable::build(&phi, 3)?;
    table.write_csv(std::io::stdout())?;
    Ok(())
}
