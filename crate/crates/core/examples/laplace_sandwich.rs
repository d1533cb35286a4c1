//! Two-sided Laplace bound for a quartic potential in the plane.

use fockdual::laplace::{default_method, sandwich_check};
use fockdual::potential::FnPotential;

fn main() -> fockdual::Result<()> {
    let h = FnPotential::new(2, |x: &[f64]| x.iter().map(|v| v.powi(4) / 4.0).sum());
    println!("{:>12} {:>14} {:>12} {:>10} {:>8}", "y", "integral", "volume", "ratio", "verdict");
    for y in [[0.0, 0.0], [1.0, 0.0], [1.0, -1.0], [2.0, 0.5]] {
        let r = sandwich_check(&h, &y, &default_method(2))?;
        println!(
            "{:>12} {:>14.8} {:>12.8} {:>10.6} {:>8?}",
            format!("({}, {})", y[0], y[1]),
            r.integral,
            r.volume.value,
            r.ratio,
            r.verdict
        );
    }
    Ok(())
}
