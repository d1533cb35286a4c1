//! Discrete and pointwise Legendre-Fenchel conjugates of a quartic weight.

use fockdual::fenchel::{conjugate_1d, conjugate_at, Axis, DomainTag, SampledFunction};
use fockdual::weights::make_separable_power;

fn main() -> fockdual::Result<()> {
    let phi = make_separable_power(1, 4.0)?;
    let primal = SampledFunction::sample(&phi, vec![Axis::new(-8.0, 8.0, 2001)?], DomainTag::LinearScale)?;
    let dual = Axis::new(-2.0, 2.0, 9)?;
    let hull = conjugate_1d(&primal, &dual)?;
    println!("{:>6} {:>14} {:>14} {:>14}", "y", "hull", "pointwise", "closed form");
    for (y, v) in hull.dual.iter_points() {
        let pw = conjugate_at(&phi, &y)?.value;
        let exact = phi.conjugate_at(&y).unwrap();
        println!("{:>6.2} {v:>14.9} {pw:>14.9} {exact:>14.9}", y[0]);
    }
    Ok(())
}
