//! Coefficient map between a weighted space and its conjugate space, with the
//! norm bounds and an exact round trip.

use fockdual::duality::{
    forward_map, inverse_map, isomorphism_bound_check, k_condition_scan, max_ulp_distance, shifted_indices,
    CoefficientSequence,
};
use fockdual::moments::MomentTable;
use fockdual::weights::make_separable_power;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> fockdual::Result<()> {
    let phi = make_separable_power(1, 4.0)?;
    let star = phi.conjugate_weight()?;
    let table = MomentTable::build(&phi, 8)?;
    let table_star = MomentTable::build(&star, 8)?;
    let k = k_condition_scan(&phi, &shifted_indices(1, 8))?.k_hat;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let b = CoefficientSequence::random(1, 8, &mut rng)?;
    let (fwd, inv) = isomorphism_bound_check(&b, &table, &table_star, k)?;
    println!("K = {k:.5}");
    for r in [fwd, inv] {
        println!("{:>8}: {:.6e} <= {:.6e} ({})", r.name, r.lhs, r.rhs, r.ok);
    }
    let back = inverse_map(&forward_map(&b, &table)?, &table)?;
    println!("round trip: {} ulp", max_ulp_distance(&b, &back));
    Ok(())
}
