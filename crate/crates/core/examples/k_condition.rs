//! Product of sublevel volumes of a weight and its conjugate along a ray of
//! multi-indices.

use fockdual::duality::k_condition_scan;
use fockdual::moments::MultiIndex;
use fockdual::weights::{make_fock, make_separable_power};

fn main() -> fockdual::Result<()> {
    for phi in [make_fock(1)?, make_separable_power(1, 4.0)?] {
        let alphas: Vec<MultiIndex> = [1u32, 2, 5, 10, 50, 100].iter().map(|&a| MultiIndex::new(vec![a])).collect::<Result<_, _>>()?;
        let r = k_condition_scan(&phi, &alphas)?;
        println!("{}  K_hat = {:.6}", phi.label(), r.k_hat);
        for e in &r.entries {
            println!("  alpha {:>5}  product {:.8}", e.alpha.to_string(), e.product);
        }
    }
    Ok(())
}
