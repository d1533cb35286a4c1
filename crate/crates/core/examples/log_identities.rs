//! Entropy identity for a convex weight and the one-sided inequality for a
//! non-convex one, both on the log-substituted grid.

use fockdual::fenchel::{
    verify_entropy_inequality, verify_with_refinement, GridConfig, IdentityKind, ProbeSet,
};
use fockdual::weights::{make_bump, make_fock};

fn main() -> fockdual::Result<()> {
    let probes = ProbeSet::default_for(1)?;
    let cfg = GridConfig::default();

    let fock = make_fock(1)?;
    let r = verify_with_refinement(&fock, &probes, &cfg, IdentityKind::Equality, 1e-3, 1.8)?;
    println!(
        "{}: residual {:.3e} -> {:.3e} after refinement (shrink {:.2}), passed {}",
        fock.label(),
        r.coarse.max_abs_residual,
        r.fine.max_abs_residual,
        r.shrink,
        r.passed
    );

    let bump = make_bump(1)?;
    let eq = verify_with_refinement(&bump, &probes, &cfg, IdentityKind::Equality, 1e-3, 1.8)?;
    let ineq = verify_entropy_inequality(&bump, &probes, &cfg, 1e-3)?;
    println!(
        "{}: equality residual {:.3e} (passed {}), inequality excess {:.3e} (passed {})",
        bump.label(),
        eq.fine.max_abs_residual,
        eq.passed,
        ineq.max_positive_residual,
        ineq.passed
    );
    Ok(())
}
