//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;

use fockdual::duality::{
    forward_map, inverse_map, isomorphism_bound_check, k_condition_scan, max_ulp_distance, monomial_orthogonality_check,
    norm_sq, quadrature_norm_sq, shifted_indices, stirling_identity_check, CoefficientSequence,
};
use fockdual::fenchel::{verify_entropy_inequality, verify_with_refinement, GridConfig, IdentityKind, ProbeSet};
use fockdual::laplace::{default_method, sandwich_check};
use fockdual::moments::{fock_oracle, moment, MomentTable, MultiIndex};
use fockdual::potential::FnPotential;
use fockdual::weights::{make_fock, make_kinked, make_separable_power, WeightFunction};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn mi(v: &[u32]) -> MultiIndex {
    MultiIndex::new(v.to_vec()).unwrap()
}

fn fock_moment_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in [1, 2] {
        let phi = make_fock(n).map_err(|e| e.to_string())?;
        for alpha in MultiIndex::all_up_to(n, 10) {
            let got = moment(&phi, &alpha).map_err(|e| e.to_string())?;
            let (_, ln) = fock_oracle(&alpha);
            worst = worst.max((got.ln_value - ln).exp_m1().abs());
        }
    }
    verdict(worst <= 1e-6, format!("max relative error {worst:.3e} (tol 1e-6)"))
}

fn sandwich() -> Outcome {
    let half_sq = |x: &[f64]| 0.5 * x.iter().map(|v| v * v).sum::<f64>();
    let quartic = |x: &[f64]| x.iter().map(|v| v.powi(4) / 4.0).sum::<f64>();
    let line: Vec<Vec<f64>> = (0..9).map(|k| vec![-2.0 + 0.5 * k as f64]).collect();
    let square: Vec<Vec<f64>> = (0..9).map(|k| vec![-1.0 + (k / 3) as f64, -1.0 + (k % 3) as f64]).collect();
    let cases: Vec<(&str, usize, &(dyn Fn(&[f64]) -> f64 + Sync), &Vec<Vec<f64>>)> = vec![
        ("x^2/2", 1, &half_sq, &line),
        ("x^4/4", 1, &quartic, &line),
        ("sum x_j^4/4 (n=2)", 2, &quartic, &square),
        ("|x|^2/2 (n=2)", 2, &half_sq, &square),
    ];
    let mut all = true;
    let mut worst_budget: f64 = 0.0;
    let mut gaussian = Vec::new();
    let mut ranges = Vec::new();
    for (name, n, f, ys) in cases {
        let h = FnPotential::new(n, |x: &[f64]| f(x));
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for y in ys {
            let r = sandwich_check(&h, y, &default_method(n)).map_err(|e| format!("{name} {y:?}: {e}"))?;
            let inside = r.ratio >= r.lower - r.error_budget && r.ratio <= r.upper + r.error_budget;
            all &= inside && r.error_budget <= 0.02;
            worst_budget = worst_budget.max(r.error_budget);
            lo = lo.min(r.ratio);
            hi = hi.max(r.ratio);
            if name == "x^2/2" {
                gaussian.push(r.ratio);
            }
        }
        ranges.push(format!("{name}: [{lo:.5}, {hi:.5}]"));
    }
    let g_ok = gaussian.iter().all(|r| (r - 0.88623).abs() <= 0.005);
    verdict(
        all && g_ok,
        format!("{}; max error budget {worst_budget:.2e}", ranges.join("; ")),
    )
}

fn entropy_identity() -> Outcome {
    let weights: Vec<WeightFunction> = vec![
        make_fock(1).unwrap(),
        make_fock(2).unwrap(),
        make_separable_power(1, 4.0).unwrap(),
    ];
    let mut all = true;
    let mut parts = Vec::new();
    for w in &weights {
        let probes = ProbeSet::default_for(w.dim()).map_err(|e| e.to_string())?;
        let r = verify_with_refinement(w, &probes, &GridConfig::default(), IdentityKind::Equality, 1e-3, 1.8)
            .map_err(|e| e.to_string())?;
        all &= r.coarse.passed && r.passed && r.coarse.points.len() == 25;
        parts.push(format!(
            "{}: {:.2e} -> {:.2e} (x{:.2})",
            w.label(),
            r.coarse.max_abs_residual,
            r.fine.max_abs_residual,
            r.shrink
        ));
    }
    verdict(all, parts.join("; "))
}

fn entropy_inequality() -> Outcome {
    let w = make_kinked(1).unwrap();
    let probes = ProbeSet::default_for(1).map_err(|e| e.to_string())?;
    let r = verify_entropy_inequality(&w, &probes, &GridConfig::default(), 1e-3).map_err(|e| e.to_string())?;
    verdict(
        r.passed,
        format!("max positive residual {:.2e} over {} probes (tol 1e-3)", r.max_positive_residual, r.points.len()),
    )
}

fn k_condition() -> Outcome {
    let phi = make_fock(1).unwrap();
    let alphas: Vec<MultiIndex> = (1..=100).map(|a| mi(&[a])).collect();
    let r = k_condition_scan(&phi, &alphas).map_err(|e| e.to_string())?;
    let (lo, hi) = r
        .entries
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), e| (a.min(e.product), b.max(e.product)));
    verdict(
        lo >= 1.95 && hi <= 2.30 && (r.k_hat - 2.24).abs() <= 0.05,
        format!("products in [{lo:.5}, {hi:.5}], K_hat = {:.5}", r.k_hat),
    )
}

fn stirling() -> Outcome {
    let mut all = true;
    let mut count = 0;
    for n in [1, 2] {
        let phi = make_fock(n).unwrap();
        for alpha in MultiIndex::all_up_to(n, 10) {
            all &= stirling_identity_check(&phi, &alpha).map_err(|e| e.to_string())?.ok;
            count += 1;
        }
    }
    let r0 = stirling_identity_check(&make_fock(1).unwrap(), &mi(&[0])).map_err(|e| e.to_string())?;
    verdict(
        all && (r0.r - 0.85033).abs() <= 0.003,
        format!("{count} indices inside the envelope; r(0) = {:.5}", r0.r),
    )
}

fn isomorphism_bounds() -> Outcome {
    let phi = make_fock(1).unwrap();
    let star = phi.conjugate_weight().unwrap();
    let table = MomentTable::build(&phi, 10).map_err(|e| e.to_string())?;
    let table_star = MomentTable::build(&star, 10).map_err(|e| e.to_string())?;
    let k = k_condition_scan(&phi, &shifted_indices(1, 10)).map_err(|e| e.to_string())?.k_hat;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (mut fwd, mut inv, mut ulp) = (0, 0, 0);
    for _ in 0..100 {
        let b = CoefficientSequence::random(1, 10, &mut rng).map_err(|e| e.to_string())?;
        let (f, i) = isomorphism_bound_check(&b, &table, &table_star, k).map_err(|e| e.to_string())?;
        fwd += (!f.ok) as u32;
        inv += (!i.ok) as u32;
        let back = inverse_map(&forward_map(&b, &table).unwrap(), &table).unwrap();
        ulp = ulp.max(max_ulp_distance(&b, &back));
    }
    verdict(
        fwd == 0 && inv == 0 && ulp <= 4,
        format!("K = {k:.5}; violations forward {fwd}, inverse {inv}; round trip {ulp} ulp"),
    )
}

fn parseval() -> Outcome {
    let phi = make_fock(1).unwrap();
    let table = MomentTable::build(&phi, 1).map_err(|e| e.to_string())?;
    let f = CoefficientSequence::from_terms(1, 1, [(mi(&[0]), Complex64::new(1.0, 0.0)), (mi(&[1]), Complex64::new(1.0, 0.0))])
        .map_err(|e| e.to_string())?;
    let via_moments = norm_sq(&f, &table).map_err(|e| e.to_string())?;
    let direct = quadrature_norm_sq(&phi, &f, 9.0, 256).map_err(|e| e.to_string())?;
    let rel = (via_moments - direct).abs() / direct;
    verdict(
        rel <= 1e-5 && (via_moments - 2.0 * PI).abs() <= 1e-6 * 2.0 * PI,
        format!("norm {via_moments:.10} vs quadrature {direct:.10} (rel {rel:.2e})"),
    )
}

fn orthogonality() -> Outcome {
    let mut worst: f64 = 0.0;
    for phi in [make_fock(1).unwrap(), make_separable_power(1, 4.0).unwrap()] {
        let table = MomentTable::build(&phi, 5).map_err(|e| e.to_string())?;
        for a in 0..=5 {
            for b in 0..=5 {
                if a == b {
                    continue;
                }
                let ip = monomial_orthogonality_check(&phi, &mi(&[a]), &mi(&[b]), 64).map_err(|e| e.to_string())?;
                let scale = (table.get(&mi(&[a])).unwrap().value * table.get(&mi(&[b])).unwrap().value).sqrt();
                worst = worst.max(ip / scale);
            }
        }
    }
    verdict(worst <= 1e-8, format!("max |(z^a, z^b)| / sqrt(c_a c_b) = {worst:.2e}"))
}

fn run_all(out: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_fockdual"))
        .args(["all", "--seed", "0", "--out"])
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.code() != Some(0) {
        return Err(format!("exit {:?}", status.status.code()));
    }
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(out)
        .map_err(|e| e.to_string())?
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    Ok(files)
}

fn determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = run_all(a.path())?;
    let second = run_all(b.path())?;
    verdict(
        !first.is_empty() && first == second,
        format!("{} report files compared", first.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 Fock moments match pi^n alpha!", fock_moment_oracle),
        ("2 Laplace sandwich", sandwich),
        ("3 entropy identity with refinement", entropy_identity),
        ("4 one-sided entropy inequality", entropy_inequality),
        ("5 K-condition scan", k_condition),
        ("6 Stirling envelope", stirling),
        ("7 isomorphism bounds and round trip", isomorphism_bounds),
        ("8 Parseval cross-check", parseval),
        ("9 monomial orthogonality", orthogonality),
        ("10 determinism of `all --seed 0`", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(d) => println!("PASS  {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name}: {d}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
