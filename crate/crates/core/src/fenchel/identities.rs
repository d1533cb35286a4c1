//! Grid checks of the entropy relation between `(u[e])*` and `(u*[e])*`:
//! `(u[e])*(x) + (u*[e])*(x) ≤ Σ_{xⱼ≠0} (xⱼ ln xⱼ − xⱼ)`, with equality when u
//! is convex.

use serde::Serialize;

use super::discrete::conjugate_nd_with;
use super::grid::Axis;
use super::pointwise::{log_conjugate_at, maximize_concave, MaximizeOptions};
use crate::error::{Error, Result};
use crate::potential::LogSubstituted;
use crate::weights::WeightFunction;

/// Discretization of the log variable `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridConfig {
    pub t_min: f64,
    pub step: f64,
    /// The box in `t` ends once the objective has dropped this far below its
    /// running maximum along each axis.
    pub drop: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            t_min: -40.0,
            step: 1.0 / 96.0,
            drop: 40.0,
        }
    }
}

impl GridConfig {
    /// Default grid, coarsened in three or more dimensions to keep the tensor
    /// tractable.
    pub fn for_dim(n: usize) -> Self {
        let mut cfg = Self::default();
        if n >= 3 {
            cfg.step = 1.0 / 8.0;
        }
        cfg
    }

    pub fn refined(&self) -> Self {
        Self {
            step: 0.5 * self.step,
            ..*self
        }
    }
}

/// Tensor grid of probes in `[0, ∞)ⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeSet {
    axes: Vec<Axis>,
}

impl ProbeSet {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(a) = axes.iter().find(|a| a.min() < 0.0) {
            let mut p = vec![0.0; axes.len()];
            p[0] = a.min();
            return Err(Error::ProbeOutsideOrthant(p));
        }
        Ok(Self { axes })
    }

    /// About 25 points on `[0, 2]ⁿ`: interior, boundary faces and the origin.
    pub fn default_for(n: usize) -> Result<Self> {
        let count = match n {
            0 => return Err(Error::InvalidDimension(0)),
            1 => 25,
            2 => 5,
            _ => 3,
        };
        Self::new(vec![Axis::new(0.0, 2.0, count)?; n])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    /// Probes in row-major order, first axis slowest.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new()];
        for a in &self.axes {
            out = out
                .into_iter()
                .flat_map(|p| {
                    a.nodes().into_iter().map(move |v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out
    }

    fn upper(&self) -> Vec<f64> {
        self.axes.iter().map(Axis::max).collect()
    }
}

/// `Σ_{xⱼ≠0} (xⱼ ln xⱼ − xⱼ)`.
pub fn entropy_sum(x: &[f64]) -> f64 {
    x.iter()
        .filter(|&&v| v != 0.0)
        .map(|&v| v * v.ln() - v)
        .sum()
}

// Smallest T such that x_max·t − u(e^t along axis j) has dropped `drop` below
// its running maximum for t in [0, T].
fn axis_extent(u: &WeightFunction, j: usize, x_max: f64, cfg: &GridConfig) -> Result<f64> {
    let n = u.dim();
    let floor = cfg.t_min.exp();
    let objective = |t: f64| {
        let mut e = vec![floor; n];
        e[j] = t.exp();
        x_max * t - u.eval(&e)
    };
    let mut best = objective(0.0);
    let mut t = 0.0;
    while t < 700.0 {
        t += 0.25;
        let v = objective(t);
        if v.is_nan() {
            return Err(Error::NonFinite {
                value: v,
                location: format!("log-substituted {} at t = {t}", u.label()),
            });
        }
        best = best.max(v);
        if v < best - cfg.drop {
            return Ok(t + 0.25);
        }
    }
    Err(Error::Unbounded(format!(
        "{} does not dominate slope {x_max} along axis {j}",
        u.label()
    )))
}

/// `(u[e])*` at every probe by the discrete route. The `t` grid starts at
/// `t_min` and uses a common step, so refined grids nest.
pub fn log_conjugate_grid(u: &WeightFunction, probes: &ProbeSet, cfg: &GridConfig) -> Result<Vec<f64>> {
    let n = u.dim();
    if probes.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: probes.dim(),
        });
    }
    if !(cfg.step > 0.0 && cfg.t_min.is_finite() && cfg.drop > 0.0) {
        return Err(Error::InvalidGrid(format!("{cfg:?}")));
    }
    let upper = probes.upper();
    let mut t_axes = Vec::with_capacity(n);
    for (j, &x_max) in upper.iter().enumerate() {
        let t_max = axis_extent(u, j, x_max.max(1e-3), cfg)?;
        let count = ((t_max - cfg.t_min) / cfg.step).ceil() as usize + 1;
        t_axes.push(Axis::with_step(cfg.t_min, cfg.step, count)?);
    }
    let log_u = LogSubstituted::new(u);
    let result = conjugate_nd_with(&log_u, &t_axes, probes.axes())?;
    // every probe slope must be reached before the right edge of the box
    for (j, &(_, hi)) in result.slope_range.iter().enumerate() {
        if hi < upper[j] {
            return Err(Error::InvalidGrid(format!(
                "t box too short on axis {j}: edge slope {hi} < probe {}",
                upper[j]
            )));
        }
    }
    Ok(result.dual.values().iter().copied().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IdentityKind {
    /// `lhs ≤ rhs`; only positive residuals count.
    Inequality,
    /// `lhs = rhs`.
    Equality,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub kind: IdentityKind,
    pub step: f64,
    pub points: Vec<Vec<f64>>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub max_abs_residual: f64,
    pub max_positive_residual: f64,
    pub tol: f64,
    pub passed: bool,
}

impl IdentityReport {
    pub fn residuals(&self) -> impl Iterator<Item = f64> + '_ {
        self.lhs.iter().zip(&self.rhs).map(|(l, r)| l - r)
    }

    /// The same lhs and rhs judged as another kind of check.
    pub fn judged_as(&self, kind: IdentityKind, tol: f64) -> IdentityReport {
        let governing = match kind {
            IdentityKind::Inequality => self.max_positive_residual,
            IdentityKind::Equality => self.max_abs_residual,
        };
        IdentityReport {
            kind,
            tol,
            passed: governing <= tol,
            ..self.clone()
        }
    }

    /// The residual the verdict is based on.
    pub fn governing_residual(&self) -> f64 {
        match self.kind {
            IdentityKind::Inequality => self.max_positive_residual,
            IdentityKind::Equality => self.max_abs_residual,
        }
    }
}

fn identity_report(
    u: &WeightFunction,
    probes: &ProbeSet,
    cfg: &GridConfig,
    kind: IdentityKind,
    tol: f64,
) -> Result<IdentityReport> {
    let star = u.conjugate_weight()?;
    let a = log_conjugate_grid(u, probes, cfg)?;
    let b = log_conjugate_grid(&star, probes, cfg)?;
    let points = probes.points();
    let lhs: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
    let rhs: Vec<f64> = points.iter().map(|p| entropy_sum(p)).collect();
    let mut max_abs: f64 = 0.0;
    let mut max_pos: f64 = 0.0;
    for (l, r) in lhs.iter().zip(&rhs) {
        let d = l - r;
        if !d.is_finite() {
            return Err(Error::NonFinite {
                value: d,
                location: "identity residual".into(),
            });
        }
        max_abs = max_abs.max(d.abs());
        max_pos = max_pos.max(d);
    }
    let governing = match kind {
        IdentityKind::Inequality => max_pos,
        IdentityKind::Equality => max_abs,
    };
    Ok(IdentityReport {
        kind,
        step: cfg.step,
        points,
        lhs,
        rhs,
        max_abs_residual: max_abs,
        max_positive_residual: max_pos,
        tol,
        passed: governing <= tol,
    })
}

/// One-sided check, valid for any superlinear u.
pub fn verify_entropy_inequality(
    u: &WeightFunction,
    probes: &ProbeSet,
    cfg: &GridConfig,
    tol: f64,
) -> Result<IdentityReport> {
    identity_report(u, probes, cfg, IdentityKind::Inequality, tol)
}

/// Two-sided check; expected to hold only for convex u.
pub fn verify_entropy_identity(
    u: &WeightFunction,
    probes: &ProbeSet,
    cfg: &GridConfig,
    tol: f64,
) -> Result<IdentityReport> {
    identity_report(u, probes, cfg, IdentityKind::Equality, tol)
}

impl RefinementReport {
    /// The same pair of grids judged as another kind of check.
    pub fn judged_as(&self, kind: IdentityKind, tol: f64, min_shrink: f64) -> RefinementReport {
        let coarse = self.coarse.judged_as(kind, tol);
        let fine = self.fine.judged_as(kind, tol);
        let (rc, rf) = (coarse.governing_residual(), fine.governing_residual());
        let shrink = if rf > 0.0 { rc / rf } else { f64::INFINITY };
        RefinementReport {
            passed: fine.passed && (rc <= 1e-12 || shrink >= min_shrink),
            coarse,
            fine,
            shrink,
            min_shrink,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RefinementReport {
    pub coarse: IdentityReport,
    pub fine: IdentityReport,
    /// coarse residual / fine residual.
    pub shrink: f64,
    pub min_shrink: f64,
    pub passed: bool,
}

/// Runs a check on `cfg` and on the refined grid. Passes when the fine
/// residual is within tolerance and the residual shrank by `min_shrink`
/// (residuals already at rounding level count as converged).
pub fn verify_with_refinement(
    u: &WeightFunction,
    probes: &ProbeSet,
    cfg: &GridConfig,
    kind: IdentityKind,
    tol: f64,
    min_shrink: f64,
) -> Result<RefinementReport> {
    let coarse = identity_report(u, probes, cfg, kind, tol)?;
    let fine = identity_report(u, probes, &cfg.refined(), kind, tol)?;
    let (rc, rf) = (coarse.governing_residual(), fine.governing_residual());
    let shrink = if rf > 0.0 { rc / rf } else { f64::INFINITY };
    let converged = rc <= 1e-12 || shrink >= min_shrink;
    Ok(RefinementReport {
        passed: fine.passed && converged,
        coarse,
        fine,
        shrink,
        min_shrink,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DivergenceProfile {
    pub radii: Vec<f64>,
    /// `min_d (u[e])*(r·d) / r` for each radius.
    pub min_ratio: Vec<f64>,
    /// Probe with a negative coordinate and the boxes `[−R, R]ⁿ` used for it.
    pub witness: Vec<f64>,
    pub boxes: Vec<f64>,
    /// Running sup of `⟨x, t⟩ − u[e](t)` over each box.
    pub box_sups: Vec<f64>,
    /// Ratios nondecreasing in r and box sups growing at least 0.8·ΔR.
    pub growing: bool,
    pub witness_diverges: bool,
}

/// Growth of `(u[e])*` along rays in the positive orthant, plus a divergence
/// witness for a probe outside it.
pub fn divergence_profile(u: &WeightFunction, directions: &[Vec<f64>], radii: &[f64]) -> Result<DivergenceProfile> {
    let n = u.dim();
    if radii.is_empty() || radii.windows(2).any(|w| !(w[1] > w[0])) || radii[0] <= 0.0 {
        return Err(Error::InvalidArgument("radii must be positive and increasing".into()));
    }
    if directions.is_empty() {
        return Err(Error::InvalidArgument("no directions".into()));
    }
    let mut units = Vec::with_capacity(directions.len());
    for d in directions {
        if d.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: d.len(),
            });
        }
        if d.iter().any(|&v| v < 0.0) {
            return Err(Error::ProbeOutsideOrthant(d.clone()));
        }
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroDirection);
        }
        units.push(d.iter().map(|v| v / norm).collect::<Vec<f64>>());
    }
    let mut min_ratio = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut m = f64::INFINITY;
        for d in &units {
            let x: Vec<f64> = d.iter().map(|v| r * v).collect();
            m = m.min(log_conjugate_at(u, &x, -40.0)?.value / r);
        }
        min_ratio.push(m);
    }

    let mut witness = vec![0.0; n];
    witness[0] = -1.0;
    let boxes = vec![5.0, 10.0, 20.0];
    let mut box_sups = Vec::with_capacity(boxes.len());
    for &r in &boxes {
        let objective = |t: &[f64]| {
            let e: Vec<f64> = t.iter().map(|v| v.exp()).collect();
            witness.iter().zip(t).map(|(a, b)| a * b).sum::<f64>() - u.eval(&e)
        };
        let opts = MaximizeOptions {
            lower: -r,
            upper: r,
            ..MaximizeOptions::default()
        };
        box_sups.push(maximize_concave(&objective, &vec![0.0; n], &opts)?.value);
    }
    let witness_diverges = box_sups
        .windows(2)
        .zip(boxes.windows(2))
        .all(|(s, b)| s[1] - s[0] >= 0.8 * (b[1] - b[0]));
    let growing = min_ratio.windows(2).all(|w| w[1] >= w[0]);
    Ok(DivergenceProfile {
        radii: radii.to_vec(),
        min_ratio,
        witness,
        boxes,
        box_sups,
        growing,
        witness_diverges,
    })
}
