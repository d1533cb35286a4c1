//! Weight functions of the class 𝒱(ℝⁿ): convex, even in every coordinate,
//! nondecreasing on the positive orthant and superlinear at infinity.
//!
//! A [`WeightFunction`] is evaluated on `[0, ∞)ⁿ`; its values elsewhere come
//! from the symmetrized extension `g(x) = φ(|x₁|, …, |xₙ|)`. Catalog weights and
//! weights read from a JSON spec carry their conjugate, so φ* is available as
//! another `WeightFunction` via [`WeightFunction::conjugate_weight`].

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fenchel::HullConjugate;
use crate::potential::Potential;

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// One term `coef · s^p / p` of a one-dimensional profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub p: f64,
    pub coef: f64,
}

impl PowerTerm {
    fn new(p: f64, coef: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        if !(coef.is_finite() && coef > 0.0) {
            return Err(Error::InvalidCoefficient(coef));
        }
        Ok(Self { p, coef })
    }

    fn value(&self, s: f64) -> f64 {
        if self.p == 2.0 {
            return 0.5 * self.coef * s * s;
        }
        self.coef * s.powf(self.p) / self.p
    }

    fn slope(&self, s: f64) -> f64 {
        self.coef * s.powf(self.p - 1.0)
    }

    /// Closed-form conjugate `coef^{1-q} s^q / q` with `1/p + 1/q = 1`.
    fn conjugate(&self, s: f64) -> f64 {
        let q = self.p / (self.p - 1.0);
        self.coef.powf(1.0 - q) * s.powf(q) / q
    }
}

/// Even convex (or deliberately non-convex) function of one nonnegative
/// variable; the building block of separable and radial weights.
#[derive(Clone)]
enum Profile {
    Powers(Vec<PowerTerm>),
    /// `max(s²/2, 2s² − 1)`: convex with a kink at `s = √(2/3)`.
    Kinked,
    /// `s²/2 + 3·max(0, 1 − 2|s − 1|)`: superlinear but neither convex nor
    /// monotone. The conjugate is the discrete conjugate of a fine sampling.
    Bump(Arc<HullConjugate>),
}

impl Profile {
    fn value(&self, s: f64) -> f64 {
        match self {
            Profile::Powers(terms) => terms.iter().map(|t| t.value(s)).sum(),
            Profile::Kinked => (0.5 * s * s).max(2.0 * s * s - 1.0),
            Profile::Bump(_) => bump_value(s),
        }
    }

    fn conjugate(&self, s: f64) -> f64 {
        match self {
            Profile::Powers(terms) if terms.len() == 1 => terms[0].conjugate(s),
            Profile::Powers(terms) => powers_conjugate(terms, s),
            Profile::Kinked => {
                let r0 = (2.0f64 / 3.0).sqrt();
                if s <= r0 {
                    0.5 * s * s
                } else if s <= 4.0 * r0 {
                    s * r0 - 1.0 / 3.0
                } else {
                    s * s / 8.0 + 1.0
                }
            }
            Profile::Bump(hull) => hull.eval(s),
        }
    }
}

fn bump_value(s: f64) -> f64 {
    0.5 * s * s + 3.0 * (1.0 - 2.0 * (s - 1.0).abs()).max(0.0)
}

// sup_r (r s − Σ c r^p / p) for s ≥ 0: the maximizer solves Σ c r^{p−1} = s.
fn powers_conjugate(terms: &[PowerTerm], s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let slope = |r: f64| terms.iter().map(|t| t.slope(r)).sum::<f64>();
    let mut hi = 1.0;
    while slope(hi) < s {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    let value = |r: f64| terms.iter().map(|t| t.value(r)).sum::<f64>();
    r * s - value(r)
}

/// A weight φ on `[0, ∞)ⁿ` together with its symmetrized extension.
#[derive(Clone)]
pub struct WeightFunction {
    n: usize,
    label: String,
    eval: ScalarFn,
    extension: Option<ScalarFn>,
    conjugate: Option<ScalarFn>,
    convex: bool,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFunction")
            .field("n", &self.n)
            .field("label", &self.label)
            .field("has_conjugate", &self.conjugate.is_some())
            .finish()
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidDimension(n))
    } else {
        Ok(())
    }
}

fn separable(n: usize, label: String, profile: Profile, convex: bool) -> WeightFunction {
    let p1 = profile.clone();
    let p2 = profile;
    WeightFunction {
        n,
        label,
        eval: Arc::new(move |x: &[f64]| x.iter().map(|&s| p1.value(s.abs())).sum()),
        extension: None,
        conjugate: Some(Arc::new(move |y: &[f64]| {
            y.iter().map(|&s| p2.conjugate(s.abs())).sum()
        })),
        convex,
    }
}

fn radial(n: usize, label: String, profile: Profile) -> WeightFunction {
    let p1 = profile.clone();
    let p2 = profile;
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    WeightFunction {
        n,
        label,
        eval: Arc::new(move |x: &[f64]| p1.value(norm(x))),
        extension: None,
        conjugate: Some(Arc::new(move |y: &[f64]| p2.conjugate(norm(y)))),
        convex: true,
    }
}

/// φ(x) = ‖x‖²/2, the Fock weight; self-conjugate.
pub fn make_fock(n: usize) -> Result<WeightFunction> {
    check_dim(n)?;
    let term = PowerTerm::new(2.0, 1.0)?;
    Ok(separable(n, format!("fock:{n}"), Profile::Powers(vec![term]), true))
}

/// φ(x) = Σⱼ xⱼᵖ/p with conjugate Σⱼ yⱼ^q/q.
pub fn make_separable_power(n: usize, p: f64) -> Result<WeightFunction> {
    check_dim(n)?;
    let term = PowerTerm::new(p, 1.0)?;
    Ok(separable(n, format!("power:{p}:{n}"), Profile::Powers(vec![term]), true))
}

/// φ(x) = ‖x‖ᵖ/p with conjugate ‖y‖^q/q.
pub fn make_radial_power(n: usize, p: f64) -> Result<WeightFunction> {
    check_dim(n)?;
    let term = PowerTerm::new(p, 1.0)?;
    Ok(radial(n, format!("radial:{p}:{n}"), Profile::Powers(vec![term])))
}

/// φ(x) = Σⱼ max(xⱼ²/2, 2xⱼ² − 1): convex, in 𝒱, but not differentiable.
pub fn make_kinked(n: usize) -> Result<WeightFunction> {
    check_dim(n)?;
    Ok(separable(n, format!("kinked:{n}"), Profile::Kinked, true))
}

/// φ(x) = Σⱼ (xⱼ²/2 + 3·max(0, 1 − 2|xⱼ − 1|)): superlinear and even, but
/// neither convex nor monotone. Used as a negative fixture: the one-sided
/// conjugation inequality holds for it while the equality does not.
pub fn make_bump(n: usize) -> Result<WeightFunction> {
    check_dim(n)?;
    let step = 1.0 / 4096.0;
    let count = 64 * 4096 + 1;
    let xs: Vec<f64> = (0..count).map(|i| i as f64 * step).collect();
    let vs: Vec<f64> = xs.iter().map(|&s| bump_value(s)).collect();
    let hull = HullConjugate::new(&xs, &vs)?;
    Ok(separable(
        n,
        format!("bump:{n}"),
        Profile::Bump(Arc::new(hull)),
        false,
    ))
}

impl WeightFunction {
    /// A weight given by an arbitrary evaluator on `[0, ∞)ⁿ`.
    pub fn custom<F>(n: usize, label: impl Into<String>, eval: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        check_dim(n)?;
        Ok(Self {
            n,
            label: label.into(),
            eval: Arc::new(eval),
            extension: None,
            conjugate: None,
            convex: false,
        })
    }

    /// Attach a closed-form conjugate. The caller asserts convexity.
    pub fn with_conjugate<F>(mut self, conjugate: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        self.conjugate = Some(Arc::new(conjugate));
        self.convex = true;
        self
    }

    /// Replace the symmetrized extension by an explicit evaluator on ℝⁿ.
    /// Only meaningful for candidate weights under validation.
    pub fn with_extension<F>(mut self, extension: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        self.extension = Some(Arc::new(extension));
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Whether the weight is known to be convex on ℝⁿ (catalog and JSON
    /// weights except the bump fixture).
    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// φ at a point of `[0, ∞)ⁿ`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// The extension g on ℝⁿ.
    pub fn extended(&self, x: &[f64]) -> f64 {
        match &self.extension {
            Some(ext) => ext(x),
            None => {
                let mut buf = [0.0f64; 8];
                if x.len() <= buf.len() {
                    for (b, v) in buf.iter_mut().zip(x) {
                        *b = v.abs();
                    }
                    (self.eval)(&buf[..x.len()])
                } else {
                    let a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
                    (self.eval)(&a)
                }
            }
        }
    }

    pub fn has_conjugate(&self) -> bool {
        self.conjugate.is_some()
    }

    /// φ*(y), when a closed form (or exact one-dimensional reduction) exists.
    pub fn conjugate_at(&self, y: &[f64]) -> Option<f64> {
        self.conjugate.as_ref().map(|c| c(y))
    }

    /// φ* as a weight in its own right. Its conjugate is φ again, which is
    /// exact for convex weights (biconjugation).
    pub fn conjugate_weight(&self) -> Result<WeightFunction> {
        let conj = self
            .conjugate
            .clone()
            .ok_or_else(|| Error::NoConjugate(self.label.clone()))?;
        let label = match self.label.strip_suffix('*') {
            Some(base) => base.to_string(),
            None => format!("{}*", self.label),
        };
        let eval = self.eval.clone();
        Ok(WeightFunction {
            n: self.n,
            label,
            eval: conj,
            extension: None,
            conjugate: Some(eval),
            // φ* is convex whether or not φ is.
            convex: true,
        })
    }

    /// Build from a JSON weight spec.
    pub fn from_spec(spec: &WeightSpec) -> Result<Self> {
        check_dim(spec.n)?;
        if spec.terms.is_empty() {
            return Err(Error::Config("weight spec has no terms".into()));
        }
        let mut separable_terms = Vec::new();
        let mut radial_terms = Vec::new();
        for term in &spec.terms {
            let t = PowerTerm::new(term.p, term.coef)?;
            match term.kind {
                TermKind::Power => separable_terms.push(t),
                TermKind::RadialPower => radial_terms.push(t),
            }
        }
        let label = spec.label();
        let n = spec.n;
        Ok(match (separable_terms.is_empty(), radial_terms.is_empty()) {
            (false, true) => separable(n, label, Profile::Powers(separable_terms), true),
            (true, false) => radial(n, label, Profile::Powers(radial_terms)),
            _ => {
                // Convex as a sum of convex terms, but the conjugate is an
                // infimal convolution with no exact one-dimensional reduction.
                let sep = Profile::Powers(separable_terms);
                let rad = Profile::Powers(radial_terms);
                let mut w = WeightFunction::custom(n, label, move |x: &[f64]| {
                    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    x.iter().map(|&s| sep.value(s.abs())).sum::<f64>() + rad.value(norm)
                })?;
                w.convex = true;
                w
            }
        })
    }

    /// Parse a preset: `fock:N`, `power:P:N`, `radial:P:N`, `kinked:N`, `bump:N`.
    pub fn from_preset(preset: &str) -> Result<Self> {
        let parts: Vec<&str> = preset.split(':').collect();
        let bad = || Error::Config(format!("unrecognized weight preset `{preset}`"));
        let dim = |s: &str| s.parse::<usize>().map_err(|_| bad());
        let exponent = |s: &str| s.parse::<f64>().map_err(|_| bad());
        match parts.as_slice() {
            ["fock", n] => make_fock(dim(n)?),
            ["power", p, n] => make_separable_power(dim(n)?, exponent(p)?),
            ["radial", p, n] => make_radial_power(dim(n)?, exponent(p)?),
            ["kinked", n] => make_kinked(dim(n)?),
            ["bump", n] => make_bump(dim(n)?),
            _ => Err(bad()),
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let spec: WeightSpec = serde_json::from_str(&text)?;
        Self::from_spec(&spec)
    }
}

impl Potential for WeightFunction {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.extended(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    Power,
    RadialPower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    #[serde(rename = "type")]
    pub kind: TermKind,
    pub p: f64,
    pub coef: f64,
}

/// `{"n": 2, "terms": [{"type": "power", "p": 4.0, "coef": 1.0}]}`.
/// A `power` term contributes `coef · Σⱼ |xⱼ|ᵖ / p`; a `radial_power` term
/// contributes `coef · ‖x‖ᵖ / p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub n: usize,
    pub terms: Vec<TermSpec>,
}

impl WeightSpec {
    fn label(&self) -> String {
        let terms: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let kind = match t.kind {
                    TermKind::Power => "power",
                    TermKind::RadialPower => "radial_power",
                };
                format!("{}*{kind}({})", t.coef, t.p)
            })
            .collect();
        format!("json[{}]:{}", terms.join("+"), self.n)
    }
}

/// Sampling plan for [`validate_class_v`].
#[derive(Clone, Debug)]
pub struct ClassVSampling {
    /// Box `[0, radius]ⁿ` for the symmetry and monotonicity probes.
    pub radius: f64,
    pub points_per_axis: usize,
    /// Two radii `R₁ < R₂` for the growth probe.
    pub growth_radii: (f64, f64),
    pub directions_per_axis: usize,
    pub convexity_triples: usize,
    pub tol: f64,
    /// Required relative growth of `min g(x)/‖x‖` between the two radii.
    pub growth_margin: f64,
    pub seed: u64,
}

impl Default for ClassVSampling {
    fn default() -> Self {
        Self {
            radius: 4.0,
            points_per_axis: 9,
            growth_radii: (4.0, 16.0),
            directions_per_axis: 9,
            convexity_triples: 2000,
            tol: 1e-9,
            growth_margin: 0.05,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassVReport {
    pub symmetric_ok: bool,
    pub monotone_ok: bool,
    pub superlinear_ok: bool,
    pub convex_ok: bool,
    pub worst_violation: f64,
    pub samples_used: usize,
}

impl ClassVReport {
    pub fn all_ok(&self) -> bool {
        self.symmetric_ok && self.monotone_ok && self.superlinear_ok && self.convex_ok
    }
}

fn tensor_nodes(n: usize, count: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let step = (hi - lo) / (count - 1) as f64;
    let total = count.pow(n as u32);
    (0..total)
        .map(|mut k| {
            let mut x = vec![0.0; n];
            for xj in x.iter_mut().rev() {
                *xj = lo + (k % count) as f64 * step;
                k /= count;
            }
            x
        })
        .collect()
}

/// Sampled certificate of membership in 𝒱(ℝⁿ). Conditions are semi-infinite,
/// so every flag is a falsifiable probe rather than a proof.
pub fn validate_class_v(phi: &WeightFunction, sampling: &ClassVSampling) -> Result<ClassVReport> {
    let n = phi.dim();
    if sampling.points_per_axis < 3 {
        return Err(Error::InvalidArgument(
            "class-V sampling needs at least 3 points per axis".into(),
        ));
    }
    let (r1, r2) = sampling.growth_radii;
    if !(r1 > 0.0 && r1 < r2) {
        return Err(Error::InvalidArgument(
            "class-V growth probe needs radii 0 < R1 < R2".into(),
        ));
    }
    let count = sampling.points_per_axis;
    let step = sampling.radius / (count - 1) as f64;
    let nodes = tensor_nodes(n, count, 0.0, sampling.radius);
    let mut samples = 0usize;

    // symmetry: every sign pattern for small n, single-coordinate flips plus
    // the full flip otherwise
    let mut sym_violation: f64 = 0.0;
    let patterns: Vec<Vec<f64>> = if n <= 6 {
        (0..(1usize << n))
            .map(|mask| {
                (0..n)
                    .map(|j| if mask >> j & 1 == 1 { -1.0 } else { 1.0 })
                    .collect()
            })
            .collect()
    } else {
        let mut pats: Vec<Vec<f64>> = (0..n)
            .map(|j| (0..n).map(|i| if i == j { -1.0 } else { 1.0 }).collect())
            .collect();
        pats.push(vec![-1.0; n]);
        pats
    };
    for x in &nodes {
        let base = phi.extended(x);
        for signs in &patterns {
            let flipped: Vec<f64> = x.iter().zip(signs).map(|(a, s)| a * s).collect();
            sym_violation = sym_violation.max((phi.extended(&flipped) - base).abs());
            samples += 1;
        }
    }

    // monotonicity along axis-aligned neighbours in [0, R]ⁿ
    let mut mono_violation: f64 = 0.0;
    for x in &nodes {
        let gx = phi.extended(x);
        for j in 0..n {
            if x[j] + step <= sampling.radius + 1e-12 {
                let mut y = x.clone();
                y[j] += step;
                mono_violation = mono_violation.max(gx - phi.extended(&y));
                samples += 1;
            }
        }
    }

    // superlinear growth: min over orthant directions of g(R d)/R
    let directions: Vec<Vec<f64>> = tensor_nodes(n, sampling.directions_per_axis.max(2), 0.0, 1.0)
        .into_iter()
        .filter(|d| d.iter().any(|&v| v == 1.0))
        .map(|d| {
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            d.iter().map(|v| v / norm).collect()
        })
        .collect();
    let min_ratio = |r: f64| {
        directions
            .iter()
            .map(|d| {
                let x: Vec<f64> = d.iter().map(|v| v * r).collect();
                phi.extended(&x) / r
            })
            .fold(f64::INFINITY, f64::min)
    };
    let m1 = min_ratio(r1);
    let m2 = min_ratio(r2);
    samples += 2 * directions.len();
    let required = m1 + sampling.growth_margin * (1.0 + m1.abs());
    let growth_violation = if m2.is_finite() && m1.is_finite() {
        (required - m2).max(0.0)
    } else {
        f64::INFINITY
    };

    // convexity: midpoint test on random pairs in [−R, R]ⁿ
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let mut convex_violation: f64 = 0.0;
    let r = sampling.radius;
    for _ in 0..sampling.convexity_triples {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-r..=r)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-r..=r)).collect();
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
        let gap = phi.extended(&mid) - 0.5 * (phi.extended(&x) + phi.extended(&y));
        convex_violation = convex_violation.max(gap);
        samples += 1;
    }

    let tol = sampling.tol;
    let worst = sym_violation
        .max(mono_violation)
        .max(growth_violation)
        .max(convex_violation)
        .max(0.0);
    Ok(ClassVReport {
        symmetric_ok: sym_violation <= tol,
        monotone_ok: mono_violation <= tol,
        superlinear_ok: growth_violation <= tol,
        convex_ok: convex_violation <= tol,
        worst_violation: worst,
        samples_used: samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fock_values() {
        let f1 = make_fock(1).unwrap();
        assert_abs_diff_eq!(f1.eval(&[2.0]), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f1.conjugate_at(&[3.0]).unwrap(), 4.5, epsilon = 1e-15);
        let f2 = make_fock(2).unwrap();
        assert_abs_diff_eq!(f2.eval(&[1.0, 1.0]), 1.0, epsilon = 1e-15);
        assert!(matches!(make_fock(0), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn separable_power_values() {
        let p2 = make_separable_power(1, 2.0).unwrap();
        assert_abs_diff_eq!(p2.eval(&[2.0]), 2.0, epsilon = 1e-15);
        let p4 = make_separable_power(1, 4.0).unwrap();
        assert_abs_diff_eq!(p4.eval(&[1.0]), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(p4.conjugate_at(&[1.0]).unwrap(), 0.75, epsilon = 1e-14);
        assert!(matches!(
            make_separable_power(1, 1.0),
            Err(Error::InvalidExponent(_))
        ));
        assert!(make_separable_power(1, 0.5).is_err());
    }

    #[test]
    fn p4_conjugate_matches_brute_force() {
        // sup_x (x − x⁴/4) over a fine grid
        let brute = (0..=400_000)
            .map(|i| {
                let x = -2.0 + i as f64 * 1e-5;
                x - x.powi(4) / 4.0
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let p4 = make_separable_power(1, 4.0).unwrap();
        assert_abs_diff_eq!(p4.conjugate_at(&[1.0]).unwrap(), brute, epsilon = 1e-9);
    }

    #[test]
    fn kinked_conjugate_matches_brute_force() {
        let k = make_kinked(1).unwrap();
        for &y in &[0.3, 0.9, 2.0, 3.1, 5.0] {
            let brute = (0..=800_000)
                .map(|i| {
                    let x = -4.0 + i as f64 * 1e-5;
                    x * y - k.eval(&[x.abs()])
                })
                .fold(f64::NEG_INFINITY, f64::max);
            // at the kink the grid misses the maximizer by up to half a step
            let exact = k.conjugate_at(&[y]).unwrap();
            assert!(brute <= exact + 1e-12);
            assert_abs_diff_eq!(exact, brute, epsilon = 5e-5);
        }
    }

    #[test]
    fn multi_term_conjugate_by_root_finding() {
        let spec = WeightSpec {
            n: 1,
            terms: vec![
                TermSpec { kind: TermKind::Power, p: 2.0, coef: 1.0 },
                TermSpec { kind: TermKind::Power, p: 4.0, coef: 0.5 },
            ],
        };
        let w = WeightFunction::from_spec(&spec).unwrap();
        let y = 1.7;
        let brute = (0..=500_000)
            .map(|i| {
                let x = i as f64 * 1e-5;
                x * y - w.eval(&[x])
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert_abs_diff_eq!(w.conjugate_at(&[y]).unwrap(), brute, epsilon = 1e-9);
    }

    #[test]
    fn conjugate_weight_round_trips_label_and_values() {
        let p4 = make_separable_power(2, 4.0).unwrap();
        let star = p4.conjugate_weight().unwrap();
        assert_eq!(star.label(), "power:4:2*");
        assert_eq!(star.conjugate_weight().unwrap().label(), "power:4:2");
        assert_abs_diff_eq!(star.conjugate_at(&[1.0, 2.0]).unwrap(), p4.eval(&[1.0, 2.0]));
    }

    #[test]
    fn json_spec_parses() {
        let text = r#"{"n": 2, "terms": [{"type": "radial_power", "p": 3.0, "coef": 2.0}]}"#;
        let spec: WeightSpec = serde_json::from_str(text).unwrap();
        let w = WeightFunction::from_spec(&spec).unwrap();
        // 2 · 5^{3/2} / 3 at ‖x‖ = √5
        assert_abs_diff_eq!(w.eval(&[1.0, 2.0]), 2.0 * 5f64.powf(1.5) / 3.0, epsilon = 1e-12);
        assert!(w.has_conjugate());

        let bad = r#"{"n": 1, "terms": [{"type": "power", "p": 1.0, "coef": 1.0}]}"#;
        let spec: WeightSpec = serde_json::from_str(bad).unwrap();
        assert!(WeightFunction::from_spec(&spec).is_err());
        let negative = r#"{"n": 1, "terms": [{"type": "power", "p": 2.0, "coef": -1.0}]}"#;
        let spec: WeightSpec = serde_json::from_str(negative).unwrap();
        assert!(matches!(
            WeightFunction::from_spec(&spec),
            Err(Error::InvalidCoefficient(_))
        ));
        assert!(serde_json::from_str::<WeightSpec>(r#"{"n": 1, "terms": [{"type": "cubic"}]}"#).is_err());
    }

    #[test]
    fn mixed_spec_has_no_conjugate() {
        let spec = WeightSpec {
            n: 2,
            terms: vec![
                TermSpec { kind: TermKind::Power, p: 2.0, coef: 1.0 },
                TermSpec { kind: TermKind::RadialPower, p: 3.0, coef: 1.0 },
            ],
        };
        let w = WeightFunction::from_spec(&spec).unwrap();
        assert!(!w.has_conjugate());
        assert!(matches!(w.conjugate_weight(), Err(Error::NoConjugate(_))));
        assert!(validate_class_v(&w, &ClassVSampling::default()).unwrap().all_ok());
    }

    #[test]
    fn presets() {
        assert_eq!(WeightFunction::from_preset("fock:3").unwrap().dim(), 3);
        assert_eq!(WeightFunction::from_preset("power:4:1").unwrap().label(), "power:4:1");
        assert!(WeightFunction::from_preset("fock").is_err());
        assert!(WeightFunction::from_preset("fock:0").is_err());
        assert!(WeightFunction::from_preset("power:1:1").is_err());
    }

    #[test]
    fn catalog_passes_validation() {
        let sampling = ClassVSampling::default();
        for w in [
            make_fock(1).unwrap(),
            make_fock(2).unwrap(),
            make_separable_power(1, 4.0).unwrap(),
            make_separable_power(2, 1.5).unwrap(),
            make_radial_power(2, 3.0).unwrap(),
            make_kinked(2).unwrap(),
        ] {
            let report = validate_class_v(&w, &sampling).unwrap();
            assert!(report.all_ok(), "{}: {report:?}", w.label());
            assert!(report.worst_violation <= sampling.tol);
            let star = w.conjugate_weight().unwrap();
            assert!(validate_class_v(&star, &sampling).unwrap().all_ok(), "{}", star.label());
        }
    }

    #[test]
    fn linear_growth_is_not_superlinear() {
        let norm = WeightFunction::custom(2, "norm", |x: &[f64]| {
            x.iter().map(|v| v * v).sum::<f64>().sqrt()
        })
        .unwrap();
        let report = validate_class_v(&norm, &ClassVSampling::default()).unwrap();
        assert!(!report.superlinear_ok);
        assert!(report.symmetric_ok && report.monotone_ok && report.convex_ok);
        assert!(report.worst_violation > 0.0);
    }

    #[test]
    fn odd_extension_is_not_symmetric() {
        let odd = WeightFunction::custom(1, "x1", |x: &[f64]| x[0])
            .unwrap()
            .with_extension(|x: &[f64]| x[0]);
        let report = validate_class_v(&odd, &ClassVSampling::default()).unwrap();
        assert!(!report.symmetric_ok);
        assert!(report.worst_violation >= 2.0);
    }

    #[test]
    fn bump_fails_monotone_and_convex() {
        let bump = make_bump(1).unwrap();
        let report = validate_class_v(&bump, &ClassVSampling::default()).unwrap();
        assert!(report.symmetric_ok && report.superlinear_ok);
        assert!(!report.monotone_ok);
        assert!(!report.convex_ok);
        assert!(!bump.is_convex());
    }

    #[test]
    fn rejects_bad_sampling() {
        let f = make_fock(1).unwrap();
        let mut s = ClassVSampling::default();
        s.points_per_axis = 2;
        assert!(validate_class_v(&f, &s).is_err());
        let mut s = ClassVSampling::default();
        s.growth_radii = (5.0, 5.0);
        assert!(validate_class_v(&f, &s).is_err());
    }

    #[test]
    fn fenchel_young_on_catalog() {
        let weights = [
            make_fock(2).unwrap(),
            make_separable_power(2, 4.0).unwrap(),
            make_radial_power(2, 1.5).unwrap(),
            make_kinked(2).unwrap(),
        ];
        let pts = tensor_nodes(2, 11, -3.0, 3.0);
        for w in &weights {
            for x in &pts {
                for y in &pts {
                    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                    let gap = w.extended(x) + w.conjugate_at(y).unwrap() - dot;
                    assert!(gap >= -1e-12, "{} at {x:?},{y:?}: {gap}", w.label());
                }
            }
        }
    }

    #[test]
    fn extension_is_even_exactly() {
        let w = make_separable_power(3, 3.0).unwrap();
        let x = [0.3, -1.7, 2.2];
        for j in 0..3 {
            let mut y = x;
            y[j] = -y[j];
            assert_eq!(w.extended(&x), w.extended(&y));
        }
    }
}
