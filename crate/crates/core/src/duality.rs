//! Coefficient-level form of the duality between `F²_φ` and `F²_{φ*}`.
//!
//! A function `f = Σ a_α z^α` has `‖f‖²_φ = Σ |a_α|² c_α(φ)`. The Laplace
//! transform of the functional represented by `b` has coefficients
//! `d_α = c_α(φ) conj(b_α) / α!`, with inverse `g_α = conj(d_α) α! / c_α(φ)`.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fenchel::log_conjugate_at;
use crate::laplace::{
    default_method, factorial, laplace_integral_at, simpson_box, sublevel_volume, LaplaceOptions, SublevelSpec,
};
use crate::moments::{MomentTable, MultiIndex, T_MIN};
use crate::potential::LogSubstituted;
use crate::weights::WeightFunction;

/// Finitely many Taylor coefficients; absent indices are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSequence {
    n: usize,
    degree: u32,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct Term {
    alpha: MultiIndex,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct SequenceJson {
    n: usize,
    degree: u32,
    terms: Vec<Term>,
}

impl CoefficientSequence {
    pub fn new(n: usize, degree: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self {
            n,
            degree,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn from_terms(n: usize, degree: u32, terms: impl IntoIterator<Item = (MultiIndex, Complex64)>) -> Result<Self> {
        let mut s = Self::new(n, degree)?;
        for (a, c) in terms {
            s.insert(a, c)?;
        }
        Ok(s)
    }

    /// Independent uniform real and imaginary parts in `[−1, 1)` for every
    /// `|α| ≤ degree`, drawn in lexicographic order of α.
    pub fn random<R: Rng>(n: usize, degree: u32, rng: &mut R) -> Result<Self> {
        let mut s = Self::new(n, degree)?;
        for a in MultiIndex::all_up_to(n, degree) {
            let re = rng.random_range(-1.0..1.0);
            let im = rng.random_range(-1.0..1.0);
            s.coeffs.insert(a, Complex64::new(re, im));
        }
        Ok(s)
    }

    pub fn insert(&mut self, alpha: MultiIndex, c: Complex64) -> Result<()> {
        if alpha.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: alpha.dim(),
            });
        }
        if alpha.degree() > self.degree {
            return Err(Error::InvalidArgument(format!(
                "index {alpha} exceeds truncation degree {}",
                self.degree
            )));
        }
        if !(c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::NonFinite {
                value: if c.re.is_finite() { c.im } else { c.re },
                location: format!("coefficient {alpha}"),
            });
        }
        self.coeffs.insert(alpha, c);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn get(&self, alpha: &MultiIndex) -> Complex64 {
        self.coeffs.get(alpha).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, lambda: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(a, c)| (a.clone(), c * lambda)).collect(),
            ..self.clone()
        }
    }

    /// `Σ a_α z^α`.
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(a, c)| {
                a.components()
                    .iter()
                    .zip(z)
                    .fold(*c, |acc, (&k, zj)| acc * zj.powu(k))
            })
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        let j = SequenceJson {
            n: self.n,
            degree: self.degree,
            terms: self
                .coeffs
                .iter()
                .map(|(a, c)| Term {
                    alpha: a.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&j)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: SequenceJson = serde_json::from_str(s)?;
        Self::from_terms(
            j.n,
            j.degree,
            j.terms.into_iter().map(|t| (t.alpha, Complex64::new(t.re, t.im))),
        )
    }
}

fn check_table(c: &CoefficientSequence, table: &MomentTable) -> Result<()> {
    if table.n != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            got: table.n,
        });
    }
    Ok(())
}

/// Pairwise sum of nonnegative terms sorted by decreasing size.
fn pairwise(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| b.total_cmp(a));
    while v.len() > 1 {
        v = v.chunks(2).map(|c| c.iter().sum()).collect();
    }
    v.first().copied().unwrap_or(0.0)
}

/// `ln Σ |a_α|² c_α`; `−∞` for the zero sequence.
pub fn ln_norm_sq(c: &CoefficientSequence, table: &MomentTable) -> Result<f64> {
    check_table(c, table)?;
    let mut logs = Vec::with_capacity(c.len());
    for (a, v) in c.iter() {
        let m = v.norm_sqr();
        if m > 0.0 {
            logs.push(m.ln() + table.get(a)?.ln_value);
        }
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Ok(top);
    }
    Ok(top + pairwise(logs.iter().map(|l| (l - top).exp()).collect()).ln())
}

/// `‖f‖²_φ = Σ |a_α|² c_α(φ)`.
pub fn norm_sq(c: &CoefficientSequence, table: &MomentTable) -> Result<f64> {
    Ok(ln_norm_sq(c, table)?.exp())
}

// c_α / α!, formed from logs.
fn diagonal(table: &MomentTable, a: &MultiIndex) -> Result<f64> {
    Ok((table.get(a)?.ln_value - a.ln_factorial()).exp())
}

/// `d_α = c_α(φ) conj(b_α) / α!`.
pub fn forward_map(b: &CoefficientSequence, table_phi: &MomentTable) -> Result<CoefficientSequence> {
    check_table(b, table_phi)?;
    let mut out = CoefficientSequence::new(b.dim(), b.degree())?;
    for (a, v) in b.iter() {
        out.coeffs.insert(a.clone(), v.conj().scale(diagonal(table_phi, a)?));
    }
    Ok(out)
}

/// `g_α = conj(d_α) α! / c_α(φ)`; exact inverse of [`forward_map`] up to one
/// rounding per component.
pub fn inverse_map(d: &CoefficientSequence, table_phi: &MomentTable) -> Result<CoefficientSequence> {
    check_table(d, table_phi)?;
    let mut out = CoefficientSequence::new(d.dim(), d.degree())?;
    for (a, v) in d.iter() {
        out.coeffs.insert(a.clone(), v.conj().unscale(diagonal(table_phi, a)?));
    }
    Ok(out)
}

/// Largest distance in units in the last place between matching components.
pub fn max_ulp_distance(x: &CoefficientSequence, y: &CoefficientSequence) -> u64 {
    fn ulps(a: f64, b: f64) -> u64 {
        if a == b {
            return 0;
        }
        let key = |v: f64| {
            let bits = v.to_bits() as i64;
            if bits < 0 {
                i64::MIN - bits
            } else {
                bits
            }
        };
        key(a).abs_diff(key(b))
    }
    let keys: std::collections::BTreeSet<&MultiIndex> = x.coeffs.keys().chain(y.coeffs.keys()).collect();
    keys.into_iter()
        .map(|a| {
            let (p, q) = (x.get(a), y.get(a));
            ulps(p.re, q.re).max(ulps(p.im, q.im))
        })
        .max()
        .unwrap_or(0)
}

#[derive(Clone, Debug, Serialize)]
pub struct StirlingCheck {
    pub alpha: MultiIndex,
    pub r: f64,
    pub ln_r: f64,
    /// `∏ e^{−1/(6(αⱼ+1))}`, exclusive.
    pub lower: f64,
    pub upper: f64,
    pub ok: bool,
}

/// `r(α) = e^{2((φ[e])*(α̃) + (φ*[e])*(α̃))} / α!² · (2π)ⁿ / ∏(αⱼ + 1)` must lie
/// in `(∏ e^{−1/(6(αⱼ+1))}, 1]`.
pub fn stirling_identity_check(phi: &WeightFunction, alpha: &MultiIndex) -> Result<StirlingCheck> {
    let star = phi.conjugate_weight()?;
    let tilde = alpha.tilde();
    let s1 = log_conjugate_at(phi, &tilde, T_MIN)?.value;
    let s2 = log_conjugate_at(&star, &tilde, T_MIN)?.value;
    let n = alpha.dim() as f64;
    let ln_r = 2.0 * (s1 + s2) - 2.0 * alpha.ln_factorial() + n * (2.0 * PI).ln()
        - tilde.iter().map(|v| v.ln()).sum::<f64>();
    let ln_lower: f64 = tilde.iter().map(|v| -1.0 / (6.0 * v)).sum();
    Ok(StirlingCheck {
        alpha: alpha.clone(),
        r: ln_r.exp(),
        ln_r,
        lower: ln_lower.exp(),
        upper: 1.0,
        ok: ln_r > ln_lower && ln_r <= 0.0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct KConditionEntry {
    pub alpha: MultiIndex,
    pub volume_phi: f64,
    pub volume_phi_star: f64,
    pub product: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KConditionReport {
    pub entries: Vec<KConditionEntry>,
    /// `max over entries of max(product, 1/product)`.
    pub k_hat: f64,
    /// Componentwise range of the scanned indices.
    pub alpha_min: Vec<u32>,
    pub alpha_max: Vec<u32>,
}

fn half_volume(u: &WeightFunction, y: &[f64]) -> Result<f64> {
    let peak = log_conjugate_at(u, y, T_MIN)?;
    let h = LogSubstituted::new(u);
    let spec = SublevelSpec::with_conjugate(&h, y, 0.5, peak.value, peak.argmax)?;
    Ok(sublevel_volume(&spec, &default_method(u.dim()))?.value)
}

/// `V(D_α^{φ[e]}(1/2)) · V(D_α^{φ*[e]}(1/2)) · ∏αⱼ` over indices with every
/// component at least 1.
pub fn k_condition_scan(phi: &WeightFunction, alphas: &[MultiIndex]) -> Result<KConditionReport> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("empty index set".into()));
    }
    if let Some(a) = alphas.iter().find(|a| a.dim() != phi.dim() || a.components().contains(&0)) {
        return Err(Error::InvalidArgument(format!(
            "index {a} must have {} components, all at least 1",
            phi.dim()
        )));
    }
    let star = phi.conjugate_weight()?;
    let entries: Vec<KConditionEntry> = alphas
        .par_iter()
        .map(|a| {
            let y = a.as_f64();
            let v1 = half_volume(phi, &y)?;
            let v2 = half_volume(&star, &y)?;
            Ok(KConditionEntry {
                alpha: a.clone(),
                volume_phi: v1,
                volume_phi_star: v2,
                product: v1 * v2 * y.iter().product::<f64>(),
            })
        })
        .collect::<Result<_>>()?;
    let k_hat = entries
        .iter()
        .map(|e| e.product.max(1.0 / e.product))
        .fold(1.0, f64::max);
    let n = phi.dim();
    let mut alpha_min = vec![u32::MAX; n];
    let mut alpha_max = vec![0; n];
    for a in alphas {
        for (j, &c) in a.components().iter().enumerate() {
            alpha_min[j] = alpha_min[j].min(c);
            alpha_max[j] = alpha_max[j].max(c);
        }
    }
    Ok(KConditionReport {
        entries,
        k_hat,
        alpha_min,
        alpha_max,
    })
}

/// The indices `α̃ = α + 1` for `|α| ≤ degree`: the range the operator
/// bounds draw on.
pub fn shifted_indices(n: usize, degree: u32) -> Vec<MultiIndex> {
    MultiIndex::all_up_to(n, degree)
        .into_iter()
        .map(|a| MultiIndex::new(a.components().iter().map(|c| c + 1).collect()).expect("n ≥ 1"))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub constant_used: f64,
    pub ok: bool,
}

impl BoundReport {
    fn new(name: &str, ln_lhs: f64, ln_rhs_base: f64, constant: f64) -> Self {
        let lhs = ln_lhs.exp();
        let rhs = (ln_rhs_base + constant.ln()).exp();
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            constant_used: constant,
            ok: ln_lhs == f64::NEG_INFINITY || ln_lhs <= ln_rhs_base + constant.ln() + 1e-12,
        }
    }
}

/// `M₁ = (2π)ⁿ (1 + n!)² K`.
pub fn forward_constant(n: usize, k: f64) -> f64 {
    (2.0 * PI).powi(n as i32) * (1.0 + factorial(n)).powi(2) * k
}

/// `K e² (2eπ)ⁿ`.
pub fn inverse_constant(n: usize, k: f64) -> f64 {
    k * E * E * (2.0 * E * PI).powi(n as i32)
}

/// `‖d‖²_{φ*} ≤ M₁ ‖b‖²_φ` for `d = forward_map(b)`, and
/// `‖inverse_map(d)‖²_φ ≤ K e² (2eπ)ⁿ ‖d‖²_{φ*}`.
pub fn isomorphism_bound_check(
    b: &CoefficientSequence,
    table_phi: &MomentTable,
    table_phi_star: &MomentTable,
    k: f64,
) -> Result<(BoundReport, BoundReport)> {
    let n = b.dim();
    let d = forward_map(b, table_phi)?;
    let ln_b = ln_norm_sq(b, table_phi)?;
    let ln_d = ln_norm_sq(&d, table_phi_star)?;
    let g = inverse_map(&d, table_phi)?;
    let ln_g = ln_norm_sq(&g, table_phi)?;
    Ok((
        BoundReport::new("forward", ln_d, ln_b, forward_constant(n, k)),
        BoundReport::new("inverse", ln_g, ln_d, inverse_constant(n, k)),
    ))
}

/// `|(z^α, z^β)_φ|` by polar quadrature: a periodic trapezoid rule with
/// `angles` nodes per angular variable times the radial integral
/// `∫ r^{α+β+1} e^{−2φ(r)} dr`, taken in the log variable.
pub fn monomial_orthogonality_check(
    phi: &WeightFunction,
    alpha: &MultiIndex,
    beta: &MultiIndex,
    angles: usize,
) -> Result<f64> {
    let n = phi.dim();
    if alpha.dim() != n || beta.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: alpha.dim().min(beta.dim()),
        });
    }
    if alpha == beta {
        return Err(Error::InvalidArgument("orthogonality needs distinct indices".into()));
    }
    let mut angular = Complex64::new(1.0, 0.0);
    for (&a, &b) in alpha.components().iter().zip(beta.components()) {
        let m = a as f64 - b as f64;
        let s: Complex64 = (0..angles)
            .map(|k| Complex64::from_polar(1.0, m * 2.0 * PI * k as f64 / angles as f64))
            .sum();
        angular *= s * (2.0 * PI / angles as f64);
    }
    let y: Vec<f64> = alpha
        .components()
        .iter()
        .zip(beta.components())
        .map(|(&a, &b)| a as f64 + b as f64 + 2.0)
        .collect();
    let half: Vec<f64> = y.iter().map(|v| 0.5 * v).collect();
    let peak = log_conjugate_at(phi, &half, T_MIN)?;
    let h = LogSubstituted::scaled(phi, 2.0);
    let radial = laplace_integral_at(&h, &y, 2.0 * peak.value, &peak.argmax, &LaplaceOptions::default())?;
    Ok(angular.norm() * radial.value)
}

/// `∫_{ℂⁿ} |f(z)|² e^{−2φ(|z|)} dμ` by tensor Simpson quadrature on the real
/// cube `[−half_width, half_width]^{2n}`; an independent check of
/// [`norm_sq`] for n ≤ 2.
pub fn quadrature_norm_sq(phi: &WeightFunction, f: &CoefficientSequence, half_width: f64, intervals: usize) -> Result<f64> {
    let n = phi.dim();
    if f.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: f.dim(),
        });
    }
    if n > 2 {
        return Err(Error::InvalidArgument(format!("direct quadrature supports n ≤ 2, got {n}")));
    }
    let integrand = |x: &[f64]| {
        let z: Vec<Complex64> = x.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
        let abs: Vec<f64> = z.iter().map(|v| v.norm()).collect();
        f.eval(&z).norm_sqr() * (-2.0 * phi.eval(&abs)).exp()
    };
    let lo = vec![-half_width; 2 * n];
    let hi = vec![half_width; 2 * n];
    Ok(simpson_box(&integrand, &lo, &hi, intervals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{make_fock, make_separable_power};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::OnceLock;

    fn fock_table() -> &'static MomentTable {
        static T: OnceLock<MomentTable> = OnceLock::new();
        T.get_or_init(|| MomentTable::build(&make_fock(1).unwrap(), 10).unwrap())
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    fn single(a: u32, c: Complex64) -> CoefficientSequence {
        CoefficientSequence::from_terms(1, 10, [(mi(&[a]), c)]).unwrap()
    }

    #[test]
    fn norm_examples() {
        let t = fock_table();
        assert_relative_eq!(norm_sq(&single(0, 1.0.into()), t).unwrap(), PI, max_relative = 1e-9);
        assert_relative_eq!(norm_sq(&single(4, 1.0.into()), t).unwrap(), t.get(&mi(&[4])).unwrap().value);
        let f = CoefficientSequence::from_terms(1, 10, [(mi(&[0]), 1.0.into()), (mi(&[1]), 1.0.into())]).unwrap();
        assert_relative_eq!(norm_sq(&f, t).unwrap(), 2.0 * PI, max_relative = 1e-9);
        assert_eq!(norm_sq(&CoefficientSequence::new(1, 10).unwrap(), t).unwrap(), 0.0);
        let beyond = CoefficientSequence::from_terms(1, 12, [(mi(&[11]), 1.0.into())]).unwrap();
        assert!(matches!(norm_sq(&beyond, t), Err(Error::MissingMoment(_))));
    }

    #[test]
    fn map_examples() {
        let t = fock_table();
        let d0 = forward_map(&single(0, 1.0.into()), t).unwrap();
        assert_relative_eq!(d0.get(&mi(&[0])).re, PI, max_relative = 1e-9);
        let d1 = forward_map(&single(1, 1.0.into()), t).unwrap();
        assert_relative_eq!(d1.get(&mi(&[1])).re, PI, max_relative = 1e-9);
        let g = inverse_map(&single(1, Complex64::new(0.0, PI)), t).unwrap();
        assert_relative_eq!(g.get(&mi(&[1])).im, -1.0, max_relative = 1e-9);
        assert!(inverse_map(&CoefficientSequence::new(1, 3).unwrap(), t).unwrap().is_empty());
    }

    #[test]
    fn round_trip_within_four_ulp() {
        let t = fock_table();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let b = CoefficientSequence::random(1, 10, &mut rng).unwrap();
            let back = inverse_map(&forward_map(&b, t).unwrap(), t).unwrap();
            assert!(max_ulp_distance(&b, &back) <= 4);
        }
    }

    #[test]
    fn stirling_envelope() {
        let phi = make_fock(1).unwrap();
        let r0 = stirling_identity_check(&phi, &mi(&[0])).unwrap();
        assert_relative_eq!(r0.r, 2.0 * PI / E / E, max_relative = 1e-10);
        assert!(r0.ok);
        for a in 0..=10 {
            assert!(stirling_identity_check(&phi, &mi(&[a])).unwrap().ok);
        }
        let r11 = stirling_identity_check(&make_fock(2).unwrap(), &mi(&[1, 1])).unwrap();
        assert_relative_eq!(r11.lower, (-1.0f64 / 6.0).exp(), max_relative = 1e-14);
        assert!(r11.ok);
    }

    #[test]
    fn k_condition_examples() {
        let phi = make_fock(1).unwrap();
        let r = k_condition_scan(&phi, &[mi(&[1]), mi(&[2]), mi(&[100])]).unwrap();
        assert_relative_eq!(r.entries[0].product, 2.23143676852, max_relative = 1e-8);
        assert_relative_eq!(r.entries[1].product, 2.1135004, max_relative = 1e-6);
        assert_relative_eq!(r.entries[2].product, 2.0022232, max_relative = 1e-6);
        assert_relative_eq!(r.k_hat, 2.23143676852, max_relative = 1e-8);
        assert!(k_condition_scan(&phi, &[mi(&[0])]).is_err());
    }

    #[test]
    fn bounds_for_delta_and_zero() {
        let t = fock_table();
        let (f, i) = isomorphism_bound_check(&single(0, 1.0.into()), t, t, 2.3).unwrap();
        assert_relative_eq!(f.lhs, PI.powi(3), max_relative = 1e-8);
        assert_relative_eq!(f.rhs, 2.0 * PI * 4.0 * 2.3 * PI, max_relative = 1e-8);
        assert!(f.ok && i.ok);
        let (f, i) = isomorphism_bound_check(&CoefficientSequence::new(1, 10).unwrap(), t, t, 2.3).unwrap();
        assert!(f.ok && i.ok && f.lhs == 0.0 && f.rhs == 0.0);
    }

    #[test]
    fn monomials_are_orthogonal() {
        let fock = make_fock(1).unwrap();
        assert!(monomial_orthogonality_check(&fock, &mi(&[0]), &mi(&[1]), 64).unwrap() < 1e-10);
        assert!(monomial_orthogonality_check(&fock, &mi(&[1]), &mi(&[3]), 64).unwrap() < 1e-10);
        let p4 = make_separable_power(1, 4.0).unwrap();
        assert!(monomial_orthogonality_check(&p4, &mi(&[0]), &mi(&[2]), 64).unwrap() < 1e-8);
        assert!(monomial_orthogonality_check(&p4, &mi(&[2]), &mi(&[2]), 64).is_err());
    }

    #[test]
    fn parseval_against_direct_quadrature() {
        let t = fock_table();
        let f = CoefficientSequence::from_terms(1, 1, [(mi(&[0]), 1.0.into()), (mi(&[1]), 1.0.into())]).unwrap();
        let direct = quadrature_norm_sq(&make_fock(1).unwrap(), &f, 9.0, 256).unwrap();
        assert_relative_eq!(direct, norm_sq(&f, t).unwrap(), max_relative = 1e-5);
    }

    #[test]
    fn sequence_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = CoefficientSequence::random(2, 3, &mut rng).unwrap();
        let text = b.to_json().unwrap();
        assert!(text.contains("\"terms\""));
        assert_eq!(CoefficientSequence::from_json(&text).unwrap(), b);
        assert!(CoefficientSequence::from_json(r#"{"n":1,"degree":1,"terms":[{"alpha":[2],"re":1,"im":0}]}"#).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn forward_map_is_antilinear(seed in 0u64..1000, lr in -3.0f64..3.0, li in -3.0f64..3.0) {
            let t = fock_table();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = CoefficientSequence::random(1, 10, &mut rng).unwrap();
            let lambda = Complex64::new(lr, li);
            let lhs = forward_map(&b.scale(lambda), t).unwrap();
            let rhs = forward_map(&b, t).unwrap().scale(lambda.conj());
            for (a, v) in lhs.iter() {
                let w = rhs.get(a);
                prop_assert!((v - w).norm() <= 1e-12 * (1.0 + w.norm()));
            }
            let nb = norm_sq(&b, t).unwrap();
            prop_assert!((norm_sq(&b.scale(lambda), t).unwrap() - lambda.norm_sqr() * nb).abs() <= 1e-12 * (1.0 + lambda.norm_sqr() * nb));
        }

        #[test]
        fn forward_norm_matches_termwise_sum(seed in 0u64..1000) {
            let t = fock_table();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = CoefficientSequence::random(1, 10, &mut rng).unwrap();
            let via_map = norm_sq(&forward_map(&b, t).unwrap(), t).unwrap();
            let termwise: f64 = b.iter().map(|(a, v)| {
                let c = t.get(a).unwrap().value;
                (c * v.norm() / a.factorial()).powi(2) * c
            }).sum();
            prop_assert!((via_map - termwise).abs() <= 1e-12 * termwise);
        }
    }
}
