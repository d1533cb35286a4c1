use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::weights::WeightFunction;

const GOLDEN: f64 = 0.381_966_011_250_105_1;

#[derive(Clone, Debug)]
pub struct MaximizeOptions {
    /// Per-coordinate box; `-inf`/`inf` for an unconstrained side.
    pub lower: f64,
    pub upper: f64,
    /// Coordinates whose magnitude exceeds this while still improving signal
    /// an unbounded supremum.
    pub divergence_limit: f64,
    pub xtol: f64,
    pub max_sweeps: usize,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        Self {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
            divergence_limit: 1e6,
            xtol: 1e-11,
            max_sweeps: 5000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Maximum {
    pub argmax: Vec<f64>,
    pub value: f64,
}

fn eval_or_neg_inf(f: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> f64 {
    let v = f(x);
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Maximize a concave function of one coordinate, starting from `start`.
fn line_maximize(
    g: &mut dyn FnMut(f64) -> f64,
    start: f64,
    opts: &MaximizeOptions,
) -> Result<(f64, f64)> {
    let clamp = |s: f64| s.clamp(opts.lower, opts.upper);
    let c = clamp(start);
    let gc = g(c);
    let mut h = 1.0f64.max(0.1 * c.abs());

    // bracket [a, b] around the best point found so far
    let (mut a, mut b);
    let right = clamp(c + h);
    let gr = if right > c { g(right) } else { f64::NEG_INFINITY };
    if gr > gc {
        let (mut lo, mut mid, mut gmid) = (c, right, gr);
        loop {
            h *= 2.0;
            let next = clamp(mid + h);
            if next <= mid {
                a = lo;
                b = mid;
                break;
            }
            if next.abs() > opts.divergence_limit {
                return Err(Error::Unbounded(format!(
                    "objective still increasing at coordinate {next}"
                )));
            }
            let gn = g(next);
            if gn > gmid {
                lo = mid;
                mid = next;
                gmid = gn;
            } else {
                a = lo;
                b = next;
                break;
            }
        }
    } else {
        let left = clamp(c - h);
        let gl = if left < c { g(left) } else { f64::NEG_INFINITY };
        if gl > gc {
            let (mut hi, mut mid, mut gmid) = (c, left, gl);
            loop {
                h *= 2.0;
                let next = clamp(mid - h);
                if next >= mid {
                    a = mid;
                    b = hi;
                    break;
                }
                if next.abs() > opts.divergence_limit {
                    return Err(Error::Unbounded(format!(
                        "objective still increasing at coordinate {next}"
                    )));
                }
                let gn = g(next);
                if gn > gmid {
                    hi = mid;
                    mid = next;
                    gmid = gn;
                } else {
                    a = next;
                    b = hi;
                    break;
                }
            }
        } else {
            a = left.min(c);
            b = right.max(c);
        }
    }

    // golden-section search on [a, b]
    let tol = opts.xtol * (1.0 + a.abs().max(b.abs()));
    let mut x1 = a + GOLDEN * (b - a);
    let mut x2 = b - GOLDEN * (b - a);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    while b - a > tol {
        if g1 >= g2 {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = a + GOLDEN * (b - a);
            g1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = b - GOLDEN * (b - a);
            g2 = g(x2);
        }
    }
    // the interior probes may miss a maximum sitting on the bracket ends
    let mut best = if g1 >= g2 { (x1, g1) } else { (x2, g2) };
    for cand in [a, b, c] {
        let v = g(cand);
        if v > best.1 {
            best = (cand, v);
        }
    }
    Ok(best)
}

/// Coordinate ascent for a concave objective on a box. Exact in one sweep for
/// separable objectives; linear convergence otherwise.
pub fn maximize_concave(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    opts: &MaximizeOptions,
) -> Result<Maximum> {
    let n = start.len();
    let mut x: Vec<f64> = start.iter().map(|v| v.clamp(opts.lower, opts.upper)).collect();
    let mut value = eval_or_neg_inf(f, &x);
    for _ in 0..opts.max_sweeps {
        let before = value;
        let mut moved: f64 = 0.0;
        for j in 0..n {
            let mut probe = x.clone();
            let mut g = |s: f64| {
                probe[j] = s;
                eval_or_neg_inf(f, &probe)
            };
            let (s, v) = line_maximize(&mut g, x[j], opts)?;
            if v >= value {
                moved = moved.max((s - x[j]).abs());
                x[j] = s;
                value = v;
            }
        }
        if n == 1 {
            break;
        }
        let scale = 1.0 + value.abs();
        if value - before <= 1e-15 * scale && moved <= 1e-9 * (1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()))) {
            break;
        }
    }
    if !value.is_finite() {
        return Err(Error::Unbounded(format!("no finite maximum found near {start:?}")));
    }
    Ok(Maximum { argmax: x, value })
}

/// h*(y) = sup_x (⟨x, y⟩ − h(x)) for convex h, by direct maximization.
pub fn conjugate_at(h: &dyn Potential, y: &[f64]) -> Result<Maximum> {
    if y.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: y.len(),
        });
    }
    let objective = |x: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() - h.value(x);
    maximize_concave(&objective, &vec![0.0; y.len()], &MaximizeOptions::default())
}

/// (u[e])*(x) = sup_t (⟨x, t⟩ − u(e^t)) for x in the closed positive orthant.
/// The search is restricted to `t ≥ t_min`; along coordinates with `xⱼ = 0`
/// the supremum is approached as `tⱼ → −∞`, so it lands on `t_min`.
pub fn log_conjugate_at(u: &WeightFunction, x: &[f64], t_min: f64) -> Result<Maximum> {
    if x.len() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            got: x.len(),
        });
    }
    if x.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::ProbeOutsideOrthant(x.to_vec()));
    }
    let objective = |t: &[f64]| {
        let e: Vec<f64> = t.iter().map(|v| v.exp()).collect();
        x.iter().zip(t).map(|(a, b)| a * b).sum::<f64>() - u.eval(&e)
    };
    let opts = MaximizeOptions {
        lower: t_min,
        divergence_limit: 700.0,
        ..MaximizeOptions::default()
    };
    maximize_concave(&objective, &vec![0.0; x.len()], &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::FnPotential;
    use crate::weights::{make_fock, make_kinked, make_radial_power, make_separable_power};
    use approx::assert_abs_diff_eq;

    #[test]
    fn quadratic_conjugate() {
        let h = FnPotential::new(2, |x: &[f64]| 0.5 * (x[0] * x[0] + x[1] * x[1]));
        let m = conjugate_at(&h, &[1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(m.value, 2.5, epsilon = 1e-14);
        assert_abs_diff_eq!(m.argmax[1], 2.0, epsilon = 1e-6);
    }

    #[test]
    fn exp_conjugate() {
        let h = FnPotential::new(1, |x: &[f64]| x[0].exp());
        assert_abs_diff_eq!(conjugate_at(&h, &[1.0]).unwrap().value, -1.0, epsilon = 1e-14);
    }

    #[test]
    fn linear_function_has_unbounded_conjugate() {
        let h = FnPotential::new(1, |x: &[f64]| x[0]);
        assert!(matches!(conjugate_at(&h, &[2.0]), Err(Error::Unbounded(_))));
    }

    #[test]
    fn fock_log_conjugate_closed_form() {
        // (u[e])*(x) = (x/2) ln x − x/2 for u = x²/2
        let u = make_fock(1).unwrap();
        for &x in &[0.1f64, 1.0, 2.0, 7.5, 40.0] {
            let expect = 0.5 * x * x.ln() - 0.5 * x;
            assert_abs_diff_eq!(log_conjugate_at(&u, &[x], -40.0).unwrap().value, expect, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(log_conjugate_at(&u, &[1.0], -40.0).unwrap().value, -0.5, epsilon = 1e-14);
        // boundary: sup as t → −∞ is −u(0) = 0
        assert!(log_conjugate_at(&u, &[0.0], -40.0).unwrap().value.abs() < 1e-30);
        assert!(matches!(
            log_conjugate_at(&u, &[-1.0], -40.0),
            Err(Error::ProbeOutsideOrthant(_))
        ));
    }

    #[test]
    fn entropy_identity_pointwise() {
        for w in [
            make_fock(2).unwrap(),
            make_separable_power(2, 4.0).unwrap(),
            make_radial_power(2, 3.0).unwrap(),
            make_kinked(2).unwrap(),
        ] {
            let star = w.conjugate_weight().unwrap();
            for x in [[1.0, 1.0], [2.0, 0.5], [3.0, 0.0], [0.25, 4.0]] {
                let lhs = log_conjugate_at(&w, &x, -40.0).unwrap().value
                    + log_conjugate_at(&star, &x, -40.0).unwrap().value;
                let rhs: f64 = x.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln() - v).sum();
                assert!((lhs - rhs).abs() < 1e-8, "{} {x:?}: {lhs} vs {rhs}", w.label());
            }
        }
    }
}
