//! Sublevel sets `D_y^h(p) = {x : h(x) + h*(y) − ⟨x, y⟩ ≤ p}`, their volumes,
//! the Laplace integral `∫ e^{⟨x,y⟩ − h(x)} dx`, and the two-sided comparison
//! `e⁻¹ V e^{h*(y)} ≤ ∫ e^{⟨x,y⟩ − h} ≤ (1 + n!) V e^{h*(y)}`.

mod quadrature;
mod volume;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fenchel::conjugate_at;
use crate::potential::Potential;

pub use quadrature::{gauss_legendre, simpson_box};
pub use volume::{default_method, sublevel_volume, VolumeEstimate, VolumeMethod};

/// Largest distance from the center searched before a set is declared
/// unbounded.
const RADIUS_LIMIT: f64 = 1e6;

/// A sublevel set together with the conjugate value and the maximizer of
/// `⟨x, y⟩ − h(x)`, which lies inside it.
pub struct SublevelSpec<'a> {
    h: &'a dyn Potential,
    y: Vec<f64>,
    p: f64,
    hstar_y: f64,
    center: Vec<f64>,
}

impl<'a> SublevelSpec<'a> {
    /// Computes `h*(y)` and the maximizer directly.
    pub fn new(h: &'a dyn Potential, y: &[f64], p: f64) -> Result<Self> {
        let m = conjugate_at(h, y)?;
        Self::with_conjugate(h, y, p, m.value, m.argmax)
    }

    pub fn with_conjugate(h: &'a dyn Potential, y: &[f64], p: f64, hstar_y: f64, center: Vec<f64>) -> Result<Self> {
        if y.len() != h.dim() || center.len() != h.dim() {
            return Err(Error::DimensionMismatch {
                expected: h.dim(),
                got: y.len().min(center.len()),
            });
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("slack p = {p} must be positive")));
        }
        if !hstar_y.is_finite() {
            return Err(Error::NonFinite {
                value: hstar_y,
                location: "h*(y)".into(),
            });
        }
        Ok(Self {
            h,
            y: y.to_vec(),
            p,
            hstar_y,
            center,
        })
    }

    pub fn dim(&self) -> usize {
        self.y.len()
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn hstar_y(&self) -> f64 {
        self.hstar_y
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// `h(x) + h*(y) − ⟨x, y⟩`, nonnegative by the Fenchel–Young inequality.
    pub fn gap(&self, x: &[f64]) -> f64 {
        let g = self.h.value(x) + self.hstar_y - x.iter().zip(&self.y).map(|(a, b)| a * b).sum::<f64>();
        if g.is_nan() {
            f64::INFINITY
        } else {
            g
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.gap(x) <= self.p
    }

    /// Distance from the center to the boundary of `{gap ≤ level}` along the
    /// unit vector `d`.
    pub fn boundary_distance(&self, d: &[f64], level: f64) -> Result<f64> {
        let at = |r: f64| -> f64 {
            let x: Vec<f64> = self.center.iter().zip(d).map(|(c, v)| c + r * v).collect();
            self.gap(&x)
        };
        let mut hi = 1e-3;
        while at(hi) <= level {
            hi *= 2.0;
            if hi > RADIUS_LIMIT {
                return Err(Error::Unbounded(format!(
                    "sublevel set extends beyond radius {RADIUS_LIMIT} along {d:?}"
                )));
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if at(mid) <= level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Axis-aligned box containing `{gap ≤ level}`, from boundary distances
    /// along all directions in `{−1, 0, 1}ⁿ`, padded by `pad`.
    pub fn bounding_box(&self, level: f64, pad: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.dim();
        let mut lo = self.center.clone();
        let mut hi = self.center.clone();
        for code in 0..3usize.pow(n as u32) {
            let mut d = vec![0.0; n];
            let mut c = code;
            for v in d.iter_mut() {
                *v = (c % 3) as f64 - 1.0;
                c /= 3;
            }
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            d.iter_mut().for_each(|v| *v /= norm);
            let r = self.boundary_distance(&d, level)?;
            for j in 0..n {
                let x = self.center[j] + r * d[j];
                lo[j] = lo[j].min(x);
                hi[j] = hi[j].max(x);
            }
        }
        for j in 0..n {
            let w = (hi[j] - lo[j]).max(1e-12);
            lo[j] -= pad * w;
            hi[j] += pad * w;
        }
        // push out any face that still meets the set
        for _ in 0..64 {
            let mut moved = false;
            for j in 0..n {
                let w = hi[j] - lo[j];
                if self.face_meets(&lo, &hi, j, lo[j], level) {
                    lo[j] -= 0.25 * w;
                    moved = true;
                }
                if self.face_meets(&lo, &hi, j, hi[j], level) {
                    hi[j] += 0.25 * w;
                    moved = true;
                }
                if w > RADIUS_LIMIT {
                    return Err(Error::Unbounded(format!("sublevel set wider than {RADIUS_LIMIT} along axis {j}")));
                }
            }
            if !moved {
                return Ok((lo, hi));
            }
        }
        Err(Error::Unbounded("bounding box did not stabilize".into()))
    }

    fn face_meets(&self, lo: &[f64], hi: &[f64], axis: usize, at: f64, level: f64) -> bool {
        const SIDE: usize = 33;
        let n = self.dim();
        let mut x = vec![0.0; n];
        (0..SIDE.pow((n - 1) as u32)).any(|m| {
            let mut r = m;
            for j in 0..n {
                if j == axis {
                    x[j] = at;
                } else {
                    let k = r % SIDE;
                    r /= SIDE;
                    x[j] = lo[j] + (hi[j] - lo[j]) * k as f64 / (SIDE - 1) as f64;
                }
            }
            self.gap(&x) <= level
        })
    }
}

/// Options for [`laplace_integral`].
#[derive(Clone, Copy, Debug)]
pub struct LaplaceOptions {
    /// Integrate where the exponent is within this of its maximum.
    pub decay: f64,
    /// Target relative Richardson error.
    pub rel_tol: f64,
    /// Cap on quadrature nodes per level.
    pub max_nodes: usize,
}

impl Default for LaplaceOptions {
    fn default() -> Self {
        Self {
            decay: 40.0,
            rel_tol: 1e-11,
            max_nodes: 1 << 23,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LaplaceIntegral {
    pub value: f64,
    pub ln_value: f64,
    pub rel_error: f64,
    pub hstar: f64,
    pub center: Vec<f64>,
    pub intervals: usize,
}

/// `∫ e^{⟨x,y⟩ − h(x)} dx` by tensor Simpson on the box where the exponent is
/// within `decay` of its maximum `h*(y)`. The subdivision doubles until the
/// Richardson estimate meets `rel_tol` or the node cap is reached.
pub fn laplace_integral(h: &dyn Potential, y: &[f64], opts: &LaplaceOptions) -> Result<LaplaceIntegral> {
    let m = conjugate_at(h, y)?;
    laplace_integral_at(h, y, m.value, &m.argmax, opts)
}

/// As [`laplace_integral`] with a known conjugate value and maximizer.
pub fn laplace_integral_at(
    h: &dyn Potential,
    y: &[f64],
    hstar: f64,
    center: &[f64],
    opts: &LaplaceOptions,
) -> Result<LaplaceIntegral> {
    let spec = SublevelSpec::with_conjugate(h, y, 1.0, hstar, center.to_vec())?;
    let n = spec.dim();
    let (lo, hi) = spec.bounding_box(opts.decay, 0.05)?;
    let integrand = |x: &[f64]| (-spec.gap(x)).exp();
    let mut intervals = 16usize;
    let mut prev = simpson_box(&integrand, &lo, &hi, intervals);
    let mut rel_error;
    loop {
        let next_intervals = 2 * intervals;
        if (next_intervals + 1).pow(n as u32) > opts.max_nodes {
            // cannot refine further: report the last observed difference
            let cur = prev;
            rel_error = f64::INFINITY;
            if intervals > 16 {
                let coarse = simpson_box(&integrand, &lo, &hi, intervals / 2);
                rel_error = (cur - coarse).abs() / 15.0 / cur;
            }
            break;
        }
        let cur = simpson_box(&integrand, &lo, &hi, next_intervals);
        intervals = next_intervals;
        rel_error = (cur - prev).abs() / 15.0 / cur;
        prev = cur;
        if rel_error <= opts.rel_tol && intervals >= 64 {
            break;
        }
    }
    if !(prev > 0.0 && prev.is_finite()) {
        return Err(Error::NonFinite {
            value: prev,
            location: "Laplace integral".into(),
        });
    }
    // truncation: the exponent is below −decay outside the box
    rel_error += (-opts.decay).exp();
    let ln_value = prev.ln() + hstar;
    Ok(LaplaceIntegral {
        value: ln_value.exp(),
        ln_value,
        rel_error,
        hstar,
        center: center.to_vec(),
        intervals,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub y: Vec<f64>,
    pub integral: f64,
    pub ln_integral: f64,
    pub integral_rel_error: f64,
    pub volume: VolumeEstimate,
    pub hstar_y: f64,
    pub ratio: f64,
    pub lower: f64,
    pub upper: f64,
    /// Absolute uncertainty of `ratio` from quadrature and volume errors.
    pub error_budget: f64,
    pub verdict: bool,
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Checks `e⁻¹ ≤ ∫ e^{⟨x,y⟩−h} / (V(D_y^h(1)) e^{h*(y)}) ≤ 1 + n!` within the
/// combined numerical error.
pub fn sandwich_check(h: &dyn Potential, y: &[f64], method: &VolumeMethod) -> Result<SandwichReport> {
    let m = conjugate_at(h, y)?;
    let integral = laplace_integral_at(h, y, m.value, &m.argmax, &LaplaceOptions::default())?;
    let spec = SublevelSpec::with_conjugate(h, y, 1.0, m.value, m.argmax)?;
    let volume = sublevel_volume(&spec, method)?;
    let ratio = (integral.ln_value - m.value - volume.value.ln()).exp();
    let error_budget = ratio * (integral.rel_error + volume.half_width / volume.value);
    let lower = (-1.0f64).exp();
    let upper = 1.0 + factorial(y.len());
    Ok(SandwichReport {
        y: y.to_vec(),
        integral: integral.value,
        ln_integral: integral.ln_value,
        integral_rel_error: integral.rel_error,
        volume,
        hstar_y: m.value,
        ratio,
        lower,
        upper,
        error_budget,
        verdict: ratio >= lower - error_budget && ratio <= upper + error_budget,
    })
}
