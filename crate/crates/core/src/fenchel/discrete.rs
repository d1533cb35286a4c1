use ndarray::{ArrayD, Axis as NdAxis, IxDyn, Zip};
use rayon::prelude::*;

use super::grid::{Axis, DomainTag, SampledFunction};
use crate::error::{Error, Result};
use crate::potential::Potential;

/// Discrete conjugate on a dual grid.
#[derive(Clone, Debug)]
pub struct ConjugateResult {
    pub dual: SampledFunction,
    /// Per axis, the slope interval on which every lane's conjugate is
    /// supported by an interior hull edge rather than by a grid endpoint.
    pub slope_range: Vec<(f64, f64)>,
}

/// Indices of the lower convex hull of `(xs[i], fs[i])`, `xs` increasing.
/// Collinear interior points are dropped, so the leftmost of a run survives.
fn lower_hull(xs: &[f64], fs: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (xs[b] - xs[a]) * (fs[i] - fs[a]) - (fs[b] - fs[a]) * (xs[i] - xs[a]);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// `out[k] = max_i (ys[k]·xs[i] − fs[i])` for ascending `ys`; returns the
/// slope range of the hull. On ties the smaller primal index wins.
fn conjugate_lane(xs: &[f64], fs: &[f64], ys: &[f64], out: &mut [f64]) -> (f64, f64) {
    let hull = lower_hull(xs, fs);
    let value = |y: f64, i: usize| y * xs[i] - fs[i];
    let mut j = 0;
    for (k, &y) in ys.iter().enumerate() {
        while j + 1 < hull.len() && value(y, hull[j + 1]) > value(y, hull[j]) {
            j += 1;
        }
        out[k] = value(y, hull[j]);
    }
    if hull.len() < 2 {
        return (f64::NEG_INFINITY, f64::INFINITY);
    }
    let slope = |a: usize, b: usize| (fs[b] - fs[a]) / (xs[b] - xs[a]);
    (
        slope(hull[0], hull[1]),
        slope(hull[hull.len() - 2], hull[hull.len() - 1]),
    )
}

/// One-dimensional discrete conjugate.
pub fn conjugate_1d(f: &SampledFunction, dual: &Axis) -> Result<ConjugateResult> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: f.dim(),
        });
    }
    conjugate_nd(f, std::slice::from_ref(dual))
}

/// n-dimensional discrete conjugate by iterated partial conjugation:
/// `sup_x(⟨x,y⟩ − u) = sup_{x'}(⟨x',y'⟩ + sup_{x₁}(x₁y₁ − u))`.
/// Exact maximum over grid nodes, up to rounding.
pub fn conjugate_nd(f: &SampledFunction, dual: &[Axis]) -> Result<ConjugateResult> {
    if dual.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: dual.len(),
        });
    }
    let primal: Vec<Vec<f64>> = f.axes().iter().map(Axis::nodes).collect();
    let duals: Vec<Vec<f64>> = dual.iter().map(Axis::nodes).collect();
    let (values, slope_range) = conjugate_axes_from(f.values().clone(), 0, &primal, &duals, Vec::new());
    Ok(ConjugateResult {
        dual: SampledFunction::new(dual.to_vec(), values, f.domain())?,
        slope_range,
    })
}

fn conjugate_axes_from(
    mut current: ArrayD<f64>,
    start: usize,
    primal: &[Vec<f64>],
    duals: &[Vec<f64>],
    mut slope_range: Vec<(f64, f64)>,
) -> (ArrayD<f64>, Vec<(f64, f64)>) {
    let n = primal.len();
    for k in start..n {
        let mut shape = current.shape().to_vec();
        shape[k] = duals[k].len();
        let mut next = ArrayD::<f64>::zeros(IxDyn(&shape));
        let mut range = (f64::NEG_INFINITY, f64::INFINITY);
        let mut lane_in = vec![0.0; primal[k].len()];
        let mut lane_out = vec![0.0; duals[k].len()];
        Zip::from(current.lanes(NdAxis(k)))
            .and(next.lanes_mut(NdAxis(k)))
            .for_each(|src, mut dst| {
                for (a, b) in lane_in.iter_mut().zip(src.iter()) {
                    *a = *b;
                }
                let (lo, hi) = conjugate_lane(&primal[k], &lane_in, &duals[k], &mut lane_out);
                range.0 = range.0.max(lo);
                range.1 = range.1.min(hi);
                for (d, v) in dst.iter_mut().zip(&lane_out) {
                    *d = *v;
                }
            });
        slope_range.push(range);
        if k + 1 < n {
            next.mapv_inplace(|v| -v);
        }
        current = next;
    }
    (current, slope_range)
}

/// Like [`conjugate_nd`], but samples `f` lane by lane along the first axis
/// so the full primal tensor is never stored. Returns the dual values.
pub fn conjugate_nd_with(
    f: &dyn Potential,
    primal: &[Axis],
    dual: &[Axis],
) -> Result<ConjugateResult> {
    let n = f.dim();
    if primal.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: primal.len(),
        });
    }
    if dual.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: dual.len(),
        });
    }
    let primal_nodes: Vec<Vec<f64>> = primal.iter().map(Axis::nodes).collect();
    let dual_nodes: Vec<Vec<f64>> = dual.iter().map(Axis::nodes).collect();
    let rest: Vec<usize> = primal[1..].iter().map(Axis::count).collect();
    let lanes: usize = rest.iter().product();
    let d0 = dual_nodes[0].len();

    let per_lane: Vec<(Vec<f64>, (f64, f64))> = (0..lanes)
        .into_par_iter()
        .map(|m| {
            let mut point = vec![0.0; n];
            let mut r = m;
            for j in (1..n).rev() {
                point[j] = primal_nodes[j][r % rest[j - 1]];
                r /= rest[j - 1];
            }
            let fs: Vec<f64> = primal_nodes[0]
                .iter()
                .map(|&x0| {
                    point[0] = x0;
                    f.value(&point)
                })
                .collect();
            let mut out = vec![0.0; d0];
            let range = conjugate_lane(&primal_nodes[0], &fs, &dual_nodes[0], &mut out);
            (out, range)
        })
        .collect();

    if let Some((m, _)) = per_lane
        .iter()
        .enumerate()
        .find(|(_, (out, _))| out.iter().any(|v| v.is_nan()))
    {
        return Err(Error::NonFinite {
            value: f64::NAN,
            location: format!("lane {m}"),
        });
    }

    let mut range0 = (f64::NEG_INFINITY, f64::INFINITY);
    let mut data = vec![0.0; d0 * lanes];
    for (m, (out, (lo, hi))) in per_lane.iter().enumerate() {
        range0.0 = range0.0.max(*lo);
        range0.1 = range0.1.min(*hi);
        for (i, v) in out.iter().enumerate() {
            data[i * lanes + m] = *v;
        }
    }
    let mut shape = vec![d0];
    shape.extend_from_slice(&rest);
    let mut first = ArrayD::from_shape_vec(IxDyn(&shape), data)
        .map_err(|e| Error::InvalidGrid(e.to_string()))?;
    if n > 1 {
        first.mapv_inplace(|v| -v);
    }
    let (values, slope_range) =
        conjugate_axes_from(first, 1, &primal_nodes, &dual_nodes, vec![range0]);
    Ok(ConjugateResult {
        dual: SampledFunction::new(dual.to_vec(), values, DomainTag::LinearScale)?,
        slope_range,
    })
}

/// Discrete conjugate of a one-dimensional sampling, evaluable at any slope
/// by binary search over hull edges.
#[derive(Clone, Debug)]
pub struct HullConjugate {
    xs: Vec<f64>,
    fs: Vec<f64>,
    slopes: Vec<f64>,
}

impl HullConjugate {
    pub fn new(xs: &[f64], fs: &[f64]) -> Result<Self> {
        if xs.is_empty() || xs.len() != fs.len() {
            return Err(Error::EmptyGrid);
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("hull nodes must be strictly increasing".into()));
        }
        let hull = lower_hull(xs, fs);
        let hx: Vec<f64> = hull.iter().map(|&i| xs[i]).collect();
        let hf: Vec<f64> = hull.iter().map(|&i| fs[i]).collect();
        let slopes = hx
            .windows(2)
            .zip(hf.windows(2))
            .map(|(x, f)| (f[1] - f[0]) / (x[1] - x[0]))
            .collect();
        Ok(Self {
            xs: hx,
            fs: hf,
            slopes,
        })
    }

    pub fn eval(&self, y: f64) -> f64 {
        let j = self.slopes.partition_point(|&s| s < y);
        y * self.xs[j] - self.fs[j]
    }

    pub fn slope_range(&self) -> (f64, f64) {
        match (self.slopes.first(), self.slopes.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}
