use ndarray::{ArrayD, Dimension, IxDyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::Potential;

/// Uniform grid on one axis: `min + i·step`, `i < count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    min: f64,
    step: f64,
    count: usize,
}

impl Axis {
    /// `count` equally spaced nodes from `min` to `max` inclusive.
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidGrid(format!("axis needs at least 2 nodes, got {count}")));
        }
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(Error::InvalidGrid(format!("axis bounds [{min}, {max}] not increasing")));
        }
        Ok(Self {
            min,
            step: (max - min) / (count - 1) as f64,
            count,
        })
    }

    pub fn with_step(min: f64, step: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidGrid(format!("axis needs at least 2 nodes, got {count}")));
        }
        if !(min.is_finite() && step.is_finite() && step > 0.0) {
            return Err(Error::InvalidGrid(format!("invalid step {step}")));
        }
        Ok(Self { min, step, count })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.node(self.count - 1)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn node(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.node(i)).collect()
    }

    /// Halved step over the same interval; every node of `self` is a node of
    /// the result.
    pub fn refined(&self) -> Self {
        Self {
            min: self.min,
            step: 0.5 * self.step,
            count: 2 * (self.count - 1) + 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainTag {
    LinearScale,
    LogSubstituted,
}

/// Values of a scalar function on a tensor grid, row-major (last axis fastest).
#[derive(Clone, Debug)]
pub struct SampledFunction {
    axes: Vec<Axis>,
    values: ArrayD<f64>,
    domain: DomainTag,
}

impl SampledFunction {
    pub fn new(axes: Vec<Axis>, values: ArrayD<f64>, domain: DomainTag) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let shape: Vec<usize> = axes.iter().map(Axis::count).collect();
        if values.shape() != shape.as_slice() {
            return Err(Error::InvalidGrid(format!(
                "values shape {:?} does not match axes {:?}",
                values.shape(),
                shape
            )));
        }
        if let Some((idx, v)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                value: *v,
                location: format!("{:?}", idx.slice()),
            });
        }
        Ok(Self { axes, values, domain })
    }

    /// Sample `f` at every node of the tensor grid.
    pub fn sample(f: &dyn Potential, axes: Vec<Axis>, domain: DomainTag) -> Result<Self> {
        if axes.len() != f.dim() {
            return Err(Error::DimensionMismatch {
                expected: f.dim(),
                got: axes.len(),
            });
        }
        let shape: Vec<usize> = axes.iter().map(Axis::count).collect();
        let mut point = vec![0.0; axes.len()];
        let values = ArrayD::from_shape_fn(IxDyn(&shape), |idx| {
            for (j, p) in point.iter_mut().enumerate() {
                *p = axes[j].node(idx[j]);
            }
            f.value(&point)
        });
        Self::new(axes, values, domain)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn values(&self) -> &ArrayD<f64> {
        &self.values
    }

    pub fn domain(&self) -> DomainTag {
        self.domain
    }

    /// Node coordinates for a multi-index.
    pub fn point(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().zip(&self.axes).map(|(&i, a)| a.node(i)).collect()
    }

    /// `(point, value)` for every node in row-major order.
    pub fn iter_points(&self) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
        self.values
            .indexed_iter()
            .map(move |(idx, &v)| (self.point(idx.slice()), v))
    }
}

/// Samples of `t ↦ u(e^{t₁}, …, e^{tₙ})` on the given t-space grid.
pub fn log_substitute(u: &dyn Potential, t_axes: Vec<Axis>) -> Result<SampledFunction> {
    let exp_u = crate::potential::FnPotential::new(u.dim(), |t: &[f64]| {
        let x: Vec<f64> = t.iter().map(|v| v.exp()).collect();
        u.value(&x)
    });
    SampledFunction::sample(&exp_u, t_axes, DomainTag::LogSubstituted)
}
