//! Scalar functions on ℝⁿ that the conjugation, quadrature and volume
//! routines operate on.

use std::sync::Arc;

use crate::weights::WeightFunction;

/// A real-valued function on ℝⁿ. Values may be `+inf` off the effective
/// domain; they must be finite wherever the routines are expected to probe.
pub trait Potential: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
}

impl<P: Potential + ?Sized> Potential for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
}

impl<P: Potential + ?Sized> Potential for Arc<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
}

/// Adapter turning a closure into a [`Potential`].
pub struct FnPotential<F> {
    n: usize,
    f: F,
}

impl<F> FnPotential<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F> Potential for FnPotential<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// `t ↦ scale · u(e^{t₁}, …, e^{tₙ})`, the log-substituted weight.
pub struct LogSubstituted<'a> {
    weight: &'a WeightFunction,
    scale: f64,
}

impl<'a> LogSubstituted<'a> {
    pub fn new(weight: &'a WeightFunction) -> Self {
        Self { weight, scale: 1.0 }
    }

    pub fn scaled(weight: &'a WeightFunction, scale: f64) -> Self {
        Self { weight, scale }
    }
}

impl Potential for LogSubstituted<'_> {
    fn dim(&self) -> usize {
        self.weight.dim()
    }

    fn value(&self, t: &[f64]) -> f64 {
        let mut buf = [0.0f64; 8];
        if t.len() <= buf.len() {
            for (b, ti) in buf.iter_mut().zip(t) {
                *b = ti.exp();
            }
            self.scale * self.weight.eval(&buf[..t.len()])
        } else {
            let x: Vec<f64> = t.iter().map(|ti| ti.exp()).collect();
            self.scale * self.weight.eval(&x)
        }
    }
}

/// `x ↦ inner(x − shift)`.
pub struct Translated<P> {
    inner: P,
    shift: Vec<f64>,
}

impl<P: Potential> Translated<P> {
    pub fn new(inner: P, shift: Vec<f64>) -> Self {
        Self { inner, shift }
    }
}

impl<P: Potential> Potential for Translated<P> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let y: Vec<f64> = x.iter().zip(&self.shift).map(|(a, b)| a - b).collect();
        self.inner.value(&y)
    }
}
