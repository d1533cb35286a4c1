use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::quadrature::gauss_legendre;
use super::SublevelSpec;
use crate::error::{Error, Result};

/// z for a two-sided 99% normal interval.
const Z99: f64 = 2.575_829_303_548_901;
const MC_CHUNK: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "method")]
pub enum VolumeMethod {
    /// Boundary distances along rays from the center, integrated over the
    /// sphere: periodic trapezoid in each azimuth, Gauss–Legendre in polar
    /// angle. `angles` is the number of azimuthal nodes (n ≥ 2). Supports
    /// n ≤ 3.
    Radial { angles: usize },
    /// Cell counting on a uniform grid over the bounding box.
    Grid { cells_per_axis: usize },
    /// Uniform sampling in the bounding box.
    MonteCarlo { samples: usize, seed: u64 },
}

/// Radial integration for n ≤ 3, Monte Carlo above.
pub fn default_method(n: usize) -> VolumeMethod {
    match n {
        1 => VolumeMethod::Radial { angles: 2 },
        2 => VolumeMethod::Radial { angles: 256 },
        3 => VolumeMethod::Radial { angles: 96 },
        _ => VolumeMethod::MonteCarlo {
            samples: 1_000_000,
            seed: 0,
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub half_width: f64,
    pub method: VolumeMethod,
    /// Boundary searches, cells or samples used.
    pub samples: usize,
}

pub fn sublevel_volume(spec: &SublevelSpec<'_>, method: &VolumeMethod) -> Result<VolumeEstimate> {
    match *method {
        VolumeMethod::Radial { angles } => radial(spec, angles, method),
        VolumeMethod::Grid { cells_per_axis } => grid(spec, cells_per_axis, method),
        VolumeMethod::MonteCarlo { samples, seed } => monte_carlo(spec, samples, seed, method),
    }
}

fn radial(spec: &SublevelSpec<'_>, angles: usize, method: &VolumeMethod) -> Result<VolumeEstimate> {
    let n = spec.dim();
    let p = spec.p();
    let estimate = |m: usize| -> Result<(f64, usize)> {
        match n {
            1 => Ok((
                spec.boundary_distance(&[1.0], p)? + spec.boundary_distance(&[-1.0], p)?,
                2,
            )),
            2 => {
                let r2: Vec<f64> = (0..m)
                    .into_par_iter()
                    .map(|k| {
                        let a = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                        spec.boundary_distance(&[a.cos(), a.sin()], p).map(|r| r * r)
                    })
                    .collect::<Result<_>>()?;
                Ok((0.5 * r2.iter().sum::<f64>() * 2.0 * std::f64::consts::PI / m as f64, m))
            }
            3 => {
                let polar = m.div_ceil(2).max(2);
                let (xs, ws) = gauss_legendre(polar);
                let rows: Vec<f64> = (0..polar)
                    .into_par_iter()
                    .map(|i| -> Result<f64> {
                        // x = cos θ, so sin θ dθ becomes dx
                        let c = xs[i];
                        let s = (1.0 - c * c).sqrt();
                        let mut row = 0.0;
                        for k in 0..m {
                            let a = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                            let r = spec.boundary_distance(&[s * a.cos(), s * a.sin(), c], p)?;
                            row += r * r * r;
                        }
                        Ok(ws[i] * row * 2.0 * std::f64::consts::PI / m as f64)
                    })
                    .collect::<Result<_>>()?;
                Ok((rows.iter().sum::<f64>() / 3.0, m * polar))
            }
            _ => Err(Error::InvalidArgument(format!(
                "radial volume supports n ≤ 3, got n = {n}"
            ))),
        }
    };
    if n >= 2 && angles < 8 {
        return Err(Error::InvalidArgument(format!("radial volume needs ≥ 8 angles, got {angles}")));
    }
    let (value, used) = estimate(angles)?;
    let half_width = if n == 1 {
        // bisection to rounding level
        1e-14 * value
    } else {
        let (coarse, _) = estimate(angles / 2)?;
        (value - coarse).abs()
    };
    Ok(VolumeEstimate {
        value,
        half_width,
        method: *method,
        samples: used,
    })
}

fn grid(spec: &SublevelSpec<'_>, cells: usize, method: &VolumeMethod) -> Result<VolumeEstimate> {
    if cells < 2 {
        return Err(Error::InvalidArgument(format!("grid volume needs ≥ 2 cells, got {cells}")));
    }
    let n = spec.dim();
    let p = spec.p();
    let (lo, hi) = spec.bounding_box(p, 0.02)?;
    let h: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (b - a) / cells as f64).collect();
    let cell_volume: f64 = h.iter().product();
    let corners = cells + 1;
    let total_corners = corners.pow(n as u32);
    let index = |mut m: usize, side: usize| -> Vec<usize> {
        let mut idx = vec![0; n];
        for j in (0..n).rev() {
            idx[j] = m % side;
            m /= side;
        }
        idx
    };
    let inside_corner: Vec<bool> = (0..total_corners)
        .into_par_iter()
        .map(|m| {
            let x: Vec<f64> = index(m, corners)
                .iter()
                .enumerate()
                .map(|(j, &i)| lo[j] + i as f64 * h[j])
                .collect();
            spec.contains(&x)
        })
        .collect();
    let total_cells = cells.pow(n as u32);
    let (inside, boundary) = (0..total_cells)
        .into_par_iter()
        .map(|m| {
            let idx = index(m, cells);
            let center: Vec<f64> = idx
                .iter()
                .enumerate()
                .map(|(j, &i)| lo[j] + (i as f64 + 0.5) * h[j])
                .collect();
            let mut any_in = false;
            let mut any_out = false;
            for corner in 0..(1usize << n) {
                let mut flat = 0;
                for (j, &i) in idx.iter().enumerate() {
                    flat = flat * corners + i + ((corner >> j) & 1);
                }
                if inside_corner[flat] {
                    any_in = true;
                } else {
                    any_out = true;
                }
            }
            (spec.contains(&center) as usize, (any_in && any_out) as usize)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(VolumeEstimate {
        value: inside as f64 * cell_volume,
        half_width: boundary as f64 * cell_volume,
        method: *method,
        samples: total_cells,
    })
}

fn wilson(hits: usize, total: usize) -> (f64, f64) {
    let nf = total as f64;
    let phat = hits as f64 / nf;
    let z2 = Z99 * Z99;
    let denom = 1.0 + z2 / nf;
    let mid = (phat + z2 / (2.0 * nf)) / denom;
    let half = Z99 * (phat * (1.0 - phat) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    (mid - half, mid + half)
}

fn monte_carlo(spec: &SublevelSpec<'_>, samples: usize, seed: u64, method: &VolumeMethod) -> Result<VolumeEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least one sample".into()));
    }
    let n = spec.dim();
    let (lo, hi) = spec.bounding_box(spec.p(), 0.02)?;
    let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let chunks = samples.div_ceil(MC_CHUNK);
    // one stream per chunk: results do not depend on thread scheduling
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut x = vec![0.0; n];
            let mut hits = 0;
            for _ in 0..count {
                for j in 0..n {
                    x[j] = rng.random_range(lo[j]..hi[j]);
                }
                hits += spec.contains(&x) as usize;
            }
            hits
        })
        .sum();
    let phat = hits as f64 / samples as f64;
    let (a, b) = wilson(hits, samples);
    Ok(VolumeEstimate {
        value: phat * box_volume,
        half_width: (phat - a).max(b - phat) * box_volume,
        method: *method,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::super::SublevelSpec;
    use super::*;
    use crate::potential::FnPotential;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn half_square(n: usize) -> FnPotential<impl Fn(&[f64]) -> f64 + Send + Sync> {
        FnPotential::new(n, |x: &[f64]| 0.5 * x.iter().map(|v| v * v).sum::<f64>())
    }

    #[test]
    fn interval_volumes() {
        let h = half_square(1);
        let s1 = SublevelSpec::new(&h, &[0.0], 1.0).unwrap();
        let v = sublevel_volume(&s1, &default_method(1)).unwrap();
        assert_relative_eq!(v.value, 2.0 * 2f64.sqrt(), max_relative = 1e-12);
        let s2 = SublevelSpec::new(&h, &[0.0], 0.5).unwrap();
        assert_relative_eq!(sublevel_volume(&s2, &default_method(1)).unwrap().value, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn disk_and_ball_volumes() {
        let h2 = half_square(2);
        let s = SublevelSpec::new(&h2, &[0.0, 0.0], 1.0).unwrap();
        assert_relative_eq!(sublevel_volume(&s, &default_method(2)).unwrap().value, 2.0 * PI, max_relative = 1e-12);
        let h3 = half_square(3);
        let s = SublevelSpec::new(&h3, &[0.0, 0.0, 0.0], 1.0).unwrap();
        let ball = 4.0 / 3.0 * PI * 2f64.powf(1.5);
        assert_relative_eq!(sublevel_volume(&s, &default_method(3)).unwrap().value, ball, max_relative = 1e-10);
    }

    #[test]
    fn methods_agree_within_error() {
        let h = FnPotential::new(2, |x: &[f64]| x[0].powi(4) / 4.0 + 0.5 * x[1] * x[1] + 0.3 * x[0] * x[1]);
        let s = SublevelSpec::new(&h, &[0.5, -1.0], 1.0).unwrap();
        let r = sublevel_volume(&s, &VolumeMethod::Radial { angles: 256 }).unwrap();
        let g = sublevel_volume(&s, &VolumeMethod::Grid { cells_per_axis: 64 }).unwrap();
        let m = sublevel_volume(&s, &VolumeMethod::MonteCarlo { samples: 200_000, seed: 7 }).unwrap();
        assert!((r.value - g.value).abs() <= r.half_width + g.half_width);
        assert!((r.value - m.value).abs() <= r.half_width + m.half_width, "{r:?} {m:?} {g:?}");
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let h = half_square(2);
        let s = SublevelSpec::new(&h, &[0.0, 0.0], 1.0).unwrap();
        let method = VolumeMethod::MonteCarlo { samples: 50_000, seed: 3 };
        let a = sublevel_volume(&s, &method).unwrap();
        let b = sublevel_volume(&s, &method).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn volume_grows_with_slack() {
        let h = FnPotential::new(2, |x: &[f64]| x[0].powi(4) / 4.0 + x[1].powi(4) / 4.0);
        let mut last = 0.0;
        for p in [0.25, 0.5, 1.0, 2.0] {
            let s = SublevelSpec::new(&h, &[1.0, 0.0], p).unwrap();
            let v = sublevel_volume(&s, &default_method(2)).unwrap().value;
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn bad_parameters() {
        let h = half_square(2);
        let s = SublevelSpec::new(&h, &[0.0, 0.0], 1.0).unwrap();
        assert!(sublevel_volume(&s, &VolumeMethod::Radial { angles: 4 }).is_err());
        assert!(sublevel_volume(&s, &VolumeMethod::Grid { cells_per_axis: 1 }).is_err());
        assert!(SublevelSpec::new(&h, &[0.0, 0.0], 0.0).is_err());
        let h4 = half_square(4);
        let s4 = SublevelSpec::new(&h4, &[0.0; 4], 1.0).unwrap();
        assert!(sublevel_volume(&s4, &VolumeMethod::Radial { angles: 16 }).is_err());
    }
}
