//! Moments `c_α(φ) = ∫_{ℂⁿ} |z^α|² e^{−2φ(|z|)} dμ`, computed in the log
//! variable as `(2π)ⁿ ∫_{ℝⁿ} e^{⟨2α̃, t⟩ − 2φ[e](t)} dt`, together with the
//! lower bound `πⁿ/∏α̃ⱼ · e^{2(φ[e])*(α̃)}` and the two-sided volume bracket
//! `(2π)ⁿ e⁻¹ V e^{2(φ[e])*(α̃)} ≤ c_α ≤ (2π)ⁿ (1 + n!) V e^{2(φ[e])*(α̃)}`
//! with `V = V(D_{α̃}^{φ[e]}(1/2))`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::fenchel::log_conjugate_at;
use crate::laplace::{
    default_method, laplace_integral_at, sublevel_volume, LaplaceOptions, SublevelSpec, VolumeEstimate,
};
use crate::potential::LogSubstituted;
use crate::weights::WeightFunction;

/// Lower limit for the log variable when a coordinate of the dual point is 0.
pub(crate) const T_MIN: f64 = -40.0;

/// Multi-index `α ∈ ℕ₀ⁿ`, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self(components))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[u32] {
        &self.0
    }

    /// `|α| = Σ αⱼ`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `α̃ = α + 1` as reals.
    pub fn tilde(&self) -> Vec<f64> {
        self.0.iter().map(|&a| a as f64 + 1.0).collect()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&a| a as f64).collect()
    }

    /// `α! = ∏ αⱼ!` in integer arithmetic; `None` for `|α| > 20`.
    pub fn factorial_exact(&self) -> Option<u64> {
        if self.degree() > 20 {
            return None;
        }
        Some(
            self.0
                .iter()
                .map(|&a| (1..=a as u64).product::<u64>())
                .product(),
        )
    }

    pub fn factorial(&self) -> f64 {
        match self.factorial_exact() {
            Some(v) => v as f64,
            None => self.ln_factorial().exp(),
        }
    }

    pub fn ln_factorial(&self) -> f64 {
        match self.factorial_exact() {
            Some(v) => (v as f64).ln(),
            None => self.0.iter().map(|&a| ln_factorial(a as u64)).sum(),
        }
    }

    /// All `α ∈ ℕ₀ⁿ` with `|α| ≤ degree`, in lexicographic order.
    pub fn all_up_to(n: usize, degree: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut current = vec![0u32; n];
        fn rec(j: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if j == cur.len() {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for a in 0..=left {
                cur[j] = a;
                rec(j + 1, left - a, cur, out);
            }
            cur[j] = 0;
        }
        if n > 0 {
            rec(0, degree, &mut current, &mut out);
        }
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub value: f64,
    pub ln_value: f64,
    pub rel_error: f64,
}

/// `c_α(φ)` by Simpson quadrature in `t`, centered at the maximizer of
/// `⟨2α̃, t⟩ − 2φ[e](t)`.
pub fn moment(phi: &WeightFunction, alpha: &MultiIndex) -> Result<MomentEntry> {
    let n = phi.dim();
    if alpha.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: alpha.dim(),
        });
    }
    let tilde = alpha.tilde();
    let peak = log_conjugate_at(phi, &tilde, T_MIN)?;
    let h = LogSubstituted::scaled(phi, 2.0);
    let y: Vec<f64> = tilde.iter().map(|v| 2.0 * v).collect();
    let integral = laplace_integral_at(&h, &y, 2.0 * peak.value, &peak.argmax, &LaplaceOptions::default())?;
    let ln_value = n as f64 * (2.0 * PI).ln() + integral.ln_value;
    Ok(MomentEntry {
        value: ln_value.exp(),
        ln_value,
        rel_error: integral.rel_error,
    })
}

/// `πⁿ α!`, the moments of `φ = ‖x‖²/2`. Returns `(value, ln_value)`; the
/// value overflows to infinity before the logarithm does.
pub fn fock_oracle(alpha: &MultiIndex) -> (f64, f64) {
    let ln = alpha.dim() as f64 * PI.ln() + alpha.ln_factorial();
    (ln.exp(), ln)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub phi_label: String,
    pub n: usize,
    pub max_degree: u32,
    pub entries: BTreeMap<MultiIndex, MomentEntry>,
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    alpha: MultiIndex,
    value: f64,
    ln_value: f64,
    rel_error: f64,
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    phi_label: String,
    n: usize,
    max_degree: u32,
    entries: Vec<JsonRow>,
}

impl MomentTable {
    /// Every `c_α` with `|α| ≤ max_degree`, computed in parallel.
    pub fn build(phi: &WeightFunction, max_degree: u32) -> Result<Self> {
        let alphas = MultiIndex::all_up_to(phi.dim(), max_degree);
        let values: Vec<MomentEntry> = alphas.par_iter().map(|a| moment(phi, a)).collect::<Result<_>>()?;
        Ok(Self {
            phi_label: phi.label().to_string(),
            n: phi.dim(),
            max_degree,
            entries: alphas.into_iter().zip(values).collect(),
        })
    }

    pub fn get(&self, alpha: &MultiIndex) -> Result<&MomentEntry> {
        self.entries
            .get(alpha)
            .ok_or_else(|| Error::MissingMoment(alpha.components().to_vec()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// CSV with columns `alpha_1..alpha_n, value, ln_value, rel_error`.
    /// Floats use the shortest representation that reads back exactly.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        let mut header: Vec<String> = (1..=self.n).map(|j| format!("alpha_{j}")).collect();
        header.extend(["value", "ln_value", "rel_error"].map(String::from));
        wr.write_record(&header)?;
        for (alpha, e) in &self.entries {
            let mut row: Vec<String> = alpha.components().iter().map(|a| a.to_string()).collect();
            row.extend([e.value, e.ln_value, e.rel_error].map(|v| format!("{v:?}")));
            wr.write_record(&row)?;
        }
        wr.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    /// Reads a table written by [`write_csv`](Self::write_csv). The label is
    /// not stored in CSV and must be supplied.
    pub fn read_csv<R: Read>(r: R, phi_label: &str) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().from_reader(r);
        let header = rd.headers()?.clone();
        let n = header.iter().filter(|h| h.starts_with("alpha_")).count();
        if n == 0 || header.len() != n + 3 {
            return Err(Error::Config(format!("unexpected moment table header {header:?}")));
        }
        let mut entries = BTreeMap::new();
        let mut max_degree = 0;
        for rec in rd.records() {
            let rec = rec?;
            let parse_err = |s: &str| Error::Config(format!("bad field {s:?} in moment table"));
            let alpha = MultiIndex::new(
                rec.iter()
                    .take(n)
                    .map(|s| s.parse::<u32>().map_err(|_| parse_err(s)))
                    .collect::<Result<_>>()?,
            )?;
            let f: Vec<f64> = rec
                .iter()
                .skip(n)
                .map(|s| s.parse::<f64>().map_err(|_| parse_err(s)))
                .collect::<Result<_>>()?;
            max_degree = max_degree.max(alpha.degree());
            entries.insert(
                alpha,
                MomentEntry {
                    value: f[0],
                    ln_value: f[1],
                    rel_error: f[2],
                },
            );
        }
        Ok(Self {
            phi_label: phi_label.to_string(),
            n,
            max_degree,
            entries,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let t = JsonTable {
            phi_label: self.phi_label.clone(),
            n: self.n,
            max_degree: self.max_degree,
            entries: self
                .entries
                .iter()
                .map(|(a, e)| JsonRow {
                    alpha: a.clone(),
                    value: e.value,
                    ln_value: e.ln_value,
                    rel_error: e.rel_error,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&t)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: JsonTable = serde_json::from_str(s)?;
        Ok(Self {
            phi_label: t.phi_label,
            n: t.n,
            max_degree: t.max_degree,
            entries: t
                .entries
                .into_iter()
                .map(|r| {
                    (
                        r.alpha,
                        MomentEntry {
                            value: r.value,
                            ln_value: r.ln_value,
                            rel_error: r.rel_error,
                        },
                    )
                })
                .collect(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundCheck {
    pub alpha: MultiIndex,
    pub bound: f64,
    pub ln_bound: f64,
    pub value: f64,
    pub ok: bool,
}

/// `c_α ≥ πⁿ/∏α̃ⱼ · e^{2(φ[e])*(α̃)}`, compared in logs with the entry's
/// relative error as slack.
pub fn lemma2_check(phi: &WeightFunction, alpha: &MultiIndex, entry: &MomentEntry) -> Result<LowerBoundCheck> {
    let tilde = alpha.tilde();
    let s = log_conjugate_at(phi, &tilde, T_MIN)?.value;
    let ln_bound = alpha.dim() as f64 * PI.ln() - tilde.iter().map(|v| v.ln()).sum::<f64>() + 2.0 * s;
    let slack = (1.0 - entry.rel_error - 1e-12).ln();
    Ok(LowerBoundCheck {
        alpha: alpha.clone(),
        bound: ln_bound.exp(),
        ln_bound,
        value: entry.value,
        ok: entry.ln_value >= ln_bound + slack,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeBracketCheck {
    pub alpha: MultiIndex,
    pub volume: VolumeEstimate,
    pub ln_lower: f64,
    pub ln_upper: f64,
    pub ln_value: f64,
    /// `c_α / ((2π)ⁿ V e^{2(φ[e])*(α̃)})`, to be compared with `[e⁻¹, 1 + n!]`.
    pub ratio: f64,
    pub ok: bool,
}

/// The two-sided volume bracket for `c_α`, with the moment's relative error
/// and the volume half-width as slack.
pub fn lemma4_check(phi: &WeightFunction, alpha: &MultiIndex, entry: &MomentEntry) -> Result<VolumeBracketCheck> {
    let n = phi.dim();
    let tilde = alpha.tilde();
    let peak = log_conjugate_at(phi, &tilde, T_MIN)?;
    let h = LogSubstituted::new(phi);
    let spec = SublevelSpec::with_conjugate(&h, &tilde, 0.5, peak.value, peak.argmax.clone())?;
    let volume = sublevel_volume(&spec, &default_method(n))?;
    let ln_base = n as f64 * (2.0 * PI).ln() + volume.value.ln() + 2.0 * peak.value;
    let ln_lower = ln_base - 1.0;
    let ln_upper = ln_base + (1.0 + crate::laplace::factorial(n)).ln();
    let rel_v = volume.half_width / volume.value;
    let slack_lo = (1.0 - entry.rel_error).ln() + (1.0 - rel_v).ln();
    let slack_hi = (1.0 + entry.rel_error).ln() + (1.0 + rel_v).ln();
    let ok = entry.ln_value - ln_lower >= slack_lo - 1e-12 && entry.ln_value - ln_upper <= slack_hi + 1e-12;
    Ok(VolumeBracketCheck {
        alpha: alpha.clone(),
        ratio: (entry.ln_value - ln_base).exp(),
        volume,
        ln_lower,
        ln_upper,
        ln_value: entry.ln_value,
        ok,
    })
}
