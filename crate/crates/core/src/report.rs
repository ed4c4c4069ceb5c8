//! Check reports and seeded point sampling.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

pub const DEFAULT_SEED: u64 = 20_190_419;
pub const DEFAULT_POINTS: usize = 32;

/// Outcome of comparing a residual with its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Indeterminate,
    Fail,
}

impl Verdict {
    /// Pass below `tol`, fail above `100·tol`, indeterminate in between.
    pub fn classify(residual: f64, tol: f64) -> Verdict {
        if residual < tol {
            Verdict::Pass
        } else if residual > 100.0 * tol || residual.is_nan() {
            Verdict::Fail
        } else {
            Verdict::Indeterminate
        }
    }
}

/// One named identity inside a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubCheck {
    pub name: String,
    pub max_residual: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_point: Option<usize>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub points: usize,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub seed: u64,
    pub detail: Vec<SubCheck>,
}

impl CheckReport {
    pub fn from_subchecks(check: impl Into<String>, points: usize, tol: f64, seed: u64, detail: Vec<SubCheck>) -> Self {
        let max_residual = detail.iter().map(|s| s.max_residual).fold(0.0, nan_max);
        CheckReport {
            check: check.into(),
            points,
            max_residual,
            tol,
            pass: detail.iter().all(|s| s.pass),
            seed,
            detail,
        }
    }

    pub fn verdict(&self) -> Verdict {
        if self.pass {
            Verdict::Pass
        } else {
            Verdict::classify(self.max_residual, self.tol)
        }
    }

    pub fn sub(&self, name: &str) -> Option<&SubCheck> {
        self.detail.iter().find(|s| s.name == name)
    }

    /// Residual of a named sub-check; panics if absent (test helper).
    pub fn residual(&self, name: &str) -> f64 {
        self.sub(name)
            .unwrap_or_else(|| panic!("report '{}' has no sub-check '{name}'", self.check))
            .max_residual
    }

    /// First failing sub-check, if any.
    pub fn first_failure(&self) -> Option<&SubCheck> {
        self.detail.iter().find(|s| !s.pass)
    }

    pub fn push(&mut self, sub: SubCheck) {
        self.max_residual = nan_max(self.max_residual, sub.max_residual);
        self.pass &= sub.pass;
        self.detail.push(sub);
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

impl SubCheck {
    pub fn new(name: impl Into<String>, max_residual: f64, tol: f64) -> Self {
        SubCheck {
            name: name.into(),
            max_residual,
            pass: max_residual < tol,
            worst_point: None,
            extra: BTreeMap::new(),
        }
    }

    pub fn at(mut self, point: usize) -> Self {
        self.worst_point = Some(point);
        self
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.extra.insert(key.to_string(), value.into());
        self
    }
}

/// Seeded sample plan: `count` points, each with its own RNG stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampler {
    pub seed: u64,
    pub count: usize,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler { seed: DEFAULT_SEED, count: DEFAULT_POINTS }
    }
}

impl Sampler {
    pub fn new(seed: u64, count: usize) -> Self {
        Sampler { seed, count }
    }

    /// Independent stream for sample `index`; identical across runs and
    /// thread schedules.
    pub fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }

    /// Evaluates `f` at every sample in parallel. `f` returns one residual
    /// per name; the result holds, per name, the max residual and the index
    /// of the sample where it occurred.
    pub fn max_residuals<F>(&self, names: &[&str], f: F) -> Result<Vec<(f64, usize)>>
    where
        F: Fn(usize, &mut ChaCha8Rng) -> Result<Vec<f64>> + Sync,
    {
        let rows: Vec<Vec<f64>> = (0..self.count)
            .into_par_iter()
            .map(|i| {
                let mut rng = self.rng(i);
                let row = f(i, &mut rng)?;
                assert_eq!(row.len(), names.len(), "residual count mismatch");
                Ok(row)
            })
            .collect::<Result<_>>()?;
        let mut out = vec![(0.0f64, 0usize); names.len()];
        for (i, row) in rows.iter().enumerate() {
            for (k, &r) in row.iter().enumerate() {
                // a NaN anywhere sticks, so a broken point is never hidden
                if !out[k].0.is_nan() && (r.is_nan() || r > out[k].0) {
                    out[k] = (r, i);
                }
            }
        }
        Ok(out)
    }

    /// [`Sampler::max_residuals`] packaged as a report.
    pub fn report<F>(&self, check: &str, names: &[&str], tol: f64, f: F) -> Result<CheckReport>
    where
        F: Fn(usize, &mut ChaCha8Rng) -> Result<Vec<f64>> + Sync,
    {
        let maxima = self.max_residuals(names, f)?;
        let detail = names
            .iter()
            .zip(maxima)
            .map(|(n, (r, at))| SubCheck::new(*n, r, tol).at(at))
            .collect();
        Ok(CheckReport::from_subchecks(check, self.count, tol, self.seed, detail))
    }
}

/// Uniform vector in `[-1, 1]^d`.
pub fn random_vector<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_bands() {
        assert_eq!(Verdict::classify(1e-10, 1e-8), Verdict::Pass);
        assert_eq!(Verdict::classify(5e-8, 1e-8), Verdict::Indeterminate);
        assert_eq!(Verdict::classify(1e-5, 1e-8), Verdict::Fail);
        assert_eq!(Verdict::classify(f64::NAN, 1e-8), Verdict::Fail);
    }

    #[test]
    fn sampling_is_reproducible_and_order_free() {
        let s = Sampler::new(7, 16);
        let f = |i: usize, rng: &mut ChaCha8Rng| Ok(vec![rng.gen::<f64>() + i as f64 * 0.0]);
        let a = s.max_residuals(&["x"], f).unwrap();
        let b = s.max_residuals(&["x"], f).unwrap();
        assert_eq!(a, b);
        let serial: Vec<f64> = (0..16).map(|i| s.rng(i).gen::<f64>()).collect();
        let best = serial.iter().cloned().fold(0.0, f64::max);
        assert_eq!(a[0].0, best);
    }

    #[test]
    fn report_json_has_fixed_keys() {
        let r = CheckReport::from_subchecks("demo", 3, 1e-8, 1, vec![SubCheck::new("a", 1e-12, 1e-8)]);
        let v: Value = serde_json::to_value(&r).unwrap();
        for key in ["check", "points", "max_residual", "tol", "pass", "seed", "detail"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert!(r.pass);
    }
}
