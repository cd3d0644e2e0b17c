use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Piecewise-linear distribution function through `(t, φ(t))` samples on `[0, 2π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfMeasure {
    samples: Vec<(f64, f64)>,
}

impl CdfMeasure {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidInput("CDF needs at least two samples".into()));
        }
        let (t0, _) = samples[0];
        let (t1, _) = samples[samples.len() - 1];
        if t0.abs() > 1e-12 || (t1 - TAU).abs() > 1e-9 {
            return Err(Error::InvalidInput("CDF samples must span [0, 2π]".into()));
        }
        for (i, w) in samples.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidInput(format!(
                    "CDF sample {} does not increase in t",
                    i + 1
                )));
            }
            if !(w[1].1 >= w[0].1) {
                return Err(Error::InvalidInput(format!("CDF not monotone at sample {}", i + 1)));
            }
        }
        if samples.iter().any(|s| !s.0.is_finite() || !s.1.is_finite()) {
            return Err(Error::InvalidInput("CDF samples must be finite".into()));
        }
        let base = samples[0].1;
        let samples: Vec<(f64, f64)> = samples.into_iter().map(|(t, f)| (t, f - base)).collect();
        if samples[samples.len() - 1].1 <= 0.0 {
            return Err(Error::InvalidInput("CDF carries no mass".into()));
        }
        Ok(CdfMeasure { samples })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn total_mass(&self) -> f64 {
        self.samples[self.samples.len() - 1].1
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let s = &self.samples;
        if x <= s[0].0 {
            return 0.0;
        }
        if x >= s[s.len() - 1].0 {
            return self.total_mass();
        }
        let i = s.partition_point(|p| p.0 <= x);
        let (ta, fa) = s[i - 1];
        let (tb, fb) = s[i];
        fa + (fb - fa) * (x - ta) / (tb - ta)
    }

    /// Mass of the counter-clockwise arc from `start` of length `len`.
    pub fn arc_mass(&self, start: f64, len: f64) -> f64 {
        if len >= TAU {
            return self.total_mass();
        }
        let s = crate::geometry::wrap_positive(start);
        let e = s + len;
        if e <= TAU {
            (self.cdf(e) - self.cdf(s)).max(0.0)
        } else {
            (self.total_mass() - self.cdf(s) + self.cdf(e - TAU)).max(0.0)
        }
    }

    /// Closed intervals on which the distribution function increases.
    pub fn increasing_intervals(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for w in self.samples.windows(2) {
            if w[1].1 > w[0].1 {
                match out.last_mut() {
                    Some(last) if last.1 == w[0].0 => last.1 = w[1].0,
                    _ => out.push((w[0].0, w[1].0)),
                }
            }
        }
        out
    }
}
