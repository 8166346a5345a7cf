//! Uniform grid specifications of the form START:STOP:COUNT.

use anyhow::{bail, Context, Result};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl FromStr for GridSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            bail!("grid must be START:STOP:COUNT, got {s:?}");
        }
        let start: f64 = parts[0]
            .parse()
            .with_context(|| format!("bad grid start {:?}", parts[0]))?;
        let stop: f64 = parts[1]
            .parse()
            .with_context(|| format!("bad grid stop {:?}", parts[1]))?;
        let count: usize = parts[2]
            .parse()
            .with_context(|| format!("bad grid count {:?}", parts[2]))?;
        if !start.is_finite() || !stop.is_finite() || stop < start {
            bail!("grid bounds must be finite with stop >= start, got {s:?}");
        }
        Ok(Self { start, stop, count })
    }
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }

    pub fn require_within(&self, lo: f64, hi: f64, name: &str) -> Result<()> {
        if self.start < lo || self.stop > hi {
            bail!("{name} grid must lie within [{lo}, {hi}], got {}:{}", self.start, self.stop);
        }
        Ok(())
    }
}
