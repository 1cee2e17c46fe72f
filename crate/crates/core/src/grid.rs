//! Regular rectangular grids of real samples with CSV/JSON output.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// One grid dimension: `count` equally spaced points on `[min, max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(name: impl Into<String>, min: f64, max: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParameter("axis count must be >= 1".into()));
        }
        if !(min.is_finite() && max.is_finite()) || max < min {
            return Err(Error::InvalidParameter(format!("invalid axis range [{min}, {max}]")));
        }
        Ok(Self {
            name: name.into(),
            min,
            max,
            count,
        })
    }

    pub fn step(&self) -> f64 {
        if self.count > 1 {
            (self.max - self.min) / (self.count - 1) as f64
        } else {
            0.0
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.count && self.count > 1 {
            self.max
        } else {
            self.min + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }
}

/// Row-major samples over a product of axes; the last axis varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub axes: Vec<Axis>,
    pub values: Vec<f64>,
    pub metadata: BTreeMap<String, Value>,
}

impl PhaseSpaceGrid {
    pub fn new(axes: Vec<Axis>, values: Vec<f64>) -> Result<Self> {
        let expected: usize = axes.iter().map(|a| a.count).product();
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("grid values"));
        }
        Ok(Self {
            axes,
            values,
            metadata: BTreeMap::new(),
        })
    }

    /// Evaluates `f` at every grid point (coordinates in axis order).
    pub fn from_fn<F>(axes: Vec<Axis>, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync,
    {
        use rayon::prelude::*;
        let n: usize = axes.iter().map(|a| a.count).product();
        let values = (0..n)
            .into_par_iter()
            .map(|i| f(&coordinates_of(&axes, i)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes, values)
    }

    pub fn with_meta(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.metadata.insert(key.to_string(), v);
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn coordinates(&self, index: usize) -> Vec<f64> {
        coordinates_of(&self.axes, index)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index and value of the smallest sample.
    pub fn argmin(&self) -> Option<(usize, f64)> {
        self.values
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Writes one row per point: axis coordinates followed by `value`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        let header: Vec<&str> = self.axes.iter().map(|a| a.name.as_str()).collect();
        writeln!(out, "{},value", header.join(","))?;
        for (i, v) in self.values.iter().enumerate() {
            let row: Vec<String> = self.coordinates(i).iter().map(|x| x.to_string()).collect();
            writeln!(out, "{},{}", row.join(","), v)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn coordinates_of(axes: &[Axis], mut index: usize) -> Vec<f64> {
    let mut coords = vec![0.0; axes.len()];
    for (k, axis) in axes.iter().enumerate().rev() {
        coords[k] = axis.point(index % axis.count);
        index /= axis.count;
    }
    coords
}
