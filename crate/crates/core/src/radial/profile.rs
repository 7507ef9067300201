use std::path::Path;

use crate::error::{Error, Result};
use crate::radial::stencil;

pub const MIN_NODES: usize = 16;

/// Ascending radii `r_0 < ... < r_{n-1}` with `r_0 >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
}

impl RadialGrid {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < MIN_NODES {
            return Err(Error::domain(format!("grid needs at least {MIN_NODES} nodes (got {})", nodes.len())));
        }
        if !(nodes[0] >= 0.0) || nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("grid nodes must be finite with r_0 >= 0"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("grid nodes must be strictly increasing"));
        }
        Ok(RadialGrid { nodes })
    }

    pub fn uniform(r0: f64, r1: f64, n: usize) -> Result<Self> {
        if !(r1 > r0) || n < 2 {
            return Err(Error::domain(format!("uniform grid needs r1 > r0 (got [{r0}, {r1}])")));
        }
        let h = (r1 - r0) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| r0 + h * i as f64).collect();
        nodes[n - 1] = r1;
        Self::new(nodes)
    }

    /// Log-uniform nodes on `[r0, r1]`, `r0 > 0`.
    pub fn geometric(r0: f64, r1: f64, n: usize) -> Result<Self> {
        if !(r0 > 0.0 && r1 > r0) || n < 2 {
            return Err(Error::domain(format!("geometric grid needs 0 < r0 < r1 (got [{r0}, {r1}])")));
        }
        let lr = (r1 / r0).ln();
        let mut nodes: Vec<f64> = (0..n).map(|i| r0 * (lr * i as f64 / (n - 1) as f64).exp()).collect();
        nodes[0] = r0;
        nodes[n - 1] = r1;
        Self::new(nodes)
    }

    /// Nodes whose distance to `r1` shrinks geometrically by `ratio` until it
    /// drops below `d_min`, starting from a uniform coarse part on `[r0, r1)`.
    pub fn clustered_toward_end(r0: f64, r1: f64, n_uniform: usize, ratio: f64, d_min: f64) -> Result<Self> {
        if !(r1 > r0 && ratio > 1.0 && d_min > 0.0) {
            return Err(Error::domain("clustered grid needs r1 > r0, ratio > 1, d_min > 0"));
        }
        let span = r1 - r0;
        let h = span / n_uniform.max(1) as f64;
        let mut nodes: Vec<f64> = (0..n_uniform).map(|i| r0 + h * i as f64).collect();
        let mut d = span - h * (n_uniform.max(1) - 1) as f64;
        loop {
            d /= ratio;
            if d < d_min {
                break;
            }
            nodes.push(r1 - d);
        }
        nodes.push(r1);
        Self::new(nodes)
    }

    /// Nodes with spacing `min(h, kappa d + d_min)` at distance `d` from `r1`,
    /// `h = (r1 - r0)/n_uniform`: uniform in the interior and geometrically
    /// refined toward `r1` without jumps in the spacing ratio.
    pub fn graded_toward_end(r0: f64, r1: f64, n_uniform: usize, kappa: f64, d_min: f64) -> Result<Self> {
        if !(r1 > r0 && kappa > 0.0 && d_min > 0.0 && n_uniform >= 1) {
            return Err(Error::domain("graded grid needs r1 > r0, kappa > 0, d_min > 0, n_uniform >= 1"));
        }
        let span = r1 - r0;
        let h = span / n_uniform as f64;
        let mut dist = vec![0.0];
        let mut d = 0.0;
        loop {
            d += h.min(kappa * d + d_min);
            if d >= span - 0.5 * h {
                break;
            }
            dist.push(d);
        }
        dist.push(span);
        Self::new(dist.iter().rev().map(|d| if *d == span { r0 } else { r1 - d }).collect())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    /// Outer radius R.
    pub fn r_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.nodes.iter().map(|r| r * factor).collect())
    }

    /// Index of the cell `[r_i, r_{i+1}]` containing `x`, clamped to the grid.
    pub fn cell(&self, x: f64) -> usize {
        let n = self.nodes.len();
        match self.nodes.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }
}

/// A sampled radial function with its derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    grid: RadialGrid,
    values: Vec<f64>,
    derivative: Vec<f64>,
    blowup_from: Option<usize>,
}

fn check_values(values: &[f64], n: usize) -> Result<()> {
    if values.len() != n {
        return Err(Error::domain(format!("profile has {} values for {n} nodes", values.len())));
    }
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::domain(format!("profile value u[{i}] = {v} is not finite and nonnegative")));
    }
    Ok(())
}

impl RadialProfile {
    /// Profile with finite-difference derivative.
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        check_values(&values, grid.len())?;
        let (derivative, _) = stencil::derivatives(grid.nodes(), &values);
        Ok(RadialProfile { grid, values, derivative, blowup_from: None })
    }

    /// Profile with a known derivative.
    pub fn with_derivative(grid: RadialGrid, values: Vec<f64>, derivative: Vec<f64>) -> Result<Self> {
        check_values(&values, grid.len())?;
        if derivative.len() != grid.len() || derivative.iter().any(|d| !d.is_finite()) {
            return Err(Error::domain("profile derivative must be finite with one entry per node"));
        }
        Ok(RadialProfile { grid, values, derivative, blowup_from: None })
    }

    pub fn from_fn(grid: RadialGrid, u: impl Fn(f64) -> f64, du: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| u(r)).collect();
        let derivative = grid.nodes().iter().map(|&r| du(r)).collect();
        Self::with_derivative(grid, values, derivative)
    }

    pub fn constant(grid: RadialGrid, c: f64) -> Result<Self> {
        let n = grid.len();
        Self::with_derivative(grid, vec![c; n], vec![0.0; n])
    }

    /// Marks nodes from `index` on as capped by the overflow guard.
    pub fn with_blowup_from(mut self, index: usize) -> Self {
        self.blowup_from = Some(index);
        self
    }

    pub fn blowup_from(&self) -> Option<usize> {
        self.blowup_from
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn r(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn u(&self) -> &[f64] {
        &self.values
    }

    pub fn du(&self) -> &[f64] {
        &self.derivative
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Linear interpolation, clamped to the end values outside the grid.
    pub fn value_at(&self, x: f64) -> f64 {
        let r = self.r();
        if x <= r[0] {
            return self.values[0];
        }
        if x >= self.grid.r_max() {
            return self.values[self.len() - 1];
        }
        let i = self.grid.cell(x);
        let t = (x - r[i]) / (r[i + 1] - r[i]);
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    /// Writes the `r,u,du` CSV format with 17 significant digits.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["r", "u", "du"])?;
        for i in 0..self.len() {
            w.write_record([
                format!("{:.16e}", self.r()[i]),
                format!("{:.16e}", self.values[i]),
                format!("{:.16e}", self.derivative[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut rd = csv::Reader::from_path(path)?;
        let headers = rd.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["r", "u", "du"] {
            return Err(Error::domain("profile CSV must have header r,u,du"));
        }
        let (mut r, mut u, mut du) = (Vec::new(), Vec::new(), Vec::new());
        for rec in rd.records() {
            let rec = rec?;
            let parse = |k: usize| -> Result<f64> {
                rec.get(k)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::domain(format!("malformed profile row: {rec:?}")))
            };
            r.push(parse(0)?);
            u.push(parse(1)?);
            du.push(parse(2)?);
        }
        Self::with_derivative(RadialGrid::new(r)?, u, du)
    }
}
