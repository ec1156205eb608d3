use std::io::Write;
use std::path::Path;

use crate::error::{PinnError, Result};
use crate::nn::{predict_batch, Network};
use crate::pde::ParabolicPde;
use crate::sampling::EvalGrid;

/// Anything that predicts `u` at a batch of `(t, x)` points.
pub trait Predictor {
    fn predict_points(&self, ts: &[f64], xs: &[f64]) -> Vec<f64>;
}

impl Predictor for Network {
    fn predict_points(&self, ts: &[f64], xs: &[f64]) -> Vec<f64> {
        predict_batch(self, ts, xs)
    }
}

impl<F: Fn(f64, f64) -> f64> Predictor for F {
    fn predict_points(&self, ts: &[f64], xs: &[f64]) -> Vec<f64> {
        ts.iter().zip(xs).map(|(&t, &x)| self(t, x)).collect()
    }
}

/// Pointwise errors on a grid, stored time-major: entry `j * nx + i` is
/// `(ts[j], xs[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub exact: Vec<f64>,
    pub predicted: Vec<f64>,
    pub error_grid: Vec<f64>,
    pub l2_by_t: Vec<(f64, f64)>,
    pub linf_by_t: Vec<(f64, f64)>,
    pub max_abs_error: f64,
}

impl MetricsReport {
    /// Builds the report and its norms from exact and predicted values.
    pub fn from_values(xs: Vec<f64>, ts: Vec<f64>, exact: Vec<f64>, predicted: Vec<f64>) -> Result<Self> {
        let n = xs.len() * ts.len();
        if exact.len() != n || predicted.len() != n {
            return Err(PinnError::Usage(format!(
                "grid has {n} points but {} exact and {} predicted values",
                exact.len(),
                predicted.len()
            )));
        }
        let error_grid: Vec<f64> = exact.iter().zip(&predicted).map(|(e, p)| (e - p).abs()).collect();
        let mut l2_by_t = Vec::with_capacity(ts.len());
        let mut linf_by_t = Vec::with_capacity(ts.len());
        if !xs.is_empty() {
            for (j, &t) in ts.iter().enumerate() {
                let slice = &error_grid[j * xs.len()..(j + 1) * xs.len()];
                l2_by_t.push((t, l2_norm(slice)?));
                linf_by_t.push((t, linf_norm(slice)?));
            }
        }
        let max_abs_error = error_grid.iter().copied().fold(0.0, f64::max);
        Ok(MetricsReport {
            xs,
            ts,
            exact,
            predicted,
            error_grid,
            l2_by_t,
            linf_by_t,
            max_abs_error,
        })
    }

    pub fn len(&self) -> usize {
        self.error_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.error_grid.is_empty()
    }

    /// Error at grid indices `(time, space)`.
    pub fn error_at(&self, j: usize, i: usize) -> f64 {
        self.error_grid[j * self.xs.len() + i]
    }

    /// Long-form CSV: `t,x,exact,predicted,abs_error`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |e| PinnError::io(path, e);
        let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
        writeln!(out, "{ERRORS_HEADER}").map_err(io)?;
        for (j, &t) in self.ts.iter().enumerate() {
            for (i, &x) in self.xs.iter().enumerate() {
                let k = j * self.xs.len() + i;
                writeln!(
                    out,
                    "{t:.16e},{x:.16e},{:.16e},{:.16e},{:.16e}",
                    self.exact[k], self.predicted[k], self.error_grid[k]
                )
                .map_err(io)?;
            }
        }
        out.flush().map_err(io)
    }

    /// Reads a file written by [`MetricsReport::write_csv`].
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let rows = read_float_rows(path, ERRORS_HEADER)?;
        let mut ts: Vec<f64> = Vec::new();
        let mut xs: Vec<f64> = Vec::new();
        let (mut exact, mut predicted) = (Vec::new(), Vec::new());
        for row in &rows {
            let (t, x) = (row[0], row[1]);
            if ts.last() != Some(&t) {
                ts.push(t);
            }
            if ts.len() == 1 {
                xs.push(x);
            }
            exact.push(row[2]);
            predicted.push(row[3]);
        }
        if xs.len() * ts.len() != rows.len() {
            return Err(PinnError::Format {
                path: path.to_path_buf(),
                message: "rows do not form a rectangular grid".into(),
            });
        }
        MetricsReport::from_values(xs, ts, exact, predicted)
    }

    /// `t,l2,linf` per time slice.
    pub fn write_norms_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |e| PinnError::io(path, e);
        let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
        writeln!(out, "{NORMS_HEADER}").map_err(io)?;
        for (&(t, l2), &(_, linf)) in self.l2_by_t.iter().zip(&self.linf_by_t) {
            writeln!(out, "{t:.16e},{l2:.16e},{linf:.16e}").map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

pub const ERRORS_HEADER: &str = "t,x,exact,predicted,abs_error";
pub const NORMS_HEADER: &str = "t,l2,linf";

pub(crate) fn read_float_rows(path: &Path, header: &str) -> Result<Vec<Vec<f64>>> {
    let format = |message: String| PinnError::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| format(e.to_string()))?;
    let found = reader
        .headers()
        .map_err(|e| format(e.to_string()))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if found != header {
        return Err(format(format!("expected header `{header}`, found `{found}`")));
    }
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format(e.to_string()))?;
        let row = record
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| format(format!("row {}: {e}", n + 2)))?;
        rows.push(row);
    }
    Ok(rows)
}

/// Unnormalized Euclidean norm.
pub fn l2_norm(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(PinnError::Usage("norm of an empty vector".into()));
    }
    Ok(values.iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// Largest magnitude.
pub fn linf_norm(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(PinnError::Usage("norm of an empty vector".into()));
    }
    Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())))
}

/// `|exact − predicted|` over `grid`, with per-slice norms.
pub fn absolute_error_grid<P: Predictor + ?Sized>(
    model: &P,
    pde: &ParabolicPde,
    grid: &EvalGrid,
) -> Result<MetricsReport> {
    if pde.exact().is_none() {
        return Err(PinnError::Usage(format!(
            "problem `{}` has no exact solution to compare against",
            pde.name()
        )));
    }
    let n = grid.len();
    let (mut ts, mut xs) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for &t in &grid.ts {
        for &x in &grid.xs {
            ts.push(t);
            xs.push(x);
        }
    }
    let exact = ts
        .iter()
        .zip(&xs)
        .map(|(&t, &x)| pde.exact_value(x, t))
        .collect::<Result<Vec<_>>>()?;
    let predicted = model.predict_points(&ts, &xs);
    MetricsReport::from_values(grid.xs.clone(), grid.ts.clone(), exact, predicted)
}
