use std::io::Write;
use std::path::Path;
use std::time::Instant;

use crate::error::{PinnError, Result};
use crate::nn::Network;
use crate::pde::ParabolicPde;
use crate::rng::{SeededRng, Stream};

/// Least-squares line `y = slope·x + intercept` and its coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRecord {
    pub point_counts: Vec<usize>,
    pub seconds: Vec<f64>,
    pub fit: LinearFit,
}

/// 1000, 2000, ..., 10000.
pub fn default_counts() -> Vec<usize> {
    (1..=10).map(|k| k * 1000).collect()
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(PinnError::Usage("linear fit needs at least two paired samples".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(PinnError::Usage("linear fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Inference time at growing point counts.
///
/// Each count evaluates the network one point at a time at seeded random
/// domain points; the fastest of `repeats` runs is kept.
pub fn timing_benchmark(
    net: &Network,
    pde: &ParabolicPde,
    counts: &[usize],
    seed: u64,
    repeats: usize,
) -> Result<TimingRecord> {
    if counts.is_empty() || counts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PinnError::config(
            "evaluation.timing_counts",
            "must be a nonempty strictly increasing list",
        ));
    }
    let mut rng = SeededRng::new(seed, Stream::Benchmark);
    let largest = *counts.last().unwrap_or(&0);
    let points: Vec<(f64, f64)> = (0..largest)
        .map(|_| (rng.uniform(0.0, pde.t_end), rng.uniform(pde.a, pde.b)))
        .collect();
    let mut seconds = Vec::with_capacity(counts.len());
    let mut sink = 0.0;
    for &n in counts {
        let mut best = f64::INFINITY;
        for _ in 0..repeats.max(1) {
            let start = Instant::now();
            for &(t, x) in &points[..n] {
                sink += net.predict(t, x);
            }
            best = best.min(start.elapsed().as_secs_f64());
        }
        seconds.push(best);
    }
    std::hint::black_box(sink);
    let xs: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let fit = if counts.len() >= 2 {
        linear_fit(&xs, &seconds)?
    } else {
        LinearFit {
            slope: seconds[0] / xs[0].max(1.0),
            intercept: 0.0,
            r_squared: 1.0,
        }
    };
    Ok(TimingRecord {
        point_counts: counts.to_vec(),
        seconds,
        fit,
    })
}

pub const TIMING_HEADER: &str = "points,seconds,fitted_seconds";

impl TimingRecord {
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |e| PinnError::io(path, e);
        let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
        writeln!(out, "{TIMING_HEADER}").map_err(io)?;
        for (&n, &s) in self.point_counts.iter().zip(&self.seconds) {
            let fitted = self.fit.slope * n as f64 + self.fit.intercept;
            writeln!(out, "{n},{s:.16e},{fitted:.16e}").map_err(io)?;
        }
        out.flush().map_err(io)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let rows = super::metrics::read_float_rows(path.as_ref(), TIMING_HEADER)?;
        let point_counts: Vec<usize> = rows.iter().map(|r| r[0] as usize).collect();
        let seconds: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        let xs: Vec<f64> = point_counts.iter().map(|&c| c as f64).collect();
        let fit = linear_fit(&xs, &seconds)?;
        Ok(TimingRecord {
            point_counts,
            seconds,
            fit,
        })
    }

    pub fn summary(&self) -> String {
        format!(
            "seconds = {:.3e}·N + {:.3e}, r² = {:.5}",
            self.fit.slope, self.fit.intercept, self.fit.r_squared
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{layer_sizes, Activation};
    use crate::pde::allen_cahn_problem;

    #[test]
    fn exact_line_has_unit_r_squared() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [0.5, 0.7, 0.9, 1.1];
        let fit = linear_fit(&xs, &ys).unwrap();
        assert!((fit.slope - 0.2).abs() < 1e-12);
        assert!((fit.intercept - 0.3).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
        assert!(linear_fit(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn benchmark_shape_and_csv() {
        let pde = allen_cahn_problem();
        let net = Network::init_glorot(&layer_sizes(2, 4), Activation::Gelu, 0).unwrap();
        let counts = vec![100, 200, 300];
        let rec = timing_benchmark(&net, &pde, &counts, 1, 1).unwrap();
        assert_eq!(rec.point_counts, counts);
        assert!(rec.seconds.iter().all(|s| *s >= 0.0));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("timing.csv");
        rec.write_csv(&path).unwrap();
        let back = TimingRecord::read_csv(&path).unwrap();
        assert_eq!(back.seconds, rec.seconds);
        assert!(timing_benchmark(&net, &pde, &[200, 100], 1, 1).is_err());
        assert_eq!(default_counts().len(), 10);
    }
}
