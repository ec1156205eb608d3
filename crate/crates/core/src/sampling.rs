//! Training point sets and regular evaluation grids.

use std::io::Write;
use std::path::Path;

use crate::error::{PinnError, Result};
use crate::pde::ParabolicPde;
use crate::rng::{SeededRng, Stream};

/// A supervised point `(t, x)` with target `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledPoint {
    pub t: f64,
    pub x: f64,
    pub target: f64,
}

/// Initial, boundary and collocation points for one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub initial: Vec<LabeledPoint>,
    pub boundary: Vec<LabeledPoint>,
    /// Interior points `(t, x)`.
    pub collocation: Vec<(f64, f64)>,
    pub seed: u64,
}

/// Independent uniform draws from the streams of `seed`.
///
/// Initial `x` is uniform on `[a, b]`; boundary times are uniform on
/// `[0, T]`, `nb / 2` per side with the `x = a` side first; collocation
/// points are uniform on the open rectangle `(0, T) × (a, b)`, each point
/// drawing `t` before `x`.
pub fn sample_uniform(
    pde: &ParabolicPde,
    n0: usize,
    nb: usize,
    nc: usize,
    seed: u64,
) -> Result<SampleSet> {
    for (key, n) in [("sampling.n0", n0), ("sampling.nb", nb), ("sampling.nc", nc)] {
        if n == 0 {
            return Err(PinnError::config(key, "must be at least 1"));
        }
    }
    if nb % 2 != 0 {
        return Err(PinnError::config(
            "sampling.nb",
            format!("must be even to split across both boundaries, got {nb}"),
        ));
    }
    let mut rng = SeededRng::new(seed, Stream::Initial);
    let initial = (0..n0)
        .map(|_| {
            let x = rng.uniform(pde.a, pde.b);
            LabeledPoint {
                t: 0.0,
                x,
                target: pde.initial(x),
            }
        })
        .collect();

    let mut rng = SeededRng::new(seed, Stream::Boundary);
    let half = nb / 2;
    let mut boundary = Vec::with_capacity(nb);
    for side in 0..2 {
        for _ in 0..half {
            let t = rng.uniform(0.0, pde.t_end);
            let (x, target) = if side == 0 {
                (pde.a, pde.left(t))
            } else {
                (pde.b, pde.right(t))
            };
            boundary.push(LabeledPoint { t, x, target });
        }
    }

    let mut rng = SeededRng::new(seed, Stream::Collocation);
    let collocation = (0..nc)
        .map(|_| {
            let t = rng.uniform_open(0.0, pde.t_end);
            let x = rng.uniform_open(pde.a, pde.b);
            (t, x)
        })
        .collect();

    Ok(SampleSet {
        initial,
        boundary,
        collocation,
        seed,
    })
}

impl SampleSet {
    /// Writes `kind,t,x,target` rows; collocation rows have an empty target.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io = |e| PinnError::io(path, e);
        let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
        writeln!(out, "kind,t,x,target").map_err(io)?;
        for (kind, set) in [("initial", &self.initial), ("boundary", &self.boundary)] {
            for p in set {
                writeln!(out, "{kind},{:.16e},{:.16e},{:.16e}", p.t, p.x, p.target).map_err(io)?;
            }
        }
        for &(t, x) in &self.collocation {
            writeln!(out, "collocation,{t:.16e},{x:.16e},").map_err(io)?;
        }
        out.flush().map_err(io)
    }
}

/// Inclusive regular grid `x_i = a + i·h`, `t_j = j·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    pub h: f64,
    pub dt: f64,
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
}

impl EvalGrid {
    pub fn len(&self) -> usize {
        self.xs.len() * self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Number of grid steps of size `step` in `span`, tolerant of representation
/// error in ratios such as `1 / 0.004`.
fn steps(span: f64, step: f64) -> usize {
    let ratio = span / step;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        ratio.floor() as usize
    }
}

/// Grid over the problem's domain, `[a, b]` in space and `[0, T]` in time.
pub fn make_grid(h: f64, dt: f64, pde: &ParabolicPde) -> Result<EvalGrid> {
    make_grid_on(h, dt, (pde.a, pde.b), pde.t_end)
}

/// Grid over `[a, b] × [0, t_end]`.
pub fn make_grid_on(h: f64, dt: f64, (a, b): (f64, f64), t_end: f64) -> Result<EvalGrid> {
    if !(h > 0.0 && h <= b - a) {
        return Err(PinnError::config(
            "evaluation.h",
            format!("spatial step must lie in (0, {}], got {h}", b - a),
        ));
    }
    if !(dt > 0.0 && dt <= t_end) {
        return Err(PinnError::config(
            "evaluation.dt",
            format!("time step must lie in (0, {t_end}], got {dt}"),
        ));
    }
    let nx = steps(b - a, h);
    let nt = steps(t_end, dt);
    Ok(EvalGrid {
        h,
        dt,
        xs: (0..=nx).map(|i| a + i as f64 * h).collect(),
        ts: (0..=nt).map(|j| j as f64 * dt).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::{allen_cahn_problem, nws_problem, NwsParams};

    #[test]
    fn table_sizes() {
        let nws = nws_problem(NwsParams::default()).unwrap();
        let s = sample_uniform(&nws, 250, 250, 10_000, 1).unwrap();
        assert_eq!((s.initial.len(), s.boundary.len(), s.collocation.len()), (250, 250, 10_000));
        let ac = allen_cahn_problem();
        let s = sample_uniform(&ac, 500, 500, 10_000, 1).unwrap();
        assert_eq!((s.initial.len(), s.boundary.len(), s.collocation.len()), (500, 500, 10_000));
    }

    #[test]
    fn invariants_hold() {
        let pde = allen_cahn_problem();
        let s = sample_uniform(&pde, 300, 200, 5000, 9).unwrap();
        for p in &s.initial {
            assert_eq!(p.t, 0.0);
            assert!(p.x >= pde.a && p.x <= pde.b);
            assert_eq!(p.target, pde.initial(p.x));
        }
        for (i, p) in s.boundary.iter().enumerate() {
            assert!(p.t >= 0.0 && p.t <= pde.t_end);
            if i < 100 {
                assert_eq!((p.x, p.target), (pde.a, pde.left(p.t)));
            } else {
                assert_eq!((p.x, p.target), (pde.b, pde.right(p.t)));
            }
        }
        for &(t, x) in &s.collocation {
            assert!(t > 0.0 && t < pde.t_end && x > pde.a && x < pde.b);
        }
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let pde = allen_cahn_problem();
        let a = sample_uniform(&pde, 10, 10, 100, 3).unwrap();
        let b = sample_uniform(&pde, 10, 10, 100, 3).unwrap();
        let c = sample_uniform(&pde, 10, 10, 100, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn collocation_mean_is_central() {
        let pde = allen_cahn_problem();
        let s = sample_uniform(&pde, 2, 2, 10_000, 12).unwrap();
        let mean = s.collocation.iter().map(|p| p.1).sum::<f64>() / 10_000.0;
        assert!((mean - 0.5).abs() < 0.02);
    }

    #[test]
    fn odd_or_zero_counts_are_rejected() {
        let pde = allen_cahn_problem();
        assert!(sample_uniform(&pde, 10, 3, 10, 0).is_err());
        assert!(sample_uniform(&pde, 0, 2, 10, 0).is_err());
    }

    #[test]
    fn grid_shapes() {
        let pde = allen_cahn_problem();
        let g = make_grid(0.004, 0.004, &pde).unwrap();
        assert_eq!((g.xs.len(), g.ts.len()), (251, 251));
        assert_eq!(g.len(), 63_001);
        assert_eq!(g.xs[0], 0.0);
        assert!((*g.xs.last().unwrap() - 1.0).abs() < 1e-12);
        assert!((*g.ts.last().unwrap() - 1.0).abs() < 1e-12);

        let g = make_grid_on(0.1, 0.001, (0.0, 1.0), 0.01).unwrap();
        assert_eq!(g.xs.len(), 11);
        assert_eq!(g.ts.len(), 11);
        assert!((g.xs[3] - 0.3).abs() < 1e-15);
        assert!((g.ts[10] - 0.01).abs() < 1e-15);

        let g = make_grid(1.0, 1.0, &pde).unwrap();
        assert_eq!(g.xs, vec![0.0, 1.0]);
    }

    #[test]
    fn bad_steps_are_rejected() {
        let pde = allen_cahn_problem();
        assert!(make_grid(0.0, 0.1, &pde).is_err());
        assert!(make_grid(0.1, -1.0, &pde).is_err());
        assert!(make_grid(2.0, 0.1, &pde).is_err());
    }

    #[test]
    fn csv_dump_has_every_point() {
        let pde = allen_cahn_problem();
        let s = sample_uniform(&pde, 3, 4, 5, 0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("samples.csv");
        s.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1 + 3 + 4 + 5);
        assert!(text.starts_with("kind,t,x,target\n"));
    }
}
