use std::fmt::Write as _;

use super::baselines::{baseline, ALLEN_CAHN_METHODS, NWS_METHODS};
use super::metrics::Predictor;
use crate::error::{PinnError, Result};
use crate::pde::{ParabolicPde, ProblemKind};

pub const NWS_TABLE_XS: [f64; 4] = [0.2, 0.4, 0.6, 0.8];
pub const NWS_TABLE_TS: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];
pub const ALLEN_CAHN_TABLE_TS: [f64; 6] = [0.001, 0.003, 0.005, 0.007, 0.009, 0.01];

pub fn allen_cahn_table_xs() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub x: f64,
    pub t: f64,
    pub pinn: f64,
    /// `(method, published error)` in fixture column order.
    pub baselines: Vec<(&'static str, f64)>,
}

impl ComparisonRow {
    pub fn baseline(&self, method: &str) -> Option<f64> {
        self.baselines.iter().find(|(m, _)| *m == method).map(|p| p.1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub problem: &'static str,
    pub methods: Vec<&'static str>,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn max_pinn_error(&self) -> f64 {
        self.rows.iter().map(|r| r.pinn).fold(0.0, f64::max)
    }

    /// Rows where the network is not strictly better than `method`.
    /// Boundary rows (`x` at a domain end) are skipped when `interior_only`.
    pub fn dominance_failures(&self, method: &str, interior_only: bool) -> Vec<&ComparisonRow> {
        self.rows
            .iter()
            .filter(|r| !interior_only || (r.x > 1e-12 && r.x < 1.0 - 1e-12))
            .filter(|r| match r.baseline(method) {
                Some(b) => r.pinn >= b,
                None => false,
            })
            .collect()
    }

    /// Aligned plain text, one line per grid point.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} absolute errors", self.problem);
        let _ = write!(out, "{:>6} {:>7} {:>12}", "x", "t", "PINN");
        for m in &self.methods {
            let _ = write!(out, " {m:>12}");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{:>6.3} {:>7.3} {:>12.3e}", r.x, r.t, r.pinn);
            for (_, b) in &r.baselines {
                let _ = write!(out, " {b:>12.3e}");
            }
            out.push('\n');
        }
        let _ = writeln!(out, "max PINN error {:.3e}", self.max_pinn_error());
        out
    }
}

/// PINN errors at the published comparison points next to the spline baselines.
pub fn comparison_table<P: Predictor + ?Sized>(model: &P, pde: &ParabolicPde) -> Result<ComparisonTable> {
    let (xs, ts, methods): (Vec<f64>, Vec<f64>, &[&'static str]) = match pde.kind {
        ProblemKind::Nws { lambda } if lambda == 0.1 => {
            (NWS_TABLE_XS.to_vec(), NWS_TABLE_TS.to_vec(), &NWS_METHODS)
        }
        ProblemKind::AllenCahn => (allen_cahn_table_xs(), ALLEN_CAHN_TABLE_TS.to_vec(), &ALLEN_CAHN_METHODS),
        other => {
            return Err(PinnError::Usage(format!(
                "no published comparison for problem `{}` ({other:?}); tables exist for nws with lambda 0.1 and allen-cahn",
                pde.name()
            )))
        }
    };
    let (mut pt, mut px) = (Vec::new(), Vec::new());
    for &x in &xs {
        for &t in &ts {
            px.push(x);
            pt.push(t);
        }
    }
    let predicted = model.predict_points(&pt, &px);
    let mut rows = Vec::with_capacity(pt.len());
    for ((&t, &x), u) in pt.iter().zip(&px).zip(predicted) {
        let exact = pde.exact_value(x, t)?;
        let baselines = methods
            .iter()
            .map(|&m| {
                baseline(m, x, t)
                    .map(|b| (m, b))
                    .ok_or_else(|| PinnError::Usage(format!("fixture lacks {m} at x={x}, t={t}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(ComparisonRow {
            x,
            t,
            pinn: (u - exact).abs(),
            baselines,
        });
    }
    Ok(ComparisonTable {
        problem: pde.name(),
        methods: methods.to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::{allen_cahn_problem, exact_allen_cahn, exact_nws, nws_problem, NwsParams};

    #[test]
    fn oracle_tables_are_zero_and_dominate() {
        let pde = nws_problem(NwsParams::default()).unwrap();
        let oracle = |t: f64, x: f64| exact_nws(0.1, x, t).unwrap();
        let table = comparison_table(&oracle, &pde).unwrap();
        assert_eq!(table.rows.len(), 20);
        assert_eq!(table.max_pinn_error(), 0.0);
        assert!(table.dominance_failures("ECBS", false).is_empty());
        assert_eq!(table.rows[0].baseline("ECBS"), Some(6.068e-4));

        let pde = allen_cahn_problem();
        let table = comparison_table(&|t: f64, x: f64| exact_allen_cahn(x, t), &pde).unwrap();
        assert_eq!(table.rows.len(), 66);
        assert!(table.dominance_failures("N-P", true).is_empty());
        // the boundary baselines are exactly zero, so nothing beats them
        assert_eq!(table.dominance_failures("N-P", false).len(), 12);
        let text = table.render();
        assert!(text.contains("N-P") && text.contains("TCB-CM"));
        assert_eq!(text.lines().count(), 2 + 66 + 1);
    }

    #[test]
    fn offset_model_loses_to_small_baselines() {
        let pde = allen_cahn_problem();
        let table = comparison_table(&|t: f64, x: f64| exact_allen_cahn(x, t) + 1e-5, &pde).unwrap();
        let fails = table.dominance_failures("N-P", true);
        assert_eq!(fails.len(), 1);
        assert_eq!((fails[0].x, fails[0].t), (0.6, 0.001));
    }

    #[test]
    fn other_problems_have_no_table() {
        let pde = nws_problem(NwsParams { lambda: 0.2 }).unwrap();
        assert!(matches!(comparison_table(&|_: f64, _: f64| 0.0, &pde), Err(PinnError::Usage(_))));
    }
}
