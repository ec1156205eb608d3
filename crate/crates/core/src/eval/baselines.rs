//! Published spline-method errors, kept as a static fixture for comparison.

use std::sync::OnceLock;

/// Raw fixture text: `method,x,t,abs_error`.
pub const BASELINES_CSV: &str = include_str!("../../data/baselines.csv");

/// Methods in the Newell-Whitehead-Segel comparison.
pub const NWS_METHODS: [&str; 3] = ["UCBS", "TCBS", "ECBS"];
/// Methods in the Allen-Cahn comparison.
pub const ALLEN_CAHN_METHODS: [&str; 2] = ["N-P", "TCB-CM"];

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineEntry {
    pub method: String,
    pub x: f64,
    pub t: f64,
    pub abs_error: f64,
}

/// All fixture rows, parsed once.
pub fn baselines() -> &'static [BaselineEntry] {
    static TABLE: OnceLock<Vec<BaselineEntry>> = OnceLock::new();
    TABLE.get_or_init(|| {
        BASELINES_CSV
            .lines()
            .skip(1)
            .filter(|l| !l.is_empty())
            .map(|line| {
                let f: Vec<&str> = line.split(',').collect();
                let num = |s: &str| s.parse::<f64>().expect("baseline fixture is numeric");
                BaselineEntry {
                    method: f[0].to_string(),
                    x: num(f[1]),
                    t: num(f[2]),
                    abs_error: num(f[3]),
                }
            })
            .collect()
    })
}

/// Published error of `method` at `(x, t)`, if tabulated.
pub fn baseline(method: &str, x: f64, t: f64) -> Option<f64> {
    baselines()
        .iter()
        .find(|e| e.method == method && (e.x - x).abs() < 1e-9 && (e.t - t).abs() < 1e-9)
        .map(|e| e.abs_error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sha2::{Digest, Sha256};

    #[test]
    fn fixture_checksum() {
        let digest = Sha256::digest(BASELINES_CSV.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(hex, "e8ddc689f173b177b70532a3a090e68c5f1343c33537e555de69f1c45f14ec57");
    }

    #[test]
    fn quoted_values() {
        assert_eq!(baseline("ECBS", 0.2, 0.2), Some(6.068e-4));
        assert_eq!(baseline("N-P", 0.1, 0.01), Some(1.06e-3));
        assert_eq!(baseline("N-P", 0.6, 0.001), Some(7.69e-6));
        assert_eq!(baseline("TCB-CM", 0.0, 0.007), Some(1.11e-16));
        assert_eq!(baseline("ECBS", 0.5, 0.2), None);
    }

    #[test]
    fn table_sizes() {
        let count = |m: &str| baselines().iter().filter(|e| e.method == m).count();
        for m in NWS_METHODS {
            assert_eq!(count(m), 20);
        }
        for m in ALLEN_CAHN_METHODS {
            assert_eq!(count(m), 66);
        }
        assert_eq!(baselines().len(), 192);
    }

    #[test]
    fn duplicated_rows_are_kept_verbatim() {
        for t in [0.2, 0.4, 0.6, 0.8, 1.0] {
            for m in NWS_METHODS {
                assert_eq!(baseline(m, 0.4, t), baseline(m, 0.6, t));
            }
        }
    }
}
