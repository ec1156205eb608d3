use serde::{Deserialize, Serialize};

use crate::error::{PinnError, Result};

/// Piecewise-constant learning rate: each segment applies from its start
/// iteration until the next segment begins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u64, f64)>", into = "Vec<(u64, f64)>")]
pub struct Schedule(Vec<(u64, f64)>);

impl TryFrom<Vec<(u64, f64)>> for Schedule {
    type Error = PinnError;

    fn try_from(segments: Vec<(u64, f64)>) -> Result<Self> {
        Schedule::new(segments)
    }
}

impl From<Schedule> for Vec<(u64, f64)> {
    fn from(s: Schedule) -> Self {
        s.0
    }
}

impl Schedule {
    pub fn new(segments: Vec<(u64, f64)>) -> Result<Self> {
        let key = "training.schedule";
        match segments.first() {
            None => return Err(PinnError::config(key, "needs at least one segment")),
            Some(&(start, _)) if start != 0 => {
                return Err(PinnError::config(key, format!("must start at iteration 0, starts at {start}")))
            }
            _ => {}
        }
        for pair in segments.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(PinnError::config(
                    key,
                    format!(
                        "start iterations must strictly increase, got {} after {}",
                        pair[1].0, pair[0].0
                    ),
                ));
            }
        }
        if let Some(&(start, lr)) = segments.iter().find(|(_, lr)| !(*lr > 0.0 && lr.is_finite())) {
            return Err(PinnError::config(
                key,
                format!("learning rate at iteration {start} must be positive, got {lr}"),
            ));
        }
        Ok(Schedule(segments))
    }

    /// 1e-2 until 1000, 1e-3 until 3000, then 5e-4.
    pub fn paper() -> Self {
        Schedule(vec![(0, 1e-2), (1000, 1e-3), (3000, 5e-4)])
    }

    /// The same three rates with boundaries compressed for short runs.
    pub fn ci() -> Self {
        Schedule(vec![(0, 1e-2), (400, 1e-3), (1200, 5e-4)])
    }

    pub fn segments(&self) -> &[(u64, f64)] {
        &self.0
    }

    /// Rate of the last segment whose start is at or before `iteration`.
    pub fn lr_at(&self, iteration: u64) -> f64 {
        lr_at(&self.0, iteration)
    }
}

pub fn lr_at(schedule: &[(u64, f64)], iteration: u64) -> f64 {
    schedule
        .iter()
        .take_while(|(start, _)| *start <= iteration)
        .last()
        .map(|&(_, lr)| lr)
        .unwrap_or(schedule[0].1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_schedule() {
        let s = Schedule::paper();
        assert_eq!(s.lr_at(0), 1e-2);
        assert_eq!(s.lr_at(500), 1e-2);
        assert_eq!(s.lr_at(999), 1e-2);
        assert_eq!(s.lr_at(1000), 1e-3);
        assert_eq!(s.lr_at(2000), 1e-3);
        assert_eq!(s.lr_at(3000), 5e-4);
        assert_eq!(s.lr_at(10_000), 5e-4);
    }

    #[test]
    fn validation() {
        assert!(Schedule::new(vec![]).is_err());
        assert!(Schedule::new(vec![(5, 1e-2)]).is_err());
        assert!(Schedule::new(vec![(0, 1e-2), (300, 1e-3), (200, 1e-4)]).is_err());
        assert!(Schedule::new(vec![(0, 1e-2), (300, 0.0)]).is_err());
        assert!(Schedule::new(vec![(0, 1e-2), (300, 1e-3)]).is_ok());
    }
}
