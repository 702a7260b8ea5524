//! Phase diagrams over a grid of `(alpha, beta)`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{classify_long_run, integrate, ClassifyControls, IntegrationControls, Regime};
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::game::{GameParams, SimplexState};
use crate::svo::{classify_svo, SvoLabel};

pub const DEFAULT_T_MAX: f64 = 2e4;
pub const DEFAULT_THRESHOLD: f64 = 0.01;
pub const DEFAULT_GRID_N: usize = 41;

pub const CSV_HEADER: &str = "alpha,beta,F_C,regime,theta_deg,svo";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    /// Supplies `M`, `r` and `mu`; its `alpha` and `beta` are replaced per cell.
    pub base: GameParams,
    pub alpha_range: (f64, f64),
    pub beta_range: (f64, f64),
    pub grid_n: usize,
    pub initial_conditions: Vec<SimplexState>,
    pub t_max: f64,
    pub integration: IntegrationControls,
    pub classify: ClassifyControls,
    /// `F_C` above this counts as cooperation surviving.
    pub threshold: f64,
}

impl SweepConfig {
    pub fn new(base: GameParams) -> Self {
        Self {
            base,
            alpha_range: (-1.0, 1.0),
            beta_range: (-1.0, 1.0),
            grid_n: DEFAULT_GRID_N,
            initial_conditions: vec![SimplexState::BARYCENTER],
            t_max: DEFAULT_T_MAX,
            integration: IntegrationControls::default(),
            classify: ClassifyControls::default(),
            threshold: DEFAULT_THRESHOLD,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid_n < 2 {
            return Err(Error::InvalidParameter {
                name: "grid_n",
                value: self.grid_n as f64,
                reason: "need at least 2 cells per axis",
            });
        }
        for (name, (lo, hi)) in [("alpha_range", self.alpha_range), ("beta_range", self.beta_range)] {
            if !(-1.0 <= lo && lo <= hi && hi <= 1.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value: if (-1.0..=1.0).contains(&lo) { hi } else { lo },
                    reason: "must be an interval inside [-1, 1]",
                });
            }
        }
        if self.initial_conditions.is_empty() {
            return Err(Error::Precondition("at least one initial condition is required".into()));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_max",
                value: self.t_max,
                reason: "must be positive",
            });
        }
        Ok(())
    }

    pub fn alphas(&self) -> Vec<f64> {
        axis(self.alpha_range, self.grid_n)
    }

    pub fn betas(&self) -> Vec<f64> {
        axis(self.beta_range, self.grid_n)
    }

    /// Resolved configuration as recorded next to the CSV.
    pub fn metadata(&self) -> serde_json::Value {
        serde_json::json!({
            "M": self.base.group_size(),
            "r": self.base.enhancement(),
            "mu": self.base.mu(),
            "cost": self.base.cost(),
            "alpha_range": [self.alpha_range.0, self.alpha_range.1],
            "beta_range": [self.beta_range.0, self.beta_range.1],
            "grid_n": self.grid_n,
            "alphas": self.alphas(),
            "betas": self.betas(),
            "order": "row-major, alpha outer, beta inner",
            "initial_conditions": self.initial_conditions.iter().map(|s| s.as_array()).collect::<Vec<_>>(),
            "aggregation": "max F_C over initial conditions; regime of the maximising start",
            "t_max": self.t_max,
            "rel_tol": self.integration.rel_tol,
            "abs_tol": self.integration.abs_tol,
            "max_step": self.integration.max_step,
            "max_steps": self.integration.max_steps,
            "sample_cadence": self.integration.cadence,
            "classifier": {
                "tail_fraction": self.classify.tail_fraction,
                "fixed_tol": self.classify.fixed_tol,
                "boundary_floor": self.classify.floor_for(self.base.mu()),
                "min_amplitude": self.classify.min_amplitude,
                "decay_ratio": self.classify.decay_ratio,
            },
            "F_C": "trapezoidal time average of x over the tail window",
            "threshold": self.threshold,
        })
    }
}

/// `n` evenly spaced points from `lo` to `hi`; interior points are computed
/// as weighted averages so that e.g. `0.3` comes out exactly on `[-1, 1]`.
fn axis((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let i = i as f64;
            (lo * (last - i) + hi * i) / last
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeCell {
    pub alpha: f64,
    pub beta: f64,
    /// `NaN` when the cell's integration failed.
    pub f_c: f64,
    pub regime: Regime,
    /// `NaN` at the origin.
    pub theta_deg: f64,
    /// `None` at the origin.
    pub svo: Option<SvoLabel>,
    /// Failure message for `regime == Error`.
    pub error: Option<String>,
}

impl RegimeCell {
    pub fn survives(&self, threshold: f64) -> bool {
        self.f_c > threshold
    }

    pub fn svo_str(&self) -> &'static str {
        self.svo.map_or("undefined", |l| l.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// Row-major, alpha outer.
    pub cells: Vec<RegimeCell>,
}

impl SweepGrid {
    pub fn cell(&self, i_alpha: usize, j_beta: usize) -> &RegimeCell {
        &self.cells[i_alpha * self.betas.len() + j_beta]
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for c in &self.cells {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt_f64(c.alpha),
                fmt_f64(c.beta),
                fmt_f64(c.f_c),
                c.regime.as_str(),
                fmt_f64(c.theta_deg),
                c.svo_str()
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ASCII output")
    }

    /// Cells with `F_C` above `threshold`.
    pub fn survivors(&self, threshold: f64) -> impl Iterator<Item = &RegimeCell> {
        self.cells.iter().filter(move |c| c.survives(threshold))
    }
}

fn run_cell(config: &SweepConfig, alpha: f64, beta: f64) -> RegimeCell {
    let (theta_deg, svo) = match classify_svo(alpha, beta) {
        Ok(c) => (c.theta_deg, Some(c.label)),
        Err(_) => (f64::NAN, None),
    };
    let failed = |message: String| RegimeCell {
        alpha,
        beta,
        f_c: f64::NAN,
        regime: Regime::Error,
        theta_deg,
        svo,
        error: Some(message),
    };
    let params = match config.base.with_alpha_beta(alpha, beta) {
        Ok(p) => p,
        Err(e) => return failed(e.to_string()),
    };
    let mut best: Option<(f64, Regime)> = None;
    for start in &config.initial_conditions {
        let run = integrate(&params, start, config.t_max, &config.integration)
            .and_then(|traj| classify_long_run(&traj, &config.classify));
        match run {
            Ok(run) => {
                if best.map_or(true, |(f, _)| run.f_c > f) {
                    best = Some((run.f_c, run.regime));
                }
            }
            Err(e) => return failed(format!("start {:?}: {e}", start.as_array())),
        }
    }
    let (f_c, regime) = best.expect("at least one initial condition");
    RegimeCell {
        alpha,
        beta,
        f_c,
        regime,
        theta_deg,
        svo,
        error: None,
    }
}

/// Evaluate every cell of the grid. Cells run in parallel on the current
/// rayon pool; the result does not depend on scheduling.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepGrid> {
    config.validate()?;
    let alphas = config.alphas();
    let betas = config.betas();
    let n = betas.len();
    let cells = (0..alphas.len() * n)
        .into_par_iter()
        .map(|k| run_cell(config, alphas[k / n], betas[k % n]))
        .collect();
    Ok(SweepGrid { alphas, betas, cells })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepDiff {
    pub threshold_a: f64,
    pub threshold_b: f64,
    /// `(alpha, beta)` of cells surviving in `b` but not in `a`.
    pub gained: Vec<(f64, f64)>,
    /// `(alpha, beta)` of cells surviving in `a` but not in `b`.
    pub lost: Vec<(f64, f64)>,
}

impl SweepDiff {
    pub fn is_empty(&self) -> bool {
        self.gained.is_empty() && self.lost.is_empty()
    }
}

/// Cells whose survival status (`F_C > threshold`) differs between the two
/// grids, using `threshold_a` on `a` and `threshold_b` on `b`.
pub fn compare_sweeps(a: &SweepGrid, b: &SweepGrid, threshold_a: f64, threshold_b: f64) -> Result<SweepDiff> {
    if a.alphas != b.alphas || a.betas != b.betas {
        return Err(Error::GeometryMismatch(format!(
            "{}x{} grid over alpha [{:?}, {:?}] vs {}x{} grid over alpha [{:?}, {:?}]",
            a.alphas.len(),
            a.betas.len(),
            a.alphas.first(),
            a.alphas.last(),
            b.alphas.len(),
            b.betas.len(),
            b.alphas.first(),
            b.alphas.last(),
        )));
    }
    let mut gained = Vec::new();
    let mut lost = Vec::new();
    for (ca, cb) in a.cells.iter().zip(&b.cells) {
        match (ca.survives(threshold_a), cb.survives(threshold_b)) {
            (false, true) => gained.push((ca.alpha, ca.beta)),
            (true, false) => lost.push((ca.alpha, ca.beta)),
            _ => {}
        }
    }
    Ok(SweepDiff {
        threshold_a,
        threshold_b,
        gained,
        lost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(grid_n: usize) -> SweepConfig {
        let mut c = SweepConfig::new(GameParams::new(5, 3.0, 0.0, 0.0, 1e-8).unwrap());
        c.grid_n = grid_n;
        c.t_max = 2000.0;
        c
    }

    #[test]
    fn axis_is_exact_on_the_default_grid() {
        let a = axis((-1.0, 1.0), 41);
        assert_eq!(a[0], -1.0);
        assert_eq!(a[20], 0.0);
        assert_eq!(a[26], 0.3);
        assert_eq!(a[40], 1.0);
        assert_eq!(axis((0.0, 1.0), 2), vec![0.0, 1.0]);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = small_config(1);
        assert!(run_sweep(&c).is_err());
        c.grid_n = 3;
        c.alpha_range = (-1.5, 1.0);
        assert!(run_sweep(&c).is_err());
        c.alpha_range = (0.5, 0.2);
        assert!(run_sweep(&c).is_err());
        c.alpha_range = (-1.0, 1.0);
        c.initial_conditions.clear();
        assert!(run_sweep(&c).is_err());
    }

    #[test]
    fn smoke_grid_layout() {
        let grid = run_sweep(&small_config(3)).unwrap();
        assert_eq!(grid.cells.len(), 9);
        assert_eq!((grid.cell(0, 2).alpha, grid.cell(0, 2).beta), (-1.0, 1.0));
        let origin = grid.cell(1, 1);
        assert!(origin.theta_deg.is_nan());
        assert_eq!(origin.svo_str(), "undefined");
        let csv = grid.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.count(), 9);
        assert!(csv.contains(",NaN,undefined"));
        assert!(grid.cells.iter().all(|c| (0.0..=1.0).contains(&c.f_c)));
    }

    #[test]
    fn comparisons() {
        let grid = run_sweep(&small_config(3)).unwrap();
        assert!(compare_sweeps(&grid, &grid, 0.01, 0.01).unwrap().is_empty());
        let stricter = compare_sweeps(&grid, &grid, 0.01, 0.05).unwrap();
        assert!(stricter.gained.is_empty());
        let other = run_sweep(&small_config(2)).unwrap();
        assert!(matches!(compare_sweeps(&grid, &other, 0.01, 0.01), Err(Error::GeometryMismatch(_))));
    }

    #[test]
    fn metadata_records_the_config() {
        let meta = small_config(3).metadata();
        assert_eq!(meta["M"], 5);
        assert_eq!(meta["t_max"], 2000.0);
        assert_eq!(meta["initial_conditions"].as_array().unwrap().len(), 1);
        assert_eq!(meta["threshold"], 0.01);
        assert!(meta.get("jobs").is_none());
    }
}
