//! Long-run behaviour of a trajectory from its tail window.

use std::fmt;

use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::game::SimplexState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    FixedPoint,
    CycleOrHeteroclinic,
    BoundaryAbsorbed,
    Inconclusive,
    /// Integration failed; only produced by sweeps.
    Error,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::FixedPoint => "fixed_point",
            Regime::CycleOrHeteroclinic => "cycle_or_heteroclinic",
            Regime::BoundaryAbsorbed => "boundary_absorbed",
            Regime::Inconclusive => "inconclusive",
            Regime::Error => "error",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyControls {
    /// Share of the horizon, counted from the end, that forms the tail.
    pub tail_fraction: f64,
    /// Max-norm spread of the tail below which the state counts as settled.
    pub fixed_tol: f64,
    /// A strategy whose share stays below this over the whole tail is extinct.
    /// `None` picks `clamp(5 mu, 1e-9, 1e-3)`, which sits above the
    /// mutation-selection floor at a stable face.
    pub boundary_floor: Option<f64>,
    /// Smallest peak-to-peak swing of `x` that counts as an oscillation.
    pub min_amplitude: f64,
    /// Second-half amplitude must be at least this share of the first.
    pub decay_ratio: f64,
}

impl Default for ClassifyControls {
    fn default() -> Self {
        Self {
            tail_fraction: 0.2,
            fixed_tol: 1e-7,
            boundary_floor: None,
            min_amplitude: 1e-6,
            decay_ratio: 0.5,
        }
    }
}

impl ClassifyControls {
    pub fn floor_for(&self, mu: f64) -> f64 {
        self.boundary_floor.unwrap_or_else(|| (5.0 * mu).clamp(1e-9, 1e-3))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LongRun {
    pub regime: Regime,
    /// Time average of the cooperator share over the tail (trapezoidal).
    pub f_c: f64,
    pub tail_mean: SimplexState,
    pub final_state: SimplexState,
    /// Max-norm distance of tail samples from the final state.
    pub tail_variation: f64,
    /// Peak-to-peak range of `x` in the first and second half of the tail.
    pub amplitude: [f64; 2],
    /// Strategies that stayed below the boundary floor throughout the tail.
    pub extinct: [bool; 3],
}

#[derive(Debug, Clone, Copy)]
struct WindowStats {
    range: f64,
    turns: usize,
}

fn window_stats(xs: &[f64]) -> WindowStats {
    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = if xs.is_empty() { 0.0 } else { hi - lo };
    // sign changes of the increments, ignoring round-off sized wiggles
    let eps = 1e-3 * range;
    let mut turns = 0;
    let mut last_sign = 0i8;
    for w in xs.windows(2) {
        let d = w[1] - w[0];
        let sign = if d > eps {
            1
        } else if d < -eps {
            -1
        } else {
            0
        };
        if sign != 0 {
            if last_sign != 0 && sign != last_sign {
                turns += 1;
            }
            last_sign = sign;
        }
    }
    WindowStats { range, turns }
}

/// Label the tail of `traj` and estimate the long-run cooperator share.
///
/// Checks run in order: extinction of a strategy, settling, then sustained
/// oscillation of `x`. Anything else is reported as inconclusive.
pub fn classify_long_run(traj: &Trajectory, controls: &ClassifyControls) -> Result<LongRun> {
    if !(controls.tail_fraction > 0.0 && controls.tail_fraction <= 1.0) {
        return Err(Error::Precondition(format!(
            "tail fraction must lie in (0, 1], got {}",
            controls.tail_fraction
        )));
    }
    let t_end = traj.t_max();
    let t_start = t_end * (1.0 - controls.tail_fraction);
    let first = traj.times.partition_point(|&t| t < t_start);
    let times = &traj.times[first..];
    let states = &traj.states[first..];
    if times.len() < 3 || t_end <= times[0] {
        return Err(Error::TrajectoryTooShort(format!(
            "{} samples in the tail window [{t_start}, {t_end}]",
            times.len()
        )));
    }

    let span = t_end - times[0];
    let mut mean = [0.0; 3];
    for i in 0..times.len() - 1 {
        let dt = times[i + 1] - times[i];
        let (a, b) = (states[i].as_array(), states[i + 1].as_array());
        for k in 0..3 {
            mean[k] += 0.5 * (a[k] + b[k]) * dt;
        }
    }
    let mean = mean.map(|v| v / span);
    let tail_mean = SimplexState::project(mean).expect("tail mean lies on the simplex");
    let f_c = tail_mean.x().clamp(0.0, 1.0);

    let final_state = *states.last().expect("non-empty tail");
    let tail_variation = states.iter().map(|s| s.distance(&final_state)).fold(0.0, f64::max);

    let floor = controls.floor_for(traj.params.mu());
    let mut extinct = [true; 3];
    for s in states {
        for (k, v) in s.as_array().iter().enumerate() {
            if *v >= floor {
                extinct[k] = false;
            }
        }
    }

    let xs: Vec<f64> = states.iter().map(|s| s.x()).collect();
    let t_mid = 0.5 * (times[0] + t_end);
    let split = times.partition_point(|&t| t < t_mid);
    let early = window_stats(&xs[..split]);
    let late = window_stats(&xs[split..]);

    let oscillating = late.range > controls.min_amplitude
        && late.range >= controls.decay_ratio * early.range
        && early.turns >= 2
        && late.turns >= 2;

    let regime = if extinct.iter().any(|&e| e) {
        Regime::BoundaryAbsorbed
    } else if tail_variation < controls.fixed_tol {
        Regime::FixedPoint
    } else if oscillating {
        Regime::CycleOrHeteroclinic
    } else {
        Regime::Inconclusive
    };

    Ok(LongRun {
        regime,
        f_c,
        tail_mean,
        final_state,
        tail_variation,
        amplitude: [early.range, late.range],
        extinct,
    })
}
