//! Dormand–Prince 5(4) for autonomous systems with step-size control, continuous extension for
//! output sampling, and a projection hook applied after every accepted step.

use std::io::Write;

use serde::Serialize;

use crate::dynamics::field_raw;
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::game::{GameParams, SimplexState};

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights are the last row of A (FSAL)
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;

/// When to record output samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleCadence {
    /// Every accepted step.
    EveryStep,
    /// Uniform grid `0, dt, 2 dt, ...`, filled in by dense output.
    Interval(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrationControls {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub initial_step: Option<f64>,
    pub max_steps: u64,
    pub cadence: SampleCadence,
}

impl Default for IntegrationControls {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: 50.0,
            initial_step: None,
            max_steps: 50_000_000,
            cadence: SampleCadence::Interval(0.5),
        }
    }
}

impl IntegrationControls {
    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_cadence(mut self, cadence: SampleCadence) -> Self {
        self.cadence = cadence;
        self
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Precondition(format!("{name} must be positive, got {v}")))
            }
        };
        positive("rel_tol", self.rel_tol)?;
        positive("abs_tol", self.abs_tol)?;
        positive("max_step", self.max_step)?;
        if let Some(h) = self.initial_step {
            positive("initial_step", h)?;
        }
        if let SampleCadence::Interval(dt) = self.cadence {
            positive("sample interval", dt)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct IntegrationStats {
    pub accepted: u64,
    pub rejected: u64,
    pub evaluations: u64,
    /// Smallest component seen in an accepted step before projection.
    pub min_raw_component: f64,
}

/// Output of a generic run: sample times and states.
#[derive(Debug, Clone)]
pub struct OdeSamples<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub stats: IntegrationStats,
}

#[derive(Debug)]
pub enum OdeFailure {
    StepSizeUnderflow { t: f64, h: f64 },
    StepLimit { t: f64 },
}

fn error_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], c: &IntegrationControls) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let scale = c.abs_tol + c.rel_tol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / scale).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Integrate `dy/dt = rhs(y)` from `t = 0` to `t_max`.
///
/// `project` runs on every accepted state and every interpolated sample.
/// On failure the samples recorded so far are returned alongside the cause.
pub fn integrate_with<const N: usize, F, P>(
    rhs: F,
    y0: [f64; N],
    t_max: f64,
    controls: &IntegrationControls,
    project: P,
) -> std::result::Result<OdeSamples<N>, (OdeSamples<N>, OdeFailure)>
where
    F: Fn(&[f64; N]) -> [f64; N],
    P: Fn(&mut [f64; N]),
{
    let mut out = OdeSamples {
        times: vec![0.0],
        states: vec![y0],
        stats: IntegrationStats {
            min_raw_component: y0.iter().copied().fold(f64::INFINITY, f64::min),
            ..Default::default()
        },
    };
    let mut t = 0.0;
    let mut y = y0;
    let mut k = [[0.0; N]; 7];
    k[0] = rhs(&y);
    out.stats.evaluations = 1;

    let mut h = match controls.initial_step {
        Some(h) => h,
        None => {
            let scale: Vec<f64> = y.iter().map(|v| controls.abs_tol + controls.rel_tol * v.abs()).collect();
            let d0 = (y.iter().zip(&scale).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / N as f64).sqrt();
            let d1 = (k[0].iter().zip(&scale).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / N as f64).sqrt();
            if d0 < 1e-5 || d1 < 1e-5 {
                1e-6
            } else {
                0.01 * d0 / d1
            }
        }
    }
    .min(controls.max_step)
    .min(t_max);

    let mut next_sample = 1u64;
    let mut reject_streak = false;

    while t < t_max {
        if out.stats.accepted + out.stats.rejected >= controls.max_steps {
            return Err((out, OdeFailure::StepLimit { t }));
        }
        let last = t + h >= t_max;
        if last {
            h = t_max - t;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err((out, OdeFailure::StepSizeUnderflow { t, h }));
        }

        for stage in 1..7 {
            let mut ys = y;
            for (i, v) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for j in 0..stage {
                    acc += A[stage][j] * k[j][i];
                }
                *v += h * acc;
            }
            k[stage] = rhs(&ys);
        }
        out.stats.evaluations += 6;

        let mut y_new = y;
        let mut err = [0.0; N];
        for i in 0..N {
            let mut acc = 0.0;
            let mut e = 0.0;
            for j in 0..7 {
                if j < 6 {
                    acc += A[6][j] * k[j][i];
                }
                e += E[j] * k[j][i];
            }
            y_new[i] += h * acc;
            err[i] = h * e;
        }
        // y_new equals the stage-7 argument, so k[6] = rhs(y_new)
        let norm = error_norm(&err, &y, &y_new, controls);
        let factor = if norm == 0.0 {
            MAX_FACTOR
        } else if !norm.is_finite() {
            MIN_FACTOR
        } else {
            (SAFETY * norm.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
        };

        if !(norm <= 1.0) {
            out.stats.rejected += 1;
            h *= factor.min(1.0);
            reject_streak = true;
            continue;
        }

        out.stats.accepted += 1;
        let t_new = if last { t_max } else { t + h };
        out.stats.min_raw_component = y_new.iter().copied().fold(out.stats.min_raw_component, f64::min);

        if let SampleCadence::Interval(dt) = controls.cadence {
            let dense = dense_coefficients(&y, &y_new, &k, h);
            loop {
                let ts = next_sample as f64 * dt;
                if ts >= t_new || ts >= t_max {
                    break;
                }
                let theta = (ts - t) / h;
                let mut ys = [0.0; N];
                for i in 0..N {
                    let [c0, c1, c2, c3, c4] = dense[i];
                    ys[i] = c0 + theta * (c1 + (1.0 - theta) * (c2 + theta * (c3 + (1.0 - theta) * c4)));
                }
                project(&mut ys);
                out.times.push(ts);
                out.states.push(ys);
                next_sample += 1;
            }
        }

        let raw = y_new;
        project(&mut y_new);
        let moved = raw.iter().zip(&y_new).any(|(a, b)| (a - b).abs() > 1e-14);
        k[0] = if moved {
            out.stats.evaluations += 1;
            rhs(&y_new)
        } else {
            k[6]
        };
        y = y_new;
        t = t_new;

        if matches!(controls.cadence, SampleCadence::EveryStep) || t >= t_max {
            out.times.push(t);
            out.states.push(y);
        }

        let grow = if reject_streak { factor.min(1.0) } else { factor };
        reject_streak = false;
        h = (h * grow).min(controls.max_step);
    }
    Ok(out)
}

fn dense_coefficients<const N: usize>(y0: &[f64; N], y1: &[f64; N], k: &[[f64; N]; 7], h: f64) -> [[f64; 5]; N] {
    let mut out = [[0.0; 5]; N];
    for i in 0..N {
        let diff = y1[i] - y0[i];
        let bspl = h * k[0][i] - diff;
        let mut d = 0.0;
        for j in 0..7 {
            d += D[j] * k[j][i];
        }
        out[i] = [y0[i], diff, bspl, diff - h * k[6][i] - bspl, h * d];
    }
    out
}

/// Solution of the replicator-mutator equations sampled in time.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SimplexState>,
    pub params: GameParams,
    pub stats: IntegrationStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_max(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn final_state(&self) -> SimplexState {
        *self.states.last().expect("trajectory holds the initial state")
    }

    /// CSV with header `t,x,y,z`, 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x,y,z")?;
        for (t, s) in self.times.iter().zip(&self.states) {
            writeln!(w, "{},{},{},{}", fmt_f64(*t), fmt_f64(s.x()), fmt_f64(s.y()), fmt_f64(s.z()))?;
        }
        Ok(())
    }

    fn from_samples(params: GameParams, samples: OdeSamples<3>) -> Self {
        let states = samples
            .states
            .iter()
            .map(|s| SimplexState::project(*s).expect("projected samples stay on the simplex"))
            .collect();
        Self {
            times: samples.times,
            states,
            params,
            stats: samples.stats,
        }
    }
}

fn project_simplex(s: &mut [f64; 3]) {
    for v in s.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let sum = s[0] + s[1] + s[2];
    if sum > 0.0 && sum != 1.0 {
        for v in s.iter_mut() {
            *v /= sum;
        }
    }
}

/// Integrate the replicator-mutator equations from `initial` to `t_max`.
pub fn integrate(
    params: &GameParams,
    initial: &SimplexState,
    t_max: f64,
    controls: &IntegrationControls,
) -> Result<Trajectory> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Precondition(format!("t_max must be positive, got {t_max}")));
    }
    controls.validate()?;
    let p = *params;
    match integrate_with(|s| field_raw(&p, *s), initial.as_array(), t_max, controls, project_simplex) {
        Ok(samples) => Ok(Trajectory::from_samples(p, samples)),
        Err((samples, OdeFailure::StepSizeUnderflow { t, h })) => Err(Error::StepSizeUnderflow {
            t,
            h,
            partial: Box::new(Trajectory::from_samples(p, samples)),
        }),
        Err((samples, OdeFailure::StepLimit { t })) => Err(Error::StepLimit {
            t,
            partial: Box::new(Trajectory::from_samples(p, samples)),
        }),
    }
}
