//! Expected payoffs of cooperators, defectors and non-participants.
//!
//! A focal player is placed in a group of `M` drawn from an infinite,
//! well-mixed population with composition `(x, y, z)`. Of the `M - 1`
//! co-players, `S - 1` choose to participate. Participants split the
//! enhanced contributions `r * m` and the combined influence `beta * (M - S)`
//! of the non-participants equally; a non-participant always earns `alpha`.
//! A participant left alone (`S = 1`) cannot play and earns `alpha` on top of
//! the shared influence.
//!
//! The closed forms below are written as polynomials in `z` so they stay
//! exact at `z = 1`, where the textbook ratio `(1 - z^M) / (1 - z)` is 0/0.

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on `x + y + z = 1` accepted from callers.
const SUM_TOLERANCE: f64 = 1e-9;

/// Parameters of the game. The contribution cost is fixed at one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GameParams {
    #[serde(rename = "M")]
    group_size: u32,
    #[serde(rename = "r")]
    enhancement: f64,
    alpha: f64,
    beta: f64,
    mu: f64,
    cost: f64,
}

impl GameParams {
    pub const COST: f64 = 1.0;

    pub fn new(group_size: u32, enhancement: f64, alpha: f64, beta: f64, mu: f64) -> Result<Self> {
        if group_size < 3 {
            return Err(Error::InvalidParameter {
                name: "M",
                value: group_size as f64,
                reason: "group size must be at least 3",
            });
        }
        if !(enhancement > 1.0 && enhancement < group_size as f64) {
            return Err(Error::InvalidParameter {
                name: "r",
                value: enhancement,
                reason: "enhancement factor must satisfy 1 < r < M",
            });
        }
        for (name, value) in [("alpha", alpha), ("beta", beta)] {
            if !(-1.0..=1.0).contains(&value) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must lie in [-1, 1]",
                });
            }
        }
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: mu,
                reason: "mutation rate must lie in [0, 1]",
            });
        }
        Ok(Self {
            group_size,
            enhancement,
            alpha,
            beta,
            mu,
            cost: Self::COST,
        })
    }

    pub fn group_size(&self) -> u32 {
        self.group_size
    }

    pub fn enhancement(&self) -> f64 {
        self.enhancement
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn with_alpha_beta(&self, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(self.group_size, self.enhancement, alpha, beta, self.mu)
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(self.group_size, self.enhancement, self.alpha, self.beta, mu)
    }
}

/// Population composition: cooperators `x`, defectors `y`, non-participants `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimplexState {
    x: f64,
    y: f64,
    z: f64,
}

impl SimplexState {
    pub const BARYCENTER: SimplexState = SimplexState {
        x: 1.0 / 3.0,
        y: 1.0 / 3.0,
        z: 1.0 / 3.0,
    };
    pub const COOPERATORS: SimplexState = SimplexState { x: 1.0, y: 0.0, z: 0.0 };
    pub const DEFECTORS: SimplexState = SimplexState { x: 0.0, y: 1.0, z: 0.0 };
    pub const NON_PARTICIPANTS: SimplexState = SimplexState { x: 0.0, y: 0.0, z: 1.0 };

    /// Checked constructor. Components must be non-negative and sum to one
    /// within `1e-9`; the stored state is renormalized.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let invalid = |reason| Error::InvalidState { x, y, z, reason };
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(invalid("components must be finite"));
        }
        if x < 0.0 || y < 0.0 || z < 0.0 {
            return Err(invalid("components must be non-negative"));
        }
        let sum = x + y + z;
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(invalid("components must sum to one"));
        }
        Ok(Self::renormalized(x, y, z, sum))
    }

    /// State with `z = 1 - x - y`.
    pub fn from_xy(x: f64, y: f64) -> Result<Self> {
        let z = 1.0 - x - y;
        // tolerate round-off such as 0.7 + 0.3
        Self::new(x, y, if z < 0.0 && z > -SUM_TOLERANCE { 0.0 } else { z })
    }

    /// Clamp negative components to zero and rescale onto the simplex.
    /// Returns `None` when nothing positive is left.
    pub fn project(raw: [f64; 3]) -> Option<Self> {
        let [x, y, z] = raw.map(|v| if v > 0.0 { v } else { 0.0 });
        let sum = x + y + z;
        if !(sum.is_finite() && sum > 0.0) {
            return None;
        }
        Some(Self::renormalized(x, y, z, sum))
    }

    fn renormalized(x: f64, y: f64, z: f64, sum: f64) -> Self {
        if sum == 1.0 {
            Self { x, y, z }
        } else {
            Self {
                x: x / sum,
                y: y / sum,
                z: z / sum,
            }
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn min_component(&self) -> f64 {
        self.x.min(self.y).min(self.z)
    }

    /// Max-norm distance between two states.
    pub fn distance(&self, other: &SimplexState) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }
}

/// Expected payoffs of the three strategies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayoffTriple {
    pub pi_c: f64,
    pub pi_d: f64,
    pub pi_n: f64,
}

impl PayoffTriple {
    pub fn max_abs_diff(&self, other: &PayoffTriple) -> f64 {
        (self.pi_c - other.pi_c)
            .abs()
            .max((self.pi_d - other.pi_d).abs())
            .max((self.pi_n - other.pi_n).abs())
    }
}

/// `sum_{k=lo}^{hi} z^k`
fn power_sum(z: f64, lo: u32, hi: u32) -> f64 {
    let mut acc = 0.0;
    let mut zk = z.powi(lo as i32);
    for _ in lo..=hi {
        acc += zk;
        zk *= z;
    }
    acc
}

/// `G(z)` without domain checks; also evaluated slightly outside `[0, 1]`
/// by the finite-difference Jacobian.
pub(crate) fn gap_raw(params: &GameParams, z: f64) -> f64 {
    let m = params.group_size;
    let r = params.enhancement;
    // (1 - z^M) / (1 - z) == 1 + z + ... + z^(M-1)
    let geometric = power_sum(z, 0, m - 1);
    1.0 + (r - 1.0) * z.powi(m as i32 - 1) - r / m as f64 * geometric
}

/// `(pi_c, pi_d)` as polynomials in `(x, z)`.
pub(crate) fn participant_payoffs_raw(params: &GameParams, x: f64, z: f64) -> (f64, f64) {
    let m = params.group_size;
    let mf = m as f64;
    let r = params.enhancement;
    // r x / (1 - z) * (1 - (1 - z^M) / (M (1 - z))) with the (1 - z) factors
    // cancelled: (r x / M) * sum_{j=0}^{M-2} (M - 1 - j) z^j
    let mut weighted = 0.0;
    let mut zj = 1.0;
    for j in 0..m - 1 {
        weighted += (mf - 1.0 - j as f64) * zj;
        zj *= z;
    }
    let public_good = r * x / mf * weighted;
    // beta * ((1 - z^M) / (1 - z) - 1)
    let influence = params.beta * power_sum(z, 1, m - 1);
    let pi_d = params.alpha * z.powi(m as i32 - 1) + public_good + influence;
    (pi_d - gap_raw(params, z), pi_d)
}

/// Payoff gap `pi_d - pi_c = G(z)`. Depends on `z` only.
pub fn payoff_gap(params: &GameParams, z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::Domain {
            name: "z",
            value: z,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(gap_raw(params, z))
}

/// Below this participant share every payoff is reported as `alpha`.
pub const NO_PARTICIPANTS: f64 = 1e-15;

fn all_alpha(params: &GameParams) -> PayoffTriple {
    PayoffTriple {
        pi_c: params.alpha,
        pi_d: params.alpha,
        pi_n: params.alpha,
    }
}

/// Closed-form expected payoffs.
///
/// A lone participant keeps `alpha` plus the influence of the `M - 1`
/// non-participants around it, so as `z -> 1` the participant payoffs tend
/// to `alpha + beta (M - 1)`. With no participants at all
/// (`x + y < NO_PARTICIPANTS`) they are moot and reported as `alpha`.
pub fn mean_payoffs(params: &GameParams, state: &SimplexState) -> PayoffTriple {
    if state.x + state.y < NO_PARTICIPANTS {
        return all_alpha(params);
    }
    let (pi_c, pi_d) = participant_payoffs_raw(params, state.x, state.z);
    PayoffTriple {
        pi_c,
        pi_d,
        pi_n: params.alpha,
    }
}

/// Population-average payoff `x pi_c + y pi_d + z pi_n`.
pub fn population_mean(state: &SimplexState, payoffs: &PayoffTriple) -> f64 {
    state.x * payoffs.pi_c + state.y * payoffs.pi_d + state.z * payoffs.pi_n
}

/// Exact expectation by enumerating every composition `(m_C, m_D, m_N)` of
/// the `M - 1` co-players with multinomial weights.
///
/// Shares no code with [`mean_payoffs`]; it is the reference the closed forms
/// are tested against.
pub fn brute_force_payoffs(params: &GameParams, state: &SimplexState) -> PayoffTriple {
    if state.x + state.y < NO_PARTICIPANTS {
        return all_alpha(params);
    }
    let m = params.group_size as usize;
    let r = params.enhancement;
    let others = m - 1;
    let (x, y, z) = (state.x, state.y, state.z);

    let binom = binomial_row(others);
    let mut pi_c = 0.0;
    let mut pi_d = 0.0;
    for n_coop in 0..=others {
        for n_def in 0..=(others - n_coop) {
            let n_non = others - n_coop - n_def;
            let weight = binom[others][n_coop]
                * binom[others - n_coop][n_def]
                * x.powi(n_coop as i32)
                * y.powi(n_def as i32)
                * z.powi(n_non as i32);
            if weight == 0.0 {
                continue;
            }
            let influence = params.beta * n_non as f64;
            let participants = 1 + n_coop + n_def;
            let (as_coop, as_def) = if participants == 1 {
                // nobody to play with: outside option plus the others' influence
                (params.alpha + influence, params.alpha + influence)
            } else {
                let s = participants as f64;
                let def = (r * n_coop as f64 + influence) / s;
                let coop = (r * (n_coop + 1) as f64 + influence) / s - GameParams::COST;
                (coop, def)
            };
            pi_c += weight * as_coop;
            pi_d += weight * as_def;
        }
    }
    PayoffTriple {
        pi_c,
        pi_d,
        pi_n: params.alpha,
    }
}

/// Pascal's triangle up to row `n`.
fn binomial_row(n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = vec![1.0; i + 1];
        for k in 1..i {
            row[k] = rows[i - 1][k - 1] + rows[i - 1][k];
        }
        rows.push(row);
    }
    rows
}
