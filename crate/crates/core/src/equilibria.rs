//! Stationary points of the mutation-free dynamics, their linear stability,
//! and invasion structure along the three edges of the simplex.
//!
//! All analysis here is for `mu = 0`; a nonzero mutation rate in the
//! parameters is ignored.

use std::fmt;

use serde::Serialize;

use crate::dynamics::field_raw;
use crate::error::{Error, Result};
use crate::game::{participant_payoffs_raw, GameParams, SimplexState};

/// Real parts within this distance of zero count as nonhyperbolic.
pub const HYPERBOLIC_THRESHOLD: f64 = 1e-7;
/// Edge endpoint derivatives within this distance of zero are flagged.
pub const EDGE_DEGENERACY: f64 = 1e-10;
/// Interior roots closer than this (max-norm) are the same point.
pub const DEDUP_RADIUS: f64 = 1e-8;

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_MAX_HALVINGS: usize = 40;
const NEWTON_TOL: f64 = 1e-14;
const INTERIOR_MARGIN: f64 = 1e-10;
const EDGE_SCAN_POINTS: usize = 2000;

fn zero_mutation(params: &GameParams) -> GameParams {
    params.with_mu(0.0).expect("mu = 0 is always valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Edge {
    CD,
    CN,
    DN,
}

impl Edge {
    pub const ALL: [Edge; 3] = [Edge::CD, Edge::CN, Edge::DN];

    pub fn as_str(&self) -> &'static str {
        match self {
            Edge::CD => "CD",
            Edge::CN => "CN",
            Edge::DN => "DN",
        }
    }

    /// Strategies at `s = 1` and `s = 0`.
    pub fn vertices(&self) -> (Strategy, Strategy) {
        match self {
            Edge::CD => (Strategy::C, Strategy::D),
            Edge::CN => (Strategy::C, Strategy::N),
            Edge::DN => (Strategy::D, Strategy::N),
        }
    }

    /// Point on the edge whose first-named strategy has share `s`.
    pub fn point(&self, s: f64) -> SimplexState {
        let raw = match self {
            Edge::CD => [s, 1.0 - s, 0.0],
            Edge::CN => [s, 0.0, 1.0 - s],
            Edge::DN => [0.0, s, 1.0 - s],
        };
        SimplexState::project(raw).expect("edge coordinate in [0, 1]")
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Strategy {
    C,
    D,
    N,
}

impl Strategy {
    fn name(&self) -> &'static str {
        match self {
            Strategy::C => "cooperation",
            Strategy::D => "defection",
            Strategy::N => "non_participation",
        }
    }
}

fn edge_rate_raw(params: &GameParams, edge: Edge, s: f64) -> f64 {
    let m = params.group_size() as i32;
    let r = params.enhancement();
    let (alpha, beta) = (params.alpha(), params.beta());
    match edge {
        Edge::CD => s * (1.0 - s) * (r / m as f64 - 1.0),
        Edge::CN => {
            let z = 1.0 - s;
            z * (1.0 - z.powi(m - 1)) * (s * (r - 1.0 - alpha - beta) + beta)
        }
        Edge::DN => {
            let z = 1.0 - s;
            z * (1.0 - z.powi(m - 1)) * (beta - s * (alpha + beta))
        }
    }
}

/// Rate of change of the first-named strategy's share along `edge`, where
/// `s` is that share.
///
/// * CD: `x (1 - x) (r/M - 1)`
/// * CN: `(1 - x) (1 - (1 - x)^(M-1)) (x (r - 1 - alpha - beta) + beta)`
/// * DN: `(1 - y) (1 - (1 - y)^(M-1)) (beta - y (alpha + beta))`
pub fn edge_dynamics(params: &GameParams, edge: Edge, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain {
            name: "s",
            value: s,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(edge_rate_raw(params, edge, s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EquilibriumKind {
    #[serde(rename = "vertex_C")]
    VertexC,
    #[serde(rename = "vertex_D")]
    VertexD,
    #[serde(rename = "vertex_N")]
    VertexN,
    #[serde(rename = "edge_DN")]
    EdgeDN,
    #[serde(rename = "edge_CN")]
    EdgeCN,
    #[serde(rename = "interior")]
    Interior,
}

impl EquilibriumKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EquilibriumKind::VertexC => "vertex_C",
            EquilibriumKind::VertexD => "vertex_D",
            EquilibriumKind::VertexN => "vertex_N",
            EquilibriumKind::EdgeDN => "edge_DN",
            EquilibriumKind::EdgeCN => "edge_CN",
            EquilibriumKind::Interior => "interior",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    Saddle,
    Nonhyperbolic,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Saddle => "saddle",
            Stability::Nonhyperbolic => "nonhyperbolic",
        }
    }

    fn from_real_parts(re: &[f64]) -> Self {
        if re.iter().any(|v| v.abs() <= HYPERBOLIC_THRESHOLD) {
            Stability::Nonhyperbolic
        } else if re.iter().all(|&v| v < 0.0) {
            Stability::Stable
        } else if re.iter().all(|&v| v > 0.0) {
            Stability::Unstable
        } else {
            Stability::Saddle
        }
    }
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Jacobian of `(dx/dt, dy/dt)` in the coordinates `(x, y)`, `z = 1 - x - y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedJacobian {
    pub matrix: [[f64; 2]; 2],
    /// `(re, im)` pairs.
    pub eigenvalues: [(f64, f64); 2],
}

impl ReducedJacobian {
    pub fn spectral_abscissa(&self) -> f64 {
        self.eigenvalues[0].0.max(self.eigenvalues[1].0)
    }

    pub fn stability(&self) -> Stability {
        Stability::from_real_parts(&[self.eigenvalues[0].0, self.eigenvalues[1].0])
    }
}

fn eigenvalues_2x2(m: &[[f64; 2]; 2]) -> [(f64, f64); 2] {
    let half_trace = 0.5 * (m[0][0] + m[1][1]);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = half_trace * half_trace - det;
    if disc >= 0.0 {
        let root = disc.sqrt();
        [(half_trace + root, 0.0), (half_trace - root, 0.0)]
    } else {
        let root = (-disc).sqrt();
        [(half_trace, root), (half_trace, -root)]
    }
}

/// Central finite-difference Jacobian of the zero-mutation field restricted
/// to the simplex, with step `1e-6 * max(1, |coordinate|)`.
pub fn jacobian(params: &GameParams, state: &SimplexState) -> Result<ReducedJacobian> {
    let sum = state.x() + state.y() + state.z();
    if state.min_component() < 0.0 || (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState {
            x: state.x(),
            y: state.y(),
            z: state.z(),
            reason: "Jacobian needs a point on the simplex",
        });
    }
    let p = zero_mutation(params);
    let rhs = |x: f64, y: f64| {
        let v = field_raw(&p, [x, y, 1.0 - x - y]);
        [v[0], v[1]]
    };
    let base = [state.x(), state.y()];
    let mut matrix = [[0.0; 2]; 2];
    for j in 0..2 {
        let h = 1e-6 * base[j].abs().max(1.0);
        let mut plus = base;
        let mut minus = base;
        plus[j] += h;
        minus[j] -= h;
        let fp = rhs(plus[0], plus[1]);
        let fm = rhs(minus[0], minus[1]);
        for i in 0..2 {
            matrix[i][j] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    Ok(ReducedJacobian {
        matrix,
        eigenvalues: eigenvalues_2x2(&matrix),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibrium {
    pub location: SimplexState,
    pub kind: EquilibriumKind,
    pub eigenvalues: [(f64, f64); 2],
    pub stability: Stability,
    /// Max-norm of the zero-mutation field at `location`.
    pub residual: f64,
}

impl Equilibrium {
    fn at(params: &GameParams, location: SimplexState, kind: EquilibriumKind) -> Self {
        let jac = jacobian(params, &location).expect("location lies on the simplex");
        let residual = field_raw(&zero_mutation(params), location.as_array())
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        Self {
            location,
            kind,
            eigenvalues: jac.eigenvalues,
            stability: jac.stability(),
            residual,
        }
    }

    pub fn spectral_abscissa(&self) -> f64 {
        self.eigenvalues[0].0.max(self.eigenvalues[1].0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SeedOutcome {
    Converged { root: [f64; 3], iterations: usize },
    /// Converged to a root outside the open simplex.
    Exterior { root: [f64; 3], iterations: usize },
    NoDescent { iterations: usize, residual: f64 },
    SingularJacobian { iterations: usize },
    IterationLimit { residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeedReport {
    pub seed: SimplexState,
    pub outcome: SeedOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryPoints {
    pub equilibria: Vec<Equilibrium>,
    pub newton: Vec<SeedReport>,
}

impl StationaryPoints {
    pub fn interior(&self) -> Option<&Equilibrium> {
        self.equilibria.iter().find(|e| e.kind == EquilibriumKind::Interior)
    }

    pub fn of_kind(&self, kind: EquilibriumKind) -> Option<&Equilibrium> {
        self.equilibria.iter().find(|e| e.kind == kind)
    }
}

/// Seven interior starting points: the barycentre, the midpoints between it
/// and each vertex, and the midpoints between it and each edge midpoint.
pub fn newton_seeds() -> Vec<SimplexState> {
    let b = 1.0 / 3.0;
    let mut seeds = vec![SimplexState::BARYCENTER];
    for k in 0..3 {
        let mut v = [0.0; 3];
        v[k] = 1.0;
        seeds.push(SimplexState::project([0.5 * (b + v[0]), 0.5 * (b + v[1]), 0.5 * (b + v[2])]).unwrap());
    }
    for k in 0..3 {
        let mut m = [0.5; 3];
        m[k] = 0.0;
        seeds.push(SimplexState::project([0.5 * (b + m[0]), 0.5 * (b + m[1]), 0.5 * (b + m[2])]).unwrap());
    }
    seeds
}

/// `(pi_c - pi_d, pi_d - alpha)`; zero exactly where all three payoffs agree.
fn interior_residual(params: &GameParams, x: f64, y: f64) -> [f64; 2] {
    let (pi_c, pi_d) = participant_payoffs_raw(params, x, 1.0 - x - y);
    [pi_c - pi_d, pi_d - params.alpha()]
}

fn max_norm(v: &[f64; 2]) -> f64 {
    v[0].abs().max(v[1].abs())
}

fn newton_interior(params: &GameParams, seed: &SimplexState) -> SeedOutcome {
    let mut p = [seed.x(), seed.y()];
    let mut res = interior_residual(params, p[0], p[1]);
    for iter in 0..NEWTON_MAX_ITER {
        let norm = max_norm(&res);
        if norm <= NEWTON_TOL {
            let root = [p[0], p[1], 1.0 - p[0] - p[1]];
            return if root.iter().all(|&c| c > INTERIOR_MARGIN) {
                SeedOutcome::Converged { root, iterations: iter }
            } else {
                SeedOutcome::Exterior { root, iterations: iter }
            };
        }
        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let h = 1e-7;
            let mut plus = p;
            let mut minus = p;
            plus[j] += h;
            minus[j] -= h;
            let fp = interior_residual(params, plus[0], plus[1]);
            let fm = interior_residual(params, minus[0], minus[1]);
            for i in 0..2 {
                jac[i][j] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let scale = jac.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        if !(det.abs() > 1e-14 * scale * scale) {
            return SeedOutcome::SingularJacobian { iterations: iter };
        }
        let step = [
            (jac[1][1] * res[0] - jac[0][1] * res[1]) / det,
            (jac[0][0] * res[1] - jac[1][0] * res[0]) / det,
        ];
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=NEWTON_MAX_HALVINGS {
            let trial = [p[0] - lambda * step[0], p[1] - lambda * step[1]];
            let trial_res = interior_residual(params, trial[0], trial[1]);
            if max_norm(&trial_res) < norm {
                accepted = Some((trial, trial_res));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((trial, trial_res)) => {
                p = trial;
                res = trial_res;
            }
            None => {
                // a full step that cannot reduce the residual further means
                // we are at round-off level
                if norm <= 1e-12 {
                    return newton_finish(p, iter);
                }
                return SeedOutcome::NoDescent {
                    iterations: iter,
                    residual: norm,
                };
            }
        }
    }
    let norm = max_norm(&res);
    if norm <= 1e-12 {
        return newton_finish(p, NEWTON_MAX_ITER);
    }
    SeedOutcome::IterationLimit { residual: norm }
}

fn newton_finish(p: [f64; 2], iterations: usize) -> SeedOutcome {
    let root = [p[0], p[1], 1.0 - p[0] - p[1]];
    if root.iter().all(|&c| c > INTERIOR_MARGIN) {
        SeedOutcome::Converged { root, iterations }
    } else {
        SeedOutcome::Exterior { root, iterations }
    }
}

/// `(0, beta/(alpha+beta), alpha/(alpha+beta))`, present when `alpha beta > 0`.
pub fn closed_form_dn(params: &GameParams) -> Option<SimplexState> {
    let (a, b) = (params.alpha(), params.beta());
    (a * b > 0.0).then(|| SimplexState::project([0.0, b / (a + b), a / (a + b)]).unwrap())
}

/// `(beta/(1-r+alpha+beta), 0, (1-r+alpha)/(1-r+alpha+beta))`, present when
/// the cooperator share lands strictly inside `(0, 1)`.
pub fn closed_form_cn(params: &GameParams) -> Option<SimplexState> {
    let (a, b) = (params.alpha(), params.beta());
    let denom = 1.0 - params.enhancement() + a + b;
    if denom == 0.0 {
        return None;
    }
    let x = b / denom;
    (x > 0.0 && x < 1.0).then(|| SimplexState::project([x, 0.0, (1.0 - params.enhancement() + a) / denom]).unwrap())
}

/// All stationary points of the zero-mutation dynamics: the three vertices,
/// the edge points that exist for these parameters, and every interior root
/// reached by damped Newton from [`newton_seeds`].
pub fn stationary_points(params: &GameParams) -> StationaryPoints {
    let p = zero_mutation(params);
    let mut equilibria = vec![
        Equilibrium::at(&p, SimplexState::COOPERATORS, EquilibriumKind::VertexC),
        Equilibrium::at(&p, SimplexState::DEFECTORS, EquilibriumKind::VertexD),
        Equilibrium::at(&p, SimplexState::NON_PARTICIPANTS, EquilibriumKind::VertexN),
    ];
    if let Some(loc) = closed_form_dn(&p) {
        equilibria.push(Equilibrium::at(&p, loc, EquilibriumKind::EdgeDN));
    }
    if let Some(loc) = closed_form_cn(&p) {
        equilibria.push(Equilibrium::at(&p, loc, EquilibriumKind::EdgeCN));
    }

    let mut newton = Vec::new();
    let mut interior: Vec<SimplexState> = Vec::new();
    for seed in newton_seeds() {
        let outcome = newton_interior(&p, &seed);
        if let SeedOutcome::Converged { root, .. } = outcome {
            let loc = SimplexState::project(root).expect("interior root");
            if !interior.iter().any(|q| q.distance(&loc) <= DEDUP_RADIUS) {
                interior.push(loc);
            }
        }
        newton.push(SeedReport { seed, outcome });
    }
    for loc in interior {
        equilibria.push(Equilibrium::at(&p, loc, EquilibriumKind::Interior));
    }
    StationaryPoints { equilibria, newton }
}

/// Roots of the edge rate strictly inside `(0, 1)`, by sign scan and
/// bisection. Independent of the closed-form edge points.
pub fn edge_roots(params: &GameParams, edge: Edge) -> Vec<f64> {
    let f = |s: f64| edge_rate_raw(params, edge, s);
    let n = EDGE_SCAN_POINTS;
    let mut roots = Vec::new();
    let mut prev_s = 1.0 / n as f64;
    let mut prev = f(prev_s);
    if prev == 0.0 {
        roots.push(prev_s);
    }
    for i in 2..n {
        let s = i as f64 / n as f64;
        let v = f(s);
        if v == 0.0 {
            roots.push(s);
        } else if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
            roots.push(bisect(&f, prev_s, s, prev));
        }
        prev_s = s;
        prev = v;
    }
    roots
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let lo_positive = f_lo > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if (v > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Derivative at an endpoint where the rate vanishes: Richardson
/// extrapolation of the one-sided quotients `rate(h)/h`, which is exact for
/// the polynomial edge rates once enough levels are used.
fn endpoint_derivative(params: &GameParams, edge: Edge, at_one: bool) -> f64 {
    let levels = params.group_size() as usize + 3;
    let quotient = |h: f64| {
        if at_one {
            // d/ds at s = 1 from the left
            -edge_rate_raw(params, edge, 1.0 - h) / h
        } else {
            edge_rate_raw(params, edge, h) / h
        }
    };
    let mut table: Vec<f64> = Vec::with_capacity(levels);
    let mut h = 0.25;
    for k in 0..levels {
        let mut current = quotient(h);
        let mut factor = 2.0;
        for prev in table.iter_mut().take(k) {
            let next = (factor * current - *prev) / (factor - 1.0);
            *prev = current;
            current = next;
            factor *= 2.0;
        }
        table.push(current);
        h *= 0.5;
    }
    *table.last().unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeStability {
    Stable,
    Unstable,
    Nonhyperbolic,
}

impl EdgeStability {
    fn from_derivative(d: f64) -> Self {
        if d.abs() <= EDGE_DEGENERACY {
            EdgeStability::Nonhyperbolic
        } else if d < 0.0 {
            EdgeStability::Stable
        } else {
            EdgeStability::Unstable
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndpointState {
    pub vertex: Strategy,
    /// `d(rate)/ds` at the endpoint.
    pub derivative: f64,
    pub stability: EdgeStability,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeRoot {
    /// Share of the first-named strategy.
    pub s: f64,
    pub location: SimplexState,
    pub derivative: f64,
    pub stability: EdgeStability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeLabel {
    DefectionStable,
    CooperationStable,
    NonParticipationStable,
    MixedStable,
    Bistable,
    Nonhyperbolic,
}

impl EdgeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            EdgeLabel::DefectionStable => "defection_stable",
            EdgeLabel::CooperationStable => "cooperation_stable",
            EdgeLabel::NonParticipationStable => "non_participation_stable",
            EdgeLabel::MixedStable => "mixed_stable",
            EdgeLabel::Bistable => "bistable",
            EdgeLabel::Nonhyperbolic => "nonhyperbolic",
        }
    }

    fn single(s: Strategy) -> Self {
        match s {
            Strategy::C => EdgeLabel::CooperationStable,
            Strategy::D => EdgeLabel::DefectionStable,
            Strategy::N => EdgeLabel::NonParticipationStable,
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeReport {
    pub edge: Edge,
    pub label: EdgeLabel,
    /// First-named vertex (`s = 1`), then the second (`s = 0`).
    pub boundary_states: [EndpointState; 2],
    pub interior_root: Option<EdgeRoot>,
    /// Set when an endpoint derivative is within `1e-10` of zero.
    pub nonhyperbolic: bool,
    pub direction_summary: String,
}

fn edge_report(params: &GameParams, edge: Edge) -> EdgeReport {
    let (first, second) = edge.vertices();
    let d_one = endpoint_derivative(params, edge, true);
    let d_zero = endpoint_derivative(params, edge, false);
    let boundary_states = [
        EndpointState {
            vertex: first,
            derivative: d_one,
            stability: EdgeStability::from_derivative(d_one),
        },
        EndpointState {
            vertex: second,
            derivative: d_zero,
            stability: EdgeStability::from_derivative(d_zero),
        },
    ];

    let interior_root = edge_roots(params, edge).first().map(|&s| {
        let h = 1e-6;
        let d = (edge_rate_raw(params, edge, s + h) - edge_rate_raw(params, edge, s - h)) / (2.0 * h);
        EdgeRoot {
            s,
            location: edge.point(s),
            derivative: d,
            stability: EdgeStability::from_derivative(d),
        }
    });

    let nonhyperbolic = boundary_states.iter().any(|b| b.stability == EdgeStability::Nonhyperbolic);
    let stable = |k: usize| boundary_states[k].stability == EdgeStability::Stable;
    let label = if nonhyperbolic {
        EdgeLabel::Nonhyperbolic
    } else {
        match (stable(0), stable(1)) {
            (true, true) => EdgeLabel::Bistable,
            (true, false) => EdgeLabel::single(first),
            (false, true) => EdgeLabel::single(second),
            (false, false) => EdgeLabel::MixedStable,
        }
    };

    let describe = |b: &EndpointState, other: Strategy| match b.stability {
        EdgeStability::Stable => format!("{} resists {}", b.vertex.name(), other.name()),
        EdgeStability::Unstable => format!("{} invades {}", other.name(), b.vertex.name()),
        EdgeStability::Nonhyperbolic => format!("{} is neutral to first order against {}", b.vertex.name(), other.name()),
    };
    let mut summary = format!(
        "{}; {}",
        describe(&boundary_states[0], second),
        describe(&boundary_states[1], first)
    );
    if let Some(root) = &interior_root {
        let kind = match root.stability {
            EdgeStability::Stable => "stable",
            EdgeStability::Unstable => "unstable",
            EdgeStability::Nonhyperbolic => "degenerate",
        };
        summary.push_str(&format!(
            "; {kind} mixed point with {} share {:.6}",
            second.name(),
            1.0 - root.s
        ));
        if label == EdgeLabel::MixedStable && 1.0 - root.s > 0.5 {
            summary.push_str(&format!(" ({} dominant)", second.name()));
        } else if label == EdgeLabel::MixedStable && root.s > 0.5 {
            summary.push_str(&format!(" ({} dominant)", first.name()));
        }
    }

    EdgeReport {
        edge,
        label,
        boundary_states,
        interior_root,
        nonhyperbolic,
        direction_summary: summary,
    }
}

/// Invasion structure of the three two-strategy edges, in the order CD, CN, DN.
pub fn invasion_map(params: &GameParams) -> [EdgeReport; 3] {
    let p = zero_mutation(params);
    Edge::ALL.map(|edge| edge_report(&p, edge))
}

/// JSON array of `{location, kind, eigenvalues, stability}` objects.
pub fn equilibria_json(points: &[Equilibrium]) -> serde_json::Value {
    serde_json::Value::Array(
        points
            .iter()
            .map(|e| {
                serde_json::json!({
                    "location": e.location.as_array(),
                    "kind": e.kind.as_str(),
                    "eigenvalues": e.eigenvalues.iter().map(|&(re, im)| [re, im]).collect::<Vec<_>>(),
                    "stability": e.stability.as_str(),
                })
            })
            .collect(),
    )
}

/// JSON array of `{edge, label, interior_root, ...}` objects.
pub fn edge_reports_json(reports: &[EdgeReport]) -> serde_json::Value {
    serde_json::Value::Array(
        reports
            .iter()
            .map(|r| {
                serde_json::json!({
                    "edge": r.edge.as_str(),
                    "label": r.label.as_str(),
                    "interior_root": r.interior_root.map(|root| serde_json::json!({
                        "s": root.s,
                        "location": root.location.as_array(),
                        "stability": root.stability,
                    })),
                    "boundary_states": r.boundary_states,
                    "nonhyperbolic": r.nonhyperbolic,
                    "direction_summary": r.direction_summary,
                })
            })
            .collect(),
    )
}
