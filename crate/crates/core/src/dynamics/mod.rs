//! Replicator-mutator dynamics on the strategy simplex.

mod classify;
mod hamiltonian;
mod integrate;

pub use classify::{classify_long_run, ClassifyControls, LongRun, Regime};
pub use hamiltonian::{anti_derivative_u, anti_derivative_w, hamiltonian, HamiltonianValue};
pub use integrate::{
    integrate, integrate_with, IntegrationControls, IntegrationStats, SampleCadence, Trajectory,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{gap_raw, participant_payoffs_raw, GameParams, SimplexState};

/// Rates `(dx/dt, dy/dt, dz/dt)` of the replicator-mutator equations.
pub fn vector_field(params: &GameParams, state: &SimplexState) -> [f64; 3] {
    field_raw(params, state.as_array())
}

/// Same as [`vector_field`] for an unchecked point. The payoffs are
/// polynomials, so the field extends smoothly past the simplex faces.
pub(crate) fn field_raw(params: &GameParams, s: [f64; 3]) -> [f64; 3] {
    let [x, y, z] = s;
    let (pi_c, pi_d) = participant_payoffs_raw(params, x, z);
    let pi_n = params.alpha();
    let mean = x * pi_c + y * pi_d + z * pi_n;
    let mu = params.mu();
    if mu == 0.0 {
        [x * (pi_c - mean), y * (pi_d - mean), z * (pi_n - mean)]
    } else {
        [
            x * (pi_c - mean) - mu * x + mu * (1.0 - x) / 2.0,
            y * (pi_d - mean) - mu * y + mu * (1.0 - y) / 2.0,
            z * (pi_n - mean) - mu * z + mu * (1.0 - z) / 2.0,
        ]
    }
}

/// Cooperator share among participants `f = x / (x + y)` and loner share `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedState {
    pub f: f64,
    pub z: f64,
}

impl ReducedState {
    pub fn new(f: f64, z: f64) -> Result<Self> {
        for (name, value) in [("f", f), ("z", z)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Domain {
                    name,
                    value,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        Ok(Self { f, z })
    }

    /// `None` when there are no participants.
    pub fn from_state(state: &SimplexState) -> Option<Self> {
        let participants = state.x() + state.y();
        (participants > 0.0).then(|| Self {
            f: state.x() / participants,
            z: state.z(),
        })
    }

    pub fn to_state(&self) -> SimplexState {
        let participants = 1.0 - self.z;
        SimplexState::project([self.f * participants, (1.0 - self.f) * participants, self.z])
            .expect("reduced state maps onto the simplex")
    }

    fn is_interior(&self) -> bool {
        self.f > 0.0 && self.f < 1.0 && self.z > 0.0 && self.z < 1.0
    }
}

/// Dynamics in `(f, z)` at zero mutation:
///
/// `df/dt = -f (1 - f) G(z)`,
/// `dz/dt = z (1 - z) (1 - z^(M-1)) (alpha - (r - 1) f - beta z / (1 - z))`.
pub fn reduced_field(params: &GameParams, rs: &ReducedState) -> Result<[f64; 2]> {
    if !rs.is_interior() {
        return Err(Error::Precondition(format!(
            "reduced field needs an interior point, got f = {}, z = {}",
            rs.f, rs.z
        )));
    }
    Ok(reduced_field_raw(params, rs.f, rs.z))
}

pub(crate) fn reduced_field_raw(params: &GameParams, f: f64, z: f64) -> [f64; 2] {
    let m = params.group_size() as i32;
    let r = params.enhancement();
    let df = -f * (1.0 - f) * gap_raw(params, z);
    let dz = z
        * (1.0 - z)
        * (1.0 - z.powi(m - 1))
        * (params.alpha() - (r - 1.0) * f - params.beta() * z / (1.0 - z));
    [df, dz]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn params(alpha: f64, beta: f64, mu: f64) -> GameParams {
        GameParams::new(5, 3.0, alpha, beta, mu).unwrap()
    }

    #[test]
    fn field_example() {
        let p = params(0.5, 0.2, 0.0);
        let s = SimplexState::new(0.3, 0.3, 0.4).unwrap();
        let [dx, dy, dz] = vector_field(&p, &s);
        assert_abs_diff_eq!(dx, 0.0648384, epsilon = 1e-13);
        assert_abs_diff_eq!(dy, 0.0832704, epsilon = 1e-13);
        assert_abs_diff_eq!(dz, -0.1481088, epsilon = 1e-13);
        assert!((dx + dy + dz).abs() <= 1e-14);
    }

    #[test]
    fn vertices_are_fixed_without_mutation() {
        let p = params(-0.4, 0.7, 0.0);
        for v in [SimplexState::COOPERATORS, SimplexState::DEFECTORS, SimplexState::NON_PARTICIPANTS] {
            assert_eq!(vector_field(&p, &v), [0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn mutation_flow_at_vertex() {
        let p = params(0.5, 0.2, 0.01);
        let [dx, dy, dz] = vector_field(&p, &SimplexState::COOPERATORS);
        assert_abs_diff_eq!(dx, -0.01, epsilon = 1e-16);
        assert_abs_diff_eq!(dy, 0.005, epsilon = 1e-16);
        assert_abs_diff_eq!(dz, 0.005, epsilon = 1e-16);
    }

    #[test]
    fn reduced_field_examples() {
        let p = params(0.5, 0.0, 0.0);
        let [df, _] = reduced_field(&p, &ReducedState::new(0.5, 0.4).unwrap()).unwrap();
        assert_abs_diff_eq!(df, -0.01536, epsilon = 1e-14);
        // f = alpha / (r - 1) is the nullcline of z at beta = 0
        let [_, dz] = reduced_field(&p, &ReducedState::new(0.25, 0.3).unwrap()).unwrap();
        assert_abs_diff_eq!(dz, 0.0, epsilon = 1e-16);
        assert!(reduced_field(&p, &ReducedState::new(0.0, 0.3).unwrap()).is_err());
        assert!(ReducedState::new(1.5, 0.3).is_err());
    }

    #[test]
    fn reduced_field_vanishes_on_gap_root() {
        let p = params(0.5, 0.2, 0.0);
        // bisect G on [0.4, 0.5]
        let (mut lo, mut hi) = (0.4, 0.5);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if gap_raw(&p, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let [df, _] = reduced_field(&p, &ReducedState::new(0.6, lo).unwrap()).unwrap();
        assert!(df.abs() < 1e-15);
    }

    #[test]
    fn reduced_field_is_the_projected_full_field() {
        // df/dt = (y dx - x dy) / (x + y)^2 and dz/dt match the full field
        let p = params(0.35, -0.4, 0.0);
        let s = SimplexState::new(0.2, 0.5, 0.3).unwrap();
        let [dx, dy, dz] = vector_field(&p, &s);
        let (x, y) = (s.x(), s.y());
        let df = (y * dx - x * dy) / (x + y).powi(2);
        let rs = ReducedState::from_state(&s).unwrap();
        let [rdf, rdz] = reduced_field(&p, &rs).unwrap();
        assert_abs_diff_eq!(rdf, df, epsilon = 1e-14);
        assert_abs_diff_eq!(rdz, dz, epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn rates_sum_to_zero(
            m in 3u32..9,
            r_frac in 0.01f64..0.99,
            alpha in -1.0f64..=1.0,
            beta in -1.0f64..=1.0,
            mu in prop_oneof![Just(0.0), 0.0f64..=1.0],
            a in 0.0f64..1.0,
            b in 0.0f64..1.0,
            c in 0.0f64..1.0,
        ) {
            let r = 1.0 + r_frac * (m as f64 - 1.0);
            let p = GameParams::new(m, r, alpha, beta, mu).unwrap();
            prop_assume!(a + b + c > 1e-9);
            let s = SimplexState::project([a, b, c]).unwrap();
            let [dx, dy, dz] = vector_field(&p, &s);
            prop_assert!((dx + dy + dz).abs() <= 1e-14, "sum = {}", dx + dy + dz);
        }

        #[test]
        fn faces_are_invariant_without_mutation(
            alpha in -1.0f64..=1.0,
            beta in -1.0f64..=1.0,
            s in 0.0f64..=1.0,
            face in 0usize..3,
        ) {
            let p = params(alpha, beta, 0.0);
            let mut raw = [s, 1.0 - s, 0.0];
            raw.rotate_right(face);
            let state = SimplexState::project(raw).unwrap();
            let rates = vector_field(&p, &state);
            let absent = (face + 2) % 3;
            prop_assert_eq!(state.as_array()[absent], 0.0);
            prop_assert_eq!(rates[absent], 0.0);
        }
    }
}
