//! Conserved quantity of the mutation-free dynamics at `beta = 0`.
//!
//! In `(f, z)` coordinates the field divided by `f (1 - f) z (1 - z) (1 - z^(M-1))`
//! is Hamiltonian with `H(f, z) = U(z) + W(f)`, where
//!
//! * `W(f) = alpha ln f + (r - 1 - alpha) ln(1 - f)`,
//! * `U'(z) = G(z) / (z (1 - z) (1 - z^(M-1)))`.
//!
//! `U'` has simple poles at both ends of `[0, 1]`. Splitting them off gives
//! `U(z) = a ln z + c ln(1 - z) + R(z)` with a smooth remainder `R`, which is
//! integrated by Gauss–Legendre quadrature from `z = 1/2`, so `U` is fixed up
//! to that reference point.

use std::sync::OnceLock;

use serde::Serialize;

use crate::dynamics::ReducedState;
use crate::error::{Error, Result};
use crate::game::GameParams;

const QUADRATURE_ORDER: usize = 32;
const REFERENCE_Z: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HamiltonianValue {
    pub h: f64,
    pub u: f64,
    pub w: f64,
}

/// Split of `U'` into pole parts and a polynomial ratio `p / q`.
struct SplitDerivative {
    log_z: f64,
    log_one_minus_z: f64,
    numerator: Vec<f64>,
    denominator: Vec<f64>,
}

impl SplitDerivative {
    fn new(params: &GameParams) -> Self {
        let m = params.group_size() as usize;
        let mf = m as f64;
        let r = params.enhancement();

        // G(z) = sum_k g_k z^k, degree M - 1
        let mut g = vec![-r / mf; m];
        g[0] += 1.0;
        g[m - 1] += r - 1.0;
        // G(1) = 0, so G = (1 - z) q with q_k = g_0 + ... + g_k
        let q: Vec<f64> = prefix_sums(&g[..m - 1]);
        // 1 - z^(M-1) = (1 - z) h with h = 1 + z + ... + z^(M-2)
        let h = vec![1.0; m - 1];
        // U' = q / (z (1 - z) h)
        let a = q[0];
        let b = q.iter().sum::<f64>() / (mf - 1.0);

        // q - a (1 - z^(M-1)) - b (z + ... + z^(M-1)) vanishes at 0 and 1
        let mut n = vec![0.0; m];
        n[..m - 1].copy_from_slice(&q);
        n[0] -= a;
        n[m - 1] += a;
        for c in n.iter_mut().skip(1) {
            *c -= b;
        }
        // divide by z, then by (1 - z)
        let numerator = prefix_sums(&n[1..m - 1]);

        Self {
            log_z: a,
            log_one_minus_z: -b,
            numerator,
            denominator: h,
        }
    }

    fn remainder_derivative(&self, z: f64) -> f64 {
        horner(&self.numerator, z) / horner(&self.denominator, z)
    }
}

fn prefix_sums(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0, |acc, c| {
            *acc += c;
            Some(*acc)
        })
        .collect()
}

fn horner(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * z + c)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = QUADRATURE_ORDER;
        (0..n)
            .map(|i| {
                let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                let mut dp = 0.0;
                for _ in 0..100 {
                    let (mut p0, mut p1) = (1.0, x);
                    for k in 2..=n {
                        let kf = k as f64;
                        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    })
}

fn check_preconditions(params: &GameParams) -> Result<()> {
    let r = params.enhancement();
    let m = params.group_size() as f64;
    if params.beta() != 0.0 {
        return Err(Error::Precondition(format!(
            "Hamiltonian form needs beta = 0, got {}",
            params.beta()
        )));
    }
    if params.mu() != 0.0 {
        return Err(Error::Precondition(format!(
            "Hamiltonian form needs mu = 0, got {}",
            params.mu()
        )));
    }
    if !(r > 2.0 && r < m) {
        return Err(Error::Precondition(format!("Hamiltonian form needs 2 < r < M, got r = {r}")));
    }
    if params.alpha() >= r - 1.0 {
        return Err(Error::Precondition(format!(
            "Hamiltonian form needs alpha < r - 1, got alpha = {}",
            params.alpha()
        )));
    }
    Ok(())
}

/// `U(z)`, normalised so that its smooth remainder vanishes at `z = 1/2`.
pub fn anti_derivative_u(params: &GameParams, z: f64) -> Result<f64> {
    check_preconditions(params)?;
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::Domain {
            name: "z",
            value: z,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let split = SplitDerivative::new(params);
    let half = 0.5 * (z - REFERENCE_Z);
    let mid = 0.5 * (z + REFERENCE_Z);
    let remainder: f64 = gauss_legendre()
        .iter()
        .map(|&(node, weight)| weight * split.remainder_derivative(mid + half * node))
        .sum::<f64>()
        * half;
    Ok(split.log_z * z.ln() + split.log_one_minus_z * (1.0 - z).ln() + remainder)
}

/// `W(f) = alpha ln f + (r - 1 - alpha) ln(1 - f)`.
pub fn anti_derivative_w(params: &GameParams, f: f64) -> Result<f64> {
    check_preconditions(params)?;
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::Domain {
            name: "f",
            value: f,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let alpha = params.alpha();
    Ok(alpha * f.ln() + (params.enhancement() - 1.0 - alpha) * (1.0 - f).ln())
}

pub fn hamiltonian(params: &GameParams, rs: &ReducedState) -> Result<HamiltonianValue> {
    let u = anti_derivative_u(params, rs.z)?;
    let w = anti_derivative_w(params, rs.f)?;
    Ok(HamiltonianValue { h: u + w, u, w })
}
