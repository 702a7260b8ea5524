//! One line per headline criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use optpgg::dynamics::{
    classify_long_run, hamiltonian, integrate, vector_field, ClassifyControls, IntegrationControls, LongRun,
    ReducedState, Regime, SampleCadence,
};
use optpgg::equilibria::{
    edge_roots, invasion_map, stationary_points, Edge, EdgeLabel, EquilibriumKind,
};
use optpgg::sweep::{run_sweep, SweepConfig, SweepGrid};
use optpgg::{brute_force_payoffs, mean_payoffs, payoff_gap, GameParams, SimplexState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn params(alpha: f64, beta: f64, mu: f64) -> GameParams {
    GameParams::new(5, 3.0, alpha, beta, mu).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng) -> SimplexState {
    let e: [f64; 3] = std::array::from_fn(|_| -(1.0 - rng.gen::<f64>()).ln());
    SimplexState::project(e).unwrap()
}

fn random_game(rng: &mut ChaCha8Rng, mu: f64) -> GameParams {
    let m = rng.gen_range(3..=8u32);
    let r = 1.0 + (m as f64 - 1.0) * rng.gen_range(0.001..0.999);
    GameParams::new(m, r, rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0), mu).unwrap()
}

fn long_run(p: &GameParams, start: SimplexState, t_max: f64) -> LongRun {
    let traj = integrate(p, &start, t_max, &IntegrationControls::default()).unwrap();
    classify_long_run(&traj, &ClassifyControls::default()).unwrap()
}

fn fig1_sweep() -> SweepGrid {
    run_sweep(&SweepConfig::new(params(0.0, 0.0, 1e-8))).unwrap()
}

fn oracle_battery() -> (Outcome, Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let trials = 1000;
    let started = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_gap = 0.0f64;
    for _ in 0..trials {
        let p = random_game(&mut rng, 0.0);
        let s = random_state(&mut rng);
        let closed = mean_payoffs(&p, &s);
        worst = worst.max(closed.max_abs_diff(&brute_force_payoffs(&p, &s)));
        worst_gap = worst_gap.max(((closed.pi_d - closed.pi_c) - payoff_gap(&p, s.z()).unwrap()).abs());
    }
    let secs = started.elapsed().as_secs_f64();
    (
        outcome(
            worst <= 1e-10 && secs < 10.0,
            format!("{trials} cases, max deviation {worst:.2e}, {secs:.3} s"),
        ),
        outcome(worst_gap <= 1e-12, format!("{trials} cases, max gap deviation {worst_gap:.2e}")),
    )
}

fn regime_map(grid: &SweepGrid) -> Outcome {
    let step = grid.alphas[1] - grid.alphas[0];
    let survivors: Vec<_> = grid.survivors(0.01).collect();
    let outside: Vec<_> = survivors.iter().filter(|c| !(c.alpha > 0.0 && c.beta >= 0.0)).collect();
    let below: Vec<_> = survivors
        .iter()
        .filter(|c| c.alpha > 0.0 && c.beta >= 0.0 && c.alpha - c.beta <= -step - 1e-12)
        .map(|c| format!("({:.3}, {:.3}) F_C={:.4}", c.alpha, c.beta, c.f_c))
        .collect();
    let best = grid
        .cells
        .iter()
        .filter(|c| c.f_c.is_finite())
        .max_by(|a, b| a.f_c.total_cmp(&b.f_c))
        .unwrap();
    let best_ok = (best.alpha - 1.0).abs() <= 2.0 * step + 1e-12 && best.beta.abs() <= 2.0 * step + 1e-12;
    let errors = grid.cells.iter().filter(|c| c.regime == Regime::Error).count();
    outcome(
        outside.is_empty() && below.is_empty() && best_ok && errors == 0,
        format!(
            "{} survivors, {} outside alpha>0,beta>=0, {} more than one step below alpha>beta {:?}, max F_C {:.4} at ({}, {}), {} errors",
            survivors.len(),
            outside.len(),
            below.len(),
            below,
            best.f_c,
            best.alpha,
            best.beta,
            errors
        ),
    )
}

fn heteroclinic() -> Outcome {
    let p = params(0.5, 0.0, 0.0);
    let controls = IntegrationControls::default()
        .with_tolerances(1e-10, 1e-10)
        .with_cadence(SampleCadence::Interval(0.1));
    let traj = integrate(&p, &SimplexState::new(0.1, 0.1, 0.8).unwrap(), 1e4, &controls).unwrap();
    let xs: Vec<f64> = traj.states.iter().map(|s| s.x()).collect();
    let n = xs.len();
    let range = |w: &[f64]| w.iter().cloned().fold(f64::MIN, f64::max) - w.iter().cloned().fold(f64::MAX, f64::min);
    let (early, late) = (range(&xs[n / 2..3 * n / 4]), range(&xs[3 * n / 4..]));

    let h = |s: &SimplexState| hamiltonian(&p, &ReducedState::from_state(s).unwrap()).unwrap().h;
    let h0 = h(&traj.states[0]);
    let peaks: Vec<usize> = (1..n - 1).filter(|&i| xs[i] > xs[i - 1] && xs[i] >= xs[i + 1]).collect();
    let per_cycle = peaks
        .windows(2)
        .map(|w| (h(&traj.states[w[1]]) - h(&traj.states[w[0]])).abs() / h0.abs())
        .fold(0.0, f64::max);
    let ok = late >= 0.99 * early && late > 1e-3 && peaks.len() >= 10 && per_cycle <= 1e-6;
    outcome(
        ok,
        format!(
            "x range {early:.6} then {late:.6} over the final half, {} cycles, worst per-cycle H drift {per_cycle:.2e}",
            peaks.len().saturating_sub(1)
        ),
    )
}

fn coexistence() -> Outcome {
    let found = stationary_points(&params(0.5, 0.2, 0.0));
    let Some(e6) = found.interior() else {
        return outcome(false, "no interior equilibrium found".into());
    };
    let run = long_run(&params(0.5, 0.2, 1e-8), SimplexState::BARYCENTER, 2e4);
    let d = run.final_state.distance(&e6.location);
    outcome(
        e6.spectral_abscissa() < 0.0 && d <= 1e-6,
        format!(
            "E6 = ({:.6}, {:.6}, {:.6}), spectral abscissa {:.4e}, distance at t_max {d:.2e}",
            e6.location.x(),
            e6.location.y(),
            e6.location.z(),
            e6.spectral_abscissa()
        ),
    )
}

fn edge_equilibria() -> Outcome {
    let p4 = params(0.5, 0.2, 0.0);
    let e4 = stationary_points(&p4).of_kind(EquilibriumKind::EdgeDN).map(|e| e.location);
    let d4 = e4.map_or(f64::INFINITY, |l| l.distance(&SimplexState::new(0.0, 2.0 / 7.0, 5.0 / 7.0).unwrap()));
    let r4 = edge_roots(&p4, Edge::DN).first().map_or(f64::INFINITY, |s| (s - 2.0 / 7.0).abs());

    let p5 = params(0.5, -0.8, 0.0);
    let x5 = 0.8 / 2.3;
    let e5 = stationary_points(&p5).of_kind(EquilibriumKind::EdgeCN).map(|e| e.location);
    let d5 = e5.map_or(f64::INFINITY, |l| l.distance(&SimplexState::new(x5, 0.0, 1.0 - x5).unwrap()));
    let r5 = edge_roots(&p5, Edge::CN).first().map_or(f64::INFINITY, |s| (s - x5).abs());
    let worst = d4.max(r4).max(d5).max(r5);
    outcome(
        worst <= 1e-10,
        format!("E4 off by {:.1e}, E5 = ({:.9}, 0, {:.9}) off by {:.1e}", d4.max(r4), x5, 1.0 - x5, d5.max(r5)),
    )
}

fn taxonomy() -> Outcome {
    let mags = [0.1, 0.45, 0.95];
    let mut checked = 0;
    let mut wrong = Vec::new();
    for (sa, sb) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
        for &ma in &mags {
            for &mb in &mags {
                let (a, b) = (sa * ma, sb * mb);
                let [cd, cn, dn] = invasion_map(&params(a, b, 0.0));
                let want_cn = if b > 0.0 { EdgeLabel::CooperationStable } else { EdgeLabel::Bistable };
                let want_dn = match (a > 0.0, b > 0.0) {
                    (true, true) => EdgeLabel::MixedStable,
                    (false, true) => EdgeLabel::DefectionStable,
                    (true, false) => EdgeLabel::NonParticipationStable,
                    (false, false) => EdgeLabel::Bistable,
                };
                let dominance_ok = want_dn != EdgeLabel::MixedStable
                    || dn.direction_summary.contains("(non_participation dominant)") == (a > b);
                if cd.label != EdgeLabel::DefectionStable || cn.label != want_cn || dn.label != want_dn || !dominance_ok {
                    wrong.push(format!("({a}, {b}): {} {} {}", cd.label, cn.label, dn.label));
                }
                checked += 1;
            }
        }
    }
    outcome(wrong.is_empty(), format!("{checked} points, mismatches {wrong:?}"))
}

fn fig3() -> Outcome {
    let dn = long_run(&params(0.4, 0.9, 1e-8), SimplexState::BARYCENTER, 2e4);
    let dn_ok = dn.f_c <= 0.01 && dn.final_state.y() > 0.01 && dn.final_state.z() > 0.01;
    let n = long_run(&params(0.5, -0.8, 1e-8), SimplexState::BARYCENTER, 2e4);
    let n_ok = n.final_state.z() > 1.0 - 1e-6;
    let bi = params(-0.5, -0.8, 1e-8);
    let to_d = long_run(&bi, SimplexState::new(0.1, 0.6, 0.3).unwrap(), 2e4).final_state;
    let to_n = long_run(&bi, SimplexState::new(0.1, 0.2, 0.7).unwrap(), 2e4).final_state;
    let bi_ok = to_d.y() > 1.0 - 1e-6 && to_n.z() > 1.0 - 1e-6;
    let show = |s: &SimplexState| format!("({:.3e}, {:.6}, {:.6})", s.x(), s.y(), s.z());
    outcome(
        dn_ok && n_ok && bi_ok,
        format!(
            "(0.4, 0.9) F_C={:.2e} ends {}; (0.5, -0.8) ends {}; (-0.5, -0.8) ends {} and {}",
            dn.f_c,
            show(&dn.final_state),
            show(&n.final_state),
            show(&to_d),
            show(&to_n)
        ),
    )
}

fn mutation_effects() -> Outcome {
    let mu = 1e-2;
    let cases = [
        (0.3, 0.8, Regime::FixedPoint),
        (0.8, -0.05, Regime::CycleOrHeteroclinic),
        (0.125, -0.25, Regime::FixedPoint),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (a, b, want) in cases {
        let run = long_run(&params(a, b, mu), SimplexState::BARYCENTER, 2e4);
        let interior = run.final_state.x() > 0.0 && run.final_state.y() > 0.0 && run.final_state.z() > 0.0;
        let good = run.f_c > 0.01 && run.regime == want && interior;
        ok &= good;
        parts.push(format!("({a}, {b}) F_C={:.4} {}", run.f_c, run.regime));
    }
    let grid = run_sweep(&SweepConfig::new(params(0.0, 0.0, mu))).unwrap();
    let negative: Vec<_> = grid.cells.iter().filter(|c| c.alpha < 0.0).collect();
    let over: Vec<_> = negative.iter().filter(|c| c.survives(0.01)).collect();
    let max_neg = negative.iter().map(|c| c.f_c).fold(0.0, f64::max);
    ok &= over.is_empty();
    parts.push(format!(
        "{} of {} alpha<0 cells above 0.01 (max F_C {max_neg:.4})",
        over.len(),
        negative.len()
    ));
    outcome(ok, parts.join("; "))
}

fn field_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst_sum = 0.0f64;
    let mut vertex_motion = 0.0f64;
    let mut worst_face = 0.0f64;
    for i in 0..5000 {
        let mu = if i % 2 == 0 { 0.0 } else { rng.gen_range(0.0..0.1) };
        let p = random_game(&mut rng, mu);
        let s = random_state(&mut rng);
        let v = vector_field(&p, &s);
        worst_sum = worst_sum.max((v[0] + v[1] + v[2]).abs());

        let p0 = p.with_mu(0.0).unwrap();
        for vertex in [SimplexState::COOPERATORS, SimplexState::DEFECTORS, SimplexState::NON_PARTICIPANTS] {
            vertex_motion = vertex_motion.max(vector_field(&p0, &vertex).iter().fold(0.0, |m, c| m.max(c.abs())));
        }
        let t = rng.gen::<f64>();
        let face = i % 3;
        let mut raw = [t, 1.0 - t, 0.0];
        raw.rotate_right(face);
        let on_face = SimplexState::project(raw).unwrap();
        worst_face = worst_face.max(vector_field(&p0, &on_face)[(2 + face) % 3].abs());
    }
    // and along whole trajectories
    for i in 0..30 {
        let p = random_game(&mut rng, 0.0);
        let face = i % 3;
        let t = rng.gen_range(0.05..0.95);
        let mut raw = [t, 1.0 - t, 0.0];
        raw.rotate_right(face);
        let traj = integrate(&p, &SimplexState::project(raw).unwrap(), 500.0, &IntegrationControls::default()).unwrap();
        for s in &traj.states {
            worst_face = worst_face.max(s.as_array()[(2 + face) % 3]);
        }
    }
    outcome(
        worst_sum <= 1e-14 && vertex_motion == 0.0 && worst_face <= 1e-12,
        format!("5000 cases: max |sum| {worst_sum:.1e}, max vertex rate {vertex_motion:.1e}, max off-face {worst_face:.1e}"),
    )
}

fn main() -> ExitCode {
    let (oracle, gap) = oracle_battery();
    let started = Instant::now();
    let fig1 = fig1_sweep();
    let fig1_secs = started.elapsed().as_secs_f64();
    let mut map = regime_map(&fig1);
    map.detail.push_str(&format!(", {fig1_secs:.1} s"));

    let results = [
        ("oracle equivalence", oracle),
        ("gap identity", gap),
        ("regime map at mu=1e-8", map),
        ("heteroclinic cycling at beta=0", heteroclinic()),
        ("stable interior coexistence", coexistence()),
        ("closed-form edge equilibria", edge_equilibria()),
        ("invasion taxonomy", taxonomy()),
        ("three outcomes at mu=1e-8", fig3()),
        ("mutation effects at mu=1e-2", mutation_effects()),
        ("vector field identities", field_identities()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
