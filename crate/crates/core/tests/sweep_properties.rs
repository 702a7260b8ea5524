use optpgg::dynamics::Regime;
use optpgg::sweep::{compare_sweeps, run_sweep, SweepConfig, CSV_HEADER};
use optpgg::{GameParams, SimplexState};

fn config(mu: f64, n: usize) -> SweepConfig {
    let mut c = SweepConfig::new(GameParams::new(5, 3.0, 0.0, 0.0, mu).unwrap());
    c.grid_n = n;
    c
}

#[test]
fn output_is_independent_of_thread_count() {
    let mut c = config(1e-8, 7);
    c.t_max = 5000.0;
    let pool = |k| rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap();
    let one = pool(1).install(|| run_sweep(&c).unwrap());
    let four = pool(4).install(|| run_sweep(&c).unwrap());
    assert_eq!(one.to_csv_string(), four.to_csv_string());
    assert_eq!(one.to_csv_string(), run_sweep(&c).unwrap().to_csv_string());
}

#[test]
fn coarse_survival_region() {
    let grid = run_sweep(&config(1e-8, 9)).unwrap();
    let csv = grid.to_csv_string();
    assert!(csv.starts_with(CSV_HEADER));
    assert_eq!(csv.lines().count(), 82);
    assert!(grid.cells.iter().all(|c| c.regime != Regime::Error));
    let survivors: Vec<_> = grid.survivors(0.01).collect();
    assert!(!survivors.is_empty());
    for c in &survivors {
        assert!(c.alpha > 0.0 && c.beta >= 0.0, "({}, {})", c.alpha, c.beta);
    }
    assert!(grid.cell(8, 4).survives(0.01));
    assert!(!grid.cell(0, 8).survives(0.01));
}

#[test]
fn zero_influence_line_keeps_cycling() {
    let mut c = config(0.0, 5);
    c.beta_range = (0.0, 0.0);
    c.alpha_range = (0.25, 1.0);
    c.initial_conditions = vec![SimplexState::new(0.3, 0.3, 0.4).unwrap()];
    c.t_max = 5000.0;
    let grid = run_sweep(&c).unwrap();
    for i in 0..5 {
        assert_eq!(grid.cell(i, 0).regime, Regime::CycleOrHeteroclinic, "{}", grid.cell(i, 0).alpha);
    }
}

#[test]
fn survival_is_monotone_in_threshold() {
    let grid = run_sweep(&config(1e-2, 5)).unwrap();
    let diff = compare_sweeps(&grid, &grid, 0.01, 0.05).unwrap();
    assert!(diff.gained.is_empty());
    assert!(compare_sweeps(&grid, &grid, 0.01, 0.01).unwrap().is_empty());
    let other = run_sweep(&config(1e-2, 3)).unwrap();
    assert!(compare_sweeps(&grid, &other, 0.01, 0.01).is_err());
}

#[test]
fn several_starts_keep_the_best() {
    let mut single = config(1e-8, 2);
    single.alpha_range = (0.5, 0.5);
    single.beta_range = (0.2, 0.2);
    let mut many = single.clone();
    many.initial_conditions.push(SimplexState::new(0.05, 0.9, 0.05).unwrap());
    let a = run_sweep(&single).unwrap();
    let b = run_sweep(&many).unwrap();
    assert!(b.cells[0].f_c >= a.cells[0].f_c);
    assert_eq!(b.cells.len(), 4);
}
