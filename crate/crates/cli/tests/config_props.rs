use biharm::Problem;
use biharm_cli::config::{parse_grid, parse_list};
use biharm_cli::{Experiment, ExperimentConfig, Overrides};
use proptest::prelude::*;

fn experiment() -> impl Strategy<Value = Experiment> {
    prop_oneof![
        Just(Experiment::Exponent),
        Just(Experiment::Square),
        Just(Experiment::SectorSweep),
        Just(Experiment::DumbbellSweep),
        Just(Experiment::Converge),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn config_round_trips_through_text(
        e in experiment(),
        seed in any::<u64>(),
        tol in 1e-15..1e-3f64,
        threads in 0usize..64,
        buckling in any::<bool>(),
        rho1 in 1e-9..1e-2f64,
        h1 in prop::collection::vec(0.01..0.9f64, 3..6),
        c in prop::collection::vec(0.001..2.0f64, 1..5),
        thetas in prop::collection::vec(0.5..179.5f64, 1..5),
    ) {
        let mut cfg = ExperimentConfig::defaults(e);
        cfg.seed = seed;
        cfg.tol = tol;
        cfg.threads = threads;
        cfg.problem = if buckling { Problem::Buckling } else { Problem::Clamped };
        cfg.rho1 = rho1;
        match e {
            Experiment::Square => cfg.h1 = vec![h1[0]],
            Experiment::Exponent => cfg.theta_deg = thetas,
            Experiment::SectorSweep => { cfg.h1 = h1; cfg.theta_deg = thetas; }
            Experiment::DumbbellSweep => cfg.c = c,
            Experiment::Converge => cfg.h1 = h1,
        }
        let back = ExperimentConfig::from_text(&cfg.to_text()).unwrap();
        prop_assert_eq!(back, cfg.clone());
        // a full config is also a valid override layer that reproduces itself
        let o = Overrides::from_text(&cfg.to_text()).unwrap();
        prop_assert_eq!(ExperimentConfig::resolve(e, &[o]).unwrap(), cfg);
    }

    #[test]
    fn lists_and_grids_parse_back(
        xs in prop::collection::vec(-1e6..1e6f64, 1..8),
        gs in prop::collection::vec((2usize..200, 2usize..200), 1..6),
    ) {
        let text = xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        prop_assert_eq!(parse_list(&text).unwrap(), xs);
        let text = gs.iter().map(|(a, b)| format!("{a}x{b}")).collect::<Vec<_>>().join(",");
        let want: Vec<[usize; 2]> = gs.iter().map(|&(a, b)| [a, b]).collect();
        prop_assert_eq!(parse_grid(&text).unwrap(), want);
    }

    #[test]
    fn ranges_are_inclusive_and_evenly_spaced(a in 0.0..100.0f64, n in 0usize..50, step in 0.1..10.0f64) {
        let b = a + n as f64 * step;
        let v = parse_list(&format!("{a}:{b}:{step}")).unwrap();
        prop_assert_eq!(v.len(), n + 1);
        prop_assert!((v[n] - b).abs() <= 1e-9 * b.abs().max(1.0));
    }
}
