use proptest::prelude::*;

use qst_core::chain::ChainConfig;
use qst_core::dynamics::{evolve, expected_energy};
use qst_core::eigen::decompose;
use qst_core::experiments::{report_point, run_sweep, Axis, SweepGrid};
use qst_core::metrics::{identify_dimer_modes, qst_drop, qst_drop_from, TransferOptions};

fn chain_params() -> impl Strategy<Value = ChainConfig> {
    (2usize..=12, 0.0..1.5f64, 0.0..3.0f64, 0.05..1.5f64, 0.5..1.5f64)
        .prop_map(|(n, a, p, je, jb)| ChainConfig::power_law(n, a, p, je, jb))
}

fn times() -> Vec<f64> {
    (0..=40).map(|k| k as f64 * 1.25).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn populations_sum_to_one(cfg in chain_params(), source_frac in 0.0..1.0f64) {
        let ed = decompose(&cfg.to_chain().unwrap().to_single_excitation()).unwrap();
        let source = 1 + (source_frac * (cfg.n_sites - 1) as f64).round() as usize;
        let traj = evolve(&ed, source, &times()).unwrap();
        for row in traj.populations() {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn energy_is_conserved(cfg in chain_params()) {
        let h = cfg.to_chain().unwrap().to_single_excitation();
        let ed = decompose(&h).unwrap();
        let traj = evolve(&ed, 1, &times()).unwrap();
        let e0 = h.diag()[0];
        for row in traj.amplitudes() {
            prop_assert!((expected_energy(&h, row) - e0).abs() < 1e-8 * (1.0 + h.inf_norm()));
        }
    }

    #[test]
    fn field_shift_leaves_populations(cfg in chain_params(), shift in -5.0..5.0f64) {
        let chain = cfg.to_chain().unwrap();
        let a = evolve(&decompose(&chain.to_single_excitation()).unwrap(), 1, &times()).unwrap();
        let shifted = chain.with_field_shift(shift).unwrap();
        let b = evolve(&decompose(&shifted.to_single_excitation()).unwrap(), 1, &times()).unwrap();
        for (x, y) in a.populations().iter().zip(b.populations()) {
            for (p, q) in x.iter().zip(y) {
                prop_assert!((p - q).abs() < 1e-12, "{} vs {}", p, q);
            }
        }
        let (da, db) = (
            qst_drop(&decompose(&chain.to_single_excitation()).unwrap()),
            qst_drop(&decompose(&shifted.to_single_excitation()).unwrap()),
        );
        prop_assert!((da - db).abs() < 1e-10);
    }

    #[test]
    fn mirror_reflection_is_exact(cfg in chain_params()) {
        let n = cfg.n_sites;
        let ed = decompose(&cfg.to_chain().unwrap().to_single_excitation()).unwrap();
        let forward = evolve(&ed, 1, &times()).unwrap();
        let backward = evolve(&ed, n, &times()).unwrap();
        for (x, y) in forward.populations().iter().zip(backward.populations()) {
            for k in 0..n {
                prop_assert_eq!(x[k], y[n - 1 - k]);
            }
        }
        prop_assert_eq!(qst_drop(&ed), qst_drop_from(&ed, n).unwrap());
    }

    #[test]
    fn dimer_modes_are_distinct_and_bounded(cfg in chain_params()) {
        let ed = decompose(&cfg.to_chain().unwrap().to_single_excitation()).unwrap();
        let d = identify_dimer_modes(&ed);
        prop_assert!(d.overlap_plus <= 1.0 + 1e-12 && d.overlap_minus <= 1.0 + 1e-12);
        if cfg.n_sites > 1 {
            prop_assert_ne!(d.index_plus, d.index_minus);
        }
        let drop = qst_drop(&ed);
        prop_assert!((-std::f64::consts::FRAC_1_SQRT_2..=1e-12).contains(&drop));
    }

    #[test]
    fn toml_round_trip(cfg in chain_params()) {
        let back = ChainConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

#[test]
fn sweep_rows_match_standalone_points() {
    let base = ChainConfig::power_law(8, 0.5, 0.0, 1.0, 1.0);
    let grid = SweepGrid::new(
        base,
        (Axis::P, vec![0.0, 1.0, 2.0, 3.0]),
        Some((Axis::JEdge, vec![0.1, 1.0])),
        100,
    )
    .unwrap();
    let opts = TransferOptions {
        max_horizon: 2e4,
        ..Default::default()
    };
    let rows = run_sweep(&grid, &opts, Some(2)).unwrap();
    assert_eq!(rows.len(), 8);
    for row in rows {
        let alone = report_point(&row.params, &opts).map_err(|e| e.to_string());
        assert_eq!(alone, row.outcome);
    }
}
