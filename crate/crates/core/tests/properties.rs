mod common;

use common::*;
use fmeda_uq::eii::{eii_table, total_per_failure_mode};
use fmeda_uq::ingest::{self, emit_csv, emit_json, parse_csv, parse_json, OutputFormat};
use fmeda_uq::mc::{self, McConfig};
use fmeda_uq::metrics::{lfm_value, spfm, spfm_value};
use fmeda_uq::model::{total_lambda, validate};
use fmeda_uq::sampling::sample_size;
use fmeda_uq::uncertainty::{lfm_partials, sigma_spfm, spfm_partials, PropagationMode};
use fmeda_uq::*;
use proptest::prelude::*;

fn arb_row(id: usize) -> impl Strategy<Value = FailureModeRow> {
    (
        0.0f64..500.0,
        0.0f64..50.0,
        0.0f64..=1.0,
        0.0f64..0.05,
        0.0f64..=1.0,
        0.0f64..0.05,
        prop::option::of((0.001f64..0.2, 0usize..3)),
    )
        .prop_map(move |(lambda, sl, dc, sdc, dcl, sdcl, fs)| {
            let mut row = FailureModeRow::new(format!("FM{id}"), lambda, dc)
                .with_sigma_rate(sl)
                .with_sigma_dc(sdc)
                .with_latent(dcl, sdcl);
            if let Some((margin, cl)) = fs {
                row = row.with_source(DcSource::FaultSimulation {
                    margin,
                    confidence: ConfidenceLevel::ALL[cl],
                });
            }
            row
        })
}

/// Random valid table; some subparts are distribution subparts.
fn arb_table() -> impl Strategy<Value = FmedaTable> {
    prop::collection::vec((1usize..5, any::<bool>(), 1.0f64..1000.0), 1..5).prop_flat_map(|subs| {
        let mut next = 0;
        let strategies: Vec<_> = subs
            .into_iter()
            .enumerate()
            .map(|(si, (n, distribution, lambda_sub))| {
                let rows: Vec<_> = (next..next + n).map(arb_row).collect();
                next += n;
                (rows, prop::collection::vec(1u32..100, n)).prop_map(move |(rows, weights)| {
                    let name = format!("S{si}");
                    if distribution {
                        let total: u32 = weights.iter().sum();
                        let mut rows: Vec<_> = rows
                            .into_iter()
                            .zip(&weights)
                            .map(|(r, w)| {
                                let frac = *w as f64 / total as f64;
                                r.with_fraction(frac, frac * 0.1)
                            })
                            .collect();
                        // fractions must sum to one within 1e-9
                        let sum: f64 = rows
                            .iter()
                            .map(|r| match r.rate {
                                FailureRate::Fraction { fmd, .. } => fmd,
                                _ => 0.0,
                            })
                            .sum();
                        if let Some(FailureRate::Fraction { fmd, .. }) = rows.last_mut().map(|r| &mut r.rate) {
                            *fmd += 1.0 - sum;
                        }
                        Subpart::distribution(name, lambda_sub, rows)
                    } else {
                        Subpart::direct(name, rows)
                    }
                })
            })
            .collect();
        strategies.prop_map(|subs| {
            let mut parts: Vec<Part> = Vec::new();
            for (i, s) in subs.into_iter().enumerate() {
                let pname = format!("P{}", i % 2);
                match parts.iter_mut().find(|p| p.name == pname) {
                    Some(p) => p.subparts.push(s),
                    None => parts.push(Part { name: pname, subparts: vec![s] }),
                }
            }
            FmedaTable::new(parts)
        })
    })
    .prop_filter("analyzable", |t| validate(t).is_empty())
}

fn flat_of(modes: Vec<(f64, f64, f64, f64)>) -> FlatTable {
    FlatTable::new(
        modes
            .into_iter()
            .map(|(lambda, dc, sdc, sl)| FlatMode {
                sigma_dc: sdc,
                sigma_lambda: sl,
                ..FlatMode::new(lambda, dc)
            })
            .collect(),
    )
}

fn arb_flat() -> impl Strategy<Value = FlatTable> {
    prop::collection::vec((0.1f64..500.0, 0.0f64..=1.0, 0.0f64..0.05, 0.0f64..50.0), 1..30).prop_map(flat_of)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn total_lambda_ignores_order(t in arb_table(), seed in any::<u64>()) {
        let mut shuffled = t.clone();
        let mut r = rng(seed);
        use rand::seq::SliceRandom;
        shuffled.parts.shuffle(&mut r);
        for p in &mut shuffled.parts {
            p.subparts.shuffle(&mut r);
            for s in &mut p.subparts {
                s.failure_modes.shuffle(&mut r);
            }
        }
        let (a, b) = (total_lambda(&t).unwrap(), total_lambda(&shuffled).unwrap());
        prop_assert!(rel_close(a, b, 1e-12));
    }

    #[test]
    fn materializing_distributions_preserves_results(t in arb_table()) {
        let m = t.materialized();
        prop_assert!(validate(&m).is_empty());
        let (a, b) = (t.flatten().unwrap(), m.flatten().unwrap());
        prop_assert!(rel_close(a.lambda_tot, b.lambda_tot, 1e-12));
        prop_assert!(rel_close(spfm(&a).unwrap().value, spfm(&b).unwrap().value, 1e-12));
    }

    #[test]
    fn validate_is_idempotent(t in arb_table()) {
        let before = t.clone();
        prop_assert_eq!(validate(&t), validate(&t));
        prop_assert_eq!(t, before);
    }

    #[test]
    fn json_round_trip(t in arb_table()) {
        prop_assert_eq!(parse_json(&emit_json(&t)).unwrap(), t);
    }

    #[test]
    fn csv_round_trip(t in arb_table()) {
        prop_assert_eq!(parse_csv(&emit_csv(&t)).unwrap(), t);
    }

    #[test]
    fn csv_and_json_give_identical_results(t in arb_table()) {
        let opts = analysis::AnalysisOptions::default();
        let from_csv = analysis::analyze(&parse_csv(&emit_csv(&t)).unwrap(), &opts).unwrap();
        let from_json = analysis::analyze(&parse_json(&emit_json(&t)).unwrap(), &opts).unwrap();
        prop_assert_eq!(
            ingest::emit_result(&from_csv, OutputFormat::Json),
            ingest::emit_result(&from_json, OutputFormat::Json)
        );
    }

    #[test]
    fn splitting_a_mode_keeps_spfm(t in arb_flat(), idx in any::<prop::sample::Index>(), w in 0.0f64..=1.0) {
        let i = idx.index(t.modes.len());
        let mut modes = t.modes.clone();
        let orig = modes.remove(i);
        modes.push(FlatMode { lambda: orig.lambda * w, ..orig.clone() });
        modes.push(FlatMode { lambda: orig.lambda - orig.lambda * w, ..orig });
        let split = FlatTable::new(modes);
        let (a, b) = (spfm(&t).unwrap().value, spfm(&split).unwrap().value);
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn spfm_monotone_in_coverage_and_rate(t in arb_flat(), idx in any::<prop::sample::Index>(), d in 0.0f64..0.5) {
        let i = idx.index(t.modes.len());
        let base = spfm_value(&t.modes, t.lambda_tot).unwrap();
        let mut more_dc = t.modes.clone();
        more_dc[i].dc = (more_dc[i].dc + d).min(1.0);
        prop_assert!(spfm_value(&more_dc, t.lambda_tot).unwrap() >= base - 1e-15);
        if t.modes[i].dc < 1.0 {
            // a larger share of an imperfectly covered mode cannot raise the
            // SPFM; λ_tot stays nominal to isolate the share
            let mut heavier = t.modes.clone();
            heavier[i].lambda *= 1.0 + d;
            prop_assert!(spfm_value(&heavier, t.lambda_tot).unwrap() <= base + 1e-15);
        }
    }

    #[test]
    fn constant_coverage_is_the_spfm(t in arb_flat(), c in 0.0f64..=1.0) {
        let modes: Vec<_> = t.modes.into_iter().map(|m| FlatMode { dc: c, ..m }).collect();
        let t = FlatTable::new(modes);
        prop_assert!((spfm(&t).unwrap().value - c).abs() < 1e-12);
    }

    #[test]
    fn lfm_is_spfm_of_the_non_residual_pool(t in arb_flat(), dcl in prop::collection::vec(0.0f64..=1.0, 30)) {
        let modes: Vec<_> = t.modes.iter().zip(&dcl).map(|(m, &l)| FlatMode { dc_latent: l, ..m.clone() }).collect();
        let t = FlatTable::new(modes);
        let pool: Vec<_> = t.modes.iter().map(|m| FlatMode::new(m.dc * m.lambda, m.dc_latent)).collect();
        let pool_tot: f64 = pool.iter().map(|m| m.lambda).sum();
        match (lfm_value(&t.modes, t.lambda_tot), spfm_value(&pool, pool_tot)) {
            (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b),
            (a, b) => prop_assert!(a.is_none() && b.is_none() || pool_tot < 1e-9),
        }
    }

    #[test]
    fn quadrature_decomposition(t in arb_flat()) {
        let full = sigma_spfm(&t, PropagationMode::Full).unwrap();
        let dc = sigma_spfm(&t, PropagationMode::DcOnly).unwrap();
        let l = sigma_spfm(&t, PropagationMode::LambdaOnly).unwrap();
        prop_assert!(rel_close(full * full, dc * dc + l * l, 1e-12));
    }

    #[test]
    fn rescaling_rates_changes_nothing(t in arb_flat(), c in 0.01f64..100.0) {
        let scaled = FlatTable::new(t.modes.iter().map(|m| FlatMode {
            lambda: m.lambda * c,
            sigma_lambda: m.sigma_lambda * c,
            ..m.clone()
        }).collect());
        prop_assert!(rel_close(spfm(&t).unwrap().value, spfm(&scaled).unwrap().value, 1e-12)
            || (spfm(&t).unwrap().value - spfm(&scaled).unwrap().value).abs() < 1e-14);
        let (a, b) = (sigma_spfm(&t, PropagationMode::Full).unwrap(), sigma_spfm(&scaled, PropagationMode::Full).unwrap());
        prop_assert!(rel_close(a, b, 1e-12));
    }

    #[test]
    fn sigma_grows_with_every_input_sigma(t in arb_flat(), idx in any::<prop::sample::Index>(), d in 0.0f64..0.1, which in any::<bool>()) {
        let i = idx.index(t.modes.len());
        let mut m = t.modes.clone();
        if which { m[i].sigma_dc += d } else { m[i].sigma_lambda += d * 100.0 }
        let bigger = FlatTable::new(m);
        prop_assert!(sigma_spfm(&bigger, PropagationMode::Full).unwrap() >= sigma_spfm(&t, PropagationMode::Full).unwrap());
    }

    #[test]
    fn eii_shares_partition_and_rank(t in arb_flat()) {
        let eii = eii_table(&t).unwrap();
        if eii.sigma_spfm > 0.0 {
            let sum: f64 = eii.entries.iter().map(|e| e.variance_share).sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
            prop_assert!(eii.entries.iter().all(|e| e.variance_share >= 0.0));
            for w in eii.entries.windows(2) {
                prop_assert!(w[0].raw_eii >= w[1].raw_eii);
                prop_assert!(w[0].variance_share >= w[1].variance_share);
            }
            let totals: f64 = total_per_failure_mode(&eii.entries).iter().map(|(_, p)| p).sum();
            prop_assert!((totals - 100.0).abs() < 1e-7);
        } else {
            prop_assert!(eii.entries.is_empty() && eii.note.is_some());
        }
    }

    #[test]
    fn gradients_match_exact_differences(seed in any::<u64>()) {
        let t = random_table(&mut rng(seed));
        let sp = spfm_partials(&t).unwrap();
        let lp = lfm_partials(&t).unwrap();
        let exact = ExactTable::new(&t);
        for i in 0..t.modes.len() {
            prop_assert!(rel_close(sp[i].dc, central_difference(exact_spfm, &exact, i, Input::Dc), 1e-6));
            prop_assert!(rel_close(sp[i].lambda, central_difference(exact_spfm, &exact, i, Input::Lambda), 1e-6));
            prop_assert!(rel_close(lp[i].dc, central_difference(exact_lfm, &exact, i, Input::Dc), 1e-6));
            prop_assert!(rel_close(lp[i].lambda, central_difference(exact_lfm, &exact, i, Input::Lambda), 1e-6));
            prop_assert!(rel_close(lp[i].dc_latent, central_difference(exact_lfm, &exact, i, Input::DcLatent), 1e-6));
        }
    }

    #[test]
    fn sample_size_matches_exact_evaluation(n in 1u64..10_000_000, e_milli in 1i64..999, cl in 0usize..3, p_pct in 1i64..100) {
        let level = ConfidenceLevel::ALL[cl];
        let margin = e_milli as f64 / 1000.0;
        let p = p_pct as f64 / 100.0;
        let plan = sample_size(n, margin, level, p).unwrap();
        let exact = exact_sample_size(n, &q_ratio(e_milli, 1000), &exact_cutoff(level.as_f64()), &q_ratio(p_pct, 100));
        prop_assert_eq!(plan.sample_size, exact);
        prop_assert!(plan.sample_size >= 1 && plan.sample_size <= n);
    }
}

#[test]
fn sample_size_monotone_over_grid() {
    let pops: Vec<u64> = (2..=7).flat_map(|k| [10u64.pow(k), 3 * 10u64.pow(k)]).collect();
    let margins = [0.005, 0.01, 0.02, 0.03, 0.05, 0.075, 0.1];
    for level in ConfidenceLevel::ALL {
        for &n in &pops {
            let sizes: Vec<u64> = margins.iter().map(|&e| sample_size(n, e, level, 0.5).unwrap().sample_size).collect();
            assert!(sizes.windows(2).all(|w| w[0] >= w[1]), "not non-increasing in e: {sizes:?}");
        }
        for &e in &margins {
            let sizes: Vec<u64> = pops.iter().map(|&n| sample_size(n, e, level, 0.5).unwrap().sample_size).collect();
            assert!(sizes.windows(2).all(|w| w[0] <= w[1]), "not non-decreasing in N: {sizes:?}");
        }
    }
    for &n in &pops {
        for &e in &margins {
            let by_level: Vec<u64> = ConfidenceLevel::ALL
                .iter()
                .map(|&l| sample_size(n, e, l, 0.5).unwrap().sample_size)
                .collect();
            assert!(by_level.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}

#[test]
fn half_proportion_is_the_most_conservative() {
    for level in ConfidenceLevel::ALL {
        for (n, e) in [(100_000u64, 0.01), (1000, 0.05), (10_000_000, 0.005)] {
            let at_half = sample_size(n, e, level, 0.5).unwrap().sample_size;
            for k in 1..100 {
                let p = k as f64 / 100.0;
                assert!(sample_size(n, e, level, p).unwrap().sample_size <= at_half);
            }
        }
    }
}

#[test]
fn sample_size_limit() {
    for level in ConfidenceLevel::ALL {
        let t = level.cutoff();
        for e in [0.01, 0.02, 0.05] {
            let limit = (t * t * 0.25 / (e * e)).ceil() as u64;
            let n = sample_size(1_000_000_000_000, e, level, 0.5).unwrap().sample_size;
            assert!(n <= limit && n + 1 >= limit, "{n} vs {limit}");
        }
    }
}

#[test]
fn mc_standard_error_halves_with_four_times_the_samples() {
    let t = flat_of(vec![(50.0, 0.9, 0.02, 2.0), (50.0, 0.99, 0.001, 5.0), (30.0, 0.6, 0.03, 1.0)]);
    let spread = |samples: u64| {
        let est: Vec<f64> = (0..24)
            .map(|seed| mc::empirical_sigma_spfm(&t, &McConfig { samples, seed, truncate: false }).sigma)
            .collect();
        let mean = est.iter().sum::<f64>() / est.len() as f64;
        (est.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (est.len() - 1) as f64).sqrt()
    };
    let ratio = spread(40_000) / spread(10_000);
    assert!((0.3..0.75).contains(&ratio), "ratio {ratio}");
}

#[test]
fn mc_is_exact_on_linear_tables() {
    let t = flat_of(vec![(50.0, 0.5, 0.02, 0.0), (20.0, 0.7, 0.05, 0.0), (80.0, 0.3, 0.01, 0.0)]);
    let cfg = McConfig { samples: 1_000_000, seed: 3, truncate: false };
    let v = mc::mc_sigma_spfm(&t, &cfg).unwrap();
    assert!(v.relative_gap < 0.01, "{v:?}");
    assert_eq!(v.truncation_rate, 0.0);
}

#[test]
fn mc_truncation_is_rare_far_from_boundaries() {
    let mut r = rng(11);
    for _ in 0..5 {
        let t = small_sigma_table(&mut r, 10);
        let v = mc::mc_sigma_spfm(&t, &McConfig::default()).unwrap();
        assert!(v.truncation_rate < 1e-3, "{v:?}");
        assert!(v.warning.is_none());
    }
}
