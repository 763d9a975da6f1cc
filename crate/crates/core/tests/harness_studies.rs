use lipdon::basis::restrict;
use lipdon::harness::config::{ExampleKind, ExperimentConfig};
use lipdon::harness::{
    mc_l2_error, neglected_tail_sq, sample_inputs, truncation_rate_study, universality_study, RateMode, RateReport,
};
use lipdon::surrogate::{Backend, FitOptions, LipschitzOperator, OutputNorm};
use lipdon::weights::{cube_contains, SamplingLaw, SmoothnessParams, WeightSequence};

fn law(dim: usize, seed: u64) -> SamplingLaw {
    let p = SmoothnessParams::new(1.5, 0.0, 1.0, 1.0).unwrap();
    SamplingLaw::new(WeightSequence::power(1.0).unwrap(), p, dim, seed).unwrap()
}

#[test]
fn samples_are_reproducible_and_centered() {
    let l = law(4, 9);
    let a = sample_inputs(&l, 1).unwrap();
    let b = sample_inputs(&l, 1).unwrap();
    assert_eq!(a, b);
    let n = 100_000;
    let mut sums = [0.0f64; 4];
    for k in 0..n as u64 {
        for (s, u) in sums.iter_mut().zip(l.uniform(k)) {
            *s += u;
        }
    }
    for s in sums {
        assert!((s / n as f64).abs() < 0.01);
    }
    assert!(sample_inputs(&l, 500).unwrap().iter().all(|x| cube_contains(x, &l.params, &l.weights)));
    assert!(sample_inputs(&l, 0).is_err());
}

/// `E ||x - R_N x||^2 = (r^2/3) sum_{N < i <= dim} w_i^{2s}`.
fn restriction_mse(l: &SamplingLaw, n: usize) -> f64 {
    (n + 1..=l.truncation_dim)
        .map(|i| (i as f64).powf(-2.0 * l.params.s))
        .sum::<f64>()
        * l.params.r.powi(2)
        / 3.0
}

#[test]
fn restriction_error_matches_analytic_value() {
    let l = law(64, 1);
    let id = |x: &[f64]| x.to_vec();
    let cut = |x: &[f64]| restrict(x, 4);
    let (est, ci) = mc_l2_error(&id, &cut, &l, 4000, &OutputNorm::Plain).unwrap();
    let exact = restriction_mse(&l, 4).sqrt();
    assert!((est - exact).abs() <= ci, "{est} vs {exact} +- {ci}");
    let (zero, zci) = mc_l2_error(&id, &id, &l, 10, &OutputNorm::Plain).unwrap();
    assert_eq!((zero, zci), (0.0, 0.0));
}

#[test]
fn confidence_intervals_cover_the_analytic_value() {
    let mut hits = 0;
    let cut = |x: &[f64]| restrict(x, 2);
    let id = |x: &[f64]| x.to_vec();
    for seed in 0..100 {
        let l = law(32, 1000 + seed);
        let exact = restriction_mse(&l, 2).sqrt();
        let (est, ci) = mc_l2_error(&id, &cut, &l, 400, &OutputNorm::Plain).unwrap();
        if (est - exact).abs() <= ci {
            hits += 1;
        }
    }
    assert!(hits >= 90, "{hits} of 100");
}

#[test]
fn neglected_tail_is_small_for_the_default_dimension() {
    let l = law(128, 0);
    let tail = neglected_tail_sq(&l, 128).unwrap();
    let oracle: f64 = (129..200_000).map(|i| (i as f64).powi(-3)).sum::<f64>() / 3.0;
    assert!((tail - oracle).abs() < 1e-9, "{tail} vs {oracle}");
}

#[test]
fn rate_reports_flag_noise_floor_and_write_csv() {
    let r = RateReport::from_errors(
        RateMode::Output,
        vec![1, 2, 4, 8],
        vec![0.0; 4],
        (vec![0.0; 4], vec![0.0; 4]),
        -1.0,
        lipdon::harness::RateCheck::AtLeast,
        3,
    );
    assert!(r.below_noise_floor && !r.pass);
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("index,error,ci_lo,ci_hi\n"));
    assert!(text.contains("# slope=") && text.contains("# predicted=-1") && text.ends_with("# pass=false\n"));
}

#[test]
fn rate_studies_reject_short_index_lists() {
    let cfg = ExperimentConfig::for_example(ExampleKind::Synthetic);
    let study = cfg.study().unwrap();
    assert!(truncation_rate_study(study.as_ref(), &[1, 2, 4], RateMode::Output, 5).is_err());
    assert!(truncation_rate_study(study.as_ref(), &[1, 4, 2, 8], RateMode::Output, 5).is_err());
}

#[test]
fn hs_output_rate_follows_singular_value_tails() {
    let mut cfg = ExperimentConfig::for_example(ExampleKind::Hs);
    cfg.samples = 100;
    cfg.indices = vec![2, 4, 8, 16];
    let study = cfg.study().unwrap();
    let r = truncation_rate_study(study.as_ref(), &cfg.indices, RateMode::Output, cfg.samples).unwrap();
    assert!((r.slope + 1.5).abs() <= 0.25 && r.pass, "{r:?}");
}

#[test]
fn csv_output_is_deterministic() {
    let cfg = ExperimentConfig::for_example(ExampleKind::Synthetic);
    let render = || {
        let study = cfg.study().unwrap();
        let r = truncation_rate_study(study.as_ref(), &cfg.indices, RateMode::Input, 40).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        buf
    };
    assert_eq!(render(), render());
}

fn quick_fit() -> FitOptions {
    FitOptions {
        backend: Backend::GridInterpolant,
        holdout: 2000,
        ..FitOptions::default()
    }
}

#[test]
fn universality_on_a_restriction_meets_the_level_bound() {
    let l = law(8, 4);
    let op = LipschitzOperator::new(8, 8, |x| restrict(x, 3));
    let levels = [3, 4, 5];
    let r = universality_study(&op, &l, &levels, 100, &quick_fit()).unwrap();
    for row in &r.rows {
        // Components past the third are zero and the rest are linear, so
        // only the surrogate accuracy budget remains.
        let bound = 0.5f64.powi(row.n as i32) * (row.n as f64).sqrt();
        assert!(row.sup_error <= bound + 1e-12, "{row:?}");
    }
    assert!(r.pass());
}

#[test]
fn universality_of_zero_is_exact() {
    let l = law(8, 4);
    let op = LipschitzOperator::new(8, 8, |_| vec![0.0; 8]);
    let r = universality_study(&op, &l, &[1, 2, 3], 20, &quick_fit()).unwrap();
    assert!(r.rows.iter().all(|row| row.sup_error == 0.0));
    assert!(r.pass());
}

#[test]
fn universality_stops_at_the_grid_cap() {
    let l = law(16, 4);
    let op = LipschitzOperator::new(16, 16, |x| x.to_vec());
    let r = universality_study(&op, &l, &[1, 9], 10, &quick_fit()).unwrap();
    assert!(r.truncated_by_cap);
    assert_eq!(r.rows.len(), 1);
}
