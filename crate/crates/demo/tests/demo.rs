use nnstne_demo::{distance_profile_impl, memberships_impl, train_synthetic_impl};

#[test]
fn profile_finds_embedded_pattern() {
    let pattern = [0.0, 1.0, 3.0, 1.0, 0.0, -2.0];
    let mut series = vec![0.3, -0.1, 0.2, 0.0, 0.1, -0.2, 0.15, 0.05, -0.3, 0.2];
    series.splice(3..3, pattern.iter().map(|v| 2.0 * v + 5.0));
    let profile = distance_profile_impl(&series, &pattern).unwrap();
    assert_eq!(profile.len(), series.len() - pattern.len() + 1);
    assert!(profile[3].abs() < 1e-12);
    assert!(profile.iter().all(|d| (0.0..=2.0).contains(d)));
    assert!(distance_profile_impl(&series, &series[..1]).is_err());
    assert!(distance_profile_impl(&pattern, &series).is_err());
}

#[test]
fn memberships_normalize() {
    let q = memberships_impl(&[0.0, 1.0], 1.0).unwrap();
    assert!((q[0] - 2.0 / 3.0).abs() < 1e-12 && (q[1] - 1.0 / 3.0).abs() < 1e-12);
    assert!(memberships_impl(&[], 1.0).is_err());
    assert!(memberships_impl(&[0.5], 0.0).is_err());
    assert!(memberships_impl(&[-0.5], 1.0).is_err());
}

#[test]
fn toy_training_runs() {
    let s = train_synthetic_impl("sinusoids", 3, 10).unwrap();
    assert_eq!(
        (s.series.len(), s.labels.len(), s.shapelets.len()),
        (20, 20, 3)
    );
    assert!(!s.loss.is_empty());
    assert!(s.loss.windows(2).all(|w| w[1] <= w[0]));
    assert!((0.0..=1.0).contains(&s.rand_index_features));
    assert!(train_synthetic_impl("nope", 0, 1).is_err());
}

#[test]
fn learned_features_separate_sinusoids() {
    for seed in 0..3 {
        let s = train_synthetic_impl("sinusoids", seed, 30).unwrap();
        assert!(
            s.rand_index_features > s.rand_index_raw,
            "seed {seed}: {} vs {}",
            s.rand_index_features,
            s.rand_index_raw
        );
    }
}
