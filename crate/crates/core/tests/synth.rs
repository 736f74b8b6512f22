use edudesire::synth::{default_paper_spec, generate, GeneratorSpec, XorShift64Star};

#[test]
fn same_seed_same_data_and_records_conform() {
    let a = generate(&default_paper_spec(21, 3000)).unwrap();
    let b = generate(&default_paper_spec(21, 3000)).unwrap();
    let c = generate(&default_paper_spec(22, 3000)).unwrap();
    assert_eq!(a.records(), b.records());
    assert_ne!(a.records(), c.records());
    for r in a.records() {
        a.schema().check_record(r).unwrap();
    }
}

#[test]
fn frequencies_follow_the_generating_distribution() {
    let spec = default_paper_spec(5, 100_000);
    let data = generate(&spec).unwrap();
    let truth = spec.truth().unwrap();
    let schema = data.schema();
    let n = data.len() as f64;
    let k = schema.n_classes();
    // class shares against the mean of the true conditional probabilities
    let mut expected = vec![0.0; k];
    let mut observed = vec![0.0; k];
    for r in data.records() {
        for (e, p) in expected.iter_mut().zip(truth.predict_proba(r).unwrap()) {
            *e += p / n;
        }
        observed[r[schema.class_index()]] += 1.0 / n;
    }
    for c in 0..k {
        let se = (expected[c] * (1.0 - expected[c]) / n).sqrt();
        assert!((observed[c] - expected[c]).abs() < 5.0 * se, "class {c}: {} vs {}", observed[c], expected[c]);
    }
    // marginals of independently drawn predictors
    for (&i, marginal) in schema.predictor_indices().iter().zip(&spec.predictor_marginals) {
        if spec.dependencies.iter().any(|d| d.attribute == schema.attribute(i).name) {
            continue;
        }
        for (l, &p) in marginal.iter().enumerate() {
            let share = data.records().iter().filter(|r| r[i] == l).count() as f64 / n;
            let se = (p * (1.0 - p) / n).sqrt().max(1e-9);
            assert!((share - p).abs() < 5.0 * se, "{} level {l}: {share} vs {p}", schema.attribute(i).name);
        }
    }
}

#[test]
fn spec_json_round_trip_and_validation() {
    let spec = default_paper_spec(1, 10);
    let text = serde_json::to_string(&spec).unwrap();
    let back = GeneratorSpec::from_json(&text).unwrap();
    assert_eq!(back, spec);
    let mut bad = spec.clone();
    bad.predictor_marginals[0][0] += 0.5;
    assert!(generate(&bad).is_err());
    let mut short = spec;
    short.predictor_marginals.pop();
    assert!(short.validate().is_err());
}

#[test]
fn prng_is_uniform_enough() {
    let mut rng = XorShift64Star::new(0);
    let mut counts = [0usize; 10];
    for _ in 0..100_000 {
        counts[rng.below(10)] += 1;
    }
    assert!(counts.iter().all(|&c| (9_500..10_500).contains(&c)), "{counts:?}");
    let mut v: Vec<usize> = (0..50).collect();
    rng.shuffle(&mut v);
    let mut sorted = v.clone();
    sorted.sort();
    assert_eq!(sorted, (0..50).collect::<Vec<_>>());
    assert!(v != sorted);
}
