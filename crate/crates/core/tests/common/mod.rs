#![allow(dead_code)]

use edudesire::data::{Attribute, AttributeSchema, Dataset, Role};
use edudesire::synth::XorShift64Star;

/// Predictors `X0..` with levels `l0..`, then class `Y` with levels `c0..`.
pub fn toy_schema(levels: &[usize], k: usize) -> AttributeSchema {
    let named = |prefix: &str, n: usize| (0..n).map(|l| format!("{prefix}{l}")).collect::<Vec<_>>();
    let mut attrs: Vec<Attribute> = levels
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let names = named("l", n);
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            Attribute::new(format!("X{i}"), &refs, Role::Predictor)
        })
        .collect();
    let names = named("c", k);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    attrs.push(Attribute::new("Y", &refs, Role::Class));
    AttributeSchema::new(attrs).unwrap()
}

/// Records with every column drawn uniformly.
pub fn uniform_data(schema: &AttributeSchema, n: usize, rng: &mut XorShift64Star) -> Dataset {
    let records = (0..n)
        .map(|_| schema.attributes().iter().map(|a| rng.below(a.n_levels())).collect())
        .collect();
    Dataset::new(schema.clone(), records).unwrap()
}

/// Records whose class follows `class_of(predictors, rng)`.
pub fn simulate(
    schema: &AttributeSchema,
    n: usize,
    rng: &mut XorShift64Star,
    mut class_of: impl FnMut(&[usize], &mut XorShift64Star) -> usize,
) -> Dataset {
    let p = schema.len() - 1;
    let records = (0..n)
        .map(|_| {
            let mut r: Vec<usize> = (0..p).map(|i| rng.below(schema.attribute(i).n_levels())).collect();
            let y = class_of(&r, rng);
            r.push(y);
            r
        })
        .collect();
    Dataset::new(schema.clone(), records).unwrap()
}
