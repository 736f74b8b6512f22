mod common;

use std::collections::BTreeMap;

use edudesire::data::{AttributeSchema, Dataset};
use edudesire::synth::{default_paper_spec, generate, XorShift64Star};
use edudesire::tree::{build_tree, Rule, RuleTree, TreeOptions};

fn order(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn survey(seed: u64, n: usize) -> Dataset {
    generate(&default_paper_spec(seed, n)).unwrap()
}

fn labelled(schema: &AttributeSchema, record: &[usize]) -> Vec<(String, String)> {
    schema
        .attributes()
        .iter()
        .zip(record)
        .map(|(a, &l)| (a.name.clone(), a.levels[l].clone()))
        .collect()
}

const ORDER: [&str; 3] = ["Type of Activity", "Educational Level", "Gender"];

fn grown(data: &Dataset) -> RuleTree {
    build_tree(data, &order(&ORDER), TreeOptions::default()).unwrap()
}

#[test]
fn leaves_partition_the_records() {
    let data = survey(1, 3000);
    let tree = grown(&data);
    let leaves = tree.leaves();
    assert_eq!(leaves.iter().map(|l| l.support).sum::<u64>(), data.len() as u64);
    let mut hits: BTreeMap<usize, u64> = BTreeMap::new();
    for r in data.records() {
        *hits.entry(tree.classify_rule(r).unwrap().rule.number).or_default() += 1;
    }
    for rule in tree.extract_rules(true) {
        assert_eq!(hits.get(&rule.number).copied().unwrap_or(0), rule.support, "rule {}", rule.number);
    }
}

#[test]
fn training_accuracy_is_at_least_the_majority_rate() {
    let data = survey(2, 3000);
    let tree = grown(&data);
    let labels = data.class_labels();
    let mut counts = vec![0usize; data.schema().n_classes()];
    labels.iter().for_each(|&c| counts[c] += 1);
    let majority = *counts.iter().max().unwrap() as f64 / labels.len() as f64;
    let correct = data
        .records()
        .iter()
        .zip(&labels)
        .filter(|(r, &y)| tree.classify_rule(r).unwrap().class == y)
        .count();
    assert!(correct as f64 / labels.len() as f64 >= majority);
}

#[test]
fn each_leaf_predicts_its_cell_majority() {
    let data = survey(3, 2000);
    let tree = grown(&data);
    let schema = data.schema();
    for rule in tree.extract_rules(false) {
        let mut counts = vec![0u64; schema.n_classes()];
        for r in data.records() {
            if rule.matches(&labelled(schema, r)) {
                counts[r[schema.class_index()]] += 1;
            }
        }
        assert_eq!(counts.iter().sum::<u64>(), rule.support);
        assert_eq!(counts[rule.class], *counts.iter().max().unwrap(), "rule {}", rule.number);
        let share = counts[rule.class] as f64 / rule.support as f64;
        assert!((share - rule.confidence).abs() < 1e-12);
    }
}

#[test]
fn classification_equals_a_linear_scan_over_the_rules() {
    let data = survey(4, 1500);
    let tree = grown(&data);
    let rules: Vec<Rule> = tree.extract_rules(true);
    let mut rng = XorShift64Star::new(44);
    let probe = common::uniform_data(data.schema(), 1000, &mut rng);
    for r in probe.records() {
        let labels = labelled(data.schema(), r);
        let matching: Vec<&Rule> = rules.iter().filter(|rule| rule.matches(&labels)).collect();
        assert_eq!(matching.len(), 1);
        let m = tree.classify_rule(r).unwrap();
        assert_eq!(m.rule.number, matching[0].number);
        assert_eq!(m.class, matching[0].class);
    }
}

#[test]
fn rule_numbers_cover_non_empty_leaves_first() {
    let data = survey(5, 800);
    let tree = grown(&data);
    let non_empty = tree.leaves().iter().filter(|l| l.support > 0).count();
    let plain = tree.extract_rules(false);
    assert_eq!(plain.len(), non_empty);
    assert!(plain.iter().enumerate().all(|(i, r)| r.number == i + 1 && !r.backoff));
    let all = tree.extract_rules(true);
    assert_eq!(all.len(), tree.leaves().len());
    assert!(all[non_empty..].iter().all(|r| r.backoff && r.support == 0));
}

#[test]
fn single_binary_attribute_gives_two_rules() {
    let data = survey(6, 1000);
    let tree = build_tree(&data, &order(&["Gender"]), TreeOptions::default()).unwrap();
    let text: Vec<String> = tree.extract_rules(false).iter().map(|r| r.text().render()).collect();
    assert_eq!(text.len(), 2);
    assert!(text[0].starts_with("Rule 1: Gender=Male\n "));
    assert!(text[1].starts_with("Rule 2: Gender=Female\n "));
    assert_eq!(tree.depth(), 1);
}

#[test]
fn stopping_rules_are_respected() {
    let data = survey(7, 2000);
    let shallow = build_tree(&data, &order(&ORDER), TreeOptions { min_support: 1, max_depth: Some(1) }).unwrap();
    assert_eq!(shallow.depth(), 1);
    let coarse = build_tree(&data, &order(&ORDER), TreeOptions { min_support: 400, max_depth: None }).unwrap();
    let fine = grown(&data);
    assert!(coarse.leaves().len() < fine.leaves().len());
    assert!(build_tree(&data, &order(&["Type of Further Education Desire"]), TreeOptions::default()).is_err());
    assert!(build_tree(&data, &order(&["Gender", "Gender"]), TreeOptions::default()).is_err());
}

#[test]
fn json_round_trip_and_schema_check() {
    let data = survey(8, 1000);
    let tree = grown(&data);
    let json = tree.to_json().unwrap();
    let back = RuleTree::from_json(&json, data.schema()).unwrap();
    assert_eq!(back.extract_rules(true), tree.extract_rules(true));
    let other = common::toy_schema(&[2], 3);
    assert!(RuleTree::from_json(&json, &other).is_err());
}
