//! Forward selection of logit terms by deviance-difference tests, and the
//! deviance goodness-of-fit test against the pattern-saturated model.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::logit::{fit_with, FitOptions, FittedLogitModel, ModelSpec, ModelTerm};
use crate::stats::{chi_square_sf, fmt_real, ln_chi_square_sf};

pub const DEFAULT_SELECT_ALPHA: f64 = 0.05;
pub const LACK_OF_FIT_ALPHA: f64 = 0.05;

/// Relative difference under which two p-values count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

/// Deviance test of adding one term to a base model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateEvaluation {
    pub term: ModelTerm,
    pub deviance: f64,
    /// Base deviance minus candidate deviance, unclamped.
    pub delta_deviance: f64,
    pub delta_df: usize,
    /// `chi_square_sf(max(delta_deviance, 0), delta_df)`.
    pub p_value: f64,
    /// Natural log of `p_value`, finite even when `p_value` underflows.
    pub ln_p_value: f64,
    /// The raw deviance difference was negative and was clamped to 0 for the test.
    pub clamped: bool,
    pub converged: bool,
    /// Fit failure; such candidates carry p = 1 and never win.
    pub error: Option<String>,
}

impl CandidateEvaluation {
    pub fn from_deviances(term: ModelTerm, base_deviance: f64, deviance: f64, delta_df: usize) -> Self {
        let delta = base_deviance - deviance;
        let stat = delta.max(0.0);
        let ln_p = ln_chi_square_sf(stat, delta_df.max(1));
        CandidateEvaluation {
            term,
            deviance,
            delta_deviance: delta,
            delta_df,
            p_value: chi_square_sf(stat, delta_df.max(1)),
            ln_p_value: ln_p,
            clamped: delta < 0.0,
            converged: true,
            error: None,
        }
    }

    fn failed(term: ModelTerm, base_deviance: f64, message: String) -> Self {
        CandidateEvaluation {
            term,
            deviance: base_deviance,
            delta_deviance: 0.0,
            delta_df: 0,
            p_value: 1.0,
            ln_p_value: 0.0,
            clamped: false,
            converged: false,
            error: Some(message),
        }
    }
}

/// Refits `base` plus each candidate; results come back in input order.
///
/// Candidate fits run in parallel on the current rayon pool.
pub fn evaluate_candidates(
    data: &Dataset,
    base: &FittedLogitModel,
    candidates: &[ModelTerm],
    opts: &FitOptions,
) -> Vec<CandidateEvaluation> {
    candidates
        .par_iter()
        .map(|term| {
            if base.spec().contains(term) {
                return CandidateEvaluation::failed(term.clone(), base.deviance, format!("`{term}` already in model"));
            }
            let outcome = base
                .spec()
                .with_term(term.clone())
                .and_then(|spec| fit_with(data, &spec, opts));
            match outcome {
                Ok(m) => {
                    let mut ev = CandidateEvaluation::from_deviances(
                        term.clone(),
                        base.deviance,
                        m.deviance,
                        m.n_params - base.n_params,
                    );
                    ev.converged = m.converged;
                    ev
                }
                Err(e) => CandidateEvaluation::failed(term.clone(), base.deviance, e.to_string()),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Main,
    Interaction,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionStep {
    pub phase: Phase,
    pub base_terms: Vec<ModelTerm>,
    pub base_deviance: f64,
    pub evaluations: Vec<CandidateEvaluation>,
    pub winner: Option<ModelTerm>,
    /// More than one candidate shared the minimum p-value.
    pub tie: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub alpha: f64,
    pub steps: Vec<SelectionStep>,
    pub final_spec: ModelSpec,
    pub final_deviance: f64,
}

/// Where the interaction phase draws its candidates from.
#[derive(Debug, Clone)]
pub enum InteractionPool {
    /// Skip the interaction phase.
    None,
    Explicit(Vec<ModelTerm>),
    /// Every pair among the given attributes (typically the screened ones)
    /// together with the selected main effects.
    PairsOf(Vec<String>),
}

impl SelectionTrace {
    /// Main-effect attributes in order of entry.
    pub fn main_effect_order(&self) -> Vec<String> {
        self.winners(Phase::Main)
            .filter_map(|t| match t {
                ModelTerm::Main { attr } => Some(attr.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn accepted_interactions(&self) -> Vec<ModelTerm> {
        self.winners(Phase::Interaction).cloned().collect()
    }

    fn winners(&self, phase: Phase) -> impl Iterator<Item = &ModelTerm> {
        self.steps
            .iter()
            .filter(move |s| s.phase == phase)
            .filter_map(|s| s.winner.as_ref())
    }

    /// Attribute order for a fixed-order tree: main effects by entry, then
    /// the parents of accepted interactions not already present.
    pub fn tree_order(&self) -> Vec<String> {
        let mut order = self.main_effect_order();
        for t in self.accepted_interactions() {
            for a in t.attributes() {
                if !order.iter().any(|o| o == a) {
                    order.push(a.to_string());
                }
            }
        }
        order
    }

    /// One block per step: the base model row followed by every candidate.
    /// Columns: step, phase, term, raw_deviance, difference_in_deviance,
    /// difference_in_df, p_value, selected.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "step",
            "phase",
            "term",
            "raw_deviance",
            "difference_in_deviance",
            "difference_in_df",
            "p_value",
            "selected",
        ])
        .expect("in-memory write");
        for (i, s) in self.steps.iter().enumerate() {
            let step = (i + 1).to_string();
            let phase = match s.phase {
                Phase::Main => "main",
                Phase::Interaction => "interaction",
            };
            let base = if i == 0 { "Null Model".to_string() } else { format!("Model {i}") };
            w.write_record([&step, phase, &base, &fmt_real(s.base_deviance), "0", "-", "-", ""])
                .expect("in-memory write");
            for e in &s.evaluations {
                let selected = s.winner.as_ref() == Some(&e.term);
                w.write_record([
                    step.clone(),
                    phase.to_string(),
                    e.term.to_string(),
                    fmt_real(e.deviance),
                    fmt_real(e.delta_deviance),
                    e.delta_df.to_string(),
                    fmt_real(e.p_value),
                    if selected { "*".into() } else { String::new() },
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Picks the minimum-p candidate; ties (relative 1e-12) go to the earliest
/// term in canonical order. Returns the index and whether a tie occurred.
fn pick_winner(evals: &[CandidateEvaluation]) -> Option<(usize, bool)> {
    let usable: Vec<usize> = (0..evals.len()).filter(|&i| evals[i].error.is_none()).collect();
    let best = usable
        .iter()
        .map(|&i| evals[i].ln_p_value)
        .fold(f64::INFINITY, f64::min);
    let tied: Vec<usize> = usable
        .into_iter()
        .filter(|&i| evals[i].ln_p_value - best <= TIE_TOLERANCE)
        .collect();
    let winner = tied.iter().copied().min_by(|&a, &b| evals[a].term.cmp(&evals[b].term))?;
    Some((winner, tied.len() > 1))
}

fn accepts(ev: &CandidateEvaluation, alpha: f64) -> bool {
    alpha >= 1.0 || (alpha > 0.0 && ev.ln_p_value < alpha.ln())
}

/// Greedy forward selection: main effects first, then two-way interactions,
/// each step adding the minimum-p candidate while p < alpha.
pub fn forward_select(
    data: &Dataset,
    main_pool: &[String],
    interactions: &InteractionPool,
    alpha: f64,
    opts: &FitOptions,
) -> Result<SelectionTrace> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let mut current = fit_with(data, &ModelSpec::intercept_only(), opts)?;
    let mut steps = Vec::new();

    let mut pool: Vec<ModelTerm> = main_pool.iter().map(ModelTerm::main).collect();
    run_phase(data, Phase::Main, &mut pool, alpha, opts, &mut current, &mut steps)?;

    let mut pool = match interactions {
        InteractionPool::None => Vec::new(),
        InteractionPool::Explicit(terms) => terms.clone(),
        InteractionPool::PairsOf(attrs) => {
            let selected = steps
                .iter()
                .filter_map(|s: &SelectionStep| s.winner.as_ref())
                .flat_map(|t| t.attributes().into_iter().map(String::from))
                .collect::<Vec<_>>();
            all_pairs(&selected, attrs)?
        }
    };
    pool.retain(|t| !current.spec().contains(t));
    if !pool.is_empty() {
        run_phase(data, Phase::Interaction, &mut pool, alpha, opts, &mut current, &mut steps)?;
    }

    Ok(SelectionTrace {
        alpha,
        steps,
        final_deviance: current.deviance,
        final_spec: current.spec().clone(),
    })
}

fn run_phase(
    data: &Dataset,
    phase: Phase,
    pool: &mut Vec<ModelTerm>,
    alpha: f64,
    opts: &FitOptions,
    current: &mut FittedLogitModel,
    steps: &mut Vec<SelectionStep>,
) -> Result<()> {
    while !pool.is_empty() {
        let evaluations = evaluate_candidates(data, current, pool, opts);
        let picked = pick_winner(&evaluations).filter(|&(i, _)| accepts(&evaluations[i], alpha));
        let base_terms = current.spec().terms().to_vec();
        let base_deviance = current.deviance;
        let winner = picked.map(|(i, _)| evaluations[i].term.clone());
        let tie = picked.is_some_and(|(_, t)| t);
        steps.push(SelectionStep {
            phase,
            base_terms,
            base_deviance,
            evaluations,
            winner: winner.clone(),
            tie,
        });
        let Some(term) = winner else { break };
        *current = fit_with(data, &current.spec().with_term(term.clone())?, opts)?;
        pool.retain(|t| *t != term);
    }
    Ok(())
}

/// Distinct unordered pairs over the union of both attribute lists, in
/// first-appearance order.
pub fn all_pairs(selected: &[String], screened: &[String]) -> Result<Vec<ModelTerm>> {
    let mut attrs: Vec<&String> = Vec::new();
    for a in selected.iter().chain(screened) {
        if !attrs.contains(&a) {
            attrs.push(a);
        }
    }
    let mut out = Vec::new();
    for i in 0..attrs.len() {
        for j in i + 1..attrs.len() {
            out.push(ModelTerm::interaction(attrs[i], attrs[j])?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoodnessOfFit {
    pub deviance: f64,
    pub residual_df: usize,
    pub p_value: f64,
    pub lack_of_fit: bool,
    pub patterns: usize,
}

impl GoodnessOfFit {
    pub fn from_deviance(deviance: f64, residual_df: usize) -> Self {
        let p_value = chi_square_sf(deviance.max(0.0), residual_df);
        GoodnessOfFit {
            deviance,
            residual_df,
            p_value,
            lack_of_fit: p_value < LACK_OF_FIT_ALPHA,
            patterns: 0,
        }
    }
}

/// Deviance of `model` against the saturated model over the covariate
/// patterns of the attributes it uses, with the number of patterns.
pub fn saturated_deviance(model: &FittedLogitModel, data: &Dataset) -> Result<(f64, usize)> {
    let m = &model.model;
    let schema = data.schema();
    if schema != m.schema() {
        return Err(Error::InvalidArgument("model and data use different schemas".into()));
    }
    let attrs = m
        .spec()
        .attributes()
        .into_iter()
        .map(|a| schema.index_of(a))
        .collect::<Result<Vec<_>>>()?;
    let class = schema.class_index();
    let k = schema.n_classes();
    let mut patterns: BTreeMap<Vec<usize>, (Vec<f64>, &[usize])> = BTreeMap::new();
    for r in data.records() {
        let key: Vec<usize> = attrs.iter().map(|&a| r[a]).collect();
        patterns.entry(key).or_insert_with(|| (vec![0.0; k], r)).0[r[class]] += 1.0;
    }
    let mut deviance = 0.0;
    for (counts, example) in patterns.values() {
        let total: f64 = counts.iter().sum();
        let probs = m.predict_proba(example)?;
        for (&n, &p) in counts.iter().zip(&probs) {
            if n > 0.0 {
                deviance += 2.0 * n * (n / (total * p)).ln();
            }
        }
    }
    Ok((deviance.max(0.0), patterns.len()))
}

/// Deviance test of H0 "no lack of fit" against the pattern-saturated model.
pub fn goodness_of_fit(model: &FittedLogitModel, data: &Dataset) -> Result<GoodnessOfFit> {
    let (deviance, patterns) = saturated_deviance(model, data)?;
    let k = data.schema().n_classes();
    let saturated_params = (k - 1) * patterns;
    if saturated_params <= model.n_params {
        return Err(Error::InvalidArgument(format!(
            "residual df {} - {} is not positive; the model is saturated",
            saturated_params, model.n_params
        )));
    }
    let mut g = GoodnessOfFit::from_deviance(deviance, saturated_params - model.n_params);
    g.patterns = patterns;
    Ok(g)
}
