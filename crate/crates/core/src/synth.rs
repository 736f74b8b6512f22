//! Seeded synthetic survey data drawn from a ground-truth logit model.
//!
//! Randomness comes from xorshift64* (shifts 12, 25, 27; multiplier
//! 0x2545F4914F6CDD1D), seeded by one round of splitmix64 (increment
//! 0x9E3779B97F4A7C15, multipliers 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB).
//! Uniform reals take the top 53 bits of each output. Categorical draws use
//! inverse-CDF search over the probability vector in level order. For each
//! record the predictors are drawn first in schema order, then the class.

use serde::{Deserialize, Serialize};

use crate::data::{AttributeSchema, Dataset};
use crate::error::{Error, Result};
use crate::logit::{LogitModel, ModelSpec, ModelTerm};

/// xorshift64* generator.
#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        XorShift64Star {
            state: if z == 0 { 0x2545_F491_4F6C_DD1D } else { z },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, n).
    pub fn below(&mut self, n: usize) -> usize {
        ((self.next_f64() * n as f64) as usize).min(n - 1)
    }

    /// Index drawn from a probability vector.
    pub fn categorical(&mut self, probs: &[f64]) -> usize {
        let u = self.next_f64();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.len() - 1
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

/// Ground-truth coefficients in the same layout as a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthModel {
    pub terms: Vec<ModelTerm>,
    pub baseline_class: usize,
    pub coefficients: Vec<Vec<f64>>,
}

/// A predictor drawn conditionally on an earlier attribute rather than from its marginal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalTable {
    pub attribute: String,
    pub parent: String,
    /// One probability vector per parent level.
    pub table: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub schema: AttributeSchema,
    /// One probability vector per predictor, in schema order.
    pub predictor_marginals: Vec<Vec<f64>>,
    pub truth_model: TruthModel,
    #[serde(default)]
    pub dependencies: Vec<ConditionalTable>,
    pub seed: u64,
    pub n: usize,
}

fn check_probs(what: &str, probs: &[f64], len: usize) -> Result<()> {
    if probs.len() != len {
        return Err(Error::InvalidArgument(format!(
            "{what}: expected {len} probabilities, got {}",
            probs.len()
        )));
    }
    if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("{what}: probabilities must be in [0,1] and sum to 1")));
    }
    Ok(())
}

impl GeneratorSpec {
    pub fn truth(&self) -> Result<LogitModel> {
        LogitModel::new(
            self.schema.clone(),
            ModelSpec::new(self.truth_model.terms.clone())?,
            self.truth_model.baseline_class,
            self.truth_model.coefficients.clone(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let preds = self.schema.predictor_indices();
        if self.predictor_marginals.len() != preds.len() {
            return Err(Error::InvalidArgument(format!(
                "need {} predictor marginals, got {}",
                preds.len(),
                self.predictor_marginals.len()
            )));
        }
        for (&i, probs) in preds.iter().zip(&self.predictor_marginals) {
            let a = self.schema.attribute(i);
            check_probs(&a.name, probs, a.n_levels())?;
        }
        for dep in &self.dependencies {
            let ai = self.schema.index_of(&dep.attribute)?;
            let pi = self.schema.index_of(&dep.parent)?;
            if ai == self.schema.class_index() || pi == self.schema.class_index() || pi >= ai {
                return Err(Error::InvalidArgument(format!(
                    "dependency `{}` on `{}` must link predictors, parent first",
                    dep.attribute, dep.parent
                )));
            }
            if dep.table.len() != self.schema.attribute(pi).n_levels() {
                return Err(Error::InvalidArgument(format!("dependency table for `{}` has wrong row count", dep.attribute)));
            }
            for row in &dep.table {
                check_probs(&dep.attribute, row, self.schema.attribute(ai).n_levels())?;
            }
        }
        self.truth()?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GeneratorSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Parent index and per-parent-level table of a conditionally drawn attribute.
type Conditional<'a> = Option<(usize, &'a [Vec<f64>])>;

/// Draws `spec.n` records. Identical specs give identical datasets.
pub fn generate(spec: &GeneratorSpec) -> Result<Dataset> {
    spec.validate()?;
    let truth = spec.truth()?;
    let schema = &spec.schema;
    let class = schema.class_index();
    let preds = schema.predictor_indices();
    let deps: Vec<Conditional> = (0..schema.len())
        .map(|i| {
            spec.dependencies
                .iter()
                .find(|d| d.attribute == schema.attribute(i).name)
                .map(|d| (schema.index_of(&d.parent).expect("validated"), d.table.as_slice()))
        })
        .collect();

    let mut rng = XorShift64Star::new(spec.seed);
    let mut records = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let mut r = vec![0usize; schema.len()];
        for (&i, marginal) in preds.iter().zip(&spec.predictor_marginals) {
            r[i] = match deps[i] {
                Some((parent, table)) => rng.categorical(&table[r[parent]]),
                None => rng.categorical(marginal),
            };
        }
        let probs = truth.predict_proba(&r)?;
        r[class] = rng.categorical(&probs);
        records.push(r);
    }
    Dataset::new(schema.clone(), records)
}

/// Mprob levels whose Finp interaction swaps the two non-reference Finp effects.
const SWAPPED_MPROB_LEVELS: [usize; 3] = [0, 1, 2];

/// Default generator over the youth-survey schema.
///
/// Activity and education carry the strongest effects, then province,
/// gender, social class and age. Financial situation in past has opposite
/// effects for its first two levels, and for three of the eight
/// major-problem levels an interaction swaps those two effects, leaving a
/// weak marginal past-finance effect. Those two levels have equal marginals,
/// so the problem attribute has no main-effect coefficients and its
/// predictor averages to zero over past finance; only the interaction
/// carries it.
pub fn default_paper_spec(seed: u64, n: usize) -> GeneratorSpec {
    let schema = AttributeSchema::youth_survey();
    let activity = "Type of Activity";
    let education = "Educational Level";
    let province = "Province";
    let gender = "Gender";
    let social = "Social Class";
    let age = "Age Group";
    let finp = "Financial Situation in Past";
    let mprob = "Major Problems with Education";

    // log-odds against "No Desire": [technical/vocational, university]
    let intercept = [-0.2, -0.4];
    let activity_fx: [[f64; 6]; 2] = [
        [-1.6, 0.4, -0.8, 1.4, 1.0, -1.2],
        [-2.2, -0.6, -1.6, 0.4, 2.6, -1.8],
    ];
    let education_fx: [[f64; 2]; 2] = [[-1.0, 0.4], [-3.0, -1.4]];
    let province_fx: [[f64; 8]; 2] = [
        [0.4, -0.2, 0.1, -0.4, -0.3, 0.2, 0.0, 0.3],
        [0.6, 0.1, 0.2, -0.5, -0.4, 0.0, -0.2, 0.1],
    ];
    let gender_fx = [[0.4], [-0.3]];
    let social_fx = [[-0.3, 0.1, 0.3], [0.8, 0.5, 0.0]];
    let age_fx = [[0.3, 0.2], [0.6, 0.3]];
    let finp_fx = [[0.8, -0.8], [0.6, -0.6]];

    let mprob_levels = schema.by_name(mprob).expect("schema attr").n_levels();
    let terms = vec![
        ModelTerm::Intercept,
        ModelTerm::main(activity),
        ModelTerm::main(education),
        ModelTerm::main(province),
        ModelTerm::main(gender),
        ModelTerm::main(social),
        ModelTerm::main(age),
        ModelTerm::main(finp),
        ModelTerm::interaction(finp, mprob).expect("distinct"),
    ];
    // canonical interaction order is (Financial..., Major...), so rows run over
    // finp dummies and columns over mprob dummies
    let finp_first = matches!(&terms[8], ModelTerm::Interaction { a, .. } if a == finp);
    assert!(finp_first);

    let mut coefficients = Vec::new();
    for f in 0..2 {
        let mut row = vec![intercept[f]];
        row.extend(activity_fx[f]);
        row.extend(education_fx[f]);
        row.extend(province_fx[f]);
        row.extend(gender_fx[f]);
        row.extend(social_fx[f]);
        row.extend(age_fx[f]);
        row.extend(finp_fx[f]);
        let swap = finp_fx[f][1] - finp_fx[f][0];
        for finp_level in 0..2 {
            for m in 0..mprob_levels - 1 {
                let v = if SWAPPED_MPROB_LEVELS.contains(&m) {
                    if finp_level == 0 {
                        swap
                    } else {
                        -swap
                    }
                } else {
                    0.0
                };
                row.push(v);
            }
        }
        coefficients.push(row);
    }

    let predictor_marginals = vec![
        vec![0.22, 0.12, 0.10, 0.18, 0.22, 0.10, 0.06],
        vec![0.30, 0.45, 0.25],
        vec![0.25, 0.13, 0.12, 0.08, 0.08, 0.11, 0.07, 0.07, 0.09],
        vec![0.5, 0.5],
        vec![0.10, 0.40, 0.40, 0.10],
        vec![0.35, 0.35, 0.30],
        vec![0.35, 0.35, 0.30],
        vec![1.0 / 8.0; 8],
    ];

    GeneratorSpec {
        truth_model: TruthModel {
            terms,
            baseline_class: schema.baseline_class(),
            coefficients,
        },
        schema,
        predictor_marginals,
        dependencies: Vec::new(),
        seed,
        n,
    }
}
