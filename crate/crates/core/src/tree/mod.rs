//! Fixed-order stratification tree and its conjunction rules.
//!
//! The split attributes follow a caller-supplied order (normally the order in
//! which forward selection admitted the main effects); nothing is chosen by
//! impurity.

mod rules;

pub use rules::{parse_rules, render_rules, Condition, Rule, RuleText};

use serde::{Deserialize, Serialize};

use crate::data::{AttributeSchema, Dataset, Record};
use crate::error::{Error, Result};
use crate::logit::argmax;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeOptions {
    /// Nodes holding fewer records than this become leaves.
    pub min_support: u64,
    /// Caps the depth below the length of the attribute order.
    pub max_depth: Option<usize>,
}

impl Default for TreeOptions {
    fn default() -> Self {
        TreeOptions {
            min_support: 1,
            max_depth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    pub class: usize,
    pub label: String,
    pub support: u64,
    pub class_counts: Vec<u64>,
    /// Majority share; for a backoff leaf, that of the parent.
    pub confidence: f64,
    /// An empty cell that inherited its parent's majority.
    pub backoff: bool,
    /// Rule number; non-empty leaves come first in depth-first order.
    pub rule: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Split {
        attribute: String,
        support: u64,
        class_counts: Vec<u64>,
        /// One child per level, in level order.
        children: Vec<Node>,
    },
    Leaf(Leaf),
}

impl Node {
    pub fn support(&self) -> u64 {
        match self {
            Node::Split { support, .. } => *support,
            Node::Leaf(l) => l.support,
        }
    }
}

/// On-disk tree: `tree.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeArtifact {
    pub schema_hash: String,
    pub ordered_attrs: Vec<String>,
    pub root: Node,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleTree {
    schema: AttributeSchema,
    ordered_attrs: Vec<String>,
    attr_index: Vec<usize>,
    root: Node,
}

/// Result of routing one record down the tree.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleMatch {
    pub class: usize,
    pub rule: Rule,
}

fn resolve_order(schema: &AttributeSchema, ordered_attrs: &[String]) -> Result<Vec<usize>> {
    let mut idx = Vec::with_capacity(ordered_attrs.len());
    for name in ordered_attrs {
        let i = schema.index_of(name)?;
        if i == schema.class_index() {
            return Err(Error::InvalidArgument(format!(
                "class attribute `{name}` cannot be a split attribute"
            )));
        }
        if idx.contains(&i) {
            return Err(Error::InvalidArgument(format!("attribute `{name}` listed twice")));
        }
        idx.push(i);
    }
    Ok(idx)
}

/// Builds the tree by stratifying `data` on `ordered_attrs` in turn.
pub fn build_tree(data: &Dataset, ordered_attrs: &[String], opts: TreeOptions) -> Result<RuleTree> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("cannot build a tree from an empty dataset".into()));
    }
    let schema = data.schema().clone();
    let attr_index = resolve_order(&schema, ordered_attrs)?;
    let depth_cap = opts.max_depth.map_or(attr_index.len(), |d| d.min(attr_index.len()));
    let builder = Builder {
        schema: &schema,
        attr_index: &attr_index,
        class: schema.class_index(),
        depth_cap,
        min_support: opts.min_support,
    };
    let rows: Vec<&Record> = data.records().iter().collect();
    let mut root = builder.grow(&rows, 0, None);
    number_leaves(&mut root);
    Ok(RuleTree {
        schema,
        ordered_attrs: ordered_attrs.to_vec(),
        attr_index,
        root,
    })
}

struct Builder<'a> {
    schema: &'a AttributeSchema,
    attr_index: &'a [usize],
    class: usize,
    depth_cap: usize,
    min_support: u64,
}

impl Builder<'_> {
    fn grow(&self, rows: &[&Record], depth: usize, parent: Option<&[u64]>) -> Node {
        let k = self.schema.n_classes();
        let mut counts = vec![0u64; k];
        for r in rows {
            counts[r[self.class]] += 1;
        }
        let support = rows.len() as u64;
        if support == 0 {
            let parent = parent.expect("root is never empty");
            return self.leaf(parent, vec![0; k], true);
        }
        let pure = counts.iter().filter(|&&c| c > 0).count() == 1;
        if pure || depth == self.depth_cap || support < self.min_support {
            return self.leaf(&counts, counts.clone(), false);
        }
        let attr = self.attr_index[depth];
        let n_levels = self.schema.attribute(attr).n_levels();
        let mut parts: Vec<Vec<&Record>> = vec![Vec::new(); n_levels];
        for r in rows {
            parts[r[attr]].push(r);
        }
        let children = parts
            .iter()
            .map(|part| self.grow(part, depth + 1, Some(&counts)))
            .collect();
        Node::Split {
            attribute: self.schema.attribute(attr).name.clone(),
            support,
            class_counts: counts,
            children,
        }
    }

    /// `majority_of` picks the class; `class_counts` is what the leaf itself holds.
    fn leaf(&self, majority_of: &[u64], class_counts: Vec<u64>, backoff: bool) -> Node {
        let as_f: Vec<f64> = majority_of.iter().map(|&c| c as f64).collect();
        let class = argmax(&as_f);
        let total: u64 = majority_of.iter().sum();
        Node::Leaf(Leaf {
            class,
            label: self.schema.class_attribute().levels[class].clone(),
            support: class_counts.iter().sum(),
            confidence: majority_of[class] as f64 / total as f64,
            class_counts,
            backoff,
            rule: 0,
        })
    }
}

fn number_leaves(root: &mut Node) {
    fn visit(node: &mut Node, backoff: bool, next: &mut usize) {
        match node {
            Node::Split { children, .. } => children.iter_mut().for_each(|c| visit(c, backoff, next)),
            Node::Leaf(l) if l.backoff == backoff => {
                *next += 1;
                l.rule = *next;
            }
            Node::Leaf(_) => {}
        }
    }
    let mut next = 0;
    visit(root, false, &mut next);
    visit(root, true, &mut next);
}

impl RuleTree {
    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn ordered_attrs(&self) -> &[String] {
        &self.ordered_attrs
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Leaves in depth-first, level-index order.
    pub fn leaves(&self) -> Vec<&Leaf> {
        fn walk<'a>(node: &'a Node, out: &mut Vec<&'a Leaf>) {
            match node {
                Node::Split { children, .. } => children.iter().for_each(|c| walk(c, out)),
                Node::Leaf(l) => out.push(l),
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    pub fn depth(&self) -> usize {
        fn walk(node: &Node) -> usize {
            match node {
                Node::Split { children, .. } => 1 + children.iter().map(walk).max().unwrap_or(0),
                Node::Leaf(_) => 0,
            }
        }
        walk(&self.root)
    }

    /// Flattens the tree into rules, ordered by rule number.
    pub fn extract_rules(&self, include_backoff: bool) -> Vec<Rule> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect(&self.root, 0, &mut path, include_backoff, &mut out);
        out.sort_by_key(|r| r.number);
        out
    }

    fn collect(&self, node: &Node, depth: usize, path: &mut Vec<Condition>, backoff: bool, out: &mut Vec<Rule>) {
        match node {
            Node::Leaf(l) => {
                if backoff || !l.backoff {
                    out.push(Rule::from_leaf(l, path.clone()));
                }
            }
            Node::Split { children, .. } => {
                let attr = self.schema.attribute(self.attr_index[depth]);
                for (level, child) in children.iter().enumerate() {
                    path.push(Condition {
                        attribute: attr.name.clone(),
                        level: attr.levels[level].clone(),
                    });
                    self.collect(child, depth + 1, path, backoff, out);
                    path.pop();
                }
            }
        }
    }

    /// Routes a record to its leaf. Only the split attributes are read, but the
    /// whole record must conform to the schema.
    pub fn classify_rule(&self, record: &[usize]) -> Result<RuleMatch> {
        self.schema.check_record(record)?;
        let mut node = &self.root;
        let mut path = Vec::new();
        let mut depth = 0;
        loop {
            match node {
                Node::Leaf(l) => {
                    return Ok(RuleMatch {
                        class: l.class,
                        rule: Rule::from_leaf(l, path),
                    })
                }
                Node::Split { children, .. } => {
                    let a = self.attr_index[depth];
                    let attr = self.schema.attribute(a);
                    path.push(Condition {
                        attribute: attr.name.clone(),
                        level: attr.levels[record[a]].clone(),
                    });
                    node = &children[record[a]];
                    depth += 1;
                }
            }
        }
    }

    pub fn to_artifact(&self) -> TreeArtifact {
        TreeArtifact {
            schema_hash: self.schema.hash(),
            ordered_attrs: self.ordered_attrs.clone(),
            root: self.root.clone(),
        }
    }

    /// Rebuilds a tree from its artifact, checking every node against `schema`.
    pub fn from_artifact(artifact: TreeArtifact, schema: &AttributeSchema) -> Result<Self> {
        if artifact.schema_hash != schema.hash() {
            return Err(Error::InvalidArgument("tree artifact was built against a different schema".into()));
        }
        let attr_index = resolve_order(schema, &artifact.ordered_attrs)?;
        let tree = RuleTree {
            schema: schema.clone(),
            ordered_attrs: artifact.ordered_attrs,
            attr_index,
            root: artifact.root,
        };
        tree.validate(&tree.root, 0)?;
        let mut numbers: Vec<usize> = tree.leaves().iter().map(|l| l.rule).collect();
        numbers.sort_unstable();
        if numbers.iter().enumerate().any(|(i, &n)| n != i + 1) {
            return Err(Error::InvalidArgument("tree artifact rule numbers are not 1..n".into()));
        }
        Ok(tree)
    }

    fn validate(&self, node: &Node, depth: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(format!("tree artifact: {msg}")));
        let k = self.schema.n_classes();
        match node {
            Node::Leaf(l) => {
                if l.class >= k || l.class_counts.len() != k {
                    return bad(format!("leaf for rule {} has an invalid class", l.rule));
                }
                if self.schema.class_attribute().levels[l.class] != l.label {
                    return bad(format!("leaf for rule {} label does not match its class", l.rule));
                }
                Ok(())
            }
            Node::Split { attribute, children, class_counts, .. } => {
                let Some(&a) = self.attr_index.get(depth) else {
                    return bad(format!("split below the last ordered attribute at depth {depth}"));
                };
                let attr = self.schema.attribute(a);
                if attr.name != *attribute {
                    return bad(format!("depth {depth} splits on `{attribute}`, expected `{}`", attr.name));
                }
                if children.len() != attr.n_levels() || class_counts.len() != k {
                    return bad(format!("split on `{attribute}` has the wrong arity"));
                }
                children.iter().try_for_each(|c| self.validate(c, depth + 1))
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_artifact())?)
    }

    pub fn from_json(text: &str, schema: &AttributeSchema) -> Result<Self> {
        RuleTree::from_artifact(serde_json::from_str(text)?, schema)
    }
}
