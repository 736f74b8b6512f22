use serde::{Deserialize, Serialize};

use super::Leaf;
use crate::error::{Error, Result};

const JOINER: &str = " ^ ";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub attribute: String,
    pub level: String,
}

/// A flattened root-to-leaf path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub number: usize,
    pub conditions: Vec<Condition>,
    pub consequent: String,
    pub class: usize,
    pub support: u64,
    pub confidence: f64,
    pub backoff: bool,
}

impl Rule {
    pub(super) fn from_leaf(leaf: &Leaf, conditions: Vec<Condition>) -> Rule {
        Rule {
            number: leaf.rule,
            conditions,
            consequent: leaf.label.clone(),
            class: leaf.class,
            support: leaf.support,
            confidence: leaf.confidence,
            backoff: leaf.backoff,
        }
    }

    pub fn text(&self) -> RuleText {
        RuleText {
            number: self.number,
            conditions: self.conditions.clone(),
            consequent: self.consequent.clone(),
        }
    }

    /// Whether the record's labels satisfy every condition.
    pub fn matches(&self, labels: &[(String, String)]) -> bool {
        self.conditions
            .iter()
            .all(|c| labels.iter().any(|(a, l)| *a == c.attribute && *l == c.level))
    }
}

/// The part of a rule that survives the text format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleText {
    pub number: usize,
    pub conditions: Vec<Condition>,
    pub consequent: String,
}

impl RuleText {
    /// `Rule N: A=x ^ B=y`, newline, the consequent indented by one space,
    /// newline.
    pub fn render(&self) -> String {
        let conds: Vec<String> = self
            .conditions
            .iter()
            .map(|c| format!("{}={}", c.attribute, c.level))
            .collect();
        let head = if conds.is_empty() {
            format!("Rule {}:", self.number)
        } else {
            format!("Rule {}: {}", self.number, conds.join(JOINER))
        };
        format!("{head}\n {}\n", self.consequent)
    }
}

/// Rules separated by one blank line.
pub fn render_rules<'a>(rules: impl IntoIterator<Item = &'a RuleText>) -> String {
    rules.into_iter().map(RuleText::render).collect::<Vec<_>>().join("\n")
}

/// Strict inverse of [`render_rules`].
pub fn parse_rules(text: &str) -> Result<Vec<RuleText>> {
    let err = |line: usize, message: &str| Error::RuleParse {
        line,
        message: message.to_string(),
    };
    let lines: Vec<&str> = text.split('\n').collect();
    // a trailing newline leaves one empty tail element
    let body = match lines.split_last() {
        Some((&"", rest)) => rest,
        _ if text.is_empty() => return Ok(Vec::new()),
        _ => return Err(err(lines.len(), "missing final newline")),
    };
    let mut out = Vec::new();
    let mut i = 0;
    while i < body.len() {
        if i > 0 {
            if !body[i].is_empty() {
                return Err(err(i + 1, "expected a blank line between rules"));
            }
            i += 1;
        }
        let header = *body.get(i).ok_or_else(|| err(i + 1, "expected a rule header"))?;
        let rest = header
            .strip_prefix("Rule ")
            .ok_or_else(|| err(i + 1, "header must start with `Rule `"))?;
        let (num, conds) = rest
            .split_once(':')
            .ok_or_else(|| err(i + 1, "header must contain `:`"))?;
        let number: usize = num.parse().map_err(|_| err(i + 1, "rule number is not an integer"))?;
        let conditions = match conds {
            "" => Vec::new(),
            _ => {
                let conds = conds
                    .strip_prefix(' ')
                    .ok_or_else(|| err(i + 1, "expected a space after `:`"))?;
                conds
                    .split(JOINER)
                    .map(|c| {
                        c.split_once('=')
                            .filter(|(a, l)| !a.is_empty() && !l.is_empty())
                            .map(|(a, l)| Condition {
                                attribute: a.to_string(),
                                level: l.to_string(),
                            })
                            .ok_or_else(|| err(i + 1, "condition must read `Attribute=Level`"))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        let line = *body.get(i + 1).ok_or_else(|| err(i + 2, "missing consequent line"))?;
        let consequent = line
            .strip_prefix(' ')
            .filter(|c| !c.is_empty() && !c.starts_with(' '))
            .ok_or_else(|| err(i + 2, "consequent must be indented by one space"))?;
        out.push(RuleText {
            number,
            conditions,
            consequent: consequent.to_string(),
        });
        i += 2;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cond(a: &str, l: &str) -> Condition {
        Condition {
            attribute: a.into(),
            level: l.into(),
        }
    }

    #[test]
    fn round_trip() {
        let rules = vec![
            RuleText {
                number: 1,
                conditions: vec![cond("A", "x"), cond("B", "y=z")],
                consequent: "C1".into(),
            },
            RuleText {
                number: 2,
                conditions: vec![],
                consequent: "Other Class".into(),
            },
        ];
        let text = render_rules(&rules);
        assert_eq!(text, "Rule 1: A=x ^ B=y=z\n C1\n\nRule 2:\n Other Class\n");
        assert_eq!(parse_rules(&text).unwrap(), rules);
        assert_eq!(parse_rules("").unwrap(), vec![]);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let e = parse_rules("Rule 1: A=x\n C1\nRule 2: A=y\n C2\n").unwrap_err();
        assert!(matches!(e, Error::RuleParse { line: 3, .. }));
        let e = parse_rules("Rule 1: A=x\nC1\n").unwrap_err();
        assert!(matches!(e, Error::RuleParse { line: 2, .. }));
        let e = parse_rules("Rule one: A=x\n C1\n").unwrap_err();
        assert!(matches!(e, Error::RuleParse { line: 1, .. }));
        assert!(parse_rules("Rule 1: A\n C1\n").is_err());
        assert!(parse_rules("Rule 1: A=x\n C1").is_err());
    }
}
