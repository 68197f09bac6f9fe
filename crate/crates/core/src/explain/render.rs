//! Deterministic text renderings of an explanation in six content styles.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lang::{parse_term, Literal, Term};

use super::Explanation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub enum ExplanationStyle {
    /// The key action alone.
    EA,
    /// The high-level goal alone.
    EG,
    /// The key action and the key contextual factors.
    #[default]
    EC,
    /// EC plus the action that follows the key action.
    ECR,
    /// EC plus every current belief.
    EB,
    /// The whole intention chain.
    EI,
}

impl ExplanationStyle {
    pub const ALL: [ExplanationStyle; 6] = [
        ExplanationStyle::EA,
        ExplanationStyle::EG,
        ExplanationStyle::EC,
        ExplanationStyle::ECR,
        ExplanationStyle::EB,
        ExplanationStyle::EI,
    ];
}

impl fmt::Display for ExplanationStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&format!("{self:?}"))
    }
}

impl FromStr for ExplanationStyle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExplanationStyle::ALL
            .into_iter()
            .find(|st| st.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown style `{s}` (expected EA, EG, EC, ECR, EB or EI)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("lexicon line {line}: {message}")]
pub struct LexiconError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum LexKey {
    Exact(Term),
    Signature(String, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct ActionPhrase {
    progressive: String,
    infinitive: String,
}

/// Predicate-to-phrase templates. `{1}`, `{2}`, ... stand for arguments.
///
/// ```text
/// [beliefs]
/// used/1 = {1} is used
/// holding(none) = I am holding nothing
///
/// [actions]
/// navigateTo/1 = moving to the {1} | move to the {1}
/// ```
///
/// Exact ground entries take precedence over `name/arity` entries. Terms
/// with no entry are rendered as written.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    beliefs: BTreeMap<LexKey, String>,
    actions: BTreeMap<LexKey, ActionPhrase>,
}

impl Lexicon {
    pub fn parse(src: &str) -> Result<Lexicon, LexiconError> {
        let mut lex = Lexicon::default();
        let mut section = None;
        for (n, raw) in src.lines().enumerate() {
            let line = n + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            if let Some(name) = text.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = match name {
                    "beliefs" | "actions" => Some(name.to_string()),
                    other => {
                        return Err(LexiconError {
                            line,
                            message: format!("unknown section [{other}]"),
                        })
                    }
                };
                continue;
            }
            let err = |message: String| LexiconError { line, message };
            let (key, phrase) = text
                .split_once('=')
                .ok_or_else(|| err("expected `key = phrase`".into()))?;
            let key = parse_key(key.trim()).map_err(err)?;
            let phrase = phrase.trim();
            match section.as_deref() {
                Some("beliefs") => {
                    lex.beliefs.insert(key, phrase.to_string());
                }
                Some("actions") => {
                    let (ing, inf) = phrase
                        .split_once('|')
                        .ok_or_else(|| err("action phrase needs `progressive | infinitive`".into()))?;
                    lex.actions.insert(
                        key,
                        ActionPhrase {
                            progressive: ing.trim().to_string(),
                            infinitive: inf.trim().to_string(),
                        },
                    );
                }
                _ => return Err(err("entry outside of a [beliefs] or [actions] section".into())),
            }
        }
        Ok(lex)
    }

    fn lookup<'a, V>(map: &'a BTreeMap<LexKey, V>, t: &Term) -> Option<&'a V> {
        map.get(&LexKey::Exact(t.clone())).or_else(|| {
            let (f, a) = t.signature()?;
            map.get(&LexKey::Signature(f.to_string(), a))
        })
    }

    pub fn belief(&self, l: &Literal) -> String {
        let positive = match Self::lookup(&self.beliefs, &l.atom) {
            Some(tpl) => fill(tpl, &l.atom),
            None => l.atom.to_string(),
        };
        if l.negated {
            format!("it is not the case that {positive}")
        } else {
            positive
        }
    }

    pub fn progressive(&self, action: &Term) -> String {
        match Self::lookup(&self.actions, action) {
            Some(p) => fill(&p.progressive, action),
            None => format!("doing {action}"),
        }
    }

    pub fn infinitive(&self, action: &Term) -> String {
        match Self::lookup(&self.actions, action) {
            Some(p) => fill(&p.infinitive, action),
            None => format!("do {action}"),
        }
    }
}

fn parse_key(key: &str) -> Result<LexKey, String> {
    if let Some((name, arity)) = key.split_once('/') {
        let arity = arity
            .trim()
            .parse()
            .map_err(|_| format!("bad arity in `{key}`"))?;
        return Ok(LexKey::Signature(name.trim().to_string(), arity));
    }
    let t = parse_term(key).map_err(|e| e.to_string())?;
    if !t.is_ground() {
        return Err(format!("`{key}` must be ground or of the form name/arity"));
    }
    Ok(LexKey::Exact(t))
}

fn fill(template: &str, t: &Term) -> String {
    let mut out = template.to_string();
    for (i, a) in t.args().iter().enumerate().rev() {
        out = out.replace(&format!("{{{}}}", i + 1), &a.to_string());
    }
    out
}

fn joined(items: impl IntoIterator<Item = String>, sep: &str) -> String {
    items.into_iter().collect::<Vec<_>>().join(sep)
}

fn contextual(e: &Explanation, lex: &Lexicon) -> String {
    let mut s = format!("I am {}", lex.progressive(&e.action));
    if e.key_action != e.action {
        s.push_str(" to ");
        s.push_str(&lex.infinitive(&e.key_action));
    }
    if !e.context.is_empty() {
        s.push_str(", because: ");
        s.push_str(&joined(e.context.literals().map(|l| lex.belief(l)), "; "));
    }
    s.push('.');
    s
}

/// Renders `e` in `style`. Total and deterministic.
pub fn render(e: &Explanation, style: ExplanationStyle, lex: &Lexicon) -> String {
    match style {
        ExplanationStyle::EA => format!("I will {}.", lex.infinitive(&e.key_action)),
        ExplanationStyle::EG => format!("I am working on: {}.", e.goal),
        ExplanationStyle::EC => contextual(e, lex),
        ExplanationStyle::ECR => {
            let tail = match &e.following_action {
                Some(a) => format!("Then I will {}.", lex.infinitive(a)),
                None => "No further action follows in this plan.".to_string(),
            };
            format!("{} {tail}", contextual(e, lex))
        }
        ExplanationStyle::EB => {
            let beliefs = if e.beliefs.is_empty() {
                "none".to_string()
            } else {
                joined(e.beliefs.iter().map(ToString::to_string), ", ")
            };
            format!("{} My current beliefs: {beliefs}.", contextual(e, lex))
        }
        ExplanationStyle::EI => {
            let chain = joined(
                e.intentions
                    .iter()
                    .map(|i| format!("{} for {} (step {} of {})", i.plan, i.trigger, i.step, i.len)),
                " > ",
            );
            format!("My current intentions: {chain}.")
        }
    }
}
