//! First-order terms and literals.
//!
//! Variables are capitalized identifiers (or start with `_`), constants and
//! functors are lowercase identifiers, following AgentSpeak conventions.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A logic variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A first-order term: a variable or a functor applied to arguments.
/// Constants are zero-arity applications.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    App { functor: String, args: Vec<Term> },
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::App {
            functor: name.into(),
            args: Vec::new(),
        }
    }

    pub fn app(functor: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App {
            functor: functor.into(),
            args,
        }
    }

    /// Functor name, or `None` for a variable.
    pub fn functor(&self) -> Option<&str> {
        match self {
            Term::Var(_) => None,
            Term::App { functor, .. } => Some(functor),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App { args, .. } => args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args().len()
    }

    /// `(functor, arity)` for an application.
    pub fn signature(&self) -> Option<(&str, usize)> {
        self.functor().map(|f| (f, self.arity()))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App { args, .. } => args.iter().all(Term::is_ground),
        }
    }

    /// All variables, in first-occurrence order.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn occurs(&self, var: &Var) -> bool {
        match self {
            Term::Var(v) => v == var,
            Term::App { args, .. } => args.iter().any(|a| a.occurs(var)),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App { args, .. } => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Rename every variable with `f`.
    pub fn rename(&self, f: &impl Fn(&Var) -> Var) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v)),
            Term::App { functor, args } => Term::App {
                functor: functor.clone(),
                args: args.iter().map(|a| a.rename(f)).collect(),
            },
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App { functor, args } => {
                f.write_str(functor)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for Term {
    type Err = crate::lang::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::lang::parse_term(s)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// An atom with optional classical negation, written `not p(..)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Term,
    pub negated: bool,
}

impl Literal {
    pub fn pos(atom: Term) -> Self {
        Literal {
            atom,
            negated: false,
        }
    }

    pub fn neg(atom: Term) -> Self {
        Literal {
            atom,
            negated: true,
        }
    }

    /// Flips the sign; the atom is untouched.
    pub fn complement(&self) -> Self {
        Literal {
            atom: self.atom.clone(),
            negated: !self.negated,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.atom.is_ground()
    }

    pub fn vars(&self) -> Vec<Var> {
        self.atom.vars()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        write!(f, "{}", self.atom)
    }
}

impl FromStr for Literal {
    type Err = crate::lang::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::lang::parse_literal(s)
    }
}

impl Serialize for Literal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Predicates declared as state variables: the last argument is the value,
/// the preceding arguments are the key. Two facts with the same key and
/// different values are mutually exclusive.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Fluents {
    decls: BTreeSet<(String, usize)>,
}

impl Fluents {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns `false` if already declared.
    pub fn declare(&mut self, functor: impl Into<String>, arity: usize) -> bool {
        self.decls.insert((functor.into(), arity))
    }

    pub fn contains(&self, functor: &str, arity: usize) -> bool {
        self.decls.contains(&(functor.to_string(), arity))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.decls.iter().map(|(f, a)| (f.as_str(), *a))
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    pub fn is_fluent(&self, atom: &Term) -> bool {
        match atom.signature() {
            Some((f, a)) if a > 0 => self.contains(f, a),
            _ => false,
        }
    }

    /// Both atoms are values of the same state variable and differ in value.
    pub fn excludes(&self, a: &Term, b: &Term) -> bool {
        if !self.is_fluent(a) || a.signature() != b.signature() {
            return false;
        }
        let n = a.arity();
        a.args()[..n - 1] == b.args()[..n - 1] && a.args()[n - 1] != b.args()[n - 1]
    }

    /// Two literals contradict each other: classical complements, or two
    /// positive values of the same state variable.
    pub fn conflicting(&self, a: &Literal, b: &Literal) -> bool {
        if a.atom == b.atom {
            return a.negated != b.negated;
        }
        !a.negated && !b.negated && self.excludes(&a.atom, &b.atom)
    }
}
