//! Substitutions and syntactic unification with occurs check.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::term::{Literal, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("binding {var} to {term} would create a cycle")]
pub struct CyclicBinding {
    pub var: Var,
    pub term: Term,
}

/// A finite map from variables to terms.
///
/// Bindings may be stored in triangular form (a bound term may mention other
/// bound variables); [`Substitution::apply`] always resolves to a fixpoint,
/// and [`Substitution::normalized`] produces the equivalent idempotent map.
/// Construction through [`Substitution::bind`] rejects cycles, so resolution
/// always terminates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    bindings: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bindings(
        bindings: impl IntoIterator<Item = (Var, Term)>,
    ) -> Result<Self, CyclicBinding> {
        let mut s = Substitution::new();
        for (v, t) in bindings {
            s.bind(v, t)?;
        }
        Ok(s)
    }

    /// Adds `var ↦ term`. Fails if `var` occurs in the resolved `term`.
    /// Rebinding an already-bound variable replaces its binding.
    pub fn bind(&mut self, var: Var, term: Term) -> Result<(), CyclicBinding> {
        let resolved = self.apply(&term);
        if resolved == Term::Var(var.clone()) {
            return Ok(());
        }
        if resolved.occurs(&var) {
            return Err(CyclicBinding { var, term });
        }
        self.bindings.insert(var, term);
        Ok(())
    }

    pub fn get(&self, var: &Var) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.bindings.iter()
    }

    /// Follows variable-to-variable chains until a non-variable or an unbound
    /// variable is reached.
    fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.bindings.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    /// Replaces every bound variable, resolving to a fixpoint.
    pub fn apply(&self, t: &Term) -> Term {
        match self.walk(t) {
            Term::Var(v) => Term::Var(v.clone()),
            Term::App { functor, args } => Term::App {
                functor: functor.clone(),
                args: args.iter().map(|a| self.apply(a)).collect(),
            },
        }
    }

    pub fn apply_literal(&self, l: &Literal) -> Literal {
        Literal {
            atom: self.apply(&l.atom),
            negated: l.negated,
        }
    }

    /// The idempotent form: every range term is fully resolved.
    pub fn normalized(&self) -> Substitution {
        Substitution {
            bindings: self
                .bindings
                .keys()
                .map(|v| (v.clone(), self.apply(&Term::Var(v.clone()))))
                .collect(),
        }
    }

    /// Keeps only bindings for `vars`, fully resolved.
    pub fn restrict(&self, vars: &[Var]) -> Substitution {
        Substitution {
            bindings: vars
                .iter()
                .filter(|v| self.bindings.contains_key(*v))
                .map(|v| (v.clone(), self.apply(&Term::Var(v.clone()))))
                .collect(),
        }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} -> {t}")?;
        }
        f.write_str("}")
    }
}

/// Most general unifier of `a` and `b` extending `start`, or `None`.
/// The result is normalized.
pub fn unify(a: &Term, b: &Term, start: &Substitution) -> Option<Substitution> {
    let mut s = start.clone();
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = stack.pop() {
        let x = s.walk(&x).clone();
        let y = s.walk(&y).clone();
        match (x, y) {
            (Term::Var(v), Term::Var(w)) if v == w => {}
            (Term::Var(v), t) | (t, Term::Var(v)) => {
                if s.apply(&t).occurs(&v) {
                    return None;
                }
                s.bindings.insert(v, t);
            }
            (
                Term::App {
                    functor: f,
                    args: xs,
                },
                Term::App {
                    functor: g,
                    args: ys,
                },
            ) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                stack.extend(xs.into_iter().zip(ys).rev());
            }
        }
    }
    Some(s.normalized())
}

/// One-way matching: binds only variables of `pattern`.
/// `target` is treated as rigid (its variables never get bound).
pub fn match_term(pattern: &Term, target: &Term, start: &Substitution) -> Option<Substitution> {
    let mut s = start.clone();
    if match_into(pattern, target, &mut s) {
        Some(s)
    } else {
        None
    }
}

fn match_into(pattern: &Term, target: &Term, s: &mut Substitution) -> bool {
    match pattern {
        Term::Var(v) => match s.get(v) {
            Some(bound) => &s.apply(bound) == target,
            None => {
                s.bindings.insert(v.clone(), target.clone());
                true
            }
        },
        Term::App { functor, args } => match target {
            Term::App {
                functor: g,
                args: targs,
            } if functor == g && args.len() == targs.len() => {
                args.iter().zip(targs).all(|(p, t)| match_into(p, t, s))
            }
            _ => false,
        },
    }
}
