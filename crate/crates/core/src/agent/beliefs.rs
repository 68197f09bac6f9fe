//! Ground fact sets with closed-world conjunctive queries.

use indexmap::IndexSet;

use crate::lang::{match_term, Fluents, Literal, Substitution, Term};

/// Outcome of inserting a fact.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Insertion {
    pub added: bool,
    /// A previous value of the same state variable that was replaced.
    pub displaced: Option<Term>,
}

/// An insertion-ordered set of ground positive atoms. Values of declared
/// fluents are kept exclusive: inserting `p(k, v)` retracts any `p(k, w)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactSet {
    facts: IndexSet<Term>,
    fluents: Fluents,
}

impl FactSet {
    pub fn new(fluents: Fluents) -> Self {
        FactSet {
            facts: IndexSet::new(),
            fluents,
        }
    }

    pub fn fluents(&self) -> &Fluents {
        &self.fluents
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Term> {
        self.facts.iter()
    }

    pub fn contains(&self, atom: &Term) -> bool {
        self.facts.contains(atom)
    }

    /// The believed value of the state variable `atom` belongs to, if it
    /// differs from `atom`.
    pub fn rival_of(&self, atom: &Term) -> Option<&Term> {
        if !self.fluents.is_fluent(atom) {
            return None;
        }
        self.facts.iter().find(|f| self.fluents.excludes(atom, f))
    }

    /// `atom` must be ground.
    pub fn insert(&mut self, atom: Term) -> Insertion {
        debug_assert!(atom.is_ground());
        if self.facts.contains(&atom) {
            return Insertion::default();
        }
        let displaced = self.rival_of(&atom).cloned();
        if let Some(old) = &displaced {
            self.facts.shift_remove(old);
        }
        self.facts.insert(atom);
        Insertion {
            added: true,
            displaced,
        }
    }

    pub fn remove(&mut self, atom: &Term) -> bool {
        self.facts.shift_remove(atom)
    }

    /// No two facts contradict each other.
    pub fn is_consistent(&self) -> bool {
        self.facts.iter().enumerate().all(|(i, a)| {
            self.facts
                .iter()
                .skip(i + 1)
                .all(|b| !self.fluents.excludes(a, b))
        })
    }

    /// Truth of a single literal under the closed-world assumption; any
    /// variables left open are existential.
    pub fn holds(&self, l: &Literal) -> bool {
        let found = self
            .facts
            .iter()
            .any(|f| match_term(&l.atom, f, &Substitution::new()).is_some());
        found != l.negated
    }

    /// All answers to the conjunction `phi`, extending `start`.
    ///
    /// Positive literals are solved left to right against facts in insertion
    /// order; negated literals are checked afterwards under the closed-world
    /// assumption (`not p` holds iff no fact matches `p`).
    pub fn query_from(&self, phi: &[Literal], start: &Substitution) -> Vec<Substitution> {
        let positives: Vec<&Term> = phi.iter().filter(|l| !l.negated).map(|l| &l.atom).collect();
        let negatives: Vec<&Term> = phi.iter().filter(|l| l.negated).map(|l| &l.atom).collect();
        let mut out = Vec::new();
        self.solve(&positives, start.clone(), &mut |s| {
            let blocked = negatives
                .iter()
                .any(|n| self.facts.iter().any(|f| match_term(n, f, &s).is_some()));
            if !blocked {
                out.push(s);
            }
        });
        out
    }

    pub fn query(&self, phi: &[Literal]) -> Vec<Substitution> {
        self.query_from(phi, &Substitution::new())
    }

    fn solve(&self, goals: &[&Term], s: Substitution, emit: &mut impl FnMut(Substitution)) {
        let Some((first, rest)) = goals.split_first() else {
            emit(s);
            return;
        };
        for f in &self.facts {
            if let Some(next) = match_term(first, f, &s) {
                self.solve(rest, next, emit);
            }
        }
    }
}
