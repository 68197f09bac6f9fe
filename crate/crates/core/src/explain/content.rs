//! What to explain: the hierarchical intention context and the action
//! suffix up to the first action that changes it.

use serde::{Deserialize, Serialize};

use crate::agent::{IntentionId, IntentionNode, IntentionTree};
use crate::lang::{unify, Fluents, Literal, PlanLibrary, Step, Substitution, Term};

use super::ExplainError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextEntry {
    pub literal: Literal,
    /// The intention whose context contributed this literal first.
    pub from: IntentionId,
}

/// Union of grounded context conditions along an intention chain, ordered
/// root first and deduplicated.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HierarchicalContext {
    entries: Vec<ContextEntry>,
}

impl HierarchicalContext {
    pub fn entries(&self) -> &[ContextEntry] {
        &self.entries
    }

    pub fn literals(&self) -> impl Iterator<Item = &Literal> {
        self.entries.iter().map(|e| &e.literal)
    }

    pub fn contains(&self, l: &Literal) -> bool {
        self.literals().any(|x| x == l)
    }

    pub fn provenance(&self, l: &Literal) -> Option<IntentionId> {
        self.entries.iter().find(|e| &e.literal == l).map(|e| e.from)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn add(&mut self, literal: Literal, from: IntentionId) {
        if !self.contains(&literal) {
            self.entries.push(ContextEntry { literal, from });
        }
    }
}

/// Context of `id` together with every ancestor's, root first.
pub fn hierarchical_context(tree: &IntentionTree, id: IntentionId) -> HierarchicalContext {
    let mut chain: Vec<&IntentionNode> = tree.parents(id);
    chain.reverse();
    chain.extend(tree.get(id));
    let mut ctx = HierarchicalContext::default();
    for node in chain {
        for l in &node.grounded_context {
            ctx.add(l.clone(), node.id);
        }
    }
    ctx
}

/// Whether an effect atom can change the truth of a context literal: the
/// atoms are equal (in either sign), or they are rival values of one state
/// variable. Effects with open variables count when they could unify.
pub fn modifies(effect: &Term, condition: &Literal, fluents: &Fluents) -> bool {
    let eff = Literal::pos(effect.clone());
    if effect.is_ground() && condition.is_ground() {
        return eff.atom == condition.atom || fluents.conflicting(condition, &eff);
    }
    if unify(effect, &condition.atom, &Substitution::new()).is_some() {
        return true;
    }
    if condition.negated || !fluents.is_fluent(effect) || effect.signature() != condition.atom.signature() {
        return false;
    }
    let n = effect.arity();
    let key = |t: &Term| Term::app("k", t.args()[..n - 1].to_vec());
    unify(&key(effect), &key(&condition.atom), &Substitution::new()).is_some()
}

/// Does `action` (ground) have an effect that touches any literal of `ctx`?
pub fn action_modifies(action: &Term, ctx: &HierarchicalContext, lib: &PlanLibrary) -> bool {
    let Some(effects) = lib.schema_for(action).and_then(|s| s.effects_for(action)) else {
        return false;
    };
    effects
        .iter()
        .any(|e| ctx.literals().any(|c| modifies(&e.atom, c, &lib.fluents)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntentionSummary {
    pub id: IntentionId,
    pub plan: String,
    pub trigger: String,
    /// 1-based index of the step being worked on.
    pub step: usize,
    pub len: usize,
}

/// An explanation for a surprising action: the hierarchical context and the
/// actions from the surprising one up to the key action that changes that
/// context, plus a snapshot used by the richer renderings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Explanation {
    pub action: Term,
    pub intention: IntentionId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predecessor: Option<Term>,
    pub context: HierarchicalContext,
    pub suffix: Vec<Term>,
    pub key_action: Term,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub following_action: Option<Term>,
    /// Goal of the root intention.
    pub goal: Term,
    /// Root first.
    pub intentions: Vec<IntentionSummary>,
    #[serde(default)]
    pub beliefs: Vec<Term>,
}

/// Builds the explanation content for the action at body index `index` of
/// intention `id`.
///
/// Sub-goal steps are skipped when scanning; the suffix lists actions only.
/// When no action changes the context the suffix runs to the last action
/// of the body.
pub fn explanation_content(
    tree: &IntentionTree,
    id: IntentionId,
    index: usize,
    lib: &PlanLibrary,
) -> Result<Explanation, ExplainError> {
    let node = tree.get(id).ok_or(ExplainError::UnknownIntention(id))?;
    let action = match node.grounded_step(index) {
        Some(Step::Action(a)) => a,
        Some(Step::SubGoal(_)) => return Err(ExplainError::NotAnAction { intention: id, index }),
        None => {
            return Err(ExplainError::IndexOutOfRange {
                intention: id,
                index,
                len: node.template.body.len(),
            })
        }
    };
    let ctx = hierarchical_context(tree, id);
    let remaining: Vec<(usize, Term)> = node
        .grounded_actions()
        .into_iter()
        .filter(|(i, _)| *i >= index)
        .collect();
    let key_pos = remaining
        .iter()
        .position(|(_, a)| action_modifies(a, &ctx, lib))
        .unwrap_or(remaining.len() - 1);
    let suffix: Vec<Term> = remaining[..=key_pos].iter().map(|(_, a)| a.clone()).collect();
    let key_action = suffix.last().cloned().expect("suffix starts at the action");
    let following_action = remaining.get(key_pos + 1).map(|(_, a)| a.clone());

    let mut chain = tree.parents(id);
    chain.reverse();
    let goal = chain
        .first()
        .copied()
        .unwrap_or(node)
        .grounded_trigger()
        .payload;
    let intentions = chain
        .iter()
        .map(|n| summary(n, n.body_cursor.max(1)))
        .chain(std::iter::once(summary(node, index + 1)))
        .collect();

    Ok(Explanation {
        action,
        intention: id,
        predecessor: None,
        context: ctx,
        suffix,
        key_action,
        following_action,
        goal,
        intentions,
        beliefs: Vec::new(),
    })
}

fn summary(n: &IntentionNode, step: usize) -> IntentionSummary {
    IntentionSummary {
        id: n.id,
        plan: n.template.name.clone(),
        trigger: n.grounded_trigger().to_string(),
        step,
        len: n.template.body.len(),
    }
}
