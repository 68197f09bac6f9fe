use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lang::{Literal, PlanTemplate, Step, Substitution, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntentionId(pub u64);

impl fmt::Display for IntentionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// An adopted plan instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntentionNode {
    pub id: IntentionId,
    /// The plan with variables renamed apart for this instance.
    pub template: PlanTemplate,
    pub substitution: Substitution,
    /// Context conditions as grounded at adoption time.
    pub grounded_context: Vec<Literal>,
    /// Index of the next body step to run.
    pub body_cursor: usize,
    pub parent: Option<IntentionId>,
    /// Body indices flagged for explanation when the plan was adopted.
    pub demand_marks: BTreeSet<usize>,
    /// Cursor whose explanation-demand check has already run.
    pub(crate) demand_checked: Option<usize>,
}

impl IntentionNode {
    /// A fresh node with its cursor at the first step and no demand marks.
    pub fn new(
        id: IntentionId,
        template: PlanTemplate,
        substitution: Substitution,
        grounded_context: Vec<Literal>,
        parent: Option<IntentionId>,
    ) -> Self {
        IntentionNode {
            id,
            template,
            substitution,
            grounded_context,
            body_cursor: 0,
            parent,
            demand_marks: BTreeSet::new(),
            demand_checked: None,
        }
    }

    pub fn is_root(&self) -> bool {
        self.parent.is_none()
    }

    pub fn is_finished(&self) -> bool {
        self.body_cursor >= self.template.body.len()
    }

    /// Body step `i` with the intention's bindings applied.
    pub fn grounded_step(&self, i: usize) -> Option<Step> {
        self.template.body.get(i).map(|s| match s {
            Step::Action(t) => Step::Action(self.substitution.apply(t)),
            Step::SubGoal(t) => Step::SubGoal(self.substitution.apply(t)),
        })
    }

    /// Grounded action steps with their body indices.
    pub fn grounded_actions(&self) -> Vec<(usize, Term)> {
        self.template
            .action_steps()
            .map(|(i, t)| (i, self.substitution.apply(t)))
            .collect()
    }

    pub fn grounded_trigger(&self) -> crate::lang::Trigger {
        crate::lang::Trigger {
            kind: self.template.trigger.kind,
            payload: self.substitution.apply(&self.template.trigger.payload),
        }
    }
}

/// The live intentions. With a single active intention the tree is a chain
/// from one root down to the active leaf.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntentionTree {
    nodes: BTreeMap<IntentionId, IntentionNode>,
    /// Root first, active leaf last.
    path: Vec<IntentionId>,
}

impl IntentionTree {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.path.is_empty()
    }

    pub fn len(&self) -> usize {
        self.path.len()
    }

    pub fn get(&self, id: IntentionId) -> Option<&IntentionNode> {
        self.nodes.get(&id)
    }

    pub fn get_mut(&mut self, id: IntentionId) -> Option<&mut IntentionNode> {
        self.nodes.get_mut(&id)
    }

    pub fn leaf(&self) -> Option<&IntentionNode> {
        self.path.last().and_then(|id| self.nodes.get(id))
    }

    pub fn root(&self) -> Option<&IntentionNode> {
        self.path.first().and_then(|id| self.nodes.get(id))
    }

    /// Root first.
    pub fn chain(&self) -> impl Iterator<Item = &IntentionNode> {
        self.path.iter().filter_map(|id| self.nodes.get(id))
    }

    /// Attaches `node` below the current leaf. The node's parent must be the
    /// leaf (or absent when the tree is empty).
    pub fn push(&mut self, node: IntentionNode) {
        assert_eq!(
            node.parent,
            self.path.last().copied(),
            "new intention must hang off the active leaf"
        );
        self.path.push(node.id);
        self.nodes.insert(node.id, node);
    }

    pub fn pop(&mut self) -> Option<IntentionNode> {
        let id = self.path.pop()?;
        self.nodes.remove(&id)
    }

    pub fn clear(&mut self) -> Vec<IntentionNode> {
        let mut out = Vec::new();
        while let Some(n) = self.pop() {
            out.push(n);
        }
        out
    }

    /// Ancestors of `id`: direct parent first, root last. Empty for a root.
    pub fn parents(&self, id: IntentionId) -> Vec<&IntentionNode> {
        let mut out = Vec::new();
        let mut cur = self.nodes.get(&id).and_then(|n| n.parent);
        while let Some(p) = cur {
            let Some(node) = self.nodes.get(&p) else { break };
            out.push(node);
            cur = node.parent;
        }
        out
    }

    /// Every parent link points at a live node and no chain revisits a node.
    pub fn is_well_formed(&self) -> bool {
        for node in self.nodes.values() {
            let mut seen = BTreeSet::new();
            let mut cur = Some(node.id);
            while let Some(id) = cur {
                if !seen.insert(id) {
                    return false;
                }
                match self.nodes.get(&id) {
                    Some(n) => cur = n.parent,
                    None => return false,
                }
            }
        }
        self.path.len() == self.nodes.len()
    }
}
