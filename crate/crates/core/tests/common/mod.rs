//! Helpers shared by the integration tests and the acceptance runner:
//! bundled-scenario access, seeded random instance generators, and
//! brute-force oracles that do not call into the code under test.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use xbdi_core::agent::{IntentionId, IntentionNode, IntentionTree};
use xbdi_core::explain::ExplanationStyle;
use xbdi_core::lang::{
    ActionSchema, Fluents, Literal, PlanLibrary, PlanTemplate, Step, Substitution, Term, Trigger, TriggerKind,
};
use xbdi_core::session::{Outcome, Session, SessionConfig, DEFAULT_BUDGET};
use xbdi_core::world::{load_scenario, write_trace, RecordKind, Scenario, TraceRecord};

pub fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn scenario_dir() -> PathBuf {
    workspace().join("scenarios")
}

/// Names of the bundled scenarios, sorted.
pub fn bundled() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(scenario_dir())
        .expect("scenarios directory")
        .filter_map(|e| {
            let p = e.ok()?.path();
            if p.extension()? != "scn" {
                return None;
            }
            Some(p.file_stem()?.to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names
}

pub fn bundled_plan_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(scenario_dir())
        .expect("scenarios directory")
        .filter_map(|e| Some(e.ok()?.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "plan"))
        .collect();
    files.sort();
    files
}

pub fn scenario(name: &str) -> Scenario {
    load_scenario(&scenario_dir().join(format!("{name}.scn"))).expect("bundled scenario loads")
}

pub struct Run {
    pub trace: Vec<TraceRecord>,
    pub outcome: Outcome,
    pub session: Session,
}

impl Run {
    pub fn explains(&self) -> Vec<&TraceRecord> {
        self.trace.iter().filter(|r| r.kind == RecordKind::Explain).collect()
    }

    pub fn bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        write_trace(&mut out, &self.trace).unwrap();
        out
    }
}

/// Runs a bundled scenario's orders. With a store the profile is loaded
/// before and saved after.
pub fn run(name: &str, user: &str, style: ExplanationStyle, store: Option<&Path>) -> Run {
    let cfg = SessionConfig {
        user: user.into(),
        style,
        store: store.map(Path::to_path_buf),
        ..Default::default()
    };
    let mut session = Session::open(scenario(name), &cfg).expect("session opens");
    session.enqueue_orders();
    let outcome = session.run(DEFAULT_BUDGET);
    session.save().expect("profile saves");
    Run {
        trace: session.trace().to_vec(),
        outcome,
        session,
    }
}

pub fn t(s: &str) -> Term {
    s.parse().unwrap()
}

pub fn l(s: &str) -> Literal {
    s.parse().unwrap()
}

// ---------------------------------------------------------------------------
// Random terms

const CONSTS: [&str; 2] = ["a", "b"];
const VARS: [&str; 3] = ["X", "Y", "Z"];

/// A term of depth at most `depth` over constants `a`, `b`, functors
/// `f/1`, `g/2`, and up to `nvars` variables.
pub fn random_term(rng: &mut ChaCha8Rng, depth: usize, nvars: usize) -> Term {
    let roll = rng.gen_range(0..10);
    if depth == 0 || roll < 4 {
        if nvars > 0 && rng.gen_bool(0.5) {
            Term::var(VARS[rng.gen_range(0..nvars)])
        } else {
            Term::constant(*CONSTS.choose(rng).unwrap())
        }
    } else if roll < 7 {
        Term::app("f", vec![random_term(rng, depth - 1, nvars)])
    } else {
        Term::app(
            "g",
            vec![random_term(rng, depth - 1, nvars), random_term(rng, depth - 1, nvars)],
        )
    }
}

/// Every ground term of depth at most `depth` over the random-term signature.
pub fn ground_pool(depth: usize) -> Vec<Term> {
    let mut pool: Vec<Term> = CONSTS.iter().map(|c| Term::constant(*c)).collect();
    for _ in 0..depth {
        let prev = pool.clone();
        let mut next = prev.clone();
        for x in &prev {
            next.push(Term::app("f", vec![x.clone()]));
        }
        for x in &prev {
            for y in &prev {
                next.push(Term::app("g", vec![x.clone(), y.clone()]));
            }
        }
        next.sort();
        next.dedup();
        pool = next;
    }
    pool
}

/// Textual substitution of ground values for variables; no unifier code.
pub fn ground_with(term: &Term, values: &BTreeMap<String, Term>) -> Term {
    match term {
        Term::Var(v) => values.get(v.name()).cloned().unwrap_or_else(|| term.clone()),
        Term::App { functor, args } => Term::app(functor.clone(), args.iter().map(|a| ground_with(a, values)).collect()),
    }
}

/// Brute force: is there an assignment from `pool` to the variables of `a`
/// and `b` making them identical?
pub fn brute_force_unifiable(a: &Term, b: &Term, pool: &[Term]) -> bool {
    let mut vars: Vec<String> = a.vars().iter().chain(b.vars().iter()).map(|v| v.name().to_string()).collect();
    vars.sort();
    vars.dedup();
    let mut idx = vec![0usize; vars.len()];
    loop {
        let values: BTreeMap<String, Term> = vars.iter().cloned().zip(idx.iter().map(|&i| pool[i].clone())).collect();
        if ground_with(a, &values) == ground_with(b, &values) {
            return true;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return false;
            }
            idx[k] += 1;
            if idx[k] < pool.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Random plan libraries (source text)

fn gen_atom(rng: &mut ChaCha8Rng, preds: &[(String, usize)], vars: &[&str]) -> String {
    let (name, arity) = preds.choose(rng).unwrap();
    if *arity == 0 {
        return name.clone();
    }
    let args: Vec<String> = (0..*arity)
        .map(|_| {
            if !vars.is_empty() && rng.gen_bool(0.5) {
                vars.choose(rng).unwrap().to_string()
            } else if rng.gen_bool(0.2) {
                format!("h({})", CONSTS.choose(rng).unwrap())
            } else {
                CONSTS.choose(rng).unwrap().to_string()
            }
        })
        .collect();
    format!("{name}({})", args.join(", "))
}

fn atom_vars(atom: &str) -> Vec<String> {
    atom.split(|c: char| !c.is_alphanumeric() && c != '_')
        .filter(|w| w.starts_with(|c: char| c.is_ascii_uppercase()))
        .map(str::to_string)
        .collect()
}

/// Source text of a random, well-formed plan library.
pub fn random_library_source(rng: &mut ChaCha8Rng) -> String {
    let preds: Vec<(String, usize)> = (0..rng.gen_range(2..=6)).map(|i| (format!("p{i}"), rng.gen_range(0..=2))).collect();
    let mut out = String::new();
    for (name, arity) in &preds {
        if *arity > 0 && rng.gen_bool(0.3) {
            out.push_str(&format!("fluent {name}/{arity}.\n"));
        }
    }
    let nactions = rng.gen_range(0..=3);
    let mut action_sigs = Vec::new();
    for i in 0..nactions {
        let head_vars: Vec<&str> = VARS[..rng.gen_range(0..=2)].to_vec();
        let head = if head_vars.is_empty() {
            format!("act{i}")
        } else {
            format!("act{i}({})", head_vars.join(", "))
        };
        action_sigs.push((format!("act{i}"), head_vars.len()));
        let mut pre = Vec::new();
        let mut pos_vars: BTreeSet<String> = head_vars.iter().map(|s| s.to_string()).collect();
        for _ in 0..rng.gen_range(0..=2) {
            let with_z: Vec<&str> = head_vars.iter().copied().chain(["Z"]).collect();
            let atom = gen_atom(rng, &preds, &with_z);
            pos_vars.extend(atom_vars(&atom));
            pre.push(atom);
        }
        let bound: Vec<String> = pos_vars.into_iter().collect();
        let bound: Vec<&str> = bound.iter().map(String::as_str).collect();
        if rng.gen_bool(0.3) {
            pre.push(format!("not {}", gen_atom(rng, &preds, &head_vars)));
        }
        let add: Vec<String> = (0..rng.gen_range(0..=2)).map(|_| gen_atom(rng, &preds, &bound)).collect();
        let del: Vec<String> = (0..rng.gen_range(0..=2)).map(|_| gen_atom(rng, &preds, &bound)).collect();
        out.push_str(&format!("action {head} {{\n"));
        for (key, items) in [("pre", &pre), ("add", &add), ("del", &del)] {
            if !items.is_empty() || rng.gen_bool(0.2) {
                out.push_str(&format!("    {key}: {};\n", items.join(", ")));
            }
        }
        out.push_str("}\n");
    }
    for i in 0..rng.gen_range(0..=4) {
        if rng.gen_bool(0.5) {
            out.push_str(&format!("@plan{i} "));
        }
        let goal_preds: Vec<(String, usize)> = (0..3).map(|g| (format!("goal{g}"), g)).collect();
        let trigger_atom = if rng.gen_bool(0.7) {
            gen_atom(rng, &goal_preds, &VARS)
        } else {
            gen_atom(rng, &preds, &VARS)
        };
        let prefix = match rng.gen_range(0..4) {
            0 => "+",
            1 => "-",
            _ => "+!",
        };
        out.push_str(&format!("{prefix}{trigger_atom}"));
        let mut bound: BTreeSet<String> = atom_vars(&trigger_atom).into_iter().collect();
        let mut ctx = Vec::new();
        for _ in 0..rng.gen_range(0..=3) {
            let atom = gen_atom(rng, &preds, &VARS);
            if rng.gen_bool(0.3) {
                ctx.push(format!("not {atom}"));
            } else {
                bound.extend(atom_vars(&atom));
                ctx.push(atom);
            }
        }
        if !ctx.is_empty() {
            out.push_str(&format!(" : {}", ctx.join(" & ")));
        } else if rng.gen_bool(0.3) {
            out.push_str(" : true");
        }
        let bound: Vec<String> = bound.into_iter().collect();
        let bound: Vec<&str> = bound.iter().map(String::as_str).collect();
        let steps: Vec<String> = (0..rng.gen_range(1..=4))
            .map(|_| {
                if rng.gen_bool(0.3) {
                    format!("!{}", gen_atom(rng, &goal_preds, &bound))
                } else if !action_sigs.is_empty() && rng.gen_bool(0.6) {
                    let (name, arity) = action_sigs.choose(rng).unwrap().clone();
                    gen_atom(rng, &[(name, arity)], &bound)
                } else {
                    let arity = rng.gen_range(0..=1);
                    gen_atom(rng, &[("do".to_string(), arity)], &bound)
                }
            })
            .collect();
        out.push_str(&format!(" <- {}.\n", steps.join("; ")));
    }
    out
}

// ---------------------------------------------------------------------------
// Random intention chains for the explanation-content checks

pub struct ChainInstance {
    pub library: PlanLibrary,
    pub tree: IntentionTree,
    pub leaf: IntentionId,
    /// Body index of the action to explain.
    pub index: usize,
}

fn random_ground_atom(rng: &mut ChaCha8Rng, preds: &[(String, usize)]) -> Term {
    let (name, arity) = preds.choose(rng).unwrap();
    Term::app(
        name.clone(),
        (0..*arity).map(|_| Term::constant(*["c0", "c1", "c2"].choose(rng).unwrap())).collect(),
    )
}

/// A random chain of up to `max_depth` intentions, at most six predicates,
/// and a leaf body with between one and four actions.
pub fn random_chain(rng: &mut ChaCha8Rng, max_depth: usize) -> ChainInstance {
    let preds: Vec<(String, usize)> = (0..rng.gen_range(1..=6)).map(|i| (format!("q{i}"), rng.gen_range(0..=2))).collect();
    let mut fluents = Fluents::new();
    for (name, arity) in &preds {
        if *arity > 0 && rng.gen_bool(0.5) {
            fluents.declare(name.clone(), *arity);
        }
    }
    let mut library = PlanLibrary {
        fluents,
        ..Default::default()
    };
    for a in 0..4 {
        let unary = rng.gen_bool(0.5);
        let head = if unary {
            Term::app(format!("act{a}"), vec![Term::var("X")])
        } else {
            Term::constant(format!("act{a}"))
        };
        let effect = |rng: &mut ChaCha8Rng| {
            let mut atom = random_ground_atom(rng, &preds);
            if unary && atom.arity() > 0 && rng.gen_bool(0.5) {
                let mut args = atom.args().to_vec();
                let at = rng.gen_range(0..args.len());
                args[at] = Term::var("X");
                atom = Term::app(atom.functor().unwrap(), args);
            }
            Literal::pos(atom)
        };
        let add_effects = (0..rng.gen_range(0..=2)).map(|_| effect(rng)).collect();
        let del_effects = (0..rng.gen_range(0..=2)).map(|_| effect(rng)).collect();
        library.actions.insert(
            (format!("act{a}"), usize::from(unary)),
            ActionSchema {
                head,
                preconditions: Vec::new(),
                add_effects,
                del_effects,
            },
        );
    }
    let schemas: Vec<ActionSchema> = library.actions.values().cloned().collect();
    let ground_action = |rng: &mut ChaCha8Rng| {
        let s = schemas.choose(rng).unwrap();
        if s.head.arity() == 0 {
            s.head.clone()
        } else {
            Term::app(s.head.functor().unwrap(), vec![Term::constant(*["c0", "c1", "c2"].choose(rng).unwrap())])
        }
    };
    let depth = rng.gen_range(1..=max_depth);
    let mut tree = IntentionTree::new();
    let mut parent = None;
    let mut leaf = IntentionId(0);
    let mut index = 0;
    for level in 0..depth {
        let context: Vec<Literal> = (0..rng.gen_range(0..=3))
            .map(|_| {
                let a = random_ground_atom(rng, &preds);
                if rng.gen_bool(0.3) {
                    Literal::neg(a)
                } else {
                    Literal::pos(a)
                }
            })
            .collect();
        let is_leaf = level + 1 == depth;
        let mut body: Vec<Step> = (0..rng.gen_range(1..=4)).map(|_| Step::Action(ground_action(rng))).collect();
        if !is_leaf || rng.gen_bool(0.3) {
            let at = rng.gen_range(0..=body.len());
            body.insert(at, Step::SubGoal(Term::constant(format!("sub{}", level + 1))));
        }
        let template = PlanTemplate {
            name: format!("lvl{level}"),
            trigger: Trigger {
                kind: TriggerKind::GoalAddition,
                payload: Term::constant(format!("sub{level}")),
            },
            context: context.clone(),
            body: body.clone(),
        };
        let id = IntentionId(level as u64 + 1);
        let mut node = IntentionNode::new(id, template, Substitution::new(), context, parent);
        if is_leaf {
            let actions: Vec<usize> = body
                .iter()
                .enumerate()
                .filter(|(_, s)| matches!(s, Step::Action(_)))
                .map(|(i, _)| i)
                .collect();
            index = *actions.choose(rng).unwrap();
            node.body_cursor = index;
            leaf = id;
        } else {
            let sub = body.iter().position(|s| matches!(s, Step::SubGoal(_))).unwrap();
            node.body_cursor = sub + 1;
        }
        tree.push(node);
        parent = Some(id);
    }
    ChainInstance {
        library,
        tree,
        leaf,
        index,
    }
}

/// Set union of the grounded contexts of `id` and all its ancestors,
/// collected by walking parent links directly.
pub fn oracle_gamma(tree: &IntentionTree, id: IntentionId) -> BTreeSet<Literal> {
    let mut out = BTreeSet::new();
    let mut cur = Some(id);
    while let Some(i) = cur {
        let node = tree.get(i).unwrap();
        out.extend(node.grounded_context.iter().cloned());
        cur = node.parent;
    }
    out
}

/// Effects of a ground action, instantiated by positional argument copy.
fn oracle_effects(lib: &PlanLibrary, action: &Term) -> Vec<Term> {
    let schema = lib
        .actions
        .get(&(action.functor().unwrap().to_string(), action.arity()))
        .unwrap();
    let mut values = BTreeMap::new();
    for (h, a) in schema.head.args().iter().zip(action.args()) {
        if let Term::Var(v) = h {
            values.insert(v.name().to_string(), a.clone());
        }
    }
    schema
        .add_effects
        .iter()
        .chain(&schema.del_effects)
        .map(|e| ground_with(&e.atom, &values))
        .collect()
}

/// Whether setting `effect` can change the truth of `condition`: the same
/// atom in either sign, or for a positive condition on a declared fluent
/// the same predicate with the same arguments except the last.
fn oracle_touches(effect: &Term, condition: &Literal, fluents: &Fluents) -> bool {
    let c = &condition.atom;
    if effect.functor() != c.functor() || effect.arity() != c.arity() {
        return false;
    }
    let n = effect.arity();
    if !condition.negated && n > 0 && fluents.contains(effect.functor().unwrap(), n) {
        effect.args()[..n - 1] == c.args()[..n - 1]
    } else {
        effect == c
    }
}

/// First action at or after `index` whose effects touch a state variable
/// of the hierarchical context; the last action when none does. Returns
/// the position within the leaf's action sequence.
pub fn oracle_key_index(inst: &ChainInstance) -> (usize, usize) {
    let gamma = oracle_gamma(&inst.tree, inst.leaf);
    let node = inst.tree.get(inst.leaf).unwrap();
    let actions: Vec<(usize, Term)> = node
        .template
        .body
        .iter()
        .enumerate()
        .filter_map(|(i, s)| match s {
            Step::Action(a) => Some((i, a.clone())),
            Step::SubGoal(_) => None,
        })
        .collect();
    let start = actions.iter().position(|(i, _)| *i == inst.index).unwrap();
    for (pos, (_, a)) in actions.iter().enumerate().skip(start) {
        let touches = oracle_effects(&inst.library, a)
            .iter()
            .any(|e| gamma.iter().any(|c| oracle_touches(e, c, &inst.library.fluents)));
        if touches {
            return (start, pos);
        }
    }
    (start, actions.len() - 1)
}
