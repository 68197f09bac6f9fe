mod common;

use std::fs;
use std::path::Path;

use common::*;
use xbdi_core::explain::{render, ExplanationStyle, StrategyKind};
use xbdi_core::session::{Outcome, Session, SessionConfig};
use xbdi_core::world::{load_scenario, read_trace, write_trace, RecordKind, ScenarioError};

fn golden(name: &str) -> String {
    fs::read_to_string(workspace().join("crates/core/tests/golden").join(name)).unwrap()
}

#[test]
fn store_used_cup_matches_golden_trace() {
    let r = run("store_used_cup", "alice", ExplanationStyle::EC, None);
    assert_eq!(String::from_utf8(r.bytes()).unwrap(), golden("store_used_cup.jsonl"));
}

#[test]
fn worked_example_renderings() {
    let r = run("store_used_cup", "alice", ExplanationStyle::EC, None);
    let rec = r.explains()[0];
    let e = rec.explanation.as_ref().unwrap();
    let lex = &r.session.agent.explainer.lexicon;
    assert_eq!(
        render(e, ExplanationStyle::EC, lex),
        "I am moving to the dishwasher to open its door, because: cup1 is used; the dishwasher door is closed; I am holding nothing."
    );
    assert_eq!(render(e, ExplanationStyle::EA, lex), "I will open its door.");
    assert_eq!(render(e, ExplanationStyle::EG, lex), "I am working on: storeCup(cup1).");
    assert!(render(e, ExplanationStyle::ECR, lex).ends_with("No further action follows in this plan."));
    assert!(render(e, ExplanationStyle::EB, lex).ends_with(
        "My current beliefs: dishwasherDoor(closed), used(cup1), at(cup1, table), clean(cup2), at(cup2, table), at(robot, table), holding(none)."
    ));
    assert_eq!(
        render(e, ExplanationStyle::EI, lex),
        "My current intentions: storeUsedCup for +!storeCup(cup1) (step 1 of 5) > openDishwasherIfNeed for +!openDishwasherIfNeed (step 1 of 2)."
    );
    // provenance: the door and hand conditions come from the sub-plan
    let from: Vec<u64> = e.context.entries().iter().map(|c| c.from.0).collect();
    assert_eq!(from, vec![1, 2, 2]);
}

#[test]
fn ecr_names_the_following_action() {
    let r = run("store_used_cup", "alice", ExplanationStyle::ECR, None);
    let text = r.explains()[3].text.clone().unwrap();
    assert_eq!(
        text,
        "I am picking up cup1 to put down cup1, because: cup1 is used. No further action follows in this plan."
    );
    let first = r.explains()[2].explanation.clone().unwrap();
    assert_eq!(first.following_action, None);
    assert_eq!(first.key_action, t("putDown(cup1)"));
}

#[test]
fn trace_round_trips_through_jsonl() {
    let r = run("clear_table", "x", ExplanationStyle::EB, None);
    let mut buf = Vec::new();
    write_trace(&mut buf, &r.trace).unwrap();
    assert_eq!(read_trace(buf.as_slice()).unwrap(), r.trace);
}

#[test]
fn goal_is_reached() {
    let r = run("store_used_cup", "x", ExplanationStyle::EC, None);
    assert_eq!(r.outcome, Outcome::Done);
    assert!(r.session.world.facts().contains(&t("at(cup1, dishwasher)")));
    assert!(r.session.world.facts().contains(&t("holding(none)")));
    assert!(r.session.world.facts().contains(&t("dishwasherDoor(open)")));
}

#[test]
fn every_bundled_scenario_finishes_and_explains() {
    for name in bundled() {
        let r = run(&name, "x", ExplanationStyle::EC, None);
        assert_eq!(r.outcome, Outcome::Done, "{name}");
        assert!(r.trace.len() < 100, "{name}");
        assert!(!r.explains().is_empty(), "{name}");
        let last = r.trace.last().unwrap();
        assert_eq!((last.kind, last.intention), (RecordKind::Done, None), "{name}");
    }
}

fn open(name: &str, cfg: &SessionConfig) -> Session {
    let mut s = Session::open(scenario(name), cfg).unwrap();
    s.enqueue_orders();
    s
}

#[test]
fn task_links_silence_the_opening_action() {
    let cfg = SessionConfig {
        init: Some(StrategyKind::Tasklinked),
        ..Default::default()
    };
    let mut s = open("store_used_cup", &cfg);
    s.run(100);
    let explained: Vec<&str> = s
        .trace()
        .iter()
        .filter(|r| r.kind == RecordKind::Explain)
        .map(|r| r.payload.as_str())
        .collect();
    assert_eq!(explained.len(), 5);
    assert_eq!(explained[0], "openDoor(dishwasher)");
}

#[test]
fn cooccurrence_needs_history() {
    let cfg = SessionConfig {
        init: Some(StrategyKind::Cooccur),
        ..Default::default()
    };
    assert!(Session::open(scenario("store_used_cup"), &cfg).is_err());
}

#[test]
fn cooccurrence_learns_repeated_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let first = run("store_used_cup", "h", ExplanationStyle::EC, None);
    let hist = dir.path().join("h.jsonl");
    fs::write(&hist, first.bytes()).unwrap();
    let mut sc = scenario("store_used_cup");
    sc.init.history = vec![hist.clone()];
    let cfg = SessionConfig {
        init: Some(StrategyKind::Cooccur),
        ..Default::default()
    };
    // one sighting is below the threshold of two
    let mut once = Session::open(sc.clone(), &cfg).unwrap();
    once.enqueue_orders();
    once.run(100);
    assert_eq!(once.trace().iter().filter(|r| r.kind == RecordKind::Explain).count(), 6);
    sc.init.history = vec![hist.clone(), hist];
    let mut twice = Session::open(sc, &cfg).unwrap();
    twice.enqueue_orders();
    twice.run(100);
    assert_eq!(twice.trace().iter().filter(|r| r.kind == RecordKind::Explain).count(), 0);
}

#[test]
fn reset_forgets_the_stored_model() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("p.toml");
    run("wipe_table", "r", ExplanationStyle::EC, Some(&store));
    let cfg = SessionConfig {
        user: "r".into(),
        store: Some(store),
        reset: true,
        ..Default::default()
    };
    let mut s = open("wipe_table", &cfg);
    s.run(100);
    assert!(s.trace().iter().any(|r| r.kind == RecordKind::Explain));
}

#[test]
fn budget_exhaustion_is_reported() {
    let mut s = open("store_used_cup", &SessionConfig::default());
    assert_eq!(s.run(5), Outcome::BudgetExhausted);
    assert_eq!(s.trace().len(), 5);
    assert_eq!(s.run(100), Outcome::Done);
}

fn write_scenario(dir: &Path, facts: &str, orders: &str) -> std::path::PathBuf {
    let kitchen = scenario_dir();
    fs::copy(kitchen.join("kitchen.plan"), dir.join("kitchen.plan")).unwrap();
    let tags = "[tags]\nat = obj\nholding = robot\nused = obj\nclean = obj\ndirty = obj\nempty = obj\nfull = obj\ntrash = obj\ndisposed = obj\ndishwasherDoor = env\ntableState = env\nmachine = env\nbinLid = env\n";
    let path = dir.join("t.scn");
    fs::write(&path, format!("plans = kitchen.plan\n[facts]\n{facts}\n[orders]\n{orders}\n{tags}")).unwrap();
    path
}

#[test]
fn inapplicable_order_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "holding(none)", "storeCup(cup9)");
    let mut s = Session::open(load_scenario(&path).unwrap(), &SessionConfig::default()).unwrap();
    s.enqueue_orders();
    assert_eq!(s.run(100), Outcome::Failed);
    assert_eq!(s.trace()[0].kind, RecordKind::Fail);
}

#[test]
fn violated_precondition_fails_the_chain() {
    let dir = tempfile::tempdir().unwrap();
    // the cup is not on the table, so pickUp cannot run
    let path = write_scenario(
        dir.path(),
        "dishwasherDoor(open)\nused(cup1)\nat(cup1, sink)\nat(robot, table)\nholding(none)",
        "storeCup(cup1)",
    );
    let mut s = Session::open(load_scenario(&path).unwrap(), &SessionConfig::default()).unwrap();
    s.enqueue_orders();
    assert_eq!(s.run(100), Outcome::Failed);
    let fail = s.trace().iter().find(|r| r.kind == RecordKind::Fail).unwrap();
    assert!(fail.payload.contains("pickUp(cup1)"), "{}", fail.payload);
    assert!(s.agent.intentions.is_empty());
}

#[test]
fn load_errors() {
    let dir = tempfile::tempdir().unwrap();
    let rival = write_scenario(dir.path(), "holding(none)\nholding(cup1)", "storeCup(cup1)");
    assert!(matches!(load_scenario(&rival), Err(ScenarioError::Inconsistent(..))));
    let unplanned = write_scenario(dir.path(), "holding(none)", "fly(away)");
    assert!(matches!(load_scenario(&unplanned), Err(ScenarioError::UnplannedOrder(_))));
    let untagged = write_scenario(dir.path(), "shiny(cup1)", "storeCup(cup1)");
    assert!(matches!(load_scenario(&untagged), Err(ScenarioError::Untagged(p)) if p == "shiny"));
    assert!(matches!(
        load_scenario(&dir.path().join("missing.scn")),
        Err(ScenarioError::Io { .. })
    ));
}
