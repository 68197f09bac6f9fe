use std::fmt::Write;

use super::syntax::{ActionSchema, PlanLibrary, PlanTemplate};
use super::term::Literal;

/// Canonical text for a library. Re-parsing the output yields an equal value.
pub fn pretty_print(lib: &PlanLibrary) -> String {
    let mut out = String::new();
    for (name, arity) in lib.fluents.iter() {
        writeln!(out, "fluent {name}/{arity}.").unwrap();
    }
    for schema in lib.actions.values() {
        if !out.is_empty() {
            out.push('\n');
        }
        write_action(&mut out, schema);
    }
    for plan in &lib.plans {
        if !out.is_empty() {
            out.push('\n');
        }
        write_plan(&mut out, plan);
    }
    out
}

fn join(lits: &[Literal], sep: &str) -> String {
    lits.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(sep)
}

fn write_action(out: &mut String, s: &ActionSchema) {
    writeln!(out, "action {} {{", s.head).unwrap();
    writeln!(out, "    pre: {};", join(&s.preconditions, ", ")).unwrap();
    writeln!(out, "    add: {};", join(&s.add_effects, ", ")).unwrap();
    writeln!(out, "    del: {};", join(&s.del_effects, ", ")).unwrap();
    out.push_str("}\n");
}

pub(crate) fn write_plan(out: &mut String, p: &PlanTemplate) {
    writeln!(out, "@{}", p.name).unwrap();
    writeln!(out, "{}", p.trigger).unwrap();
    if !p.context.is_empty() {
        writeln!(out, "    : {}", join(&p.context, " & ")).unwrap();
    }
    for (i, step) in p.body.iter().enumerate() {
        let lead = if i == 0 { "    <- " } else { "       " };
        let end = if i + 1 == p.body.len() { "." } else { ";" };
        writeln!(out, "{lead}{step}{end}").unwrap();
    }
}
