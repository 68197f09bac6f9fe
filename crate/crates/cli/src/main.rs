//! `xbdi`: run household-robot scenarios, talk to the robot interactively,
//! and re-render stored explanations.
//!
//! Exit codes: 0 done, 1 I/O error, 2 load error, 3 an intention failed,
//! 4 step budget exhausted.

use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use xbdi_core::explain::{ExplanationStyle, Lexicon, StrategyKind};
use xbdi_core::lang::Term;
use xbdi_core::session::{Outcome, Session, SessionConfig, DEFAULT_BUDGET};
use xbdi_core::world::{load_scenario, read_trace, write_trace, RecordKind, TraceRecord};
use xbdi_core::Explanation;

const EXIT_IO: u8 = 1;
const EXIT_LOAD: u8 = 2;
const EXIT_FAILED: u8 = 3;
const EXIT_BUDGET: u8 = 4;

#[derive(Parser)]
#[command(name = "xbdi", version, about = "Explainable BDI household robot")]
struct Cli {
    /// Workspace directory that relative paths are resolved against.
    #[arg(long, global = true, default_value = ".")]
    root: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario's orders to completion and emit the trace.
    Run(RunArgs),
    /// Interactive session: issue orders and watch the robot act.
    Repl(RunArgs),
    /// Re-render every explanation of a stored trace.
    Render {
        trace: PathBuf,
        /// Render only this style (default: all six).
        #[arg(long)]
        style: Option<ExplanationStyle>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Bundled scenario name or path to a `.scn` file.
    scenario: String,
    #[arg(long, default_value = "default")]
    user: String,
    #[arg(long, default_value_t = ExplanationStyle::EC)]
    style: ExplanationStyle,
    /// Seeding strategy for a user without a stored profile.
    #[arg(long)]
    init: Option<StrategyKind>,
    /// Profile store (default: `.profiles.toml` under the root).
    #[arg(long)]
    store: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Write the trace here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reserved. The runtime is deterministic, so this has no effect.
    #[arg(long)]
    seed: Option<u64>,
    /// Forget the stored model and start from the init strategy.
    #[arg(long)]
    reset: bool,
    /// Trace used by the `cooccur` strategy, replacing the scenario's list.
    #[arg(long)]
    history: Vec<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(&cli.root, &args),
        Command::Repl(args) => cmd_repl(&cli.root, &args),
        Command::Render { trace, style, lexicon } => {
            cmd_render(&cli.root, &trace, style, lexicon.as_deref())
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}

struct Failure(u8, anyhow::Error);

trait Exit<T> {
    fn exit(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Exit<T> for Result<T, E> {
    fn exit(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure(code, e.into()))
    }
}

fn scenario_path(root: &Path, arg: &str) -> PathBuf {
    if arg.contains(['/', '\\']) || arg.ends_with(".scn") {
        root.join(arg)
    } else {
        root.join("scenarios").join(format!("{arg}.scn"))
    }
}

fn open_session(root: &Path, args: &RunArgs) -> Result<Session, Failure> {
    let path = scenario_path(root, &args.scenario);
    let mut scenario = load_scenario(&path)
        .with_context(|| format!("loading scenario {}", path.display()))
        .exit(EXIT_LOAD)?;
    if !args.history.is_empty() {
        scenario.init.history = args.history.iter().map(|h| root.join(h)).collect();
    }
    let cfg = SessionConfig {
        user: args.user.clone(),
        style: args.style,
        init: args.init,
        store: Some(root.join(args.store.as_deref().unwrap_or(Path::new(".profiles.toml")))),
        reset: args.reset,
    };
    Session::open(scenario, &cfg).exit(EXIT_LOAD)
}

fn emit_trace(root: &Path, out: Option<&Path>, records: &[TraceRecord]) -> Result<(), Failure> {
    match out {
        Some(p) => {
            let path = root.join(p);
            let file = fs::File::create(&path)
                .with_context(|| format!("creating {}", path.display()))
                .exit(EXIT_IO)?;
            let mut w = BufWriter::new(file);
            write_trace(&mut w, records).exit(EXIT_IO)?;
            w.flush().exit(EXIT_IO)
        }
        None => write_trace(io::stdout().lock(), records).exit(EXIT_IO),
    }
}

fn exit_code(outcome: Outcome) -> u8 {
    match outcome {
        Outcome::Done => 0,
        Outcome::Failed => EXIT_FAILED,
        Outcome::BudgetExhausted => EXIT_BUDGET,
    }
}

fn cmd_run(root: &Path, args: &RunArgs) -> Result<u8, Failure> {
    let mut session = open_session(root, args)?;
    session.enqueue_orders();
    let outcome = session.run(args.budget);
    session.save().exit(EXIT_IO)?;
    emit_trace(root, args.out.as_deref(), session.trace())?;
    Ok(exit_code(outcome))
}

const HELP: &str = "commands:
  order <goal>    queue a goal, e.g. order storeCup(cup1)
  step            run one reasoning step
  auto            run until idle (bounded by the step budget)
  beliefs         list current beliefs
  intentions      show the intention chain
  why [style]     re-render the last explanation
  style <style>   set the style: EA, EG, EC, ECR, EB or EI
  quit            save the profile and leave";

fn show(out: &mut impl Write, r: &TraceRecord) -> io::Result<()> {
    match (&r.kind, &r.text) {
        (RecordKind::Explain, Some(text)) => writeln!(out, "[{}] explain {}: {text}", r.step, r.payload),
        _ if r.payload.is_empty() => writeln!(out, "[{}] {}", r.step, r.kind),
        _ => writeln!(out, "[{}] {} {}", r.step, r.kind, r.payload),
    }
}

fn cmd_repl(root: &Path, args: &RunArgs) -> Result<u8, Failure> {
    let mut session = open_session(root, args)?;
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let mut out = io::stdout().lock();
    let mut last: Option<Explanation> = None;
    let mut lines = stdin.lock().lines();
    let io_err = |e: io::Error| Failure(EXIT_IO, e.into());
    loop {
        if interactive {
            write!(out, "xbdi> ").map_err(io_err)?;
            out.flush().map_err(io_err)?;
        }
        let Some(line) = lines.next() else { break };
        let line = line.map_err(io_err)?;
        let (cmd, rest) = line.trim().split_once(' ').unwrap_or((line.trim(), ""));
        let rest = rest.trim();
        let mut note = |r: &TraceRecord, out: &mut io::StdoutLock| {
            if let Some(e) = &r.explanation {
                last = Some(e.clone());
            }
            show(out, r)
        };
        match cmd {
            "" => {}
            "order" => match rest.parse::<Term>() {
                Ok(goal) => session.agent.order(goal),
                Err(e) => writeln!(out, "bad goal: {e}").map_err(io_err)?,
            },
            "step" => match session.step() {
                Some(r) => note(&r, &mut out).map_err(io_err)?,
                None => writeln!(out, "idle").map_err(io_err)?,
            },
            "auto" => {
                let before = session.trace().len();
                session.run(args.budget);
                for r in &session.trace()[before..] {
                    note(r, &mut out).map_err(io_err)?;
                }
            }
            "beliefs" => {
                for b in session.agent.beliefs.iter() {
                    writeln!(out, "{b}").map_err(io_err)?;
                }
            }
            "intentions" => {
                if session.agent.intentions.is_empty() {
                    writeln!(out, "no intentions").map_err(io_err)?;
                }
                for n in session.agent.intentions.chain() {
                    writeln!(
                        out,
                        "{} {} for {} (step {} of {})",
                        n.id,
                        n.template.name,
                        n.grounded_trigger(),
                        n.body_cursor + 1,
                        n.template.body.len()
                    )
                    .map_err(io_err)?;
                }
            }
            "why" => {
                let style = if rest.is_empty() {
                    Ok(session.agent.explainer.style)
                } else {
                    rest.parse()
                };
                match (style, &last) {
                    (Err(e), _) => writeln!(out, "{e}").map_err(io_err)?,
                    (Ok(_), None) => writeln!(out, "nothing has been explained yet").map_err(io_err)?,
                    (Ok(s), Some(e)) => writeln!(
                        out,
                        "{}",
                        xbdi_core::explain::render(e, s, &session.agent.explainer.lexicon)
                    )
                    .map_err(io_err)?,
                }
            }
            "style" => match rest.parse() {
                Ok(s) => session.agent.explainer.style = s,
                Err(e) => writeln!(out, "{e}").map_err(io_err)?,
            },
            "quit" | "exit" => break,
            _ => writeln!(out, "{HELP}").map_err(io_err)?,
        }
    }
    session.save().exit(EXIT_IO)?;
    if let Some(p) = &args.out {
        emit_trace(root, Some(p), session.trace())?;
    }
    Ok(0)
}

fn cmd_render(
    root: &Path,
    trace: &Path,
    style: Option<ExplanationStyle>,
    lexicon: Option<&Path>,
) -> Result<u8, Failure> {
    let path = root.join(trace);
    let file = fs::File::open(&path)
        .with_context(|| format!("opening {}", path.display()))
        .exit(EXIT_LOAD)?;
    let records = read_trace(BufReader::new(file))
        .with_context(|| format!("reading {}", path.display()))
        .exit(EXIT_LOAD)?;
    let lexicon = match lexicon {
        Some(p) => {
            let p = root.join(p);
            let text = fs::read_to_string(&p)
                .with_context(|| format!("reading {}", p.display()))
                .exit(EXIT_LOAD)?;
            Lexicon::parse(&text).exit(EXIT_LOAD)?
        }
        None => Lexicon::default(),
    };
    let styles: Vec<ExplanationStyle> = match style {
        Some(s) => vec![s],
        None => ExplanationStyle::ALL.to_vec(),
    };
    let mut out = io::stdout().lock();
    for r in &records {
        let Some(e) = &r.explanation else { continue };
        writeln!(out, "step {} {}", r.step, e.action).exit(EXIT_IO)?;
        for s in &styles {
            writeln!(out, "  {s:<4}{}", xbdi_core::explain::render(e, *s, &lexicon)).exit(EXIT_IO)?;
        }
    }
    Ok(0)
}
