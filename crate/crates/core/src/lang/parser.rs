//! Recursive-descent parser for `.plan` files.
//!
//! ```text
//! library  := item*
//! item     := plan | action | fluent
//! plan     := ('@' ident)? trigger (':' context)? '<-' step (';' step)* '.'
//! trigger  := '+!' atom | '+' atom | '-' atom
//! context  := 'true' | literal ('&' literal)*
//! literal  := 'not'? atom
//! step     := '!' atom | atom
//! action   := 'action' atom '{' section* '}'
//! section  := ('pre' | 'add' | 'del') ':' (literal (',' literal)*)? ';'
//! fluent   := 'fluent' ident '/' int '.'
//! atom     := ident ('(' term (',' term)* ')')?
//! term     := VAR | atom
//! ```

use super::error::{ParseError, ParseErrorKind, Pos};
use super::lexer::{tokenize, Spanned, Tok};
use super::syntax::{ActionSchema, PlanLibrary, PlanTemplate, Step, Trigger, TriggerKind};
use super::term::{Literal, Term, Var};

pub fn parse_plan_library(source: &str) -> Result<PlanLibrary, ParseError> {
    let mut p = Parser::new(source)?;
    let mut lib = PlanLibrary::default();
    while p.peek() != &Tok::Eof {
        match p.peek() {
            Tok::Ident(k) if k == "action" => {
                let pos = p.pos();
                let schema = p.action()?;
                let sig = schema.signature();
                if lib.actions.contains_key(&sig) {
                    return Err(ParseError::semantic(
                        ParseErrorKind::DuplicateAction,
                        pos,
                        format!("duplicate action schema {}/{}", sig.0, sig.1),
                    ));
                }
                lib.actions.insert(sig, schema);
            }
            Tok::Ident(k) if k == "fluent" => {
                let pos = p.pos();
                let (name, arity) = p.fluent()?;
                if arity == 0 {
                    return Err(ParseError::semantic(
                        ParseErrorKind::Syntax,
                        pos,
                        format!("fluent {name}/0 has no value argument"),
                    ));
                }
                if !lib.fluents.declare(name.clone(), arity) {
                    return Err(ParseError::semantic(
                        ParseErrorKind::DuplicateFluent,
                        pos,
                        format!("duplicate fluent declaration {name}/{arity}"),
                    ));
                }
            }
            _ => {
                let default_name = format!("p{}", lib.plans.len() + 1);
                let plan = p.plan(default_name)?;
                lib.plans.push(plan);
            }
        }
    }
    Ok(lib)
}

pub fn parse_term(source: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(source)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_literal(source: &str) -> Result<Literal, ParseError> {
    let mut p = Parser::new(source)?;
    let l = p.literal()?;
    p.expect_eof()?;
    Ok(l)
}

/// A trigger event as printed: `+!g`, `+b` or `-b`.
pub fn parse_trigger(source: &str) -> Result<Trigger, ParseError> {
    let mut p = Parser::new(source)?;
    let kind = p.trigger_kind()?;
    let payload = p.atom()?;
    p.expect_eof()?;
    Ok(Trigger { kind, payload })
}

/// A plan or action step as written in a body: `!goal` or `action`.
pub fn parse_step(source: &str) -> Result<Step, ParseError> {
    let mut p = Parser::new(source)?;
    let s = p.step()?;
    p.expect_eof()?;
    Ok(s)
}

struct Parser {
    toks: Vec<Spanned>,
    at: usize,
}

impl Parser {
    fn new(source: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(source)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if t != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError::new(
            ParseErrorKind::Syntax,
            self.pos(),
            expected.iter().map(|s| s.to_string()).collect(),
            self.peek().to_string(),
        )
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == &tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&tok.to_string()]))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => Err(self.error(&[&format!("`{kw}`")])),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Tok::Var(v) => {
                let v = v.clone();
                self.bump();
                Ok(Term::Var(Var::new(v)))
            }
            Tok::Ident(_) => self.atom(),
            _ => Err(self.error(&["variable", "identifier"])),
        }
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let functor = self.ident()?;
        if functor == "not" {
            return Err(ParseError::semantic(
                ParseErrorKind::Syntax,
                self.toks[self.at - 1].pos,
                "`not` is reserved for negation".into(),
            ));
        }
        let mut args = Vec::new();
        if self.peek() == &Tok::LParen {
            let open = self.pos();
            self.bump();
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => {
                        self.bump();
                        break;
                    }
                    other => {
                        let mut e = ParseError::new(
                            ParseErrorKind::Syntax,
                            open,
                            vec!["`,`".into(), "`)`".into()],
                            other.to_string(),
                        );
                        e.message = format!("unclosed `(`: {}", e.message);
                        return Err(e);
                    }
                }
            }
        }
        Ok(Term::App { functor, args })
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        if matches!(self.peek(), Tok::Ident(s) if s == "not") {
            self.bump();
            Ok(Literal::neg(self.atom()?))
        } else {
            Ok(Literal::pos(self.atom()?))
        }
    }

    fn step(&mut self) -> Result<Step, ParseError> {
        if self.peek() == &Tok::Bang {
            self.bump();
            Ok(Step::SubGoal(self.atom()?))
        } else if matches!(self.peek(), Tok::Ident(_)) {
            Ok(Step::Action(self.atom()?))
        } else {
            Err(self.error(&["`!`", "identifier"]))
        }
    }

    fn trigger_kind(&mut self) -> Result<TriggerKind, ParseError> {
        match self.peek() {
            Tok::Plus => {
                self.bump();
                if self.peek() == &Tok::Bang {
                    self.bump();
                    Ok(TriggerKind::GoalAddition)
                } else {
                    Ok(TriggerKind::BeliefAddition)
                }
            }
            Tok::Minus => {
                self.bump();
                Ok(TriggerKind::BeliefRemoval)
            }
            _ => Err(self.error(&["`+`", "`-`"])),
        }
    }

    fn plan(&mut self, default_name: String) -> Result<PlanTemplate, ParseError> {
        let start = self.pos();
        let name = if self.peek() == &Tok::At {
            self.bump();
            self.ident()?
        } else {
            default_name
        };
        let kind = self.trigger_kind().map_err(|_| self.error(&["`@`", "`+`", "`-`", "`action`", "`fluent`"]))?;
        let payload = self.atom()?;
        let mut context = Vec::new();
        if self.peek() == &Tok::Colon {
            self.bump();
            if matches!(self.peek(), Tok::Ident(s) if s == "true")
                && matches!(self.toks[self.at + 1].tok, Tok::Arrow)
            {
                self.bump();
            } else {
                context.push(self.literal()?);
                while self.peek() == &Tok::Amp {
                    self.bump();
                    context.push(self.literal()?);
                }
            }
        }
        self.expect(Tok::Arrow)?;
        let mut body = vec![self.step()?];
        while self.peek() == &Tok::Semi {
            self.bump();
            body.push(self.step()?);
        }
        self.expect(Tok::Dot)?;

        let plan = PlanTemplate {
            name,
            trigger: Trigger { kind, payload },
            context,
            body,
        };
        let bound = plan.bindable_vars();
        for s in &plan.body {
            if let Some(v) = s.term().vars().into_iter().find(|v| !bound.contains(v)) {
                return Err(ParseError::semantic(
                    ParseErrorKind::UnboundVariable,
                    start,
                    format!(
                        "variable {v} in body of plan `{}` is not bound by its trigger or context",
                        plan.name
                    ),
                ));
            }
        }
        Ok(plan)
    }

    fn literal_list(&mut self) -> Result<Vec<Literal>, ParseError> {
        let mut out = Vec::new();
        if self.peek() == &Tok::Semi {
            return Ok(out);
        }
        out.push(self.literal()?);
        while self.peek() == &Tok::Comma {
            self.bump();
            out.push(self.literal()?);
        }
        Ok(out)
    }

    fn action(&mut self) -> Result<ActionSchema, ParseError> {
        let start = self.pos();
        self.keyword("action")?;
        let head = self.atom()?;
        self.expect(Tok::LBrace)?;
        let mut sections: [Option<Vec<Literal>>; 3] = [None, None, None];
        while self.peek() != &Tok::RBrace {
            let slot = match self.peek() {
                Tok::Ident(s) if s == "pre" => 0,
                Tok::Ident(s) if s == "add" => 1,
                Tok::Ident(s) if s == "del" => 2,
                _ => return Err(self.error(&["`pre`", "`add`", "`del`", "`}`"])),
            };
            if sections[slot].is_some() {
                return Err(ParseError::semantic(
                    ParseErrorKind::Syntax,
                    self.pos(),
                    "section given twice in action schema".into(),
                ));
            }
            self.bump();
            self.expect(Tok::Colon)?;
            let lits = self.literal_list()?;
            self.expect(Tok::Semi)?;
            sections[slot] = Some(lits);
        }
        self.expect(Tok::RBrace)?;
        let [pre, add, del] = sections.map(Option::unwrap_or_default);

        if let Some(l) = add.iter().chain(&del).find(|l| l.negated) {
            return Err(ParseError::semantic(
                ParseErrorKind::NegatedEffect,
                start,
                format!("effect `{l}` of action {head} must be a positive atom"),
            ));
        }
        let mut known = head.vars();
        for l in pre.iter().filter(|l| !l.negated) {
            l.atom.collect_vars(&mut known);
        }
        for l in add.iter().chain(&del) {
            if let Some(v) = l.vars().into_iter().find(|v| !known.contains(v)) {
                return Err(ParseError::semantic(
                    ParseErrorKind::UnboundVariable,
                    start,
                    format!("variable {v} in effects of action {head} is not bound by its head or preconditions"),
                ));
            }
        }
        Ok(ActionSchema {
            head,
            preconditions: pre,
            add_effects: add,
            del_effects: del,
        })
    }

    fn fluent(&mut self) -> Result<(String, usize), ParseError> {
        self.keyword("fluent")?;
        let name = self.ident()?;
        self.expect(Tok::Slash)?;
        let arity = match self.peek() {
            Tok::Int(n) => *n,
            _ => return Err(self.error(&["integer"])),
        };
        self.bump();
        self.expect(Tok::Dot)?;
        Ok((name, arity))
    }
}
