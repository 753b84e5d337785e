use super::VerifyError;
use crate::eval::{Assignment, Evaluator};
use crate::fol::{parse_with, Formula, ParseOptions};
use crate::memstruct::{copy_relation_violation, CopyRelation, MemStructure};
use std::fmt::Write as _;
use thiserror::Error;

/// What reproduces a failure.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// `formula` is false in the structure under `assignment`.
    Formula { formula: Formula, assignment: Assignment },
    /// `relation` violates the copying clause named by the counterexample.
    Copy { relation: CopyRelation },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub check: String,
    pub clause: String,
    /// Position of the structure in its family (edge mask for exhaustive runs).
    pub structure_id: String,
    pub structure: MemStructure,
    pub witness: Witness,
    pub detail: String,
}

/// Outcome of one named check, possibly aggregated over many structures.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub name: String,
    pub structures: u64,
    /// (instance, assignment) pairs examined.
    pub instances: u64,
    /// Examined pairs whose antecedent held, i.e. the non-vacuous ones.
    pub realized: u64,
    /// Corpus formulas meeting the signature restriction but not the side
    /// condition, or the other way round.
    pub flagged: u64,
    pub failures: u64,
    /// The first failure in (structure, instance, assignment) order.
    pub counterexample: Option<Counterexample>,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report {
            name: name.into(),
            structures: 0,
            instances: 0,
            realized: 0,
            flagged: 0,
            failures: 0,
            counterexample: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn fail(&mut self, cx: impl FnOnce() -> Counterexample) {
        self.failures += 1;
        if self.counterexample.is_none() {
            self.counterexample = Some(cx());
        }
    }

    /// Adds `other`'s counts; keeps our counterexample if we have one.
    pub fn merge(&mut self, other: Report) {
        self.structures += other.structures;
        self.instances += other.instances;
        self.realized += other.realized;
        self.failures += other.failures;
        self.flagged = self.flagged.max(other.flagged);
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {}: {} structures, {} instances, {} realized",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.structures,
            self.instances,
            self.realized
        );
        if self.flagged > 0 {
            let _ = write!(out, ", {} flagged", self.flagged);
        }
        if self.failures > 0 {
            let _ = write!(out, ", {} failures", self.failures);
        }
        if let Some(cx) = &self.counterexample {
            let _ = write!(out, "\n  clause {} on structure {} {:?}", cx.clause, cx.structure_id, cx.structure);
            match &cx.witness {
                Witness::Formula { formula, assignment } => {
                    let _ = write!(out, "\n  formula {formula}\n  assignment {assignment}");
                }
                Witness::Copy { relation } => {
                    let _ = write!(out, "\n  relation {}", relation_text(relation));
                }
            }
            if !cx.detail.is_empty() {
                let _ = write!(out, "\n  {}", cx.detail);
            }
        }
        out
    }

    /// Machine-readable record for the counterexample (empty when passed).
    pub fn to_records(&self) -> String {
        self.counterexample.as_ref().map(Counterexample::to_record).unwrap_or_default()
    }
}

fn relation_text(r: &CopyRelation) -> String {
    let mut s = format!("{} {}", r.source, r.target);
    for (a, b) in &r.pairs {
        let _ = write!(s, " {a}:{b}");
    }
    s
}

impl Counterexample {
    pub fn to_record(&self) -> String {
        let mut out = String::from("counterexample\n");
        let _ = writeln!(out, "check {}", self.check);
        let _ = writeln!(out, "clause {}", self.clause);
        let _ = writeln!(out, "structure-id {}", self.structure_id);
        match &self.witness {
            Witness::Formula { formula, assignment } => {
                let _ = writeln!(out, "formula {formula}");
                let _ = writeln!(out, "assign {assignment}");
            }
            Witness::Copy { relation } => {
                let _ = writeln!(out, "relation {}", relation_text(relation));
            }
        }
        if !self.detail.is_empty() {
            let _ = writeln!(out, "detail {}", self.detail.replace('\n', " "));
        }
        out.push_str(&self.structure.to_string());
        out.push_str("end\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("record line {line}: {message}")]
pub struct RecordError {
    pub line: usize,
    pub message: String,
}

/// Parses every counterexample record in `text`.
pub fn parse_records(text: &str) -> Result<Vec<Counterexample>, RecordError> {
    let mut out = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    while let Some((i, line)) = lines.next() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line != "counterexample" {
            return Err(RecordError { line: i + 1, message: format!("expected `counterexample`, got `{line}`") });
        }
        let start = i + 1;
        let err = |line: usize, message: String| RecordError { line, message };
        let (mut check, mut clause, mut sid, mut detail) = (String::new(), String::new(), String::new(), String::new());
        let mut formula = None;
        let mut assignment = Assignment::new();
        let mut relation = None;
        let mut structure = String::new();
        let mut closed = false;
        for (j, raw) in lines.by_ref() {
            let l = raw.trim();
            if l == "end" {
                closed = true;
                break;
            }
            let (kw, rest) = l.split_once(' ').unwrap_or((l, ""));
            match kw {
                "check" => check = rest.to_string(),
                "clause" => clause = rest.to_string(),
                "structure-id" => sid = rest.to_string(),
                "detail" => detail = rest.to_string(),
                "formula" => {
                    let f = parse_with(rest, ParseOptions { allow_reserved: true })
                        .map_err(|e| err(j + 1, e.to_string()))?;
                    formula = Some(f);
                }
                "assign" => assignment = rest.parse().map_err(|e: String| err(j + 1, e))?,
                "relation" => {
                    let mut parts = rest.split_whitespace();
                    let num = |p: Option<&str>| {
                        p.and_then(|t| t.parse::<usize>().ok()).ok_or_else(|| err(j + 1, "bad relation".into()))
                    };
                    let source = num(parts.next())?;
                    let target = num(parts.next())?;
                    let mut pairs = Vec::new();
                    for p in parts {
                        let (a, b) = p.split_once(':').ok_or_else(|| err(j + 1, format!("bad pair `{p}`")))?;
                        let a = a.parse().map_err(|_| err(j + 1, format!("bad pair `{p}`")))?;
                        let b = b.parse().map_err(|_| err(j + 1, format!("bad pair `{p}`")))?;
                        pairs.push((a, b));
                    }
                    relation = Some(CopyRelation::new(source, target, pairs));
                }
                "nodes" | "mem" | "label" => {
                    structure.push_str(l);
                    structure.push('\n');
                }
                other => return Err(err(j + 1, format!("unknown record field `{other}`"))),
            }
        }
        if !closed {
            return Err(err(start, "record not terminated by `end`".into()));
        }
        let structure: MemStructure = structure.parse().map_err(|e| err(start, format!("structure: {e}")))?;
        let witness = match (formula, relation) {
            (Some(formula), None) => Witness::Formula { formula, assignment },
            (None, Some(relation)) => Witness::Copy { relation },
            _ => return Err(err(start, "record needs exactly one of `formula` or `relation`".into())),
        };
        out.push(Counterexample { check, clause, structure_id: sid, structure, witness, detail });
    }
    Ok(out)
}

/// Depth limit used when replaying; dumps may contain expanded formulas.
const REPLAY_DEPTH: usize = 16;

/// `true` when the recorded failure reproduces.
pub fn replay(cx: &Counterexample) -> Result<bool, VerifyError> {
    match &cx.witness {
        Witness::Formula { formula, assignment } => {
            Ok(!Evaluator::with_depth_limit(REPLAY_DEPTH).eval(&cx.structure, formula, assignment)?)
        }
        Witness::Copy { relation } => Ok(copy_relation_violation(&cx.structure, relation)
            .is_some_and(|v| v.clause.tag() == cx.clause)),
    }
}
