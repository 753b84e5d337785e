//! The `coext` command line. Exit codes: 0 when every selected check passes,
//! 1 when a check fails (the counterexample is printed), 2 on usage or input
//! errors.

use crate::eval::{Assignment, Evaluator, DEFAULT_DEPTH_LIMIT};
use crate::fol::{parse, Formula};
use crate::memstruct::{CopyRelation, MemStructure};
use crate::modelgen::{
    add_atoms, add_doppelgangers, build_hf, enumerate_all, enumerate_dedup, random_structure, standard_family,
    DoppelMode,
};
use crate::verify::suite::{run_suite, SuiteOptions};
use crate::verify::{
    check_copy_relation, check_infinity_step, check_scott, closed_family, corpus, functional_corpus, parse_records,
    replay, run_exhaustive, run_on, Bounds, HierarchyCheck, PreparedAxiom, PreparedSchema, QuotientCheck, Report,
    SchemaId, StructureCheck, Strictness, Subsidiary2Check, Witness, FAMILY_RANK, STARRED,
};
use crate::xlate::{expand, relativize_pure, relativize_pure_starred, translate_zfa, translate_zfa_starred, AxiomId};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "coext", version, about = "Co-extensional set theory: formulas, finite membership structures, model checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula and print it with its syntax tree.
    Parse {
        formula: String,
        /// Print the alpha-canonical form instead of the tree.
        #[arg(long)]
        canonical: bool,
    },
    /// Translate a formula.
    Translate {
        formula: String,
        #[arg(long, value_enum, default_value_t = Mode::Zfa)]
        mode: Mode,
    },
    /// Evaluate a formula on a structure.
    Eval {
        #[arg(short, long)]
        structure: PathBuf,
        #[arg(short, long)]
        formula: String,
        /// Assignment such as `x=0,y=2`.
        #[arg(short, long, default_value = "")]
        assign: String,
        /// Evaluate the universal closure over all assignments.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = DEFAULT_DEPTH_LIMIT)]
        depth_limit: usize,
    },
    /// Print the extensional quotient of a structure.
    Quotient {
        #[arg(short, long)]
        structure: PathBuf,
    },
    /// Generate structures.
    Gen(GenArgs),
    /// Run checks over structures.
    Check(CheckArgs),
    /// Run the full acceptance suite.
    Suite {
        #[arg(long, default_value_t = 4)]
        max_nodes: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    /// ZFA into the raw language, starred predicates expanded
    Zfa,
    /// ZFA into the starred language
    ZfaStarred,
    /// relativize to pure sets, expanded
    Pure,
    /// relativize to pure sets, starred predicates kept
    PureStarred,
    /// expand starred predicates only
    Expand,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    nodes: Option<usize>,
    /// Every structure on `--nodes` nodes.
    #[arg(long)]
    exhaustive: bool,
    /// Only one structure per isomorphism class (with `--exhaustive`).
    #[arg(long)]
    dedup: bool,
    /// Print only how many structures would be generated.
    #[arg(long)]
    count: bool,
    #[arg(long)]
    hf: Option<usize>,
    /// `NODE:COUNT`, repeatable.
    #[arg(long)]
    dopp: Vec<String>,
    /// Doppelgängers also join every container of the original.
    #[arg(long)]
    deep: bool,
    /// Comma-separated extension of an atom to add, repeatable.
    #[arg(long)]
    atom: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    /// The standard family: rank-3 hereditarily finite sets with
    /// doppelgängers of the two smallest.
    #[arg(long)]
    standard: bool,
    /// Close the result under the axiom witnesses.
    #[arg(long)]
    close: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Records,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// All structures with 1..=N nodes.
    #[arg(long)]
    exhaustive: Option<usize>,
    /// Structure files, repeatable.
    #[arg(short, long)]
    structure: Vec<PathBuf>,
    /// The closed standard family.
    #[arg(long)]
    family: bool,
    /// Schema tag, repeatable.
    #[arg(long)]
    schema: Vec<String>,
    /// Corpus depth for schemata and separation.
    #[arg(long, default_value_t = 1)]
    depth: usize,
    /// Axiom name, repeatable.
    #[arg(long)]
    axiom: Vec<String>,
    /// Parameter formula for schema axioms; defaults to a built-in corpus.
    #[arg(long)]
    phi: Vec<String>,
    /// `all`, `rank:R` or `nodes:A,B,...`.
    #[arg(long)]
    bounds: Option<String>,
    /// `subsidiary2`, `quotient` or `hierarchy`, repeatable.
    #[arg(long)]
    prop: Vec<String>,
    #[arg(long)]
    scott: bool,
    /// Ordinal node for the infinity induction step, repeatable.
    #[arg(long)]
    infinity_step: Vec<usize>,
    /// `SOURCE TARGET A:B ...`: check one copying relation.
    #[arg(long)]
    copy: Option<String>,
    /// Replay the counterexample records in a file.
    #[arg(long)]
    replay: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

type Res<T> = Result<T, Usage>;

fn read_structure(path: &Path) -> Res<MemStructure> {
    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    text.parse().map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn parse_formula(text: &str) -> Res<Formula> {
    parse(text).map_err(|e| Usage(format!("formula `{text}`: {e}")))
}

fn default_jobs(jobs: Option<usize>) -> usize {
    jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs the command line; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return if code == 0 { 0 } else { 2 };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = writeln!(err, "coext: {msg}");
            2
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Res<i32> {
    match cmd {
        Command::Parse { formula, canonical } => {
            let f = parse_formula(&formula)?;
            if canonical {
                writeln!(out, "{}", f.canonical())?;
            } else {
                writeln!(out, "{f}")?;
                writeln!(out, "{f:#?}")?;
            }
            Ok(0)
        }
        Command::Translate { formula, mode } => {
            let f = parse_formula(&formula)?;
            let t = match mode {
                Mode::Zfa => translate_zfa(&f)?,
                Mode::ZfaStarred => translate_zfa_starred(&f)?,
                Mode::Pure => relativize_pure(&f),
                Mode::PureStarred => relativize_pure_starred(&f),
                Mode::Expand => expand(&f),
            };
            writeln!(out, "{t}")?;
            Ok(0)
        }
        Command::Eval { structure, formula, assign, all, depth_limit } => {
            let s = read_structure(&structure)?;
            let f = parse_formula(&formula)?;
            let ev = Evaluator::with_depth_limit(depth_limit);
            let v = if all {
                ev.eval_all_assignments(&s, &f)?
            } else {
                let rho: Assignment = assign.parse().map_err(Usage)?;
                ev.eval(&s, &f, &rho)?
            };
            writeln!(out, "{v}")?;
            Ok(0)
        }
        Command::Quotient { structure } => {
            let (q, _) = read_structure(&structure)?.quotient();
            write!(out, "{q}")?;
            Ok(0)
        }
        Command::Gen(g) => gen(g, out),
        Command::Check(c) => check(c, out),
        Command::Suite { max_nodes, jobs } => {
            if !(1..=4).contains(&max_nodes) {
                return Err(Usage(format!("--max-nodes {max_nodes} outside 1..=4")));
            }
            let opts = SuiteOptions { max_nodes, jobs: default_jobs(jobs) };
            let mut lines = Vec::new();
            let outcomes = run_suite(&opts, |o| {
                lines.push(format!("{} criterion {}", if o.passed { "PASS" } else { "FAIL" }, o.criterion));
                lines.extend(o.lines.iter().map(|l| format!("    {}", l.replace('\n', "\n    "))));
            })?;
            for l in lines {
                writeln!(out, "{l}")?;
            }
            Ok(if outcomes.iter().all(|o| o.passed) { 0 } else { 1 })
        }
    }
}

fn gen(g: GenArgs, out: &mut dyn Write) -> Res<i32> {
    if g.exhaustive {
        let n = g.nodes.ok_or_else(|| Usage("--exhaustive needs --nodes".into()))?;
        let it = if g.dedup { enumerate_dedup(n)? } else { enumerate_all(n)? };
        if g.count {
            writeln!(out, "{}", it.count())?;
            return Ok(0);
        }
        for (mask, s) in it {
            writeln!(out, "# {n}:{mask}")?;
            writeln!(out, "{s}")?;
        }
        return Ok(0);
    }
    let mut s = match (g.standard, g.hf, g.seed) {
        (true, None, None) => standard_family(),
        (false, Some(r), None) => build_hf(r)?,
        (false, None, Some(seed)) => {
            let n = g.nodes.ok_or_else(|| Usage("--seed needs --nodes".into()))?;
            random_structure(n, g.density, seed)?
        }
        (false, None, None) => MemStructure::new(g.nodes.unwrap_or(0)),
        _ => return Err(Usage("choose one of --standard, --hf, --seed".into())),
    };
    if !g.dopp.is_empty() {
        let specs = g
            .dopp
            .iter()
            .map(|d| {
                let (a, b) = d.split_once(':').ok_or_else(|| Usage(format!("--dopp `{d}`: want NODE:COUNT")))?;
                Ok((a.trim().parse::<usize>()?, b.trim().parse::<usize>()?))
            })
            .collect::<Res<Vec<_>>>()?;
        s = add_doppelgangers(&s, &specs, if g.deep { DoppelMode::Deep } else { DoppelMode::Shallow })?;
    }
    if !g.atom.is_empty() {
        let specs = g
            .atom
            .iter()
            .map(|a| a.split(',').filter(|t| !t.trim().is_empty()).map(|t| t.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        s = add_atoms(&s, &specs)?;
    }
    if g.close {
        s = closed_family(&s)?;
    }
    if g.count {
        writeln!(out, "1")?;
    } else {
        write!(out, "{s}")?;
    }
    Ok(0)
}

fn parse_bounds(text: &str) -> Res<Bounds> {
    if text == "all" {
        return Ok(Bounds::All);
    }
    if let Some(r) = text.strip_prefix("rank:") {
        return Ok(Bounds::RankAtMost(r.trim().parse()?));
    }
    if let Some(ns) = text.strip_prefix("nodes:") {
        return Ok(Bounds::Nodes(ns.split(',').map(|t| t.trim().parse::<usize>()).collect::<Result<_, _>>()?));
    }
    Err(Usage(format!("--bounds `{text}`: want all, rank:R or nodes:A,B,...")))
}

/// Instances for an axiom name; schema axioms take `--phi` or a default corpus.
fn axioms_for(name: &str, phis: &[Formula], depth: usize) -> Res<Vec<AxiomId>> {
    if let Some(id) = AxiomId::from_name(name) {
        return Ok(vec![id]);
    }
    let defaults = || -> Vec<Formula> {
        match name {
            "separation*" => corpus(depth.min(3), &["y".into(), "w".into()], STARRED),
            _ => functional_corpus(),
        }
    };
    let phis = if phis.is_empty() { defaults() } else { phis.to_vec() };
    let make: fn(Formula) -> AxiomId = match name {
        "separation*" => AxiomId::SeparationStar,
        "replacement-zfa*" => AxiomId::ReplacementStarZFA,
        "scott-replacement" => AxiomId::ScottReplacement,
        "replacement*" => AxiomId::ReplacementStar,
        "union-schema" => AxiomId::UnionSchema,
        "eps-separation" => AxiomId::EpsSeparation,
        _ => return Err(Usage(format!("unknown axiom `{name}`"))),
    };
    if phis.is_empty() {
        return Err(Usage(format!("`{name}` needs --phi")));
    }
    Ok(phis.into_iter().map(make).collect())
}

fn print_reports(reports: &[Report], format: Format, out: &mut dyn Write) -> Res<i32> {
    let mut failed = false;
    for r in reports {
        failed |= !r.passed();
        match format {
            Format::Text => writeln!(out, "{}", r.to_text())?,
            Format::Records => write!(out, "{}", r.to_records())?,
        }
    }
    Ok(i32::from(failed))
}

/// Merges consecutive reports with the same name (one per parameter formula).
fn merge_by_name(reports: Vec<Report>) -> Vec<Report> {
    let mut out: Vec<Report> = Vec::new();
    for r in reports {
        match out.last_mut() {
            Some(last) if last.name == r.name => {
                let structures = last.structures.max(r.structures);
                last.merge(r);
                last.structures = structures;
            }
            _ => out.push(r),
        }
    }
    out
}

fn check(c: CheckArgs, out: &mut dyn Write) -> Res<i32> {
    if let Some(path) = &c.replay {
        let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
        let records = parse_records(&text)?;
        if records.is_empty() {
            return Err(Usage(format!("{}: no records", path.display())));
        }
        let mut reproduced = true;
        for cx in &records {
            let ok = replay(cx)?;
            reproduced &= ok;
            writeln!(out, "{} {} clause {} on {}", if ok { "reproduced" } else { "not reproduced" }, cx.check, cx.clause, cx.structure_id)?;
            if let Witness::Formula { formula, assignment } = &cx.witness {
                writeln!(out, "  {formula} is false under {assignment}")?;
            }
        }
        return Ok(i32::from(reproduced));
    }

    let sources = usize::from(c.exhaustive.is_some()) + usize::from(!c.structure.is_empty()) + usize::from(c.family);
    if sources != 1 {
        return Err(Usage("choose exactly one of --exhaustive, --structure, --family".into()));
    }
    if c.depth > 3 {
        return Err(Usage(format!("--depth {} above 3", c.depth)));
    }
    let jobs = default_jobs(c.jobs);
    let phis = c.phi.iter().map(|p| parse_formula(p)).collect::<Res<Vec<_>>>()?;
    let explicit_bounds = c.bounds.as_deref().map(parse_bounds).transpose()?;
    let axiom_bounds = |id: &AxiomId| -> Bounds {
        match (&explicit_bounds, c.family) {
            (Some(b), _) => b.clone(),
            (None, true) if *id == AxiomId::PowerStar => Bounds::RankAtMost(FAMILY_RANK - 2),
            (None, true) => Bounds::RankAtMost(FAMILY_RANK - 1),
            (None, false) => Bounds::All,
        }
    };

    let mut schemas = Vec::new();
    for tag in &c.schema {
        let id = SchemaId::from_tag(tag).ok_or_else(|| Usage(format!("unknown schema `{tag}`")))?;
        let corpus = if phis.is_empty() || !c.axiom.is_empty() { id.default_corpus(c.depth) } else { phis.clone() };
        schemas.push(PreparedSchema::new(id, &corpus, Strictness::Enforce)?);
    }
    let mut axioms = Vec::new();
    for name in &c.axiom {
        for id in axioms_for(name, &phis, c.depth)? {
            let b = axiom_bounds(&id);
            let name = id.name().to_string();
            axioms.push(PreparedAxiom::new(&id, b)?.with_name(name));
        }
    }
    let mut props: Vec<Box<dyn StructureCheck>> = Vec::new();
    for p in &c.prop {
        props.push(match p.as_str() {
            "subsidiary2" => Box::new(Subsidiary2Check::default()),
            "quotient" => Box::new(QuotientCheck::new(c.depth)),
            "hierarchy" => Box::new(HierarchyCheck::default()),
            other => return Err(Usage(format!("unknown property `{other}`"))),
        });
    }
    let mut checks: Vec<&dyn StructureCheck> = Vec::new();
    checks.extend(schemas.iter().map(|s| s as &dyn StructureCheck));
    checks.extend(axioms.iter().map(|a| a as &dyn StructureCheck));
    checks.extend(props.iter().map(|p| p.as_ref()));
    let single = c.scott || !c.infinity_step.is_empty() || c.copy.is_some();
    if checks.is_empty() && !single {
        return Err(Usage("nothing to check: give --schema, --axiom, --prop, --scott, --infinity-step or --copy".into()));
    }

    let mut reports = Vec::new();
    let structures: Vec<MemStructure> = if let Some(n) = c.exhaustive {
        if !(1..=4).contains(&n) {
            return Err(Usage(format!("--exhaustive {n} outside 1..=4")));
        }
        if single {
            return Err(Usage("--scott, --infinity-step and --copy need --structure or --family".into()));
        }
        reports.extend(run_exhaustive(1..=n, &checks, jobs));
        Vec::new()
    } else if c.family {
        vec![closed_family(&standard_family())?]
    } else {
        c.structure.iter().map(|p| read_structure(p)).collect::<Res<_>>()?
    };
    if !structures.is_empty() && !checks.is_empty() {
        reports.extend(run_on(&structures, &checks, jobs));
    }
    for s in &structures {
        if c.scott {
            let corpus = if phis.is_empty() { functional_corpus() } else { phis.clone() };
            let b = explicit_bounds.clone().unwrap_or(if c.family { Bounds::RankAtMost(FAMILY_RANK - 1) } else { Bounds::All });
            reports.push(check_scott(s, &corpus, &b)?);
        }
        for &n in &c.infinity_step {
            reports.push(check_infinity_step(s, n)?);
        }
        if let Some(spec) = &c.copy {
            reports.push(check_copy_relation(s, &parse_copy(spec)?));
        }
    }
    print_reports(&merge_by_name(reports), c.format, out)
}

fn parse_copy(spec: &str) -> Res<CopyRelation> {
    let mut parts = spec.split_whitespace();
    let mut node = |what: &str| -> Res<usize> {
        parts.next().ok_or_else(|| Usage(format!("--copy: missing {what}")))?.parse::<usize>().map_err(Usage::from)
    };
    let source = node("source")?;
    let target = node("target")?;
    let pairs = parts
        .map(|p| {
            let (a, b) = p.split_once(':').ok_or_else(|| Usage(format!("--copy pair `{p}`: want A:B")))?;
            Ok((a.parse::<usize>()?, b.parse::<usize>()?))
        })
        .collect::<Res<Vec<_>>>()?;
    Ok(CopyRelation::new(source, target, pairs))
}
