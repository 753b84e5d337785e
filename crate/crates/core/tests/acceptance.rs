//! One test per acceptance criterion. The exhaustive n ≤ 4 pass is shared by
//! criteria 1, 4 and 9 and computed once. Each test prints a PASS/FAIL line
//! with its figures before asserting.

use coext::memstruct::{find_star_copy, CopyRelation, MemStructure};
use coext::modelgen::{build_hf, enumerate_all, random_structure, standard_family};
use coext::verify::suite::{agreement_sample, closed_family_reports, AGREEMENT_SEED, TC_SEED};
use coext::verify::{
    check_axiom, check_infinity_step, check_scott, closed_family, corpus, functional_corpus, replay, run_exhaustive,
    star_copies, Bounds, HierarchyCheck, PreparedAxiom, PreparedSchema, QuotientCheck, Report, Scope, SchemaId,
    StructureCheck, Strictness, Subsidiary2Check, FAMILY_RANK, RAW,
};
use coext::xlate::AxiomId;
use coext::Var;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, VecDeque};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

const MAX_NODES: usize = 4;

// Σ 2^(n²) for n = 1..4
const ALL_STRUCTURES: u64 = 2 + 16 + 512 + 65536;
// labelled acyclic digraphs on 1..4 nodes: 1, 3, 25, 543
const ACYCLIC_STRUCTURES: u64 = 1 + 3 + 25 + 543;

fn verdict(label: &str, ok: bool, lines: &[String]) {
    println!("{} {label}", if ok { "PASS" } else { "FAIL" });
    for l in lines {
        println!("    {}", l.replace('\n', "\n    "));
    }
    assert!(ok, "{label} failed");
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

struct Exhaustive {
    schemas: Vec<(SchemaId, usize, Report)>,
    sub2: Report,
    weak: Report,
    atoms: Report,
    quotient: Report,
    quotient_formulas: usize,
    hierarchy: Report,
    elapsed: Duration,
}

fn exhaustive() -> &'static Exhaustive {
    static CELL: OnceLock<Exhaustive> = OnceLock::new();
    CELL.get_or_init(|| {
        let start = Instant::now();
        let schemas: Vec<PreparedSchema> = SchemaId::PRIMARY
            .iter()
            .map(|&id| PreparedSchema::new(id, &id.default_corpus(1), Strictness::Enforce).unwrap())
            .collect();
        let sub2 = Subsidiary2Check::default();
        let weak = PreparedAxiom::new(&AxiomId::WeakExt, Bounds::All).unwrap();
        let atoms = PreparedAxiom::new(&AxiomId::AtomsEmpty, Bounds::All).unwrap();
        let quotient = QuotientCheck::new(1);
        let hierarchy = HierarchyCheck::default();
        let mut checks: Vec<&dyn StructureCheck> = schemas.iter().map(|s| s as &dyn StructureCheck).collect();
        checks.extend([&sub2 as &dyn StructureCheck, &weak, &atoms, &quotient, &hierarchy]);
        let mut reports = run_exhaustive(1..=MAX_NODES, &checks, jobs()).into_iter();
        let schemas = SchemaId::PRIMARY
            .iter()
            .zip(&schemas)
            .map(|(&id, s)| (id, s.instance_count(), reports.next().unwrap()))
            .collect();
        let mut next = || reports.next().unwrap();
        Exhaustive {
            schemas,
            sub2: next(),
            weak: next(),
            atoms: next(),
            quotient: next(),
            quotient_formulas: quotient.formula_count(),
            hierarchy: next(),
            elapsed: start.elapsed(),
        }
    })
}

fn family() -> &'static MemStructure {
    static CELL: OnceLock<MemStructure> = OnceLock::new();
    CELL.get_or_init(|| closed_family(&standard_family()).unwrap())
}

fn clean(r: &Report, lines: &mut Vec<String>) -> bool {
    lines.push(r.to_text());
    r.passed()
}

#[test]
fn criterion_1_validity_suite() {
    let e = exhaustive();
    let mut lines = Vec::new();
    let mut ok = true;
    for (id, count, r) in &e.schemas {
        ok &= *count >= 30;
        lines.push(format!("{} corpus: {count} formulas", id.tag()));
        ok &= clean(r, &mut lines);
        ok &= r.structures == ALL_STRUCTURES;
    }
    for r in [&e.sub2, &e.weak, &e.atoms] {
        ok &= clean(r, &mut lines);
        ok &= r.structures == ALL_STRUCTURES;
    }
    ok &= e.elapsed <= Duration::from_secs(600);
    lines.push(format!("{ALL_STRUCTURES} structures, exhaustive pass took {:.1?}", e.elapsed));
    verdict("criterion 1 validity suite", ok, &lines);
}

/// Fails with a counterexample that reproduces when replayed.
fn detected(r: &Report, lines: &mut Vec<String>) -> bool {
    lines.push(r.to_text());
    r.counterexample.as_ref().is_some_and(|cx| replay(cx).unwrap())
}

#[test]
fn criterion_2_negative_controls() {
    let mut lines = Vec::new();
    let raw = corpus(0, &[Var::new("y"), Var::new("w")], RAW);
    let control = PreparedSchema::new(SchemaId::Lemma1, &raw, Strictness::Control).unwrap();
    let r = run_exhaustive(1..=3, &[&control], jobs()).remove(0);
    let mut ok = detected(&r, &mut lines);
    ok &= r.counterexample.as_ref().is_some_and(|cx| cx.structure.len() <= 3);
    let two = MemStructure::new(2);
    ok &= detected(&check_axiom(&two, &AxiomId::Extensionality, &Bounds::All).unwrap(), &mut lines);
    let lp = MemStructure::from_edges(1, &[(0, 0)]).unwrap();
    ok &= detected(&check_axiom(&lp, &AxiomId::Foundation, &Bounds::All).unwrap(), &mut lines);
    verdict("criterion 2 negative controls", ok, &lines);
}

#[test]
fn criterion_3_native_expanded_agreement() {
    let (agree, total) = agreement_sample(1000, AGREEMENT_SEED).unwrap();
    verdict("criterion 3 native/expanded agreement", agree == total && total == 1000, &[format!("{agree}/{total} agree")]);
}

#[test]
fn criterion_4_quotient() {
    let e = exhaustive();
    let mut lines = vec![format!("{} transfer formulas", e.quotient_formulas)];
    let ok = clean(&e.quotient, &mut lines) && e.quotient.structures == ALL_STRUCTURES && e.quotient_formulas >= 30;
    verdict("criterion 4 quotient", ok, &lines);
}

/// Nodes with an ∈-path into `x`, by breadth-first search over reversed edges.
fn reverse_reach(s: &MemStructure, x: usize) -> BTreeSet<usize> {
    let n = s.len();
    let mut into: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (z, c) in s.edges() {
        into[c].push(z);
    }
    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<usize> = into[x].iter().copied().collect();
    while let Some(z) = queue.pop_front() {
        if seen.insert(z) {
            queue.extend(into[z].iter().copied());
        }
    }
    seen
}

#[test]
fn criterion_5_transitive_closure() {
    let mut compared = 0;
    let mut mismatches = 0;
    let mut cmp = |s: &MemStructure| {
        for x in s.nodes() {
            compared += 1;
            if s.tc(x).unwrap().into_iter().collect::<BTreeSet<_>>() != reverse_reach(s, x) {
                mismatches += 1;
            }
        }
    };
    for n in 1..=MAX_NODES {
        enumerate_all(n).unwrap().for_each(|(_, s)| cmp(&s));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(TC_SEED);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=8);
        let p = rng.gen_range(0.0..0.5);
        cmp(&random_structure(n, p, rng.gen()).unwrap());
    }
    verdict("criterion 5 transitive closure", mismatches == 0, &[format!("{compared} nodes compared, {mismatches} mismatches")]);
}

#[test]
fn criterion_6_closed_family_axioms() {
    let base = standard_family();
    let hf = build_hf(3).unwrap();
    let mut lines = Vec::new();
    // HF(3) has 16 sets; three doppelgängers add nodes but no new classes
    let mut ok = hf.len() == 16 && base.len() == 19 && base.coext_classes().len() == 16;
    let f = family();
    ok &= f.len() >= base.len() && f.coext_classes().len() >= 16;
    lines.push(format!("base {} nodes, closed family {} nodes", base.len(), f.len()));
    for r in closed_family_reports(f).unwrap() {
        ok &= r.realized >= 1;
        ok &= clean(&r, &mut lines);
    }
    verdict("criterion 6 closed-family axioms", ok, &lines);
}

fn copy_is_valid(s: &MemStructure, f: &CopyRelation) -> bool {
    let (n, m) = (f.source, f.target);
    let ps = &f.pairs;
    let star_ordinal = s.is_set(m)
        && s.members(m).iter().all(|&b| s.is_set(b) && s.members(b).iter().all(|z| s.contains(m, *z)));
    star_ordinal
        && ps.iter().all(|&(a, b)| s.contains(n, a) && s.contains(m, b))
        && s.members(n).iter().all(|a| ps.iter().any(|p| p.0 == *a))
        && s.members(m).iter().all(|b| ps.iter().any(|p| p.1 == *b))
        && ps.iter().all(|&(a, b)| {
            ps.iter().all(|&(c, d)| (a == c) == s.coext(b, d) && s.contains(c, a) == (s.is_set(d) && s.contains(d, b)))
        })
}

#[test]
fn criterion_7_infinity_step() {
    let f = family();
    let mut lines = Vec::new();
    // the ∈-ordinals 0 = ∅, 1 = {0}, 2 = {0, 1}
    let zero = f.nodes().find(|&x| f.members(x).is_empty()).unwrap();
    let one = f.nodes().find(|&x| f.members(x) == [zero]).unwrap();
    let mut two_ext = vec![zero, one];
    two_ext.sort_unstable();
    let two = f.nodes().find(|&x| f.members(x) == two_ext.as_slice()).unwrap();
    let mut ok = true;
    for (i, n) in [zero, one, two].into_iter().enumerate() {
        let copy = find_star_copy(f, n);
        let valid = copy.as_ref().is_some_and(|(_, rel)| copy_is_valid(f, rel));
        ok &= valid;
        lines.push(format!("ordinal {i} (node {n}): copy {:?}, valid {valid}", copy.map(|c| c.0)));
    }
    for n in [zero, one] {
        ok &= clean(&check_infinity_step(f, n).unwrap(), &mut lines);
    }
    // every copy of 1 and of 2 is co-extensional with every other
    for n in [one, two] {
        let copies = star_copies(f, n);
        let same = copies.iter().all(|(a, _)| copies.iter().all(|(b, _)| f.coext(*a, *b)));
        ok &= !copies.is_empty() && same;
        lines.push(format!("node {n}: {} copies, pairwise co-extensional {same}", copies.len()));
    }
    verdict("criterion 7 infinity step", ok, &lines);
}

#[test]
fn criterion_8_scott_derivation() {
    let corpus = functional_corpus();
    let r = check_scott(family(), &corpus, &Bounds::RankAtMost(FAMILY_RANK - 1)).unwrap();
    let mut lines = vec![format!("{} relations", corpus.len())];
    let ok = corpus.len() == 5 && r.realized >= 1 && clean(&r, &mut lines);
    verdict("criterion 8 scott derivation", ok, &lines);
}

#[test]
fn criterion_9_hierarchy() {
    let e = exhaustive();
    let mut lines = Vec::new();
    let mut ok = clean(&e.hierarchy, &mut lines) && e.hierarchy.structures == ACYCLIC_STRUCTURES;
    // independent of the hierarchy walk: translated foundation on every acyclic structure
    let found = PreparedAxiom::new(&AxiomId::FoundationStar, Bounds::All).unwrap().with_scope(Scope::Acyclic);
    let r = run_exhaustive(1..=MAX_NODES, &[&found], jobs()).remove(0);
    ok &= clean(&r, &mut lines) && r.structures == ACYCLIC_STRUCTURES;
    verdict("criterion 9 hierarchy", ok, &lines);
}

#[test]
fn finding_literal_biconditionals_fail() {
    // the biconditional readings are not valid; the harness must exhibit why
    let mut lines = Vec::new();
    let mut ok = true;
    for id in [SchemaId::Corollary3Literal, SchemaId::Subsidiary1Literal] {
        let s = PreparedSchema::new(id, &id.default_corpus(1), Strictness::Enforce).unwrap();
        let r = run_exhaustive(1..=2, &[&s], jobs()).remove(0);
        ok &= detected(&r, &mut lines);
    }
    verdict("findings: literal biconditionals fail", ok, &lines);
}
