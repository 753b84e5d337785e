use super::{Counterexample, Report, VerifyError, Witness};
use crate::eval::Assignment;
use crate::fol::{parse, Var};
use crate::memstruct::{
    copy_relation_to, copy_relation_violation, find_star_copy, is_star_ordinal, successor_node, CopyRelation,
    MemStructure, NodeSet,
};

/// Checks the three copying clauses (and the precondition) for `f`.
pub fn check_copy_relation(s: &MemStructure, f: &CopyRelation) -> Report {
    let mut report = Report::new(report_name(f));
    report.structures = 1;
    report.instances = 1;
    report.realized = 1;
    if let Some(v) = copy_relation_violation(s, f) {
        report.fail(|| Counterexample {
            check: report_name(f),
            clause: v.clause.tag().to_string(),
            structure_id: "-".into(),
            structure: s.clone(),
            witness: Witness::Copy { relation: f.clone() },
            detail: v.detail,
        });
    }
    report
}

fn report_name(f: &CopyRelation) -> String {
    format!("copy {}->{}", f.source, f.target)
}

/// Every ∈*-ordinal `m` admitting a verified copying relation from `n`,
/// ascending by node id.
pub fn star_copies(s: &MemStructure, n: usize) -> Vec<(usize, CopyRelation)> {
    s.nodes().filter(|&m| is_star_ordinal(s, m)).filter_map(|m| copy_relation_to(s, n, m).map(|f| (m, f))).collect()
}

/// The induction step for the ∈-ordinal `n`:
/// (a) with `n*` the copy found for `n`, some node has extension
///     `ext(n*) ∪ {x : x =* n*}` and is a verified copy of `n + 1`
///     through `F ∪ {n} × {x : x =* n*}`;
/// (b) all verified copies of `n + 1` are pairwise co-extensional.
///
/// Fails with an error when `n` has no copy to start from.
pub fn check_infinity_step(s: &MemStructure, n: usize) -> Result<Report, VerifyError> {
    let (n_star, f) = find_star_copy(s, n).ok_or(VerifyError::NoStarCopy(n))?;
    let name = format!("infinity-step({n})");
    let mut report = Report::new(name.clone());
    report.structures = 1;
    let fail = |report: &mut Report, clause: &str, witness: Witness, detail: String| {
        report.fail(|| Counterexample {
            check: name.clone(),
            clause: clause.to_string(),
            structure_id: "-".into(),
            structure: s.clone(),
            witness,
            detail,
        })
    };
    let formula = |text: &str, assign: &[(&str, usize)]| Witness::Formula {
        formula: parse(text).expect("fixed formula"),
        assignment: Assignment(assign.iter().map(|&(v, x)| (Var::new(v), x)).collect()),
    };

    report.instances += 1;
    report.realized += 1;
    let Some(succ) = successor_node(s, n) else {
        let w = formula("ex c. all z. (z in c <-> (z in N | z = N))", &[("N", n)]);
        fail(&mut report, "a", w, format!("no successor of node {n}"));
        return Ok(report);
    };
    let class: NodeSet = s.saturate([n_star].iter());
    let mut ext: NodeSet = s.members(n_star).iter().copied().collect();
    ext.extend(class.iter().copied());
    match s.find_extension(&ext) {
        None => {
            let w = formula("ex m. all z. (z in m <-> (z in N | z =* N))", &[("N", n_star)]);
            fail(&mut report, "a", w, format!("no node with extension ext({n_star}) ∪ [{n_star}]"));
        }
        Some(m) => {
            let mut pairs = f.pairs.clone();
            pairs.extend(class.iter().map(|&b| (n, b)));
            let g = CopyRelation::new(succ, m, pairs);
            if let Some(v) = copy_relation_violation(s, &g) {
                fail(&mut report, v.clause.tag(), Witness::Copy { relation: g }, format!("clause a: {}", v.detail));
            }
        }
    }

    report.instances += 1;
    let copies = star_copies(s, succ);
    if let Some(&(first, _)) = copies.first() {
        report.realized += 1;
        if let Some((m, _)) = copies.iter().find(|(m, _)| !s.coext(*m, first)) {
            let w = formula("M =* N", &[("M", first), ("N", *m)]);
            fail(&mut report, "b", w, format!("copies {first} and {m} of node {succ} are not co-extensional"));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelgen::build_hf;
    use crate::verify::replay;

    #[test]
    fn extensional_universe_copies_are_identities() {
        let hf = build_hf(2).unwrap();
        assert_eq!(star_copies(&hf, 0).iter().map(|c| c.0).collect::<Vec<_>>(), vec![0]);
        let r = check_infinity_step(&hf, 0).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        let r = check_infinity_step(&hf, 1).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn missing_successor_witness_fails_clause_a() {
        // ∅ and its doppelgänger, {∅} (an atom), and nothing holding both empties
        let s = MemStructure::from_edges(3, &[(0, 2)]).unwrap();
        let r = check_infinity_step(&s, 0).unwrap();
        assert!(!r.passed());
        let cx = r.counterexample.as_ref().unwrap();
        assert_eq!(cx.clause, "a");
        assert!(replay(cx).unwrap());
        let mut fixed = s.clone();
        fixed.add_node([0, 1], None).unwrap();
        assert!(check_infinity_step(&fixed, 0).unwrap().passed());
        assert_eq!(check_infinity_step(&s, 2), Err(VerifyError::NoStarCopy(2)));
    }

    #[test]
    fn broken_relation_replays() {
        let s = MemStructure::from_edges(4, &[(0, 2), (0, 3), (1, 3)]).unwrap();
        let r = check_copy_relation(&s, &CopyRelation::new(2, 3, vec![(0, 0)]));
        assert!(!r.passed());
        assert!(replay(r.counterexample.as_ref().unwrap()).unwrap());
    }
}
