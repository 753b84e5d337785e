//! Scott's replacement from Replacement*: for `φ` functional up to `=*`,
//! replace each `X ∈ A` by the sets `Y` with `ext(Y) = U_X` where
//! `U_X = {Z : ∃k (φ(X, k) ∧ Z ∈ k)}`, collect them in `B0`, and
//! ∈-separate `B0` by `∃x ∈ A φ(x, y)`. The result must have exactly the
//! extension Scott's schema asks for.

use super::family::{relation_rows, within_one_class};
use super::{Bounds, Counterexample, Report, VerifyError, Witness};
use crate::eval::{Assignment, Compiled, Model, DEFAULT_DEPTH_LIMIT};
use crate::fol::{Formula, Var};
use crate::memstruct::{MemStructure, NodeSet};
use crate::xlate::{build_axiom, scott_derived_phi, scott_separation_phi, AxiomId, Shape};

fn assign(pairs: &[(&str, usize)]) -> Assignment {
    Assignment(pairs.iter().map(|&(v, x)| (Var::new(v), x)).collect())
}

/// `∃W ∀m (m ∈ W ↔ body)`.
fn realized_by_some_node(m: &str, body: Formula) -> Formula {
    Formula::exists("_w", Formula::forall(m, Formula::iff(Formula::mem(m, "_w"), body)))
}

/// Checks the direct and derived witnesses for every `φ` in `corpus` and
/// every `A` within `bounds` where `φ` is functional up to `=*`.
pub fn check_scott(s: &MemStructure, corpus: &[Formula], bounds: &Bounds) -> Result<Report, VerifyError> {
    let model = Model::new(s)?;
    let params = bounds.resolve(s)?;
    let mut report = Report::new("scott");
    report.structures = 1;
    let xy = [Var::new("x"), Var::new("y")];
    for phi in corpus {
        let direct_claim = match build_axiom(&AxiomId::ScottReplacement(phi.clone()))?.shape {
            Shape::Comprehension(c) => match &c.guard {
                Some(g) => Formula::implies(
                    g.clone(),
                    Formula::exists("B", Formula::forall("y", Formula::iff(Formula::mem("y", "B"), c.body.clone()))),
                ),
                None => unreachable!("Scott's schema is guarded"),
            },
            Shape::Universal { .. } => unreachable!("Scott's schema is a comprehension"),
        };
        let psi = scott_derived_phi(phi)?;
        let b0_claim = realized_by_some_node(
            "Y",
            Formula::exists_in("X", "A", Formula::forall("Z", Formula::iff(Formula::mem("Z", "Y"), psi.clone()))),
        );
        let sep_claim =
            realized_by_some_node("y", Formula::and(Formula::mem("y", "B0"), scott_separation_phi(phi)));

        let rows = relation_rows(&model, &Compiled::new(phi, &xy, DEFAULT_DEPTH_LIMIT)?);
        let functional = rows.iter().all(|r| within_one_class(s, r));
        for &a in &params {
            report.instances += 1;
            if !functional {
                continue;
            }
            report.realized += 1;
            let mut fail = |clause: &str, formula: &Formula, assignment: Assignment, detail: String| {
                report.fail(|| Counterexample {
                    check: "scott".into(),
                    clause: clause.into(),
                    structure_id: "-".into(),
                    structure: s.clone(),
                    witness: Witness::Formula { formula: formula.clone(), assignment },
                    detail: format!("φ = {phi}: {detail}"),
                })
            };
            let xs = s.members(a);
            let direct: NodeSet = xs.iter().flat_map(|&x| rows[x].iter().copied()).collect();
            let Some(b) = s.find_extension(&direct) else {
                fail("direct", &direct_claim, assign(&[("A", a)]), format!("A = {a}"));
                continue;
            };
            let us: Vec<NodeSet> =
                xs.iter().map(|&x| rows[x].iter().flat_map(|&k| s.members(k).iter().copied()).collect()).collect();
            let b0_ext: NodeSet =
                s.nodes().filter(|&y| us.iter().any(|u| s.members(y).iter().eq(u.iter()))).collect();
            let Some(b0) = s.find_extension(&b0_ext) else {
                fail("replacement", &b0_claim, assign(&[("A", a)]), format!("A = {a}"));
                continue;
            };
            let separated: NodeSet = b0_ext.iter().copied().filter(|&y| xs.iter().any(|&x| rows[x].contains(&y))).collect();
            let Some(sep) = s.find_extension(&separated) else {
                fail("separation", &sep_claim, assign(&[("A", a), ("B0", b0)]), format!("A = {a}, B0 = {b0}"));
                continue;
            };
            if !s.coext(sep, b) {
                let agree = Formula::eq_star("S", "B");
                fail("agreement", &agree, assign(&[("S", sep), ("B", b)]), format!("A = {a}"));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse;
    use crate::verify::replay;

    #[test]
    fn identity_on_small_family() {
        // ∅, ∅′, {∅} and the set of both empties
        let s = MemStructure::from_edges(4, &[(0, 2), (0, 3), (1, 3)]).unwrap();
        let r = check_scott(&s, &[parse("y =* x").unwrap()], &Bounds::Nodes(vec![0, 2])).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert_eq!(r.realized, 2);
    }

    #[test]
    fn empty_relation_gives_empty_image() {
        let s = MemStructure::from_edges(2, &[(0, 1)]).unwrap();
        let r = check_scott(&s, &[parse("~(y = y)").unwrap()], &Bounds::All).unwrap();
        assert!(r.passed());
        assert_eq!(r.realized, 2);
    }

    #[test]
    fn non_functional_is_vacuous() {
        let s = MemStructure::from_edges(2, &[(0, 1)]).unwrap();
        let r = check_scott(&s, &[parse("y = y").unwrap()], &Bounds::All).unwrap();
        assert!(r.passed());
        assert_eq!(r.realized, 0);
        assert_eq!(r.instances, 2);
    }

    #[test]
    fn missing_image_is_reported() {
        // {∅} exists but nothing holds both ∅ and ∅′
        let s = MemStructure::from_edges(3, &[(0, 2)]).unwrap();
        let r = check_scott(&s, &[parse("y =* x").unwrap()], &Bounds::Nodes(vec![2])).unwrap();
        assert!(!r.passed());
        let cx = r.counterexample.unwrap();
        assert_eq!(cx.clause, "direct");
        assert!(replay(&cx).unwrap());
    }
}
