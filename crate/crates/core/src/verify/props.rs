use super::corpus::{corpus, STARRED};
use super::{Counterexample, Report, StructureCheck, Witness};
use crate::eval::{Assignment, Compiled, Model, DEFAULT_DEPTH_LIMIT};
use crate::fol::{parse, Atom, Formula, Var};
use crate::memstruct::{hierarchy_stages, MemStructure, NodeSet};
use crate::xlate::{build_axiom, AxiomId, Shape};

fn assignment(vars: &[&str], values: &[usize]) -> Assignment {
    Assignment(vars.iter().map(|v| Var::new(*v)).zip(values.iter().copied()).collect())
}

fn fail_formula(
    report: &mut Report,
    check: &str,
    clause: &str,
    s: &MemStructure,
    id: &str,
    formula: &Formula,
    assignment: Assignment,
) {
    report.fail(|| Counterexample {
        check: check.into(),
        clause: clause.into(),
        structure_id: id.into(),
        structure: s.clone(),
        witness: Witness::Formula { formula: formula.clone(), assignment },
        detail: String::new(),
    })
}

/// `ext(X) ⊆ ext(A) ∧ X =* Y ⇒ ext(Y) ⊆ ext(A)` for all nodes.
pub struct Subsidiary2Check {
    formula: Formula,
}

impl Default for Subsidiary2Check {
    fn default() -> Self {
        Subsidiary2Check {
            formula: parse("(all z. (z in X -> z in A)) & X =* Y -> all z. (z in Y -> z in A)").expect("fixed formula"),
        }
    }
}

impl StructureCheck for Subsidiary2Check {
    fn name(&self) -> String {
        "subsidiary2".into()
    }

    fn check(&self, s: &MemStructure, _model: &Model, id: &str, report: &mut Report) {
        let n = s.len();
        for a in 0..n {
            for x in 0..n {
                for y in 0..n {
                    report.instances += 1;
                    if !(s.subset(x, a) && s.coext(x, y)) {
                        continue;
                    }
                    report.realized += 1;
                    if !s.subset(y, a) {
                        let values = [a, x, y];
                        fail_formula(report, "subsidiary2", "consequent", s, id, &self.formula, assignment(&["A", "X", "Y"], &values));
                    }
                }
            }
        }
    }
}

/// Replaces `∈*` by `∈` and `=*` by `=`.
pub fn unstar(f: &Formula) -> Formula {
    match f {
        Formula::Atom(a) => Formula::Atom(match a {
            Atom::InStar(x, y) => Atom::In(x.clone(), y.clone()),
            Atom::EqStar(x, y) => Atom::Eq(x.clone(), y.clone()),
            _ => a.clone(),
        }),
        Formula::Not(g) => Formula::not(unstar(g)),
        Formula::Bin(c, l, r) => Formula::Bin(*c, Box::new(unstar(l)), Box::new(unstar(r))),
        Formula::Quant(q, v, g) => Formula::Quant(*q, v.clone(), Box::new(unstar(g))),
    }
}

/// The extensional quotient: `∈*` respects `=*`, set classes are
/// extensional, and starred formulas in the structure agree with their
/// unstarred forms in the quotient under the collapse map.
pub struct QuotientCheck {
    vars: Vec<Var>,
    starred: Vec<(Formula, Compiled)>,
    plain: Vec<Compiled>,
    congruence: Formula,
    extensional: Formula,
}

impl QuotientCheck {
    /// Transfer is checked for every formula of the starred corpus of the
    /// given depth over `y, w`, under every assignment.
    pub fn new(depth: usize) -> Self {
        let vars = vec![Var::new("y"), Var::new("w")];
        let fs = corpus(depth, &vars, STARRED);
        let starred = fs
            .iter()
            .map(|f| (f.clone(), Compiled::new(f, &vars, DEFAULT_DEPTH_LIMIT).expect("corpus within depth")))
            .collect();
        let plain = fs.iter().map(|f| Compiled::new(&unstar(f), &vars, DEFAULT_DEPTH_LIMIT).expect("depth")).collect();
        QuotientCheck {
            vars,
            starred,
            plain,
            congruence: parse("z =* z2 & x =* x2 -> (z in* x <-> z2 in* x2)").expect("fixed formula"),
            extensional: parse("set(x) & set(y) & (all z. (z in* x <-> z in* y)) -> x =* y").expect("fixed formula"),
        }
    }

    pub fn formula_count(&self) -> usize {
        self.starred.len()
    }
}

impl StructureCheck for QuotientCheck {
    fn name(&self) -> String {
        "quotient".into()
    }

    fn check(&self, s: &MemStructure, model: &Model, id: &str, report: &mut Report) {
        let n = s.len();
        let (q, map) = s.quotient();
        // congruence
        for z in 0..n {
            for z2 in 0..n {
                if !s.coext(z, z2) {
                    continue;
                }
                for x in 0..n {
                    for x2 in 0..n {
                        report.instances += 1;
                        if !s.coext(x, x2) {
                            continue;
                        }
                        report.realized += 1;
                        if s.memstar(z, x) != s.memstar(z2, x2) {
                            let values = [z, z2, x, x2];
                            fail_formula(report, "quotient", "congruence", s, id, &self.congruence, assignment(&["z", "z2", "x", "x2"], &values));
                        }
                        // quotient edges agree with ∈*
                        if q.contains(map[x], map[z]) != s.memstar(z, x) {
                            let values = [z, z2, x, x2];
                            fail_formula(report, "quotient", "edges", s, id, &self.congruence, assignment(&["z", "z2", "x", "x2"], &values));
                        }
                    }
                }
            }
        }
        // extensionality on set classes
        for x in 0..n {
            for y in 0..n {
                report.instances += 1;
                if !(s.is_set(x) && s.is_set(y)) {
                    continue;
                }
                report.realized += 1;
                if q.members(map[x]) == q.members(map[y]) && map[x] != map[y] {
                    fail_formula(report, "quotient", "extensionality", s, id, &self.extensional, assignment(&["x", "y"], &[x, y]));
                }
            }
        }
        // transfer
        let qm = Model::new(&q).expect("quotient is no larger");
        let mut env = Vec::new();
        let mut qenv = Vec::new();
        for ((f, c), p) in self.starred.iter().zip(&self.plain) {
            for y in 0..n {
                for w in 0..n {
                    report.instances += 1;
                    report.realized += 1;
                    env.clear();
                    env.extend_from_slice(&[y, w]);
                    qenv.clear();
                    qenv.extend_from_slice(&[map[y], map[w]]);
                    let here = c.run_in(model, &mut env);
                    if here != p.run_in(&qm, &mut qenv) {
                        // replay in the structure: the starred formula, or its negation when it held
                        let formula = if here { Formula::not(f.clone()) } else { f.clone() };
                        let values: Vec<(Var, usize)> = self.vars.iter().cloned().zip([y, w]).collect();
                        report.fail(|| Counterexample {
                            check: "quotient".into(),
                            clause: "transfer".into(),
                            structure_id: id.into(),
                            structure: s.clone(),
                            witness: Witness::Formula { formula, assignment: Assignment(values.into_iter().collect()) },
                            detail: format!("{f} differs in the quotient"),
                        });
                    }
                }
            }
        }
    }
}

/// `v` lies in stage `j`: every ∈-chain below `v` has fewer than `j` steps.
pub fn stage_formula(j: usize, v: &str) -> Formula {
    fn go(j: usize, v: Var, next: usize) -> Formula {
        let m = Var::new(format!("m{next}"));
        let inner = if j == 1 { Formula::not(Formula::mem(m.clone(), v)) } else { Formula::implies(Formula::mem(m.clone(), v), go(j - 1, m.clone(), next + 1)) };
        Formula::forall(m, inner)
    }
    assert!(j >= 1);
    go(j, Var::new(v), 0)
}

/// On acyclic structures: every node enters the cumulative hierarchy within
/// `|S|` steps, and starred Foundation holds for every `A` in the hierarchy.
pub struct HierarchyCheck {
    foundation: Formula,
    compiled: Compiled,
}

impl Default for HierarchyCheck {
    fn default() -> Self {
        let inst = build_axiom(&AxiomId::FoundationStar).expect("parameter-free axiom");
        let Shape::Universal { params, body } = inst.shape else { unreachable!("foundation is universal") };
        HierarchyCheck { compiled: Compiled::new(&body, &params, DEFAULT_DEPTH_LIMIT).expect("depth"), foundation: body }
    }
}

impl StructureCheck for HierarchyCheck {
    fn name(&self) -> String {
        "hierarchy".into()
    }

    fn applies(&self, s: &MemStructure) -> bool {
        s.is_acyclic()
    }

    fn check(&self, s: &MemStructure, model: &Model, id: &str, report: &mut Report) {
        let stages = hierarchy_stages(s, s.len().max(1)).expect("at least one step");
        let inside: NodeSet = stages.iter().flatten().copied().collect();
        let mut env = Vec::new();
        for x in s.nodes() {
            report.instances += 1;
            if !inside.contains(&x) {
                report.fail(|| Counterexample {
                    check: "hierarchy".into(),
                    clause: "stages".into(),
                    structure_id: id.into(),
                    structure: s.clone(),
                    witness: Witness::Formula { formula: stage_formula(s.len().max(1), "x"), assignment: assignment(&["x"], &[x]) },
                    detail: format!("node {x} is in no stage within {} steps", s.len()),
                });
                continue;
            }
            report.realized += 1;
            env.clear();
            env.push(x);
            if !self.compiled.run_in(model, &mut env) {
                fail_formula(report, "hierarchy", "foundation", s, id, &self.foundation, assignment(&["A"], &[x]));
            }
        }
    }
}
