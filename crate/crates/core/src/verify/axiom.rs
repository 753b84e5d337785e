use super::family::{is_one_class, relation_rows, within_one_class};
use super::{for_each_tuple, Counterexample, Report, StructureCheck, VerifyError, Witness};
use crate::eval::{Assignment, Compiled, Model, DEFAULT_DEPTH_LIMIT};
use crate::fol::{Formula, Var};
use crate::memstruct::{MemStructure, NodeSet};
use crate::xlate::{build_axiom, AxiomId, AxiomInstance, Comprehension, Membership, Shape};

/// Which nodes the axiom's parameters range over.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Bounds {
    #[default]
    All,
    Nodes(Vec<usize>),
    /// Nodes whose well-founded rank is at most the given value.
    RankAtMost(usize),
}

impl Bounds {
    pub fn resolve(&self, s: &MemStructure) -> Result<Vec<usize>, VerifyError> {
        match self {
            Bounds::All => Ok(s.nodes().collect()),
            Bounds::Nodes(ns) => {
                if let Some(&bad) = ns.iter().find(|&&x| x >= s.len()) {
                    return Err(VerifyError::BoundsExceedStructure { node: bad, len: s.len() });
                }
                let mut ns = ns.clone();
                ns.sort_unstable();
                ns.dedup();
                Ok(ns)
            }
            Bounds::RankAtMost(r) => {
                Ok(s.ranks().iter().enumerate().filter(|(_, k)| k.is_some_and(|k| k <= *r)).map(|(x, _)| x).collect())
            }
        }
    }
}

/// Which structures a per-structure axiom check applies to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scope {
    #[default]
    All,
    Acyclic,
}

/// An axiom instance compiled for repeated checking.
#[derive(Clone, Debug)]
pub struct PreparedAxiom {
    pub instance: AxiomInstance,
    pub bounds: Bounds,
    pub scope: Scope,
    name: String,
    kind: Kind,
}

#[derive(Clone, Debug)]
enum Kind {
    Universal { params: Vec<Var>, body: Compiled, formula: Formula },
    Comprehension { c: Comprehension, guard: Option<Compiled>, body: Compiled, claim: Formula },
    /// Replacement schemata over a parameter-free `φ(x, y)`. The relation
    /// `{(x, y) : φ}` is tabulated once per structure; the guard and the
    /// target set are read off the table.
    Relational { c: Comprehension, rule: Rule, phi: Compiled, claim: Formula },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Rule {
    /// `∀x ∈* A ∃!*y φ`, target `{y : ∃x ∈* A φ}`
    UniqueOverStar,
    /// `∀x,y,z (φ(x,y) ∧ φ(x,z) → y =* z)`, target `{y : ∃x ∈ A φ}`
    FunctionalOverRaw,
}

impl PreparedAxiom {
    pub fn new(id: &AxiomId, bounds: Bounds) -> Result<Self, VerifyError> {
        let instance = build_axiom(id)?;
        let kind = match &instance.shape {
            Shape::Universal { params, body } => Kind::Universal {
                params: params.clone(),
                body: Compiled::new(body, params, DEFAULT_DEPTH_LIMIT)?,
                formula: body.clone(),
            },
            Shape::Comprehension(c) if relational_rule(id).is_some() && c.params.len() == 1 => {
                let phi = id.schema_parameter().expect("schema");
                Kind::Relational {
                    c: c.clone(),
                    rule: relational_rule(id).expect("checked"),
                    phi: Compiled::new(phi, &[Var::new("x"), Var::new("y")], DEFAULT_DEPTH_LIMIT)?,
                    claim: claim_formula(c),
                }
            }
            Shape::Comprehension(c) => {
                let guard = match &c.guard {
                    Some(g) => Some(Compiled::new(g, &c.params, DEFAULT_DEPTH_LIMIT)?),
                    None => None,
                };
                let mut vars = c.params.clone();
                vars.push(c.member.clone());
                let body = Compiled::new(&c.body, &vars, DEFAULT_DEPTH_LIMIT)?;
                Kind::Comprehension { c: c.clone(), guard, body, claim: claim_formula(c) }
            }
        };
        Ok(PreparedAxiom { name: id.to_string(), instance, bounds, scope: Scope::All, kind })
    }

    pub fn with_scope(mut self, scope: Scope) -> Self {
        self.scope = scope;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn params(&self) -> &[Var] {
        match &self.kind {
            Kind::Universal { params, .. } => params,
            Kind::Comprehension { c, .. } | Kind::Relational { c, .. } => &c.params,
        }
    }

    fn missing_witness(&self, s: &MemStructure, structure_id: &str, claim: &Formula, t: Assignment, target: &NodeSet) -> Counterexample {
        Counterexample {
            check: self.name.clone(),
            clause: "witness".into(),
            structure_id: structure_id.to_string(),
            structure: s.clone(),
            witness: Witness::Formula { formula: claim.clone(), assignment: t },
            detail: format!("no node realizes {{{}}}", join(target)),
        }
    }

    /// Checks every parameter tuple within bounds.
    pub fn run(&self, s: &MemStructure, model: &Model, structure_id: &str, report: &mut Report) -> Result<(), VerifyError> {
        let allowed = self.bounds.resolve(s)?;
        let params = self.params().to_vec();
        let lists: Vec<&[usize]> = params.iter().map(|_| allowed.as_slice()).collect();
        let assignment = |t: &[usize]| Assignment(params.iter().cloned().zip(t.iter().copied()).collect());
        match &self.kind {
            Kind::Universal { body, formula, .. } => {
                let mut env = Vec::new();
                for_each_tuple(&lists, |t| {
                    report.instances += 1;
                    report.realized += 1;
                    env.clear();
                    env.extend_from_slice(t);
                    if !body.run_in(model, &mut env) {
                        report.fail(|| Counterexample {
                            check: self.name.clone(),
                            clause: "instance".into(),
                            structure_id: structure_id.to_string(),
                            structure: s.clone(),
                            witness: Witness::Formula { formula: formula.clone(), assignment: assignment(t) },
                            detail: String::new(),
                        });
                    }
                    true
                });
            }
            Kind::Comprehension { c, guard, body, claim } => {
                let mut env = Vec::new();
                for_each_tuple(&lists, |t| {
                    report.instances += 1;
                    if let Some(g) = guard {
                        env.clear();
                        env.extend_from_slice(t);
                        if !g.run_in(model, &mut env) {
                            return true;
                        }
                    }
                    report.realized += 1;
                    let target = comprehension_target(model, body, t, s.len());
                    if find_witness(s, c, &target).is_none() {
                        report.fail(|| self.missing_witness(s, structure_id, claim, assignment(t), &target));
                    }
                    true
                });
            }
            Kind::Relational { c, rule, phi, claim } => {
                let rows = relation_rows(model, phi);
                let functional = *rule == Rule::FunctionalOverRaw && rows.iter().all(|r| within_one_class(s, r));
                for_each_tuple(&lists, |t| {
                    report.instances += 1;
                    let a = t[0];
                    let xs: Vec<usize> = match rule {
                        Rule::UniqueOverStar => {
                            let xs: Vec<usize> = s.star_extension(a).into_iter().collect();
                            if !xs.iter().all(|&x| is_one_class(s, &rows[x])) {
                                return true;
                            }
                            xs
                        }
                        Rule::FunctionalOverRaw => {
                            if !functional {
                                return true;
                            }
                            s.members(a).to_vec()
                        }
                    };
                    report.realized += 1;
                    let target: NodeSet = xs.iter().flat_map(|&x| rows[x].iter().copied()).collect();
                    if find_witness(s, c, &target).is_none() {
                        report.fail(|| self.missing_witness(s, structure_id, claim, assignment(t), &target));
                    }
                    true
                });
            }
        }
        Ok(())
    }
}

fn relational_rule(id: &AxiomId) -> Option<Rule> {
    match id {
        AxiomId::ReplacementStarZFA(_) => Some(Rule::UniqueOverStar),
        AxiomId::ScottReplacement(_) => Some(Rule::FunctionalOverRaw),
        _ => None,
    }
}

fn join(xs: &NodeSet) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// `[guard →] ∃W (...)` without the leading parameter quantifiers.
fn claim_formula(c: &Comprehension) -> Formula {
    let (y, w) = (c.member.clone(), c.witness.clone());
    let rel = match c.membership {
        Membership::Raw => Formula::mem(y.clone(), w.clone()),
        Membership::Star => Formula::mem_star(y.clone(), w.clone()),
    };
    let mut inner = Formula::forall(y, Formula::iff(rel, c.body.clone()));
    if c.witness_is_set {
        inner = Formula::and(Formula::set(w.clone()), inner);
    }
    let f = Formula::exists(w, inner);
    match &c.guard {
        Some(g) => Formula::implies(g.clone(), f),
        None => f,
    }
}

/// `{ Y : body(params, Y) }`.
pub(crate) fn comprehension_target(model: &Model, body: &Compiled, params: &[usize], n: usize) -> NodeSet {
    let k = params.len();
    let mut env = Vec::with_capacity(body.slots());
    (0..n)
        .filter(|&y| {
            env.clear();
            env.extend_from_slice(params);
            env.push(y);
            debug_assert_eq!(env.len(), k + 1);
            body.run_in(model, &mut env)
        })
        .collect()
}

/// Lowest node `W` with `{Y : Y rel W} = target` (and `set(W)` if required).
pub(crate) fn find_witness(s: &MemStructure, c: &Comprehension, target: &NodeSet) -> Option<usize> {
    s.nodes().find(|&w| {
        let set = s.is_set(w);
        if c.witness_is_set && !set {
            return false;
        }
        match c.membership {
            Membership::Raw => same(s.members(w), target),
            Membership::Star => {
                if set {
                    same(s.members(w), target)
                } else {
                    target.is_empty()
                }
            }
        }
    })
}

fn same(members: &[usize], target: &NodeSet) -> bool {
    members.len() == target.len() && members.iter().eq(target.iter())
}

impl StructureCheck for PreparedAxiom {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn applies(&self, s: &MemStructure) -> bool {
        match self.scope {
            Scope::All => true,
            Scope::Acyclic => s.is_acyclic(),
        }
    }

    fn check(&self, s: &MemStructure, model: &Model, structure_id: &str, report: &mut Report) {
        self.run(s, model, structure_id, report).expect("bounds valid for every structure in the run");
    }
}

/// Checks an axiom on one structure with parameters restricted by `bounds`.
pub fn check_axiom(s: &MemStructure, id: &AxiomId, bounds: &Bounds) -> Result<Report, VerifyError> {
    let prepared = PreparedAxiom::new(id, bounds.clone())?;
    check_instance(s, &prepared)
}

pub fn check_instance(s: &MemStructure, prepared: &PreparedAxiom) -> Result<Report, VerifyError> {
    let model = Model::new(s)?;
    let mut report = Report::new(prepared.name());
    if prepared.applies(s) {
        report.structures = 1;
        prepared.run(s, &model, "-", &mut report)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Evaluator;
    use crate::fol::parse;
    use crate::modelgen::{enumerate_all, random_structure};
    use crate::verify::replay;

    fn s(n: usize, edges: &[(usize, usize)]) -> MemStructure {
        MemStructure::from_edges(n, edges).unwrap()
    }

    #[test]
    fn validities_on_small_structures() {
        for (_, t) in enumerate_all(3).unwrap() {
            assert!(check_axiom(&t, &AxiomId::WeakExt, &Bounds::All).unwrap().passed());
            assert!(check_axiom(&t, &AxiomId::AtomsEmpty, &Bounds::All).unwrap().passed());
        }
    }

    #[test]
    fn extensionality_fails_on_two_empties() {
        let r = check_axiom(&s(2, &[]), &AxiomId::Extensionality, &Bounds::All).unwrap();
        assert!(!r.passed());
        assert!(replay(r.counterexample.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn foundation_fails_on_self_loop() {
        let r = check_axiom(&s(1, &[(0, 0)]), &AxiomId::Foundation, &Bounds::All).unwrap();
        assert!(!r.passed());
        let p = PreparedAxiom::new(&AxiomId::FoundationStar, Bounds::All).unwrap().with_scope(Scope::Acyclic);
        assert_eq!(check_instance(&s(1, &[(0, 0)]), &p).unwrap().structures, 0);
    }

    #[test]
    fn pairing_needs_a_witness() {
        // ∅, ∅′, {∅} (an atom): no node holds both empties
        let r = check_axiom(&s(3, &[(0, 2)]), &AxiomId::PairingStar, &Bounds::Nodes(vec![0])).unwrap();
        assert!(!r.passed());
        let cx = r.counterexample.unwrap();
        assert_eq!(cx.clause, "witness");
        assert!(replay(&cx).unwrap());
        let r = check_axiom(&s(3, &[(0, 2), (1, 2)]), &AxiomId::PairingStar, &Bounds::Nodes(vec![0])).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn bounds_outside_structure_rejected() {
        assert_eq!(
            check_axiom(&s(2, &[]), &AxiomId::PairingStar, &Bounds::Nodes(vec![5])),
            Err(VerifyError::BoundsExceedStructure { node: 5, len: 2 })
        );
    }

    /// Shape-based checking agrees with evaluating the closed statement.
    #[test]
    fn shape_check_agrees_with_statement() {
        let ev = Evaluator::with_depth_limit(12);
        let ids = [
            AxiomId::PairingStar,
            AxiomId::UnionStar,
            AxiomId::PowerStar,
            AxiomId::Proposition1,
            AxiomId::Union,
            AxiomId::ReplacementStar(parse("Z in X").unwrap()),
            AxiomId::SeparationStar(parse("y =* w").unwrap()),
            AxiomId::ReplacementStarZFA(parse("y =* x").unwrap()),
            AxiomId::ScottReplacement(parse("y =* x").unwrap()),
            AxiomId::UnionSchema(parse("Y in X").unwrap()),
        ];
        let mut structures: Vec<MemStructure> = enumerate_all(2).unwrap().map(|(_, t)| t).collect();
        for seed in 0..6 {
            structures.push(random_structure(3, 0.4, seed).unwrap());
        }
        for id in &ids {
            for t in &structures {
                let by_shape = check_axiom(t, id, &Bounds::All).unwrap().passed();
                let inst = build_axiom(id).unwrap();
                let direct = ev.eval(t, &inst.starred, &Assignment::new()).unwrap();
                assert_eq!(by_shape, direct, "{id} on {t:?}");
            }
        }
    }

    #[test]
    fn rank_bounds() {
        let t = s(3, &[(0, 1), (1, 2)]);
        assert_eq!(Bounds::RankAtMost(1).resolve(&t).unwrap(), vec![0, 1]);
        let loopy = s(2, &[(0, 0)]);
        assert_eq!(Bounds::RankAtMost(5).resolve(&loopy).unwrap(), vec![1]);
    }
}
