//! Macro expansion of the starred predicates, the ZFA → ZF*−Ext translation,
//! pure-set relativization, and axiom-instance builders.
//!
//! The starred predicates are abbreviations:
//!
//! ```text
//! x =* y   ⟺  ∀z (z ∈ x ↔ z ∈ y)
//! set(y)   ⟺  ∀m ∀n (m =* n → (m ∈ y ↔ n ∈ y))
//! x ∈* y   ⟺  set(y) ∧ x ∈ y
//! At(x)    ⟺  ¬set(x)
//! ```
//!
//! Bound variables introduced by expansion use the reserved `_v` prefix, which
//! the parser refuses in user input, so expansion can never capture.

use crate::fol::{reserved_fresh, Atom, Formula, Pred, Quant, Var};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum XlateError {
    #[error("predicate `{0:?}` is not allowed here")]
    ForbiddenPredicate(Pred),
    #[error("{axiom}: {condition}")]
    SideCondition { axiom: &'static str, condition: String },
}

fn fresh(avoid: &mut BTreeSet<Var>) -> Var {
    let v = reserved_fresh(avoid);
    avoid.insert(v.clone());
    v
}

/// `x =* y` in raw form.
fn expand_eq_star(x: &Var, y: &Var, avoid: &mut BTreeSet<Var>) -> Formula {
    let z = fresh(avoid);
    Formula::forall(z.clone(), Formula::iff(Formula::mem(z.clone(), x.clone()), Formula::mem(z, y.clone())))
}

/// `set(y)` in raw form.
fn expand_set(y: &Var, avoid: &mut BTreeSet<Var>) -> Formula {
    let m = fresh(avoid);
    let n = fresh(avoid);
    let coext = expand_eq_star(&m, &n, avoid);
    Formula::forall(
        m.clone(),
        Formula::forall(
            n.clone(),
            Formula::implies(
                coext,
                Formula::iff(Formula::mem(m, y.clone()), Formula::mem(n, y.clone())),
            ),
        ),
    )
}

fn expand_atom(a: &Atom) -> Formula {
    let mut avoid: BTreeSet<Var> = a.args().into_iter().cloned().collect();
    match a {
        Atom::In(..) | Atom::Eq(..) | Atom::Pure(_) => Formula::Atom(a.clone()),
        Atom::EqStar(x, y) => expand_eq_star(x, y, &mut avoid),
        Atom::Set(y) => expand_set(y, &mut avoid),
        Atom::At(x) => Formula::not(expand_set(x, &mut avoid)),
        Atom::InStar(x, y) => {
            Formula::and(expand_set(y, &mut avoid), Formula::mem(x.clone(), y.clone()))
        }
    }
}

/// Replaces every starred atom by its definition over `∈` alone. `Pure`
/// markers are left in place; raw formulas come back unchanged.
pub fn expand(f: &Formula) -> Formula {
    match f {
        Formula::Atom(a) => expand_atom(a),
        Formula::Not(g) => Formula::not(expand(g)),
        Formula::Bin(c, a, b) => Formula::Bin(*c, Box::new(expand(a)), Box::new(expand(b))),
        Formula::Quant(q, v, body) => Formula::Quant(*q, v.clone(), Box::new(expand(body))),
    }
}

fn map_atoms(f: &Formula, g: &mut impl FnMut(&Atom) -> Formula) -> Formula {
    match f {
        Formula::Atom(a) => g(a),
        Formula::Not(h) => Formula::not(map_atoms(h, g)),
        Formula::Bin(c, a, b) => Formula::Bin(*c, Box::new(map_atoms(a, g)), Box::new(map_atoms(b, g))),
        Formula::Quant(q, v, body) => Formula::Quant(*q, v.clone(), Box::new(map_atoms(body, g))),
    }
}

fn reject(f: &Formula, forbidden: &[Pred]) -> Result<(), XlateError> {
    match f.preds().into_iter().find(|p| forbidden.contains(p)) {
        Some(p) => Err(XlateError::ForbiddenPredicate(p)),
        None => Ok(()),
    }
}

/// ZFA formula into the starred language, unexpanded: `∈ ↦ ∈*`, `= ↦ =*`,
/// `At ↦ ¬set`.
pub fn translate_zfa_starred(f: &Formula) -> Result<Formula, XlateError> {
    reject(f, &[Pred::InStar, Pred::EqStar, Pred::Pure])?;
    Ok(map_atoms(f, &mut |a| match a {
        Atom::In(x, y) => Formula::mem_star(x.clone(), y.clone()),
        Atom::Eq(x, y) => Formula::eq_star(x.clone(), y.clone()),
        Atom::At(x) => Formula::not(Formula::set(x.clone())),
        other => Formula::Atom(other.clone()),
    }))
}

/// ZFA formula translated and expanded into the raw `∈` language.
pub fn translate_zfa(f: &Formula) -> Result<Formula, XlateError> {
    Ok(expand(&translate_zfa_starred(f)?))
}

/// ZF formula restricted to pure sets, starred and unexpanded:
/// `∀x φ ↦ ∀x (Pure(x) → φ*)`, `∃x φ ↦ ∃x (Pure(x) ∧ φ*)`.
pub fn relativize_pure_starred(f: &Formula) -> Formula {
    match f {
        Formula::Atom(Atom::In(x, y)) => Formula::mem_star(x.clone(), y.clone()),
        Formula::Atom(Atom::Eq(x, y)) => Formula::eq_star(x.clone(), y.clone()),
        Formula::Atom(Atom::At(x)) => Formula::not(Formula::set(x.clone())),
        Formula::Atom(a) => Formula::Atom(a.clone()),
        Formula::Not(g) => Formula::not(relativize_pure_starred(g)),
        Formula::Bin(c, a, b) => Formula::Bin(
            *c,
            Box::new(relativize_pure_starred(a)),
            Box::new(relativize_pure_starred(b)),
        ),
        Formula::Quant(Quant::Forall, v, body) => Formula::forall(
            v.clone(),
            Formula::implies(Formula::pure(v.clone()), relativize_pure_starred(body)),
        ),
        Formula::Quant(Quant::Exists, v, body) => Formula::exists(
            v.clone(),
            Formula::and(Formula::pure(v.clone()), relativize_pure_starred(body)),
        ),
    }
}

/// Relativized and expanded; `Pure` stays a marker atom.
pub fn relativize_pure(f: &Formula) -> Formula {
    expand(&relativize_pure_starred(f))
}

/// Which membership the witness of a comprehension-shaped axiom is compared by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Raw,
    Star,
}

/// `∀params [guard →] ∃W ([set(W) ∧] ∀Y (Y rel W ↔ body))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Comprehension {
    pub params: Vec<Var>,
    pub guard: Option<Formula>,
    pub witness: Var,
    pub witness_is_set: bool,
    pub member: Var,
    pub membership: Membership,
    pub body: Formula,
}

impl Comprehension {
    fn formula(&self) -> Formula {
        let (y, w) = (self.member.clone(), self.witness.clone());
        let rel = match self.membership {
            Membership::Raw => Formula::mem(y.clone(), w.clone()),
            Membership::Star => Formula::mem_star(y.clone(), w.clone()),
        };
        let mut inner = Formula::forall(y, Formula::iff(rel, self.body.clone()));
        if self.witness_is_set {
            inner = Formula::and(Formula::set(w.clone()), inner);
        }
        let mut f = Formula::exists(w, inner);
        if let Some(g) = &self.guard {
            f = Formula::implies(g.clone(), f);
        }
        Formula::forall_all(self.params.clone(), f)
    }
}

/// How an axiom instance is checked.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    /// `∀params body`.
    Universal { params: Vec<Var>, body: Formula },
    Comprehension(Comprehension),
}

/// Axioms and schemata. Schema variants carry their parameter formula.
#[derive(Clone, Debug, PartialEq)]
pub enum AxiomId {
    /// `φ(X, Z)`; only `X`, `Z` free.
    ReplacementStar(Formula),
    /// `φ(x, y)`, functional up to `=*`.
    ScottReplacement(Formula),
    /// `φ(X, Y)`.
    UnionSchema(Formula),
    /// `φ(y)`; `x` does not occur.
    EpsSeparation(Formula),
    WeakExt,
    AtomsEmpty,
    FoundationStar,
    PairingStar,
    UnionStar,
    PowerStar,
    /// `φ(y)` over starred predicates.
    SeparationStar(Formula),
    /// `φ(x, y)` over starred predicates, not mentioning `B`.
    ReplacementStarZFA(Formula),
    Proposition1,
    /// Raw union of the base theory.
    Union,
    /// Full extensionality with primitive `=`.
    Extensionality,
    /// Raw `∈`-foundation.
    Foundation,
}

impl AxiomId {
    pub fn name(&self) -> &'static str {
        match self {
            AxiomId::ReplacementStar(_) => "replacement*",
            AxiomId::ScottReplacement(_) => "scott-replacement",
            AxiomId::UnionSchema(_) => "union-schema",
            AxiomId::EpsSeparation(_) => "eps-separation",
            AxiomId::WeakExt => "weak-ext",
            AxiomId::AtomsEmpty => "atoms",
            AxiomId::FoundationStar => "foundation*",
            AxiomId::PairingStar => "pairing*",
            AxiomId::UnionStar => "union*",
            AxiomId::PowerStar => "power*",
            AxiomId::SeparationStar(_) => "separation*",
            AxiomId::ReplacementStarZFA(_) => "replacement-zfa*",
            AxiomId::Proposition1 => "proposition1",
            AxiomId::Union => "union",
            AxiomId::Extensionality => "extensionality",
            AxiomId::Foundation => "foundation",
        }
    }

    /// The parameter-free axioms by name.
    pub fn from_name(name: &str) -> Option<AxiomId> {
        Some(match name {
            "weak-ext" => AxiomId::WeakExt,
            "atoms" => AxiomId::AtomsEmpty,
            "foundation*" => AxiomId::FoundationStar,
            "pairing*" => AxiomId::PairingStar,
            "union*" => AxiomId::UnionStar,
            "power*" => AxiomId::PowerStar,
            "proposition1" => AxiomId::Proposition1,
            "union" => AxiomId::Union,
            "extensionality" => AxiomId::Extensionality,
            "foundation" => AxiomId::Foundation,
            _ => return None,
        })
    }

    pub fn schema_parameter(&self) -> Option<&Formula> {
        match self {
            AxiomId::ReplacementStar(f)
            | AxiomId::ScottReplacement(f)
            | AxiomId::UnionSchema(f)
            | AxiomId::EpsSeparation(f)
            | AxiomId::SeparationStar(f)
            | AxiomId::ReplacementStarZFA(f) => Some(f),
            _ => None,
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.schema_parameter() {
            Some(phi) => write!(f, "{}[{phi}]", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

/// A built instance: the starred statement, its raw expansion, the checkable
/// shape, and (for derived schemata) the instances its derivation uses.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomInstance {
    pub id: AxiomId,
    pub starred: Formula,
    pub statement: Formula,
    pub shape: Shape,
    pub obligations: Vec<AxiomInstance>,
}

fn v(name: &str) -> Var {
    Var::new(name)
}

fn side(axiom: &'static str, condition: impl Into<String>) -> XlateError {
    XlateError::SideCondition { axiom, condition: condition.into() }
}

fn check_not_free(axiom: &'static str, phi: &Formula, names: &[&str]) -> Result<(), XlateError> {
    for n in names {
        if phi.has_free(&v(n)) {
            return Err(side(axiom, format!("`{n}` may not occur free in the parameter formula")));
        }
    }
    Ok(())
}

fn check_absent(axiom: &'static str, phi: &Formula, names: &[&str]) -> Result<(), XlateError> {
    let all = phi.all_vars();
    for n in names {
        if all.contains(&v(n)) {
            return Err(side(axiom, format!("`{n}` may not occur in the parameter formula")));
        }
    }
    Ok(())
}

fn check_only_free(axiom: &'static str, phi: &Formula, names: &[&str]) -> Result<(), XlateError> {
    let bound = phi.bound_vars();
    for n in names {
        if bound.contains(&v(n)) {
            return Err(side(axiom, format!("`{n}` may only occur free")));
        }
    }
    Ok(())
}

fn check_starred(axiom: &'static str, phi: &Formula) -> Result<(), XlateError> {
    for p in phi.preds() {
        if matches!(p, Pred::In | Pred::Eq | Pred::Pure) {
            return Err(side(axiom, format!("parameter formula may only use starred predicates, found {p:?}")));
        }
    }
    Ok(())
}

fn extra_params(phi: &Formula, pivots: &[&str]) -> Vec<Var> {
    phi.free_vars().into_iter().filter(|x| !pivots.contains(&x.as_str())).collect()
}

fn instance(id: AxiomId, shape: Shape, obligations: Vec<AxiomInstance>) -> AxiomInstance {
    let starred = match &shape {
        Shape::Universal { params, body } => Formula::forall_all(params.clone(), body.clone()),
        Shape::Comprehension(c) => c.formula(),
    };
    AxiomInstance { id, statement: expand(&starred), starred, shape, obligations }
}

fn comprehension(
    params: Vec<Var>,
    guard: Option<Formula>,
    witness: &str,
    witness_is_set: bool,
    member: &str,
    membership: Membership,
    body: Formula,
) -> Shape {
    Shape::Comprehension(Comprehension {
        params,
        guard,
        witness: v(witness),
        witness_is_set,
        member: v(member),
        membership,
        body,
    })
}

/// Builds the closed instance of an axiom, checking the schema side conditions.
pub fn build_axiom(id: &AxiomId) -> Result<AxiomInstance, XlateError> {
    use Formula as F;
    let id = id.clone();
    Ok(match &id {
        AxiomId::WeakExt => {
            let body = F::implies(
                F::and(F::set("X"), F::set("Y")),
                F::implies(
                    F::forall("Z", F::iff(F::mem_star("Z", "X"), F::mem_star("Z", "Y"))),
                    F::eq_star("X", "Y"),
                ),
            );
            instance(id, Shape::Universal { params: vec![v("X"), v("Y")], body }, vec![])
        }
        AxiomId::AtomsEmpty => {
            let body = translate_zfa_starred(&F::implies(
                F::at("x"),
                F::not(F::exists("y", F::mem("y", "x"))),
            ))?;
            instance(id, Shape::Universal { params: vec![v("x")], body }, vec![])
        }
        AxiomId::Extensionality => {
            let body = F::implies(F::forall("z", F::iff(F::mem("z", "X"), F::mem("z", "Y"))), F::eq("X", "Y"));
            instance(id, Shape::Universal { params: vec![v("X"), v("Y")], body }, vec![])
        }
        AxiomId::Foundation | AxiomId::FoundationStar => {
            let raw = F::implies(
                F::exists("X", F::mem("X", "A")),
                F::exists_in("Y", "A", F::not(F::exists_in("Z", "A", F::mem("Z", "Y")))),
            );
            let body = if id == AxiomId::Foundation { raw } else { translate_zfa_starred(&raw)? };
            instance(id, Shape::Universal { params: vec![v("A")], body }, vec![])
        }
        AxiomId::PairingStar => {
            let body = F::or(F::eq_star("y", "A"), F::eq_star("y", "B"));
            instance(id, comprehension(vec![v("A"), v("B")], None, "x", false, "y", Membership::Star, body), vec![])
        }
        AxiomId::UnionStar => {
            let body = F::exists_in_star("z", "A", F::mem_star("y", "z"));
            instance(id, comprehension(vec![v("A")], None, "x", false, "y", Membership::Star, body), vec![])
        }
        AxiomId::Union => {
            let body = F::exists_in("Z", "A", F::mem("Y", "Z"));
            instance(id, comprehension(vec![v("A")], None, "X", false, "Y", Membership::Raw, body), vec![])
        }
        AxiomId::PowerStar => {
            let body = F::forall("z", F::implies(F::mem_star("z", "y"), F::mem_star("z", "A")));
            instance(id, comprehension(vec![v("A")], None, "x", false, "y", Membership::Star, body), vec![])
        }
        AxiomId::Proposition1 => {
            let body = F::exists_in("x", "A", F::eq_star("y", "x"));
            instance(id, comprehension(vec![v("A")], None, "B", false, "y", Membership::Raw, body), vec![])
        }
        AxiomId::SeparationStar(phi) => {
            const NAME: &str = "separation*";
            check_starred(NAME, phi)?;
            check_absent(NAME, phi, &["x"])?;
            let mut params = extra_params(phi, &["y", "A"]);
            params.push(v("A"));
            let body = F::and(F::mem_star("y", "A"), phi.clone());
            instance(id, comprehension(params, None, "x", true, "y", Membership::Star, body), vec![])
        }
        AxiomId::ReplacementStar(phi) => {
            const NAME: &str = "replacement*";
            if let Some(x) = extra_params(phi, &["X", "Z"]).first() {
                return Err(side(NAME, format!("only `X` and `Z` may occur free, found `{x}`")));
            }
            check_only_free(NAME, phi, &["X", "Z"])?;
            let body = F::exists_in("X", "A", F::forall("Z", F::iff(F::mem("Z", "Y"), phi.clone())));
            instance(id, comprehension(vec![v("A")], None, "B", false, "Y", Membership::Raw, body), vec![])
        }
        AxiomId::ReplacementStarZFA(phi) => {
            const NAME: &str = "replacement-zfa*";
            check_starred(NAME, phi)?;
            check_absent(NAME, phi, &["B"])?;
            check_not_free(NAME, phi, &["A", "k"])?;
            let mut params = extra_params(phi, &["x", "y"]);
            params.push(v("A"));
            // ∃!*y φ(x,y) ⟺ ∃k ∀y (φ(x,y) ↔ y =* k)
            let guard = F::forall(
                "x",
                F::implies(
                    F::mem_star("x", "A"),
                    F::exists("k", F::forall("y", F::iff(phi.clone(), F::eq_star("y", "k")))),
                ),
            );
            let body = F::exists_in_star("x", "A", phi.clone());
            instance(id, comprehension(params, Some(guard), "B", true, "y", Membership::Star, body), vec![])
        }
        AxiomId::ScottReplacement(phi) => {
            const NAME: &str = "scott-replacement";
            check_not_free(NAME, phi, &["A", "B", "z"])?;
            let mut params = extra_params(phi, &["x", "y"]);
            params.push(v("A"));
            let phi_z = phi.substitute(&v("y"), &v("z"));
            let guard = F::forall_all(
                [v("x"), v("y"), v("z")],
                F::implies(F::and(phi.clone(), phi_z), F::eq_star("y", "z")),
            );
            let body = F::exists_in("x", "A", phi.clone());
            instance(id, comprehension(params, Some(guard), "B", false, "y", Membership::Raw, body), vec![])
        }
        AxiomId::UnionSchema(phi) => {
            const NAME: &str = "union-schema";
            check_not_free(NAME, phi, &["A", "B", "Z"])?;
            let mut params = extra_params(phi, &["X", "Y"]);
            let guard = F::forall(
                "X",
                F::exists("Z", F::forall("Y", F::implies(phi.clone(), F::mem("Y", "Z")))),
            );
            let body = F::exists_in("X", "A", phi.clone());
            let shape_params = {
                params.push(v("A"));
                params.clone()
            };
            let shape = comprehension(shape_params, Some(guard.clone()), "B", false, "Y", Membership::Raw, body.clone());
            let mut inst = instance(id, shape, vec![]);
            // the schema puts the bound condition outside ∀A
            params.pop();
            let c = match &inst.shape {
                Shape::Comprehension(c) => Comprehension { params: vec![v("A")], guard: None, ..c.clone() },
                Shape::Universal { .. } => unreachable!(),
            };
            inst.starred = F::forall_all(params, F::implies(guard, c.formula()));
            inst.statement = expand(&inst.starred);
            inst
        }
        AxiomId::EpsSeparation(phi) => {
            const NAME: &str = "eps-separation";
            check_absent(NAME, phi, &["x", "X", "Z"])?;
            check_only_free(NAME, phi, &["y"])?;
            if let Some(p) = extra_params(phi, &["y"]).first() {
                return Err(side(NAME, format!("only `y` may occur free, found `{p}`")));
            }
            let body = F::and(F::mem("y", "A"), phi.clone());
            let step1 = build_axiom(&AxiomId::ReplacementStar(F::and(
                F::eq("Z", "X"),
                phi.substitute(&v("y"), &v("X")),
            )))?;
            let step2 = build_axiom(&AxiomId::Union)?;
            instance(
                id,
                comprehension(vec![v("A")], None, "x", false, "y", Membership::Raw, body),
                vec![step1, step2],
            )
        }
    })
}

/// The Replacement* parameter used to derive Scott's schema:
/// `ψ(X, Z) := ∃k (φ(X, k) ∧ Z ∈ k)`.
pub fn scott_derived_phi(phi: &Formula) -> Result<Formula, XlateError> {
    check_not_free("scott-replacement", phi, &["X", "Z", "k"])?;
    if let Some(p) = extra_params(phi, &["x", "y"]).first() {
        return Err(side("scott-replacement", format!("derivation needs a parameter-free formula, found `{p}`")));
    }
    let renamed = phi.rename_free(&[(v("x"), v("X")), (v("y"), v("k"))].into_iter().collect());
    Ok(Formula::exists("k", Formula::and(renamed, Formula::mem("Z", "k"))))
}

/// The separating condition of the derivation, `∃x ∈ A φ(x, y)`.
pub fn scott_separation_phi(phi: &Formula) -> Formula {
    Formula::exists_in("x", "A", phi.clone())
}
