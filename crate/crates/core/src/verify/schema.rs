use super::{corpus, Counterexample, Report, StructureCheck, VerifyError, Witness, RAW, STARRED};
use crate::eval::{Assignment, Compiled, Model, DEFAULT_DEPTH_LIMIT};
use crate::fol::{Formula, Pred, Var};
use crate::memstruct::MemStructure;
use std::fmt;
use thiserror::Error;

/// The validity schemata. `Corollary3` and `Subsidiary1` are checked in the
/// direction their later uses rely on (as conditionals); the `*Literal`
/// variants check the full biconditionals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemaId {
    /// `∀x∀y (x =* y → (φ(y) ↔ φ(x)))`
    Lemma1,
    /// `∀x (∀y (y ∈ x ↔ φ) → set(x))`
    Corollary1,
    /// `∀y (y ∈ x ↔ φ) → ∀y (y ∈* x ↔ φ)`
    Corollary3,
    /// `∀y (y ∈ x ↔ φ) ↔ ∀y (y ∈* x ↔ φ)`
    Corollary3Literal,
    /// `x =* y → (∀z (z ∈ y ↔ φ) ↔ ∀z (z ∈ x ↔ φ))`
    Subsidiary1,
    /// `x =* y ↔ (∀z (z ∈ y ↔ φ) ↔ ∀z (z ∈ x ↔ φ))`
    Subsidiary1Literal,
    /// `∀x (∀y (y ∈ x ↔ ∀z (z ∈ y ↔ φ)) → set(x))`
    Lemma2,
}

impl SchemaId {
    pub const PRIMARY: [SchemaId; 5] =
        [SchemaId::Lemma1, SchemaId::Corollary1, SchemaId::Corollary3, SchemaId::Subsidiary1, SchemaId::Lemma2];

    pub const ALL: [SchemaId; 7] = [
        SchemaId::Lemma1,
        SchemaId::Corollary1,
        SchemaId::Corollary3,
        SchemaId::Corollary3Literal,
        SchemaId::Subsidiary1,
        SchemaId::Subsidiary1Literal,
        SchemaId::Lemma2,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            SchemaId::Lemma1 => "lemma1",
            SchemaId::Corollary1 => "corollary1",
            SchemaId::Corollary3 => "corollary3",
            SchemaId::Corollary3Literal => "corollary3-literal",
            SchemaId::Subsidiary1 => "subsidiary1",
            SchemaId::Subsidiary1Literal => "subsidiary1-literal",
            SchemaId::Lemma2 => "lemma2",
        }
    }

    pub fn from_tag(tag: &str) -> Option<SchemaId> {
        SchemaId::ALL.into_iter().find(|s| s.tag() == tag)
    }

    /// Predicates the parameter formula may use; `None` means any.
    pub fn signature(self) -> Option<&'static [Pred]> {
        match self {
            SchemaId::Lemma1 | SchemaId::Corollary1 | SchemaId::Corollary3 | SchemaId::Corollary3Literal => {
                Some(STARRED)
            }
            _ => None,
        }
    }

    /// The variable the schema binds or replaces inside φ.
    fn pivot(self) -> &'static str {
        match self {
            SchemaId::Subsidiary1 | SchemaId::Subsidiary1Literal | SchemaId::Lemma2 => "z",
            _ => "y",
        }
    }

    /// Variables that may not occur in φ at all.
    fn forbidden(self) -> &'static [&'static str] {
        match self {
            SchemaId::Lemma1 | SchemaId::Corollary1 | SchemaId::Corollary3 | SchemaId::Corollary3Literal => &["x"],
            _ => &["x", "y"],
        }
    }

    /// The corpus this schema is checked with by default: starred atoms over
    /// `{y, w}` or raw atoms over `{z, w}`.
    pub fn default_corpus(self, depth: usize) -> Vec<Formula> {
        let w = Var::new("w");
        match self.signature() {
            Some(sig) => corpus(depth, &[Var::new("y"), w], sig),
            None => corpus(depth, &[Var::new("z"), w], RAW),
        }
    }

    /// `None` if φ fails the schema's side condition.
    fn instance(self, phi: &Formula) -> Option<Instance> {
        let all = phi.all_vars();
        if self.forbidden().iter().any(|v| all.contains(&Var::new(*v))) {
            return None;
        }
        let pivot = Var::new(self.pivot());
        if self == SchemaId::Lemma1 && (!phi.has_free(&pivot) || phi.bound_vars().contains(&pivot)) {
            return None;
        }
        let params: Vec<Var> = phi.free_vars().into_iter().filter(|v| *v != pivot).collect();
        use Formula as F;
        let along = |v: &str| F::forall("y", F::iff(F::mem("y", v), phi.clone()));
        let along_star = |v: &str| F::forall("y", F::iff(F::mem_star("y", v), phi.clone()));
        let sub = |v: &str| F::forall("z", F::iff(F::mem("z", v), phi.clone()));
        let (lead, antecedent, consequent): (&[&str], Option<Formula>, Formula) = match self {
            SchemaId::Lemma1 => (
                &["x", "y"],
                Some(F::eq_star("x", "y")),
                F::iff(phi.clone(), phi.substitute(&pivot, &Var::new("x"))),
            ),
            SchemaId::Corollary1 => (&["x"], Some(along("x")), F::set("x")),
            SchemaId::Corollary3 => (&["x"], Some(along("x")), along_star("x")),
            SchemaId::Corollary3Literal => (&["x"], None, F::iff(along("x"), along_star("x"))),
            SchemaId::Subsidiary1 => (&["x", "y"], Some(F::eq_star("x", "y")), F::iff(sub("y"), sub("x"))),
            SchemaId::Subsidiary1Literal => {
                (&["x", "y"], None, F::iff(F::eq_star("x", "y"), F::iff(sub("y"), sub("x"))))
            }
            SchemaId::Lemma2 => (
                &["x"],
                Some(F::forall("y", F::iff(F::mem("y", "x"), sub("y")))),
                F::set("x"),
            ),
        };
        let vars: Vec<Var> = lead.iter().map(|v| Var::new(*v)).chain(params).collect();
        let formula = match &antecedent {
            Some(a) => F::implies(a.clone(), consequent.clone()),
            None => consequent.clone(),
        };
        Some(Instance { phi: phi.clone(), vars, antecedent, consequent, formula })
    }
}

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("{schema}: corpus formula `{formula}` uses {pred:?}, outside the schema's signature")]
    Signature { schema: SchemaId, formula: String, pred: Pred },
}

/// Whether corpus formulas outside the signature are errors or are checked
/// anyway (negative controls).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strictness {
    Enforce,
    Control,
}

#[derive(Clone, Debug)]
struct Instance {
    phi: Formula,
    /// Enumerated variables: the schema's own, then φ's parameters.
    vars: Vec<Var>,
    antecedent: Option<Formula>,
    consequent: Formula,
    formula: Formula,
}

#[derive(Clone, Debug)]
struct CompiledInstance {
    instance: Instance,
    antecedent: Option<Compiled>,
    consequent: Compiled,
}

/// A schema with its corpus compiled once, ready to run on many structures.
#[derive(Clone, Debug)]
pub struct PreparedSchema {
    pub id: SchemaId,
    instances: Vec<CompiledInstance>,
    flagged: Vec<Formula>,
    name: String,
}

impl PreparedSchema {
    pub fn new(id: SchemaId, corpus: &[Formula], strictness: Strictness) -> Result<Self, VerifyError> {
        let mut instances = Vec::new();
        let mut flagged = Vec::new();
        for phi in corpus {
            let outside = id
                .signature()
                .and_then(|sig| phi.preds().into_iter().find(|p| !sig.contains(p)));
            if let (Some(pred), Strictness::Enforce) = (outside, strictness) {
                return Err(SchemaError::Signature { schema: id, formula: phi.to_string(), pred }.into());
            }
            match id.instance(phi) {
                Some(inst) => {
                    if outside.is_some() {
                        flagged.push(phi.clone());
                    }
                    let antecedent = match &inst.antecedent {
                        Some(a) => Some(Compiled::new(a, &inst.vars, DEFAULT_DEPTH_LIMIT)?),
                        None => None,
                    };
                    let consequent = Compiled::new(&inst.consequent, &inst.vars, DEFAULT_DEPTH_LIMIT)?;
                    instances.push(CompiledInstance { instance: inst, antecedent, consequent });
                }
                None => {
                    if outside.is_none() {
                        flagged.push(phi.clone());
                    }
                }
            }
        }
        let name = match strictness {
            Strictness::Enforce => id.tag().to_string(),
            Strictness::Control => format!("{}-control", id.tag()),
        };
        Ok(PreparedSchema { id, instances, flagged, name })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Number of corpus formulas actually instantiated.
    pub fn instance_count(&self) -> usize {
        self.instances.len()
    }

    /// Corpus formulas that meet exactly one of signature and side condition.
    pub fn flagged(&self) -> &[Formula] {
        &self.flagged
    }
}

impl StructureCheck for PreparedSchema {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn check(&self, s: &MemStructure, model: &Model, structure_id: &str, report: &mut Report) {
        report.flagged = self.flagged.len() as u64;
        let n = s.len();
        let mut env = Vec::new();
        for ci in &self.instances {
            let k = ci.instance.vars.len();
            if n == 0 && k > 0 {
                continue;
            }
            let mut tuple = vec![0usize; k];
            loop {
                report.instances += 1;
                env.clear();
                env.extend_from_slice(&tuple);
                let realized = match &ci.antecedent {
                    Some(a) => a.run_in(model, &mut env),
                    None => true,
                };
                if realized {
                    report.realized += 1;
                    env.truncate(k);
                    env.copy_from_slice(&tuple);
                    if !ci.consequent.run_in(model, &mut env) {
                        report.fail(|| Counterexample {
                            check: self.name.clone(),
                            clause: if ci.antecedent.is_some() { "consequent" } else { "instance" }.into(),
                            structure_id: structure_id.to_string(),
                            structure: s.clone(),
                            witness: Witness::Formula {
                                formula: ci.instance.formula.clone(),
                                assignment: Assignment(ci.instance.vars.iter().cloned().zip(tuple.iter().copied()).collect()),
                            },
                            detail: format!("phi = {}", ci.instance.phi),
                        });
                    }
                }
                // odometer, first variable most significant
                let mut i = k;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    tuple[i] += 1;
                    if tuple[i] < n {
                        break;
                    }
                    tuple[i] = 0;
                }
                if tuple.iter().all(|&t| t == 0) {
                    break;
                }
            }
        }
    }
}

/// Checks one schema over one structure.
pub fn check_schema(s: &MemStructure, id: SchemaId, corpus: &[Formula]) -> Result<Report, VerifyError> {
    let prepared = PreparedSchema::new(id, corpus, Strictness::Enforce)?;
    let model = Model::new(s)?;
    let mut report = Report::new(prepared.name());
    report.structures = 1;
    prepared.check(s, &model, "-", &mut report);
    Ok(report)
}
