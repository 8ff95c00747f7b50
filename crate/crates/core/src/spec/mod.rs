//! Algebraic specifications compiled from derivations, plus the standard axiom sets.

mod axioms;
mod compile;
mod elim;

pub use axioms::{array_axioms, boundedness_instances, closed_terms, nstd_axioms, NStdMode};
pub use compile::{compile_mupr_spec, compile_pr_spec, compiled_algebra};
pub use elim::{eliminate_bu, ElimMode};

use crate::error::{Error, Result};
use crate::sexp::{parse_one, Sexp};
use crate::syntax::parse::{formula_from_sexp, signature_from_sexp};
use crate::syntax::{print_signature, typecheck_formula, Formula, Signature, Sym};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Defining equation of derivation entry k.
    Scheme(usize),
    ArrAx,
    NStdAx,
    BddAx,
    /// The μ axiom for entry k.
    FMu(usize),
    BuElim,
    /// The recursive definition of invexp(n) = 2^-n.
    Invexp,
    /// The approximation inequality.
    Approx,
    User,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Scheme(k) => write!(f, "scheme:{k}"),
            Provenance::ArrAx => f.write_str("arrax"),
            Provenance::NStdAx => f.write_str("nstdax"),
            Provenance::BddAx => f.write_str("bddax"),
            Provenance::FMu(k) => write!(f, "fmu:{k}"),
            Provenance::BuElim => f.write_str("bu-elim"),
            Provenance::Invexp => f.write_str("invexp"),
            Provenance::Approx => f.write_str("approx"),
            Provenance::User => f.write_str("user"),
        }
    }
}

impl std::str::FromStr for Provenance {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let idx = |t: &str| t.parse::<usize>().map_err(|_| format!("bad provenance {s}"));
        match s {
            "arrax" => Ok(Provenance::ArrAx),
            "nstdax" => Ok(Provenance::NStdAx),
            "bddax" => Ok(Provenance::BddAx),
            "bu-elim" => Ok(Provenance::BuElim),
            "invexp" => Ok(Provenance::Invexp),
            "approx" => Ok(Provenance::Approx),
            "user" => Ok(Provenance::User),
            _ => match s.split_once(':') {
                Some(("scheme", k)) => Ok(Provenance::Scheme(idx(k)?)),
                Some(("fmu", k)) => Ok(Provenance::FMu(idx(k)?)),
                _ => Err(format!("bad provenance {s}")),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Axiom {
    pub formula: Formula,
    pub provenance: Provenance,
}

/// A specification: signature plus axioms with their provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecSet {
    pub signature: Signature,
    pub axioms: Vec<Axiom>,
    /// Symbols added by compilation or elimination (hidden from the interface).
    pub introduced: BTreeSet<Arc<str>>,
    /// The symbol standing for the compiled function, if any.
    pub target: Option<Sym>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct CountReport {
    pub sorts: usize,
    /// Function symbols of arity at least one.
    pub symbols: usize,
    pub constants: usize,
    pub axioms: usize,
    pub bu_occurrences: usize,
}

impl SpecSet {
    pub fn new(signature: Signature) -> SpecSet {
        SpecSet { signature, axioms: Vec::new(), introduced: BTreeSet::new(), target: None }
    }

    pub fn push(&mut self, formula: Formula, provenance: Provenance) {
        self.axioms.push(Axiom { formula, provenance });
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.axioms.iter().map(|a| &a.formula)
    }

    pub fn bu_occurrences(&self) -> usize {
        self.formulas().map(|f| f.bu_count()).sum()
    }

    /// Appends the axioms of `other`, whose signature must be contained in ours.
    pub fn extend_from(&mut self, other: &SpecSet) -> Result<()> {
        for a in &other.axioms {
            typecheck_formula(&self.signature, &a.formula)?;
            self.axioms.push(a.clone());
        }
        Ok(())
    }

    /// Every axiom typechecks in the signature.
    pub fn check(&self) -> Result<()> {
        for a in &self.axioms {
            typecheck_formula(&self.signature, &a.formula)?;
        }
        Ok(())
    }
}

pub fn count_report(spec: &SpecSet) -> CountReport {
    let funcs = spec.signature.funcs();
    CountReport {
        sorts: spec.signature.sorts().len(),
        symbols: funcs.iter().filter(|f| !f.is_const()).count(),
        constants: funcs.iter().filter(|f| f.is_const()).count(),
        axioms: spec.axioms.len(),
        bu_occurrences: spec.bu_occurrences(),
    }
}

pub fn print_spec(spec: &SpecSet) -> String {
    let mut out = String::from("(spec\n");
    for l in print_signature(&spec.signature).lines() {
        out += &format!(" {l}\n");
    }
    if !spec.introduced.is_empty() {
        out += &format!(" (introduced {})\n", spec.introduced.iter().map(|s| s.as_ref()).collect::<Vec<_>>().join(" "));
    }
    if let Some(t) = &spec.target {
        out += &format!(" (target {})\n", t.name);
    }
    for a in &spec.axioms {
        out += &format!(" (axiom {} {})\n", a.provenance, a.formula);
    }
    out + ")\n"
}

fn clause<'a>(e: &'a Sexp, name: &str) -> Option<&'a [Sexp]> {
    (e.head() == Some(name)).then(|| &e.list().unwrap()[1..])
}

/// Parses a `.spec` document.
pub fn parse_spec(text: &str) -> Result<SpecSet> {
    let e = parse_one(text)?;
    let items = e.expect_list("spec form")?;
    if e.head() != Some("spec") || items.len() < 2 {
        return Err(e.err("expected (spec (signature ...) ...)"));
    }
    let mut spec = SpecSet::new(signature_from_sexp(&items[1])?);
    for c in &items[2..] {
        if let Some(names) = clause(c, "introduced") {
            for n in names {
                let n = n.expect_atom("symbol name")?;
                spec.signature.sym(n).map_err(|x| c.err(x.to_string()))?;
                spec.introduced.insert(n.into());
            }
        } else if let Some(t) = clause(c, "target") {
            let [n] = t else { return Err(c.err("expected (target NAME)")) };
            spec.target = Some(spec.signature.sym(n.expect_atom("symbol name")?).map_err(|x| c.err(x.to_string()))?);
        } else if let Some(a) = clause(c, "axiom") {
            let [p, f] = a else { return Err(c.err("expected (axiom PROVENANCE FORMULA)")) };
            let prov = p.expect_atom("provenance")?.parse::<Provenance>().map_err(|m| p.err(m))?;
            let formula = formula_from_sexp(&spec.signature, f)?;
            spec.push(formula, prov);
        } else {
            return Err(c.err("unknown spec clause"));
        }
    }
    Ok(spec)
}

pub(crate) fn spec_err(msg: impl Into<String>) -> Error {
    Error::Spec(msg.into())
}
