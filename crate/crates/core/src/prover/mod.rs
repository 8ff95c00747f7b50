//! Bounded ground proof engine: closed-term universes, saturation of conditional BU
//! equations, Mal'cev flags and proof-log replay.

mod closure;
mod egraph;
mod replay;

pub use closure::{Flags, LeastTerms, ModelConfig, TermModel, UniverseMode, DEFAULT_CEILING, DEFAULT_ROUNDS};
pub use egraph::{EGraph, Id, Justification, MergeRecord};
pub use replay::{replay, ReplayReport};

use crate::error::Result;
use crate::spec::{closed_terms, nstd_axioms, NStdMode, Provenance, SpecSet};
use crate::syntax::{numeral, Signature, Sort, Term};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

/// Closed terms up to a depth, plus numerals up to a cap.
#[derive(Clone, Debug)]
pub struct TermUniverse {
    pub signature: Signature,
    pub depth: u32,
    pub nat_cap: u64,
    pub terms: BTreeMap<Sort, Vec<Term>>,
}

impl TermUniverse {
    pub fn len(&self) -> usize {
        self.terms.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.terms.get(&t.sort()).is_some_and(|ts| ts.contains(t))
    }

    pub fn all(&self) -> impl Iterator<Item = &Term> {
        self.terms.values().flatten()
    }
}

pub fn term_universe(sig: &Signature, depth: u32, nat_cap: u64, ceiling: usize) -> Result<TermUniverse> {
    if depth == 0 {
        return Err(crate::Error::Spec("universe depth must be at least 1".into()));
    }
    let mut terms = closed_terms(sig, depth as usize, ceiling)?;
    if sig.func("0").is_some() && sig.func("S").is_some() {
        let nats = terms.entry(Sort::Nat).or_default();
        for n in 0..=nat_cap {
            let t = numeral(n);
            if !nats.contains(&t) {
                nats.push(t);
            }
        }
        if terms.values().map(Vec::len).sum::<usize>() > ceiling {
            return Err(crate::Error::Resource(format!("term universe exceeded the ceiling of {ceiling} terms in sort nat")));
        }
    }
    Ok(TermUniverse { signature: sig.clone(), depth, nat_cap, terms })
}

/// Saturates `spec` over exactly the terms of `u`.
pub fn ground_closure(spec: &SpecSet, u: &TermUniverse, rounds: usize) -> Result<TermModel> {
    let mut cfg = ModelConfig::new(u.depth, u.nat_cap, UniverseMode::Seeded(u.all().cloned().collect()));
    cfg.rounds = rounds;
    cfg.ceiling = cfg.ceiling.max(4 * u.len());
    TermModel::new(spec, cfg)
}

/// The symbols of the spec's signature that the spec did not introduce.
pub fn base_symbols(spec: &SpecSet) -> BTreeSet<Arc<str>> {
    spec.signature.funcs().iter().map(|f| f.name.clone()).filter(|n| !spec.introduced.contains(n)).collect()
}

/// Bounded initial model: all terms over the base symbols up to `depth`, saturated.
pub fn initial_model(spec: &SpecSet, depth: u32, nat_cap: u64) -> Result<TermModel> {
    TermModel::new(spec, ModelConfig::new(depth, nat_cap, UniverseMode::Full(base_symbols(spec))))
}

pub fn initial_model_with(spec: &SpecSet, config: ModelConfig) -> Result<TermModel> {
    TermModel::new(spec, config)
}

/// The spec extended by the open N-standard axioms (their ground instances are NStdAx⁰).
pub fn with_nstd(spec: &SpecSet) -> Result<SpecSet> {
    let mut out = spec.clone();
    let have: BTreeSet<String> = spec.axioms.iter().filter(|a| a.provenance == Provenance::NStdAx).map(|a| a.formula.to_string()).collect();
    for ax in nstd_axioms(&spec.signature, NStdMode::Open)?.axioms {
        if !have.contains(&ax.formula.to_string()) {
            out.push(ax.formula, ax.provenance);
        }
    }
    Ok(out)
}

/// One equivalence class of a finished model, named by its representative.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ClassDump {
    pub sort: String,
    pub rep: String,
    pub members: Vec<String>,
}

impl TermModel {
    /// Labels each term by the index of the first term it is provably equal to.
    pub fn partition(&mut self, terms: &[Term]) -> Result<Vec<usize>> {
        let ids = terms.iter().map(|t| self.class_of(t)).collect::<Result<Vec<_>>>()?;
        let roots: Vec<Id> = ids.iter().map(|&c| self.graph.find(c)).collect();
        let mut first: BTreeMap<Id, usize> = BTreeMap::new();
        Ok(roots.iter().enumerate().map(|(i, r)| *first.entry(*r).or_insert(i)).collect())
    }

    /// Classes of the universe (level at most the depth), members limited to that level.
    pub fn dump(&self) -> Vec<ClassDump> {
        let lt = self.least_terms(&|_| true, None);
        let depth = self.config.depth;
        let mut out = Vec::new();
        for (sort, cs) in self.universe_classes(depth) {
            for c in cs {
                let members = self
                    .graph
                    .members(c)
                    .filter(|&n| self.graph.nodes[n as usize].level <= depth)
                    .map(|n| self.graph.node_term(n).to_string())
                    .collect();
                let rep = lt.term(self, c).map(|t| t.to_string()).unwrap_or_else(|| self.graph.node_term(c).to_string());
                out.push(ClassDump { sort: sort.to_string(), rep, members });
            }
        }
        out.sort_by(|a, b| (&a.sort, &a.rep).cmp(&(&b.sort, &b.rep)));
        out
    }
}
