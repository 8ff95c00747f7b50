//! Recovering a specified function's values from its specification: saturate, query the
//! class of f(t₀, k̄), and read off a closed term over the visible signature.

use crate::algebra::{Algebra, Value};
use crate::error::{Error, Result};
use crate::prover::{term_universe, with_nstd, ModelConfig, TermModel, TermUniverse, UniverseMode};
use crate::spec::{print_spec, SpecSet};
use crate::syntax::{Sort, Sym, Term};
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

/// Least term of `u` (in its enumeration order) denoting each value.
pub fn find_naming_term(a: &Algebra, u: &TermUniverse, vals: &[Value]) -> Result<Vec<Term>> {
    vals.iter()
        .map(|v| {
            let sorts: Vec<&Sort> = u.terms.keys().filter(|s| v.has_sort(s)).collect();
            for s in sorts {
                for t in &u.terms[s] {
                    if a.eval_closed(t).is_ok_and(|x| &x == v) {
                        return Ok(t.clone());
                    }
                }
            }
            Err(Error::NotFound(format!("value {v} not named at this depth ({})", u.depth)))
        })
        .collect()
}

/// What to extract: the value of `target` at `args` followed by `params`, from `spec`
/// (the base specification together with the function's own axioms).
#[derive(Clone, Debug)]
pub struct ExtractionTask {
    pub spec: SpecSet,
    pub target: Sym,
    pub args: Vec<Term>,
    pub params: Vec<Term>,
}

impl ExtractionTask {
    /// Task for a compiled spec's own target.
    pub fn for_spec(spec: &SpecSet, args: Vec<Term>) -> Result<ExtractionTask> {
        let target = spec.target.clone().ok_or_else(|| Error::Spec("spec has no target symbol".into()))?;
        Ok(ExtractionTask { spec: spec.clone(), target, args, params: Vec::new() })
    }

    pub fn query(&self) -> Term {
        Term::app(&self.target, self.args.iter().chain(&self.params).cloned().collect())
    }

    /// Symbols a witness may use: everything the spec did not introduce.
    pub fn visible(&self) -> BTreeSet<Arc<str>> {
        let hidden = self.spec.signature.hidden_sorts();
        self.spec
            .signature
            .funcs()
            .iter()
            .filter(|f| !self.spec.introduced.contains(&f.name) && !hidden.contains(&f.range) && !f.domain.iter().any(|s| hidden.contains(s)))
            .map(|f| f.name.clone())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ExtractConfig {
    pub min_depth: u32,
    pub max_depth: u32,
    pub budget: Duration,
    pub rounds: usize,
    pub ceiling: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig { min_depth: 2, max_depth: 12, budget: Duration::from_secs(10), rounds: crate::prover::DEFAULT_ROUNDS, ceiling: crate::prover::DEFAULT_CEILING }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Extraction {
    #[serde(serialize_with = "display")]
    pub term: Term,
    pub value: Option<String>,
    pub depth: u32,
    pub nat_cap: u64,
}

fn display<S: serde::Serializer, T: std::fmt::Display>(t: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(t)
}

/// Extracts values, reusing the saturated model for each (spec, depth).
#[derive(Default)]
pub struct Extractor {
    cache: HashMap<([u8; 32], u32), TermModel>,
}

fn spec_key(spec: &SpecSet) -> [u8; 32] {
    Sha256::digest(print_spec(spec).as_bytes()).into()
}

impl Extractor {
    pub fn new() -> Extractor {
        Extractor::default()
    }

    fn model(&mut self, spec: &SpecSet, key: [u8; 32], depth: u32, cfg: &ExtractConfig, deadline: Instant) -> Result<&mut TermModel> {
        if let std::collections::hash_map::Entry::Vacant(e) = self.cache.entry((key, depth)) {
            let mut mc = ModelConfig::new(depth, 4 * depth as u64, UniverseMode::Seeded(Vec::new()));
            mc.rounds = cfg.rounds;
            mc.ceiling = cfg.ceiling;
            mc.deadline = Some(deadline);
            let m = TermModel::new(spec, mc)?;
            e.insert(m);
        }
        let m = self.cache.get_mut(&(key, depth)).expect("just inserted");
        m.config.deadline = Some(deadline);
        Ok(m)
    }

    /// Iterative deepening on the universe depth until a witness over the visible
    /// signature appears, the depth limit is reached, or the budget runs out.
    pub fn extract(&mut self, task: &ExtractionTask, algebra: Option<&Algebra>, cfg: &ExtractConfig) -> Result<Extraction> {
        let deadline = Instant::now() + cfg.budget;
        let spec = with_nstd(&task.spec)?;
        let key = spec_key(&spec);
        let visible = task.visible();
        let q = task.query();
        for depth in cfg.min_depth..=cfg.max_depth {
            let m = self.model(&spec, key, depth, cfg, deadline)?;
            if !m.flags().consistent {
                return Err(Error::Inconsistent);
            }
            let c = m.class_of(&q)?;
            if !m.flags().consistent {
                return Err(Error::Inconsistent);
            }
            let lt = m.least_terms(&|f| visible.contains(f), None);
            if let Some(t) = lt.term(m, c) {
                let value = algebra.map(|a| a.eval_closed(&t)).transpose()?.map(|v| v.to_string());
                return Ok(Extraction { term: t, value, depth, nat_cap: m.config.nat_cap });
            }
            if Instant::now() > deadline {
                return Err(Error::Budget(format!("no witness for {q} within the budget (reached depth {depth})")));
            }
        }
        Err(Error::NoPureWitness(format!("the class of {q} holds no term over the visible signature up to depth {}", cfg.max_depth)))
    }
}

/// One-shot extraction.
pub fn extract_value(task: &ExtractionTask, algebra: Option<&Algebra>, cfg: &ExtractConfig) -> Result<Extraction> {
    Extractor::new().extract(task, algebra, cfg)
}

pub type Membership = Arc<dyn Fn(&Value) -> bool + Send + Sync>;

/// A subalgebra given by generators and a decision procedure for membership.
///
/// Without `member`, B is the closure of `seeds` and the constants under `ops`
/// (all operations when `ops` is None), which must stay within `bound` elements.
#[derive(Clone)]
pub struct Subalgebra {
    pub seeds: Vec<Value>,
    pub ops: Option<Vec<Arc<str>>>,
    pub member: Option<Membership>,
    pub bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub enum StrongVerdict {
    Closed { checked: usize, elements: usize },
    Counterexample { args: Vec<String>, value: String },
}

/// Bounded generation: elements of B by sort, in order of discovery.
pub fn generate(a: &Algebra, b: &Subalgebra, exclude: &str) -> Result<(BTreeMap<Sort, Vec<Value>>, bool)> {
    let sig = a.signature();
    let ops: Vec<&Sym> = sig
        .funcs()
        .iter()
        .filter(|f| f.name.as_ref() != exclude && (f.is_const() || b.ops.as_ref().is_none_or(|o| o.contains(&f.name))))
        .collect();
    let mut elems: BTreeMap<Sort, Vec<Value>> = BTreeMap::new();
    let mut seen: HashSet<(Sort, Value)> = HashSet::new();
    let mut total = 0usize;
    let mut add = |s: &Sort, v: Value, elems: &mut BTreeMap<Sort, Vec<Value>>| -> bool {
        if seen.insert((s.clone(), v.clone())) {
            elems.entry(s.clone()).or_default().push(v);
            total += 1;
        }
        total <= b.bound
    };
    for v in &b.seeds {
        let s = sig.sorts().iter().find(|s| v.has_sort(s)).ok_or_else(|| Error::Eval(format!("seed {v} has no sort in {}", sig.name)))?;
        if !add(s, v.clone(), &mut elems) {
            return Ok((elems, false));
        }
    }
    loop {
        let before: usize = elems.values().map(Vec::len).sum();
        for f in &ops {
            let pools: Vec<Vec<Value>> = f.domain.iter().map(|s| elems.get(s).cloned().unwrap_or_default()).collect();
            if pools.iter().any(|p| p.is_empty()) && !f.is_const() {
                continue;
            }
            let mut idx = vec![0usize; pools.len()];
            loop {
                let args: Vec<Value> = idx.iter().zip(&pools).map(|(&i, p)| p[i].clone()).collect();
                if let Ok(v) = a.apply(f, &args) {
                    if !add(&f.range, v, &mut elems) {
                        return Ok((elems, false));
                    }
                }
                let mut j = 0;
                while j < idx.len() {
                    idx[j] += 1;
                    if idx[j] < pools[j].len() {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
                if j == idx.len() {
                    break;
                }
            }
        }
        if elems.values().map(Vec::len).sum::<usize>() == before {
            return Ok((elems, true));
        }
    }
}

/// Checks on samples that B is closed under fᴬ.
pub fn check_strong_specifiability(a: &Algebra, f: &str, b: &Subalgebra, samples: usize, seed: u64) -> Result<StrongVerdict> {
    let fs = a.signature().sym(f)?;
    let (elems, complete) = generate(a, b, f)?;
    if !complete && b.member.is_none() {
        return Err(Error::Resource(format!("closure of the subalgebra exceeded {} elements", b.bound)));
    }
    let member = |s: &Sort, v: &Value| match &b.member {
        Some(m) => m(v),
        None => elems.get(s).is_some_and(|vs| vs.contains(v)),
    };
    let pools: Vec<&Vec<Value>> = fs.domain.iter().map(|s| elems.get(s).unwrap_or(&EMPTY)).collect();
    let count = elems.values().map(Vec::len).sum();
    if pools.iter().any(|p| p.is_empty()) {
        return Ok(StrongVerdict::Closed { checked: 0, elements: count });
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    for _ in 0..samples {
        let args: Vec<Value> = pools.iter().map(|p| p[rng.gen_range(0..p.len())].clone()).collect();
        let v = a.apply(&fs, &args)?;
        if !member(&fs.range, &v) {
            return Ok(StrongVerdict::Counterexample { args: args.iter().map(|x| x.to_string()).collect(), value: v.to_string() });
        }
    }
    Ok(StrongVerdict::Closed { checked: samples, elements: count })
}

static EMPTY: Vec<Value> = Vec::new();

/// Universe used by `find_naming_term` for an algebra's signature.
pub fn naming_universe(a: &Algebra, depth: u32, nat_cap: u64) -> Result<TermUniverse> {
    term_universe(a.signature(), depth, nat_cap, crate::prover::DEFAULT_CEILING)
}
