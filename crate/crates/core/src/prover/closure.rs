//! Ground saturation of conditional BU equations over an e-graph.

use super::egraph::{EGraph, Id, Justification};
use crate::error::{Error, Result};
use crate::spec::SpecSet;
use crate::syntax::{Atom, Formula, Sort, Term, Var};
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;
use std::time::Instant;

const UNBOUND: Id = Id::MAX;

#[derive(Clone, Debug)]
pub(crate) enum Pat {
    Var(usize),
    /// A closed subterm, already in the graph.
    Ground(Id),
    App(u32, Vec<Pat>),
}

#[derive(Clone, Debug)]
pub(crate) enum CAtom {
    Eq(Pat, Pat),
    Bu { slot: usize, bound: Pat, body: Box<CAtom> },
}

#[derive(Clone, Debug)]
pub(crate) struct CAxiom {
    pub vars: Vec<Var>,
    /// Free variables plus one slot per bounded quantifier.
    pub slots: usize,
    pub ants: Vec<CAtom>,
    pub cons: CAtom,
    pub driver: Option<Pat>,
    /// Height of the tallest antecedent pattern.
    pub ant_height: u32,
}

fn pat_height(p: &Pat) -> u32 {
    match p {
        Pat::Var(_) | Pat::Ground(_) => 0,
        Pat::App(_, a) => 1 + a.iter().map(pat_height).max().unwrap_or(0),
    }
}

fn atom_height(a: &CAtom) -> u32 {
    match a {
        CAtom::Eq(l, r) => pat_height(l).max(pat_height(r)),
        CAtom::Bu { bound, body, .. } => pat_height(bound).max(atom_height(body)),
    }
}

struct Compiler<'a> {
    g: &'a mut EGraph,
    slots: Vec<Var>,
}

impl Compiler<'_> {
    fn term(&mut self, t: &Term) -> Result<Pat> {
        if t.is_closed() {
            return Ok(Pat::Ground(self.g.add_term(t)?));
        }
        match t {
            Term::Var(v) => Ok(Pat::Var(self.slots.iter().rposition(|x| x == v).expect("free variable has a slot"))),
            Term::App(f, args) => {
                let s = self.g.sym_index(&f.name).ok_or_else(|| Error::Spec(format!("symbol {} is not in the model's signature", f.name)))?;
                Ok(Pat::App(s, args.iter().map(|a| self.term(a)).collect::<Result<_>>()?))
            }
        }
    }

    fn atom(&mut self, a: &Atom) -> Result<CAtom> {
        match a {
            Atom::Eq(l, r) => Ok(CAtom::Eq(self.term(l)?, self.term(r)?)),
            Atom::Lt(..) => Err(Error::Spec(format!("inequality {a} is not a conditional equation"))),
            Atom::Bu { var, bound, body } => {
                let bound = self.term(bound)?;
                let slot = self.slots.len();
                self.slots.push(var.clone());
                let body = self.atom(body)?;
                self.slots.pop();
                // Slots are allocated per nesting depth; record the maximum separately.
                Ok(CAtom::Bu { slot, bound, body: Box::new(body) })
            }
        }
    }
}

fn max_nesting(a: &Atom) -> usize {
    a.bu_count()
}

pub(crate) fn compile_axiom(g: &mut EGraph, f: &Formula) -> Result<CAxiom> {
    let vars = f.vars();
    let mut c = Compiler { g, slots: vars.clone() };
    let ants = f.antecedents.iter().map(|a| c.atom(a)).collect::<Result<Vec<_>>>()?;
    let cons = c.atom(&f.consequent)?;
    let extra = f.atoms().map(max_nesting).max().unwrap_or(0);
    let driver = match &cons {
        CAtom::Eq(l @ Pat::App(..), _) => Some(l.clone()),
        CAtom::Eq(_, r @ Pat::App(..)) => Some(r.clone()),
        _ => None,
    };
    let ant_height = ants.iter().map(atom_height).max().unwrap_or(0);
    Ok(CAxiom { slots: vars.len() + extra, vars, ants, cons, driver, ant_height })
}

/// How the universe of closed terms is populated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UniverseMode {
    /// All terms over the named symbols, built level by level up to the depth.
    Full(BTreeSet<Arc<str>>),
    /// Only the given seed terms (plus numerals up to the cap).
    Seeded(Vec<Term>),
}

#[derive(Clone, Debug)]
pub struct ModelConfig {
    pub depth: u32,
    pub nat_cap: u64,
    pub rounds: usize,
    pub ceiling: usize,
    pub universe: UniverseMode,
    /// Saturation fails with a budget error once this instant passes.
    pub deadline: Option<Instant>,
}

/// Default cap on e-graph nodes.
pub const DEFAULT_CEILING: usize = 1_000_000;
pub const DEFAULT_ROUNDS: usize = 10_000;

impl ModelConfig {
    pub fn new(depth: u32, nat_cap: u64, universe: UniverseMode) -> ModelConfig {
        ModelConfig { depth, nat_cap, rounds: DEFAULT_ROUNDS, ceiling: DEFAULT_CEILING, universe, deadline: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Flags {
    pub consistent: bool,
    pub determines_nat: bool,
    pub determines_bool: bool,
}

impl Flags {
    /// The bounded analogue of N-standardness.
    pub fn n_standard(&self) -> bool {
        self.consistent && self.determines_nat && self.determines_bool
    }
}

/// A closed-term model: the e-graph after saturation.
pub struct TermModel {
    pub spec: SpecSet,
    pub config: ModelConfig,
    pub graph: EGraph,
    pub(crate) axioms: Vec<CAxiom>,
    fired: HashSet<(usize, Vec<Id>)>,
    pub rounds_used: usize,
    /// Whether saturation reached a fixpoint (rather than running out of rounds).
    pub saturated: bool,
    built_level: u32,
}

impl TermModel {
    pub fn new(spec: &SpecSet, config: ModelConfig) -> Result<TermModel> {
        if config.depth == 0 {
            return Err(Error::Spec("universe depth must be at least 1".into()));
        }
        let mut graph = EGraph::new(&spec.signature, config.nat_cap, config.ceiling);
        let axioms = spec.formulas().map(|f| compile_axiom(&mut graph, f)).collect::<Result<Vec<_>>>()?;
        let mut m = TermModel {
            spec: spec.clone(),
            config,
            graph,
            axioms,
            fired: HashSet::new(),
            rounds_used: 0,
            saturated: false,
            built_level: 0,
        };
        m.seed()?;
        m.saturate()?;
        Ok(m)
    }

    fn seed(&mut self) -> Result<()> {
        if let (Some(z), Some(s)) = (self.graph.zero, self.graph.succ) {
            let mut c = self.graph.add(z, &[])?;
            for _ in 0..self.config.nat_cap {
                c = self.graph.add(s, &[c])?;
            }
        }
        match &self.config.universe {
            UniverseMode::Full(_) => {}
            UniverseMode::Seeded(ts) => {
                for t in ts.clone() {
                    self.graph.add_term(&t)?;
                }
            }
        }
        self.graph.rebuild();
        Ok(())
    }

    fn in_full(&self, sym: u32) -> bool {
        match &self.config.universe {
            UniverseMode::Full(set) => set.contains(&self.graph.symbol(sym).name),
            UniverseMode::Seeded(_) => false,
        }
    }

    /// Adds every application over classes of level below `level`.
    fn expand_to(&mut self, level: u32) -> Result<()> {
        let pools = self.pure_classes(level - 1);
        for s in 0..self.graph.syms.len() as u32 {
            if !self.in_full(s) {
                continue;
            }
            let f = self.graph.symbol(s).clone();
            if f.is_const() {
                self.graph.add(s, &[])?;
                continue;
            }
            if level == 1 {
                continue;
            }
            let ps: Vec<&Vec<Id>> = f.domain.iter().map(|d| pools.get(d).unwrap_or(&EMPTY)).collect();
            if ps.iter().any(|p| p.is_empty()) {
                continue;
            }
            let mut idx = vec![0usize; ps.len()];
            loop {
                let args: Vec<Id> = idx.iter().zip(&ps).map(|(&i, p)| p[i]).collect();
                self.graph.add(s, &args)?;
                if !advance(&mut idx, &ps) {
                    break;
                }
            }
        }
        self.graph.rebuild();
        Ok(())
    }

    /// Classes named by a universe-symbol term of height at most `max`.
    fn pure_classes(&self, max: u32) -> BTreeMap<Sort, Vec<Id>> {
        let UniverseMode::Full(set) = &self.config.universe else { return self.universe_classes(max) };
        let lt = self.least_terms(&|f| set.contains(f), Some(max));
        let mut out: BTreeMap<Sort, Vec<Id>> = BTreeMap::new();
        for r in self.graph.roots() {
            if lt.height(self, r).is_some_and(|h| h <= max) {
                out.entry(self.graph.class_sort(r).clone()).or_default().push(r);
            }
        }
        out
    }

    /// Classes of level at most `max`, grouped by sort, in id order.
    pub fn universe_classes(&self, max: u32) -> BTreeMap<Sort, Vec<Id>> {
        let mut out: BTreeMap<Sort, Vec<Id>> = BTreeMap::new();
        for r in self.graph.roots() {
            if self.graph.level(r) <= max {
                out.entry(self.graph.class_sort(r).clone()).or_default().push(r);
            }
        }
        out
    }

    /// Saturates, growing a full universe level by level.
    fn saturate(&mut self) -> Result<()> {
        loop {
            self.close()?;
            let full = matches!(self.config.universe, UniverseMode::Full(_));
            if full && self.built_level < self.config.depth {
                self.built_level += 1;
                self.expand_to(self.built_level)?;
                continue;
            }
            return Ok(());
        }
    }

    /// Runs rounds until nothing changes or the round budget is spent.
    fn close(&mut self) -> Result<()> {
        loop {
            if self.rounds_used >= self.config.rounds {
                self.saturated = false;
                return Ok(());
            }
            if self.config.deadline.is_some_and(|d| Instant::now() > d) {
                return Err(Error::Budget(format!("saturation at depth {} ran out of time after {} rounds", self.config.depth, self.rounds_used)));
            }
            self.rounds_used += 1;
            let before = (self.graph.len(), self.graph.log.len());
            self.round()?;
            if (self.graph.len(), self.graph.log.len()) == before {
                self.saturated = true;
                return Ok(());
            }
        }
    }

    fn round(&mut self) -> Result<()> {
        let depth = self.config.depth;
        for ai in 0..self.axioms.len() {
            let pools = self.universe_classes(depth);
            let ax = self.axioms[ai].clone();
            let mut partial: Vec<Vec<Id>> = Vec::new();
            let mut subst = vec![UNBOUND; ax.slots];
            match &ax.driver {
                Some(Pat::App(f, args)) => {
                    // Nodes created while firing are matched in the same pass.
                    let mut i = 0;
                    while i < self.graph.by_sym[*f as usize].len() {
                        let n = self.graph.by_sym[*f as usize][i];
                        i += 1;
                        if !self.graph.is_live(n) {
                            continue;
                        }
                        let cargs = self.graph.canon_args(n);
                        let pairs: Vec<(&Pat, Id)> = args.iter().zip(cargs).collect();
                        partial.clear();
                        self.match_list(&pairs, &mut subst, &mut |s| partial.push(s.to_vec()));
                        for s in std::mem::take(&mut partial) {
                            self.instantiate(ai, &ax, s, &pools)?;
                        }
                    }
                }
                _ => self.instantiate(ai, &ax, subst.clone(), &pools)?,
            }
            self.graph.rebuild();
        }
        Ok(())
    }

    /// Enumerates the remaining free variables over the universe and fires each instance.
    fn instantiate(&mut self, ai: usize, ax: &CAxiom, s: Vec<Id>, pools: &BTreeMap<Sort, Vec<Id>>) -> Result<()> {
        let limit = self.config.depth + ax.ant_height + 1;
        let free: Vec<usize> = (0..ax.vars.len()).filter(|&i| s[i] == UNBOUND).collect();
        let ps: Vec<&Vec<Id>> = free.iter().map(|&i| pools.get(&ax.vars[i].sort).unwrap_or(&EMPTY)).collect();
        if ps.iter().any(|p| p.is_empty()) {
            return Ok(());
        }
        let mut idx = vec![0usize; free.len()];
        loop {
            let mut inst = s.clone();
            for (k, &i) in free.iter().enumerate() {
                inst[i] = ps[k][idx[k]];
            }
            self.try_fire(ai, ax, inst, limit)?;
            if !advance(&mut idx, &ps) {
                break;
            }
        }
        Ok(())
    }

    fn try_fire(&mut self, ai: usize, ax: &CAxiom, mut inst: Vec<Id>, limit: u32) -> Result<()> {
        let key: Vec<Id> = inst[..ax.vars.len()].iter().map(|&c| self.graph.find(c)).collect();
        if self.fired.contains(&(ai, key.clone())) {
            return Ok(());
        }
        let mut bounds = Vec::new();
        for a in &ax.ants {
            if !self.holds(a, &mut inst, limit, &mut bounds)? {
                return Ok(());
            }
        }
        let bindings = inst[..ax.vars.len()].to_vec();
        let mut why = Justification::Axiom { axiom: ai, bindings, bounds, instance: Vec::new() };
        if self.assert(&ax.cons, &mut inst, &mut why)? {
            self.fired.insert((ai, key));
        }
        Ok(())
    }

    /// Builds the instance of `p`; None if that would create a node above `limit`.
    fn build(&mut self, p: &Pat, s: &[Id], limit: Option<u32>) -> Result<Option<Id>> {
        match p {
            Pat::Var(i) => Ok(Some(s[*i])),
            Pat::Ground(g) => Ok(Some(self.graph.find(*g))),
            Pat::App(f, args) => {
                let mut ids = Vec::with_capacity(args.len());
                for a in args {
                    match self.build(a, s, limit)? {
                        Some(c) => ids.push(c),
                        None => return Ok(None),
                    }
                }
                if let Some(c) = self.graph.lookup(*f, &ids) {
                    return Ok(Some(c));
                }
                if limit.is_some_and(|l| self.graph.prospective_level(*f, &ids) > l) {
                    return Ok(None);
                }
                Ok(Some(self.graph.add(*f, &ids)?))
            }
        }
    }

    fn holds(&mut self, a: &CAtom, s: &mut Vec<Id>, limit: u32, bounds: &mut Vec<u64>) -> Result<bool> {
        match a {
            CAtom::Eq(l, r) => {
                let Some(x) = self.build(l, s, Some(limit))? else { return Ok(false) };
                let Some(y) = self.build(r, s, Some(limit))? else { return Ok(false) };
                Ok(self.graph.find(x) == self.graph.find(y))
            }
            CAtom::Bu { slot, bound, body } => {
                let Some(b) = self.build(bound, s, Some(limit))? else { return Ok(false) };
                let Some(n) = self.graph.numeral(b) else { return Ok(false) };
                bounds.push(n);
                for k in 0..n {
                    s[*slot] = self.graph.numeral_class(k).expect("smaller numerals exist");
                    if !self.holds(body, s, limit, bounds)? {
                        s[*slot] = UNBOUND;
                        return Ok(false);
                    }
                }
                s[*slot] = UNBOUND;
                Ok(true)
            }
        }
    }

    /// Merges the consequent; false if a bounded consequent's bound is not yet a numeral.
    fn assert(&mut self, a: &CAtom, s: &mut Vec<Id>, why: &mut Justification) -> Result<bool> {
        match a {
            CAtom::Eq(l, r) => {
                let x = self.build(l, s, None)?.expect("unlimited build");
                let y = self.build(r, s, None)?.expect("unlimited build");
                self.graph.union(x, y, why.clone());
                Ok(true)
            }
            CAtom::Bu { slot, bound, body } => {
                let b = self.build(bound, s, None)?.expect("unlimited build");
                let Some(n) = self.graph.numeral(b) else { return Ok(false) };
                for k in 0..n {
                    s[*slot] = self.graph.numeral_class(k).expect("smaller numerals exist");
                    if let Justification::Axiom { instance, .. } = why {
                        instance.push((k, n));
                    }
                    self.assert(body, s, why)?;
                    if let Justification::Axiom { instance, .. } = why {
                        instance.pop();
                    }
                }
                s[*slot] = UNBOUND;
                Ok(true)
            }
        }
    }

    fn match_list(&self, pairs: &[(&Pat, Id)], s: &mut Vec<Id>, k: &mut dyn FnMut(&[Id])) {
        let Some(((p, c), rest)) = pairs.split_first() else {
            k(s);
            return;
        };
        let c = self.graph.find(*c);
        match p {
            Pat::Var(i) => {
                if s[*i] == UNBOUND {
                    s[*i] = c;
                    self.match_list(rest, s, k);
                    s[*i] = UNBOUND;
                } else if self.graph.find(s[*i]) == c {
                    self.match_list(rest, s, k);
                }
            }
            Pat::Ground(g) => {
                if self.graph.find(*g) == c {
                    self.match_list(rest, s, k);
                }
            }
            Pat::App(f, args) => {
                let nodes: Vec<Id> = self.graph.members(c).filter(|&n| self.graph.nodes[n as usize].sym == *f).collect();
                for n in nodes {
                    let cargs = self.graph.canon_args(n);
                    let mut more: Vec<(&Pat, Id)> = args.iter().zip(cargs).collect();
                    more.extend_from_slice(rest);
                    self.match_list(&more, s, k);
                }
            }
        }
    }

    /// Class of a closed term, adding it (and re-saturating) if it is new.
    pub fn class_of(&mut self, t: &Term) -> Result<Id> {
        if let Some(c) = self.graph.lookup_term(t) {
            return Ok(c);
        }
        let c = self.graph.add_term(t)?;
        self.graph.rebuild();
        self.close()?;
        Ok(self.graph.find(c))
    }

    /// Whether t1 = t2 is provable within the bounded universe.
    pub fn proves_equal(&mut self, t1: &Term, t2: &Term) -> Result<bool> {
        let a = self.class_of(t1)?;
        let b = self.class_of(t2)?;
        Ok(self.graph.find(a) == self.graph.find(b))
    }

    pub fn flags(&self) -> Flags {
        let tf = |n: &str| self.graph.sym_index(n).and_then(|s| self.graph.lookup(s, &[]));
        let (t, f) = (tf("true"), tf("false"));
        let consistent = match (t, f) {
            (Some(a), Some(b)) => self.graph.find(a) != self.graph.find(b),
            _ => true,
        };
        let u = self.universe_classes(self.config.depth);
        let determines_nat = u.get(&Sort::Nat).is_none_or(|cs| cs.iter().all(|&c| self.graph.numeral(c).is_some()));
        let determines_bool = u.get(&Sort::Bool).is_none_or(|cs| {
            cs.iter().all(|&c| [t, f].iter().flatten().any(|&x| self.graph.find(x) == self.graph.find(c)))
        });
        Flags { consistent, determines_nat, determines_bool }
    }

    /// The least member of each class by (height, symbol index, argument ranks), using only
    /// nodes whose symbol passes `allow`. Classes holding a numeral up to the cap are named by it.
    pub fn least_terms(&self, allow: &dyn Fn(&str) -> bool, max_height: Option<u32>) -> LeastTerms {
        let n = self.graph.len();
        let mut best: Vec<Option<Best>> = vec![None; n];
        let mut order: u64 = 0;
        let cap = self.config.nat_cap;
        let name_ok = |s: Option<u32>| s.is_some_and(|s| allow(&self.graph.symbol(s).name));
        if name_ok(self.graph.zero) && name_ok(self.graph.succ) {
            let mut nums: Vec<(u64, Id)> = self.graph.roots().filter_map(|r| self.graph.numeral(r).filter(|&v| v <= cap).map(|v| (v, r))).collect();
            nums.sort();
            for (v, r) in nums {
                best[r as usize] = Some(Best { height: 1, rank: order, name: Name::Numeral(v) });
                order += 1;
            }
        }
        let live: Vec<Id> = (0..n as Id).filter(|&x| self.graph.is_live(x) && allow(&self.graph.symbol(self.graph.nodes[x as usize].sym).name)).collect();
        let mut h = 1u32;
        while max_height.is_none_or(|m| h <= m) {
            let mut cands: BTreeMap<Id, (u32, Vec<u64>, Id)> = BTreeMap::new();
            for &x in &live {
                let r = self.graph.find(x);
                if best[r as usize].is_some() {
                    continue;
                }
                let mut ranks = Vec::new();
                let mut hmax = 0;
                let ok = self.graph.canon_args(x).iter().all(|a| match &best[*a as usize] {
                    Some(b) if b.height < h => {
                        ranks.push(b.rank);
                        hmax = hmax.max(b.height);
                        true
                    }
                    _ => false,
                });
                if !ok || hmax + 1 != h {
                    continue;
                }
                let key = (self.graph.nodes[x as usize].sym, ranks, x);
                if cands.get(&r).is_none_or(|cur| (key.0, &key.1) < (cur.0, &cur.1)) {
                    cands.insert(r, key);
                }
            }
            if cands.is_empty() {
                break;
            }
            let mut fin: Vec<(u32, Vec<u64>, Id, Id)> = cands.into_iter().map(|(r, (s, rk, x))| (s, rk, r, x)).collect();
            fin.sort();
            for (_, _, r, x) in fin {
                best[r as usize] = Some(Best { height: h, rank: order, name: Name::Node(x) });
                order += 1;
            }
            h += 1;
        }
        LeastTerms { best }
    }

    /// Canonical name of a class (numeral when available).
    pub fn representative(&self, c: Id) -> Option<Term> {
        self.least_terms(&|_| true, None).term(self, c)
    }
}

static EMPTY: Vec<Id> = Vec::new();

fn advance(idx: &mut [usize], pools: &[&Vec<Id>]) -> bool {
    for j in 0..idx.len() {
        idx[j] += 1;
        if idx[j] < pools[j].len() {
            return true;
        }
        idx[j] = 0;
    }
    false
}

#[derive(Clone, Debug)]
enum Name {
    Numeral(u64),
    Node(Id),
}

#[derive(Clone, Debug)]
struct Best {
    height: u32,
    rank: u64,
    name: Name,
}

/// Least terms per class as computed by `TermModel::least_terms`.
pub struct LeastTerms {
    best: Vec<Option<Best>>,
}

impl LeastTerms {
    pub fn height(&self, m: &TermModel, c: Id) -> Option<u32> {
        self.best[m.graph.find(c) as usize].as_ref().map(|b| b.height)
    }

    pub fn rank(&self, m: &TermModel, c: Id) -> Option<u64> {
        self.best[m.graph.find(c) as usize].as_ref().map(|b| b.rank)
    }

    pub fn term(&self, m: &TermModel, c: Id) -> Option<Term> {
        match self.best[m.graph.find(c) as usize].as_ref()?.name {
            Name::Numeral(v) => Some(crate::syntax::numeral(v)),
            Name::Node(x) => {
                let node = &m.graph.nodes[x as usize];
                let args = node.args.iter().map(|&a| self.term(m, a)).collect::<Option<Vec<_>>>()?;
                Some(Term::app(m.graph.symbol(node.sym), args))
            }
        }
    }
}
