//! Independent replay of a model's merge log.
//!
//! The checker keeps its own hash-consed arena with congruence closure and re-derives
//! each sampled merge from the instantiated axiom or from congruence of arguments.

use super::closure::TermModel;
use super::egraph::{Id, Justification};
use crate::error::{Error, Result};
use crate::syntax::{numeral, Atom, Formula, Term, Var};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ReplayReport {
    pub merges: usize,
    pub checked: usize,
}

#[derive(Default)]
struct Checker {
    nodes: Vec<(Arc<str>, Vec<usize>)>,
    parent: Vec<usize>,
    uses: Vec<Vec<usize>>,
    memo: HashMap<(Arc<str>, Vec<usize>), usize>,
}

impl Checker {
    fn find(&self, mut a: usize) -> usize {
        while self.parent[a] != a {
            a = self.parent[a];
        }
        a
    }

    fn key(&self, n: usize) -> (Arc<str>, Vec<usize>) {
        let (f, args) = &self.nodes[n];
        (f.clone(), args.iter().map(|&a| self.find(a)).collect())
    }

    fn intern(&mut self, t: &Term) -> usize {
        let Term::App(f, args) = t else { unreachable!("closed terms only") };
        let ids: Vec<usize> = args.iter().map(|a| self.intern(a)).collect();
        let key = (f.name.clone(), ids.iter().map(|&a| self.find(a)).collect::<Vec<_>>());
        if let Some(&n) = self.memo.get(&key) {
            return n;
        }
        let id = self.nodes.len();
        for &a in &key.1 {
            self.uses[a].push(id);
        }
        self.nodes.push((f.name.clone(), ids));
        self.parent.push(id);
        self.uses.push(Vec::new());
        self.memo.insert(key, id);
        id
    }

    fn union(&mut self, a: usize, b: usize) {
        let mut pending = vec![(a, b)];
        while let Some((a, b)) = pending.pop() {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            let (root, child) = if self.uses[ra].len() >= self.uses[rb].len() { (ra, rb) } else { (rb, ra) };
            self.parent[child] = root;
            let moved = std::mem::take(&mut self.uses[child]);
            for n in moved {
                let key = self.key(n);
                match self.memo.get(&key) {
                    Some(&m) if self.find(m) != self.find(n) => pending.push((m, n)),
                    Some(_) => {}
                    None => {
                        self.memo.insert(key, n);
                    }
                }
                self.uses[root].push(n);
            }
        }
    }

    fn equal(&mut self, a: &Term, b: &Term) -> bool {
        let (x, y) = (self.intern(a), self.intern(b));
        self.find(x) == self.find(y)
    }
}

fn fail(i: usize, msg: &str) -> Error {
    Error::Spec(format!("replay rejected merge {i}: {msg}"))
}

fn subst1(a: &Atom, v: &Var, k: u64) -> Atom {
    let n = numeral(k);
    a.subst(&|x| (x == v).then(|| n.clone()))
}

fn check_ant(c: &mut Checker, a: &Atom, bounds: &mut std::slice::Iter<u64>, i: usize) -> Result<()> {
    match a {
        Atom::Eq(l, r) => {
            if c.equal(l, r) {
                Ok(())
            } else {
                Err(fail(i, &format!("antecedent {a} not provable")))
            }
        }
        Atom::Bu { var, bound, body } => {
            let n = *bounds.next().ok_or_else(|| fail(i, "missing bound"))?;
            if !c.equal(bound, &numeral(n)) {
                return Err(fail(i, &format!("bound {bound} is not {n}")));
            }
            for k in 0..n {
                check_ant(c, &subst1(body, var, k), bounds, i)?;
            }
            Ok(())
        }
        Atom::Lt(..) => Err(fail(i, "inequality")),
    }
}

/// The consequent equation selected by the instance path.
fn instance_eq(c: &mut Checker, a: &Atom, path: &[(u64, u64)], i: usize) -> Result<(Term, Term)> {
    match (a, path.split_first()) {
        (Atom::Eq(l, r), None) => Ok((l.clone(), r.clone())),
        (Atom::Bu { var, bound, body }, Some(((k, n), rest))) => {
            if k >= n || !c.equal(bound, &numeral(*n)) {
                return Err(fail(i, "bounded consequent instance out of range"));
            }
            instance_eq(c, &subst1(body, var, *k), rest, i)
        }
        _ => Err(fail(i, "instance path does not fit the consequent")),
    }
}

fn check_axiom(c: &mut Checker, m: &TermModel, f: &Formula, bindings: &[Id], bounds: &[u64], inst: &[(u64, u64)], i: usize) -> Result<(Term, Term)> {
    let vars = f.vars();
    if vars.len() != bindings.len() {
        return Err(fail(i, "binding count"));
    }
    let terms: Vec<Term> = bindings.iter().map(|&b| m.graph.node_term(b)).collect();
    for (v, t) in vars.iter().zip(&terms) {
        if v.sort != t.sort() {
            return Err(fail(i, "ill-sorted binding"));
        }
    }
    let g = f.subst(&|x| vars.iter().position(|v| v == x).map(|p| terms[p].clone()));
    let mut it = bounds.iter();
    for a in &g.antecedents {
        check_ant(c, a, &mut it, i)?;
    }
    instance_eq(c, &g.consequent, inst, i)
}

/// Replays the whole log; justifications are verified for every merge, or for `sample`
/// merges drawn with `seed`.
pub fn replay(m: &TermModel, sample_size: Option<usize>, seed: u64) -> Result<ReplayReport> {
    let log = &m.graph.log;
    let mut chosen = vec![sample_size.is_none(); log.len()];
    if let Some(k) = sample_size {
        let mut rng = SplitMix64::seed_from_u64(seed);
        for i in sample(&mut rng, log.len(), k.min(log.len())) {
            chosen[i] = true;
        }
    }
    let formulas: Vec<&Formula> = m.spec.formulas().collect();
    let mut c = Checker::default();
    let mut checked = 0;
    for (i, rec) in log.iter().enumerate() {
        let (ta, tb) = (m.graph.node_term(rec.a), m.graph.node_term(rec.b));
        if chosen[i] {
            checked += 1;
            match &rec.why {
                Justification::Congruence => {
                    let (Term::App(f, xs), Term::App(g, ys)) = (&ta, &tb) else { unreachable!() };
                    if f != g || xs.len() != ys.len() || !xs.iter().zip(ys).all(|(x, y)| c.equal(x, y)) {
                        return Err(fail(i, "congruence step with unequal arguments"));
                    }
                }
                Justification::Axiom { axiom, bindings, bounds, instance } => {
                    let f = formulas.get(*axiom).ok_or_else(|| fail(i, "unknown axiom"))?;
                    let (l, r) = check_axiom(&mut c, m, f, bindings, bounds, instance, i)?;
                    let (x, y) = (c.intern(&l), c.intern(&r));
                    c.union(x, y);
                    if !c.equal(&ta, &tb) {
                        return Err(fail(i, "merged classes do not match the axiom instance"));
                    }
                }
            }
        }
        let (x, y) = (c.intern(&ta), c.intern(&tb));
        c.union(x, y);
    }
    Ok(ReplayReport { merges: log.len(), checked })
}
