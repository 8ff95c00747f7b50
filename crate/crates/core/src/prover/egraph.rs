//! Hash-consed e-graph with union-find, congruence repair, class levels and numeral tracking.

use crate::error::{Error, Result};
use crate::syntax::{Signature, Sort, Sym, Term};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

pub type Id = u32;

#[derive(Clone, Debug)]
pub struct Node {
    pub sym: u32,
    /// Argument classes as they were when the node was created; each is a node id.
    pub args: Box<[Id]>,
    pub level: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    /// An axiom instance: free-variable bindings (node ids), the numeral values of the
    /// antecedent bounded quantifiers in evaluation order, and for a bounded consequent
    /// the (index, bound) pair at each nesting level.
    Axiom { axiom: usize, bindings: Vec<Id>, bounds: Vec<u64>, instance: Vec<(u64, u64)> },
    Congruence,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeRecord {
    pub a: Id,
    pub b: Id,
    pub why: Justification,
}

pub struct EGraph {
    pub(crate) syms: Vec<Sym>,
    sym_ix: HashMap<Arc<str>, u32>,
    pub(crate) nodes: Vec<Node>,
    parent: Vec<Id>,
    members: Vec<Vec<Id>>,
    uses: Vec<Vec<Id>>,
    dead: Vec<bool>,
    memo: HashMap<(u32, Box<[Id]>), Id>,
    pub(crate) by_sym: Vec<Vec<Id>>,
    level: Vec<u32>,
    numeral: Vec<Option<u64>>,
    numeral_node: BTreeMap<u64, Id>,
    worklist: Vec<Id>,
    pub log: Vec<MergeRecord>,
    pub(crate) zero: Option<u32>,
    pub(crate) succ: Option<u32>,
    pub cap: u64,
    pub ceiling: usize,
}

impl EGraph {
    pub fn new(sig: &Signature, cap: u64, ceiling: usize) -> EGraph {
        let syms: Vec<Sym> = sig.funcs().to_vec();
        let sym_ix: HashMap<Arc<str>, u32> = syms.iter().enumerate().map(|(i, f)| (f.name.clone(), i as u32)).collect();
        let zero = sym_ix.get("0").copied();
        let succ = sym_ix.get("S").copied();
        EGraph {
            by_sym: vec![Vec::new(); syms.len()],
            syms,
            sym_ix,
            nodes: Vec::new(),
            parent: Vec::new(),
            members: Vec::new(),
            uses: Vec::new(),
            dead: Vec::new(),
            memo: HashMap::new(),
            level: Vec::new(),
            numeral: Vec::new(),
            numeral_node: BTreeMap::new(),
            worklist: Vec::new(),
            log: Vec::new(),
            zero,
            succ,
            cap,
            ceiling,
        }
    }

    pub fn sym_index(&self, name: &str) -> Option<u32> {
        self.sym_ix.get(name).copied()
    }

    pub fn symbol(&self, i: u32) -> &Sym {
        &self.syms[i as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn find(&self, mut a: Id) -> Id {
        while self.parent[a as usize] != a {
            a = self.parent[a as usize];
        }
        a
    }

    fn find_mut(&mut self, a: Id) -> Id {
        let r = self.find(a);
        let mut x = a;
        while self.parent[x as usize] != r {
            let next = self.parent[x as usize];
            self.parent[x as usize] = r;
            x = next;
        }
        r
    }

    pub fn level(&self, c: Id) -> u32 {
        self.level[self.find(c) as usize]
    }

    /// Level of a single node, as opposed to its class.
    pub fn nodes_level(&self, n: Id) -> u32 {
        self.nodes[n as usize].level
    }

    pub fn numeral(&self, c: Id) -> Option<u64> {
        self.numeral[self.find(c) as usize]
    }

    /// The class of numeral n, if present.
    pub fn numeral_class(&self, n: u64) -> Option<Id> {
        self.numeral_node.get(&n).map(|&x| self.find(x))
    }

    pub fn class_sort(&self, c: Id) -> &Sort {
        &self.syms[self.nodes[c as usize].sym as usize].range
    }

    pub fn is_root(&self, c: Id) -> bool {
        self.parent[c as usize] == c
    }

    pub fn roots(&self) -> impl Iterator<Item = Id> + '_ {
        (0..self.nodes.len() as Id).filter(|&i| self.parent[i as usize] == i)
    }

    /// Live (non-duplicate) nodes of a class.
    pub fn members(&self, c: Id) -> impl Iterator<Item = Id> + '_ {
        self.members[self.find(c) as usize].iter().copied().filter(|&n| !self.dead[n as usize])
    }

    pub fn is_live(&self, n: Id) -> bool {
        !self.dead[n as usize]
    }

    pub fn canon_args(&self, n: Id) -> Vec<Id> {
        self.nodes[n as usize].args.iter().map(|&a| self.find(a)).collect()
    }

    fn node_level(&self, sym: u32, args: &[Id]) -> u32 {
        let _ = sym;
        1 + args.iter().map(|&a| self.level[self.find(a) as usize]).max().unwrap_or(0)
    }

    /// Looks up f(args) without adding it.
    pub fn lookup(&self, sym: u32, args: &[Id]) -> Option<Id> {
        let key: Box<[Id]> = args.iter().map(|&a| self.find(a)).collect();
        self.memo.get(&(sym, key)).map(|&n| self.find(n))
    }

    /// Level the node f(args) would get if added now.
    pub fn prospective_level(&self, sym: u32, args: &[Id]) -> u32 {
        self.node_level(sym, args)
    }

    /// Adds f(args), returning its class.
    pub fn add(&mut self, sym: u32, args: &[Id]) -> Result<Id> {
        let key: Box<[Id]> = args.iter().map(|&a| self.find(a)).collect();
        if let Some(&n) = self.memo.get(&(sym, key.clone())) {
            return Ok(self.find(n));
        }
        if self.nodes.len() >= self.ceiling {
            let s = &self.syms[sym as usize].range;
            return Err(Error::Resource(format!("term universe exceeded the ceiling of {} terms while adding terms of sort {s}", self.ceiling)));
        }
        let id = self.nodes.len() as Id;
        let lv = self.node_level(sym, &key);
        for &a in key.iter() {
            self.uses[a as usize].push(id);
        }
        self.nodes.push(Node { sym, args: key.clone(), level: lv });
        self.parent.push(id);
        self.members.push(vec![id]);
        self.uses.push(Vec::new());
        self.dead.push(false);
        self.level.push(lv);
        self.numeral.push(None);
        self.by_sym[sym as usize].push(id);
        self.memo.insert((sym, key.clone()), id);
        if Some(sym) == self.zero {
            self.set_numeral(id, 0);
        } else if Some(sym) == self.succ {
            if let Some(k) = self.numeral[self.find(key[0]) as usize] {
                self.set_numeral(id, k + 1);
            }
        }
        Ok(id)
    }

    fn set_numeral(&mut self, c: Id, v: u64) {
        let r = self.find(c);
        let cur = self.numeral[r as usize];
        if cur.is_some_and(|x| x <= v) {
            return;
        }
        self.numeral[r as usize] = Some(v);
        self.numeral_node.entry(v).or_insert(r);
        if v <= self.cap && self.level[r as usize] > 1 {
            self.level[r as usize] = 1;
        }
        let us = self.uses[r as usize].clone();
        self.worklist.extend(us);
    }

    /// Merges two classes; returns whether anything changed.
    pub fn union(&mut self, a: Id, b: Id, why: Justification) -> bool {
        let (ra, rb) = (self.find_mut(a), self.find_mut(b));
        if ra == rb {
            return false;
        }
        self.log.push(MergeRecord { a, b, why });
        let (sa, sb) = (self.members[ra as usize].len(), self.members[rb as usize].len());
        let (root, child) = if sa > sb || (sa == sb && ra < rb) { (ra, rb) } else { (rb, ra) };
        self.parent[child as usize] = root;
        let moved = std::mem::take(&mut self.members[child as usize]);
        self.members[root as usize].extend(moved);
        let cu = std::mem::take(&mut self.uses[child as usize]);
        self.worklist.extend(cu.iter().copied());
        let (lr, lc) = (self.level[root as usize], self.level[child as usize]);
        if lc < lr {
            self.level[root as usize] = lc;
            let ru = self.uses[root as usize].clone();
            self.worklist.extend(ru);
        }
        self.uses[root as usize].extend(cu);
        if let Some(v) = self.numeral[child as usize] {
            self.set_numeral(root, v);
        }
        true
    }

    /// Restores the congruence invariant and propagates levels and numerals.
    pub fn rebuild(&mut self) {
        while let Some(n) = self.worklist.pop() {
            if self.dead[n as usize] {
                continue;
            }
            let node = &self.nodes[n as usize];
            let sym = node.sym;
            let key: Box<[Id]> = node.args.iter().map(|&a| self.find(a)).collect();
            match self.memo.get(&(sym, key.clone())).copied() {
                Some(m) if m != n => {
                    if self.find(m) != self.find(n) {
                        self.union(m, n, Justification::Congruence);
                    }
                    self.dead[n as usize] = true;
                    continue;
                }
                Some(_) => {}
                None => {
                    self.memo.insert((sym, key.clone()), n);
                }
            }
            let lv = self.node_level(sym, &key);
            if lv < self.nodes[n as usize].level {
                self.nodes[n as usize].level = lv;
                let r = self.find_mut(n);
                if lv < self.level[r as usize] {
                    self.level[r as usize] = lv;
                    let us = self.uses[r as usize].clone();
                    self.worklist.extend(us);
                }
            }
            if Some(sym) == self.succ {
                if let Some(k) = self.numeral[self.find(key[0]) as usize] {
                    self.set_numeral(n, k + 1);
                }
            }
        }
    }

    /// Adds a closed term.
    pub fn add_term(&mut self, t: &Term) -> Result<Id> {
        match t {
            Term::Var(v) => Err(Error::Spec(format!("term universe holds closed terms only, found {v}"))),
            Term::App(f, args) => {
                let ids = args.iter().map(|a| self.add_term(a)).collect::<Result<Vec<_>>>()?;
                let s = self.sym_index(&f.name).ok_or_else(|| Error::Spec(format!("symbol {} is not in the model's signature", f.name)))?;
                self.add(s, &ids)
            }
        }
    }

    /// Class of a closed term if it is already represented.
    pub fn lookup_term(&self, t: &Term) -> Option<Id> {
        match t {
            Term::Var(_) => None,
            Term::App(f, args) => {
                let ids = args.iter().map(|a| self.lookup_term(a)).collect::<Option<Vec<_>>>()?;
                self.lookup(self.sym_index(&f.name)?, &ids)
            }
        }
    }

    /// The term a node was built as.
    pub fn node_term(&self, n: Id) -> Term {
        let node = &self.nodes[n as usize];
        Term::app(&self.syms[node.sym as usize], node.args.iter().map(|&a| self.node_term(a)).collect())
    }
}
