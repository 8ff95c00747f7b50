//! Gödel numbering: canonical bytes read as a base-256 integer.
//!
//! Layout: `LEB128(payload length) ++ payload`, where the payload is
//! `count, entry*` and every field is a minimal LEB128 varint. Symbols and
//! sorts are referenced by their index in the signature.

use super::{scheme_type, Derivation, Entry, Scheme};
use crate::error::{Error, Result};
use crate::syntax::{Signature, Sort};
use num_bigint::BigUint;
use std::collections::VecDeque;
use std::sync::Arc;

const PROJ: u64 = 0;
const PRIM: u64 = 1;
const CONST: u64 = 2;
const COMP: u64 = 3;
const CASES: u64 = 4;
const PRIMREC: u64 = 5;
const MU: u64 = 6;

fn put(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let b = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(b);
            return;
        }
        out.push(b | 0x80);
    }
}

fn payload(d: &Derivation) -> Vec<u8> {
    let sig = &d.signature;
    let sort = |s: &Sort| sig.sorts().iter().position(|x| x == s).expect("sort in signature") as u64;
    let sym = |n: &str| sig.func_index(n).expect("symbol in signature") as u64;
    let mut out = Vec::new();
    put(&mut out, d.entries.len() as u64);
    let sorts = |out: &mut Vec<u8>, v: &[Sort]| {
        put(out, v.len() as u64);
        v.iter().for_each(|s| put(out, sort(s)));
    };
    for e in &d.entries {
        match &e.scheme {
            Scheme::Proj { domain, index } => {
                put(&mut out, PROJ);
                sorts(&mut out, domain);
                put(&mut out, *index as u64);
            }
            Scheme::Prim(f) => {
                put(&mut out, PRIM);
                put(&mut out, sym(&f.name));
            }
            Scheme::Const { c, domain } => {
                put(&mut out, CONST);
                put(&mut out, sym(&c.name));
                sorts(&mut out, domain);
            }
            Scheme::Comp { head, args, domain } => {
                put(&mut out, COMP);
                put(&mut out, *head as u64);
                put(&mut out, args.len() as u64);
                args.iter().for_each(|&a| put(&mut out, a as u64));
                if args.is_empty() {
                    sorts(&mut out, domain);
                }
            }
            Scheme::Cases(s) => {
                put(&mut out, CASES);
                put(&mut out, sort(s));
            }
            Scheme::PrimRec { m, base, step, sel } => {
                put(&mut out, PRIMREC);
                put(&mut out, *m as u64);
                base.iter().chain(step).for_each(|&a| put(&mut out, a as u64));
                put(&mut out, *sel as u64);
            }
            Scheme::Mu(g) => {
                put(&mut out, MU);
                put(&mut out, *g as u64);
            }
        }
    }
    out
}

/// Canonical byte string of a derivation.
pub fn godel_bytes(d: &Derivation) -> Vec<u8> {
    let p = payload(d);
    let mut out = Vec::new();
    put(&mut out, p.len() as u64);
    out.extend(p);
    out
}

pub fn godel_encode(d: &Derivation) -> BigUint {
    BigUint::from_bytes_be(&godel_bytes(d))
}

#[derive(Debug)]
enum Stop {
    Incomplete,
    Invalid(String),
}

struct Cursor<'a> {
    b: &'a [u8],
    pos: usize,
    total: usize,
}

impl Cursor<'_> {
    /// Reads a minimal varint not exceeding `max`.
    fn read(&mut self, max: u64) -> std::result::Result<u64, Stop> {
        let mut v: u64 = 0;
        let mut shift = 0u32;
        loop {
            if shift > 0 && shift < 64 && (1u64 << shift) > max {
                return Err(Stop::Invalid("field out of range".into()));
            }
            if self.pos >= self.total {
                return Err(Stop::Invalid("read past the declared length".into()));
            }
            let byte = *self.b.get(self.pos).ok_or(Stop::Incomplete)?;
            self.pos += 1;
            if shift >= 63 {
                return Err(Stop::Invalid("varint too long".into()));
            }
            v |= ((byte & 0x7f) as u64) << shift;
            if byte & 0x80 == 0 {
                if byte == 0 && shift > 0 {
                    return Err(Stop::Invalid("non-minimal varint".into()));
                }
                return if v > max { Err(Stop::Invalid("field out of range".into())) } else { Ok(v) };
            }
            shift += 7;
        }
    }

    fn remaining(&self) -> u64 {
        self.total.saturating_sub(self.pos) as u64
    }
}

fn decode_entries(sig: &Signature, bytes: &[u8], total: usize) -> std::result::Result<Vec<Entry>, Stop> {
    let mut c = Cursor { b: bytes, pos: 0, total };
    let count = c.read(c.remaining() / 2)?;
    if count == 0 {
        return Err(Stop::Invalid("empty derivation".into()));
    }
    let ns = sig.sorts().len() as u64;
    let nf = sig.funcs().len() as u64;
    if ns == 0 {
        return Err(Stop::Invalid("empty signature".into()));
    }
    let mut entries: Vec<Entry> = Vec::new();
    for k in 0..count {
        let sorts = |c: &mut Cursor| -> std::result::Result<Vec<Sort>, Stop> {
            let n = c.read(c.remaining())?;
            (0..n).map(|_| c.read(ns - 1).map(|i| sig.sorts()[i as usize].clone())).collect()
        };
        let tag = c.read(MU)?;
        let sc = match tag {
            PROJ => {
                let domain = sorts(&mut c)?;
                if domain.is_empty() {
                    return Err(Stop::Invalid("projection from empty product".into()));
                }
                let index = c.read(domain.len() as u64 - 1)? as usize;
                Scheme::Proj { domain, index }
            }
            PRIM => {
                if nf == 0 {
                    return Err(Stop::Invalid("no symbols".into()));
                }
                Scheme::Prim(sig.funcs()[c.read(nf - 1)? as usize].clone())
            }
            CONST => {
                if nf == 0 {
                    return Err(Stop::Invalid("no symbols".into()));
                }
                let f = sig.funcs()[c.read(nf - 1)? as usize].clone();
                if !f.is_const() {
                    return Err(Stop::Invalid("not a constant".into()));
                }
                Scheme::Const { c: f, domain: sorts(&mut c)? }
            }
            COMP => {
                if k == 0 {
                    return Err(Stop::Invalid("composition needs earlier entries".into()));
                }
                let head = c.read(k - 1)? as usize;
                let m = c.read(c.remaining())?;
                let args = (0..m).map(|_| c.read(k - 1).map(|a| a as usize)).collect::<std::result::Result<Vec<_>, _>>()?;
                let domain = match args.first() {
                    Some(&a) => entries[a].domain.clone(),
                    None => sorts(&mut c)?,
                };
                Scheme::Comp { head, args, domain }
            }
            CASES => Scheme::Cases(sig.sorts()[c.read(ns - 1)? as usize].clone()),
            PRIMREC => {
                if k == 0 {
                    return Err(Stop::Invalid("primrec needs earlier entries".into()));
                }
                let m = c.read(c.remaining() / 2)? as usize;
                if m == 0 {
                    return Err(Stop::Invalid("primrec of degree 0".into()));
                }
                let ids = (0..2 * m).map(|_| c.read(k - 1).map(|a| a as usize)).collect::<std::result::Result<Vec<_>, _>>()?;
                let sel = c.read(m as u64 - 1)? as usize;
                Scheme::PrimRec { m, base: ids[..m].to_vec(), step: ids[m..].to_vec(), sel }
            }
            MU => {
                if k == 0 {
                    return Err(Stop::Invalid("μ needs an earlier entry".into()));
                }
                Scheme::Mu(c.read(k - 1)? as usize)
            }
            _ => unreachable!(),
        };
        let (domain, range) = scheme_type(sig, &entries, &sc).map_err(|e| Stop::Invalid(e.to_string()))?;
        entries.push(Entry { name: format!("f{k}"), scheme: sc, domain, range });
    }
    if c.pos < bytes.len() {
        return Err(Stop::Invalid("trailing bytes".into()));
    }
    if c.pos < total {
        return Err(Stop::Invalid("entries end before the declared length".into()));
    }
    Ok(entries)
}

fn read_header(bytes: &[u8]) -> Option<(usize, usize)> {
    let mut c = Cursor { b: bytes, pos: 0, total: bytes.len() };
    let len = c.read(u64::MAX >> 1).ok()?;
    Some((len as usize, c.pos))
}

/// Decodes a code, rejecting anything that is not the code of a well-typed derivation.
pub fn godel_decode(sig: &Signature, n: &BigUint) -> Result<Derivation> {
    let bad = |m: &str| Error::Decode(format!("not a derivation code: {m}"));
    if n.bits() == 0 {
        return Err(bad("zero"));
    }
    let bytes = n.to_bytes_be();
    let (len, hl) = read_header(&bytes).ok_or_else(|| bad("bad length prefix"))?;
    if bytes.len() - hl != len {
        return Err(bad("length mismatch"));
    }
    match decode_entries(sig, &bytes[hl..], len) {
        Ok(entries) => Ok(Derivation { name: "decoded".into(), signature: Arc::new(sig.clone()), entries }),
        Err(Stop::Incomplete) => Err(bad("truncated")),
        Err(Stop::Invalid(m)) => Err(bad(&m)),
    }
}

/// Derivations of a given type with code below a budget, in increasing code order.
pub struct DerivationEnumerator {
    sig: Arc<Signature>,
    dom: Vec<Sort>,
    range: Sort,
    budget: BigUint,
    len: usize,
    done: bool,
    buf: VecDeque<Derivation>,
}

pub fn enumerate_derivations(sig: &Signature, dom: &[Sort], range: &Sort, budget: &BigUint) -> DerivationEnumerator {
    DerivationEnumerator {
        sig: Arc::new(sig.clone()),
        dom: dom.to_vec(),
        range: range.clone(),
        budget: budget.clone(),
        len: 0,
        done: false,
        buf: VecDeque::new(),
    }
}

impl DerivationEnumerator {
    /// Fills the buffer with every derivation whose payload has `len` bytes.
    fn fill(&mut self, len: usize) {
        let mut head = Vec::new();
        put(&mut head, len as u64);
        let mut min = head.clone();
        min.resize(head.len() + len, 0);
        if BigUint::from_bytes_be(&min) >= self.budget {
            self.done = true;
            return;
        }
        let mut payload = Vec::with_capacity(len);
        self.dfs(&head, &mut payload, len);
    }

    /// Returns false once the budget is reached.
    fn dfs(&mut self, head: &[u8], p: &mut Vec<u8>, len: usize) -> bool {
        if p.len() == len {
            let mut full = head.to_vec();
            full.extend_from_slice(p);
            if BigUint::from_bytes_be(&full) >= self.budget {
                return false;
            }
            if let Ok(entries) = decode_entries(&self.sig, p, len) {
                let e = entries.last().unwrap();
                if e.domain == self.dom && e.range == self.range {
                    self.buf.push_back(Derivation { name: "enumerated".into(), signature: self.sig.clone(), entries });
                }
            }
            return true;
        }
        for b in 0..=255u8 {
            p.push(b);
            let mut min = head.to_vec();
            min.extend_from_slice(p);
            min.resize(head.len() + len, 0);
            if BigUint::from_bytes_be(&min) >= self.budget {
                p.pop();
                return false;
            }
            let dead = matches!(decode_entries(&self.sig, p, len), Err(Stop::Invalid(_)));
            let cont = dead || self.dfs(head, p, len);
            p.pop();
            if !cont {
                return false;
            }
        }
        true
    }
}

impl Iterator for DerivationEnumerator {
    type Item = Derivation;

    fn next(&mut self) -> Option<Derivation> {
        loop {
            if let Some(d) = self.buf.pop_front() {
                return Some(d);
            }
            if self.done {
                return None;
            }
            self.len += 1;
            let l = self.len;
            self.fill(l);
        }
    }
}
