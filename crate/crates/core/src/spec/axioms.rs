use super::{spec_err, Provenance, SpecSet};
use crate::error::{Error, Result};
use crate::syntax::{numeral, star_signature, Atom, Formula, Signature, Sort, Term, Var};
use std::collections::BTreeMap;

fn t(sig: &Signature, f: &str, args: Vec<Term>) -> Result<Term> {
    Ok(Term::app(&sig.sym(f)?, args))
}

fn c(sig: &Signature, f: &str) -> Result<Term> {
    t(sig, f, vec![])
}

/// ArrAx(Σ): seven conditional equations per array sort, plus the BU
/// extensionality axiom when the element sort has equality.
pub fn array_axioms(sig: &Signature) -> Result<SpecSet> {
    let star = if sig.sorts().iter().any(|s| s.is_star()) { sig.clone() } else { star_signature(sig)? };
    let mut spec = SpecSet::new(star.clone());
    let sig = &star;
    let (tt, ff, zero) = (c(sig, "true")?, c(sig, "false")?, c(sig, "0")?);
    let nat = |n: &str| Term::var(n, Sort::Nat);
    let (z, z0, z1) = (nat("z"), nat("z0"), nat("z1"));
    for s in sig.sorts() {
        if s.is_star() || *s == Sort::Nat || sig.hidden_sorts().contains(s) || !sig.has_sort(&s.star()) {
            continue;
        }
        let ss = s.star();
        let arr = |n: &str| Term::var(n, ss.clone());
        let (a, a1, a2) = (arr("a"), arr("a1"), arr("a2"));
        let x = Term::var("x", s.clone());
        let lgth = |a: Term| t(sig, &format!("Lgth_{s}"), vec![a]);
        let ap = |a: Term, z: Term| t(sig, &format!("Ap_{s}"), vec![a, z]);
        let upd = |a: Term, z: Term, x: Term| t(sig, &format!("Update_{s}"), vec![a, z, x]);
        let newl = |a: Term, z: Term| t(sig, &format!("Newlength_{s}"), vec![a, z]);
        let less = |a: Term, b: Term| t(sig, "less_nat", vec![a, b]);
        let eqn = |a: Term, b: Term| t(sig, "eq_nat", vec![a, b]);
        let delta = sig.default_term(s)?;
        let null = c(sig, &format!("Null_{s}"))?;
        let fs = vec![
            Formula::eq(lgth(null)?, zero.clone()),
            Formula::cond(vec![Atom::eq(less(z.clone(), lgth(a.clone())?)?, ff.clone())], Atom::eq(ap(a.clone(), z.clone())?, delta)),
            Formula::eq(lgth(upd(a.clone(), z.clone(), x.clone())?)?, lgth(a.clone())?),
            Formula::cond(
                vec![Atom::eq(eqn(z.clone(), z0.clone())?, ff.clone())],
                Atom::eq(ap(upd(a.clone(), z0.clone(), x.clone())?, z.clone())?, ap(a.clone(), z.clone())?),
            ),
            Formula::cond(
                vec![Atom::eq(less(z.clone(), lgth(a.clone())?)?, tt.clone())],
                Atom::eq(ap(upd(a.clone(), z.clone(), x.clone())?, z.clone())?, x.clone()),
            ),
            Formula::eq(lgth(newl(a.clone(), z.clone())?)?, z.clone()),
            Formula::cond(
                vec![Atom::eq(less(z.clone(), z1.clone())?, tt.clone())],
                Atom::eq(ap(newl(a.clone(), z1.clone())?, z.clone())?, ap(a.clone(), z.clone())?),
            ),
        ];
        for f in fs {
            spec.push(f, Provenance::ArrAx);
        }
        if sig.is_eq_sort(s) {
            let zv = Var::new("z", Sort::Nat);
            let body = Atom::eq(ap(a1.clone(), z.clone())?, ap(a2.clone(), z.clone())?);
            let f = Formula::cond(
                vec![Atom::eq(lgth(a1.clone())?, lgth(a2.clone())?), Atom::bu(zv, lgth(a1.clone())?, body)],
                Atom::eq(a1, a2),
            );
            spec.push(f, Provenance::ArrAx);
        }
    }
    spec.check()?;
    Ok(spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NStdMode {
    Open,
    /// All closed instances with instantiating terms of depth at most the given bound.
    ClosedInstances(usize),
}

/// Maximum number of closed terms or instances materialised at once.
pub const INSTANCE_LIMIT: usize = 2_000_000;

fn open_nstd(sig: &Signature) -> Result<Vec<Formula>> {
    let (tt, ff) = (c(sig, "true")?, c(sig, "false")?);
    let b = |v: bool| if v { tt.clone() } else { ff.clone() };
    let mut out = Vec::new();
    for (op, f) in [("and", (|p: bool, q: bool| p && q) as fn(bool, bool) -> bool), ("or", |p, q| p || q)] {
        for (p, q) in [(true, true), (true, false), (false, true), (false, false)] {
            out.push(Formula::eq(t(sig, op, vec![b(p), b(q)])?, b(f(p, q))));
        }
    }
    out.push(Formula::eq(t(sig, "not", vec![tt.clone()])?, ff.clone()));
    out.push(Formula::eq(t(sig, "not", vec![ff.clone()])?, tt.clone()));
    for s in sig.sorts() {
        if *s == Sort::Bool || sig.hidden_sorts().contains(s) {
            continue;
        }
        let (x1, x2) = (Term::var("x1", s.clone()), Term::var("x2", s.clone()));
        let iff = format!("if_{s}");
        out.push(Formula::eq(t(sig, &iff, vec![tt.clone(), x1.clone(), x2.clone()])?, x1.clone()));
        out.push(Formula::eq(t(sig, &iff, vec![ff.clone(), x1.clone(), x2.clone()])?, x2.clone()));
    }
    if sig.has_sort(&Sort::Nat) {
        let zero = c(sig, "0")?;
        let nat = |n: &str| Term::var(n, Sort::Nat);
        let (z, z1, z2) = (nat("z"), nat("z1"), nat("z2"));
        let s = |x: Term| t(sig, "S", vec![x]);
        let eqn = |a: Term, b: Term| t(sig, "eq_nat", vec![a, b]);
        let less = |a: Term, b: Term| t(sig, "less_nat", vec![a, b]);
        out.push(Formula::eq(eqn(zero.clone(), zero.clone())?, tt.clone()));
        out.push(Formula::eq(eqn(s(z.clone())?, zero.clone())?, ff.clone()));
        out.push(Formula::eq(eqn(zero.clone(), s(z.clone())?)?, ff.clone()));
        out.push(Formula::eq(eqn(s(z1.clone())?, s(z2.clone())?)?, eqn(z1.clone(), z2.clone())?));
        out.push(Formula::eq(less(zero.clone(), s(z.clone())?)?, tt.clone()));
        out.push(Formula::eq(less(z.clone(), zero)?, ff.clone()));
        out.push(Formula::eq(less(s(z1.clone())?, s(z2.clone())?)?, less(z1, z2)?));
    }
    for s in sig.eq_sorts() {
        if *s == Sort::Nat {
            continue;
        }
        let (x, x1, x2) = (Term::var("x", s.clone()), Term::var("x1", s.clone()), Term::var("x2", s.clone()));
        let eqs = format!("eq_{s}");
        out.push(Formula::eq(t(sig, &eqs, vec![x.clone(), x])?, tt.clone()));
        out.push(Formula::cond(vec![Atom::eq(t(sig, &eqs, vec![x1.clone(), x2.clone()])?, tt.clone())], Atom::eq(x1, x2)));
    }
    Ok(out)
}

/// Closed terms of each sort with depth at most `depth`, shallowest first.
pub fn closed_terms(sig: &Signature, depth: usize, limit: usize) -> Result<BTreeMap<Sort, Vec<Term>>> {
    let mut all: BTreeMap<Sort, Vec<Term>> = sig.sorts().iter().map(|s| (s.clone(), Vec::new())).collect();
    // Start of the previous layer within each sort's list.
    let mut prev_start: BTreeMap<Sort, usize> = BTreeMap::new();
    let mut total = 0usize;
    for level in 1..=depth {
        let mut layer: Vec<(Sort, Term)> = Vec::new();
        for f in sig.funcs() {
            if f.is_const() {
                if level == 1 {
                    layer.push((f.range.clone(), Term::constant(f)));
                }
                continue;
            }
            if level == 1 {
                continue;
            }
            let pools: Vec<&Vec<Term>> = f.domain.iter().map(|s| &all[s]).collect();
            if pools.iter().any(|p| p.is_empty()) {
                continue;
            }
            let mut idx = vec![0usize; f.arity()];
            loop {
                let fresh = idx.iter().zip(&f.domain).any(|(&i, s)| i >= prev_start.get(s).copied().unwrap_or(0));
                if fresh {
                    let args = idx.iter().zip(&pools).map(|(&i, p)| p[i].clone()).collect();
                    layer.push((f.range.clone(), Term::app(f, args)));
                    total += 1;
                    if total > limit {
                        return Err(Error::Resource(format!("more than {limit} closed terms of depth ≤ {depth}; exploded in sort {} at {}", f.range, f.name)));
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
        for (s, v) in all.iter() {
            prev_start.insert(s.clone(), v.len());
        }
        for (s, term) in layer {
            all.get_mut(&s).unwrap().push(term);
        }
    }
    Ok(all)
}

/// NStdAx(Σ), or its closed instances NStdAx⁰(Σ) up to a term depth.
pub fn nstd_axioms(sig: &Signature, mode: NStdMode) -> Result<SpecSet> {
    if !sig.n_standard {
        return Err(spec_err(format!("signature {} is not N-standard", sig.name)));
    }
    let open = open_nstd(sig)?;
    let mut spec = SpecSet::new(sig.clone());
    match mode {
        NStdMode::Open => {
            for f in open {
                spec.push(f, Provenance::NStdAx);
            }
        }
        NStdMode::ClosedInstances(depth) => {
            let terms = closed_terms(sig, depth, INSTANCE_LIMIT)?;
            for f in open {
                let vs = f.vars();
                let pools: Vec<&Vec<Term>> = vs.iter().map(|v| &terms[&v.sort]).collect();
                if pools.iter().any(|p| p.is_empty()) {
                    continue;
                }
                let mut idx = vec![0usize; vs.len()];
                loop {
                    let inst = f.subst(&|v: &Var| vs.iter().position(|w| w == v).map(|i| pools[i][idx[i]].clone()));
                    spec.push(inst, Provenance::NStdAx);
                    if spec.axioms.len() > INSTANCE_LIMIT {
                        return Err(Error::Resource(format!("NStdAx⁰ at depth {depth} exceeds {INSTANCE_LIMIT} instances")));
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
        }
    }
    Ok(spec)
}

/// BddAx instances P(0), …, P(k−1) → ∀z<k P(z) for k = 0..=bound.
/// Each equation must have exactly one nat variable, which is the one quantified.
pub fn boundedness_instances(sig: &Signature, equations: &[Atom], bound: u64) -> Result<SpecSet> {
    let mut spec = SpecSet::new(sig.clone());
    for p in equations {
        let mut vs = Vec::new();
        p.collect_vars(&mut vs);
        let nats: Vec<&Var> = vs.iter().filter(|v| v.sort == Sort::Nat).collect();
        let [z] = nats.as_slice() else {
            return Err(spec_err(format!("boundedness equation {p} must have exactly one nat variable")));
        };
        let at = |n: u64| p.subst(&|v: &Var| (v == *z).then(|| numeral(n)));
        for k in 0..=bound {
            let ants = (0..k).map(at).collect();
            spec.push(Formula::cond(ants, Atom::bu((*z).clone(), numeral(k), p.clone())), Provenance::BddAx);
        }
    }
    spec.check()?;
    Ok(spec)
}
