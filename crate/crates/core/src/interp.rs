//! Operational semantics of derivations with fuel-bounded μ-search.

use crate::algebra::{Algebra, Value};
use crate::error::{Error, Result};
use crate::schemes::{godel_decode, Derivation, Scheme};
use crate::syntax::Sort;
use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// Default global bound on μ-iterations.
pub const DEFAULT_FUEL: u64 = 1_000_000;

fn check_signature(d: &Derivation, a: &Algebra) -> Result<()> {
    let sig = a.signature();
    for e in &d.entries {
        let f = match &e.scheme {
            Scheme::Prim(f) => f,
            Scheme::Const { c, .. } => c,
            _ => continue,
        };
        match sig.func(&f.name) {
            Some(g) if g == f => {}
            _ => return Err(Error::Eval(format!("algebra {} does not interpret {}", a.name, f))),
        }
    }
    for e in &d.entries {
        for s in e.domain.iter().chain(std::iter::once(&e.range)) {
            if !sig.has_sort(s) {
                return Err(Error::Eval(format!("algebra {} lacks sort {s}", a.name)));
            }
        }
    }
    Ok(())
}

fn check_args(dom: &[Sort], args: &[Value]) -> Result<()> {
    if dom.len() != args.len() {
        return Err(Error::Eval(format!("expected {} arguments, got {}", dom.len(), args.len())));
    }
    for (v, s) in args.iter().zip(dom) {
        if !v.has_sort(s) {
            return Err(Error::Eval(format!("argument {v} is not of sort {s}")));
        }
    }
    Ok(())
}

/// Evaluates one entry; `fuel` is shared by every μ-site.
pub fn eval_entry(d: &Derivation, a: &Algebra, k: usize, args: &[Value], fuel: &mut u64) -> Result<Value> {
    let e = &d.entries[k];
    match &e.scheme {
        Scheme::Prim(f) => a.apply(f, args),
        Scheme::Const { c, .. } => a.apply(c, &[]),
        Scheme::Proj { index, .. } => Ok(args[*index].clone()),
        Scheme::Comp { head, args: gs, .. } => {
            let vals = gs.iter().map(|&g| eval_entry(d, a, g, args, fuel)).collect::<Result<Vec<_>>>()?;
            eval_entry(d, a, *head, &vals, fuel)
        }
        Scheme::Cases(_) => Ok(if args[0].as_bool()? { args[1].clone() } else { args[2].clone() }),
        Scheme::PrimRec { base, step, sel, .. } => {
            let n = args[0].as_nat()?.to_u64().ok_or_else(|| Error::Resource("recursion argument too large".into()))?;
            let u = &args[1..];
            let mut vals = base.iter().map(|&g| eval_entry(d, a, g, u, fuel)).collect::<Result<Vec<_>>>()?;
            let mut hargs: Vec<Value> = Vec::with_capacity(1 + u.len() + vals.len());
            for z in 0..n {
                hargs.clear();
                hargs.push(Value::nat(z));
                hargs.extend_from_slice(u);
                hargs.extend(vals.iter().cloned());
                vals = step.iter().map(|&h| eval_entry(d, a, h, &hargs, fuel)).collect::<Result<Vec<_>>>()?;
            }
            Ok(vals.swap_remove(*sel))
        }
        Scheme::Mu(g) => {
            let mut gargs = args.to_vec();
            gargs.push(Value::nat(0));
            let mut z = BigUint::from(0u32);
            loop {
                *gargs.last_mut().unwrap() = Value::Nat(z.clone());
                if eval_entry(d, a, *g, &gargs, fuel)?.as_bool()? {
                    return Ok(Value::Nat(z));
                }
                if *fuel == 0 {
                    return Err(Error::Divergence { site: k });
                }
                *fuel -= 1;
                z += 1u32;
            }
        }
    }
}

/// Runs the derivation on `args`.
pub fn run(d: &Derivation, a: &Algebra, args: &[Value], fuel: u64) -> Result<Value> {
    check_signature(d, a)?;
    let (dom, _) = d.result_type();
    check_args(dom, args)?;
    let mut f = fuel;
    eval_entry(d, a, d.entries.len() - 1, args, &mut f)
}

/// Univ(i, a): runs the derivation coded by `code`, or returns δ_s when the code is
/// not a derivation of type `dom → range`.
pub fn universal_eval(a: &Algebra, dom: &[Sort], range: &Sort, code: &BigUint, args: &[Value], fuel: u64) -> Result<Value> {
    check_args(dom, args)?;
    match godel_decode(a.signature(), code) {
        Ok(d) if d.result_type() == (dom, range) => run(&d, a, args, fuel),
        _ => a.default_value(range),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TotalityReport {
    TotalOnSample,
    Diverged(Vec<Value>),
}

/// Runs `d` on every sampled tuple and reports the first divergence.
pub fn probe_totality(d: &Derivation, a: &Algebra, sample: &[Vec<Value>], fuel: u64) -> Result<TotalityReport> {
    for args in sample {
        match run(d, a, args, fuel) {
            Ok(_) => {}
            Err(Error::Divergence { .. }) => return Ok(TotalityReport::Diverged(args.clone())),
            Err(e) => return Err(e),
        }
    }
    Ok(TotalityReport::TotalOnSample)
}
