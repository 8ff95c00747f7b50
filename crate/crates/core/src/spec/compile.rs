use super::{array_axioms, spec_err, Provenance, SpecSet};
use crate::algebra::{Algebra, OpFn, Value};
use crate::error::Result;
use crate::interp::eval_entry;
use crate::schemes::{godel_bytes, Derivation, Scheme};
use crate::syntax::{Atom, Formula, FuncSymbol, Signature, Sort, Sym, Term, Var};
use sha2::{Digest, Sha256};
use std::sync::Arc;

fn hash8(d: &Derivation) -> String {
    let h = Sha256::digest(godel_bytes(d));
    h[..4].iter().map(|b| format!("{b:02x}")).collect()
}

fn fresh(sig: &mut Signature, spec: &mut SpecSet, name: String, dom: Vec<Sort>, range: Sort) -> Result<Sym> {
    let f = FuncSymbol::new(&name, dom, range);
    sig.add_func(f.clone())?;
    spec.introduced.insert(f.name.clone());
    Ok(f)
}

fn vars(prefix: &str, sorts: &[Sort]) -> Vec<Term> {
    sorts.iter().enumerate().map(|(i, s)| Term::var(&format!("{prefix}{i}"), s.clone())).collect()
}

struct Symbols {
    /// Symbol denoting each entry.
    entry: Vec<Sym>,
    /// For primrec entries, the symbols of all components.
    components: Vec<Vec<Sym>>,
}

fn declare(d: &Derivation, sig: &mut Signature, spec: &mut SpecSet) -> Result<Symbols> {
    let h = hash8(d);
    let mut entry = Vec::new();
    let mut components = Vec::new();
    for (k, e) in d.entries.iter().enumerate() {
        let f = fresh(sig, spec, format!("f{k}_{h}"), e.domain.clone(), e.range.clone())?;
        let mut comps = Vec::new();
        if let Scheme::PrimRec { base, sel, .. } = &e.scheme {
            for (i, &g) in base.iter().enumerate() {
                if i == *sel {
                    comps.push(f.clone());
                } else {
                    let r = d.entries[g].range.clone();
                    comps.push(fresh(sig, spec, format!("f{k}c{i}_{h}"), e.domain.clone(), r)?);
                }
            }
        }
        entry.push(f);
        components.push(comps);
    }
    Ok(Symbols { entry, components })
}

fn entry_axioms(d: &Derivation, sig: &Signature, syms: &Symbols, k: usize, out: &mut Vec<Formula>) -> Result<()> {
    let e = &d.entries[k];
    let f = &syms.entry[k];
    let x = vars("x", &e.domain);
    let lhs = Term::app(f, x.clone());
    match &e.scheme {
        Scheme::Prim(p) => out.push(Formula::eq(lhs, Term::app(p, x))),
        Scheme::Const { c, .. } => out.push(Formula::eq(lhs, Term::constant(c))),
        Scheme::Proj { index, .. } => out.push(Formula::eq(lhs, x[*index].clone())),
        Scheme::Comp { head, args, .. } => {
            let inner = args.iter().map(|&g| Term::app(&syms.entry[g], x.clone())).collect();
            out.push(Formula::eq(lhs, Term::app(&syms.entry[*head], inner)));
        }
        Scheme::Cases(_) => {
            let (t, fl) = (Term::constant(&sig.sym("true")?), Term::constant(&sig.sym("false")?));
            out.push(Formula::eq(Term::app(f, vec![t, x[1].clone(), x[2].clone()]), x[1].clone()));
            out.push(Formula::eq(Term::app(f, vec![fl, x[1].clone(), x[2].clone()]), x[2].clone()));
        }
        Scheme::PrimRec { base, step, .. } => {
            let zero = Term::constant(&sig.sym("0")?);
            let succ = sig.sym("S")?;
            let z = Term::var("z", Sort::Nat);
            let u = &x[1..];
            let with = |n: Term| std::iter::once(n).chain(u.iter().cloned()).collect::<Vec<_>>();
            let comps = &syms.components[k];
            for (i, c) in comps.iter().enumerate() {
                out.push(Formula::eq(Term::app(c, with(zero.clone())), Term::app(&syms.entry[base[i]], u.to_vec())));
            }
            for (i, c) in comps.iter().enumerate() {
                let mut hargs = with(z.clone());
                hargs.extend(comps.iter().map(|cj| Term::app(cj, with(z.clone()))));
                let l = Term::app(c, with(Term::app(&succ, vec![z.clone()])));
                out.push(Formula::eq(l, Term::app(&syms.entry[step[i]], hargs)));
            }
        }
        Scheme::Mu(g) => {
            let (t, fl) = (Term::constant(&sig.sym("true")?), Term::constant(&sig.sym("false")?));
            let zv = Var::new("z", Sort::Nat);
            let y = Term::var("y", Sort::Nat);
            let gx = |n: Term| Term::app(&syms.entry[*g], x.iter().cloned().chain(std::iter::once(n)).collect());
            let search = Atom::bu(zv.clone(), y.clone(), Atom::eq(gx(Term::Var(zv)), fl));
            let hit = Atom::eq(gx(y.clone()), t);
            out.push(Formula::cond(vec![search, hit], Atom::eq(lhs, y)));
        }
    }
    Ok(())
}

fn compile(d: &Derivation, allow_mu: bool) -> Result<SpecSet> {
    if d.entries.is_empty() {
        return Err(spec_err("derivation must be nonempty"));
    }
    if !allow_mu && d.uses_mu() {
        return Err(spec_err("μ present: use compile_mupr_spec"));
    }
    let mut sig = (*d.signature).clone();
    let mut spec = SpecSet::new(Signature::new(&sig.name));
    let syms = declare(d, &mut sig, &mut spec)?;
    if allow_mu && d.uses_star() {
        let arr = array_axioms(&sig)?;
        spec.axioms.extend(arr.axioms);
    }
    for k in 0..d.entries.len() {
        let mut fs = Vec::new();
        entry_axioms(d, &sig, &syms, k, &mut fs)?;
        let prov = if matches!(d.entries[k].scheme, Scheme::Mu(_)) { Provenance::FMu(k) } else { Provenance::Scheme(k) };
        for f in fs {
            spec.push(f, prov);
        }
    }
    sig.name = format!("{}_{}", sig.name, d.name);
    spec.signature = sig;
    spec.target = Some(Arc::clone(syms.entry.last().unwrap()));
    spec.check()?;
    Ok(spec)
}

/// E_α: simple equations defining every entry of a μ-free derivation.
pub fn compile_pr_spec(d: &Derivation) -> Result<SpecSet> {
    compile(d, false)
}

/// F_α: as E_α plus one conditional BU axiom per μ entry, with ArrAx when starred.
pub fn compile_mupr_spec(d: &Derivation) -> Result<SpecSet> {
    compile(d, true)
}

/// Expands `a` by the symbols of a compiled spec, interpreting each one by running
/// its derivation entry. Searches share no fuel across calls; each call gets `fuel`.
pub fn compiled_algebra(d: &Derivation, a: &Algebra, spec: &SpecSet, fuel: u64) -> Result<Algebra> {
    let h = hash8(d);
    let base = Arc::new(a.clone());
    let mut ops: Vec<(Arc<str>, OpFn)> = Vec::new();
    for (k, e) in d.entries.iter().enumerate() {
        let mut variants = vec![(format!("f{k}_{h}"), None)];
        if let Scheme::PrimRec { m, sel, .. } = &e.scheme {
            variants.extend((0..*m).filter(|i| i != sel).map(|i| (format!("f{k}c{i}_{h}"), Some(i))));
        }
        for (name, comp) in variants {
            let mut dd = d.clone();
            dd.entries.truncate(k + 1);
            if let (Some(i), Scheme::PrimRec { sel, .. }) = (comp, &mut dd.entries[k].scheme) {
                *sel = i;
            }
            let (dd, base) = (Arc::new(dd), Arc::clone(&base));
            let op: OpFn = Arc::new(move |args: &[Value]| {
                let mut f = fuel;
                eval_entry(&dd, &base, k, args, &mut f)
            });
            ops.push((name.into(), op));
        }
    }
    a.expand(&format!("{}+{}", a.name, d.name), spec.signature.clone(), vec![], ops)
}
