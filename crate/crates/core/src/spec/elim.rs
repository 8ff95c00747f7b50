use super::{Provenance, SpecSet};
use crate::error::Result;
use crate::syntax::{Atom, Formula, FuncSymbol, Signature, Sort, Sym, Term, Var};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElimMode {
    /// Characteristic functions into bool, target value true.
    Bool,
    /// Characteristic functions into a hidden sort D, target value the constant d.
    SortD,
}

struct Elim<'a> {
    sig: &'a mut Signature,
    spec_intro: &'a mut Vec<Arc<str>>,
    range: Sort,
    target: Term,
    next: usize,
}

fn fresh_name(sig: &Signature, base: &str, next: &mut usize) -> String {
    loop {
        let n = format!("{base}{}", *next);
        *next += 1;
        if sig.func(&n).is_none() {
            return n;
        }
    }
}

impl Elim<'_> {
    /// Rewrites `a` innermost first, appending the characteristic-function axioms to `out`.
    fn atom(&mut self, a: &Atom, out: &mut Vec<Formula>) -> Result<Atom> {
        let Atom::Bu { var, bound, body } = a else { return Ok(a.clone()) };
        let body = self.atom(body, out)?;
        let Atom::Eq(t1, t2) = &body else { unreachable!("bounded quantifier over an inequality") };
        let mut xs = Vec::new();
        Atom::bu(var.clone(), bound.clone(), body.clone()).collect_vars(&mut xs);
        let z = if xs.iter().any(|v| v.name == var.name) {
            Var::new(&format!("{}_b", var.name), Sort::Nat)
        } else {
            var.clone()
        };
        let (t1, t2) = {
            let zt = Term::Var(z.clone());
            let m = |v: &Var| (v == var).then(|| zt.clone());
            (t1.subst(&m), t2.subst(&m))
        };
        let name = fresh_name(self.sig, "chi", &mut self.next);
        let dom = std::iter::once(Sort::Nat).chain(xs.iter().map(|v| v.sort.clone())).collect();
        let f: Sym = FuncSymbol::new(&name, dom, self.range.clone());
        self.sig.add_func(f.clone())?;
        self.spec_intro.push(f.name.clone());
        let xt: Vec<Term> = xs.iter().map(|v| Term::Var(v.clone())).collect();
        let fa = |n: Term| Term::app(&f, std::iter::once(n).chain(xt.iter().cloned()).collect());
        let is_t = |n: Term| Atom::eq(fa(n), self.target.clone());
        let zero = Term::constant(&self.sig.sym("0")?);
        let succ = self.sig.sym("S")?;
        let zt = Term::Var(z);
        let sz = Term::app(&succ, vec![zt.clone()]);
        out.push(Formula::atom(is_t(zero)));
        out.push(Formula::cond(vec![is_t(zt.clone()), Atom::eq(t1.clone(), t2.clone())], is_t(sz.clone())));
        out.push(Formula::cond(vec![is_t(sz.clone())], is_t(zt)));
        out.push(Formula::cond(vec![is_t(sz)], Atom::eq(t1, t2)));
        Ok(is_t(bound.clone()))
    }
}

/// Replaces every bounded quantifier by a characteristic function with four defining axioms.
/// Each rewritten axiom keeps its position and is followed by the axioms it introduced.
pub fn eliminate_bu(spec: &SpecSet, mode: ElimMode) -> Result<SpecSet> {
    if spec.bu_occurrences() == 0 {
        return Ok(spec.clone());
    }
    let mut sig = spec.signature.clone();
    let mut introduced = Vec::new();
    let (range, target) = match mode {
        ElimMode::Bool => (Sort::Bool, Term::constant(&sig.sym("true")?)),
        ElimMode::SortD => {
            let mut k = 0;
            let mut d = Sort::user("D");
            while sig.has_sort(&d) {
                k += 1;
                d = Sort::user(&format!("D{k}"));
            }
            sig.add_hidden_sort(d.clone())?;
            let mut next = 0;
            let cname = if sig.func("d").is_none() { "d".to_string() } else { fresh_name(&sig, "d", &mut next) };
            let cst = FuncSymbol::new(&cname, vec![], d.clone());
            sig.add_func(cst.clone())?;
            introduced.push(cst.name.clone());
            sig.set_default(d.clone(), Term::constant(&cst))?;
            (d, Term::constant(&cst))
        }
    };
    let mut out = SpecSet::new(Signature::new(&sig.name));
    out.target = spec.target.clone();
    let mut el = Elim { sig: &mut sig, spec_intro: &mut introduced, range, target, next: 0 };
    for ax in &spec.axioms {
        let mut extra = Vec::new();
        let ants = ax.formula.antecedents.iter().map(|a| el.atom(a, &mut extra)).collect::<Result<Vec<_>>>()?;
        let cons = el.atom(&ax.formula.consequent, &mut extra)?;
        out.push(Formula::cond(ants, cons), ax.provenance);
        for f in extra {
            out.push(f, Provenance::BuElim);
        }
    }
    out.signature = sig;
    out.introduced = spec.introduced.iter().cloned().chain(introduced).collect();
    out.check()?;
    Ok(out)
}
