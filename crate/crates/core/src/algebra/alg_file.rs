use super::builtin::complete_std_ops;
use super::{builtin, parse_value, Algebra, Carrier, OpFn, RealMode, Value};
use crate::error::{Error, Result};
use crate::sexp::{parse_one, Sexp};
use crate::syntax::{sort_from_name, Sort};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

fn value_at(s: &Sort, e: &Sexp, carriers: &BTreeMap<Sort, Carrier>) -> Result<Value> {
    let text = e.expect_atom("value")?;
    let v = parse_value(s, text, RealMode::Exact).map_err(|_| e.err(format!("bad value {text} for sort {s}")))?;
    if let Some(Carrier::Finite(items)) = carriers.get(s) {
        if !items.contains(&v) {
            return Err(e.err(format!("{text} is not in the carrier of {s}")));
        }
    }
    Ok(v)
}

/// Reads a `.alg` document: finite carriers with table interpretations.
pub fn parse_algebra(text: &str) -> Result<Algebra> {
    let e = parse_one(text)?;
    let items = e.expect_list("algebra form")?;
    if e.head() != Some("algebra") || items.len() < 3 {
        return Err(e.err("expected (algebra NAME (signature SIG) ...)"));
    }
    let name = items[1].expect_atom("algebra name")?;
    let sig_clause = items[2].expect_list("signature clause")?;
    if items[2].head() != Some("signature") || sig_clause.len() != 2 {
        return Err(items[2].err("expected (signature SIG)"));
    }
    let (sig, base) = match &sig_clause[1] {
        Sexp::Atom { text, .. } => {
            let b = builtin(text).map_err(|x| sig_clause[1].err(x.to_string()))?.into_algebra();
            (b.signature().clone(), Some(b))
        }
        form => (crate::syntax::parse::signature_from_sexp(form)?, None),
    };
    let mut carriers: BTreeMap<Sort, Carrier> = base.as_ref().map(|b| b.carriers().clone()).unwrap_or_default();
    let mut ops: HashMap<Arc<str>, OpFn> = HashMap::new();
    if let Some(b) = &base {
        for f in sig.funcs() {
            ops.insert(f.name.clone(), b.op(&f.name).unwrap().clone());
        }
    }
    for s in sig.sorts() {
        let c = match s {
            Sort::Bool => Some(Carrier::Booleans),
            Sort::Nat => Some(Carrier::Naturals),
            Sort::Real => Some(Carrier::Reals),
            Sort::Intvl => Some(Carrier::Interval),
            Sort::Star(b) => Some(Carrier::Arrays((**b).clone())),
            Sort::User(_) => None,
        };
        if let Some(c) = c {
            carriers.entry(s.clone()).or_insert(c);
        }
    }
    let mut tables = Vec::new();
    for c in &items[3..] {
        let l = c.expect_list("algebra clause")?;
        match c.head() {
            Some("carrier") if l.len() == 3 => {
                let s = sort_from_name(l[1].expect_atom("sort")?).filter(|s| sig.has_sort(s)).ok_or_else(|| l[1].err("unknown sort"))?;
                let fin = l[2].expect_list("carrier")?;
                if l[2].head() != Some("finite") {
                    return Err(l[2].err("only finite carriers can be declared"));
                }
                let vals = fin[1..].iter().map(|x| value_at(&s, x, &BTreeMap::new())).collect::<Result<Vec<_>>>()?;
                carriers.insert(s, Carrier::Finite(vals));
            }
            Some("interp") if l.len() == 3 => tables.push((&l[1], &l[2])),
            _ => return Err(c.err("expected (carrier SORT (finite ...)) or (interp FUNC (table ...))")),
        }
    }
    for (fe, te) in tables {
        let fname = fe.expect_atom("symbol")?;
        let f = sig.func(fname).ok_or_else(|| fe.err(format!("unknown symbol {fname}")))?.clone();
        let rows = te.expect_list("table")?;
        if te.head() != Some("table") {
            return Err(te.err("expected (table ((ARGS...) RESULT) ...)"));
        }
        let mut table: HashMap<Vec<Value>, Value> = HashMap::new();
        for r in &rows[1..] {
            let rl = r.expect_list("table row")?;
            if rl.len() != 2 {
                return Err(r.err("expected ((ARGS...) RESULT)"));
            }
            let args = rl[0].expect_list("argument list")?;
            if args.len() != f.arity() {
                return Err(rl[0].err("wrong number of arguments"));
            }
            let key = args.iter().zip(&f.domain).map(|(a, s)| value_at(s, a, &carriers)).collect::<Result<Vec<_>>>()?;
            let val = value_at(&f.range, &rl[1], &carriers)?;
            table.insert(key, val);
        }
        let fname2 = f.name.clone();
        ops.insert(
            f.name.clone(),
            Arc::new(move |a: &[Value]| table.get(a).cloned().ok_or_else(|| Error::Eval(format!("{fname2} undefined at {a:?}")))),
        );
    }
    complete_std_ops(&sig, &mut ops)?;
    let alg = Algebra::new(name, sig.clone(), carriers, ops, RealMode::Exact).map_err(|x| e.err(x.to_string()))?;
    check_total(&alg)?;
    Ok(alg)
}

fn check_total(a: &Algebra) -> Result<()> {
    for f in a.signature().funcs() {
        let mut doms = Vec::new();
        for s in &f.domain {
            match a.carrier(s) {
                Some(Carrier::Finite(v)) => doms.push(v.clone()),
                Some(Carrier::Booleans) => doms.push(vec![Value::Bool(false), Value::Bool(true)]),
                _ => {
                    doms.clear();
                    break;
                }
            }
        }
        if doms.len() != f.arity() {
            continue;
        }
        let mut idx = vec![0usize; doms.len()];
        loop {
            let args: Vec<Value> = idx.iter().zip(&doms).map(|(&i, d)| d[i].clone()).collect();
            a.apply(f, &args)?;
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < doms[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_element_user_sort() {
        let text = "(algebra Flip (signature (signature F (flags standard) (sorts bool u) (func flip (u) u) (const a u) (default bool true) (default u a)))
            (carrier u (finite a b))
            (interp a (table (() a)))
            (interp flip (table ((a) b) ((b) a))))";
        let alg = parse_algebra(text).unwrap();
        let f = alg.signature().sym("flip").unwrap();
        assert_eq!(alg.apply(&f, &[Value::User("a".into())]).unwrap(), Value::User("b".into()));
        let missing = text.replace("((b) a)", "");
        assert!(parse_algebra(&missing).is_err());
    }
}
