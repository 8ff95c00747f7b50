use super::metric::{MetricAlgebra, MetricRule};
use super::{Algebra, Carrier, OpFn, Real, RealMode, Value};
use crate::error::{Error, Result};
use crate::syntax::{n_standardize, sort_from_name, star_signature, FuncSymbol, Signature, Sort, Term};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// A registered algebra, possibly with metrics.
#[derive(Clone, Debug)]
pub enum Builtin {
    Plain(Algebra),
    Metric(MetricAlgebra),
}

impl Builtin {
    pub fn algebra(&self) -> &Algebra {
        match self {
            Builtin::Plain(a) => a,
            Builtin::Metric(m) => &m.base,
        }
    }

    pub fn metric(&self) -> Option<&MetricAlgebra> {
        match self {
            Builtin::Metric(m) => Some(m),
            _ => None,
        }
    }

    pub fn into_algebra(self) -> Algebra {
        match self {
            Builtin::Plain(a) => a,
            Builtin::Metric(m) => m.base,
        }
    }
}

fn op(f: impl Fn(&[Value]) -> Result<Value> + Send + Sync + 'static) -> OpFn {
    Arc::new(f)
}

fn index(v: &Value) -> Result<Option<usize>> {
    Ok(v.as_nat()?.to_usize())
}

/// Standard interpretation of a reserved symbol name.
pub(crate) fn std_op(name: &str, defaults: &BTreeMap<Sort, Value>) -> Option<OpFn> {
    Some(match name {
        "true" => op(|_| Ok(Value::Bool(true))),
        "false" => op(|_| Ok(Value::Bool(false))),
        "and" => op(|a| Ok(Value::Bool(a[0].as_bool()? && a[1].as_bool()?))),
        "or" => op(|a| Ok(Value::Bool(a[0].as_bool()? || a[1].as_bool()?))),
        "not" => op(|a| Ok(Value::Bool(!a[0].as_bool()?))),
        "0" => op(|_| Ok(Value::Nat(BigUint::zero()))),
        "S" => op(|a| Ok(Value::Nat(a[0].as_nat()? + 1u32))),
        "less_nat" => op(|a| Ok(Value::Bool(a[0].as_nat()? < a[1].as_nat()?))),
        _ => {
            let (pre, rest) = name.split_once('_')?;
            let s = sort_from_name(rest)?;
            match pre {
                "if" => op(|a| Ok(if a[0].as_bool()? { a[1].clone() } else { a[2].clone() })),
                "eq" => op(|a| Ok(Value::Bool(a[0] == a[1]))),
                "Lgth" => op(|a| Ok(Value::nat(a[0].as_array()?.1.len() as u64))),
                "Null" => op(move |_| Ok(Value::Array(s.clone(), Vec::new()))),
                "Ap" => {
                    let d = defaults.get(&s)?.clone();
                    op(move |a| {
                        let (_, v) = a[0].as_array()?;
                        Ok(match index(&a[1])? {
                            Some(k) if k < v.len() => v[k].clone(),
                            _ => d.clone(),
                        })
                    })
                }
                "Update" => op(|a| {
                    let (s, v) = a[0].as_array()?;
                    let mut v = v.clone();
                    if let Some(k) = index(&a[1])? {
                        if k < v.len() {
                            v[k] = a[2].clone();
                        }
                    }
                    Ok(Value::Array(s.clone(), v))
                }),
                "Newlength" => {
                    let d = defaults.get(&s)?.clone();
                    op(move |a| {
                        let (s, v) = a[0].as_array()?;
                        let m = index(&a[1])?.filter(|&m| m <= 1 << 24).ok_or_else(|| Error::Resource("array length too large".into()))?;
                        let mut v = v.clone();
                        v.resize(m, d.clone());
                        Ok(Value::Array(s.clone(), v))
                    })
                }
                _ => return None,
            }
        }
    })
}

fn carrier_for(s: &Sort) -> Option<Carrier> {
    Some(match s {
        Sort::Bool => Carrier::Booleans,
        Sort::Nat => Carrier::Naturals,
        Sort::Real => Carrier::Reals,
        Sort::Intvl => Carrier::Interval,
        Sort::Star(b) => Carrier::Arrays((**b).clone()),
        Sort::User(_) => return None,
    })
}

/// Default values computable without user operations.
fn std_defaults(sig: &Signature, ops: &HashMap<Arc<str>, OpFn>) -> Result<BTreeMap<Sort, Value>> {
    fn ev(t: &Term, ops: &HashMap<Arc<str>, OpFn>) -> Result<Value> {
        match t {
            Term::App(f, a) => {
                let v = a.iter().map(|x| ev(x, ops)).collect::<Result<Vec<_>>>()?;
                let o = ops.get(&f.name).ok_or_else(|| Error::Eval(format!("no interpretation for {}", f.name)))?;
                o(&v)
            }
            Term::Var(_) => Err(Error::Eval("open default".into())),
        }
    }
    let mut d = BTreeMap::new();
    for (s, t) in sig.defaults() {
        if !s.is_star() {
            d.insert(s.clone(), ev(t, ops)?);
        }
    }
    Ok(d)
}

/// Fills standard interpretations for every reserved symbol lacking one.
pub(crate) fn complete_std_ops(sig: &Signature, ops: &mut HashMap<Arc<str>, OpFn>) -> Result<()> {
    for f in sig.funcs() {
        if !ops.contains_key(&f.name) && !f.name.starts_with("Ap_") && !f.name.starts_with("Newlength_") {
            if let Some(o) = std_op(&f.name, &BTreeMap::new()) {
                ops.insert(f.name.clone(), o);
            }
        }
    }
    let d = std_defaults(sig, ops)?;
    for f in sig.funcs() {
        if !ops.contains_key(&f.name) {
            if let Some(o) = std_op(&f.name, &d) {
                ops.insert(f.name.clone(), o);
            }
        }
    }
    Ok(())
}

fn bool_sig(name: &str, eq: bool) -> Signature {
    let mut s = Signature::new(name);
    s.add_sort(Sort::Bool).unwrap();
    if eq {
        s.add_eq_sort(Sort::Bool).unwrap();
    }
    s.standardize().unwrap();
    s
}

fn real_ops(sig: &mut Signature, ops: &mut HashMap<Arc<str>, OpFn>, mode: RealMode) {
    let r = Sort::Real;
    let rr = move |v: &Value| v.as_real().cloned();
    sig.add_func(FuncSymbol::new("zero_r", vec![], r.clone())).unwrap();
    sig.add_func(FuncSymbol::new("one_r", vec![], r.clone())).unwrap();
    sig.add_func(FuncSymbol::new("add_r", vec![r.clone(), r.clone()], r.clone())).unwrap();
    sig.add_func(FuncSymbol::new("mul_r", vec![r.clone(), r.clone()], r.clone())).unwrap();
    sig.add_func(FuncSymbol::new("neg_r", vec![r.clone()], r.clone())).unwrap();
    ops.insert("zero_r".into(), op(move |_| Ok(Value::Real(Real::from_int(0, mode)))));
    ops.insert("one_r".into(), op(move |_| Ok(Value::Real(Real::from_int(1, mode)))));
    ops.insert("add_r".into(), op(move |a| Ok(Value::Real(rr(&a[0])?.add(&rr(&a[1])?)))));
    ops.insert("mul_r".into(), op(move |a| Ok(Value::Real(rr(&a[0])?.mul(&rr(&a[1])?)))));
    ops.insert("neg_r".into(), op(move |a| Ok(Value::Real(rr(&a[0])?.neg()))));
}

fn build(name: &str, sig: Signature, mut ops: HashMap<Arc<str>, OpFn>, mode: RealMode) -> Result<Algebra> {
    complete_std_ops(&sig, &mut ops)?;
    let carriers = sig.sorts().iter().map(|s| (s.clone(), carrier_for(s).unwrap())).collect();
    Algebra::new(name, sig, carriers, ops, mode)
}

/// A registered algebra with exact reals.
pub fn builtin(name: &str) -> Result<Builtin> {
    builtin_with(name, RealMode::Exact)
}

/// A registered algebra: B, Beq, N0, N, R0, RN, Rd, Id.
pub fn builtin_with(name: &str, mode: RealMode) -> Result<Builtin> {
    let mut ops: HashMap<Arc<str>, OpFn> = HashMap::new();
    let plain = |a: Result<Algebra>| a.map(Builtin::Plain);
    match name {
        "B" => plain(build("B", bool_sig("B", false), ops, mode)),
        "Beq" => plain(build("Beq", bool_sig("Beq", true), ops, mode)),
        "N" => plain(build("N", n_standardize(&bool_sig("N", false))?, ops, mode)),
        "N0" => {
            let mut s = Signature::new("N0");
            s.add_sort(Sort::Nat)?;
            s.add_func(FuncSymbol::new("0", vec![], Sort::Nat))?;
            s.add_func(FuncSymbol::new("S", vec![Sort::Nat], Sort::Nat))?;
            s.set_default(Sort::Nat, crate::syntax::numeral(0))?;
            plain(build("N0", s, ops, mode))
        }
        "R0" | "RN" | "Rd" | "Id" => {
            let mut s = Signature::new(name);
            s.add_sort(Sort::Real)?;
            real_ops(&mut s, &mut ops, mode);
            s.set_default(Sort::Real, Term::constant(&s.sym("zero_r")?))?;
            if name == "R0" {
                return plain(build("R0", s, ops, mode));
            }
            s.standardize()?;
            let mut s = n_standardize(&s)?;
            if name == "RN" {
                return plain(build("RN", s, ops, mode));
            }
            let r = Sort::Real;
            s.add_func(FuncSymbol::new("div_N", vec![r.clone(), Sort::Nat], r.clone()))?;
            ops.insert("div_N".into(), op(|a| Ok(Value::Real(a[0].as_real()?.div_nat(a[1].as_nat()?)))));
            let mut metrics = BTreeMap::new();
            metrics.insert(Sort::Bool, MetricRule::Discrete);
            metrics.insert(Sort::Nat, MetricRule::Discrete);
            metrics.insert(Sort::Real, MetricRule::AbsDiff);
            if name == "Id" {
                let i = Sort::Intvl;
                s.add_sort(i.clone())?;
                s.add_func(FuncSymbol::new("if_intvl", vec![Sort::Bool, i.clone(), i.clone()], i.clone()))?;
                s.add_func(FuncSymbol::new("zero_I", vec![], i.clone()))?;
                s.add_func(FuncSymbol::new("one_I", vec![], i.clone()))?;
                s.add_func(FuncSymbol::new("i_I", vec![i.clone()], r.clone()))?;
                ops.insert("zero_I".into(), op(move |_| Ok(Value::Intvl(Real::from_int(0, mode)))));
                ops.insert("one_I".into(), op(move |_| Ok(Value::Intvl(Real::from_int(1, mode)))));
                ops.insert("i_I".into(), op(|a| Ok(Value::Real(a[0].as_real()?.clone()))));
                s.set_default(i.clone(), Term::constant(&s.sym("zero_I")?))?;
                metrics.insert(i, MetricRule::AbsDiff);
            }
            for (srt, _) in metrics.clone() {
                let d = format!("d_{srt}");
                s.add_func(FuncSymbol::new(&d, vec![srt.clone(), srt.clone()], r.clone()))?;
                let rule = metrics[&srt];
                ops.insert(d.into(), op(move |a| rule.apply(&a[0], &a[1], mode)));
            }
            let base = build(name, s, ops, mode)?;
            Ok(Builtin::Metric(MetricAlgebra { base, metrics }))
        }
        _ => Err(Error::NotFound(format!("unknown builtin algebra {name}"))),
    }
}

/// The array expansion A*.
pub fn star_algebra(a: &Algebra) -> Result<Algebra> {
    let sig = star_signature(a.signature())?;
    let mut ops: HashMap<Arc<str>, OpFn> = sig.funcs().iter().filter_map(|f| a.op(&f.name).map(|o| (f.name.clone(), o.clone()))).collect();
    complete_std_ops(&sig, &mut ops)?;
    let mut carriers = a.carriers.clone();
    for s in sig.sorts() {
        if !carriers.contains_key(s) {
            carriers.insert(s.clone(), carrier_for(s).ok_or_else(|| Error::Signature(format!("no carrier for {s}")))?);
        }
    }
    Algebra::new(&format!("{}*", a.name), sig, carriers, ops, a.real_mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn ev(a: &Algebra, s: &str) -> Value {
        a.eval_closed(&parse_term(a.signature(), s).unwrap()).unwrap()
    }

    #[test]
    fn registry() {
        assert!(builtin("Q").is_err());
        let n = builtin("N").unwrap();
        for f in ["0", "S", "if_nat", "eq_nat", "less_nat"] {
            assert!(n.algebra().signature().func(f).is_some());
        }
        let rd = builtin_with("Rd", RealMode::Float).unwrap();
        let r = rd.algebra();
        assert_eq!(ev(r, "(div_N one_r 0)"), Value::Real(Real::Float(0.0)));
        let id = builtin("Id").unwrap();
        let m = id.metric().unwrap();
        let q = |x| Value::Intvl(super::super::parse_real(x, RealMode::Exact).unwrap());
        assert_eq!(super::super::distance(m, &Sort::Intvl, &q("0.25"), &q("0.75")).unwrap().to_string(), "1/2");
    }

    #[test]
    fn arrays() {
        let b = star_algebra(builtin("B").unwrap().algebra()).unwrap();
        assert_eq!(ev(&b, "(Ap_bool Null_bool 0)"), Value::Bool(true));
        let r = star_algebra(builtin("RN").unwrap().algebra()).unwrap();
        let v = ev(&r, "(Newlength_real Null_real #3)");
        assert_eq!(v.to_string(), "[0 0 0]");
        assert_eq!(ev(&r, "(Lgth_real (Newlength_real Null_real #3))"), Value::nat(3));
        let xy = Value::Array(Sort::Bool, vec![Value::Bool(true), Value::Bool(false)]);
        let up = b.op("Update_bool").unwrap();
        assert_eq!(up(&[xy.clone(), Value::nat(5), Value::Bool(false)]).unwrap(), xy);
    }
}
