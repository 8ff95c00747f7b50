//! Carriers, values, algebras and term evaluation.

mod alg_file;
mod builtin;
mod metric;
mod real;
mod sample;

pub use alg_file::parse_algebra;
pub use builtin::{builtin, builtin_with, star_algebra, Builtin};
pub use metric::{distance, MetricAlgebra, MetricRule};
pub use real::{parse_real, Real, RealMode};
pub use sample::{eval_atom, eval_formula, sample_value, satisfies, satisfies_with, SampleConfig, Verdict};

use crate::error::{Error, Result};
use crate::syntax::{Signature, Sort, Sym, Term, Var};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

/// An element of some carrier.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Value {
    Bool(bool),
    Nat(BigUint),
    Real(Real),
    Intvl(Real),
    Array(Sort, Vec<Value>),
    User(Arc<str>),
}

impl Value {
    pub fn nat(n: u64) -> Value {
        Value::Nat(BigUint::from(n))
    }

    pub fn as_bool(&self) -> Result<bool> {
        match self {
            Value::Bool(b) => Ok(*b),
            v => Err(Error::Eval(format!("expected bool, got {v}"))),
        }
    }

    pub fn as_nat(&self) -> Result<&BigUint> {
        match self {
            Value::Nat(n) => Ok(n),
            v => Err(Error::Eval(format!("expected nat, got {v}"))),
        }
    }

    pub fn as_u64(&self) -> Result<u64> {
        self.as_nat()?.to_u64().ok_or_else(|| Error::Resource(format!("natural {self} too large")))
    }

    pub fn as_real(&self) -> Result<&Real> {
        match self {
            Value::Real(r) | Value::Intvl(r) => Ok(r),
            v => Err(Error::Eval(format!("expected real, got {v}"))),
        }
    }

    pub fn as_array(&self) -> Result<(&Sort, &Vec<Value>)> {
        match self {
            Value::Array(s, v) => Ok((s, v)),
            v => Err(Error::Eval(format!("expected array, got {v}"))),
        }
    }

    /// Whether the value inhabits sort `s`.
    pub fn has_sort(&self, s: &Sort) -> bool {
        match (self, s) {
            (Value::Bool(_), Sort::Bool) | (Value::Nat(_), Sort::Nat) | (Value::Real(_), Sort::Real) | (Value::Intvl(_), Sort::Intvl) => true,
            (Value::Array(b, _), Sort::Star(sb)) => b == &**sb,
            (Value::User(_), Sort::User(_)) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Nat(n) => write!(f, "{n}"),
            Value::Real(r) | Value::Intvl(r) => write!(f, "{r}"),
            Value::Array(_, v) => {
                write!(f, "[")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
            Value::User(t) => write!(f, "{t}"),
        }
    }
}

/// Parses a value of sort `s`: `true`, `3`, `1/4`, `[a b]`, or a user token.
pub fn parse_value(s: &Sort, text: &str, mode: RealMode) -> Result<Value> {
    let bad = || Error::parse(1, 1, format!("cannot read {text:?} as a value of sort {s}"));
    let t = text.trim();
    Ok(match s {
        Sort::Bool => match t {
            "true" => Value::Bool(true),
            "false" => Value::Bool(false),
            _ => return Err(bad()),
        },
        Sort::Nat => Value::Nat(t.parse().map_err(|_| bad())?),
        Sort::Real => Value::Real(parse_real(t, mode).ok_or_else(bad)?),
        Sort::Intvl => {
            let r = parse_real(t, mode).ok_or_else(bad)?;
            if r.to_f64() < 0.0 || r.to_f64() > 1.0 {
                return Err(bad());
            }
            Value::Intvl(r)
        }
        Sort::Star(b) => {
            let inner = t.strip_prefix('[').and_then(|x| x.strip_suffix(']')).ok_or_else(bad)?;
            let items = inner.split_whitespace().map(|x| parse_value(b, x, mode)).collect::<Result<Vec<_>>>()?;
            Value::Array((**b).clone(), items)
        }
        Sort::User(_) => Value::User(t.into()),
    })
}

pub type OpFn = Arc<dyn Fn(&[Value]) -> Result<Value> + Send + Sync>;

/// Description of a carrier set.
#[derive(Clone, Debug, PartialEq)]
pub enum Carrier {
    Finite(Vec<Value>),
    Booleans,
    Naturals,
    Reals,
    Interval,
    Arrays(Sort),
}

/// A Σ-algebra: carriers plus a total interpretation of every symbol.
#[derive(Clone)]
pub struct Algebra {
    pub name: String,
    signature: Signature,
    carriers: BTreeMap<Sort, Carrier>,
    ops: HashMap<Arc<str>, OpFn>,
    defaults: BTreeMap<Sort, Value>,
    pub real_mode: RealMode,
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Algebra({})", self.name)
    }
}

pub type Env = BTreeMap<Var, Value>;

impl Algebra {
    /// Assembles an algebra; every symbol needs an operation and every sort a carrier.
    pub fn new(name: &str, signature: Signature, carriers: BTreeMap<Sort, Carrier>, ops: HashMap<Arc<str>, OpFn>, real_mode: RealMode) -> Result<Algebra> {
        let mut a = Algebra { name: name.to_string(), signature, carriers, ops, defaults: BTreeMap::new(), real_mode };
        for s in a.signature.sorts() {
            if !a.carriers.contains_key(s) {
                return Err(Error::Signature(format!("no carrier for sort {s}")));
            }
        }
        for f in a.signature.funcs() {
            if !a.ops.contains_key(&f.name) {
                return Err(Error::Signature(format!("no interpretation for {}", f.name)));
            }
        }
        a.refresh_defaults()?;
        Ok(a)
    }

    fn refresh_defaults(&mut self) -> Result<()> {
        let mut d = BTreeMap::new();
        for (s, t) in self.signature.defaults() {
            d.insert(s.clone(), self.eval_closed(t)?);
        }
        self.defaults = d;
        Ok(())
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn carrier(&self, s: &Sort) -> Option<&Carrier> {
        self.carriers.get(s)
    }

    pub fn carriers(&self) -> &BTreeMap<Sort, Carrier> {
        &self.carriers
    }

    pub fn op(&self, name: &str) -> Option<&OpFn> {
        self.ops.get(name)
    }

    /// The default value δ_s.
    pub fn default_value(&self, s: &Sort) -> Result<Value> {
        self.defaults.get(s).cloned().ok_or_else(|| Error::Eval(format!("no default for sort {s}")))
    }

    /// Applies the interpretation of `f`.
    pub fn apply(&self, f: &Sym, args: &[Value]) -> Result<Value> {
        let op = self.ops.get(&f.name).ok_or_else(|| Error::Eval(format!("{} has no interpretation in {}", f.name, self.name)))?;
        if args.len() != f.arity() {
            return Err(Error::Eval(format!("{} applied to {} arguments", f.name, args.len())));
        }
        op(args)
    }

    /// Expansion by new sorts and symbols.
    pub fn expand(&self, name: &str, signature: Signature, extra_carriers: Vec<(Sort, Carrier)>, extra_ops: Vec<(Arc<str>, OpFn)>) -> Result<Algebra> {
        let mut carriers = self.carriers.clone();
        carriers.extend(extra_carriers);
        let mut ops = self.ops.clone();
        ops.extend(extra_ops);
        Algebra::new(name, signature, carriers, ops, self.real_mode)
    }

    pub fn eval_closed(&self, t: &Term) -> Result<Value> {
        eval_term(self, &Env::new(), t)
    }
}

/// Evaluates `t` under `env`.
pub fn eval_term(a: &Algebra, env: &Env, t: &Term) -> Result<Value> {
    match t {
        Term::Var(v) => env.get(v).cloned().ok_or_else(|| Error::Eval(format!("unbound variable {v}"))),
        Term::App(f, args) => {
            let vals = args.iter().map(|x| eval_term(a, env, x)).collect::<Result<Vec<_>>>()?;
            for (v, s) in vals.iter().zip(&f.domain) {
                if !v.has_sort(s) {
                    return Err(Error::Eval(format!("{} expects {s}, got {v}", f.name)));
                }
            }
            a.apply(f, &vals)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    #[test]
    fn conditional_and_equality() {
        let n = builtin("N").unwrap().algebra().clone();
        let t = parse_term(n.signature(), "(if_nat (eq_nat 0 0) (S 0) 0)").unwrap();
        assert_eq!(n.eval_closed(&t).unwrap(), Value::nat(1));
        let t = parse_term(n.signature(), "(eq_nat (S 0) 0)").unwrap();
        assert_eq!(n.eval_closed(&t).unwrap(), Value::Bool(false));
    }

    #[test]
    fn embedding_of_interval() {
        let id = builtin("Id").unwrap().algebra().clone();
        let f = id.signature().sym("i_I").unwrap();
        let x = parse_value(&Sort::Intvl, "0.5", RealMode::Exact).unwrap();
        assert_eq!(id.apply(&f, &[x]).unwrap(), Value::Real(Real::ratio(1, 2, RealMode::Exact)));
    }
}
