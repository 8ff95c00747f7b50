use super::{Algebra, Real, RealMode, Value};
use crate::error::{Error, Result};
use crate::syntax::Sort;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricRule {
    /// 0 on equal arguments, 1 otherwise.
    Discrete,
    /// |x - y| on reals.
    AbsDiff,
}

impl MetricRule {
    pub fn apply(&self, a: &Value, b: &Value, mode: RealMode) -> Result<Value> {
        Ok(Value::Real(match self {
            MetricRule::Discrete => Real::from_int(if a == b { 0 } else { 1 }, mode),
            MetricRule::AbsDiff => a.as_real()?.sub(b.as_real()?).abs(),
        }))
    }
}

/// An algebra with a metric on some carriers.
#[derive(Clone, Debug)]
pub struct MetricAlgebra {
    pub base: Algebra,
    pub metrics: BTreeMap<Sort, MetricRule>,
}

/// d_s(v1, v2).
pub fn distance(m: &MetricAlgebra, s: &Sort, v1: &Value, v2: &Value) -> Result<Value> {
    let rule = m.metrics.get(s).ok_or_else(|| Error::Eval(format!("sort {s} has no metric")))?;
    if !v1.has_sort(s) || !v2.has_sort(s) {
        return Err(Error::Eval(format!("distance arguments are not of sort {s}")));
    }
    rule.apply(v1, v2, m.base.real_mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtin;

    #[test]
    fn discrete_and_absolute() {
        let rd = builtin("Rd").unwrap();
        let m = rd.metric().unwrap();
        let d = |s: &Sort, a, b| distance(m, s, &a, &b).unwrap().to_string();
        assert_eq!(d(&Sort::Nat, Value::nat(3), Value::nat(3)), "0");
        assert_eq!(d(&Sort::Nat, Value::nat(3), Value::nat(5)), "1");
        let r = |x: &str| Value::Real(crate::algebra::parse_real(x, RealMode::Exact).unwrap());
        assert_eq!(d(&Sort::Real, r("1.5"), r("0.25")), "5/4");
        assert!(distance(m, &Sort::Bool.star(), &r("1"), &r("1")).is_err());
    }
}
