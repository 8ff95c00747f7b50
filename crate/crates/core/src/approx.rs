//! Approximation on metric algebras: exact dyadic reals, invexp, fast approximating
//! sequences and the conditional equations-and-inequalities specs built from them.

use crate::algebra::{distance, sample_value, Algebra, MetricAlgebra, OpFn, Real, RealMode, SampleConfig, Value};
use crate::error::{Error, Result};
use crate::interp::run;
use crate::schemes::{parse_derivation, Derivation};
use crate::spec::{compile_mupr_spec, compiled_algebra, Provenance, SpecSet};
use crate::syntax::{numeral, Atom, Formula, FuncSymbol, Signature, Sort, Sym, Term};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// mantissa · 2^exponent, with an odd mantissa (or zero with exponent 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicReal {
    mantissa: BigInt,
    exponent: i64,
}

impl DyadicReal {
    pub fn new(mantissa: BigInt, exponent: i64) -> DyadicReal {
        match mantissa.trailing_zeros() {
            None => DyadicReal { mantissa, exponent: 0 },
            Some(tz) => DyadicReal { mantissa: mantissa >> tz, exponent: exponent + tz as i64 },
        }
    }

    pub fn from_int(i: i64) -> DyadicReal {
        DyadicReal::new(BigInt::from(i), 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// Largest multiple of 2^-bits not above `r`.
    pub fn floor_of(r: &BigRational, bits: u32) -> DyadicReal {
        let scaled = r * BigRational::from_integer(BigInt::one() << bits);
        DyadicReal::new(scaled.floor().to_integer(), -(bits as i64))
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << self.exponent as u64)
        } else {
            BigRational::new(self.mantissa.clone(), BigInt::one() << (-self.exponent) as u64)
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    fn aligned(&self, o: &DyadicReal) -> (BigInt, BigInt, i64) {
        let e = self.exponent.min(o.exponent);
        (&self.mantissa << (self.exponent - e) as u64, &o.mantissa << (o.exponent - e) as u64, e)
    }

    pub fn add(&self, o: &DyadicReal) -> DyadicReal {
        let (a, b, e) = self.aligned(o);
        DyadicReal::new(a + b, e)
    }

    pub fn sub(&self, o: &DyadicReal) -> DyadicReal {
        let (a, b, e) = self.aligned(o);
        DyadicReal::new(a - b, e)
    }

    pub fn mul(&self, o: &DyadicReal) -> DyadicReal {
        DyadicReal::new(&self.mantissa * &o.mantissa, self.exponent + o.exponent)
    }

    pub fn neg(&self) -> DyadicReal {
        DyadicReal { mantissa: -&self.mantissa, exponent: self.exponent }
    }

    pub fn abs(&self) -> DyadicReal {
        DyadicReal { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    /// Exact division by 2^k.
    pub fn half_pow(&self, k: u64) -> DyadicReal {
        DyadicReal::new(self.mantissa.clone(), self.exponent - k as i64)
    }
}

impl PartialOrd for DyadicReal {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for DyadicReal {
    fn cmp(&self, o: &Self) -> Ordering {
        let (a, b, _) = self.aligned(o);
        a.cmp(&b)
    }
}

impl fmt::Display for DyadicReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rational())
    }
}

/// invexp(n) = 2^-n.
pub fn invexp(n: u64) -> DyadicReal {
    DyadicReal::new(BigInt::one(), -(n as i64))
}

/// Fractional bits of the reference evaluator.
pub const ORACLE_BITS: u32 = 128;

/// min { N : 3/(N+1)! < 2^-n }, the Maclaurin tail bound for e^x on [-1, 1].
pub fn exp_modulus(n: u64) -> u64 {
    let target = BigUint::from(3u32) << n;
    let mut fact = BigUint::one();
    let mut k = 0u64;
    loop {
        fact *= k + 1;
        if fact > target {
            return k;
        }
        k += 1;
    }
}

/// e^x to `bits` fractional bits (rounded down up to an error below 2^-bits).
pub fn exp_oracle(x: &BigRational, bits: u32) -> DyadicReal {
    let p = bits as u64 + 32;
    let mut x = x.clone();
    let mut halvings = 0u32;
    while x.abs() > BigRational::one() {
        x /= BigRational::from_integer(BigInt::from(2));
        halvings += 1;
    }
    let scale = BigInt::one() << p;
    let xf = (&x * BigRational::from_integer(scale.clone())).floor().to_integer();
    let n = exp_modulus(p + 2);
    let mut term = scale.clone();
    let mut sum = scale.clone();
    for i in 1..=n {
        term = (&term * &xf) >> p;
        term /= BigInt::from(i);
        sum += &term;
    }
    for _ in 0..halvings {
        sum = (&sum * &sum) >> p;
    }
    DyadicReal::new(sum >> (p - bits as u64), -(bits as i64))
}

fn exact_real(v: &Value) -> Value {
    match v {
        Value::Real(r) => Value::Real(Real::Exact(r.to_rational())),
        Value::Intvl(r) => Value::Intvl(Real::Exact(r.to_rational())),
        other => other.clone(),
    }
}

fn real_arg(v: &Value) -> Result<BigRational> {
    match v {
        Value::Real(r) | Value::Intvl(r) => Ok(r.to_rational()),
        _ => Err(Error::Eval(format!("expected a real argument, got {v}"))),
    }
}

pub type Oracle = Arc<dyn Fn(&[Value]) -> Result<Value> + Send + Sync>;

/// The 128-bit reference evaluator for e^x, as an exact real value.
pub fn exp_reference() -> Oracle {
    Arc::new(|x: &[Value]| Ok(Value::Real(Real::Exact(exp_oracle(&real_arg(&x[0])?, ORACLE_BITS).to_rational()))))
}

type SeqFn = Arc<dyn Fn(u64, &[Value]) -> Result<Value> + Send + Sync>;

/// n ↦ G_n, with G_n : u → s.
#[derive(Clone)]
pub struct ApproxSequence {
    pub name: String,
    pub domain: Vec<Sort>,
    pub range: Sort,
    eval: SeqFn,
}

impl fmt::Debug for ApproxSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ApproxSequence({})", self.name)
    }
}

impl ApproxSequence {
    pub fn new(name: &str, domain: Vec<Sort>, range: Sort, eval: impl Fn(u64, &[Value]) -> Result<Value> + Send + Sync + 'static) -> ApproxSequence {
        ApproxSequence { name: name.into(), domain, range, eval: Arc::new(eval) }
    }

    /// The sequence computed by a derivation of type nat × u → s.
    pub fn from_derivation(d: &Derivation, a: &Algebra, fuel: u64) -> Result<ApproxSequence> {
        let (dom, range) = d.result_type();
        if dom.first() != Some(&Sort::Nat) {
            return Err(Error::Spec(format!("approximating derivation {} must have type nat × u → s", d.name)));
        }
        let (d2, a2) = (Arc::new(d.clone()), Arc::new(a.clone()));
        Ok(ApproxSequence::new(&d.name, dom[1..].to_vec(), range.clone(), move |n, x| {
            let mut args = vec![Value::nat(n)];
            args.extend_from_slice(x);
            run(&d2, &a2, &args, fuel)
        }))
    }

    /// G_n = c for all n.
    pub fn constant(domain: Vec<Sort>, range: Sort, c: Value) -> ApproxSequence {
        ApproxSequence::new("constant", domain, range, move |_, _| Ok(c.clone()))
    }

    /// G_n = a for even n and b for odd n.
    pub fn alternating(domain: Vec<Sort>, range: Sort, a: Value, b: Value) -> ApproxSequence {
        ApproxSequence::new("alternating", domain, range, move |n, _| Ok(if n % 2 == 0 { a.clone() } else { b.clone() }))
    }

    pub fn eval(&self, n: u64, x: &[Value]) -> Result<Value> {
        (self.eval)(n, x)
    }
}

/// n ↦ G_{g(n)}.
pub fn modulus_to_fast(seq: &ApproxSequence, g: impl Fn(u64) -> u64 + Send + Sync + 'static) -> ApproxSequence {
    let inner = seq.clone();
    ApproxSequence::new(&format!("{}∘g", seq.name), seq.domain.clone(), seq.range.clone(), move |n, x| inner.eval(g(n), x))
}

/// Points of the domain drawn on the 2^-16 grid (nat components up to 32).
pub fn grid_samples(a: &Algebra, domain: &[Sort], count: usize, seed: u64) -> Result<Vec<Vec<Value>>> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let cfg = SampleConfig::default();
    (0..count).map(|_| domain.iter().map(|s| sample_value(a, s, &mut rng, &cfg)).collect()).collect()
}

#[derive(Clone, Copy, Debug)]
pub struct FastConfig {
    pub n_max: u64,
    /// Bounds are shrunk by the factor 1 - 2^-guard_bits; None compares against 2^-n itself.
    pub guard_bits: Option<u32>,
}

impl Default for FastConfig {
    fn default() -> Self {
        FastConfig { n_max: 20, guard_bits: Some(20) }
    }
}

fn guarded(bound: BigRational, guard: Option<u32>) -> BigRational {
    match guard {
        Some(g) => &bound - &bound * invexp(g as u64).to_rational(),
        None => bound,
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Violation {
    pub n: u64,
    pub m: Option<u64>,
    pub x: Vec<String>,
    pub d: String,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ApproxReport {
    pub pass: bool,
    pub checked: usize,
    /// Largest d · 2^n seen (d · 2^min(m,n) for Cauchy checks).
    pub max_scaled: f64,
    pub violation: Option<Violation>,
}

fn dist(m: &MetricAlgebra, s: &Sort, a: &Value, b: &Value) -> Result<BigRational> {
    Ok(distance(m, s, &exact_real(a), &exact_real(b))?.as_real()?.to_rational())
}

fn show(x: &[Value]) -> Vec<String> {
    x.iter().map(|v| v.to_string()).collect()
}

/// Checks d(G_n(x), f(x)) < 2^-n for n ≤ n_max on every sample.
pub fn check_fast_approx(seq: &ApproxSequence, oracle: &Oracle, m: &MetricAlgebra, samples: &[Vec<Value>], cfg: &FastConfig) -> Result<ApproxReport> {
    let mut rep = ApproxReport { pass: true, checked: 0, max_scaled: 0.0, violation: None };
    let targets = samples.iter().map(|x| oracle(x)).collect::<Result<Vec<_>>>()?;
    for n in 0..=cfg.n_max {
        let bound = guarded(invexp(n).to_rational(), cfg.guard_bits);
        for (x, fx) in samples.iter().zip(&targets) {
            let d = dist(m, &seq.range, &seq.eval(n, x)?, fx)?;
            rep.checked += 1;
            let scaled = (&d * BigRational::from_integer(BigInt::one() << n)).to_f64().unwrap_or(f64::INFINITY);
            rep.max_scaled = rep.max_scaled.max(scaled);
            if d >= bound {
                rep.pass = false;
                rep.violation = Some(Violation { n, m: None, x: show(x), d: d.to_string() });
                return Ok(rep);
            }
        }
    }
    Ok(rep)
}

/// Necessary condition for a common limit: d(G_m(x), G_n(x)) < 2^-m + 2^-n for m, n ≤ n_max.
pub fn verify_cauchy_uniqueness(seq: &ApproxSequence, m: &MetricAlgebra, samples: &[Vec<Value>], n_max: u64, guard_bits: Option<u32>) -> Result<ApproxReport> {
    let mut rep = ApproxReport { pass: true, checked: 0, max_scaled: 0.0, violation: None };
    for x in samples {
        let vals = (0..=n_max).map(|n| seq.eval(n, x)).collect::<Result<Vec<_>>>()?;
        for i in 0..=n_max {
            for j in i..=n_max {
                let d = dist(m, &seq.range, &vals[i as usize], &vals[j as usize])?;
                let bound = guarded(invexp(i).to_rational() + invexp(j).to_rational(), guard_bits);
                rep.checked += 1;
                let scaled = (&d * BigRational::from_integer(BigInt::one() << i)).to_f64().unwrap_or(f64::INFINITY);
                rep.max_scaled = rep.max_scaled.max(scaled);
                if d >= bound {
                    rep.pass = false;
                    rep.violation = Some(Violation { n: j, m: Some(i), x: show(x), d: d.to_string() });
                    return Ok(rep);
                }
            }
        }
    }
    Ok(rep)
}

/// invexp(n) as an operation on the algebra's reals.
pub fn invexp_op(mode: RealMode) -> OpFn {
    Arc::new(move |a: &[Value]| {
        let n = a[0].as_u64()?;
        Ok(Value::Real(match mode {
            RealMode::Exact => Real::Exact(invexp(n).to_rational()),
            RealMode::Float => Real::Float(2f64.powi(-(n.min(2000) as i32))),
        }))
    })
}

/// invexp(0) = 1 and invexp(S n) = div_N(invexp(n), 2), over a signature holding `invexp`.
pub fn invexp_equations(sig: &Signature) -> Result<Vec<Formula>> {
    let inv = sig.sym("invexp")?;
    let div = sig.sym("div_N").map_err(|_| Error::Spec("invexp needs div_N in the signature".into()))?;
    let one = Term::constant(&sig.sym("one_r")?);
    let n = Term::var("n", Sort::Nat);
    let s = sig.sym("S")?;
    Ok(vec![
        Formula::eq(Term::app(&inv, vec![numeral(0)]), one),
        Formula::eq(Term::app(&inv, vec![Term::app(&s, vec![n.clone()])]), Term::app(&div, vec![Term::app(&inv, vec![n]), numeral(2)])),
    ])
}

/// Adds invexp : nat → real to a signature.
pub fn with_invexp(sig: &Signature) -> Result<Signature> {
    let mut s = sig.clone();
    if s.func("invexp").is_none() {
        s.add_func(FuncSymbol::new("invexp", vec![Sort::Nat], Sort::Real))?;
    }
    Ok(s)
}

/// Name of the specified function's symbol in an approximation spec.
pub fn limit_symbol(d: &Derivation) -> String {
    format!("f_{}", d.name)
}

/// F_γ + E_invexp + { d_s(G(n, x), f(x)) < invexp(n) }.
pub fn compile_approx_spec(gamma: &Derivation) -> Result<SpecSet> {
    let (dom, range) = gamma.result_type();
    if dom.first() != Some(&Sort::Nat) {
        return Err(Error::Spec(format!("approximating derivation {} must have type nat × u → s", gamma.name)));
    }
    let dname = format!("d_{range}");
    if gamma.signature.func(&dname).is_none() {
        return Err(Error::Spec(format!("metric required for inequality axioms (no {dname} in the signature)")));
    }
    let base = compile_mupr_spec(gamma)?;
    let mut sig = with_invexp(&base.signature)?;
    let fname = limit_symbol(gamma);
    sig.add_func(FuncSymbol::new(&fname, dom[1..].to_vec(), range.clone()))?;
    let mut spec = SpecSet { signature: sig.clone(), axioms: base.axioms.clone(), introduced: base.introduced.clone(), target: base.target.clone() };
    spec.introduced.insert("invexp".into());
    for eq in invexp_equations(&sig)? {
        spec.push(eq, Provenance::Invexp);
    }
    let g = base.target.clone().ok_or_else(|| Error::Spec("compiled spec has no target".into()))?;
    let f: Sym = sig.sym(&fname)?;
    let n = Term::var("n", Sort::Nat);
    let xs: Vec<Term> = dom[1..].iter().enumerate().map(|(i, s)| Term::var(&format!("x{i}"), s.clone())).collect();
    let mut gargs = vec![n.clone()];
    gargs.extend(xs.iter().cloned());
    let lhs = Term::app(&sig.sym(&dname)?, vec![Term::app(&g, gargs), Term::app(&f, xs)]);
    let rhs = Term::app(&sig.sym("invexp")?, vec![n]);
    spec.push(Formula::atom(Atom::Lt(lhs, rhs)), Provenance::Approx);
    spec.check()?;
    Ok(spec)
}

/// The algebra for an approximation spec: γ's compiled functions, invexp, and f by `oracle`.
pub fn approx_algebra(gamma: &Derivation, a: &Algebra, spec: &SpecSet, oracle: Oracle, fuel: u64) -> Result<Algebra> {
    let base = compile_mupr_spec(gamma)?;
    let c = compiled_algebra(gamma, a, &base, fuel)?;
    let mode = a.real_mode;
    let f: OpFn = Arc::new(move |x: &[Value]| {
        let v = oracle(x)?;
        Ok(match (mode, v) {
            (RealMode::Float, Value::Real(r)) => Value::Real(Real::Float(r.to_f64())),
            (_, v) => v,
        })
    });
    c.expand(&format!("{}+approx", c.name), spec.signature.clone(), vec![], vec![("invexp".into(), invexp_op(mode)), (limit_symbol(gamma).into(), f)])
}

/// Maclaurin partial sums P(N, x) = Σ_{i ≤ N} x^i / i! over Id.
pub const MACLAURIN_EXP: &str = "(derivation maclaurin ((nat intvl) real)
  (entry oner (const one_r (intvl)))
  (entry succ (prim S))
  (entry ix (prim i_I))
  (entry mul (prim mul_r))
  (entry addr (prim add_r))
  (entry divn (prim div_N))
  (entry hn (proj (nat intvl real real) 0))
  (entry hx (proj (nat intvl real real) 1))
  (entry ht (proj (nat intvl real real) 2))
  (entry hs (proj (nat intvl real real) 3))
  (entry hxr (comp ix (hx)))
  (entry tx (comp mul (ht hxr)))
  (entry hsn (comp succ (hn)))
  (entry tnext (comp divn (tx hsn)))
  (entry snext (comp addr (hs tnext)))
  (entry maclaurin (primrec 2 (oner oner) (tnext snext) 1)))";

/// G(n, x) = P(n + 2, x), fast since 3/(n+3)! < 2^-n.
pub const EXP_APPROX: &str = "(derivation expapprox ((nat intvl) real)
  (entry oner (const one_r (intvl)))
  (entry succ (prim S))
  (entry ix (prim i_I))
  (entry mul (prim mul_r))
  (entry addr (prim add_r))
  (entry divn (prim div_N))
  (entry hn (proj (nat intvl real real) 0))
  (entry hx (proj (nat intvl real real) 1))
  (entry ht (proj (nat intvl real real) 2))
  (entry hs (proj (nat intvl real real) 3))
  (entry hxr (comp ix (hx)))
  (entry tx (comp mul (ht hxr)))
  (entry hsn (comp succ (hn)))
  (entry tnext (comp divn (tx hsn)))
  (entry snext (comp addr (hs tnext)))
  (entry psum (primrec 2 (oner oner) (tnext snext) 1))
  (entry p0 (proj (nat intvl) 0))
  (entry p1 (proj (nat intvl) 1))
  (entry s1 (comp succ (p0)))
  (entry s2 (comp succ (s1)))
  (entry expapprox (comp psum (s2 p1))))";

pub fn maclaurin_derivation(id: &Algebra) -> Result<Derivation> {
    parse_derivation(id.signature(), MACLAURIN_EXP)
}

pub fn exp_derivation(id: &Algebra) -> Result<Derivation> {
    parse_derivation(id.signature(), EXP_APPROX)
}

/// Sequence for e^x: the Maclaurin sums composed with the factorial-tail modulus.
pub fn exp_fast_sequence(id: &Algebra, fuel: u64) -> Result<ApproxSequence> {
    let mac = ApproxSequence::from_derivation(&maclaurin_derivation(id)?, id, fuel)?;
    Ok(modulus_to_fast(&mac, exp_modulus))
}

/// True when |a - b| ≤ tol·|b|.
pub fn within_relative(a: &BigRational, b: &BigRational, tol: f64) -> bool {
    let tol = BigRational::from_float(tol).unwrap_or_else(BigRational::zero);
    (a - b).abs() <= tol * b.abs()
}
