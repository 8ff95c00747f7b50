use super::{eval_term, Algebra, Carrier, Env, Real, RealMode, Value};
use crate::error::{Error, Result};
use crate::syntax::{Atom, Formula, Sort};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

/// Bounds for random environments.
#[derive(Clone, Copy, Debug)]
pub struct SampleConfig {
    pub nat_max: u64,
    pub array_max: usize,
    pub real_bound: i64,
    /// Reals are drawn from the grid of multiples of 2^-grid_bits.
    pub grid_bits: u32,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { nat_max: 32, array_max: 8, real_bound: 4, grid_bits: 16 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    HoldsOnSample,
    Counterexample(Env),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::HoldsOnSample)
    }
}

fn grid(k: i64, bits: u32, mode: RealMode) -> Real {
    Real::ratio(k, 1i64 << bits, mode)
}

/// Draws one element of sort `s`.
pub fn sample_value(a: &Algebra, s: &Sort, rng: &mut SplitMix64, cfg: &SampleConfig) -> Result<Value> {
    let carrier = a.carrier(s).ok_or_else(|| Error::Eval(format!("sort {s} is not samplable")))?;
    let mode = a.real_mode;
    let scale = 1i64 << cfg.grid_bits;
    Ok(match carrier {
        Carrier::Booleans => Value::Bool(rng.gen()),
        Carrier::Naturals => Value::Nat(BigUint::from(rng.gen_range(0..=cfg.nat_max))),
        Carrier::Reals => Value::Real(grid(rng.gen_range(-cfg.real_bound * scale..=cfg.real_bound * scale), cfg.grid_bits, mode)),
        Carrier::Interval => Value::Intvl(grid(rng.gen_range(0..=scale), cfg.grid_bits, mode)),
        Carrier::Finite(v) => {
            if v.is_empty() {
                return Err(Error::Eval(format!("sort {s} has an empty carrier")));
            }
            v[rng.gen_range(0..v.len())].clone()
        }
        Carrier::Arrays(b) => {
            let n = rng.gen_range(0..=cfg.array_max);
            let items = (0..n).map(|_| sample_value(a, b, rng, cfg)).collect::<Result<Vec<_>>>()?;
            Value::Array(b.clone(), items)
        }
    })
}

/// Truth value of an atom under `env`.
pub fn eval_atom(a: &Algebra, env: &Env, at: &Atom) -> Result<bool> {
    match at {
        Atom::Eq(x, y) => Ok(eval_term(a, env, x)? == eval_term(a, env, y)?),
        Atom::Lt(x, y) => Ok(eval_term(a, env, x)?.as_real()?.lt(eval_term(a, env, y)?.as_real()?)),
        Atom::Bu { var, bound, body } => {
            let n = eval_term(a, env, bound)?.as_u64()?;
            if n > 1 << 24 {
                return Err(Error::Resource(format!("bounded quantifier range {n} too large")));
            }
            let mut e = env.clone();
            for z in 0..n {
                e.insert(var.clone(), Value::nat(z));
                if !eval_atom(a, &e, body)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Truth value of a conditional formula under `env`; antecedents short-circuit.
pub fn eval_formula(a: &Algebra, env: &Env, phi: &Formula) -> Result<bool> {
    for ant in &phi.antecedents {
        if !eval_atom(a, env, ant)? {
            return Ok(true);
        }
    }
    eval_atom(a, env, &phi.consequent)
}

/// Checks `phi` on `samples` random environments drawn from `seed`.
pub fn satisfies(a: &Algebra, phi: &Formula, samples: usize, seed: u64) -> Result<Verdict> {
    satisfies_with(a, phi, samples, seed, &SampleConfig::default())
}

pub fn satisfies_with(a: &Algebra, phi: &Formula, samples: usize, seed: u64, cfg: &SampleConfig) -> Result<Verdict> {
    let vars = phi.vars();
    let mut rng = SplitMix64::seed_from_u64(seed);
    let n = if vars.is_empty() { samples.min(1) } else { samples };
    for _ in 0..n {
        let mut env = Env::new();
        for v in &vars {
            env.insert(v.clone(), sample_value(a, &v.sort, &mut rng, cfg)?);
        }
        if !eval_formula(a, &env, phi)? {
            return Ok(Verdict::Counterexample(env));
        }
    }
    Ok(Verdict::HoldsOnSample)
}
