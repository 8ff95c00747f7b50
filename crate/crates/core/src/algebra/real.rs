use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

/// How an algebra represents reals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum RealMode {
    #[default]
    Exact,
    Float,
}

/// A real number, either exact rational or binary64.
#[derive(Clone, Debug)]
pub enum Real {
    Exact(BigRational),
    Float(f64),
}

fn norm(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

impl Real {
    pub fn from_int(i: i64, mode: RealMode) -> Real {
        match mode {
            RealMode::Exact => Real::Exact(BigRational::from_integer(BigInt::from(i))),
            RealMode::Float => Real::Float(i as f64),
        }
    }

    pub fn ratio(p: i64, q: i64, mode: RealMode) -> Real {
        match mode {
            RealMode::Exact => Real::Exact(BigRational::new(p.into(), q.into())),
            RealMode::Float => Real::Float(p as f64 / q as f64),
        }
    }

    pub fn from_f64(x: f64, mode: RealMode) -> Real {
        match mode {
            RealMode::Exact => Real::Exact(BigRational::from_float(x).unwrap_or_default()),
            RealMode::Float => Real::Float(norm(x)),
        }
    }

    pub fn mode(&self) -> RealMode {
        match self {
            Real::Exact(_) => RealMode::Exact,
            Real::Float(_) => RealMode::Float,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Real::Float(x) => *x,
        }
    }

    /// Exact rational value; floats convert exactly.
    pub fn to_rational(&self) -> BigRational {
        match self {
            Real::Exact(r) => r.clone(),
            Real::Float(x) => BigRational::from_float(*x).unwrap_or_default(),
        }
    }

    fn bin(&self, o: &Real, e: impl Fn(&BigRational, &BigRational) -> BigRational, f: impl Fn(f64, f64) -> f64) -> Real {
        match (self, o) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(e(a, b)),
            _ => Real::Float(norm(f(self.to_f64(), o.to_f64()))),
        }
    }

    pub fn add(&self, o: &Real) -> Real {
        self.bin(o, |a, b| a + b, |a, b| a + b)
    }

    pub fn sub(&self, o: &Real) -> Real {
        self.bin(o, |a, b| a - b, |a, b| a - b)
    }

    pub fn mul(&self, o: &Real) -> Real {
        self.bin(o, |a, b| a * b, |a, b| a * b)
    }

    pub fn neg(&self) -> Real {
        match self {
            Real::Exact(a) => Real::Exact(-a),
            Real::Float(x) => Real::Float(norm(-x)),
        }
    }

    pub fn abs(&self) -> Real {
        match self {
            Real::Exact(a) => Real::Exact(a.abs()),
            Real::Float(x) => Real::Float(x.abs()),
        }
    }

    /// Division by a natural number, with division by zero giving zero.
    pub fn div_nat(&self, n: &BigUint) -> Real {
        if n.is_zero() {
            return match self {
                Real::Exact(_) => Real::Exact(BigRational::zero()),
                Real::Float(_) => Real::Float(0.0),
            };
        }
        match self {
            Real::Exact(a) => Real::Exact(a / BigRational::from_integer(BigInt::from(n.clone()))),
            Real::Float(x) => Real::Float(norm(x / n.to_f64().unwrap_or(f64::INFINITY))),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Real::Exact(a) => a.is_zero(),
            Real::Float(x) => *x == 0.0,
        }
    }

    pub fn cmp_num(&self, o: &Real) -> Ordering {
        match (self, o) {
            (Real::Exact(a), Real::Exact(b)) => a.cmp(b),
            _ => self.to_rational().cmp(&o.to_rational()),
        }
    }

    pub fn lt(&self, o: &Real) -> bool {
        self.cmp_num(o) == Ordering::Less
    }
}

impl PartialEq for Real {
    fn eq(&self, o: &Self) -> bool {
        match (self, o) {
            (Real::Exact(a), Real::Exact(b)) => a == b,
            (Real::Float(a), Real::Float(b)) => norm(*a).to_bits() == norm(*b).to_bits(),
            _ => false,
        }
    }
}

impl Eq for Real {}

impl Hash for Real {
    fn hash<H: Hasher>(&self, h: &mut H) {
        match self {
            Real::Exact(a) => {
                0u8.hash(h);
                a.hash(h)
            }
            Real::Float(x) => {
                1u8.hash(h);
                norm(*x).to_bits().hash(h)
            }
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Real::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Real::Float(x) => write!(f, "{x:?}"),
        }
    }
}

/// Parses `3`, `-1/4`, `0.25` or `1e-3` into a real of the given mode.
pub fn parse_real(s: &str, mode: RealMode) -> Option<Real> {
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.parse().ok()?;
        let q: BigInt = q.parse().ok()?;
        if q.is_zero() {
            return None;
        }
        let r = BigRational::new(p, q);
        return Some(match mode {
            RealMode::Exact => Real::Exact(r),
            RealMode::Float => Real::Float(r.to_f64()?),
        });
    }
    if let Ok(i) = s.parse::<BigInt>() {
        return Some(match mode {
            RealMode::Exact => Real::Exact(BigRational::from_integer(i)),
            RealMode::Float => Real::Float(i.to_f64()?),
        });
    }
    if mode == RealMode::Exact && !s.contains(['e', 'E']) {
        if let Some((a, b)) = s.split_once('.') {
            let neg = a.starts_with('-');
            let whole: BigInt = if a.is_empty() || a == "-" { BigInt::zero() } else { a.parse().ok()? };
            if !b.chars().all(|c| c.is_ascii_digit()) {
                return None;
            }
            let frac: BigInt = if b.is_empty() { BigInt::zero() } else { b.parse().ok()? };
            let den = num_traits::pow(BigInt::from(10), b.len());
            let mut r = BigRational::from_integer(whole.abs()) + BigRational::new(frac, den);
            if neg {
                r = -r;
            }
            return Some(Real::Exact(r));
        }
    }
    let x: f64 = s.parse().ok()?;
    Some(Real::from_f64(x, mode))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let m = RealMode::Exact;
        assert_eq!(parse_real("0.25", m), Some(Real::ratio(1, 4, m)));
        assert_eq!(parse_real("-1.5", m), Some(Real::ratio(-3, 2, m)));
        assert_eq!(parse_real("-1/4", m).unwrap().to_string(), "-1/4");
        assert_eq!(parse_real("1.5", RealMode::Float), Some(Real::Float(1.5)));
    }

    #[test]
    fn div_by_zero_is_zero() {
        let x = Real::from_int(1, RealMode::Float);
        assert_eq!(x.div_nat(&BigUint::zero()), Real::Float(0.0));
    }
}
