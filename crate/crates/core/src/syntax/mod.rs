//! Sorts, function symbols, terms and formulas.

pub(crate) mod parse;
mod signature;

pub use parse::{parse_formula, parse_signature, parse_sort, parse_term, print_signature};
pub use signature::{check_strict_n_standard, n_standardize, star_signature, Signature};

use crate::error::{Error, Result};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Sort {
    Bool,
    Nat,
    Real,
    Intvl,
    User(Arc<str>),
    Star(Arc<Sort>),
}

impl Sort {
    pub fn user(name: &str) -> Sort {
        Sort::User(name.into())
    }

    pub fn star(&self) -> Sort {
        Sort::Star(Arc::new(self.clone()))
    }

    pub fn is_star(&self) -> bool {
        matches!(self, Sort::Star(_))
    }

    /// Base sort of a starred sort.
    pub fn base(&self) -> Option<&Sort> {
        match self {
            Sort::Star(b) => Some(b),
            _ => None,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => write!(f, "bool"),
            Sort::Nat => write!(f, "nat"),
            Sort::Real => write!(f, "real"),
            Sort::Intvl => write!(f, "intvl"),
            Sort::User(n) => write!(f, "{n}"),
            Sort::Star(b) => write!(f, "{b}*"),
        }
    }
}

/// Reads a sort name without consulting a signature.
pub fn sort_from_name(name: &str) -> Option<Sort> {
    if let Some(base) = name.strip_suffix('*') {
        return sort_from_name(base).map(|b| b.star());
    }
    Some(match name {
        "bool" => Sort::Bool,
        "nat" => Sort::Nat,
        "real" => Sort::Real,
        "intvl" => Sort::Intvl,
        n if is_ident(n) => Sort::user(n),
        _ => return None,
    })
}

pub fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    match cs.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FuncSymbol {
    pub name: Arc<str>,
    pub domain: Vec<Sort>,
    pub range: Sort,
}

pub type Sym = Arc<FuncSymbol>;

impl FuncSymbol {
    pub fn new(name: &str, domain: Vec<Sort>, range: Sort) -> Sym {
        Arc::new(FuncSymbol { name: name.into(), domain, range })
    }

    pub fn arity(&self) -> usize {
        self.domain.len()
    }

    pub fn is_const(&self) -> bool {
        self.domain.is_empty()
    }
}

impl fmt::Display for FuncSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: (", self.name)?;
        for (i, s) in self.domain.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ") -> {}", self.range)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var {
    pub name: Arc<str>,
    pub sort: Sort,
}

impl Var {
    pub fn new(name: &str, sort: Sort) -> Var {
        Var { name: name.into(), sort }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.sort)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(Var),
    App(Sym, Vec<Term>),
}

impl Term {
    pub fn var(name: &str, sort: Sort) -> Term {
        Term::Var(Var::new(name, sort))
    }

    pub fn app(f: &Sym, args: Vec<Term>) -> Term {
        Term::App(f.clone(), args)
    }

    pub fn constant(f: &Sym) -> Term {
        Term::App(f.clone(), Vec::new())
    }

    /// Sort of a term, assuming it is well typed.
    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(v) => v.sort.clone(),
            Term::App(f, _) => f.range.clone(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, a) => 1 + a.iter().map(|t| t.depth()).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, a) => 1 + a.iter().map(|t| t.size()).sum::<usize>(),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, a) => a.iter().all(|t| t.is_closed()),
        }
    }

    pub fn head(&self) -> Option<&Sym> {
        match self {
            Term::App(f, _) => Some(f),
            _ => None,
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone())
                }
            }
            Term::App(_, a) => a.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    /// Free variables in order of first occurrence.
    pub fn vars(&self) -> Vec<Var> {
        let mut v = Vec::new();
        self.collect_vars(&mut v);
        v
    }

    pub fn symbols(&self, out: &mut BTreeSet<Arc<str>>) {
        if let Term::App(f, a) = self {
            out.insert(f.name.clone());
            a.iter().for_each(|t| t.symbols(out));
        }
    }

    pub fn subst(&self, map: &dyn Fn(&Var) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => map(v).unwrap_or_else(|| self.clone()),
            Term::App(f, a) => Term::App(f.clone(), a.iter().map(|t| t.subst(map)).collect()),
        }
    }

    pub fn subst_var(&self, x: &Var, by: &Term) -> Term {
        self.subst(&|v| (v == x).then(|| by.clone()))
    }

    /// `Some(n)` when the term is `S^n(0)`.
    pub fn as_numeral(&self) -> Option<u64> {
        let mut t = self;
        let mut n = 0u64;
        loop {
            match t {
                Term::App(f, a) if &*f.name == "0" && a.is_empty() && f.range == Sort::Nat => return Some(n),
                Term::App(f, a) if &*f.name == "S" && a.len() == 1 && f.range == Sort::Nat => {
                    n += 1;
                    t = &a[0];
                }
                _ => return None,
            }
        }
    }
}

/// The numeral `S^n(0)`.
pub fn numeral(n: u64) -> Term {
    let mut t = Term::constant(&FuncSymbol::new("0", vec![], Sort::Nat));
    let s = FuncSymbol::new("S", vec![Sort::Nat], Sort::Nat);
    for _ in 0..n {
        t = Term::App(s.clone(), vec![t]);
    }
    t
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = self.as_numeral() {
            return if n == 0 { write!(f, "0") } else { write!(f, "#{n}") };
        }
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(s, a) if a.is_empty() => write!(f, "{}", s.name),
            Term::App(s, a) => {
                write!(f, "({}", s.name)?;
                for t in a {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Atomic formula shapes.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Atom {
    Eq(Term, Term),
    /// Bounded universal `forall var < bound [body]`.
    Bu { var: Var, bound: Term, body: Box<Atom> },
    /// Strict inequality between real terms.
    Lt(Term, Term),
}

impl Atom {
    pub fn eq(a: Term, b: Term) -> Atom {
        Atom::Eq(a, b)
    }

    pub fn bu(var: Var, bound: Term, body: Atom) -> Atom {
        Atom::Bu { var, bound, body: Box::new(body) }
    }

    /// Free variables in order of first occurrence.
    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Atom::Eq(a, b) | Atom::Lt(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Atom::Bu { var, bound, body } => {
                bound.collect_vars(out);
                let mut inner = Vec::new();
                body.collect_vars(&mut inner);
                for v in inner {
                    if &v != var && !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
        }
    }

    pub fn subst(&self, map: &dyn Fn(&Var) -> Option<Term>) -> Atom {
        match self {
            Atom::Eq(a, b) => Atom::Eq(a.subst(map), b.subst(map)),
            Atom::Lt(a, b) => Atom::Lt(a.subst(map), b.subst(map)),
            Atom::Bu { var, bound, body } => {
                let v = var.clone();
                let inner = move |x: &Var| if *x == v { None } else { map(x) };
                Atom::Bu { var: var.clone(), bound: bound.subst(map), body: Box::new(body.subst(&inner)) }
            }
        }
    }

    pub fn bu_count(&self) -> usize {
        match self {
            Atom::Bu { body, .. } => 1 + body.bu_count(),
            _ => 0,
        }
    }

    pub fn symbols(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Atom::Eq(a, b) | Atom::Lt(a, b) => {
                a.symbols(out);
                b.symbols(out);
            }
            Atom::Bu { bound, body, .. } => {
                bound.symbols(out);
                body.symbols(out);
            }
        }
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Eq(a, b) | Atom::Lt(a, b) => vec![a, b],
            Atom::Bu { bound, body, .. } => {
                let mut v = vec![bound];
                v.extend(body.terms());
                v
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Eq(a, b) => write!(f, "(= {a} {b})"),
            Atom::Lt(a, b) => write!(f, "(< {a} {b})"),
            Atom::Bu { var, bound, body } => write!(f, "(forall-lt {var} {bound} {body})"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Formula {
    pub antecedents: Vec<Atom>,
    pub consequent: Atom,
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula { antecedents: Vec::new(), consequent: a }
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::atom(Atom::Eq(a, b))
    }

    pub fn cond(antecedents: Vec<Atom>, consequent: Atom) -> Formula {
        Formula { antecedents, consequent }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut v = Vec::new();
        for a in &self.antecedents {
            a.collect_vars(&mut v);
        }
        self.consequent.collect_vars(&mut v);
        v
    }

    pub fn is_closed(&self) -> bool {
        self.vars().is_empty()
    }

    pub fn subst(&self, map: &dyn Fn(&Var) -> Option<Term>) -> Formula {
        Formula {
            antecedents: self.antecedents.iter().map(|a| a.subst(map)).collect(),
            consequent: self.consequent.subst(map),
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.antecedents.iter().chain(std::iter::once(&self.consequent))
    }

    pub fn bu_count(&self) -> usize {
        self.atoms().map(|a| a.bu_count()).sum()
    }

    pub fn has_inequality(&self) -> bool {
        fn lt(a: &Atom) -> bool {
            match a {
                Atom::Lt(..) => true,
                Atom::Bu { body, .. } => lt(body),
                _ => false,
            }
        }
        self.atoms().any(lt)
    }

    pub fn symbols(&self) -> BTreeSet<Arc<str>> {
        let mut s = BTreeSet::new();
        self.atoms().for_each(|a| a.symbols(&mut s));
        s
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.antecedents.is_empty() {
            return write!(f, "{}", self.consequent);
        }
        write!(f, "(=> (")?;
        for (i, a) in self.antecedents.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ") {})", self.consequent)
    }
}

/// Sort of `t` against `sig`, checking every symbol and argument.
pub fn typecheck_term(sig: &Signature, t: &Term) -> Result<Sort> {
    match t {
        Term::Var(v) => {
            if !sig.has_sort(&v.sort) {
                return Err(Error::Type(format!("variable {v} has unknown sort")));
            }
            Ok(v.sort.clone())
        }
        Term::App(f, args) => {
            let g = sig.func(&f.name).ok_or_else(|| Error::Type(format!("unknown symbol {}", f.name)))?;
            if **g != **f {
                return Err(Error::Type(format!("symbol {} used at type {} but declared {}", f.name, f, g)));
            }
            if args.len() != f.arity() {
                return Err(Error::Type(format!("arity mismatch for {}: expected {}, got {}", f.name, f.arity(), args.len())));
            }
            for (i, (a, s)) in args.iter().zip(&f.domain).enumerate() {
                let got = typecheck_term(sig, a)?;
                if &got != s {
                    return Err(Error::Type(format!("sort mismatch in argument {} of {}: expected {s}, got {got}", i + 1, f.name)));
                }
            }
            Ok(f.range.clone())
        }
    }
}

/// Checks every atom of a formula against `sig`.
pub fn typecheck_formula(sig: &Signature, phi: &Formula) -> Result<()> {
    fn atom(sig: &Signature, a: &Atom) -> Result<()> {
        match a {
            Atom::Eq(x, y) => {
                let (s, t) = (typecheck_term(sig, x)?, typecheck_term(sig, y)?);
                if s != t {
                    return Err(Error::Type(format!("equation sides have sorts {s} and {t}")));
                }
            }
            Atom::Lt(x, y) => {
                for t in [x, y] {
                    let s = typecheck_term(sig, t)?;
                    if s != Sort::Real {
                        return Err(Error::Type(format!("inequality side {t} has sort {s}, expected real")));
                    }
                }
            }
            Atom::Bu { var, bound, body } => {
                if var.sort != Sort::Nat {
                    return Err(Error::Type(format!("bounded variable {var} must have sort nat")));
                }
                if typecheck_term(sig, bound)? != Sort::Nat {
                    return Err(Error::Type(format!("bound {bound} must have sort nat")));
                }
                if matches!(**body, Atom::Lt(..)) {
                    return Err(Error::Type("bounded quantifier over an inequality".into()));
                }
                atom(sig, body)?;
            }
        }
        Ok(())
    }
    phi.atoms().try_for_each(|a| atom(sig, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerals_print_with_sugar() {
        assert_eq!(numeral(0).to_string(), "0");
        assert_eq!(numeral(3).to_string(), "#3");
        assert_eq!(numeral(3).depth(), 4);
        assert_eq!(numeral(5).as_numeral(), Some(5));
    }

    #[test]
    fn sort_names() {
        assert_eq!(sort_from_name("bool*"), Some(Sort::Bool.star()));
        assert_eq!(Sort::Real.star().to_string(), "real*");
        assert_eq!(sort_from_name("1x"), None);
    }
}
