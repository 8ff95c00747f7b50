use super::{sort_from_name, typecheck_term, FuncSymbol, Sort, Sym, Term};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

/// A many-sorted signature with ordered sorts and symbols.
#[derive(Clone, Debug)]
pub struct Signature {
    pub name: String,
    sorts: Vec<Sort>,
    eq_sorts: Vec<Sort>,
    funcs: Vec<Sym>,
    index: HashMap<Arc<str>, usize>,
    defaults: BTreeMap<Sort, Term>,
    hidden_sorts: BTreeSet<Sort>,
    pub standard: bool,
    pub n_standard: bool,
}

impl PartialEq for Signature {
    fn eq(&self, o: &Self) -> bool {
        self.name == o.name
            && self.sorts == o.sorts
            && self.eq_sorts == o.eq_sorts
            && self.funcs == o.funcs
            && self.defaults == o.defaults
            && self.hidden_sorts == o.hidden_sorts
            && self.standard == o.standard
            && self.n_standard == o.n_standard
    }
}

/// Standard type of a reserved symbol name, if the name is reserved.
pub(crate) fn standard_type(name: &str) -> Option<(Vec<Sort>, Sort)> {
    use Sort::*;
    let t = match name {
        "true" | "false" => (vec![], Bool),
        "and" | "or" => (vec![Bool, Bool], Bool),
        "not" => (vec![Bool], Bool),
        "0" => (vec![], Nat),
        "S" => (vec![Nat], Nat),
        "less_nat" => (vec![Nat, Nat], Bool),
        _ => {
            let (pre, rest) = name.split_once('_')?;
            let s = sort_from_name(rest)?;
            match pre {
                "if" => (vec![Bool, s.clone(), s.clone()], s),
                "eq" => (vec![s.clone(), s], Bool),
                "Lgth" => (vec![s.star()], Nat),
                "Ap" => (vec![s.star(), Nat], s),
                "Null" => (vec![], s.star()),
                "Update" => (vec![s.star(), Nat, s.clone()], s.star()),
                "Newlength" => (vec![s.star(), Nat], s.star()),
                _ => return None,
            }
        }
    };
    Some(t)
}

pub(crate) fn std_sym(name: &str) -> Sym {
    let (d, r) = standard_type(name).expect("reserved name");
    FuncSymbol::new(name, d, r)
}

const BOOL_OPS: [&str; 5] = ["true", "false", "and", "or", "not"];
const NAT_OPS: [&str; 5] = ["0", "S", "if_nat", "eq_nat", "less_nat"];

impl Signature {
    pub fn new(name: &str) -> Signature {
        Signature {
            name: name.to_string(),
            sorts: Vec::new(),
            eq_sorts: Vec::new(),
            funcs: Vec::new(),
            index: HashMap::new(),
            defaults: BTreeMap::new(),
            hidden_sorts: BTreeSet::new(),
            standard: false,
            n_standard: false,
        }
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn eq_sorts(&self) -> &[Sort] {
        &self.eq_sorts
    }

    pub fn funcs(&self) -> &[Sym] {
        &self.funcs
    }

    pub fn hidden_sorts(&self) -> &BTreeSet<Sort> {
        &self.hidden_sorts
    }

    pub fn defaults(&self) -> &BTreeMap<Sort, Term> {
        &self.defaults
    }

    pub fn has_sort(&self, s: &Sort) -> bool {
        self.sorts.contains(s)
    }

    pub fn is_eq_sort(&self, s: &Sort) -> bool {
        self.eq_sorts.contains(s)
    }

    pub fn func(&self, name: &str) -> Option<&Sym> {
        self.index.get(name).map(|&i| &self.funcs[i])
    }

    pub fn func_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Looks a symbol up, failing with a type error.
    pub fn sym(&self, name: &str) -> Result<Sym> {
        self.func(name).cloned().ok_or_else(|| Error::Type(format!("unknown symbol {name}")))
    }

    pub fn add_sort(&mut self, s: Sort) -> Result<()> {
        if self.sorts.contains(&s) {
            return Err(Error::Signature(format!("duplicate sort {s}")));
        }
        if let Sort::Star(b) = &s {
            if b.is_star() {
                return Err(Error::Signature("already starred".into()));
            }
            if **b == Sort::Nat {
                return Err(Error::Signature("there is no sort nat*".into()));
            }
        }
        self.sorts.push(s);
        Ok(())
    }

    pub fn add_hidden_sort(&mut self, s: Sort) -> Result<()> {
        self.add_sort(s.clone())?;
        self.hidden_sorts.insert(s);
        Ok(())
    }

    pub(crate) fn mark_hidden(&mut self, s: Sort) {
        self.hidden_sorts.insert(s);
    }

    pub fn add_eq_sort(&mut self, s: Sort) -> Result<()> {
        if !self.has_sort(&s) {
            return Err(Error::Signature(format!("equality sort {s} is not a sort")));
        }
        if !self.eq_sorts.contains(&s) {
            self.eq_sorts.push(s);
        }
        Ok(())
    }

    /// Adds a symbol; reserved names must carry their standard type.
    pub fn add_func(&mut self, f: Sym) -> Result<()> {
        if let Some((d, r)) = standard_type(&f.name) {
            if f.domain != d || f.range != r {
                return Err(Error::Signature(format!("symbol {} collides with the reserved standard symbol of that name", f.name)));
            }
        }
        if self.index.contains_key(&f.name) {
            return Err(Error::Signature(format!("duplicate symbol {}", f.name)));
        }
        for s in f.domain.iter().chain(std::iter::once(&f.range)) {
            if !self.has_sort(s) {
                return Err(Error::Signature(format!("symbol {} uses unknown sort {s}", f.name)));
            }
        }
        self.index.insert(f.name.clone(), self.funcs.len());
        self.funcs.push(f);
        Ok(())
    }

    /// Adds a standard symbol unless already present; collisions are errors.
    fn ensure_std(&mut self, name: &str) -> Result<()> {
        match self.func(name) {
            Some(f) => {
                let (d, r) = standard_type(name).unwrap();
                if f.domain != d || f.range != r {
                    return Err(Error::Signature(format!("symbol {name} collides with the reserved standard symbol of that name")));
                }
                Ok(())
            }
            None => self.add_func(std_sym(name)),
        }
    }

    pub fn set_default(&mut self, s: Sort, t: Term) -> Result<()> {
        if !self.has_sort(&s) {
            return Err(Error::Signature(format!("default for unknown sort {s}")));
        }
        if !t.is_closed() {
            return Err(Error::Signature(format!("default for {s} is not closed")));
        }
        let got = typecheck_term(self, &t)?;
        if got != s {
            return Err(Error::Signature(format!("default for {s} has sort {got}")));
        }
        self.defaults.insert(s, t);
        Ok(())
    }

    /// The registered default term of a sort.
    pub fn default_term(&self, s: &Sort) -> Result<Term> {
        self.defaults.get(s).cloned().ok_or_else(|| Error::Signature(format!("no default for sort {s}")))
    }

    /// Adds the boolean and conditional/equality symbols required by standardness.
    pub fn standardize(&mut self) -> Result<()> {
        if !self.has_sort(&Sort::Bool) {
            self.sorts.insert(0, Sort::Bool);
        }
        for n in BOOL_OPS {
            self.ensure_std(n)?;
        }
        for s in self.sorts.clone() {
            if s != Sort::Bool && !self.hidden_sorts.contains(&s) {
                self.ensure_std(&format!("if_{s}"))?;
            }
        }
        for s in self.eq_sorts.clone() {
            self.ensure_std(&format!("eq_{s}"))?;
        }
        self.defaults.entry(Sort::Bool).or_insert_with(|| Term::constant(&std_sym("true")));
        self.standard = true;
        Ok(())
    }

    /// Checks all invariants.
    pub fn validate(&self) -> Result<()> {
        if self.sorts.is_empty() {
            return Err(Error::Signature("signature must have ≥1 sort".into()));
        }
        for s in &self.sorts {
            if !self.defaults.contains_key(s) {
                return Err(Error::Signature(format!("missing default for sort {s}")));
            }
        }
        if self.standard {
            let mut need: Vec<String> = BOOL_OPS.iter().map(|s| s.to_string()).collect();
            for s in &self.sorts {
                if *s != Sort::Bool && !self.hidden_sorts.contains(s) {
                    need.push(format!("if_{s}"));
                }
            }
            for s in &self.eq_sorts {
                need.push(format!("eq_{s}"));
            }
            if !self.has_sort(&Sort::Bool) {
                return Err(Error::Signature("standard signature lacks sort bool".into()));
            }
            for n in need {
                if self.func(&n).is_none() {
                    return Err(Error::Signature(format!("standard signature lacks {n}")));
                }
            }
        }
        if self.n_standard {
            if !self.has_sort(&Sort::Nat) || !self.is_eq_sort(&Sort::Nat) {
                return Err(Error::Signature("N-standard signature needs nat as an equality sort".into()));
            }
            for n in NAT_OPS {
                if self.func(n).is_none() {
                    return Err(Error::Signature(format!("N-standard signature lacks {n}")));
                }
            }
        }
        Ok(())
    }

    pub fn strictly_n_standard(&self) -> bool {
        check_strict_n_standard(self).is_ok()
    }

    /// True iff `f` is one of the standard operations of this signature.
    pub fn is_standard_symbol(&self, name: &str) -> bool {
        standard_type(name).is_some() && self.func(name).is_some()
    }

    /// Restriction to the given symbols (sorts kept).
    pub fn reduct(&self, keep: &dyn Fn(&Sym) -> bool) -> Signature {
        let mut r = self.clone();
        r.funcs.retain(|f| keep(f));
        r.index = r.funcs.iter().enumerate().map(|(i, f)| (f.name.clone(), i)).collect();
        r
    }
}

/// Adjoins nat with its standard operations.
pub fn n_standardize(sig: &Signature) -> Result<Signature> {
    if !sig.standard {
        return Err(Error::Signature(format!("{} is not standard", sig.name)));
    }
    let mut r = sig.clone();
    if !r.has_sort(&Sort::Nat) {
        r.add_sort(Sort::Nat)?;
    }
    r.add_eq_sort(Sort::Nat)?;
    for n in NAT_OPS {
        r.ensure_std(n)?;
    }
    r.defaults.entry(Sort::Nat).or_insert_with(|| Term::constant(&std_sym("0")));
    r.n_standard = true;
    Ok(r)
}

/// The array expansion: N-standardizes, then adds s* for every sort s other than nat.
pub fn star_signature(sig: &Signature) -> Result<Signature> {
    if sig.sorts.iter().any(|s| s.is_star()) {
        return Err(Error::Signature("already starred".into()));
    }
    let mut r = n_standardize(sig)?;
    for s in r.sorts.clone() {
        if s == Sort::Nat || r.hidden_sorts.contains(&s) {
            continue;
        }
        let st = s.star();
        r.add_sort(st.clone())?;
        for p in ["Lgth", "Ap", "Null", "Update", "Newlength"] {
            r.ensure_std(&format!("{p}_{s}"))?;
        }
        r.ensure_std(&format!("if_{st}"))?;
        if r.is_eq_sort(&s) {
            r.add_eq_sort(st.clone())?;
            r.ensure_std(&format!("eq_{st}"))?;
        }
        r.defaults.insert(st, Term::constant(&std_sym(&format!("Null_{s}"))));
    }
    Ok(r)
}

/// `Ok(())` when the only nat/bool-ranged symbols are the standard numerical and boolean
/// operations; otherwise returns an offending symbol.
pub fn check_strict_n_standard(sig: &Signature) -> std::result::Result<(), Sym> {
    for f in &sig.funcs {
        if (f.range == Sort::Nat || f.range == Sort::Bool) && !BOOL_OPS.contains(&&*f.name) && !NAT_OPS.contains(&&*f.name) {
            return Err(f.clone());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bools() -> Signature {
        let mut s = Signature::new("B");
        s.add_sort(Sort::Bool).unwrap();
        s.standardize().unwrap();
        s
    }

    #[test]
    fn n_standardize_adds_nat_ops() {
        let n = n_standardize(&bools()).unwrap();
        let eq = n.func("eq_nat").unwrap();
        assert_eq!(eq.domain, vec![Sort::Nat, Sort::Nat]);
        assert_eq!(eq.range, Sort::Bool);
        assert_eq!(n_standardize(&n).unwrap(), n);
        assert!(n.strictly_n_standard());
    }

    #[test]
    fn collision_with_reserved_symbol() {
        let mut s = bools();
        s.add_sort(Sort::Real).unwrap();
        let e = s.add_func(FuncSymbol::new("S", vec![Sort::Real], Sort::Real)).unwrap_err();
        assert!(matches!(e, Error::Signature(_)));
    }

    #[test]
    fn starring() {
        let mut s = bools();
        s.add_sort(Sort::Real).unwrap();
        s.add_eq_sort(Sort::Bool).unwrap();
        s.standardize().unwrap();
        let st = star_signature(&s).unwrap();
        assert!(st.has_sort(&Sort::Bool.star()));
        assert!(st.has_sort(&Sort::Real.star()));
        assert!(!st.sorts().iter().any(|x| *x == Sort::Nat.star()));
        assert!(st.func("eq_bool*").is_some());
        assert!(st.func("eq_real*").is_none());
        assert_eq!(st.default_term(&Sort::Real.star()).unwrap().to_string(), "Null_real");
        let e = star_signature(&st).unwrap_err();
        assert_eq!(e, Error::Signature("already starred".into()));
    }

    #[test]
    fn strictness_witness() {
        let mut s = n_standardize(&bools()).unwrap();
        s.add_sort(Sort::Real).unwrap();
        s.add_func(FuncSymbol::new("g", vec![Sort::Nat], Sort::Real)).unwrap();
        assert!(check_strict_n_standard(&s).is_ok());
        s.add_func(FuncSymbol::new("f", vec![Sort::Real], Sort::Bool)).unwrap();
        assert_eq!(&*check_strict_n_standard(&s).unwrap_err().name, "f");
    }
}
