//! PR and μPR* schemes as linear derivations.

mod godel;

pub use godel::{enumerate_derivations, godel_bytes, godel_decode, godel_encode, DerivationEnumerator};

use crate::error::{Error, Result};
use crate::sexp::{parse_one, Sexp};
use crate::syntax::{sort_from_name, Signature, Sort, Sym};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// f(x) = F(x)
    Prim(Sym),
    /// f(x) = c
    Const { c: Sym, domain: Vec<Sort> },
    /// f(x) = x_index
    Proj { domain: Vec<Sort>, index: usize },
    /// f(x) = h(g_1(x), ..., g_m(x))
    Comp { head: usize, args: Vec<usize>, domain: Vec<Sort> },
    /// f(b, x, y) = x if b else y
    Cases(Sort),
    /// Simultaneous primitive recursion of degree m; the entry denotes component `sel`.
    PrimRec { m: usize, base: Vec<usize>, step: Vec<usize>, sel: usize },
    /// f(x) = μz[g(x, z) = true]
    Mu(usize),
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub name: String,
    pub scheme: Scheme,
    pub domain: Vec<Sort>,
    pub range: Sort,
}

impl PartialEq for Entry {
    fn eq(&self, o: &Self) -> bool {
        self.scheme == o.scheme && self.domain == o.domain && self.range == o.range
    }
}

/// A derivation: each entry is initial or defined from strictly earlier entries.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub name: String,
    pub signature: Arc<Signature>,
    pub entries: Vec<Entry>,
}

impl PartialEq for Derivation {
    fn eq(&self, o: &Self) -> bool {
        self.entries == o.entries
    }
}

/// PR / PR* / μPR / μPR* classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Pr,
    PrStar,
    MuPr,
    MuPrStar,
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::Pr => "PR",
            Class::PrStar => "PR*",
            Class::MuPr => "muPR",
            Class::MuPrStar => "muPR*",
        })
    }
}

/// Type of a new entry with scheme `sc` given earlier entries.
pub fn scheme_type(sig: &Signature, prior: &[Entry], sc: &Scheme) -> Result<(Vec<Sort>, Sort)> {
    let get = |i: usize| -> Result<&Entry> { prior.get(i).ok_or_else(|| Error::Derivation(format!("forward reference to entry {i}"))) };
    let known = |s: &Sort| -> Result<()> {
        if sig.has_sort(s) {
            Ok(())
        } else {
            Err(Error::Derivation(format!("unknown sort {s}")))
        }
    };
    match sc {
        Scheme::Prim(f) => {
            let g = sig.func(&f.name).ok_or_else(|| Error::Derivation(format!("unknown symbol {}", f.name)))?;
            if g != f {
                return Err(Error::Derivation(format!("symbol {} has a different type in the signature", f.name)));
            }
            Ok((f.domain.clone(), f.range.clone()))
        }
        Scheme::Const { c, domain } => {
            let g = sig.func(&c.name).ok_or_else(|| Error::Derivation(format!("unknown symbol {}", c.name)))?;
            if g != c || !c.is_const() {
                return Err(Error::Derivation(format!("{} is not a constant of the signature", c.name)));
            }
            domain.iter().try_for_each(known)?;
            Ok((domain.clone(), c.range.clone()))
        }
        Scheme::Proj { domain, index } => {
            domain.iter().try_for_each(known)?;
            let s = domain.get(*index).ok_or_else(|| Error::Derivation(format!("projection index {index} out of range")))?;
            Ok((domain.clone(), s.clone()))
        }
        Scheme::Comp { head, args, domain } => {
            let h = get(*head)?;
            if h.domain.len() != args.len() {
                return Err(Error::Derivation(format!("composition head {} takes {} arguments, given {}", h.name, h.domain.len(), args.len())));
            }
            domain.iter().try_for_each(known)?;
            for (k, &a) in args.iter().enumerate() {
                let g = get(a)?;
                if &g.domain != domain {
                    return Err(Error::Derivation(format!("composition argument {} has domain unlike the others", g.name)));
                }
                if g.range != h.domain[k] {
                    return Err(Error::Derivation(format!("composition argument {} has range {}, head expects {}", g.name, g.range, h.domain[k])));
                }
            }
            Ok((domain.clone(), h.range.clone()))
        }
        Scheme::Cases(s) => {
            known(s)?;
            if !sig.has_sort(&Sort::Bool) {
                return Err(Error::Derivation("cases needs sort bool".into()));
            }
            Ok((vec![Sort::Bool, s.clone(), s.clone()], s.clone()))
        }
        Scheme::PrimRec { m, base, step, sel } => {
            if *m == 0 || base.len() != *m || step.len() != *m {
                return Err(Error::Derivation(format!("primrec of degree {m} needs exactly {m} base and {m} step functions")));
            }
            if *sel >= *m {
                return Err(Error::Derivation(format!("primrec component {sel} out of range")));
            }
            if !sig.has_sort(&Sort::Nat) {
                return Err(Error::Derivation("primrec needs sort nat".into()));
            }
            let u = get(base[0])?.domain.clone();
            let ranges: Vec<Sort> = base.iter().map(|&b| get(b).map(|e| e.range.clone())).collect::<Result<_>>()?;
            for &b in base {
                if get(b)?.domain != u {
                    return Err(Error::Derivation("primrec base functions must share a domain".into()));
                }
            }
            let mut hdom = vec![Sort::Nat];
            hdom.extend(u.iter().cloned());
            hdom.extend(ranges.iter().cloned());
            for (i, &h) in step.iter().enumerate() {
                let e = get(h)?;
                if e.domain != hdom || e.range != ranges[i] {
                    return Err(Error::Derivation(format!("primrec step {} must have type nat × u × v → {}", e.name, ranges[i])));
                }
            }
            let mut dom = vec![Sort::Nat];
            dom.extend(u);
            Ok((dom, ranges[*sel].clone()))
        }
        Scheme::Mu(g) => {
            let e = get(*g)?;
            if e.range != Sort::Bool {
                return Err(Error::Derivation("μ requires boolean-valued g".into()));
            }
            match e.domain.last() {
                Some(Sort::Nat) => Ok((e.domain[..e.domain.len() - 1].to_vec(), Sort::Nat)),
                _ => Err(Error::Derivation("μ requires g with last argument of sort nat".into())),
            }
        }
    }
}

impl Derivation {
    /// Builds and typechecks a derivation.
    pub fn new(name: &str, signature: Arc<Signature>, schemes: Vec<(String, Scheme)>) -> Result<Derivation> {
        let mut entries: Vec<Entry> = Vec::new();
        for (n, sc) in schemes {
            let (domain, range) = scheme_type(&signature, &entries, &sc)?;
            entries.push(Entry { name: n, scheme: sc, domain, range });
        }
        if entries.is_empty() {
            return Err(Error::Derivation("derivation must be nonempty".into()));
        }
        Ok(Derivation { name: name.to_string(), signature, entries })
    }

    pub fn last(&self) -> &Entry {
        self.entries.last().expect("nonempty derivation")
    }

    /// The type u → s of the derivation.
    pub fn result_type(&self) -> (&[Sort], &Sort) {
        let e = self.last();
        (&e.domain, &e.range)
    }

    pub fn uses_mu(&self) -> bool {
        self.entries.iter().any(|e| matches!(e.scheme, Scheme::Mu(_)))
    }

    pub fn uses_star(&self) -> bool {
        self.entries.iter().any(|e| e.domain.iter().chain(std::iter::once(&e.range)).any(|s| s.is_star()))
    }

    pub fn class(&self) -> Class {
        match (self.uses_mu(), self.uses_star()) {
            (false, false) => Class::Pr,
            (false, true) => Class::PrStar,
            (true, false) => Class::MuPr,
            (true, true) => Class::MuPrStar,
        }
    }

    /// Indices of μ entries.
    pub fn mu_sites(&self) -> Vec<usize> {
        self.entries.iter().enumerate().filter(|(_, e)| matches!(e.scheme, Scheme::Mu(_))).map(|(i, _)| i).collect()
    }
}

fn sorts_of(sig: &Signature, e: &Sexp) -> Result<Vec<Sort>> {
    e.expect_list("sort list")?
        .iter()
        .map(|s| {
            let n = s.expect_atom("sort")?;
            sort_from_name(n).filter(|x| sig.has_sort(x)).ok_or_else(|| s.err(format!("unknown sort {n}")))
        })
        .collect()
}

fn index_of(e: &Sexp) -> Result<usize> {
    e.expect_atom("index")?.parse().map_err(|_| e.err("expected a number"))
}

/// Parses a `.der` document against `sig`.
pub fn parse_derivation(sig: &Signature, text: &str) -> Result<Derivation> {
    let e = parse_one(text)?;
    let items = e.expect_list("derivation")?;
    if e.head() != Some("derivation") || items.len() < 3 {
        return Err(e.err("expected (derivation NAME ((DOM...) RANGE) (entry ...) ...)"));
    }
    let name = items[1].expect_atom("derivation name")?;
    let ty = items[2].expect_list("type")?;
    if ty.len() != 2 {
        return Err(items[2].err("expected ((DOM...) RANGE)"));
    }
    let dom = sorts_of(sig, &ty[0])?;
    let rn = ty[1].expect_atom("range sort")?;
    let range = sort_from_name(rn).filter(|x| sig.has_sort(x)).ok_or_else(|| ty[1].err(format!("unknown sort {rn}")))?;
    let all_names: Vec<&str> = items[3..].iter().filter_map(|x| x.list().and_then(|l| l.get(1)).and_then(|n| n.atom())).collect();
    let mut names: Vec<String> = Vec::new();
    let mut entries: Vec<Entry> = Vec::new();
    for it in &items[3..] {
        let l = it.expect_list("entry")?;
        if it.head() != Some("entry") || l.len() != 3 {
            return Err(it.err("expected (entry NAME SCHEME)"));
        }
        let en = l[1].expect_atom("entry name")?;
        if names.iter().any(|n| n == en) {
            return Err(l[1].err(format!("duplicate entry {en}")));
        }
        let r = |x: &Sexp| -> Result<usize> {
            let n = x.expect_atom("entry reference")?;
            match names.iter().position(|k| k == n) {
                Some(i) => Ok(i),
                None if all_names.contains(&n) => Err(x.err(format!("forward reference to {n}"))),
                None => Err(x.err(format!("unknown entry {n}"))),
            }
        };
        let refs = |x: &Sexp| -> Result<Vec<usize>> { x.expect_list("entry list")?.iter().map(r).collect() };
        let sx = &l[2];
        let sl = sx.expect_list("scheme")?;
        let sym = |x: &Sexp| -> Result<Sym> {
            let n = x.expect_atom("symbol")?;
            sig.func(n).cloned().ok_or_else(|| x.err(format!("unknown symbol {n}")))
        };
        let sc = match (sx.head(), sl.len()) {
            (Some("prim"), 2) => Scheme::Prim(sym(&sl[1])?),
            (Some("const"), 2) => Scheme::Const { c: sym(&sl[1])?, domain: vec![] },
            (Some("const"), 3) => Scheme::Const { c: sym(&sl[1])?, domain: sorts_of(sig, &sl[2])? },
            (Some("proj"), 3) => Scheme::Proj { domain: sorts_of(sig, &sl[1])?, index: index_of(&sl[2])? },
            (Some("comp"), 3) | (Some("comp"), 4) => {
                let head = r(&sl[1])?;
                let args = refs(&sl[2])?;
                let domain = if sl.len() == 4 {
                    if !args.is_empty() {
                        return Err(sx.err("explicit domain only for composition without arguments"));
                    }
                    sorts_of(sig, &sl[3])?
                } else if let Some(&a) = args.first() {
                    entries[a].domain.clone()
                } else {
                    return Err(sx.err("composition without arguments needs an explicit domain"));
                };
                Scheme::Comp { head, args, domain }
            }
            (Some("cases"), 2) => {
                let n = sl[1].expect_atom("sort")?;
                Scheme::Cases(sort_from_name(n).filter(|x| sig.has_sort(x)).ok_or_else(|| sl[1].err(format!("unknown sort {n}")))?)
            }
            (Some("primrec"), 4) | (Some("primrec"), 5) => Scheme::PrimRec {
                m: index_of(&sl[1])?,
                base: refs(&sl[2])?,
                step: refs(&sl[3])?,
                sel: if sl.len() == 5 { index_of(&sl[4])? } else { 0 },
            },
            (Some("mu"), 2) => Scheme::Mu(r(&sl[1])?),
            _ => return Err(sx.err("unknown scheme form")),
        };
        let (domain, rg) = scheme_type(sig, &entries, &sc).map_err(|x| match x {
            Error::Derivation(m) => sx.err(m),
            o => o,
        })?;
        names.push(en.to_string());
        entries.push(Entry { name: en.to_string(), scheme: sc, domain, range: rg });
    }
    if entries.is_empty() {
        return Err(e.err("derivation must be nonempty"));
    }
    let d = Derivation { name: name.to_string(), signature: Arc::new(sig.clone()), entries };
    let (u, s) = d.result_type();
    if u != dom.as_slice() || *s != range {
        return Err(items[2].err(format!("declared type does not match the last entry ({})", type_string(u, s))));
    }
    Ok(d)
}

pub fn type_string(u: &[Sort], s: &Sort) -> String {
    let d: Vec<String> = u.iter().map(|x| x.to_string()).collect();
    format!("({}) -> {s}", d.join(" "))
}

fn sorts_str(v: &[Sort]) -> String {
    let d: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", d.join(" "))
}

/// Prints a derivation in `.der` syntax.
pub fn print_derivation(d: &Derivation) -> String {
    let (u, s) = d.result_type();
    let mut out = format!("(derivation {} ({} {s})", d.name, sorts_str(u));
    let n = |i: usize| d.entries[i].name.clone();
    let ns = |v: &[usize]| format!("({})", v.iter().map(|&i| n(i)).collect::<Vec<_>>().join(" "));
    for e in &d.entries {
        let sc = match &e.scheme {
            Scheme::Prim(f) => format!("(prim {})", f.name),
            Scheme::Const { c, domain } if domain.is_empty() => format!("(const {})", c.name),
            Scheme::Const { c, domain } => format!("(const {} {})", c.name, sorts_str(domain)),
            Scheme::Proj { domain, index } => format!("(proj {} {index})", sorts_str(domain)),
            Scheme::Comp { head, args, domain } if args.is_empty() => format!("(comp {} () {})", n(*head), sorts_str(domain)),
            Scheme::Comp { head, args, .. } => format!("(comp {} {})", n(*head), ns(args)),
            Scheme::Cases(s) => format!("(cases {s})"),
            Scheme::PrimRec { m, base, step, sel: 0 } => format!("(primrec {m} {} {})", ns(base), ns(step)),
            Scheme::PrimRec { m, base, step, sel } => format!("(primrec {m} {} {} {sel})", ns(base), ns(step)),
            Scheme::Mu(g) => format!("(mu {})", n(*g)),
        };
        out += &format!("\n  (entry {} {sc})", e.name);
    }
    out + ")\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtin;

    fn n() -> Signature {
        builtin("N").unwrap().algebra().signature().clone()
    }

    const ADD: &str = "(derivation add ((nat nat) nat)
        (entry succ (prim S))
        (entry id (proj (nat) 0))
        (entry p2 (proj (nat nat nat) 2))
        (entry h (comp succ (p2)))
        (entry add (primrec 1 (id) (h))))";

    #[test]
    fn add_typechecks() {
        let d = parse_derivation(&n(), ADD).unwrap();
        assert_eq!(d.result_type(), (&[Sort::Nat, Sort::Nat][..], &Sort::Nat));
        assert!(!d.uses_mu());
        assert_eq!(d.class(), Class::Pr);
        let again = parse_derivation(&n(), &print_derivation(&d)).unwrap();
        assert_eq!(again, d);
    }

    #[test]
    fn mu_needs_bool() {
        let t = "(derivation bad ((nat) nat) (entry p (proj (nat nat) 0)) (entry m (mu p)))";
        let e = parse_derivation(&n(), t).unwrap_err();
        assert!(e.to_string().contains("μ requires boolean-valued g"), "{e}");
    }

    #[test]
    fn forward_reference() {
        let t = "(derivation bad ((nat) nat) (entry a (comp f5 (b))) (entry b (proj (nat) 0)) (entry f5 (prim S)))";
        let e = parse_derivation(&n(), t).unwrap_err();
        assert!(e.to_string().contains("forward reference"), "{e}");
    }
}
