use super::*;
use crate::sexp::{parse_all, parse_one, Sexp};

/// Parses a sort name and checks it belongs to `sig`.
pub fn parse_sort(sig: &Signature, name: &str) -> Result<Sort> {
    let s = sort_from_name(name).ok_or_else(|| Error::Type(format!("bad sort name {name}")))?;
    if !sig.has_sort(&s) {
        return Err(Error::Type(format!("unknown sort {name}")));
    }
    Ok(s)
}

fn sort_at(sig: &Signature, e: &Sexp) -> Result<Sort> {
    let n = e.expect_atom("sort")?;
    let s = sort_from_name(n).ok_or_else(|| e.err(format!("bad sort name {n}")))?;
    if !sig.has_sort(&s) {
        return Err(e.err(format!("unknown sort {n}")));
    }
    Ok(s)
}

pub(crate) fn term_from_sexp(sig: &Signature, e: &Sexp) -> Result<Term> {
    match e {
        Sexp::Atom { text, .. } => {
            if let Some(n) = text.strip_prefix('#') {
                let n: u64 = n.parse().map_err(|_| e.err(format!("bad numeral {text}")))?;
                let (z, s) = (sig.func("0"), sig.func("S"));
                if z.is_none() || s.is_none() {
                    return Err(e.err("numerals need 0 and S"));
                }
                return Ok(numeral(n));
            }
            if let Some((v, s)) = text.split_once(':') {
                if !is_ident(v) {
                    return Err(e.err(format!("bad variable name {v}")));
                }
                let sort = sort_from_name(s).ok_or_else(|| e.err(format!("bad sort name {s}")))?;
                if !sig.has_sort(&sort) {
                    return Err(e.err(format!("unknown sort {s}")));
                }
                return Ok(Term::var(v, sort));
            }
            let f = sig.func(text).ok_or_else(|| e.err(format!("unknown symbol {text}")))?;
            if !f.is_const() {
                return Err(e.err(format!("symbol {text} expects {} arguments", f.arity())));
            }
            Ok(Term::constant(f))
        }
        Sexp::List { items, .. } => {
            let (h, rest) = items.split_first().ok_or_else(|| e.err("empty term"))?;
            let name = h.expect_atom("function symbol")?;
            let f = sig.func(name).ok_or_else(|| h.err(format!("unknown symbol {name}")))?.clone();
            if f.arity() != rest.len() {
                return Err(e.err(format!("arity mismatch for {name}: expected {}, got {}", f.arity(), rest.len())));
            }
            let args = rest.iter().map(|a| term_from_sexp(sig, a)).collect::<Result<Vec<_>>>()?;
            for (i, (a, s)) in args.iter().zip(&f.domain).enumerate() {
                if &a.sort() != s {
                    return Err(rest[i].err(format!("sort mismatch in argument {} of {name}: expected {s}, got {}", i + 1, a.sort())));
                }
            }
            Ok(Term::App(f, args))
        }
    }
}

pub fn parse_term(sig: &Signature, text: &str) -> Result<Term> {
    term_from_sexp(sig, &parse_one(text)?)
}

pub(crate) fn atom_from_sexp(sig: &Signature, e: &Sexp) -> Result<Atom> {
    let items = e.expect_list("atomic formula")?;
    match (e.head(), items.len()) {
        (Some("="), 3) | (Some("<"), 3) => {
            let a = term_from_sexp(sig, &items[1])?;
            let b = term_from_sexp(sig, &items[2])?;
            if e.head() == Some("=") {
                if a.sort() != b.sort() {
                    return Err(e.err(format!("equation sides have sorts {} and {}", a.sort(), b.sort())));
                }
                Ok(Atom::Eq(a, b))
            } else {
                if a.sort() != Sort::Real || b.sort() != Sort::Real {
                    return Err(e.err("inequality sides must have sort real"));
                }
                Ok(Atom::Lt(a, b))
            }
        }
        (Some("forall-lt"), 4) => {
            let v = match term_from_sexp(sig, &items[1])? {
                Term::Var(v) if v.sort == Sort::Nat => v,
                _ => return Err(items[1].err("bounded variable must be a nat variable")),
            };
            let bound = term_from_sexp(sig, &items[2])?;
            if bound.sort() != Sort::Nat {
                return Err(items[2].err("bound must have sort nat"));
            }
            let body = atom_from_sexp(sig, &items[3])?;
            if matches!(body, Atom::Lt(..)) {
                return Err(items[3].err("bounded quantifier over an inequality"));
            }
            Ok(Atom::bu(v, bound, body))
        }
        _ => Err(e.err("expected (= a b), (< a b) or (forall-lt z:nat BOUND ATOM)")),
    }
}

pub(crate) fn formula_from_sexp(sig: &Signature, e: &Sexp) -> Result<Formula> {
    if e.head() == Some("=>") {
        let items = e.list().unwrap();
        if items.len() != 3 {
            return Err(e.err("expected (=> (ANTECEDENTS...) ATOM)"));
        }
        let ants = items[1]
            .expect_list("antecedent list")?
            .iter()
            .map(|a| atom_from_sexp(sig, a))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Formula::cond(ants, atom_from_sexp(sig, &items[2])?));
    }
    Ok(Formula::atom(atom_from_sexp(sig, e)?))
}

pub fn parse_formula(sig: &Signature, text: &str) -> Result<Formula> {
    formula_from_sexp(sig, &parse_one(text)?)
}

fn is_flag(s: &str) -> bool {
    matches!(s, "standard" | "n-standard" | "n_standard")
}

pub(crate) fn signature_from_sexp(e: &Sexp) -> Result<Signature> {
    let items = e.expect_list("signature form")?;
    if e.head() != Some("signature") || items.len() < 2 {
        return Err(e.err("expected (signature NAME ...)"));
    }
    let name = items[1].expect_atom("signature name")?;
    let mut sig = Signature::new(name);
    let (mut standard, mut n_standard) = (false, false);
    let mut defaults = Vec::new();
    let mut eqs = Vec::new();
    let mut hidden = Vec::new();
    for c in &items[2..] {
        let l = c.expect_list("signature clause")?;
        let words: Option<Vec<&str>> = l.iter().map(|x| x.atom()).collect();
        let flags = match c.head() {
            Some("flags") => Some(&l[1..]),
            _ if !l.is_empty() && words.as_ref().is_some_and(|w| w.iter().all(|w| is_flag(w))) => Some(l),
            _ => None,
        };
        if let Some(fl) = flags {
            for f in fl {
                match f.expect_atom("flag")? {
                    "standard" => standard = true,
                    "n-standard" | "n_standard" => n_standard = true,
                    x => return Err(f.err(format!("unknown flag {x}"))),
                }
            }
            if standard && !sig.has_sort(&Sort::Bool) {
                sig.add_sort(Sort::Bool).map_err(|x| c.err(x.to_string()))?;
            }
            if n_standard && !sig.has_sort(&Sort::Nat) {
                sig.add_sort(Sort::Nat).map_err(|x| c.err(x.to_string()))?;
            }
            continue;
        }
        match c.head() {
            Some("sorts") => {
                for s in &l[1..] {
                    let n = s.expect_atom("sort name")?;
                    let so = sort_from_name(n).ok_or_else(|| s.err(format!("bad sort name {n}")))?;
                    let implied = (standard && so == Sort::Bool) || (n_standard && so == Sort::Nat);
                    if implied && sig.has_sort(&so) {
                        continue;
                    }
                    sig.add_sort(so).map_err(|x| s.err(x.to_string()))?;
                }
            }
            Some("eqsorts") => eqs.extend(&l[1..]),
            Some("hidden-sorts") => hidden.extend(&l[1..]),
            Some("func") => {
                if l.len() != 4 {
                    return Err(c.err("expected (func NAME (DOM...) RANGE)"));
                }
                let n = l[1].expect_atom("symbol name")?;
                let dom = l[2].expect_list("domain")?.iter().map(|s| sort_at(&sig, s)).collect::<Result<Vec<_>>>()?;
                let r = sort_at(&sig, &l[3])?;
                sig.add_func(FuncSymbol::new(n, dom, r)).map_err(|x| c.err(x.to_string()))?;
            }
            Some("const") => {
                if l.len() != 3 {
                    return Err(c.err("expected (const NAME SORT)"));
                }
                let n = l[1].expect_atom("symbol name")?;
                let r = sort_at(&sig, &l[2])?;
                sig.add_func(FuncSymbol::new(n, vec![], r)).map_err(|x| c.err(x.to_string()))?;
            }
            Some("default") => {
                if l.len() != 3 {
                    return Err(c.err("expected (default SORT TERM)"));
                }
                defaults.push((&l[1], &l[2]));
            }
            _ => return Err(c.err("unknown signature clause")),
        }
    }
    if (standard || n_standard) && !sig.has_sort(&Sort::Bool) {
        sig.add_sort(Sort::Bool).map_err(|x| e.err(x.to_string()))?;
    }
    if n_standard && !sig.has_sort(&Sort::Nat) {
        sig.add_sort(Sort::Nat).map_err(|x| e.err(x.to_string()))?;
    }
    for s in eqs {
        let so = sort_at(&sig, s)?;
        sig.add_eq_sort(so).map_err(|x| s.err(x.to_string()))?;
    }
    for s in hidden {
        let so = sort_at(&sig, s)?;
        sig.mark_hidden(so);
    }
    if sig.sorts().is_empty() {
        return Err(e.err("signature must have ≥1 sort"));
    }
    if standard || n_standard {
        sig.standardize().map_err(|x| e.err(x.to_string()))?;
    }
    if n_standard {
        sig = n_standardize(&sig).map_err(|x| e.err(x.to_string()))?;
    }
    for (s, t) in defaults {
        let so = sort_at(&sig, s)?;
        let term = term_from_sexp(&sig, t)?;
        sig.set_default(so, term).map_err(|x| t.err(x.to_string()))?;
    }
    sig.validate().map_err(|x| e.err(x.to_string()))?;
    Ok(sig)
}

/// Parses a `.sig` document.
pub fn parse_signature(text: &str) -> Result<Signature> {
    let forms = parse_all(text)?;
    match forms.as_slice() {
        [one] => signature_from_sexp(one),
        [] => Err(Error::parse(1, 1, "empty signature file")),
        [_, x, ..] => Err(x.err("trailing input after signature")),
    }
}

pub fn print_signature(sig: &Signature) -> String {
    let mut out = format!("(signature {}", sig.name);
    let mut flags = Vec::new();
    if sig.standard {
        flags.push("standard");
    }
    if sig.n_standard {
        flags.push("n-standard");
    }
    if !flags.is_empty() {
        out += &format!("\n  (flags {})", flags.join(" "));
    }
    let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(" ");
    out += &format!("\n  (sorts {})", join(&mut sig.sorts().iter().map(|s| s.to_string())));
    if !sig.eq_sorts().is_empty() {
        out += &format!("\n  (eqsorts {})", join(&mut sig.eq_sorts().iter().map(|s| s.to_string())));
    }
    if !sig.hidden_sorts().is_empty() {
        out += &format!("\n  (hidden-sorts {})", join(&mut sig.hidden_sorts().iter().map(|s| s.to_string())));
    }
    for f in sig.funcs() {
        if f.is_const() {
            out += &format!("\n  (const {} {})", f.name, f.range);
        } else {
            out += &format!("\n  (func {} ({}) {})", f.name, join(&mut f.domain.iter().map(|s| s.to_string())), f.range);
        }
    }
    for (s, t) in sig.defaults() {
        out += &format!("\n  (default {s} {t})");
    }
    out + ")\n"
}

