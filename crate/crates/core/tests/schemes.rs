use adt_core::algebra::builtin;
use adt_core::corpus::{load, CORPUS};
use adt_core::schemes::{enumerate_derivations, godel_decode, godel_encode, parse_derivation, print_derivation, type_string, Derivation, Scheme};
use adt_core::syntax::{star_signature, Signature, Sort};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use std::collections::HashMap;
use std::sync::Arc;

fn n_star() -> Arc<Signature> {
    Arc::new(star_signature(builtin("N").unwrap().algebra().signature()).unwrap())
}

type Ty = (Vec<Sort>, Sort);

fn sorts_of(sig: &Signature, rng: &mut SplitMix64, max: usize) -> Vec<Sort> {
    let k = rng.gen_range(0..=max);
    (0..k).map(|_| sig.sorts().choose(rng).unwrap().clone()).collect()
}

/// Draws a well-typed next scheme, or None when the random choice leads nowhere.
fn draw(sig: &Signature, prior: &[Ty], rng: &mut SplitMix64, allow_mu: bool) -> Option<Scheme> {
    let pick = |rng: &mut SplitMix64, ok: &dyn Fn(&Ty) -> bool| -> Option<usize> {
        let c: Vec<usize> = (0..prior.len()).filter(|&i| ok(&prior[i])).collect();
        c.choose(rng).copied()
    };
    match rng.gen_range(0..7) {
        0 => Some(Scheme::Prim(sig.funcs().choose(rng)?.clone())),
        1 => {
            let cs: Vec<_> = sig.funcs().iter().filter(|f| f.is_const()).collect();
            Some(Scheme::Const { c: (*cs.choose(rng)?).clone(), domain: sorts_of(sig, rng, 2) })
        }
        2 => {
            let mut domain = sorts_of(sig, rng, 2);
            domain.push(sig.sorts().choose(rng)?.clone());
            let index = rng.gen_range(0..domain.len());
            Some(Scheme::Proj { domain, index })
        }
        3 => {
            let head = rng.gen_range(0..prior.len().max(1));
            let h = prior.get(head)?;
            let domain = if h.0.is_empty() { sorts_of(sig, rng, 2) } else { prior.choose(rng)?.0.clone() };
            let mut args = Vec::new();
            for s in &h.0 {
                args.push(pick(rng, &|e| e.0 == domain && &e.1 == s)?);
            }
            Some(Scheme::Comp { head, args, domain })
        }
        4 => Some(Scheme::Cases(sig.sorts().choose(rng)?.clone())),
        5 => {
            let m = rng.gen_range(1..=2);
            let b0 = rng.gen_range(0..prior.len().max(1));
            let u = prior.get(b0)?.0.clone();
            let mut base = vec![b0];
            for _ in 1..m {
                base.push(pick(rng, &|e| e.0 == u)?);
            }
            let v: Vec<Sort> = base.iter().map(|&b| prior[b].1.clone()).collect();
            let mut hdom = vec![Sort::Nat];
            hdom.extend(u.iter().cloned());
            hdom.extend(v.iter().cloned());
            let mut step = Vec::new();
            for r in &v {
                step.push(pick(rng, &|e| e.0 == hdom && &e.1 == r)?);
            }
            Some(Scheme::PrimRec { m, base, step, sel: rng.gen_range(0..m) })
        }
        _ if allow_mu => Some(Scheme::Mu(pick(rng, &|e| e.1 == Sort::Bool && e.0.last() == Some(&Sort::Nat))?)),
        _ => None,
    }
}

fn generate(sig: &Arc<Signature>, seed: u64, len: usize, allow_mu: bool) -> Derivation {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut schemes: Vec<(String, Scheme)> = Vec::new();
    let mut types: Vec<Ty> = Vec::new();
    while schemes.len() < len {
        let Some(sc) = draw(sig, &types, &mut rng, allow_mu) else { continue };
        schemes.push((format!("e{}", schemes.len()), sc));
        let d = Derivation::new("g", sig.clone(), schemes.clone()).expect("generator draws well-typed schemes");
        let e = d.last();
        types.push((e.domain.clone(), e.range.clone()));
    }
    Derivation::new("g", sig.clone(), schemes).unwrap()
}

fn schemes(d: &Derivation) -> Vec<(String, Scheme)> {
    d.entries.iter().map(|e| (e.name.clone(), e.scheme.clone())).collect()
}

/// Replaces entry `i` by a scheme that breaks its typing rule.
fn perturb(d: &Derivation, i: usize, choice: usize) -> Vec<(String, Scheme)> {
    let sig = &d.signature;
    let mut s = schemes(d);
    let prior = &d.entries[..i];
    let bad = match (&s[i].1, choice % 4) {
        (Scheme::Proj { domain, index }, 0) => Scheme::Proj { domain: domain.clone(), index: domain.len() + index },
        (Scheme::Comp { head, args, domain }, 0) => {
            let mut args = args.clone();
            args.push(*head);
            Scheme::Comp { head: *head, args, domain: domain.clone() }
        }
        (Scheme::PrimRec { m, base, step, sel }, 0) => Scheme::PrimRec { m: m + 1, base: base.clone(), step: step.clone(), sel: *sel },
        (Scheme::PrimRec { m, base, step, .. }, 1) => Scheme::PrimRec { m: *m, base: base.clone(), step: step.clone(), sel: *m },
        (Scheme::Prim(f), 0) => {
            let mut f = (**f).clone();
            f.domain.push(Sort::Bool);
            Scheme::Prim(Arc::new(f))
        }
        (_, 1) if sig.funcs().iter().any(|f| !f.is_const()) => {
            let f = sig.funcs().iter().find(|f| !f.is_const()).unwrap();
            Scheme::Const { c: f.clone(), domain: vec![] }
        }
        (_, 2) => match prior.iter().position(|e| e.range != Sort::Bool || e.domain.last() != Some(&Sort::Nat)) {
            Some(g) => Scheme::Mu(g),
            None => Scheme::Mu(i),
        },
        _ => Scheme::Comp { head: i, args: vec![], domain: vec![] },
    };
    s[i].1 = bad;
    s
}

#[test]
fn corpus_roundtrips() {
    for item in CORPUS {
        let (d, a) = load(item.name).unwrap();
        let sig = a.signature();
        assert_eq!(parse_derivation(sig, &print_derivation(&d)).unwrap(), d, "{}", item.name);
        assert_eq!(godel_decode(sig, &godel_encode(&d)).unwrap(), d, "{}", item.name);
        let mu = item.text.contains("(mu ");
        assert_eq!(d.uses_mu(), mu, "{}", item.name);
    }
}

#[test]
fn generated_corpus_bijection() {
    let sig = n_star();
    let mut seen: HashMap<BigUint, String> = HashMap::new();
    for seed in 0..10_000u64 {
        let d = generate(&sig, seed, 1 + (seed % 8) as usize, seed % 3 == 0);
        let code = godel_encode(&d);
        assert_eq!(godel_decode(&sig, &code).unwrap(), d, "seed {seed}");
        let text = print_derivation(&d);
        if let Some(prev) = seen.insert(code, text.clone()) {
            assert_eq!(prev, text, "two derivations share a code");
        }
    }
    assert!(seen.len() > 5_000, "generator too repetitive: {}", seen.len());
}

#[test]
fn enumeration_decodes() {
    let sig = builtin("N").unwrap().algebra().signature().clone();
    let target = parse_derivation(&sig, "(derivation t ((nat) nat) (entry s (prim S)) (entry t (proj (nat) 0)))").unwrap();
    let budget = godel_encode(&target) + 1u32;
    let all: Vec<Derivation> = enumerate_derivations(&sig, &[Sort::Nat], &Sort::Nat, &budget).collect();
    assert!(all.contains(&target));
    assert!(all.iter().any(|d| d.entries.len() == 1));
    let codes: Vec<BigUint> = all.iter().map(godel_encode).collect();
    assert!(codes.windows(2).all(|w| w[0] < w[1]));
    for (d, c) in all.iter().zip(&codes) {
        assert_eq!(&godel_decode(&sig, c).unwrap(), d);
        assert!(c < &budget);
    }
}

#[test]
fn junk_codes_are_rejected() {
    let sig = builtin("N").unwrap().algebra().signature().clone();
    for c in [0u32, 1, 2, 255, 256, 1 << 20] {
        if let Ok(d) = godel_decode(&sig, &BigUint::from(c)) {
            assert_eq!(godel_encode(&d), BigUint::from(c));
        }
    }
    assert!(godel_decode(&sig, &BigUint::from(0u32)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn ill_typed_perturbations_are_rejected(seed in any::<u64>(), len in 1usize..8, pos in any::<usize>(), choice in 0usize..4) {
        let sig = n_star();
        let d = generate(&sig, seed, len, true);
        let i = pos % d.entries.len();
        let bad = perturb(&d, i, choice);
        prop_assert!(Derivation::new("bad", sig.clone(), bad.clone()).is_err(), "accepted {:?}", bad[i].1);
        let mut text = String::from("(derivation bad (() nat)");
        for (n, sc) in bad.iter().take(i + 1) {
            let name = |j: usize| if j < bad.len() { bad[j].0.clone() } else { format!("e{j}") };
            let body = match sc {
                Scheme::Comp { head, args, domain } if args.is_empty() => format!("(comp {} () ({}))", name(*head), domain.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")),
                Scheme::Comp { head, args, .. } => format!("(comp {} ({}))", name(*head), args.iter().map(|&a| name(a)).collect::<Vec<_>>().join(" ")),
                Scheme::Mu(g) => format!("(mu {})", name(*g)),
                Scheme::Proj { domain, index } => format!("(proj ({}) {index})", domain.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")),
                Scheme::Prim(f) => format!("(prim {})", f.name),
                Scheme::Const { c, domain } => format!("(const {} ({}))", c.name, domain.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")),
                Scheme::Cases(s) => format!("(cases {s})"),
                Scheme::PrimRec { m, base, step, sel } => format!(
                    "(primrec {m} ({}) ({}) {sel})",
                    base.iter().map(|&b| name(b)).collect::<Vec<_>>().join(" "),
                    step.iter().map(|&b| name(b)).collect::<Vec<_>>().join(" ")
                ),
            };
            text += &format!("\n (entry {n} {body})");
        }
        text += ")";
        let prim_retyped = matches!(&bad[i].1, Scheme::Prim(_));
        if !prim_retyped {
            prop_assert!(parse_derivation(&sig, &text).is_err(), "parsed {text}");
        }
    }

    #[test]
    fn star_detection_is_exact(seed in any::<u64>(), len in 1usize..8) {
        let sig = n_star();
        let d = generate(&sig, seed, len, false);
        prop_assert!(!d.uses_mu());
        let starred = d.entries.iter().any(|e| type_string(&e.domain, &e.range).contains('*'));
        prop_assert_eq!(d.uses_star(), starred);
    }
}
