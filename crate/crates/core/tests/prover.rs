use adt_core::algebra::{builtin, star_algebra};
use adt_core::corpus::load;
use adt_core::interp::{run, DEFAULT_FUEL};
use adt_core::algebra::Value;
use adt_core::prover::*;
use adt_core::spec::*;
use adt_core::syntax::{numeral, parse_formula, parse_signature, parse_term, Signature, Term};
use adt_core::Error;
use std::time::Instant;

fn n_sig() -> Signature {
    builtin("N").unwrap().into_algebra().signature().clone()
}

fn spec_of(sig: &Signature, axioms: &[&str]) -> SpecSet {
    let mut s = SpecSet::new(sig.clone());
    for a in axioms {
        s.push(parse_formula(sig, a).unwrap(), Provenance::User);
    }
    s
}

fn nstd_model(depth: u32, cap: u64) -> TermModel {
    let spec = with_nstd(&SpecSet::new(n_sig())).unwrap();
    initial_model(&spec, depth, cap).unwrap()
}

fn fact_model(depth: u32, cap: u64) -> (SpecSet, TermModel) {
    let (d, _) = load("fact").unwrap();
    let spec = with_nstd(&compile_pr_spec(&d).unwrap()).unwrap();
    let m = initial_model(&spec, depth, cap).unwrap();
    (spec, m)
}

fn apply(spec: &SpecSet, args: Vec<Term>) -> Term {
    Term::app(spec.target.as_ref().unwrap(), args)
}

#[test]
fn single_merge() {
    let sig = parse_signature("(signature C (sorts e) (const c e) (const d e) (const k e) (default e c))").unwrap();
    let spec = spec_of(&sig, &["(= c d)"]);
    let u = term_universe(&sig, 1, 0, 1000).unwrap();
    let mut m = ground_closure(&spec, &u, 100).unwrap();
    let t = |s: &str| parse_term(&sig, s).unwrap();
    assert!(m.proves_equal(&t("c"), &t("d")).unwrap());
    assert!(!m.proves_equal(&t("c"), &t("k")).unwrap());
    assert!(m.proves_equal(&t("k"), &t("k")).unwrap());
    assert!(m.saturated);
}

#[test]
fn empty_spec_is_free() {
    let sig = parse_signature("(signature C (sorts e) (const c e) (const d e) (default e c))").unwrap();
    let mut m = initial_model(&SpecSet::new(sig.clone()), 2, 0).unwrap();
    assert!(!m.proves_equal(&parse_term(&sig, "c").unwrap(), &parse_term(&sig, "d").unwrap()).unwrap());
    assert!(m.graph.log.is_empty());
}

#[test]
fn nstd_ground_facts() {
    let sig = n_sig();
    let mut m = nstd_model(1, 4);
    let t = |s: &str| parse_term(&sig, s).unwrap();
    assert!(m.proves_equal(&t("(eq_nat #2 #2)"), &t("true")).unwrap());
    assert!(m.proves_equal(&t("(eq_nat #2 #3)"), &t("false")).unwrap());
    assert!(m.proves_equal(&t("(less_nat #0 #1)"), &t("true")).unwrap());
    assert!(m.proves_equal(&t("(less_nat #3 #1)"), &t("false")).unwrap());
    assert!(m.proves_equal(&t("(if_nat (less_nat #1 #2) #4 #0)"), &t("#4")).unwrap());
    assert!(m.flags().n_standard());
}

#[test]
fn inconsistent_spec() {
    let sig = n_sig();
    let m = initial_model(&spec_of(&sig, &["(= true false)"]), 1, 2).unwrap();
    assert!(!m.flags().consistent);
    let m = nstd_model(1, 2);
    assert!(m.flags().consistent);
}

#[test]
fn fact_is_determined() {
    let (spec, mut m) = fact_model(2, 8);
    for n in 0..=3u64 {
        let want: u64 = (1..=n).product();
        assert!(m.proves_equal(&apply(&spec, vec![numeral(n)]), &numeral(want)).unwrap(), "fact({n})");
        assert!(!m.proves_equal(&apply(&spec, vec![numeral(n)]), &numeral(want + 1)).unwrap());
    }
    assert!(m.flags().n_standard());
}

#[test]
fn fact_agrees_with_interpreter() {
    let (d, a) = load("fact").unwrap();
    let (spec, mut m) = fact_model(2, 8);
    for n in 0..=3u64 {
        let v = run(&d, &a, &[Value::nat(n)], DEFAULT_FUEL).unwrap().as_u64().unwrap();
        assert!(m.proves_equal(&apply(&spec, vec![numeral(n)]), &numeral(v)).unwrap());
    }
}

#[test]
fn undetermined_boolean_constant() {
    let sig = parse_signature("(signature U (flags standard) (const u bool))").unwrap();
    for spec in [SpecSet::new(sig.clone()), nstd_bool(&sig)] {
        let m = initial_model(&spec, 2, 0).unwrap();
        let f = m.flags();
        assert!(f.consistent);
        assert!(!f.determines_bool);
        let u = m.graph.lookup_term(&parse_term(&sig, "u").unwrap()).unwrap();
        assert_eq!(m.graph.members(u).count(), 1);
    }
}

/// The boolean fragment of the N-standard axioms, for a signature without nat.
fn nstd_bool(sig: &Signature) -> SpecSet {
    spec_of(
        sig,
        &[
            "(= (and true true) true)",
            "(= (and true false) false)",
            "(= (and false true) false)",
            "(= (and false false) false)",
            "(= (not true) false)",
            "(= (not false) true)",
        ],
    )
}

#[test]
fn array_length_of_null() {
    let b = star_algebra(builtin("B").unwrap().algebra()).unwrap();
    let spec = array_axioms(b.signature()).unwrap();
    let sig = &spec.signature;
    let mut m = initial_model(&with_nstd(&spec).unwrap(), 1, 3).unwrap();
    let t = |s: &str| parse_term(sig, s).unwrap();
    assert!(m.proves_equal(&t("(Lgth_bool Null_bool)"), &t("#0")).unwrap());
    assert!(m.proves_equal(&t("(Lgth_bool (Newlength_bool Null_bool #2))"), &t("#2")).unwrap());
}

#[test]
fn inequalities_rejected() {
    let sig = builtin("RN").unwrap().into_algebra().signature().clone();
    let spec = spec_of(&sig, &["(< zero_r one_r)"]);
    assert!(matches!(initial_model(&spec, 1, 1), Err(Error::Spec(_))));
}

#[test]
fn universe_contents() {
    let b = builtin("B").unwrap().into_algebra().signature().clone();
    let u = term_universe(&b, 2, 0, 10_000).unwrap();
    assert!(u.contains(&parse_term(&b, "(and true false)").unwrap()));
    assert!(!u.contains(&parse_term(&b, "(and (not true) false)").unwrap()));
    let n = n_sig();
    let u = term_universe(&n, 1, 5, 10_000).unwrap();
    for k in 0..=5 {
        assert!(u.contains(&numeral(k)));
    }
    let e = term_universe(&n, 3, 2, 50).unwrap_err();
    assert!(matches!(e, Error::Resource(_)));
    assert!(e.to_string().contains("sort"), "{e}");
    assert!(term_universe(&n, 0, 2, 50).is_err());
}

#[test]
fn ceiling_is_enforced() {
    let spec = SpecSet::new(n_sig());
    let mut cfg = ModelConfig::new(3, 3, UniverseMode::Full(base_symbols(&spec)));
    cfg.ceiling = 200;
    let e = initial_model_with(&spec, cfg).err().unwrap();
    assert!(e.to_string().contains("sort"), "{e}");
}

#[test]
fn replay_accepts_the_log() {
    let (_, m) = fact_model(2, 8);
    assert!(!m.graph.log.is_empty());
    let full = replay(&m, None, 0).unwrap();
    assert_eq!(full.checked, full.merges);
    let part = replay(&m, Some(100), 7).unwrap();
    assert_eq!(part.checked, 100.min(part.merges));
}

#[test]
fn replay_rejects_a_forged_step() {
    let sig = parse_signature("(signature C (sorts e) (const c e) (const d e) (const k e) (default e c))").unwrap();
    let spec = spec_of(&sig, &["(= c d)", "(= d d)"]);
    let mut m = initial_model(&spec, 1, 0).unwrap();
    assert_eq!(m.graph.log.len(), 1);
    replay(&m, None, 0).unwrap();
    let k = m.graph.lookup_term(&parse_term(&sig, "k").unwrap()).unwrap();
    let b = m.graph.log[0].b;
    m.graph.log[0].b = k;
    assert!(replay(&m, None, 0).is_err());
    m.graph.log[0].b = b;
    if let Justification::Axiom { axiom, .. } = &mut m.graph.log[0].why {
        *axiom = 1;
    }
    assert!(replay(&m, None, 0).is_err());
}

#[test]
fn deterministic_dump() {
    let a = fact_model(2, 6).1.dump();
    let b = fact_model(2, 6).1.dump();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn depth_monotone() {
    let sig = n_sig();
    let terms: Vec<Term> = term_universe(&sig, 2, 2, 100_000).unwrap().all().cloned().collect();
    let spec = with_nstd(&SpecSet::new(sig)).unwrap();
    let p2 = initial_model(&spec, 2, 2).unwrap().partition(&terms).unwrap();
    let p3 = initial_model(&spec, 3, 2).unwrap().partition(&terms).unwrap();
    for i in 0..terms.len() {
        if p2[i] != i {
            assert_eq!(p3[i], p3[p2[i]]);
        }
    }
}

#[test]
fn strictly_n_standard_depths() {
    let spec = with_nstd(&SpecSet::new(n_sig())).unwrap();
    for depth in 2..=4 {
        let m = initial_model(&spec, depth, 3).unwrap();
        assert!(m.flags().n_standard(), "depth {depth}");
    }
}

#[test]
fn proved_equations_hold_in_the_algebra() {
    for name in ["add", "pred", "choose"] {
        let (d, a) = load(name).unwrap();
        let spec = with_nstd(&compile_pr_spec(&d).unwrap()).unwrap();
        let alg = compiled_algebra(&d, &a, &spec, DEFAULT_FUEL).unwrap();
        let mut m = initial_model(&spec, 2, 3).unwrap();
        let args: Vec<Vec<Term>> = match d.entries.last().unwrap().domain.len() {
            1 => (0..3).map(|x| vec![numeral(x)]).collect(),
            2 => (0..3).flat_map(|x| (0..3).map(move |y| vec![numeral(x), numeral(y)])).collect(),
            _ => vec![],
        };
        for a in args {
            m.class_of(&apply(&spec, a)).unwrap();
        }
        for c in m.graph.roots().collect::<Vec<_>>() {
            let vals: Vec<Value> = m.graph.members(c).map(|n| alg.eval_closed(&m.graph.node_term(n)).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[0] == w[1]), "{name}");
        }
    }
}

#[test]
fn fact_performance() {
    let t = Instant::now();
    let (spec, mut m) = fact_model(4, 24);
    for n in 0..=4u64 {
        let want: u64 = (1..=n).product();
        assert!(m.proves_equal(&apply(&spec, vec![numeral(n)]), &numeral(want)).unwrap());
    }
    assert!(t.elapsed().as_secs() < 60, "{:?}", t.elapsed());
}
