use adt_core::algebra::{builtin, star_algebra, Value};
use adt_core::corpus::load;
use adt_core::extract::*;
use adt_core::interp::{run, DEFAULT_FUEL};
use adt_core::prover::term_universe;
use adt_core::schemes::parse_derivation;
use adt_core::spec::*;
use adt_core::syntax::{numeral, parse_formula, parse_term};
use adt_core::Error;
use std::sync::Arc;

fn isqrt_scan(x: u64) -> u64 {
    (0..).find(|z| x < (z + 1) * (z + 1)).unwrap()
}

/// Symbol compiled for entry k.
fn entry_symbol(spec: &SpecSet, k: usize) -> Arc<str> {
    let p = format!("f{k}_");
    spec.introduced.iter().find(|n| n.starts_with(&p)).unwrap().clone()
}

#[test]
fn naming_terms() {
    let n = builtin("N").unwrap().into_algebra();
    let u = term_universe(n.signature(), 2, 5, 1_000_000).unwrap();
    let t = find_naming_term(&n, &u, &[Value::nat(3), Value::Bool(true)]).unwrap();
    assert_eq!(t[0], numeral(3));
    assert_eq!(t[1], parse_term(n.signature(), "true").unwrap());

    let b = star_algebra(builtin("B").unwrap().algebra()).unwrap();
    let u = term_universe(b.signature(), 1, 2, 1_000_000).unwrap();
    let one = Value::Array(adt_core::syntax::Sort::Bool, vec![Value::Bool(true)]);
    let e = find_naming_term(&b, &u, std::slice::from_ref(&one)).unwrap_err();
    assert!(e.to_string().contains("not named at this depth"), "{e}");
    let u = term_universe(b.signature(), 3, 2, 1_000_000).unwrap();
    let t = find_naming_term(&b, &u, std::slice::from_ref(&one)).unwrap();
    assert_eq!(b.eval_closed(&t[0]).unwrap(), one);
}

#[test]
fn fact_value() {
    let (d, a) = load("fact").unwrap();
    let spec = compile_pr_spec(&d).unwrap();
    let task = ExtractionTask::for_spec(&spec, vec![numeral(3)]).unwrap();
    let x = extract_value(&task, Some(&a), &ExtractConfig::default()).unwrap();
    assert_eq!(x.term, numeral(6));
    assert_eq!(x.value.as_deref(), Some("6"));
}

#[test]
fn isqrt_after_elimination() {
    let (d, a) = load("isqrt").unwrap();
    let spec = eliminate_bu(&compile_mupr_spec(&d).unwrap(), ElimMode::SortD).unwrap();
    let mut ex = Extractor::new();
    for x in [0u64, 3, 4, 10] {
        let task = ExtractionTask::for_spec(&spec, vec![numeral(x)]).unwrap();
        let r = ex.extract(&task, Some(&a), &ExtractConfig::default()).unwrap();
        assert_eq!(r.term, numeral(isqrt_scan(x)), "isqrt({x})");
    }
}

#[test]
fn inconsistent_spec_is_gated() {
    let (d, _) = load("add").unwrap();
    let mut spec = compile_pr_spec(&d).unwrap();
    let f = parse_formula(&spec.signature, "(= true false)").unwrap();
    spec.push(f, Provenance::User);
    let task = ExtractionTask::for_spec(&spec, vec![numeral(1), numeral(2)]).unwrap();
    assert!(matches!(extract_value(&task, None, &ExtractConfig::default()), Err(Error::Inconsistent)));
}

#[test]
fn witness_avoids_hidden_symbols() {
    let (d, _) = load("twomu").unwrap();
    let spec = eliminate_bu(&compile_mupr_spec(&d).unwrap(), ElimMode::Bool).unwrap();
    let task = ExtractionTask::for_spec(&spec, vec![numeral(2)]).unwrap();
    let r = extract_value(&task, None, &ExtractConfig::default()).unwrap();
    let mut syms = std::collections::BTreeSet::new();
    r.term.symbols(&mut syms);
    assert!(syms.iter().all(|s| !spec.introduced.contains(s)));
}

#[test]
fn no_pure_witness_is_distinct() {
    let sig = adt_core::syntax::parse_signature("(signature H (flags n-standard) (const h nat))").unwrap();
    let mut spec = SpecSet::new(sig.clone());
    let h = sig.sym("h").unwrap();
    spec.introduced.insert(h.name.clone());
    let task = ExtractionTask { spec, target: h, args: vec![], params: vec![] };
    let cfg = ExtractConfig { max_depth: 3, ..Default::default() };
    assert!(matches!(extract_value(&task, None, &cfg), Err(Error::NoPureWitness(_))));
}

#[test]
fn budget_is_enforced() {
    let (d, _) = load("fact").unwrap();
    let spec = compile_pr_spec(&d).unwrap();
    let task = ExtractionTask::for_spec(&spec, vec![numeral(8)]).unwrap();
    let cfg = ExtractConfig { budget: std::time::Duration::from_millis(1), ..Default::default() };
    assert!(matches!(extract_value(&task, None, &cfg), Err(Error::Budget(_))));
}

#[test]
fn witness_is_model_independent() {
    let (d, a) = load("add").unwrap();
    let spec = compile_pr_spec(&d).unwrap();
    let c = compiled_algebra(&d, &a, &spec, DEFAULT_FUEL).unwrap();
    let task = ExtractionTask::for_spec(&spec, vec![numeral(2), numeral(2)]).unwrap();
    let x = extract_value(&task, Some(&a), &ExtractConfig::default()).unwrap();
    let y = extract_value(&task, Some(&c), &ExtractConfig::default()).unwrap();
    assert_eq!(x, y);
}

#[test]
fn agreement_with_interpreter() {
    for name in ["add", "pred", "plus3", "iszero"] {
        let (d, a) = load(name).unwrap();
        let spec = compile_pr_spec(&d).unwrap();
        let arity = d.last().domain.len();
        let mut ex = Extractor::new();
        let tuples: Vec<Vec<u64>> = if arity == 1 { (0..=4).map(|x| vec![x]).collect() } else { (0..=3).flat_map(|x| (0..=3).map(move |y| vec![x, y])).collect() };
        for args in tuples {
            let vals: Vec<Value> = args.iter().map(|&x| Value::nat(x)).collect();
            let want = run(&d, &a, &vals, DEFAULT_FUEL).unwrap();
            let task = ExtractionTask::for_spec(&spec, args.iter().map(|&x| numeral(x)).collect()).unwrap();
            let got = ex.extract(&task, Some(&a), &ExtractConfig::default()).unwrap();
            assert_eq!(got.value, Some(want.to_string()), "{name}{args:?}");
        }
    }
}

#[test]
fn strong_specifiability() {
    let (d, a) = load("fact").unwrap();
    let spec = compile_pr_spec(&d).unwrap();
    let c = compiled_algebra(&d, &a, &spec, DEFAULT_FUEL).unwrap();
    let f = spec.target.clone().unwrap();
    let all = Subalgebra { seeds: vec![], ops: Some(vec!["S".into()]), member: Some(Arc::new(|_| true)), bound: 12 };
    assert!(matches!(check_strong_specifiability(&c, &f.name, &all, 20, 1).unwrap(), StrongVerdict::Closed { .. }));

    let n = builtin("N").unwrap().into_algebra();
    let text = "(derivation evens ((nat) nat) (entry succ (prim S)) (entry two (comp succ (succ))))";
    let d = parse_derivation(n.signature(), text).unwrap();
    let spec = compile_pr_spec(&d).unwrap();
    let c = compiled_algebra(&d, &n, &spec, DEFAULT_FUEL).unwrap();
    let plus2 = entry_symbol(&spec, 1);
    let succ = entry_symbol(&spec, 0);
    let evens = Subalgebra {
        seeds: vec![Value::nat(0)],
        ops: Some(vec![plus2.clone()]),
        member: Some(Arc::new(|v: &Value| v.as_u64().is_ok_and(|x| x % 2 == 0))),
        bound: 40,
    };
    match check_strong_specifiability(&c, &succ, &evens, 20, 3).unwrap() {
        StrongVerdict::Counterexample { args, value } => {
            let x: u64 = args[0].parse().unwrap();
            assert_eq!(value, (x + 1).to_string());
            assert_eq!(x % 2, 0);
        }
        v => panic!("{v:?}"),
    }
    assert!(matches!(check_strong_specifiability(&c, &plus2, &evens, 20, 3).unwrap(), StrongVerdict::Closed { .. }));
    let bare = Subalgebra { member: None, ..evens };
    assert!(matches!(check_strong_specifiability(&c, &succ, &bare, 20, 3), Err(Error::Resource(_))));
}

#[test]
fn minimal_subalgebra_of_booleans() {
    let b = builtin("B").unwrap().into_algebra();
    let empty = Subalgebra { seeds: vec![], ops: None, member: None, bound: 10 };
    let (elems, complete) = generate(&b, &empty, "").unwrap();
    assert!(complete);
    assert_eq!(elems.values().map(Vec::len).sum::<usize>(), 2);
    assert!(matches!(check_strong_specifiability(&b, "not", &empty, 10, 0).unwrap(), StrongVerdict::Closed { .. }));
}
