use adt_core::algebra::{builtin, satisfies, satisfies_with, SampleConfig};
use adt_core::corpus::{load, CORPUS};
use adt_core::schemes::{Derivation, Scheme};
use adt_core::spec::*;
use adt_core::syntax::{n_standardize, parse_formula, parse_signature, Atom, Signature, Sort};
use proptest::prelude::*;
use std::sync::Arc;

fn n_sig() -> Signature {
    builtin("N").unwrap().into_algebra().signature().clone()
}

/// Number of defining equations each scheme should contribute.
fn expected_equations(sc: &Scheme) -> usize {
    match sc {
        Scheme::Cases(_) => 2,
        Scheme::PrimRec { m, .. } => 2 * m,
        _ => 1,
    }
}

#[test]
fn per_entry_equation_counts() {
    for it in CORPUS {
        let (d, _) = load(it.name).unwrap();
        let spec = compile_mupr_spec(&d).unwrap();
        for (k, e) in d.entries.iter().enumerate() {
            let n = spec.axioms.iter().filter(|a| matches!(a.provenance, Provenance::Scheme(j) | Provenance::FMu(j) if j == k)).count();
            assert_eq!(n, expected_equations(&e.scheme), "{} entry {k}", it.name);
        }
        spec.check().unwrap();
    }
}

#[test]
fn cases_equations() {
    let (d, _) = load("choose").unwrap();
    let spec = compile_pr_spec(&d).unwrap();
    let k = d.entries.iter().position(|e| matches!(e.scheme, Scheme::Cases(_))).unwrap();
    let eqs: Vec<String> = spec.axioms.iter().filter(|a| a.provenance == Provenance::Scheme(k)).map(|a| a.formula.to_string()).collect();
    let f = format!("f{k}_");
    assert_eq!(eqs.len(), 2);
    assert!(eqs[0].starts_with(&format!("(= ({f}")) && eqs[0].contains(" true x1:nat x2:nat) x1:nat)"), "{}", eqs[0]);
    assert!(eqs[1].contains(" false x1:nat x2:nat) x2:nat)"), "{}", eqs[1]);
    assert!(spec.axioms.iter().all(|a| a.formula.antecedents.is_empty()));
}

#[test]
fn fibonacci_pair_has_four_recursion_equations() {
    let (d, _) = load("fib").unwrap();
    let spec = compile_pr_spec(&d).unwrap();
    let k = d.entries.len() - 1;
    assert_eq!(spec.axioms.iter().filter(|a| a.provenance == Provenance::Scheme(k)).count(), 4);
    // The unselected component gets its own symbol.
    assert_eq!(spec.introduced.len(), d.entries.len() + 1);
}

#[test]
fn compile_errors() {
    let d = Derivation { name: "empty".into(), signature: Arc::new(n_sig()), entries: vec![] };
    let e = compile_pr_spec(&d).unwrap_err();
    assert!(e.to_string().contains("derivation must be nonempty"), "{e}");
    let (isqrt, _) = load("isqrt").unwrap();
    assert!(compile_pr_spec(&isqrt).is_err());
}

#[test]
fn mu_axioms() {
    let (d, _) = load("isqrt").unwrap();
    let spec = compile_mupr_spec(&d).unwrap();
    let fmu: Vec<_> = spec.axioms.iter().filter(|a| matches!(a.provenance, Provenance::FMu(_))).collect();
    assert_eq!(fmu.len(), 1);
    assert_eq!(fmu[0].formula.bu_count(), 1);
    assert_eq!(fmu[0].formula.antecedents.len(), 2);

    let (d, _) = load("twomu").unwrap();
    let spec = compile_mupr_spec(&d).unwrap();
    let fmu: Vec<_> = spec.axioms.iter().filter(|a| matches!(a.provenance, Provenance::FMu(_))).collect();
    assert_eq!(fmu.len(), d.mu_sites().len());
    assert_eq!(fmu.len(), 2);
    let g = |a: &Axiom| match &a.formula.antecedents[1] {
        Atom::Eq(l, _) => l.head().unwrap().name.clone(),
        _ => panic!(),
    };
    assert_ne!(g(fmu[0]), g(fmu[1]));
}

#[test]
fn mupr_on_pr_input() {
    for it in CORPUS {
        let (d, _) = load(it.name).unwrap();
        if d.uses_mu() {
            continue;
        }
        let pr = compile_pr_spec(&d).unwrap();
        let mu = compile_mupr_spec(&d).unwrap();
        let arr = mu.axioms.iter().filter(|a| a.provenance == Provenance::ArrAx).count();
        assert_eq!(arr > 0, d.uses_star(), "{}", it.name);
        assert_eq!(&mu.axioms[arr..], &pr.axioms[..], "{}", it.name);
    }
}

#[test]
fn compiled_specs_hold_under_interpretation() {
    for it in CORPUS {
        let (d, a) = load(it.name).unwrap();
        let spec = compile_mupr_spec(&d).unwrap();
        let m = compiled_algebra(&d, &a, &spec, 100_000).unwrap();
        // Unary arithmetic makes large arguments expensive.
        let cfg = SampleConfig { nat_max: 6, ..SampleConfig::default() };
        for (i, ax) in spec.axioms.iter().enumerate() {
            let v = satisfies_with(&m, &ax.formula, 200, 7 + i as u64, &cfg).unwrap();
            assert!(v.holds(), "{} axiom {}: {} fails: {:?}", it.name, i, ax.formula, v);
        }
    }
}

#[test]
fn fresh_names_are_deterministic_and_distinct() {
    let (add, _) = load("add").unwrap();
    let (mult, _) = load("mult").unwrap();
    let a1 = compile_pr_spec(&add).unwrap();
    let a2 = compile_pr_spec(&add).unwrap();
    assert_eq!(a1, a2);
    let m = compile_pr_spec(&mult).unwrap();
    assert!(a1.introduced.is_disjoint(&m.introduced));
}

fn arr_count(spec: &SpecSet, s: &Sort) -> (usize, usize) {
    let star = s.star().to_string();
    let mine: Vec<_> = spec.axioms.iter().filter(|a| a.formula.to_string().contains(&format!(":{star}")) || a.formula.to_string().contains(&format!("Lgth_{s}"))).collect();
    (mine.len(), mine.iter().filter(|a| a.formula.bu_count() > 0).count())
}

#[test]
fn array_axiom_shapes() {
    let rn = builtin("RN").unwrap().into_algebra();
    let spec = array_axioms(rn.signature()).unwrap();
    assert_eq!(arr_count(&spec, &Sort::Real), (7, 0));

    let beq = n_standardize(builtin("Beq").unwrap().algebra().signature()).unwrap();
    let spec = array_axioms(&beq).unwrap();
    assert_eq!(spec.axioms.len(), 8);
    assert_eq!(spec.axioms[0].formula.to_string(), "(= (Lgth_bool Null_bool) 0)");
    assert_eq!(spec.bu_occurrences(), 1);
    assert_eq!(spec.axioms.iter().filter(|a| a.formula.bu_count() > 0).count(), 1);
    assert!(spec.axioms[7].formula.bu_count() == 1);

    let b = n_standardize(builtin("B").unwrap().algebra().signature()).unwrap();
    assert_eq!(array_axioms(&b).unwrap().axioms.len(), 7);
}

fn eq_sig(s: usize, t: usize) -> Signature {
    let mut text = String::from("(signature T (flags n-standard) (sorts");
    for i in 0..s {
        text += &format!(" e{i}");
    }
    for i in 0..t {
        text += &format!(" n{i}");
    }
    text += ") (eqsorts bool";
    for i in 0..s {
        text += &format!(" e{i}");
    }
    text += ")";
    for i in 0..s {
        text += &format!(" (const c{i} e{i}) (default e{i} c{i})");
    }
    for i in 0..t {
        text += &format!(" (const k{i} n{i}) (default n{i} k{i})");
    }
    parse_signature(&(text + ")")).unwrap()
}

#[test]
fn axiom_count_identities() {
    for s in 0..4 {
        let sig = eq_sig(s, 0);
        let arr = array_axioms(&sig).unwrap();
        let c = count_report(&arr);
        let sorts = s + 1;
        assert_eq!(c.axioms, 8 * sorts);
        assert_eq!(c.bu_occurrences, sorts);
        for mode in [ElimMode::Bool, ElimMode::SortD] {
            let el = eliminate_bu(&arr, mode).unwrap();
            let c2 = count_report(&el);
            assert_eq!(c2.axioms, 12 * sorts);
            assert_eq!(c2.bu_occurrences, 0);
            assert_eq!(c2.symbols, c.symbols + sorts);
            assert_eq!(c2.sorts, c.sorts + usize::from(mode == ElimMode::SortD));
        }
    }
    assert_eq!(count_report(&SpecSet::new(Signature::new("empty"))), CountReport::default());
}

#[test]
fn sort_d_on_two_equality_sorts() {
    let sig = eq_sig(1, 0);
    let arr = array_axioms(&sig).unwrap();
    let e = arr.axioms.len();
    let el = eliminate_bu(&arr, ElimMode::SortD).unwrap();
    let (c0, c1) = (count_report(&arr), count_report(&el));
    assert_eq!(c1.sorts, c0.sorts + 1);
    assert_eq!(c1.symbols, c0.symbols + 2);
    assert_eq!(c1.constants, c0.constants + 1);
    assert_eq!(c1.axioms, e + 8);
    assert_eq!(el.signature.hidden_sorts().len(), 1);
}

#[test]
fn elimination_counts() {
    let sig = n_sig();
    let mut spec = SpecSet::new(sig.clone());
    for t in ["(= (S 0) (S 0))", "(forall-lt z:nat #2 (= (eq_nat z:nat z:nat) true))", "(= 0 0)"] {
        spec.push(parse_formula(&sig, t).unwrap(), Provenance::User);
    }
    let el = eliminate_bu(&spec, ElimMode::Bool).unwrap();
    assert_eq!(el.axioms.len(), 7);
    assert_eq!(el.signature.funcs().len(), sig.funcs().len() + 1);
    assert_eq!(el.bu_occurrences(), 0);
    // The rewritten axiom stays in place, followed by its four new axioms.
    assert_eq!(el.axioms[1].provenance, Provenance::User);
    assert!(el.axioms[2..6].iter().all(|a| a.provenance == Provenance::BuElim));
    assert_eq!(el.axioms[6].formula.to_string(), "(= 0 0)");

    let mut plain = SpecSet::new(sig.clone());
    plain.push(parse_formula(&sig, "(= 0 0)").unwrap(), Provenance::User);
    assert_eq!(eliminate_bu(&plain, ElimMode::SortD).unwrap(), plain);
}

#[test]
fn nested_quantifiers_innermost_first() {
    let sig = n_sig();
    let mut spec = SpecSet::new(sig.clone());
    let t = "(forall-lt y:nat x:nat (forall-lt z:nat y:nat (= (less_nat z:nat y:nat) true)))";
    spec.push(parse_formula(&sig, t).unwrap(), Provenance::User);
    let el = eliminate_bu(&spec, ElimMode::Bool).unwrap();
    assert_eq!(el.axioms.len(), 9);
    let text = el.axioms[0].formula.to_string();
    assert!(text.starts_with("(= (chi1 x:nat x:nat) true)"), "{text}");
    assert!(el.axioms[1].formula.to_string().contains("chi0"));
}

#[test]
fn nstd_axioms_open_and_closed() {
    let sig = n_sig();
    let open = nstd_axioms(&sig, NStdMode::Open).unwrap();
    let texts: Vec<String> = open.formulas().map(|f| f.to_string()).collect();
    assert!(texts.contains(&"(= (or false false) false)".to_string()));
    assert!(texts.contains(&"(= (and true true) true)".to_string()));
    assert!(!texts.iter().any(|t| t.contains("(eq_nat x:nat x:nat)")));
    let n = builtin("N").unwrap().into_algebra();
    for f in open.formulas() {
        assert!(satisfies(&n, f, 100, 3).unwrap().holds(), "{f}");
    }
    let closed = nstd_axioms(&sig, NStdMode::ClosedInstances(1)).unwrap();
    assert!(!closed.axioms.is_empty());
    assert!(closed.formulas().all(|f| f.is_closed()));
    let bigger = nstd_axioms(&sig, NStdMode::ClosedInstances(2)).unwrap();
    assert!(bigger.axioms.len() > closed.axioms.len());

    let beq = n_standardize(builtin("Beq").unwrap().algebra().signature()).unwrap();
    let open = nstd_axioms(&beq, NStdMode::Open).unwrap();
    assert!(open.formulas().any(|f| f.to_string() == "(= (eq_bool x:bool x:bool) true)"));
    assert!(nstd_axioms(builtin("B").unwrap().algebra().signature(), NStdMode::Open).is_err());
}

#[test]
fn boundedness() {
    let sig = n_sig();
    let p = match parse_formula(&sig, "(= (eq_nat z:nat z:nat) true)").unwrap().consequent {
        a @ Atom::Eq(..) => a,
        _ => unreachable!(),
    };
    let q = parse_formula(&sig, "(= (less_nat z:nat (S z:nat)) true)").unwrap().consequent;
    let one = boundedness_instances(&sig, std::slice::from_ref(&p), 2).unwrap();
    assert_eq!(one.axioms.len(), 3);
    assert!(one.axioms[0].formula.antecedents.is_empty());
    assert_eq!(one.axioms[0].formula.consequent.bu_count(), 1);
    assert_eq!(one.axioms[2].formula.antecedents.len(), 2);
    assert_eq!(boundedness_instances(&sig, &[p.clone(), q], 3).unwrap().axioms.len(), 8);
    let n = builtin("N").unwrap().into_algebra();
    for f in one.formulas() {
        assert!(satisfies(&n, f, 1, 0).unwrap().holds());
    }
    let two = parse_formula(&sig, "(= z1:nat z2:nat)").unwrap().consequent;
    assert!(boundedness_instances(&sig, &[two], 1).is_err());
}

#[test]
fn spec_file_round_trip() {
    for name in ["fib", "isqrt", "arrlen"] {
        let (d, _) = load(name).unwrap();
        let spec = compile_mupr_spec(&d).unwrap();
        for s in [spec.clone(), eliminate_bu(&spec, ElimMode::Bool).unwrap(), eliminate_bu(&spec, ElimMode::SortD).unwrap()] {
            let text = print_spec(&s);
            let back = parse_spec(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
            assert_eq!(back.axioms, s.axioms);
            assert_eq!(back.introduced, s.introduced);
            assert_eq!(back.target, s.target);
            assert_eq!(print_spec(&back), text);
        }
    }
}

proptest! {
    #[test]
    fn arrax_counts(s in 0usize..4, t in 0usize..3) {
        let sig = eq_sig(s, t);
        let arr = array_axioms(&sig).unwrap();
        // bool is an equality sort here, so it contributes eight axioms.
        prop_assert_eq!(arr.axioms.len(), 8 * (s + 1) + 7 * t);
        prop_assert_eq!(arr.bu_occurrences(), s + 1);
        let el = eliminate_bu(&arr, ElimMode::SortD).unwrap();
        prop_assert_eq!(el.axioms.len(), arr.axioms.len() + 4 * (s + 1));
        prop_assert!(el.check().is_ok());
    }
}
