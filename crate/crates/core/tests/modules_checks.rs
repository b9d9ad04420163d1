use schurcat::linalg::Matrix;
use schurcat::modules::{build_simple, check_relations, is_simple, trivial_module, truncated_verma, GradedModule, RelationCheck, SimpleVerdict};
use schurcat::presentation::{FSpec, Gen, Params};
use schurcat::rootdata::build_cartan;
use schurcat::QScalar;

fn params(s: char, n: usize, f: FSpec) -> Params {
    Params::new(build_cartan(s, n).unwrap(), f)
}

fn constructed() -> Vec<(Params, GradedModule)> {
    let mut out = vec![];
    for f in [FSpec::ClassicalLinear, FSpec::QInteger] {
        let a1 = params('A', 1, f.clone());
        out.push((a1.clone(), trivial_module(&a1, &[0]).unwrap()));
        out.push((a1.clone(), build_simple(&a1, &[1], 8).unwrap()));
        out.push((a1.clone(), build_simple(&a1, &[3], 12).unwrap()));
        out.push((a1.clone(), truncated_verma(&a1, &[-1], 3).unwrap()));
        let a2 = params('A', 2, f.clone());
        out.push((a2.clone(), trivial_module(&a2, &[0, 0]).unwrap()));
        out.push((a2.clone(), build_simple(&a2, &[1, 1], 12).unwrap()));
        let b2 = params('B', 2, f);
        out.push((b2.clone(), trivial_module(&b2, &[0, 0]).unwrap()));
    }
    out
}

#[test]
fn constructed_modules_satisfy_relations() {
    for (p, m) in constructed() {
        assert_eq!(check_relations(&p, &m), RelationCheck::Pass, "{} ({})", m.label, p.f.label());
    }
}

#[test]
fn finite_simples_have_expected_dimensions() {
    let a1 = params('A', 1, FSpec::ClassicalLinear);
    assert_eq!(build_simple(&a1, &[1], 8).unwrap().total_dim(), 3);
    assert_eq!(build_simple(&a1, &[3], 12).unwrap().total_dim(), 7);
    let a2 = params('A', 2, FSpec::ClassicalLinear);
    assert_eq!(build_simple(&a2, &[1, 1], 12).unwrap().total_dim(), 8);
    let q = params('A', 1, FSpec::QInteger);
    assert_eq!(build_simple(&q, &[1], 8).unwrap().total_dim(), 3);
}

#[test]
fn perturbed_module_fails_with_witness() {
    let p = params('A', 1, FSpec::ClassicalLinear);
    let mut m = build_simple(&p, &[1], 8).unwrap();
    let (key, block) = m.ops.iter().find(|((g, _), _)| matches!(g, Gen::X(_))).map(|(k, v)| (k.clone(), v.clone())).unwrap();
    let doubled = block.mul(&Matrix::identity(block.cols).scale(&QScalar::from_int(2)));
    m.set_op(key.0, &key.1, doubled);
    match check_relations(&p, &m) {
        RelationCheck::Fail { relation, weight, residual } => {
            assert!(!relation.is_empty());
            assert!(m.dim(&weight) > 0);
            assert!(residual.iter().flatten().any(|x| !x.is_zero()));
        }
        RelationCheck::Pass => panic!("perturbed module passed"),
    }
}

#[test]
fn simplicity_verdicts() {
    for (p, m) in constructed() {
        if m.truncation.is_none() {
            assert_eq!(is_simple(&p, &m, 7), SimpleVerdict::Simple, "{}", m.label);
        }
    }
    let p = params('A', 1, FSpec::ClassicalLinear);
    let t = trivial_module(&p, &[0]).unwrap();
    let v = build_simple(&p, &[1], 8).unwrap();
    assert!(matches!(is_simple(&p, &t.direct_sum(&v), 7), SimpleVerdict::Reducible { .. }));
    // the Verma module at a dominant weight contains the one at its reflection
    let dom = truncated_verma(&p, &[1], 4).unwrap();
    assert!(!is_simple(&p, &dom, 7).is_simple());
}

#[test]
fn module_json_round_trip() {
    for (_, m) in constructed() {
        let j = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<GradedModule>(&j).unwrap(), m);
    }
}

#[test]
fn trivial_needs_vanishing_f() {
    let p = params('A', 1, FSpec::ClassicalLinear);
    assert!(trivial_module(&p, &[1]).is_err());
}
