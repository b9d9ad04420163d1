use schurcat::ext::{
    direct_gb, euler_check, ext_table, low_degree_ext, minimal_resolution, ring_invariants, run_window, schur_check, target_verdict, yoneda, ExtConfig,
    ExtWorkspace, Verdict,
};
use schurcat::error::Error;
use schurcat::gbasis::{groebner, DegreeCap};
use schurcat::modules::{build_simple, trivial_module, truncated_verma, GradedModule, ModuleKind};
use schurcat::presentation::{instantiate_window, FSpec, Params, QMode};
use schurcat::rootdata::build_cartan;
use schurcat::{QPoint, QScalar};

fn a1(f: FSpec) -> Params {
    Params::new(build_cartan('A', 1).unwrap(), f)
}

fn simples(p: &Params) -> Vec<GradedModule> {
    vec![
        trivial_module(p, &[0]).unwrap(),
        build_simple(p, &[1], 8).unwrap(),
        truncated_verma(p, &[-1], 3).unwrap(),
    ]
}

#[test]
fn resolution_terms_for_the_trivial_module() {
    let p = a1(FSpec::ClassicalLinear);
    let pres = instantiate_window(&p, 6, 4).unwrap();
    let gb = groebner(&pres, DegreeCap::len(12)).unwrap();
    let t = trivial_module(&p, &[0]).unwrap();
    let r = minimal_resolution(&pres, &gb, &t, 4).unwrap();
    assert_eq!(r.terms(0).into_iter().collect::<Vec<_>>(), vec![(vec![0], 1)]);
    // one generator per arrow leaving the support, none from level 3 on
    assert_eq!(r.terms(1).values().sum::<usize>(), 2);
    assert_eq!(r.terms(2).values().sum::<usize>(), 1);
    assert!(r.vanishes_from(3));
}

#[test]
fn zero_module_has_zero_resolution() {
    let p = a1(FSpec::ClassicalLinear);
    let pres = instantiate_window(&p, 6, 4).unwrap();
    let gb = groebner(&pres, DegreeCap::len(12)).unwrap();
    let z = GradedModule::empty(1, "zero", ModuleKind::Custom);
    let r = minimal_resolution(&pres, &gb, &z, 4).unwrap();
    assert!((0..=5).all(|k| r.terms(k).is_empty()));
    let e = euler_check(&p, &z, &z, &ExtConfig::new(6, 4, 4), &mut direct_gb).unwrap();
    assert_eq!(e.euler_ext, 0);
}

#[test]
fn d_squared_zero_on_every_run() {
    let cases: Vec<(Params, Vec<GradedModule>, ExtConfig)> = vec![
        (a1(FSpec::ClassicalLinear), simples(&a1(FSpec::ClassicalLinear)), ExtConfig::new(7, 3, 3)),
        (a1(FSpec::QInteger), simples(&a1(FSpec::QInteger))[..2].to_vec(), ExtConfig::new(6, 4, 4)),
    ];
    for (p, mods, cfg) in cases {
        let (run, ()) = run_window(&p, &mods, &cfg, &mut direct_gb, |ws| {
            for i in 0..mods.len() {
                ws.ext(i, i, cfg.homcap)?;
            }
            Ok(())
        })
        .unwrap();
        for certs in &run.certificates {
            assert!(certs.iter().all(|c| c.d_squared_zero && c.leading_terms_ok), "{:?}", run.reasons);
        }
    }
}

#[test]
fn ext_zero_is_schur() {
    let p = a1(FSpec::ClassicalLinear);
    let mods = simples(&p);
    let t = ext_table(&p, &mods, &ExtConfig::new(7, 3, 2), &mut direct_gb).unwrap();
    for e in &t.entries {
        assert_eq!(e.dims()[0], usize::from(e.v == e.w), "Ext⁰({}, {})", e.v, e.w);
    }
}

#[test]
fn presentation_complex_agrees_with_resolution() {
    for f in [FSpec::ClassicalLinear, FSpec::QInteger] {
        let p = a1(f);
        let mods = simples(&p);
        let pres = instantiate_window(&p, 7, 3).unwrap();
        let gb = groebner(&pres, DegreeCap::len(10)).unwrap();
        let mut ws = ExtWorkspace::new(&pres, &gb, &mods, 3).unwrap();
        for i in 0..mods.len() {
            for j in 0..mods.len() {
                let low = low_degree_ext(&pres, &mods[i], &mods[j]).unwrap();
                let d = ws.ext(i, j, 2).unwrap();
                assert_eq!((low.ext0, low.ext1), (d.dims[0], d.dims[1]), "({i}, {j})");
                assert!(low.ext2_upper >= d.dims[2]);
            }
        }
    }
}

#[test]
fn window_stabilization_for_the_trivial_module() {
    let p = a1(FSpec::ClassicalLinear);
    let t = vec![trivial_module(&p, &[0]).unwrap()];
    for n in 4..=8 {
        let table = ext_table(&p, &t, &ExtConfig::new(n, 4, 4), &mut direct_gb).unwrap();
        let e = table.entry(0, 0).unwrap();
        assert_eq!(e.dims_by_window[0], e.dims_by_window[1], "N = {n}");
        assert_eq!(e.dims(), &[1, 0, 1, 0, 0]);
    }
}

#[test]
fn yoneda_unit_square_zero_and_commutativity() {
    let p = a1(FSpec::ClassicalLinear);
    let mods = vec![trivial_module(&p, &[0]).unwrap()];
    let (_, (table, ring)) = run_window(&p, &mods, &ExtConfig::new(6, 4, 4), &mut direct_gb, |ws| {
        Ok((yoneda(ws, 0, 4)?, ring_invariants(ws, 0, 4)?))
    })
    .unwrap();
    assert!(table.unit_ok && table.reliable);
    let zz = table.product(2, 0, 2, 0).unwrap();
    assert!(zz.coords.iter().all(QScalar::is_zero));
    assert!(ring.associative && ring.graded_commutative);
    // degree additivity: every product lands in the degree a + b space
    for pr in &table.products {
        assert_eq!(pr.coords.len(), table.dims[pr.a + pr.b]);
    }
}

#[test]
fn q_one_table_equals_classical() {
    let classical = a1(FSpec::ClassicalLinear);
    let at_one = Params::with_q(build_cartan('A', 1).unwrap(), FSpec::QInteger, QMode::At(QPoint::One));
    let cfg = ExtConfig::new(6, 4, 4);
    let a = ext_table(&classical, &simples(&classical)[..2], &cfg, &mut direct_gb).unwrap();
    let b = ext_table(&at_one, &simples(&at_one)[..2], &cfg, &mut direct_gb).unwrap();
    assert_eq!(a.entries, b.entries);
}

#[test]
fn negative_control_against_a2_target() {
    let p = a1(FSpec::ClassicalLinear);
    let t = vec![trivial_module(&p, &[0]).unwrap()];
    let table = ext_table(&p, &t, &ExtConfig::new(6, 4, 4), &mut direct_gb).unwrap();
    let v = target_verdict(table.entry(0, 0).unwrap(), &[1, 0, 2, 0, 2, 0, 1], 6);
    assert_eq!(v, Verdict::Mismatch { degree: 2, computed: 1, expected: 2 });
}

#[test]
fn margin_rule_enforced() {
    let p = a1(FSpec::ClassicalLinear);
    let t = vec![trivial_module(&p, &[0]).unwrap()];
    let err = ext_table(&p, &t, &ExtConfig::new(6, 3, 4), &mut direct_gb).unwrap_err();
    assert!(matches!(err, Error::MarginViolation(_)));
    let far = vec![trivial_module(&Params::new(build_cartan('A', 1).unwrap(), FSpec::zero(1)), &[5]).unwrap()];
    let err = ext_table(&p, &far, &ExtConfig::new(6, 4, 4), &mut direct_gb).unwrap_err();
    assert!(matches!(err, Error::MarginViolation(_)));
}

#[test]
fn degenerate_families_get_no_match_claim() {
    let p = Params::new(build_cartan('A', 1).unwrap(), FSpec::zero(1));
    let t = trivial_module(&p, &[0]).unwrap();
    let rep = schur_check(&p, &t, &ExtConfig::new(6, 4, 4), &mut direct_gb).unwrap();
    assert_ne!(rep.verdict, Verdict::Match);
}
