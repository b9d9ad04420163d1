use proptest::prelude::*;
use schurcat::gbasis::{dense_component_dim, groebner, hilbert, DegreeCap, GBResult};
use schurcat::presentation::{instantiate_window, serre_relation, un_presentation, Chirality, FSpec, NCPoly, Params, Path, QMode};
use schurcat::rootdata::{build_cartan, kostant, positive_roots};
use schurcat::{QPoint, QScalar};

#[test]
fn gb_agrees_with_dense_rank_on_certified_degrees() {
    for (s, cap) in [('A', 6), ('B', 6)] {
        let c = build_cartan(s, 2).unwrap();
        let p = un_presentation(&c);
        let g = groebner(&p, DegreeCap::len(cap)).unwrap();
        assert!(g.is_certified(cap));
        for (beta, d) in hilbert(&g, &p.quiver, cap).unwrap() {
            assert_eq!(d as usize, dense_component_dim(&p, &beta), "{s}2 {beta:?}");
        }
    }
}

#[test]
fn pbw_at_specialized_q() {
    let c = build_cartan('B', 2).unwrap();
    let p = un_presentation(&c).specialize(&QMode::At(QPoint::parse("2").unwrap())).unwrap();
    let g = groebner(&p, DegreeCap::len(6)).unwrap();
    let roots = positive_roots(&c);
    for (beta, d) in hilbert(&g, &p.quiver, 6).unwrap() {
        assert_eq!(d, kostant(&roots, &beta), "{beta:?}");
    }
}

#[test]
fn serre_relation_shape() {
    let c = build_cartan('A', 2).unwrap();
    let r = serre_relation(&c, 0, 1, Chirality::X).unwrap();
    // x0 x0 x1 - [2] x0 x1 x0 + x1 x0 x0
    assert_eq!(r.len(), 3);
    assert!(r.terms.keys().all(|p| p.len() == 3));
    assert!(serre_relation(&c, 1, 1, Chirality::X).is_err());
}

#[test]
fn window_relations_reduce_to_zero() {
    let p = Params::new(build_cartan('A', 2).unwrap(), FSpec::ClassicalLinear);
    let w = instantiate_window(&p, 3, 1).unwrap();
    let g = groebner(&w, DegreeCap::len(6)).unwrap();
    for r in &w.relations {
        assert!(g.normal_form(&r.poly).unwrap().is_zero(), "{}", r.name());
    }
}

#[test]
fn corrupted_text_is_rejected() {
    let c = build_cartan('A', 2).unwrap();
    let g = groebner(&un_presentation(&c), DegreeCap::len(5)).unwrap();
    let text = g.to_text();
    assert_eq!(GBResult::from_text(&text).unwrap(), g);
    for pos in [0, text.len() / 3, text.len() / 2] {
        let mut b = text.clone().into_bytes();
        b[pos] ^= 0x01;
        assert!(GBResult::from_text(&String::from_utf8_lossy(&b)).is_err(), "byte {pos}");
    }
}

fn word() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..2, 0..7)
}

proptest! {
    #[test]
    fn normal_form_is_idempotent_and_linear(u in word(), v in word(), a in -3i64..=3) {
        let c = build_cartan('A', 2).unwrap();
        let p = un_presentation(&c);
        let g = groebner(&p, DegreeCap::len(8)).unwrap();
        let x = NCPoly::monomial(Path { src: 0, word: u }, QScalar::from_int(a));
        let y = NCPoly::monomial(Path { src: 0, word: v }, QScalar::q());
        let nx = g.normal_form(&x).unwrap();
        prop_assert_eq!(g.normal_form(&nx).unwrap(), nx.clone());
        let ny = g.normal_form(&y).unwrap();
        prop_assert_eq!(g.normal_form(&x.add(&y)).unwrap(), nx.add(&ny));
        for (path, _) in &nx.terms {
            prop_assert!(g.is_normal(&path.word));
        }
    }
}
