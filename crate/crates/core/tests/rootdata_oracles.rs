use std::collections::BTreeMap;

use schurcat::rootdata::{build_cartan, flag_betti, flag_ring, kostant, positive_roots, weyl_table, DEFAULT_RING_RANK_CAP, DEFAULT_WEYL_CAP};

/// Partition counts by coin-change over the roots: coefficient of `x^β` in `Π 1/(1 - x^α)`.
fn kostant_table(roots: &[Vec<i64>], cap: i64) -> BTreeMap<Vec<i64>, u64> {
    let r = roots[0].len();
    let mut table: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    table.insert(vec![0; r], 1);
    for a in roots {
        let mut keys: Vec<Vec<i64>> = vec![];
        let mut frontier = vec![vec![0; r]];
        while let Some(b) = frontier.pop() {
            if b.iter().sum::<i64>() > cap || keys.contains(&b) {
                continue;
            }
            keys.push(b.clone());
            for i in 0..r {
                let mut n = b.clone();
                n[i] += 1;
                frontier.push(n);
            }
        }
        keys.sort_by_key(|b| b.iter().sum::<i64>());
        for b in keys {
            let prev: Vec<i64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
            if prev.iter().all(|&x| x >= 0) {
                let add = table.get(&prev).copied().unwrap_or(0);
                *table.entry(b).or_insert(0) += add;
            }
        }
    }
    table
}

#[test]
fn rank_two_root_systems() {
    let a2 = positive_roots(&build_cartan('A', 2).unwrap());
    assert_eq!(a2.roots, vec![vec![1, 0], vec![0, 1], vec![1, 1]]);
    let b2 = positive_roots(&build_cartan('B', 2).unwrap());
    assert_eq!(b2.roots.len(), 4);
    assert_eq!(b2.heights, vec![1, 1, 2, 3]);
    let g2 = positive_roots(&build_cartan('G', 2).unwrap());
    assert_eq!(g2.roots.len(), 6);
    assert_eq!(*g2.heights.iter().max().unwrap(), 5);
}

#[test]
fn weyl_orders_and_flag_betti() {
    for (s, n, order) in [('A', 1, 2), ('A', 2, 6), ('A', 3, 24), ('B', 2, 8), ('C', 3, 48), ('G', 2, 12), ('D', 4, 192)] {
        let t = weyl_table(&build_cartan(s, n).unwrap(), DEFAULT_WEYL_CAP).unwrap();
        assert_eq!(t.order(), order, "{s}{n}");
        let betti = flag_betti(&t);
        assert_eq!(betti.iter().sum::<usize>(), order);
        assert!(betti.iter().skip(1).step_by(2).all(|&b| b == 0));
        let top = betti.len() - 1;
        assert!((0..=top).all(|k| betti[k] == betti[top - k]), "Poincaré duality {s}{n}");
    }
    let a2 = weyl_table(&build_cartan('A', 2).unwrap(), DEFAULT_WEYL_CAP).unwrap();
    assert_eq!(flag_betti(&a2), vec![1, 0, 2, 0, 2, 0, 1]);
}

#[test]
fn kostant_matches_coin_change() {
    for (s, n, cap) in [('A', 2, 8), ('B', 2, 6), ('A', 3, 5), ('G', 2, 6)] {
        let c = build_cartan(s, n).unwrap();
        let roots = positive_roots(&c);
        for (beta, want) in kostant_table(&roots.roots, cap) {
            assert_eq!(kostant(&roots, &beta), want, "{s}{n} {beta:?}");
        }
    }
}

#[test]
fn flag_ring_of_small_types() {
    let c = build_cartan('A', 1).unwrap();
    let r = flag_ring(&c, &weyl_table(&c, DEFAULT_WEYL_CAP).unwrap(), DEFAULT_RING_RANK_CAP);
    assert!(r.ring_computed);
    assert_eq!(r.dims, vec![1, 0, 1]);
    assert_eq!(r.generators, 1);
    let c = build_cartan('A', 2).unwrap();
    let r = flag_ring(&c, &weyl_table(&c, DEFAULT_WEYL_CAP).unwrap(), DEFAULT_RING_RANK_CAP);
    assert_eq!(r.dims, vec![1, 0, 2, 0, 2, 0, 1]);
    assert_eq!(r.generators, 2);
    let c = build_cartan('A', 3).unwrap();
    let r = flag_ring(&c, &weyl_table(&c, DEFAULT_WEYL_CAP).unwrap(), DEFAULT_RING_RANK_CAP);
    assert!(!r.ring_computed);
    assert_eq!(r.dims.iter().sum::<usize>(), 24);
}

#[test]
fn invalid_types_rejected() {
    assert!(build_cartan('A', 0).is_err());
    assert!(build_cartan('E', 5).is_err());
    assert!(build_cartan('G', 3).is_err());
    assert!(build_cartan('Z', 2).is_err());
}
