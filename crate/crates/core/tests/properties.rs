use std::collections::BTreeMap;

use hypertree_core::binom::binom;
use hypertree_core::canon::{canonical_code, Graph};
use hypertree_core::exact::{bareiss_determinant, rank_over_q, IntMatrix};
use hypertree_core::local::{census_distance, NeighborhoodCensus};
use hypertree_core::snf::{factor_product, smith_normal_form, sparse_determinant};
use hypertree_core::symmetric::{elementary_symmetric, inverse_symmetric_poly};
use hypertree_core::{face_rank, face_unrank};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn permutation(len: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..len).collect::<Vec<_>>()).prop_shuffle()
}

// random connected graph: a random tree plus extra edges
fn connected_graph(max: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2..max).prop_flat_map(|v| {
        let parents = proptest::collection::vec(any::<prop::sample::Index>(), v - 1);
        let extra = proptest::collection::vec((0..v, 0..v), 0..4);
        (Just(v), parents, extra).prop_map(|(v, parents, extra)| {
            let mut edges: Vec<(usize, usize)> =
                parents.iter().enumerate().map(|(i, p)| (i + 1, p.index(i + 1))).collect();
            edges.extend(extra.into_iter().filter(|(a, b)| a != b));
            (v, edges)
        })
    })
}

fn census(radius: usize, counts: &[u64]) -> NeighborhoodCensus {
    let mut c = NeighborhoodCensus::empty(radius);
    for (i, &k) in counts.iter().enumerate().filter(|(_, &k)| k > 0) {
        c.counts.insert(format!("c{i}"), k);
        c.total += k;
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn face_rank_round_trip(n in 1u32..30, k in 0usize..6, seed in any::<u64>()) {
        prop_assume!(k <= n as usize);
        let total = binom(n as usize, k);
        let rank = (seed % total as u64) as usize;
        let f = face_unrank(n, k, rank).unwrap();
        prop_assert_eq!(face_rank(n, f.vertices()).unwrap(), rank);
        if rank + 1 < total {
            let g = face_unrank(n, k, rank + 1).unwrap();
            prop_assert!(f.vertices() < g.vertices());
        }
    }

    #[test]
    fn inverse_symmetric_identity(ls in proptest::collection::vec(0.01f64..50.0, 1..12)) {
        let r = ls.len();
        let prod: f64 = ls.iter().product();
        for k in 0..=r {
            let lhs = inverse_symmetric_poly(&ls, k).unwrap() * prod;
            let rhs = elementary_symmetric(&ls, r - k);
            prop_assert!((lhs - rhs).abs() <= 1e-8 * rhs);
        }
    }

    #[test]
    fn tv_distance_is_a_metric(
        a in proptest::collection::vec(0u64..20, 6),
        b in proptest::collection::vec(0u64..20, 6),
        c in proptest::collection::vec(0u64..20, 6),
    ) {
        prop_assume!(a.iter().sum::<u64>() > 0 && b.iter().sum::<u64>() > 0 && c.iter().sum::<u64>() > 0);
        let (x, y, z) = (census(2, &a), census(2, &b), census(2, &c));
        let xy = census_distance(&x, &y).unwrap();
        prop_assert!((0.0..=1.0).contains(&xy));
        prop_assert_eq!(census_distance(&x, &x).unwrap(), 0.0);
        prop_assert!((xy - census_distance(&y, &x).unwrap()).abs() < 1e-15);
        let xz = census_distance(&x, &z).unwrap();
        let zy = census_distance(&z, &y).unwrap();
        prop_assert!(xy <= xz + zy + 1e-12);
    }

    #[test]
    fn sparse_determinant_matches_bareiss(
        size in 1usize..9,
        entries in proptest::collection::vec(-3i64..=3, 81),
    ) {
        let rows: Vec<Vec<i64>> = (0..size).map(|i| entries[i * 9..i * 9 + size].to_vec()).collect();
        let m = IntMatrix::from_rows(&rows);
        let det = bareiss_determinant(&m);
        prop_assert_eq!(sparse_determinant(&m), det.clone());
        let factors = smith_normal_form(&m);
        prop_assert_eq!(factors.len(), rank_over_q(&m));
        for w in factors.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        if !det.is_zero() {
            prop_assert_eq!(factor_product(&factors), det.abs().to_biguint().unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn canonical_codes_ignore_labels(
        (v, edges) in connected_graph(14),
        root in any::<prop::sample::Index>(),
        perms in proptest::collection::vec(any::<u64>(), 100),
    ) {
        let g = Graph::from_edges(v, &edges).unwrap();
        let root = root.index(v);
        let code = canonical_code(&g, root).unwrap();
        for seed in perms {
            // Fisher-Yates driven by the seed
            let mut p: Vec<usize> = (0..v).collect();
            let mut s = seed;
            for i in (1..v).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                p.swap(i, (s >> 33) as usize % (i + 1));
            }
            prop_assert_eq!(&canonical_code(&g.relabel(&p), p[root]).unwrap(), &code);
        }
    }

    #[test]
    fn codes_separate_non_isomorphic_small_graphs((v, edges) in connected_graph(7), perm in permutation(7)) {
        // compare against brute-force rooted isomorphism
        let g = Graph::from_edges(v, &edges).unwrap();
        let p: Vec<usize> = perm.into_iter().filter(|&x| x < v).collect();
        let h = g.relabel(&p);
        for ra in 0..v {
            for rb in 0..v {
                let same = brute_isomorphic(&g, ra, &h, rb);
                let codes = canonical_code(&g, ra).unwrap() == canonical_code(&h, rb).unwrap();
                prop_assert_eq!(same, codes);
            }
        }
    }
}

fn brute_isomorphic(a: &Graph, ra: usize, b: &Graph, rb: usize) -> bool {
    let v = a.vertex_count();
    if v != b.vertex_count() || a.edge_count() != b.edge_count() {
        return false;
    }
    let edges_b: BTreeMap<(usize, usize), ()> = (0..v)
        .flat_map(|x| b.neighbors(x).iter().map(move |&y| ((x, y), ())))
        .collect();
    let mut perm: Vec<usize> = (0..v).collect();
    permute(&mut perm, 0, &mut |p| {
        p[ra] == rb && (0..v).all(|x| a.neighbors(x).iter().all(|&y| edges_b.contains_key(&(p[x], p[y]))))
    })
}

fn permute(p: &mut Vec<usize>, k: usize, check: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if k == p.len() {
        return check(p);
    }
    for i in k..p.len() {
        p.swap(k, i);
        if permute(p, k + 1, check) {
            p.swap(k, i);
            return true;
        }
        p.swap(k, i);
    }
    false
}
