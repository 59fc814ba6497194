use std::collections::BTreeMap;

use hypertree_core::binom::binom;
use hypertree_core::canon::star_code;
use hypertree_core::local::*;
use hypertree_core::sampler::derive_seed;
use hypertree_core::HypertreeSampler;

#[test]
fn incidence_graph_invariants() {
    for (n, d) in [(6u32, 2usize), (10, 2), (9, 3)] {
        let sampler = HypertreeSampler::new(n, d).unwrap();
        for i in 0..5 {
            let s = sampler.sample_seeded(derive_seed(8, n, i)).unwrap();
            let g = IncidenceGraph::new(&s).unwrap();
            let r = binom(n as usize - 1, d);
            assert_eq!(g.high_count(), r);
            assert_eq!(g.low_count(), binom(n as usize, d));
            assert!(g.high_degrees().iter().all(|&k| k == d + 1));
            assert_eq!(g.edge_count(), (d + 1) * r);
            // bipartite: no edge inside a side
            for v in 0..g.low_count() {
                assert!(g.graph().neighbors(v).iter().all(|&u| u >= g.low_count()));
            }
            // mean low degree (d+1)(n-d)/n, exactly
            let sum: usize = g.low_degrees().iter().sum();
            assert_eq!(sum * n as usize, (d + 1) * (n as usize - d) * g.low_count());
        }
    }
}

#[test]
fn radius_one_census_is_the_degree_histogram() {
    let (n, d) = (12u32, 2usize);
    let sampler = HypertreeSampler::new(n, d).unwrap();
    let mut pooled = NeighborhoodCensus::empty(1);
    for i in 0..5 {
        let g = IncidenceGraph::new(&sampler.sample_seeded(i).unwrap()).unwrap();
        let c = neighborhood_census(&g, 1).unwrap();
        let mut hist: BTreeMap<usize, u64> = BTreeMap::new();
        for k in g.low_degrees() {
            *hist.entry(k).or_default() += 1;
        }
        for (k, count) in hist {
            assert_eq!(c.counts[&star_code(k)], count);
        }
        assert_eq!(c.total as usize, binom(n as usize, d));
        pooled.merge(&c).unwrap();
    }
    let (num, den) = census_mean_degree(&pooled).unwrap();
    // (d+1)(n-d)/n = 30/12
    assert_eq!(num * 12, 30 * den);
    let total: f64 = pooled.frequencies().map(|(_, f)| f).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let counted: u64 = pooled.counts.values().sum();
    assert_eq!(counted, pooled.total);
}

#[test]
fn split_root_ranges_merge_exactly() {
    let sampler = HypertreeSampler::new(10, 2).unwrap();
    let g = IncidenceGraph::new(&sampler.sample_seeded(2).unwrap()).unwrap();
    let whole = neighborhood_census(&g, 3).unwrap();
    let mut a = neighborhood_census_range(&g, 3, 0, 17).unwrap();
    let b = neighborhood_census_range(&g, 3, 17, g.low_count()).unwrap();
    a.merge(&b).unwrap();
    assert_eq!(a, whole);
}

#[test]
fn larger_radius_keeps_non_tree_classes() {
    let sampler = HypertreeSampler::new(8, 2).unwrap();
    let g = IncidenceGraph::new(&sampler.sample_seeded(1).unwrap()).unwrap();
    let c = neighborhood_census(&g, 4).unwrap();
    assert_eq!(c.total as usize, binom(8, 2));
    // at n=8 the 4-ball around a root always closes a cycle somewhere
    assert!(c.counts.keys().any(|k| k.starts_with('G')));
    assert_eq!(c.counts.values().sum::<u64>(), c.total);
}
