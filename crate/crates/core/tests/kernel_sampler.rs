use hypertree_core::binom::{binom, Combinations};
use hypertree_core::homology::is_hypertree;
use hypertree_core::kernel::{numerical_rank, Cobasis};
use hypertree_core::sampler::derive_seed;
use hypertree_core::{boundary_matrix, orthonormal_cobasis, projection_kernel, HypertreeSampler};

// P = BᵀB / n computed entry by entry from the dense boundary matrix
fn oracle_kernel(n: u32, d: usize) -> Vec<Vec<f64>> {
    let b = boundary_matrix(n, d).unwrap().to_dense();
    let m = b.cols();
    let mut p = vec![vec![0.0; m]; m];
    for (i, row) in p.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let dot: i64 = (0..b.rows()).map(|r| b[(r, i)] * b[(r, j)]).sum();
            *v = dot as f64 / n as f64;
        }
    }
    p
}

#[test]
fn kernel_matches_dense_oracle() {
    for (n, d) in [(4u32, 2usize), (5, 2), (6, 3), (7, 2)] {
        let p = projection_kernel(n, d).unwrap();
        let o = oracle_kernel(n, d);
        for (i, row) in o.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert!((p.get(i, j) - v).abs() < 1e-15, "({n},{d}) entry ({i},{j})");
            }
        }
    }
}

#[test]
fn kernel_identities() {
    for d in [2usize, 3] {
        for n in (d as u32 + 2)..=20 {
            let p = projection_kernel(n, d).unwrap();
            let r = binom(n as usize - 1, d);
            assert_eq!(p.rank(), r);
            assert!(p.idempotence_defect() <= 1e-10, "P² ≠ P at ({n},{d})");
            assert!((p.trace() - r as f64).abs() <= 1e-8);
            let diag = (d as f64 + 1.0) / n as f64;
            assert!(p.diagonal().iter().all(|x| (x - diag).abs() <= 1e-12));
            assert_eq!(p.asymmetry(), 0.0);
        }
    }
}

#[test]
fn four_vertex_kernel_entries() {
    let p = projection_kernel(4, 2).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let expect = if i == j { 0.75 } else { 0.25 };
            assert!((p.get(i, j).abs() - expect).abs() < 1e-15);
        }
    }
    let spec = p.spectrum().unwrap();
    assert_eq!(spec.iter().filter(|x| (**x - 1.0).abs() < 1e-12).count(), 3);
}

#[test]
fn principal_minor_sums_are_binomials() {
    for (n, d) in [(4u32, 2usize), (5, 2), (6, 2), (6, 3), (7, 3), (8, 2), (8, 3)] {
        let p = projection_kernel(n, d).unwrap();
        let r = p.rank();
        for k in 0..=r {
            let s = p.principal_minor_sum(k).unwrap();
            let c = binom(r, k) as f64;
            assert!((s - c).abs() <= 1e-8 * c.max(1.0), "({n},{d}) k={k}: {s} vs {c}");
        }
    }
    let p = projection_kernel(4, 2).unwrap();
    assert!((p.principal_minor_sum(2).unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn subset_probabilities_sum_to_one() {
    let p = projection_kernel(5, 2).unwrap();
    let mut total = 0.0;
    let mut support = 0;
    for a in Combinations::new(10, 6) {
        let pr = p.subset_probability(&a).unwrap();
        total += pr;
        let tree = is_hypertree(5, 2, &a).unwrap();
        if pr > 1e-10 {
            support += 1;
        }
        assert_eq!(pr > 1e-10, tree, "support mismatch at {a:?}");
        if !tree {
            assert!(pr < 1e-10);
        }
    }
    assert!((total - 1.0).abs() < 1e-8);
    assert_eq!(support, 125);

    let p4 = projection_kernel(4, 2).unwrap();
    for a in Combinations::new(4, 3) {
        assert!((p4.subset_probability(&a).unwrap() - 0.25).abs() < 1e-12);
    }
}

#[test]
fn cobasis_is_orthonormal_and_spans_the_kernel() {
    let u = orthonormal_cobasis(4, 2).unwrap();
    let p = projection_kernel(4, 2).unwrap().to_dense().unwrap();
    let utu = u.transpose() * &u;
    let uut = &u * u.transpose();
    for i in 0..3 {
        for j in 0..3 {
            let e = if i == j { 1.0 } else { 0.0 };
            assert!((utu[(i, j)] - e).abs() < 1e-12);
        }
    }
    assert!((uut - p).abs().max() < 1e-8);
}

#[test]
fn cobasis_has_full_numerical_rank() {
    for (n, d) in [(10u32, 2usize), (20, 2), (10, 3), (14, 3)] {
        let u = orthonormal_cobasis(n, d).unwrap();
        let r = binom(n as usize - 1, d);
        assert_eq!(u.ncols(), r);
        assert_eq!(numerical_rank(&u, 1e-8), r, "({n},{d})");
    }
    // beyond the dense envelope, through the factored basis
    for (n, d) in [(30u32, 2usize), (40, 2), (20, 3), (24, 3)] {
        let c = Cobasis::new(n, d).unwrap();
        assert_eq!(c.numerical_rank(1e-8), binom(n as usize - 1, d), "({n},{d})");
    }
}

#[test]
fn samples_are_certified_hypertrees() {
    for (n, d) in [(5u32, 2usize), (6, 2), (7, 3), (12, 2), (16, 2)] {
        let sampler = HypertreeSampler::new(n, d).unwrap();
        for i in 0..20 {
            let s = sampler.sample_seeded(derive_seed(3, n, i)).unwrap();
            assert_eq!(s.faces.len(), binom(n as usize - 1, d));
            assert!(is_hypertree(n, d, &s.faces).unwrap());
        }
    }
}

#[test]
fn four_vertex_frequencies() {
    let sampler = HypertreeSampler::new(4, 2).unwrap();
    let mut counts = [0u32; 4];
    let draws = 10_000;
    for i in 0..draws {
        let s = sampler.sample_seeded(derive_seed(9, 4, i)).unwrap();
        let missing = (0..4).find(|f| !s.faces.contains(f)).unwrap();
        counts[missing] += 1;
    }
    let mean = draws as f64 / 4.0;
    let sd = (draws as f64 * 0.25 * 0.75).sqrt();
    for c in counts {
        assert!((c as f64 - mean).abs() < 3.0 * sd, "{counts:?}");
    }
}

#[test]
fn expected_overlap_with_fixed_sets() {
    // E|X ∩ A| = Σ_{j∈A} P_jj = |A|(d+1)/n
    let (n, d) = (7u32, 2usize);
    let sampler = HypertreeSampler::new(n, d).unwrap();
    let m = binom(n as usize, d + 1);
    let sets: Vec<Vec<usize>> = (0..5).map(|s| (0..m).filter(|f| (f * 7 + s * 3) % 5 == 0).collect()).collect();
    let draws = 4000u64;
    let mut sums = vec![0.0; sets.len()];
    let mut sq = vec![0.0; sets.len()];
    for i in 0..draws {
        let x = sampler.sample_seeded(derive_seed(21, n, i)).unwrap();
        for (k, a) in sets.iter().enumerate() {
            let c = a.iter().filter(|f| x.faces.binary_search(f).is_ok()).count() as f64;
            sums[k] += c;
            sq[k] += c * c;
        }
    }
    for (k, a) in sets.iter().enumerate() {
        let mean = sums[k] / draws as f64;
        let var = sq[k] / draws as f64 - mean * mean;
        let expect = a.len() as f64 * (d as f64 + 1.0) / n as f64;
        let se = (var / draws as f64).sqrt();
        assert!((mean - expect).abs() < 4.0 * se + 1e-9, "set {k}: {mean} vs {expect}");
    }
}
