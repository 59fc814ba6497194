use hypertree_core::binom::binom;
use hypertree_core::exact::bareiss_determinant;
use hypertree_core::homology::{
    gram_scale, invariant_factors, is_hypertree, torsion_from_gram, within_kalai_bound, TorsionRoute,
};
use hypertree_core::sampler::derive_seed;
use hypertree_core::simplicial::hypertree_boundary;
use hypertree_core::snf::{factor_product, smith_normal_form};
use hypertree_core::spectral::laplacian_spectrum;
use hypertree_core::{
    enumerate_hypertrees, face_rank, gram_determinant, projection_kernel, torsion_order, torsion_record,
    Error, HypertreeSampler,
};
use num_bigint::BigUint;

fn faces(n: u32, triangles: &[[u32; 3]]) -> Vec<usize> {
    let mut v: Vec<usize> = triangles.iter().map(|t| face_rank(n, t).unwrap()).collect();
    v.sort_unstable();
    v
}

// the 6-vertex triangulation of the real projective plane: H_1 = Z/2
const RP2: [[u32; 3]; 10] = [
    [1, 2, 3], [1, 3, 4], [1, 4, 5], [1, 5, 6], [1, 2, 6],
    [2, 3, 5], [3, 4, 6], [2, 4, 5], [3, 5, 6], [2, 4, 6],
];

#[test]
fn projective_plane_has_order_two() {
    let s = faces(6, &RP2);
    assert!(is_hypertree(6, 2, &s).unwrap());
    let b = hypertree_boundary(6, 2, &s).unwrap();
    let rec = torsion_record(&b, TorsionRoute::Snf).unwrap();
    assert_eq!(rec.order, BigUint::from(2u32));
    let factors = rec.invariant_factors.unwrap();
    assert_eq!(factors.len(), 10);
    assert!(factors[..9].iter().all(|f| *f == BigUint::from(1u32)));
    assert_eq!(factors[9], BigUint::from(2u32));
    // π = 6^C(4,1) · 2² = 5184
    assert_eq!(rec.gram_det, BigUint::from(5184u32));
    let p = projection_kernel(6, 2).unwrap();
    // det P[A] = |H|² / 6^C(4,2) = 4 / 46656
    assert!((p.subset_probability(&s).unwrap() - 4.0 / 46656.0).abs() < 1e-12);
}

#[test]
fn all_four_vertex_hypertrees_trivial() {
    for s in [[0usize, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
        let b = hypertree_boundary(4, 2, &s).unwrap();
        let f = invariant_factors(&b).unwrap();
        assert_eq!(f, vec![BigUint::from(1u32); 3]);
        assert_eq!(torsion_order(&b).unwrap(), BigUint::from(1u32));
        assert_eq!(gram_determinant(&b).unwrap(), BigUint::from(16u32));
    }
}

#[test]
fn five_vertex_trivial_torsion_gram() {
    let res = enumerate_hypertrees(5, 2).unwrap();
    let sq: u64 = res.hypertrees.iter().map(|h| u64::try_from(&h.weight).unwrap()).sum();
    assert_eq!(sq, 125);
    for h in &res.hypertrees {
        let b = hypertree_boundary(5, 2, &h.faces).unwrap();
        let g = gram_determinant(&b).unwrap();
        assert_eq!(g, BigUint::from(125u32) * &h.weight);
        let spec = laplacian_spectrum(&b).unwrap();
        let prod: f64 = spec.iter().filter(|&&x| x > 0.0).product();
        let exact = u64::try_from(&g).unwrap() as f64;
        assert!((prod - exact).abs() <= 1e-6 * exact);
    }
}

#[test]
fn gram_route_matches_dense_bareiss_and_snf() {
    for (n, d) in [(8u32, 2usize), (10, 2), (14, 2), (8, 3), (20, 2)] {
        let sampler = HypertreeSampler::new(n, d).unwrap();
        for i in 0..6 {
            let s = sampler.sample_seeded(derive_seed(17, n, i)).unwrap();
            let b = s.boundary();
            let dense = bareiss_determinant(&b.gram()).to_biguint().unwrap();
            assert_eq!(gram_determinant(&b).unwrap(), dense);
            let snf = factor_product(&smith_normal_form(&b.to_dense()));
            let via_gram = torsion_from_gram(n, d, &dense).unwrap();
            assert_eq!(snf, via_gram);
            assert_eq!(dense, gram_scale(n, d) * &snf * &snf);
            assert!(within_kalai_bound(n, d, &snf));
        }
    }
}

#[test]
fn measure_consistency_on_samples() {
    let (n, d) = (9u32, 2usize);
    let p = projection_kernel(n, d).unwrap();
    let sampler = HypertreeSampler::new(n, d).unwrap();
    let r = binom(n as usize - 1, d) as i32;
    for i in 0..10 {
        let s = sampler.sample_seeded(derive_seed(5, n, i)).unwrap();
        let g = gram_determinant(&s.boundary()).unwrap();
        let g = g.to_string().parse::<f64>().unwrap();
        let det = p.subset_probability(&s.faces).unwrap();
        let from_gram = g / (n as f64).powi(r);
        assert!((det - from_gram).abs() <= 1e-8 * from_gram);
    }
}

#[test]
fn rank_deficient_inputs() {
    // contains the boundary of the tetrahedron {1,2,3,4}
    let s = faces(5, &[[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4], [1, 2, 5], [3, 4, 5]]);
    let b = hypertree_boundary(5, 2, &s).unwrap();
    assert_eq!(torsion_order(&b), Err(Error::NotAHypertree));
    assert_eq!(gram_determinant(&b), Err(Error::NotAHypertree));
    assert!(!is_hypertree(5, 2, &s).unwrap());
    let p = projection_kernel(5, 2).unwrap();
    assert!(p.subset_probability(&s).unwrap() < 1e-10);
}
