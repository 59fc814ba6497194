use hypertree_core::binom::binom;
use hypertree_core::exact::rank_over_q;
use hypertree_core::simplicial::{
    all_faces, format_face_set, parse_face_set, restrict_columns, LexRanker,
};
use hypertree_core::{boundary_matrix, face_rank, face_unrank, Error, Face};

// all k-subsets of [n] in lexicographic order, built by brute force
fn lex_subsets(n: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            out.push((1..=n).filter(|v| mask & (1 << (v - 1)) != 0).collect::<Vec<u32>>());
        }
    }
    out.sort();
    out
}

#[test]
fn ranks_match_brute_force_order() {
    for n in 1..=8u32 {
        for k in 0..=n as usize {
            for (i, s) in lex_subsets(n, k).iter().enumerate() {
                assert_eq!(face_rank(n, s).unwrap(), i);
                assert_eq!(face_unrank(n, k, i).unwrap().vertices(), s.as_slice());
            }
        }
    }
}

#[test]
fn rank_examples() {
    assert_eq!(face_rank(4, &[1, 2]).unwrap(), 0);
    assert_eq!(face_rank(4, &[3, 4]).unwrap(), 5);
    let r = face_rank(5, &[1, 3, 4]).unwrap();
    assert_eq!(face_unrank(5, 3, r).unwrap().vertices(), &[1, 3, 4]);
    assert_eq!(LexRanker::new(5, 3).rank_one_based(&[1, 3, 4]), r);
}

#[test]
fn invalid_faces() {
    assert!(matches!(face_rank(4, &[2, 1]), Err(Error::InvalidFace { .. })));
    assert!(matches!(face_rank(4, &[1, 5]), Err(Error::InvalidFace { .. })));
    assert!(matches!(face_rank(4, &[0, 2]), Err(Error::InvalidFace { .. })));
    assert!(matches!(face_rank(4, &[2, 2]), Err(Error::InvalidFace { .. })));
    assert!(Face::new(3, vec![1, 2, 3]).is_ok());
    assert!(face_unrank(4, 2, 6).is_err());
}

#[test]
fn edge_boundary_sign_convention() {
    let b = boundary_matrix(3, 1).unwrap();
    assert_eq!((b.rows(), b.cols()), (3, 3));
    // column {1,2}: -1 at {1}, +1 at {2}
    assert_eq!(b.column(0), &[(0, -1), (1, 1)]);
    assert!(boundary_matrix(2, 2).is_err());
}

#[test]
fn chain_complex_identity() {
    for n in 3..=8u32 {
        for d in 2..n as usize {
            let upper = boundary_matrix(n, d).unwrap();
            let lower = boundary_matrix(n, d - 1).unwrap();
            assert!(lower.compose(&upper).unwrap().is_empty(), "∂∂ ≠ 0 at n={n} d={d}");
        }
    }
    let b = boundary_matrix(4, 2).unwrap();
    assert_eq!((b.rows(), b.cols()), (6, 4));
    assert!((0..4).all(|c| b.column(c).len() == 3));
}

#[test]
fn support_sizes() {
    for (n, d) in [(6u32, 2usize), (7, 3), (8, 2), (9, 4)] {
        let b = boundary_matrix(n, d).unwrap();
        assert_eq!(b.rows(), binom(n as usize, d));
        assert_eq!(b.cols(), binom(n as usize, d + 1));
        assert!(b.row_counts().iter().all(|&c| c == n as usize - d));
        assert!((0..b.cols()).all(|c| b.column(c).len() == d + 1));
        assert_eq!(b.nnz(), (d + 1) * binom(n as usize, d + 1));
    }
}

#[test]
fn dense_entries_follow_deletion_sign() {
    let (n, d) = (6u32, 3usize);
    let b = boundary_matrix(n, d).unwrap();
    let dense = b.to_dense();
    for (c, face) in all_faces(n, d + 1).enumerate() {
        for i in 0..=d {
            let row = face.facet(i).rank();
            let expect = if i % 2 == 0 { 1 } else { -1 };
            assert_eq!(dense[(row, c)], expect);
        }
        let col_nnz = (0..b.rows()).filter(|&r| dense[(r, c)] != 0).count();
        assert_eq!(col_nnz, d + 1);
    }
}

#[test]
fn restrictions() {
    let b = boundary_matrix(4, 2).unwrap();
    let all = restrict_columns(&b, &[0, 1, 2, 3]).unwrap();
    assert_eq!(all, b);
    let none = restrict_columns(&b, &[]).unwrap();
    assert_eq!((none.rows(), none.cols()), (6, 0));
    let three = restrict_columns(&b, &[0, 2, 3]).unwrap();
    assert_eq!(three.cols(), 3);
    assert_eq!(three.column_faces(), &[0, 2, 3]);
    assert_eq!(rank_over_q(&three.to_dense()), 3);
    assert!(matches!(restrict_columns(&b, &[0, 7]), Err(Error::FaceNotPresent(7))));
}

#[test]
fn face_set_text_round_trip() {
    let faces: Vec<Face> = [[1, 2, 4], [1, 3, 4], [2, 3, 4]]
        .iter()
        .map(|v| Face::new(4, v.to_vec()).unwrap())
        .collect();
    let text = format_face_set(&faces);
    assert_eq!(text, "1,2,4\n1,3,4\n2,3,4\n");
    assert_eq!(parse_face_set(4, 3, &text).unwrap(), faces);
    assert!(parse_face_set(4, 3, "1,2\n").is_err());
    assert!(parse_face_set(4, 3, "1,2,x\n").is_err());
}
