//! Faces of the simplex on `[n]`, their lexicographic ranks, and signed
//! boundary matrices of the complete skeleton and of face subsets.
//!
//! Vertices are 1-based; ranks are 0-based. The column of a face
//! `{v_0 < .. < v_d}` carries `(-1)^i` in the row of the facet that omits
//! `v_i`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::binom::{binom, Combinations};
use crate::{Error, Result};

/// A `(k-1)`-simplex: a strictly increasing `k`-subset of `[n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    n: u32,
    vertices: Vec<u32>,
}

impl Face {
    pub fn new(n: u32, vertices: Vec<u32>) -> Result<Self> {
        validate(n, &vertices)?;
        Ok(Face { n, vertices })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    /// Number of vertices (`dimension + 1`).
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn rank(&self) -> usize {
        LexRanker::new(self.n as usize, self.vertices.len()).rank_one_based(&self.vertices)
    }

    /// Facet obtained by deleting the `i`-th smallest vertex.
    pub fn facet(&self, i: usize) -> Face {
        let mut vertices = self.vertices.clone();
        vertices.remove(i);
        Face { n: self.n, vertices }
    }

    pub fn contains(&self, other: &Face) -> bool {
        other.vertices.iter().all(|v| self.vertices.binary_search(v).is_ok())
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn validate(n: u32, vertices: &[u32]) -> Result<()> {
    let in_range = vertices.iter().all(|&v| v >= 1 && v <= n);
    let increasing = vertices.windows(2).all(|w| w[0] < w[1]);
    if in_range && increasing {
        Ok(())
    } else {
        Err(Error::InvalidFace { vertices: vertices.to_vec(), n })
    }
}

/// Lexicographic rank of a `k`-subset of `[n]` given by 1-based vertices.
pub fn face_rank(n: u32, vertices: &[u32]) -> Result<usize> {
    validate(n, vertices)?;
    Ok(LexRanker::new(n as usize, vertices.len()).rank_one_based(vertices))
}

/// The `k`-subset of `[n]` with the given lexicographic rank.
pub fn face_unrank(n: u32, k: usize, rank: usize) -> Result<Face> {
    let combo = crate::binom::unrank_combination(n as usize, k, rank as u128).ok_or_else(|| {
        Error::InvalidParameters(format!("rank {rank} out of range for C({n},{k})"))
    })?;
    Ok(Face { n, vertices: combo.into_iter().map(|v| v as u32 + 1).collect() })
}

/// O(k) lexicographic ranking of sorted `k`-subsets of a fixed `[n]`.
#[derive(Debug, Clone)]
pub struct LexRanker {
    k: usize,
    // table[j][m] = C(m, j) for j <= k, m <= n
    table: Vec<Vec<usize>>,
    n: usize,
}

impl LexRanker {
    pub fn new(n: usize, k: usize) -> Self {
        let table = (0..=k).map(|j| (0..=n).map(|m| binom(m, j)).collect()).collect();
        LexRanker { k, table, n }
    }

    fn c(&self, m: usize, j: usize) -> usize {
        self.table[j][m]
    }

    /// Rank of a sorted 0-based subset of `{0, .., n-1}` of size `k`.
    pub fn rank_zero_based(&self, combo: &[usize]) -> usize {
        debug_assert_eq!(combo.len(), self.k);
        let k = self.k;
        let mut rank = 0;
        let mut prev = 0;
        for (i, &a) in combo.iter().enumerate() {
            // sum_{v=prev}^{a-1} C(n-1-v, k-1-i) by the hockey-stick identity
            rank += self.c(self.n - prev, k - i) - self.c(self.n - a, k - i);
            prev = a + 1;
        }
        rank
    }

    pub fn rank_one_based(&self, vertices: &[u32]) -> usize {
        let k = self.k;
        let mut rank = 0;
        let mut prev = 0;
        for (i, &v) in vertices.iter().enumerate() {
            let a = v as usize - 1;
            rank += self.c(self.n - prev, k - i) - self.c(self.n - a, k - i);
            prev = a + 1;
        }
        rank
    }
}

/// All `k`-subsets of `[n]` in lexicographic order, 1-based.
pub fn all_faces(n: u32, k: usize) -> impl Iterator<Item = Face> {
    Combinations::new(n as usize, k)
        .map(move |c| Face { n, vertices: c.into_iter().map(|v| v as u32 + 1).collect() })
}

/// Sparse `{-1, 0, +1}` matrix of the `d`-th boundary map, stored column by
/// column. Rows are all `C(n, d)` faces of dimension `d-1`; columns are a
/// sorted set of `d`-faces given by rank.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedBoundaryMatrix {
    n: u32,
    d: usize,
    rows: usize,
    columns: Vec<usize>,
    // d+1 entries per column, in column order, rows ascending
    entries: Vec<(u32, i8)>,
}

impl SignedBoundaryMatrix {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    /// Ranks of the `d`-faces indexing the columns.
    pub fn column_faces(&self) -> &[usize] {
        &self.columns
    }

    pub fn column(&self, c: usize) -> &[(u32, i8)] {
        let w = self.d + 1;
        &self.entries[c * w..(c + 1) * w]
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// `(row, col, sign)` triplets in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, i8)> + '_ {
        let w = self.d + 1;
        self.entries.iter().enumerate().map(move |(i, &(r, s))| (r as usize, i / w, s))
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> crate::exact::IntMatrix<i64> {
        let mut m = crate::exact::IntMatrix::zeros(self.rows, self.cols());
        for (r, c, s) in self.triplets() {
            m[(r, c)] = s as i64;
        }
        m
    }

    /// Transposed dense copy (columns become rows).
    pub fn to_dense_transposed(&self) -> crate::exact::IntMatrix<i64> {
        let mut m = crate::exact::IntMatrix::zeros(self.cols(), self.rows);
        for (r, c, s) in self.triplets() {
            m[(c, r)] = s as i64;
        }
        m
    }

    /// Gram matrix `BᵀB`; diagonal `d+1`, off-diagonal `±1` for columns
    /// sharing a facet.
    pub fn gram(&self) -> crate::exact::IntMatrix<i64> {
        let cols = self.cols();
        let mut by_row: Vec<Vec<(u32, i8)>> = alloc::vec![Vec::new(); self.rows];
        for (r, c, s) in self.triplets() {
            by_row[r].push((c as u32, s));
        }
        let mut g = crate::exact::IntMatrix::zeros(cols, cols);
        for incident in &by_row {
            for &(a, sa) in incident {
                for &(b, sb) in incident {
                    g[(a as usize, b as usize)] += (sa * sb) as i64;
                }
            }
        }
        g
    }

    /// Number of nonzeros in each row.
    pub fn row_counts(&self) -> Vec<usize> {
        let mut counts = alloc::vec![0; self.rows];
        for &(r, _) in &self.entries {
            counts[r as usize] += 1;
        }
        counts
    }

    /// Sparse product `self · other`, where `self` is the lower boundary map.
    /// Returns the nonzero entries `(row, col, value)`.
    pub fn compose(&self, upper: &SignedBoundaryMatrix) -> Result<Vec<(usize, usize, i64)>> {
        if self.cols() != upper.rows || self.d + 1 != upper.d {
            return Err(Error::InvalidParameters("boundary maps do not compose".into()));
        }
        // column index of each (d-1)-face in `self`
        let mut position = alloc::vec![usize::MAX; upper.rows];
        for (i, &f) in self.columns.iter().enumerate() {
            position[f] = i;
        }
        let mut out = Vec::new();
        for c in 0..upper.cols() {
            let mut acc: alloc::collections::BTreeMap<usize, i64> = Default::default();
            for &(mid, s) in upper.column(c) {
                let j = position[mid as usize];
                for &(r, t) in self.column(j) {
                    *acc.entry(r as usize).or_default() += (s * t) as i64;
                }
            }
            out.extend(acc.into_iter().filter(|&(_, v)| v != 0).map(|(r, v)| (r, c, v)));
        }
        Ok(out)
    }

    pub fn column_face(&self, c: usize) -> Face {
        face_unrank(self.n, self.d + 1, self.columns[c]).expect("column rank in range")
    }
}

/// Boundary matrix `∂_{n,d}` of the complete `d`-skeleton of the simplex on
/// `[n]`, shape `C(n,d) × C(n,d+1)`.
pub fn boundary_matrix(n: u32, d: usize) -> Result<SignedBoundaryMatrix> {
    if d == 0 || (n as usize) < d + 1 {
        return Err(Error::InvalidParameters(format!(
            "boundary matrix needs n >= d+1 >= 2, got n={n}, d={d}"
        )));
    }
    let nu = n as usize;
    let cols = binom(nu, d + 1);
    let ranker = LexRanker::new(nu, d);
    let mut entries = Vec::with_capacity(cols * (d + 1));
    let mut facet = alloc::vec![0usize; d];
    let mut stream = Combinations::new(nu, d + 1);
    while let Some(face) = stream.current() {
        // deleting v_i: the facets come out in descending lexicographic order
        let start = entries.len();
        for i in 0..=d {
            facet.clear();
            facet.extend(face.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v));
            let sign = if i % 2 == 0 { 1 } else { -1 };
            entries.push((ranker.rank_zero_based(&facet) as u32, sign));
        }
        entries[start..].reverse();
        stream.advance();
    }
    Ok(SignedBoundaryMatrix { n, d, rows: binom(nu, d), columns: (0..cols).collect(), entries })
}

/// Restriction of `b` to the columns whose `d`-face ranks appear in
/// `faces`. Columns keep the order they have in `b`.
pub fn restrict_columns(b: &SignedBoundaryMatrix, faces: &[usize]) -> Result<SignedBoundaryMatrix> {
    let mut wanted: Vec<usize> = faces.to_vec();
    wanted.sort_unstable();
    wanted.dedup();
    let mut columns = Vec::with_capacity(wanted.len());
    let mut entries = Vec::with_capacity(wanted.len() * (b.d + 1));
    for f in wanted {
        let c = b.columns.binary_search(&f).map_err(|_| Error::FaceNotPresent(f))?;
        columns.push(f);
        entries.extend_from_slice(b.column(c));
    }
    Ok(SignedBoundaryMatrix { n: b.n, d: b.d, rows: b.rows, columns, entries })
}

/// Boundary matrix of the complex with complete `(d-1)`-skeleton and the
/// given `d`-faces (ranks).
pub fn hypertree_boundary(n: u32, d: usize, faces: &[usize]) -> Result<SignedBoundaryMatrix> {
    if d == 0 || (n as usize) < d + 1 {
        return Err(Error::InvalidParameters(format!("need n >= d+1 >= 2, got n={n}, d={d}")));
    }
    let nu = n as usize;
    let total = binom(nu, d + 1);
    let top = LexRanker::new(nu, d);
    let mut sorted = faces.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut entries = Vec::with_capacity(sorted.len() * (d + 1));
    let mut facet = alloc::vec![0usize; d];
    for &f in &sorted {
        if f >= total {
            return Err(Error::FaceNotPresent(f));
        }
        let face = crate::binom::unrank_combination(nu, d + 1, f as u128).expect("in range");
        for i in (0..=d).rev() {
            facet.clear();
            facet.extend(face.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v));
            let sign = if i % 2 == 0 { 1 } else { -1 };
            entries.push((top.rank_zero_based(&facet) as u32, sign));
        }
    }
    Ok(SignedBoundaryMatrix { n, d, rows: binom(nu, d), columns: sorted, entries })
}

/// One face per line, vertices comma separated: `1,2,4`.
pub fn format_face_set(faces: &[Face]) -> String {
    let mut out = String::new();
    for f in faces {
        out.push_str(&format!("{f}\n"));
    }
    out
}

/// Semicolon-joined single-line variant used inside JSON records.
pub fn format_face_list(faces: &[Face]) -> String {
    let parts: Vec<String> = faces.iter().map(|f| format!("{f}")).collect();
    parts.join(";")
}

/// Parses the newline-delimited format. Blank lines are ignored; every
/// face must have `k` vertices.
pub fn parse_face_set(n: u32, k: usize, text: &str) -> Result<Vec<Face>> {
    text.split(['\n', ';'])
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|line| {
            let vertices = line
                .split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|e| Error::Parse(format!("{line:?}: {e}"))))
                .collect::<Result<Vec<u32>>>()?;
            if vertices.len() != k {
                return Err(Error::Parse(format!("{line:?}: expected {k} vertices")));
            }
            Face::new(n, vertices)
        })
        .collect()
}
