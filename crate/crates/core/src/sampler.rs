//! Exact sampling of determinantal hypertrees.
//!
//! `T_n(d)` is the projection DPP with kernel `P_n`, so it can be sampled by
//! sequential conditioning: pick face `j` with probability proportional to
//! its residual mass `‖proj_{W} e_j‖²`, where `W` is the part of the
//! coboundary space orthogonal to everything already selected, then remove
//! the direction of `j` from `W`. After `r = C(n-1,d)` steps the mass is
//! exhausted.
//!
//! The coboundary space is represented through the sparse basis `A` of
//! [`Cobasis`] with the inner product `⟨x, y⟩ = xᵀ G⁻¹ y`. Residual masses
//! are then updated with `(d+1)`-term sparse dot products instead of dense
//! rows of an orthonormal basis.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kernel::Cobasis;
use crate::simplicial::{face_unrank, hypertree_boundary, Face, SignedBoundaryMatrix};
use crate::{Error, Result};

/// Residual masses are recomputed from the basis every this many steps.
pub const REFRESH_INTERVAL: usize = 64;

/// Masses in `[-CLIP_TOLERANCE, 0)` are rounding and are set to zero.
pub const CLIP_TOLERANCE: f64 = 1e-12;

/// A sampled hypertree: the sorted ranks of its `d`-faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypertreeSample {
    pub n: u32,
    pub d: usize,
    pub faces: Vec<usize>,
    /// Seed of the generator that produced the sample, if known.
    pub seed: Option<u64>,
}

impl HypertreeSample {
    pub fn new(n: u32, d: usize, mut faces: Vec<usize>, seed: Option<u64>) -> Self {
        faces.sort_unstable();
        HypertreeSample { n, d, faces, seed }
    }

    pub fn faces(&self) -> Vec<Face> {
        self.faces
            .iter()
            .map(|&f| face_unrank(self.n, self.d + 1, f).expect("face rank in range"))
            .collect()
    }

    pub fn boundary(&self) -> SignedBoundaryMatrix {
        hypertree_boundary(self.n, self.d, &self.faces).expect("sample faces in range")
    }
}

/// Immutable sampler state shared by all draws at a given `(n, d)`.
#[derive(Debug, Clone)]
pub struct HypertreeSampler {
    cobasis: Cobasis,
    diagonal: Vec<f64>,
    certify: bool,
}

impl HypertreeSampler {
    pub fn new(n: u32, d: usize) -> Result<Self> {
        let cobasis = Cobasis::new(n, d)?;
        let diagonal = cobasis.kernel_diagonal();
        Ok(HypertreeSampler { cobasis, diagonal, certify: true })
    }

    /// Disables the finite-homology certificate on each draw.
    pub fn without_certificate(mut self) -> Self {
        self.certify = false;
        self
    }

    pub fn n(&self) -> u32 {
        self.cobasis.n()
    }

    pub fn d(&self) -> usize {
        self.cobasis.d()
    }

    pub fn cobasis(&self) -> &Cobasis {
        &self.cobasis
    }

    /// Draws with a ChaCha8 stream seeded by `seed`; the seed is recorded.
    pub fn sample_seeded(&self, seed: u64) -> Result<HypertreeSample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = self.sample(&mut rng)?;
        s.seed = Some(seed);
        Ok(s)
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<HypertreeSample> {
        let faces = self.select(rng)?;
        let sample = HypertreeSample::new(self.n(), self.d(), faces, None);
        if self.certify && !crate::homology::is_hypertree(sample.n, sample.d, &sample.faces)? {
            return Err(Error::CertificationFailed);
        }
        Ok(sample)
    }

    fn select<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<Vec<usize>> {
        let r = self.cobasis.rank();
        let ginv = self.cobasis.gram_inverse();
        let mut mass = self.diagonal.clone();
        let mut selected = Vec::with_capacity(r);
        // e_s: orthonormal (in the G⁻¹ inner product) span of the selected
        // rows; g_s = G⁻¹ e_s
        let mut es: Vec<Vec<f64>> = Vec::with_capacity(r);
        let mut gs: Vec<Vec<f64>> = Vec::with_capacity(r);
        for step in 0..r {
            if step > 0 && step % REFRESH_INTERVAL == 0 {
                self.refresh(&mut mass, &gs, step)?;
            }
            let total: f64 = mass.iter().sum();
            let expected = (r - step) as f64;
            if (total - expected).abs() > 1e-6 * expected {
                return Err(Error::MassDrift { step, total, expected });
            }
            let j = pick(&mass, uniform(rng) * total);
            let row = self.cobasis.sparse_row(j);

            let mut e = vec![0.0; r];
            let mut g = vec![0.0; r];
            for &(a, x) in row {
                e[a as usize] += x;
                axpy(&mut g, x, ginv.column(a as usize).as_slice());
            }
            for (es_s, gs_s) in es.iter().zip(&gs) {
                let c: f64 = row.iter().map(|&(a, x)| x * gs_s[a as usize]).sum();
                axpy(&mut e, -c, es_s);
                axpy(&mut g, -c, gs_s);
            }
            // second Gram-Schmidt pass against the dense residual
            for (es_s, gs_s) in es.iter().zip(&gs) {
                let c = dot(gs_s, &e);
                axpy(&mut e, -c, es_s);
                axpy(&mut g, -c, gs_s);
            }
            let norm2 = dot(&e, &g);
            if norm2.is_nan() || norm2 <= 0.0 {
                return Err(Error::Numerical(format!(
                    "selected face {j} has no residual mass ({norm2:e}) at step {step}"
                )));
            }
            let inv = 1.0 / libm::sqrt(norm2);
            e.iter_mut().for_each(|x| *x *= inv);
            g.iter_mut().for_each(|x| *x *= inv);

            mass[j] = 0.0;
            for (i, m) in mass.iter_mut().enumerate() {
                if *m == 0.0 {
                    continue;
                }
                let c: f64 =
                    self.cobasis.sparse_row(i).iter().map(|&(a, x)| x * g[a as usize]).sum();
                *m = clip(*m - c * c, step, i)?;
            }
            es.push(e);
            gs.push(g);
            selected.push(j);
        }
        Ok(selected)
    }

    // mass_i = P_ii - Σ_s ⟨a_i, e_s⟩², recomputed from scratch
    fn refresh(&self, mass: &mut [f64], gs: &[Vec<f64>], step: usize) -> Result<()> {
        for (i, m) in mass.iter_mut().enumerate() {
            if *m == 0.0 {
                continue;
            }
            let row = self.cobasis.sparse_row(i);
            let mut v = self.diagonal[i];
            for g in gs {
                let c: f64 = row.iter().map(|&(a, x)| x * g[a as usize]).sum();
                v -= c * c;
            }
            *m = clip(v, step, i)?;
        }
        Ok(())
    }
}

fn clip(v: f64, step: usize, face: usize) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -CLIP_TOLERANCE {
        Ok(0.0)
    } else {
        Err(Error::NegativeMass { step, face, mass: v })
    }
}

fn pick(mass: &[f64], mut u: f64) -> usize {
    let mut last = 0;
    for (i, &m) in mass.iter().enumerate() {
        if m <= 0.0 {
            continue;
        }
        if u < m {
            return i;
        }
        u -= m;
        last = i;
    }
    last
}

/// Seed for sample `index` at size `n` of a campaign keyed by `master`.
/// Each draw owns its stream, so results do not depend on how draws are
/// scheduled across workers.
pub fn derive_seed(master: u64, n: u32, index: u64) -> u64 {
    let mut x = splitmix(master ^ 0x6a09_e667_f3bc_c909);
    x = splitmix(x ^ n as u64);
    splitmix(x ^ index)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform double in `[0, 1)` from the top 53 bits.
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
