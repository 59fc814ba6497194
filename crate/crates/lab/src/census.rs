//! Neighborhood census campaigns across several `n`.

use hypertree_core::local::{
    census_distance, census_mean_degree, neighborhood_census, IncidenceGraph, NeighborhoodCensus, MAX_RADIUS,
};
use hypertree_core::sampler::derive_seed;
use hypertree_core::HypertreeSampler;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::validate_dimension;
use crate::{LabError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CensusAtN {
    pub n: u32,
    pub samples: u64,
    /// Pooled census at the requested radius.
    pub census: NeighborhoodCensus,
    /// Pooled radius-1 census, i.e. the degree histogram of the roots.
    pub degrees: NeighborhoodCensus,
    /// Every `d`-face has degree `d+1` in every sample.
    pub high_degrees_constant: bool,
    /// Pooled root degree sum over root count.
    pub mean_degree: (u64, u64),
}

impl CensusAtN {
    /// Mean root degree equals `(d+1)(n-d)/n` exactly.
    pub fn mean_degree_exact(&self, d: usize) -> bool {
        let (num, den) = self.mean_degree;
        let n = self.n as u64;
        num * n == (d as u64 + 1) * (n - d as u64) * den
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensusCampaign {
    pub d: usize,
    pub radius: usize,
    pub per_n: Vec<CensusAtN>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusSummary {
    pub d: usize,
    pub radius: usize,
    pub n: Vec<u32>,
    pub classes: Vec<usize>,
    pub tv_consecutive: Vec<f64>,
    pub tv_decreasing: bool,
    pub mean_degree_exact: bool,
    pub high_degrees_constant: bool,
}

impl CensusCampaign {
    /// Total variation distances between consecutive `n`.
    pub fn tv_consecutive(&self) -> Vec<f64> {
        self.per_n
            .windows(2)
            .map(|w| census_distance(&w[0].census, &w[1].census).expect("equal radii"))
            .collect()
    }

    pub fn tv_decreasing(&self) -> bool {
        self.tv_consecutive().windows(2).all(|w| w[1] < w[0])
    }

    pub fn summary(&self) -> CensusSummary {
        let tv = self.tv_consecutive();
        CensusSummary {
            d: self.d,
            radius: self.radius,
            n: self.per_n.iter().map(|c| c.n).collect(),
            classes: self.per_n.iter().map(|c| c.census.counts.len()).collect(),
            tv_decreasing: tv.windows(2).all(|w| w[1] < w[0]),
            tv_consecutive: tv,
            mean_degree_exact: self.per_n.iter().all(|c| c.mean_degree_exact(self.d)),
            high_degrees_constant: self.per_n.iter().all(|c| c.high_degrees_constant),
        }
    }
}

/// Samples `samples` hypertrees at each `n` (same seeds as a campaign with
/// this master seed) and pools their censuses.
pub fn census_campaign(
    d: usize,
    n_values: &[u32],
    samples: u64,
    radius: usize,
    master_seed: u64,
    allow_d1: bool,
) -> Result<CensusCampaign> {
    validate_dimension(d, allow_d1)?;
    if radius == 0 || radius > MAX_RADIUS {
        return Err(LabError::Input(format!("radius {radius} outside 1..={MAX_RADIUS}")));
    }
    if samples == 0 {
        return Err(LabError::Input("samples must be positive".into()));
    }
    let mut per_n = Vec::new();
    for &n in n_values {
        if (n as usize) < d + 2 {
            return Err(LabError::Input(format!("n = {n} is below d + 2")));
        }
        let sampler = HypertreeSampler::new(n, d)?;
        let parts: Vec<(NeighborhoodCensus, NeighborhoodCensus, bool)> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let s = sampler.sample_seeded(derive_seed(master_seed, n, i))?;
                let g = IncidenceGraph::new(&s)?;
                let constant = g.high_degrees().iter().all(|&k| k == d + 1);
                Ok((neighborhood_census(&g, radius)?, neighborhood_census(&g, 1)?, constant))
            })
            .collect::<Result<_>>()?;
        let mut census = NeighborhoodCensus::empty(radius);
        let mut degrees = NeighborhoodCensus::empty(1);
        let mut high_degrees_constant = true;
        for (c, deg, constant) in &parts {
            census.merge(c)?;
            degrees.merge(deg)?;
            high_degrees_constant &= constant;
        }
        let mean_degree = census_mean_degree(&degrees)?;
        per_n.push(CensusAtN { n, samples, census, degrees, high_degrees_constant, mean_degree });
    }
    Ok(CensusCampaign { d, radius, per_n })
}
