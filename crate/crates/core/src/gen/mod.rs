// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! Instance generators over geographic data.
//!
//! | model    | utility of agent `i` for item `j` in block `q`                         |
//! |----------|------------------------------------------------------------------------|
//! | `dist`   | `N(1/d(a_i, loc_q), σ²)` clamped at 0, rows normalized to sum 1         |
//! | `ethn`   | as `dist`, with one preferred point per type                           |
//! | `proj`   | 1 if `loc_q` is within `ρ` km of `i`'s preferred region centroid, else 0 |
//! | `price`  | `1/(p_j - s_i/3)²`, `s_i ~ N(S(p), σ²)`, `p_j ~ U[LB, UB]`              |
//! | `chicago`| as `dist` from a tier tract centroid, truncated to the best 20 blocks   |
//!
//! Capacities come from per-type quotas with floor rounding. Every
//! generator is a pure function of the dataset and config; the random
//! stream is consumed in a fixed order (locations, then prices, then
//! salaries or noise in agent-major, item-minor order).

pub mod geo;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, QuotaProfile, Rounding};
use crate::rng::{rng_from_seed, SplitMix64};
pub use geo::{distance_km, guarded_distance_km, LatLon, SamplingDomain, DEFAULT_DEGREE_KM};

/// Lower bound on `|p_j - s_i/3|` in the price model.
pub const PRICE_GAP_EPS: f64 = 1e-6;

/// Buffer around the block hull used when no sampling polygon is given.
pub const DEFAULT_HULL_BUFFER_KM: f64 = 5.0;

/// Blocks kept per agent by the Chicago model.
pub const DEFAULT_TOP_BLOCKS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub size: usize,
    pub loc: LatLon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub name: String,
    pub centroid: LatLon,
    /// Population of each type.
    pub population: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeStat {
    pub name: String,
    pub proportion: f64,
    /// Mean monthly salary.
    pub salary: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceBound {
    pub category: String,
    pub block: usize,
    pub lb: f64,
    pub ub: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tract {
    pub id: String,
    /// Zero-based tier, i.e. type index.
    pub tier: usize,
    pub loc: LatLon,
}

/// A fixed type composition for a given number of agents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Composition {
    pub n: usize,
    pub sizes: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GeoDataset {
    pub blocks: Vec<Block>,
    pub types: Vec<TypeStat>,
    #[serde(default)]
    pub regions: Vec<Region>,
    #[serde(default)]
    pub prices: Vec<PriceBound>,
    #[serde(default)]
    pub tracts: Vec<Tract>,
    /// Polygon for preferred locations; the buffered block hull when empty.
    #[serde(default)]
    pub domain: Vec<LatLon>,
    #[serde(default)]
    pub compositions: Vec<Composition>,
}

impl GeoDataset {
    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::InvalidInput("dataset has no blocks".into()));
        }
        for (q, b) in self.blocks.iter().enumerate() {
            if b.size == 0 {
                return Err(Error::InvalidInput(format!("block {q} ({}) has size 0", b.name)));
            }
            check_loc(b.loc, &format!("block {q} ({})", b.name))?;
        }
        if self.types.is_empty() {
            return Err(Error::InvalidInput("dataset has no types".into()));
        }
        let total: f64 = self.types.iter().map(|t| t.proportion).sum();
        if self.types.iter().any(|t| !(t.proportion >= 0.0)) || libm::fabs(total - 1.0) > 1e-9 {
            return Err(Error::InvalidInput(format!("type proportions sum to {total}, expected 1")));
        }
        let k = self.types.len();
        for r in &self.regions {
            if r.population.len() != k || r.population.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return Err(Error::InvalidInput(format!("region {} needs {k} nonnegative populations", r.name)));
            }
            check_loc(r.centroid, &format!("region {}", r.name))?;
        }
        for (row, p) in self.prices.iter().enumerate() {
            if p.block >= self.blocks.len() {
                return Err(Error::InvalidInput(format!("price row {row}: unknown block {}", p.block)));
            }
            if !(p.lb.is_finite() && p.ub.is_finite() && p.lb <= p.ub) {
                return Err(Error::InvalidInput(format!("price row {row}: need LB <= UB, got {} > {}", p.lb, p.ub)));
            }
        }
        for t in &self.tracts {
            if t.tier >= k {
                return Err(Error::InvalidInput(format!("tract {}: tier {} out of range", t.id, t.tier + 1)));
            }
            check_loc(t.loc, &format!("tract {}", t.id))?;
        }
        for c in &self.compositions {
            if c.sizes.len() != k || c.sizes.iter().sum::<usize>() != c.n {
                return Err(Error::InvalidInput(format!("composition for n = {} does not match the types", c.n)));
            }
        }
        Ok(())
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.size).collect()
    }

    pub fn m(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    /// The preferred-location sampling domain.
    pub fn sampling_domain(&self, degree_km: f64) -> SamplingDomain {
        if self.domain.len() >= 3 {
            SamplingDomain::polygon(&self.domain, degree_km)
        } else {
            let anchors: Vec<LatLon> = self.blocks.iter().map(|b| b.loc).collect();
            SamplingDomain::hull_buffer(&anchors, DEFAULT_HULL_BUFFER_KM, degree_km)
        }
    }

    /// Type sizes for `n` agents: a listed composition when one exists,
    /// otherwise largest-remainder apportionment of the proportions.
    pub fn composition(&self, n: usize) -> Vec<usize> {
        if let Some(c) = self.compositions.iter().find(|c| c.n == n) {
            return c.sizes.clone();
        }
        let props: Vec<f64> = self.types.iter().map(|t| t.proportion).collect();
        largest_remainder(&props, n)
    }
}

fn check_loc(p: LatLon, what: &str) -> Result<()> {
    if p.lat.is_finite() && p.lon.is_finite() && libm::fabs(p.lat) <= 90.0 && libm::fabs(p.lon) <= 180.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what}: invalid coordinates ({}, {})", p.lat, p.lon)))
    }
}

/// Apportions `n` by `proportions`: floors first, then one extra unit to
/// the largest fractional parts (lower index first on ties).
pub fn largest_remainder(proportions: &[f64], n: usize) -> Vec<usize> {
    let total: f64 = proportions.iter().sum();
    let quotas: Vec<f64> = proportions.iter().map(|p| p / total * n as f64).collect();
    let mut sizes: Vec<usize> = quotas.iter().map(|q| libm::floor(*q) as usize).collect();
    let mut rest: Vec<usize> = (0..quotas.len()).collect();
    rest.sort_by(|&a, &b| {
        let fa = quotas[a] - libm::floor(quotas[a]);
        let fb = quotas[b] - libm::floor(quotas[b]);
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let assigned: usize = sizes.iter().sum();
    for &p in rest.iter().take(n.saturating_sub(assigned)) {
        sizes[p] += 1;
    }
    sizes
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum UtilityModel {
    Dist { sigma2: f64 },
    Ethn { sigma2: f64 },
    Proj { rho_km: f64 },
    Price { sigma2: f64 },
    Chicago {
        sigma2: f64,
        #[serde(default = "default_top_blocks")]
        top_blocks: usize,
    },
}

fn default_top_blocks() -> usize {
    DEFAULT_TOP_BLOCKS
}

impl UtilityModel {
    pub fn name(&self) -> &'static str {
        match self {
            UtilityModel::Dist { .. } => "dist",
            UtilityModel::Ethn { .. } => "ethn",
            UtilityModel::Proj { .. } => "proj",
            UtilityModel::Price { .. } => "price",
            UtilityModel::Chicago { .. } => "chicago",
        }
    }

    /// The model's parameter (`σ²` or `ρ`).
    pub fn parameter(&self) -> f64 {
        match *self {
            UtilityModel::Dist { sigma2 }
            | UtilityModel::Ethn { sigma2 }
            | UtilityModel::Price { sigma2 }
            | UtilityModel::Chicago { sigma2, .. } => sigma2,
            UtilityModel::Proj { rho_km } => rho_km,
        }
    }
}

/// How normal noise is drawn in the distance models.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// One draw per (agent, item).
    #[default]
    PerItem,
    /// One draw per (agent, block), shared by the block's items.
    PerBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    #[serde(flatten)]
    pub model: UtilityModel,
    pub n: usize,
    pub seed: u64,
    /// Quota per type, applied to every block with floor rounding.
    pub quotas: Vec<f64>,
    #[serde(default = "default_degree_km")]
    pub degree_km: f64,
    #[serde(default)]
    pub noise: NoiseMode,
}

fn default_degree_km() -> f64 {
    DEFAULT_DEGREE_KM
}

impl ModelConfig {
    pub fn new(model: UtilityModel, n: usize, seed: u64, quotas: Vec<f64>) -> Self {
        Self {
            model,
            n,
            seed,
            quotas,
            degree_km: DEFAULT_DEGREE_KM,
            noise: NoiseMode::PerItem,
        }
    }

    fn validate(&self, k: usize) -> Result<()> {
        let bad = match self.model {
            UtilityModel::Dist { sigma2 }
            | UtilityModel::Ethn { sigma2 }
            | UtilityModel::Price { sigma2 }
            | UtilityModel::Chicago { sigma2, .. } => !(sigma2.is_finite() && sigma2 >= 0.0),
            UtilityModel::Proj { rho_km } => !(rho_km > 0.0),
        };
        if bad {
            return Err(Error::InvalidInput(format!(
                "invalid {} parameter {}",
                self.model.name(),
                self.model.parameter()
            )));
        }
        if let UtilityModel::Chicago { top_blocks: 0, .. } = self.model {
            return Err(Error::InvalidInput("top_blocks must be positive".into()));
        }
        if self.quotas.len() != k {
            return Err(Error::InvalidInput(format!("{} quotas given for {k} types", self.quotas.len())));
        }
        if !(self.degree_km > 0.0 && self.degree_km.is_finite()) {
            return Err(Error::InvalidInput("degree_km must be positive".into()));
        }
        Ok(())
    }
}

/// Generates an instance for `cfg.model`.
pub fn generate(data: &GeoDataset, cfg: &ModelConfig) -> Result<Instance> {
    match cfg.model {
        UtilityModel::Dist { .. } => gen_dist(data, cfg),
        UtilityModel::Ethn { .. } => gen_ethn(data, cfg),
        UtilityModel::Proj { .. } => gen_proj(data, cfg),
        UtilityModel::Price { .. } => gen_price(data, cfg),
        UtilityModel::Chicago { .. } => gen_chicago(data, cfg),
    }
}

struct Setup {
    type_sizes: Vec<usize>,
    rng: SplitMix64,
}

fn setup(data: &GeoDataset, cfg: &ModelConfig, expected: &str) -> Result<Setup> {
    if cfg.model.name() != expected {
        return Err(Error::InvalidInput(format!(
            "config is for model {}, not {expected}",
            cfg.model.name()
        )));
    }
    data.validate()?;
    cfg.validate(data.types.len())?;
    Ok(Setup {
        type_sizes: data.composition(cfg.n),
        rng: rng_from_seed(cfg.seed),
    })
}

fn finish(data: &GeoDataset, cfg: &ModelConfig, type_sizes: Vec<usize>, utilities: Vec<f64>) -> Result<Instance> {
    let profile = QuotaProfile::uniform(&cfg.quotas, data.blocks.len(), Rounding::Floor);
    let inst = Instance::with_quota_profile(type_sizes, data.block_sizes(), utilities, profile)?;
    inst.with_names(
        data.types.iter().map(|t| t.name.clone()).collect(),
        data.blocks.iter().map(|b| b.name.clone()).collect(),
    )
}

fn normal(mean: f64, sigma2: f64) -> Normal<f64> {
    Normal::new(mean, libm::sqrt(sigma2)).expect("validated variance")
}

/// Raw (unnormalized, clamped) distance utilities of one agent.
fn distance_row(
    data: &GeoDataset,
    cfg: &ModelConfig,
    sigma2: f64,
    at: LatLon,
    rng: &mut SplitMix64,
    row: &mut [f64],
) {
    let mut j = 0;
    for b in &data.blocks {
        let mean = 1.0 / guarded_distance_km(at, b.loc, cfg.degree_km);
        let dist = normal(mean, sigma2);
        let mut shared = None;
        for _ in 0..b.size {
            let x = if sigma2 == 0.0 {
                mean
            } else {
                match cfg.noise {
                    NoiseMode::PerItem => dist.sample(rng),
                    NoiseMode::PerBlock => *shared.get_or_insert_with(|| dist.sample(rng)),
                }
            };
            row[j] = x.max(0.0);
            j += 1;
        }
    }
}

fn normalize(row: &mut [f64]) {
    let total: f64 = row.iter().sum();
    if total > 0.0 {
        for x in row.iter_mut() {
            *x /= total;
        }
    } else {
        let u = 1.0 / row.len() as f64;
        row.fill(u);
    }
}

fn sample_domain(data: &GeoDataset, cfg: &ModelConfig) -> Result<SamplingDomain> {
    let dom = data.sampling_domain(cfg.degree_km);
    if dom.is_degenerate() {
        return Err(Error::InvalidInput("sampling domain is empty".into()));
    }
    Ok(dom)
}

fn distance_model(data: &GeoDataset, cfg: &ModelConfig, name: &str, shared: bool) -> Result<Instance> {
    let Setup { type_sizes, mut rng } = setup(data, cfg, name)?;
    let sigma2 = cfg.model.parameter();
    let dom = sample_domain(data, cfg)?;
    let n: usize = type_sizes.iter().sum();
    let m = data.m();
    let locations: Vec<LatLon> = if shared {
        let points: Vec<LatLon> = type_sizes.iter().map(|_| dom.sample(&mut rng)).collect();
        type_sizes
            .iter()
            .enumerate()
            .flat_map(|(p, &s)| core::iter::repeat_n(points[p], s))
            .collect()
    } else {
        (0..n).map(|_| dom.sample(&mut rng)).collect()
    };
    let mut u = vec![0.0; n * m];
    for (i, &at) in locations.iter().enumerate() {
        let row = &mut u[i * m..(i + 1) * m];
        distance_row(data, cfg, sigma2, at, &mut rng, row);
        normalize(row);
    }
    Ok(with_locations(finish(data, cfg, type_sizes, u)?, &locations))
}

fn with_locations(inst: Instance, locs: &[LatLon]) -> Instance {
    inst.with_metadata("agent_lat", locs.iter().map(|p| p.lat).collect())
        .with_metadata("agent_lon", locs.iter().map(|p| p.lon).collect())
}

/// Distance model with an independent preferred point per agent.
pub fn gen_dist(data: &GeoDataset, cfg: &ModelConfig) -> Result<Instance> {
    distance_model(data, cfg, "dist", false)
}

/// Distance model with one preferred point per type.
pub fn gen_ethn(data: &GeoDataset, cfg: &ModelConfig) -> Result<Instance> {
    distance_model(data, cfg, "ethn", true)
}

/// Approval model over planning regions.
pub fn gen_proj(data: &GeoDataset, cfg: &ModelConfig) -> Result<Instance> {
    let Setup { type_sizes, mut rng } = setup(data, cfg, "proj")?;
    let UtilityModel::Proj { rho_km } = cfg.model else { unreachable!() };
    if data.regions.is_empty() {
        return Err(Error::InvalidInput("proj model needs a region table".into()));
    }
    let n: usize = type_sizes.iter().sum();
    let m = data.m();
    let mut choosers = Vec::with_capacity(type_sizes.len());
    for (p, &size) in type_sizes.iter().enumerate() {
        let weights: Vec<f64> = data.regions.iter().map(|r| r.population[p]).collect();
        match WeightedIndex::new(&weights) {
            Ok(w) => choosers.push(Some(w)),
            Err(_) if size == 0 => choosers.push(None),
            Err(_) => {
                return Err(Error::InvalidInput(format!(
                    "type {} has no population in any region",
                    data.types[p].name
                )))
            }
        }
    }
    let mut u = vec![0.0; n * m];
    let mut chosen = Vec::with_capacity(n);
    let mut i = 0;
    for (p, &size) in type_sizes.iter().enumerate() {
        for _ in 0..size {
            let r = choosers[p].as_ref().expect("nonempty type").sample(&mut rng);
            chosen.push(r as f64);
            let centroid = data.regions[r].centroid;
            let mut j = 0;
            for b in &data.blocks {
                let approve = distance_km(centroid, b.loc, cfg.degree_km) <= rho_km;
                for _ in 0..b.size {
                    u[i * m + j] = if approve { 1.0 } else { 0.0 };
                    j += 1;
                }
            }
            i += 1;
        }
    }
    Ok(finish(data, cfg, type_sizes, u)?.with_metadata("agent_region", chosen))
}

/// Price model; item categories are assigned round-robin within a block in
/// the order the block's price rows are listed.
pub fn gen_price(data: &GeoDataset, cfg: &ModelConfig) -> Result<Instance> {
    let Setup { type_sizes, mut rng } = setup(data, cfg, "price")?;
    let sigma2 = cfg.model.parameter();
    let n: usize = type_sizes.iter().sum();
    let m = data.m();
    let mut prices = Vec::with_capacity(m);
    for (q, b) in data.blocks.iter().enumerate() {
        let rows: Vec<&PriceBound> = data.prices.iter().filter(|p| p.block == q).collect();
        if rows.is_empty() {
            return Err(Error::InvalidInput(format!("no price bounds for block {q} ({})", b.name)));
        }
        for s in 0..b.size {
            let bound = rows[s % rows.len()];
            prices.push(bound.lb + (bound.ub - bound.lb) * rng.random::<f64>());
        }
    }
    let mut salaries = Vec::with_capacity(n);
    for (p, &size) in type_sizes.iter().enumerate() {
        let mean = data.types[p].salary;
        let dist = normal(mean, sigma2);
        for _ in 0..size {
            salaries.push(if sigma2 == 0.0 { mean } else { dist.sample(&mut rng) });
        }
    }
    let mut u = vec![0.0; n * m];
    for (i, &s) in salaries.iter().enumerate() {
        let budget = s / 3.0;
        for (j, &price) in prices.iter().enumerate() {
            let gap = libm::fabs(price - budget).max(PRICE_GAP_EPS);
            u[i * m + j] = 1.0 / (gap * gap);
        }
    }
    let mean_salaries = data.types.iter().map(|t| t.salary).collect();
    Ok(finish(data, cfg, type_sizes, u)?
        .with_metadata("salary_mean", mean_salaries)
        .with_metadata("salary", salaries)
        .with_metadata("price", prices))
}

/// Distance model from tier-conditional tract centroids, keeping each
/// agent's best `top_blocks` blocks by mean raw item utility (lower block
/// index on ties).
pub fn gen_chicago(data: &GeoDataset, cfg: &ModelConfig) -> Result<Instance> {
    let Setup { type_sizes, mut rng } = setup(data, cfg, "chicago")?;
    let UtilityModel::Chicago { sigma2, top_blocks } = cfg.model else { unreachable!() };
    let k = data.types.len();
    let by_tier: Vec<Vec<LatLon>> = (0..k)
        .map(|p| data.tracts.iter().filter(|t| t.tier == p).map(|t| t.loc).collect())
        .collect();
    for (p, &size) in type_sizes.iter().enumerate() {
        if size > 0 && by_tier[p].is_empty() {
            return Err(Error::InvalidInput(format!("no tracts for tier {}", data.types[p].name)));
        }
    }
    let n: usize = type_sizes.iter().sum();
    let m = data.m();
    let mut locations = Vec::with_capacity(n);
    for (p, &size) in type_sizes.iter().enumerate() {
        for _ in 0..size {
            locations.push(by_tier[p][rng.random_range(0..by_tier[p].len())]);
        }
    }
    let starts: Vec<usize> = data
        .blocks
        .iter()
        .scan(0, |acc, b| {
            let s = *acc;
            *acc += b.size;
            Some(s)
        })
        .collect();
    let mut u = vec![0.0; n * m];
    for (i, &at) in locations.iter().enumerate() {
        let row = &mut u[i * m..(i + 1) * m];
        distance_row(data, cfg, sigma2, at, &mut rng, row);
        let mut rank: Vec<(f64, usize)> = data
            .blocks
            .iter()
            .enumerate()
            .map(|(q, b)| {
                let items = &row[starts[q]..starts[q] + b.size];
                (items.iter().sum::<f64>() / b.size as f64, q)
            })
            .collect();
        rank.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut keep = vec![false; data.blocks.len()];
        for &(_, q) in rank.iter().take(top_blocks) {
            keep[q] = true;
        }
        for (q, b) in data.blocks.iter().enumerate() {
            if !keep[q] {
                row[starts[q]..starts[q] + b.size].fill(0.0);
            }
        }
        if row.iter().sum::<f64>() > 0.0 {
            normalize(row);
        } else {
            // uniform over the kept blocks' items
            for (q, b) in data.blocks.iter().enumerate() {
                if keep[q] {
                    row[starts[q]..starts[q] + b.size].fill(1.0);
                }
            }
            normalize(row);
        }
    }
    Ok(with_locations(finish(data, cfg, type_sizes, u)?, &locations))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_blocks() -> GeoDataset {
        GeoDataset {
            blocks: vec![
                Block { name: "a".into(), size: 2, loc: LatLon::new(0.0, 1.0 / 111.0) },
                Block { name: "b".into(), size: 1, loc: LatLon::new(0.0, 2.0 / 111.0) },
            ],
            types: vec![
                TypeStat { name: "x".into(), proportion: 0.5, salary: 3000.0 },
                TypeStat { name: "y".into(), proportion: 0.5, salary: 6000.0 },
            ],
            // a single point at the origin
            domain: vec![],
            ..GeoDataset::default()
        }
    }

    #[test]
    fn apportionment() {
        assert_eq!(largest_remainder(&[0.741, 0.134, 0.125], 1350), vec![1000, 181, 169]);
        assert_eq!(largest_remainder(&[0.5, 0.5], 3), vec![2, 1]);
        assert_eq!(largest_remainder(&[1.0], 0), vec![0]);
    }

    #[test]
    fn noiseless_distance_utilities_are_proportional_to_inverse_distance() {
        let data = two_blocks();
        let cfg = ModelConfig::new(UtilityModel::Dist { sigma2: 0.0 }, 2, 1, vec![1.0, 1.0]);
        let mut rng = rng_from_seed(0);
        let mut row = vec![0.0; 3];
        distance_row(&data, &cfg, 0.0, LatLon::new(0.0, 0.0), &mut rng, &mut row);
        assert!((row[0] - 1.0).abs() < 1e-12 && (row[2] - 0.5).abs() < 1e-12);
        normalize(&mut row);
        assert!((row[0] / row[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rows_sum_to_one_and_are_reproducible() {
        let data = two_blocks();
        let cfg = ModelConfig::new(UtilityModel::Dist { sigma2: 1.0 }, 40, 9, vec![1.0, 0.5]);
        let a = gen_dist(&data, &cfg).unwrap();
        for i in 0..a.n() {
            assert!((a.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        assert_eq!(a, gen_dist(&data, &cfg).unwrap());
        assert_eq!(a.capacities(), &[2, 1, 1, 0]);
    }

    #[test]
    fn noiseless_ethn_is_type_uniform() {
        let data = two_blocks();
        let cfg = ModelConfig::new(UtilityModel::Ethn { sigma2: 0.0 }, 6, 2, vec![1.0, 1.0]);
        assert!(gen_ethn(&data, &cfg).unwrap().is_type_uniform());
        let noisy = ModelConfig::new(UtilityModel::Ethn { sigma2: 1.0 }, 6, 2, vec![1.0, 1.0]);
        assert!(!gen_ethn(&data, &noisy).unwrap().is_type_uniform());
    }

    #[test]
    fn per_block_noise_is_shared_within_blocks() {
        let data = two_blocks();
        let mut cfg = ModelConfig::new(UtilityModel::Dist { sigma2: 1.0 }, 10, 4, vec![1.0, 1.0]);
        cfg.noise = NoiseMode::PerBlock;
        assert!(gen_dist(&data, &cfg).unwrap().is_block_uniform());
    }

    #[test]
    fn proj_extremes() {
        let mut data = two_blocks();
        data.regions = vec![Region {
            name: "r".into(),
            centroid: LatLon::new(0.5, 0.5),
            population: vec![1.0, 2.0],
        }];
        let all = gen_proj(&data, &ModelConfig::new(UtilityModel::Proj { rho_km: 1e6 }, 4, 1, vec![1.0, 1.0])).unwrap();
        assert!(all.utilities().iter().all(|&u| u == 1.0));
        let none = gen_proj(&data, &ModelConfig::new(UtilityModel::Proj { rho_km: 1e-6 }, 4, 1, vec![1.0, 1.0])).unwrap();
        assert!(none.utilities().iter().all(|&u| u == 0.0));
        assert!(none.is_block_uniform());
        data.regions.clear();
        let err = gen_proj(&data, &ModelConfig::new(UtilityModel::Proj { rho_km: 1.0 }, 4, 1, vec![1.0, 1.0]));
        assert!(err.unwrap_err().is_input_error());
    }

    #[test]
    fn price_formula_and_metadata() {
        let mut data = two_blocks();
        data.prices = vec![
            PriceBound { category: "3-room".into(), block: 0, lb: 990.0, ub: 990.0 },
            PriceBound { category: "3-room".into(), block: 1, lb: 1990.0, ub: 1990.0 },
        ];
        let cfg = ModelConfig::new(UtilityModel::Price { sigma2: 0.0 }, 2, 1, vec![1.0, 1.0]);
        let inst = gen_price(&data, &cfg).unwrap();
        // s/3 = 1000 = p + 10 for block 0; type y has s/3 = 2000
        assert!((inst.utility(0, 0) - 0.01).abs() < 1e-15);
        assert!((inst.utility(1, 2) - 0.01).abs() < 1e-15);
        assert!(inst.is_type_uniform());
        assert_eq!(inst.metadata()["salary_mean"], vec![3000.0, 6000.0]);
        data.prices.pop();
        assert!(gen_price(&data, &cfg).unwrap_err().is_input_error());
    }

    #[test]
    fn chicago_truncates_to_top_blocks() {
        let mut data = two_blocks();
        data.tracts = vec![
            Tract { id: "t1".into(), tier: 0, loc: LatLon::new(0.0, 0.0) },
            Tract { id: "t2".into(), tier: 1, loc: LatLon::new(0.0, 3.0 / 111.0) },
        ];
        let cfg = ModelConfig::new(UtilityModel::Chicago { sigma2: 0.0, top_blocks: 1 }, 2, 1, vec![0.25, 0.25]);
        let inst = gen_chicago(&data, &cfg).unwrap();
        assert_eq!(inst.row(0), &[0.5, 0.5, 0.0]);
        assert_eq!(inst.row(1), &[0.0, 0.0, 1.0]);
        data.tracts.pop();
        assert!(gen_chicago(&data, &cfg).unwrap_err().is_input_error());
    }

    #[test]
    fn model_mismatch_and_bad_parameters() {
        let data = two_blocks();
        let cfg = ModelConfig::new(UtilityModel::Proj { rho_km: 1.0 }, 2, 1, vec![1.0, 1.0]);
        assert!(gen_dist(&data, &cfg).unwrap_err().is_input_error());
        let cfg = ModelConfig::new(UtilityModel::Dist { sigma2: -1.0 }, 2, 1, vec![1.0, 1.0]);
        assert!(gen_dist(&data, &cfg).unwrap_err().is_input_error());
        let cfg = ModelConfig::new(UtilityModel::Dist { sigma2: 1.0 }, 2, 1, vec![1.0]);
        assert!(gen_dist(&data, &cfg).unwrap_err().is_input_error());
    }
}
