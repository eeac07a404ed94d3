//! The test grid: every dominant μ ∈ Λ with ℓ̆(t^μ) ≤ 6 in split A_1, A_2,
//! C_2 and the folded 2A_3, run through every check of the adlv module.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::adlv::{nonempty_and_dimension, pipeline_classes, verify_theorem_a, AdlvReport};
use crate::affineweyl::{AffineElt, Frame};
use crate::cache::Cache;
use crate::classpoly::{Engine, Strategy};
use crate::error::{Error, Result};
use crate::presets;
use crate::rootdata::{dominance_leq, GroupDatum, RootSystem};
use crate::sigmaconj::{enumerate_b_g_mu, mu_diamond, mu_natural};

pub const GRID_PRESETS: [&str; 4] = ["pgl2", "pgl3", "psp4", "pgl4_flip"];
pub const GRID_MAX_LENGTH: i64 = 6;
pub const GRID_Q: [u64; 3] = [2, 3, 5];

/// Dominant μ ∈ Λ (ω-coordinates) with ⟨μ, 2ρ⟩ ≤ `max_len`, sorted.
pub fn dominant_mus(g: &GroupDatum, max_len: i64) -> Vec<Vec<i64>> {
    let n = g.rank();
    let two_rho = &g.roots.two_rho;
    let mut out = Vec::new();
    let mut cur = vec![0i64; n];
    loop {
        if RootSystem::pairing(two_rho, &cur) <= max_len && g.in_lattice(&cur) {
            out.push(cur.clone());
        }
        // Odometer over the box bounded by the length.
        let mut i = 0;
        loop {
            if i == n {
                out.sort();
                return out;
            }
            cur[i] += 1;
            if RootSystem::pairing(two_rho, &cur) <= max_len {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PointChecks {
    pub nonemptiness: bool,
    pub dimension: bool,
    pub positivity: bool,
    pub theorem_a: bool,
    pub q_identity: bool,
    pub chen_zhu: bool,
}

impl PointChecks {
    pub fn all(&self) -> bool {
        self.nonemptiness && self.dimension && self.positivity && self.theorem_a && self.q_identity && self.chen_zhu
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointReport {
    pub group: String,
    /// μ in Λ-basis coordinates.
    pub mu: Vec<i64>,
    pub length: i64,
    pub classes: Vec<AdlvReport>,
    pub checks: PointChecks,
    pub error: Option<String>,
}

impl PointReport {
    pub fn ok(&self) -> bool {
        self.error.is_none() && self.checks.all()
    }
}

/// Nonemptiness: the classes met by class polynomials over W_0 t^μ W_0 are
/// exactly those with ν̄ ≤ μ^⋄ and κ = μ^♮.
pub fn check_nonemptiness(engine: &Engine, mu: &[i64]) -> Result<bool> {
    let f = &engine.frame;
    let g = f.g();
    let pipe = pipeline_classes(engine, mu)?;
    let closed: BTreeSet<_> =
        enumerate_b_g_mu(f, mu, engine.budget)?.into_iter().map(|c| (c.newton, c.kappa)).collect();
    let criterion = pipe
        .iter()
        .all(|(nu, k)| *k == mu_natural(f, mu) && dominance_leq(g, nu, &mu_diamond(f, mu)));
    Ok(pipe == closed && criterion)
}

/// Every class polynomial over the double coset is nonzero. Nonnegativity
/// of the (q−1)-coefficients holds by construction (they are unsigned), so
/// this re-audits that no zero entry leaks into a class map.
pub fn check_positivity(engine: &Engine, mu: &[i64]) -> Result<bool> {
    let g = engine.frame.g();
    let t = AffineElt::translation(mu.to_vec());
    for u in g.weyl_elements()? {
        for v in g.weyl_elements()? {
            let w = AffineElt::finite(u.clone()).mul(&t).mul(&AffineElt::finite(v.clone()));
            let polys = engine.class_polynomials(&w)?;
            if polys.is_empty() || polys.values().any(|p| p.is_zero()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn run_point(engine: &Engine, mu: &[i64], qs: &[u64]) -> PointReport {
    let g = engine.frame.g();
    let mut report = PointReport {
        group: g.name.clone(),
        mu: g.to_basis_coords(mu).unwrap_or_else(|| mu.to_vec()),
        length: RootSystem::pairing(&g.roots.two_rho, mu),
        classes: Vec::new(),
        checks: PointChecks::default(),
        error: None,
    };
    let run = || -> Result<(Vec<AdlvReport>, PointChecks)> {
        let mut checks = PointChecks {
            nonemptiness: check_nonemptiness(engine, mu)?,
            positivity: check_positivity(engine, mu)?,
            ..PointChecks::default()
        };
        let classes = verify_theorem_a(engine, mu, qs)?;
        checks.dimension = classes.iter().all(|r| r.nonempty && r.dim.is_some() && r.dim == r.dim_pipeline);
        for b in enumerate_b_g_mu(&engine.frame, mu, engine.budget)? {
            checks.dimension &= nonempty_and_dimension(&engine.frame, mu, &b)?.0;
        }
        checks.theorem_a = classes.iter().all(|r| r.all_very_special);
        checks.q_identity = classes
            .iter()
            .filter(|r| r.basic)
            .all(|r| r.q_check.len() == qs.len() && r.q_check.iter().all(|c| c.holds));
        checks.chen_zhu = classes.iter().all(|r| r.chen_zhu == Some(r.orbit_count));
        Ok((classes, checks))
    };
    match run() {
        Ok((classes, checks)) => {
            report.classes = classes;
            report.checks = checks;
        }
        Err(e) => report.error = Some(e.to_string()),
    }
    report
}

#[derive(Clone, Debug, Serialize)]
pub struct GridReport {
    pub q_values: Vec<u64>,
    pub points: Vec<PointReport>,
}

impl GridReport {
    pub fn ok(&self) -> bool {
        self.points.iter().all(PointReport::ok)
    }
}

/// An engine for a preset, with the on-disk cache if one is configured.
pub fn preset_engine(name: &str, budget: usize, cache: Option<&Path>) -> Result<Engine> {
    let g = Arc::new(presets::load(name)?);
    let e = Engine::new(Frame::standard(g)?, Strategy::Deterministic).with_budget(budget);
    match Cache::resolve(cache) {
        Some(c) => e.with_cache(c),
        None => Ok(e),
    }
}

/// Runs every grid point. Points are independent and fan out over `jobs`
/// workers; the output order does not depend on scheduling.
pub fn run_grid(names: &[&str], qs: &[u64], jobs: usize, budget: usize, cache: Option<&Path>) -> Result<GridReport> {
    let engines: Vec<Engine> = names.iter().map(|n| preset_engine(n, budget, cache)).collect::<Result<_>>()?;
    let mut jobs_list = Vec::new();
    for (i, e) in engines.iter().enumerate() {
        for mu in dominant_mus(e.frame.g(), GRID_MAX_LENGTH) {
            jobs_list.push((i, mu));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::UnsupportedFrame(format!("worker pool: {e}")))?;
    let points = pool.install(|| jobs_list.par_iter().map(|(i, mu)| run_point(&engines[*i], mu, qs)).collect());
    Ok(GridReport { q_values: qs.to_vec(), points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shapes() {
        let count = |n: &str| dominant_mus(&presets::load(n).unwrap(), GRID_MAX_LENGTH).len();
        assert_eq!(count("pgl2"), 7);
        assert_eq!(count("pgl3"), 10);
        assert_eq!(count("psp4"), 4);
        assert_eq!(count("pgl4_flip"), 7);
        assert_eq!(count("sl2"), 4);
    }
}
