//! Executable motion planners and their statistical verification.
//!
//! Three planner families, matching the catalog upper bounds they witness:
//! a 2-rule planner for sphere pairs, a 3-rule planner for wedge pairs,
//! and a k-rule planner for real projective pairs driven by a non-singular
//! bilinear map into `R^k`. Paths are discretized geodesic concatenations;
//! [`verify_planner`] samples queries and reports cover failures, endpoint
//! errors, and a continuity defect.

mod bilinear;
mod projective;
mod sphere;
pub mod vecmath;
mod wedge;

pub use bilinear::{BilinearMap, NonsingularityCertificate};
pub use projective::{canonical_rep, projective_distance, ProjectivePlanner};
pub use sphere::{SpherePairPlanner, SphereQuery};
pub use wedge::{WedgePlanner, WedgePoint};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

/// Samples per concatenated path segment.
pub const SAMPLES_PER_SEGMENT: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("point is not on the unit sphere")]
    NotOnSphere,
    #[error("target point is not in the standard subsphere")]
    NotInSubsphere,
    #[error("target point lies outside the first {m} spheres of the wedge")]
    SubwedgeViolation { m: usize },
    #[error("no planning rule applies to the query")]
    NoRuleApplies,
    #[error("sampled diagonal image is not contained in an open half-space")]
    PositivizationFailed,
    #[error("map is not non-singular")]
    NotNonsingular,
    #[error("bad query: {0}")]
    BadQuery(String),
}

/// A discretized path produced by one planning rule.
#[derive(Clone, Debug)]
pub struct PathSample {
    /// 1-based index of the rule that served the query.
    pub rule: usize,
    /// Uniform parameter grid on `[0, 1]`.
    pub t: Vec<f64>,
    /// Sampled points in the planner's encoding.
    pub points: Vec<Vec<f64>>,
}

impl PathSample {
    pub fn to_json(&self) -> Value {
        json!({
            "rule": self.rule,
            "t": self.t,
            "points": self.points,
        })
    }
}

/// Samples a sequence of segment closures into one reparametrized path.
pub(crate) fn sample_segments(
    rule: usize,
    segments: &[Box<dyn Fn(f64) -> Vec<f64> + '_>],
) -> PathSample {
    let total = segments.len() * SAMPLES_PER_SEGMENT;
    let mut t = Vec::with_capacity(total);
    let mut points = Vec::with_capacity(total);
    for (si, seg) in segments.iter().enumerate() {
        for l in 0..SAMPLES_PER_SEGMENT {
            let local = l as f64 / (SAMPLES_PER_SEGMENT - 1) as f64;
            let global = (si * SAMPLES_PER_SEGMENT + l) as f64 / (total - 1) as f64;
            t.push(global);
            points.push(seg(local));
        }
    }
    PathSample { rule, t, points }
}

/// A motion planner that can be statistically verified.
pub trait Planner: Sync {
    type Query: Clone + Send + Sync;

    fn plan(&self, q: &Self::Query) -> Result<PathSample, PlanError>;
    fn sample_query(&self, rng: &mut ChaCha8Rng) -> Self::Query;
    /// A nearby query at distance at most `delta`; with a fixed RNG stream
    /// the perturbation direction does not depend on `delta`, so halving
    /// `delta` moves the perturbed query along a fixed ray.
    fn perturb(&self, q: &Self::Query, delta: f64, rng: &mut ChaCha8Rng) -> Self::Query;
    fn endpoint_error(&self, q: &Self::Query, path: &PathSample) -> f64;
    fn point_distance(&self, a: &[f64], b: &[f64]) -> f64;
}

/// Outcome of sampling-based planner verification.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub n: usize,
    pub cover_failures: usize,
    pub endpoint_max_err: f64,
    pub continuity_defect: f64,
    pub seed: u64,
}

impl VerifyReport {
    pub fn to_json(&self) -> Value {
        json!({
            "N": self.n,
            "cover_failures": self.cover_failures,
            "endpoint_max_err": self.endpoint_max_err,
            "continuity_defect": self.continuity_defect,
            "seed": self.seed,
        })
    }
}

fn query_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E3779B97F4A7C15)))
}

/// Draws `n` seeded query pairs, plans each, and checks that some rule
/// applies and the endpoints match. For each query a second query at
/// distance at most `delta` is planned; when both land on the same rule,
/// the sup-distance between the two paths feeds the continuity defect.
pub fn verify_planner<P: Planner>(planner: &P, n: usize, delta: f64, seed: u64) -> VerifyReport {
    let results: Vec<(usize, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = query_rng(seed, i);
            let q = planner.sample_query(&mut rng);
            let (mut failures, mut eperr, mut defect) = (0usize, 0.0f64, 0.0f64);
            match planner.plan(&q) {
                Err(_) => failures += 1,
                Ok(path) => {
                    eperr = planner.endpoint_error(&q, &path);
                    let q2 = planner.perturb(&q, delta, &mut rng);
                    if let Ok(path2) = planner.plan(&q2) {
                        if path2.rule == path.rule && path2.points.len() == path.points.len() {
                            defect = path
                                .points
                                .iter()
                                .zip(&path2.points)
                                .map(|(a, b)| planner.point_distance(a, b))
                                .fold(0.0, f64::max);
                        }
                    } else {
                        failures += 1;
                    }
                }
            }
            (failures, eperr, defect)
        })
        .collect();
    let mut report = VerifyReport {
        n,
        cover_failures: 0,
        endpoint_max_err: 0.0,
        continuity_defect: 0.0,
        seed,
    };
    for (f, e, d) in results {
        report.cover_failures += f;
        report.endpoint_max_err = report.endpoint_max_err.max(e);
        report.continuity_defect = report.continuity_defect.max(d);
    }
    report
}
