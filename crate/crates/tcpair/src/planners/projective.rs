//! The k-rule planner for a real projective pair driven by a non-singular
//! bilinear map `f = (rho_1, ..., rho_k)` into `R^k`.
//!
//! A line pair `(L, L')` is served by the rule with the largest
//! `|rho_i(u, u')|`; the section rotates `L` onto `L'` inside their common
//! plane, oriented so the motion runs from `u` to the sign of `u'` on
//! which `rho_i` is positive, through the angle smaller than pi. Diagonal
//! queries `L = L'` take the constant path under rule 1, which is why the
//! map must be diagonally positivized first.

use rand_chacha::ChaCha8Rng;

use super::bilinear::BilinearMap;
use super::vecmath::{dist, gaussian, normalize, random_unit};
use super::{sample_segments, PathSample, PlanError, Planner};

/// Canonical representative of a line: unit vector whose first coordinate
/// larger than the zero threshold is positive.
pub fn canonical_rep(v: &[f64]) -> Vec<f64> {
    let u = normalize(v);
    match u.iter().find(|c| c.abs() > 1e-12) {
        Some(c) if *c < 0.0 => u.iter().map(|x| -x).collect(),
        _ => u,
    }
}

/// Distance between lines: `min(|u - u'|, |u + u'|)` on unit
/// representatives.
pub fn projective_distance(u: &[f64], v: &[f64]) -> f64 {
    let plus: f64 = u
        .iter()
        .zip(v)
        .map(|(a, b)| (a + b) * (a + b))
        .sum::<f64>()
        .sqrt();
    dist(u, v).min(plus)
}

pub struct ProjectivePlanner {
    map: BilinearMap,
    n: usize,
    m: usize,
}

impl ProjectivePlanner {
    /// The map must be diagonally positivized so that rule 1 covers a
    /// neighborhood of the diagonal.
    pub fn new(map: BilinearMap) -> Result<ProjectivePlanner, PlanError> {
        if map.dim_y() > map.dim_x() {
            return Err(PlanError::BadQuery(
                "projective pair needs m <= n".to_string(),
            ));
        }
        if !map.diagonal_positive {
            return Err(PlanError::BadQuery(
                "map must be diagonally positivized first".to_string(),
            ));
        }
        let n = map.dim_x() - 1;
        let m = map.dim_y() - 1;
        Ok(ProjectivePlanner { map, n, m })
    }

    pub fn rule_count(&self) -> usize {
        self.map.dim_out()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    fn pad(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n + 1];
        out[..u.len()].copy_from_slice(u);
        out
    }
}

impl Planner for ProjectivePlanner {
    /// Queries are canonical representatives: `L` in `RP^n` (length
    /// `n+1`), `L'` in the standard `RP^m` (length `m+1`).
    type Query = (Vec<f64>, Vec<f64>);

    fn plan(&self, (l, lp): &(Vec<f64>, Vec<f64>)) -> Result<PathSample, PlanError> {
        if l.len() != self.n + 1 {
            return Err(PlanError::BadQuery(format!(
                "first line needs {} coordinates",
                self.n + 1
            )));
        }
        if lp.len() != self.m + 1 {
            return Err(PlanError::BadQuery(format!(
                "second line needs {} coordinates",
                self.m + 1
            )));
        }
        let u = canonical_rep(l);
        let up = canonical_rep(lp);
        let up_padded = self.pad(&up);

        if projective_distance(&u, &up_padded) < 1e-12 {
            // diagonal: constant path under rule 1
            let uc = u.clone();
            let segments: Vec<Box<dyn Fn(f64) -> Vec<f64> + '_>> =
                vec![Box::new(move |_| uc.clone())];
            return Ok(sample_segments(1, &segments));
        }

        let rho = self.map.eval_f64(&u, &up);
        let rule = rho
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).expect("finite rho"))
            .map(|(i, _)| i)
            .expect("map has at least one coordinate");
        if rho[rule].abs() <= 1e-12 {
            return Err(PlanError::NoRuleApplies);
        }
        // orient: move u toward the sign of u' on which rho is positive
        let target: Vec<f64> = if rho[rule] > 0.0 {
            up_padded
        } else {
            up_padded.iter().map(|x| -x).collect()
        };
        let uc = u.clone();
        let segments: Vec<Box<dyn Fn(f64) -> Vec<f64> + '_>> =
            vec![Box::new(move |t| super::vecmath::slerp(&uc, &target, t))];
        Ok(sample_segments(rule + 1, &segments))
    }

    fn sample_query(&self, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
        (
            canonical_rep(&random_unit(rng, self.n + 1)),
            canonical_rep(&random_unit(rng, self.m + 1)),
        )
    }

    fn perturb(
        &self,
        (l, lp): &(Vec<f64>, Vec<f64>),
        delta: f64,
        rng: &mut ChaCha8Rng,
    ) -> (Vec<f64>, Vec<f64>) {
        let step = delta / 4.0;
        let nudge = |v: &[f64], rng: &mut ChaCha8Rng| -> Vec<f64> {
            let dir: Vec<f64> = (0..v.len()).map(|_| gaussian(rng)).collect();
            let dir = normalize(&dir);
            let moved: Vec<f64> = v.iter().zip(&dir).map(|(a, d)| a + step * d).collect();
            canonical_rep(&moved)
        };
        (nudge(l, rng), nudge(lp, rng))
    }

    fn endpoint_error(&self, (l, lp): &(Vec<f64>, Vec<f64>), path: &PathSample) -> f64 {
        let start = path.points.first().expect("non-empty path");
        let end = path.points.last().expect("non-empty path");
        let u = canonical_rep(l);
        let up = self.pad(&canonical_rep(lp));
        projective_distance(start, &u).max(projective_distance(end, &up))
    }

    fn point_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        projective_distance(a, b)
    }
}
