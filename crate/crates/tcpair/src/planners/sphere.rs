//! The 2-rule planner for a sphere pair `(S^n, S^m)` with `0 < m < n`.
//!
//! Rule 1 serves queries with `x_1 > -eps`: contract `x` to the pole
//! `e_1`, then follow the contraction of `S^m` inside `S^n` out to `y`.
//! Rule 2 serves `x_1 < eps`: contract `x` to `-e_1`, traverse a fixed
//! meridian to `e_1`, then continue as in rule 1. The contraction of
//! `S^m` is realized concretely through the pole `e_{m+2}`, which is
//! orthogonal to the subsphere and so never antipodal to any target.

use rand_chacha::ChaCha8Rng;

use super::vecmath::{dist, gaussian, norm, normalize, random_unit, slerp, unit};
use super::{sample_segments, PathSample, PlanError, Planner};

/// Query pair: `x` anywhere on `S^n`, `y` on the standard `S^m` inside
/// it (both as unit vectors in `R^{n+1}`).
#[derive(Clone, Debug)]
pub struct SphereQuery {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

pub struct SpherePairPlanner {
    n: usize,
    m: usize,
    epsilon: f64,
}

impl SpherePairPlanner {
    pub fn new(n: usize, m: usize, epsilon: f64) -> Result<SpherePairPlanner, PlanError> {
        if !(m > 0 && n > m) {
            return Err(PlanError::BadQuery(format!(
                "sphere pair needs 0 < m < n, got n={n}, m={m}"
            )));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(PlanError::BadQuery(format!(
                "epsilon must lie in (0,1), got {epsilon}"
            )));
        }
        Ok(SpherePairPlanner { n, m, epsilon })
    }

    pub fn rule_count(&self) -> usize {
        2
    }

    fn dim(&self) -> usize {
        self.n + 1
    }

    fn validate(&self, q: &SphereQuery) -> Result<(), PlanError> {
        if q.x.len() != self.dim() || (norm(&q.x) - 1.0).abs() > 1e-9 {
            return Err(PlanError::NotOnSphere);
        }
        if q.y.len() != self.dim()
            || (norm(&q.y) - 1.0).abs() > 1e-9
            || q.y[self.m + 1..].iter().any(|c| c.abs() > 1e-9)
        {
            return Err(PlanError::NotInSubsphere);
        }
        Ok(())
    }
}

impl Planner for SpherePairPlanner {
    type Query = SphereQuery;

    fn plan(&self, q: &SphereQuery) -> Result<PathSample, PlanError> {
        self.validate(q)?;
        let dim = self.dim();
        let e1 = unit(dim, 0);
        let e2: Vec<f64> = e1.iter().map(|c| -c).collect();
        let pole = unit(dim, self.m + 1);
        let x = q.x.clone();
        let y = q.y.clone();

        // dispatcher: larger margin wins, rule 1 on ties
        let margin1 = x[0] + self.epsilon;
        let margin2 = self.epsilon - x[0];
        let rule = if margin1 >= margin2 { 1 } else { 2 };

        let mut segments: Vec<Box<dyn Fn(f64) -> Vec<f64> + '_>> = Vec::new();
        if rule == 1 {
            let xc = x.clone();
            let e1c = e1.clone();
            segments.push(Box::new(move |t| slerp(&xc, &e1c, t)));
        } else {
            let xc = x.clone();
            let e2c = e2.clone();
            segments.push(Box::new(move |t| slerp(&xc, &e2c, t)));
            // fixed meridian from -e1 to e1 through the pole
            let meridian_dim = dim;
            let pole_axis = self.m + 1;
            segments.push(Box::new(move |t| {
                let mut p = vec![0.0; meridian_dim];
                p[0] = -(std::f64::consts::PI * t).cos();
                p[pole_axis] = (std::f64::consts::PI * t).sin();
                p
            }));
        }
        // contraction of S^m inside S^n, traversed from e1 out to y
        let e1c = e1.clone();
        let polec = pole.clone();
        segments.push(Box::new(move |t| slerp(&e1c, &polec, t)));
        let polec2 = pole.clone();
        let yc = y.clone();
        segments.push(Box::new(move |t| slerp(&polec2, &yc, t)));

        Ok(sample_segments(rule, &segments))
    }

    fn sample_query(&self, rng: &mut ChaCha8Rng) -> SphereQuery {
        let x = random_unit(rng, self.dim());
        let mut y = vec![0.0; self.dim()];
        let small = random_unit(rng, self.m + 1);
        y[..self.m + 1].copy_from_slice(&small);
        SphereQuery { x, y }
    }

    fn perturb(&self, q: &SphereQuery, delta: f64, rng: &mut ChaCha8Rng) -> SphereQuery {
        let step = delta / 4.0;
        let dir_x: Vec<f64> = (0..self.dim()).map(|_| gaussian(rng)).collect();
        let dir_x = normalize(&dir_x);
        let x: Vec<f64> = normalize(
            &q.x.iter()
                .zip(&dir_x)
                .map(|(a, d)| a + step * d)
                .collect::<Vec<_>>(),
        );
        let dir_y: Vec<f64> = (0..self.m + 1).map(|_| gaussian(rng)).collect();
        let dir_y = normalize(&dir_y);
        let mut y = vec![0.0; self.dim()];
        let small: Vec<f64> = normalize(
            &q.y[..self.m + 1]
                .iter()
                .zip(&dir_y)
                .map(|(a, d)| a + step * d)
                .collect::<Vec<_>>(),
        );
        y[..self.m + 1].copy_from_slice(&small);
        SphereQuery { x, y }
    }

    fn endpoint_error(&self, q: &SphereQuery, path: &PathSample) -> f64 {
        let start = path.points.first().expect("non-empty path");
        let end = path.points.last().expect("non-empty path");
        dist(start, &q.x).max(dist(end, &q.y))
    }

    fn point_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        dist(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planners::verify_planner;

    fn planner(n: usize, m: usize) -> SpherePairPlanner {
        SpherePairPlanner::new(n, m, 0.5).unwrap()
    }

    #[test]
    fn pole_query_uses_rule_one() {
        let p = planner(2, 1);
        let e1 = unit(3, 0);
        let q = SphereQuery {
            x: e1.clone(),
            y: e1.clone(),
        };
        let path = p.plan(&q).unwrap();
        assert_eq!(path.rule, 1);
        assert!(p.endpoint_error(&q, &path) < 1e-9);
    }

    #[test]
    fn antipode_uses_rule_two() {
        let p = planner(2, 1);
        let mut x = unit(3, 0);
        x[0] = -1.0;
        let y = vec![0.0, 1.0, 0.0];
        let q = SphereQuery { x, y: y.clone() };
        let path = p.plan(&q).unwrap();
        assert_eq!(path.rule, 2);
        assert!(dist(path.points.last().unwrap(), &y) < 1e-9);
    }

    #[test]
    fn rejects_bad_queries() {
        let p = planner(2, 1);
        let q = SphereQuery {
            x: vec![2.0, 0.0, 0.0],
            y: unit(3, 0),
        };
        assert!(matches!(p.plan(&q), Err(PlanError::NotOnSphere)));
        let q2 = SphereQuery {
            x: unit(3, 0),
            y: vec![0.0, 0.0, 1.0], // outside the S^1 span
        };
        assert!(matches!(p.plan(&q2), Err(PlanError::NotInSubsphere)));
    }

    #[test]
    fn paths_stay_on_sphere() {
        use rand::SeedableRng;
        let p = planner(4, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let q = p.sample_query(&mut rng);
            let path = p.plan(&q).unwrap();
            for pt in &path.points {
                assert!((norm(pt) - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn verification_smoke() {
        let p = planner(2, 1);
        let report = verify_planner(&p, 500, 0.05, 0);
        assert_eq!(report.cover_failures, 0);
        assert!(report.endpoint_max_err <= 1e-6);
    }
}
