//! The 3-rule planner for a wedge of spheres against a subwedge.
//!
//! Each sphere carries its basepoint at `e_1`; all basepoints are glued
//! into the wedge point `x0`. The antipodal cap `D_i` on sphere `i` is the
//! open hemisphere `first coordinate < 0` around the antipode `x_i = -e_1`
//! (it misses `x0`). Rule 1 contracts both points through `x0`; rule 2
//! handles exactly one capped coordinate by contracting it onto `x_i` and
//! walking the fixed meridian to `x0`; rule 3 does that on both sides.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::vecmath::{dist, gaussian, norm, normalize, random_unit, slerp};
use super::{sample_segments, PathSample, PlanError, Planner};

/// A point of the wedge: `sphere` is 1-based; the wedge point itself is
/// the sentinel `sphere = 0` with no coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct WedgePoint {
    pub sphere: usize,
    pub coords: Vec<f64>,
}

impl WedgePoint {
    pub fn wedge_point() -> WedgePoint {
        WedgePoint {
            sphere: 0,
            coords: Vec::new(),
        }
    }

    pub fn on_sphere(sphere: usize, coords: Vec<f64>) -> WedgePoint {
        WedgePoint { sphere, coords }
    }

    fn is_wedge_point(&self) -> bool {
        self.sphere == 0
    }
}

pub struct WedgePlanner {
    dims: Vec<usize>,
    m: usize,
    /// encoded width: 1 for the sphere index plus the largest coordinate
    /// count
    width: usize,
}

impl WedgePlanner {
    /// `dims` are the sphere dimensions `a_1..a_n`; the target subwedge is
    /// the first `m` spheres, `1 <= m < n`.
    pub fn new(dims: &[usize], m: usize) -> Result<WedgePlanner, PlanError> {
        if dims.len() < 2 || m == 0 || m >= dims.len() {
            return Err(PlanError::BadQuery(format!(
                "wedge planner needs 1 <= m < n, got n={}, m={m}",
                dims.len()
            )));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(PlanError::BadQuery(
                "sphere dimensions must be positive".to_string(),
            ));
        }
        let width = 1 + dims.iter().max().unwrap() + 1;
        Ok(WedgePlanner {
            dims: dims.to_vec(),
            m,
            width,
        })
    }

    pub fn rule_count(&self) -> usize {
        3
    }

    fn encode(&self, sphere: usize, coords: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.width];
        v[0] = sphere as f64;
        if sphere == 0 {
            v[1] = 1.0; // the wedge point is e1 on every sphere
        } else {
            v[1..1 + coords.len()].copy_from_slice(coords);
        }
        v
    }

    /// Canonicalizes and validates a point. Points within 1e-12 of the
    /// basepoint collapse to the sentinel.
    fn canonical(&self, p: &WedgePoint) -> Result<WedgePoint, PlanError> {
        if p.is_wedge_point() {
            return Ok(p.clone());
        }
        if p.sphere > self.dims.len() {
            return Err(PlanError::BadQuery(format!(
                "sphere index {} out of range",
                p.sphere
            )));
        }
        let want = self.dims[p.sphere - 1] + 1;
        if p.coords.len() != want || (norm(&p.coords) - 1.0).abs() > 1e-9 {
            return Err(PlanError::NotOnSphere);
        }
        let mut e1 = vec![0.0; want];
        e1[0] = 1.0;
        if dist(&p.coords, &e1) < 1e-12 {
            return Ok(WedgePoint::wedge_point());
        }
        Ok(p.clone())
    }

    fn in_cap(p: &WedgePoint) -> bool {
        !p.is_wedge_point() && p.coords[0] < 0.0
    }

    fn basepoint(&self, sphere: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.dims[sphere - 1] + 1];
        v[0] = 1.0;
        v
    }

    fn antipode(&self, sphere: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.dims[sphere - 1] + 1];
        v[0] = -1.0;
        v
    }

    /// Geodesic segment on one sphere, in the wedge encoding.
    fn seg<'a>(
        &'a self,
        sphere: usize,
        from: Vec<f64>,
        to: Vec<f64>,
    ) -> Box<dyn Fn(f64) -> Vec<f64> + 'a> {
        Box::new(move |t| {
            let p = slerp(&from, &to, t);
            self.encode(sphere, &p)
        })
    }

    /// Fixed meridian on sphere `i` from the antipode to the basepoint
    /// (or reversed), through the second coordinate axis.
    fn meridian<'a>(&'a self, sphere: usize, reversed: bool) -> Box<dyn Fn(f64) -> Vec<f64> + 'a> {
        let dim = self.dims[sphere - 1] + 1;
        Box::new(move |t| {
            let t = if reversed { 1.0 - t } else { t };
            let mut p = vec![0.0; dim];
            p[0] = -(std::f64::consts::PI * t).cos();
            p[1] = (std::f64::consts::PI * t).sin();
            self.encode(sphere, &p)
        })
    }

    /// Constant segment at the wedge point.
    fn rest<'a>(&'a self) -> Box<dyn Fn(f64) -> Vec<f64> + 'a> {
        Box::new(move |_| self.encode(0, &[]))
    }

    /// Contraction of a cap-free point to the wedge point (or reversed).
    fn contract<'a>(&'a self, p: &WedgePoint, reversed: bool) -> Box<dyn Fn(f64) -> Vec<f64> + 'a> {
        if p.is_wedge_point() {
            return self.rest();
        }
        let base = self.basepoint(p.sphere);
        if reversed {
            self.seg(p.sphere, base, p.coords.clone())
        } else {
            self.seg(p.sphere, p.coords.clone(), base)
        }
    }
}

impl Planner for WedgePlanner {
    type Query = (WedgePoint, WedgePoint);

    fn plan(&self, (p, q): &(WedgePoint, WedgePoint)) -> Result<PathSample, PlanError> {
        let p = self.canonical(p)?;
        let q = self.canonical(q)?;
        if q.sphere > self.m {
            return Err(PlanError::SubwedgeViolation { m: self.m });
        }
        let p_cap = WedgePlanner::in_cap(&p);
        let q_cap = WedgePlanner::in_cap(&q);
        let mut segments: Vec<Box<dyn Fn(f64) -> Vec<f64> + '_>> = Vec::new();
        let rule = match (p_cap, q_cap) {
            (false, false) => {
                segments.push(self.contract(&p, false));
                segments.push(self.contract(&q, true));
                1
            }
            (true, false) => {
                segments.push(self.seg(p.sphere, p.coords.clone(), self.antipode(p.sphere)));
                segments.push(self.meridian(p.sphere, false));
                segments.push(self.contract(&q, true));
                2
            }
            (false, true) => {
                segments.push(self.contract(&p, false));
                segments.push(self.meridian(q.sphere, true));
                segments.push(self.seg(q.sphere, self.antipode(q.sphere), q.coords.clone()));
                2
            }
            (true, true) => {
                segments.push(self.seg(p.sphere, p.coords.clone(), self.antipode(p.sphere)));
                segments.push(self.meridian(p.sphere, false));
                segments.push(self.meridian(q.sphere, true));
                segments.push(self.seg(q.sphere, self.antipode(q.sphere), q.coords.clone()));
                3
            }
        };
        Ok(sample_segments(rule, &segments))
    }

    fn sample_query(&self, rng: &mut ChaCha8Rng) -> (WedgePoint, WedgePoint) {
        let si = rng.gen_range(1..=self.dims.len());
        let p = WedgePoint::on_sphere(si, random_unit(rng, self.dims[si - 1] + 1));
        let sj = rng.gen_range(1..=self.m);
        let q = WedgePoint::on_sphere(sj, random_unit(rng, self.dims[sj - 1] + 1));
        (p, q)
    }

    fn perturb(
        &self,
        (p, q): &(WedgePoint, WedgePoint),
        delta: f64,
        rng: &mut ChaCha8Rng,
    ) -> (WedgePoint, WedgePoint) {
        let step = delta / 4.0;
        let nudge = |pt: &WedgePoint, rng: &mut ChaCha8Rng| -> WedgePoint {
            if pt.is_wedge_point() {
                return pt.clone();
            }
            let dir: Vec<f64> = (0..pt.coords.len()).map(|_| gaussian(rng)).collect();
            let dir = normalize(&dir);
            let moved: Vec<f64> = pt
                .coords
                .iter()
                .zip(&dir)
                .map(|(a, d)| a + step * d)
                .collect();
            WedgePoint::on_sphere(pt.sphere, normalize(&moved))
        };
        (nudge(p, rng), nudge(q, rng))
    }

    fn endpoint_error(&self, (p, q): &(WedgePoint, WedgePoint), path: &PathSample) -> f64 {
        let want_start = self.encode(p.sphere, &p.coords);
        let want_end = self.encode(q.sphere, &q.coords);
        let start = path.points.first().expect("non-empty path");
        let end = path.points.last().expect("non-empty path");
        self.point_distance(start, &want_start)
            .max(self.point_distance(end, &want_end))
    }

    /// Wedge metric on encoded points: chordal on a shared sphere, and
    /// through the wedge point across spheres.
    fn point_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let (ia, ib) = (a[0] as usize, b[0] as usize);
        let (ca, cb) = (&a[1..], &b[1..]);
        if ia == ib || ia == 0 || ib == 0 {
            dist(ca, cb)
        } else {
            let mut e1 = vec![0.0; self.width - 1];
            e1[0] = 1.0;
            dist(ca, &e1) + dist(&e1, cb)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planners::verify_planner;

    fn planner() -> WedgePlanner {
        WedgePlanner::new(&[2, 2, 3], 2).unwrap()
    }

    #[test]
    fn wedge_point_pair_is_rule_one() {
        let p = planner();
        let q = (WedgePoint::wedge_point(), WedgePoint::wedge_point());
        let path = p.plan(&q).unwrap();
        assert_eq!(path.rule, 1);
        assert!(p.endpoint_error(&q, &path) < 1e-9);
    }

    #[test]
    fn cap_center_is_rule_two() {
        let p = planner();
        // p at the antipode x_3, q uncapped on sphere 1
        let q = (
            WedgePoint::on_sphere(3, vec![-1.0, 0.0, 0.0, 0.0]),
            WedgePoint::on_sphere(1, vec![1.0, 0.0, 0.0]),
        );
        let path = p.plan(&q).unwrap();
        assert_eq!(path.rule, 2);
    }

    #[test]
    fn both_capped_is_rule_three() {
        let p = planner();
        let q = (
            WedgePoint::on_sphere(3, vec![-1.0, 0.0, 0.0, 0.0]),
            WedgePoint::on_sphere(2, vec![-1.0, 0.0, 0.0]),
        );
        let path = p.plan(&q).unwrap();
        assert_eq!(path.rule, 3);
        assert!(p.endpoint_error(&q, &path) < 1e-9);
    }

    #[test]
    fn rejects_targets_outside_subwedge() {
        let p = planner();
        let q = (
            WedgePoint::wedge_point(),
            WedgePoint::on_sphere(3, vec![0.0, 1.0, 0.0, 0.0]),
        );
        assert!(matches!(
            p.plan(&q),
            Err(PlanError::SubwedgeViolation { m: 2 })
        ));
    }

    #[test]
    fn verification_smoke() {
        let p = planner();
        let report = verify_planner(&p, 500, 0.05, 0);
        assert_eq!(report.cover_failures, 0);
        assert!(report.endpoint_max_err <= 1e-6);
    }
}
