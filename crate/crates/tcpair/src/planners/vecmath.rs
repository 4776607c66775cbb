//! Small f64 vector helpers for the planner geometry.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn normalize(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    assert!(n > 1e-12, "cannot normalize a near-zero vector");
    a.iter().map(|x| x / n).collect()
}

pub fn unit(dim: usize, axis: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[axis] = 1.0;
    v
}

pub fn scale_add(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

/// Geodesic interpolation on the unit sphere. The endpoints must not be
/// antipodal; callers arrange their regions so this never happens.
pub fn slerp(u: &[f64], v: &[f64], t: f64) -> Vec<f64> {
    let c = dot(u, v).clamp(-1.0, 1.0);
    let theta = c.acos();
    if theta < 1e-9 {
        // nearly equal: chordal blend, renormalized
        let mixed: Vec<f64> = u
            .iter()
            .zip(v)
            .map(|(x, y)| (1.0 - t) * x + t * y)
            .collect();
        return normalize(&mixed);
    }
    assert!(
        theta < std::f64::consts::PI - 1e-9,
        "slerp endpoints are antipodal"
    );
    let s = theta.sin();
    let a = ((1.0 - t) * theta).sin() / s;
    let b = (t * theta).sin() / s;
    u.iter().zip(v).map(|(x, y)| a * x + b * y).collect()
}

/// Standard normal via Box-Muller on the given RNG.
pub fn gaussian<R: rand::Rng>(rng: &mut R) -> f64 {
    loop {
        let u1: f64 = rng.gen();
        let u2: f64 = rng.gen();
        if u1 > 1e-300 {
            return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
    }
}

/// Uniform point on the unit sphere in `R^dim`.
pub fn random_unit<R: rand::Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        if norm(&v) > 1e-6 {
            return normalize(&v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slerp_endpoints() {
        let u = unit(3, 0);
        let v = unit(3, 1);
        assert!(dist(&slerp(&u, &v, 0.0), &u) < 1e-12);
        assert!(dist(&slerp(&u, &v, 1.0), &v) < 1e-12);
        // midpoint stays on the sphere
        let mid = slerp(&u, &v, 0.5);
        assert!((norm(&mid) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_unit_is_unit() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..32 {
            let v = random_unit(&mut rng, 5);
            assert!((norm(&v) - 1.0).abs() < 1e-12);
        }
    }
}
