//! Non-singular bilinear maps as exact rational coefficient tensors.
//!
//! A map `f: R^{n+1} x R^{m+1} -> R^k` is stored as `c[i][j][r]` with
//! `f(x,y)_r = sum c[i][j][r] x_i y_j`, so bilinearity is structural. The
//! built-in witnesses are polynomial multiplication (the real polynomial
//! ring has no zero divisors) and quaternion multiplication with a
//! conjugated second argument (a division algebra norm identity).

use num::{BigRational, FromPrimitive, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::Rational;

use super::vecmath::{dot, norm, random_unit};
use super::PlanError;

/// Why a map is known to be non-singular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonsingularityCertificate {
    /// Convolution of coefficients: a product of nonzero real polynomials
    /// is nonzero.
    PolynomialMultiplication,
    /// `|q r| = |q||r|` in the quaternions.
    DivisionAlgebra,
    /// Only sampled: `samples` random nonzero pairs had nonzero images.
    Sampled { samples: usize, seed: u64 },
    /// Nothing checked yet.
    Unchecked,
}

/// Exact bilinear coefficient tensor with a non-singularity tag.
#[derive(Clone, Debug)]
pub struct BilinearMap {
    dim_x: usize,
    dim_y: usize,
    dim_out: usize,
    tensor: Vec<Rational>,
    tensor_f64: Vec<f64>,
    pub certificate: NonsingularityCertificate,
    pub diagonal_positive: bool,
}

impl BilinearMap {
    pub fn new(
        dim_x: usize,
        dim_y: usize,
        dim_out: usize,
        tensor: Vec<Rational>,
        certificate: NonsingularityCertificate,
    ) -> BilinearMap {
        assert_eq!(tensor.len(), dim_x * dim_y * dim_out);
        let tensor_f64 = tensor
            .iter()
            .map(|c| rational_to_f64(c))
            .collect();
        BilinearMap {
            dim_x,
            dim_y,
            dim_out,
            tensor,
            tensor_f64,
            certificate,
            diagonal_positive: false,
        }
    }

    pub fn dim_x(&self) -> usize {
        self.dim_x
    }

    pub fn dim_y(&self) -> usize {
        self.dim_y
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn coefficient(&self, i: usize, j: usize, r: usize) -> &Rational {
        &self.tensor[(i * self.dim_y + j) * self.dim_out + r]
    }

    /// Polynomial multiplication `R^{n+1} x R^{m+1} -> R^{n+m+1}`:
    /// `c[i][j][i+j] = 1`.
    pub fn polymul(n: usize, m: usize) -> BilinearMap {
        let (dx, dy, k) = (n + 1, m + 1, n + m + 1);
        let mut tensor = vec![Rational::zero(); dx * dy * k];
        for i in 0..dx {
            for j in 0..dy {
                tensor[(i * dy + j) * k + (i + j)] = BigRational::from_integer(1.into());
            }
        }
        BilinearMap::new(
            dx,
            dy,
            k,
            tensor,
            NonsingularityCertificate::PolynomialMultiplication,
        )
    }

    /// Quaternion product with conjugated second argument, arguments
    /// restricted to the leading coordinates: `f(q, r) = q * conj(r)`,
    /// landing in `R^4`. On the diagonal `f(u, u) = |u|^2 * 1`.
    pub fn quaternion(n: usize, m: usize) -> Result<BilinearMap, PlanError> {
        if n + 1 > 4 || m + 1 > 4 {
            return Err(PlanError::BadQuery(
                "quaternion map needs n+1 <= 4 and m+1 <= 4".to_string(),
            ));
        }
        let (dx, dy, k) = (n + 1, m + 1, 4);
        let mut tensor = vec![Rational::zero(); dx * dy * k];
        for i in 0..dx {
            for j in 0..dy {
                let (sign, r) = quaternion_basis_product(i, j);
                // conjugation of the second argument flips e_j for j >= 1
                let sign = if j >= 1 { -sign } else { sign };
                tensor[(i * dy + j) * k + r] = BigRational::from_integer(sign.into());
            }
        }
        let mut map = BilinearMap::new(dx, dy, k, tensor, NonsingularityCertificate::DivisionAlgebra);
        map.diagonal_positive = true;
        Ok(map)
    }

    pub fn eval_f64(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim_x);
        assert_eq!(y.len(), self.dim_y);
        let mut out = vec![0.0; self.dim_out];
        for i in 0..self.dim_x {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..self.dim_y {
                if y[j] == 0.0 {
                    continue;
                }
                let base = (i * self.dim_y + j) * self.dim_out;
                for r in 0..self.dim_out {
                    out[r] += self.tensor_f64[base + r] * x[i] * y[j];
                }
            }
        }
        out
    }

    pub fn eval_rational(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.dim_x);
        assert_eq!(y.len(), self.dim_y);
        let mut out = vec![Rational::zero(); self.dim_out];
        for i in 0..self.dim_x {
            for j in 0..self.dim_y {
                let base = (i * self.dim_y + j) * self.dim_out;
                for r in 0..self.dim_out {
                    out[r] += &self.tensor[base + r] * &x[i] * &y[j];
                }
            }
        }
        out
    }

    /// `f((u, 0...), u)` for `u` in the second factor's coordinates.
    pub fn diagonal_image(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.dim_y);
        let mut padded = vec![0.0; self.dim_x];
        padded[..u.len()].copy_from_slice(u);
        self.eval_f64(&padded, u)
    }

    /// Samples random nonzero pairs and checks the image never vanishes.
    pub fn sampled_nonsingular(&self, samples: usize, seed: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let x = random_unit(&mut rng, self.dim_x);
            let y = random_unit(&mut rng, self.dim_y);
            if norm(&self.eval_f64(&x, &y)) <= 1e-9 {
                return false;
            }
        }
        true
    }

    /// Post-composes with an invertible linear map whose first row is a
    /// functional strictly positive on the diagonal image, so the first
    /// coordinate of `f((u,0),u)` becomes positive for `u != 0`.
    ///
    /// Polynomial multiplication gets the exact functional
    /// `c -> sum c_r / (r+1)`, i.e. integration of the product polynomial
    /// over `[0,1]`, which is positive on squares. Maps already positive
    /// on the diagonal are returned unchanged. Anything else is handled by
    /// a sampled perceptron over the normalized diagonal image, and
    /// failure to separate is reported, not guessed.
    pub fn diagonal_positivize(&self, seed: u64) -> Result<BilinearMap, PlanError> {
        if self.dim_y > self.dim_x {
            return Err(PlanError::BadQuery(
                "diagonal positivization needs m <= n".to_string(),
            ));
        }
        if matches!(self.certificate, NonsingularityCertificate::Unchecked)
            && !self.sampled_nonsingular(100_000, seed)
        {
            return Err(PlanError::NotNonsingular);
        }
        if self.diagonal_positive || self.diagonal_sampled_positive(seed) {
            let mut out = self.clone();
            out.diagonal_positive = true;
            return Ok(out);
        }
        let lambda: Vec<Rational> = match self.certificate {
            NonsingularityCertificate::PolynomialMultiplication => (0..self.dim_out)
                .map(|r| BigRational::new(1.into(), (r as i64 + 1).into()))
                .collect(),
            _ => self.perceptron_functional(seed)?,
        };
        let composed = self.compose_with_functional(&lambda)?;
        if !composed.diagonal_sampled_positive(seed ^ 0x5ca1ab1e) {
            return Err(PlanError::PositivizationFailed);
        }
        let mut out = composed;
        out.diagonal_positive = true;
        Ok(out)
    }

    fn diagonal_sampled_positive(&self, seed: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..512).all(|_| {
            let u = random_unit(&mut rng, self.dim_y);
            self.diagonal_image(&u)[0] > 1e-9
        })
    }

    fn perceptron_functional(&self, seed: u64) -> Result<Vec<Rational>, PlanError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<Vec<f64>> = (0..256)
            .map(|_| {
                let u = random_unit(&mut rng, self.dim_y);
                let d = self.diagonal_image(&u);
                let n = norm(&d);
                d.iter().map(|x| x / n.max(1e-300)).collect()
            })
            .collect();
        let mut lambda: Vec<f64> = vec![0.0; self.dim_out];
        for d in &samples {
            for (l, x) in lambda.iter_mut().zip(d) {
                *l += x;
            }
        }
        for _ in 0..100_000 {
            match samples.iter().find(|d| dot(&lambda, d) <= 1e-6) {
                None => {
                    // exact dyadic rationals from the f64 functional
                    return Ok(lambda
                        .iter()
                        .map(|&x| BigRational::from_f64(x).expect("finite functional entry"))
                        .collect());
                }
                Some(d) => {
                    for (l, x) in lambda.iter_mut().zip(d) {
                        *l += x;
                    }
                }
            }
        }
        Err(PlanError::PositivizationFailed)
    }

    fn compose_with_functional(&self, lambda: &[Rational]) -> Result<BilinearMap, PlanError> {
        // first row lambda, remaining rows the identity away from the
        // pivot column, so the matrix is invertible
        let pivot = (0..self.dim_out)
            .max_by(|&a, &b| {
                lambda[a]
                    .abs()
                    .partial_cmp(&lambda[b].abs())
                    .expect("rationals are ordered")
            })
            .filter(|&p| !lambda[p].is_zero())
            .ok_or(PlanError::PositivizationFailed)?;
        let mut rows: Vec<Vec<Rational>> = vec![lambda.to_vec()];
        for r in 0..self.dim_out {
            if r == pivot {
                continue;
            }
            let mut row = vec![Rational::zero(); self.dim_out];
            row[r] = BigRational::from_integer(1.into());
            rows.push(row);
        }
        let mut tensor = vec![Rational::zero(); self.dim_x * self.dim_y * self.dim_out];
        for i in 0..self.dim_x {
            for j in 0..self.dim_y {
                let base = (i * self.dim_y + j) * self.dim_out;
                for (r, row) in rows.iter().enumerate() {
                    let mut acc = Rational::zero();
                    for s in 0..self.dim_out {
                        if !row[s].is_zero() {
                            acc += &row[s] * &self.tensor[base + s];
                        }
                    }
                    tensor[base + r] = acc;
                }
            }
        }
        Ok(BilinearMap::new(
            self.dim_x,
            self.dim_y,
            self.dim_out,
            tensor,
            self.certificate.clone(),
        ))
    }
}

fn rational_to_f64(q: &Rational) -> f64 {
    let n = q.numer();
    let d = q.denom();
    // desk-scale coefficients; fall back through string parsing only if
    // the direct conversion overflows
    let nf = i64::try_from(n).map(|v| v as f64).unwrap_or_else(|_| {
        n.to_string().parse::<f64>().unwrap_or(f64::NAN)
    });
    let df = i64::try_from(d).map(|v| v as f64).unwrap_or_else(|_| {
        d.to_string().parse::<f64>().unwrap_or(f64::NAN)
    });
    nf / df
}

/// `e_i * e_j` in the quaternions, as `(sign, basis index)`.
fn quaternion_basis_product(i: usize, j: usize) -> (i64, usize) {
    match (i, j) {
        (0, j) => (1, j),
        (i, 0) => (1, i),
        (1, 1) | (2, 2) | (3, 3) => (-1, 0),
        (1, 2) => (1, 3),
        (2, 1) => (-1, 3),
        (2, 3) => (1, 1),
        (3, 2) => (-1, 1),
        (3, 1) => (1, 2),
        (1, 3) => (-1, 2),
        _ => unreachable!("quaternion basis index out of range"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::One;

    fn rat(n: i64) -> Rational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn polymul_small_case() {
        // f((a,b),(c,d)) = (ac, ad+bc, bd)
        let f = BilinearMap::polymul(1, 1);
        let out = f.eval_f64(&[2.0, 3.0], &[5.0, 7.0]);
        assert_eq!(out, vec![10.0, 29.0, 21.0]);
        // f(x, 0) = 0
        let zero = f.eval_f64(&[2.0, 3.0], &[0.0, 0.0]);
        assert!(zero.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn polymul_sampled_nonsingular() {
        let f = BilinearMap::polymul(3, 2);
        assert!(f.sampled_nonsingular(10_000, 11));
    }

    #[test]
    fn quaternion_identities() {
        let f = BilinearMap::quaternion(3, 3).unwrap();
        // f(1,1) = 1
        let one = f.eval_f64(&[1.0, 0.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(one, vec![1.0, 0.0, 0.0, 0.0]);
        // f(i,i) = i * conj(i) = 1
        let ii = f.eval_f64(&[0.0, 1.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(ii, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn quaternion_norm_identity_on_samples() {
        use rand::SeedableRng;
        let f = BilinearMap::quaternion(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let q = random_unit(&mut rng, 4);
            let r = random_unit(&mut rng, 3);
            let image = f.eval_f64(&q, &r);
            assert!((norm(&image) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn quaternion_diagonal_is_norm_squared() {
        use rand::SeedableRng;
        let f = BilinearMap::quaternion(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10_000 {
            let u = random_unit(&mut rng, 3);
            let d = f.diagonal_image(&u);
            assert!((d[0] - 1.0).abs() < 1e-9);
            assert!(d[1..].iter().all(|&v| v.abs() < 1e-9));
        }
    }

    #[test]
    fn bilinearity_is_exact_on_rational_scalars() {
        // f(lambda x, mu y) = lambda mu f(x, y) as exact rationals.
        let f = BilinearMap::polymul(2, 2);
        let x: Vec<Rational> = vec![rat(3), rat(-1), rat(2)];
        let y: Vec<Rational> = vec![rat(1), rat(4), rat(-2)];
        let lambda = BigRational::new(2.into(), 3.into());
        let mu = BigRational::new((-5).into(), 7.into());
        let sx: Vec<Rational> = x.iter().map(|v| v * &lambda).collect();
        let sy: Vec<Rational> = y.iter().map(|v| v * &mu).collect();
        let lhs = f.eval_rational(&sx, &sy);
        let base = f.eval_rational(&x, &y);
        let lm = &lambda * &mu;
        let rhs: Vec<Rational> = base.iter().map(|v| v * &lm).collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn positivize_polymul_integrates_squares() {
        // first coordinate of the positivized diagonal equals the integral
        // of u(t)^2 over [0,1], computed independently by expanding the
        // square
        let f = BilinearMap::polymul(3, 2).diagonal_positivize(9).unwrap();
        assert!(f.diagonal_positive);
        let u = [0.5f64, -1.25, 2.0];
        let d = f.diagonal_image(&u);
        let mut integral = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                integral += u[a] * u[b] / (a + b + 1) as f64;
            }
        }
        assert!((d[0] - integral).abs() < 1e-12);
        assert!(integral > 0.0);
    }

    #[test]
    fn positivize_quaternion_unchanged() {
        let f = BilinearMap::quaternion(3, 2).unwrap();
        let g = f.diagonal_positivize(5).unwrap();
        assert_eq!(g.coefficient(1, 1, 0), &Rational::one());
        assert!(g.diagonal_positive);
    }

    #[test]
    fn positivize_rejects_zero_map() {
        let k = 3;
        let zero = BilinearMap::new(
            2,
            2,
            k,
            vec![Rational::zero(); 2 * 2 * k],
            NonsingularityCertificate::Unchecked,
        );
        assert!(matches!(
            zero.diagonal_positivize(1),
            Err(PlanError::NotNonsingular)
        ));
    }
}
