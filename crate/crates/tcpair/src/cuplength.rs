//! Zero-divisor cup-length lower bounds.
//!
//! A nonzero k-fold product of zero-divisors in `H*(X) (x) H*(Y)` forces
//! `TC(X,Y) > k`. The zero-divisors here are the kernel of the evaluation
//! map `a (x) b -> i*(a) b`; the search ranges over the basic generators
//! `x (x) 1 - 1 (x) i*(x)` for ring generators `x` together with `k (x) 1`
//! for a degreewise kernel basis of `i*`. Symplectic pairs get a fast path
//! through the binomial expansion of `(w (x) 1 - 1 (x) w')^(n+m)`.

use std::sync::Arc;

use num::{BigInt, BigRational, One};
use serde_json::{json, Value};
use thiserror::Error;

use crate::rings::{element_to_json, linalg, GradedRing, RingElement, RingError, RingHom};
use crate::scalar::Field;

#[derive(Debug, Error)]
pub enum CupError {
    #[error("element claimed as a zero-divisor does not evaluate to zero")]
    NotAZeroDivisor,
    #[error("pullback of the first symplectic class does not equal the second")]
    PullbackMismatch,
    #[error("a top power of a symplectic class vanishes")]
    TopPowerVanishes,
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Where a basic zero-divisor came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroDivisorOrigin {
    /// `x (x) 1 - 1 (x) i*(x)` for a generator `x`.
    BarClass { generator: String },
    /// `k (x) 1` for a kernel basis element of `i*` in this degree.
    KernelClass { degree: usize },
}

/// A basic zero-divisor: homogeneous, verified to evaluate to zero.
pub struct ZeroDivisor<K: Field> {
    pub element: RingElement<K>,
    pub degree: usize,
    pub origin: ZeroDivisorOrigin,
}

/// The basic zero-divisors of a pair, tied to its tensor ring.
pub struct ZeroDivisorSet<K: Field> {
    tensor: Arc<GradedRing<K>>,
    generators: Vec<ZeroDivisor<K>>,
}

impl<K: Field> ZeroDivisorSet<K> {
    pub fn tensor(&self) -> &Arc<GradedRing<K>> {
        &self.tensor
    }

    pub fn generators(&self) -> &[ZeroDivisor<K>] {
        &self.generators
    }

    /// A set restricted to the listed generator indices, for restricted
    /// searches and monotonicity checks.
    pub fn restricted(&self, indices: &[usize]) -> ZeroDivisorSet<K> {
        ZeroDivisorSet {
            tensor: Arc::clone(&self.tensor),
            generators: indices
                .iter()
                .map(|&i| ZeroDivisor {
                    element: self.generators[i].element.clone(),
                    degree: self.generators[i].degree,
                    origin: self.generators[i].origin.clone(),
                })
                .collect(),
        }
    }
}

/// Evaluates a tensor element through `a (x) b -> i*(a) b`, landing in the
/// target ring of `iota`.
pub fn evaluate_to_target<K: Field>(
    tensor: &GradedRing<K>,
    iota: &RingHom<K>,
    elem: &RingElement<K>,
) -> Result<RingElement<K>, CupError> {
    let (left, right) = tensor
        .tensor_factors()
        .ok_or_else(|| RingError::Internal("evaluation needs a tensor ring".to_string()))?;
    if left.ring_id() != iota.source().ring_id() || right.ring_id() != iota.target().ring_id() {
        return Err(RingError::RingMismatch.into());
    }
    let target = iota.target();
    let field = tensor.field();
    let mut acc = target.zero();
    for d in elem.degrees() {
        let v = elem.component(d).expect("listed degree present");
        for (flat, c) in v.iter().enumerate() {
            if field.is_zero(c) {
                continue;
            }
            let (ld, il, ir) = tensor
                .tensor_basis_split(d, flat)
                .expect("tensor ring splits basis slots");
            let a = left.basis_elem(ld, il);
            let b = right.basis_elem(d - ld, ir);
            let ia = iota.apply(&a)?;
            let prod = target.mul(&ia, &b)?;
            let scaled = target.scale(&prod, c)?;
            acc = target.add(&acc, &scaled)?;
        }
    }
    Ok(acc)
}

/// Collects the basic zero-divisors of the pair: one bar class per
/// generator of the source ring and one `k (x) 1` per kernel basis element
/// of `i*` in each degree up to the source's top degree. Every returned
/// element is verified to evaluate to zero.
pub fn zero_divisor_generators<K: Field>(
    tensor: &Arc<GradedRing<K>>,
    iota: &RingHom<K>,
) -> Result<ZeroDivisorSet<K>, CupError> {
    let (left, right) = tensor
        .tensor_factors()
        .ok_or_else(|| RingError::Internal("zero divisors need a tensor ring".to_string()))?;
    if left.ring_id() != iota.source().ring_id() || right.ring_id() != iota.target().ring_id() {
        return Err(RingError::RingMismatch.into());
    }
    let field = tensor.field().clone();
    let mut generators: Vec<ZeroDivisor<K>> = Vec::new();

    for g in 0..left.num_generators() {
        let name = left.presentation().generators[g].name.clone();
        let degree = left.presentation().generators[g].degree;
        let x = left.generator_elem(g);
        let image = iota.apply(&x)?;
        let bar = tensor.sub(&tensor.embed_left(&x)?, &tensor.embed_right(&image)?)?;
        if bar.is_zero() {
            continue;
        }
        generators.push(ZeroDivisor {
            element: bar,
            degree,
            origin: ZeroDivisorOrigin::BarClass { generator: name },
        });
    }

    for d in 1..=left.top_degree() {
        let cols = left.rank(d);
        if cols == 0 {
            continue;
        }
        let rows_count = iota.target().rank(d);
        // matrix of i* on degree d: rows are target coordinates
        let mut rows = vec![vec![field.zero(); cols]; rows_count];
        for c in 0..cols {
            let img = iota.apply(&left.basis_elem(d, c))?;
            if let Some(coords) = img.component(d) {
                for (r, val) in coords.iter().enumerate() {
                    rows[r][c] = val.clone();
                }
            }
        }
        for vec in linalg::nullspace(&field, rows, cols) {
            let mut kappa = left.zero();
            for (c, coeff) in vec.iter().enumerate() {
                if field.is_zero(coeff) {
                    continue;
                }
                let scaled = left.scale(&left.basis_elem(d, c), coeff)?;
                kappa = left.add(&kappa, &scaled)?;
            }
            let embedded = tensor.embed_left(&kappa)?;
            if embedded.is_zero() || generators.iter().any(|z| z.element == embedded) {
                continue;
            }
            generators.push(ZeroDivisor {
                element: embedded,
                degree: d,
                origin: ZeroDivisorOrigin::KernelClass { degree: d },
            });
        }
    }

    let set = ZeroDivisorSet {
        tensor: Arc::clone(tensor),
        generators,
    };
    for z in &set.generators {
        let value = evaluate_to_target(tensor, iota, &z.element)?;
        if !value.is_zero() {
            return Err(CupError::NotAZeroDivisor);
        }
    }
    Ok(set)
}

/// A nonzero k-fold product of zero-divisors and the bound it implies.
pub struct CupLengthCertificate<K: Field> {
    pub k: usize,
    pub factors: Vec<RingElement<K>>,
    pub product: RingElement<K>,
    /// `TC(X,Y) >= k + 1`.
    pub bound_implied: usize,
}

impl<K: Field> CupLengthCertificate<K> {
    /// Re-multiplies the stored factors and checks they reproduce the
    /// stored nonzero product (the empty product is the identity).
    pub fn verify(&self, tensor: &GradedRing<K>) -> bool {
        let mut acc = tensor.one();
        for f in &self.factors {
            match tensor.mul(&acc, f) {
                Ok(next) => acc = next,
                Err(_) => return false,
            }
        }
        acc == self.product && (self.k == 0 || !self.product.is_zero())
    }

    pub fn to_json(&self, tensor: &GradedRing<K>) -> Value {
        json!({
            "k": self.k,
            "factors": self
                .factors
                .iter()
                .map(|f| element_to_json(tensor, f))
                .collect::<Vec<_>>(),
            "product": element_to_json(tensor, &self.product),
            "bound": format!("TC >= {}", self.bound_implied),
        })
    }
}

/// Default factor budget: half the total dimension when every generator
/// has even degree (zero-divisors then have degree at least 2), the full
/// total dimension otherwise.
pub fn suggested_max_factors<K: Field>(tensor: &GradedRing<K>) -> usize {
    if tensor.is_even_graded() {
        tensor.top_degree() / 2
    } else {
        tensor.top_degree()
    }
}

/// Depth-first search for a maximal nonzero product of basic
/// zero-divisors. Factors form multisets ordered by descending degree with
/// ties broken by generator index, and branches prune as soon as the
/// partial product vanishes or overshoots the top degree. The returned
/// bound is valid whatever the search budget: any nonzero k-fold product
/// already forces `TC > k`.
pub fn cuplength_lower_bound<K: Field>(
    zset: &ZeroDivisorSet<K>,
    max_factors: usize,
) -> Result<CupLengthCertificate<K>, CupError> {
    let tensor = &zset.tensor;
    let mut order: Vec<usize> = (0..zset.generators.len()).collect();
    order.sort_by(|&a, &b| {
        zset.generators[b]
            .degree
            .cmp(&zset.generators[a].degree)
            .then(a.cmp(&b))
    });

    let mut best = Best {
        k: 0,
        factors: Vec::new(),
        product: tensor.one(),
    };
    let one = tensor.one();
    let mut stack = Vec::new();
    dfs(
        zset,
        tensor,
        &order,
        SearchFrame {
            start: 0,
            depth: 0,
            degree: 0,
            max_factors,
        },
        &one,
        &mut stack,
        &mut best,
    )?;

    let factors: Vec<RingElement<K>> = best
        .factors
        .iter()
        .map(|&gi| zset.generators[gi].element.clone())
        .collect();
    Ok(CupLengthCertificate {
        k: best.k,
        factors,
        product: best.product,
        bound_implied: best.k + 1,
    })
}

struct Best<K: Field> {
    k: usize,
    factors: Vec<usize>,
    product: RingElement<K>,
}

#[derive(Clone, Copy)]
struct SearchFrame {
    start: usize,
    depth: usize,
    degree: usize,
    max_factors: usize,
}

fn dfs<K: Field>(
    zset: &ZeroDivisorSet<K>,
    tensor: &GradedRing<K>,
    order: &[usize],
    frame: SearchFrame,
    product: &RingElement<K>,
    stack: &mut Vec<usize>,
    best: &mut Best<K>,
) -> Result<(), CupError> {
    if frame.depth == frame.max_factors {
        return Ok(());
    }
    for pos in frame.start..order.len() {
        let gi = order[pos];
        let z = &zset.generators[gi];
        if frame.degree + z.degree > tensor.top_degree() {
            continue;
        }
        let next = tensor.mul(product, &z.element)?;
        if next.is_zero() {
            continue;
        }
        stack.push(gi);
        if frame.depth + 1 > best.k {
            best.k = frame.depth + 1;
            best.factors = stack.clone();
            best.product = next.clone();
        }
        dfs(
            zset,
            tensor,
            order,
            SearchFrame {
                start: pos,
                depth: frame.depth + 1,
                degree: frame.degree + z.degree,
                max_factors: frame.max_factors,
            },
            &next,
            stack,
            best,
        )?;
        stack.pop();
    }
    Ok(())
}

/// Binomial coefficient `C(n, k)` as an exact rational.
pub fn binomial(n: usize, k: usize) -> BigRational {
    let mut acc = BigInt::one();
    let k = k.min(n - k);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    BigRational::from_integer(acc)
}

/// The symplectic fast path: for symplectic classes with `i*(wx) = wy`,
/// the single zero-divisor `wx (x) 1 - 1 (x) wy` raised to the power
/// `n+m` equals `(-1)^m C(n+m, m) wx^n (x) wy^m`, which is nonzero, so
/// `TC >= n+m+1`.
pub fn symplectic_fastpath<K: Field>(
    tensor: &Arc<GradedRing<K>>,
    iota: &RingHom<K>,
    omega_x: &RingElement<K>,
    omega_y: &RingElement<K>,
    n: usize,
    m: usize,
) -> Result<CupLengthCertificate<K>, CupError> {
    if tensor.field().characteristic() != 0 {
        return Err(RingError::RequiresRationals.into());
    }
    let (left, right) = tensor
        .tensor_factors()
        .ok_or_else(|| RingError::Internal("fast path needs a tensor ring".to_string()))?;
    let pulled = iota.apply(omega_x)?;
    if &pulled != omega_y {
        return Err(CupError::PullbackMismatch);
    }
    let wx_n = left.power(omega_x, n)?;
    if wx_n.is_zero() {
        return Err(CupError::TopPowerVanishes);
    }
    let wy_m = right.power(omega_y, m)?;
    if wy_m.is_zero() {
        return Err(CupError::TopPowerVanishes);
    }
    let z = tensor.sub(&tensor.embed_left(omega_x)?, &tensor.embed_right(omega_y)?)?;
    let product = tensor.power(&z, n + m)?;
    // exact coefficient check: (-1)^m C(n+m, m)
    let coeff = {
        let b = binomial(n + m, m);
        let signed = if m % 2 == 1 { -b } else { b };
        tensor
            .field()
            .from_rational(&signed)
            .expect("rational coefficient in characteristic 0")
    };
    let expected = tensor.scale(&tensor.tensor_pure(&wx_n, &wy_m)?, &coeff)?;
    if product != expected {
        return Err(RingError::Internal(
            "fast-path product disagrees with the binomial formula".to_string(),
        )
        .into());
    }
    if product.is_zero() {
        return Err(RingError::Internal("fast-path product vanished".to_string()).into());
    }
    Ok(CupLengthCertificate {
        k: n + m,
        factors: vec![z; n + m],
        product,
        bound_implied: n + m + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lengths::LengthVector;
    use crate::rings::{polygon_inclusion_hom, symplectic_class};
    use crate::scalar::{PrimeField, Rationals};

    fn rp_pair(n: u32, m: u32) -> (Arc<GradedRing<PrimeField>>, RingHom<PrimeField>) {
        let f2 = PrimeField::new(2);
        let a = Arc::new(GradedRing::truncated(1, n + 1, f2.clone()));
        let b = Arc::new(GradedRing::truncated(1, m + 1, f2));
        let tensor = Arc::new(GradedRing::tensor(&a, &b).unwrap());
        let hom =
            RingHom::new(Arc::clone(&a), Arc::clone(&b), vec![b.generator_elem(0)]).unwrap();
        (tensor, hom)
    }

    #[test]
    fn identity_pair_bar_class() {
        // X = Y = S^1-type ring with the identity: the only basic
        // zero-divisor is x (x) 1 - 1 (x) x.
        let a = Arc::new(GradedRing::truncated(1, 2, Rationals));
        let tensor = Arc::new(GradedRing::tensor(&a, &a).unwrap());
        let id = RingHom::identity(&a);
        let zset = zero_divisor_generators(&tensor, &id).unwrap();
        assert_eq!(zset.generators().len(), 1);
        assert_eq!(
            zset.generators()[0].origin,
            ZeroDivisorOrigin::BarClass {
                generator: "x".to_string()
            }
        );
    }

    #[test]
    fn rp_pair_zero_divisors() {
        // RP^3 / RP^2 over F2: the bar class plus the kernel power x^3.
        let (tensor, hom) = rp_pair(3, 2);
        let zset = zero_divisor_generators(&tensor, &hom).unwrap();
        let kernel_degrees: Vec<usize> = zset
            .generators()
            .iter()
            .filter_map(|z| match z.origin {
                ZeroDivisorOrigin::KernelClass { degree } => Some(degree),
                _ => None,
            })
            .collect();
        assert_eq!(kernel_degrees, vec![3]);
        assert_eq!(zset.generators().len(), 2);
    }

    #[test]
    fn rp_pair_3_2_reaches_k3() {
        let (tensor, hom) = rp_pair(3, 2);
        let zset = zero_divisor_generators(&tensor, &hom).unwrap();
        let cert = cuplength_lower_bound(&zset, suggested_max_factors(&tensor)).unwrap();
        assert_eq!(cert.k, 3);
        assert_eq!(cert.bound_implied, 4);
        assert!(cert.verify(&tensor));
    }

    #[test]
    fn torus_pair_reaches_k_n() {
        // T^n against a point: the n bar classes multiply to the top class.
        for n in 1..=4 {
            let a = Arc::new(GradedRing::exterior(n, Rationals));
            let b = Arc::new(GradedRing::point(Rationals));
            let tensor = Arc::new(GradedRing::tensor(&a, &b).unwrap());
            let images = vec![b.zero(); n];
            let hom = RingHom::new(Arc::clone(&a), Arc::clone(&b), images).unwrap();
            let zset = zero_divisor_generators(&tensor, &hom).unwrap();
            let cert = cuplength_lower_bound(&zset, suggested_max_factors(&tensor)).unwrap();
            assert_eq!(cert.k, n, "torus rank {n}");
            assert!(cert.verify(&tensor));
        }
    }

    #[test]
    fn wedge_pair_certificate_is_minus_g_m1_tensor_g1() {
        // Wedge of S^2, S^2, S^3 against its first two spheres.
        let dims = [2usize, 2, 3];
        let m = 2;
        let a = Arc::new(GradedRing::wedge(&dims, Rationals));
        let b = Arc::new(GradedRing::wedge(&dims[..m], Rationals));
        let images: Vec<_> = (0..dims.len())
            .map(|i| if i < m { b.generator_elem(i) } else { b.zero() })
            .collect();
        let hom = RingHom::new(Arc::clone(&a), Arc::clone(&b), images).unwrap();
        let tensor = Arc::new(GradedRing::tensor(&a, &b).unwrap());
        let zset = zero_divisor_generators(&tensor, &hom).unwrap();
        // g3 (x) 1 is a bar class on its own: i*(g3) = 0.
        assert!(zset.generators().iter().any(|z| z.origin
            == ZeroDivisorOrigin::BarClass {
                generator: "g3".into()
            }
            && z.element == tensor.embed_left(&a.generator_elem(2)).unwrap()));
        let cert = cuplength_lower_bound(&zset, suggested_max_factors(&tensor)).unwrap();
        assert_eq!(cert.k, 2);
        let expected = tensor
            .scale_i64(
                &tensor
                    .tensor_pure(&a.generator_elem(2), &b.generator_elem(0))
                    .unwrap(),
                -1,
            )
            .unwrap();
        assert_eq!(cert.product, expected);
        assert!(cert.verify(&tensor));
    }

    #[test]
    fn fastpath_cp_pair() {
        let a = Arc::new(GradedRing::truncated(2, 3, Rationals));
        let b = Arc::new(GradedRing::truncated(2, 2, Rationals));
        let tensor = Arc::new(GradedRing::tensor(&a, &b).unwrap());
        let hom =
            RingHom::new(Arc::clone(&a), Arc::clone(&b), vec![b.generator_elem(0)]).unwrap();
        let wx = a.generator_elem(0);
        let wy = b.generator_elem(0);
        let cert = symplectic_fastpath(&tensor, &hom, &wx, &wy, 2, 1).unwrap();
        assert_eq!(cert.k, 3);
        assert_eq!(cert.bound_implied, 4);
        assert!(cert.verify(&tensor));
    }

    #[test]
    fn fastpath_point_target() {
        // m = 0: the product degenerates to wx^n (x) 1.
        let a = Arc::new(
            GradedRing::polygon(&LengthVector::parse("1,1,1,2").unwrap(), Rationals).unwrap(),
        );
        let b = Arc::new(GradedRing::point(Rationals));
        let tensor = Arc::new(GradedRing::tensor(&a, &b).unwrap());
        let images = vec![b.zero(); a.num_generators()];
        let hom = RingHom::new(Arc::clone(&a), Arc::clone(&b), images).unwrap();
        let wx = symplectic_class(&a).unwrap();
        let wy = b.zero();
        let cert = symplectic_fastpath(&tensor, &hom, &wx, &wy, 1, 0).unwrap();
        assert_eq!(cert.k, 1);
        assert!(cert.verify(&tensor));
    }

    #[test]
    fn fastpath_rejects_wrong_pullback() {
        let a = Arc::new(GradedRing::truncated(2, 3, Rationals));
        let b = Arc::new(GradedRing::truncated(2, 2, Rationals));
        let tensor = Arc::new(GradedRing::tensor(&a, &b).unwrap());
        let hom =
            RingHom::new(Arc::clone(&a), Arc::clone(&b), vec![b.generator_elem(0)]).unwrap();
        let wx = a.generator_elem(0);
        let wrong = b.scale_i64(&b.generator_elem(0), 2).unwrap();
        assert!(matches!(
            symplectic_fastpath(&tensor, &hom, &wx, &wrong, 2, 1),
            Err(CupError::PullbackMismatch)
        ));
    }

    #[test]
    fn polygon_pair_fastpath() {
        // hexagon against the edge-identified pentagon of the running
        // example: exponent (6-3)+(5-3) = 5 and a nonzero product.
        let l = LengthVector::parse("1,1,2,3,5,7").unwrap();
        let p = crate::lengths::OrderedSetPartition::parse(6, "1|3|4|2,5|6").unwrap();
        let merged = crate::lengths::edge_identify(&l, &p).unwrap();
        let a = Arc::new(GradedRing::polygon(&l, Rationals).unwrap());
        let b = Arc::new(GradedRing::polygon(&merged.lengths, Rationals).unwrap());
        let tensor = Arc::new(GradedRing::tensor(&a, &b).unwrap());
        let hom = polygon_inclusion_hom(&a, &b, &merged.phi).unwrap();
        let wx = symplectic_class(&a).unwrap();
        let wy = symplectic_class(&b).unwrap();
        let cert = symplectic_fastpath(&tensor, &hom, &wx, &wy, 3, 2).unwrap();
        assert_eq!(cert.k, 5);
        assert_eq!(cert.bound_implied, 6);
        assert!(cert.verify(&tensor));
    }

    #[test]
    fn monotone_in_generator_set() {
        let (tensor, hom) = rp_pair(4, 2);
        let zset = zero_divisor_generators(&tensor, &hom).unwrap();
        let full = cuplength_lower_bound(&zset, suggested_max_factors(&tensor))
            .unwrap()
            .k;
        for take in 1..zset.generators().len() {
            let indices: Vec<usize> = (0..take).collect();
            let sub = zset.restricted(&indices);
            let partial = cuplength_lower_bound(&sub, suggested_max_factors(&tensor))
                .unwrap()
                .k;
            assert!(partial <= full);
        }
    }
}
