//! Monomials in a free graded-commutative algebra.
//!
//! A monomial is an exponent vector over the ring's generators, kept in
//! generator order. Odd-degree generators anticommute, so merging two
//! monomials picks up a Koszul sign from the odd-odd crossings, and an
//! odd generator squares to zero away from characteristic 2.

/// Exponent vector over the owning ring's generators.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(num_gens: usize) -> Monomial {
        Monomial(vec![0; num_gens])
    }

    pub fn generator(num_gens: usize, index: usize) -> Monomial {
        let mut exps = vec![0; num_gens];
        exps[index] = 1;
        Monomial(exps)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn degree(&self, gen_degrees: &[usize]) -> usize {
        self.0
            .iter()
            .zip(gen_degrees)
            .map(|(&e, &d)| e as usize * d)
            .sum()
    }

    pub fn exponent(&self, index: usize) -> u32 {
        self.0[index]
    }
}

/// Merges two monomials in the graded-commutative algebra.
///
/// Returns `None` when the product vanishes identically (an odd-degree
/// generator would be squared away from characteristic 2); otherwise the
/// merged exponents and whether the Koszul sign is negative.
pub fn graded_product(
    a: &Monomial,
    b: &Monomial,
    odd: &[bool],
    char_two: bool,
) -> Option<(bool, Monomial)> {
    let n = a.0.len();
    debug_assert_eq!(n, b.0.len());
    if !char_two {
        for i in 0..n {
            if odd[i] && a.0[i] + b.0[i] >= 2 {
                return None;
            }
        }
    }
    let mut negative = false;
    if !char_two {
        // Crossings: each odd factor of b at position j moves left past the
        // odd factors of a at positions > j.
        let mut suffix = vec![0u32; n + 1];
        for i in (0..n).rev() {
            suffix[i] = suffix[i + 1] + if odd[i] { a.0[i] & 1 } else { 0 };
        }
        let mut crossings = 0u32;
        for j in 0..n {
            if odd[j] && b.0[j] & 1 == 1 {
                crossings += suffix[j + 1];
            }
        }
        negative = crossings % 2 == 1;
    }
    let merged = Monomial(a.0.iter().zip(&b.0).map(|(&x, &y)| x + y).collect());
    Some((negative, merged))
}

/// Enumerates the normal monomials of a fixed total degree: exponent of
/// generator `i` stays strictly below `bound[i]` when bounded.
pub fn enumerate_degree(
    gen_degrees: &[usize],
    bounds: &[Option<u32>],
    degree: usize,
) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = vec![0u32; gen_degrees.len()];
    fill(gen_degrees, bounds, 0, degree, &mut current, &mut out);
    out
}

fn fill(
    gen_degrees: &[usize],
    bounds: &[Option<u32>],
    index: usize,
    remaining: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<Monomial>,
) {
    if index == gen_degrees.len() {
        if remaining == 0 {
            out.push(Monomial(current.clone()));
        }
        return;
    }
    let d = gen_degrees[index];
    let max_by_degree = (remaining / d) as u32;
    let max = match bounds[index] {
        Some(b) => max_by_degree.min(b.saturating_sub(1)),
        None => max_by_degree,
    };
    for e in 0..=max {
        current[index] = e;
        fill(
            gen_degrees,
            bounds,
            index + 1,
            remaining - e as usize * d,
            current,
            out,
        );
        current[index] = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koszul_sign_on_degree_one_swap() {
        // x2 * x1 = -x1 * x2 for odd generators.
        let odd = vec![true, true];
        let x1 = Monomial::generator(2, 0);
        let x2 = Monomial::generator(2, 1);
        let (neg, merged) = graded_product(&x2, &x1, &odd, false).unwrap();
        assert!(neg);
        assert_eq!(merged, Monomial(vec![1, 1]));
        let (neg2, _) = graded_product(&x1, &x2, &odd, false).unwrap();
        assert!(!neg2);
    }

    #[test]
    fn odd_square_vanishes() {
        let odd = vec![true];
        let x = Monomial::generator(1, 0);
        assert!(graded_product(&x, &x, &odd, false).is_none());
        // but survives in characteristic 2
        assert!(graded_product(&x, &x, &odd, true).is_some());
    }

    #[test]
    fn enumeration_respects_bounds() {
        // Two degree-2 generators, second squarefree: degree 4 monomials.
        let degs = vec![2, 2];
        let bounds = vec![None, Some(2)];
        let monos = enumerate_degree(&degs, &bounds, 4);
        assert_eq!(monos, vec![Monomial(vec![1, 1]), Monomial(vec![2, 0])]);
    }

    #[test]
    fn exterior_degree_counts() {
        // Three odd degree-1 generators: binomial ranks 1,3,3,1.
        let degs = vec![1, 1, 1];
        let bounds = vec![Some(2), Some(2), Some(2)];
        for (d, want) in [(0usize, 1usize), (1, 3), (2, 3), (3, 1), (4, 0)] {
            assert_eq!(enumerate_degree(&degs, &bounds, d).len(), want);
        }
    }
}
