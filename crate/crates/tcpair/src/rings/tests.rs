use std::sync::Arc;

use super::*;
use crate::lengths::LengthVector;
use crate::scalar::{PrimeField, Rationals};

fn lv(s: &str) -> LengthVector {
    LengthVector::parse(s).unwrap()
}

fn ranks<K: Field>(ring: &GradedRing<K>) -> Vec<usize> {
    (0..=ring.top_degree()).map(|d| ring.rank(d)).collect()
}

#[test]
fn truncated_relation_kills_top_power() {
    let f2 = PrimeField::new(2);
    let ring = GradedRing::truncated(1, 4, f2);
    let x = ring.generator_elem(0);
    let x3 = ring.power(&x, 3).unwrap();
    assert!(!x3.is_zero());
    let x4 = ring.mul(&x3, &x).unwrap();
    assert!(x4.is_zero());
}

#[test]
fn truncated_cp2_ranks() {
    let ring = GradedRing::truncated(2, 3, Rationals);
    assert_eq!(ranks(&ring), vec![1, 0, 1, 0, 1]);
}

#[test]
fn truncated_sphere_square_zero() {
    let ring = GradedRing::truncated(1, 2, Rationals);
    let x = ring.generator_elem(0);
    assert!(ring.mul(&x, &x).unwrap().is_zero());
}

#[test]
fn exterior_products() {
    let ring = GradedRing::exterior(3, Rationals);
    let x1 = ring.generator_elem(0);
    let x2 = ring.generator_elem(1);
    let x3 = ring.generator_elem(2);
    let top = ring.mul(&ring.mul(&x1, &x2).unwrap(), &x3).unwrap();
    assert!(!top.is_zero());
    assert!(ring.mul(&x1, &x1).unwrap().is_zero());
    assert_eq!(ranks(&ring), vec![1, 3, 3, 1]);
}

#[test]
fn exterior_koszul_sign() {
    let ring = GradedRing::exterior(2, Rationals);
    let x1 = ring.generator_elem(0);
    let x2 = ring.generator_elem(1);
    let ab = ring.mul(&x1, &x2).unwrap();
    let ba = ring.mul(&x2, &x1).unwrap();
    assert_eq!(ring.neg(&ab).unwrap(), ba);
}

#[test]
fn wedge_products_vanish() {
    let ring = GradedRing::wedge(&[2, 2, 3], Rationals);
    let g1 = ring.generator_elem(0);
    let g2 = ring.generator_elem(1);
    assert!(ring.mul(&g1, &g2).unwrap().is_zero());
    assert!(ring.mul(&g1, &g1).unwrap().is_zero());
    // one degree-2 class, one degree-3 class... ranks 1,0,2,1
    assert_eq!(ranks(&ring), vec![1, 0, 2, 1]);
}

#[test]
fn wedge_single_matches_truncated() {
    let w = GradedRing::wedge(&[2], Rationals);
    let t = GradedRing::truncated(2, 2, Rationals);
    assert_eq!(ranks(&w), ranks(&t));
}

#[test]
fn wedge_two_circles() {
    let ring = GradedRing::wedge(&[1, 1], Rationals);
    let g1 = ring.generator_elem(0);
    let g2 = ring.generator_elem(1);
    assert!(ring.mul(&g1, &g1).unwrap().is_zero());
    assert!(ring.mul(&g1, &g2).unwrap().is_zero());
    assert_eq!(ranks(&ring), vec![1, 2]);
}

#[test]
fn polygon_small_sphere() {
    // N(1,1,1,2) is a 2-sphere: ranks 1, 0, 1.
    let ring = GradedRing::polygon(&lv("1,1,1,2"), Rationals).unwrap();
    assert_eq!(ring.top_degree(), 2);
    assert_eq!(ranks(&ring), vec![1, 0, 1]);
}

#[test]
fn polygon_rejects_bad_lengths() {
    assert!(matches!(
        GradedRing::polygon(&lv("1,1,2,2"), Rationals),
        Err(RingError::NonGenericLength)
    ));
    assert!(matches!(
        GradedRing::polygon(&lv("1,1,7,10"), Rationals),
        Err(RingError::DegenerateLength)
    ));
}

#[test]
fn polygon_hexagon_top_rank_one() {
    let ring = GradedRing::polygon(&lv("1,1,2,3,5,7"), Rationals).unwrap();
    assert_eq!(ring.top_degree(), 6);
    assert_eq!(ring.rank(6), 1);
}

#[test]
fn polygon_square_rewrite() {
    // V_i * V_i = -R * V_i holds in every polygon ring.
    let ring = GradedRing::polygon(&lv("1,1,2,3,5,7"), Rationals).unwrap();
    let r = ring.generator_elem(ring.generator_index("R").unwrap());
    for i in 1..6 {
        let v = ring.generator_elem(ring.generator_index(&format!("V{i}")).unwrap());
        let vv = ring.mul(&v, &v).unwrap();
        let rv = ring.mul(&r, &v).unwrap();
        assert_eq!(vv, ring.neg(&rv).unwrap());
    }
}

#[test]
fn identity_is_multiplicative_unit() {
    let ring = GradedRing::polygon(&lv("1,1,2,3,5,7"), Rationals).unwrap();
    let one = ring.one();
    let a = chern_class(&ring, 1).unwrap();
    assert_eq!(ring.mul(&one, &a).unwrap(), a);
}

#[test]
fn tensor_char2_square() {
    let f2 = PrimeField::new(2);
    let a = Arc::new(GradedRing::truncated(1, 4, f2.clone()));
    let b = Arc::new(GradedRing::truncated(1, 3, f2));
    let t = GradedRing::tensor(&a, &b).unwrap();
    let x1 = t.embed_left(&a.generator_elem(0)).unwrap();
    let y1 = t.embed_right(&b.generator_elem(0)).unwrap();
    let s = t.add(&x1, &y1).unwrap();
    let sq = t.mul(&s, &s).unwrap();
    let x2 = t
        .embed_left(&a.power(&a.generator_elem(0), 2).unwrap())
        .unwrap();
    let y2 = t
        .embed_right(&b.power(&b.generator_elem(0), 2).unwrap())
        .unwrap();
    let expected = t.add(&x2, &y2).unwrap();
    assert_eq!(sq, expected);
}

#[test]
fn tensor_cross_anticommute() {
    let a = Arc::new(GradedRing::exterior(1, Rationals));
    let b = Arc::new(GradedRing::exterior(1, Rationals));
    let t = GradedRing::tensor(&a, &b).unwrap();
    let xa = t.embed_left(&a.generator_elem(0)).unwrap();
    let xb = t.embed_right(&b.generator_elem(0)).unwrap();
    let ab = t.mul(&xa, &xb).unwrap();
    let ba = t.mul(&xb, &xa).unwrap();
    assert_eq!(ba, t.neg(&ab).unwrap());
    assert!(!ab.is_zero());
}

#[test]
fn tensor_ranks_convolve() {
    let a = Arc::new(GradedRing::exterior(2, Rationals));
    let b = Arc::new(GradedRing::exterior(3, Rationals));
    let t = GradedRing::tensor(&a, &b).unwrap();
    for d in 0..=t.top_degree() {
        let conv: usize = (0..=d)
            .map(|i| a.rank(i) * b.rank(d.saturating_sub(i)))
            .sum();
        assert_eq!(t.rank(d), conv, "degree {d}");
    }
}

#[test]
fn cp_pair_binomial_product() {
    // (x(x)1 - 1(x)y)^3 = -3 x^2 (x) y for the CP^2 / CP^1 pair.
    let a = Arc::new(GradedRing::truncated(2, 3, Rationals));
    let b = Arc::new(GradedRing::truncated(2, 2, Rationals));
    let t = GradedRing::tensor(&a, &b).unwrap();
    let x = t.embed_left(&a.generator_elem(0)).unwrap();
    let y = t.embed_right(&b.generator_elem(0)).unwrap();
    let z = t.sub(&x, &y).unwrap();
    let z3 = t.power(&z, 3).unwrap();
    let x2y = t
        .tensor_pure(
            &a.power(&a.generator_elem(0), 2).unwrap(),
            &b.generator_elem(0),
        )
        .unwrap();
    assert_eq!(z3, t.scale_i64(&x2y, -3).unwrap());
}

#[test]
fn hom_truncated_onto_shorter() {
    // F2[x]/x^5 -> F2[y]/y^3 by x -> y is a ring map: x^5 -> y^5 = 0.
    let f2 = PrimeField::new(2);
    let source = Arc::new(GradedRing::truncated(1, 5, f2.clone()));
    let target = Arc::new(GradedRing::truncated(1, 3, f2));
    let images = vec![target.generator_elem(0)];
    let hom = RingHom::new(Arc::clone(&source), Arc::clone(&target), images).unwrap();
    let x2 = source.power(&source.generator_elem(0), 2).unwrap();
    let y2 = target.power(&target.generator_elem(0), 2).unwrap();
    assert_eq!(hom.apply(&x2).unwrap(), y2);
}

#[test]
fn hom_rejects_nonpreserving_map() {
    // F2[x]/x^3 -> F2[y]/y^5 by x -> y fails: y^3 is nonzero there.
    let f2 = PrimeField::new(2);
    let source = Arc::new(GradedRing::truncated(1, 3, f2.clone()));
    let target = Arc::new(GradedRing::truncated(1, 5, f2));
    let images = vec![target.generator_elem(0)];
    assert!(matches!(
        RingHom::new(source, target, images),
        Err(RingError::RelationNotPreserved { index: 0 })
    ));
}

#[test]
fn identity_hom_is_identity() {
    let ring = Arc::new(GradedRing::polygon(&lv("1,1,1,2"), Rationals).unwrap());
    let id = RingHom::identity(&ring);
    let w = symplectic_class(&ring).unwrap();
    assert_eq!(id.apply(&w).unwrap(), w);
}

#[test]
fn chern_class_formulas() {
    let ring = GradedRing::polygon(&lv("1,1,1,2"), Rationals).unwrap();
    let r = ring.generator_elem(ring.generator_index("R").unwrap());
    assert_eq!(chern_class(&ring, 4).unwrap(), ring.neg(&r).unwrap());
    let v1 = ring.generator_elem(ring.generator_index("V1").unwrap());
    let expected = ring.add(&r, &ring.scale_i64(&v1, 2).unwrap()).unwrap();
    assert_eq!(chern_class(&ring, 1).unwrap(), expected);
    assert!(matches!(
        chern_class(&ring, 5),
        Err(RingError::IndexOutOfRange { .. })
    ));
}

#[test]
fn symplectic_class_of_small_polygon() {
    // For (1,1,1,2) the V classes die, so [w] = R, and w^(n-3) = w != 0.
    let ring = GradedRing::polygon(&lv("1,1,1,2"), Rationals).unwrap();
    let w = symplectic_class(&ring).unwrap();
    let r = ring.generator_elem(ring.generator_index("R").unwrap());
    assert_eq!(w, r);
    assert!(!w.is_zero());
}

#[test]
fn polygon_inclusion_hom_maps_chern_to_chern() {
    let l = lv("1,1,2,3,5,7");
    let partition = crate::lengths::OrderedSetPartition::parse(6, "1|3|4|2,5|6").unwrap();
    let merged = crate::lengths::edge_identify(&l, &partition).unwrap();
    let source = Arc::new(GradedRing::polygon(&l, Rationals).unwrap());
    let target = Arc::new(GradedRing::polygon(&merged.lengths, Rationals).unwrap());
    let hom = polygon_inclusion_hom(&source, &target, &merged.phi).unwrap();
    for j in 1..=6 {
        let cj = chern_class(&source, j).unwrap();
        let image = hom.apply(&cj).unwrap();
        let expect = chern_class(&target, merged.phi[j - 1]).unwrap();
        assert_eq!(image, expect, "chern class {j}");
    }
}

#[test]
fn presentation_json_roundtrip() {
    let ring = GradedRing::truncated(1, 4, PrimeField::new(2));
    let doc = presentation_to_json(&ring);
    let untyped = presentation_from_json(&doc).unwrap();
    assert_eq!(untyped.field, crate::scalar::FieldSpec::F2);
    let typed = untyped.into_typed(PrimeField::new(2)).unwrap();
    let rebuilt = GradedRing::from_presentation(typed).unwrap();
    assert_eq!(ranks(&rebuilt), ranks(&ring));
}

#[test]
fn element_json_roundtrip() {
    let ring = GradedRing::polygon(&lv("1,1,2,3,5,7"), Rationals).unwrap();
    let w = symplectic_class(&ring).unwrap();
    let doc = element_to_json(&ring, &w);
    let back = element_from_json(&ring, &doc, "").unwrap();
    assert_eq!(back, w);
}

#[test]
fn hom_json_roundtrip() {
    let f2 = PrimeField::new(2);
    let source = Arc::new(GradedRing::truncated(1, 5, f2.clone()));
    let target = Arc::new(GradedRing::truncated(1, 3, f2));
    let hom = RingHom::new(
        Arc::clone(&source),
        Arc::clone(&target),
        vec![target.generator_elem(0)],
    )
    .unwrap();
    let doc = hom_to_json(&hom);
    let back = hom_from_json(&source, &target, &doc).unwrap();
    let x = source.generator_elem(0);
    assert_eq!(back.apply(&x).unwrap(), hom.apply(&x).unwrap());
}

#[test]
fn from_presentation_detects_truncation_caps() {
    // x^4 = 0 given only as a relation still caps the monomial basis.
    let pres = Presentation {
        field: Rationals,
        generators: vec![Generator {
            name: "x".into(),
            degree: 1,
        }],
        relations: vec![Polynomial {
            terms: vec![Term {
                coeff: Rationals.one(),
                monomial: Monomial(vec![4]),
            }],
        }],
        top_degree: 3,
    };
    let ring = GradedRing::from_presentation(pres).unwrap();
    assert_eq!(ranks(&ring), vec![1, 1, 1, 1]);
}

#[test]
fn point_ring_is_ground_field() {
    let ring = GradedRing::point(Rationals);
    assert_eq!(ring.top_degree(), 0);
    assert_eq!(ring.rank(0), 1);
    let one = ring.one();
    assert_eq!(ring.mul(&one, &one).unwrap(), one);
}
