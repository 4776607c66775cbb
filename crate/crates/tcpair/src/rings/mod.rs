//! Graded-commutative quotient rings presented by generators and
//! homogeneous relations, with per-degree quotient bases computed by exact
//! linear algebra.
//!
//! The engine works degree by degree up to a declared top degree. Spanning
//! monomials of each degree are the "normal" monomials: exponents stay
//! below per-generator caps (a truncation `x^t = 0`, or a rewrite like
//! `V^2 = -R V` in the polygon rings), and odd-degree generators are
//! squarefree away from characteristic 2. The remaining relations are
//! multiplied by all normal monomials of complementary degree and row
//! reduced; quotient bases are the non-pivot monomials. Tensor products
//! are derived rings: their bases are pairs of factor basis elements and
//! multiplication delegates to the factors with the Koszul sign.

pub mod linalg;
pub mod monomial;
mod serial;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num::{BigInt, BigRational};
use thiserror::Error;

use crate::lengths::{classify_subsets, vet, LengthError, LengthVector, SubsetMask};
use crate::scalar::Field;
use monomial::{enumerate_degree, graded_product, Monomial};

pub use serial::{
    element_from_json, element_to_json, hom_from_json, hom_to_json, presentation_from_json,
    presentation_to_json, UntypedPresentation,
};

/// Largest polygon the ring builder accepts.
pub const MAX_POLYGON_SIZE: usize = 12;

static NEXT_RING_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Error)]
pub enum RingError {
    #[error("length vector is not generic (a balanced subset exists)")]
    NonGenericLength,
    #[error("length vector is degenerate (one edge dominates the rest)")]
    DegenerateLength,
    #[error("polygon has {n} edges; ring construction is capped at n <= {max}")]
    SizeTooLarge { n: usize, max: usize },
    #[error("rings are over different coefficient fields")]
    FieldMismatch,
    #[error("elements belong to different rings")]
    RingMismatch,
    #[error("relation {index} is not sent to zero by the homomorphism")]
    RelationNotPreserved { index: usize },
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("operation requires rational coefficients")]
    RequiresRationals,
    #[error("{0}")]
    Length(#[from] LengthError),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// A named generator with its cohomological degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: usize,
}

/// One term of a homogeneous polynomial in the generators.
#[derive(Clone, Debug)]
pub struct Term<K: Field> {
    pub coeff: K::Elem,
    pub monomial: Monomial,
}

/// Polynomial in the generators, the shape of a relation.
#[derive(Clone, Debug)]
pub struct Polynomial<K: Field> {
    pub terms: Vec<Term<K>>,
}

impl<K: Field> Polynomial<K> {
    /// The common degree of all terms; `None` when inhomogeneous.
    pub fn degree(&self, gen_degrees: &[usize]) -> Option<usize> {
        let mut deg = None;
        for t in &self.terms {
            let d = t.monomial.degree(gen_degrees);
            match deg {
                None => deg = Some(d),
                Some(existing) if existing != d => return None,
                _ => {}
            }
        }
        deg
    }
}

/// Generators, relations, coefficient field, and the degree cap.
#[derive(Clone, Debug)]
pub struct Presentation<K: Field> {
    pub field: K,
    pub generators: Vec<Generator>,
    pub relations: Vec<Polynomial<K>>,
    pub top_degree: usize,
}

/// Rewrite rule `x^bound -> target`, with `target` a combination of normal
/// monomials of the same degree (empty means zero).
#[derive(Clone, Debug)]
struct Cap<K: Field> {
    bound: u32,
    target: Vec<(K::Elem, Monomial)>,
}

/// Sparse echelon row: entries sorted by column, first entry the pivot
/// with coefficient one.
struct SparseRow<K: Field> {
    entries: Vec<(usize, K::Elem)>,
}

struct Echelon<K: Field> {
    rows: Vec<SparseRow<K>>,
    pivot_of_col: BTreeMap<usize, usize>,
}

impl<K: Field> Echelon<K> {
    fn new() -> Echelon<K> {
        Echelon {
            rows: Vec::new(),
            pivot_of_col: BTreeMap::new(),
        }
    }

    fn reduce(&self, field: &K, dense: &mut [K::Elem]) {
        for (&col, &row_idx) in &self.pivot_of_col {
            if field.is_zero(&dense[col]) {
                continue;
            }
            let factor = dense[col].clone();
            for (c, val) in &self.rows[row_idx].entries {
                let delta = field.mul(&factor, val);
                dense[*c] = field.sub(&dense[*c], &delta);
            }
        }
    }

    /// Reduces and, if independent, installs the row, keeping all stored
    /// rows fully reduced against each other.
    fn insert(&mut self, field: &K, mut dense: Vec<K::Elem>) {
        self.reduce(field, &mut dense);
        let Some(pivot) = dense.iter().position(|v| !field.is_zero(v)) else {
            return;
        };
        let inv = field.inv(&dense[pivot]).expect("pivot is nonzero");
        let entries: Vec<(usize, K::Elem)> = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| !field.is_zero(v))
            .map(|(c, v)| (c, field.mul(v, &inv)))
            .collect();
        for row in &mut self.rows {
            if let Ok(pos) = row.entries.binary_search_by_key(&pivot, |e| e.0) {
                let factor = row.entries[pos].1.clone();
                row.entries = sparse_axpy(field, &row.entries, &entries, &factor);
            }
        }
        let idx = self.rows.len();
        self.rows.push(SparseRow { entries });
        self.pivot_of_col.insert(pivot, idx);
    }
}

/// `a - factor * b` on sorted sparse rows, dropping zeros.
fn sparse_axpy<K: Field>(
    field: &K,
    a: &[(usize, K::Elem)],
    b: &[(usize, K::Elem)],
    factor: &K::Elem,
) -> Vec<(usize, K::Elem)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (Some((ca, va)), Some((cb, vb))) if ca == cb => {
                let v = field.sub(va, &field.mul(factor, vb));
                if !field.is_zero(&v) {
                    out.push((*ca, v));
                }
                i += 1;
                j += 1;
            }
            (Some((ca, va)), Some((cb, _))) if ca < cb => {
                out.push((*ca, va.clone()));
                i += 1;
            }
            (_, Some((cb, vb))) => {
                let v = field.neg(&field.mul(factor, vb));
                if !field.is_zero(&v) {
                    out.push((*cb, v));
                }
                j += 1;
            }
            (Some((ca, va)), None) => {
                out.push((*ca, va.clone()));
                i += 1;
            }
            (None, None) => break,
        }
    }
    out
}

struct DegreeData<K: Field> {
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    echelon: Echelon<K>,
    /// Monomial indices forming the quotient basis, in enumeration order.
    basis: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
struct TensorSeg {
    left_degree: usize,
    offset: usize,
    right_rank: usize,
}

struct TensorDegree {
    segs: Vec<TensorSeg>,
    rank: usize,
}

enum Internals<K: Field> {
    Presented {
        caps: Vec<Option<Cap<K>>>,
        bounds: Vec<Option<u32>>,
        odd: Vec<bool>,
        row_relations: Vec<usize>,
        degrees: Vec<DegreeData<K>>,
    },
    Tensor {
        left: Arc<GradedRing<K>>,
        right: Arc<GradedRing<K>>,
        degrees: Vec<TensorDegree>,
    },
}

/// Metadata kept by the polygon-space constructor.
#[derive(Clone, Debug)]
pub struct PolygonMeta {
    pub lengths: LengthVector,
}

/// A graded-commutative quotient ring with computed per-degree bases.
pub struct GradedRing<K: Field> {
    id: u64,
    pres: Presentation<K>,
    meta: Option<PolygonMeta>,
    internals: Internals<K>,
}

/// Element of a [`GradedRing`]: per-degree coefficient vectors over that
/// degree's quotient basis. Absent degrees are zero; stored vectors are
/// never all-zero.
#[derive(Clone, Debug, PartialEq)]
pub struct RingElement<K: Field> {
    ring: u64,
    comps: BTreeMap<usize, Vec<K::Elem>>,
}

impl<K: Field> RingElement<K> {
    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.comps.keys().copied().collect()
    }

    /// Homogeneous elements report their degree; zero and mixed elements
    /// report `None`.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        if self.comps.len() == 1 {
            self.comps.keys().next().copied()
        } else {
            None
        }
    }

    pub fn component(&self, degree: usize) -> Option<&[K::Elem]> {
        self.comps.get(&degree).map(|v| v.as_slice())
    }
}

// ---------------------------------------------------------------------
// construction

impl<K: Field> GradedRing<K> {
    fn from_parts(
        pres: Presentation<K>,
        caps: Vec<Option<Cap<K>>>,
        cap_relation_indices: BTreeSet<usize>,
        meta: Option<PolygonMeta>,
    ) -> Result<GradedRing<K>, RingError> {
        let gen_degrees: Vec<usize> = pres.generators.iter().map(|g| g.degree).collect();
        for g in &pres.generators {
            if g.degree == 0 {
                return Err(RingError::InvalidPresentation(format!(
                    "generator {} has degree 0",
                    g.name
                )));
            }
        }
        let mut names = BTreeSet::new();
        for g in &pres.generators {
            if !names.insert(g.name.clone()) {
                return Err(RingError::InvalidPresentation(format!(
                    "duplicate generator name {}",
                    g.name
                )));
            }
        }
        for (i, r) in pres.relations.iter().enumerate() {
            if r.terms.is_empty() {
                return Err(RingError::InvalidPresentation(format!(
                    "relation {i} has no terms"
                )));
            }
            if r.terms.iter().any(|t| t.monomial.0.len() != gen_degrees.len()) {
                return Err(RingError::InvalidPresentation(format!(
                    "relation {i} has a monomial over the wrong generator count"
                )));
            }
            match r.degree(&gen_degrees) {
                None => {
                    return Err(RingError::InvalidPresentation(format!(
                        "relation {i} is not homogeneous"
                    )))
                }
                Some(0) => {
                    return Err(RingError::InvalidPresentation(format!(
                        "relation {i} has a constant term"
                    )))
                }
                Some(_) => {}
            }
        }

        let char_two = pres.field.characteristic() == 2;
        let odd: Vec<bool> = gen_degrees.iter().map(|d| d % 2 == 1).collect();
        let bounds: Vec<Option<u32>> = (0..gen_degrees.len())
            .map(|i| match &caps[i] {
                Some(c) => Some(c.bound),
                None if odd[i] && !char_two => Some(2),
                None => None,
            })
            .collect();
        let row_relations: Vec<usize> = (0..pres.relations.len())
            .filter(|i| !cap_relation_indices.contains(i))
            .collect();

        let mut ring = GradedRing {
            id: NEXT_RING_ID.fetch_add(1, Ordering::Relaxed),
            pres,
            meta,
            internals: Internals::Presented {
                caps,
                bounds,
                odd,
                row_relations,
                degrees: Vec::new(),
            },
        };
        ring.compute_degrees();
        Ok(ring)
    }

    fn compute_degrees(&mut self) {
        let gen_degrees: Vec<usize> = self.pres.generators.iter().map(|g| g.degree).collect();
        let field = self.pres.field.clone();
        let top = self.pres.top_degree;
        let relations = self.pres.relations.clone();
        let rel_degrees: Vec<usize> = relations
            .iter()
            .map(|r| r.degree(&gen_degrees).expect("validated homogeneous"))
            .collect();

        let Internals::Presented {
            caps,
            bounds,
            odd,
            row_relations,
            degrees,
        } = &mut self.internals
        else {
            unreachable!("compute_degrees runs on presented rings only");
        };

        let char_two = field.characteristic() == 2;
        for d in 0..=top {
            let monomials = enumerate_degree(&gen_degrees, bounds, d);
            let index: HashMap<Monomial, usize> = monomials
                .iter()
                .enumerate()
                .map(|(i, m)| (m.clone(), i))
                .collect();
            let mut echelon = Echelon::new();
            for &ri in row_relations.iter() {
                let rel = &relations[ri];
                let dr = rel_degrees[ri];
                if dr > d {
                    continue;
                }
                let multipliers: Vec<Monomial> = if d == dr {
                    vec![Monomial::one(gen_degrees.len())]
                } else {
                    degrees[d - dr].monomials.clone()
                };
                for m in &multipliers {
                    let mut acc: HashMap<Monomial, K::Elem> = HashMap::new();
                    for t in &rel.terms {
                        if let Some((neg, merged)) = graded_product(m, &t.monomial, odd, char_two)
                        {
                            let c = if neg {
                                field.neg(&t.coeff)
                            } else {
                                t.coeff.clone()
                            };
                            normalize_into(&field, caps, bounds, odd, char_two, merged, c, &mut acc);
                        }
                    }
                    if acc.is_empty() {
                        continue;
                    }
                    let mut dense = vec![field.zero(); monomials.len()];
                    for (mono, coeff) in acc {
                        let col = *index.get(&mono).expect("normal monomial is enumerated");
                        dense[col] = field.add(&dense[col], &coeff);
                    }
                    echelon.insert(&field, dense);
                }
            }
            let basis: Vec<usize> = (0..monomials.len())
                .filter(|c| !echelon.pivot_of_col.contains_key(c))
                .collect();
            degrees.push(DegreeData {
                monomials,
                index,
                echelon,
                basis,
            });
        }
    }

    /// The ground field concentrated in degree 0 (the ring of a point).
    pub fn point(field: K) -> GradedRing<K> {
        let pres = Presentation {
            field,
            generators: Vec::new(),
            relations: Vec::new(),
            top_degree: 0,
        };
        GradedRing::from_parts(pres, Vec::new(), BTreeSet::new(), None)
            .expect("point presentation is valid")
    }

    /// Truncated polynomial ring on one generator: `x^truncation = 0`.
    ///
    /// Covers spheres (`truncation = 2`), complex projective spaces
    /// (`gen_degree = 2`), and real projective spaces over F2
    /// (`gen_degree = 1`).
    pub fn truncated(gen_degree: usize, truncation: u32, field: K) -> GradedRing<K> {
        assert!(gen_degree >= 1, "generator degree must be positive");
        assert!(truncation >= 2, "truncation must be at least 2");
        let one = field.one();
        let pres = Presentation {
            field,
            generators: vec![Generator {
                name: "x".to_string(),
                degree: gen_degree,
            }],
            relations: vec![Polynomial {
                terms: vec![Term {
                    coeff: one,
                    monomial: Monomial(vec![truncation]),
                }],
            }],
            top_degree: gen_degree * (truncation as usize - 1),
        };
        let caps = vec![Some(Cap {
            bound: truncation,
            target: Vec::new(),
        })];
        GradedRing::from_parts(pres, caps, BTreeSet::from([0]), None)
            .expect("truncated presentation is valid")
    }

    /// Exterior algebra on `n` degree-one generators (the torus ring).
    pub fn exterior(n: usize, field: K) -> GradedRing<K> {
        assert!(n >= 1);
        let one = field.one();
        let generators = (1..=n)
            .map(|i| Generator {
                name: format!("x{i}"),
                degree: 1,
            })
            .collect();
        let relations: Vec<Polynomial<K>> = (0..n)
            .map(|i| {
                let mut exps = vec![0u32; n];
                exps[i] = 2;
                Polynomial {
                    terms: vec![Term {
                        coeff: one.clone(),
                        monomial: Monomial(exps),
                    }],
                }
            })
            .collect();
        let caps = (0..n)
            .map(|_| {
                Some(Cap {
                    bound: 2,
                    target: Vec::new(),
                })
            })
            .collect();
        let pres = Presentation {
            field,
            generators,
            relations,
            top_degree: n,
        };
        GradedRing::from_parts(pres, caps, (0..n).collect(), None)
            .expect("exterior presentation is valid")
    }

    /// Reduced cohomology of a wedge of spheres: one class per sphere,
    /// every product of positive-degree classes zero.
    pub fn wedge(degrees: &[usize], field: K) -> GradedRing<K> {
        assert!(!degrees.is_empty());
        assert!(degrees.iter().all(|&d| d >= 1));
        let n = degrees.len();
        let one = field.one();
        let generators = degrees
            .iter()
            .enumerate()
            .map(|(i, &d)| Generator {
                name: format!("g{}", i + 1),
                degree: d,
            })
            .collect();
        let mut relations = Vec::new();
        // squares first (absorbed as caps), then cross products
        for i in 0..n {
            let mut exps = vec![0u32; n];
            exps[i] = 2;
            relations.push(Polynomial {
                terms: vec![Term {
                    coeff: one.clone(),
                    monomial: Monomial(exps),
                }],
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let mut exps = vec![0u32; n];
                exps[i] = 1;
                exps[j] = 1;
                relations.push(Polynomial {
                    terms: vec![Term {
                        coeff: one.clone(),
                        monomial: Monomial(exps),
                    }],
                });
            }
        }
        let caps = (0..n)
            .map(|_| {
                Some(Cap {
                    bound: 2,
                    target: Vec::new(),
                })
            })
            .collect();
        let pres = Presentation {
            field,
            generators,
            relations,
            top_degree: *degrees.iter().max().unwrap(),
        };
        GradedRing::from_parts(pres, caps, (0..n).collect(), None)
            .expect("wedge presentation is valid")
    }

    /// Cohomology ring of the spatial polygon space of a generic,
    /// non-degenerate length vector: generators `R, V1..V_{n-1}` in degree
    /// 2 with the three relation families over the long subsets.
    pub fn polygon(lengths: &LengthVector, field: K) -> Result<GradedRing<K>, RingError> {
        let n = lengths.len();
        if n > MAX_POLYGON_SIZE {
            return Err(RingError::SizeTooLarge {
                n,
                max: MAX_POLYGON_SIZE,
            });
        }
        let flags = vet(lengths);
        if !flags.generic {
            return Err(RingError::NonGenericLength);
        }
        if !flags.nondegenerate {
            return Err(RingError::DegenerateLength);
        }
        let table = classify_subsets(lengths)?;
        let num_gens = n; // R plus V1..V_{n-1}
        let one = field.one();
        let neg_one = field.from_i64(-1);

        let mut generators = vec![Generator {
            name: "R".to_string(),
            degree: 2,
        }];
        for i in 1..n {
            generators.push(Generator {
                name: format!("V{i}"),
                degree: 2,
            });
        }

        let mut relations = Vec::new();
        let mut caps: Vec<Option<Cap<K>>> = vec![None; num_gens];
        let mut cap_indices = BTreeSet::new();

        // family 1: V_i^2 + R V_i, used as rewrite rules V_i^2 -> -R V_i
        for i in 1..n {
            let mut square = vec![0u32; num_gens];
            square[i] = 2;
            let mut rv = vec![0u32; num_gens];
            rv[0] = 1;
            rv[i] = 1;
            cap_indices.insert(relations.len());
            relations.push(Polynomial {
                terms: vec![
                    Term {
                        coeff: one.clone(),
                        monomial: Monomial(square.clone()),
                    },
                    Term {
                        coeff: one.clone(),
                        monomial: Monomial(rv.clone()),
                    },
                ],
            });
            caps[i] = Some(Cap {
                bound: 2,
                target: vec![(neg_one.clone(), Monomial(rv))],
            });
        }

        // family 2: products of V over long subsets containing n, with the
        // product taken over L minus {n} since V_n does not exist. Only
        // inclusion-minimal long subsets are needed; larger ones are
        // monomial multiples.
        let long_with_n = table.long_containing(n);
        let minimal: Vec<SubsetMask> = long_with_n
            .iter()
            .copied()
            .filter(|l| {
                !long_with_n
                    .iter()
                    .any(|l2| l2 != l && l2.is_subset_of(*l))
            })
            .collect();
        for l in minimal {
            let mut exps = vec![0u32; num_gens];
            for i in l.indices() {
                if i != n {
                    exps[i] = 1;
                }
            }
            relations.push(Polynomial {
                terms: vec![Term {
                    coeff: one.clone(),
                    monomial: Monomial(exps),
                }],
            });
        }

        // family 3: for each long subset L avoiding n, the sum over short
        // subsets S of L of (prod_{i in S} V_i) R^{|L - S| - 1}.
        for l in table.long_subsets() {
            if l.contains(n) {
                continue;
            }
            let mut terms = Vec::new();
            let card_l = l.card();
            let mut s = l.0;
            loop {
                let mask = SubsetMask(s);
                if table.is_short(mask) {
                    let mut exps = vec![0u32; num_gens];
                    for i in mask.indices() {
                        exps[i] = 1;
                    }
                    exps[0] = card_l - mask.card() - 1;
                    terms.push(Term {
                        coeff: one.clone(),
                        monomial: Monomial(exps),
                    });
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & l.0;
            }
            if !terms.is_empty() {
                relations.push(Polynomial { terms });
            }
        }

        let pres = Presentation {
            field,
            generators,
            relations,
            top_degree: 2 * (n - 3),
        };
        let ring = GradedRing::from_parts(
            pres,
            caps,
            cap_indices,
            Some(PolygonMeta {
                lengths: lengths.clone(),
            }),
        )?;
        if ring.rank(2 * (n - 3)) != 1 {
            return Err(RingError::Internal(format!(
                "polygon ring top degree has rank {}, expected 1",
                ring.rank(2 * (n - 3))
            )));
        }
        Ok(ring)
    }

    /// Graded tensor product with the Koszul sign rule. Bases are pairs of
    /// factor basis elements; products reduce inside the factors.
    pub fn tensor(
        left: &Arc<GradedRing<K>>,
        right: &Arc<GradedRing<K>>,
    ) -> Result<GradedRing<K>, RingError> {
        if left.field() != right.field() {
            return Err(RingError::FieldMismatch);
        }
        let top = left.top_degree() + right.top_degree();
        let ln = left.pres.generators.len();
        let rn = right.pres.generators.len();
        let mut generators = Vec::with_capacity(ln + rn);
        for g in &left.pres.generators {
            generators.push(Generator {
                name: format!("l.{}", g.name),
                degree: g.degree,
            });
        }
        for g in &right.pres.generators {
            generators.push(Generator {
                name: format!("r.{}", g.name),
                degree: g.degree,
            });
        }
        let mut relations = Vec::new();
        for r in &left.pres.relations {
            relations.push(Polynomial {
                terms: r
                    .terms
                    .iter()
                    .map(|t| {
                        let mut exps = t.monomial.0.clone();
                        exps.extend(std::iter::repeat(0).take(rn));
                        Term {
                            coeff: t.coeff.clone(),
                            monomial: Monomial(exps),
                        }
                    })
                    .collect(),
            });
        }
        for r in &right.pres.relations {
            relations.push(Polynomial {
                terms: r
                    .terms
                    .iter()
                    .map(|t| {
                        let mut exps = vec![0u32; ln];
                        exps.extend_from_slice(&t.monomial.0);
                        Term {
                            coeff: t.coeff.clone(),
                            monomial: Monomial(exps),
                        }
                    })
                    .collect(),
            });
        }
        let pres = Presentation {
            field: left.field().clone(),
            generators,
            relations,
            top_degree: top,
        };

        let mut degrees = Vec::with_capacity(top + 1);
        for d in 0..=top {
            let mut segs = Vec::new();
            let mut offset = 0;
            for ld in 0..=d.min(left.top_degree()) {
                let rd = d - ld;
                if rd > right.top_degree() {
                    continue;
                }
                let lr = left.rank(ld);
                let rr = right.rank(rd);
                if lr == 0 || rr == 0 {
                    continue;
                }
                segs.push(TensorSeg {
                    left_degree: ld,
                    offset,
                    right_rank: rr,
                });
                offset += lr * rr;
            }
            degrees.push(TensorDegree { segs, rank: offset });
        }
        Ok(GradedRing {
            id: NEXT_RING_ID.fetch_add(1, Ordering::Relaxed),
            pres,
            meta: None,
            internals: Internals::Tensor {
                left: Arc::clone(left),
                right: Arc::clone(right),
                degrees,
            },
        })
    }

    /// Builds a ring from a user presentation. Pure-power relations
    /// `c x^k` become truncation caps; everything else goes to the
    /// degreewise linear algebra.
    pub fn from_presentation(pres: Presentation<K>) -> Result<GradedRing<K>, RingError> {
        let n = pres.generators.len();
        let mut caps: Vec<Option<Cap<K>>> = vec![None; n];
        let mut cap_indices = BTreeSet::new();
        for (ri, rel) in pres.relations.iter().enumerate() {
            if rel.terms.len() != 1 {
                continue;
            }
            let mono = &rel.terms[0].monomial;
            if pres.field.is_zero(&rel.terms[0].coeff) {
                continue;
            }
            let nonzero: Vec<usize> = (0..mono.0.len()).filter(|&i| mono.0[i] > 0).collect();
            if nonzero.len() != 1 {
                continue;
            }
            let g = nonzero[0];
            let k = mono.0[g];
            let better = match &caps[g] {
                Some(c) => k < c.bound,
                None => true,
            };
            if better {
                caps[g] = Some(Cap {
                    bound: k,
                    target: Vec::new(),
                });
                cap_indices.insert(ri);
            }
        }
        GradedRing::from_parts(pres, caps, cap_indices, None)
    }
}

// ---------------------------------------------------------------------
// accessors

impl<K: Field> GradedRing<K> {
    pub fn ring_id(&self) -> u64 {
        self.id
    }

    pub fn field(&self) -> &K {
        &self.pres.field
    }

    pub fn presentation(&self) -> &Presentation<K> {
        &self.pres
    }

    pub fn top_degree(&self) -> usize {
        self.pres.top_degree
    }

    pub fn num_generators(&self) -> usize {
        self.pres.generators.len()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.pres.generators.iter().position(|g| g.name == name)
    }

    pub fn gen_degrees(&self) -> Vec<usize> {
        self.pres.generators.iter().map(|g| g.degree).collect()
    }

    pub fn polygon_meta(&self) -> Option<&PolygonMeta> {
        self.meta.as_ref()
    }

    /// Rank of the quotient in the given degree (0 above the top degree).
    pub fn rank(&self, degree: usize) -> usize {
        if degree > self.pres.top_degree {
            return 0;
        }
        match &self.internals {
            Internals::Presented { degrees, .. } => degrees[degree].basis.len(),
            Internals::Tensor { degrees, .. } => degrees[degree].rank,
        }
    }

    pub fn is_even_graded(&self) -> bool {
        self.pres.generators.iter().all(|g| g.degree % 2 == 0)
    }

    pub fn min_generator_degree(&self) -> Option<usize> {
        self.pres.generators.iter().map(|g| g.degree).min()
    }

    /// The basis monomial behind basis slot `i` of the given degree,
    /// expressed over this ring's generators.
    pub fn basis_monomial(&self, degree: usize, i: usize) -> Monomial {
        match &self.internals {
            Internals::Presented { degrees, .. } => {
                let dd = &degrees[degree];
                dd.monomials[dd.basis[i]].clone()
            }
            Internals::Tensor {
                left,
                right,
                degrees,
            } => {
                let (seg, il, ir) = locate_tensor(&degrees[degree], i);
                let lm = left.basis_monomial(seg.left_degree, il);
                let rm = right.basis_monomial(degree - seg.left_degree, ir);
                let mut exps = lm.0;
                exps.extend_from_slice(&rm.0);
                Monomial(exps)
            }
        }
    }
}

fn locate_tensor(td: &TensorDegree, flat: usize) -> (TensorSeg, usize, usize) {
    for (k, seg) in td.segs.iter().enumerate() {
        let size = if k + 1 < td.segs.len() {
            td.segs[k + 1].offset - seg.offset
        } else {
            td.rank - seg.offset
        };
        if flat < seg.offset + size {
            let local = flat - seg.offset;
            return (*seg, local / seg.right_rank, local % seg.right_rank);
        }
    }
    panic!("tensor basis index {flat} out of range");
}

// ---------------------------------------------------------------------
// element arithmetic

impl<K: Field> GradedRing<K> {
    pub fn zero(&self) -> RingElement<K> {
        RingElement {
            ring: self.id,
            comps: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> RingElement<K> {
        debug_assert_eq!(self.rank(0), 1, "degree 0 must be the ground field");
        let mut comps = BTreeMap::new();
        comps.insert(0, vec![self.pres.field.one()]);
        RingElement {
            ring: self.id,
            comps,
        }
    }

    pub fn basis_elem(&self, degree: usize, i: usize) -> RingElement<K> {
        let field = &self.pres.field;
        let mut v = vec![field.zero(); self.rank(degree)];
        v[i] = field.one();
        self.from_component(degree, v)
    }

    pub fn generator_elem(&self, index: usize) -> RingElement<K> {
        match &self.internals {
            Internals::Presented { .. } => {
                let mono = Monomial::generator(self.num_generators(), index);
                let one = self.pres.field.one();
                self.element_from_terms(&[(one, mono)])
            }
            Internals::Tensor { left, right, .. } => {
                let ln = left.num_generators();
                if index < ln {
                    self.embed_left(&left.generator_elem(index))
                        .expect("left element embeds")
                } else {
                    self.embed_right(&right.generator_elem(index - ln))
                        .expect("right element embeds")
                }
            }
        }
    }

    fn from_component(&self, degree: usize, v: Vec<K::Elem>) -> RingElement<K> {
        let field = &self.pres.field;
        let mut comps = BTreeMap::new();
        if v.iter().any(|x| !field.is_zero(x)) {
            comps.insert(degree, v);
        }
        RingElement {
            ring: self.id,
            comps,
        }
    }

    fn check_owned(&self, a: &RingElement<K>) -> Result<(), RingError> {
        if a.ring != self.id {
            Err(RingError::RingMismatch)
        } else {
            Ok(())
        }
    }

    pub fn add(
        &self,
        a: &RingElement<K>,
        b: &RingElement<K>,
    ) -> Result<RingElement<K>, RingError> {
        self.check_owned(a)?;
        self.check_owned(b)?;
        let field = &self.pres.field;
        let mut comps = a.comps.clone();
        for (d, v) in &b.comps {
            match comps.entry(*d) {
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let merged: Vec<K::Elem> = e
                        .get()
                        .iter()
                        .zip(v)
                        .map(|(x, y)| field.add(x, y))
                        .collect();
                    if merged.iter().all(|x| field.is_zero(x)) {
                        e.remove();
                    } else {
                        *e.get_mut() = merged;
                    }
                }
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(v.clone());
                }
            }
        }
        Ok(RingElement {
            ring: self.id,
            comps,
        })
    }

    pub fn neg(&self, a: &RingElement<K>) -> Result<RingElement<K>, RingError> {
        self.check_owned(a)?;
        let field = &self.pres.field;
        Ok(RingElement {
            ring: self.id,
            comps: a
                .comps
                .iter()
                .map(|(d, v)| (*d, v.iter().map(|x| field.neg(x)).collect()))
                .collect(),
        })
    }

    pub fn sub(
        &self,
        a: &RingElement<K>,
        b: &RingElement<K>,
    ) -> Result<RingElement<K>, RingError> {
        let nb = self.neg(b)?;
        self.add(a, &nb)
    }

    pub fn scale(&self, a: &RingElement<K>, c: &K::Elem) -> Result<RingElement<K>, RingError> {
        self.check_owned(a)?;
        let field = &self.pres.field;
        if field.is_zero(c) {
            return Ok(self.zero());
        }
        Ok(RingElement {
            ring: self.id,
            comps: a
                .comps
                .iter()
                .map(|(d, v)| (*d, v.iter().map(|x| field.mul(x, c)).collect()))
                .collect(),
        })
    }

    pub fn scale_i64(&self, a: &RingElement<K>, c: i64) -> Result<RingElement<K>, RingError> {
        let elem = self.pres.field.from_i64(c);
        self.scale(a, &elem)
    }

    pub fn mul(
        &self,
        a: &RingElement<K>,
        b: &RingElement<K>,
    ) -> Result<RingElement<K>, RingError> {
        self.check_owned(a)?;
        self.check_owned(b)?;
        let field = &self.pres.field;
        let top = self.pres.top_degree;
        let mut out: BTreeMap<usize, Vec<K::Elem>> = BTreeMap::new();
        for (&d1, v1) in &a.comps {
            for (&d2, v2) in &b.comps {
                let d = d1 + d2;
                if d > top {
                    continue;
                }
                for (i1, c1) in v1.iter().enumerate() {
                    if field.is_zero(c1) {
                        continue;
                    }
                    for (i2, c2) in v2.iter().enumerate() {
                        if field.is_zero(c2) {
                            continue;
                        }
                        let coords = self.mul_basis_pair(d1, i1, d2, i2);
                        if coords.is_empty() {
                            continue;
                        }
                        let slot = out
                            .entry(d)
                            .or_insert_with(|| vec![field.zero(); self.rank(d)]);
                        let c12 = field.mul(c1, c2);
                        for (j, c) in coords {
                            let delta = field.mul(&c12, &c);
                            slot[j] = field.add(&slot[j], &delta);
                        }
                    }
                }
            }
        }
        out.retain(|_, v| v.iter().any(|x| !field.is_zero(x)));
        Ok(RingElement {
            ring: self.id,
            comps: out,
        })
    }

    pub fn power(&self, a: &RingElement<K>, k: usize) -> Result<RingElement<K>, RingError> {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul(&acc, a)?;
        }
        Ok(acc)
    }

    /// Product of two basis elements as sparse coordinates in degree
    /// `d1 + d2`; empty above the top degree.
    fn mul_basis_pair(
        &self,
        d1: usize,
        i1: usize,
        d2: usize,
        i2: usize,
    ) -> Vec<(usize, K::Elem)> {
        let d = d1 + d2;
        if d > self.pres.top_degree {
            return Vec::new();
        }
        let field = &self.pres.field;
        match &self.internals {
            Internals::Presented {
                caps,
                bounds,
                odd,
                degrees,
                ..
            } => {
                let char_two = field.characteristic() == 2;
                let m1 = &degrees[d1].monomials[degrees[d1].basis[i1]];
                let m2 = &degrees[d2].monomials[degrees[d2].basis[i2]];
                let Some((neg, merged)) = graded_product(m1, m2, odd, char_two) else {
                    return Vec::new();
                };
                let coeff = field.sign_elem(neg);
                let mut acc = HashMap::new();
                normalize_into(field, caps, bounds, odd, char_two, merged, coeff, &mut acc);
                let dd = &degrees[d];
                let mut dense = vec![field.zero(); dd.monomials.len()];
                for (mono, c) in acc {
                    let col = *dd.index.get(&mono).expect("normal monomial is enumerated");
                    dense[col] = field.add(&dense[col], &c);
                }
                dd.echelon.reduce(field, &mut dense);
                dd.basis
                    .iter()
                    .enumerate()
                    .filter(|(_, &col)| !field.is_zero(&dense[col]))
                    .map(|(pos, &col)| (pos, dense[col].clone()))
                    .collect()
            }
            Internals::Tensor {
                left,
                right,
                degrees,
            } => {
                let (seg1, il1, ir1) = locate_tensor(&degrees[d1], i1);
                let (seg2, il2, ir2) = locate_tensor(&degrees[d2], i2);
                let ld1 = seg1.left_degree;
                let rd1 = d1 - ld1;
                let ld2 = seg2.left_degree;
                let rd2 = d2 - ld2;
                // Koszul: the right part of the first factor crosses the
                // left part of the second.
                let negative =
                    field.characteristic() != 2 && (rd1 % 2 == 1) && (ld2 % 2 == 1);
                let left_prod = left.mul_basis_pair(ld1, il1, ld2, il2);
                if left_prod.is_empty() {
                    return Vec::new();
                }
                let right_prod = right.mul_basis_pair(rd1, ir1, rd2, ir2);
                if right_prod.is_empty() {
                    return Vec::new();
                }
                let ld = ld1 + ld2;
                let rd = rd1 + rd2;
                let Some(target_seg) = degrees[d]
                    .segs
                    .iter()
                    .find(|s| s.left_degree == ld)
                    .copied()
                else {
                    return Vec::new();
                };
                debug_assert_eq!(ld + rd, d);
                let sign = field.sign_elem(negative);
                let mut out = Vec::with_capacity(left_prod.len() * right_prod.len());
                for (lj, lc) in &left_prod {
                    for (rj, rc) in &right_prod {
                        let flat = target_seg.offset + lj * target_seg.right_rank + rj;
                        let c = field.mul(&field.mul(lc, rc), &sign);
                        if !field.is_zero(&c) {
                            out.push((flat, c));
                        }
                    }
                }
                out
            }
        }
    }

    /// Builds an element from `(coefficient, monomial)` terms over this
    /// ring's generators, reducing to the quotient bases. Terms above the
    /// top degree vanish.
    pub fn element_from_terms(&self, terms: &[(K::Elem, Monomial)]) -> RingElement<K> {
        let field = self.pres.field.clone();
        let gen_degrees = self.gen_degrees();
        match &self.internals {
            Internals::Presented {
                caps,
                bounds,
                odd,
                degrees,
                ..
            } => {
                let char_two = field.characteristic() == 2;
                let mut per_degree: BTreeMap<usize, HashMap<Monomial, K::Elem>> = BTreeMap::new();
                for (c, m) in terms {
                    let d = m.degree(&gen_degrees);
                    if d > self.pres.top_degree {
                        continue;
                    }
                    normalize_into(
                        &field,
                        caps,
                        bounds,
                        odd,
                        char_two,
                        m.clone(),
                        c.clone(),
                        per_degree.entry(d).or_default(),
                    );
                }
                let mut comps = BTreeMap::new();
                for (d, acc) in per_degree {
                    let dd = &degrees[d];
                    let mut dense = vec![field.zero(); dd.monomials.len()];
                    for (mono, c) in acc {
                        let col = *dd.index.get(&mono).expect("normal monomial is enumerated");
                        dense[col] = field.add(&dense[col], &c);
                    }
                    dd.echelon.reduce(&field, &mut dense);
                    let coords: Vec<K::Elem> =
                        dd.basis.iter().map(|&col| dense[col].clone()).collect();
                    if coords.iter().any(|x| !field.is_zero(x)) {
                        comps.insert(d, coords);
                    }
                }
                RingElement {
                    ring: self.id,
                    comps,
                }
            }
            Internals::Tensor { left, right, .. } => {
                let ln = left.num_generators();
                let mut out = self.zero();
                for (c, m) in terms {
                    let lm = Monomial(m.0[..ln].to_vec());
                    let rm = Monomial(m.0[ln..].to_vec());
                    let le = left.element_from_terms(&[(field.one(), lm)]);
                    let re = right.element_from_terms(&[(c.clone(), rm)]);
                    let pure = self
                        .tensor_pure(&le, &re)
                        .expect("factor elements belong to the factors");
                    out = self.add(&out, &pure).expect("same ring");
                }
                out
            }
        }
    }

    /// `a (x) b` for a tensor ring, with `a` in the left factor and `b`
    /// in the right factor.
    pub fn tensor_pure(
        &self,
        a: &RingElement<K>,
        b: &RingElement<K>,
    ) -> Result<RingElement<K>, RingError> {
        let Internals::Tensor {
            left,
            right,
            degrees,
        } = &self.internals
        else {
            return Err(RingError::Internal(
                "tensor_pure called on a non-tensor ring".to_string(),
            ));
        };
        left.check_owned(a)?;
        right.check_owned(b)?;
        let field = &self.pres.field;
        let mut comps: BTreeMap<usize, Vec<K::Elem>> = BTreeMap::new();
        for (&da, va) in &a.comps {
            for (&db, vb) in &b.comps {
                let d = da + db;
                if d > self.pres.top_degree {
                    continue;
                }
                let Some(seg) = degrees[d]
                    .segs
                    .iter()
                    .find(|s| s.left_degree == da)
                    .copied()
                else {
                    continue;
                };
                let slot = comps
                    .entry(d)
                    .or_insert_with(|| vec![field.zero(); self.rank(d)]);
                for (ia, ca) in va.iter().enumerate() {
                    if field.is_zero(ca) {
                        continue;
                    }
                    for (ib, cb) in vb.iter().enumerate() {
                        if field.is_zero(cb) {
                            continue;
                        }
                        let flat = seg.offset + ia * seg.right_rank + ib;
                        let delta = field.mul(ca, cb);
                        slot[flat] = field.add(&slot[flat], &delta);
                    }
                }
            }
        }
        comps.retain(|_, v| v.iter().any(|x| !field.is_zero(x)));
        Ok(RingElement {
            ring: self.id,
            comps,
        })
    }

    /// `a (x) 1` into a tensor ring.
    pub fn embed_left(&self, a: &RingElement<K>) -> Result<RingElement<K>, RingError> {
        let Internals::Tensor { right, .. } = &self.internals else {
            return Err(RingError::Internal(
                "embed_left called on a non-tensor ring".to_string(),
            ));
        };
        let one = right.one();
        self.tensor_pure(a, &one)
    }

    /// `1 (x) b` into a tensor ring.
    pub fn embed_right(&self, b: &RingElement<K>) -> Result<RingElement<K>, RingError> {
        let Internals::Tensor { left, .. } = &self.internals else {
            return Err(RingError::Internal(
                "embed_right called on a non-tensor ring".to_string(),
            ));
        };
        let one = left.one();
        self.tensor_pure(&one, b)
    }

    /// Tensor factors, when this ring is a tensor product.
    pub fn tensor_factors(&self) -> Option<(&Arc<GradedRing<K>>, &Arc<GradedRing<K>>)> {
        match &self.internals {
            Internals::Tensor { left, right, .. } => Some((left, right)),
            _ => None,
        }
    }

    /// Splits a tensor basis slot into `(left degree, left index, right
    /// index)`.
    pub fn tensor_basis_split(&self, degree: usize, flat: usize) -> Option<(usize, usize, usize)> {
        match &self.internals {
            Internals::Tensor { degrees, .. } => {
                let (seg, il, ir) = locate_tensor(&degrees[degree], flat);
                Some((seg.left_degree, il, ir))
            }
            _ => None,
        }
    }

    /// Human-readable rendering of an element over basis monomials.
    pub fn describe(&self, a: &RingElement<K>) -> String {
        let field = &self.pres.field;
        if a.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (&d, v) in &a.comps {
            for (i, c) in v.iter().enumerate() {
                if field.is_zero(c) {
                    continue;
                }
                let mono = self.basis_monomial(d, i);
                let mono_str = self.describe_monomial(&mono);
                let coeff_str = field.render(c);
                let part = if mono_str.is_empty() {
                    coeff_str
                } else if field.is_one(c) {
                    mono_str
                } else if coeff_str == "-1" {
                    format!("-{mono_str}")
                } else {
                    format!("{coeff_str}*{mono_str}")
                };
                parts.push(part);
            }
        }
        parts.join(" + ")
    }

    fn describe_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = &self.pres.generators[i].name;
            if e == 1 {
                parts.push(name.clone());
            } else {
                parts.push(format!("{name}^{e}"));
            }
        }
        parts.join("*")
    }
}

// ---------------------------------------------------------------------
// homomorphisms

/// Degree-preserving ring homomorphism given by generator images; every
/// source relation is verified to map to zero at construction.
pub struct RingHom<K: Field> {
    source: Arc<GradedRing<K>>,
    target: Arc<GradedRing<K>>,
    images: Vec<RingElement<K>>,
}

impl<K: Field> RingHom<K> {
    pub fn new(
        source: Arc<GradedRing<K>>,
        target: Arc<GradedRing<K>>,
        images: Vec<RingElement<K>>,
    ) -> Result<RingHom<K>, RingError> {
        if source.field() != target.field() {
            return Err(RingError::FieldMismatch);
        }
        if images.len() != source.num_generators() {
            return Err(RingError::InvalidPresentation(format!(
                "expected {} generator images, got {}",
                source.num_generators(),
                images.len()
            )));
        }
        for (g, img) in source.pres.generators.iter().zip(&images) {
            target.check_owned(img)?;
            if !img.is_zero() && img.homogeneous_degree() != Some(g.degree) {
                return Err(RingError::InvalidPresentation(format!(
                    "image of {} is not homogeneous of degree {}",
                    g.name, g.degree
                )));
            }
        }
        let hom = RingHom {
            source,
            target,
            images,
        };
        for (index, rel) in hom.source.pres.relations.iter().enumerate() {
            let image = hom.apply_polynomial(rel)?;
            if !image.is_zero() {
                return Err(RingError::RelationNotPreserved { index });
            }
        }
        Ok(hom)
    }

    pub fn identity(ring: &Arc<GradedRing<K>>) -> RingHom<K> {
        let images = (0..ring.num_generators())
            .map(|i| ring.generator_elem(i))
            .collect();
        RingHom::new(Arc::clone(ring), Arc::clone(ring), images)
            .expect("identity preserves relations")
    }

    pub fn source(&self) -> &Arc<GradedRing<K>> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedRing<K>> {
        &self.target
    }

    pub fn images(&self) -> &[RingElement<K>] {
        &self.images
    }

    fn monomial_image(&self, m: &Monomial) -> Result<RingElement<K>, RingError> {
        let mut acc = self.target.one();
        for (g, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let p = self.target.power(&self.images[g], e as usize)?;
            acc = self.target.mul(&acc, &p)?;
        }
        Ok(acc)
    }

    fn apply_polynomial(&self, p: &Polynomial<K>) -> Result<RingElement<K>, RingError> {
        let mut acc = self.target.zero();
        for t in &p.terms {
            let img = self.monomial_image(&t.monomial)?;
            let scaled = self.target.scale(&img, &t.coeff)?;
            acc = self.target.add(&acc, &scaled)?;
        }
        Ok(acc)
    }

    /// Applies the homomorphism to an element of the source ring.
    pub fn apply(&self, a: &RingElement<K>) -> Result<RingElement<K>, RingError> {
        self.source.check_owned(a)?;
        let field = self.source.field();
        let mut acc = self.target.zero();
        for (&d, v) in &a.comps {
            for (i, c) in v.iter().enumerate() {
                if field.is_zero(c) {
                    continue;
                }
                let mono = self.source.basis_monomial(d, i);
                let img = self.monomial_image(&mono)?;
                let scaled = self.target.scale(&img, c)?;
                acc = self.target.add(&acc, &scaled)?;
            }
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------
// polygon classes

/// Chern class `c_j` of a polygon ring: `R + 2 V_j` for `j < n`, `-R` for
/// `j = n`.
pub fn chern_class<K: Field>(
    ring: &GradedRing<K>,
    j: usize,
) -> Result<RingElement<K>, RingError> {
    let meta = ring
        .polygon_meta()
        .ok_or_else(|| RingError::Internal("chern_class needs a polygon ring".to_string()))?;
    let n = meta.lengths.len();
    if j == 0 || j > n {
        return Err(RingError::IndexOutOfRange { index: j, n });
    }
    let r_idx = ring.generator_index("R").expect("polygon ring has R");
    let r = ring.generator_elem(r_idx);
    if j == n {
        return ring.neg(&r);
    }
    let v_idx = ring
        .generator_index(&format!("V{j}"))
        .expect("polygon ring has V_j");
    let v = ring.generator_elem(v_idx);
    let two_v = ring.scale_i64(&v, 2)?;
    ring.add(&r, &two_v)
}

/// The symplectic class `[w] = sum_i l_i c_i` of a polygon ring, with the
/// length vector scaled by the least common denominator to integers first.
/// Scaling multiplies the class by a positive constant, which cannot
/// change whether any of its powers vanish.
pub fn symplectic_class<K: Field>(ring: &GradedRing<K>) -> Result<RingElement<K>, RingError> {
    if ring.field().characteristic() != 0 {
        return Err(RingError::RequiresRationals);
    }
    let meta = ring
        .polygon_meta()
        .ok_or_else(|| RingError::Internal("symplectic_class needs a polygon ring".to_string()))?;
    let scaled: Vec<BigInt> = meta.lengths.scaled_integers();
    let field = ring.field().clone();
    let mut acc = ring.zero();
    for (i, coeff) in scaled.iter().enumerate() {
        let c = chern_class(ring, i + 1)?;
        let as_rat = BigRational::from_integer(coeff.clone());
        let k = field
            .from_rational(&as_rat)
            .expect("integer maps into characteristic 0");
        let scaled_c = ring.scale(&c, &k)?;
        acc = ring.add(&acc, &scaled_c)?;
    }
    Ok(acc)
}

/// The inclusion-induced homomorphism between polygon rings determined by
/// `c_j -> c_{phi(j)}`, converted to generator images: `R` maps to
/// `-c_{phi(n)}` and `V_j` to `(c_{phi(j)} + c_{phi(n)}) / 2`. Relation
/// preservation is verified by construction.
pub fn polygon_inclusion_hom<K: Field>(
    source: &Arc<GradedRing<K>>,
    target: &Arc<GradedRing<K>>,
    phi: &[usize],
) -> Result<RingHom<K>, RingError> {
    if source.field().characteristic() != 0 {
        return Err(RingError::RequiresRationals);
    }
    let n = source
        .polygon_meta()
        .ok_or_else(|| RingError::Internal("source must be a polygon ring".to_string()))?
        .lengths
        .len();
    let m = target
        .polygon_meta()
        .ok_or_else(|| RingError::Internal("target must be a polygon ring".to_string()))?
        .lengths
        .len();
    if phi.len() != n || phi.iter().any(|&k| k == 0 || k > m) {
        return Err(RingError::InvalidPresentation(
            "phi must assign each of the n edges a part in 1..=m".to_string(),
        ));
    }
    let field = source.field().clone();
    let half = field
        .inv(&field.from_i64(2))
        .expect("characteristic 0 has 1/2");
    let c_phi_n = chern_class(target, phi[n - 1])?;
    let image_r = target.neg(&c_phi_n)?;
    let mut images = vec![image_r];
    for j in 1..n {
        let c_phi_j = chern_class(target, phi[j - 1])?;
        let sum = target.add(&c_phi_j, &c_phi_n)?;
        images.push(target.scale(&sum, &half)?);
    }
    RingHom::new(Arc::clone(source), Arc::clone(target), images)
}

/// Cap-driven rewriting of a monomial into normal monomials, accumulating
/// coefficients. Terminates because each rewrite strictly lowers the total
/// exponent of capped generators.
#[allow(clippy::too_many_arguments)]
fn normalize_into<K: Field>(
    field: &K,
    caps: &[Option<Cap<K>>],
    bounds: &[Option<u32>],
    odd: &[bool],
    char_two: bool,
    mono: Monomial,
    coeff: K::Elem,
    acc: &mut HashMap<Monomial, K::Elem>,
) {
    if field.is_zero(&coeff) {
        return;
    }
    let violating = (0..mono.0.len()).find(|&i| match bounds[i] {
        Some(b) => mono.0[i] >= b,
        None => false,
    });
    let Some(i) = violating else {
        match acc.entry(mono) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                let v = field.add(e.get(), &coeff);
                if field.is_zero(&v) {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
        }
        return;
    };
    let Some(cap) = &caps[i] else {
        // odd-degree square away from characteristic 2: zero
        return;
    };
    if cap.target.is_empty() {
        return;
    }
    let mut rest = mono;
    rest.0[i] -= cap.bound;
    for (tc, tm) in &cap.target {
        if let Some((neg, merged)) = graded_product(tm, &rest, odd, char_two) {
            let mut c = field.mul(&coeff, tc);
            if neg {
                c = field.neg(&c);
            }
            normalize_into(field, caps, bounds, odd, char_two, merged, c, acc);
        }
    }
}

#[cfg(test)]
mod tests;
