//! JSON forms for ring presentations, elements, and homomorphisms.
//!
//! A presentation document looks like
//! `{"field": "Q", "generators": [{"name": "x", "degree": 1}],
//!   "relations": [[{"coeff": "1", "monomial": {"x": 4}}]],
//!   "top_degree": 3}`
//! and elements/homomorphism images reuse the relation term-list shape.
//! Errors carry a JSON pointer to the offending node.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::scalar::{parse_rational, Field, FieldSpec, Rational};

use super::monomial::Monomial;
use super::{Generator, GradedRing, Polynomial, Presentation, RingElement, RingError, RingHom, Term};

/// Presentation with rational coefficients, before a field is chosen.
#[derive(Clone, Debug)]
pub struct UntypedPresentation {
    pub field: FieldSpec,
    pub generators: Vec<Generator>,
    pub relations: Vec<Vec<(Rational, BTreeMap<String, u32>)>>,
    pub top_degree: usize,
}

impl UntypedPresentation {
    /// Resolves generator names and maps coefficients into the field.
    pub fn into_typed<K: Field>(&self, field: K) -> Result<Presentation<K>, RingError> {
        let mut relations = Vec::with_capacity(self.relations.len());
        for (ri, rel) in self.relations.iter().enumerate() {
            let mut terms = Vec::with_capacity(rel.len());
            for (ti, (coeff, named)) in rel.iter().enumerate() {
                let pointer = format!("/relations/{ri}/{ti}");
                let c = field.from_rational(coeff).ok_or_else(|| RingError::Schema {
                    pointer: format!("{pointer}/coeff"),
                    message: format!("coefficient {coeff} is not valid in {}", field.spec()),
                })?;
                let mono = named_monomial(&self.generators, named, &pointer)?;
                terms.push(Term {
                    coeff: c,
                    monomial: mono,
                });
            }
            relations.push(Polynomial { terms });
        }
        Ok(Presentation {
            field,
            generators: self.generators.clone(),
            relations,
            top_degree: self.top_degree,
        })
    }
}

fn named_monomial(
    generators: &[Generator],
    named: &BTreeMap<String, u32>,
    pointer: &str,
) -> Result<Monomial, RingError> {
    let mut exps = vec![0u32; generators.len()];
    for (name, &e) in named {
        let idx = generators
            .iter()
            .position(|g| &g.name == name)
            .ok_or_else(|| RingError::Schema {
                pointer: format!("{pointer}/monomial/{name}"),
                message: format!("unknown generator {name}"),
            })?;
        exps[idx] = e;
    }
    Ok(Monomial(exps))
}

fn expect_str<'v>(v: &'v Value, pointer: &str) -> Result<&'v str, RingError> {
    v.as_str().ok_or_else(|| RingError::Schema {
        pointer: pointer.to_string(),
        message: "expected a string".to_string(),
    })
}

fn expect_u64(v: &Value, pointer: &str) -> Result<u64, RingError> {
    v.as_u64().ok_or_else(|| RingError::Schema {
        pointer: pointer.to_string(),
        message: "expected a non-negative integer".to_string(),
    })
}

fn expect_array<'v>(v: &'v Value, pointer: &str) -> Result<&'v Vec<Value>, RingError> {
    v.as_array().ok_or_else(|| RingError::Schema {
        pointer: pointer.to_string(),
        message: "expected an array".to_string(),
    })
}

fn expect_object<'v>(v: &'v Value, pointer: &str) -> Result<&'v Map<String, Value>, RingError> {
    v.as_object().ok_or_else(|| RingError::Schema {
        pointer: pointer.to_string(),
        message: "expected an object".to_string(),
    })
}

fn get<'v>(obj: &'v Map<String, Value>, key: &str, pointer: &str) -> Result<&'v Value, RingError> {
    obj.get(key).ok_or_else(|| RingError::Schema {
        pointer: format!("{pointer}/{key}"),
        message: "missing field".to_string(),
    })
}

/// Parses a presentation document.
pub fn presentation_from_json(v: &Value) -> Result<UntypedPresentation, RingError> {
    let obj = expect_object(v, "")?;
    let field_str = expect_str(get(obj, "field", "")?, "/field")?;
    let field = FieldSpec::parse(field_str).ok_or_else(|| RingError::Schema {
        pointer: "/field".to_string(),
        message: format!("unknown field {field_str}"),
    })?;
    let gens_val = expect_array(get(obj, "generators", "")?, "/generators")?;
    let mut generators = Vec::with_capacity(gens_val.len());
    for (i, g) in gens_val.iter().enumerate() {
        let pointer = format!("/generators/{i}");
        let gobj = expect_object(g, &pointer)?;
        let name = expect_str(get(gobj, "name", &pointer)?, &format!("{pointer}/name"))?;
        let degree = expect_u64(get(gobj, "degree", &pointer)?, &format!("{pointer}/degree"))?;
        if degree == 0 {
            return Err(RingError::Schema {
                pointer: format!("{pointer}/degree"),
                message: "generator degree must be positive".to_string(),
            });
        }
        generators.push(Generator {
            name: name.to_string(),
            degree: degree as usize,
        });
    }
    let rels_val = expect_array(get(obj, "relations", "")?, "/relations")?;
    let mut relations = Vec::with_capacity(rels_val.len());
    for (ri, rel) in rels_val.iter().enumerate() {
        let pointer = format!("/relations/{ri}");
        let terms_val = expect_array(rel, &pointer)?;
        let mut terms = Vec::with_capacity(terms_val.len());
        for (ti, term) in terms_val.iter().enumerate() {
            let tp = format!("{pointer}/{ti}");
            terms.push(parse_term(term, &tp)?);
        }
        relations.push(terms);
    }
    let top_degree = expect_u64(get(obj, "top_degree", "")?, "/top_degree")? as usize;
    Ok(UntypedPresentation {
        field,
        generators,
        relations,
        top_degree,
    })
}

fn parse_term(v: &Value, pointer: &str) -> Result<(Rational, BTreeMap<String, u32>), RingError> {
    let obj = expect_object(v, pointer)?;
    let coeff_str = expect_str(get(obj, "coeff", pointer)?, &format!("{pointer}/coeff"))?;
    let coeff = parse_rational(coeff_str).ok_or_else(|| RingError::Schema {
        pointer: format!("{pointer}/coeff"),
        message: format!("cannot parse rational `{coeff_str}`"),
    })?;
    let mono_val = expect_object(
        get(obj, "monomial", pointer)?,
        &format!("{pointer}/monomial"),
    )?;
    let mut named = BTreeMap::new();
    for (name, e) in mono_val {
        let exp = expect_u64(e, &format!("{pointer}/monomial/{name}"))?;
        named.insert(name.clone(), exp as u32);
    }
    Ok((coeff, named))
}

/// Serializes a ring's presentation back to the document form.
pub fn presentation_to_json<K: Field>(ring: &GradedRing<K>) -> Value {
    let pres = ring.presentation();
    let field = &pres.field;
    let generators: Vec<Value> = pres
        .generators
        .iter()
        .map(|g| json!({"name": g.name, "degree": g.degree}))
        .collect();
    let relations: Vec<Value> = pres
        .relations
        .iter()
        .map(|rel| {
            Value::Array(
                rel.terms
                    .iter()
                    .map(|t| term_to_json(field, &pres.generators, &t.coeff, &t.monomial))
                    .collect(),
            )
        })
        .collect();
    json!({
        "field": field.spec().to_string(),
        "generators": generators,
        "relations": relations,
        "top_degree": pres.top_degree,
    })
}

fn term_to_json<K: Field>(
    field: &K,
    generators: &[Generator],
    coeff: &K::Elem,
    mono: &Monomial,
) -> Value {
    let mut named = Map::new();
    for (i, &e) in mono.0.iter().enumerate() {
        if e > 0 {
            named.insert(generators[i].name.clone(), json!(e));
        }
    }
    json!({"coeff": field.render(coeff), "monomial": Value::Object(named)})
}

/// Element as a term list over the ring's basis monomials.
pub fn element_to_json<K: Field>(ring: &GradedRing<K>, a: &RingElement<K>) -> Value {
    let field = ring.field();
    let mut terms = Vec::new();
    for &d in a.degrees().iter() {
        let v = a.component(d).expect("listed degree is present");
        for (i, c) in v.iter().enumerate() {
            if field.is_zero(c) {
                continue;
            }
            let mono = ring.basis_monomial(d, i);
            terms.push(term_to_json(
                field,
                &ring.presentation().generators,
                c,
                &mono,
            ));
        }
    }
    Value::Array(terms)
}

/// Parses a term list into an element of `ring`.
pub fn element_from_json<K: Field>(
    ring: &GradedRing<K>,
    v: &Value,
    pointer: &str,
) -> Result<RingElement<K>, RingError> {
    let arr = expect_array(v, pointer)?;
    let field = ring.field();
    let mut terms = Vec::with_capacity(arr.len());
    for (ti, term) in arr.iter().enumerate() {
        let tp = format!("{pointer}/{ti}");
        let (coeff, named) = parse_term(term, &tp)?;
        let c = field.from_rational(&coeff).ok_or_else(|| RingError::Schema {
            pointer: format!("{tp}/coeff"),
            message: format!("coefficient {coeff} is not valid in {}", field.spec()),
        })?;
        let mono = named_monomial(&ring.presentation().generators, &named, &tp)?;
        terms.push((c, mono));
    }
    Ok(ring.element_from_terms(&terms))
}

/// Parses `{"images": {generator: term-list}}` into a verified hom.
pub fn hom_from_json<K: Field>(
    source: &Arc<GradedRing<K>>,
    target: &Arc<GradedRing<K>>,
    v: &Value,
) -> Result<RingHom<K>, RingError> {
    let obj = expect_object(v, "")?;
    let images_val = expect_object(get(obj, "images", "")?, "/images")?;
    let mut images = Vec::with_capacity(source.num_generators());
    for g in &source.presentation().generators {
        let pointer = format!("/images/{}", g.name);
        let img_val = images_val.get(&g.name).ok_or_else(|| RingError::Schema {
            pointer: pointer.clone(),
            message: "missing generator image".to_string(),
        })?;
        images.push(element_from_json(target, img_val, &pointer)?);
    }
    RingHom::new(Arc::clone(source), Arc::clone(target), images)
}

/// Serializes a hom as generator images.
pub fn hom_to_json<K: Field>(hom: &RingHom<K>) -> Value {
    let mut images = Map::new();
    for (g, img) in hom
        .source()
        .presentation()
        .generators
        .iter()
        .zip(hom.images())
    {
        images.insert(g.name.clone(), element_to_json(hom.target(), img));
    }
    json!({ "images": Value::Object(images) })
}
