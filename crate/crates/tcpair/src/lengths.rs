//! Exact combinatorics of length vectors: short/long classification of
//! index subsets, genericity and non-degeneracy checks, ordering, and
//! edge identification along an ordered set partition.
//!
//! All comparisons are exact: entries are rationals, scaled once to a
//! common-denominator integer vector, and subset sums are compared as
//! integers. Floating point never enters this module.

use std::collections::HashSet;
use std::fmt;

use num::{BigInt, Integer, One, Signed, Zero};
use thiserror::Error;

use crate::scalar::{parse_rational, Rational};

/// Hard cap on full subset enumeration: 2^24 masks.
pub const MAX_ENUM_SIZE: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LengthError {
    #[error("length vector has {n} entries; subset enumeration is capped at n <= {max}")]
    SizeTooLarge { n: usize, max: usize },
    #[error("length vector needs at least 3 entries, got {0}")]
    TooShort(usize),
    #[error("length entries must be positive")]
    NonPositiveEntry,
    #[error("invalid partition: {0}")]
    BadPartition(String),
    #[error("edge identification needs at least 3 parts, got {0}")]
    TooFewParts(usize),
    #[error("cannot parse length vector: {0}")]
    Parse(String),
}

/// Positive rational edge lengths of a spatial polygon, `n >= 3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthVector {
    entries: Vec<Rational>,
}

impl LengthVector {
    pub fn new(entries: Vec<Rational>) -> Result<LengthVector, LengthError> {
        if entries.len() < 3 {
            return Err(LengthError::TooShort(entries.len()));
        }
        if entries.iter().any(|e| !e.is_positive()) {
            return Err(LengthError::NonPositiveEntry);
        }
        Ok(LengthVector { entries })
    }

    /// Parses comma-separated rational literals, e.g. `1,1,2,3,5,7` or
    /// `1/2,3/2,1`.
    pub fn parse(s: &str) -> Result<LengthVector, LengthError> {
        let entries = s
            .split(',')
            .map(|tok| parse_rational(tok).ok_or_else(|| LengthError::Parse(tok.trim().to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        LengthVector::new(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &Rational {
        &self.entries[i]
    }

    /// Entries scaled by the least common denominator to integers.
    pub fn scaled_integers(&self) -> Vec<BigInt> {
        let lcm = self
            .entries
            .iter()
            .fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
        self.entries
            .iter()
            .map(|e| e.numer() * (&lcm / e.denom()))
            .collect()
    }
}

impl fmt::Display for LengthVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Index subset of `[n]` as a bitmask; bit `i-1` carries index `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub fn empty() -> SubsetMask {
        SubsetMask(0)
    }

    pub fn full(n: usize) -> SubsetMask {
        SubsetMask(((1u64 << n) - 1) as u32)
    }

    /// Builds a mask from 1-based indices.
    pub fn from_indices(indices: &[usize]) -> SubsetMask {
        let mut bits = 0u32;
        for &i in indices {
            bits |= 1 << (i - 1);
        }
        SubsetMask(bits)
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0 >> (index - 1) & 1 == 1
    }

    pub fn complement(&self, n: usize) -> SubsetMask {
        SubsetMask(!self.0 & SubsetMask::full(n).0)
    }

    pub fn card(&self) -> u32 {
        self.0.count_ones()
    }

    /// 1-based member indices in increasing order.
    pub fn indices(&self) -> Vec<usize> {
        (1..=32).filter(|&i| self.contains(i)).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(&self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Classification of a subset sum against its complement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetClass {
    Short,
    Long,
    Balanced,
}

/// Full short/long classification of every subset of `[n]`.
pub struct ShortLongTable {
    n: usize,
    class: Vec<SubsetClass>,
}

impl ShortLongTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn class_of(&self, s: SubsetMask) -> SubsetClass {
        self.class[s.0 as usize]
    }

    pub fn is_short(&self, s: SubsetMask) -> bool {
        self.class_of(s) == SubsetClass::Short
    }

    pub fn is_long(&self, s: SubsetMask) -> bool {
        self.class_of(s) == SubsetClass::Long
    }

    pub fn has_balanced(&self) -> bool {
        self.class.iter().any(|c| *c == SubsetClass::Balanced)
    }

    /// The family `S_i`: short subsets containing index `i` (1-based).
    pub fn short_containing(&self, i: usize) -> Vec<SubsetMask> {
        self.masks_with(i, SubsetClass::Short)
    }

    /// The family `L_i`: long subsets containing index `i` (1-based).
    pub fn long_containing(&self, i: usize) -> Vec<SubsetMask> {
        self.masks_with(i, SubsetClass::Long)
    }

    /// All long subsets.
    pub fn long_subsets(&self) -> Vec<SubsetMask> {
        (0..self.class.len() as u32)
            .map(SubsetMask)
            .filter(|m| self.is_long(*m))
            .collect()
    }

    fn masks_with(&self, i: usize, class: SubsetClass) -> Vec<SubsetMask> {
        (0..self.class.len() as u32)
            .map(SubsetMask)
            .filter(|m| m.contains(i) && self.class_of(*m) == class)
            .collect()
    }
}

/// Classifies every subset of `[n]` by exact comparison of its length sum
/// against the complement's. Enumeration is over all `2^n` masks in Gray
/// order, so each step updates the running sum by one entry.
pub fn classify_subsets(lengths: &LengthVector) -> Result<ShortLongTable, LengthError> {
    let n = lengths.len();
    if n > MAX_ENUM_SIZE {
        return Err(LengthError::SizeTooLarge { n, max: MAX_ENUM_SIZE });
    }
    let scaled = lengths.scaled_integers();
    let class = match to_i128(&scaled) {
        Some(small) => classify_gray_i128(&small),
        None => classify_gray_big(&scaled),
    };
    Ok(ShortLongTable { n, class })
}

fn to_i128(values: &[BigInt]) -> Option<Vec<i128>> {
    // Leave headroom so the total of <= 24 entries cannot overflow.
    let cap = i128::MAX / 64;
    values
        .iter()
        .map(|v| {
            let as_i128 = i128::try_from(v).ok()?;
            (as_i128.abs() < cap).then_some(as_i128)
        })
        .collect()
}

fn classify_gray_i128(scaled: &[i128]) -> Vec<SubsetClass> {
    let n = scaled.len();
    let total: i128 = scaled.iter().sum();
    let mut class = vec![SubsetClass::Short; 1 << n];
    let mut sum: i128 = 0;
    let mut gray: u32 = 0;
    class[0] = SubsetClass::Short; // empty sum 0 < total
    for step in 1u32..(1u32 << n) {
        let bit = step.trailing_zeros();
        let next = gray ^ (1 << bit);
        if next & (1 << bit) != 0 {
            sum += scaled[bit as usize];
        } else {
            sum -= scaled[bit as usize];
        }
        gray = next;
        class[gray as usize] = match (2 * sum).cmp(&total) {
            std::cmp::Ordering::Less => SubsetClass::Short,
            std::cmp::Ordering::Greater => SubsetClass::Long,
            std::cmp::Ordering::Equal => SubsetClass::Balanced,
        };
    }
    class
}

fn classify_gray_big(scaled: &[BigInt]) -> Vec<SubsetClass> {
    let n = scaled.len();
    let total: BigInt = scaled.iter().sum();
    let mut class = vec![SubsetClass::Short; 1 << n];
    let mut sum = BigInt::zero();
    let mut gray: u32 = 0;
    for step in 1u32..(1u32 << n) {
        let bit = step.trailing_zeros();
        let next = gray ^ (1 << bit);
        if next & (1 << bit) != 0 {
            sum += &scaled[bit as usize];
        } else {
            sum -= &scaled[bit as usize];
        }
        gray = next;
        let doubled: BigInt = &sum * 2;
        class[gray as usize] = match doubled.cmp(&total) {
            std::cmp::Ordering::Less => SubsetClass::Short,
            std::cmp::Ordering::Greater => SubsetClass::Long,
            std::cmp::Ordering::Equal => SubsetClass::Balanced,
        };
    }
    class
}

/// Result of vetting a length vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Vetting {
    /// No subset sum equals its complement's sum.
    pub generic: bool,
    /// No single edge is at least as long as all the others together.
    pub nondegenerate: bool,
    /// Entries are weakly increasing.
    pub ordered: bool,
}

/// Checks genericity, non-degeneracy, and ordering.
///
/// Genericity is decided by meet-in-the-middle over the two index halves,
/// so it does not require the full `2^n` table and works past the
/// enumeration cap.
pub fn vet(lengths: &LengthVector) -> Vetting {
    let scaled = lengths.scaled_integers();
    let total: BigInt = scaled.iter().sum();
    let nondegenerate = scaled.iter().all(|e| e * 2 < total);
    let ordered = lengths
        .entries()
        .windows(2)
        .all(|w| w[0] <= w[1]);
    let generic = !has_balanced_subset(&scaled, &total);
    Vetting {
        generic,
        nondegenerate,
        ordered,
    }
}

fn has_balanced_subset(scaled: &[BigInt], total: &BigInt) -> bool {
    if (total % 2u32) != BigInt::zero() {
        return false;
    }
    let target = total / 2u32;
    let (left, right) = scaled.split_at(scaled.len() / 2);
    let left_sums = subset_sums(left);
    let right_sums: HashSet<BigInt> = subset_sums(right).into_iter().collect();
    left_sums
        .iter()
        .any(|s| right_sums.contains(&(&target - s)))
}

fn subset_sums(values: &[BigInt]) -> Vec<BigInt> {
    let mut sums = vec![BigInt::zero()];
    for v in values {
        let mut with: Vec<BigInt> = sums.iter().map(|s| s + v).collect();
        sums.append(&mut with);
    }
    sums
}

/// Sorts entries weakly increasing; `perm[original] = sorted position`.
pub fn sort_ordered(lengths: &LengthVector) -> (LengthVector, Vec<usize>) {
    let n = lengths.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lengths.entry(a).cmp(lengths.entry(b)).then(a.cmp(&b)));
    let sorted = LengthVector {
        entries: order.iter().map(|&i| lengths.entry(i).clone()).collect(),
    };
    let mut perm = vec![0usize; n];
    for (pos, &orig) in order.iter().enumerate() {
        perm[orig] = pos;
    }
    (sorted, perm)
}

/// Ordered set partition of `[n]` into disjoint nonempty parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedSetPartition {
    n: usize,
    parts: Vec<SubsetMask>,
}

impl OrderedSetPartition {
    pub fn new(n: usize, parts: Vec<SubsetMask>) -> Result<OrderedSetPartition, LengthError> {
        let mut seen = SubsetMask::empty();
        for (k, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(LengthError::BadPartition(format!("part {} is empty", k + 1)));
            }
            if !part.is_subset_of(SubsetMask::full(n)) {
                return Err(LengthError::BadPartition(format!(
                    "part {} has an index outside 1..={n}",
                    k + 1
                )));
            }
            if seen.0 & part.0 != 0 {
                return Err(LengthError::BadPartition(format!(
                    "part {} overlaps an earlier part",
                    k + 1
                )));
            }
            seen = SubsetMask(seen.0 | part.0);
        }
        if seen != SubsetMask::full(n) {
            return Err(LengthError::BadPartition(format!(
                "parts do not cover all of 1..={n}"
            )));
        }
        Ok(OrderedSetPartition { n, parts })
    }

    /// Parses pipe-separated 1-based index groups, e.g. `1|3|4|2,5|6`.
    pub fn parse(n: usize, s: &str) -> Result<OrderedSetPartition, LengthError> {
        let mut parts = Vec::new();
        for group in s.split('|') {
            let mut indices = Vec::new();
            for tok in group.split(',') {
                let i: usize = tok
                    .trim()
                    .parse()
                    .map_err(|_| LengthError::BadPartition(format!("bad index `{}`", tok.trim())))?;
                if i == 0 || i > n {
                    return Err(LengthError::BadPartition(format!(
                        "index {i} outside 1..={n}"
                    )));
                }
                indices.push(i);
            }
            parts.push(SubsetMask::from_indices(&indices));
        }
        OrderedSetPartition::new(n, parts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[SubsetMask] {
        &self.parts
    }

    /// `phi(i) = k` iff index `i` lies in part `k` (both 1-based).
    pub fn phi(&self, i: usize) -> usize {
        self.parts
            .iter()
            .position(|p| p.contains(i))
            .map(|k| k + 1)
            .expect("partition covers [n]")
    }
}

impl fmt::Display for OrderedSetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let groups: Vec<String> = self
            .parts
            .iter()
            .map(|p| {
                p.indices()
                    .iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "{}", groups.join("|"))
    }
}

/// Outcome of identifying edges along a partition.
#[derive(Clone, Debug)]
pub struct EdgeIdentified {
    pub lengths: LengthVector,
    /// `phi[i-1]` is the 1-based part index of original edge `i`.
    pub phi: Vec<usize>,
    pub generic: bool,
    pub nondegenerate: bool,
}

/// Merges edges along the partition: entry `k` of the result is the exact
/// sum of the original entries in part `k`. Genericity of the input passes
/// to the output because every subset sum of the merged vector is a subset
/// sum of the original.
pub fn edge_identify(
    lengths: &LengthVector,
    partition: &OrderedSetPartition,
) -> Result<EdgeIdentified, LengthError> {
    let n = lengths.len();
    if partition.n() != n {
        return Err(LengthError::BadPartition(format!(
            "partition is over [{}], lengths have {} entries",
            partition.n(),
            n
        )));
    }
    let m = partition.num_parts();
    if m < 3 {
        return Err(LengthError::TooFewParts(m));
    }
    let entries: Vec<Rational> = partition
        .parts()
        .iter()
        .map(|part| {
            part.indices()
                .iter()
                .map(|&i| lengths.entry(i - 1).clone())
                .fold(Rational::zero(), |acc, e| acc + e)
        })
        .collect();
    let merged = LengthVector::new(entries)?;
    let flags = vet(&merged);
    if vet(lengths).generic {
        assert!(
            flags.generic,
            "edge identification must preserve genericity"
        );
    }
    let phi = (1..=n).map(|i| partition.phi(i)).collect();
    Ok(EdgeIdentified {
        lengths: merged,
        phi,
        generic: flags.generic,
        nondegenerate: flags.nondegenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(s: &str) -> LengthVector {
        LengthVector::parse(s).unwrap()
    }

    #[test]
    fn balanced_example() {
        // {1,3} is neither short nor long for (1,1,2,2).
        let table = classify_subsets(&lv("1,1,2,2")).unwrap();
        assert_eq!(
            table.class_of(SubsetMask::from_indices(&[1, 3])),
            SubsetClass::Balanced
        );
        assert!(!vet(&lv("1,1,2,2")).generic);
    }

    #[test]
    fn classify_1_1_1_2() {
        let table = classify_subsets(&lv("1,1,1,2")).unwrap();
        assert_eq!(
            table.class_of(SubsetMask::from_indices(&[4])),
            SubsetClass::Short
        );
        assert_eq!(
            table.class_of(SubsetMask::from_indices(&[1, 4])),
            SubsetClass::Long
        );
    }

    #[test]
    fn empty_short_full_long() {
        for s in ["1,1,1,2", "1,1,2,3,5,7", "1/2,3/2,1"] {
            let v = lv(s);
            let table = classify_subsets(&v).unwrap();
            assert_eq!(table.class_of(SubsetMask::empty()), SubsetClass::Short);
            assert_eq!(
                table.class_of(SubsetMask::full(v.len())),
                SubsetClass::Long
            );
        }
    }

    #[test]
    fn vet_examples() {
        let v = vet(&lv("1,1,2,3,5,7"));
        assert!(v.generic && v.nondegenerate && v.ordered);
        let w = vet(&lv("1,1,7,10"));
        assert!(!w.nondegenerate);
    }

    #[test]
    fn sort_examples() {
        let (sorted, perm) = sort_ordered(&lv("2,1,1"));
        assert_eq!(sorted, lv("1,1,2"));
        assert_eq!(perm, vec![2, 0, 1]);
        let (same, id) = sort_ordered(&lv("4,7,8"));
        assert_eq!(same, lv("4,7,8"));
        assert_eq!(id, vec![0, 1, 2]);
    }

    #[test]
    fn edge_identify_examples() {
        let l = lv("1,1,2,3,5,7");
        let p1 = OrderedSetPartition::parse(6, "1|3|4|2,5|6").unwrap();
        let out = edge_identify(&l, &p1).unwrap();
        assert_eq!(out.lengths, lv("1,2,3,6,7"));
        assert!(out.generic && out.nondegenerate);
        assert_eq!(out.phi, vec![1, 4, 2, 3, 4, 5]);

        let p2 = OrderedSetPartition::parse(6, "1|2|4|5|3,6").unwrap();
        assert_eq!(edge_identify(&l, &p2).unwrap().lengths, lv("1,1,3,5,9"));

        let p4 = OrderedSetPartition::parse(6, "1|2|6|3,4,5").unwrap();
        let out4 = edge_identify(&l, &p4).unwrap();
        assert_eq!(out4.lengths, lv("1,1,7,10"));
        assert!(!out4.nondegenerate);
    }

    #[test]
    fn edge_identify_rejects() {
        let l = lv("1,1,2,3,5,7");
        assert!(matches!(
            OrderedSetPartition::parse(6, "1|2|3"),
            Err(LengthError::BadPartition(_))
        ));
        let coarse = OrderedSetPartition::parse(6, "1,2,3|4,5,6").unwrap();
        assert!(matches!(
            edge_identify(&l, &coarse),
            Err(LengthError::TooFewParts(2))
        ));
    }

    #[test]
    fn classify_rejects_large() {
        let entries = vec![Rational::one(); 25];
        let v = LengthVector::new(entries).unwrap();
        assert!(matches!(
            classify_subsets(&v),
            Err(LengthError::SizeTooLarge { .. })
        ));
    }
}
