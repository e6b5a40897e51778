//! Generic finite group engine: canonical element encoding, closure
//! enumeration from generators, subgroups, conjugation, centers, commutators,
//! cosets, and complements.
//!
//! Every group is reproducible bit-for-bit from its generators: the element
//! table is sorted by the canonical encoding (permutation image arrays, or
//! row-major canonical field values after projective normalization), and every
//! search below walks that order.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::finfield::{FieldError, FiniteField};
use crate::linalg;

/// Default cap on closure size for `enumerate_group`.
pub const DEFAULT_ENUMERATION_CAP: usize = 2_000_000;
/// Dense multiplication table is materialized below this order.
const MUL_TABLE_LIMIT: usize = 4096;
/// `find_complement` refuses groups larger than this.
const COMPLEMENT_CAP: usize = 5000;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("closure exceeded cap of {0} elements")]
    CapExceeded(usize),
    #[error("generators do not share one representation")]
    IncompatibleGenerators,
    #[error("matrix generator is singular")]
    SingularGenerator,
    #[error("invalid permutation: images must be a bijection of the degree")]
    InvalidPermutation,
    #[error("element is not a member of the group")]
    UnknownElement,
    #[error("subgroup members are not closed under multiplication")]
    NotClosed,
    #[error("operation not supported for groups of order {0} (cap {1})")]
    OrderCap(usize, usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// How elements of a group are represented and multiplied.
#[derive(Clone)]
pub enum Representation {
    Permutation {
        degree: usize,
    },
    Matrix {
        field: Arc<FiniteField>,
        dim: usize,
        projective: bool,
    },
}

impl Representation {
    pub fn identity(&self) -> GroupElement {
        match self {
            Representation::Permutation { degree } => GroupElement::Perm((0..*degree as u16).collect()),
            Representation::Matrix { dim, .. } => GroupElement::Matrix(linalg::mat_id(*dim)),
        }
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (self, a, b) {
            (Representation::Permutation { .. }, GroupElement::Perm(pa), GroupElement::Perm(pb)) => {
                // (a*b)(x) = a(b(x))
                GroupElement::Perm(pb.iter().map(|&x| pa[x as usize]).collect())
            }
            (Representation::Matrix { field, dim, projective }, GroupElement::Matrix(ma), GroupElement::Matrix(mb)) => {
                let mut m = linalg::mat_mul(field, *dim, ma, mb);
                if *projective {
                    normalize_projective(field, &mut m);
                }
                GroupElement::Matrix(m)
            }
            _ => unreachable!("mixed element kinds inside one group"),
        }
    }

    pub fn inv(&self, a: &GroupElement) -> GroupElement {
        match (self, a) {
            (Representation::Permutation { .. }, GroupElement::Perm(p)) => {
                let mut out = vec![0u16; p.len()];
                for (i, &img) in p.iter().enumerate() {
                    out[img as usize] = i as u16;
                }
                GroupElement::Perm(out)
            }
            (Representation::Matrix { field, dim, projective }, GroupElement::Matrix(m)) => {
                let mut inv = linalg::mat_inv(field, *dim, m).expect("group elements are invertible");
                if *projective {
                    normalize_projective(field, &mut inv);
                }
                GroupElement::Matrix(inv)
            }
            _ => unreachable!("mixed element kinds inside one group"),
        }
    }

    /// Canonicalize an element: projective matrices are scaled so the first
    /// nonzero entry in row-major order is 1. Identity on everything else.
    pub fn normalize(&self, a: &GroupElement) -> GroupElement {
        match (self, a) {
            (Representation::Matrix { field, projective: true, .. }, GroupElement::Matrix(m)) => {
                let mut m = m.clone();
                normalize_projective(field, &mut m);
                GroupElement::Matrix(m)
            }
            _ => a.clone(),
        }
    }

    pub fn validate(&self, a: &GroupElement) -> Result<(), GroupError> {
        match (self, a) {
            (Representation::Permutation { degree }, GroupElement::Perm(p)) => {
                if p.len() != *degree {
                    return Err(GroupError::IncompatibleGenerators);
                }
                let mut seen = vec![false; *degree];
                for &img in p {
                    let img = img as usize;
                    if img >= *degree || seen[img] {
                        return Err(GroupError::InvalidPermutation);
                    }
                    seen[img] = true;
                }
                Ok(())
            }
            (Representation::Matrix { field, dim, .. }, GroupElement::Matrix(m)) => {
                if m.len() != dim * dim {
                    return Err(GroupError::IncompatibleGenerators);
                }
                if m.iter().any(|&v| v >= field.order()) {
                    return Err(GroupError::Field(FieldError::OutOfRange(
                        *m.iter().find(|&&v| v >= field.order()).unwrap(),
                        field.order(),
                    )));
                }
                if linalg::mat_det(field, *dim, m) == 0 {
                    return Err(GroupError::SingularGenerator);
                }
                Ok(())
            }
            _ => Err(GroupError::IncompatibleGenerators),
        }
    }
}

fn normalize_projective(field: &FiniteField, m: &mut [u64]) {
    if let Some(&first) = m.iter().find(|&&v| v != 0) {
        if first != 1 {
            let inv = field.inv(first).expect("nonzero");
            for v in m.iter_mut() {
                *v = field.mul(*v, inv);
            }
        }
    }
}

/// A group element in canonical encoding. Ordering of the encodings is the
/// canonical element order used by every deterministic search.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Perm(Vec<u16>),
    Matrix(Vec<u64>),
}

/// A fully enumerated finite group with canonical element table.
pub struct Group {
    rep: Representation,
    elements: Vec<GroupElement>,
    index: HashMap<GroupElement, u32>,
    generators: Vec<u32>,
    identity: u32,
    inv_table: Vec<u32>,
    mul_table: Option<Vec<u32>>,
}

/// Index set of a subgroup inside its parent's element table. Always sorted
/// and closed under multiplication and inverse.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subgroup {
    pub members: Vec<u32>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, idx: u32) -> bool {
        self.members.binary_search(&idx).is_ok()
    }
}

impl Group {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn rep(&self) -> &Representation {
        &self.rep
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn element(&self, i: u32) -> &GroupElement {
        &self.elements[i as usize]
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn index_of(&self, e: &GroupElement) -> Option<u32> {
        self.index.get(e).copied()
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if let Some(table) = &self.mul_table {
            return table[a as usize * self.elements.len() + b as usize];
        }
        let prod = self.rep.mul(&self.elements[a as usize], &self.elements[b as usize]);
        self.index[&prod]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inv_table[a as usize]
    }

    /// g^h = h^-1 g h
    pub fn conj(&self, g: u32, h: u32) -> u32 {
        self.mul(self.mul(self.inv(h), g), h)
    }

    /// [g, h] = g^-1 h^-1 g h
    pub fn commutator(&self, g: u32, h: u32) -> u32 {
        self.mul(self.mul(self.inv(g), self.inv(h)), self.mul(g, h))
    }

    pub fn element_order(&self, i: u32) -> u64 {
        let mut n = 1u64;
        let mut cur = i;
        while cur != self.identity {
            cur = self.mul(cur, i);
            n += 1;
        }
        n
    }

    pub fn pow(&self, i: u32, e: u64) -> u32 {
        let mut acc = self.identity;
        for _ in 0..e {
            acc = self.mul(acc, i);
        }
        acc
    }
}

/// Breadth-first closure of a generating set. Deterministic: the element
/// table is sorted canonically after enumeration.
pub fn enumerate_group(rep: Representation, generators: &[GroupElement], cap: usize) -> Result<Group, GroupError> {
    let mut gens: Vec<GroupElement> = Vec::new();
    for g in generators {
        let g = rep.normalize(g);
        rep.validate(&g)?;
        gens.push(g);
    }
    let identity = rep.identity();
    let mut seen: HashMap<GroupElement, ()> = HashMap::new();
    seen.insert(identity.clone(), ());
    let mut frontier = vec![identity];
    while let Some(cur) = frontier.pop() {
        for g in &gens {
            let next = rep.mul(&cur, g);
            if !seen.contains_key(&next) {
                if seen.len() >= cap {
                    return Err(GroupError::CapExceeded(cap));
                }
                seen.insert(next.clone(), ());
                frontier.push(next);
            }
        }
    }
    let mut elements: Vec<GroupElement> = seen.into_keys().collect();
    elements.sort_unstable();
    finish_group(rep, elements, &gens)
}

/// Builds a group from an already-closed element set (e.g. a quotient image).
/// Closure is the caller's responsibility; the index tables will panic on a
/// non-closed set.
pub fn group_from_elements(rep: Representation, mut elements: Vec<GroupElement>, generators: &[GroupElement]) -> Result<Group, GroupError> {
    elements.sort_unstable();
    elements.dedup();
    finish_group(rep, elements, generators)
}

fn finish_group(rep: Representation, elements: Vec<GroupElement>, gens: &[GroupElement]) -> Result<Group, GroupError> {
    let n = elements.len();
    let mut index = HashMap::with_capacity(n);
    for (i, e) in elements.iter().enumerate() {
        index.insert(e.clone(), i as u32);
    }
    let identity = *index.get(&rep.identity()).expect("closure contains identity");
    let mut inv_table = vec![0u32; n];
    for (i, e) in elements.iter().enumerate() {
        inv_table[i] = *index.get(&rep.inv(e)).expect("closure contains inverses");
    }
    let generators = gens
        .iter()
        .map(|g| index.get(g).copied().ok_or(GroupError::UnknownElement))
        .collect::<Result<Vec<_>, _>>()?;
    let mut group = Group {
        rep,
        elements,
        index,
        generators,
        identity,
        inv_table,
        mul_table: None,
    };
    if n <= MUL_TABLE_LIMIT {
        let mut table = vec![0u32; n * n];
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                let prod = group.rep.mul(&group.elements[a as usize], &group.elements[b as usize]);
                table[a as usize * n + b as usize] = group.index[&prod];
            }
        }
        group.mul_table = Some(table);
    }
    Ok(group)
}

/// Smallest closed subset containing the given element indices and the identity.
pub fn subgroup_generate(g: &Group, gens: &[u32]) -> Subgroup {
    let mut in_set = vec![false; g.order()];
    in_set[g.identity() as usize] = true;
    let mut members = vec![g.identity()];
    let mut frontier = vec![g.identity()];
    while let Some(cur) = frontier.pop() {
        for &gen in gens {
            let next = g.mul(cur, gen);
            if !in_set[next as usize] {
                in_set[next as usize] = true;
                members.push(next);
                frontier.push(next);
            }
        }
    }
    members.sort_unstable();
    Subgroup { members }
}

/// Checks closure and wraps a member list as a Subgroup.
pub fn subgroup_from_members(g: &Group, mut members: Vec<u32>) -> Result<Subgroup, GroupError> {
    members.sort_unstable();
    members.dedup();
    let sub = Subgroup { members };
    for &a in &sub.members {
        for &b in &sub.members {
            if !sub.contains(g.mul(a, b)) {
                return Err(GroupError::NotClosed);
            }
        }
    }
    if !sub.contains(g.identity()) {
        return Err(GroupError::NotClosed);
    }
    Ok(sub)
}

/// D = union of all conjugates of H over G, as a sorted index set.
pub fn conjugate_closure(g: &Group, h: &Subgroup) -> Vec<u32> {
    let mut in_set = vec![false; g.order()];
    for conjugator in 0..g.order() as u32 {
        let ci = g.inv(conjugator);
        for &m in &h.members {
            let image = g.mul(g.mul(ci, m), conjugator);
            in_set[image as usize] = true;
        }
    }
    (0..g.order() as u32).filter(|&i| in_set[i as usize]).collect()
}

pub fn center(g: &Group) -> Subgroup {
    // the centralizer of a generating set is the center
    let members: Vec<u32> = (0..g.order() as u32)
        .filter(|&x| g.generators().iter().all(|&gen| g.mul(x, gen) == g.mul(gen, x)))
        .collect();
    Subgroup { members }
}

pub fn commutator_subgroup(g: &Group) -> Subgroup {
    let mut comms: Vec<u32> = Vec::new();
    let mut seen = vec![false; g.order()];
    for a in 0..g.order() as u32 {
        for b in 0..g.order() as u32 {
            let c = g.commutator(a, b);
            if !seen[c as usize] {
                seen[c as usize] = true;
                comms.push(c);
            }
        }
    }
    subgroup_generate(g, &comms)
}

/// Is S a left translate of some conjugate of H?
///
/// Pick the canonically-first s0 in S; K = s0^-1 S is a coset of a conjugate
/// containing the identity, hence must be the conjugate subgroup itself.
pub fn is_coset_of_conjugate(g: &Group, s: &[u32], h: &Subgroup) -> bool {
    if s.is_empty() || s.len() != h.order() {
        return false;
    }
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() != h.order() {
        return false;
    }
    let s0inv = g.inv(s[0]);
    let mut k: Vec<u32> = s.iter().map(|&x| g.mul(s0inv, x)).collect();
    k.sort_unstable();
    let ksub = Subgroup { members: k };
    // closure check
    for &a in &ksub.members {
        for &b in &ksub.members {
            if !ksub.contains(g.mul(a, b)) {
                return false;
            }
        }
    }
    // conjugacy check by exhaustive conjugator search
    for conjugator in 0..g.order() as u32 {
        let ci = g.inv(conjugator);
        let mut image: Vec<u32> = h.members.iter().map(|&m| g.mul(g.mul(ci, m), conjugator)).collect();
        image.sort_unstable();
        if image == ksub.members {
            return true;
        }
    }
    false
}

/// First complement of H found scanning subgroups generated by increasing
/// generator tuples in canonical order, or None when no complement exists.
pub fn find_complement(g: &Group, h: &Subgroup) -> Result<Option<Subgroup>, GroupError> {
    if g.order() > COMPLEMENT_CAP {
        return Err(GroupError::OrderCap(g.order(), COMPLEMENT_CAP));
    }
    let target = g.order() / h.order();
    let trivial = Subgroup { members: vec![g.identity()] };
    if target == 1 {
        return Ok(Some(trivial));
    }
    fn intersects_only_trivially(g: &Group, k: &Subgroup, h: &Subgroup) -> bool {
        k.members.iter().all(|&m| m == g.identity() || !h.contains(m))
    }
    fn search(g: &Group, h: &Subgroup, current: &Subgroup, min_next: u32, target: usize) -> Option<Subgroup> {
        if current.order() == target {
            return Some(current.clone());
        }
        for e in min_next..g.order() as u32 {
            if current.contains(e) {
                continue;
            }
            let mut gens: Vec<u32> = current.members.clone();
            gens.push(e);
            let k = subgroup_generate(g, &gens);
            if k.order() > target || target % k.order() != 0 {
                continue;
            }
            if !intersects_only_trivially(g, &k, h) {
                continue;
            }
            if let Some(found) = search(g, h, &k, e + 1, target) {
                return Some(found);
            }
        }
        None
    }
    Ok(search(g, h, &trivial, 0, target))
}

/// Left coset representatives: identity coset first, the rest in canonical
/// element order of their minimal member.
pub fn left_cosets(g: &Group, h: &Subgroup) -> Vec<u32> {
    let mut assigned = vec![false; g.order()];
    let mut reps = vec![g.identity()];
    for &m in &h.members {
        assigned[m as usize] = true;
    }
    for e in 0..g.order() as u32 {
        if assigned[e as usize] {
            continue;
        }
        reps.push(e);
        for &m in &h.members {
            assigned[g.mul(e, m) as usize] = true;
        }
    }
    reps
}

/// The permutation image of G acting by left translation on the left cosets
/// of a normal subgroup N, i.e. a concrete model of the quotient G/N.
/// Returns the quotient group and the index map G -> G/N.
pub fn coset_permutation_image(g: &Group, n: &Subgroup) -> Result<(Group, Vec<u32>), GroupError> {
    let reps = left_cosets(g, n);
    let npoints = reps.len();
    let mut point_of = vec![u32::MAX; g.order()];
    for (pt, &r) in reps.iter().enumerate() {
        for &m in &n.members {
            point_of[g.mul(r, m) as usize] = pt as u32;
        }
    }
    let perm_of = |x: u32| -> GroupElement {
        let images: Vec<u16> = reps.iter().map(|&r| point_of[g.mul(x, r) as usize] as u16).collect();
        GroupElement::Perm(images)
    };
    let mut elements: Vec<GroupElement> = (0..g.order() as u32).map(perm_of).collect();
    elements.sort_unstable();
    elements.dedup();
    let rep = Representation::Permutation { degree: npoints };
    let gens: Vec<GroupElement> = g.generators().iter().map(|&i| perm_of(i)).collect();
    let quotient = group_from_elements(rep, elements, &gens)?;
    let map: Vec<u32> = (0..g.order() as u32)
        .map(|x| quotient.index_of(&perm_of(x)).expect("image in quotient"))
        .collect();
    Ok((quotient, map))
}

pub fn is_normal(g: &Group, h: &Subgroup) -> bool {
    g.generators()
        .iter()
        .all(|&gen| h.members.iter().all(|&m| h.contains(g.conj(m, gen))))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn s3() -> Group {
        let rep = Representation::Permutation { degree: 3 };
        let gens = vec![GroupElement::Perm(vec![1, 0, 2]), GroupElement::Perm(vec![1, 2, 0])];
        enumerate_group(rep, &gens, DEFAULT_ENUMERATION_CAP).unwrap()
    }

    #[test]
    fn s3_enumeration() {
        let g = s3();
        assert_eq!(g.order(), 6);
        assert_eq!(g.element(g.identity()), &GroupElement::Perm(vec![0, 1, 2]));
    }

    #[test]
    fn associativity_small_groups() {
        let g = s3();
        let n = g.order() as u32;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                }
            }
        }
    }

    #[test]
    fn subgroup_generate_cases() {
        let g = s3();
        let trivial = subgroup_generate(&g, &[]);
        assert_eq!(trivial.members, vec![g.identity()]);
        // a transposition generates an order-2 subgroup
        let t = g.index_of(&GroupElement::Perm(vec![1, 0, 2])).unwrap();
        let sub = subgroup_generate(&g, &[t]);
        assert_eq!(sub.order(), 2);
    }

    #[test]
    fn conjugate_closure_s3_transposition() {
        let g = s3();
        let t = g.index_of(&GroupElement::Perm(vec![1, 0, 2])).unwrap();
        let h = subgroup_generate(&g, &[t]);
        let d = conjugate_closure(&g, &h);
        // identity plus the three transpositions
        assert_eq!(d.len(), 4);
        assert!(d.contains(&g.identity()));
    }

    #[test]
    fn conjugate_closure_normal_subgroup_is_itself() {
        let g = s3();
        let c3 = g.index_of(&GroupElement::Perm(vec![1, 2, 0])).unwrap();
        let h = subgroup_generate(&g, &[c3]);
        assert!(is_normal(&g, &h));
        assert_eq!(conjugate_closure(&g, &h), h.members);
    }

    #[test]
    fn center_and_commutator() {
        let g = s3();
        assert_eq!(center(&g).order(), 1);
        let derived = commutator_subgroup(&g);
        assert_eq!(derived.order(), 3); // A3
    }

    #[test]
    fn coset_of_conjugate_checks() {
        let g = s3();
        let t = g.index_of(&GroupElement::Perm(vec![1, 0, 2])).unwrap();
        let h = subgroup_generate(&g, &[t]);
        assert!(is_coset_of_conjugate(&g, &h.members, &h));
        // a random translate
        let c3 = g.index_of(&GroupElement::Perm(vec![1, 2, 0])).unwrap();
        let coset: Vec<u32> = h.members.iter().map(|&m| g.mul(c3, m)).collect();
        assert!(is_coset_of_conjugate(&g, &coset, &h));
        // identity plus a 3-cycle is not a coset of a conjugate of H
        assert!(!is_coset_of_conjugate(&g, &[g.identity(), c3], &h));
    }

    #[test]
    fn complement_of_a3_in_s3() {
        let g = s3();
        let c3 = g.index_of(&GroupElement::Perm(vec![1, 2, 0])).unwrap();
        let a3 = subgroup_generate(&g, &[c3]);
        let k = find_complement(&g, &a3).unwrap().unwrap();
        assert_eq!(k.order(), 2);
        // trivial cases
        let whole = subgroup_generate(&g, &(0..6).collect::<Vec<_>>());
        assert_eq!(find_complement(&g, &whole).unwrap().unwrap().order(), 1);
        let trivial = subgroup_generate(&g, &[]);
        assert_eq!(find_complement(&g, &trivial).unwrap().unwrap().order(), 6);
    }

    #[test]
    fn left_cosets_partition() {
        let g = s3();
        let t = g.index_of(&GroupElement::Perm(vec![1, 0, 2])).unwrap();
        let h = subgroup_generate(&g, &[t]);
        let reps = left_cosets(&g, &h);
        assert_eq!(reps.len(), 3);
        assert_eq!(reps[0], g.identity());
        let mut all: Vec<u32> = reps
            .iter()
            .flat_map(|&r| h.members.iter().map(move |&m| (r, m)))
            .map(|(r, m)| g.mul(r, m))
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..6).collect::<Vec<u32>>());
    }

    #[test]
    fn quotient_image_s3_by_a3() {
        let g = s3();
        let c3 = g.index_of(&GroupElement::Perm(vec![1, 2, 0])).unwrap();
        let a3 = subgroup_generate(&g, &[c3]);
        let (q, map) = coset_permutation_image(&g, &a3).unwrap();
        assert_eq!(q.order(), 2);
        assert_eq!(map.len(), 6);
    }

    #[test]
    fn projective_normalization_well_defined() {
        use crate::finfield::FiniteField;
        let f5 = FiniteField::new(5, 1).unwrap();
        let rep = Representation::Matrix { field: Arc::clone(&f5), dim: 2, projective: true };
        let a = GroupElement::Matrix(vec![1, 2, 3, 4]);
        let b = GroupElement::Matrix(vec![0, 1, 4, 2]);
        let base = rep.mul(&rep.normalize(&a), &rep.normalize(&b));
        for sa in 1..5u64 {
            for sb in 1..5u64 {
                let scale = |m: &GroupElement, s: u64| match m {
                    GroupElement::Matrix(v) => GroupElement::Matrix(v.iter().map(|&x| f5.mul(x, s)).collect()),
                    _ => unreachable!(),
                };
                let prod = rep.mul(&rep.normalize(&scale(&a, sa)), &rep.normalize(&scale(&b, sb)));
                assert_eq!(prod, base);
                // idempotent
                assert_eq!(rep.normalize(&prod), prod);
            }
        }
    }
}
