//! Constructive certificates: explicit element sets that witness a weak or
//! strong EKR failure (or an independent set forcing the bound), packaged
//! with enough context to replay and verify the claim from scratch.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::build_coset_action;
use crate::catalog::{
    suzuki_field, suzuki_k, suzuki_parts, suzuki_tau, suzuki_theta, suzuki_theta_inv, suzuki_v,
    CatalogError, NamedGroup,
};
use crate::ekrgraph::{build_graph, EkrError};
use crate::finfield::{is_prime, ExtensionField, FieldError, FiniteField};
use crate::groupcore::{
    is_coset_of_conjugate, subgroup_from_members, subgroup_generate, Group, GroupElement,
    GroupError, Representation,
};
use crate::lattice::minimal_generators;
use crate::linalg::{charpoly, mat_det, mat_id, mat_inv, mat_is_unipotent, mat_mul};
use crate::spec::{build_group, element_spec, resolve_element, ElementSpec, GroupSpec, SpecError};

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Ekr(#[from] EkrError),
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("certificate claim failed: {0}")]
    Claim(String),
}

fn claim(msg: impl Into<String>) -> WitnessError {
    WitnessError::Claim(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// `elements` is an intersecting set strictly larger than the stabilizer.
    WeakFailure,
    /// `elements` is a maximum intersecting set that is not a coset of a
    /// conjugate of the stabilizer.
    StrongFailure,
    /// `elements` is an independent set whose size matches the index, which
    /// by the clique-coclique bound forces weak EKR for the action.
    IndependentSet,
    /// `elements` is a maximum intersecting set that IS a stabilizer coset.
    StrongSuccessSupport,
}

/// A self-contained, replayable claim about one coset action.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub kind: WitnessKind,
    pub group: GroupSpec,
    /// Generators of the stabilizer subgroup H.
    pub subgroup: Vec<ElementSpec>,
    /// The witness set S (or T for independent sets).
    pub elements: Vec<ElementSpec>,
    pub set_size: usize,
    pub stabilizer_size: usize,
    pub index: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, serde_json::Value>,
}

/// Rebuild everything from the certificate and verify the claim end to end.
pub fn replay(cert: &WitnessCertificate) -> Result<(), WitnessError> {
    let group = Arc::new(build_group(&cert.group)?);
    let gens: Vec<u32> = cert
        .subgroup
        .iter()
        .map(|e| resolve_element(&group, e))
        .collect::<Result<_, _>>()?;
    let h = subgroup_generate(&group, &gens);
    if h.order() != cert.stabilizer_size {
        return Err(claim(format!(
            "stabilizer has order {}, certificate claims {}",
            h.order(),
            cert.stabilizer_size
        )));
    }
    if group.order() / h.order() != cert.index {
        return Err(claim(format!(
            "index is {}, certificate claims {}",
            group.order() / h.order(),
            cert.index
        )));
    }
    let mut set: Vec<u32> = cert
        .elements
        .iter()
        .map(|e| resolve_element(&group, e))
        .collect::<Result<_, _>>()?;
    set.sort_unstable();
    set.dedup();
    if set.len() != cert.set_size || cert.elements.len() != cert.set_size {
        return Err(claim(format!(
            "witness set has {} distinct elements, certificate claims {}",
            set.len(),
            cert.set_size
        )));
    }
    let action = Arc::new(build_coset_action(Arc::clone(&group), h.clone())?);
    match cert.kind {
        WitnessKind::WeakFailure => {
            if !action.is_intersecting(&set) {
                return Err(claim("set is not intersecting"));
            }
            if set.len() <= h.order() {
                return Err(claim("set does not exceed the stabilizer size"));
            }
        }
        WitnessKind::StrongFailure => {
            if !action.is_intersecting(&set) {
                return Err(claim("set is not intersecting"));
            }
            if set.len() != h.order() {
                return Err(claim("set is not a maximum intersecting set"));
            }
            if is_coset_of_conjugate(&group, &set, &h) {
                return Err(claim("set is a stabilizer coset after all"));
            }
        }
        WitnessKind::IndependentSet => {
            let graph = build_graph(Arc::clone(&action));
            if !graph.verify_independent(&set) {
                return Err(claim("set is not independent"));
            }
            if set.len() != cert.index {
                return Err(claim("independent set does not reach the index"));
            }
            // tripwire: stabilizer is a clique, so the bound must be tight
            if !graph.clique_coclique_check(&h.members, &set)? {
                return Err(claim("clique-coclique bound violated"));
            }
        }
        WitnessKind::StrongSuccessSupport => {
            if !action.is_intersecting(&set) {
                return Err(claim("set is not intersecting"));
            }
            if set.len() != h.order() || !is_coset_of_conjugate(&group, &set, &h) {
                return Err(claim("set is not a stabilizer coset"));
            }
        }
    }
    // optional conjugator list: pairs [element, conjugator] with
    // conjugator^-1 * element * conjugator inside the stabilizer
    if let Some(value) = cert.extra.get("conjugators") {
        let pairs: Vec<(ElementSpec, ElementSpec)> =
            serde_json::from_value(value.clone()).map_err(|e| claim(format!("bad conjugators: {e}")))?;
        for (elem, by) in &pairs {
            let v = resolve_element(&group, elem)?;
            let g = resolve_element(&group, by)?;
            if !h.contains(group.conj(v, g)) {
                return Err(claim("recorded conjugator does not move the element into H"));
            }
        }
    }
    Ok(())
}

fn named(group: NamedGroup) -> GroupSpec {
    GroupSpec::Named { group }
}

fn split_prime_power(q: u64) -> Result<(u64, u32), WitnessError> {
    if q < 2 {
        return Err(WitnessError::Unsupported(format!("{q} is not a prime power")));
    }
    let p = (2..=q).find(|d| q % d == 0).unwrap();
    let mut v = q;
    let mut k = 0;
    while v % p == 0 {
        v /= p;
        k += 1;
    }
    if v != 1 {
        return Err(WitnessError::Unsupported(format!("{q} is not a prime power")));
    }
    Ok((p, k))
}

fn mat2(a: u64, b: u64, c: u64, d: u64) -> ElementSpec {
    ElementSpec::Matrix(vec![vec![a, b], vec![c, d]])
}

fn unitriangular3(x: u64, z: u64) -> ElementSpec {
    ElementSpec::Matrix(vec![vec![1, x, z], vec![0, 1, 0], vec![0, 0, 1]])
}

/// The parabola {eta(x, 0, x^2)} in the Heisenberg group of order p^3: a
/// maximum intersecting set for G/<eta(1,0,0)> that is not a subgroup coset.
pub fn heisenberg_witness(p: u64) -> Result<WitnessCertificate, WitnessError> {
    if !is_prime(p) || p == 2 || p > 13 {
        return Err(WitnessError::Unsupported(format!("p = {p}: need an odd prime <= 13")));
    }
    let eta = |x: u64, y: u64, z: u64| ElementSpec::Matrix(vec![vec![1, x, z], vec![0, 1, y], vec![0, 0, 1]]);
    let elements: Vec<ElementSpec> = (0..p).map(|x| eta(x, 0, x * x % p)).collect();
    let cert = WitnessCertificate {
        kind: WitnessKind::StrongFailure,
        group: named(NamedGroup::Heisenberg { p }),
        subgroup: vec![eta(1, 0, 0)],
        elements,
        set_size: p as usize,
        stabilizer_size: p as usize,
        index: (p * p) as usize,
        extra: BTreeMap::new(),
    };
    replay(&cert)?;
    Ok(cert)
}

/// Oversized intersecting sets of unitriangular matrices in PGL_n(F_q):
/// for n = 2 the pair is (entries over the prime field, entries over F_q),
/// for n = 3 it is (one corner entry, two corner entries).
pub fn pgl_unipotent_witness(n: usize, q: u64) -> Result<WitnessCertificate, WitnessError> {
    let (p, k) = split_prime_power(q)?;
    let field = FiniteField::new(p, k)?;
    let (subgroup, elements, stabilizer_size): (Vec<ElementSpec>, Vec<ElementSpec>, usize) = match n {
        2 => {
            if k < 2 {
                return Err(WitnessError::Unsupported(format!(
                    "q = {q} is prime; the n = 2 construction needs a proper prime power"
                )));
            }
            let subgroup = vec![mat2(1, 1, 0, 1)];
            let elements = (0..q).map(|x| mat2(1, x, 0, 1)).collect();
            (subgroup, elements, p as usize)
        }
        3 => {
            // generators I + zeta^t * e12 span all x in F_q additively
            let mut subgroup = Vec::new();
            let mut z = 1u64;
            for _ in 0..k {
                subgroup.push(unitriangular3(z, 0));
                z = field.mul(z, field.zeta());
            }
            let mut elements = Vec::new();
            for x in 0..q {
                for zc in 0..q {
                    elements.push(unitriangular3(x, zc));
                }
            }
            (subgroup, elements, q as usize)
        }
        _ => return Err(WitnessError::Unsupported(format!("n = {n}: only 2 and 3 are built"))),
    };
    let group_order = pgl_order(n, q);
    let set_size = elements.len();
    let cert = WitnessCertificate {
        kind: WitnessKind::WeakFailure,
        group: named(NamedGroup::Pgl { n, q }),
        subgroup,
        elements,
        set_size,
        stabilizer_size,
        index: group_order / stabilizer_size,
        extra: BTreeMap::new(),
    };
    replay(&cert)?;
    Ok(cert)
}

fn gl_order(n: usize, q: u64) -> usize {
    let qn = q.pow(n as u32);
    (0..n as u32).map(|i| (qn - q.pow(i)) as usize).product()
}

fn pgl_order(n: usize, q: u64) -> usize {
    gl_order(n, q) / (q - 1) as usize
}

/// Oversized intersecting sets in SL_2(F_q), dispatched on the arithmetic of
/// q. The stabilizer always contains the center, so the failure descends to
/// PSL_2(F_q) through the quotient action.
pub fn psl2_witness(q: u64) -> Result<WitnessCertificate, WitnessError> {
    if q < 3 {
        return Err(WitnessError::Unsupported(format!("q = {q}: need q >= 3")));
    }
    let (p, k) = split_prime_power(q)?;
    let field = FiniteField::new(p, k)?;
    let neg1 = field.neg(1);
    let (case, subgroup, elements): (u64, Vec<ElementSpec>, Vec<ElementSpec>) = if p == 2 {
        // case 3: q = 2^l > 2; J = [[0,1],[1,0]] has order 2.
        // B = [[d,c],[c,d]] with c^2 + d^2 = 1, c outside {0,1}.
        let j = mat2(0, 1, 1, 0);
        let c = field.zeta();
        let d = field.pow(field.add(1, field.mul(c, c)), q / 2); // sqrt in char 2
        let b = mat2(d, c, c, d);
        (3, vec![j.clone()], vec![mat2(1, 0, 0, 1), j, b])
    } else if field.is_square(neg1) {
        // case 2: the diagonal torus T of order q-1, plus J
        let z = field.zeta();
        let zi = field.inv(z).expect("zeta nonzero");
        let torus_gen = mat2(z, 0, 0, zi);
        let mut elements: Vec<ElementSpec> = (1..q)
            .map(|_| mat2(0, 0, 0, 0))
            .collect();
        let mut t = 1u64;
        for e in elements.iter_mut() {
            *e = mat2(t, 0, 0, field.inv(t).expect("nonzero"));
            t = field.mul(t, z);
        }
        elements.push(mat2(0, neg1, 1, 0));
        (2, vec![torus_gen], elements)
    } else {
        // case 1: H = <J> of order 4; B from a solution of c^2 + d^2 = -1
        let j = mat2(0, neg1, 1, 0);
        let (c0, d0) = field.sum_of_two_squares(neg1);
        let b = mat2(field.neg(d0), c0, c0, d0);
        let minus = |m: &ElementSpec| match m {
            ElementSpec::Matrix(rows) => ElementSpec::Matrix(
                rows.iter().map(|r| r.iter().map(|&v| field.neg(v)).collect()).collect(),
            ),
            ElementSpec::Perm(_) => unreachable!(),
        };
        let i2 = mat2(1, 0, 0, 1);
        let elements = vec![i2.clone(), minus(&i2), j.clone(), minus(&j), b];
        (1, vec![j], elements)
    };
    let stabilizer_size = match case {
        1 => 4,
        2 => (q - 1) as usize,
        _ => 2,
    };
    let sl2_order = gl_order(2, q) / (q - 1) as usize;
    let set_size = elements.len();
    let mut extra = BTreeMap::new();
    extra.insert("case".into(), serde_json::json!(case));
    extra.insert(
        "descends_to_psl2".into(),
        serde_json::json!("the center of SL2 lies in the stabilizer, so the failure passes to the quotient"),
    );
    let cert = WitnessCertificate {
        kind: WitnessKind::WeakFailure,
        group: named(NamedGroup::Sl { n: 2, q }),
        subgroup,
        elements,
        set_size,
        stabilizer_size,
        index: sl2_order / stabilizer_size,
        extra,
    };
    replay(&cert)?;
    Ok(cert)
}

/// Weak failure for PSL_3(F_3): the two-parameter unitriangular set V is
/// covered by conjugates of the one-parameter set U, with every conjugator
/// of determinant 1. PSL_3(F_3) has trivial center, so SL_3(F_3) realizes it
/// faithfully and the stored conjugators are honest determinant-1 matrices.
pub fn psl3_f3_witness() -> Result<WitnessCertificate, WitnessError> {
    let group = Arc::new(build_group(&named(NamedGroup::Sl { n: 3, q: 3 }))?);
    let u_gen = resolve_element(&group, &unitriangular3(1, 0))?;
    let u = subgroup_generate(&group, &[u_gen]);
    let mut elements = Vec::new();
    let mut conjugators: Vec<(ElementSpec, ElementSpec)> = Vec::new();
    for x in 0..3u64 {
        for z in 0..3u64 {
            let spec = unitriangular3(x, z);
            let v = resolve_element(&group, &spec)?;
            // search a determinant-1 conjugator in canonical order
            let by = (0..group.order() as u32)
                .find(|&g| u.contains(group.conj(v, g)))
                .ok_or_else(|| claim(format!("no conjugator found for x={x}, z={z}")))?;
            conjugators.push((spec.clone(), element_spec(&group, by)));
            elements.push(spec);
        }
    }
    let mut extra = BTreeMap::new();
    extra.insert("conjugators".into(), serde_json::to_value(&conjugators).expect("serializable"));
    extra.insert(
        "group_note".into(),
        serde_json::json!("psl3(f3) has trivial center and equals sl3(f3)"),
    );
    let cert = WitnessCertificate {
        kind: WitnessKind::WeakFailure,
        group: named(NamedGroup::Sl { n: 3, q: 3 }),
        subgroup: vec![unitriangular3(1, 0)],
        elements,
        set_size: 9,
        stabilizer_size: 3,
        index: group.order() / 3,
        extra,
    };
    replay(&cert)?;
    Ok(cert)
}

/// Weak failure for Sz(8): the full lower unitriangular subgroup B (order
/// q^2) is intersecting for the action on Sz(q)/B0 with |B0| = 2q, because
/// every v(alpha, beta) conjugates into B0 by the torus element
/// k((alpha^(theta^-1))^-1).
pub fn suzuki_witness(n: u32) -> Result<WitnessCertificate, WitnessError> {
    if n != 1 {
        return Err(WitnessError::Unsupported(format!(
            "n = {n}: only q = 8 is enumerated; use suzuki_identity_checks for larger q"
        )));
    }
    let field = suzuki_field(n)?;
    let q = field.order();
    let parts = suzuki_parts(n)?;
    let group = &parts.group;
    if parts.b.order() != (q * q) as usize || parts.b0.order() != (2 * q) as usize {
        return Err(claim("B or B0 has the wrong order"));
    }
    // B is exactly the union of the H-conjugates of B0
    let mut union: BTreeSet<u32> = BTreeSet::new();
    for &h in &parts.h.members {
        for &b in &parts.b0.members {
            union.insert(group.conj(b, h));
        }
    }
    if union.into_iter().collect::<Vec<u32>>() != parts.b.members {
        return Err(claim("union of H-conjugates of B0 is not B"));
    }
    // per-element conjugator from the displayed formula
    let mut conjugators: Vec<(ElementSpec, ElementSpec)> = Vec::new();
    for alpha in 1..q {
        let gamma = field.inv(suzuki_theta_inv(&field, n, alpha)).expect("nonzero");
        let k_idx = group.index_of(&suzuki_k(&field, n, gamma)).expect("torus element");
        for beta in 0..q {
            let v_idx = group.index_of(&suzuki_v(&field, n, alpha, beta)).expect("in B");
            if !parts.b0.contains(group.conj(v_idx, k_idx)) {
                return Err(claim(format!("gamma formula fails for alpha={alpha}, beta={beta}")));
            }
            conjugators.push((element_spec(group, v_idx), element_spec(group, k_idx)));
        }
    }
    let subgroup = minimal_generators(group, &parts.b0.members)
        .iter()
        .map(|&g| element_spec(group, g))
        .collect();
    let elements: Vec<ElementSpec> = parts.b.members.iter().map(|&g| element_spec(group, g)).collect();
    let mut extra = BTreeMap::new();
    extra.insert("conjugators".into(), serde_json::to_value(&conjugators).expect("serializable"));
    let cert = WitnessCertificate {
        kind: WitnessKind::WeakFailure,
        group: named(NamedGroup::Suzuki { n }),
        subgroup,
        elements,
        set_size: (q * q) as usize,
        stabilizer_size: (2 * q) as usize,
        index: group.order() / (2 * q) as usize,
        extra,
    };
    replay(&cert)?;
    Ok(cert)
}

/// Verify the two product identities of the Suzuki matrix realization for
/// every choice of parameters, by raw 4x4 matrix arithmetic. Works for any
/// n with 2^(2n+1) <= 2^16, independently of group enumeration.
pub fn suzuki_identity_checks(n: u32) -> Result<bool, WitnessError> {
    let field = suzuki_field(n)?;
    let q = field.order();
    let flat = |e: GroupElement| match e {
        GroupElement::Matrix(m) => m,
        GroupElement::Perm(_) => unreachable!(),
    };
    let vs: Vec<Vec<Vec<u64>>> = (0..q)
        .map(|a| (0..q).map(|b| flat(suzuki_v(&field, n, a, b))).collect())
        .collect();
    // v(a1,b1) v(a2,b2) = v(a1+a2, b1+b2+a1*a2^theta)
    for a1 in 0..q {
        for b1 in 0..q {
            let left_row = &vs[a1 as usize];
            for a2 in 0..q {
                let t = suzuki_theta(&field, n, a2);
                let a3 = field.add(a1, a2);
                for b2 in 0..q {
                    let prod = mat_mul(&field, 4, &left_row[b1 as usize], &vs[a2 as usize][b2 as usize]);
                    let b3 = field.add(field.add(b1, b2), field.mul(a1, t));
                    if prod != vs[a3 as usize][b3 as usize] {
                        return Ok(false);
                    }
                }
            }
        }
    }
    // k(g)^-1 v(a,b) k(g) = v(a g^theta, b g^2 g^theta)
    for gamma in 1..q {
        let k = flat(suzuki_k(&field, n, gamma));
        let kinv = mat_inv(&field, 4, &k).expect("torus element invertible");
        let gt = suzuki_theta(&field, n, gamma);
        let g2gt = field.mul(field.mul(gamma, gamma), gt);
        for a in 0..q {
            for b in 0..q {
                let conj = mat_mul(&field, 4, &mat_mul(&field, 4, &kinv, &vs[a as usize][b as usize]), &k);
                if conj != vs[field.mul(a, gt) as usize][field.mul(b, g2gt) as usize] {
                    return Ok(false);
                }
            }
        }
    }
    // tau is an involution
    let tau = flat(suzuki_tau());
    Ok(mat_mul(&field, 4, &tau, &tau) == mat_id(4))
}

/// Weak failure for A_n, n >= 6: the Klein four-group on {1,2,3,4,5,6} is
/// intersecting for the action on cosets of {1, (12)(34)}.
pub fn alternating_witness(n: usize) -> Result<WitnessCertificate, WitnessError> {
    if !(6..=8).contains(&n) {
        return Err(WitnessError::Unsupported(format!(
            "n = {n}: need 6 <= n <= 8 (n = 5 is covered by the psl2 route)"
        )));
    }
    let perm = |swaps: &[(usize, usize)]| {
        let mut images: Vec<u16> = (0..n as u16).collect();
        for &(a, b) in swaps {
            images.swap(a, b);
        }
        ElementSpec::Perm(images)
    };
    let a = perm(&[(0, 1), (2, 3)]);
    let b = perm(&[(0, 1), (4, 5)]);
    let c = perm(&[(2, 3), (4, 5)]);
    let half_factorial: usize = (1..=n).product::<usize>() / 2;
    let cert = WitnessCertificate {
        kind: WitnessKind::WeakFailure,
        group: named(NamedGroup::Alternating { n }),
        subgroup: vec![a.clone()],
        elements: vec![ElementSpec::Perm((0..n as u16).collect()), a, b, c],
        set_size: 4,
        stabilizer_size: 2,
        index: half_factorial / 2,
        extra: BTreeMap::new(),
    };
    replay(&cert)?;
    Ok(cert)
}

/// The multiplication-by-x matrix of an extension field element, projectively
/// normalized to match the group's canonical encoding.
fn phi(group: &Group, ext: &ExtensionField, x: u64) -> GroupElement {
    group.rep().normalize(&GroupElement::Matrix(ext.mult_matrix(x)))
}

/// Stabilizer of the projective point [e1]: matrices whose first column is a
/// multiple of e1.
fn projective_point_stabilizer(group: &Arc<Group>, n: usize) -> Result<Vec<u32>, WitnessError> {
    let members: Vec<u32> = (0..group.order() as u32)
        .filter(|&g| match group.element(g) {
            GroupElement::Matrix(m) => (1..n).all(|i| m[i * n] == 0),
            GroupElement::Perm(_) => false,
        })
        .collect();
    Ok(members)
}

fn independent_set_certificate(
    group_spec: GroupSpec,
    group: Arc<Group>,
    n: usize,
    points: Vec<u64>,
    ext: &ExtensionField,
    mut extra: BTreeMap<String, serde_json::Value>,
) -> Result<WitnessCertificate, WitnessError> {
    let m = points.len();
    let members = projective_point_stabilizer(&group, n)?;
    let stab = subgroup_from_members(&group, members)?;
    if group.order() / stab.order() != m {
        return Err(claim(format!(
            "projective action has index {}, expected {m}",
            group.order() / stab.order()
        )));
    }
    let mut elements = Vec::with_capacity(m);
    let mut seen = BTreeSet::new();
    for &x in &points {
        let e = phi(&group, ext, x);
        let idx = group.index_of(&e).ok_or_else(|| claim("multiplication matrix not in group"))?;
        if !seen.insert(idx) {
            return Err(claim("projectivized powers collide"));
        }
        elements.push(element_spec(&group, idx));
    }
    let subgroup = minimal_generators(&group, &stab.members)
        .iter()
        .map(|&g| element_spec(&group, g))
        .collect();
    extra.insert("independent_set_size".into(), serde_json::json!(m));
    let cert = WitnessCertificate {
        kind: WitnessKind::IndependentSet,
        group: group_spec,
        subgroup,
        elements,
        set_size: m,
        stabilizer_size: stab.order(),
        index: m,
        extra,
    };
    replay(&cert)?;
    Ok(cert)
}

/// The powers of a generator of GF(q^n)*, pushed through multiplication
/// matrices into PGL_n(F_q): an independent set of size m = (q^n-1)/(q-1),
/// which equals the number of projective points, so the clique-coclique
/// bound pins the maximum intersecting set at the stabilizer order.
pub fn pgl_independent_set(n: usize, q: u64) -> Result<WitnessCertificate, WitnessError> {
    if n < 2 {
        return Err(WitnessError::Unsupported("n must be at least 2".into()));
    }
    let (p, k) = split_prime_power(q)?;
    let base = FiniteField::new(p, k)?;
    let ext = ExtensionField::new(base, n as u32)?;
    let m = ((ext.order() - 1) / (q - 1)) as usize;
    let zeta = ext.zeta();
    let points: Vec<u64> = (0..m as u64).map(|j| ext.pow(zeta, j)).collect();
    let group = Arc::new(build_group(&named(NamedGroup::Pgl { n, q }))?);
    independent_set_certificate(named(NamedGroup::Pgl { n, q }), group, n, points, &ext, BTreeMap::new())
}

/// The psl variant: powers of zeta^(q-1), whose multiplication matrices have
/// determinant 1 before projectivization. Requires gcd(n, q-1) = 1 so that
/// PSL_n(F_q) is the full projective image.
pub fn psl_independent_set(n: usize, q: u64) -> Result<WitnessCertificate, WitnessError> {
    if n < 2 {
        return Err(WitnessError::Unsupported("n must be at least 2".into()));
    }
    if gcd(n as u64, q - 1) != 1 {
        return Err(WitnessError::Unsupported(format!("gcd({n}, {}) != 1", q - 1)));
    }
    let (p, k) = split_prime_power(q)?;
    let base = FiniteField::new(p, k)?;
    let ext = ExtensionField::new(Arc::clone(&base), n as u32)?;
    let m = ((ext.order() - 1) / (q - 1)) as usize;
    let zeta_m = ext.pow(ext.zeta(), q - 1);
    let points: Vec<u64> = (0..m as u64).map(|j| ext.pow(zeta_m, j)).collect();
    for &x in &points {
        if mat_det(&base, n, &ext.mult_matrix(x)) != 1 {
            return Err(claim("multiplication matrix determinant is not 1"));
        }
    }
    let group = Arc::new(build_group(&named(NamedGroup::Psl { n, q }))?);
    independent_set_certificate(named(NamedGroup::Psl { n, q }), group, n, points, &ext, BTreeMap::new())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Check det(tI - phi_x) = prod_l (t - x^(q^l)) for `samples` seeded-random
/// nonzero x in GF(q^n).
pub fn charpoly_galois_check(n: usize, q: u64, samples: usize, seed: u64) -> Result<bool, WitnessError> {
    use rand::{Rng, SeedableRng};
    let (p, k) = split_prime_power(q)?;
    let base = FiniteField::new(p, k)?;
    let ext = ExtensionField::new(Arc::clone(&base), n as u32)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x = rng.gen_range(1..ext.order());
        let cp = charpoly(&base, n, &ext.mult_matrix(x));
        // expand prod (t - x^(q^l)) with coefficients in the extension field
        let mut poly = vec![1u64];
        for l in 0..n as u32 {
            let conj = ext.pow(x, q.pow(l));
            let mut next = vec![0u64; poly.len() + 1];
            for (d, &c) in poly.iter().enumerate() {
                next[d + 1] = ext.add(next[d + 1], c);
                next[d] = ext.add(next[d], ext.mul(ext.neg(conj), c));
            }
            poly = next;
        }
        // all coefficients must lie in the base field and match
        if poly.iter().any(|&c| c >= q) || poly != cp {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Phi is a homomorphism into the projective group with kernel exactly the
/// base field's nonzero elements. Exhaustive for q^n <= 2^12.
pub fn phi_homomorphism_check(n: usize, q: u64) -> Result<bool, WitnessError> {
    let (p, k) = split_prime_power(q)?;
    let base = FiniteField::new(p, k)?;
    let ext = ExtensionField::new(Arc::clone(&base), n as u32)?;
    if ext.order() > 1 << 12 {
        return Err(WitnessError::Unsupported("field too large for the exhaustive check".into()));
    }
    let rep = Representation::Matrix { field: Arc::clone(&base), dim: n, projective: true };
    let normalized: Vec<GroupElement> = (0..ext.order())
        .map(|x| rep.normalize(&GroupElement::Matrix(ext.mult_matrix(x))))
        .collect();
    let identity = GroupElement::Matrix(mat_id(n));
    for x in 1..ext.order() {
        // kernel: Phi(x) = 1 iff x embeds the base field
        if (normalized[x as usize] == identity) != (x < q) {
            return Ok(false);
        }
        for y in 1..ext.order() {
            let lhs = rep.mul(&normalized[x as usize], &normalized[y as usize]);
            if lhs != normalized[ext.mul(x, y) as usize] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The p-group strong-failure search: find x of order p outside the center
/// and a central commutator value t = [x, y] of order p reachable from every
/// power x^i; then {x^1..x^(p-1)} u {t^-1} is a maximum intersecting set for
/// G/<x> that is not a stabilizer coset. Returns None when no such x exists
/// (e.g. abelian groups).
pub fn pgroup_strong_witness(spec: &GroupSpec) -> Result<Option<WitnessCertificate>, WitnessError> {
    let group = Arc::new(build_group(spec)?);
    let order = group.order() as u64;
    let p = (2..=order).find(|d| order % d == 0).unwrap_or(1);
    if p == 2 || !is_prime(p) || !order.is_power_of_p(p) {
        return Err(WitnessError::Unsupported(format!("group of order {order} is not an odd p-group")));
    }
    let center = crate::groupcore::center(&group);
    for x in 0..group.order() as u32 {
        if group.element_order(x) != p || center.contains(x) {
            continue;
        }
        let t = match find_commutator_target(&group, &center, x, p) {
            Some(t) => t,
            None => continue,
        };
        let h = subgroup_generate(&group, &[x]);
        let mut set: Vec<u32> = (1..p).map(|j| group.pow(x, j)).collect();
        set.push(group.inv(t));
        set.sort_unstable();
        set.dedup();
        if set.len() != p as usize {
            continue;
        }
        let action = build_coset_action(Arc::clone(&group), h.clone())?;
        if !action.is_intersecting(&set) || is_coset_of_conjugate(&group, &set, &h) {
            continue;
        }
        let cert = WitnessCertificate {
            kind: WitnessKind::StrongFailure,
            group: spec.clone(),
            subgroup: vec![element_spec(&group, x)],
            elements: set.iter().map(|&s| element_spec(&group, s)).collect(),
            set_size: p as usize,
            stabilizer_size: p as usize,
            index: group.order() / p as usize,
            extra: BTreeMap::new(),
        };
        replay(&cert)?;
        return Ok(Some(cert));
    }
    Ok(None)
}

/// A central order-p commutator t = [x, y] such that every power x^i
/// (1 <= i < p) also realizes t as a commutator.
fn find_commutator_target(
    group: &Group,
    center: &crate::groupcore::Subgroup,
    x: u32,
    p: u64,
) -> Option<u32> {
    let id = group.identity();
    'outer: for y in 0..group.order() as u32 {
        let t = group.commutator(x, y);
        if t == id || !center.contains(t) || group.element_order(t) != p {
            continue;
        }
        for i in 1..p {
            let xi = group.pow(x, i);
            let hit = (0..group.order() as u32).any(|yi| group.commutator(xi, yi) == t);
            if !hit {
                continue 'outer;
            }
        }
        return Some(t);
    }
    None
}

trait PowerOfP {
    fn is_power_of_p(self, p: u64) -> bool;
}

impl PowerOfP for u64 {
    fn is_power_of_p(mut self, p: u64) -> bool {
        while self % p == 0 {
            self /= p;
        }
        self == 1
    }
}

/// The two structural facts about unipotent subgroups of GL_2(F_q): distinct
/// conjugates of U intersect trivially, and a product of nonidentity
/// elements from two distinct conjugates is never unipotent. Exhaustive.
pub fn unipotent_lemma_check(q: u64) -> Result<bool, WitnessError> {
    if q > 7 {
        return Err(WitnessError::Unsupported(format!("q = {q}: exhaustive check is capped at 7")));
    }
    let group = Arc::new(build_group(&named(NamedGroup::Gl { n: 2, q }))?);
    let field = match group.rep() {
        Representation::Matrix { field, .. } => Arc::clone(field),
        Representation::Permutation { .. } => unreachable!(),
    };
    let u_gens: Vec<u32> = {
        let f = &field;
        let mut gens = Vec::new();
        let mut z = 1u64;
        for _ in 0..f.degree() {
            let e = GroupElement::Matrix(vec![1, z, 0, 1]);
            gens.push(group.index_of(&e).expect("unitriangular in GL2"));
            z = f.mul(z, f.zeta());
        }
        gens
    };
    let u = subgroup_generate(&group, &u_gens);
    let mut conjugates: BTreeSet<Vec<u32>> = BTreeSet::new();
    for g in 0..group.order() as u32 {
        conjugates.insert(crate::lattice::conjugate_subgroup(&group, &u, g).members);
    }
    if conjugates.len() != (q + 1) as usize {
        return Ok(false);
    }
    let id = group.identity();
    let classes: Vec<Vec<u32>> = conjugates.into_iter().collect();
    for (i, u1) in classes.iter().enumerate() {
        for u2 in &classes[i + 1..] {
            // (1) trivial pairwise intersection
            let meet: Vec<&u32> = u1.iter().filter(|m| u2.binary_search(m).is_ok()).collect();
            if meet != vec![&id] {
                return Ok(false);
            }
            // (2) cross products are never unipotent
            for &a in u1.iter().filter(|&&a| a != id) {
                for &b in u2.iter().filter(|&&b| b != id) {
                    let prod = group.mul(a, b);
                    let m = match group.element(prod) {
                        GroupElement::Matrix(m) => m,
                        GroupElement::Perm(_) => unreachable!(),
                    };
                    if mat_is_unipotent(&field, 2, m) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// J_alpha = [[0, alpha], [-alpha^-1, 0]] is diagonalizable by a matrix of
/// determinant 1 whenever -1 is a square: verified by searching SL_2 for a
/// diagonalizer, for every alpha.
pub fn psl2_case2_diagonalizable_check(q: u64) -> Result<bool, WitnessError> {
    if q > 13 {
        return Err(WitnessError::Unsupported(format!("q = {q}: capped at 13")));
    }
    let (p, k) = split_prime_power(q)?;
    let field = FiniteField::new(p, k)?;
    if p == 2 || !field.is_square(field.neg(1)) {
        return Err(WitnessError::Unsupported("needs odd q with -1 a square".into()));
    }
    let group = Arc::new(build_group(&named(NamedGroup::Sl { n: 2, q }))?);
    for alpha in 1..q {
        let j_alpha = GroupElement::Matrix(vec![
            0,
            alpha,
            field.neg(field.inv(alpha).expect("nonzero")),
            0,
        ]);
        let j_idx = group.index_of(&j_alpha).expect("det 1");
        let diagonalized = (0..group.order() as u32).any(|g| {
            let c = group.conj(j_idx, g);
            match group.element(c) {
                GroupElement::Matrix(m) => m[1] == 0 && m[2] == 0,
                GroupElement::Perm(_) => false,
            }
        });
        if !diagonalized {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_p3_matches_hand_computation() {
        let cert = heisenberg_witness(3).unwrap();
        // x^2 mod 3 is 0, 1, 1
        assert_eq!(cert.elements[1], unitriangular3_z(1, 1));
        assert_eq!(cert.elements[2], unitriangular3_z(2, 1));
        assert_eq!(cert.set_size, 3);
        assert!(heisenberg_witness(2).is_err());
        assert!(heisenberg_witness(9).is_err());
    }

    fn unitriangular3_z(x: u64, z: u64) -> ElementSpec {
        ElementSpec::Matrix(vec![vec![1, x, z], vec![0, 1, 0], vec![0, 0, 1]])
    }

    #[test]
    fn pgl_unipotent_sizes() {
        let cert = pgl_unipotent_witness(2, 4).unwrap();
        assert_eq!((cert.stabilizer_size, cert.set_size), (2, 4));
        let cert = pgl_unipotent_witness(3, 2).unwrap();
        assert_eq!((cert.stabilizer_size, cert.set_size), (2, 4));
        // prime q is outside the n = 2 hypothesis
        assert!(pgl_unipotent_witness(2, 5).is_err());
    }

    #[test]
    fn psl2_case_dispatch() {
        let c3 = psl2_witness(3).unwrap();
        assert_eq!(c3.extra["case"], serde_json::json!(1));
        assert_eq!((c3.set_size, c3.stabilizer_size), (5, 4));
        // B = [[2,1],[1,1]] from c0 = d0 = 1
        assert!(c3.elements.contains(&mat2(2, 1, 1, 1)));
        let c5 = psl2_witness(5).unwrap();
        assert_eq!(c5.extra["case"], serde_json::json!(2));
        assert_eq!((c5.set_size, c5.stabilizer_size), (5, 4));
        let c4 = psl2_witness(4).unwrap();
        assert_eq!(c4.extra["case"], serde_json::json!(3));
        assert_eq!((c4.set_size, c4.stabilizer_size), (3, 2));
    }

    #[test]
    fn alternating_a6() {
        let cert = alternating_witness(6).unwrap();
        assert_eq!(cert.index, 180);
        assert!(alternating_witness(5).is_err());
    }

    #[test]
    fn charpoly_galois_small_fields() {
        assert!(charpoly_galois_check(3, 2, 100, 7).unwrap());
        assert!(charpoly_galois_check(2, 9, 100, 7).unwrap());
    }

    #[test]
    fn phi_kernel_and_homomorphism() {
        assert!(phi_homomorphism_check(2, 3).unwrap());
        assert!(phi_homomorphism_check(3, 2).unwrap());
    }

    #[test]
    fn pgl_independent_set_23() {
        let cert = pgl_independent_set(2, 3).unwrap();
        assert_eq!(cert.set_size, 4);
        assert_eq!(cert.stabilizer_size, 6);
    }

    #[test]
    fn sum_of_two_squares_negative_one_is_nonzero() {
        // whenever -1 is not a square, both coordinates must be nonzero
        for q in [3u64, 7, 11, 19, 23, 27, 31, 43, 47] {
            let (p, k) = split_prime_power(q).unwrap();
            let f = FiniteField::new(p, k).unwrap();
            if f.is_square(f.neg(1)) {
                continue;
            }
            let (c, d) = f.sum_of_two_squares(f.neg(1));
            assert!(c != 0 && d != 0, "q = {q}");
        }
    }

    #[test]
    fn tampered_certificates_fail_replay() {
        let mut cert = heisenberg_witness(3).unwrap();
        cert.set_size = 4;
        assert!(replay(&cert).is_err());
        let mut cert = heisenberg_witness(3).unwrap();
        // the stabilizer itself is a coset, so the strong-failure claim breaks
        cert.elements = vec![unitriangular3_z(0, 0), unitriangular3(1, 0), unitriangular3(2, 0)];
        assert!(replay(&cert).is_err());
    }

    #[test]
    fn pgroup_witness_on_heisenberg3() {
        let cert = pgroup_strong_witness(&named(NamedGroup::Heisenberg { p: 3 }))
            .unwrap()
            .expect("non-abelian p-group must yield a witness");
        assert_eq!(cert.set_size, 3);
        assert!(matches!(cert.kind, WitnessKind::StrongFailure));
    }

    #[test]
    fn pgroup_witness_rejects_non_p_groups() {
        assert!(pgroup_strong_witness(&named(NamedGroup::Symmetric { n: 3 })).is_err());
        assert!(pgroup_strong_witness(&named(NamedGroup::Quaternion8 {})).is_err());
    }

    #[test]
    fn unipotent_lemma_q3() {
        assert!(unipotent_lemma_check(3).unwrap());
    }

    #[test]
    fn case2_diagonalizability_q5() {
        assert!(psl2_case2_diagonalizable_check(5).unwrap());
    }

    #[test]
    fn certificate_json_roundtrip() {
        let cert = heisenberg_witness(3).unwrap();
        let json = serde_json::to_string(&cert).unwrap();
        let back: WitnessCertificate = serde_json::from_str(&json).unwrap();
        replay(&back).unwrap();
    }
}
