//! Named constructors for the group families under study: symmetric,
//! alternating, cyclic, dihedral, quaternion, Heisenberg, (P)GL/(P)SL over
//! finite fields, the Suzuki groups in their 4x4 matrix realization, plus the
//! modular group of order 16 and extraspecial p-groups of exponent p^2.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finfield::{is_prime, FieldError, FiniteField};
use crate::groupcore::{
    enumerate_group, subgroup_generate, Group, GroupElement, GroupError, Representation, Subgroup,
    DEFAULT_ENUMERATION_CAP,
};
use crate::linalg;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("invalid parameters for {family}: {reason}")]
    InvalidParams { family: &'static str, reason: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn bad(family: &'static str, reason: impl Into<String>) -> CatalogError {
    CatalogError::InvalidParams { family, reason: reason.into() }
}

/// A named group family with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "snake_case")]
pub enum NamedGroup {
    Symmetric { n: usize },
    Alternating { n: usize },
    Cyclic { n: usize },
    Dihedral { n: usize },
    Quaternion8 {},
    Heisenberg { p: u64 },
    Gl { n: usize, q: u64 },
    Sl { n: usize, q: u64 },
    Pgl { n: usize, q: u64 },
    Psl { n: usize, q: u64 },
    Suzuki { n: u32 },
    Modular16 {},
    /// Extraspecial group of order p^3 and exponent p^2 (p odd).
    Extraspecial { p: u64 },
}

pub fn build_named(spec: &NamedGroup) -> Result<Group, CatalogError> {
    build_named_with_cap(spec, DEFAULT_ENUMERATION_CAP)
}

pub fn build_named_with_cap(spec: &NamedGroup, cap: usize) -> Result<Group, CatalogError> {
    match spec {
        NamedGroup::Symmetric { n } => {
            if *n < 1 || *n > 10 {
                return Err(bad("symmetric", "n must be in 1..=10"));
            }
            let rep = Representation::Permutation { degree: *n };
            let mut gens = Vec::new();
            if *n >= 2 {
                gens.push(transposition(*n, 0, 1));
                gens.push(cycle(*n, &(0..*n).collect::<Vec<_>>()));
            }
            Ok(enumerate_group(rep, &gens, cap)?)
        }
        NamedGroup::Alternating { n } => {
            if *n < 3 || *n > 10 {
                return Err(bad("alternating", "n must be in 3..=10"));
            }
            let rep = Representation::Permutation { degree: *n };
            let mut gens = vec![cycle(*n, &[0, 1, 2])];
            if *n > 3 {
                if n % 2 == 1 {
                    gens.push(cycle(*n, &(0..*n).collect::<Vec<_>>()));
                } else {
                    gens.push(cycle(*n, &(1..*n).collect::<Vec<_>>()));
                }
            }
            Ok(enumerate_group(rep, &gens, cap)?)
        }
        NamedGroup::Cyclic { n } => {
            if *n < 1 || *n > 10_000 {
                return Err(bad("cyclic", "n must be in 1..=10000"));
            }
            let rep = Representation::Permutation { degree: *n };
            let gens = if *n > 1 { vec![cycle(*n, &(0..*n).collect::<Vec<_>>())] } else { vec![] };
            Ok(enumerate_group(rep, &gens, cap)?)
        }
        NamedGroup::Dihedral { n } => {
            if *n < 3 || *n > 1000 {
                return Err(bad("dihedral", "n must be in 3..=1000"));
            }
            // order 2n: rotation and reflection on n points
            let rep = Representation::Permutation { degree: *n };
            let rot = cycle(*n, &(0..*n).collect::<Vec<_>>());
            let refl = GroupElement::Perm((0..*n).map(|i| ((*n - i) % *n) as u16).collect());
            Ok(enumerate_group(rep, &[rot, refl], cap)?)
        }
        NamedGroup::Quaternion8 {} => {
            // the quaternion subgroup of SL2(F3)
            let f3 = FiniteField::new(3, 1)?;
            let rep = Representation::Matrix { field: f3, dim: 2, projective: false };
            let i = GroupElement::Matrix(vec![0, 2, 1, 0]);
            let j = GroupElement::Matrix(vec![1, 1, 1, 2]);
            Ok(enumerate_group(rep, &[i, j], cap)?)
        }
        NamedGroup::Heisenberg { p } => {
            if !is_prime(*p) || *p == 2 {
                return Err(bad("heisenberg", "p must be an odd prime"));
            }
            let field = FiniteField::new(*p, 1)?;
            let rep = Representation::Matrix { field: Arc::clone(&field), dim: 3, projective: false };
            let gens = vec![
                heisenberg_matrix(&field, 1, 0, 0),
                heisenberg_matrix(&field, 0, 1, 0),
            ];
            Ok(enumerate_group(rep, &gens, cap)?)
        }
        NamedGroup::Gl { n, q } => linear_group(*n, *q, true, false, cap),
        NamedGroup::Sl { n, q } => linear_group(*n, *q, false, false, cap),
        NamedGroup::Pgl { n, q } => linear_group(*n, *q, true, true, cap),
        NamedGroup::Psl { n, q } => linear_group(*n, *q, false, true, cap),
        NamedGroup::Suzuki { n } => {
            let field = suzuki_field(*n)?;
            let q = field.order();
            let order = q * q * (q * q + 1) * (q - 1);
            if order > cap as u64 {
                return Err(CatalogError::Group(GroupError::CapExceeded(cap)));
            }
            let rep = Representation::Matrix { field: Arc::clone(&field), dim: 4, projective: false };
            Ok(enumerate_group(rep, &suzuki_generators(&field, *n), cap)?)
        }
        NamedGroup::Modular16 {} => {
            let (a, b) = semidirect_cyclic_generators(8, 2, 5);
            let rep = Representation::Permutation { degree: 16 };
            Ok(enumerate_group(rep, &[a, b], cap)?)
        }
        NamedGroup::Extraspecial { p } => {
            if !is_prime(*p) || *p == 2 {
                return Err(bad("extraspecial", "p must be an odd prime"));
            }
            let m = (p * p) as usize;
            let (a, b) = semidirect_cyclic_generators(m, *p as usize, (1 + p) as usize);
            let rep = Representation::Permutation { degree: m * *p as usize };
            Ok(enumerate_group(rep, &[a, b], cap)?)
        }
    }
}

fn transposition(degree: usize, i: usize, j: usize) -> GroupElement {
    let mut img: Vec<u16> = (0..degree as u16).collect();
    img.swap(i, j);
    GroupElement::Perm(img)
}

fn cycle(degree: usize, points: &[usize]) -> GroupElement {
    let mut img: Vec<u16> = (0..degree as u16).collect();
    for w in 0..points.len() {
        img[points[w]] = points[(w + 1) % points.len()] as u16;
    }
    GroupElement::Perm(img)
}

/// Left-translation generators of the group <a, b | a^m, b^n, b^-1 a b = a^r>
/// in its regular representation of degree m*n. Requires r^n = 1 (mod m).
fn semidirect_cyclic_generators(m: usize, n: usize, r: usize) -> (GroupElement, GroupElement) {
    // elements are pairs (i, j), i mod m, j mod n, numbered i*n + j;
    // (i1,j1)(i2,j2) = (i1 + i2 * r^j1 mod m, j1 + j2 mod n)
    let rpow = |j: usize| -> usize {
        let mut v = 1usize;
        for _ in 0..j {
            v = v * r % m;
        }
        v
    };
    let translate = |ai: usize, aj: usize| -> GroupElement {
        let mut img = vec![0u16; m * n];
        for i in 0..m {
            for j in 0..n {
                let ni = (ai + i * rpow(aj)) % m;
                let nj = (aj + j) % n;
                img[i * n + j] = (ni * n + nj) as u16;
            }
        }
        GroupElement::Perm(img)
    };
    (translate(1, 0), translate(0, 1))
}

fn split_prime_power(q: u64) -> Option<(u64, u32)> {
    for p in 2..=q {
        if q % p == 0 {
            if !is_prime(p) {
                return None;
            }
            let mut k = 0u32;
            let mut v = q;
            while v % p == 0 {
                v /= p;
                k += 1;
            }
            return if v == 1 { Some((p, k)) } else { None };
        }
    }
    None
}

fn linear_group(n: usize, q: u64, general: bool, projective: bool, cap: usize) -> Result<Group, CatalogError> {
    if !(2..=4).contains(&n) {
        return Err(bad("linear", "dimension must be in 2..=4"));
    }
    let (p, k) = split_prime_power(q).ok_or_else(|| bad("linear", format!("{q} is not a prime power")))?;
    let field = FiniteField::new(p, k)?;
    let rep = Representation::Matrix { field: Arc::clone(&field), dim: n, projective };
    let mut gens = Vec::new();
    // root subgroups of adjacent transvections span SL_n
    for i in 0..n - 1 {
        for t in 0..k {
            let c = field.pow(field.zeta(), t as u64);
            let mut upper = linalg::mat_id(n);
            upper[i * n + (i + 1)] = c;
            gens.push(GroupElement::Matrix(upper));
            let mut lower = linalg::mat_id(n);
            lower[(i + 1) * n + i] = c;
            gens.push(GroupElement::Matrix(lower));
        }
    }
    if general && q > 2 {
        let mut diag = linalg::mat_id(n);
        diag[0] = field.zeta();
        gens.push(GroupElement::Matrix(diag));
    }
    Ok(enumerate_group(rep, &gens, cap)?)
}

// ---- Heisenberg helpers ----

fn heisenberg_matrix(field: &Arc<FiniteField>, x: u64, y: u64, z: u64) -> GroupElement {
    GroupElement::Matrix(vec![1, x % field.order(), z % field.order(), 0, 1, y % field.order(), 0, 0, 1])
}

/// eta(x, y, z) as a 3x3 upper unitriangular matrix over GF(p).
pub fn heisenberg_element(p: u64, x: u64, y: u64, z: u64) -> Result<GroupElement, CatalogError> {
    if !is_prime(p) {
        return Err(bad("heisenberg", "p must be prime"));
    }
    let field = FiniteField::new(p, 1)?;
    Ok(heisenberg_matrix(&field, x, y, z))
}

/// Exhaustively verifies the two displayed Heisenberg identities:
/// eta(x,0,0)^eta(a,b,c) = eta(x,0,bx) and the product formula
/// eta(ai,bi,ci)^-1 eta(aj,bj,cj) = eta(aj-ai, bj-bi, cj-ci+ai*bi-ai*bj).
pub fn heisenberg_conjugate_check(p: u64) -> Result<bool, CatalogError> {
    if !is_prime(p) || p == 2 || p > 13 {
        return Err(bad("heisenberg", "p must be an odd prime <= 13"));
    }
    let field = FiniteField::new(p, 1)?;
    let f = &field;
    let eta = |x: u64, y: u64, z: u64| -> Vec<u64> { vec![1, x, z, 0, 1, y, 0, 0, 1] };
    // conjugation formula
    for x in 0..p {
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    let g = eta(a, b, c);
                    let ginv = linalg::mat_inv(f, 3, &g).unwrap();
                    let conj = linalg::mat_mul(f, 3, &linalg::mat_mul(f, 3, &ginv, &eta(x, 0, 0)), &g);
                    if conj != eta(x, 0, f.mul(b, x)) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    // product formula over all parameter tuples
    for ai in 0..p {
        for bi in 0..p {
            for ci in 0..p {
                let gi_inv = linalg::mat_inv(f, 3, &eta(ai, bi, ci)).unwrap();
                for aj in 0..p {
                    for bj in 0..p {
                        for cj in 0..p {
                            let prod = linalg::mat_mul(f, 3, &gi_inv, &eta(aj, bj, cj));
                            let z = f.add(
                                f.sub(cj, ci),
                                f.sub(f.mul(ai, bi), f.mul(ai, bj)),
                            );
                            if prod != eta(f.sub(aj, ai), f.sub(bj, bi), z) {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

// ---- Suzuki helpers ----

pub fn suzuki_field(n: u32) -> Result<Arc<FiniteField>, CatalogError> {
    if n < 1 {
        return Err(bad("suzuki", "n must be >= 1"));
    }
    Ok(FiniteField::new(2, 2 * n + 1)?)
}

/// theta(x) = x^(2^(n+1)), the square root of the Frobenius on GF(2^(2n+1)).
pub fn suzuki_theta(field: &FiniteField, n: u32, x: u64) -> u64 {
    field.frobenius_power(x, n + 1)
}

/// theta^-1(x) = x^(2^n).
pub fn suzuki_theta_inv(field: &FiniteField, n: u32, x: u64) -> u64 {
    field.frobenius_power(x, n)
}

pub fn suzuki_u(field: &FiniteField, alpha: u64, a: u64, beta: u64, b: u64) -> GroupElement {
    let f = field;
    GroupElement::Matrix(vec![
        1, 0, 0, 0,
        alpha, 1, 0, 0,
        f.add(f.mul(alpha, a), beta), a, 1, 0,
        f.add(f.add(f.mul(f.mul(alpha, alpha), a), f.mul(alpha, beta)), b), beta, alpha, 1,
    ])
}

/// v(alpha, beta) = u(alpha, alpha^theta, beta, beta^theta)
pub fn suzuki_v(field: &FiniteField, n: u32, alpha: u64, beta: u64) -> GroupElement {
    suzuki_u(field, alpha, suzuki_theta(field, n, alpha), beta, suzuki_theta(field, n, beta))
}

pub fn suzuki_h(field: &FiniteField, gamma: u64, c: u64) -> GroupElement {
    let f = field;
    let gi = f.inv(gamma).expect("gamma nonzero");
    let ci = f.inv(c).expect("c nonzero");
    GroupElement::Matrix(vec![
        f.mul(gamma, c), 0, 0, 0,
        0, gamma, 0, 0,
        0, 0, gi, 0,
        0, 0, 0, f.mul(gi, ci),
    ])
}

/// k(gamma) = h(gamma, gamma^theta)
pub fn suzuki_k(field: &FiniteField, n: u32, gamma: u64) -> GroupElement {
    suzuki_h(field, gamma, suzuki_theta(field, n, gamma))
}

pub fn suzuki_tau() -> GroupElement {
    GroupElement::Matrix(vec![
        0, 0, 0, 1,
        0, 0, 1, 0,
        0, 1, 0, 0,
        1, 0, 0, 0,
    ])
}

fn suzuki_generators(field: &Arc<FiniteField>, n: u32) -> Vec<GroupElement> {
    let mut gens = Vec::new();
    let mut z = 1u64;
    for _ in 0..field.degree() {
        gens.push(suzuki_v(field, n, z, 0));
        gens.push(suzuki_v(field, n, 0, z));
        z = field.mul(z, field.zeta());
    }
    gens.push(suzuki_k(field, n, field.zeta()));
    gens.push(suzuki_tau());
    gens
}

pub struct SuzukiParts {
    pub group: Arc<Group>,
    pub b: Subgroup,
    pub b0: Subgroup,
    pub h: Subgroup,
}

/// The subgroups B (order q^2), B0 (order 2q) and H (order q-1) inside Sz(q).
pub fn suzuki_parts(n: u32) -> Result<SuzukiParts, CatalogError> {
    let field = suzuki_field(n)?;
    let group = Arc::new(build_named(&NamedGroup::Suzuki { n })?);
    let idx = |e: &GroupElement| group.index_of(e).expect("generator in group");
    let mut b_gens = Vec::new();
    let mut b0_gens = vec![idx(&suzuki_v(&field, n, 1, 0))];
    let mut z = 1u64;
    for _ in 0..field.degree() {
        b_gens.push(idx(&suzuki_v(&field, n, z, 0)));
        b_gens.push(idx(&suzuki_v(&field, n, 0, z)));
        b0_gens.push(idx(&suzuki_v(&field, n, 0, z)));
        z = field.mul(z, field.zeta());
    }
    let h_gens = vec![idx(&suzuki_k(&field, n, field.zeta()))];
    let b = subgroup_generate(&group, &b_gens);
    let b0 = subgroup_generate(&group, &b0_gens);
    let h = subgroup_generate(&group, &h_gens);
    Ok(SuzukiParts { group, b, b0, h })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_orders_match_formulas() {
        assert_eq!(build_named(&NamedGroup::Symmetric { n: 4 }).unwrap().order(), 24);
        assert_eq!(build_named(&NamedGroup::Alternating { n: 5 }).unwrap().order(), 60);
        assert_eq!(build_named(&NamedGroup::Alternating { n: 6 }).unwrap().order(), 360);
        assert_eq!(build_named(&NamedGroup::Cyclic { n: 8 }).unwrap().order(), 8);
        assert_eq!(build_named(&NamedGroup::Dihedral { n: 4 }).unwrap().order(), 8);
        assert_eq!(build_named(&NamedGroup::Quaternion8 {}).unwrap().order(), 8);
        assert_eq!(build_named(&NamedGroup::Modular16 {}).unwrap().order(), 16);
        assert_eq!(build_named(&NamedGroup::Extraspecial { p: 3 }).unwrap().order(), 27);
    }

    #[test]
    fn heisenberg_orders() {
        assert_eq!(build_named(&NamedGroup::Heisenberg { p: 3 }).unwrap().order(), 27);
        assert_eq!(build_named(&NamedGroup::Heisenberg { p: 5 }).unwrap().order(), 125);
    }

    #[test]
    fn linear_group_orders() {
        // |GL_n(q)| = prod (q^n - q^i); |SL| = |GL|/(q-1); |PGL| = |GL|/(q-1)
        assert_eq!(build_named(&NamedGroup::Gl { n: 2, q: 3 }).unwrap().order(), 48);
        assert_eq!(build_named(&NamedGroup::Sl { n: 2, q: 3 }).unwrap().order(), 24);
        assert_eq!(build_named(&NamedGroup::Pgl { n: 2, q: 3 }).unwrap().order(), 24);
        assert_eq!(build_named(&NamedGroup::Psl { n: 2, q: 3 }).unwrap().order(), 12);
        assert_eq!(build_named(&NamedGroup::Gl { n: 2, q: 4 }).unwrap().order(), 180);
        assert_eq!(build_named(&NamedGroup::Psl { n: 2, q: 4 }).unwrap().order(), 60);
        assert_eq!(build_named(&NamedGroup::Pgl { n: 2, q: 5 }).unwrap().order(), 120);
        assert_eq!(build_named(&NamedGroup::Psl { n: 2, q: 9 }).unwrap().order(), 360);
    }

    #[test]
    fn psl_is_projective_image_of_sl() {
        for (n, q) in [(2usize, 3u64), (2, 4), (2, 5), (3, 2)] {
            let sl = build_named(&NamedGroup::Sl { n, q }).unwrap();
            let psl = build_named(&NamedGroup::Psl { n, q }).unwrap();
            let (p, k) = split_prime_power(q).unwrap();
            let field = FiniteField::new(p, k).unwrap();
            let prep = Representation::Matrix { field, dim: n, projective: true };
            let mut images: Vec<GroupElement> = sl.elements().iter().map(|e| prep.normalize(e)).collect();
            images.sort_unstable();
            images.dedup();
            assert_eq!(images.len(), psl.order());
            assert!(images.iter().all(|e| psl.index_of(e).is_some()));
            let d = num_integer_gcd(n as u64, q - 1);
            assert_eq!(psl.order() as u64, sl.order() as u64 / d);
        }
    }

    fn num_integer_gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            num_integer_gcd(b, a % b)
        }
    }

    #[test]
    fn heisenberg_identities_small_primes() {
        assert!(heisenberg_conjugate_check(3).unwrap());
        assert!(heisenberg_conjugate_check(5).unwrap());
        assert!(heisenberg_conjugate_check(2).is_err());
    }

    #[test]
    fn heisenberg_conjugation_example() {
        // p=3: eta(1,0,0)^eta(0,1,0) = eta(1,0,1)
        let p = 3;
        let g = build_named(&NamedGroup::Heisenberg { p }).unwrap();
        let e100 = g.index_of(&heisenberg_element(p, 1, 0, 0).unwrap()).unwrap();
        let e010 = g.index_of(&heisenberg_element(p, 0, 1, 0).unwrap()).unwrap();
        let expect = g.index_of(&heisenberg_element(p, 1, 0, 1).unwrap()).unwrap();
        assert_eq!(g.conj(e100, e010), expect);
        assert_eq!(heisenberg_element(p, 0, 0, 0).unwrap(), g.rep().identity());
    }

    #[test]
    fn suzuki_identity_element() {
        let field = suzuki_field(1).unwrap();
        assert_eq!(suzuki_v(&field, 1, 0, 0), GroupElement::Matrix(linalg::mat_id(4)));
    }

    #[test]
    fn suzuki_n2_refused_by_cap() {
        assert!(matches!(
            build_named(&NamedGroup::Suzuki { n: 2 }),
            Err(CatalogError::Group(GroupError::CapExceeded(_)))
        ));
    }
}
