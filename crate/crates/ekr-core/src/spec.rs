//! JSON specs for groups, elements, and subgroup generator lists, and the
//! builders that turn them into enumerated groups.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{build_named_with_cap, CatalogError, NamedGroup};
use crate::finfield::{FieldError, FiniteField};
use crate::groupcore::{
    enumerate_group, Group, GroupElement, GroupError, Representation, DEFAULT_ENUMERATION_CAP,
};
use crate::linalg::mat_det;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("invalid group spec: {0}")]
    Invalid(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("element {0} does not belong to the group")]
    UnknownElement(String),
}

/// Field spec: modulus is always derived from (p, k), never user-supplied.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub k: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    Permutation {
        degree: usize,
        generators: Vec<Vec<u16>>,
    },
    Matrix {
        field: FieldSpec,
        dim: usize,
        #[serde(default)]
        projective: bool,
        #[serde(default)]
        determinant_one: bool,
        generators: Vec<Vec<Vec<u64>>>,
    },
    Named {
        #[serde(flatten)]
        group: NamedGroup,
    },
}

/// One group element: a permutation image array, or a matrix as rows of
/// canonical field values. Disambiguated by the ambient group.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum ElementSpec {
    Perm(Vec<u16>),
    Matrix(Vec<Vec<u64>>),
}

pub fn build_group(spec: &GroupSpec) -> Result<Group, SpecError> {
    build_group_with_cap(spec, DEFAULT_ENUMERATION_CAP)
}

pub fn build_group_with_cap(spec: &GroupSpec, cap: usize) -> Result<Group, SpecError> {
    match spec {
        GroupSpec::Permutation { degree, generators } => {
            if *degree == 0 || *degree > u16::MAX as usize {
                return Err(SpecError::Invalid(format!("bad degree {degree}")));
            }
            let gens: Vec<GroupElement> = generators
                .iter()
                .map(|images| GroupElement::Perm(images.clone()))
                .collect();
            let rep = Representation::Permutation { degree: *degree };
            Ok(enumerate_group(rep, &gens, cap)?)
        }
        GroupSpec::Matrix { field, dim, projective, determinant_one, generators } => {
            let f = FiniteField::new(field.p, field.k)?;
            let n = *dim;
            if n == 0 || n > 8 {
                return Err(SpecError::Invalid(format!("bad dimension {n}")));
            }
            let rep = Representation::Matrix { field: f.clone(), dim: n, projective: *projective };
            let mut gens = Vec::with_capacity(generators.len());
            for rows in generators {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(SpecError::Invalid(format!("generator is not {n}x{n}")));
                }
                let flat: Vec<u64> = rows.iter().flatten().copied().collect();
                if flat.iter().any(|&v| v >= f.order()) {
                    return Err(SpecError::Invalid("matrix entry out of field range".into()));
                }
                if *determinant_one && mat_det(&f, n, &flat) != 1 {
                    return Err(SpecError::Invalid("generator determinant is not 1".into()));
                }
                gens.push(rep.normalize(&GroupElement::Matrix(flat)));
            }
            Ok(enumerate_group(rep, &gens, cap)?)
        }
        GroupSpec::Named { group } => Ok(build_named_with_cap(group, cap)?),
    }
}

/// Resolve an element spec to its index in an already-built group.
pub fn resolve_element(group: &Group, spec: &ElementSpec) -> Result<u32, SpecError> {
    let element = match (group.rep(), spec) {
        (Representation::Permutation { degree }, ElementSpec::Perm(images)) => {
            if images.len() != *degree {
                return Err(SpecError::Invalid(format!(
                    "permutation has {} points, group degree is {degree}",
                    images.len()
                )));
            }
            GroupElement::Perm(images.clone())
        }
        (Representation::Matrix { dim, .. }, ElementSpec::Matrix(rows)) => {
            if rows.len() != *dim || rows.iter().any(|r| r.len() != *dim) {
                return Err(SpecError::Invalid(format!("element is not {dim}x{dim}")));
            }
            let flat: Vec<u64> = rows.iter().flatten().copied().collect();
            group.rep().normalize(&GroupElement::Matrix(flat))
        }
        _ => return Err(SpecError::Invalid("element kind does not match group kind".into())),
    };
    group
        .index_of(&element)
        .ok_or_else(|| SpecError::UnknownElement(format!("{element:?}")))
}

/// Render a group element back out as a spec, for embedding in reports.
pub fn element_spec(group: &Group, index: u32) -> ElementSpec {
    match group.element(index) {
        GroupElement::Perm(images) => ElementSpec::Perm(images.clone()),
        GroupElement::Matrix(flat) => {
            let n = match group.rep() {
                Representation::Matrix { dim, .. } => *dim,
                Representation::Permutation { .. } => unreachable!("matrix element in permutation group"),
            };
            ElementSpec::Matrix(flat.chunks(n).map(|r| r.to_vec()).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_spec_roundtrip() {
        let json = r#"{"kind":"permutation","degree":3,"generators":[[1,0,2],[1,2,0]]}"#;
        let spec: GroupSpec = serde_json::from_str(json).unwrap();
        let g = build_group(&spec).unwrap();
        assert_eq!(g.order(), 6);
        let idx = resolve_element(&g, &ElementSpec::Perm(vec![2, 1, 0])).unwrap();
        assert_eq!(element_spec(&g, idx), ElementSpec::Perm(vec![2, 1, 0]));
        let back = serde_json::to_string(&spec).unwrap();
        let respec: GroupSpec = serde_json::from_str(&back).unwrap();
        assert_eq!(respec, spec);
    }

    #[test]
    fn matrix_spec_builds_sl2_f3() {
        let json = r#"{"kind":"matrix","field":{"p":3,"k":1},"dim":2,
                       "determinant_one":true,
                       "generators":[[[1,1],[0,1]],[[1,0],[1,1]]]}"#;
        let spec: GroupSpec = serde_json::from_str(json).unwrap();
        let g = build_group(&spec).unwrap();
        assert_eq!(g.order(), 24);
        let idx = resolve_element(&g, &ElementSpec::Matrix(vec![vec![0, 2], vec![1, 0]])).unwrap();
        assert_eq!(g.element_order(idx), 4);
    }

    #[test]
    fn determinant_validation_rejects_bad_generator() {
        let json = r#"{"kind":"matrix","field":{"p":3,"k":1},"dim":2,
                       "determinant_one":true,
                       "generators":[[[2,0],[0,1]]]}"#;
        let spec: GroupSpec = serde_json::from_str(json).unwrap();
        assert!(matches!(build_group(&spec), Err(SpecError::Invalid(_))));
    }

    #[test]
    fn named_spec_accepted() {
        let json = r#"{"kind":"named","name":"suzuki","params":{"n":1}}"#;
        let spec: GroupSpec = serde_json::from_str(json).unwrap();
        assert!(matches!(spec, GroupSpec::Named { .. }));
        let json = r#"{"kind":"named","name":"quaternion8","params":{}}"#;
        let spec: GroupSpec = serde_json::from_str(json).unwrap();
        let g = build_group(&spec).unwrap();
        assert_eq!(g.order(), 8);
    }

    #[test]
    fn projective_spec_identifies_scalar_multiples() {
        let json = r#"{"kind":"matrix","field":{"p":3,"k":1},"dim":2,"projective":true,
                       "generators":[[[1,1],[0,1]],[[1,0],[1,1]],[[2,0],[0,1]]]}"#;
        let spec: GroupSpec = serde_json::from_str(json).unwrap();
        let g = build_group(&spec).unwrap();
        assert_eq!(g.order(), 24); // PGL_2(F_3)
        // 2I and I are the same projective element
        let a = resolve_element(&g, &ElementSpec::Matrix(vec![vec![2, 0], vec![0, 2]])).unwrap();
        assert_eq!(a, g.identity());
    }

    #[test]
    fn element_out_of_group_is_reported() {
        let json = r#"{"kind":"permutation","degree":4,"generators":[[1,2,0,3]]}"#;
        let spec: GroupSpec = serde_json::from_str(json).unwrap();
        let g = build_group(&spec).unwrap();
        assert_eq!(g.order(), 3);
        assert!(matches!(
            resolve_element(&g, &ElementSpec::Perm(vec![1, 0, 2, 3])),
            Err(SpecError::UnknownElement(_))
        ));
        assert!(matches!(
            resolve_element(&g, &ElementSpec::Matrix(vec![vec![1]])),
            Err(SpecError::Invalid(_))
        ));
    }
}
