//! Exhaustive subgroup lattice enumeration for small groups, with
//! conjugacy-class grouping. Exponential in the worst case; guarded by a
//! hard order cap.

use std::collections::BTreeSet;

use crate::groupcore::{is_normal, subgroup_generate, Group, GroupError, Subgroup};

/// Hard refusal threshold for lattice enumeration.
pub const LATTICE_ORDER_CAP: usize = 2000;

/// All subgroups of g, in canonical order (sorted member vectors).
/// Fixpoint closure: seed with every cyclic subgroup, then repeatedly extend
/// each known subgroup by each outside element until nothing new appears.
pub fn all_subgroups(g: &Group) -> Result<Vec<Subgroup>, GroupError> {
    let n = g.order();
    if n > LATTICE_ORDER_CAP {
        return Err(GroupError::OrderCap(n, LATTICE_ORDER_CAP));
    }
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
    seen.insert(vec![g.identity()]);
    for e in 0..n as u32 {
        seen.insert(subgroup_generate(g, &[e]).members);
    }
    let mut frontier: Vec<Vec<u32>> = seen.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for h in &frontier {
            if h.len() == n {
                continue;
            }
            let mut gens = minimal_generators(g, h);
            for e in 0..n as u32 {
                if h.binary_search(&e).is_ok() {
                    continue;
                }
                gens.push(e);
                let ext = subgroup_generate(g, &gens).members;
                gens.pop();
                if !seen.contains(&ext) {
                    seen.insert(ext.clone());
                    next.push(ext);
                }
            }
        }
        frontier = next;
    }
    Ok(seen.into_iter().map(|members| Subgroup { members }).collect())
}

/// A small generating set for a subgroup given by its members: greedily add
/// members that enlarge the generated subgroup.
pub fn minimal_generators(g: &Group, members: &[u32]) -> Vec<u32> {
    let mut gens: Vec<u32> = Vec::new();
    let mut current = vec![g.identity()];
    for &m in members {
        if current.binary_search(&m).is_ok() {
            continue;
        }
        gens.push(m);
        current = subgroup_generate(g, &gens).members;
        if current.len() == members.len() {
            break;
        }
    }
    gens
}

pub fn conjugate_subgroup(g: &Group, h: &Subgroup, by: u32) -> Subgroup {
    let mut members: Vec<u32> = h.members.iter().map(|&m| g.conj(m, by)).collect();
    members.sort_unstable();
    Subgroup { members }
}

/// Group the subgroups into conjugacy classes; each class is sorted and the
/// classes are ordered by their smallest member, so output is canonical.
pub fn conjugacy_classes(g: &Group, subgroups: &[Subgroup]) -> Vec<Vec<Subgroup>> {
    let mut remaining: BTreeSet<Vec<u32>> = subgroups.iter().map(|s| s.members.clone()).collect();
    let mut classes = Vec::new();
    while let Some(first) = remaining.iter().next().cloned() {
        let rep = Subgroup { members: first };
        let mut class: BTreeSet<Vec<u32>> = BTreeSet::new();
        for by in 0..g.order() as u32 {
            class.insert(conjugate_subgroup(g, &rep, by).members);
        }
        for c in &class {
            remaining.remove(c);
        }
        classes.push(class.into_iter().map(|members| Subgroup { members }).collect());
    }
    classes
}

pub fn normal_subgroups(g: &Group) -> Result<Vec<Subgroup>, GroupError> {
    Ok(all_subgroups(g)?.into_iter().filter(|h| is_normal(g, h)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_named, NamedGroup};

    #[test]
    fn s3_has_six_subgroups() {
        let g = build_named(&NamedGroup::Symmetric { n: 3 }).unwrap();
        let subs = all_subgroups(&g).unwrap();
        // {1}, three <transposition>, A3, S3
        assert_eq!(subs.len(), 6);
        let orders: Vec<usize> = subs.iter().map(|s| s.order()).collect();
        assert_eq!(orders.iter().filter(|&&o| o == 2).count(), 3);
        // classes: trivial, transpositions (one class of 3), A3, S3
        assert_eq!(conjugacy_classes(&g, &subs).len(), 4);
        assert_eq!(normal_subgroups(&g).unwrap().len(), 3);
    }

    #[test]
    fn q8_every_subgroup_normal() {
        let g = build_named(&NamedGroup::Quaternion8 {}).unwrap();
        let subs = all_subgroups(&g).unwrap();
        assert_eq!(subs.len(), 6); // 1, <-1>, three C4s, Q8
        assert_eq!(normal_subgroups(&g).unwrap().len(), 6);
    }

    #[test]
    fn d4_subgroup_count() {
        let g = build_named(&NamedGroup::Dihedral { n: 4 }).unwrap();
        let subs = all_subgroups(&g).unwrap();
        assert_eq!(subs.len(), 10);
        assert_eq!(normal_subgroups(&g).unwrap().len(), 6);
    }

    #[test]
    fn s4_subgroup_count() {
        let g = build_named(&NamedGroup::Symmetric { n: 4 }).unwrap();
        let subs = all_subgroups(&g).unwrap();
        assert_eq!(subs.len(), 30);
        // 1, V4, A4, S4
        assert_eq!(normal_subgroups(&g).unwrap().len(), 4);
    }

    #[test]
    fn lagrange_holds_for_every_subgroup() {
        let g = build_named(&NamedGroup::Dihedral { n: 6 }).unwrap();
        for s in all_subgroups(&g).unwrap() {
            assert_eq!(g.order() % s.order(), 0);
        }
    }

    #[test]
    fn minimal_generators_regenerate() {
        let g = build_named(&NamedGroup::Symmetric { n: 4 }).unwrap();
        for s in all_subgroups(&g).unwrap() {
            let gens = minimal_generators(&g, &s.members);
            assert_eq!(subgroup_generate(&g, &gens).members, s.members);
        }
    }
}
