//! Transitive coset actions of a group on G/H: point numbering, action
//! lookups, stabilizers, fixed points, and the intersecting-set predicate.

use std::sync::{Arc, OnceLock};

use crate::groupcore::{conjugate_closure, left_cosets, Group, GroupError, Subgroup};

/// Refuse actions whose dense table would exceed this many entries.
pub const ACTION_ENTRY_CAP: u64 = 64_000_000;
/// Dense action table is materialized below this many entries; larger actions
/// answer `act` by one multiplication and a lookup.
const DENSE_TABLE_LIMIT: u64 = 4_000_000;

/// Membership bitset over group element indices.
#[derive(Debug, Clone)]
pub struct IndexBitset {
    words: Vec<u64>,
}

impl IndexBitset {
    pub fn from_sorted(len: usize, members: &[u32]) -> IndexBitset {
        let mut words = vec![0u64; (len + 63) / 64];
        for &m in members {
            words[m as usize / 64] |= 1 << (m % 64);
        }
        IndexBitset { words }
    }

    pub fn contains(&self, i: u32) -> bool {
        self.words[i as usize / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// The action of G on the left cosets of H, with point 0 the identity coset.
pub struct CosetAction {
    group: Arc<Group>,
    subgroup: Subgroup,
    reps: Vec<u32>,
    point_of: Vec<u32>,
    table: Option<Vec<u32>>,
    /// Connection set D = union of conjugates of H, built on first use.
    fixed_point_set: OnceLock<IndexBitset>,
}

pub fn build_coset_action(group: Arc<Group>, subgroup: Subgroup) -> Result<CosetAction, GroupError> {
    let reps = left_cosets(&group, &subgroup);
    let m = reps.len();
    let entries = group.order() as u64 * m as u64;
    if entries > ACTION_ENTRY_CAP {
        return Err(GroupError::OrderCap(entries as usize, ACTION_ENTRY_CAP as usize));
    }
    let mut point_of = vec![u32::MAX; group.order()];
    for (pt, &r) in reps.iter().enumerate() {
        for &h in &subgroup.members {
            point_of[group.mul(r, h) as usize] = pt as u32;
        }
    }
    debug_assert!(point_of.iter().all(|&p| p != u32::MAX));
    let table = if entries <= DENSE_TABLE_LIMIT {
        let mut t = vec![0u32; entries as usize];
        for g in 0..group.order() as u32 {
            for (x, &r) in reps.iter().enumerate() {
                t[g as usize * m + x] = point_of[group.mul(g, r) as usize];
            }
        }
        Some(t)
    } else {
        None
    };
    Ok(CosetAction {
        group,
        subgroup,
        reps,
        point_of,
        table,
        fixed_point_set: OnceLock::new(),
    })
}

impl CosetAction {
    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn num_points(&self) -> usize {
        self.reps.len()
    }

    pub fn point_rep(&self, x: u32) -> u32 {
        self.reps[x as usize]
    }

    pub fn point_of(&self, g: u32) -> u32 {
        self.point_of[g as usize]
    }

    /// g . (xH) = (g x)H
    pub fn act(&self, g: u32, x: u32) -> u32 {
        if let Some(t) = &self.table {
            t[g as usize * self.reps.len() + x as usize]
        } else {
            self.point_of[self.group.mul(g, self.reps[x as usize]) as usize]
        }
    }

    /// The set D of elements with a fixed point, i.e. the union of all
    /// conjugates of H. Computed once, O(1) membership thereafter.
    pub fn fixed_point_set(&self) -> &IndexBitset {
        self.fixed_point_set.get_or_init(|| {
            let d = conjugate_closure(&self.group, &self.subgroup);
            IndexBitset::from_sorted(self.group.order(), &d)
        })
    }

    pub fn has_fixed_point(&self, g: u32) -> bool {
        self.fixed_point_set().contains(g)
    }

    /// Fixed-point test by direct scan of the points; used to cross-check
    /// the conjugate-closure route.
    pub fn has_fixed_point_by_scan(&self, g: u32) -> bool {
        (0..self.reps.len() as u32).any(|x| self.act(g, x) == x)
    }

    /// S is intersecting iff every s1^-1 s2 has a fixed point.
    pub fn is_intersecting(&self, s: &[u32]) -> bool {
        let d = self.fixed_point_set();
        for &s1 in s {
            let s1inv = self.group.inv(s1);
            for &s2 in s {
                if !d.contains(self.group.mul(s1inv, s2)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn stabilizer(&self, x: u32) -> Subgroup {
        let members: Vec<u32> = (0..self.group.order() as u32).filter(|&g| self.act(g, x) == x).collect();
        Subgroup { members }
    }
}
