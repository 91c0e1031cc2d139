//! Obstruction groups and the brute-force tuple model.
//!
//! C is built from the equivalence on I generated by "V_i meets V_j",
//! with a place witness recorded for every elementary merge; C_indep uses
//! linear disjointness as the elementary relation instead. Elements are
//! class-constant maps I -> F_2 modulo the global flip, so the order is
//! 2^(classes - 1). The tuple model enumerates the subgroup S of
//! (Z/2)^m whose parts have non-meeting V-unions and quotients by the
//! all-ones vector; the bijection between the two constructions is a
//! verification operation, not a production path.

use crate::error::{Error, Result};
use crate::involution::Configuration;
use crate::local::Place;
use crate::multiquad::{is_linearly_disjoint, v_intersection, VIntersection, VProfiles};
use std::collections::BTreeMap;

/// Why two indices were merged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeWitness {
    /// A place belonging to both V-sets.
    Place(Place),
    /// The two factors are linearly disjoint.
    LinearlyDisjoint,
}

/// Which elementary relation generated the group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupRelation {
    PlaceIntersection,
    LinearDisjointness,
}

/// Partition of the index set with witnesses; elements are the maps
/// I -> F_2 constant on classes, modulo the all-ones flip.
#[derive(Clone, Debug)]
pub struct ObstructionGroup {
    relation: GroupRelation,
    size: usize,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    witnesses: BTreeMap<(usize, usize), EdgeWitness>,
}

impl ObstructionGroup {
    fn from_edges(
        size: usize,
        relation: GroupRelation,
        witnesses: BTreeMap<(usize, usize), EdgeWitness>,
    ) -> Self {
        let mut parent: Vec<usize> = (0..size).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(i, j) in witnesses.keys() {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..size {
            let r = find(&mut parent, i);
            by_root.entry(r).or_default().push(i);
        }
        let classes: Vec<Vec<usize>> = by_root.into_values().collect();
        let mut class_of = vec![0; size];
        for (k, class) in classes.iter().enumerate() {
            for &i in class {
                class_of[i] = k;
            }
        }
        ObstructionGroup { relation, size, classes, class_of, witnesses }
    }

    pub fn relation(&self) -> GroupRelation {
        self.relation
    }

    /// Size of the index set I.
    pub fn index_count(&self) -> usize {
        self.size
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Equivalence classes, each sorted, ordered by least element.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    pub fn witnesses(&self) -> &BTreeMap<(usize, usize), EdgeWitness> {
        &self.witnesses
    }

    /// Group order 2^(classes - 1); the empty index set gives the trivial
    /// group.
    pub fn order(&self) -> u128 {
        if self.classes.is_empty() {
            1
        } else {
            1u128 << (self.classes.len() - 1)
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    /// Canonical basis: indicator maps of every class except the one
    /// containing the largest index, as per-index bit vectors.
    pub fn basis(&self) -> Vec<Vec<bool>> {
        if self.size == 0 {
            return Vec::new();
        }
        let last = self.class_of[self.size - 1];
        let mut out = Vec::new();
        for (k, class) in self.classes.iter().enumerate() {
            if k == last {
                continue;
            }
            let mut c = vec![false; self.size];
            for &i in class {
                c[i] = true;
            }
            out.push(c);
        }
        out
    }

    /// Whether a per-index map is constant on the classes.
    pub fn is_class_constant(&self, c: &[bool]) -> bool {
        c.len() == self.size
            && self
                .classes
                .iter()
                .all(|class| class.iter().all(|&i| c[i] == c[class[0]]))
    }
}

/// Build C: union-find over I with an edge wherever the V-sets meet,
/// witnessed by the least common place.
pub fn build_c(cfg: &Configuration, prime_bound: u64) -> Result<ObstructionGroup> {
    let factors = cfg.factors();
    let mut witnesses = BTreeMap::new();
    for i in 0..factors.len() {
        for j in i + 1..factors.len() {
            if let VIntersection::Witness(v) =
                v_intersection(&factors[i], &factors[j], prime_bound)?
            {
                witnesses.insert((i, j), EdgeWitness::Place(v));
            }
        }
    }
    Ok(ObstructionGroup::from_edges(
        factors.len(),
        GroupRelation::PlaceIntersection,
        witnesses,
    ))
}

/// Build C_indep: same construction with linear disjointness as the
/// elementary relation.
pub fn build_c_indep(cfg: &Configuration) -> ObstructionGroup {
    let factors = cfg.factors();
    let mut witnesses = BTreeMap::new();
    for i in 0..factors.len() {
        for j in i + 1..factors.len() {
            if is_linearly_disjoint(&factors[i], &factors[j]) {
                witnesses.insert((i, j), EdgeWitness::LinearlyDisjoint);
            }
        }
    }
    ObstructionGroup::from_edges(
        factors.len(),
        GroupRelation::LinearDisjointness,
        witnesses,
    )
}

/// Cap on the exponential tuple enumeration.
pub const SHA_INDEX_CAP: usize = 12;

/// The tuple model: the subgroup S of (Z/2)^m and the order of its
/// quotient by (1, ..., 1).
#[derive(Clone, Debug)]
pub struct ShaModel {
    size: usize,
    tuples: Vec<u32>,
}

impl ShaModel {
    pub fn index_count(&self) -> usize {
        self.size
    }

    /// Tuples of S as bit vectors, in mask order.
    pub fn tuples(&self) -> Vec<Vec<bool>> {
        self.tuples
            .iter()
            .map(|&t| (0..self.size).map(|i| t >> i & 1 == 1).collect())
            .collect()
    }

    pub(crate) fn masks(&self) -> &[u32] {
        &self.tuples
    }

    pub fn quotient_order(&self) -> u128 {
        if self.size == 0 {
            1
        } else {
            (self.tuples.len() / 2) as u128
        }
    }
}

/// Enumerate S by testing, for every two-part split of I, whether the
/// V-unions of the parts miss each other (special places plus pattern
/// enumeration; exact on the exactness domain).
pub fn brute_force_sha(cfg: &Configuration) -> Result<ShaModel> {
    let m = cfg.index_count();
    if m > SHA_INDEX_CAP {
        return Err(Error::SizeCapExceeded(m, SHA_INDEX_CAP));
    }
    let profiles = VProfiles::new(cfg.factors());
    let mut tuples = Vec::new();
    for mask in 0u32..1 << m {
        let ones: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
        let zeros: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 0).collect();
        let in_s = ones.is_empty()
            || zeros.is_empty()
            || profiles.evidence(&zeros, &ones).is_none();
        if in_s {
            tuples.push(mask);
        }
    }
    // Componentwise addition must keep S closed; a failure here is a bug
    // in the emptiness test, not in the input.
    for &a in &tuples {
        for &b in &tuples {
            if tuples.binary_search(&(a ^ b)).is_err() {
                return Err(Error::Internal(format!(
                    "tuple set not closed under addition: {a:b} + {b:b}"
                )));
            }
        }
    }
    Ok(ShaModel { size: m, tuples })
}

/// Verify the bijection between the tuple model and the class-constant
/// maps: same member sets, same quotient orders. False signals a bug.
pub fn check_iso_f(cfg: &Configuration, prime_bound: u64) -> Result<bool> {
    let group = build_c(cfg, prime_bound)?;
    let sha = brute_force_sha(cfg)?;
    let m = cfg.index_count();
    let mut constant_masks = Vec::new();
    for mask in 0u32..1 << m {
        let bits: Vec<bool> = (0..m).map(|i| mask >> i & 1 == 1).collect();
        if group.is_class_constant(&bits) {
            constant_masks.push(mask);
        }
    }
    Ok(constant_masks == sha.masks() && group.order() == sha.quotient_order())
}
