//! Construction and interrogation of the finite p-groups the engine
//! manipulates: abelian groups, twisted abelian groups, semidirect and wreath
//! products, cocycle extensions and Baer sums, constructible data, and the
//! predicates powerful / p-central / nilpotency class / sectional rank.
//!
//! Elements are encoded as indices in `[0, |G|)` with the identity at 0; a
//! full multiplication table is materialized (group orders in scope are at
//! most a few thousand), so multiplication is a single lookup in every hot
//! loop. The provenance tag records how a group was built; structured
//! constructors keep their ingredients so that extensions can be Baer-summed
//! and twisted groups can answer questions about their forms.

mod abelian;
mod actions;
mod constructible;
pub mod dsl;
mod extensions;
mod iso;
mod predicates;
mod products;

pub use abelian::{build_abelian, build_twisted, AlternatingForm};
pub use abelian::{encoding_of as abelian_encoding, AbelianEncoding};
pub use actions::ActionHom;
pub use constructible::{
    build_constructible, omega_ep_cover, ConstructibleDatum, ConstructiblePair, OmegaEpWitness,
};
pub use extensions::{baer_sum, build_extension, Extension};
pub use iso::brute_force_isomorphic;
pub use predicates::{
    build_regular_subgroup, is_pcentral, is_powerful, nilpotency_class, omega1, sectional_rank,
    RegularSubgroupReport,
};
pub use products::{build_semidirect, build_wreath, perm_group, Permutation};

use std::sync::Arc;
use thiserror::Error;

use crate::fp::is_prime;

/// Hard cap on materialized group order (multiplication tables are |G|^2).
pub const MAX_ORDER: usize = 6561;

/// Default bound for exhaustive isomorphism search.
pub const DEFAULT_ISO_BOUND: usize = 729;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("exponent {0} is not a power of the prime {1}")]
    BadExponent(u64, u32),
    #[error("p = 2 with a factor of exponent 2 is outside the supported range")]
    ExponentTwoAtTwo,
    #[error("operation requires an odd prime")]
    EvenPrime,
    #[error("an alternating form must vanish on the diagonal and be antisymmetric")]
    NotAlternating,
    #[error("form value at ({0},{1}) is incompatible with the generator exponents")]
    FormNotBiadditive(usize, usize),
    #[error("Im(lambda) is not contained in Rad(lambda)")]
    TwistConditionViolated,
    #[error("action is not by automorphisms or not a homomorphism: {0}")]
    InvalidAction(String),
    #[error("permutation input is not a valid permutation of {0} points")]
    NotAPermutationGroup(usize),
    #[error("cocycle identity fails at ({0},{1},{2})")]
    CocycleIdentityFails(u32, u32, u32),
    #[error("cocycle is not normalized")]
    CocycleNotNormalized,
    #[error("extensions do not match: {0}")]
    MismatchedExtensions(String),
    #[error("group order {0} exceeds the configured bound {1}")]
    TooLarge(usize, usize),
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("group order {0} is not a power of p = {1}")]
    NotAPGroup(usize, u32),
    #[error("subset is not a subgroup (closure fails at {0},{1})")]
    NotASubgroup(u32, u32),
    #[error("subgroup is not normal (conjugation by {0} escapes)")]
    NotNormal(u32),
    #[error("precondition failed: {0}")]
    PreconditionFail(String),
    #[error("lattice error: {0}")]
    Lattice(String),
}

/// How a group was built; carries the data needed to interpret elements.
#[derive(Debug, Clone)]
pub enum Provenance {
    /// Mixed-radix coordinates with the given exponents.
    Abelian { exponents: Vec<u64> },
    /// Same carrier and encoding as `base`, operation twisted by a form.
    Twisted { base: Arc<Group>, form: AlternatingForm },
    /// Pairs (k, p) encoded as k + |K| * p.
    Semidirect { kernel: Arc<Group>, point: Arc<Group>, action: ActionHom },
    /// Wreath product G wr S: tuples G^n followed by the permutation part.
    Wreath { factor: Arc<Group>, copies: usize },
    /// Pairs (z, q) encoded as z + |Z| * q with multiplication twisted by a
    /// 2-cocycle.
    Extension { data: Arc<Extension> },
    /// Plain multiplication table (quotients, subgroups, parsed tables).
    Table,
}

/// A finite p-group with element encoding `[0, |G|)`, identity 0.
#[derive(Clone)]
pub struct Group {
    p: u32,
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    provenance: Provenance,
}

impl std::fmt::Debug for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Group(p={}, order={}, {:?})", self.p, self.order, self.kind_name())
    }
}

impl Group {
    /// Builds a group from a multiplication oracle. Checks that the order is
    /// a power of p, that 0 is a two-sided identity, that inverses exist, and
    /// that associativity holds (exhaustively up to order 243, on a
    /// deterministic sample grid above).
    pub fn from_oracle(
        p: u32,
        order: usize,
        provenance: Provenance,
        mul: impl Fn(u32, u32) -> u32,
    ) -> Result<Self, GroupError> {
        if !is_prime(p as u64) {
            return Err(GroupError::NotPrime(p));
        }
        if order > MAX_ORDER {
            return Err(GroupError::TooLarge(order, MAX_ORDER));
        }
        let mut m = order;
        while m > 1 {
            if m % p as usize != 0 {
                return Err(GroupError::NotAPGroup(order, p));
            }
            m /= p as usize;
        }
        let mut table = vec![0u32; order * order];
        for a in 0..order {
            for b in 0..order {
                let v = mul(a as u32, b as u32);
                if v as usize >= order {
                    return Err(GroupError::PreconditionFail(format!(
                        "multiplication escapes the carrier: {a}*{b} = {v}"
                    )));
                }
                table[a * order + b] = v;
            }
        }
        let mut g = Group { p, order, mul: table, inv: Vec::new(), provenance };
        g.check_identity_and_inverses()?;
        g.check_associativity()?;
        Ok(g)
    }

    fn check_identity_and_inverses(&mut self) -> Result<(), GroupError> {
        for a in 0..self.order as u32 {
            if self.mul_raw(0, a) != a || self.mul_raw(a, 0) != a {
                return Err(GroupError::PreconditionFail(format!("0 is not an identity at {a}")));
            }
        }
        let mut inv = vec![u32::MAX; self.order];
        for a in 0..self.order as u32 {
            for b in 0..self.order as u32 {
                if self.mul_raw(a, b) == 0 && self.mul_raw(b, a) == 0 {
                    inv[a as usize] = b;
                    break;
                }
            }
            if inv[a as usize] == u32::MAX {
                return Err(GroupError::PreconditionFail(format!("{a} has no inverse")));
            }
        }
        self.inv = inv;
        Ok(())
    }

    fn check_associativity(&self) -> Result<(), GroupError> {
        let n = self.order as u32;
        let check = |a: u32, b: u32, c: u32| -> Result<(), GroupError> {
            if self.mul_raw(self.mul_raw(a, b), c) != self.mul_raw(a, self.mul_raw(b, c)) {
                return Err(GroupError::PreconditionFail(format!(
                    "associativity fails at ({a},{b},{c})"
                )));
            }
            Ok(())
        };
        if self.order <= 243 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            // deterministic grid: all triples from a stride-generated subset
            let stride = (self.order / 37).max(1) as u32;
            let sample: Vec<u32> = (0..n).step_by(stride as usize).collect();
            for &a in &sample {
                for &b in &sample {
                    for &c in &sample {
                        check(a, b, c)?;
                    }
                }
            }
            // plus every triple involving generators of the group
            let gens = self.small_generating_set();
            for &a in &gens {
                for b in 0..n {
                    for &c in &gens {
                        check(a, b, c)?;
                        check(b, a, c)?;
                        check(a, c, b)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Runs the full |G|^3 associativity check regardless of order.
    pub fn verify_axioms_exhaustively(&self) -> Result<(), GroupError> {
        let n = self.order as u32;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.mul_raw(self.mul_raw(a, b), c) != self.mul_raw(a, self.mul_raw(b, c)) {
                        return Err(GroupError::PreconditionFail(format!(
                            "associativity fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    #[inline(always)]
    pub fn mul_raw(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.order + b as usize]
    }

    #[inline(always)]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul_raw(a, b)
    }

    #[inline(always)]
    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn identity(&self) -> u32 {
        0
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    fn kind_name(&self) -> &'static str {
        match self.provenance {
            Provenance::Abelian { .. } => "abelian",
            Provenance::Twisted { .. } => "twisted",
            Provenance::Semidirect { .. } => "semidirect",
            Provenance::Wreath { .. } => "wreath",
            Provenance::Extension { .. } => "extension",
            Provenance::Table => "table",
        }
    }

    /// The full multiplication table, row-major.
    pub fn table(&self) -> &[u32] {
        &self.mul
    }

    pub fn conjugate(&self, g: u32, x: u32) -> u32 {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn commutator(&self, a: u32, b: u32) -> u32 {
        // [a,b] = a^{ -1} b^{-1} a b
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    pub fn pow(&self, g: u32, e: u64) -> u32 {
        let mut acc = 0u32;
        for _ in 0..e {
            acc = self.mul(acc, g);
        }
        acc
    }

    pub fn element_order(&self, g: u32) -> u64 {
        let mut x = g;
        let mut k = 1u64;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order as u32;
        for a in 0..n {
            for b in (a + 1)..n {
                if self.mul_raw(a, b) != self.mul_raw(b, a) {
                    return false;
                }
            }
        }
        true
    }

    pub fn exponent(&self) -> u64 {
        (0..self.order as u32).map(|g| self.element_order(g)).max().unwrap_or(1)
    }

    /// Multiset of element orders, as (order, count) sorted by order.
    pub fn order_profile(&self) -> Vec<(u64, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for g in 0..self.order as u32 {
            *counts.entry(self.element_order(g)).or_insert(0) += 1;
        }
        counts.into_iter().collect()
    }

    /// Closure of a set of elements under multiplication and inverses.
    pub fn subgroup_closure(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut elems = vec![0u32];
        let mut frontier: Vec<u32> = Vec::new();
        for &g in gens {
            if !seen[g as usize] {
                seen[g as usize] = true;
                elems.push(g);
                frontier.push(g);
            }
        }
        while let Some(x) = frontier.pop() {
            for &g in gens {
                for y in [self.mul(x, g), self.mul(g, x), self.mul(x, self.inv(g))] {
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        elems.push(y);
                        frontier.push(y);
                    }
                }
            }
        }
        elems.sort_unstable();
        elems
    }

    /// A small generating set found greedily: each step adds the element
    /// (lowest index on ties) whose closure with the current set is largest.
    /// For p-groups this realizes a minimal generating sequence.
    pub fn small_generating_set(&self) -> Vec<u32> {
        let mut gens: Vec<u32> = Vec::new();
        let mut sub = vec![0u32];
        while sub.len() < self.order {
            let in_sub: std::collections::HashSet<u32> = sub.iter().copied().collect();
            let mut best: Option<(usize, u32)> = None;
            for g in 0..self.order as u32 {
                if in_sub.contains(&g) {
                    continue;
                }
                gens.push(g);
                let grown = self.subgroup_closure(&gens).len();
                gens.pop();
                if best.is_none_or(|(b, _)| grown > b) {
                    best = Some((grown, g));
                }
                if grown == self.order {
                    break;
                }
            }
            let (_, g) = best.unwrap();
            gens.push(g);
            sub = self.subgroup_closure(&gens);
        }
        gens
    }

    pub fn center(&self) -> Vec<u32> {
        let n = self.order as u32;
        (0..n).filter(|&z| (0..n).all(|g| self.mul_raw(z, g) == self.mul_raw(g, z))).collect()
    }

    pub fn derived_subgroup(&self) -> Vec<u32> {
        let n = self.order as u32;
        let mut comms = Vec::new();
        for a in 0..n {
            for b in 0..n {
                comms.push(self.commutator(a, b));
            }
        }
        comms.sort_unstable();
        comms.dedup();
        self.subgroup_closure(&comms)
    }

    /// The subgroup generated by all p-th powers.
    pub fn power_subgroup(&self) -> Vec<u32> {
        let powers: Vec<u32> = (0..self.order as u32).map(|g| self.pow(g, self.p as u64)).collect();
        self.subgroup_closure(&powers)
    }

    /// Frattini subgroup of a p-group: G^p [G,G].
    pub fn frattini(&self) -> Vec<u32> {
        let mut gens = self.power_subgroup();
        gens.extend(self.derived_subgroup());
        self.subgroup_closure(&gens)
    }

    /// Minimal number of generators d(G) = log_p |G / Frattini|.
    pub fn minimal_generator_count(&self) -> u32 {
        let phi = self.frattini();
        let idx = self.order / phi.len();
        let mut d = 0;
        let mut m = idx;
        while m > 1 {
            m /= self.p as usize;
            d += 1;
        }
        d
    }

    /// Checks that `elems` (sorted) is a subgroup.
    pub fn is_subgroup(&self, elems: &[u32]) -> bool {
        let set: std::collections::HashSet<u32> = elems.iter().copied().collect();
        if !set.contains(&0) {
            return false;
        }
        elems.iter().all(|&a| {
            set.contains(&self.inv(a)) && elems.iter().all(|&b| set.contains(&self.mul(a, b)))
        })
    }

    pub fn is_normal(&self, elems: &[u32]) -> bool {
        let set: std::collections::HashSet<u32> = elems.iter().copied().collect();
        (0..self.order as u32).all(|g| elems.iter().all(|&x| set.contains(&self.conjugate(g, x))))
    }

    /// Quotient G/N by a normal subgroup, with the projection map.
    /// Coset representatives are the minimal element indices, so the
    /// construction is deterministic.
    pub fn quotient(&self, normal: &[u32]) -> Result<(Group, Vec<u32>), GroupError> {
        if !self.is_subgroup(normal) {
            return Err(GroupError::NotASubgroup(0, 0));
        }
        if !self.is_normal(normal) {
            return Err(GroupError::NotNormal(0));
        }
        let mut coset_of = vec![u32::MAX; self.order];
        let mut reps: Vec<u32> = Vec::new();
        for g in 0..self.order as u32 {
            if coset_of[g as usize] != u32::MAX {
                continue;
            }
            let idx = reps.len() as u32;
            reps.push(g);
            for &n in normal {
                coset_of[self.mul(g, n) as usize] = idx;
            }
        }
        let q_order = reps.len();
        let reps_clone = reps.clone();
        let coset_clone = coset_of.clone();
        let q = Group::from_oracle(self.p, q_order, Provenance::Table, |a, b| {
            coset_clone[self.mul(reps_clone[a as usize], reps_clone[b as usize]) as usize]
        })?;
        Ok((q, coset_of))
    }

    /// The subgroup as a group in its own right, with the embedding map
    /// (new index -> old element).
    pub fn subgroup(&self, elems: &[u32]) -> Result<(Group, Vec<u32>), GroupError> {
        if !self.is_subgroup(elems) {
            return Err(GroupError::NotASubgroup(0, 0));
        }
        let mut sorted = elems.to_vec();
        sorted.sort_unstable();
        // identity must be index 0
        debug_assert_eq!(sorted[0], 0);
        let mut index_of = std::collections::HashMap::new();
        for (i, &e) in sorted.iter().enumerate() {
            index_of.insert(e, i as u32);
        }
        let sorted_clone = sorted.clone();
        let g = Group::from_oracle(self.p, sorted.len(), Provenance::Table, |a, b| {
            index_of[&self.mul(sorted_clone[a as usize], sorted_clone[b as usize])]
        })?;
        Ok((g, sorted))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_basics() {
        let g = build_abelian(3, &[9]).unwrap();
        assert_eq!(g.order(), 9);
        assert_eq!(g.element_order(1), 9);
        assert_eq!(g.exponent(), 9);
        assert!(g.is_abelian());
        g.verify_axioms_exhaustively().unwrap();
    }

    #[test]
    fn subgroup_and_quotient_of_c9() {
        let g = build_abelian(3, &[9]).unwrap();
        let omega = omega1(&g);
        assert_eq!(omega.len(), 3);
        let (q, _) = g.quotient(&omega).unwrap();
        assert_eq!(q.order(), 3);
        assert_eq!(q.exponent(), 3);
    }

    #[test]
    fn generating_set_of_rank_two() {
        let g = build_abelian(3, &[9, 9]).unwrap();
        assert_eq!(g.minimal_generator_count(), 2);
        let gens = g.small_generating_set();
        assert_eq!(g.subgroup_closure(&gens).len(), 81);
    }
}
