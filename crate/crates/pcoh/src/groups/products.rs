//! Semidirect products, permutation groups, and wreath products.

use std::sync::Arc;

use super::{ActionHom, Group, GroupError, Provenance};

/// K ⋊ P with (k1, p1)(k2, p2) = (k1 · (p1 · k2), p1 p2).
/// Elements are encoded k + |K| * p.
pub fn build_semidirect(k: &Group, p: &Group, act: &ActionHom) -> Result<Group, GroupError> {
    if act.point_order() != p.order() || act.target_order() != k.order() {
        return Err(GroupError::InvalidAction("action dimensions do not match".into()));
    }
    if k.prime() != p.prime() {
        return Err(GroupError::InvalidAction("mixed primes".into()));
    }
    let korder = k.order() as u32;
    let (kc, pc, actc) = (k.clone(), p.clone(), act.clone());
    Group::from_oracle(
        k.prime(),
        k.order() * p.order(),
        Provenance::Semidirect {
            kernel: Arc::new(k.clone()),
            point: Arc::new(p.clone()),
            action: act.clone(),
        },
        move |a, b| {
            let (k1, p1) = (a % korder, a / korder);
            let (k2, p2) = (b % korder, b / korder);
            kc.mul(k1, actc.apply(p1, k2)) + korder * pc.mul(p1, p2)
        },
    )
}

/// A permutation of {0, .., n-1} stored by images.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(pub Vec<u32>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n as u32).collect())
    }

    pub fn is_valid(&self) -> bool {
        let n = self.0.len();
        let mut seen = vec![false; n];
        for &i in &self.0 {
            if i as usize >= n || seen[i as usize] {
                return false;
            }
            seen[i as usize] = true;
        }
        true
    }

    pub fn compose(&self, other: &Permutation) -> Permutation {
        // (self ∘ other)(x) = self(other(x))
        Permutation(other.0.iter().map(|&x| self.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &img) in self.0.iter().enumerate() {
            inv[img as usize] = i as u32;
        }
        Permutation(inv)
    }
}

/// The permutation group generated by `gens` on n points, together with the
/// permutation realized by each element.
pub fn perm_group(
    prime: u32,
    n: usize,
    gens: &[Permutation],
) -> Result<(Group, Vec<Permutation>), GroupError> {
    for g in gens {
        if g.0.len() != n || !g.is_valid() {
            return Err(GroupError::NotAPermutationGroup(n));
        }
    }
    let id = Permutation::identity(n);
    let mut elems: Vec<Permutation> = vec![id.clone()];
    let mut index: std::collections::HashMap<Permutation, u32> =
        std::collections::HashMap::from([(id, 0u32)]);
    let mut frontier = vec![0usize];
    while let Some(i) = frontier.pop() {
        for g in gens {
            let next = g.compose(&elems[i]);
            if !index.contains_key(&next) {
                let idx = elems.len() as u32;
                index.insert(next.clone(), idx);
                elems.push(next);
                frontier.push(idx as usize);
            }
        }
    }
    let elems_clone = elems.clone();
    let index_clone = index.clone();
    let group = Group::from_oracle(prime, elems.len(), Provenance::Table, move |a, b| {
        index_clone[&elems_clone[a as usize].compose(&elems_clone[b as usize])]
    })?;
    Ok((group, elems))
}

/// The n-fold direct power of a group, tuples encoded in radix |G| with the
/// first coordinate least significant.
pub fn direct_power(g: &Group, n: usize) -> Result<Group, GroupError> {
    let base = g.order() as u64;
    let order = base.pow(n as u32);
    if order as usize > super::MAX_ORDER {
        return Err(GroupError::TooLarge(order as usize, super::MAX_ORDER));
    }
    let gc = g.clone();
    Group::from_oracle(g.prime(), order as usize, Provenance::Table, move |a, b| {
        let (mut a, mut b) = (a as u64, b as u64);
        let mut out = 0u64;
        let mut scale = 1u64;
        for _ in 0..n {
            out += gc.mul((a % base) as u32, (b % base) as u32) as u64 * scale;
            a /= base;
            b /= base;
            scale *= base;
        }
        out as u32
    })
}

/// G ≀ S for S ≤ Σ_n given by generating permutations: the direct power G^n
/// with S permuting coordinates, (σ · k)_i = k_{σ^{-1}(i)}.
pub fn build_wreath(
    g: &Group,
    n: usize,
    s_gens: &[Permutation],
) -> Result<Group, GroupError> {
    let (s_group, s_perms) = perm_group(g.prime(), n, s_gens)?;
    let power = direct_power(g, n)?;
    let base = g.order() as u64;
    // coordinate-permuting action of each S element on G^n
    let mut table = Vec::with_capacity(s_group.order());
    for perm in &s_perms {
        let inv = perm.inverse();
        let map: Vec<u32> = (0..power.order() as u64)
            .map(|tuple| {
                let mut coords = vec![0u64; n];
                let mut t = tuple;
                for c in coords.iter_mut() {
                    *c = t % base;
                    t /= base;
                }
                let mut out = 0u64;
                for i in (0..n).rev() {
                    out = out * base + coords[inv.0[i] as usize];
                }
                out as u32
            })
            .collect();
        table.push(map);
    }
    let gens: Vec<u32> = (0..s_group.order() as u32).collect();
    let act = ActionHom::from_generator_maps(&s_group, &power, &gens, &table)?;
    let sd = build_semidirect(&power, &s_group, &act)?;
    // re-tag provenance
    Group::from_oracle(
        g.prime(),
        sd.order(),
        Provenance::Wreath { factor: Arc::new(g.clone()), copies: n },
        |a, b| sd.mul(a, b),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::build_abelian;

    #[test]
    fn trivial_action_gives_direct_product() {
        let k = build_abelian(3, &[9]).unwrap();
        let p = build_abelian(3, &[3]).unwrap();
        let act = ActionHom::trivial(&p, &k);
        let g = build_semidirect(&k, &p, &act).unwrap();
        assert_eq!(g.order(), 27);
        assert!(g.is_abelian());
    }

    #[test]
    fn companion_semidirect_is_nonabelian_of_order_243() {
        let k = build_abelian(3, &[9, 9]).unwrap();
        let p = build_abelian(3, &[3]).unwrap();
        let act = ActionHom::from_matrices(&p, &k, &[vec![vec![0, -1], vec![1, -1]]]).unwrap();
        let g = build_semidirect(&k, &p, &act).unwrap();
        assert_eq!(g.order(), 243);
        assert!(!g.is_abelian());
    }

    #[test]
    fn wreath_c3_by_c3() {
        let c3 = build_abelian(3, &[3]).unwrap();
        let cycle = Permutation(vec![1, 2, 0]);
        let w = build_wreath(&c3, 3, &[cycle]).unwrap();
        assert_eq!(w.order(), 81);
        assert!(!w.is_abelian());
    }

    #[test]
    fn wreath_on_one_point_is_the_factor() {
        let c3 = build_abelian(3, &[3]).unwrap();
        let w = build_wreath(&c3, 1, &[Permutation::identity(1)]).unwrap();
        assert_eq!(w.order(), 3);
        assert!(w.is_abelian());
    }

    #[test]
    fn rejects_bad_permutation() {
        let c3 = build_abelian(3, &[3]).unwrap();
        let bad = Permutation(vec![0, 0, 1]);
        assert!(matches!(
            build_wreath(&c3, 3, &[bad]),
            Err(GroupError::NotAPermutationGroup(3))
        ));
    }
}
