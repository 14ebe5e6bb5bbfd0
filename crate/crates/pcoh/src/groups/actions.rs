//! Actions of a p-group on another group, stored as one permutation of the
//! target per acting element.

use super::abelian::encoding_of;
use super::{Group, GroupError};

/// A homomorphism P -> Aut(K), tabulated on every element of P.
#[derive(Debug, Clone)]
pub struct ActionHom {
    point_order: usize,
    target_order: usize,
    /// table[p][k] = p . k
    table: Vec<Vec<u32>>,
}

impl ActionHom {
    pub fn trivial(point: &Group, target: &Group) -> Self {
        ActionHom {
            point_order: point.order(),
            target_order: target.order(),
            table: vec![(0..target.order() as u32).collect(); point.order()],
        }
    }

    /// Builds from images of a generating set of P. `gens[i]` acts by the
    /// permutation `maps[i]`. The table is propagated along a breadth-first
    /// factorization of P and then the automorphism and homomorphism
    /// properties are verified exhaustively.
    pub fn from_generator_maps(
        point: &Group,
        target: &Group,
        gens: &[u32],
        maps: &[Vec<u32>],
    ) -> Result<Self, GroupError> {
        if gens.len() != maps.len() {
            return Err(GroupError::InvalidAction("one map per generator required".into()));
        }
        let n = point.order();
        let mut table: Vec<Option<Vec<u32>>> = vec![None; n];
        table[0] = Some((0..target.order() as u32).collect());
        let mut queue = std::collections::VecDeque::from([0u32]);
        while let Some(q) = queue.pop_front() {
            for (&s, m) in gens.iter().zip(maps) {
                let sq = point.mul(s, q);
                if table[sq as usize].is_none() {
                    let prev = table[q as usize].as_ref().unwrap();
                    let composed: Vec<u32> = (0..target.order())
                        .map(|k| m[prev[k] as usize])
                        .collect();
                    table[sq as usize] = Some(composed);
                    queue.push_back(sq);
                }
            }
        }
        if table.iter().any(|t| t.is_none()) {
            return Err(GroupError::InvalidAction("generators do not generate P".into()));
        }
        let act = ActionHom {
            point_order: n,
            target_order: target.order(),
            table: table.into_iter().map(Option::unwrap).collect(),
        };
        act.verify(point, target)?;
        Ok(act)
    }

    /// Action of an abelian point group on an abelian target via one integer
    /// matrix per coordinate generator of P: k |-> M . coords(k).
    pub fn from_matrices(
        point: &Group,
        target: &Group,
        mats: &[Vec<Vec<i64>>],
    ) -> Result<Self, GroupError> {
        let p_enc = encoding_of(point).ok_or_else(|| {
            GroupError::InvalidAction("matrix actions need an abelian point group".into())
        })?;
        let t_enc = encoding_of(target).ok_or_else(|| {
            GroupError::InvalidAction("matrix actions need an abelian target".into())
        })?;
        if mats.len() != p_enc.rank() {
            return Err(GroupError::InvalidAction(format!(
                "need {} matrices, got {}",
                p_enc.rank(),
                mats.len()
            )));
        }
        let d = t_enc.rank();
        let mut gens = Vec::new();
        let mut maps = Vec::new();
        for (i, m) in mats.iter().enumerate() {
            if m.len() != d || m.iter().any(|r| r.len() != d) {
                return Err(GroupError::InvalidAction(format!("matrix {i} is not {d}x{d}")));
            }
            let coords: Vec<u64> = (0..p_enc.rank()).map(|t| u64::from(t == i)).collect();
            gens.push(p_enc.encode(&coords) as u32);
            let perm: Vec<u32> = (0..target.order() as u64)
                .map(|k| {
                    let c = t_enc.decode(k);
                    let out: Vec<u64> = (0..d)
                        .map(|r| {
                            let mut acc: i64 = 0;
                            for (j, &cj) in c.iter().enumerate() {
                                acc += m[r][j] * cj as i64;
                            }
                            acc.rem_euclid(t_enc.exponents[r] as i64) as u64
                        })
                        .collect();
                    t_enc.encode(&out) as u32
                })
                .collect();
            maps.push(perm);
        }
        Self::from_generator_maps(point, target, &gens, &maps)
    }

    fn verify(&self, point: &Group, target: &Group) -> Result<(), GroupError> {
        // each image an automorphism
        for (p, perm) in self.table.iter().enumerate() {
            let mut seen = vec![false; self.target_order];
            for &img in perm {
                if seen[img as usize] {
                    return Err(GroupError::InvalidAction(format!("{p} does not act bijectively")));
                }
                seen[img as usize] = true;
            }
            if perm[0] != 0 {
                return Err(GroupError::InvalidAction(format!("{p} moves the identity")));
            }
            for a in 0..self.target_order as u32 {
                for b in 0..self.target_order as u32 {
                    if perm[target.mul(a, b) as usize]
                        != target.mul(perm[a as usize], perm[b as usize])
                    {
                        return Err(GroupError::InvalidAction(format!(
                            "{p} is not an automorphism at ({a},{b})"
                        )));
                    }
                }
            }
        }
        // homomorphism property
        for p1 in 0..self.point_order as u32 {
            for p2 in 0..self.point_order as u32 {
                let p12 = point.mul(p1, p2);
                for k in 0..self.target_order as u32 {
                    if self.apply(p12, k) != self.apply(p1, self.apply(p2, k)) {
                        return Err(GroupError::InvalidAction(format!(
                            "not a homomorphism at ({p1},{p2})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    #[inline(always)]
    pub fn apply(&self, p: u32, k: u32) -> u32 {
        self.table[p as usize][k as usize]
    }

    pub fn point_order(&self) -> usize {
        self.point_order
    }

    pub fn target_order(&self) -> usize {
        self.target_order
    }

    /// Whether lambda is P-equivariant: p . lambda(a, b) = lambda(p.a, p.b).
    pub fn is_form_equivariant(&self, form: &super::AlternatingForm) -> bool {
        let order = self.target_order as u64;
        for p in 0..self.point_order as u32 {
            for a in 0..order {
                for b in 0..order {
                    let lhs = self.apply(p, form.eval(a, b) as u32) as u64;
                    let rhs =
                        form.eval(self.apply(p, a as u32) as u64, self.apply(p, b as u32) as u64);
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::build_abelian;

    #[test]
    fn companion_matrix_action_on_c9_squared() {
        let k = build_abelian(3, &[9, 9]).unwrap();
        let p = build_abelian(3, &[3]).unwrap();
        let m = vec![vec![0, -1], vec![1, -1]];
        let act = ActionHom::from_matrices(&p, &k, &[m]).unwrap();
        // order of the action is 3: applying the generator thrice fixes all
        for x in 0..81u32 {
            let y = act.apply(1, act.apply(1, act.apply(1, x)));
            assert_eq!(y, x);
        }
    }

    #[test]
    fn rejects_singular_matrix() {
        let k = build_abelian(3, &[3, 3]).unwrap();
        let p = build_abelian(3, &[3]).unwrap();
        let m = vec![vec![1, 1], vec![1, 1]];
        assert!(ActionHom::from_matrices(&p, &k, &[m]).is_err());
    }
}
