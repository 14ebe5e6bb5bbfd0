//! Brute-force isomorphism testing: invariant screening followed by
//! generator-image backtracking with incremental closure.

use super::{Group, GroupError};

fn invariants(g: &Group) -> (usize, bool, u64, Vec<(u64, usize)>, usize, usize, usize) {
    (
        g.order(),
        g.is_abelian(),
        g.exponent(),
        g.order_profile(),
        g.center().len(),
        g.derived_subgroup().len(),
        super::omega1(g).len(),
    )
}

/// Per-element invariant for candidate matching: (order, centralizer size).
fn element_signature(g: &Group, x: u32) -> (u64, usize) {
    let n = g.order() as u32;
    let cent = (0..n).filter(|&y| g.mul(x, y) == g.mul(y, x)).count();
    (g.element_order(x), cent)
}

/// Decides isomorphism for |G1| = |G2| <= bound. Screens cheap invariants,
/// then backtracks over images of a generating sequence, growing the partial
/// map by closure and failing fast on conflicts.
pub fn brute_force_isomorphic(g1: &Group, g2: &Group, bound: usize) -> Result<bool, GroupError> {
    if g1.order() != g2.order() {
        return Ok(false);
    }
    if g1.order() > bound {
        return Err(GroupError::TooLarge(g1.order(), bound));
    }
    if invariants(g1) != invariants(g2) {
        return Ok(false);
    }
    let gens = g1.small_generating_set();
    let sigs1: Vec<(u64, usize)> = gens.iter().map(|&x| element_signature(g1, x)).collect();
    let mut sig_cache: std::collections::HashMap<u32, (u64, usize)> = Default::default();
    let mut candidates: Vec<Vec<u32>> = Vec::new();
    for sig in &sigs1 {
        let cands: Vec<u32> = (0..g2.order() as u32)
            .filter(|&y| {
                *sig_cache.entry(y).or_insert_with(|| element_signature(g2, y)) == *sig
            })
            .collect();
        if cands.is_empty() {
            return Ok(false);
        }
        candidates.push(cands);
    }
    let mut images = vec![0u32; gens.len()];
    Ok(backtrack(g1, g2, &gens, &candidates, &mut images, 0))
}

fn backtrack(
    g1: &Group,
    g2: &Group,
    gens: &[u32],
    candidates: &[Vec<u32>],
    images: &mut [u32],
    depth: usize,
) -> bool {
    if depth == gens.len() {
        return check_full_map(g1, g2, gens, images);
    }
    for &cand in &candidates[depth] {
        images[depth] = cand;
        if partial_map(g1, g2, &gens[..=depth], &images[..=depth]).is_some()
            && backtrack(g1, g2, gens, candidates, images, depth + 1)
        {
            return true;
        }
    }
    false
}

/// Grows the map on the subgroup generated by the chosen generators; returns
/// the partial map (g1 element -> g2 element) or None on conflict.
fn partial_map(g1: &Group, g2: &Group, gens: &[u32], images: &[u32]) -> Option<Vec<u32>> {
    let mut map = vec![u32::MAX; g1.order()];
    map[0] = 0;
    let mut known: Vec<u32> = vec![0];
    for (&g, &img) in gens.iter().zip(images) {
        if map[g as usize] == u32::MAX {
            map[g as usize] = img;
            known.push(g);
        } else if map[g as usize] != img {
            return None;
        }
    }
    let mut head = 0;
    while head < known.len() {
        let a = known[head];
        head += 1;
        for (&g, &img) in gens.iter().zip(images) {
            for (x, y) in [(g1.mul(a, g), g2.mul(map[a as usize], img)),
                (g1.mul(g, a), g2.mul(img, map[a as usize]))]
            {
                if map[x as usize] == u32::MAX {
                    map[x as usize] = y;
                    known.push(x);
                } else if map[x as usize] != y {
                    return None;
                }
            }
        }
    }
    // injectivity on the generated subgroup
    let mut seen = vec![false; g2.order()];
    for &a in &known {
        let img = map[a as usize] as usize;
        if seen[img] {
            return None;
        }
        seen[img] = true;
    }
    Some(map)
}

fn check_full_map(g1: &Group, g2: &Group, gens: &[u32], images: &[u32]) -> bool {
    let Some(map) = partial_map(g1, g2, gens, images) else { return false };
    if map.iter().any(|&m| m == u32::MAX) {
        return false; // proper subgroup only
    }
    let n = g1.order() as u32;
    for a in 0..n {
        for b in 0..n {
            if map[g1.mul(a, b) as usize] != g2.mul(map[a as usize], map[b as usize]) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{build_abelian, build_semidirect, ActionHom};

    #[test]
    fn cyclic_vs_elementary() {
        let c9 = build_abelian(3, &[9]).unwrap();
        let c33 = build_abelian(3, &[3, 3]).unwrap();
        assert!(!brute_force_isomorphic(&c9, &c33, 729).unwrap());
    }

    #[test]
    fn self_isomorphic() {
        let g = build_abelian(3, &[3, 9]).unwrap();
        assert!(brute_force_isomorphic(&g, &g, 729).unwrap());
    }

    #[test]
    fn reordered_factors_isomorphic() {
        let a = build_abelian(3, &[3, 9]).unwrap();
        let b = build_abelian(3, &[9, 3]).unwrap();
        assert!(brute_force_isomorphic(&a, &b, 729).unwrap());
    }

    #[test]
    fn bound_is_enforced() {
        let g = build_abelian(3, &[27, 27]).unwrap();
        assert!(matches!(
            brute_force_isomorphic(&g, &g, 500),
            Err(GroupError::TooLarge(..))
        ));
    }

    #[test]
    fn nonabelian_not_isomorphic_to_abelian() {
        let k = build_abelian(3, &[9, 9]).unwrap();
        let p = build_abelian(3, &[3]).unwrap();
        let act = ActionHom::from_matrices(&p, &k, &[vec![vec![0, -1], vec![1, -1]]]).unwrap();
        let g = build_semidirect(&k, &p, &act).unwrap();
        let h = build_abelian(3, &[9, 9, 3]).unwrap();
        assert!(!brute_force_isomorphic(&g, &h, 729).unwrap());
    }
}
