//! Structural predicates on finite p-groups: Omega_1, powerful, p-central,
//! nilpotency class, sectional rank, and the regular-subgroup construction
//! B = preimage(A)^{p^2}.

use super::{Group, GroupError};

/// Omega_1(G): the subgroup generated by elements of order dividing p.
pub fn omega1(g: &Group) -> Vec<u32> {
    let p = g.prime() as u64;
    let gens: Vec<u32> = (0..g.order() as u32).filter(|&x| g.pow(x, p) == 0).collect();
    g.subgroup_closure(&gens)
}

/// G is powerful iff [G,G] is contained in G^p. Defined for odd p.
pub fn is_powerful(g: &Group) -> Result<bool, GroupError> {
    if g.prime() == 2 {
        return Err(GroupError::EvenPrime);
    }
    let power: std::collections::HashSet<u32> = g.power_subgroup().into_iter().collect();
    Ok(g.derived_subgroup().iter().all(|x| power.contains(x)))
}

/// G is p-central iff its elements of order p are central.
pub fn is_pcentral(g: &Group) -> bool {
    let p = g.prime() as u64;
    let center: std::collections::HashSet<u32> = g.center().into_iter().collect();
    (0..g.order() as u32).filter(|&x| g.pow(x, p) == 0).all(|x| center.contains(&x))
}

/// Nilpotency class via the lower central series.
pub fn nilpotency_class(g: &Group) -> u32 {
    let mut current: Vec<u32> = (0..g.order() as u32).collect();
    let mut class = 0u32;
    loop {
        if current.len() == 1 {
            return class;
        }
        // next = [current, G]
        let mut comms = Vec::new();
        for &a in &current {
            for b in 0..g.order() as u32 {
                comms.push(g.commutator(a, b));
            }
        }
        comms.sort_unstable();
        comms.dedup();
        let next = g.subgroup_closure(&comms);
        if next.len() == current.len() {
            // series stabilized above 1: not nilpotent (cannot happen for
            // p-groups, but keep the loop total)
            return class;
        }
        current = next;
        class += 1;
    }
}

/// All subgroups of g, as sorted element lists. Exponential in general; only
/// for orders within the configured bound.
fn all_subgroups(g: &Group, bound: usize) -> Result<Vec<Vec<u32>>, GroupError> {
    if g.order() > bound {
        return Err(GroupError::TooLarge(g.order(), bound));
    }
    let mut seen: std::collections::HashSet<Vec<u32>> = std::collections::HashSet::new();
    let trivial = vec![0u32];
    seen.insert(trivial.clone());
    let mut frontier = vec![trivial];
    while let Some(h) = frontier.pop() {
        for x in 1..g.order() as u32 {
            if h.binary_search(&x).is_ok() {
                continue;
            }
            let mut gens = h.clone();
            gens.push(x);
            let bigger = g.subgroup_closure(&gens);
            if seen.insert(bigger.clone()) {
                frontier.push(bigger);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// Sectional rank: max over subgroups H of d(H) = dim H / Phi(H).
pub fn sectional_rank(g: &Group, bound: usize) -> Result<u32, GroupError> {
    let subs = all_subgroups(g, bound)?;
    let mut best = 0u32;
    for elems in subs {
        if elems.len() == 1 {
            continue;
        }
        let (h, _) = g.subgroup(&elems)?;
        best = best.max(h.minimal_generator_count());
    }
    Ok(best)
}

#[derive(Debug, Clone)]
pub struct RegularSubgroupReport {
    /// elements of B = (pi^{-1}(A))^{p^2} inside G
    pub elements: Vec<u32>,
    pub powerful: bool,
    pub pcentral: bool,
    pub class: u32,
    /// |G : B| <= p^{4 rk(G)} |Q : A|
    pub index_bound_holds: bool,
}

/// The construction B = (pi^{-1}(A))^{p^2} for an extension
/// 1 -> C_p -> G -> Q -> 1 and a subgroup A <= Q of class at most two.
/// `projection[g]` is the image of g in Q. The report certifies that B is
/// powerful, p-central, of class <= 2, and that the index bound holds.
pub fn build_regular_subgroup(
    g: &Group,
    q: &Group,
    projection: &[u32],
    a_elems: &[u32],
    rank_bound: usize,
) -> Result<RegularSubgroupReport, GroupError> {
    if g.prime() == 2 {
        return Err(GroupError::EvenPrime);
    }
    if projection.len() != g.order() {
        return Err(GroupError::PreconditionFail("projection table has wrong size".into()));
    }
    if g.order() != q.order() * g.prime() as usize {
        return Err(GroupError::PreconditionFail("kernel of the projection must be C_p".into()));
    }
    if !q.is_subgroup(a_elems) {
        return Err(GroupError::PreconditionFail("A is not a subgroup of Q".into()));
    }
    let (a_group, _) = q.subgroup(a_elems)?;
    if nilpotency_class(&a_group) > 2 {
        return Err(GroupError::PreconditionFail("A has nilpotency class > 2".into()));
    }
    let a_set: std::collections::HashSet<u32> = a_elems.iter().copied().collect();
    let preimage: Vec<u32> =
        (0..g.order() as u32).filter(|&x| a_set.contains(&projection[x as usize])).collect();
    let p2 = (g.prime() as u64) * (g.prime() as u64);
    let powers: Vec<u32> = preimage.iter().map(|&c| g.pow(c, p2)).collect();
    let b = g.subgroup_closure(&powers);
    let (b_group, _) = g.subgroup(&b)?;
    let rk = sectional_rank(g, rank_bound)?;
    let index = g.order() / b.len();
    let quotient_index = q.order() / a_elems.len();
    let bound = (g.prime() as u64).pow(4 * rk) as usize * quotient_index;
    Ok(RegularSubgroupReport {
        powerful: is_powerful(&b_group)?,
        pcentral: is_pcentral(&b_group),
        class: nilpotency_class(&b_group),
        index_bound_holds: index <= bound,
        elements: b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{build_abelian, build_semidirect, build_twisted, ActionHom, AlternatingForm};

    #[test]
    fn abelian_predicates() {
        let g = build_abelian(3, &[9, 9]).unwrap();
        assert!(is_powerful(&g).unwrap());
        assert!(is_pcentral(&g));
        assert_eq!(nilpotency_class(&g), 1);
        assert_eq!(sectional_rank(&g, 243).unwrap(), 2);
    }

    #[test]
    fn cyclic_rank_one() {
        let g = build_abelian(3, &[3]).unwrap();
        assert_eq!(sectional_rank(&g, 243).unwrap(), 1);
        assert_eq!(omega1(&g).len(), 3);
    }

    #[test]
    fn omega1_of_c9_has_order_3() {
        let g = build_abelian(3, &[9]).unwrap();
        assert_eq!(omega1(&g).len(), 3);
    }

    #[test]
    fn extraspecial_27_rank_two() {
        // exponent-3 extraspecial group of order 27 as C_3^2 twisted... it is
        // not a twist (p-central fails); build as semidirect C_3^2 x| C_3 via
        // the unipotent matrix [[1,1],[0,1]].
        let k = build_abelian(3, &[3, 3]).unwrap();
        let p = build_abelian(3, &[3]).unwrap();
        let act = ActionHom::from_matrices(&p, &k, &[vec![vec![1, 1], vec![0, 1]]]).unwrap();
        let g = build_semidirect(&k, &p, &act).unwrap();
        assert_eq!(g.order(), 27);
        assert_eq!(nilpotency_class(&g), 2);
        assert_eq!(g.exponent(), 3);
        assert_eq!(sectional_rank(&g, 243).unwrap(), 2);
    }

    #[test]
    fn twisted_group_conditions_match_lambda_conditions() {
        // A = C_9^2 with lambda(e1,e2) = 3 e1 is powerful and p-central;
        // on C_3 x C_9 with lambda(e1,e2) = 3 e2, Im = <3e2> <= pA and
        // Omega_1 = <e1, 3e2> vs Rad: e1 pairs to 3e2 != 0, so not p-central.
        let a = build_abelian(3, &[3, 9]).unwrap();
        // element 9 in mixed radix (3,9) has coordinates (0,3), i.e. 3 e2
        let lam = AlternatingForm::new(&a, &[(0, 1, 9)]).unwrap();
        let t = build_twisted(&a, &lam).unwrap();
        assert!(is_powerful(&t).unwrap());
        assert!(!is_pcentral(&t));
    }

    #[test]
    fn regular_subgroup_cyclic_case() {
        // G = C_27 -> Q = C_9 with kernel C_3; A = Q.
        let g = build_abelian(3, &[27]).unwrap();
        let q = build_abelian(3, &[9]).unwrap();
        let projection: Vec<u32> = (0..27u32).map(|x| x % 9).collect();
        let a: Vec<u32> = (0..9).collect();
        let rep = build_regular_subgroup(&g, &q, &projection, &a, 243).unwrap();
        assert!(rep.powerful && rep.pcentral);
        assert!(rep.class <= 2);
        assert!(rep.index_bound_holds);
        // (pi^{-1}(A))^9 = C_27^9 = C_3
        assert_eq!(rep.elements.len(), 3);
    }
}
