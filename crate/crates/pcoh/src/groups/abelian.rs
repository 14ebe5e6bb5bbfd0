//! Abelian p-groups in mixed-radix coordinates and their twisted versions
//! A_lambda, where the sum is deformed by half an alternating biadditive form.

use std::sync::Arc;

use super::{Group, GroupError, Provenance};

/// Coordinate arithmetic for C_{e_1} x ... x C_{e_d}; the first coordinate is
/// the least significant digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianEncoding {
    pub exponents: Vec<u64>,
}

impl AbelianEncoding {
    pub fn order(&self) -> u64 {
        self.exponents.iter().product()
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn decode(&self, mut idx: u64) -> Vec<u64> {
        let mut c = Vec::with_capacity(self.exponents.len());
        for &e in &self.exponents {
            c.push(idx % e);
            idx /= e;
        }
        c
    }

    /// Single coordinate without allocating.
    pub fn coord(&self, mut idx: u64, i: usize) -> u64 {
        for &e in &self.exponents[..i] {
            idx /= e;
        }
        idx % self.exponents[i]
    }

    pub fn encode(&self, coords: &[u64]) -> u64 {
        let mut idx = 0u64;
        for (i, &e) in self.exponents.iter().enumerate().rev() {
            idx = idx * e + coords[i] % e;
        }
        idx
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (ca, cb) = (self.decode(a), self.decode(b));
        let sum: Vec<u64> =
            ca.iter().zip(&cb).zip(&self.exponents).map(|((&x, &y), &e)| (x + y) % e).collect();
        self.encode(&sum)
    }

    pub fn neg(&self, a: u64) -> u64 {
        let ca = self.decode(a);
        let n: Vec<u64> = ca.iter().zip(&self.exponents).map(|(&x, &e)| (e - x) % e).collect();
        self.encode(&n)
    }

    pub fn smul(&self, k: i64, a: u64) -> u64 {
        let ca = self.decode(a);
        let n: Vec<u64> = ca
            .iter()
            .zip(&self.exponents)
            .map(|(&x, &e)| ((k.rem_euclid(e as i64) as u64) * x) % e)
            .collect();
        self.encode(&n)
    }

    /// The element x/2, which exists uniquely when the order is odd.
    pub fn halve(&self, a: u64) -> u64 {
        let ca = self.decode(a);
        let n: Vec<u64> = ca
            .iter()
            .zip(&self.exponents)
            .map(|(&x, &e)| {
                debug_assert!(e % 2 == 1);
                (((e + 1) / 2) * x) % e
            })
            .collect();
        self.encode(&n)
    }
}

/// Extracts the encoding of an abelian (or twisted abelian) group.
pub fn encoding_of(g: &Group) -> Option<AbelianEncoding> {
    match g.provenance() {
        Provenance::Abelian { exponents } => {
            Some(AbelianEncoding { exponents: exponents.clone() })
        }
        Provenance::Twisted { base, .. } => encoding_of(base),
        _ => None,
    }
}

/// Builds C_{e_1} x ... x C_{e_d}. Every exponent must be a power of the same
/// prime p; for p = 2, exponent-2 factors are rejected.
pub fn build_abelian(p: u32, exponents: &[u64]) -> Result<Group, GroupError> {
    for &e in exponents {
        let mut m = e;
        if m < 2 {
            return Err(GroupError::BadExponent(e, p));
        }
        while m > 1 {
            if m % p as u64 != 0 {
                return Err(GroupError::BadExponent(e, p));
            }
            m /= p as u64;
        }
        if p == 2 && e == 2 {
            return Err(GroupError::ExponentTwoAtTwo);
        }
    }
    let enc = AbelianEncoding { exponents: exponents.to_vec() };
    let order = enc.order() as usize;
    let enc_clone = enc.clone();
    Group::from_oracle(
        p,
        order,
        Provenance::Abelian { exponents: exponents.to_vec() },
        move |a, b| enc_clone.add(a as u64, b as u64) as u32,
    )
}

/// An alternating biadditive form lambda: A x A -> A, stored by its values on
/// generator pairs and extended biadditively.
#[derive(Debug, Clone)]
pub struct AlternatingForm {
    enc: AbelianEncoding,
    /// values[i][j] = lambda(e_i, e_j) as an element index; antisymmetric.
    values: Vec<Vec<u64>>,
}

impl AlternatingForm {
    /// `pairs` lists (i, j, value) for i < j; the (j, i) values are filled in
    /// by antisymmetry and the diagonal is zero. Biadditive well-definedness
    /// (each value killed by both generator exponents) is checked.
    pub fn new(a: &Group, pairs: &[(usize, usize, u64)]) -> Result<Self, GroupError> {
        let enc = encoding_of(a).ok_or_else(|| {
            GroupError::PreconditionFail("alternating form needs an abelian group".into())
        })?;
        let d = enc.rank();
        let mut values = vec![vec![0u64; d]; d];
        for &(i, j, v) in pairs {
            if i >= d || j >= d || i == j {
                return Err(GroupError::NotAlternating);
            }
            values[i][j] = enc.add(values[i][j], v);
            values[j][i] = enc.neg(values[i][j]);
        }
        for i in 0..d {
            for j in 0..d {
                let v = values[i][j];
                if enc.smul(enc.exponents[i] as i64, v) != 0
                    || enc.smul(enc.exponents[j] as i64, v) != 0
                {
                    return Err(GroupError::FormNotBiadditive(i, j));
                }
            }
        }
        Ok(AlternatingForm { enc, values })
    }

    pub fn zero(a: &Group) -> Result<Self, GroupError> {
        Self::new(a, &[])
    }

    pub fn rank(&self) -> usize {
        self.enc.rank()
    }

    pub fn encoding(&self) -> &AbelianEncoding {
        &self.enc
    }

    pub fn generator_value(&self, i: usize, j: usize) -> u64 {
        self.values[i][j]
    }

    /// lambda(a, b) by biadditive expansion.
    pub fn eval(&self, a: u64, b: u64) -> u64 {
        let (ca, cb) = (self.enc.decode(a), self.enc.decode(b));
        let mut acc = 0u64;
        for (i, &ai) in ca.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in cb.iter().enumerate() {
                if bj == 0 || self.values[i][j] == 0 {
                    continue;
                }
                let scaled = self.enc.smul((ai as i64) * (bj as i64), self.values[i][j]);
                acc = self.enc.add(acc, scaled);
            }
        }
        acc
    }

    /// Rad(lambda) = { a : lambda(a, -) = 0 }, as a sorted element list.
    pub fn radical(&self) -> Vec<u64> {
        let order = self.enc.order();
        let d = self.enc.rank();
        (0..order)
            .filter(|&a| {
                (0..d).all(|j| {
                    let ej = self.enc.encode(
                        &(0..d).map(|t| if t == j { 1 } else { 0 }).collect::<Vec<_>>(),
                    );
                    self.eval(a, ej) == 0
                })
            })
            .collect()
    }

    /// The subgroup generated by the image of lambda.
    pub fn image_subgroup(&self) -> Vec<u64> {
        let d = self.enc.rank();
        let mut gens: Vec<u64> = Vec::new();
        for i in 0..d {
            for j in 0..d {
                if self.values[i][j] != 0 {
                    gens.push(self.values[i][j]);
                }
            }
        }
        // closure under addition in the abelian group
        let mut seen = std::collections::BTreeSet::new();
        seen.insert(0u64);
        let mut frontier = vec![0u64];
        while let Some(x) = frontier.pop() {
            for &g in &gens {
                let y = self.enc.add(x, g);
                if seen.insert(y) {
                    frontier.push(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Verifies alternating + antisymmetric on all element pairs of a small
    /// group, or on generator pairs otherwise.
    pub fn check_alternating(&self) -> Result<(), GroupError> {
        let order = self.enc.order();
        if order <= 729 {
            for a in 0..order {
                if self.eval(a, a) != 0 {
                    return Err(GroupError::NotAlternating);
                }
                for b in 0..order {
                    if self.enc.add(self.eval(a, b), self.eval(b, a)) != 0 {
                        return Err(GroupError::NotAlternating);
                    }
                }
            }
        } else {
            let d = self.enc.rank();
            for i in 0..d {
                if self.values[i][i] != 0 {
                    return Err(GroupError::NotAlternating);
                }
                for j in 0..d {
                    if self.enc.add(self.values[i][j], self.values[j][i]) != 0 {
                        return Err(GroupError::NotAlternating);
                    }
                }
            }
        }
        Ok(())
    }
}

/// The twisted group A_lambda: the carrier of A with
/// a *_lambda b = a + b + (1/2) lambda(a, b). Requires p odd and
/// Im(lambda) contained in Rad(lambda), which makes the class at most two.
pub fn build_twisted(a: &Group, form: &AlternatingForm) -> Result<Group, GroupError> {
    if a.prime() == 2 {
        return Err(GroupError::EvenPrime);
    }
    form.check_alternating()?;
    let rad: std::collections::BTreeSet<u64> = form.radical().into_iter().collect();
    for x in form.image_subgroup() {
        if !rad.contains(&x) {
            return Err(GroupError::TwistConditionViolated);
        }
    }
    let enc = form.encoding().clone();
    let form_clone = form.clone();
    let base = Arc::new(a.clone());
    Group::from_oracle(
        a.prime(),
        a.order(),
        Provenance::Twisted { base, form: form.clone() },
        move |x, y| {
            let s = enc.add(x as u64, y as u64);
            enc.add(s, enc.halve(form_clone.eval(x as u64, y as u64))) as u32
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{is_pcentral, is_powerful, nilpotency_class, omega1};

    #[test]
    fn abelian_orders() {
        let g = build_abelian(3, &[9, 9]).unwrap();
        assert_eq!(g.order(), 81);
        assert_eq!(g.exponent(), 9);
        let c3 = build_abelian(3, &[3]).unwrap();
        assert_eq!(c3.order(), 3);
    }

    #[test]
    fn omega1_by_enumeration() {
        // (3,9): elements of order dividing 3 form a subgroup of order 9
        let g = build_abelian(3, &[3, 9]).unwrap();
        assert_eq!(g.order(), 27);
        let count = (0..g.order() as u32).filter(|&x| g.pow(x, 3) == 0).count();
        assert_eq!(count, 9);
        assert_eq!(omega1(&g).len(), 9);
    }

    #[test]
    fn bad_exponents() {
        assert!(matches!(build_abelian(3, &[6]), Err(GroupError::BadExponent(..))));
        assert!(matches!(build_abelian(2, &[2]), Err(GroupError::ExponentTwoAtTwo)));
        assert!(build_abelian(2, &[4]).is_ok());
    }

    #[test]
    fn zero_twist_is_identity() {
        let a = build_abelian(3, &[9, 9]).unwrap();
        let lam = AlternatingForm::zero(&a).unwrap();
        let t = build_twisted(&a, &lam).unwrap();
        assert_eq!(t.table(), a.table());
    }

    #[test]
    fn twisted_c9_squared() {
        // A = C_9 x C_9, lambda(e1, e2) = 3 e1: nonabelian of order 81,
        // class 2, commutator [a,b] = lambda(a,b).
        let a = build_abelian(3, &[9, 9]).unwrap();
        let lam = AlternatingForm::new(&a, &[(0, 1, 3)]).unwrap();
        let t = build_twisted(&a, &lam).unwrap();
        assert_eq!(t.order(), 81);
        assert!(!t.is_abelian());
        assert_eq!(nilpotency_class(&t), 2);
        for x in 0..81u32 {
            for y in 0..81u32 {
                assert_eq!(t.commutator(x, y) as u64, lam.eval(x as u64, y as u64));
            }
        }
        // exponent preserved, n-fold twisted powers equal plain powers
        assert_eq!(t.exponent(), 9);
        let enc = encoding_of(&a).unwrap();
        for x in 0..81u32 {
            for n in 0..9i64 {
                assert_eq!(t.pow(x, n as u64) as u64, enc.smul(n, x as u64));
            }
        }
        // Omega_1 equality as sets
        assert_eq!(omega1(&t), omega1(&a));
        // powerful iff Im <= pA, p-central iff Omega_1 <= Rad: both hold here
        assert!(is_powerful(&t).unwrap());
        assert!(is_pcentral(&t));
    }

    #[test]
    fn twist_condition_violated() {
        // lambda(e1,e2) = e1 on C_3^2: image not in radical
        let a = build_abelian(3, &[3, 3]).unwrap();
        let lam = AlternatingForm::new(&a, &[(0, 1, 1)]).unwrap();
        assert!(matches!(build_twisted(&a, &lam), Err(GroupError::TwistConditionViolated)));
    }
}
