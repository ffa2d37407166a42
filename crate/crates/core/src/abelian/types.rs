use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::engine::group::{gcd, Group};
use crate::{Error, Result};

/// A finite abelian group up to isomorphism, as its invariant factors
/// `d_1 | d_2 | ... | d_k` (each at least 2). The empty list is the trivial
/// group.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AbelianType {
    divisors: Vec<u64>,
}

impl AbelianType {
    pub fn trivial() -> Self {
        AbelianType::default()
    }

    /// Canonical form of `⊕ Z/d_i` for an arbitrary list (entries of 1 are
    /// dropped, 0 is rejected).
    pub fn from_divisors(divisors: &[u64]) -> Result<Self> {
        if divisors.contains(&0) {
            return Err(Error::Precondition("cyclic factor of order 0".into()));
        }
        let mut powers: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &d in divisors {
            for (p, e) in factorize(d) {
                powers.entry(p).or_default().push(e);
            }
        }
        Ok(Self::from_prime_powers(powers))
    }

    fn from_prime_powers(mut powers: BTreeMap<u64, Vec<u32>>) -> Self {
        let len = powers.values().map(Vec::len).max().unwrap_or(0);
        let mut divisors = vec![1u64; len];
        for (p, exps) in powers.iter_mut() {
            exps.sort_unstable_by(|a, b| b.cmp(a));
            // largest exponents go to the largest invariant factors
            for (slot, &e) in exps.iter().enumerate() {
                divisors[len - 1 - slot] *= p.pow(e);
            }
        }
        divisors.retain(|&d| d > 1);
        AbelianType { divisors }
    }

    pub fn cyclic(n: u64) -> Self {
        Self::from_divisors(&[n]).expect("positive order")
    }

    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn order(&self) -> u64 {
        self.divisors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.divisors.last().copied().unwrap_or(1)
    }

    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.divisors.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.divisors.len() <= 1
    }

    /// Whether the group is a p-group for some prime (trivial counts).
    pub fn is_p_group(&self) -> bool {
        factorize(self.order()).len() <= 1
    }

    pub fn is_elementary(&self) -> bool {
        self.divisors.iter().all(|&d| is_prime(d)) && self.is_p_group()
    }

    /// Direct sum.
    pub fn sum(&self, other: &AbelianType) -> AbelianType {
        let mut all = self.divisors.clone();
        all.extend_from_slice(&other.divisors);
        Self::from_divisors(&all).expect("nonzero divisors")
    }

    /// `k`-fold direct sum.
    pub fn power(&self, k: usize) -> AbelianType {
        let all: Vec<u64> = (0..k).flat_map(|_| self.divisors.iter().copied()).collect();
        Self::from_divisors(&all).expect("nonzero divisors")
    }

    /// Divisors as `u32`, for building enumerated models.
    pub fn divisors_u32(&self) -> Result<Vec<u32>> {
        self.divisors
            .iter()
            .map(|&d| {
                u32::try_from(d).map_err(|_| Error::Precondition(format!("divisor {d} too large")))
            })
            .collect()
    }
}

impl fmt::Debug for AbelianType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for AbelianType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.divisors.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

/// Invariant factors of an enumerated abelian group.
///
/// For each prime `p` the counts `|{x : x^{p^k} = 1}| = p^{s_k}` give
/// `s_k = Σ_i min(k, e_i)`, so `s_k - s_{k-1}` is the number of cyclic
/// `p`-factors of exponent at least `k`.
pub fn recognize_abelian(g: &Group) -> Result<AbelianType> {
    if !g.is_abelian() {
        return Err(Error::NotAbelian);
    }
    let orders = g.element_orders();
    let mut powers: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for (p, max_e) in factorize(g.order() as u64) {
        let mut s_prev = 0u32;
        let mut at_least = Vec::new();
        for k in 1..=max_e {
            let pk = p.pow(k);
            let count = orders.iter().filter(|&&o| pk % o as u64 == 0).count() as u64;
            let s = log_exact(count, p)?;
            at_least.push(s - s_prev);
            s_prev = s;
            if s_prev == max_e {
                break;
            }
        }
        let mut exps = Vec::new();
        for (k, &r) in at_least.iter().enumerate() {
            let next = at_least.get(k + 1).copied().unwrap_or(0);
            for _ in 0..r.saturating_sub(next) {
                exps.push(k as u32 + 1);
            }
        }
        powers.insert(p, exps);
    }
    Ok(AbelianType::from_prime_powers(powers))
}

fn log_exact(mut n: u64, p: u64) -> Result<u32> {
    let mut e = 0;
    while n > 1 {
        if !n.is_multiple_of(p) {
            return Err(Error::Precondition(format!(
                "solution count {n} is not a power of {p}"
            )));
        }
        n /= p;
        e += 1;
    }
    Ok(e)
}

/// Schur multiplier `⊕_{i<j} Z/gcd(d_i, d_j)`.
pub fn schur_multiplier(a: &AbelianType) -> AbelianType {
    let d = a.divisors();
    let mut parts = Vec::new();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            parts.push(gcd(d[i], d[j]));
        }
    }
    AbelianType::from_divisors(&parts).expect("gcds are positive")
}

/// Primary decomposition: one `(p, Sylow p-part)` per prime dividing the
/// order, primes ascending.
pub fn sylow_split(a: &AbelianType) -> Vec<(u64, AbelianType)> {
    let mut parts: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &d in a.divisors() {
        for (p, e) in factorize(d) {
            parts.entry(p).or_default().push(p.pow(e));
        }
    }
    parts
        .into_iter()
        .map(|(p, ds)| (p, AbelianType::from_divisors(&ds).expect("prime powers")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::spec::{load_group, GroupSpec};
    use crate::Limits;
    use proptest::prelude::*;

    fn t(d: &[u64]) -> AbelianType {
        AbelianType::from_divisors(d).unwrap()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(t(&[2, 3]).divisors(), &[6]);
        assert_eq!(t(&[4, 2]).divisors(), &[2, 4]);
        assert_eq!(t(&[6, 4]).divisors(), &[2, 12]);
        assert_eq!(t(&[1, 1]).divisors(), &[] as &[u64]);
        assert_eq!(t(&[12, 18]).divisors(), &[6, 36]);
        assert!(AbelianType::from_divisors(&[0]).is_err());
    }

    #[test]
    fn recognizes_small_groups() {
        let l = Limits::default();
        let e8 = load_group(&GroupSpec::abelian(&[2, 2, 2]), &l).unwrap();
        assert_eq!(recognize_abelian(&e8).unwrap(), t(&[2, 2, 2]));
        let z24 = load_group(&GroupSpec::abelian(&[4, 2]), &l).unwrap();
        assert_eq!(recognize_abelian(&z24).unwrap(), t(&[2, 4]));
        let z6 = load_group(&GroupSpec::abelian(&[6]), &l).unwrap();
        assert_eq!(recognize_abelian(&z6).unwrap(), t(&[6]));
        let s3 = load_group(
            &GroupSpec::permutation(3, &["(1 2 3)", "(1 2)"]).unwrap(),
            &l,
        )
        .unwrap();
        assert_eq!(recognize_abelian(&s3).unwrap_err(), Error::NotAbelian);
    }

    #[test]
    fn schur_examples() {
        assert_eq!(schur_multiplier(&t(&[3, 3])), t(&[3]));
        assert_eq!(schur_multiplier(&t(&[7])), AbelianType::trivial());
        assert_eq!(schur_multiplier(&t(&[2, 4])), t(&[2]));
        assert_eq!(schur_multiplier(&t(&[2, 2, 2])), t(&[2, 2, 2]));
        assert_eq!(schur_multiplier(&t(&[6, 6])), t(&[6]));
    }

    #[test]
    fn sylow_examples() {
        assert_eq!(
            sylow_split(&t(&[6, 6])),
            vec![(2, t(&[2, 2])), (3, t(&[3, 3]))]
        );
        assert_eq!(sylow_split(&t(&[12])), vec![(2, t(&[4])), (3, t(&[3]))]);
        assert_eq!(sylow_split(&t(&[2, 4])), vec![(2, t(&[2, 4]))]);
        assert!(sylow_split(&AbelianType::trivial()).is_empty());
    }

    proptest! {
        #[test]
        fn recognize_inverts_load(divs in prop::collection::vec(2u32..12, 0..4)) {
            let order: u64 = divs.iter().map(|&d| d as u64).product();
            prop_assume!(order <= 10_000);
            let g = load_group(&GroupSpec::abelian(&divs), &Limits::default()).unwrap();
            let wide: Vec<u64> = divs.iter().map(|&d| d as u64).collect();
            prop_assert_eq!(recognize_abelian(&g).unwrap(), t(&wide));
        }

        #[test]
        fn canonical_form_is_a_divisibility_chain(divs in prop::collection::vec(1u64..60, 0..5)) {
            let a = t(&divs);
            prop_assert_eq!(a.order(), divs.iter().product::<u64>());
            for w in a.divisors().windows(2) {
                prop_assert_eq!(w[1] % w[0], 0);
            }
            prop_assert!(a.divisors().iter().all(|&d| d >= 2));
        }

        #[test]
        fn sylow_parts_recombine(divs in prop::collection::vec(1u64..60, 0..5)) {
            let a = t(&divs);
            let parts = sylow_split(&a);
            let back = parts.iter().fold(AbelianType::trivial(), |acc, (_, p)| acc.sum(p));
            prop_assert_eq!(back, a);
            for (p, part) in parts {
                prop_assert!(factorize(part.order()).iter().all(|&(q, _)| q == p));
            }
        }
    }
}
