//! Brute-force verifier for `U^k(Z_n)`.
//!
//! Each level enumerates the units of an explicit ring `Z_{m1} + ... + Z_{mt}`
//! coordinate by coordinate, tallies element orders, and reads the group
//! structure back from the tally. The structure is then turned into the next
//! ring by giving every primary cyclic factor `Z_{p^e}` the ring `Z_{p^e}`.
//! Nothing here uses the closed forms or the ring structure chosen by
//! [`crate::units`] for `U(Z_{p^a})`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::abgroup::CyclicDecomposition;
use crate::arith::{divisors, euler_phi, factorize, gcd, lcm, pow_mod};
use crate::error::{Error, Result};
use crate::units::RingSpec;

/// Default number of group elements the oracle may tally per level.
pub const DEFAULT_BOUND: u64 = 1_000_000;

const PARALLEL_THRESHOLD: u64 = 1 << 16;

/// Element-order statistics of a finite abelian group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderProfile {
    pub total: u64,
    /// element order -> number of elements of exactly that order
    pub counts: BTreeMap<u64, u64>,
}

impl OrderProfile {
    pub fn trivial() -> Self {
        Self {
            total: 1,
            counts: BTreeMap::from([(1, 1)]),
        }
    }

    /// Largest element order.
    pub fn exponent(&self) -> u64 {
        self.counts.keys().next_back().copied().unwrap_or(1)
    }

    /// Profile of the direct product: orders combine by lcm, counts multiply.
    pub fn product(&self, other: &OrderProfile) -> Result<OrderProfile> {
        let mut counts = BTreeMap::new();
        for (&d1, &c1) in &self.counts {
            for (&d2, &c2) in &other.counts {
                let c = c1.checked_mul(c2).ok_or(Error::Overflow("order profile"))?;
                *counts.entry(lcm(d1, d2)?).or_insert(0) += c;
            }
        }
        let total = self
            .total
            .checked_mul(other.total)
            .ok_or(Error::Overflow("order profile"))?;
        Ok(OrderProfile { total, counts })
    }

    /// Profile of `Z_m`: `φ(d)` elements of order `d` for each `d | m`.
    pub fn of_cyclic(m: u64) -> Result<OrderProfile> {
        let mut counts = BTreeMap::new();
        for d in divisors(m)? {
            counts.insert(d, euler_phi(d)?);
        }
        Ok(OrderProfile { total: m, counts })
    }

    /// Profile of a known decomposition, computed combinatorially.
    pub fn of_decomposition(group: &CyclicDecomposition) -> Result<OrderProfile> {
        group
            .primary_orders()
            .iter()
            .try_fold(OrderProfile::trivial(), |acc, &m| {
                acc.product(&OrderProfile::of_cyclic(m)?)
            })
    }
}

/// Multiplicative order of the unit `u` modulo `m`, where `group_order` is
/// a multiple of it with the given prime factors.
fn unit_order(u: u64, m: u64, group_order: u64, primes: &[u64]) -> u64 {
    let mut ord = group_order;
    for &q in primes {
        while ord.is_multiple_of(q) && pow_mod(u, ord / q, m) == 1 {
            ord /= q;
        }
    }
    ord
}

fn tally_range(lo: u64, hi: u64, m: u64, group_order: u64, primes: &[u64]) -> BTreeMap<u64, u64> {
    let mut counts = BTreeMap::new();
    for u in lo..hi {
        if gcd(u, m) == 1 {
            *counts.entry(unit_order(u, m, group_order, primes)).or_insert(0) += 1;
        }
    }
    counts
}

/// Profile of `U(Z_m)` by enumerating every residue.
fn unit_profile_of_modulus(m: u64) -> Result<OrderProfile> {
    if m < 2 {
        return Err(Error::InvalidModulus(m));
    }
    if m == 2 {
        return Ok(OrderProfile::trivial());
    }
    let units = (1..m).into_par_iter().filter(|&u| gcd(u, m) == 1).count() as u64;
    let primes: Vec<u64> = factorize(units)?.primes().collect();
    let counts = if m > PARALLEL_THRESHOLD {
        let chunk = PARALLEL_THRESHOLD;
        let starts: Vec<u64> = (1..m).step_by(chunk as usize).collect();
        starts
            .into_par_iter()
            .map(|lo| tally_range(lo, (lo + chunk).min(m), m, units, &primes))
            .reduce(BTreeMap::new, |mut a, b| {
                for (d, c) in b {
                    *a.entry(d).or_insert(0) += c;
                }
                a
            })
    } else {
        tally_range(1, m, m, units, &primes)
    };
    Ok(OrderProfile { total: units, counts })
}

/// Order profile of the unit group of `Z_{m1} + ... + Z_{mt}`. The moduli
/// need not be prime powers. Refuses when the unit group has more than
/// `bound` elements.
pub fn unit_profile_of_moduli(moduli: &[u64], bound: u64) -> Result<OrderProfile> {
    let mut needed = 1u64;
    for &m in moduli {
        if m < 2 {
            return Err(Error::InvalidModulus(m));
        }
        needed = needed.checked_mul(euler_phi(m)?).ok_or(Error::BoundExceeded {
            needed: u64::MAX,
            bound,
        })?;
    }
    if needed > bound {
        return Err(Error::BoundExceeded { needed, bound });
    }
    moduli.iter().try_fold(OrderProfile::trivial(), |acc, &m| {
        acc.product(&unit_profile_of_modulus(m)?)
    })
}

pub fn enumerate_unit_orders(ring: &RingSpec, bound: u64) -> Result<OrderProfile> {
    unit_profile_of_moduli(ring.moduli(), bound)
}

/// Recovers the group from its order statistics.
///
/// For each prime `p | total`, the number of elements of order dividing
/// `p^j` is `p^(Σ min(λ_i, j))`; successive differences of the exponents
/// count the `λ_i >= j`, which determines the partition `λ`.
pub fn structure_from_profile(profile: &OrderProfile) -> Result<CyclicDecomposition> {
    let inconsistent = |msg: String| Err(Error::InconsistentProfile(msg));
    let sum: u64 = profile.counts.values().sum();
    if sum != profile.total {
        return inconsistent(format!("counts sum to {sum}, total is {}", profile.total));
    }
    if profile.counts.get(&1) != Some(&1) {
        return inconsistent("identity count is not 1".into());
    }
    if profile.total == 0 {
        return inconsistent("empty group".into());
    }
    let mut orders = Vec::new();
    for (p, v) in factorize(profile.total)?.iter() {
        // s[j] = log_p #{x : x^(p^j) = 1}
        let mut s = vec![0u32];
        for j in 1..=v {
            let pj = p.pow(j);
            let n: u64 = (0..=j)
                .map(|i| profile.counts.get(&p.pow(i)).copied().unwrap_or(0))
                .sum();
            let mut e = 0u32;
            let mut rest = n;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            if rest != 1 {
                return inconsistent(format!(
                    "{n} elements of order dividing {pj} is not a power of {p}"
                ));
            }
            s.push(e);
        }
        // at_least[j] = #{i : λ_i >= j}
        let at_least: Vec<u32> = (1..s.len())
            .map(|j| s[j].checked_sub(s[j - 1]).unwrap_or(u32::MAX))
            .collect();
        if at_least.contains(&u32::MAX) || at_least.windows(2).any(|w| w[0] < w[1]) {
            return inconsistent(format!("{p}-torsion counts do not form a partition"));
        }
        if s[v as usize] != v {
            return inconsistent(format!(
                "{p}-part has order p^{} but total needs p^{v}",
                s[v as usize]
            ));
        }
        for j in 1..=v as usize {
            let next = at_least.get(j).copied().unwrap_or(0);
            for _ in 0..at_least[j - 1] - next {
                orders.push(p.pow(j as u32));
            }
        }
    }
    let group = CyclicDecomposition::new(orders)?;
    if OrderProfile::of_decomposition(&group)? != *profile {
        return inconsistent(format!("no abelian group has this profile (closest: {group})"));
    }
    Ok(group)
}

/// `U^k(Z_n)` computed literally as `U(U(...U(Z_n)))`.
pub fn oracle_uk(n: u64, k: u32, bound: u64) -> Result<CyclicDecomposition> {
    Ok(oracle_levels(n, k, bound)?
        .pop()
        .map(|level| level.group)
        .unwrap_or_else(CyclicDecomposition::trivial))
}

/// One level of an oracle run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleLevel {
    pub k: u32,
    pub profile: OrderProfile,
    pub group: CyclicDecomposition,
}

/// Every level `U^0(Z_n), ..., U^k(Z_n)` of an oracle run. Level 0 is the
/// additive group of `Z_n`.
pub fn oracle_levels(n: u64, k: u32, bound: u64) -> Result<Vec<OracleLevel>> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    let additive = CyclicDecomposition::cyclic(n)?;
    let mut levels = vec![OracleLevel {
        k: 0,
        profile: OrderProfile::of_decomposition(&additive)?,
        group: additive,
    }];
    let mut moduli: Vec<u64> = if n == 1 { Vec::new() } else { vec![n] };
    for level in 1..=k {
        let profile = unit_profile_of_moduli(&moduli, bound)?;
        let group = structure_from_profile(&profile)?;
        moduli = group.primary_orders().to_vec();
        levels.push(OracleLevel {
            k: level,
            profile,
            group,
        });
    }
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(m: &[u64]) -> CyclicDecomposition {
        CyclicDecomposition::new(m.iter().copied()).unwrap()
    }

    /// Orders by repeated multiplication, the slow way.
    fn naive_profile(m: u64) -> BTreeMap<u64, u64> {
        let mut counts = BTreeMap::new();
        for u in 1..m.max(2) {
            if gcd(u, m) != 1 {
                continue;
            }
            let (mut x, mut ord) = (u % m, 1u64);
            while x != 1 % m {
                x = x * u % m;
                ord += 1;
            }
            *counts.entry(ord).or_insert(0) += 1;
        }
        counts
    }

    #[test]
    fn enumeration_examples() {
        let p = unit_profile_of_moduli(&[8], DEFAULT_BOUND).unwrap();
        assert_eq!(p.total, 4);
        assert_eq!(p.counts, BTreeMap::from([(1, 1), (2, 3)]));
        let p = unit_profile_of_moduli(&[5], DEFAULT_BOUND).unwrap();
        assert_eq!(p.counts, BTreeMap::from([(1, 1), (2, 1), (4, 2)]));
        let p = enumerate_unit_orders(&RingSpec::zero(), 1).unwrap();
        assert_eq!(p, OrderProfile::trivial());
    }

    #[test]
    fn per_coordinate_orders_match_naive_multiplication() {
        for m in 2..400u64 {
            let p = unit_profile_of_moduli(&[m], DEFAULT_BOUND).unwrap();
            assert_eq!(p.counts, naive_profile(m), "m = {m}");
        }
    }

    #[test]
    fn bound_is_enforced() {
        assert_eq!(
            unit_profile_of_moduli(&[101], 99),
            Err(Error::BoundExceeded {
                needed: 100,
                bound: 99
            })
        );
        assert!(oracle_uk(1_000_003, 1, 1000).is_err());
    }

    #[test]
    fn structure_examples() {
        let klein = OrderProfile {
            total: 4,
            counts: BTreeMap::from([(1, 1), (2, 3)]),
        };
        assert_eq!(structure_from_profile(&klein).unwrap(), grp(&[2, 2]));
        let z4 = OrderProfile {
            total: 4,
            counts: BTreeMap::from([(1, 1), (2, 1), (4, 2)]),
        };
        assert_eq!(structure_from_profile(&z4).unwrap(), grp(&[4]));
        let p27 = unit_profile_of_moduli(&[27], DEFAULT_BOUND).unwrap();
        assert_eq!(structure_from_profile(&p27).unwrap(), grp(&[18]));
        assert_eq!(structure_from_profile(&p27).unwrap().primary_orders(), &[2, 9]);
    }

    #[test]
    fn inconsistent_profiles_are_rejected() {
        // Z3 cannot have two elements of order 2
        let bad = OrderProfile {
            total: 3,
            counts: BTreeMap::from([(1, 1), (2, 2)]),
        };
        assert!(matches!(
            structure_from_profile(&bad),
            Err(Error::InconsistentProfile(_))
        ));
        let bad = OrderProfile {
            total: 4,
            counts: BTreeMap::from([(1, 1), (2, 2)]),
        };
        assert!(structure_from_profile(&bad).is_err());
        // right 2-torsion, wrong element orders (Z4 x Z2 counts relabelled)
        let bad = OrderProfile {
            total: 8,
            counts: BTreeMap::from([(1, 1), (2, 3), (8, 4)]),
        };
        assert!(structure_from_profile(&bad).is_err());
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(oracle_uk(64, 3, DEFAULT_BOUND).unwrap(), grp(&[2]));
        assert_eq!(oracle_uk(7000, 2, DEFAULT_BOUND).unwrap().order().unwrap(), 80);
        assert!(oracle_uk(1, 3, DEFAULT_BOUND).unwrap().is_trivial());
        assert_eq!(oracle_uk(12, 0, DEFAULT_BOUND).unwrap(), grp(&[12]));
        assert_eq!(oracle_uk(0, 1, DEFAULT_BOUND), Err(Error::ZeroInput));
    }

    #[test]
    fn large_modulus_uses_parallel_tally() {
        let m = 1_000_003u64; // prime
        let p = unit_profile_of_moduli(&[m], 10_000_000).unwrap();
        assert_eq!(p.total, m - 1);
        assert_eq!(structure_from_profile(&p).unwrap(), grp(&[m - 1]));
    }
}
