//! The k-th group of units `U^k(Z_n)`, computed two ways.
//!
//! The generic route carries a ring structure along: `U(Z_{p^a})` is given
//! the ring `Z_{p-1} + Z_{p^(a-1)}` for odd `p` and `Z_2 + Z_{2^(a-2)}` for
//! `p = 2`, each split into prime-power components, and [`units_step`] is
//! applied `k` times. The closed-form route evaluates the published
//! prime-power case analysis directly and combines the components
//! multiplicatively. The two are compared elsewhere; neither is patched to
//! agree with the other.

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::abgroup::CyclicDecomposition;
use crate::arith::{factorize, is_prime};
use crate::error::{Error, Result};

/// The ring `Z_{m1} + ... + Z_{mt}`, stored with every modulus a prime power
/// and sorted. The empty spec is the zero ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct RingSpec {
    moduli: Vec<u64>,
}

impl RingSpec {
    pub fn zero() -> Self {
        Self::default()
    }

    /// CRT-splits each modulus. Every modulus must be at least 2.
    pub fn new(moduli: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut split = Vec::new();
        for m in moduli {
            if m < 2 {
                return Err(Error::InvalidModulus(m));
            }
            split.extend(factorize(m)?.prime_powers());
        }
        split.sort_unstable();
        Ok(Self { moduli: split })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn is_zero(&self) -> bool {
        self.moduli.is_empty()
    }

    /// The additive group `Z_{m1} x ... x Z_{mt}`.
    pub fn additive_group(&self) -> CyclicDecomposition {
        CyclicDecomposition::from_prime_powers(self.moduli.clone())
    }

    /// The ring carried by a group: each primary cyclic factor `Z_{p^e}`
    /// becomes the ring `Z_{p^e}`.
    pub fn from_group(group: &CyclicDecomposition) -> Self {
        Self {
            moduli: group.primary_orders().to_vec(),
        }
    }

    fn union(mut self, other: RingSpec) -> Self {
        self.moduli.extend(other.moduli);
        self.moduli.sort_unstable();
        self
    }
}

impl TryFrom<Vec<u64>> for RingSpec {
    type Error = Error;

    fn try_from(moduli: Vec<u64>) -> Result<Self> {
        Self::new(moduli)
    }
}

impl From<RingSpec> for Vec<u64> {
    fn from(r: RingSpec) -> Self {
        r.moduli
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.moduli.iter().map(|m| format!("Z{m}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// `Z_n` split by the Chinese remainder theorem. `n = 1` gives the zero ring.
pub fn ring_of_zn(n: u64) -> Result<RingSpec> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    if n == 1 {
        return Ok(RingSpec::zero());
    }
    RingSpec::new([n])
}

/// `U(Z_{p^alpha})` together with its ring structure.
pub fn unit_ring_of_prime_power(p: u64, alpha: u32) -> Result<RingSpec> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if alpha == 0 {
        return Err(Error::ZeroInput);
    }
    if p == 2 {
        return match alpha {
            1 => Ok(RingSpec::zero()),
            2 => RingSpec::new([2]),
            _ => RingSpec::new([2, 1 << (alpha - 2)]),
        };
    }
    let cyclic_part = RingSpec::new([p - 1])?;
    if alpha == 1 {
        Ok(cyclic_part)
    } else {
        Ok(cyclic_part.union(RingSpec::new([p.pow(alpha - 1)])?))
    }
}

fn prime_power_parts(q: u64) -> (u64, u32) {
    let f = factorize(q).expect("moduli are positive");
    debug_assert_eq!(f.entries().len(), 1);
    f.entries()[0]
}

/// One application of `U`, re-ringing the result.
pub fn units_step(r: &RingSpec) -> Result<RingSpec> {
    r.moduli.iter().try_fold(RingSpec::zero(), |acc, &q| {
        let (p, alpha) = prime_power_parts(q);
        Ok(acc.union(unit_ring_of_prime_power(p, alpha)?))
    })
}

/// `U^k(Z_n)` by iterating [`units_step`] `k` times on the ring `Z_n`.
/// `k = 0` is the additive group of `Z_n`.
pub fn uk_decomposition(n: u64, k: u32) -> Result<CyclicDecomposition> {
    let mut ring = ring_of_zn(n)?;
    for _ in 0..k {
        if ring.is_zero() {
            break;
        }
        ring = units_step(&ring)?;
    }
    Ok(ring.additive_group())
}

/// The published prime-power case analysis for `U^k(Z_{p^alpha})`.
///
/// For `p = 2`: trivial if `2k > alpha`, `Z_2` if `2k = alpha`, and the
/// cyclic group `Z_{2^(alpha-2k+1)}` if `2k < alpha`. For odd `p` it is the
/// product of `U^i(Z_p)` over the appropriate range of `i`, times
/// `Z_{p^(alpha-k)}` when `k < alpha`, with `U^i(Z_p) = U^(i-1)(Z_{p-1})`
/// expanded by the same closed form.
pub fn uk_prime_power_closed_form(p: u64, alpha: u32, k: u32) -> Result<CyclicDecomposition> {
    closed_prime_power(p, alpha, k, Pow2Clause::Published, None)
}

/// Closed-form `U^k(Z_n)`: the direct sum of the prime-power closed forms.
pub fn uk_closed_form(n: u64, k: u32) -> Result<CyclicDecomposition> {
    closed_form(n, k, Pow2Clause::Published, None)
}

/// Which group the closed form assigns to `U^k(Z_{2^alpha})` when `2k < alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Pow2Clause {
    /// The cyclic group `Z_{2^(alpha-2k+1)}`, as published.
    #[default]
    Published,
    /// `Z_2 x Z_{2^(alpha-2k)}`, which is what iterating `U` produces.
    /// Same order as the published clause.
    Split,
}

/// The closed form with a chosen `p = 2` clause. The clause also applies
/// inside the `U^(i-1)(Z_{p-1})` factors of odd primes.
pub fn uk_closed_form_with(n: u64, k: u32, clause: Pow2Clause) -> Result<CyclicDecomposition> {
    closed_form(n, k, clause, None)
}

fn closed_form(
    n: u64,
    k: u32,
    clause: Pow2Clause,
    cache: Option<&UnitsCache>,
) -> Result<CyclicDecomposition> {
    let f = factorize(n)?;
    if k == 0 {
        return Ok(CyclicDecomposition::from_prime_powers(f.prime_powers()));
    }
    let mut group = CyclicDecomposition::trivial();
    for (p, a) in f.iter() {
        group = group.direct_sum(&closed_prime_power(p, a, k, clause, cache)?);
    }
    Ok(group)
}

fn closed_prime_power(
    p: u64,
    alpha: u32,
    k: u32,
    clause: Pow2Clause,
    cache: Option<&UnitsCache>,
) -> Result<CyclicDecomposition> {
    // the memo table only holds the published clause
    let cache = cache.filter(|_| clause == Pow2Clause::Published);
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if alpha == 0 {
        return Err(Error::ZeroInput);
    }
    if k == 0 {
        return CyclicDecomposition::cyclic(p.pow(alpha));
    }
    if let Some(hit) = cache.and_then(|c| c.closed_get(p, alpha, k)) {
        return Ok(hit);
    }
    let result = if p == 2 {
        let (two_k, a) = (2 * k as u64, alpha as u64);
        if two_k > a {
            CyclicDecomposition::trivial()
        } else if two_k == a {
            CyclicDecomposition::cyclic(2)?
        } else if clause == Pow2Clause::Split {
            CyclicDecomposition::new([2, 1 << (a - two_k)])?
        } else {
            CyclicDecomposition::cyclic(1 << (a - two_k + 1))?
        }
    } else {
        // U^i(Z_p) for i in lowest..=k
        let lowest = if k > alpha { k - alpha + 1 } else { 1 };
        let mut group = CyclicDecomposition::trivial();
        for i in lowest..=k {
            group = group.direct_sum(&closed_form(p - 1, i - 1, clause, cache)?);
        }
        if k < alpha {
            group = group.direct_sum(&CyclicDecomposition::cyclic(p.pow(alpha - k))?);
        }
        group
    };
    if let Some(c) = cache {
        c.closed_put(p, alpha, k, result.clone());
    }
    Ok(result)
}

/// Memo tables for both routes.
///
/// Lookups never change results: a miss recomputes exactly what the uncached
/// free functions compute. Concurrent writers may race to fill the same
/// key with identical values.
#[derive(Debug, Default)]
pub struct UnitsCache {
    iterated: RwLock<HashMap<(u64, u32), CyclicDecomposition>>,
    closed: RwLock<HashMap<(u64, u32, u32), CyclicDecomposition>>,
}

impl UnitsCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide shared cache.
    pub fn global() -> &'static UnitsCache {
        static CACHE: OnceLock<UnitsCache> = OnceLock::new();
        CACHE.get_or_init(UnitsCache::new)
    }

    pub fn uk_decomposition(&self, n: u64, k: u32) -> Result<CyclicDecomposition> {
        let ring = ring_of_zn(n)?;
        if k == 0 {
            return Ok(ring.additive_group());
        }
        let mut group = CyclicDecomposition::trivial();
        for &q in ring.moduli() {
            group = group.direct_sum(&self.component(q, k)?);
        }
        Ok(group)
    }

    pub fn uk_closed_form(&self, n: u64, k: u32) -> Result<CyclicDecomposition> {
        closed_form(n, k, Pow2Clause::Published, Some(self))
    }

    pub fn uk_prime_power_closed_form(&self, p: u64, alpha: u32, k: u32) -> Result<CyclicDecomposition> {
        closed_prime_power(p, alpha, k, Pow2Clause::Published, Some(self))
    }

    /// `U^k` of the single component `Z_q`, `q` a prime power.
    fn component(&self, q: u64, k: u32) -> Result<CyclicDecomposition> {
        if let Some(hit) = self.iterated.read().unwrap().get(&(q, k)) {
            return Ok(hit.clone());
        }
        let mut ring = RingSpec { moduli: vec![q] };
        for _ in 0..k {
            if ring.is_zero() {
                break;
            }
            ring = units_step(&ring)?;
        }
        let group = ring.additive_group();
        self.iterated.write().unwrap().insert((q, k), group.clone());
        Ok(group)
    }

    fn closed_get(&self, p: u64, alpha: u32, k: u32) -> Option<CyclicDecomposition> {
        self.closed.read().unwrap().get(&(p, alpha, k)).cloned()
    }

    fn closed_put(&self, p: u64, alpha: u32, k: u32, value: CyclicDecomposition) {
        self.closed.write().unwrap().insert((p, alpha, k), value);
    }

    pub fn len(&self) -> usize {
        self.iterated.read().unwrap().len() + self.closed.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
