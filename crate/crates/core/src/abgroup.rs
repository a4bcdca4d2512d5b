//! Finite abelian groups up to isomorphism.
//!
//! A [`CyclicDecomposition`] accepts any presentation `Z_{m1} x ... x Z_{mt}`
//! and stores the primary canonical form: every order a prime power, sorted
//! ascending. Structural equality on the stored form is group isomorphism.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::factorize;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct CyclicDecomposition {
    orders: Vec<u64>,
}

impl CyclicDecomposition {
    /// The trivial group.
    pub fn trivial() -> Self {
        Self::default()
    }

    /// `Z_m`. `m = 1` gives the trivial group.
    pub fn cyclic(m: u64) -> Result<Self> {
        Self::new([m])
    }

    /// Normalizes an arbitrary presentation. Orders equal to 1 are trivial
    /// factors and are dropped; 0 is rejected.
    pub fn new(orders: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut primary = Vec::new();
        for m in orders {
            if m == 0 {
                return Err(Error::InvalidOrder(0));
            }
            primary.extend(factorize(m)?.prime_powers());
        }
        primary.sort_unstable();
        Ok(Self { orders: primary })
    }

    /// Builds directly from prime-power orders without re-factoring.
    pub(crate) fn from_prime_powers(mut orders: Vec<u64>) -> Self {
        debug_assert!(orders.iter().all(|&m| m >= 2));
        orders.sort_unstable();
        Self { orders }
    }

    /// Primary canonical orders, ascending.
    pub fn primary_orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn canonical_primary(&self) -> CyclicDecomposition {
        self.clone()
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    /// Exponents of each Sylow subgroup, keyed by prime, each list descending.
    pub fn sylow_exponents(&self) -> BTreeMap<u64, Vec<u32>> {
        let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &q in &self.orders {
            let f = factorize(q).expect("stored orders are positive");
            let (p, e) = f.entries()[0];
            by_prime.entry(p).or_default().push(e);
        }
        for exps in by_prime.values_mut() {
            exps.sort_unstable_by(|a, b| b.cmp(a));
        }
        by_prime
    }

    /// Invariant factors `d1 | d2 | ... | dt`, ascending. Empty for the
    /// trivial group.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let sylow = self.sylow_exponents();
        let len = sylow.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; len];
        for (p, exps) in &sylow {
            // largest exponent goes into the largest factor
            for (i, &e) in exps.iter().enumerate() {
                factors[len - 1 - i] *= p.pow(e);
            }
        }
        factors
    }

    /// Group order. Overflow is reported, not wrapped.
    pub fn order(&self) -> Result<u64> {
        self.orders
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(m))
            .ok_or(Error::Overflow("group order"))
    }

    /// Largest element order.
    pub fn exponent(&self) -> u64 {
        self.invariant_factors().last().copied().unwrap_or(1)
    }

    pub fn is_cyclic(&self) -> bool {
        self.invariant_factors().len() <= 1
    }

    pub fn iso_eq(&self, other: &CyclicDecomposition) -> bool {
        self.orders == other.orders
    }

    pub fn direct_sum(&self, other: &CyclicDecomposition) -> CyclicDecomposition {
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        Self::from_prime_powers(orders)
    }

    /// Renders in invariant-factor form, e.g. `Z2 x Z40`.
    pub fn display_invariant(&self) -> String {
        render(&self.invariant_factors())
    }
}

fn render(orders: &[u64]) -> String {
    if orders.is_empty() {
        return "{0}".to_string();
    }
    orders
        .iter()
        .map(|m| format!("Z{m}"))
        .collect::<Vec<_>>()
        .join(" x ")
}

impl fmt::Display for CyclicDecomposition {
    /// Primary form, e.g. `Z2 x Z2 x Z4 x Z5`; the trivial group is `{0}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.orders))
    }
}

impl FromStr for CyclicDecomposition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "{0}" || s == "0" || s == "1" || s.is_empty() {
            return Ok(Self::trivial());
        }
        let mut orders = Vec::new();
        for part in s.split(['x', '×']) {
            let part = part.trim();
            let digits = part
                .strip_prefix('Z')
                .or_else(|| part.strip_prefix("Z_"))
                .ok_or_else(|| Error::Parse(format!("expected Z<m>, found {part:?}")))?;
            let digits = digits.trim_start_matches('_');
            let m: u64 = digits
                .parse()
                .map_err(|_| Error::Parse(format!("bad cyclic order {digits:?}")))?;
            orders.push(m);
        }
        Self::new(orders)
    }
}

impl TryFrom<Vec<u64>> for CyclicDecomposition {
    type Error = Error;

    fn try_from(orders: Vec<u64>) -> Result<Self> {
        Self::new(orders)
    }
}

impl From<CyclicDecomposition> for Vec<u64> {
    fn from(d: CyclicDecomposition) -> Self {
        d.orders
    }
}
