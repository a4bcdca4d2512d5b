//! The equations `φ^k(n) = Φ^k(n)` and `φ^k(n) = 1`, their published
//! classifications, and sweeps that compare the two.
//!
//! `n = 1` satisfies every equation here (all quantities are 1) and every
//! classifier accepts it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{as_prime_power, factorize, is_prime, iterated_phi};
use crate::error::{Error, Result};
use crate::phik::phi_k;
use crate::report::{DiscrepancyReport, Mismatch};
use crate::units::UnitsCache;

/// Largest `max` accepted by the sweeps.
pub const MAX_SWEEP: u64 = 100_000_000;

const N1_CONVENTION: &str = "n = 1 satisfies every equation and every classifier accepts it";

pub fn is_solution_phik_eq_iphik(n: u64, k: u32) -> Result<bool> {
    Ok(phi_k(n, k)? == iterated_phi(n, k)?)
}

/// `n = 2, 4, p^a` or `2p^a` with `p` an odd prime.
pub fn classify_k2(n: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    if matches!(n, 1 | 2 | 4) {
        return Ok(true);
    }
    let odd = if n.is_multiple_of(2) { n / 2 } else { n };
    if odd % 2 == 0 {
        return Ok(false);
    }
    Ok(as_prime_power(odd).is_some())
}

/// `p` is a prime of the form `2q^b + 1` with `q` an odd prime and `b >= 1`.
pub fn is_twice_odd_prime_power_plus_one(p: u64) -> bool {
    if p < 7 || !is_prime(p) {
        return false;
    }
    matches!(as_prime_power((p - 1) / 2), Some((q, _)) if q != 2)
}

/// How to read the scope of "a divisor of" in the cubic classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum K3Reading {
    /// `{5, 10, 12}`, divisors of 8, `2·3^a`, and `2p`, exactly as listed.
    Literal,
    /// Divisors of 8, 10, 12, `2·3^a`, or `2p`.
    #[default]
    DivisorClosed,
}

impl K3Reading {
    pub fn tag(self) -> &'static str {
        match self {
            K3Reading::Literal => "literal",
            K3Reading::DivisorClosed => "divisor-closed",
        }
    }
}

fn is_power_of_three(mut n: u64) -> bool {
    while n.is_multiple_of(3) {
        n /= 3;
    }
    n == 1
}

pub fn classify_k3(n: u64, reading: K3Reading) -> Result<bool> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    if n == 1 || 8 % n == 0 {
        return Ok(true);
    }
    let twice_special = n.is_multiple_of(2) && is_twice_odd_prime_power_plus_one(n / 2);
    let twice_power_of_three = n.is_multiple_of(2) && n > 2 && is_power_of_three(n / 2);
    Ok(match reading {
        K3Reading::Literal => matches!(n, 5 | 10 | 12) || twice_power_of_three || twice_special,
        K3Reading::DivisorClosed => {
            10 % n == 0
                || 12 % n == 0
                || twice_power_of_three
                || is_power_of_three(n)
                || twice_special
                || is_twice_odd_prime_power_plus_one(n)
        }
    })
}

/// Whether `n` divides `24p` (`p = 5` or `p = 2q^a + 1`), `8·3^b`, or `48`.
pub fn classify_u2_cyclic(n: u64) -> Result<bool> {
    let f = factorize(n)?;
    let a = f.exponent_of(2);
    let b = f.exponent_of(3);
    let m = n >> a;
    let m = m / 3u64.pow(b);
    if m == 1 {
        return Ok(a <= 3 || (a <= 4 && b <= 1));
    }
    Ok(a <= 3 && b <= 1 && is_prime(m) && (m == 5 || is_twice_odd_prime_power_plus_one(m)))
}

fn check_max(max: u64) -> Result<()> {
    if max == 0 {
        return Err(Error::ZeroInput);
    }
    if max > MAX_SWEEP {
        return Err(Error::BoundExceeded {
            needed: max,
            bound: MAX_SWEEP,
        });
    }
    Ok(())
}

fn sweep<T: Send>(max: u64, f: impl Fn(u64) -> Result<Option<T>> + Sync + Send) -> Result<Vec<T>> {
    check_max(max)?;
    let hits: Vec<Option<T>> = (1..=max).into_par_iter().map(&f).collect::<Result<_>>()?;
    Ok(hits.into_iter().flatten().collect())
}

/// All `n <= max` with `φ^k(n) = Φ^k(n)`, ascending.
pub fn enumerate_solutions(k: u32, max: u64) -> Result<Vec<u64>> {
    sweep(max, |n| Ok(is_solution_phik_eq_iphik(n, k)?.then_some(n)))
}

/// All `n <= max` with `φ^k(n) = 1`, ascending.
pub fn solve_phik_eq_one(k: u32, max: u64) -> Result<Vec<u64>> {
    sweep(max, |n| Ok((phi_k(n, k)? == 1).then_some(n)))
}

/// Comparisons available to [`cross_verify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equation {
    /// `φ² = Φ²` against the `2, 4, p^a, 2p^a` classification.
    K2,
    /// `φ³ = Φ³` against the cubic classification.
    K3(K3Reading),
    /// `φ² = Φ²` against cyclicity of `U(Z_n)`.
    K2UnitCyclic,
    /// Every solution of `φ³ = Φ³` has cyclic `U²(Z_n)`.
    K3ImpliesU2Cyclic,
    /// Cyclicity of `U²(Z_n)` against its divisor classification.
    U2Cyclic,
    /// `φ²(n) <= Φ²(n)`.
    Inequality,
}

impl Equation {
    pub fn tag(self) -> String {
        match self {
            Equation::K2 => "eq-k2".into(),
            Equation::K3(r) => format!("eq-k3-{}", r.tag()),
            Equation::K2UnitCyclic => "eq-k2-unit-cyclic".into(),
            Equation::K3ImpliesU2Cyclic => "eq-k3-u2-cyclic".into(),
            Equation::U2Cyclic => "u2-cyclic".into(),
            Equation::Inequality => "gr-inequality".into(),
        }
    }
}

/// Runs one comparison over `1..=max` and lists every disagreement.
pub fn cross_verify(equation: Equation, max: u64) -> Result<DiscrepancyReport> {
    let cache = UnitsCache::new();
    let mismatches = sweep(max, |n| -> Result<Option<Mismatch>> {
        let (enumerated, claimed, detail) = match equation {
            Equation::K2 => (is_solution_phik_eq_iphik(n, 2)?, classify_k2(n)?, None),
            Equation::K3(reading) => (is_solution_phik_eq_iphik(n, 3)?, classify_k3(n, reading)?, None),
            Equation::K2UnitCyclic => (
                is_solution_phik_eq_iphik(n, 2)?,
                cache.uk_decomposition(n, 1)?.is_cyclic(),
                None,
            ),
            Equation::K3ImpliesU2Cyclic => {
                if !is_solution_phik_eq_iphik(n, 3)? {
                    return Ok(None);
                }
                let u2 = cache.uk_decomposition(n, 2)?;
                (u2.is_cyclic(), true, Some(format!("U^2 = {u2}")))
            }
            Equation::U2Cyclic => (
                cache.uk_decomposition(n, 2)?.is_cyclic(),
                classify_u2_cyclic(n)?,
                None,
            ),
            Equation::Inequality => {
                let (lhs, rhs) = (phi_k(n, 2)?, iterated_phi(n, 2)?);
                (lhs <= rhs, true, Some(format!("phi^2 = {lhs}, Phi^2 = {rhs}")))
            }
        };
        if enumerated == claimed {
            return Ok(None);
        }
        let mut m = Mismatch::new(n, enumerated, claimed);
        m.detail = detail;
        Ok(Some(m))
    })?;
    let mut report =
        DiscrepancyReport::new(equation.tag(), max, max, mismatches).with_convention("n=1", N1_CONVENTION);
    if let Equation::K3(reading) = equation {
        report = report.with_convention("k3-reading", reading.tag());
    }
    Ok(report)
}
