//! Closed-form evaluation of the generalized totient `φ^k(n) = |U^k(Z_n)|`.
//!
//! `φ^k` is multiplicative, so only prime powers need a formula:
//!
//! * `p = 2`: `1` if `α < 2k`, otherwise `2^(α-2k+1)`.
//! * odd `p`, `α < k`: `φ^(k-1)(p-1) · ∏_{i=k-α+1}^{k-1} φ^i(p)`.
//! * odd `p`, `α ≥ k`: `φ^(k-1)(p-1) · p^(α-k) · ∏_{i=1}^{k-1} φ^i(p)`.
//!
//! `φ^0(n) = n` and `φ^1` is the classical totient.

use std::fmt;

use serde::Serialize;

use crate::arith::{euler_phi, factorize, is_prime};
use crate::error::{Error, Result};

fn mul(a: u64, b: u64) -> Result<u64> {
    a.checked_mul(b).ok_or(Error::Overflow("phi_k"))
}

pub fn phi_k(n: u64, k: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    match k {
        0 => Ok(n),
        1 => euler_phi(n),
        _ => factorize(n)?
            .iter()
            .try_fold(1u64, |acc, (p, a)| mul(acc, phi_k_prime_power(p, a, k)?)),
    }
}

pub fn phi_k_prime_power(p: u64, alpha: u32, k: u32) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if alpha == 0 {
        return Err(Error::ZeroInput);
    }
    prime_power_terms(p, alpha, k)?
        .iter()
        .map(|t| t.value)
        .try_fold(1u64, |acc, v| acc.checked_mul(v))
        .ok_or(Error::Overflow("phi_k"))
}

/// One factor in the expansion of `φ^k(p^α)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceTerm {
    pub label: String,
    pub value: u64,
}

/// The expansion of one prime-power component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentTrace {
    pub prime: u64,
    pub exponent: u32,
    pub terms: Vec<TraceTerm>,
}

/// Term-by-term expansion of `φ^k(n)`, components in increasing prime order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhiKTrace {
    pub n: u64,
    pub k: u32,
    pub components: Vec<ComponentTrace>,
    pub value: u64,
}

impl PhiKTrace {
    pub fn terms(&self) -> impl Iterator<Item = &TraceTerm> {
        self.components.iter().flat_map(|c| c.terms.iter())
    }
}

impl fmt::Display for PhiKTrace {
    /// `1×φ(4)×φ(5)×5×φ(6)=80`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<&str> = self.terms().map(|t| t.label.as_str()).collect();
        if labels.is_empty() {
            write!(f, "1")?;
        } else {
            write!(f, "{}", labels.join("×"))?;
        }
        write!(f, "={}", self.value)
    }
}

fn phi_label(i: u32, m: u64) -> String {
    match i {
        0 => m.to_string(),
        1 => format!("φ({m})"),
        _ => format!("φ^{i}({m})"),
    }
}

fn power_label(p: u64, e: u32) -> String {
    if e == 1 {
        p.to_string()
    } else {
        format!("{p}^{e}")
    }
}

/// Terms for `φ^k(p^α)` with `k >= 1`, in the order
/// `φ^(k-1)(p-1)`, the `φ^i(p)` product ascending in `i`, then `p^(α-k)`.
fn prime_power_terms(p: u64, alpha: u32, k: u32) -> Result<Vec<TraceTerm>> {
    if k == 0 {
        let value = p.checked_pow(alpha).ok_or(Error::Overflow("phi_k"))?;
        return Ok(vec![TraceTerm {
            label: power_label(p, alpha),
            value,
        }]);
    }
    if p == 2 {
        let term = if alpha < 2 * k {
            TraceTerm {
                label: "1".into(),
                value: 1,
            }
        } else {
            let e = alpha - 2 * k + 1;
            TraceTerm {
                label: power_label(2, e),
                value: 1 << e,
            }
        };
        return Ok(vec![term]);
    }
    let mut terms = vec![TraceTerm {
        label: phi_label(k - 1, p - 1),
        value: phi_k(p - 1, k - 1)?,
    }];
    let lowest = if alpha < k { k - alpha + 1 } else { 1 };
    for i in lowest..k {
        terms.push(TraceTerm {
            label: phi_label(i, p),
            value: phi_k_prime_power(p, 1, i)?,
        });
    }
    if alpha > k {
        let e = alpha - k;
        let value = p.checked_pow(e).ok_or(Error::Overflow("phi_k"))?;
        terms.push(TraceTerm {
            label: power_label(p, e),
            value,
        });
    }
    Ok(terms)
}

/// Expands `φ^k(n)` into the factors contributed by each prime power.
pub fn phi_k_trace(n: u64, k: u32) -> Result<PhiKTrace> {
    let components = factorize(n)?
        .iter()
        .map(|(p, a)| {
            Ok(ComponentTrace {
                prime: p,
                exponent: a,
                terms: prime_power_terms(p, a, k)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let value = components
        .iter()
        .flat_map(|c| c.terms.iter())
        .try_fold(1u64, |acc, t| acc.checked_mul(t.value))
        .ok_or(Error::Overflow("phi_k"))?;
    Ok(PhiKTrace {
        n,
        k,
        components,
        value,
    })
}
