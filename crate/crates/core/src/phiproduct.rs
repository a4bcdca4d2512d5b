//! Gcd-corrected product expansions of `φ(a1 · a2 · ... · an)`.
//!
//! The building block is `φ(ab) = φ(a) φ(b) g / φ(g)` with `g = gcd(a, b)`.
//! For a list of length `2^r` the expansion pairs neighbours, then corrects
//! each merge level with a gcd ratio of adjacent block products. For length
//! `2^r · m` with odd `m > 1` the list is cut into `m` blocks of `2^r`, each
//! expanded as above, and every block is corrected against the product of
//! all blocks after it.
//!
//! Block products can exceed `u64`, so values here are `u128`. Every φ taken
//! inside an expansion is of a divisor of the full product, which factors
//! over the primes of the inputs.

use std::fmt;

use serde::Serialize;

use crate::arith::{factorize, gcd_u128};
use crate::error::{Error, Result};

/// Primes dividing at least one input.
#[derive(Debug, Clone)]
struct PrimeBasis {
    primes: Vec<u64>,
}

impl PrimeBasis {
    fn new(values: &[u64]) -> Result<Self> {
        let mut primes = Vec::new();
        for &v in values {
            primes.extend(factorize(v)?.primes());
        }
        primes.sort_unstable();
        primes.dedup();
        Ok(Self { primes })
    }

    /// φ of a divisor of the product of the inputs.
    fn phi(&self, x: u128) -> Result<u128> {
        let mut rest = x;
        let mut phi = 1u128;
        for &p in &self.primes {
            let p = p as u128;
            if !rest.is_multiple_of(p) {
                continue;
            }
            rest /= p;
            phi = phi.checked_mul(p - 1).ok_or(Error::Overflow("phi_product"))?;
            while rest.is_multiple_of(p) {
                rest /= p;
                phi = phi.checked_mul(p).ok_or(Error::Overflow("phi_product"))?;
            }
        }
        if rest != 1 {
            return Err(Error::InexactDivision {
                context: "prime basis does not cover value",
                numerator: x,
                denominator: rest,
            });
        }
        Ok(phi)
    }
}

fn product(values: &[u64]) -> Result<u128> {
    values
        .iter()
        .try_fold(1u128, |acc, &v| acc.checked_mul(v as u128))
        .ok_or(Error::Overflow("block product"))
}

fn exact_div(numerator: u128, denominator: u128, context: &'static str) -> Result<u128> {
    if denominator == 0 || !numerator.is_multiple_of(denominator) {
        return Err(Error::InexactDivision {
            context,
            numerator,
            denominator,
        });
    }
    Ok(numerator / denominator)
}

/// Kind of a factor in an expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorKind {
    /// `φ(a)` for a lone entry.
    Single,
    /// `φ(a_i) φ(a_{i+1}) g / φ(g)` for a neighbouring pair.
    Pair,
    /// `G / φ(G)` between two adjacent blocks of equal size.
    Merge,
    /// `G / φ(G)` between a block and everything after it.
    Cross,
}

/// One factor `numerator / denominator` of an expansion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpansionFactor {
    pub kind: FactorKind,
    /// 0-based index range `[start, end)` of the entries involved.
    pub span: (usize, usize),
    pub numerator: u128,
    pub denominator: u128,
}

/// All factors of an expansion together with their product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductExpansion {
    pub values: Vec<u64>,
    pub factors: Vec<ExpansionFactor>,
    pub value: u128,
}

impl fmt::Display for ProductExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|x| {
                if x.denominator == 1 {
                    x.numerator.to_string()
                } else {
                    format!("{}/{}", x.numerator, x.denominator)
                }
            })
            .collect();
        write!(f, "{} = {}", parts.join(" × "), self.value)
    }
}

/// Running product of rationals, kept in lowest terms.
struct Ratio {
    num: u128,
    den: u128,
}

impl Ratio {
    fn one() -> Self {
        Self { num: 1, den: 1 }
    }

    fn mul(&mut self, a: u128, b: u128) -> Result<()> {
        let g1 = gcd_u128(self.num, b);
        let g2 = gcd_u128(a, self.den);
        let num = (self.num / g1)
            .checked_mul(a / g2)
            .ok_or(Error::Overflow("expansion numerator"))?;
        let den = (self.den / g2)
            .checked_mul(b / g1)
            .ok_or(Error::Overflow("expansion denominator"))?;
        self.num = num;
        self.den = den;
        Ok(())
    }

    fn into_integer(self) -> Result<u128> {
        exact_div(self.num, self.den, "expansion product")
    }
}

struct Expander<'a> {
    values: &'a [u64],
    basis: PrimeBasis,
    factors: Vec<ExpansionFactor>,
}

impl<'a> Expander<'a> {
    fn new(values: &'a [u64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values.contains(&0) {
            return Err(Error::ZeroInput);
        }
        Ok(Self {
            values,
            basis: PrimeBasis::new(values)?,
            factors: Vec::new(),
        })
    }

    fn push(&mut self, kind: FactorKind, span: (usize, usize), numerator: u128, denominator: u128) {
        self.factors.push(ExpansionFactor {
            kind,
            span,
            numerator,
            denominator,
        });
    }

    fn gcd_ratio(&mut self, kind: FactorKind, left: (usize, usize), right: (usize, usize)) -> Result<()> {
        let l = product(&self.values[left.0..left.1])?;
        let r = product(&self.values[right.0..right.1])?;
        let g = gcd_u128(l, r);
        let phi_g = self.basis.phi(g)?;
        self.push(kind, (left.0, right.1), g, phi_g);
        Ok(())
    }

    /// Pair terms and merge-level corrections for the block `[start, start + 2^r)`.
    fn pow2_block(&mut self, start: usize, r: u32) -> Result<()> {
        let len = 1usize << r;
        for i in (start..start + len).step_by(2) {
            let value = pair_with_basis(&self.basis, self.values[i], self.values[i + 1])?;
            self.push(FactorKind::Pair, (i, i + 2), value, 1);
        }
        for level in 1..r {
            let half = 1usize << level;
            for s in (start..start + len).step_by(2 * half) {
                self.gcd_ratio(FactorKind::Merge, (s, s + half), (s + half, s + 2 * half))?;
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<ProductExpansion> {
        let mut acc = Ratio::one();
        for f in &self.factors {
            acc.mul(f.numerator, f.denominator)?;
        }
        Ok(ProductExpansion {
            values: self.values.to_vec(),
            factors: self.factors,
            value: acc.into_integer()?,
        })
    }
}

fn pair_with_basis(basis: &PrimeBasis, a: u64, b: u64) -> Result<u128> {
    let g = gcd_u128(a as u128, b as u128);
    let phi_a = basis.phi(a as u128)?;
    let phi_b = basis.phi(b as u128)?;
    let phi_g = basis.phi(g)?;
    // φ(g) divides φ(a) because g divides a
    exact_div(phi_a, phi_g, "pair term")?
        .checked_mul(phi_b)
        .and_then(|x| x.checked_mul(g))
        .ok_or(Error::Overflow("pair term"))
}

/// `φ(ab)` through `φ(a) φ(b) g / φ(g)`.
pub fn phi_pair(a: u64, b: u64) -> Result<u128> {
    if a == 0 || b == 0 {
        return Err(Error::ZeroInput);
    }
    pair_with_basis(&PrimeBasis::new(&[a, b])?, a, b)
}

/// Expansion for a list whose length is a power of two `>= 2`.
pub fn phi_product_pow2_expansion(values: &[u64]) -> Result<ProductExpansion> {
    let n = values.len();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut ex = Expander::new(values)?;
    ex.pow2_block(0, n.trailing_zeros())?;
    ex.finish()
}

pub fn phi_product_pow2(values: &[u64]) -> Result<u128> {
    Ok(phi_product_pow2_expansion(values)?.value)
}

/// Expansion for any non-empty list.
///
/// Length `2^r` delegates to [`phi_product_pow2_expansion`] and a single
/// entry is just `φ(a1)`. With `r = 0` and odd `m > 1` the blocks are single
/// entries and the expansion is the left fold
/// `∏_t φ(a_t) · gcd(a_t, a_{t+1}···a_m) / φ(gcd(...))`.
pub fn phi_product_general_expansion(values: &[u64]) -> Result<ProductExpansion> {
    let n = values.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n == 1 {
        let mut ex = Expander::new(values)?;
        let phi = ex.basis.phi(values[0] as u128)?;
        ex.push(FactorKind::Single, (0, 1), phi, 1);
        return ex.finish();
    }
    let r = n.trailing_zeros();
    let block = 1usize << r;
    let m = n >> r;
    if m == 1 {
        return phi_product_pow2_expansion(values);
    }
    let mut ex = Expander::new(values)?;
    for t in 0..m {
        let start = t * block;
        if r == 0 {
            let phi = ex.basis.phi(values[start] as u128)?;
            ex.push(FactorKind::Single, (start, start + 1), phi, 1);
        } else {
            ex.pow2_block(start, r)?;
        }
        // the last block is corrected against an empty product, i.e. by 1
        ex.gcd_ratio(FactorKind::Cross, (start, start + block), (start + block, n))?;
    }
    ex.finish()
}

pub fn phi_product_general(values: &[u64]) -> Result<u128> {
    Ok(phi_product_general_expansion(values)?.value)
}

/// `φ(a1 · ... · an)` computed directly from the factorization of the product.
pub fn phi_of_product(values: &[u64]) -> Result<u128> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    PrimeBasis::new(values)?.phi(product(values)?)
}
