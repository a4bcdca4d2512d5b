//! Integer arithmetic over `u64`: gcd, deterministic primality, factorization
//! and the classical and iterated totients.
//!
//! Small inputs are factored from a smallest-prime-factor table that is built
//! once and never mutated afterwards. Larger inputs fall back to trial
//! division, Miller-Rabin with a witness set that is exact on all of `u64`,
//! and Brent's variant of Pollard rho with fixed seeds.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Inputs below this bound are factored by table lookup.
pub const SIEVE_LIMIT: u64 = 1 << 21;

/// Witnesses that make Miller-Rabin deterministic for every `n < 2^64`.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Prime factorization `p1^e1 * ... * pr^er` with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Factorization {
    entries: Vec<(u64, u32)>,
}

impl Factorization {
    /// The factorization of 1.
    pub fn one() -> Self {
        Self::default()
    }

    /// Builds a factorization from `(prime, exponent)` pairs in any order,
    /// merging repeated primes. Entries with exponent 0 are dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u32)>) -> Result<Self> {
        let mut entries: Vec<(u64, u32)> = Vec::new();
        for (p, e) in pairs {
            if e == 0 {
                continue;
            }
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            entries.push((p, e));
        }
        entries.sort_unstable();
        let mut merged: Vec<(u64, u32)> = Vec::with_capacity(entries.len());
        for (p, e) in entries {
            match merged.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => merged.push((p, e)),
            }
        }
        Ok(Self { entries: merged })
    }

    pub fn entries(&self) -> &[(u64, u32)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.entries.iter().copied()
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|&(p, _)| p)
    }

    pub fn is_one(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exponent of `p`, zero when `p` does not divide.
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.entries.iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e)
    }

    /// Multiplies the entries back together.
    pub fn value(&self) -> Result<u64> {
        self.entries.iter().try_fold(1u64, |acc, &(p, e)| {
            checked_pow(p, e)
                .and_then(|pe| acc.checked_mul(pe))
                .ok_or(Error::Overflow("factorization value"))
        })
    }

    /// Each prime-power component `p^e` as an integer.
    pub fn prime_powers(&self) -> Vec<u64> {
        self.entries
            .iter()
            .map(|&(p, e)| checked_pow(p, e).expect("factor of a u64"))
            .collect()
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, e)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Least common multiple; `lcm(0, x) = 0`.
pub fn lcm(a: u64, b: u64) -> Result<u64> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    (a / gcd(a, b)).checked_mul(b).ok_or(Error::Overflow("lcm"))
}

pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut result = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    result
}

fn sieve() -> &'static [u32] {
    static SPF: OnceLock<Vec<u32>> = OnceLock::new();
    SPF.get_or_init(|| {
        let n = SIEVE_LIMIT as usize;
        let mut spf = vec![0u32; n];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                if p > si || (p as usize) * i >= n {
                    break;
                }
                spf[p as usize * i] = p;
            }
        }
        spf
    })
}

/// Deterministic primality test, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < SIEVE_LIMIT {
        return sieve()[n as usize] as u64 == n;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's cycle-finding variant of Pollard rho. `n` must be an odd composite.
fn pollard_brent(n: u64) -> u64 {
    const BATCH: u64 = 128;
    for c in 1..u64::MAX {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let (mut x, mut ys) = (0u64, 0u64);
        let mut g = 1u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("pollard rho exhausted every polynomial for {n}")
}

fn push_factors(n: u64, out: &mut Vec<(u64, u32)>) {
    if n == 1 {
        return;
    }
    if n < SIEVE_LIMIT {
        let spf = sieve();
        let mut m = n as usize;
        while m > 1 {
            let p = spf[m] as usize;
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        return;
    }
    if is_prime(n) {
        out.push((n, 1));
        return;
    }
    let d = pollard_brent(n);
    push_factors(d, out);
    push_factors(n / d, out);
}

/// Canonical factorization of `n >= 1`.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    let mut raw = Vec::new();
    let mut m = n;
    if m >= SIEVE_LIMIT {
        // strip small primes so rho only sees cofactors without tiny factors
        for p in 2..1000u64 {
            if m.is_multiple_of(p) {
                let mut e = 0;
                while m.is_multiple_of(p) {
                    m /= p;
                    e += 1;
                }
                raw.push((p, e));
            }
            if m < SIEVE_LIMIT {
                break;
            }
        }
    }
    push_factors(m, &mut raw);
    raw.sort_unstable();
    let mut entries: Vec<(u64, u32)> = Vec::with_capacity(raw.len());
    for (p, e) in raw {
        match entries.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => entries.push((p, e)),
        }
    }
    Ok(Factorization { entries })
}

/// Totient of a number given by its factorization.
pub fn euler_phi_of(f: &Factorization) -> Result<u64> {
    f.iter().try_fold(1u64, |acc, (p, e)| {
        checked_pow(p, e - 1)
            .and_then(|pe| pe.checked_mul(p - 1))
            .and_then(|t| acc.checked_mul(t))
            .ok_or(Error::Overflow("euler_phi"))
    })
}

/// Classical Euler totient.
pub fn euler_phi(n: u64) -> Result<u64> {
    euler_phi_of(&factorize(n)?)
}

/// `Φ^k(n)`: the classical totient applied `k` times.
pub fn iterated_phi(n: u64, k: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    let mut v = n;
    for _ in 0..k {
        if v == 1 {
            break;
        }
        v = euler_phi(v)?;
    }
    Ok(v)
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let f = factorize(n)?;
    let mut divs = vec![1u64];
    for (p, e) in f.iter() {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    Ok(divs)
}

/// Returns `(q, a)` when `n = q^a` for a prime `q` and `a >= 1`.
pub fn as_prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let f = factorize(n).ok()?;
    match f.entries() {
        [(q, a)] => Some((*q, *a)),
        _ => None,
    }
}
