//! Integer arithmetic substrate: prime sieves, primes in residue classes,
//! the von Mangoldt function, Euler's totient and gcd.
//!
//! Tables are built once, single-threaded, and are immutable afterwards.
//! All logarithms are natural.

use crate::error::{Error, Result};

/// Largest sieve limit accepted by [`sieve_primes`].
pub const DEFAULT_PRIME_CAP: u64 = 100_000_000;

/// Above this limit the sieve switches to fixed-size segments.
pub const SEGMENTED_THRESHOLD: u64 = 10_000_000;

/// Largest limit for which a smallest-prime-factor table is built.
pub const SPF_TABLE_CAP: u64 = 10_000_000;

const SEGMENT_LEN: u64 = 1 << 18;

/// All primes up to and including `limit`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Membership test; `n` must not exceed the table limit.
    pub fn contains(&self, n: u64) -> Result<bool> {
        if n > self.limit {
            return Err(Error::Range {
                what: "primality query",
                requested: n as f64,
                limit: self.limit,
            });
        }
        Ok(self.primes.binary_search(&n).is_ok())
    }

    /// Primes `p <= bound`, as a slice of the table.
    pub fn up_to(&self, bound: u64) -> &[u64] {
        let end = self.primes.partition_point(|&p| p <= bound);
        &self.primes[..end]
    }

    /// Primes `p` with `p ≡ 1 (mod m)` and `lo < p < hi`; both ends strict,
    /// so a prime equal to `lo` is excluded.
    pub fn primes_in_ap(&self, m: u64, lo: f64, hi: f64) -> Result<Vec<u64>> {
        check_ap_args(m, lo, hi)?;
        let top = largest_integer_below(hi);
        if top > self.limit as f64 {
            return Err(Error::Range {
                what: "progression upper end",
                requested: hi,
                limit: self.limit,
            });
        }
        Ok(self
            .primes
            .iter()
            .copied()
            .skip_while(|&p| (p as f64) <= lo)
            .take_while(|&p| (p as f64) < hi)
            .filter(|&p| p % m == 1 % m)
            .collect())
    }
}

fn check_ap_args(m: u64, lo: f64, hi: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::input("modulus m must be at least 1"));
    }
    if !(lo < hi) || lo.is_nan() || hi.is_nan() {
        return Err(Error::input(format!("need lo < hi, got ({lo}, {hi})")));
    }
    Ok(())
}

/// The largest integer strictly below `x` (clamped at 0).
fn largest_integer_below(x: f64) -> f64 {
    (x.ceil() - 1.0).max(0.0)
}

/// Sieve of Eratosthenes up to `limit`, capped at [`DEFAULT_PRIME_CAP`].
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    sieve_primes_with_cap(limit, DEFAULT_PRIME_CAP)
}

pub fn sieve_primes_with_cap(limit: u64, cap: u64) -> Result<PrimeTable> {
    if limit > cap {
        return Err(Error::Resource {
            what: "prime sieve limit",
            requested: limit as u128,
            cap: cap as u128,
        });
    }
    let primes = if limit < 2 {
        Vec::new()
    } else if limit <= SEGMENTED_THRESHOLD {
        simple_sieve(limit)
    } else {
        segmented_sieve(limit)
    };
    Ok(PrimeTable { limit, primes })
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::with_capacity(estimate_prime_count(limit));
    let mut i = 2;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    for (i, &c) in composite.iter().enumerate().skip(2) {
        if !c {
            primes.push(i as u64);
        }
    }
    primes
}

fn segmented_sieve(limit: u64) -> Vec<u64> {
    let root = integer_sqrt(limit);
    let base = simple_sieve(root);
    let mut primes = Vec::with_capacity(estimate_prime_count(limit));
    primes.extend_from_slice(&base);

    let mut segment = vec![false; SEGMENT_LEN as usize];
    let mut lo = root + 1;
    while lo <= limit {
        let hi = (lo + SEGMENT_LEN - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        segment[..len].fill(false);
        for &p in &base {
            let start = (p * p).max(lo.div_ceil(p) * p);
            let mut j = start;
            while j <= hi {
                segment[(j - lo) as usize] = true;
                j += p;
            }
        }
        primes.extend(
            segment[..len]
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| lo + i as u64),
        );
        lo = hi + 1;
    }
    primes
}

fn estimate_prime_count(limit: u64) -> usize {
    if limit < 10 {
        return 4;
    }
    let x = limit as f64;
    (1.26 * x / x.ln()) as usize
}

pub fn integer_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Primes `p ≡ 1 (mod m)` with `lo < p < hi`, sieving as far as needed.
pub fn primes_in_ap(m: u64, lo: f64, hi: f64) -> Result<Vec<u64>> {
    check_ap_args(m, lo, hi)?;
    let top = largest_integer_below(hi);
    if top > DEFAULT_PRIME_CAP as f64 {
        return Err(Error::Resource {
            what: "prime sieve limit",
            requested: top as u128,
            cap: DEFAULT_PRIME_CAP as u128,
        });
    }
    sieve_primes(top as u64)?.primes_in_ap(m, lo, hi)
}

/// Deterministic primality by trial division over `6j ± 1`.
pub fn is_prime(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Prime factorisation by trial division, as `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Smallest-prime-factor table, used to factor many integers below
/// [`SPF_TABLE_CAP`]. Integers above the table limit fall back to trial
/// division.
#[derive(Debug, Clone)]
pub struct SpfTable {
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn new(limit: u64) -> Result<Self> {
        if limit > SPF_TABLE_CAP {
            return Err(Error::Resource {
                what: "smallest-prime-factor table limit",
                requested: limit as u128,
                cap: SPF_TABLE_CAP as u128,
            });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let j = i * p as usize;
                if p > si || j > n {
                    break;
                }
                spf[j] = p;
            }
        }
        Ok(Self { spf })
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        if n > self.limit() {
            return factorize(n);
        }
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
            n /= p;
        }
        out
    }

    pub fn von_mangoldt(&self, n: u64) -> f64 {
        lambda_from_factors(&self.factorize(n))
    }

    pub fn euler_phi(&self, n: u64) -> u64 {
        phi_from_factors(n, &self.factorize(n))
    }
}

fn lambda_from_factors(f: &[(u64, u32)]) -> f64 {
    match f {
        [(p, _)] => (*p as f64).ln(),
        _ => 0.0,
    }
}

fn phi_from_factors(n: u64, f: &[(u64, u32)]) -> u64 {
    f.iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// `Λ(n)`: `log p` when `n = p^j` with `j >= 1`, otherwise 0. `n = 0` is
/// treated as 0.
pub fn von_mangoldt(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    lambda_from_factors(&factorize(n))
}

/// Euler's totient; `euler_phi(0)` is 0.
pub fn euler_phi(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    phi_from_factors(n, &factorize(n))
}

/// `φ(0..=limit)` by a linear sieve; index 0 holds 0.
pub fn totient_table(limit: u64) -> Result<Vec<u64>> {
    if limit > SPF_TABLE_CAP {
        return Err(Error::Resource {
            what: "totient table limit",
            requested: limit as u128,
            cap: SPF_TABLE_CAP as u128,
        });
    }
    let n = limit as usize;
    let mut phi = vec![0u64; n + 1];
    let mut primes: Vec<usize> = Vec::new();
    if n >= 1 {
        phi[1] = 1;
    }
    for i in 2..=n {
        if phi[i] == 0 {
            phi[i] = (i - 1) as u64;
            primes.push(i);
        }
        for &p in &primes {
            let j = i * p;
            if j > n {
                break;
            }
            if i % p == 0 {
                phi[j] = phi[i] * p as u64;
                break;
            }
            phi[j] = phi[i] * (p - 1) as u64;
        }
    }
    Ok(phi)
}

/// `Λ(n)` for `1 <= n <= limit`, stored densely.
#[derive(Debug, Clone)]
pub struct LambdaTable {
    values: Vec<f64>,
}

impl LambdaTable {
    pub fn new(limit: u64) -> Result<Self> {
        let primes = sieve_primes(limit)?;
        let mut values = vec![0.0; limit as usize + 1];
        for &p in primes.primes() {
            let log_p = (p as f64).ln();
            let mut q = p;
            loop {
                values[q as usize] = log_p;
                match q.checked_mul(p) {
                    Some(next) if next <= limit => q = next,
                    _ => break,
                }
            }
        }
        Ok(Self { values })
    }

    pub fn limit(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    /// `Λ(n)`; indices outside `1..=limit` panic.
    pub fn get(&self, n: u64) -> f64 {
        assert!(n >= 1, "Λ is defined for n >= 1");
        self.values[n as usize]
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.values
    }
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Greatest common divisor of two signed integers, with `gcd(0, 0) = 0`.
pub fn gcd(m: i64, n: i64) -> u64 {
    gcd_u64(m.unsigned_abs(), n.unsigned_abs())
}

/// `base^exp mod m` with 128-bit intermediates; `m` must be nonzero.
pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}
