//! Value sets of a diagonal form modulo a prime.
//!
//! For a prime `p` the nonzero `k`-th powers form a subgroup of
//! `(Z/p)^*` of order `m = (p-1)/gcd(k, p-1)` (the coset index). Adding the
//! zero class, there are `m + 1` distinct values of `z^k`. The value set of
//! `a_1 z_1^k + ... + a_s z_s^k` is the iterated sumset of the scaled power
//! sets, so it has at most `(m + 1)^s` elements, giving the bound
//! `alpha_{k,p} = (m + 1)^s / p` on the local density.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::arith::{gcd_u64, is_prime, mod_pow};
use crate::error::{Error, Result};

/// Largest prime modulus for which value sets are materialised.
pub const DEFAULT_VALUE_SET_CAP: u64 = 1_000_000;

/// Coefficients `a_1..a_s` and exponent `k` of `a_1 x_1^k + ... + a_s x_s^k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormSpec {
    coefficients: Vec<i64>,
    exponent: u32,
}

impl FormSpec {
    /// Requires `s >= 2`, `k >= 1` and at least one nonzero coefficient.
    pub fn new(coefficients: Vec<i64>, exponent: u32) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::input(format!(
                "a diagonal form needs at least 2 coefficients, got {}",
                coefficients.len()
            )));
        }
        if exponent == 0 {
            return Err(Error::input("exponent k must be at least 1"));
        }
        if coefficients.iter().all(|&a| a == 0) {
            return Err(Error::input("all coefficients are zero"));
        }
        Ok(Self {
            coefficients,
            exponent,
        })
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// Number of variables.
    pub fn s(&self) -> usize {
        self.coefficients.len()
    }

    /// Same coefficients, different exponent.
    pub fn with_exponent(&self, exponent: u32) -> Result<Self> {
        Self::new(self.coefficients.clone(), exponent)
    }
}

/// Parses a comma-separated coefficient list such as `1,1,-1`.
pub fn parse_coefficients(text: &str) -> Result<Vec<i64>> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<i64>()
                .map_err(|_| Error::input(format!("bad coefficient {t:?}")))
        })
        .collect()
}

/// An exact, unreduced ratio `numerator / denominator` of counts.
///
/// Equality and ordering compare values, so `28/91 == 4/13`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Density {
    pub numerator: u64,
    pub denominator: u64,
}

impl Density {
    pub fn new(numerator: u64, denominator: u64) -> Self {
        assert!(denominator > 0, "density with zero denominator");
        Self {
            numerator,
            denominator,
        }
    }

    pub fn one() -> Self {
        Self::new(1, 1)
    }

    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    pub fn is_one(self) -> bool {
        self.numerator == self.denominator
    }

    /// Product of two ratios; `None` on overflow.
    pub fn checked_mul(self, other: Density) -> Option<Density> {
        Some(Density::new(
            self.numerator.checked_mul(other.numerator)?,
            self.denominator.checked_mul(other.denominator)?,
        ))
    }
}

impl PartialEq for Density {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Density {}

impl PartialOrd for Density {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Density {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.numerator as u128 * other.denominator as u128;
        let rhs = other.numerator as u128 * self.denominator as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

impl FromStr for Density {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (n, d) = s
            .split_once('/')
            .ok_or_else(|| Error::input(format!("expected num/den, got {s:?}")))?;
        let n = n.trim().parse().map_err(|_| Error::input(s))?;
        let d: u64 = d.trim().parse().map_err(|_| Error::input(s))?;
        if d == 0 {
            return Err(Error::input("zero denominator"));
        }
        Ok(Density::new(n, d))
    }
}

/// A subset of `Z/n`, stored as a bit-vector of length `n`.
#[derive(Clone, PartialEq, Eq)]
pub struct ResidueSet {
    modulus: u64,
    words: Vec<u64>,
}

impl fmt::Debug for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ResidueSet")
            .field("modulus", &self.modulus)
            .field("elements", &self.iter().collect::<Vec<_>>())
            .finish()
    }
}

impl ResidueSet {
    pub fn empty(modulus: u64) -> Self {
        assert!(modulus > 0, "residue set with zero modulus");
        Self {
            modulus,
            words: vec![0; modulus.div_ceil(64) as usize],
        }
    }

    pub fn full(modulus: u64) -> Self {
        let mut set = Self::empty(modulus);
        set.words.fill(u64::MAX);
        set.clear_tail();
        set
    }

    pub fn from_residues<I: IntoIterator<Item = u64>>(modulus: u64, residues: I) -> Self {
        let mut set = Self::empty(modulus);
        for r in residues {
            set.insert(r % modulus);
        }
        set
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn insert(&mut self, r: u64) {
        debug_assert!(r < self.modulus);
        self.words[(r / 64) as usize] |= 1 << (r % 64);
    }

    pub fn contains(&self, r: u64) -> bool {
        r < self.modulus && self.words[(r / 64) as usize] >> (r % 64) & 1 == 1
    }

    pub fn len(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.modulus
    }

    /// Elements in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let base = i as u64 * 64;
            BitIter(w).map(move |b| base + b)
        })
    }

    /// `{a·x mod n : x in self}`.
    pub fn scaled(&self, a: i64) -> Self {
        let n = self.modulus;
        let a = a.rem_euclid(n as i64) as u128;
        let mut out = Self::empty(n);
        for x in self.iter() {
            out.insert((a * x as u128 % n as u128) as u64);
        }
        out
    }

    /// The sumset `{x + y mod n : x in self, y in other}`.
    ///
    /// The larger operand is OR-ed into the result once per element of the
    /// smaller one, cyclically shifted by that element. The loop stops early
    /// once the result covers all of `Z/n`.
    pub fn sumset(&self, other: &ResidueSet) -> ResidueSet {
        assert_eq!(self.modulus, other.modulus, "sumset of mismatched moduli");
        let n = self.modulus;
        let (big, small) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = Self::empty(n);
        if small.is_empty() {
            return out;
        }
        let doubled = big.doubled();
        let words = out.words.len();
        for b in small.iter() {
            // bit i of the shifted copy is big[(i - b) mod n] = doubled[n - b + i]
            let offset = if b == 0 { 0 } else { n - b };
            for (w, slot) in out.words.iter_mut().enumerate().take(words) {
                *slot |= extract_word(&doubled, offset + 64 * w as u64);
            }
            out.clear_tail();
            if out.is_full() {
                break;
            }
        }
        out
    }

    /// Bits of `self` repeated twice, as a bit-vector of length `2n`, with
    /// one spare word so any 64-bit window can be read.
    fn doubled(&self) -> Vec<u64> {
        let n = self.modulus;
        let mut out = vec![0u64; (2 * n).div_ceil(64) as usize + 1];
        for (i, &w) in self.words.iter().enumerate() {
            out[i] = w;
        }
        let shift = n % 64;
        let base = (n / 64) as usize;
        for (i, &w) in self.words.iter().enumerate() {
            if shift == 0 {
                out[base + i] |= w;
            } else {
                out[base + i] |= w << shift;
                out[base + i + 1] |= w >> (64 - shift);
            }
        }
        out
    }

    fn clear_tail(&mut self) {
        let rem = self.modulus % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

fn extract_word(bits: &[u64], pos: u64) -> u64 {
    let i = (pos / 64) as usize;
    let sh = pos % 64;
    let lo = bits.get(i).copied().unwrap_or(0);
    if sh == 0 {
        lo
    } else {
        let hi = bits.get(i + 1).copied().unwrap_or(0);
        (lo >> sh) | (hi << (64 - sh))
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as u64;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// `(p - 1) / gcd(k, p - 1)`, the number of nonzero `k`-th power residues.
pub fn coset_index(k: u64, p: u64) -> u64 {
    (p - 1) / gcd_u64(k, p - 1)
}

fn check_prime_modulus(p: u64, cap: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::input(format!("{p} is not prime")));
    }
    if p > cap {
        return Err(Error::Resource {
            what: "value-set modulus",
            requested: p as u128,
            cap: cap as u128,
        });
    }
    Ok(())
}

/// `{x^k mod p : x in F_p}`.
pub fn power_residues(p: u64, k: u64) -> Result<ResidueSet> {
    power_residues_with_cap(p, k, DEFAULT_VALUE_SET_CAP)
}

pub fn power_residues_with_cap(p: u64, k: u64, cap: u64) -> Result<ResidueSet> {
    if k == 0 {
        return Err(Error::input("exponent k must be at least 1"));
    }
    check_prime_modulus(p, cap)?;
    // x -> x^g with g = gcd(k, p-1) has the same image as x -> x^k on the
    // cyclic group, and g is usually much smaller than k.
    let g = gcd_u64(k, p - 1);
    let mut set = ResidueSet::empty(p);
    set.insert(0);
    let m = (p - 1) / g;
    for x in 1..p {
        set.insert(mod_pow(x, g, p));
        // the subgroup has exactly m elements
        if set.len() == m + 1 {
            break;
        }
    }
    Ok(set)
}

/// Value set from precomputed power residues; `powers` must be the
/// `k`-th power set mod `p` for the form's exponent.
pub fn value_set_from_powers(coefficients: &[i64], powers: &ResidueSet) -> ResidueSet {
    let p = powers.modulus();
    let mut acc = ResidueSet::from_residues(p, [0]);
    for &a in coefficients {
        let term = if a.rem_euclid(p as i64) == 0 {
            ResidueSet::from_residues(p, [0])
        } else {
            powers.scaled(a)
        };
        acc = acc.sumset(&term);
        if acc.is_full() {
            break;
        }
    }
    acc
}

/// `{F(z) mod p : z in F_p^s}` by iterated sumsets.
pub fn value_set(form: &FormSpec, p: u64) -> Result<ResidueSet> {
    value_set_with_cap(form, p, DEFAULT_VALUE_SET_CAP)
}

pub fn value_set_with_cap(form: &FormSpec, p: u64, cap: u64) -> Result<ResidueSet> {
    let powers = power_residues_with_cap(p, form.exponent() as u64, cap)?;
    Ok(value_set_from_powers(form.coefficients(), &powers))
}

/// `((p-1)/gcd(k,p-1) + 1)^s / p`, uncapped.
pub fn alpha_bound(k: u64, p: u64, s: u32) -> f64 {
    let m = coset_index(k, p);
    ((m + 1) as f64).powi(s as i32) / p as f64
}

/// Exact test for `alpha_{k,p} < 1`, i.e. `(m + 1)^s < p`.
pub fn alpha_below_one(k: u64, p: u64, s: u32) -> bool {
    let m = coset_index(k, p);
    match ((m + 1) as u128).checked_pow(s) {
        Some(v) => v < p as u128,
        None => false,
    }
}

/// Per-prime summary: exact local density next to the coset bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalDensityRecord {
    pub prime: u64,
    pub coset_index: u64,
    pub value_set_size: u64,
    pub density: Density,
    pub alpha: f64,
    pub alpha_capped: f64,
}

impl LocalDensityRecord {
    fn new(prime: u64, k: u64, s: u32, value_set_size: u64) -> Self {
        let alpha = alpha_bound(k, prime, s);
        Self {
            prime,
            coset_index: coset_index(k, prime),
            value_set_size,
            density: Density::new(value_set_size, prime),
            alpha,
            alpha_capped: alpha.min(1.0),
        }
    }

    /// `density <= min(alpha, 1)`, decided in integers:
    /// `|V| <= min((m + 1)^s, p)`.
    pub fn within_alpha_bound(&self, s: u32) -> bool {
        let cap = ((self.coset_index + 1) as u128)
            .checked_pow(s)
            .map_or(self.prime as u128, |v| v.min(self.prime as u128));
        self.value_set_size as u128 <= cap
    }

    /// `log(1/δ_k(p))`, zero when the form is locally surjective.
    pub fn log_inverse_density(&self) -> f64 {
        if self.density.is_one() {
            0.0
        } else {
            (self.prime as f64 / self.value_set_size as f64).ln()
        }
    }
}

pub fn local_density(form: &FormSpec, p: u64) -> Result<LocalDensityRecord> {
    let set = value_set(form, p)?;
    Ok(record_from_set(form, p, &set))
}

pub(crate) fn record_from_set(form: &FormSpec, p: u64, set: &ResidueSet) -> LocalDensityRecord {
    LocalDensityRecord::new(p, form.exponent() as u64, form.s() as u32, set.len())
}
