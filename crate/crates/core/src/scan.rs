//! Two-sided measurement of the represented set on a finite window `[1, N]`.
//!
//! The lower side enumerates the form over the box `[-B, B]^s`; everything
//! found is certainly represented. The upper side keeps the integers whose
//! residues lie in the value set modulo every sieve prime; nothing outside
//! that set can be represented. Both numbers describe the finite window
//! only, not the limsup density.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::local::{value_set, Density, FormSpec, ResidueSet};

/// Maximum number of form evaluations in a box scan.
pub const DEFAULT_WORK_BUDGET: u128 = 1_000_000_000;

/// Maximum product of sieve primes.
pub const DEFAULT_MODULUS_BUDGET: u128 = 1_000_000_000;

/// Largest window the scanner will allocate a bitset for.
pub const MAX_WINDOW: u64 = 1 << 32;

/// Box scans with at least this many variables use a meet-in-the-middle split.
pub const MEET_IN_MIDDLE_MIN_S: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanConfig {
    /// Window `[1, N]`.
    pub n: u64,
    /// Box half-width: `|x_i| <= B`.
    pub b: u64,
    pub sieve_primes: Vec<u64>,
}

impl ScanConfig {
    pub fn new(n: u64, b: u64, sieve_primes: Vec<u64>) -> Result<Self> {
        let config = Self { n, b, sieve_primes };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::input("window size N must be at least 1"));
        }
        if self.n > MAX_WINDOW {
            return Err(Error::Resource {
                what: "window size N",
                requested: self.n as u128,
                cap: MAX_WINDOW as u128,
            });
        }
        let mut seen = HashSet::new();
        for &p in &self.sieve_primes {
            if !seen.insert(p) {
                return Err(Error::input(format!("sieve prime {p} listed twice")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    /// Represented integers found in `[1, N]`, ascending.
    pub represented: Vec<u64>,
    /// `|represented| / N`
    pub lower_density: Density,
    pub sieve_admissible_count: u64,
    /// `admissible / N`
    pub sieve_upper_density: Density,
    /// One solution vector per represented integer.
    pub witnesses: BTreeMap<u64, Vec<i64>>,
    /// `N` is a multiple of the sieve modulus. Only then is
    /// `lower_density <= sieve_upper_density` guaranteed to be meaningful
    /// as a comparison of full residue periods.
    pub window_aligned: bool,
    /// Every represented integer passes every local test.
    pub consistent: bool,
}

/// `a_1 x_1^k + ... + a_s x_s^k` in 128-bit arithmetic.
pub fn evaluate_form(form: &FormSpec, x: &[i64]) -> Result<i128> {
    if x.len() != form.s() {
        return Err(Error::input(format!(
            "vector has {} entries, form has {} variables",
            x.len(),
            form.s()
        )));
    }
    let k = form.exponent();
    let mut acc: i128 = 0;
    for (i, (&a, &xi)) in form.coefficients().iter().zip(x).enumerate() {
        let term = (xi as i128)
            .checked_pow(k)
            .and_then(|v| v.checked_mul(a as i128))
            .ok_or_else(|| Error::Overflow(format!("term {} ({a}·{xi}^{k})", i + 1)))?;
        acc = acc
            .checked_add(term)
            .ok_or_else(|| Error::Overflow(format!("partial sum through term {}", i + 1)))?;
    }
    Ok(acc)
}

/// Checks that every value over the box fits in `i128` and returns the
/// table `x^k` for `x in -B..=B`.
fn power_table(form: &FormSpec, b: u64) -> Result<Vec<i128>> {
    let k = form.exponent();
    let bi = i64::try_from(b).map_err(|_| Error::Overflow(format!("box bound {b}")))?;
    let top = (bi as i128)
        .checked_pow(k)
        .ok_or_else(|| Error::Overflow(format!("{b}^{k}")))?;
    let mut worst: i128 = 0;
    for (i, &a) in form.coefficients().iter().enumerate() {
        let t = top
            .checked_mul((a as i128).abs())
            .ok_or_else(|| Error::Overflow(format!("term {} ({a}·{b}^{k})", i + 1)))?;
        worst = worst
            .checked_add(t)
            .ok_or_else(|| Error::Overflow("sum of term bounds".into()))?;
    }
    Ok((-bi..=bi).map(|x| (x as i128).pow(k)).collect())
}

fn box_work(b: u64, dims: usize) -> u128 {
    let side = 2 * b as u128 + 1;
    (0..dims).fold(1u128, |acc, _| acc.saturating_mul(side))
}

/// Private result of one worker: a bitset over `[1, N]` plus first witnesses.
struct Found {
    bits: Vec<u64>,
    witnesses: BTreeMap<u64, Vec<i64>>,
}

impl Found {
    fn new(n: u64) -> Self {
        Self {
            bits: vec![0; (n as usize + 64) / 64],
            witnesses: BTreeMap::new(),
        }
    }

    fn mark(&mut self, value: u64, witness: impl FnOnce() -> Vec<i64>) {
        let (w, b) = ((value / 64) as usize, value % 64);
        if self.bits[w] >> b & 1 == 0 {
            self.bits[w] |= 1 << b;
            self.witnesses.insert(value, witness());
        }
    }

    /// Ordered merge; witnesses already present win, so the merge of the
    /// chunks in order equals a sequential scan.
    fn absorb(&mut self, other: Found) {
        for (v, wit) in other.witnesses {
            let (w, b) = ((v / 64) as usize, v % 64);
            if self.bits[w] >> b & 1 == 0 {
                self.bits[w] |= 1 << b;
                self.witnesses.insert(v, wit);
            }
        }
    }
}

/// Lower-bound side: `{F(x) : x in [-B, B]^s} ∩ [1, N]` with one witness per
/// value (the lexicographically first in the scan order).
pub fn boxed_scan(form: &FormSpec, config: &ScanConfig) -> Result<ScanReport> {
    boxed_scan_with_budget(form, config, DEFAULT_WORK_BUDGET)
}

pub fn boxed_scan_with_budget(
    form: &FormSpec,
    config: &ScanConfig,
    budget: u128,
) -> Result<ScanReport> {
    config.validate()?;
    let s = form.s();
    let dims = if s >= MEET_IN_MIDDLE_MIN_S {
        s.div_ceil(2)
    } else {
        s
    };
    let work = box_work(config.b, dims);
    if work > budget {
        return Err(Error::Resource {
            what: "box evaluations (reduce B)",
            requested: work,
            cap: budget,
        });
    }
    let powers = power_table(form, config.b)?;
    let found = if s >= MEET_IN_MIDDLE_MIN_S {
        scan_split(form, config, &powers)
    } else {
        scan_direct(form, config, &powers)
    };
    let represented: Vec<u64> = found.witnesses.keys().copied().collect();
    let n = config.n;
    Ok(ScanReport {
        lower_density: Density::new(represented.len() as u64, n),
        represented,
        sieve_admissible_count: n,
        sieve_upper_density: Density::one(),
        witnesses: found.witnesses,
        window_aligned: true,
        consistent: true,
    })
}

/// Odometer over `[-B, B]^dims`, yielding index vectors into `powers`.
fn for_each_point(dims: usize, side: usize, mut f: impl FnMut(&[usize])) {
    if dims == 0 {
        f(&[]);
        return;
    }
    let mut idx = vec![0usize; dims];
    loop {
        f(&idx);
        let mut d = dims;
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < side {
                break;
            }
            idx[d] = 0;
        }
    }
}

fn to_coords(idx: &[usize], b: u64) -> Vec<i64> {
    idx.iter().map(|&i| i as i64 - b as i64).collect()
}

fn partial_value(coeffs: &[i64], powers: &[i128], idx: &[usize]) -> i128 {
    coeffs
        .iter()
        .zip(idx)
        .map(|(&a, &i)| a as i128 * powers[i])
        .sum()
}

/// Splits the outermost coordinate across workers.
fn scan_direct(form: &FormSpec, config: &ScanConfig, powers: &[i128]) -> Found {
    let side = powers.len();
    let coeffs = form.coefficients();
    let n = config.n as i128;
    let parts: Vec<Found> = (0..side)
        .into_par_iter()
        .map(|first| {
            let mut found = Found::new(config.n);
            let head = coeffs[0] as i128 * powers[first];
            for_each_point(coeffs.len() - 1, side, |rest| {
                let v = head + partial_value(&coeffs[1..], powers, rest);
                if v >= 1 && v <= n {
                    found.mark(v as u64, || {
                        let mut x = vec![first as i64 - config.b as i64];
                        x.extend(to_coords(rest, config.b));
                        x
                    });
                }
            });
            found
        })
        .collect();
    merge(config.n, parts)
}

fn merge(n: u64, parts: Vec<Found>) -> Found {
    let mut all = Found::new(n);
    for part in parts {
        all.absorb(part);
    }
    all
}

/// Meet in the middle: tabulate the right half once (value -> first index
/// vector), then for each left point read off the right values landing the
/// total in `[1, N]`.
fn scan_split(form: &FormSpec, config: &ScanConfig, powers: &[i128]) -> Found {
    let side = powers.len();
    let coeffs = form.coefficients();
    let h = coeffs.len() / 2;
    let (left, right) = coeffs.split_at(h);

    let mut right_values: Vec<(i128, Vec<usize>)> = Vec::new();
    for_each_point(right.len(), side, |idx| {
        right_values.push((partial_value(right, powers, idx), idx.to_vec()));
    });
    // stable sort keeps the first index vector in scan order for each value
    right_values.sort_by_key(|(v, _)| *v);
    right_values.dedup_by_key(|(v, _)| *v);

    let mut left_points: Vec<Vec<usize>> = Vec::new();
    for_each_point(left.len(), side, |idx| left_points.push(idx.to_vec()));

    let n = config.n as i128;
    let chunk = left_points.len().div_ceil(rayon::current_num_threads().max(1) * 4).max(1);
    let parts: Vec<Found> = left_points
        .par_chunks(chunk)
        .map(|points| {
            let mut found = Found::new(config.n);
            for lidx in points {
                let l = partial_value(left, powers, lidx);
                let lo = right_values.partition_point(|(v, _)| *v < 1 - l);
                for (r, ridx) in right_values[lo..].iter().take_while(|(v, _)| l + *v <= n) {
                    found.mark((l + r) as u64, || {
                        let mut x = to_coords(lidx, config.b);
                        x.extend(to_coords(ridx, config.b));
                        x
                    });
                }
            }
            found
        })
        .collect();
    merge(config.n, parts)
}

/// Value sets modulo each sieve prime.
struct ResidueSieve {
    sets: Vec<ResidueSet>,
}

impl ResidueSieve {
    fn new(form: &FormSpec, primes: &[u64]) -> Result<Self> {
        let sets = primes
            .iter()
            .map(|&p| value_set(form, p))
            .collect::<Result<_>>()?;
        Ok(Self { sets })
    }

    fn admits(&self, n: u64) -> bool {
        self.sets.iter().all(|v| v.contains(n % v.modulus()))
    }

    fn count_up_to(&self, n: u64) -> u64 {
        (1..=n).filter(|&j| self.admits(j)).count() as u64
    }
}

fn sieve_modulus(primes: &[u64]) -> Result<u128> {
    let modulus = primes
        .iter()
        .try_fold(1u128, |acc, &p| acc.checked_mul(p as u128))
        .unwrap_or(u128::MAX);
    if modulus > DEFAULT_MODULUS_BUDGET {
        return Err(Error::Resource {
            what: "sieve modulus",
            requested: modulus,
            cap: DEFAULT_MODULUS_BUDGET,
        });
    }
    Ok(modulus)
}

/// Upper-bound side: integers in `[1, N]` admissible modulo every sieve
/// prime. Counted by whole periods of the modulus plus a direct tail.
pub fn sieve_upper(form: &FormSpec, config: &ScanConfig) -> Result<ScanReport> {
    config.validate()?;
    let modulus = sieve_modulus(&config.sieve_primes)? as u64;
    let sieve = ResidueSieve::new(form, &config.sieve_primes)?;
    let per_period: u64 = sieve.sets.iter().map(|v| v.len()).product();
    let n = config.n;
    let admissible = (n / modulus) * per_period + sieve.count_up_to(n % modulus);
    Ok(ScanReport {
        represented: Vec::new(),
        lower_density: Density::new(0, n),
        sieve_admissible_count: admissible,
        sieve_upper_density: Density::new(admissible, n),
        witnesses: BTreeMap::new(),
        window_aligned: n % modulus == 0,
        consistent: true,
    })
}

/// Both sides merged, with the consistency check `represented ⊆ admissible`.
pub fn density_report(form: &FormSpec, config: &ScanConfig) -> Result<ScanReport> {
    let lower = boxed_scan(form, config)?;
    let upper = sieve_upper(form, config)?;
    let sieve = ResidueSieve::new(form, &config.sieve_primes)?;
    let consistent = lower.represented.iter().all(|&n| sieve.admits(n));
    Ok(ScanReport {
        represented: lower.represented,
        lower_density: lower.lower_density,
        sieve_admissible_count: upper.sieve_admissible_count,
        sieve_upper_density: upper.sieve_upper_density,
        witnesses: lower.witnesses,
        window_aligned: upper.window_aligned,
        consistent,
    })
}
