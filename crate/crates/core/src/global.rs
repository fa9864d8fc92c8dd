//! Upper bounds on the global upper density `δ_k` from local densities.
//!
//! By CRT the density of integers that are locally admissible at every
//! prime in a finite set is the product of the local densities, so
//! `log(1/δ_k) >= Σ_p log(1/δ_k(p))` over any finite prime set. Two
//! evaluations are offered:
//!
//! * [`bound_alpha`] uses only the coefficient-free bound
//!   `min(alpha_{k,p}, 1)` over primes `p ≡ 1 (mod k)` below the cutoff
//!   `Z = k^{1 + 1/(s-1)} / R`.
//! * [`bound_exact`] computes exact value sets for every prime up to a limit.
//!
//! Terms are produced per prime (in parallel for the exact mode) and then
//! aggregated sequentially in ascending prime order.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::PrimeTable;
use crate::error::{Error, Result};
use crate::local::{
    alpha_below_one, coset_index, power_residues, value_set_from_powers, FormSpec,
    DEFAULT_VALUE_SET_CAP,
};
use crate::sum::compensated_sum;

/// Default cutoff divisor `R`.
pub const DEFAULT_CUTOFF_DIVISOR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMode {
    /// Exact value sets at every prime up to the limit.
    Exact,
    /// The coset bound at primes `p ≡ 1 (mod k)` below the cutoff.
    Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlobalBoundConfig {
    /// `R` in `Z = k^{1 + 1/(s-1)} / R`.
    pub cutoff_divisor: f64,
    pub prime_limit: u64,
    pub mode: BoundMode,
}

impl GlobalBoundConfig {
    pub fn new(cutoff_divisor: f64, prime_limit: u64, mode: BoundMode) -> Result<Self> {
        let config = Self {
            cutoff_divisor,
            prime_limit,
            mode,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cutoff_divisor >= 1.0) || !self.cutoff_divisor.is_finite() {
            return Err(Error::input(format!(
                "cutoff divisor R must be a finite real >= 1, got {}",
                self.cutoff_divisor
            )));
        }
        if self.prime_limit < 2 {
            return Err(Error::input("prime limit must be at least 2"));
        }
        Ok(())
    }
}

impl Default for GlobalBoundConfig {
    fn default() -> Self {
        Self {
            cutoff_divisor: DEFAULT_CUTOFF_DIVISOR,
            prime_limit: 1_000,
            mode: BoundMode::Alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContributingPrime {
    pub prime: u64,
    /// `log(1/δ_k(p))` or `-log(alpha_{k,p})`; always positive.
    pub term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalBoundReport {
    pub k: u64,
    pub s: u32,
    pub mode: BoundMode,
    /// Lower bound on `log(1/δ_k)`.
    pub log_inv_density_lower: f64,
    /// `exp(-log_inv_density_lower)`.
    pub density_upper: f64,
    pub contributing: Vec<ContributingPrime>,
    /// `k^{1/(s-1)} / log k`, present for `k >= 3`.
    pub conditional_reference: Option<f64>,
    /// Set when some local density is exactly zero. Local densities are
    /// never zero (the zero vector is always a solution), so this is false
    /// for every report the crate produces.
    pub density_is_zero: bool,
}

impl GlobalBoundReport {
    fn from_terms(k: u64, s: u32, mode: BoundMode, contributing: Vec<ContributingPrime>) -> Self {
        let total = compensated_sum(contributing.iter().map(|c| c.term));
        Self {
            k,
            s,
            mode,
            log_inv_density_lower: total,
            density_upper: (-total).exp(),
            contributing,
            conditional_reference: conditional_reference(k, s).ok(),
            density_is_zero: false,
        }
    }

    pub fn term_at(&self, p: u64) -> Option<f64> {
        self.contributing
            .iter()
            .find(|c| c.prime == p)
            .map(|c| c.term)
    }
}

/// `Z = k^{1 + 1/(s-1)} / R`.
pub fn prime_cutoff(k: u64, s: u32, cutoff_divisor: f64) -> f64 {
    let exponent = 1.0 + 1.0 / (s as f64 - 1.0);
    (k as f64).powf(exponent) / cutoff_divisor
}

/// `k^{1/(s-1)} / log k`, without any implied constant.
pub fn conditional_reference(k: u64, s: u32) -> Result<f64> {
    if k < 3 {
        return Err(Error::input(format!("reference curve needs k >= 3, got {k}")));
    }
    if s < 2 {
        return Err(Error::input(format!("need s >= 2, got {s}")));
    }
    let kf = k as f64;
    Ok(kf.powf(1.0 / (s as f64 - 1.0)) / kf.ln())
}

fn check_table(primes: &PrimeTable, needed: u64) -> Result<()> {
    if primes.limit() < needed {
        return Err(Error::Range {
            what: "prime limit",
            requested: needed as f64,
            limit: primes.limit(),
        });
    }
    Ok(())
}

/// Coefficient-free lower bound on `log(1/δ_k)`: the sum of
/// `log p - s log(m + 1)` over primes `p ≡ 1 (mod k)` with
/// `p < min(Z, prime_limit + 1)` and `alpha_{k,p} < 1`.
///
/// `primes` must reach `config.prime_limit`.
pub fn bound_alpha(
    k: u64,
    s: u32,
    config: &GlobalBoundConfig,
    primes: &PrimeTable,
) -> Result<GlobalBoundReport> {
    config.validate()?;
    if k == 0 {
        return Err(Error::input("exponent k must be at least 1"));
    }
    if s < 2 {
        return Err(Error::input(format!("need s >= 2, got {s}")));
    }
    check_table(primes, config.prime_limit)?;

    let z = prime_cutoff(k, s, config.cutoff_divisor);
    let mut contributing = Vec::new();
    let mut p = k + 1;
    while (p as f64) < z && p <= config.prime_limit {
        if primes.contains(p)? && alpha_below_one(k, p, s) {
            let m = coset_index(k, p);
            let term = (p as f64).ln() - s as f64 * ((m + 1) as f64).ln();
            contributing.push(ContributingPrime { prime: p, term });
        }
        p = match p.checked_add(k) {
            Some(next) => next,
            None => break,
        };
    }
    Ok(GlobalBoundReport::from_terms(
        k,
        s,
        BoundMode::Alpha,
        contributing,
    ))
}

/// Lower bound on `log(1/δ_k)` from exact local densities at every prime
/// `p <= prime_limit`.
pub fn bound_exact(
    form: &FormSpec,
    config: &GlobalBoundConfig,
    primes: &PrimeTable,
) -> Result<GlobalBoundReport> {
    config.validate()?;
    if config.prime_limit > DEFAULT_VALUE_SET_CAP {
        return Err(Error::Resource {
            what: "exact-mode prime limit",
            requested: config.prime_limit as u128,
            cap: DEFAULT_VALUE_SET_CAP as u128,
        });
    }
    check_table(primes, config.prime_limit)?;
    let k = form.exponent() as u64;
    let s = form.s() as u32;

    let terms: Vec<Option<ContributingPrime>> = primes
        .up_to(config.prime_limit)
        .par_iter()
        .map(|&p| exact_term(form, p))
        .collect::<Result<_>>()?;

    Ok(GlobalBoundReport::from_terms(
        k,
        s,
        BoundMode::Exact,
        terms.into_iter().flatten().collect(),
    ))
}

fn exact_term(form: &FormSpec, p: u64) -> Result<Option<ContributingPrime>> {
    let k = form.exponent() as u64;
    // When x -> x^k permutes F_p, any unit coefficient already covers F_p.
    if coset_index(k, p) == p - 1
        && form
            .coefficients()
            .iter()
            .any(|&a| a.rem_euclid(p as i64) != 0)
    {
        return Ok(None);
    }
    let powers = power_residues(p, k)?;
    let size = value_set_from_powers(form.coefficients(), &powers).len();
    Ok((size < p).then(|| ContributingPrime {
        prime: p,
        term: (p as f64 / size as f64).ln(),
    }))
}

/// Dispatches on `config.mode`; exact mode needs a form.
pub fn bound(
    k: u64,
    s: u32,
    form: Option<&FormSpec>,
    config: &GlobalBoundConfig,
    primes: &PrimeTable,
) -> Result<GlobalBoundReport> {
    match config.mode {
        BoundMode::Alpha => bound_alpha(k, s, config, primes),
        BoundMode::Exact => {
            let form = form.ok_or_else(|| Error::input("exact mode needs coefficients"))?;
            let exponent = u32::try_from(k)
                .map_err(|_| Error::input(format!("exponent {k} does not fit in 32 bits")))?;
            bound_exact(&form.with_exponent(exponent)?, config, primes)
        }
    }
}
