//! Averaging over the exponent `k`.
//!
//! Everything here is built on the Chebyshev function
//! `psi(X; q, a) = Σ_{n < X, n ≡ a (mod q)} Λ(n)` (strict `n < X`):
//!
//! * [`lemma3_lhs`]: `Σ_{1 <= m < Y} psi(mX; m, 1)` and its predicted main
//!   term `ζ(2)ζ(3)log 2 / ζ(6) · XY`,
//! * [`lemma3_error_integral`]: `Σ_m ∫_{(m+1)^s}^{mX} psi(t; m, 1) / (t log² t) dt`,
//!   evaluated exactly on the step function,
//! * [`theorem1_double_sum`]: `Σ_{m < Y} Σ_{p ≡ 1 (m), (m+1)^s < p < mX} (log p - s log(m+1))`,
//! * [`s1_partial_summation_bound`]: the same sum rewritten by partial
//!   summation against `dψ(t; m, 1)`,
//! * [`average_log_inv_density`]: `(1/X) Σ_{k < X}` of a per-`k` bound.
//!
//! Sums over `m` and `k` use integers with `1 <= m < Y` (strict).

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{sieve_primes, totient_table, LambdaTable, PrimeTable};
use crate::error::{Error, Result};
use crate::global::{bound, GlobalBoundConfig};
use crate::local::FormSpec;
use crate::sum::{compensated_sum, NeumaierSum};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Primes up to this bound enter `Σ_p log p / (p² - p + 1)`.
pub const DEFAULT_PRIME_CORRECTION_BOUND: u64 = 1_000_000;

/// Cumulative von Mangoldt table answering `psi(X; q, a)` for `X <= limit`.
#[derive(Debug, Clone)]
pub struct PsiTable {
    lambda: LambdaTable,
    /// `cumulative[n] = Σ_{j <= n} Λ(j)`
    cumulative: Vec<f64>,
}

impl PsiTable {
    pub fn new(limit: u64) -> Result<Self> {
        let lambda = LambdaTable::new(limit)?;
        let mut acc = NeumaierSum::new();
        let cumulative = lambda
            .values()
            .iter()
            .map(|&v| {
                acc.add(v);
                acc.value()
            })
            .collect();
        Ok(Self { lambda, cumulative })
    }

    pub fn limit(&self) -> u64 {
        self.lambda.limit()
    }

    pub fn lambda(&self) -> &LambdaTable {
        &self.lambda
    }

    fn top_index(&self, x: f64) -> Result<u64> {
        if !(x <= self.limit() as f64) {
            return Err(Error::Range {
                what: "psi argument",
                requested: x,
                limit: self.limit(),
            });
        }
        // largest n with n < x
        Ok((x.ceil() - 1.0).max(0.0) as u64)
    }

    /// `Σ_{n < x, n ≡ a (mod q)} Λ(n)`.
    pub fn psi(&self, x: f64, q: u64, a: i64) -> Result<f64> {
        if q == 0 {
            return Err(Error::input("modulus q must be at least 1"));
        }
        let top = self.top_index(x)?;
        if q == 1 {
            return Ok(self.cumulative[top as usize]);
        }
        let r = a.rem_euclid(q as i64) as u64;
        let start = if r == 0 { q } else { r };
        let values = self.lambda.values();
        Ok(compensated_sum(
            (start..=top)
                .step_by(q as usize)
                .map(|n| values[n as usize]),
        ))
    }

    /// `(n, Λ(n))` for prime powers `n < x` with `n ≡ 1 (mod m)`.
    fn prime_powers_in_class(&self, x: f64, m: u64) -> Result<impl Iterator<Item = (u64, f64)> + '_> {
        let top = self.top_index(x)?;
        let values = self.lambda.values();
        let start = if m == 1 { 1 } else { 1 + m };
        Ok((start..=top)
            .step_by(m as usize)
            .map(move |n| (n, values[n as usize]))
            .filter(|&(_, v)| v > 0.0))
    }
}

/// Riemann zeta for real `s > 1`: direct series to `N - 1` plus an
/// Euler–Maclaurin tail.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta series needs s > 1");
    const N: f64 = 12.0;
    // B_{2j} / (2j)!
    const COEFFS: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
        1.0 / 74_724_249_600.0,
    ];
    let mut acc = NeumaierSum::new();
    for n in 1..N as u64 {
        acc.add((n as f64).powf(-s));
    }
    acc.add(N.powf(1.0 - s) / (s - 1.0));
    acc.add(0.5 * N.powf(-s));
    // rising factorial s (s+1) ... (s + 2j - 2)
    let mut rising = s;
    let mut power = N.powf(-s - 1.0);
    for (j, c) in COEFFS.iter().enumerate() {
        acc.add(c * rising * power);
        let a = s + 2.0 * j as f64 + 1.0;
        rising *= a * (a + 1.0);
        power /= N * N;
    }
    acc.value()
}

/// Constants in the totient-sum asymptotic and the main term of the
/// `psi(mX; m, 1)` sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandauConstants {
    /// `ζ(2)ζ(3)/ζ(6)`
    pub c_l: f64,
    /// `c_l · log 2`
    pub c3: f64,
    pub gamma: f64,
    /// `Σ_{p <= prime_bound} log p / (p² - p + 1)`
    pub prime_correction: f64,
    pub prime_bound: u64,
}

impl LandauConstants {
    pub fn compute(prime_bound: u64) -> Result<Self> {
        let c_l = zeta(2.0) * zeta(3.0) / zeta(6.0);
        let primes = sieve_primes(prime_bound)?;
        let prime_correction = compensated_sum(primes.primes().iter().map(|&p| {
            let pf = p as f64;
            pf.ln() / (pf * pf - pf + 1.0)
        }));
        Ok(Self {
            c_l,
            c3: c_l * std::f64::consts::LN_2,
            gamma: EULER_GAMMA,
            prime_correction,
            prime_bound,
        })
    }

    /// `c_l (log x + γ - Σ_p log p/(p²-p+1))`.
    pub fn landau_prediction(&self, x: f64) -> f64 {
        self.c_l * (x.ln() + self.gamma - self.prime_correction)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandauComparison {
    pub x: u64,
    /// `Σ_{n <= x} 1/φ(n)`
    pub partial_sum: f64,
    pub prediction: f64,
}

impl LandauComparison {
    pub fn error(&self) -> f64 {
        self.partial_sum - self.prediction
    }
}

/// `Σ_{n <= x} 1/φ(n)` (inclusive) next to its asymptotic prediction.
pub fn landau_sum(x: u64, constants: &LandauConstants) -> Result<LandauComparison> {
    if x == 0 {
        return Err(Error::input("landau_sum needs x >= 1"));
    }
    let phi = totient_table(x)?;
    let partial_sum = compensated_sum(phi[1..].iter().map(|&v| 1.0 / v as f64));
    Ok(LandauComparison {
        x,
        partial_sum,
        prediction: constants.landau_prediction(x as f64),
    })
}

fn m_range(y: f64) -> impl Iterator<Item = u64> {
    (1u64..).take_while(move |&m| (m as f64) < y)
}

fn check_x_y(x: f64, y: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() || !(y.is_finite()) {
        return Err(Error::input(format!("need finite X >= 0 and Y, got ({x}, {y})")));
    }
    Ok(())
}

/// `Σ_{1 <= m < Y} psi(mX; m, 1)`. Requires `Y <= X^{1/2}`.
pub fn lemma3_lhs(table: &PsiTable, x: f64, y: f64) -> Result<f64> {
    check_x_y(x, y)?;
    if y > x.sqrt() {
        return Err(Error::input(format!("need Y <= X^(1/2), got X = {x}, Y = {y}")));
    }
    let terms = m_range(y)
        .map(|m| table.psi(m as f64 * x, m, 1))
        .collect::<Result<Vec<_>>>()?;
    Ok(compensated_sum(terms))
}

/// `ζ(2)ζ(3) log 2 / ζ(6) · X · Y`.
pub fn lemma3_main_term(constants: &LandauConstants, x: f64, y: f64) -> f64 {
    constants.c3 * x * y
}

/// `∫_{(m+1)^s}^{mX} psi(t; m, 1) / (t log² t) dt` for one `m`.
///
/// `psi(t; m, 1)` jumps by `Λ(n)` just after `t = n`, and `-1/log t` is an
/// antiderivative of `1/(t log² t)`, so each prime power `n < mX` in the
/// class contributes `Λ(n) (1/log max(n, A) - 1/log B)`.
pub fn error_integral_term(table: &PsiTable, x: f64, s: u32, m: u64) -> Result<f64> {
    let lower = ((m + 1) as f64).powi(s as i32);
    let upper = m as f64 * x;
    if lower >= upper {
        return Ok(0.0);
    }
    let inv_log_upper = 1.0 / upper.ln();
    Ok(compensated_sum(table.prime_powers_in_class(upper, m)?.map(
        |(n, lam)| lam * (1.0 / (n as f64).max(lower).ln() - inv_log_upper),
    )))
}

/// `Σ_{1 <= m < Y} ∫_{(m+1)^s}^{mX} psi(t; m, 1) / (t log² t) dt`.
pub fn lemma3_error_integral(table: &PsiTable, x: f64, y: f64, s: u32) -> Result<f64> {
    check_x_y(x, y)?;
    check_s(s)?;
    let terms = m_range(y)
        .map(|m| error_integral_term(table, x, s, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(compensated_sum(terms))
}

fn check_s(s: u32) -> Result<()> {
    if s < 2 {
        return Err(Error::input(format!("need s >= 2, got {s}")));
    }
    Ok(())
}

/// `(Y + 1)^s < X Y`.
pub fn y_condition_holds(x: f64, y: f64, s: u32) -> bool {
    (y + 1.0).powi(s as i32) < x * y
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoubleSumTerm {
    pub m: u64,
    pub p: u64,
    pub term: f64,
}

/// The individual terms of [`theorem1_double_sum`], ordered by `m` then `p`.
pub fn theorem1_double_sum_terms(
    primes: &PrimeTable,
    x: f64,
    s: u32,
    y: f64,
) -> Result<Vec<DoubleSumTerm>> {
    check_x_y(x, y)?;
    check_s(s)?;
    let mut out = Vec::new();
    for m in m_range(y) {
        let lower = ((m + 1) as f64).powi(s as i32);
        let upper = m as f64 * x;
        if lower >= upper {
            continue;
        }
        let weight = s as f64 * ((m + 1) as f64).ln();
        for p in primes.primes_in_ap(m, lower, upper)? {
            out.push(DoubleSumTerm {
                m,
                p,
                term: (p as f64).ln() - weight,
            });
        }
    }
    Ok(out)
}

/// `Σ_{1 <= m < Y} Σ_{p ≡ 1 (mod m), (m+1)^s < p < mX} (log p - s log(m+1))`.
///
/// Every term is positive. `(Y + 1)^s < XY` is not enforced here; see
/// [`y_condition_holds`].
pub fn theorem1_double_sum(primes: &PrimeTable, x: f64, s: u32, y: f64) -> Result<f64> {
    Ok(compensated_sum(
        theorem1_double_sum_terms(primes, x, s, y)?
            .into_iter()
            .map(|t| t.term),
    ))
}

/// `Σ_{1 <= m < Y} [psi(mX; m, 1)(1 - s log(m+1)/log(mX)) - s log(m+1) E_m]`
/// with `E_m` from [`error_integral_term`]. Values of `m` with
/// `(m+1)^s >= mX` contribute 0. May be negative for small `X`.
pub fn s1_partial_summation_bound(table: &PsiTable, x: f64, s: u32, y: f64) -> Result<f64> {
    check_x_y(x, y)?;
    check_s(s)?;
    let mut terms = Vec::new();
    for m in m_range(y) {
        let lower = ((m + 1) as f64).powi(s as i32);
        let upper = m as f64 * x;
        if lower >= upper {
            continue;
        }
        let log_weight = s as f64 * ((m + 1) as f64).ln();
        let psi = table.psi(upper, m, 1)?;
        let integral = error_integral_term(table, x, s, m)?;
        terms.push(psi * (1.0 - log_weight / upper.ln()) - log_weight * integral);
    }
    Ok(compensated_sum(terms))
}

/// Contribution of proper prime powers `p^j` (`j >= 2`) to the
/// partial-summation bound: `Σ Λ(n)(1 - s log(m+1)/log n)` over
/// `n ≡ 1 (mod m)`, `(m+1)^s < n < mX`.
///
/// Integrating by parts is exact, so
/// `s1_partial_summation_bound = theorem1_double_sum + s1_prime_power_excess`.
pub fn s1_prime_power_excess(table: &PsiTable, x: f64, s: u32, y: f64) -> Result<f64> {
    check_x_y(x, y)?;
    check_s(s)?;
    let mut terms = Vec::new();
    for m in m_range(y) {
        let lower = ((m + 1) as f64).powi(s as i32);
        let upper = m as f64 * x;
        if lower >= upper {
            continue;
        }
        let log_weight = s as f64 * ((m + 1) as f64).ln();
        for (n, lam) in table.prime_powers_in_class(upper, m)? {
            let nf = n as f64;
            if nf <= lower || (lam - nf.ln()).abs() < 1e-9 {
                continue;
            }
            terms.push(lam * (1.0 - log_weight / nf.ln()));
        }
    }
    Ok(compensated_sum(terms))
}

/// `X`, `s`, `Y` for the averaged estimates; optionally `Y = X^{1/(s-1+η)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AverageConfig {
    pub x: f64,
    pub s: u32,
    pub y: f64,
    pub eta: Option<f64>,
}

impl AverageConfig {
    /// Explicit `Y`; rejects parameters violating `(Y + 1)^s < XY`.
    pub fn with_y(x: f64, s: u32, y: f64) -> Result<Self> {
        let config = Self { x, s, y, eta: None };
        config.validate()?;
        Ok(config)
    }

    /// `Y = X^{1/(s-1+η)}` with `0 < η < 1/2`.
    pub fn with_eta(x: f64, s: u32, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 0.5) {
            return Err(Error::input(format!("eta must lie in (0, 1/2), got {eta}")));
        }
        check_s(s)?;
        let y = x.powf(1.0 / (s as f64 - 1.0 + eta));
        let config = Self {
            x,
            s,
            y,
            eta: Some(eta),
        };
        config.validate()?;
        Ok(config)
    }

    /// `η = C / log X`.
    pub fn eta_from_constant(c: f64, x: f64) -> f64 {
        c / x.ln()
    }

    pub fn validate(&self) -> Result<()> {
        check_x_y(self.x, self.y)?;
        check_s(self.s)?;
        if !(self.y >= 1.0) {
            return Err(Error::input(format!("need Y >= 1, got {}", self.y)));
        }
        if !y_condition_holds(self.x, self.y, self.s) {
            return Err(Error::input(format!(
                "(Y+1)^s < XY fails for X = {}, Y = {}, s = {}",
                self.x, self.y, self.s
            )));
        }
        Ok(())
    }

    /// `Y <= X^{1/2}`, the range where the `psi(mX; m, 1)` sum estimate applies.
    pub fn within_lemma3_range(&self) -> bool {
        self.y <= self.x.sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AverageReport {
    pub x: u64,
    pub s: u32,
    /// `(1/X) Σ_{1 <= k < X}` of the per-`k` lower bound on `log(1/δ_k)`.
    pub average: f64,
    /// `X^{1/(s-1)} / log X`
    pub reference: f64,
    /// `(k, bound)` for `1 <= k < X`.
    pub per_k: Vec<(u64, f64)>,
}

impl AverageReport {
    /// `average / reference`, the normalisation whose stability is checked.
    pub fn normalized(&self) -> f64 {
        self.average / self.reference
    }
}

/// `(1/X) Σ_{1 <= k < X}` of the per-`k` global bound in `config.mode`.
/// In exact mode the coefficients of `form` are used at every `k`, and `s`
/// must match the form.
pub fn average_log_inv_density(
    x: u64,
    s: u32,
    config: &GlobalBoundConfig,
    form: Option<&FormSpec>,
    primes: &PrimeTable,
) -> Result<AverageReport> {
    if x < 2 {
        return Err(Error::input(format!("need X >= 2, got {x}")));
    }
    check_s(s)?;
    if let Some(f) = form {
        if f.s() as u32 != s {
            return Err(Error::input(format!(
                "form has {} variables but s = {s}",
                f.s()
            )));
        }
    }
    let per_k: Vec<(u64, f64)> = (1..x)
        .into_par_iter()
        .map(|k| bound(k, s, form, config, primes).map(|r| (k, r.log_inv_density_lower)))
        .collect::<Result<_>>()?;
    let total = compensated_sum(per_k.iter().map(|&(_, v)| v));
    let xf = x as f64;
    Ok(AverageReport {
        x,
        s,
        average: total / xf,
        reference: xf.powf(1.0 / (s as f64 - 1.0)) / xf.ln(),
        per_k,
    })
}
