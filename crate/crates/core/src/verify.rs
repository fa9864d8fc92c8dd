//! Seeded property suite behind the `verify` subcommand.
//!
//! Each check sweeps a fixed family of inputs, compares the library against
//! an independent route (brute force, a different algebraic identity, or a
//! known inequality) and reports how many cases it ran and how many failed.
//! Counts are integers aggregated in a fixed order, so the report is the
//! same for any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{gcd_u64, sieve_primes, totient_table, LambdaTable, PrimeTable};
use crate::avg::{
    landau_sum, s1_partial_summation_bound, s1_prime_power_excess, theorem1_double_sum,
    theorem1_double_sum_terms, y_condition_holds, LandauConstants, PsiTable,
};
use crate::error::Result;
use crate::global::{bound_alpha, bound_exact, BoundMode, GlobalBoundConfig};
use crate::local::{
    power_residues, record_from_set, value_set_from_powers, FormSpec, ResidueSet,
};
use crate::scan::{boxed_scan, density_report, sieve_upper, ScanConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: u64,
    pub violations: u64,
    /// Informational checks are reported but never fail the suite.
    pub informational: bool,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.informational || self.violations == 0
    }

    pub fn status(&self) -> &'static str {
        match (self.informational, self.violations) {
            (true, _) => "INFO",
            (false, 0) => "PASS",
            _ => "FAIL",
        }
    }
}

fn check(name: &'static str, outcomes: impl IntoIterator<Item = bool>) -> CheckResult {
    let (mut cases, mut violations) = (0, 0);
    for ok in outcomes {
        cases += 1;
        if !ok {
            violations += 1;
        }
    }
    CheckResult {
        name,
        cases,
        violations,
        informational: false,
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `count` coefficient vectors with `s` entries in `[-bound, bound]`, not all zero.
pub fn random_coefficients(rng: &mut impl Rng, count: usize, s: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<i64> = (0..s).map(|_| rng.gen_range(-bound..=bound)).collect();
        if v.iter().any(|&a| a != 0) {
            out.push(v);
        }
    }
    out
}

/// The image of `Σ a_i z_i^k` over `(Z/n)^s`, built one coordinate at a
/// time over boolean arrays (no sumset code, no CRT).
pub fn brute_value_set_mod(coefficients: &[i64], k: u32, n: u64) -> Vec<bool> {
    let nn = n as usize;
    let powers: Vec<u64> = (0..n)
        .map(|z| (0..k).fold(1u128 % n as u128, |acc, _| acc * z as u128 % n as u128) as u64)
        .collect();
    let mut reach = vec![false; nn];
    reach[0] = true;
    for &a in coefficients {
        let a = a.rem_euclid(n as i64) as u128;
        let mut terms = vec![false; nn];
        for &z in &powers {
            terms[(a * z as u128 % n as u128) as usize] = true;
        }
        let terms: Vec<usize> = (0..nn).filter(|&t| terms[t]).collect();
        let mut next = vec![false; nn];
        for v in (0..nn).filter(|&v| reach[v]) {
            for &t in &terms {
                next[(v + t) % nn] = true;
            }
        }
        reach = next;
    }
    reach
}

fn to_set(n: u64, bits: &[bool]) -> ResidueSet {
    ResidueSet::from_residues(n, (0..n).filter(|&r| bits[r as usize]))
}

/// Runs the whole suite.
pub fn run_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let primes = sieve_primes(20_000)?;
    let psi = PsiTable::new(50_000)?;
    let mut out = vec![
        lemma2_dominance(seed, &primes),
        subgroup_size(&primes),
        sumset_matches_brute_force(seed),
        crt_multiplicativity(seed),
        p_minus_one_observation(&primes),
        chebyshev_identity()?,
        totient_multiplicative()?,
        psi_partition(&psi)?,
        exact_dominates_alpha(seed, &primes)?,
        limit_monotonicity(&primes)?,
        double_sum_terms_positive(&primes)?,
        integration_by_parts(&psi, &primes)?,
    ];
    out.push(literal_partial_summation_chain(&psi, &primes)?);
    out.push(landau_stability()?);
    out.extend(scan_checks(seed)?);
    Ok(out)
}

fn lemma2_dominance(seed: u64, primes: &PrimeTable) -> CheckResult {
    let mut rng = rng_for(seed, 1);
    let mut vectors = random_coefficients(&mut rng, 4, 3, 50);
    vectors.extend(random_coefficients(&mut rng, 4, 4, 50));
    let ps = primes.up_to(300);
    let outcomes: Vec<bool> = ps
        .par_iter()
        .flat_map_iter(|&p| {
            let vectors = &vectors;
            (1..=60u64).flat_map(move |k| {
                let powers = power_residues(p, k).expect("prime");
                vectors.iter().enumerate().map(move |(i, v)| {
                    let mut v = v.clone();
                    // force p | a_i on every other vector
                    if i % 2 == 1 {
                        let j = i % v.len();
                        v[j] = 0;
                    }
                    if v.iter().all(|&a| a == 0) {
                        v[0] = 1;
                    }
                    let form = FormSpec::new(v, k as u32).expect("valid form");
                    let set = value_set_from_powers(form.coefficients(), &powers);
                    record_from_set(&form, p, &set).within_alpha_bound(form.s() as u32)
                })
            })
        })
        .collect();
    check("lemma2_dominance", outcomes)
}

fn subgroup_size(primes: &PrimeTable) -> CheckResult {
    let outcomes: Vec<bool> = primes
        .up_to(1_000)
        .par_iter()
        .flat_map_iter(|&p| {
            (1..=100u64).map(move |k| {
                power_residues(p, k).expect("prime").len() == (p - 1) / gcd_u64(k, p - 1) + 1
            })
        })
        .collect();
    check("power_residue_subgroup_size", outcomes)
}

fn sumset_matches_brute_force(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 2);
    let mut vectors = random_coefficients(&mut rng, 3, 2, 20);
    vectors.extend(random_coefficients(&mut rng, 3, 3, 20));
    let mut outcomes = Vec::new();
    for &p in sieve_primes(23).expect("small").primes() {
        for k in 1..=12u32 {
            for v in &vectors {
                let form = FormSpec::new(v.clone(), k).expect("valid");
                let set = crate::local::value_set(&form, p).expect("small prime");
                outcomes.push(set == to_set(p, &brute_value_set_mod(v, k, p)));
            }
        }
    }
    check("sumset_vs_brute_force", outcomes)
}

fn crt_multiplicativity(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 3);
    let vectors = random_coefficients(&mut rng, 2, 3, 20);
    let small: Vec<u64> = sieve_primes(19).expect("small").primes().to_vec();
    let mut cases = Vec::new();
    for (i, &p) in small.iter().enumerate() {
        for &q in &small[i + 1..] {
            for k in 1..=6u32 {
                for v in &vectors {
                    cases.push((p, q, k, v.clone()));
                }
            }
        }
    }
    let outcomes: Vec<bool> = cases
        .par_iter()
        .map(|(p, q, k, v)| {
            let count = |n: u64| brute_value_set_mod(v, *k, n).iter().filter(|&&b| b).count();
            count(p * q) == count(*p) * count(*q)
        })
        .collect();
    check("crt_multiplicativity", outcomes)
}

fn p_minus_one_observation(primes: &PrimeTable) -> CheckResult {
    let outcomes: Vec<bool> = primes
        .up_to(500)
        .iter()
        .flat_map(|&p| {
            [vec![1i64, 1, 1], vec![1, -1, 1, 1]].into_iter().map(move |v| {
                let s = v.len() as u32;
                let form = FormSpec::new(v, (p - 1) as u32).expect("valid");
                let size = crate::local::value_set(&form, p).expect("prime").len();
                // size / p <= 2^s / p
                size <= 1 << s
            })
        })
        .collect();
    check("p_minus_one_observation", outcomes)
}

fn chebyshev_identity() -> Result<CheckResult> {
    let table = LambdaTable::new(5_000)?;
    let outcomes = (1..=5_000u64).map(|n| {
        let s: f64 = (1..=n).filter(|d| n % d == 0).map(|d| table.get(d)).sum();
        (s - (n as f64).ln()).abs() < 1e-9
    });
    Ok(check("chebyshev_identity", outcomes))
}

fn totient_multiplicative() -> Result<CheckResult> {
    let phi = totient_table(10_000)?;
    let mut outcomes = Vec::new();
    for a in 1..=100u64 {
        for b in 1..=100u64 {
            if gcd_u64(a, b) == 1 {
                outcomes.push(phi[(a * b) as usize] == phi[a as usize] * phi[b as usize]);
            }
        }
    }
    Ok(check("totient_multiplicative", outcomes))
}

fn psi_partition(psi: &PsiTable) -> Result<CheckResult> {
    let mut outcomes = Vec::new();
    for q in 1..=30u64 {
        for x in [10.0, 333.3, 4_096.0, 10_000.0] {
            let whole = psi.psi(x, 1, 0)?;
            let mut parts = 0.0;
            for a in 0..q as i64 {
                parts += psi.psi(x, q, a)?;
            }
            outcomes.push((parts - whole).abs() < 1e-8);
        }
    }
    Ok(check("psi_partition", outcomes))
}

fn exact_dominates_alpha(seed: u64, primes: &PrimeTable) -> Result<CheckResult> {
    let mut rng = rng_for(seed, 4);
    let vectors = random_coefficients(&mut rng, 3, 3, 30);
    let alpha_cfg = GlobalBoundConfig::new(1.0, 500, BoundMode::Alpha)?;
    let exact_cfg = GlobalBoundConfig::new(1.0, 500, BoundMode::Exact)?;
    let mut outcomes = Vec::new();
    for v in &vectors {
        for k in 2..=40u32 {
            let form = FormSpec::new(v.clone(), k)?;
            let exact = bound_exact(&form, &exact_cfg, primes)?;
            let alpha = bound_alpha(k as u64, 3, &alpha_cfg, primes)?;
            for c in &alpha.contributing {
                outcomes.push(exact.term_at(c.prime).unwrap_or(0.0) >= c.term - 1e-12);
            }
            outcomes.push(exact.log_inv_density_lower >= alpha.log_inv_density_lower - 1e-12);
        }
    }
    Ok(check("exact_dominates_alpha", outcomes))
}

fn limit_monotonicity(primes: &PrimeTable) -> Result<CheckResult> {
    let mut outcomes = Vec::new();
    for k in [6u32, 12, 30, 40] {
        let form = FormSpec::new(vec![1, 1, 1], k)?;
        let mut last = 0.0;
        for limit in [2u64, 20, 100, 300] {
            let cfg = GlobalBoundConfig::new(1.0, limit, BoundMode::Exact)?;
            let v = bound_exact(&form, &cfg, primes)?.log_inv_density_lower;
            outcomes.push(v >= last);
            last = v;
        }
        // k = p - 1 observation through the global bound
        let p = k as u64 + 1;
        if primes.contains(p)? {
            let cfg = GlobalBoundConfig::new(1.0, p, BoundMode::Exact)?;
            let upper = bound_exact(&form, &cfg, primes)?.density_upper;
            outcomes.push(upper <= 8.0 / p as f64 + 1e-12);
        }
    }
    Ok(check("bound_limit_monotonicity", outcomes))
}

fn chain_cases() -> Vec<(f64, f64)> {
    let mut cases = Vec::new();
    for x in [50.0, 100.0, 500.0] {
        let mut y = 2.0;
        while y_condition_holds(x, y, 3) {
            cases.push((x, y));
            y += 1.0;
        }
    }
    cases
}

fn double_sum_terms_positive(primes: &PrimeTable) -> Result<CheckResult> {
    let mut outcomes = Vec::new();
    for (x, y) in chain_cases() {
        for t in theorem1_double_sum_terms(primes, x, 3, y)? {
            outcomes.push(t.term > 0.0);
        }
    }
    Ok(check("double_sum_terms_positive", outcomes))
}

/// Integrating `1 - s log(m+1)/log t` against `dψ(t; m, 1)` by parts is
/// exact: the partial-summation expression equals the prime sum plus the
/// prime-power terms, which are nonnegative.
fn integration_by_parts(psi: &PsiTable, primes: &PrimeTable) -> Result<CheckResult> {
    let mut outcomes = Vec::new();
    for (x, y) in chain_cases() {
        let s1 = s1_partial_summation_bound(psi, x, 3, y)?;
        let ds = theorem1_double_sum(primes, x, 3, y)?;
        let ex = s1_prime_power_excess(psi, x, 3, y)?;
        outcomes.push(ex >= 0.0 && (s1 - ds - ex).abs() <= 1e-9 * s1.abs().max(1.0));
    }
    Ok(check("partial_summation_identity", outcomes))
}

/// `theorem1_double_sum >= s1_partial_summation_bound`, as literally stated.
/// Prime powers make the right side larger, so this is informational.
fn literal_partial_summation_chain(psi: &PsiTable, primes: &PrimeTable) -> Result<CheckResult> {
    let mut outcomes = Vec::new();
    for (x, y) in chain_cases() {
        let s1 = s1_partial_summation_bound(psi, x, 3, y)?;
        let ds = theorem1_double_sum(primes, x, 3, y)?;
        outcomes.push(ds >= s1);
    }
    let mut result = check("partial_summation_chain_literal", outcomes);
    result.informational = true;
    Ok(result)
}

fn landau_stability() -> Result<CheckResult> {
    let c = LandauConstants::compute(100_000)?;
    let a = landau_sum(10_000, &c)?;
    let b = landau_sum(100_000, &c)?;
    let offset = |r: &crate::avg::LandauComparison| r.partial_sum - c.c_l * (r.x as f64).ln();
    Ok(check(
        "landau_stability",
        [(offset(&b) - offset(&a)).abs() < 0.01],
    ))
}

fn random_form(rng: &mut ChaCha8Rng) -> FormSpec {
    let s = rng.gen_range(2..=3);
    let v = random_coefficients(rng, 1, s, 3).pop().expect("one vector");
    FormSpec::new(v, rng.gen_range(2..=5)).expect("valid")
}

fn scan_checks(seed: u64) -> Result<Vec<CheckResult>> {
    const SIEVE: [u64; 4] = [3, 5, 7, 13];
    let mut rng = rng_for(seed, 5);
    let (mut mono_b, mut mono_p, mut consistent, mut aligned) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for _ in 0..10 {
        let form = random_form(&mut rng);
        let n = rng.gen_range(50..400);
        let mut last: Vec<u64> = Vec::new();
        for b in 0..4 {
            let r = boxed_scan(&form, &ScanConfig::new(n, b, vec![])?)?;
            mono_b.push(last.iter().all(|x| r.represented.binary_search(x).is_ok()));
            last = r.represented;
        }
        let mut prev = None;
        for used in 0..=SIEVE.len() {
            let cfg = ScanConfig::new(n, 0, SIEVE[..used].to_vec())?;
            let d = sieve_upper(&form, &cfg)?.sieve_upper_density;
            mono_p.push(prev.is_none_or(|p| d <= p));
            prev = Some(d);
        }
        let r = density_report(&form, &ScanConfig::new(n, 3, SIEVE.to_vec())?)?;
        consistent.push(r.consistent);

        let modulus: u64 = SIEVE[..2].iter().product();
        let cfg = ScanConfig::new(modulus * rng.gen_range(1..20), 0, SIEVE[..2].to_vec())?;
        let r = sieve_upper(&form, &cfg)?;
        let product = SIEVE[..2]
            .iter()
            .map(|&p| crate::local::local_density(&form, p).map(|l| l.density))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .try_fold(crate::local::Density::one(), |acc, d| acc.checked_mul(d))
            .expect("small product");
        aligned.push(r.sieve_upper_density == product);
    }
    Ok(vec![
        check("scan_monotone_in_box", mono_b),
        check("sieve_monotone_in_primes", mono_p),
        check("scan_consistency", consistent),
        check("sieve_matches_local_product", aligned),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_mod_composite() {
        // x^2 + y^2 mod 15
        let bits = brute_value_set_mod(&[1, 1], 2, 15);
        let mut expect = vec![false; 15];
        for x in 0..15u64 {
            for y in 0..15u64 {
                expect[((x * x + y * y) % 15) as usize] = true;
            }
        }
        assert_eq!(bits, expect);
    }

    #[test]
    fn suite_passes_for_two_seeds() {
        for seed in [0, 17] {
            let results = run_suite(seed).unwrap();
            for r in &results {
                assert!(r.passed(), "{r:?}");
                assert!(r.cases > 0, "{r:?}");
            }
        }
    }
}
