//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the library; each function recomputes its quantity from definitions.

#![allow(dead_code)]

use std::collections::BTreeSet;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_between(lo_exclusive: u64, hi_exclusive: u64) -> Vec<u64> {
    (lo_exclusive + 1..hi_exclusive).filter(|&n| is_prime(n)).collect()
}

/// `log p` if `n = p^j` with `j >= 1`, else 0.
pub fn lambda(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mut p = 2;
    while p * p <= n && n % p != 0 {
        p += 1;
    }
    if n % p != 0 {
        return (n as f64).ln();
    }
    let mut r = n;
    while r % p == 0 {
        r /= p;
    }
    if r == 1 {
        (p as f64).ln()
    } else {
        0.0
    }
}

pub fn phi(n: u64) -> u64 {
    (1..=n).filter(|&j| gcd(j, n) == 1).count() as u64
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `Σ_{n < x, n ≡ a mod q} Λ(n)`, term by term.
pub fn psi(x: f64, q: u64, a: u64) -> f64 {
    let mut total = 0.0;
    let mut n = if a % q == 0 { q } else { a % q };
    while (n as f64) < x {
        total += lambda(n);
        n += q;
    }
    total
}

pub fn pow_mod(base: u64, exp: u32, n: u64) -> u64 {
    let mut acc = 1 % n;
    for _ in 0..exp {
        acc = acc * base % n;
    }
    acc
}

/// Number of distinct nonzero k-th powers mod p.
pub fn unit_power_count(k: u32, p: u64) -> u64 {
    (1..p).map(|x| pow_mod(x, k, p)).collect::<BTreeSet<_>>().len() as u64
}

/// Image of `Σ a_i z_i^k` over all of `F_p^s`, by full enumeration.
pub fn brute_value_set(coeffs: &[i64], k: u32, p: u64) -> BTreeSet<u64> {
    let s = coeffs.len();
    let a: Vec<u64> = coeffs.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
    let mut out = BTreeSet::new();
    let mut z = vec![0u64; s];
    loop {
        let v = z
            .iter()
            .zip(&a)
            .fold(0, |acc, (&zi, &ai)| (acc + ai * pow_mod(zi, k, p)) % p);
        out.insert(v);
        let mut i = 0;
        while i < s {
            z[i] += 1;
            if z[i] < p {
                break;
            }
            z[i] = 0;
            i += 1;
        }
        if i == s {
            return out;
        }
    }
}

/// Image of the form over `(Z/n)^s` by one-coordinate-at-a-time reachability.
pub fn reachable_mod(coeffs: &[i64], k: u32, n: u64) -> Vec<bool> {
    let nn = n as usize;
    let mut reach = vec![false; nn];
    reach[0] = true;
    for &c in coeffs {
        let a = c.rem_euclid(n as i64) as u64;
        let terms: BTreeSet<usize> = (0..n).map(|z| (a * pow_mod(z, k, n) % n) as usize).collect();
        if terms.len() == nn {
            return vec![true; nn];
        }
        let mut next = vec![false; nn];
        for v in (0..nn).filter(|&v| reach[v]) {
            for &t in &terms {
                next[(v + t) % nn] = true;
            }
        }
        reach = next;
        if reach.iter().all(|&b| b) {
            break;
        }
    }
    reach
}

/// Integers in `[1, n_max]` hit by the form on the box `[-b, b]^s`.
pub fn box_values(coeffs: &[i64], k: u32, n_max: u64, b: i64) -> BTreeSet<u64> {
    let s = coeffs.len();
    let mut out = BTreeSet::new();
    let mut x = vec![-b; s];
    loop {
        let v: i128 = x
            .iter()
            .zip(coeffs)
            .map(|(&xi, &ai)| ai as i128 * (xi as i128).pow(k))
            .sum();
        if v >= 1 && v <= n_max as i128 {
            out.insert(v as u64);
        }
        let mut i = 0;
        while i < s {
            x[i] += 1;
            if x[i] <= b {
                break;
            }
            x[i] = -b;
            i += 1;
        }
        if i == s {
            return out;
        }
    }
}

/// Count of `n` in `[1, n_max]` whose residue mod every sieve prime is in
/// that prime's value set.
pub fn admissible_count(coeffs: &[i64], k: u32, n_max: u64, sieve: &[u64]) -> u64 {
    let sets: Vec<(u64, BTreeSet<u64>)> = sieve
        .iter()
        .map(|&p| (p, brute_value_set(coeffs, k, p)))
        .collect();
    (1..=n_max)
        .filter(|&n| sets.iter().all(|(p, v)| v.contains(&(n % p))))
        .count() as u64
}

/// `Σ_{(m+1)^s < p < mX} (log p − s log(m+1))` over primes and `m < Y`.
pub fn double_sum(x: f64, s: u32, y: f64) -> f64 {
    let mut total = 0.0;
    let mut m = 1u64;
    while (m as f64) < y {
        let lo = (m + 1).pow(s);
        let hi = m as f64 * x;
        let c = s as f64 * ((m + 1) as f64).ln();
        let mut p = m + 1;
        while (p as f64) < hi {
            if p > lo && is_prime(p) {
                total += (p as f64).ln() - c;
            }
            p += m;
        }
        m += 1;
    }
    total
}

/// The Stieltjes sum `Σ Λ(n)(1 − s log(m+1)/log n)` over `(m+1)^s < n < mX`,
/// `n ≡ 1 mod m`, `m < Y`: the partial-summation quantity written directly.
pub fn s1_stieltjes(x: f64, s: u32, y: f64) -> f64 {
    let mut total = 0.0;
    let mut m = 1u64;
    while (m as f64) < y {
        let lo = (m + 1).pow(s);
        let hi = m as f64 * x;
        let c = s as f64 * ((m + 1) as f64).ln();
        let mut n = 1u64;
        while (n as f64) < hi {
            if n > lo {
                let l = lambda(n);
                if l > 0.0 {
                    total += l * (1.0 - c / (n as f64).ln());
                }
            }
            n += m;
        }
        m += 1;
    }
    total
}

/// Per-k lower bound on `log(1/δ_k)` from primes `p ≡ 1 mod k` with
/// `((p−1)/k + 1)^s < p`, `p < k^{1+1/(s−1)}/r` and `p <= limit`.
pub fn alpha_bound_for_k(k: u64, s: u32, r: f64, limit: u64) -> f64 {
    let z = (k as f64).powf(1.0 + 1.0 / (s as f64 - 1.0)) / r;
    let mut total = 0.0;
    let mut p = k + 1;
    while (p as f64) < z && p <= limit {
        if is_prime(p) {
            let m = (p - 1) / k;
            if ((m + 1) as u128).pow(s) < p as u128 {
                total += (p as f64).ln() - s as f64 * ((m + 1) as f64).ln();
            }
        }
        p += k;
    }
    total
}

/// Deterministic coefficient vectors from a linear congruential stream.
pub fn coefficient_vectors(seed: u64, count: usize, s: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 33) % (2 * bound as u64 + 1)) as i64 - bound
    };
    let mut out = Vec::new();
    while out.len() < count {
        let v: Vec<i64> = (0..s).map(|_| next()).collect();
        if v.iter().any(|&a| a != 0) {
            out.push(v);
        }
    }
    out
}
