mod common;

use diagdensity::arith::{euler_phi, gcd, primes_in_ap, sieve_primes, von_mangoldt};
use diagdensity::avg::{
    average_log_inv_density, lemma3_error_integral, theorem1_double_sum, LandauConstants,
    PsiTable,
};
use diagdensity::global::{bound_alpha, bound_exact, prime_cutoff, BoundMode, GlobalBoundConfig};
use diagdensity::local::{alpha_bound, power_residues, value_set};
use diagdensity::scan::{boxed_scan, evaluate_form, sieve_upper, ScanConfig};
use diagdensity::{Density, FormSpec};

fn form(coeffs: &[i64], k: u32) -> FormSpec {
    FormSpec::new(coeffs.to_vec(), k).unwrap()
}

#[test]
fn arithmetic_examples() {
    assert_eq!(sieve_primes(10).unwrap().primes(), &[2, 3, 5, 7]);
    assert_eq!(sieve_primes(2).unwrap().primes(), &[2]);
    assert_eq!(sieve_primes(100).unwrap().len(), common::primes_between(1, 101).len());
    assert_eq!(primes_in_ap(40, 1.0, 63.2).unwrap(), vec![41]);
    assert!(primes_in_ap(1, 8.0, 10.0).unwrap().is_empty());
    assert_eq!(primes_in_ap(2, 27.0, 50.0).unwrap(), common::primes_between(27, 50));
    for n in 1..2000 {
        assert!((von_mangoldt(n) - common::lambda(n)).abs() < 1e-12, "{n}");
        assert_eq!(euler_phi(n), common::phi(n), "{n}");
    }
    assert_eq!(gcd(4, 12), 4);
    assert_eq!(gcd(40, 40), 40);
    assert_eq!(gcd(7, 15), 1);
}

#[test]
fn local_examples() {
    assert_eq!(power_residues(7, 3).unwrap().iter().collect::<Vec<_>>(), vec![0, 1, 6]);
    assert_eq!(power_residues(7, 1).unwrap().len(), 7);
    assert_eq!(power_residues(5, 4).unwrap().iter().collect::<Vec<_>>(), vec![0, 1]);
    assert!(power_residues(9, 2).is_err());
    for (a, k, p) in [(&[1, 1, 1][..], 6, 7), (&[1, 1, -1][..], 2, 7), (&[1, 1, 1][..], 40, 41)] {
        let ours: Vec<u64> = value_set(&form(a, k), p).unwrap().iter().collect();
        let brute: Vec<u64> = common::brute_value_set(a, k, p).into_iter().collect();
        assert_eq!(ours, brute);
    }
    assert!((alpha_bound(4, 13, 3) - 64.0 / 13.0).abs() < 1e-12);
    for p in common::primes_between(2, 200) {
        assert!((alpha_bound(p - 1, p, 4) - 16.0 / p as f64).abs() < 1e-12);
    }
}

#[test]
fn global_examples() {
    let primes = sieve_primes(1000).unwrap();
    assert!((prime_cutoff(40, 3, 4.0) - 40f64.powf(1.5) / 4.0).abs() < 1e-12);
    assert!((prime_cutoff(17, 2, 1.0) - 289.0).abs() < 1e-9);
    assert!((prime_cutoff(100, 3, 10.0) - 100.0).abs() < 1e-9);

    let alpha = |k: u64, r: f64| {
        let cfg = GlobalBoundConfig::new(r, 1000, BoundMode::Alpha).unwrap();
        bound_alpha(k, 3, &cfg, &primes).unwrap().log_inv_density_lower
    };
    assert_eq!(alpha(6, 4.0), 0.0);
    assert!((alpha(10, 1.0) - (11.0f64 / 8.0).ln()).abs() < 1e-12);
    for k in 1..200 {
        assert!((alpha(k, 4.0) - common::alpha_bound_for_k(k, 3, 4.0, 1000)).abs() < 1e-9);
    }

    let exact = |a: &[i64], k: u32, limit: u64| {
        let cfg = GlobalBoundConfig::new(4.0, limit, BoundMode::Exact).unwrap();
        bound_exact(&form(a, k), &cfg, &primes).unwrap()
    };
    let r = exact(&[1, 1, 1], 40, 50);
    assert!((r.term_at(41).unwrap() - (41.0f64 / 4.0).ln()).abs() < 1e-12);
    assert_eq!(exact(&[1, 1, -1], 2, 100).log_inv_density_lower, 0.0);
    assert_eq!(exact(&[1, 1, 1], 1, 500).log_inv_density_lower, 0.0);
}

#[test]
fn exact_bound_matches_brute_force_terms() {
    let primes = sieve_primes(60).unwrap();
    let a = [2, -3, 5];
    for k in [2u32, 3, 4, 6, 10] {
        let cfg = GlobalBoundConfig::new(4.0, 60, BoundMode::Exact).unwrap();
        let r = bound_exact(&form(&a, k), &cfg, &primes).unwrap();
        let expected: f64 = common::primes_between(1, 61)
            .into_iter()
            .map(|p| {
                let v = common::brute_value_set(&a, k, p).len() as f64;
                (p as f64 / v).ln()
            })
            .sum();
        assert!((r.log_inv_density_lower - expected).abs() < 1e-9, "k = {k}");
    }
}

#[test]
fn averaging_examples() {
    let table = PsiTable::new(10_000).unwrap();
    assert_eq!(table.psi(2.0, 5, 1).unwrap(), 0.0);
    for (x, q, a) in [(20.0, 2, 1), (500.0, 7, 3), (1000.0, 12, 5), (777.5, 1, 0)] {
        assert!((table.psi(x, q, a as i64).unwrap() - common::psi(x, q, a)).abs() < 1e-9);
    }
    assert!(table.psi(10_001.0, 1, 0).is_err());

    let e = lemma3_error_integral(&table, 10.0, 2.0, 3).unwrap();
    assert!((e - 0.33669).abs() < 1e-4);

    let primes = sieve_primes(10_000).unwrap();
    assert_eq!(theorem1_double_sum(&primes, 10.0, 3, 2.0).unwrap(), 0.0);
    assert_eq!(theorem1_double_sum(&primes, 50.0, 3, 1.0).unwrap(), 0.0);
    for (x, y) in [(100.0, 3.0), (500.0, 7.0), (1000.0, 10.0)] {
        let ours = theorem1_double_sum(&primes, x, 3, y).unwrap();
        assert!((ours - common::double_sum(x, 3, y)).abs() < 1e-8);
    }

    let avg = |x: u64, limit: u64| {
        let cfg = GlobalBoundConfig::new(1.0, limit, BoundMode::Alpha).unwrap();
        let primes = sieve_primes(limit).unwrap();
        average_log_inv_density(x, 3, &cfg, None, &primes).unwrap().average
    };
    assert_eq!(avg(5, 100), 0.0);
    assert_eq!(avg(2, 100), 0.0);
    let expected = ((11.0f64 / 8.0).ln() + (13.0f64 / 8.0).ln()) / 13.0;
    assert!((avg(13, 1000) - expected).abs() < 1e-12);
    assert!((expected - 0.06184).abs() < 1e-5);

    let c = LandauConstants::compute(1_000_000).unwrap();
    assert!((c.c_l - 1.9436).abs() < 1e-4);
}

#[test]
fn scan_examples() {
    assert_eq!(evaluate_form(&form(&[1, 1, -1], 3), &[1, 1, 1]).unwrap(), 1);
    assert_eq!(evaluate_form(&form(&[2, -3], 2), &[3, 2]).unwrap(), 6);
    assert_eq!(evaluate_form(&form(&[1, 1, 1], 6), &[0, 0, 0]).unwrap(), 0);

    let scan = |a: &[i64], k: u32, n: u64, b: u64| {
        boxed_scan(&form(a, k), &ScanConfig::new(n, b, vec![]).unwrap()).unwrap()
    };
    let r = scan(&[1, 1, -1], 2, 10, 6);
    assert_eq!(r.represented, (1..=10).collect::<Vec<_>>());
    assert_eq!(r.lower_density, Density::new(1, 1));
    assert!(scan(&[3, 1, 1], 3, 50, 0).represented.is_empty());
    assert_eq!(scan(&[1, 1, 1], 2, 4, 2).represented, vec![1, 2, 3, 4]);
    for (a, k, n, b) in [(&[1, 2, -3][..], 2, 60, 4), (&[1, 1, 1, -1][..], 3, 100, 4), (&[5, -7, 1, 1][..], 2, 80, 3)] {
        let ours = scan(a, k, n, b as u64);
        let brute: Vec<u64> = common::box_values(a, k, n, b).into_iter().collect();
        assert_eq!(ours.represented, brute);
        for (&v, x) in &ours.witnesses {
            assert_eq!(evaluate_form(&form(a, k), x).unwrap(), v as i128);
        }
    }

    let sieve = |primes: Vec<u64>, n: u64| {
        sieve_upper(&form(&[1, 1, 1], 6), &ScanConfig::new(n, 1, primes).unwrap()).unwrap()
    };
    let r = sieve(vec![7], 14);
    assert_eq!((r.sieve_admissible_count, r.sieve_upper_density), (8, Density::new(4, 7)));
    assert_eq!(sieve(vec![], 30).sieve_upper_density, Density::new(1, 1));
    for n in [91, 100, 1000, 1001] {
        let r = sieve(vec![7, 13], n);
        assert_eq!(r.sieve_admissible_count, common::admissible_count(&[1, 1, 1], 6, n, &[7, 13]));
    }
}
