//! Properties of the closed-form quantities: independent re-evaluations,
//! finite differences, monotone scans and small exhaustive inequality checks.

use astro_float::{BigFloat, RoundingMode};
use emso_core::analytic::{
    diag_expectation_asymptotic, expected_count, f_at_optimum, f_value, first_moment_sum, g_value, gamma_fn, grad_f,
    hessian_f, joint_domination_probability, k_star_asymptotic, k_star_equation, k_star_exact, lemma1_rhs_at,
    lemma2_bound, lemma3_bound, paley_zygmund, r0_of, seq_large, seq_small, Params,
};
use emso_core::oracle::OracleTable;
use emso_core::witness::{cross_pair_count, OverlapPattern};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn prm(n: u64, p: f64) -> Params {
    Params::new(n, p).unwrap()
}

#[test]
fn log_expectation_is_below_f_plus_g() {
    for (n, p) in [(20u64, 0.3), (100, 0.5), (1000, 0.7), (14481, 0.5)] {
        let pr = prm(n, p);
        let top = 40.min(n);
        for k in 1..=top {
            for l in 1..=top {
                for m in 1..=top {
                    if k + l + m > n {
                        continue;
                    }
                    let x = [k as f64, l as f64, m as f64];
                    let ln_e = expected_count(&pr, k, l, m).unwrap().logmag();
                    let bound = f_value(&pr, x).unwrap() + g_value(&pr, x).unwrap();
                    assert!(ln_e <= bound + 1e-9 * bound.abs().max(1.0), "n={n} p={p} ({k},{l},{m})");
                }
            }
        }
    }
}

#[test]
fn expectation_by_a_second_path() {
    // Term by term with no simplification: n!/(k! l! m! (n-k-l-m)!) as an
    // explicit product, powers as repeated products.
    let (n, p, k, l, m) = (100u64, 0.5f64, 2u64, 2u64, 2u64);
    let q = 1.0 - p;
    let mut multinomial = 1.0f64;
    for j in 0..k + l + m {
        multinomial *= (n - j) as f64;
    }
    for f in [k, l, m] {
        for j in 2..=f {
            multinomial /= j as f64;
        }
    }
    let mut qpow = 1.0;
    for _ in 0..(k * l + l * m + k * m - 3) {
        qpow *= q;
    }
    let dom = |s: u64| 1.0 - q.powi(s as i32);
    let mut domination = 1.0;
    for _ in 0..(n - k - l - m) {
        domination *= dom(k) * dom(l) * dom(m);
    }
    let direct = multinomial * (k * l * m) as f64 * qpow * p * p * p * domination;
    let got = expected_count(&prm(n, p), k, l, m).unwrap().to_f64();
    assert!((got - direct).abs() / direct < 1e-10, "{got} vs {direct}");
}

#[test]
fn small_cases_of_the_expectation() {
    assert!((expected_count(&prm(3, 0.5), 1, 1, 1).unwrap().to_f64() - 0.75).abs() < 1e-12);
    assert!((expected_count(&prm(4, 0.5), 1, 1, 1).unwrap().to_f64() - 0.375).abs() < 1e-12);
    assert!(expected_count(&prm(5, 0.5), 2, 2, 2).is_err());
    assert!(expected_count(&prm(5, 0.5), 0, 2, 2).is_err());
}

#[test]
fn g_on_the_diagonal() {
    for p in [0.2, 0.5, 0.9] {
        let pr = prm(1000, p);
        for k in 1..=50 {
            let kf = k as f64;
            let want = 9.0 * kf * (1.0 - p).powi(k);
            assert!((g_value(&pr, [kf; 3]).unwrap() - want).abs() <= 1e-12 * want.max(1e-300));
        }
    }
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let n = 10f64.powf(rng.gen_range(2.0..9.0)) as u64;
        let p = rng.gen_range(0.1..0.9);
        let pr = prm(n, p);
        let top = (n as f64 / 4.0).min(60.0);
        let x = [0; 3].map(|_| rng.gen_range(1.0..top));
        let g = grad_f(&pr, x).unwrap();
        for i in 0..3 {
            let h = 1e-5 * x[i];
            let (mut up, mut down) = (x, x);
            up[i] += h;
            down[i] -= h;
            let fd = (f_value(&pr, up).unwrap() - f_value(&pr, down).unwrap()) / (2.0 * h);
            let rel = (fd - g[i]).abs() / g[i].abs().max(1e-3);
            assert!(rel < 1e-5, "n={n} p={p} x={x:?} i={i}: {fd} vs {}", g[i]);
        }
    }
}

#[test]
fn mixed_partials_are_ln_q() {
    for p in [0.3, 0.5, 0.7] {
        let h = hessian_f(&prm(1000, p), [3.0, 4.5, 7.25]).unwrap();
        let lnq = prm(1000, p).ln_q();
        assert!((lnq - (1.0 - p).ln()).abs() < 1e-15);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(h.matrix[i][j], lnq);
                }
            }
        }
    }
}

#[test]
fn k_star_has_one_crossing_and_tracks_the_asymptotic_form() {
    for p in [0.3, 0.5, 0.7] {
        let mut prev = 0.0;
        for e in 3..=9 {
            let n = 10u64.pow(e);
            let pr = prm(n, p);
            let ks = k_star_exact(&pr).unwrap();
            assert!(ks.residual <= 1e-10);
            assert!(ks.k_star > prev, "k* increases with n");
            prev = ks.k_star;
            let ln_n = (n as f64).ln();
            let scaled = (ks.k_star - k_star_asymptotic(&pr).unwrap()).abs() / (ln_n.ln() / ln_n);
            assert!(scaled < 5.0, "n=1e{e} p={p}: {scaled}");

            let steps = 10_000;
            let mut crossings = 0;
            let mut last = k_star_equation(&pr, 1.0);
            for s in 1..=steps {
                let k = 1.0 + (n as f64 - 1.0) * s as f64 / steps as f64;
                let v = k_star_equation(&pr, k);
                if v.signum() != last.signum() {
                    crossings += 1;
                }
                last = v;
            }
            assert_eq!(crossings, 1, "n=1e{e} p={p}");
        }
    }
    for e in 3..=9 {
        let n = 10u64.pow(e);
        let a = k_star_asymptotic(&prm(n, 0.3)).unwrap();
        let b = k_star_asymptotic(&prm(n, 0.5)).unwrap();
        let c = k_star_asymptotic(&prm(n, 0.7)).unwrap();
        assert!(a > b && b > c);
    }
    assert!(k_star_asymptotic(&prm(2, 0.5)).is_err());
}

#[test]
fn k_star_at_eleven() {
    let ks = k_star_exact(&prm(11, 0.5)).unwrap();
    assert!((ks.k_star - 2.419_06).abs() < 1e-5);
    assert!(ks.residual <= 1e-10);
}

#[test]
fn f_at_optimum_grows_like_ln_ln_n() {
    for e in 3..=9 {
        let n = 10u64.pow(e);
        let fa = f_at_optimum(&prm(n, 0.5)).unwrap();
        let ratio = fa.abs() / (n as f64).ln().ln();
        // settles near 3.2 over this range
        assert!(ratio <= 3.5, "n=1e{e}: |f(A)|/ln ln n = {ratio}");
    }
}

#[test]
fn optimum_dominates_nearby_lattice_points() {
    let n = seq_small(0.5, 10).unwrap();
    let pr = prm(n, 0.5);
    let ks = k_star_exact(&pr).unwrap().k_star;
    let fa = f_value(&pr, [ks; 3]).unwrap();
    let base = ks.round() as i64;
    for dk in -5..=5 {
        for dl in -5..=5 {
            for dm in -5..=5 {
                let x = [base + dk, base + dl, base + dm].map(|v| v as f64);
                assert!(fa >= f_value(&pr, x).unwrap(), "{x:?}");
            }
        }
    }
}

#[test]
fn hessian_is_negative_definite_at_the_optimum() {
    for p in [0.3, 0.5, 0.7] {
        for n in [100u64, 1_000, 100_000, 10_000_000] {
            let pr = prm(n, p);
            let ks = k_star_exact(&pr).unwrap().k_star;
            let h = hessian_f(&pr, [ks; 3]).unwrap();
            assert!(h.minors[0] < 0.0 && h.minors[1] > 0.0 && h.minors[2] < 0.0);
        }
    }
}

#[test]
fn lemma1_rhs_shape() {
    let pr = prm(14481, 0.5);
    let ks = k_star_exact(&pr).unwrap().k_star;
    let base = ks.round() as u64 + 1;
    let mut prev = lemma1_rhs_at(&pr, ks, [base, base, base]).unwrap();
    assert!(prev < 0.0);
    for d in 1..20 {
        let v = lemma1_rhs_at(&pr, ks, [base + d, base, base]).unwrap();
        assert!(v < prev);
        prev = v;
    }
    let near = ks.round() as u64;
    if (near as f64 - ks).abs() < 0.5 {
        assert!(lemma1_rhs_at(&pr, ks, [near, base, base]).is_err());
    }
}

#[test]
fn gamma_values() {
    assert_eq!(gamma_fn(0.0), 0.0);
    assert!((gamma_fn(1.0) - (-1.0f64).exp()).abs() < 1e-15);
    let mut x: f64 = 1e-6;
    while x <= 1e3 {
        assert!(gamma_fn(x) <= x * x / 2.0, "x={x}");
        assert!(gamma_fn(x) >= 0.0);
        x *= 1.1;
    }
    // the series branch stays accurate where the direct form cancels
    let x: f64 = 1e-8;
    let series = x * x / 2.0 - x * x * x / 6.0;
    assert!((gamma_fn(x) - series).abs() <= 1e-12 * series);
}

#[test]
fn sequence_floors_match_a_512_bit_evaluation() {
    const PREC: usize = 512;
    let rm = RoundingMode::ToEven;
    for p in [0.3, 0.5, 0.7, 0.123] {
        let q = BigFloat::from_f64(1.0, PREC).sub(&BigFloat::from_f64(p, PREC), PREC, rm);
        let inv = BigFloat::from_f64(1.0, PREC).div(&q, PREC, rm);
        for i in 1..=30u64 {
            let ib = BigFloat::from_u64(i, PREC);
            // floor(i·inv^i)
            if let Ok(s) = seq_large(p, i) {
                let v = ib.mul(&inv.powi(i as usize, PREC, rm), PREC, rm);
                let lo = BigFloat::from_u64(s, PREC);
                let hi = BigFloat::from_u64(s + 1, PREC);
                assert!(lo.cmp(&v).unwrap() <= 0 && v.cmp(&hi).unwrap() < 0, "large p={p} i={i}");
            }
            // floor(i·inv^{i+1/2}) = s  iff  s² <= i²·inv^{2i+1} < (s+1)²
            if let Ok(s) = seq_small(p, i) {
                let v2 = ib.mul(&ib, PREC, rm).mul(&inv.powi(2 * i as usize + 1, PREC, rm), PREC, rm);
                let lo = BigFloat::from_u64(s, PREC);
                let hi = BigFloat::from_u64(s + 1, PREC);
                assert!(lo.mul(&lo, PREC, rm).cmp(&v2).unwrap() <= 0, "small p={p} i={i}");
                assert!(v2.cmp(&hi.mul(&hi, PREC, rm)).unwrap() < 0, "small p={p} i={i}");
            }
        }
    }
    assert_eq!(seq_small(0.5, 2).unwrap(), 11);
    assert_eq!(seq_large(0.5, 3).unwrap(), 24);
}

#[test]
fn first_moment_sum_matches_the_oracle() {
    for n in 3..=6usize {
        let table = OracleTable::build(n).unwrap();
        for p in [0.25, 0.5, 0.75] {
            let want = table.moments_all(p).unwrap().e_x;
            let got = first_moment_sum(&prm(n as u64, p)).unwrap();
            assert!(got.covers_domain);
            assert!((got.total.to_f64() - want).abs() / want < 1e-10, "n={n} p={p}");
        }
    }
}

#[test]
fn first_moment_sum_dominates_its_largest_term() {
    for i in [5u64, 8, 12] {
        let pr = prm(seq_small(0.5, i).unwrap(), 0.5);
        let k = k_star_exact(&pr).unwrap().k_star.round() as u64;
        let total = first_moment_sum(&pr).unwrap().total;
        assert!(total >= expected_count(&pr, k, k, k).unwrap());
    }
}

#[test]
fn diagonal_asymptotic_constants() {
    let c = diag_expectation_asymptotic(0.5, 1).unwrap();
    assert!((c - 0.063_493_635_934_240_97).abs() < 1e-15);
    let mut prev = 0.0;
    for k in 1..200 {
        let v = diag_expectation_asymptotic(0.5, k).unwrap();
        assert!(v > prev);
        prev = v;
    }
}

#[test]
fn r0_values_and_monotonicity() {
    assert_eq!(r0_of(0.5).unwrap(), 24);
    assert_eq!(r0_of(0.75).unwrap(), 12);
    assert_eq!(r0_of(1.0 - 1e-12).unwrap(), 1);
    let mut prev = u64::MAX;
    for j in 1..1000 {
        let r = r0_of(j as f64 / 1000.0).unwrap();
        assert!(r <= prev);
        prev = r;
    }
}

fn patterns_up_to(k: u32) -> Vec<OverlapPattern> {
    let mut rows = Vec::new();
    for a in 0..=k {
        for b in 0..=k - a {
            for c in 0..=k - a - b {
                rows.push([a, b, c]);
            }
        }
    }
    let mut out = Vec::new();
    for r0 in &rows {
        for r1 in &rows {
            for r2 in &rows {
                let pat = OverlapPattern::from_matrix([*r0, *r1, *r2]);
                if pat.fits(k) {
                    out.push(pat);
                }
            }
        }
    }
    out
}

#[test]
fn no_edge_probability_is_below_the_quadratic_bound() {
    for p in [0.3f64, 0.5, 0.7] {
        let ln_q = (1.0 - p).ln();
        for k in 1..=4u32 {
            for pat in patterns_up_to(k) {
                // at most the three designated pairs are excused
                let exact_ln = (cross_pair_count(&pat, k).unwrap() - 3) as f64 * ln_q;
                let bound = lemma2_bound(p, k as u64, pat.r() as u64).unwrap().logmag();
                assert!(exact_ln <= bound + 1e-12, "p={p} k={k} {:?}", pat.rij());
            }
        }
    }
    let kk = 5u64;
    let b = lemma2_bound(0.5, kk, 0).unwrap().logmag();
    assert!((b - (3 * kk * kk - 3) as f64 * 0.5f64.ln()).abs() < 1e-12);
    assert!(lemma2_bound(0.5, kk, 3 * kk).unwrap().to_f64() >= 1.0);
}

#[test]
fn concentrated_row_bound_is_the_quadratic_bound_times_a_penalty() {
    let (p, k, r0) = (0.5, 200u32, 6u32);
    let pat = OverlapPattern::from_matrix([[70, 70, 58], [0, 0, 0], [1, 1, 1]]);
    assert!(pat.concentrated_row(k, r0).is_some());
    let l3 = lemma3_bound(p, k as u64, &pat, r0 as u64).unwrap().logmag();
    let l2 = lemma2_bound(p, k as u64, pat.r() as u64).unwrap().logmag();
    let penalty = 4.0 * k as f64 * r0 as f64 * (1.0 - p).ln();
    assert!((l3 - (l2 + penalty)).abs() < 1e-9 * l3.abs());

    let loose = OverlapPattern::from_matrix([[10, 0, 0], [0, 10, 0], [0, 0, 10]]);
    assert!(lemma3_bound(p, k as u64, &loose, r0 as u64).is_err());
    // r0 must stay below k/30
    assert!(lemma3_bound(p, 150, &pat, 6).is_err());
}

#[test]
fn domination_probability_special_cases() {
    for p in [0.3f64, 0.5, 0.7] {
        for k in 1..=6u64 {
            let disjoint = OverlapPattern::zero();
            let want = (1.0 - (1.0 - p).powi(k as i32)).powi(6);
            let got = joint_domination_probability(&disjoint, p, k).unwrap();
            assert!((got - want).abs() < 1e-14);
        }
    }
    let same = OverlapPattern::from_matrix([[6, 0, 0], [0, 6, 0], [0, 0, 6]]);
    assert!(joint_domination_probability(&same, 0.75, 6).is_err());
}

#[test]
fn paley_zygmund_forms() {
    assert_eq!(paley_zygmund(1.0, 1.0, 0.0).unwrap(), 1.0);
    assert!(paley_zygmund(2.0, 3.0, 0.0).is_err());
    // ex = (p/q)^3 k^{3/2} (2π)^{-3/2}, ex2 = c k^3  =>  p^6 / ((2π)^3 q^6 c)
    let (p, c, k) = (0.5, 7.0, 40u64);
    let ex = diag_expectation_asymptotic(p, k).unwrap();
    let ex2 = c * (k as f64).powi(3);
    let want = p.powi(6) / ((2.0 * std::f64::consts::PI).powi(3) * (1.0 - p).powi(6) * c);
    assert!((paley_zygmund(ex, ex2, 0.0).unwrap() - want).abs() < 1e-15);
}

proptest! {
    #[test]
    fn expectation_is_symmetric(n in 6u64..5000, p in 0.05f64..0.95, k in 1u64..30, l in 1u64..30, m in 1u64..30) {
        prop_assume!(k + l + m <= n);
        let pr = prm(n, p);
        let a = expected_count(&pr, k, l, m).unwrap().logmag();
        let b = expected_count(&pr, m, k, l).unwrap().logmag();
        let c = expected_count(&pr, l, m, k).unwrap().logmag();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        prop_assert!((a - c).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn hessian_verdict_follows_minor_signs(n in 10u64..1_000_000_000, p in 0.05f64..0.95, x in prop::array::uniform3(0.5f64..50.0)) {
        let h = hessian_f(&prm(n, p), x).unwrap();
        let neg = h.minors[0] < 0.0 && h.minors[1] > 0.0 && h.minors[2] < 0.0;
        prop_assert_eq!(neg, h.verdict == emso_core::analytic::Definiteness::NegativeDefinite);
    }
}
