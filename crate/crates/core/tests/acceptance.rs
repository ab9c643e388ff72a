//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Every assertion is an exact identity or an exact valuation comparison;
//! there are no floating-point tolerances anywhere. Run with
//! `cargo test --test acceptance -- --nocapture` to see the summary lines.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, OnceLock};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pqfourier::base::{bit_length, ones_count, Config, ZpPoint};
use pqfourier::cyclo::CycloNum;
use pqfourier::dual::{enumerate_ball, PHat};
use pqfourier::fourier::{
    character_fn, conv_dual, conv_zp, dirac_zero, fourier_fwd, fourier_inv, haar_integral,
    lcfn_eq, norm_dual_sup, norm_dual_window, norm_fn, parseval, pointwise_mul, DualFn, LCFn,
};
use pqfourier::measures::{
    aq_partial_closed, aq_tilde, mu_tilde, rational_qval, AqLimit, MeasureHat,
};
use pqfourier::qadic::FieldCtx;
use pqfourier::value::{Backend, ExactBackend, QAdicBackend, QNorm};
use pqfourier::wtt::{
    build_phi_n, conv_measure_phi_values, conv_measure_table, lemma_estimates_check, m0_bound,
    measure_to_qadic, nondensity_witness, norm_over_subball, phi_conv_identity_check,
    truncate_dual, value_attainment_scan, wtt_continuous_check,
};

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn report(name: &str, body: impl FnOnce()) {
    let start = std::time::Instant::now();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("ACCEPTANCE {name}: PASS ({:.2?})", start.elapsed()),
        Err(e) => {
            println!("ACCEPTANCE {name}: FAIL");
            std::panic::resume_unwind(e);
        }
    }
}

/// Shared embedding for the p=2, q=5 deep checks (conductor 2^8, 64 digits).
fn deep_ctx() -> Arc<FieldCtx> {
    static CTX: OnceLock<Arc<FieldCtx>> = OnceLock::new();
    CTX.get_or_init(|| {
        let cfg = Config::new(2, 5, 64, 8).unwrap();
        Arc::new(FieldCtx::setup(&cfg, 8).unwrap())
    })
    .clone()
}

fn embedded(p: u32, q: u32, m: u32, n: u32) -> ExactBackend {
    let cfg = Config::new(p, q, m, n.max(1)).unwrap();
    ExactBackend::with_embedding(Arc::new(FieldCtx::setup(&cfg, n).unwrap()))
}

/// A random rational with q-adic valuation exactly `v`.
fn spread_ratio(rng: &mut ChaCha8Rng, q: u32, v: i64) -> BigRational {
    let unit_num = loop {
        let a = rng.gen_range(1..=40i64);
        if a % q as i64 != 0 {
            break a;
        }
    };
    let unit_den = loop {
        let b = rng.gen_range(1..=12i64);
        if b % q as i64 != 0 {
            break b;
        }
    };
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let base = ratio(sign * unit_num, unit_den);
    let qq = BigRational::from(BigInt::from(q));
    if v >= 0 {
        base * num::pow::pow(qq, v as usize)
    } else {
        base / num::pow::pow(qq, (-v) as usize)
    }
}

// 1. Character orthogonality: the Haar integral of a character is the
//    indicator of the trivial one, exactly in Q(zeta_{p^3}).
#[test]
fn criterion_1_character_orthogonality() {
    report("C1 character-orthogonality", || {
        for p in [2u32, 3] {
            let b = ExactBackend::new(p);
            for t in enumerate_ball(p, 3) {
                let ch = character_fn(&b, &t, 3);
                let integral = haar_integral(&b, &ch);
                let expected = if t.is_zero() { b.one() } else { b.zero() };
                assert_eq!(integral, expected, "p={p} t={t}");
            }
        }
    });
}

// 2. Isomorphism suite: inversion round-trip, both homomorphism laws,
//    Parseval, and the norm isometry, on 100 random functions per (p,q).
#[test]
fn criterion_2_isomorphism_suite() {
    report("C2 isomorphism-suite", || {
        for (p, q) in [(2u32, 5u32), (2, 7), (3, 5), (3, 7)] {
            let b = embedded(p, q, 64, 3);
            let mut rng = ChaCha8Rng::seed_from_u64(0x5a11 + u64::from(p) * 31 + u64::from(q));
            let max_level = 3u32;
            let mk = |rng: &mut ChaCha8Rng, level: u32| {
                let len = (p as usize).pow(level);
                let values = (0..len)
                    .map(|_| {
                        if rng.gen_bool(0.1) {
                            b.zero()
                        } else {
                            let v = rng.gen_range(-2..=3);
                            b.from_ratio(&spread_ratio(rng, q, v))
                        }
                    })
                    .collect();
                LCFn::new(&b, level, values)
            };
            let instances: Vec<(LCFn<CycloNum>, LCFn<CycloNum>)> = (0..100)
                .map(|_| {
                    let lf = rng.gen_range(0..=max_level);
                    let lg = rng.gen_range(0..=max_level);
                    (mk(&mut rng, lf), mk(&mut rng, lg))
                })
                .collect();
            let failures: Vec<String> = pqfourier::exec::map_slice(&instances, |(f, g)| {
                let fh = fourier_fwd(&b, f);
                if !lcfn_eq(&b, &fourier_inv(&b, &fh), f) {
                    return Some("round-trip".to_string());
                }
                let lhs = fourier_fwd(&b, &pointwise_mul(&b, f, g));
                let rhs = conv_dual(&b, &fh, &fourier_fwd(&b, g));
                if lhs != rhs {
                    return Some("product-to-convolution".to_string());
                }
                let gh = fourier_fwd(&b, g);
                let conv_hat = fourier_fwd(&b, &conv_zp(&b, f, g));
                for (t, v) in conv_hat.support() {
                    let prod = b.mul(&fh.eval(&b, t), &gh.eval(&b, t));
                    if *v != prod {
                        return Some("convolution-to-product".to_string());
                    }
                }
                // and the product support is not larger than the sum's zeros
                for t in enumerate_ball(p, 3) {
                    let prod = b.mul(&fh.eval(&b, &t), &gh.eval(&b, &t));
                    if conv_hat.get(&t).is_none() && !b.is_zero(&prod) {
                        return Some("convolution-to-product support".to_string());
                    }
                }
                if parseval(&b, f, g) != haar_integral(&b, &pointwise_mul(&b, f, g)) {
                    return Some("parseval".to_string());
                }
                let nf = norm_fn(&b, f).expect("norm");
                let nh = norm_dual_sup(&b, &fh).expect("norm");
                if nf != nh {
                    return Some(format!("isometry: {nf} vs {nh}"));
                }
                None
            })
            .into_iter()
            .flatten()
            .collect();
            assert!(failures.is_empty(), "(p,q)=({p},{q}): {failures:?}");
        }
    });
}

// 3. The partial-sum identity for the product-formula transform: the
//    literal t-sum collapses to a rational equal to the digit-count closed
//    form, for every residue at N <= 6 and sampled residues at N in {7,8}.
#[test]
fn criterion_3_aq_partial_sum_identity() {
    report("C3 aq-partial-sum-identity", || {
        for q in [5u32, 7] {
            let b = ExactBackend::new(2);
            let mu = MeasureHat::aq_product(&b);
            for n in 0..=6u32 {
                let residues: Vec<u64> = (0..(1u64 << n)).collect();
                let bad: Vec<u64> = pqfourier::exec::map_slice(&residues, |&zres| {
                    let z = ZpPoint::nat(zres);
                    let lit = mu_tilde(&b, q, &mu, &z, n);
                    match lit.as_rational() {
                        Some(r) if r == aq_partial_closed(q, &z, n) => None,
                        _ => Some(zres),
                    }
                })
                .into_iter()
                .flatten()
                .collect();
                assert!(bad.is_empty(), "q={q} N={n}: failures at {bad:?}");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(0xa17 + u64::from(q));
            for n in [7u32, 8] {
                let residues: Vec<u64> =
                    (0..32).map(|_| rng.gen_range(0..(1u64 << n))).collect();
                let bad: Vec<u64> = pqfourier::exec::map_slice(&residues, |&zres| {
                    let z = ZpPoint::nat(zres);
                    let lit = mu_tilde(&b, q, &mu, &z, n);
                    match lit.as_rational() {
                        Some(r) if r == aq_partial_closed(q, &z, n) => None,
                        _ => Some(zres),
                    }
                })
                .into_iter()
                .flatten()
                .collect();
                assert!(bad.is_empty(), "q={q} N={n}: failures at {bad:?}");
            }
        }
    });
}

// 4. Mixed-topology limits: q-adic convergence to 1/3 at z=-1 with the
//    limit produced both by geometric summation and by the truncation
//    oracle; exact archimedean limits on {1,2,3}; the value at 0.
#[test]
fn criterion_4_mixed_topology_limits() {
    report("C4 mixed-topology-limits", || {
        let minus_one = ZpPoint::periodic(vec![], vec![1]);
        // (a) closed-form geometric limit
        let AqLimit::QAdic(lim) = aq_tilde(5, &minus_one) else {
            panic!("q-adic branch expected at -1");
        };
        assert_eq!(lim, ratio(1, 3));
        // truncation oracle: S_N = 1/3 mod 5^N for N <= 32 (and the
        // valuation is exactly N, so the sequence pins the limit)
        for n in 1..=32u32 {
            let s = aq_partial_closed(5, &minus_one, n);
            let v = rational_qval(5, &(&s - &lim)).expect("S_N != limit");
            assert!(v >= i64::from(n), "N={n}: v={v}");
            assert_eq!(v, i64::from(n), "increment law gives exact valuation");
        }
        // (b) archimedean branch equals the exact limit of the closed-form
        // partial sums: S_N minus the explicit vanishing remainder
        for q in [5u32, 7] {
            for m in [1u64, 2, 3] {
                let AqLimit::Archimedean(lim) = aq_tilde(q, &ZpPoint::nat(m)) else {
                    panic!("archimedean branch expected on N_0");
                };
                for extra in [4u32, 8, 12] {
                    let n = bit_length(m) + extra;
                    let s = aq_partial_closed(q, &ZpPoint::nat(m), n);
                    let remainder = BigRational::new(
                        BigInt::from(q).pow(ones_count(m)) * (BigInt::from(q) - BigInt::one()),
                        BigInt::from(2u32).pow(n + 1),
                    );
                    assert_eq!(lim, &s - remainder, "q={q} m={m} N={n}");
                }
            }
        }
        // (c) value at zero
        for q in [5u32, 7] {
            let AqLimit::Archimedean(v0) = aq_tilde(q, &ZpPoint::nat(0)) else {
                panic!()
            };
            assert_eq!(v0, -ratio(i64::from(q) - 3, 2));
        }
    });
}

// 5. Four-way agreement of the finite-level continuous theorem: zero-free
//    iff full circulant rank iff the convolution inverse exists (verified
//    exactly), over an exhaustive zero-pattern sweep plus 200 random value
//    assignments.
#[test]
fn criterion_5_continuous_wtt_agreement() {
    report("C5 continuous-wtt-agreement", || {
        let q = 5u32;
        let mut cases: Vec<(u32, u32, u64)> = Vec::new(); // (p, level, pattern seed)
        for p in [2u32, 3] {
            for level in 1..=2u32 {
                let dim = (p as u64).pow(level);
                for pattern in 0..(1u64 << dim) {
                    cases.push((p, level, pattern));
                }
            }
        }
        let run_case = |p: u32, level: u32, pattern: u64, rng: &mut ChaCha8Rng| {
            let b = ExactBackend::new(p);
            let dim = (p as usize).pow(level);
            let values: Vec<CycloNum> = (0..dim)
                .map(|i| {
                    if pattern & (1 << i) != 0 {
                        b.zero()
                    } else if rng.gen_bool(0.5) {
                        b.from_int(rng.gen_range(1..q as i64))
                    } else {
                        b.from_ratio(&spread_ratio(rng, q, 0))
                    }
                })
                .collect();
            let chi = LCFn::new(&b, level, values);
            let rep = wtt_continuous_check(&b, &chi).expect("check");
            let zero_free = rep.zero_set.is_empty();
            assert_eq!(
                zero_free, rep.circulant_rank_full,
                "p={p} level={level} pattern={pattern}: rank disagrees"
            );
            assert_eq!(
                zero_free,
                rep.inverse_transform.is_some(),
                "p={p} level={level} pattern={pattern}: inverse disagrees"
            );
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0xc5);
        for &(p, level, pattern) in &cases {
            run_case(p, level, pattern, &mut rng);
        }
        // 200 extra random assignments over random patterns
        for i in 0..200u64 {
            let p = if i % 2 == 0 { 2 } else { 3 };
            let level = 1 + (i as u32 / 2) % 2;
            let dim = (p as u64).pow(level);
            let pattern = rng.gen_range(0..(1u64 << dim));
            run_case(p, level, pattern, &mut rng);
        }
    });
}

// 6. The three-convolution estimate: both inequalities hold on 200 random
//    instances with valuation-spread coefficients, compared exactly.
#[test]
fn criterion_6_three_convolution_estimate() {
    report("C6 three-convolution-estimate", || {
        for (p, q) in [(2u32, 5u32), (3, 7)] {
            let b = embedded(p, q, 64, 4);
            let mut rng = ChaCha8Rng::seed_from_u64(0xc6 + u64::from(p));
            let rand_dual = |max_exp: u32, rng: &mut ChaCha8Rng| {
                let ball = enumerate_ball(p, max_exp);
                let mut f = DualFn::new();
                let k = rng.gen_range(1..=4usize.min(ball.len()));
                for _ in 0..k {
                    let t = ball[rng.gen_range(0..ball.len())];
                    let val_exp = rng.gen_range(-3..=4);
                    let v = b.from_ratio(&spread_ratio(rng, q, val_exp));
                    f.insert(&b, t, v);
                }
                f
            };
            for i in 0..100 {
                let n = rng.gen_range(0..=3u32);
                let m = rng.gen_range(0..=3u32);
                let phi = rand_dual(n, &mut rng);
                let f = rand_dual(4.min(3 + n), &mut rng);
                let g = rand_dual(m, &mut rng);
                let (one, two) =
                    lemma_estimates_check(&b, &phi, &f, &g, m, n).expect("hypotheses hold");
                assert!(one && two, "(p,q)=({p},{q}) instance {i}: ({one}, {two})");
            }
        }
    });
}

// 7. Proof-machinery identities: the rearrangement identity on random
//    inputs, unit window norms of the modulated window function, the
//    truncation-stability claim, and the quantitative decay claim.
#[test]
fn criterion_7_proof_machinery() {
    report("C7 proof-machinery", || {
        let b = ExactBackend::new(2);
        let minus_one = ZpPoint::periodic(vec![], vec![1]);
        let third = b.from_ratio(&ratio(1, 3));
        let measures = [
            MeasureHat::dirac_zero(&b),
            MeasureHat::aq_product(&b),
            MeasureHat::aq_product(&b).sub_scaled_dirac(&b, &third),
        ];
        // (i) rearrangement identity on 50 random (tau, N) per measure
        let mut rng = ChaCha8Rng::seed_from_u64(0xc7);
        for mu in &measures {
            for _ in 0..50 {
                let ball = enumerate_ball(2, 3);
                let tau = ball[rng.gen_range(0..ball.len())];
                let n = rng.gen_range(tau.denom_exp().max(1)..=5);
                let z0 = if rng.gen_bool(0.5) { minus_one.clone() } else { ZpPoint::nat(rng.gen_range(0..8)) };
                assert!(
                    phi_conv_identity_check(&b, 5, mu, &z0, &tau, n),
                    "tau={tau} N={n} z0={z0}"
                );
            }
        }
        // (ii) window norms of phi_N all equal 1
        let be = embedded(2, 5, 64, 4);
        for z0 in [minus_one.clone(), ZpPoint::nat(0), ZpPoint::nat(3)] {
            for n in 0..=4u32 {
                let phi = build_phi_n(&be, &z0, n);
                for m in 0..=4u32 {
                    assert_eq!(
                        norm_dual_window(&be, &phi, m).unwrap(),
                        QNorm::one(),
                        "z0={z0} N={n} M={m}"
                    );
                }
            }
        }
        // (iii) truncation stability at and above the support bound
        let mu = MeasureHat::aq_product(&b);
        for i in 0..50 {
            let mut eta = DualFn::new();
            let ball = enumerate_ball(2, 4);
            for _ in 0..rng.gen_range(1..=4usize) {
                let t = ball[rng.gen_range(0..ball.len())];
                let val_exp = rng.gen_range(-2..=2);
                eta.insert(&b, t, b.from_ratio(&spread_ratio(&mut rng, 5, val_exp)));
            }
            if eta.is_empty() {
                continue;
            }
            let m0 = m0_bound(&eta);
            for m in [m0, m0 + 1] {
                let tr = truncate_dual(&b, &eta, m);
                for t in enumerate_ball(2, 4) {
                    let full = conv_measure_table(&b, 5, &mu, &eta, &t);
                    let cut = conv_measure_table(&b, 5, &mu, &tr, &t);
                    assert_eq!(full, cut, "instance {i} M={m} t={t}");
                }
            }
        }
        // (iv) decay: || phi_N * mu_hat ||_{p^m, q} <= 5^{-N} for m <= N <= 8
        // for the certified-zero measure
        let ctx = deep_ctx();
        let nb = QAdicBackend::new(ctx.clone());
        let xb = ExactBackend::with_embedding(ctx.clone());
        let adjusted =
            MeasureHat::aq_product(&xb).sub_scaled_dirac(&xb, &xb.from_ratio(&ratio(1, 3)));
        let mu_n = measure_to_qadic(&ctx, &adjusted).unwrap();
        for n in 1..=8u32 {
            let vals = conv_measure_phi_values(&nb, 5, &mu_n, &minus_one, n, n);
            for m in 0..=n {
                let norm = norm_over_subball(&nb, &vals, n, m).unwrap();
                assert!(
                    norm <= QNorm::pow(i64::from(n)),
                    "N={n} m={m}: norm {norm} exceeds 5^-{n}"
                );
            }
        }
    });
}

// 8. Non-density witnesses: 50 random translate combinations against the
//    certified-zero measure all certify windowed distance >= 1 from 1_0,
//    and the attainment scan finds 1/3 at z = -1.
#[test]
fn criterion_8_nondensity_witness() {
    report("C8 nondensity-witness", || {
        let ctx = deep_ctx();
        let xb = ExactBackend::with_embedding(ctx);
        let minus_one = ZpPoint::periodic(vec![], vec![1]);
        let third = xb.from_ratio(&ratio(1, 3));
        let mu = MeasureHat::aq_product(&xb).sub_scaled_dirac(&xb, &third);
        let mut rng = ChaCha8Rng::seed_from_u64(0xc8);
        let ball = enumerate_ball(2, 3);
        let combos: Vec<Vec<(CycloNum, PHat)>> = (0..50)
            .map(|_| {
                let k = rng.gen_range(1..=3usize);
                (0..k)
                    .map(|_| {
                        let c = xb.from_ratio(&spread_ratio(&mut rng, 5, 0));
                        let s = ball[rng.gen_range(0..ball.len())];
                        (c, s)
                    })
                    .collect()
            })
            .collect();
        let verdicts = pqfourier::exec::map_slice(&combos, |combo| {
            let w = nondensity_witness(&xb, 5, &mu, &minus_one, combo).expect("witness");
            (w.verdict, w.windowed_max, w.n_star)
        });
        for (i, (v, wmax, nstar)) in verdicts.iter().enumerate() {
            assert!(*v, "combo {i}: windowed_max {wmax} at N*={nstar}");
            assert!(*wmax >= QNorm::one());
        }
        // attainment of c = 1/3 at z = -1, with the non-density conclusion
        let raw = MeasureHat::aq_product(&xb);
        let candidates = vec![
            ZpPoint::nat(0),
            ZpPoint::nat(5),
            minus_one.clone(),
            ZpPoint::periodic(vec![], vec![0, 1]),
        ];
        let scan = value_attainment_scan(&xb, 5, &raw, &third, &candidates, 12).unwrap();
        assert_eq!(scan.attained_points, vec![minus_one]);
        assert!(scan.nondensity_concluded);
    });
}

// The dual-side identity element behaves as documented in the window-norm
// machinery used above; kept here as a cheap sanity anchor for the suite.
#[test]
fn acceptance_support_sanity() {
    let b = ExactBackend::new(2);
    let e = dirac_zero(&b);
    assert_eq!(conv_dual(&b, &e, &e), e);
}
