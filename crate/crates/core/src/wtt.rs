//! Finite-level Tauberian checks.
//!
//! Density of translate spans in the full dual sequence space is not
//! finitely decidable, so this layer implements exactly what finite
//! computation can certify: the circulant translate-span criterion for
//! locally constant functions (equivalent to zero-freeness at finite level),
//! executable forms of the three-convolution estimate and of the proof
//! machinery around it (the modulated window function, truncation of
//! finitely supported approximants, and the quantitative decay of windowed
//! norms), and constructive non-density certificates for measures with a
//! certified vanishing Fourier-series limit.

use serde::Serialize;

use crate::base::ZpPoint;
use crate::cyclo::CycloNum;
use crate::dual::{enumerate_ball, PHat};
use crate::error::{Error, Result};
use crate::exec;
use crate::fourier::{
    conv_dual, dirac_zero, fourier_fwd, fourier_inv, norm_dual_sup, norm_dual_window, DualFn, LCFn,
};
use crate::measures::{measure_eval, mu_tilde, partial_sum_closed, qadic_limit_closed, MeasureHat};
use crate::qadic::{QAdicNum, QVal};
use crate::value::{Backend, ExactBackend, QAdicBackend, QNorm};

/// Finite-level report for a locally constant function: the zero set read
/// off the table, the circulant eigenvalues recovered through the
/// transform, the exact rank of the translate matrix, and the convolution
/// inverse when one exists. At finite level these agree iff the function is
/// zero-free; the translate matrix is the computable projection of the
/// density statement, and is labeled as such.
#[derive(Debug, Clone)]
pub struct WttContinuousReport<V> {
    pub level: u32,
    pub zero_set: Vec<u64>,
    pub dft_values: Vec<V>,
    pub circulant_rank_full: bool,
    pub inverse_transform: Option<DualFn<V>>,
}

/// Exact rank-fullness of the matrix `A[s][t] = F(t - s)` over the ball of
/// radius `p^level`, by Gaussian elimination in the coefficient field.
pub fn circulant_full_rank<B: Backend>(backend: &B, fhat: &DualFn<B::Val>, level: u32) -> Result<bool> {
    let ball = enumerate_ball(backend.p(), level);
    let dim = ball.len();
    let mut m: Vec<Vec<B::Val>> = ball
        .iter()
        .map(|s| ball.iter().map(|t| fhat.eval(backend, &t.sub(s))).collect())
        .collect();
    let mut rank = 0usize;
    for col in 0..dim {
        let Some(pivot) = (rank..dim).find(|&r| !backend.is_zero(&m[r][col])) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = backend.inv(&m[rank][col])?;
        for c in col..dim {
            m[rank][c] = backend.mul(&m[rank][c], &inv);
        }
        for r in 0..dim {
            if r != rank && !backend.is_zero(&m[r][col]) {
                let factor = m[r][col].clone();
                for c in col..dim {
                    let t = backend.mul(&factor, &m[rank][c]);
                    m[r][c] = backend.sub(&m[r][c], &t);
                }
            }
        }
        rank += 1;
    }
    Ok(rank == dim)
}

/// The convolution inverse of a transform whose underlying function is
/// zero-free: `fourier_fwd` of the pointwise reciprocal. Errors listing the
/// vanishing residues otherwise; on success the postcondition
/// `F * F^{-1} = 1_0` is verified exactly.
pub fn conv_inverse_dual<B: Backend>(backend: &B, fhat: &DualFn<B::Val>) -> Result<DualFn<B::Val>> {
    let f = fourier_inv(backend, fhat);
    let zeros: Vec<u64> = f
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| backend.is_zero(v))
        .map(|(i, _)| i as u64)
        .collect();
    if !zeros.is_empty() {
        return Err(Error::NotInvertible { zeros });
    }
    let recip_values = f
        .values()
        .iter()
        .map(|v| backend.inv(v))
        .collect::<Result<Vec<_>>>()?;
    let recip = LCFn::new(backend, f.level(), recip_values);
    let inverse = fourier_fwd(backend, &recip);
    let check = conv_dual(backend, fhat, &inverse);
    let identity = dirac_zero(backend);
    assert!(
        dual_eq(backend, &check, &identity),
        "convolution inverse failed its exactness postcondition"
    );
    Ok(inverse)
}

fn dual_eq<B: Backend>(backend: &B, a: &DualFn<B::Val>, b: &DualFn<B::Val>) -> bool {
    let keys: std::collections::BTreeSet<_> =
        a.support().map(|(t, _)| *t).chain(b.support().map(|(t, _)| *t)).collect();
    keys.iter().all(|t| backend.eq(&a.eval(backend, t), &b.eval(backend, t)))
}

/// The full finite-level equivalence check for a locally constant function.
pub fn wtt_continuous_check<B: Backend>(
    backend: &B,
    chi: &LCFn<B::Val>,
) -> Result<WttContinuousReport<B::Val>> {
    let zero_set: Vec<u64> = chi
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| backend.is_zero(v))
        .map(|(i, _)| i as u64)
        .collect();
    let chat = fourier_fwd(backend, chi);
    // circulant eigenvalues, recovered through the transform
    let dft_values = fourier_inv(backend, &chat).lift_to(backend.p(), chi.level()).values().to_vec();
    let circulant_rank_full = circulant_full_rank(backend, &chat, chi.level())?;
    let inverse_transform = match conv_inverse_dual(backend, &chat) {
        Ok(inv) => Some(inv),
        Err(Error::NotInvertible { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(WttContinuousReport {
        level: chi.level(),
        zero_set,
        dft_values,
        circulant_rank_full,
        inverse_transform,
    })
}

/// Both inequalities of the convolution estimate, decided exactly:
/// `||phi * f||_{p^M} <= ||phi||_{p^inf} ||f||_{p^max(M,N)}` and
/// `||phi * f * g||_{p^M} <= ||phi * f||_{p^max(M,N)} ||g||_{p^inf}`,
/// for `phi` supported in the ball `p^N` and `g` in the ball `p^M`.
pub fn lemma_estimates_check<B: Backend>(
    backend: &B,
    phi: &DualFn<B::Val>,
    f: &DualFn<B::Val>,
    g: &DualFn<B::Val>,
    m: u32,
    n: u32,
) -> Result<(bool, bool)> {
    if phi.max_denom_exp() > n {
        return Err(Error::HypothesisViolated(format!(
            "phi support exceeds declared ball p^{n}"
        )));
    }
    if g.max_denom_exp() > m {
        return Err(Error::HypothesisViolated(format!(
            "g support exceeds declared ball p^{m}"
        )));
    }
    let mn = m.max(n);
    let phi_f = conv_dual(backend, phi, f);
    let lhs1 = norm_dual_window(backend, &phi_f, m)?;
    let rhs1 = norm_dual_sup(backend, phi)?.mul(norm_dual_window(backend, f, mn)?);
    let phi_f_g = conv_dual(backend, &phi_f, g);
    let lhs2 = norm_dual_window(backend, &phi_f_g, m)?;
    let rhs2 = norm_dual_window(backend, &phi_f, mn)?.mul(norm_dual_sup(backend, g)?);
    Ok((lhs1 <= rhs1, lhs2 <= rhs2))
}

/// The modulated window function `phi_N(t) = 1_0(p^N t) e^{-2 pi i {t z0}}`:
/// supported exactly on the ball `p^N`, every value a root of unity, so all
/// its windowed norms equal 1.
pub fn build_phi_n<B: Backend>(backend: &B, z0: &ZpPoint, n: u32) -> DualFn<B::Val> {
    let mut out = DualFn::new();
    for t in enumerate_ball(backend.p(), n) {
        out.insert(backend, t, backend.root(&t.frac_mul(z0).neg()));
    }
    out
}

/// The rearrangement identity behind the decay claim:
/// `(mu_hat * phi_N)(tau) = e^{-2 pi i {tau z0}} mu~_N(z0)` for all
/// `N >= -v_p(tau)`. Both sides are evaluated exactly and compared.
pub fn phi_conv_identity_check<B: Backend>(
    backend: &B,
    q: u32,
    mu: &MeasureHat<B::Val>,
    z0: &ZpPoint,
    tau: &PHat,
    n: u32,
) -> bool {
    assert!(n >= tau.denom_exp(), "identity requires N >= -v_p(tau)");
    let ball = enumerate_ball(backend.p(), n);
    let mut lhs = backend.zero();
    for u in &ball {
        let phi_u = backend.root(&u.frac_mul(z0).neg());
        let m = measure_eval(backend, q, mu, &tau.sub(u));
        lhs = backend.add(&lhs, &backend.mul(&m, &phi_u));
    }
    let rhs = backend.mul(
        &backend.root(&tau.frac_mul(z0).neg()),
        &mu_tilde(backend, q, mu, z0, n),
    );
    backend.eq(&lhs, &rhs)
}

/// Restriction of a finitely supported function to the ball `p^M`.
pub fn truncate_dual<B: Backend>(backend: &B, eta: &DualFn<B::Val>, m: u32) -> DualFn<B::Val> {
    let mut out = DualFn::new();
    for (t, v) in eta.support() {
        if t.denom_exp() <= m {
            out.insert(backend, *t, v.clone());
        }
    }
    out
}

/// The least M with `truncate_dual(eta, M) = eta`: the largest denominator
/// exponent in the support. Convolving a measure with the truncation is
/// unchanged for every `M` at or above this bound.
pub fn m0_bound<V: Clone>(eta: &DualFn<V>) -> u32 {
    eta.max_denom_exp()
}

/// Convolution of a measure transform with a finitely supported function,
/// evaluated at one point: `(mu_hat * eta)(t) = sum_u eta(u) mu_hat(t - u)`.
pub fn conv_measure_table<B: Backend>(
    backend: &B,
    q: u32,
    mu: &MeasureHat<B::Val>,
    eta: &DualFn<B::Val>,
    t: &PHat,
) -> B::Val {
    let mut acc = backend.zero();
    for (u, v) in eta.support() {
        let m = measure_eval(backend, q, mu, &t.sub(u));
        acc = backend.add(&acc, &backend.mul(v, &m));
    }
    acc
}

/// Values of `(mu_hat * phi_N)(tau)` for every `tau` in the ball `p^window`,
/// in enumeration order.
pub fn conv_measure_phi_values<B: Backend>(
    backend: &B,
    q: u32,
    mu: &MeasureHat<B::Val>,
    z0: &ZpPoint,
    n_phi: u32,
    window: u32,
) -> Vec<B::Val> {
    let ball_n = enumerate_ball(backend.p(), n_phi);
    let phi: Vec<B::Val> = ball_n.iter().map(|u| backend.root(&u.frac_mul(z0).neg())).collect();
    let taus = enumerate_ball(backend.p(), window);
    exec::map_slice(&taus, |tau| {
        let mut acc = backend.zero();
        for (u, phi_u) in ball_n.iter().zip(phi.iter()) {
            let m = measure_eval(backend, q, mu, &tau.sub(u));
            acc = backend.add(&acc, &backend.mul(&m, phi_u));
        }
        acc
    })
}

/// Windowed norm over the sub-ball `p^m` of values laid out in ball-`p^n`
/// enumeration order.
pub fn norm_over_subball<B: Backend>(
    backend: &B,
    values: &[B::Val],
    n: u32,
    m: u32,
) -> Result<QNorm> {
    assert!(m <= n);
    let p = backend.p();
    let stride = (p as usize).pow(n - m);
    let mut best: Option<QNorm> = None;
    let pm = (p as usize).pow(m);
    for k in 0..pm {
        let v = &values[k * stride];
        let qn = QNorm::from_qval(backend.qval(v)?)?;
        best = Some(best.map_or(qn, |b| b.max(qn)));
    }
    Ok(best.unwrap_or(QNorm::Zero))
}

/// A constructive certificate that the span of translates of `mu_hat` is
/// not dense at finite level: with a certified zero limit at `z0`, every
/// linear combination of translates stays at distance at least 1 from `1_0`
/// on the ball `p^{N*}`.
#[derive(Debug, Clone, Serialize)]
pub struct NondensityWitness {
    pub z0: ZpPoint,
    #[serde(skip)]
    pub combo: Vec<(CycloNum, PHat)>,
    pub n_star: u32,
    pub windowed_max: QNorm,
    pub verdict: bool,
}

/// Convert an exact measure term list into the numeric backend.
pub fn measure_to_qadic(
    ctx: &std::sync::Arc<crate::qadic::FieldCtx>,
    mu: &MeasureHat<CycloNum>,
) -> Result<MeasureHat<QAdicNum>> {
    use crate::measures::{BaseHat, MeasureTerm};
    let nb = QAdicBackend::new(ctx.clone());
    let mut terms = Vec::with_capacity(mu.terms().len());
    for term in mu.terms() {
        let base = match &term.base {
            BaseHat::Table(table) => {
                let mut t2 = DualFn::new();
                for (t, v) in table.support() {
                    t2.insert(&nb, *t, ctx.from_exact(v)?);
                }
                BaseHat::Table(t2)
            }
            BaseHat::AqProduct => BaseHat::AqProduct,
            BaseHat::DiracZero => BaseHat::DiracZero,
            BaseHat::PointMass => BaseHat::PointMass,
        };
        terms.push(MeasureTerm { coeff: ctx.from_exact(&term.coeff)?, shift: term.shift, base });
    }
    Ok(MeasureHat::from_terms(&nb, terms))
}

/// Build the non-density certificate for `mu_hat` at `z0` from a linear
/// combination of translates `sum coeff * mu_hat(t - shift)`.
///
/// The precondition is a certified (closed-form) zero of the Fourier-series
/// limit at `z0`, not merely an observed Cauchy pattern. `N*` is then taken
/// large enough that every shift fits in the window and the combination's
/// value against the partial sum is q-adically small; the windowed distance
/// from `1_0` is computed exactly in the numeric backend and must be >= 1.
pub fn nondensity_witness(
    xb: &ExactBackend,
    q: u32,
    mu: &MeasureHat<CycloNum>,
    z0: &ZpPoint,
    combo: &[(CycloNum, PHat)],
) -> Result<NondensityWitness> {
    let ctx = xb.embedding().ok_or(Error::NoEmbedding)?.clone();
    let limit = qadic_limit_closed(xb, q, mu, z0)
        .ok_or_else(|| Error::PreconditionUnverified("no closed-form q-adic limit at z0".into()))?;
    if !xb.is_zero(&limit) {
        return Err(Error::PreconditionUnverified(
            "mu~(z0) limit not certified zero".into(),
        ));
    }
    if combo.is_empty() {
        return Err(Error::PreconditionUnverified("empty translate combination".into()));
    }

    // f(z0) = sum coeff * e^{2 pi i {shift z0}}
    let mut f_z0 = xb.zero();
    for (c, s) in combo {
        f_z0 = xb.add(&f_z0, &xb.mul(c, &xb.root(&s.frac_mul(z0))));
    }
    let v_f: Option<i64> = if xb.is_zero(&f_z0) {
        None // exact zero: the product term vanishes identically
    } else {
        match xb.qval(&f_z0)? {
            QVal::Finite(v) => Some(v),
            QVal::ExactZero => None,
            QVal::AtLeast(b) => return Err(Error::PrecisionExhausted { available: b }),
        }
    };

    let shift_bound = combo.iter().map(|(_, s)| s.denom_exp()).max().unwrap_or(0);
    let mut n_star = shift_bound.max(mu.max_shift_exp()).max(1);
    if let Some(vf) = v_f {
        loop {
            let s = partial_sum_closed(xb, q, mu, z0, n_star)
                .expect("window already covers every shift");
            let v_mu = match xb.qval(&s)? {
                QVal::Finite(v) => v,
                QVal::ExactZero => i64::MAX / 2,
                QVal::AtLeast(b) => return Err(Error::PrecisionExhausted { available: b }),
            };
            if vf.saturating_add(v_mu) >= 1 {
                break;
            }
            n_star += 1;
            if n_star > ctx.conductor_exp() {
                return Err(Error::ConductorTooLarge {
                    requested: n_star,
                    max: ctx.conductor_exp(),
                });
            }
        }
    }
    if n_star.max(shift_bound) > ctx.conductor_exp() {
        return Err(Error::ConductorTooLarge {
            requested: n_star.max(shift_bound),
            max: ctx.conductor_exp(),
        });
    }

    // windowed distance from 1_0, computed in the numeric backend
    let nb = QAdicBackend::new(ctx.clone());
    let mu_n = measure_to_qadic(&ctx, mu)?;
    let combo_n: Vec<(QAdicNum, PHat)> = combo
        .iter()
        .map(|(c, s)| Ok((ctx.from_exact(c)?, *s)))
        .collect::<Result<Vec<_>>>()?;
    let ball = enumerate_ball(xb.p(), n_star);
    let vals = exec::map_slice(&ball, |t| {
        let mut approx = nb.zero();
        for (c, s) in &combo_n {
            let m = measure_eval(&nb, q, &mu_n, &t.sub(s));
            approx = nb.add(&approx, &nb.mul(c, &m));
        }
        let indicator = if t.is_zero() { nb.one() } else { nb.zero() };
        nb.sub(&indicator, &approx)
    });
    let mut windowed_max = QNorm::Zero;
    for v in &vals {
        windowed_max = windowed_max.max(QNorm::from_qval(nb.qval(v)?)?);
    }
    Ok(NondensityWitness {
        z0: z0.clone(),
        combo: combo.to_vec(),
        n_star,
        windowed_max,
        verdict: windowed_max >= QNorm::one(),
    })
}

/// One candidate's row in a value-attainment scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub z: ZpPoint,
    /// Exact decision `mu~(z) = c`, when a closed-form q-adic limit exists.
    pub attained: Option<bool>,
    /// Observed convergence pattern of `(mu - c 1_0)~_N(z)`.
    pub cauchy: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub attained_points: Vec<ZpPoint>,
    /// Set when attainment is certified somewhere: by the measure-side
    /// Tauberian theorem, the translates of `mu_hat - c 1_0` are not dense.
    pub nondensity_concluded: bool,
}

/// For each candidate point, decide exactly (where closed forms exist)
/// whether the Fourier-series limit of `mu` attains `c`, and report the
/// observed convergence of the adjusted series. Absence of a witness among
/// the candidates concludes nothing.
pub fn value_attainment_scan(
    xb: &ExactBackend,
    q: u32,
    mu: &MeasureHat<CycloNum>,
    c: &CycloNum,
    candidates: &[ZpPoint],
    n_max: u32,
) -> Result<ScanReport> {
    let adjusted = mu.sub_scaled_dirac(xb, c);
    let mut rows = Vec::new();
    let mut attained_points = Vec::new();
    for z in candidates {
        let attained = qadic_limit_closed(xb, q, mu, z).map(|lim| xb.eq(&lim, c));
        let cauchy = match crate::measures::cauchy_report(xb, q, &adjusted, z, n_max) {
            Ok(rep) => rep.verdict.to_string(),
            Err(Error::PrecisionExhausted { .. }) => "indeterminate (precision)".to_string(),
            Err(e) => return Err(e),
        };
        if attained == Some(true) {
            attained_points.push(z.clone());
        }
        rows.push(ScanRow { z: z.clone(), attained, cauchy });
    }
    let nondensity_concluded = !attained_points.is_empty();
    Ok(ScanReport { rows, attained_points, nondensity_concluded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::Config;
    use crate::dual::ball_index;
    use crate::qadic::FieldCtx;
    use num::bigint::BigInt;
    use num::rational::BigRational;
    use std::sync::Arc;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn embedded(p: u32, q: u32, m: u32, n: u32) -> ExactBackend {
        let cfg = Config::new(p, q, m, n.max(1)).unwrap();
        ExactBackend::with_embedding(Arc::new(FieldCtx::setup(&cfg, n).unwrap()))
    }

    #[test]
    fn continuous_check_basic_cases() {
        let b = ExactBackend::new(2);
        // constant one: zero-free, full rank, inverse = 1_0
        let one_fn = LCFn::constant(&b, b.one());
        let rep = wtt_continuous_check(&b, &one_fn).unwrap();
        assert!(rep.zero_set.is_empty());
        assert!(rep.circulant_rank_full);
        let inv = rep.inverse_transform.unwrap();
        assert_eq!(inv.eval(&b, &PHat::zero(2)), b.one());
        assert_eq!(inv.support_len(), 1);
        // chi = (1, 0): zero at residue 1, rank-deficient
        let chi = LCFn::new(&b, 1, vec![b.one(), b.zero()]);
        let rep = wtt_continuous_check(&b, &chi).unwrap();
        assert_eq!(rep.zero_set, vec![1]);
        assert!(!rep.circulant_rank_full);
        assert!(rep.inverse_transform.is_none());
        // chi = (1, 2): zero-free; inverse transform is that of (1, 1/2)
        let chi = LCFn::new(&b, 1, vec![b.one(), b.from_int(2)]);
        let rep = wtt_continuous_check(&b, &chi).unwrap();
        assert!(rep.zero_set.is_empty() && rep.circulant_rank_full);
        let expected = fourier_fwd(&b, &LCFn::new(&b, 1, vec![b.one(), b.from_ratio(&ratio(1, 2))]));
        assert_eq!(rep.inverse_transform.unwrap(), expected);
        // eigenvalues recovered through the transform equal the table
        assert_eq!(rep.dft_values, chi.values().to_vec());
    }

    #[test]
    fn conv_inverse_error_lists_zeros() {
        let b = ExactBackend::new(2);
        let ind = LCFn::new(&b, 1, vec![b.one(), b.zero()]);
        let h = fourier_fwd(&b, &ind);
        match conv_inverse_dual(&b, &h) {
            Err(Error::NotInvertible { zeros }) => assert_eq!(zeros, vec![1]),
            other => panic!("expected NotInvertible, got {other:?}"),
        }
        // transform of a nonzero constant inverts to the reciprocal dirac
        let c = fourier_fwd(&b, &LCFn::constant(&b, b.from_int(4)));
        let inv = conv_inverse_dual(&b, &c).unwrap();
        assert_eq!(inv.eval(&b, &PHat::zero(2)), b.from_ratio(&ratio(1, 4)));
        // identity maps to itself
        let e = dirac_zero(&b);
        assert_eq!(conv_inverse_dual(&b, &e).unwrap(), e);
    }

    #[test]
    fn lemma_estimates_on_simple_inputs() {
        let b = embedded(2, 5, 24, 4);
        let phi = dirac_zero(&b);
        let mut f = DualFn::new();
        f.insert(&b, PHat::make(2, 1, 2), b.from_ratio(&ratio(5, 2)));
        f.insert(&b, PHat::zero(2), b.from_int(3));
        let mut g = DualFn::new();
        g.insert(&b, PHat::make(2, 1, 1), b.from_ratio(&ratio(1, 5)));
        let (a, c) = lemma_estimates_check(&b, &phi, &f, &g, 1, 0).unwrap();
        assert!(a && c);
        // hypothesis violation is an error
        assert!(matches!(
            lemma_estimates_check(&b, &f, &phi, &g, 1, 0),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn phi_n_shape_and_norms() {
        let b = embedded(2, 5, 16, 4);
        let z0 = ZpPoint::periodic(vec![], vec![1]);
        // N=0 gives 1_0
        let phi0 = build_phi_n(&b, &z0, 0);
        assert_eq!(phi0, dirac_zero(&b));
        // z0 = 0 gives the constant 1 on the ball
        let phi_z0 = build_phi_n(&b, &ZpPoint::nat(0), 2);
        for (_, v) in phi_z0.support() {
            assert_eq!(v.clone(), b.one());
        }
        // p=2, N=1, z0=-1: {0 -> 1, 1/2 -> -1}
        let phi = build_phi_n(&b, &z0, 1);
        assert_eq!(phi.eval(&b, &PHat::zero(2)), b.one());
        assert_eq!(phi.eval(&b, &PHat::make(2, 1, 1)), b.from_int(-1));
        // windowed norms are all 1
        for n in 0..=3u32 {
            let phi = build_phi_n(&b, &z0, n);
            for m in 0..=3u32 {
                assert_eq!(norm_dual_window(&b, &phi, m).unwrap(), QNorm::one());
            }
        }
    }

    #[test]
    fn phi_conv_identity_cases() {
        let b = ExactBackend::new(2);
        let z0 = ZpPoint::periodic(vec![], vec![1]);
        // tau = 0: both sides are the partial sum itself
        let dz = MeasureHat::dirac_zero(&b);
        assert!(phi_conv_identity_check(&b, 5, &dz, &z0, &PHat::zero(2), 2));
        // DiracZero: both sides are the conjugated character
        assert!(phi_conv_identity_check(&b, 5, &dz, &z0, &PHat::make(2, 1, 2), 3));
        // the product-formula measure, adjusted and not
        let mu = MeasureHat::aq_product(&b);
        assert!(phi_conv_identity_check(&b, 5, &mu, &z0, &PHat::make(2, 1, 1), 3));
        let c = b.from_ratio(&ratio(1, 3));
        let adj = mu.sub_scaled_dirac(&b, &c);
        assert!(phi_conv_identity_check(&b, 5, &adj, &z0, &PHat::make(2, 1, 1), 3));
    }

    #[test]
    fn truncation_examples() {
        let b = ExactBackend::new(2);
        let one0 = dirac_zero(&b);
        assert_eq!(truncate_dual(&b, &one0, 0), one0);
        let eta = DualFn::dirac(PHat::make(2, 3, 3), b.from_int(9));
        assert_eq!(m0_bound(&eta), 3);
        assert!(truncate_dual(&b, &eta, 2).is_empty());
        assert_eq!(truncate_dual(&b, &eta, 3), eta);
    }

    #[test]
    fn truncated_convolution_stabilizes_at_m0() {
        let b = ExactBackend::new(2);
        let mu = MeasureHat::aq_product(&b);
        let mut eta = DualFn::new();
        eta.insert(&b, PHat::make(2, 3, 3), b.from_int(2));
        eta.insert(&b, PHat::make(2, 1, 1), b.from_int(-1));
        let m0 = m0_bound(&eta);
        for m in m0..=m0 + 2 {
            let tr = truncate_dual(&b, &eta, m);
            for t in enumerate_ball(2, 3) {
                let full = conv_measure_table(&b, 5, &mu, &eta, &t);
                let cut = conv_measure_table(&b, 5, &mu, &tr, &t);
                assert_eq!(full, cut, "M={m} t={t}");
            }
        }
        // strictly below m0 the convolution genuinely differs somewhere
        let tr = truncate_dual(&b, &eta, m0 - 1);
        let some_diff = enumerate_ball(2, 3).iter().any(|t| {
            conv_measure_table(&b, 5, &mu, &eta, t) != conv_measure_table(&b, 5, &mu, &tr, t)
        });
        assert!(some_diff);
    }

    #[test]
    fn claim3_decay_small() {
        // || phi_N * mu_hat ||_{p^m, q} <= q^{-N} for the certified-zero
        // measure, checked at small N in the numeric backend
        let cfg = Config::new(2, 5, 32, 6).unwrap();
        let ctx = Arc::new(FieldCtx::setup(&cfg, 5).unwrap());
        let nb = QAdicBackend::new(ctx.clone());
        let xb = ExactBackend::with_embedding(ctx.clone());
        let z0 = ZpPoint::periodic(vec![], vec![1]);
        let c = xb.from_ratio(&ratio(1, 3));
        let mu = MeasureHat::aq_product(&xb).sub_scaled_dirac(&xb, &c);
        let mu_n = measure_to_qadic(&ctx, &mu).unwrap();
        for n in 1..=4u32 {
            let vals = conv_measure_phi_values(&nb, 5, &mu_n, &z0, n, n);
            for m in 0..=n {
                let norm = norm_over_subball(&nb, &vals, n, m).unwrap();
                assert!(norm <= QNorm::pow(n as i64), "N={n} m={m} norm={norm}");
            }
        }
    }

    #[test]
    fn witness_for_certified_zero() {
        let xb = embedded(2, 5, 32, 6);
        let z0 = ZpPoint::periodic(vec![], vec![1]);
        let c = xb.from_ratio(&ratio(1, 3));
        let mu = MeasureHat::aq_product(&xb).sub_scaled_dirac(&xb, &c);
        // single-term combination: the measure itself
        let combo = vec![(xb.one(), PHat::zero(2))];
        let w = nondensity_witness(&xb, 5, &mu, &z0, &combo).unwrap();
        assert!(w.verdict, "windowed_max = {}", w.windowed_max);
        assert!(w.windowed_max >= QNorm::one());
        // a multi-term combination with shifts
        let combo = vec![
            (xb.from_int(2), PHat::make(2, 1, 2)),
            (xb.from_ratio(&ratio(1, 3)), PHat::make(2, 1, 1)),
            (xb.from_int(-1), PHat::zero(2)),
        ];
        let w = nondensity_witness(&xb, 5, &mu, &z0, &combo).unwrap();
        assert!(w.verdict);
        // unadjusted measure has limit 1/3 != 0: precondition fails
        let raw = MeasureHat::aq_product(&xb);
        assert!(matches!(
            nondensity_witness(&xb, 5, &raw, &z0, &combo),
            Err(Error::PreconditionUnverified(_))
        ));
        // DiracZero never vanishes
        let dz = MeasureHat::dirac_zero(&xb);
        assert!(matches!(
            nondensity_witness(&xb, 5, &dz, &z0, &combo),
            Err(Error::PreconditionUnverified(_))
        ));
    }

    #[test]
    fn attainment_scan_finds_one_third() {
        let xb = embedded(2, 5, 40, 6);
        let mu = MeasureHat::aq_product(&xb);
        let c = xb.from_ratio(&ratio(1, 3));
        let minus_one = ZpPoint::periodic(vec![], vec![1]);
        let candidates =
            vec![ZpPoint::nat(1), minus_one.clone(), ZpPoint::periodic(vec![], vec![0, 1])];
        let rep = value_attainment_scan(&xb, 5, &mu, &c, &candidates, 10).unwrap();
        assert_eq!(rep.attained_points, vec![minus_one]);
        assert!(rep.nondensity_concluded);
        // c = 2 is attained nowhere among the candidates
        let rep2 = value_attainment_scan(&xb, 5, &mu, &xb.from_int(2), &candidates, 10).unwrap();
        assert!(rep2.attained_points.is_empty());
        assert!(!rep2.nondensity_concluded);
        // mu = DiracZero attains 1 everywhere
        let dz = MeasureHat::dirac_zero(&xb);
        let rep3 = value_attainment_scan(&xb, 5, &dz, &xb.one(), &candidates, 6).unwrap();
        assert_eq!(rep3.attained_points.len(), candidates.len());
    }

    #[test]
    fn four_way_agreement_small_sweep() {
        // exhaustive zero patterns at p=2, level 2, with fixed nonzero values
        let b = ExactBackend::new(2);
        for pattern in 0u32..16 {
            let values: Vec<_> = (0..4)
                .map(|i| {
                    if pattern & (1 << i) != 0 {
                        b.zero()
                    } else {
                        b.from_int(i as i64 + 2)
                    }
                })
                .collect();
            let chi = LCFn::new(&b, 2, values);
            let rep = wtt_continuous_check(&b, &chi).unwrap();
            let zero_free = rep.zero_set.is_empty();
            assert_eq!(zero_free, rep.circulant_rank_full, "pattern {pattern}");
            assert_eq!(zero_free, rep.inverse_transform.is_some(), "pattern {pattern}");
            let dft_zero_free = !rep.dft_values.iter().any(|v| b.is_zero(v));
            assert_eq!(zero_free, dft_zero_free, "pattern {pattern}");
        }
    }

    #[test]
    fn subball_norm_indexing() {
        let b = embedded(2, 5, 16, 3);
        let ball = enumerate_ball(2, 3);
        // values with q-valuation equal to the denominator exponent
        let values: Vec<_> = ball
            .iter()
            .map(|t| b.from_ratio(&ratio(5i64.pow(t.denom_exp()), 1)))
            .collect();
        assert_eq!(norm_over_subball(&b, &values, 3, 0).unwrap(), QNorm::pow(0));
        assert_eq!(norm_over_subball(&b, &values, 3, 2).unwrap(), QNorm::pow(0));
        for (i, t) in ball.iter().enumerate() {
            assert_eq!(ball_index(t, 3), i);
        }
    }
}
