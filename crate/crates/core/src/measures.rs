//! (p,q)-adic measures through their Fourier-Stieltjes transforms.
//!
//! A measure is handled purely through a bounded, lazily evaluable transform
//! `mu_hat` on the dual group. The representation is a symbolic term list
//! `sum coeff * base(t - shift)`, so the objects the Tauberian layer
//! manipulates (`mu_hat - c 1_0`, translates, linear combinations) are
//! first-class serializable values rather than opaque closures.
//!
//! The worked example is the p = 2 product-formula transform
//! `A_q(t) = prod (1 + q e^{-2 pi i 2^m t})/4`, whose partial Fourier sums
//! admit an exact rational closed form driven by binary digit counts, and
//! whose pointwise limits split by topology: q-adic off the naturals,
//! archimedean on them.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};

use crate::base::{bit_length, ones_count, ZpPoint};
use crate::dual::{enumerate_ball, PHat};
use crate::error::{Error, Result};
use crate::exec;
use crate::fourier::{fourier_fwd, DualFn, LCFn};
use crate::qadic::QVal;
use crate::value::Backend;

type Q = BigRational;

fn big_ratio(num: BigInt, den: BigInt) -> Q {
    Q::new(num, den)
}

fn pow2(e: u32) -> BigInt {
    BigInt::from(2u32).pow(e)
}

/// One evaluable building block of a transform.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseHat<V> {
    /// A finitely supported table.
    Table(DualFn<V>),
    /// The product-formula transform `A_q`; requires p = 2.
    AqProduct,
    /// `1_0`, the indicator of 0 in the dual group.
    DiracZero,
    /// The constant function 1 on the dual group: the transform of the
    /// Dirac point mass at 0 of `Z_p`.
    PointMass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureTerm<V> {
    pub coeff: V,
    pub shift: PHat,
    pub base: BaseHat<V>,
}

/// A measure's transform as a nonempty term list
/// `mu_hat(t) = sum coeff * base(t - shift)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureHat<V> {
    terms: Vec<MeasureTerm<V>>,
}

/// Anything that can be evaluated pointwise on the dual group. Measure
/// convolutions are exposed only through this interface, since a pointwise
/// product of term lists need not be a term list.
pub trait MeasureEval<B: Backend> {
    fn eval(&self, backend: &B, t: &PHat) -> B::Val;
}

impl<V> MeasureHat<V> {
    pub fn terms(&self) -> &[MeasureTerm<V>] {
        &self.terms
    }

    /// Largest shift conductor exponent in the term list.
    pub fn max_shift_exp(&self) -> u32 {
        self.terms.iter().map(|t| t.shift.denom_exp()).max().unwrap_or(0)
    }
}

impl<V: Clone> MeasureHat<V> {
    pub fn from_terms<B: Backend<Val = V>>(backend: &B, terms: Vec<MeasureTerm<V>>) -> MeasureHat<V> {
        assert!(!terms.is_empty(), "term list must be nonempty");
        for term in &terms {
            assert_eq!(term.shift.p(), backend.p(), "cross-prime shift");
            if matches!(term.base, BaseHat::AqProduct) {
                assert_eq!(backend.p(), 2, "the product-formula transform lives on Z_2-hat");
            }
        }
        MeasureHat { terms }
    }

    pub fn dirac_zero<B: Backend<Val = V>>(backend: &B) -> MeasureHat<V> {
        MeasureHat::from_terms(
            backend,
            vec![MeasureTerm {
                coeff: backend.one(),
                shift: PHat::zero(backend.p()),
                base: BaseHat::DiracZero,
            }],
        )
    }

    pub fn aq_product<B: Backend<Val = V>>(backend: &B) -> MeasureHat<V> {
        MeasureHat::from_terms(
            backend,
            vec![MeasureTerm {
                coeff: backend.one(),
                shift: PHat::zero(backend.p()),
                base: BaseHat::AqProduct,
            }],
        )
    }

    pub fn point_mass<B: Backend<Val = V>>(backend: &B) -> MeasureHat<V> {
        MeasureHat::from_terms(
            backend,
            vec![MeasureTerm {
                coeff: backend.one(),
                shift: PHat::zero(backend.p()),
                base: BaseHat::PointMass,
            }],
        )
    }

    pub fn from_table<B: Backend<Val = V>>(backend: &B, table: DualFn<V>) -> MeasureHat<V> {
        MeasureHat::from_terms(
            backend,
            vec![MeasureTerm {
                coeff: backend.one(),
                shift: PHat::zero(backend.p()),
                base: BaseHat::Table(table),
            }],
        )
    }

    /// `mu_hat - c * 1_0`.
    pub fn sub_scaled_dirac<B: Backend<Val = V>>(&self, backend: &B, c: &V) -> MeasureHat<V> {
        let mut terms = self.terms.clone();
        terms.push(MeasureTerm {
            coeff: backend.neg(c),
            shift: PHat::zero(backend.p()),
            base: BaseHat::DiracZero,
        });
        MeasureHat { terms }
    }

    /// `tau_s{mu_hat}(t) = mu_hat(t + s)`.
    pub fn translate(&self, s: &PHat) -> MeasureHat<V> {
        let terms = self
            .terms
            .iter()
            .map(|term| MeasureTerm {
                coeff: term.coeff.clone(),
                shift: term.shift.sub(s),
                base: term.base.clone(),
            })
            .collect();
        MeasureHat { terms }
    }
}

/// The product-formula value
/// `A_q(t) = prod_{m=0}^{-v_2(t)-1} (1 + q e^{-2 pi i 2^m t}) / 4`,
/// with `A_q(0) = 1`. Exact in either backend; every factor is a q-adic
/// unit, so `|A_q(t)|_q = 1`.
pub fn aq_hat<B: Backend>(backend: &B, q: u32, t: &PHat) -> B::Val {
    assert_eq!(backend.p(), 2, "the product formula lives on Z_2-hat");
    if t.is_zero() {
        return backend.one();
    }
    let qv = backend.from_int(q as i64);
    let quarter = backend.from_ratio(&big_ratio(BigInt::one(), BigInt::from(4)));
    let mut acc = backend.one();
    let n = t.denom_exp();
    for m in 0..n {
        let root = backend.root(&t.smul(1u64 << m).neg());
        let factor = backend.mul(&backend.add(&backend.one(), &backend.mul(&qv, &root)), &quarter);
        acc = backend.mul(&acc, &factor);
    }
    acc
}

fn base_eval<B: Backend>(backend: &B, q: u32, base: &BaseHat<B::Val>, t: &PHat) -> B::Val {
    match base {
        BaseHat::Table(table) => table.eval(backend, t),
        BaseHat::DiracZero => {
            if t.is_zero() {
                backend.one()
            } else {
                backend.zero()
            }
        }
        BaseHat::PointMass => backend.one(),
        BaseHat::AqProduct => aq_hat(backend, q, t),
    }
}

/// `mu_hat(t)`: the defining sum over terms.
pub fn measure_eval<B: Backend>(backend: &B, q: u32, mu: &MeasureHat<B::Val>, t: &PHat) -> B::Val {
    let mut acc = backend.zero();
    for term in &mu.terms {
        let v = base_eval(backend, q, &term.base, &t.sub(&term.shift));
        acc = backend.add(&acc, &backend.mul(&term.coeff, &v));
    }
    acc
}

impl<B: Backend> MeasureEval<B> for (u32, &MeasureHat<B::Val>) {
    fn eval(&self, backend: &B, t: &PHat) -> B::Val {
        measure_eval(backend, self.0, self.1, t)
    }
}

/// The convolution of two measures, exposed as an evaluator whose transform
/// is the pointwise product.
pub struct MeasureProduct<'a, V> {
    pub q: u32,
    pub mu: &'a MeasureHat<V>,
    pub nu: &'a MeasureHat<V>,
}

impl<B: Backend> MeasureEval<B> for MeasureProduct<'_, B::Val> {
    fn eval(&self, backend: &B, t: &PHat) -> B::Val {
        let a = measure_eval(backend, self.q, self.mu, t);
        let b = measure_eval(backend, self.q, self.nu, t);
        backend.mul(&a, &b)
    }
}

/// `mu~_N(z)`: the N-th partial Fourier sum, evaluated literally over the
/// ball. This is the oracle route; closed forms are cross-checked against
/// it.
pub fn mu_tilde<B: Backend>(
    backend: &B,
    q: u32,
    mu: &MeasureHat<B::Val>,
    z: &ZpPoint,
    n: u32,
) -> B::Val {
    let ball = enumerate_ball(backend.p(), n);
    let terms = exec::map_slice(&ball, |t| {
        let v = measure_eval(backend, q, mu, t);
        backend.mul(&v, &backend.root(&t.frac_mul(z)))
    });
    let mut acc = backend.zero();
    for v in terms {
        acc = backend.add(&acc, &v);
    }
    acc
}

/// The displayed closed form of the A_q partial sum:
/// `q^{#1([z]_{2^N})}/2^N - (q-3)/4 * sum_{n<N} q^{#1([z]_{2^n})}/2^n`.
pub fn aq_partial_closed(q: u32, z: &ZpPoint, n: u32) -> Q {
    let head = big_ratio(BigInt::from(q).pow(ones_count(z.truncate(2, n))), pow2(n));
    let mut tail = Q::zero();
    for j in 0..n {
        tail += big_ratio(BigInt::from(q).pow(ones_count(z.truncate(2, j))), pow2(j));
    }
    let factor = big_ratio(BigInt::from(q) - BigInt::from(3), BigInt::from(4));
    head - factor * tail
}

/// Exact geometric tail `sum_{n >= from} q^{#1([z]_{2^n})}/2^n` for an
/// eventually periodic point outside `N_0`. The period contains a one, so
/// each full period multiplies terms by `q^w / 2^L` with `|q^w/2^L|_q < 1`,
/// and the rational closed form below is the q-adic limit of the series.
pub fn aq_digit_tail(q: u32, z: &ZpPoint, from: u32) -> Q {
    let (pre, period) = match z {
        ZpPoint::Periodic { pre, period } => (pre.clone(), period.clone()),
        ZpPoint::Nat { .. } => panic!("digit tail of a natural number diverges q-adically"),
    };
    let plen = pre.len() as u32;
    let llen = period.len() as u32;
    let w: u32 = period.iter().map(|&d| u32::from(d)).sum();
    assert!(w >= 1, "canonical periodic point has a one in its period");
    let ones_at = |n: u32| -> u32 {
        if n <= plen {
            pre[..n as usize].iter().map(|&d| u32::from(d)).sum()
        } else {
            let full: u32 = pre.iter().map(|&d| u32::from(d)).sum();
            let m = n - plen;
            let cycles = m / llen;
            let rest = m % llen;
            let partial: u32 = period[..rest as usize].iter().map(|&d| u32::from(d)).sum();
            full + cycles * w + partial
        }
    };
    // explicit terms until the index aligns with a period boundary
    let mut start = from.max(plen);
    while (start - plen) % llen != 0 {
        start += 1;
    }
    let mut acc = Q::zero();
    for n in from..start {
        acc += big_ratio(BigInt::from(q).pow(ones_at(n)), pow2(n));
    }
    // one aligned block times the geometric factor 2^L / (2^L - q^w)
    let mut block = Q::zero();
    let mut wr = 0u32;
    for r in 0..llen {
        block += big_ratio(BigInt::from(q).pow(wr), pow2(r));
        wr += u32::from(period[r as usize]);
    }
    let geom = big_ratio(pow2(llen), pow2(llen) - BigInt::from(q).pow(w));
    acc += big_ratio(BigInt::from(q).pow(ones_at(start)), pow2(start)) * block * geom;
    acc
}

/// A pointwise limit of the A_q Fourier series, tagged by the topology in
/// which it exists. Both variants carry exact rationals; the q-adic one is
/// the rational representative of the limit in `C_q` (embed it with
/// `FieldCtx::from_ratio` for valuation work). The two topologies are never
/// silently coerced into each other.
#[derive(Debug, Clone, PartialEq)]
pub enum AqLimit {
    Archimedean(Q),
    QAdic(Q),
}

/// The mixed-topology limit function: archimedean on `N_0`, q-adic (via the
/// geometric closed form) on eventually periodic points outside it.
pub fn aq_tilde(q: u32, z: &ZpPoint) -> AqLimit {
    let qm3 = big_ratio(BigInt::from(q) - BigInt::from(3), BigInt::one());
    match z {
        ZpPoint::Nat { value: 0 } => AqLimit::Archimedean(-qm3 / Q::from(BigInt::from(2))),
        ZpPoint::Nat { value } => {
            let m = *value;
            let lam = bit_length(m);
            let head = big_ratio(BigInt::from(q).pow(ones_count(m)), pow2(lam));
            let mut tail = Q::zero();
            for n in 0..lam {
                tail += big_ratio(BigInt::from(q).pow(ones_count(z.truncate(2, n))), pow2(n));
            }
            let half = big_ratio(BigInt::one(), BigInt::from(2));
            let quarter = big_ratio(BigInt::one(), BigInt::from(4));
            AqLimit::Archimedean(-&qm3 * half * head - qm3 * quarter * tail)
        }
        ZpPoint::Periodic { .. } => {
            let quarter = big_ratio(BigInt::one(), BigInt::from(4));
            AqLimit::QAdic(-qm3 * quarter * aq_digit_tail(q, z, 0))
        }
    }
}

/// Per-term closed form of the partial sum, exact whenever `N` is at least
/// every shift conductor (each shifted term contributes
/// `coeff * e^{2 pi i {s z}} * S_N^{base}(z)`, by the ball bijection
/// `t -> t + s`). Returns `None` below that threshold.
pub fn partial_sum_closed<B: Backend>(
    backend: &B,
    q: u32,
    mu: &MeasureHat<B::Val>,
    z: &ZpPoint,
    n: u32,
) -> Option<B::Val> {
    let p = backend.p();
    let mut acc = backend.zero();
    for term in &mu.terms {
        if term.shift.denom_exp() > n {
            return None;
        }
        let base_sum = match &term.base {
            BaseHat::DiracZero => backend.one(),
            BaseHat::AqProduct => backend.from_ratio(&aq_partial_closed(q, z, n)),
            BaseHat::Table(table) => {
                let mut s = backend.zero();
                for (u, v) in table.support() {
                    if u.denom_exp() <= n {
                        s = backend.add(&s, &backend.mul(v, &backend.root(&u.frac_mul(z))));
                    }
                }
                s
            }
            BaseHat::PointMass => {
                // full character sum over the ball: p^N on the zero coset
                let pn = u64::from(p).pow(n);
                if z.truncate(p, n) == 0 {
                    backend.from_int(pn as i64)
                } else {
                    backend.zero()
                }
            }
        };
        let phase = backend.root(&term.shift.frac_mul(z));
        acc = backend.add(&acc, &backend.mul(&term.coeff, &backend.mul(&phase, &base_sum)));
    }
    Some(acc)
}

/// The exact q-adic limit of the partial sums at `z`, when every term
/// admits one in closed form; `None` when no q-adic limit exists (the A_q
/// base at a natural number, or the point mass at 0).
pub fn qadic_limit_closed<B: Backend>(
    backend: &B,
    q: u32,
    mu: &MeasureHat<B::Val>,
    z: &ZpPoint,
) -> Option<B::Val> {
    let mut acc = backend.zero();
    for term in &mu.terms {
        let base_lim = match &term.base {
            BaseHat::DiracZero => backend.one(),
            BaseHat::AqProduct => match aq_tilde(q, z) {
                AqLimit::QAdic(r) => backend.from_ratio(&r),
                AqLimit::Archimedean(_) => return None,
            },
            BaseHat::Table(table) => {
                let mut s = backend.zero();
                for (u, v) in table.support() {
                    s = backend.add(&s, &backend.mul(v, &backend.root(&u.frac_mul(z))));
                }
                s
            }
            BaseHat::PointMass => {
                if z == &ZpPoint::nat(0) {
                    return None;
                }
                backend.zero()
            }
        };
        let phase = backend.root(&term.shift.frac_mul(z));
        acc = backend.add(&acc, &backend.mul(&term.coeff, &backend.mul(&phase, &base_lim)));
    }
    Some(acc)
}

/// `integral f d mu = sum_t f_hat(-t) mu_hat(t)`: a finite sum over the
/// transform support of f, with the measure evaluated lazily.
pub fn integrate_against<B: Backend, E: MeasureEval<B>>(
    backend: &B,
    f: &LCFn<B::Val>,
    mu: &E,
) -> B::Val {
    let fh = fourier_fwd(backend, f);
    let mut acc = backend.zero();
    for (t, v) in fh.support() {
        let m = mu.eval(backend, &t.neg());
        acc = backend.add(&acc, &backend.mul(v, &m));
    }
    acc
}

/// One row of a convergence report: the valuation of the increment
/// `mu~_{N+1}(z) - mu~_N(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchyRow {
    pub level: u32,
    pub increment_val: QVal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CauchyVerdict {
    /// Increment valuations strictly increase over the final half of the
    /// observed range. Observational, never a proof.
    CauchyObserved,
    /// Increment valuations stay bounded over the final half. Observational.
    NotCauchyObserved,
}

impl std::fmt::Display for CauchyVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CauchyVerdict::CauchyObserved => write!(f, "q-adically Cauchy (observed)"),
            CauchyVerdict::NotCauchyObserved => write!(f, "not Cauchy (observed)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CauchyReport {
    pub rows: Vec<CauchyRow>,
    pub verdict: CauchyVerdict,
}

/// Exact increment valuations of the partial sums at `z` for `N < n_max`,
/// with an observed convergence verdict. Uses the exact per-term closed
/// forms where available and literal ball sums otherwise (small N only).
pub fn cauchy_report<B: Backend>(
    backend: &B,
    q: u32,
    mu: &MeasureHat<B::Val>,
    z: &ZpPoint,
    n_max: u32,
) -> Result<CauchyReport> {
    let sum_at = |n: u32| -> B::Val {
        partial_sum_closed(backend, q, mu, z, n).unwrap_or_else(|| mu_tilde(backend, q, mu, z, n))
    };
    let mut rows = Vec::new();
    let mut prev = sum_at(0);
    for n in 0..n_max {
        let next = sum_at(n + 1);
        let inc = backend.sub(&next, &prev);
        let val = backend.qval(&inc)?;
        if let QVal::AtLeast(b) = val {
            return Err(Error::PrecisionExhausted { available: b });
        }
        rows.push(CauchyRow { level: n, increment_val: val });
        prev = next;
    }
    let verdict = classify_increments(&rows);
    Ok(CauchyReport { rows, verdict })
}

fn classify_increments(rows: &[CauchyRow]) -> CauchyVerdict {
    if rows.is_empty() {
        return CauchyVerdict::CauchyObserved;
    }
    let tail = &rows[rows.len() / 2..];
    // exact-zero increments have infinite valuation
    let keys: Vec<i64> = tail
        .iter()
        .map(|r| match r.increment_val {
            QVal::ExactZero => i64::MAX,
            QVal::Finite(v) => v,
            QVal::AtLeast(b) => b,
        })
        .collect();
    if keys.iter().all(|&k| k == i64::MAX) {
        // the partial sums stabilized exactly
        return CauchyVerdict::CauchyObserved;
    }
    // valuations drifting upward (allowing plateaus, requiring net growth)
    // are the observational signature of convergence; anything flat,
    // oscillating, or decreasing over the window is reported as not Cauchy
    let nondecreasing = keys.windows(2).all(|w| w[1] >= w[0]);
    let net_growth = keys.last() > keys.first();
    if nondecreasing && net_growth {
        CauchyVerdict::CauchyObserved
    } else {
        CauchyVerdict::NotCauchyObserved
    }
}

/// The q-adic valuation of a nonzero rational, `None` for zero.
pub fn rational_qval(q: u32, r: &Q) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    let bq = BigInt::from(q);
    let mut v = 0i64;
    let mut num = r.numer().clone();
    while (&num % &bq).is_zero() {
        num /= &bq;
        v += 1;
    }
    let mut den = r.denom().clone();
    while (&den % &bq).is_zero() {
        den /= &bq;
        v -= 1;
    }
    Some(v)
}
