//! The (p,q)-adic Fourier engine on locally constant functions.
//!
//! A level-N locally constant function is a table of `p^N` values on the
//! residue classes mod `p^N`; these are dense in `C(Z_p, C_q)` and every
//! computation here is exact on them. Transforms of level-N functions are
//! finitely supported on the ball `|t|_p <= p^N`, so both directions, all
//! convolutions, and the norms reduce to finite exact sums.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::One;

use crate::base::ZpPoint;
use crate::dual::{enumerate_ball, PHat};
use crate::error::{Error, Result};
use crate::exec;
use crate::qadic::QVal;
use crate::value::{Backend, QNorm};

/// A locally constant function at level N: entry `n` is the value on the
/// coset `n + p^N Z_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct LCFn<V> {
    level: u32,
    values: Vec<V>,
}

impl<V: Clone + Send + Sync> LCFn<V> {
    pub fn new<B: Backend<Val = V>>(backend: &B, level: u32, values: Vec<V>) -> LCFn<V> {
        let expect = (backend.p() as usize).checked_pow(level).expect("p^N overflows");
        assert_eq!(values.len(), expect, "level-{level} function needs {expect} values");
        LCFn { level, values }
    }

    pub fn constant<B: Backend<Val = V>>(backend: &B, v: V) -> LCFn<V> {
        let _ = backend;
        LCFn { level: 0, values: vec![v] }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    /// Value on the coset of the integer `m`.
    pub fn value_at(&self, p: u32, m: u64) -> &V {
        let pn = u64::from(p).pow(self.level);
        &self.values[(m % pn) as usize]
    }

    /// Value at a point of `Z_p`.
    pub fn value_at_point(&self, p: u32, z: &ZpPoint) -> &V {
        &self.values[z.truncate(p, self.level) as usize]
    }

    /// Replicate values to represent the same function at a higher level.
    pub fn lift_to(&self, p: u32, level: u32) -> LCFn<V> {
        assert!(level >= self.level);
        if level == self.level {
            return self.clone();
        }
        let pn_old = u64::from(p).pow(self.level);
        let pn_new = u64::from(p).pow(level);
        let values = (0..pn_new).map(|m| self.values[(m % pn_old) as usize].clone()).collect();
        LCFn { level, values }
    }
}

/// Equality as functions on `Z_p` (after aligning levels).
pub fn lcfn_eq<B: Backend>(backend: &B, f: &LCFn<B::Val>, g: &LCFn<B::Val>) -> bool {
    let n = f.level.max(g.level);
    let lf = f.lift_to(backend.p(), n);
    let lg = g.lift_to(backend.p(), n);
    lf.values.iter().zip(lg.values.iter()).all(|(a, b)| backend.eq(a, b))
}

/// A finitely supported function on the dual group; no explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFn<V> {
    support: BTreeMap<PHat, V>,
}

impl<V: Clone> Default for DualFn<V> {
    fn default() -> Self {
        DualFn { support: BTreeMap::new() }
    }
}

impl<V: Clone> DualFn<V> {
    pub fn new() -> DualFn<V> {
        Default::default()
    }

    pub fn dirac(t: PHat, v: V) -> DualFn<V> {
        let mut support = BTreeMap::new();
        support.insert(t, v);
        DualFn { support }
    }

    pub fn insert<B: Backend<Val = V>>(&mut self, backend: &B, t: PHat, v: V) {
        if !backend.is_zero(&v) {
            self.support.insert(t, v);
        } else {
            self.support.remove(&t);
        }
    }

    /// Add `v` into the coefficient at `t`, pruning zeros.
    pub fn accumulate<B: Backend<Val = V>>(&mut self, backend: &B, t: PHat, v: V) {
        let cur = match self.support.get(&t) {
            Some(old) => backend.add(old, &v),
            None => v,
        };
        self.insert(backend, t, cur);
    }

    pub fn get(&self, t: &PHat) -> Option<&V> {
        self.support.get(t)
    }

    pub fn eval<B: Backend<Val = V>>(&self, backend: &B, t: &PHat) -> V {
        self.support.get(t).cloned().unwrap_or_else(|| backend.zero())
    }

    pub fn support(&self) -> impl Iterator<Item = (&PHat, &V)> {
        self.support.iter()
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Largest denominator exponent in the support (0 for the empty
    /// function): the least M with support inside the ball `p^M`.
    pub fn max_denom_exp(&self) -> u32 {
        self.support.keys().map(|t| t.denom_exp()).max().unwrap_or(0)
    }
}

/// `1_0`: the indicator of 0, the identity of dual convolution.
pub fn dirac_zero<B: Backend>(backend: &B) -> DualFn<B::Val> {
    DualFn::dirac(PHat::zero(backend.p()), backend.one())
}

/// The character value `e^{2 pi i {t z}_p}`.
pub fn character<B: Backend>(backend: &B, t: &PHat, z: &ZpPoint) -> B::Val {
    backend.root(&t.frac_mul(z))
}

/// The character `z -> e^{2 pi i {t z}_p}` as a level-N table
/// (N at least the conductor exponent of t).
pub fn character_fn<B: Backend>(backend: &B, t: &PHat, level: u32) -> LCFn<B::Val> {
    assert!(level >= t.denom_exp(), "level below character conductor");
    let p = backend.p();
    let pn = u64::from(p).pow(level);
    let values = exec::map_range(pn as usize, |m| backend.root(&t.smul(m as u64)));
    LCFn { level, values }
}

fn inv_pn_ratio(p: u32, level: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(p).pow(level))
}

/// The Haar integral: for a level-N function the defining limit stabilizes
/// at level N, so it equals the average of the table.
pub fn haar_integral<B: Backend>(backend: &B, f: &LCFn<B::Val>) -> B::Val {
    let mut sum = backend.zero();
    for v in &f.values {
        sum = backend.add(&sum, v);
    }
    backend.mul(&sum, &backend.from_ratio(&inv_pn_ratio(backend.p(), f.level)))
}

/// Forward transform: `chi_hat(t) = (1/p^N) sum_n chi(n) e^{-2 pi i n t}`,
/// supported inside the ball `|t|_p <= p^N`.
pub fn fourier_fwd<B: Backend>(backend: &B, f: &LCFn<B::Val>) -> DualFn<B::Val> {
    let p = backend.p();
    let n = f.level;
    let ball = enumerate_ball(p, n);
    let scale = backend.from_ratio(&inv_pn_ratio(p, n));
    let entries = exec::map_slice(&ball, |t| {
        let mut acc = backend.zero();
        for (m, v) in f.values.iter().enumerate() {
            let ch = backend.root(&t.smul(m as u64).neg());
            acc = backend.add(&acc, &backend.mul(v, &ch));
        }
        (*t, backend.mul(&acc, &scale))
    });
    let mut out = DualFn::new();
    for (t, v) in entries {
        out.insert(backend, t, v);
    }
    out
}

/// Inversion: `chi(z) = sum_t chi_hat(t) e^{2 pi i {t z}_p}`, reconstructed
/// at the level of the largest denominator in the support.
pub fn fourier_inv<B: Backend>(backend: &B, fhat: &DualFn<B::Val>) -> LCFn<B::Val> {
    let p = backend.p();
    let level = fhat.max_denom_exp();
    let pn = u64::from(p).pow(level);
    let entries: Vec<(PHat, B::Val)> = fhat.support().map(|(t, v)| (*t, v.clone())).collect();
    let values = exec::map_range(pn as usize, |m| {
        let mut acc = backend.zero();
        for (t, v) in &entries {
            let ch = backend.root(&t.smul(m as u64));
            acc = backend.add(&acc, &backend.mul(v, &ch));
        }
        acc
    });
    LCFn { level, values }
}

/// Pointwise product (levels aligned).
pub fn pointwise_mul<B: Backend>(backend: &B, f: &LCFn<B::Val>, g: &LCFn<B::Val>) -> LCFn<B::Val> {
    let p = backend.p();
    let n = f.level.max(g.level);
    let lf = f.lift_to(p, n);
    let lg = g.lift_to(p, n);
    let values = exec::map_range(lf.values.len(), |i| backend.mul(&lf.values[i], &lg.values[i]));
    LCFn { level: n, values }
}

/// Convolution on `Z_p`: `(f * g)(m) = (1/p^N) sum_n f(m - n) g(n)`.
pub fn conv_zp<B: Backend>(backend: &B, f: &LCFn<B::Val>, g: &LCFn<B::Val>) -> LCFn<B::Val> {
    let p = backend.p();
    let n = f.level.max(g.level);
    let lf = f.lift_to(p, n);
    let lg = g.lift_to(p, n);
    let pn = u64::from(p).pow(n);
    let scale = backend.from_ratio(&inv_pn_ratio(p, n));
    let values = exec::map_range(pn as usize, |m| {
        let mut acc = backend.zero();
        for k in 0..pn {
            let idx = ((m as u64 + pn - k) % pn) as usize;
            acc = backend.add(&acc, &backend.mul(&lf.values[idx], &lg.values[k as usize]));
        }
        backend.mul(&acc, &scale)
    });
    LCFn { level: n, values }
}

/// Convolution on the dual: `(F * G)(t) = sum_s F(s) G(t - s)`, a finite
/// sum over the supports.
pub fn conv_dual<B: Backend>(backend: &B, f: &DualFn<B::Val>, g: &DualFn<B::Val>) -> DualFn<B::Val> {
    let mut out = DualFn::new();
    for (s, vf) in f.support() {
        for (u, vg) in g.support() {
            out.accumulate(backend, s.add(u), backend.mul(vf, vg));
        }
    }
    out
}

/// `tau_s{F}(t) = F(t + s)`.
pub fn translate_dual<B: Backend>(backend: &B, f: &DualFn<B::Val>, s: &PHat) -> DualFn<B::Val> {
    let mut out = DualFn::new();
    for (t, v) in f.support() {
        out.insert(backend, t.sub(s), v.clone());
    }
    out
}

/// `tau_a{f}(z) = f(z + a)`.
pub fn translate_fn<B: Backend>(backend: &B, f: &LCFn<B::Val>, a: &ZpPoint) -> LCFn<B::Val> {
    let p = backend.p();
    let pn = u64::from(p).pow(f.level);
    let shift = a.truncate(p, f.level);
    let values = (0..pn).map(|m| f.values[((m + shift) % pn) as usize].clone()).collect();
    LCFn { level: f.level, values }
}

/// Fold valuation data into a sup-norm. The sup is determined exactly as
/// long as every undetermined (zero-to-precision) point is provably no
/// larger than some determined one.
fn norm_from_vals(vals: impl IntoIterator<Item = QVal>) -> Result<QNorm> {
    let mut min_finite: Option<i64> = None;
    let mut min_bound: Option<i64> = None;
    for v in vals {
        match v {
            QVal::ExactZero => {}
            QVal::Finite(v) => min_finite = Some(min_finite.map_or(v, |m: i64| m.min(v))),
            QVal::AtLeast(b) => min_bound = Some(min_bound.map_or(b, |m: i64| m.min(b))),
        }
    }
    match (min_finite, min_bound) {
        (None, None) => Ok(QNorm::Zero),
        (Some(v), None) => Ok(QNorm::pow(v)),
        (Some(v), Some(b)) if v <= b => Ok(QNorm::pow(v)),
        (_, Some(b)) => Err(Error::PrecisionExhausted { available: b }),
    }
}

/// `||f||_{p,q} = sup_z |f(z)|_q`, computed over the residue table.
pub fn norm_fn<B: Backend>(backend: &B, f: &LCFn<B::Val>) -> Result<QNorm> {
    let vals = f.values.iter().map(|v| backend.qval(v)).collect::<Result<Vec<_>>>()?;
    norm_from_vals(vals)
}

/// `||F||_{p^inf,q} = sup_t |F(t)|_q` over the finite support.
pub fn norm_dual_sup<B: Backend>(backend: &B, f: &DualFn<B::Val>) -> Result<QNorm> {
    let vals = f.support().map(|(_, v)| backend.qval(v)).collect::<Result<Vec<_>>>()?;
    norm_from_vals(vals)
}

/// Windowed norm `||.||_{p^n,q}` of an arbitrary evaluator over the ball
/// `|t|_p <= p^n`, in the fixed enumeration order.
pub fn window_norm_eval<B, E>(backend: &B, eval: E, n: u32) -> Result<QNorm>
where
    B: Backend,
    E: Fn(&PHat) -> B::Val + Sync,
{
    let ball = enumerate_ball(backend.p(), n);
    let vals = exec::map_slice(&ball, |t| backend.qval(&eval(t)));
    norm_from_vals(vals.into_iter().collect::<Result<Vec<_>>>()?)
}

/// Windowed norm of a finitely supported dual function.
pub fn norm_dual_window<B: Backend>(backend: &B, f: &DualFn<B::Val>, n: u32) -> Result<QNorm> {
    // points outside the support contribute |0| = 0
    let vals = f
        .support()
        .filter(|(t, _)| t.denom_exp() <= n)
        .map(|(_, v)| backend.qval(v))
        .collect::<Result<Vec<_>>>()?;
    norm_from_vals(vals)
}

/// Parseval pairing: `integral of f g dz = sum_t f_hat(-t) g_hat(t)`.
pub fn parseval<B: Backend>(backend: &B, f: &LCFn<B::Val>, g: &LCFn<B::Val>) -> B::Val {
    let fh = fourier_fwd(backend, f);
    let gh = fourier_fwd(backend, g);
    let mut acc = backend.zero();
    for (t, vg) in gh.support() {
        if let Some(vf) = fh.get(&t.neg()) {
            acc = backend.add(&acc, &backend.mul(vf, vg));
        }
    }
    acc
}
