//! The numeric backend: truncated q-adic arithmetic in the unramified
//! extension `Q_q(zeta_{p^N})`.
//!
//! [`FieldCtx`] pins one embedding of `Q(zeta_{p^N})` into `C_q`: it holds a
//! Hensel lift `g` (modulo `q^M`) of one irreducible factor of `Phi_{p^N}`
//! modulo q, and designates the residue class of `x` as the image of
//! `zeta_{p^N}`. The factor is chosen by a deterministic scan, so the
//! embedding is reproducible run to run. Individual valuations of cyclotomic
//! numbers can depend on this choice; every quantity the acceptance suite
//! asserts is embedding-independent.
//!
//! [`QAdicNum`] works to absolute precision: coefficients live in
//! `Z/q^prec` in the basis `1, zeta, ..., zeta^{f-1}`, with a denominator
//! shift for the few non-integral values. In this basis the valuation of a
//! nonzero element is the minimum coefficient valuation, because the basis
//! reduces to a basis of the residue field.

pub mod fq;

use num::bigint::{BigInt, BigUint};
use num::{Integer, One, Zero};
use serde::{Deserialize, Serialize};

use crate::base::{mod_floor, mod_inverse, Config};
use crate::cyclo::CycloNum;
use crate::error::{Error, Result};

/// Valuation information for a truncated element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QVal {
    /// Constructed from the exact zero; valuation is infinite.
    ExactZero,
    /// Exactly determined valuation.
    Finite(i64),
    /// Zero to working precision: the valuation is at least this bound.
    AtLeast(i64),
}

impl QVal {
    /// The exact valuation, or an error when only a precision bound is known.
    pub fn finite(&self) -> Result<Option<i64>> {
        match self {
            QVal::ExactZero => Ok(None),
            QVal::Finite(v) => Ok(Some(*v)),
            QVal::AtLeast(b) => Err(Error::PrecisionExhausted { available: *b }),
        }
    }
}

/// A truncated element of `Q_q(zeta_{p^N})`: `coeffs(zeta) / q^shift` with
/// `coeffs` canonical modulo `q^prec`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QAdicNum {
    coeffs: Vec<BigInt>,
    prec: u32,
    shift: u32,
    exact_zero: bool,
}

impl QAdicNum {
    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact_zero
    }

    /// Zero to working precision (includes exact zeros).
    pub fn is_zero_to_prec(&self) -> bool {
        self.exact_zero || self.coeffs.iter().all(|c| c.is_zero())
    }
}

/// The fixed embedding of `Q(zeta_{p^N})` into `C_q`, realized as
/// `Z/q^M [x] / (g)` with `zeta = x`.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    p: u32,
    q: u32,
    n: u32,
    m: u32,
    f: u32,
    pn: u64,
    qm: BigInt,
    /// Monic minimal polynomial of zeta over `Z/q^M`, length `f + 1`;
    /// a Hensel lift of an irreducible factor of `Phi_{p^N}` mod q.
    g: Vec<BigInt>,
    /// `zeta^e mod (g, q^M)` for `e = 0 .. p^N - 1`.
    zeta_pows: Vec<Vec<BigInt>>,
}

/// Multiplicative order of `a` modulo `modulus`.
fn mult_order(a: u64, modulus: u64) -> u32 {
    assert!(modulus > 0);
    if modulus == 1 {
        return 1;
    }
    let mut acc = a % modulus;
    let mut ord = 1u32;
    while acc != 1 {
        acc = ((acc as u128 * a as u128) % modulus as u128) as u64;
        ord += 1;
        assert!(ord <= modulus as u32, "a not invertible mod modulus");
    }
    ord
}

impl FieldCtx {
    /// Deterministic construction of the embedding for conductor `p^n` at
    /// precision `q^M`. The scan orders are fixed: the defining irreducible
    /// `h` is the lex-smallest of degree f, and generator candidates are
    /// tried in increasing base-q digit order starting from the constant 2.
    pub fn setup(cfg: &Config, n: u32) -> Result<FieldCtx> {
        let (p, q, m) = (cfg.p, cfg.q, cfg.precision);
        if n > cfg.max_level {
            return Err(Error::ConductorTooLarge { requested: n, max: cfg.max_level });
        }
        let pn = u64::from(p)
            .checked_pow(n)
            .ok_or_else(|| Error::InvalidConfig("conductor overflows".into()))?;
        let qm = BigInt::from(q).pow(m);

        if n == 0 {
            // conductor 1: zeta = 1, g = x - 1
            let g = vec![mod_floor(&BigInt::from(-1), &qm), BigInt::one()];
            return Ok(FieldCtx {
                p,
                q,
                n,
                m,
                f: 1,
                pn,
                qm,
                g,
                zeta_pows: vec![vec![BigInt::one()]],
            });
        }

        let f = mult_order(u64::from(q), pn);
        let qu = u64::from(q);

        // residue-field phase: find an element of exact order p^n in F_{q^f}
        let h = fq::lowest_lex_irreducible(f as usize, qu);
        let exp = (BigUint::from(qu).pow(f) - BigUint::one()) / BigUint::from(pn);
        let t_res: Vec<u64>;
        let mut k: u64 = 2;
        loop {
            let mut cand = vec![0u64; f as usize];
            let mut v = k;
            let mut i = 0;
            while v > 0 {
                if i >= f as usize {
                    break;
                }
                cand[i] = v % qu;
                v /= qu;
                i += 1;
            }
            if v > 0 {
                return Err(Error::InvalidConfig("generator scan exhausted".into()));
            }
            let u = fq::poly_powmod(&cand, &exp, &h, qu);
            let one_el = {
                let mut o = vec![0u64; f as usize];
                o[0] = 1;
                o
            };
            if u != one_el {
                let u_sub = fq::poly_powmod(&u, &BigUint::from(pn / u64::from(p)), &h, qu);
                if u_sub != one_el {
                    t_res = u;
                    break;
                }
            }
            k += 1;
        }

        // minimal polynomial of t over F_q has degree exactly f
        let g0 = fq::min_poly(&t_res, &h, qu);
        assert_eq!(g0.len(), f as usize + 1, "order-p^n element must generate the extension");

        // Hensel phase: lift the root t inside Z/q^e [y]/(h), then read off
        // its minimal polynomial over Z/q^M.
        let h_big: Vec<BigInt> = h.iter().map(|&c| BigInt::from(c)).collect();
        let mut t_cur: Vec<BigInt> = t_res.iter().map(|&c| BigInt::from(c)).collect();
        let mut e = 1u32;
        while e < m {
            e = (2 * e).min(m);
            let md = BigInt::from(q).pow(e);
            let ring = LiftedRing { h: &h_big, md: &md, q: qu };
            let phi_t = ring.eval_phi(&t_cur, p, pn);
            let dphi_t = ring.eval_dphi(&t_cur, p, pn);
            let inv_d = ring.inv_unit(&dphi_t, e)?;
            let delta = ring.mul(&phi_t, &inv_d);
            t_cur = ring.sub(&t_cur, &delta);
        }
        // sanity: Phi(t) = 0 mod q^M
        {
            let ring = LiftedRing { h: &h_big, md: &qm, q: qu };
            let phi_t = ring.eval_phi(&t_cur, p, pn);
            if !phi_t.iter().all(|c| c.is_zero()) {
                return Err(Error::InvalidConfig("Hensel lift failed to converge".into()));
            }
        }
        let g = minpoly_lifted(&t_cur, &h_big, &qm, qu, f as usize)?;

        let mut ctx = FieldCtx {
            p,
            q,
            n,
            m,
            f,
            pn,
            qm,
            g,
            zeta_pows: Vec::new(),
        };
        ctx.build_zeta_pows();
        Ok(ctx)
    }

    fn build_zeta_pows(&mut self) {
        let f = self.f as usize;
        let mut pows = Vec::with_capacity(self.pn as usize);
        let mut cur = vec![BigInt::zero(); f];
        cur[0] = BigInt::one();
        for _ in 0..self.pn {
            pows.push(cur.clone());
            // cur <- cur * x mod (g, q^m)
            let top = cur[f - 1].clone();
            for i in (1..f).rev() {
                cur[i] = cur[i - 1].clone();
            }
            cur[0] = BigInt::zero();
            if !top.is_zero() {
                for i in 0..f {
                    let t = &top * &self.g[i];
                    cur[i] = mod_floor(&(&cur[i] - t), &self.qm);
                }
            }
        }
        self.zeta_pows = pows;
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn conductor_exp(&self) -> u32 {
        self.n
    }
    pub fn precision(&self) -> u32 {
        self.m
    }
    /// Degree of the unramified extension: the order of q mod `p^N`.
    pub fn degree(&self) -> u32 {
        self.f
    }
    pub fn minpoly(&self) -> &[BigInt] {
        &self.g
    }

    /// Re-check the construction certificates: `g` is monic of degree
    /// `f = ord(q mod p^N)`, divides `Phi_{p^N}` modulo `q^M`, is irreducible
    /// modulo q, and its root has exact multiplicative order `p^N`.
    pub fn verify(&self) -> Result<()> {
        let f = self.f as usize;
        let fail = |msg: &str| Err(Error::InvalidConfig(format!("field certificate: {msg}")));
        if self.g.len() != f + 1 || !self.g[f].is_one() {
            return fail("g not monic of degree f");
        }
        if self.n > 0 && self.f != mult_order(u64::from(self.q), self.pn) {
            return fail("f is not the order of q");
        }
        // g mod q irreducible
        let g_mod_q: Vec<u64> = self
            .g
            .iter()
            .map(|c| (c.mod_floor(&BigInt::from(self.q))).to_u64_digits().1.first().copied().unwrap_or(0))
            .collect();
        if !fq::is_irreducible(&g_mod_q, u64::from(self.q)) {
            return fail("g mod q not irreducible");
        }
        // exact division: Phi_{p^N} = g * h mod q^M
        let mut phi = vec![BigInt::zero(); self.pn as usize + 1];
        if self.n == 0 {
            phi = vec![BigInt::from(-1), BigInt::one()];
        } else {
            let step = (self.pn / u64::from(self.p)) as usize;
            for i in 0..self.p as usize {
                phi[i * step] = BigInt::one();
            }
            phi.truncate((self.p as usize - 1) * step + 1);
        }
        let mut rem = phi;
        let dd = f;
        while rem.iter().rposition(|c| !c.is_zero()).map_or(false, |dr| dr >= dd) {
            let dr = rem.iter().rposition(|c| !c.is_zero()).unwrap();
            let c = rem[dr].clone();
            let s = dr - dd;
            for i in 0..=dd {
                let t = &c * &self.g[i];
                rem[i + s] = mod_floor(&(&rem[i + s] - t), &self.qm);
            }
        }
        if !rem.iter().all(|c| c.is_zero()) {
            return fail("g does not divide Phi mod q^M");
        }
        // Phi(zeta) = 0 via the power table
        if self.n > 0 {
            let step = (self.pn / u64::from(self.p)) as usize;
            let mut acc = vec![BigInt::zero(); f];
            for i in 0..self.p as usize {
                for j in 0..f {
                    acc[j] = mod_floor(&(&acc[j] + &self.zeta_pows[i * step][j]), &self.qm);
                }
            }
            if !acc.iter().all(|c| c.is_zero()) {
                return fail("Phi(zeta) != 0");
            }
            // exact multiplicative order p^N: one more multiplication past
            // the end of the table must wrap to 1
            let one = self.one();
            let full = self.mul_raw(&self.zeta_pows[self.pn as usize - 1], &self.zeta_pows[1], &self.qm);
            if full != one.coeffs {
                return fail("zeta^(p^N) != 1");
            }
            let sub = &self.zeta_pows[(self.pn / u64::from(self.p)) as usize];
            if *sub == one.coeffs {
                return fail("zeta^(p^(N-1)) = 1");
            }
        }
        Ok(())
    }

    pub fn zero(&self) -> QAdicNum {
        QAdicNum {
            coeffs: vec![BigInt::zero(); self.f as usize],
            prec: self.m,
            shift: 0,
            exact_zero: true,
        }
    }

    pub fn one(&self) -> QAdicNum {
        let mut c = vec![BigInt::zero(); self.f as usize];
        c[0] = BigInt::one();
        QAdicNum { coeffs: c, prec: self.m, shift: 0, exact_zero: false }
    }

    pub fn from_int(&self, v: i64) -> QAdicNum {
        if v == 0 {
            return self.zero();
        }
        let mut c = vec![BigInt::zero(); self.f as usize];
        c[0] = mod_floor(&BigInt::from(v), &self.qm);
        QAdicNum { coeffs: c, prec: self.m, shift: 0, exact_zero: false }
    }

    /// Embed a rational. A q-divisible denominator is tracked as a shift,
    /// so the full field Q is supported with exact valuations.
    pub fn from_ratio(&self, r: &num::rational::BigRational) -> Result<QAdicNum> {
        if r.is_zero() {
            return Ok(self.zero());
        }
        let bq = BigInt::from(self.q);
        let mut den = r.denom().clone();
        let mut d = 0u32;
        while (&den % &bq).is_zero() {
            den /= &bq;
            d += 1;
        }
        if d >= self.m {
            return Err(Error::PrecisionExhausted { available: 0 });
        }
        let inv = mod_inverse(&den, &self.qm).expect("denominator coprime to q");
        let mut c = vec![BigInt::zero(); self.f as usize];
        c[0] = mod_floor(&(r.numer() * inv), &self.qm);
        Ok(QAdicNum { coeffs: c, prec: self.m, shift: d, exact_zero: false })
    }

    /// `zeta_{p^j}^k` for `t = k/p^j`; requires `j <= N`.
    pub fn root(&self, t: &crate::dual::PHat) -> Result<QAdicNum> {
        if t.denom_exp() > self.n {
            return Err(Error::ConductorTooLarge { requested: t.denom_exp(), max: self.n });
        }
        let stride = u64::from(self.p).pow(self.n - t.denom_exp());
        let e = (t.numer() as u128 * stride as u128 % self.pn as u128) as u64;
        Ok(QAdicNum {
            coeffs: self.zeta_pows[e as usize].clone(),
            prec: self.m,
            shift: 0,
            exact_zero: false,
        })
    }

    /// The ring homomorphism `Q(zeta_{p^n}) -> Q_q(zeta_{p^N})` determined by
    /// the pinned embedding (coherent across conductors).
    pub fn from_exact(&self, a: &CycloNum) -> Result<QAdicNum> {
        if a.p() != self.p {
            return Err(Error::InvalidConfig("cyclotomic prime differs from context".into()));
        }
        if a.conductor_exp() > self.n {
            return Err(Error::ConductorTooLarge { requested: a.conductor_exp(), max: self.n });
        }
        if a.is_zero() {
            return Ok(self.zero());
        }
        let stride = u64::from(self.p).pow(self.n - a.conductor_exp());
        let bq = BigInt::from(self.q);
        // separate q-power content of the denominators
        let mut dens: Vec<(BigInt, u32)> = Vec::with_capacity(a.coeffs().len());
        let mut dmax = 0u32;
        for c in a.coeffs() {
            let mut den = c.denom().clone();
            let mut d = 0u32;
            if !c.is_zero() {
                while (&den % &bq).is_zero() {
                    den /= &bq;
                    d += 1;
                }
            }
            dmax = dmax.max(d);
            dens.push((den, d));
        }
        if dmax >= self.m {
            return Err(Error::PrecisionExhausted { available: 0 });
        }
        let mut acc = vec![BigInt::zero(); self.f as usize];
        for (i, c) in a.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (den, d) = &dens[i];
            let inv = mod_inverse(den, &self.qm).expect("denominator coprime to q");
            let scale = mod_floor(&(c.numer() * inv * BigInt::from(self.q).pow(dmax - d)), &self.qm);
            let e = (i as u128 * stride as u128 % self.pn as u128) as usize;
            for (j, zc) in self.zeta_pows[e].iter().enumerate() {
                acc[j] = mod_floor(&(&acc[j] + &scale * zc), &self.qm);
            }
        }
        Ok(QAdicNum { coeffs: acc, prec: self.m, shift: dmax, exact_zero: false })
    }

    fn reduce_prec(&self, coeffs: &[BigInt], prec: u32) -> Vec<BigInt> {
        let md = BigInt::from(self.q).pow(prec);
        coeffs.iter().map(|c| mod_floor(c, &md)).collect()
    }

    pub fn add(&self, a: &QAdicNum, b: &QAdicNum) -> QAdicNum {
        if a.shift == b.shift && a.prec == b.prec {
            let md = BigInt::from(self.q).pow(a.prec);
            let coeffs = a
                .coeffs
                .iter()
                .zip(b.coeffs.iter())
                .map(|(x, y)| mod_floor(&(x + y), &md))
                .collect();
            return QAdicNum {
                coeffs,
                prec: a.prec,
                shift: a.shift,
                exact_zero: a.exact_zero && b.exact_zero,
            };
        }
        let s = a.shift.max(b.shift);
        let ap = (a.prec as i64 - a.shift as i64).min(b.prec as i64 - b.shift as i64);
        assert!(ap > 0, "q-adic precision model exhausted in addition");
        let prec = ap as u32 + s;
        let qa = BigInt::from(self.q).pow(s - a.shift);
        let qb = BigInt::from(self.q).pow(s - b.shift);
        let coeffs: Vec<BigInt> = a
            .coeffs
            .iter()
            .zip(b.coeffs.iter())
            .map(|(x, y)| x * &qa + y * &qb)
            .collect();
        QAdicNum {
            coeffs: self.reduce_prec(&coeffs, prec),
            prec,
            shift: s,
            exact_zero: a.exact_zero && b.exact_zero,
        }
    }

    pub fn neg(&self, a: &QAdicNum) -> QAdicNum {
        let md = BigInt::from(self.q).pow(a.prec);
        QAdicNum {
            coeffs: a.coeffs.iter().map(|c| mod_floor(&(-c), &md)).collect(),
            prec: a.prec,
            shift: a.shift,
            exact_zero: a.exact_zero,
        }
    }

    pub fn sub(&self, a: &QAdicNum, b: &QAdicNum) -> QAdicNum {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &QAdicNum, b: &QAdicNum) -> QAdicNum {
        if a.exact_zero || b.exact_zero {
            return self.zero();
        }
        let prec = a.prec.min(b.prec);
        let shift = a.shift + b.shift;
        assert!(prec > shift, "q-adic precision model exhausted in multiplication");
        let md = BigInt::from(self.q).pow(prec);
        let f = self.f as usize;
        let mut wide = vec![BigInt::zero(); 2 * f - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    wide[i + j] += x * y;
                }
            }
        }
        // reduce by monic g
        for e in (f..wide.len()).rev() {
            if wide[e].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut wide[e], BigInt::zero());
            let s = e - f;
            for i in 0..f {
                let t = &c * &self.g[i];
                wide[i + s] -= t;
            }
        }
        wide.truncate(f);
        QAdicNum {
            coeffs: wide.iter().map(|c| mod_floor(c, &md)).collect(),
            prec,
            shift,
            exact_zero: false,
        }
    }

    /// Valuation data: exact when a nonzero digit is visible, a lower bound
    /// otherwise.
    pub fn qval(&self, a: &QAdicNum) -> QVal {
        if a.exact_zero {
            return QVal::ExactZero;
        }
        let bq = BigInt::from(self.q);
        let mut best: Option<i64> = None;
        for c in &a.coeffs {
            if c.is_zero() {
                continue;
            }
            let mut v = 0i64;
            let mut cur = c.clone();
            while (&cur % &bq).is_zero() {
                cur /= &bq;
                v += 1;
            }
            best = Some(best.map_or(v, |b: i64| b.min(v)));
        }
        match best {
            Some(v) => QVal::Finite(v - a.shift as i64),
            None => QVal::AtLeast(a.prec as i64 - a.shift as i64),
        }
    }

    /// Multiplicative inverse; errors on exact zero and on elements
    /// indistinguishable from zero at working precision.
    pub fn inv(&self, a: &QAdicNum) -> Result<QAdicNum> {
        if a.exact_zero {
            return Err(Error::DivisionByZero);
        }
        let vc = match self.qval(&QAdicNum { shift: 0, ..a.clone() }) {
            QVal::Finite(v) => v as u32,
            _ => {
                return Err(Error::PrecisionExhausted {
                    available: a.prec as i64 - a.shift as i64,
                })
            }
        };
        let prec_unit = a.prec - vc;
        if prec_unit == 0 {
            return Err(Error::PrecisionExhausted { available: 0 });
        }
        let qv = BigInt::from(self.q).pow(vc);
        let unit: Vec<BigInt> = a.coeffs.iter().map(|c| c / &qv).collect();
        let inv_unit = self.invert_unit(&unit, prec_unit)?;
        // value = q^{shift - vc} * unit^{-1}
        if a.shift >= vc {
            let lift = BigInt::from(self.q).pow(a.shift - vc);
            let prec = (prec_unit + (a.shift - vc)).min(self.m);
            let md = BigInt::from(self.q).pow(prec);
            Ok(QAdicNum {
                coeffs: inv_unit.iter().map(|c| mod_floor(&(c * &lift), &md)).collect(),
                prec,
                shift: 0,
                exact_zero: false,
            })
        } else {
            Ok(QAdicNum {
                coeffs: inv_unit,
                prec: prec_unit,
                shift: vc - a.shift,
                exact_zero: false,
            })
        }
    }

    /// Invert a unit (some coefficient a q-unit) modulo `(g, q^prec)` by
    /// lifting the residue-field inverse.
    fn invert_unit(&self, unit: &[BigInt], prec: u32) -> Result<Vec<BigInt>> {
        let qu = u64::from(self.q);
        let unit_mod_q: Vec<u64> = unit
            .iter()
            .map(|c| c.mod_floor(&BigInt::from(self.q)).to_u64_digits().1.first().copied().unwrap_or(0))
            .collect();
        let g_mod_q: Vec<u64> = self
            .g
            .iter()
            .map(|c| c.mod_floor(&BigInt::from(self.q)).to_u64_digits().1.first().copied().unwrap_or(0))
            .collect();
        let inv0 = fq::poly_invmod(&unit_mod_q, &g_mod_q, qu);
        let mut inv: Vec<BigInt> = inv0.iter().map(|&c| BigInt::from(c)).collect();
        inv.resize(self.f as usize, BigInt::zero());
        let mut e = 1u32;
        while e < prec {
            e = (2 * e).min(prec);
            let md = BigInt::from(self.q).pow(e);
            // u <- u (2 - a u) mod q^e
            let au = self.mul_raw(unit, &inv, &md);
            let mut two_minus = vec![BigInt::zero(); self.f as usize];
            two_minus[0] = BigInt::from(2);
            for i in 0..self.f as usize {
                two_minus[i] = mod_floor(&(&two_minus[i] - &au[i]), &md);
            }
            inv = self.mul_raw(&inv, &two_minus, &md);
        }
        let md = BigInt::from(self.q).pow(prec);
        Ok(inv.iter().map(|c| mod_floor(c, &md)).collect())
    }

    /// Raw product modulo `(g, modulus)`.
    fn mul_raw(&self, a: &[BigInt], b: &[BigInt], md: &BigInt) -> Vec<BigInt> {
        let f = self.f as usize;
        let mut wide = vec![BigInt::zero(); 2 * f - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    wide[i + j] += x * y;
                }
            }
        }
        for e in (f..wide.len()).rev() {
            if wide[e].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut wide[e], BigInt::zero());
            let s = e - f;
            for i in 0..f {
                let t = &c * &self.g[i];
                wide[i + s] -= t;
            }
        }
        wide.truncate(f);
        wide.iter().map(|c| mod_floor(c, md)).collect()
    }

    /// Equal to working precision (difference indistinguishable from zero).
    pub fn eq_to_prec(&self, a: &QAdicNum, b: &QAdicNum) -> bool {
        self.sub(a, b).is_zero_to_prec()
    }
}

/// Arithmetic in `Z/q^e [y] / (h)` used during Hensel lifting.
struct LiftedRing<'a> {
    h: &'a [BigInt],
    md: &'a BigInt,
    q: u64,
}

impl LiftedRing<'_> {
    fn deg(&self) -> usize {
        self.h.len() - 1
    }

    fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let f = self.deg();
        if f == 0 {
            return vec![];
        }
        let mut wide = vec![BigInt::zero(); 2 * f.max(1) - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    wide[i + j] += x * y;
                }
            }
        }
        for e in (f..wide.len()).rev() {
            if wide[e].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut wide[e], BigInt::zero());
            let s = e - f;
            for i in 0..f {
                let t = &c * &self.h[i];
                wide[i + s] -= t;
            }
        }
        wide.truncate(f);
        wide.resize(f, BigInt::zero());
        wide.iter().map(|c| mod_floor(c, self.md)).collect()
    }

    fn sub(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| mod_floor(&(x - y), self.md))
            .collect()
    }

    fn one(&self) -> Vec<BigInt> {
        let mut o = vec![BigInt::zero(); self.deg().max(1)];
        o[0] = BigInt::one();
        o
    }

    fn pow(&self, a: &[BigInt], mut e: u64) -> Vec<BigInt> {
        let mut acc = self.one();
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn scale(&self, a: &[BigInt], c: u64) -> Vec<BigInt> {
        a.iter().map(|x| mod_floor(&(x * BigInt::from(c)), self.md)).collect()
    }

    /// `Phi_{p^n}(T) = sum_{i<p} (T^{p^{n-1}})^i`.
    fn eval_phi(&self, t: &[BigInt], p: u32, pn: u64) -> Vec<BigInt> {
        let step = pn / u64::from(p);
        let tp = self.pow(t, step);
        let mut acc = self.one();
        let mut cur = self.one();
        for _ in 1..p {
            cur = self.mul(&cur, &tp);
            acc = acc.iter().zip(cur.iter()).map(|(x, y)| mod_floor(&(x + y), self.md)).collect();
        }
        acc
    }

    /// `Phi'_{p^n}(T) = sum_{i=1}^{p-1} i p^{n-1} T^{i p^{n-1} - 1}`.
    fn eval_dphi(&self, t: &[BigInt], p: u32, pn: u64) -> Vec<BigInt> {
        let step = pn / u64::from(p);
        let tp = self.pow(t, step);
        let t_base = self.pow(t, step - 1);
        let mut acc = vec![BigInt::zero(); self.deg().max(1)];
        let mut cur = t_base;
        for i in 1..p as u64 {
            let term = self.scale(&cur, i * step);
            acc = acc.iter().zip(term.iter()).map(|(x, y)| mod_floor(&(x + y), self.md)).collect();
            if i + 1 < p as u64 {
                cur = self.mul(&cur, &tp);
            }
        }
        acc
    }

    /// Inverse of a unit, by lifting the residue-field inverse.
    fn inv_unit(&self, a: &[BigInt], prec: u32) -> Result<Vec<BigInt>> {
        let bq = BigInt::from(self.q);
        let a_mod_q: Vec<u64> = a
            .iter()
            .map(|c| c.mod_floor(&bq).to_u64_digits().1.first().copied().unwrap_or(0))
            .collect();
        let h_mod_q: Vec<u64> = self
            .h
            .iter()
            .map(|c| c.mod_floor(&bq).to_u64_digits().1.first().copied().unwrap_or(0))
            .collect();
        if fq::deg(&a_mod_q).is_none() {
            return Err(Error::PrecisionExhausted { available: 0 });
        }
        let inv0 = fq::poly_invmod(&a_mod_q, &h_mod_q, self.q);
        let mut inv: Vec<BigInt> = inv0.iter().map(|&c| BigInt::from(c)).collect();
        inv.resize(self.deg().max(1), BigInt::zero());
        let mut e = 1u32;
        while e < prec {
            e = (2 * e).min(prec);
            let md = BigInt::from(self.q).pow(e);
            let ring = LiftedRing { h: self.h, md: &md, q: self.q };
            let au = ring.mul(a, &inv);
            let mut two_minus = vec![BigInt::zero(); self.deg().max(1)];
            two_minus[0] = BigInt::from(2);
            for i in 0..two_minus.len() {
                two_minus[i] = mod_floor(&(&two_minus[i] - &au[i]), &md);
            }
            inv = ring.mul(&inv, &two_minus);
        }
        Ok(inv.iter().map(|c| mod_floor(c, self.md)).collect())
    }
}

/// Minimal polynomial over `Z/q^M` of the lifted root, by solving
/// `T^f = sum c_i T^i` with unit-pivot Gaussian elimination.
fn minpoly_lifted(t: &[BigInt], h: &[BigInt], qm: &BigInt, q: u64, f: usize) -> Result<Vec<BigInt>> {
    let ring = LiftedRing { h, md: qm, q };
    let dim = h.len() - 1;
    let mut pows: Vec<Vec<BigInt>> = Vec::with_capacity(f + 1);
    let mut cur = ring.one();
    for _ in 0..=f {
        pows.push(cur.clone());
        cur = ring.mul(&cur, t);
    }
    // rows: coordinates in y-basis; columns: powers of T, augmented by T^f
    let mut m: Vec<Vec<BigInt>> = (0..dim)
        .map(|r| {
            let mut row: Vec<BigInt> = (0..f).map(|c| pows[c][r].clone()).collect();
            row.push(pows[f][r].clone());
            row
        })
        .collect();
    let mut piv_row_of_col = vec![usize::MAX; f];
    let mut rank = 0usize;
    for col in 0..f {
        // unit pivot: entry not divisible by q
        let Some(pr) = (rank..dim).find(|&r| mod_inverse(&m[r][col], qm).is_some()) else {
            return Err(Error::InvalidConfig("minimal polynomial system is singular".into()));
        };
        m.swap(rank, pr);
        let inv = mod_inverse(&m[rank][col], qm).expect("unit pivot");
        for c in col..=f {
            m[rank][c] = mod_floor(&(&m[rank][c] * &inv), qm);
        }
        for r in 0..dim {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=f {
                    let t2 = &factor * &m[rank][c];
                    m[r][c] = mod_floor(&(&m[r][c] - t2), qm);
                }
            }
        }
        piv_row_of_col[col] = rank;
        rank += 1;
    }
    for r in 0..dim {
        if m[r][..f].iter().all(|c| c.is_zero()) && !m[r][f].is_zero() {
            return Err(Error::InvalidConfig("inconsistent minimal polynomial system".into()));
        }
    }
    let mut g = vec![BigInt::zero(); f + 1];
    g[f] = BigInt::one();
    for col in 0..f {
        let c = if piv_row_of_col[col] == usize::MAX {
            BigInt::zero()
        } else {
            m[piv_row_of_col[col]][f].clone()
        };
        g[col] = mod_floor(&(-c), qm);
    }
    Ok(g)
}

/// Wire form: context header plus decimal coefficient strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QAdicWire {
    pub ctx: QAdicCtxWire,
    pub coeffs: Vec<String>,
    #[serde(default, skip_serializing_if = "is_zero_u32")]
    pub shift: u32,
}

fn is_zero_u32(v: &u32) -> bool {
    *v == 0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QAdicCtxWire {
    pub p: u32,
    pub q: u32,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "M")]
    pub m: u32,
}

impl FieldCtx {
    pub fn to_wire(&self, a: &QAdicNum) -> QAdicWire {
        QAdicWire {
            ctx: QAdicCtxWire { p: self.p, q: self.q, n: self.n, m: self.m },
            coeffs: a.coeffs.iter().map(|c| c.to_string()).collect(),
            shift: a.shift,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::CycloNum;
    use num::rational::BigRational;

    fn cfg(p: u32, q: u32, m: u32, lvl: u32) -> Config {
        Config::new(p, q, m, lvl).unwrap()
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn setup_certificates_hold() {
        for (p, q, n) in [
            (2u32, 5u32, 0u32),
            (2, 5, 1),
            (2, 5, 2),
            (2, 5, 3),
            (2, 5, 4),
            (2, 7, 3),
            (3, 5, 1),
            (3, 5, 2),
            (3, 7, 2),
        ] {
            let ctx = FieldCtx::setup(&cfg(p, q, 16, 8), n).unwrap();
            ctx.verify().unwrap_or_else(|e| panic!("p={p} q={q} n={n}: {e}"));
        }
    }

    #[test]
    fn known_small_fields() {
        // p=2, q=5, N=1: zeta_2 = -1, g = x + 1
        let ctx = FieldCtx::setup(&cfg(2, 5, 6, 4), 1).unwrap();
        assert_eq!(ctx.degree(), 1);
        assert_eq!(ctx.minpoly()[0], BigInt::one());
        // p=2, q=5, N=2: f=1, the scan picks the Hensel lift of 2
        let ctx = FieldCtx::setup(&cfg(2, 5, 6, 4), 2).unwrap();
        assert_eq!(ctx.degree(), 1);
        let root = mod_floor(&(-ctx.minpoly()[0].clone()), &BigInt::from(5u32).pow(6));
        assert_eq!(&root % BigInt::from(5), BigInt::from(2));
        // that root squares to -1 mod 5^6
        let q6 = BigInt::from(5u32).pow(6);
        assert_eq!(mod_floor(&(&root * &root + 1), &q6), BigInt::zero());
        // p=3, q=5, N=1: f=2 and g = Phi_3 = x^2 + x + 1
        let ctx = FieldCtx::setup(&cfg(3, 5, 6, 4), 1).unwrap();
        assert_eq!(ctx.degree(), 2);
        let q6 = BigInt::from(5u32).pow(6);
        assert_eq!(ctx.minpoly()[0], BigInt::one());
        assert_eq!(ctx.minpoly()[1], BigInt::one());
        assert_eq!(mod_floor(&ctx.minpoly()[2], &q6), BigInt::one());
    }

    #[test]
    fn from_exact_examples() {
        let ctx = FieldCtx::setup(&cfg(2, 5, 3, 4), 2).unwrap();
        // 1/4 -> 94 mod 125
        let a = CycloNum::from_ratio(2, ratio(1, 4));
        let x = ctx.from_exact(&a).unwrap();
        assert_eq!(x.coeffs()[0], BigInt::from(94));
        // zeta_2 -> -1
        let z2 = CycloNum::root(2, 1, 1);
        let x = ctx.from_exact(&z2).unwrap();
        assert_eq!(x.coeffs()[0], BigInt::from(124));
    }

    #[test]
    fn inversion_examples() {
        let ctx = FieldCtx::setup(&cfg(2, 5, 2, 4), 1).unwrap();
        let three = ctx.from_int(3);
        let inv = ctx.inv(&three).unwrap();
        assert_eq!(inv.coeffs()[0], BigInt::from(17)); // 3 * 17 = 51 = 1 mod 25
        let x = ctx.from_int(7);
        assert!(ctx.eq_to_prec(&ctx.mul(&x, &ctx.inv(&x).unwrap()), &ctx.one()));
        // additive inverse collapses to zero-at-precision
        let s = ctx.add(&x, &ctx.neg(&x));
        assert!(s.is_zero_to_prec());
        assert!(!s.is_exact_zero());
    }

    #[test]
    fn qval_examples() {
        let ctx = FieldCtx::setup(&cfg(2, 5, 8, 4), 2).unwrap();
        let q = ctx.from_int(5);
        assert_eq!(ctx.qval(&q), QVal::Finite(1));
        // 1 + q*zeta is a unit
        let z = ctx.root(&crate::dual::PHat::make(2, 1, 2)).unwrap();
        let one_plus = ctx.add(&ctx.one(), &ctx.mul(&q, &z));
        assert_eq!(ctx.qval(&one_plus), QVal::Finite(0));
        assert_eq!(ctx.qval(&ctx.zero()), QVal::ExactZero);
        // rationals with q in the denominator have negative valuation
        let inv_q = ctx.from_ratio(&ratio(1, 5)).unwrap();
        assert_eq!(ctx.qval(&inv_q), QVal::Finite(-1));
        let inv = ctx.inv(&q).unwrap();
        assert_eq!(ctx.qval(&inv), QVal::Finite(-1));
    }

    #[test]
    fn homomorphism_against_exact_backend() {
        // random-ish small cyclotomics at conductor p^2
        let ctx = FieldCtx::setup(&cfg(3, 5, 12, 4), 2).unwrap();
        let mut items = Vec::new();
        for j in 0..6i64 {
            let z = CycloNum::root(3, 2, j);
            items.push(z.mul_ratio(&ratio(j + 1, 2)).add(&CycloNum::from_int(3, j - 2)));
        }
        for a in &items {
            for b in &items {
                let xa = ctx.from_exact(a).unwrap();
                let xb = ctx.from_exact(b).unwrap();
                let sum = ctx.from_exact(&a.add(b)).unwrap();
                let prod = ctx.from_exact(&a.mul(b)).unwrap();
                assert!(ctx.eq_to_prec(&ctx.add(&xa, &xb), &sum));
                assert!(ctx.eq_to_prec(&ctx.mul(&xa, &xb), &prod));
            }
        }
    }

    #[test]
    fn ultrametric_valuations() {
        let ctx = FieldCtx::setup(&cfg(2, 5, 10, 4), 3).unwrap();
        let vals = [
            ctx.from_int(3),
            ctx.from_int(10),
            ctx.from_int(50),
            ctx.from_ratio(&ratio(7, 5)).unwrap(),
            ctx.root(&crate::dual::PHat::make(2, 3, 3)).unwrap(),
        ];
        let vof = |x: &QAdicNum| match ctx.qval(x) {
            QVal::Finite(v) => v,
            _ => i64::MAX,
        };
        for a in &vals {
            for b in &vals {
                let s = ctx.add(a, b);
                let (va, vb, vs) = (vof(a), vof(b), vof(&s));
                assert!(vs >= va.min(vb));
                if va != vb {
                    assert_eq!(vs, va.min(vb));
                }
            }
        }
    }

    #[test]
    fn zeta_has_exact_order() {
        let ctx = FieldCtx::setup(&cfg(2, 5, 8, 8), 4).unwrap();
        let z = ctx.root(&crate::dual::PHat::make(2, 1, 4)).unwrap();
        let mut acc = ctx.one();
        for _ in 0..16 {
            acc = ctx.mul(&acc, &z);
        }
        assert!(ctx.eq_to_prec(&acc, &ctx.one()));
        let mut acc = ctx.one();
        for _ in 0..8 {
            acc = ctx.mul(&acc, &z);
        }
        assert!(!ctx.eq_to_prec(&acc, &ctx.one()));
    }
}
