//! Exact arithmetic in the prime-power cyclotomic fields `Q(zeta_{p^N})`.
//!
//! Elements are stored as polynomials in `zeta_{p^N}` reduced modulo the
//! cyclotomic polynomial `Phi_{p^N}(x) = sum_{i<p} x^{i p^{N-1}}`, at the
//! smallest conductor containing them. Reduced form at minimal conductor is
//! unique, so equality is structural. Roots of unity at different conductors
//! cohere: `zeta_{p^n} = zeta_{p^m}^{p^{m-n}}` for `m >= n`, which is exactly
//! the compatibility the product-of-p-copies convention demands.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type Q = BigRational;

/// `phi(p^n)`: degree of the conductor-`p^n` cyclotomic field.
pub fn phi_pn(p: u32, n: u32) -> usize {
    if n == 0 {
        1
    } else {
        (p as usize - 1) * (p as usize).pow(n - 1)
    }
}

/// An exact element of `Q(zeta_{p^n})` in reduced form at minimal conductor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloNum {
    p: u32,
    n: u32,
    coeffs: Vec<Q>,
}

impl CycloNum {
    pub fn from_ratio(p: u32, r: Q) -> CycloNum {
        CycloNum { p, n: 0, coeffs: vec![r] }
    }

    pub fn from_int(p: u32, v: i64) -> CycloNum {
        CycloNum::from_ratio(p, Q::from(BigInt::from(v)))
    }

    pub fn zero(p: u32) -> CycloNum {
        CycloNum::from_int(p, 0)
    }

    pub fn one(p: u32) -> CycloNum {
        CycloNum::from_int(p, 1)
    }

    /// `zeta_{p^n}^j`, reduced and demoted to its minimal conductor.
    pub fn root(p: u32, n: u32, j: i64) -> CycloNum {
        let pn = i128::from(p).checked_pow(n).expect("conductor overflows") as i64;
        let e = j.rem_euclid(pn) as usize;
        let mut raw = vec![Q::zero(); e + 1];
        raw[e] = Q::one();
        let coeffs = reduce_mod_phi(p, n, raw);
        demote(CycloNum { p, n, coeffs })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Minimal conductor exponent of this element.
    pub fn conductor_exp(&self) -> u32 {
        self.n
    }

    /// Coefficients in the power basis at the element's own conductor.
    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.n == 0 && self.coeffs[0].is_zero()
    }

    /// The rational value, if the element lies in Q.
    pub fn as_rational(&self) -> Option<Q> {
        if self.n == 0 {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Re-express at conductor `m >= n` via the coherent embedding.
    pub fn lift_to(&self, m: u32) -> CycloNum {
        assert!(m >= self.n, "lift target below conductor");
        if m == self.n {
            return self.clone();
        }
        let stride = (self.p as usize).pow(m - self.n);
        let mut raw = vec![Q::zero(); (self.coeffs.len() - 1) * stride + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                raw[i * stride] = c.clone();
            }
        }
        let coeffs = reduce_mod_phi(self.p, m, raw);
        CycloNum { p: self.p, n: m, coeffs }
    }

    pub fn add(&self, rhs: &CycloNum) -> CycloNum {
        assert_eq!(self.p, rhs.p, "cross-prime cyclotomic arithmetic");
        let n = self.n.max(rhs.n);
        let a = self.lift_to(n);
        let b = rhs.lift_to(n);
        let coeffs = a
            .coeffs
            .iter()
            .zip(b.coeffs.iter())
            .map(|(x, y)| x + y)
            .collect();
        demote(CycloNum { p: self.p, n, coeffs })
    }

    pub fn neg(&self) -> CycloNum {
        CycloNum {
            p: self.p,
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, rhs: &CycloNum) -> CycloNum {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &CycloNum) -> CycloNum {
        assert_eq!(self.p, rhs.p, "cross-prime cyclotomic arithmetic");
        let n = self.n.max(rhs.n);
        let a = self.lift_to(n);
        let b = rhs.lift_to(n);
        if n == 0 {
            return CycloNum::from_ratio(self.p, &a.coeffs[0] * &b.coeffs[0]);
        }
        // monomial fast path: character sums multiply by roots of unity
        let raw = match (single_term(&a.coeffs), single_term(&b.coeffs)) {
            (Some((i, ci)), _) => shifted_scaled(&b.coeffs, i, &ci),
            (_, Some((j, cj))) => shifted_scaled(&a.coeffs, j, &cj),
            _ => {
                let mut out = vec![Q::zero(); a.coeffs.len() + b.coeffs.len() - 1];
                for (i, x) in a.coeffs.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in b.coeffs.iter().enumerate() {
                        if !y.is_zero() {
                            out[i + j] += x * y;
                        }
                    }
                }
                out
            }
        };
        let coeffs = reduce_mod_phi(self.p, n, raw);
        demote(CycloNum { p: self.p, n, coeffs })
    }

    pub fn mul_ratio(&self, r: &Q) -> CycloNum {
        if r.is_zero() {
            return CycloNum::zero(self.p);
        }
        CycloNum {
            p: self.p,
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Exact multiplicative inverse, via extended Euclid against the
    /// cyclotomic polynomial.
    pub fn inv(&self) -> Result<CycloNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.n == 0 {
            return Ok(CycloNum::from_ratio(self.p, self.coeffs[0].recip()));
        }
        let modulus = phi_poly(self.p, self.n);
        let u = poly_inverse_mod(&self.coeffs, &modulus);
        let coeffs = reduce_mod_phi(self.p, self.n, u);
        Ok(demote(CycloNum { p: self.p, n: self.n, coeffs }))
    }

    pub fn pow(&self, mut e: u64) -> CycloNum {
        let mut base = self.clone();
        let mut acc = CycloNum::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

fn single_term(coeffs: &[Q]) -> Option<(usize, Q)> {
    let mut found = None;
    for (i, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            if found.is_some() {
                return None;
            }
            found = Some((i, c.clone()));
        }
    }
    found
}

fn shifted_scaled(coeffs: &[Q], shift: usize, scale: &Q) -> Vec<Q> {
    let mut out = vec![Q::zero(); coeffs.len() + shift];
    for (j, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            out[j + shift] = c * scale;
        }
    }
    out
}

/// `Phi_{p^n}` as a dense coefficient vector (n >= 1).
fn phi_poly(p: u32, n: u32) -> Vec<Q> {
    let step = (p as usize).pow(n - 1);
    let deg = (p as usize - 1) * step;
    let mut v = vec![Q::zero(); deg + 1];
    for i in 0..p as usize {
        v[i * step] = Q::one();
    }
    v
}

/// Reduce a dense polynomial in `zeta_{p^n}` to degree `< phi(p^n)`,
/// using `x^{p^n} = 1` and then the Phi relation
/// `x^{(p-1) p^{n-1} + r} = -sum_{j<p-1} x^{j p^{n-1} + r}`.
fn reduce_mod_phi(p: u32, n: u32, mut raw: Vec<Q>) -> Vec<Q> {
    let phi = phi_pn(p, n);
    if n == 0 {
        let mut c = Q::zero();
        for v in raw {
            c += v;
        }
        return vec![c];
    }
    let pn = (p as usize).pow(n);
    if raw.len() > pn {
        for e in pn..raw.len() {
            if !raw[e].is_zero() {
                let c = std::mem::replace(&mut raw[e], Q::zero());
                raw[e % pn] += c;
            }
        }
        raw.truncate(pn);
    }
    if raw.len() > phi {
        let step = (p as usize).pow(n - 1);
        for e in (phi..raw.len()).rev() {
            if raw[e].is_zero() {
                continue;
            }
            let c = std::mem::replace(&mut raw[e], Q::zero());
            let r = e - phi;
            for j in 0..(p as usize - 1) {
                raw[j * step + r] -= &c;
            }
        }
        raw.truncate(phi);
    }
    raw.resize(phi, Q::zero());
    raw
}

/// Drop to the minimal conductor: an element of `Q(zeta_{p^n})` lies in
/// `Q(zeta_{p^{n-1}})` iff only exponents divisible by p carry nonzero
/// coefficients (for n >= 2), and in Q iff it is constant (n = 1).
fn demote(mut a: CycloNum) -> CycloNum {
    loop {
        if a.n == 0 {
            return a;
        }
        if a.n == 1 {
            if a.coeffs[1..].iter().all(|c| c.is_zero()) {
                return CycloNum { p: a.p, n: 0, coeffs: vec![a.coeffs[0].clone()] };
            }
            return a;
        }
        let p = a.p as usize;
        if a.coeffs.iter().enumerate().any(|(i, c)| i % p != 0 && !c.is_zero()) {
            return a;
        }
        let lower = phi_pn(a.p, a.n - 1);
        let coeffs = (0..lower).map(|j| a.coeffs[j * p].clone()).collect();
        a = CycloNum { p: a.p, n: a.n - 1, coeffs };
    }
}

fn poly_deg(v: &[Q]) -> Option<usize> {
    v.iter().rposition(|c| !c.is_zero())
}

fn poly_divmod(num: &[Q], den: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let dd = poly_deg(den).expect("division by zero polynomial");
    let lead = den[dd].clone();
    let mut rem = num.to_vec();
    let mut quo = vec![Q::zero(); num.len().saturating_sub(dd)];
    while let Some(dr) = poly_deg(&rem) {
        if dr < dd {
            break;
        }
        let f = &rem[dr] / &lead;
        let shift = dr - dd;
        for i in 0..=dd {
            let t = &den[i] * &f;
            rem[i + shift] -= t;
        }
        rem[dr] = Q::zero(); // guard against rational round-off: exact, but be tidy
        quo[shift] = f;
    }
    (quo, rem)
}

/// Inverse of `a` modulo `m` in `Q[x]`, assuming `gcd(a, m) = 1` (true for
/// any nonzero element against an irreducible modulus).
fn poly_inverse_mod(a: &[Q], m: &[Q]) -> Vec<Q> {
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    let mut t0: Vec<Q> = vec![Q::zero()];
    let mut t1: Vec<Q> = vec![Q::one()];
    while poly_deg(&r1).is_some() {
        let (q, r2) = poly_divmod(&r0, &r1);
        r0 = std::mem::replace(&mut r1, r2);
        let qt = poly_mul(&q, &t1);
        let t2 = poly_sub(&t0, &qt);
        t0 = std::mem::replace(&mut t1, t2);
    }
    // r0 is the constant gcd
    let c = r0[poly_deg(&r0).expect("zero gcd: element not invertible")].clone();
    t0.iter().map(|t| t / &c).collect()
}

fn poly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn poly_sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    out
}

/// Render a rational without whitespace, `num/den` or plain integer.
pub fn ratio_string(r: &Q) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_ratio(s: &str) -> Result<Q> {
    let s = s.trim();
    let parse_int =
        |t: &str| -> Result<BigInt> { t.parse().map_err(|_| Error::Parse(format!("bad rational '{s}'"))) };
    if let Some((n, d)) = s.split_once('/') {
        let den = parse_int(d)?;
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Q::new(parse_int(n)?, den))
    } else {
        Ok(Q::from(parse_int(s)?))
    }
}

/// Wire form `{"N":n,"coeffs":["a/b",...]}`; the prime is implied by the
/// session.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycloWire {
    #[serde(rename = "N")]
    pub n: u32,
    pub coeffs: Vec<String>,
}

impl CycloNum {
    pub fn to_wire(&self) -> CycloWire {
        CycloWire {
            n: self.n,
            coeffs: self.coeffs.iter().map(ratio_string).collect(),
        }
    }

    pub fn from_wire(p: u32, w: &CycloWire) -> Result<CycloNum> {
        let expected = phi_pn(p, w.n);
        if w.coeffs.len() != expected {
            return Err(Error::Parse(format!(
                "conductor exponent {} needs {} coefficients, got {}",
                w.n,
                expected,
                w.coeffs.len()
            )));
        }
        let coeffs = w.coeffs.iter().map(|s| parse_ratio(s)).collect::<Result<Vec<_>>>()?;
        Ok(demote(CycloNum { p, n: w.n, coeffs }))
    }
}

impl std::fmt::Display for CycloNum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{}", ratio_string(&r));
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "{}", ratio_string(c))?;
            } else {
                write!(f, "({})*z{}^{}", ratio_string(c), self.p.pow(self.n), i)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn coherence_forces_minus_one() {
        // the unique primitive square root of unity
        assert_eq!(CycloNum::root(2, 1, 1), CycloNum::from_int(2, -1));
        assert_eq!(CycloNum::root(5, 3, 0), CycloNum::one(5));
        // (zeta_4)^2 = zeta_2 by coherence
        let i4 = CycloNum::root(2, 2, 1);
        assert_eq!(i4.mul(&i4), CycloNum::from_int(2, -1));
        assert_eq!(CycloNum::root(2, 2, 2), CycloNum::from_int(2, -1));
    }

    #[test]
    fn arithmetic_examples() {
        let m1 = CycloNum::from_int(2, -1);
        assert_eq!(m1.mul(&m1), CycloNum::one(2));
        let i4 = CycloNum::root(2, 2, 1);
        let i4_cubed = CycloNum::root(2, 2, 3);
        // brute force: zeta_4 * zeta_4^3 reduces to 1
        assert_eq!(i4.inv().unwrap(), i4_cubed);
        assert_eq!(i4.mul(&i4_cubed), CycloNum::one(2));
        // Phi_4 = x^2 + 1 forces zeta_4^3 = -zeta_4
        assert_eq!(i4.add(&i4_cubed), CycloNum::zero(2));
    }

    #[test]
    fn rationality_detection() {
        assert_eq!(CycloNum::one(2).as_rational(), Some(Q::one()));
        assert_eq!(CycloNum::root(2, 2, 1).as_rational(), None);
        let z = CycloNum::root(2, 2, 1);
        assert_eq!(z.add(&z.neg()).as_rational(), Some(Q::zero()));
    }

    #[test]
    fn exact_multiplicative_order() {
        for p in [2u32, 3] {
            for n in 1..=3u32 {
                let z = CycloNum::root(p, n, 1);
                let pn = u64::from(p).pow(n);
                assert_eq!(z.pow(pn), CycloNum::one(p), "p={p} n={n}");
                assert_ne!(z.pow(pn / u64::from(p)), CycloNum::one(p), "p={p} n={n}");
            }
        }
    }

    #[test]
    fn full_coset_sums() {
        // sum over j of zeta^{jm} is p^n when p^n | m, else 0
        for p in [2u32, 3] {
            for n in 1..=3u32 {
                let pn = u64::from(p).pow(n);
                for m in 0..(2 * pn) {
                    let mut s = CycloNum::zero(p);
                    for j in 0..pn {
                        s = s.add(&CycloNum::root(p, n, (j * m % pn) as i64));
                    }
                    let expected = if m % pn == 0 {
                        CycloNum::from_int(p, pn as i64)
                    } else {
                        CycloNum::zero(p)
                    };
                    assert_eq!(s, expected, "p={p} n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn demote_round_trips_through_lift() {
        let a = CycloNum::root(3, 2, 1).add(&CycloNum::from_int(3, 2));
        let lifted = a.lift_to(3);
        // arithmetic at the higher conductor returns to the minimal one
        let back = lifted.add(&CycloNum::zero(3));
        assert_eq!(back, a);
        assert_eq!(back.conductor_exp(), 2);
    }

    fn arb_cyclo(p: u32, max_n: u32) -> impl Strategy<Value = CycloNum> {
        let dim = phi_pn(p, max_n);
        (
            0..=max_n,
            prop::collection::vec((-4i64..=4, 1i64..=3), dim),
        )
            .prop_map(move |(n, raw)| {
                let len = phi_pn(p, n);
                let coeffs: Vec<Q> = raw[..len].iter().map(|&(a, b)| q(a, b)).collect();
                demote(CycloNum { p, n, coeffs })
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

        #[test]
        fn field_axioms_p3(a in arb_cyclo(3, 2), b in arb_cyclo(3, 2), c in arb_cyclo(3, 2)) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            if !a.is_zero() {
                prop_assert_eq!(a.mul(&a.inv().unwrap()), CycloNum::one(3));
            }
        }

        #[test]
        fn field_axioms_p2(a in arb_cyclo(2, 3), b in arb_cyclo(2, 3)) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.sub(&a), CycloNum::zero(2));
            if !a.is_zero() {
                let inv = a.inv().unwrap();
                prop_assert_eq!(a.mul(&inv), CycloNum::one(2));
            }
        }
    }

    #[test]
    fn wire_round_trip() {
        let a = CycloNum::root(2, 3, 3).mul_ratio(&q(7, 4));
        let w = a.to_wire();
        let back = CycloNum::from_wire(2, &w).unwrap();
        assert_eq!(a, back);
        let j = serde_json::to_string(&w).unwrap();
        assert!(j.starts_with(r#"{"N":3"#));
    }
}
