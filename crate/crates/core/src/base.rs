//! Session configuration, points of `Z_p`, and digit utilities.
//!
//! Points of `Z_p` are restricted to eventually periodic digit streams, i.e.
//! `Z_p ∩ Q`. That covers every evaluation point the library needs (all of
//! `N_0`, plus points like `-1` whose digits are all ones) while keeping every
//! computation exact.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deterministic primality check by trial division. Inputs are desk-scale
/// primes, so nothing faster is warranted.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Global session parameters: the two distinct primes, the absolute q-adic
/// working precision, and the largest supported conductor exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Config {
    pub p: u32,
    pub q: u32,
    /// Work modulo `q^precision` on the numeric side.
    pub precision: u32,
    /// Largest `p^N` conductor supported in one session.
    pub max_level: u32,
}

impl Config {
    pub fn new(p: u32, q: u32, precision: u32, max_level: u32) -> Result<Config> {
        if !is_prime(p) {
            return Err(Error::InvalidConfig(format!("p = {p} is not prime")));
        }
        if !is_prime(q) {
            return Err(Error::InvalidConfig(format!("q = {q} is not prime")));
        }
        if p == q {
            return Err(Error::InvalidConfig(format!("p and q must be distinct (both {p})")));
        }
        if precision == 0 {
            return Err(Error::InvalidConfig("precision must be >= 1".into()));
        }
        if max_level == 0 {
            return Err(Error::InvalidConfig("max_level must be >= 1".into()));
        }
        Ok(Config { p, q, precision, max_level })
    }
}

/// A point of `Z_p` with eventually periodic base-p digits, least significant
/// digit first. Canonical form is enforced on construction so equality is
/// structural: the period is primitive, no preperiod suffix can be rotated
/// into the period, and an all-zero period collapses to `Nat`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
#[serde(try_from = "ZpWire")]
pub enum ZpPoint {
    Nat { value: u64 },
    Periodic { pre: Vec<u8>, period: Vec<u8> },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ZpWire {
    Nat { value: u64 },
    Periodic { pre: Vec<u8>, period: Vec<u8> },
}

impl TryFrom<ZpWire> for ZpPoint {
    type Error = Error;
    fn try_from(w: ZpWire) -> Result<ZpPoint> {
        match w {
            ZpWire::Nat { value } => Ok(ZpPoint::nat(value)),
            ZpWire::Periodic { pre, period } => {
                if period.is_empty() {
                    return Err(Error::Parse("period must be nonempty".into()));
                }
                match canonicalize_parts(pre, period) {
                    (_, None) => Err(Error::Parse(
                        "all-zero period denotes a natural number; use the nat form".into(),
                    )),
                    (pre, Some(period)) => Ok(ZpPoint::Periodic { pre, period }),
                }
            }
        }
    }
}

impl ZpPoint {
    pub fn nat(value: u64) -> ZpPoint {
        ZpPoint::Nat { value }
    }

    /// Canonicalizing constructor for a genuinely periodic point (one not in
    /// `N_0`). Panics if `period` is empty or reduces to all zeros; digit
    /// streams of natural numbers go through [`periodic_in_base`].
    pub fn periodic(pre: Vec<u8>, period: Vec<u8>) -> ZpPoint {
        assert!(!period.is_empty(), "period must be nonempty");
        match canonicalize_parts(pre, period) {
            (_, None) => panic!("all-zero period: use periodic_in_base with the session prime"),
            (pre, Some(period)) => ZpPoint::Periodic { pre, period },
        }
    }

    /// The point `-m` of `Z_p`. `-0` is `0`.
    pub fn neg_nat(m: u64, p: u32) -> ZpPoint {
        if m == 0 {
            return ZpPoint::nat(0);
        }
        // -m = (p^k - m) + p^k * (-1), and -1 has constant digit p-1.
        let mut k = 0u32;
        let mut pk = BigInt::one();
        let big_m = BigInt::from(m);
        while pk <= big_m {
            pk *= p;
            k += 1;
        }
        let mut rem = &pk - &big_m;
        let mut pre = Vec::with_capacity(k as usize);
        for _ in 0..k {
            let r = (&rem % p).to_u64_digits().1.first().copied().unwrap_or(0);
            pre.push(r as u8);
            rem /= p;
        }
        ZpPoint::periodic(pre, vec![(p - 1) as u8])
    }

    /// Validate that every digit is `< p`. `Nat` values are digit-free.
    pub fn validate_digits(&self, p: u32) -> Result<()> {
        if let ZpPoint::Periodic { pre, period } = self {
            for &d in pre.iter().chain(period.iter()) {
                if u32::from(d) >= p {
                    return Err(Error::Parse(format!("digit {d} out of range for p = {p}")));
                }
            }
        }
        Ok(())
    }

    fn digit(&self, p: u32, j: usize) -> u64 {
        match self {
            ZpPoint::Nat { value } => {
                let mut v = *value;
                for _ in 0..j {
                    v /= u64::from(p);
                }
                v % u64::from(p)
            }
            ZpPoint::Periodic { pre, period } => {
                if j < pre.len() {
                    u64::from(pre[j])
                } else {
                    u64::from(period[(j - pre.len()) % period.len()])
                }
            }
        }
    }

    /// `[z]_{p^N}`: the unique integer in `{0, ..., p^N - 1}` congruent to
    /// the point mod `p^N` (its first `N` digits).
    pub fn truncate(&self, p: u32, n: u32) -> u64 {
        let mut acc: u128 = 0;
        let mut pw: u128 = 1;
        for j in 0..n as usize {
            acc += u128::from(self.digit(p, j)) * pw;
            if j + 1 < n as usize {
                pw = pw.checked_mul(u128::from(p)).expect("p^N overflows");
            }
        }
        u64::try_from(acc).expect("truncation exceeds u64")
    }

    /// The rational number this point represents (denominator coprime to p).
    pub fn as_rational(&self, p: u32) -> BigRational {
        match self {
            ZpPoint::Nat { value } => BigRational::from(BigInt::from(*value)),
            ZpPoint::Periodic { pre, period } => {
                let bp = BigInt::from(p);
                let mut head = BigInt::zero();
                let mut pw = BigInt::one();
                for &d in pre {
                    head += BigInt::from(d) * &pw;
                    pw *= &bp;
                }
                // pw = p^{|pre|}
                let mut w = BigInt::zero();
                let mut pj = BigInt::one();
                for &d in period {
                    w += BigInt::from(d) * &pj;
                    pj *= &bp;
                }
                // pj = p^L; tail value = w / (1 - p^L)
                let tail = BigRational::new(&pw * w, BigInt::one() - pj);
                BigRational::from(head) + tail
            }
        }
    }

    pub fn is_nat(&self) -> bool {
        matches!(self, ZpPoint::Nat { .. })
    }

    /// Preperiod and period digit words, with `Nat` expanded in base p.
    /// The period of a natural number is `[0]`.
    pub fn digit_parts(&self, p: u32) -> (Vec<u8>, Vec<u8>) {
        match self {
            ZpPoint::Nat { value } => {
                let mut pre = Vec::new();
                let mut v = *value;
                while v > 0 {
                    pre.push((v % u64::from(p)) as u8);
                    v /= u64::from(p);
                }
                (pre, vec![0])
            }
            ZpPoint::Periodic { pre, period } => (pre.clone(), period.clone()),
        }
    }
}

/// Base-aware canonicalizing constructor: an all-zero period collapses to the
/// equal `Nat` point, whose value needs the session prime.
pub fn periodic_in_base(p: u32, pre: Vec<u8>, period: Vec<u8>) -> ZpPoint {
    assert!(!period.is_empty(), "period must be nonempty");
    match canonicalize_parts(pre, period) {
        (pre, None) => {
            let mut value: u128 = 0;
            let mut pw: u128 = 1;
            for &d in &pre {
                value += u128::from(d) * pw;
                pw *= u128::from(p);
            }
            ZpPoint::Nat { value: u64::try_from(value).expect("value exceeds u64") }
        }
        (pre, Some(period)) => ZpPoint::Periodic { pre, period },
    }
}

/// Reduce to primitive period, rotate mergeable preperiod suffixes into the
/// period, and report an all-zero period as `None`.
fn canonicalize_parts(mut pre: Vec<u8>, mut period: Vec<u8>) -> (Vec<u8>, Option<Vec<u8>>) {
    let len = period.len();
    for d in 1..=len {
        if len % d == 0 && (0..len).all(|i| period[i] == period[i % d]) {
            period.truncate(d);
            break;
        }
    }
    while let Some(&last) = pre.last() {
        if last == *period.last().expect("nonempty") {
            pre.pop();
            period.rotate_right(1);
        } else {
            break;
        }
    }
    if period == [0] {
        while pre.last() == Some(&0) {
            pre.pop();
        }
        (pre, None)
    } else {
        (pre, Some(period))
    }
}

/// `#_1(n)`: the number of ones in the binary digits of `n`.
pub fn ones_count(n: u64) -> u32 {
    n.count_ones()
}

/// Base-p digit sum; `digit_sum(n, 2) == ones_count(n)`.
pub fn digit_sum(mut n: u64, p: u32) -> u64 {
    let mut s = 0;
    while n > 0 {
        s += n % u64::from(p);
        n /= u64::from(p);
    }
    s
}

/// `lambda_2(m) = ceil(log2(m + 1))`: the number of binary digits of `m`,
/// with `bit_length(0) = 0`.
pub fn bit_length(m: u64) -> u32 {
    64 - m.leading_zeros()
}

impl std::fmt::Display for ZpPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ZpPoint::Nat { value } => write!(f, "{value}"),
            ZpPoint::Periodic { pre, period } => {
                for d in pre {
                    write!(f, "{d}")?;
                }
                write!(f, ":")?;
                for d in period {
                    write!(f, "{d}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parse the CLI form of a point: a decimal integer (negative allowed), or
/// `pre:period` with little-endian single-character digits (`-1` in `Z_2`
/// is `:1`).
pub fn parse_zp_point(s: &str, p: u32) -> Result<ZpPoint> {
    if let Some(idx) = s.find(':') {
        if p > 10 {
            return Err(Error::Parse("digit-string syntax requires p <= 10".into()));
        }
        let (pre_s, per_s) = s.split_at(idx);
        let per_s = &per_s[1..];
        let digits = |t: &str| -> Result<Vec<u8>> {
            t.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::Parse(format!("bad digit '{c}'")))
                })
                .collect()
        };
        let pre = digits(pre_s)?;
        let period = digits(per_s)?;
        if period.is_empty() {
            return Err(Error::Parse("period must be nonempty".into()));
        }
        for &d in pre.iter().chain(period.iter()) {
            if u32::from(d) >= p {
                return Err(Error::Parse(format!("digit {d} out of range for p = {p}")));
            }
        }
        Ok(periodic_in_base(p, pre, period))
    } else if let Some(rest) = s.strip_prefix('-') {
        let m: u64 = rest.parse().map_err(|_| Error::Parse(format!("bad integer '{s}'")))?;
        Ok(ZpPoint::neg_nat(m, p))
    } else {
        let m: u64 = s.parse().map_err(|_| Error::Parse(format!("bad integer '{s}'")))?;
        Ok(ZpPoint::nat(m))
    }
}

/// Reduce a rational with p-coprime denominator modulo `p^n`, as a
/// nonnegative integer below `p^n`. The independent oracle for digit-based
/// truncation.
pub fn rational_mod_pn(r: &BigRational, p: u32, n: u32) -> BigInt {
    let modulus = BigInt::from(p).pow(n);
    let num = mod_floor(r.numer(), &modulus);
    let den = mod_floor(r.denom(), &modulus);
    let inv = mod_inverse(&den, &modulus).expect("denominator coprime to p");
    mod_floor(&(num * inv), &modulus)
}

pub(crate) fn mod_floor(a: &BigInt, m: &BigInt) -> BigInt {
    let r = a % m;
    if r.is_negative() {
        r + m
    } else {
        r
    }
}

/// Modular inverse via extended Euclid; `None` when not coprime.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let (mut r0, mut r1) = (m.clone(), mod_floor(a, m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_one() {
        Some(mod_floor(&t0, m))
    } else {
        None
    }
}
