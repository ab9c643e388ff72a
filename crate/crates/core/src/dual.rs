//! The Pontryagin dual of `Z_p`, realized as `Z[1/p]/Z`: reduced p-power
//! fractions `k/p^n` in `[0,1)` under addition mod 1.

use serde::{Deserialize, Serialize};

use crate::base::ZpPoint;
use crate::error::{Error, Result};

/// A reduced p-power fraction `k/p^n` in `[0,1)`. The zero element is
/// `(k=0, n=0)`; for `n > 0`, `gcd(k, p) = 1`. Reduced form is unique, so
/// equality is structural. The prime is carried along to make cross-prime
/// arithmetic a loud failure instead of a silent one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PHat {
    p: u32,
    /// Denominator exponent; `|t|_p = p^n` for nonzero t.
    n: u32,
    k: u64,
}

impl PHat {
    /// Canonical reduced representative of `k/p^n` mod 1.
    pub fn make(p: u32, k: i128, n: u32) -> PHat {
        let pn = (u128::from(p)).checked_pow(n).expect("p^n overflows");
        let mut k = k.rem_euclid(pn as i128) as u128;
        let mut n = n;
        while n > 0 && k % u128::from(p) == 0 {
            k /= u128::from(p);
            n -= 1;
        }
        if k == 0 {
            n = 0;
        }
        PHat { p, n, k: k as u64 }
    }

    pub fn zero(p: u32) -> PHat {
        PHat { p, n: 0, k: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.n == 0 && self.k == 0
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn numer(&self) -> u64 {
        self.k
    }

    /// Denominator exponent `n` of the reduced form; equals `-v_p(t)` for
    /// nonzero t and 0 for t = 0.
    pub fn denom_exp(&self) -> u32 {
        self.n
    }

    /// `|t|_p` as an integer: `p^n` for nonzero t, and 0 for t = 0
    /// (the valuation of 0 being infinite).
    pub fn abs_p(&self) -> u64 {
        if self.is_zero() {
            0
        } else {
            u64::from(self.p).checked_pow(self.n).expect("p^n overflows")
        }
    }

    pub fn add(&self, rhs: &PHat) -> PHat {
        assert_eq!(self.p, rhs.p, "cross-prime dual arithmetic");
        let n = self.n.max(rhs.n);
        let a = u128::from(self.k) * u128::from(self.p).pow(n - self.n);
        let b = u128::from(rhs.k) * u128::from(self.p).pow(n - rhs.n);
        PHat::make(self.p, (a + b) as i128, n)
    }

    pub fn neg(&self) -> PHat {
        if self.is_zero() {
            *self
        } else {
            let pn = u128::from(self.p).pow(self.n);
            PHat::make(self.p, (pn - u128::from(self.k)) as i128, self.n)
        }
    }

    pub fn sub(&self, rhs: &PHat) -> PHat {
        self.add(&rhs.neg())
    }

    /// Multiply by an integer scalar (mod 1).
    pub fn smul(&self, m: u64) -> PHat {
        PHat::make(self.p, (u128::from(self.k) * u128::from(m)) as i128, self.n)
    }

    /// `{t z}_p` for a point z of `Z_p`: only `z mod p^n` matters.
    pub fn frac_mul(&self, z: &ZpPoint) -> PHat {
        let zr = z.truncate(self.p, self.n);
        self.smul(zr)
    }
}

/// The ball `{t : |t|_p <= p^N}`, enumerated as `k/p^N` for `k = 0..p^N-1`.
/// This order is the paper's partial-sum convention; every windowed norm and
/// partial sum iterates in it.
pub fn enumerate_ball(p: u32, n: u32) -> Vec<PHat> {
    let pn = u64::from(p).checked_pow(n).expect("p^N overflows");
    (0..pn).map(|k| PHat::make(p, k as i128, n)).collect()
}

/// Ball index of t inside `enumerate_ball(p, N)`: the numerator of t scaled
/// to denominator `p^N`. Panics if `|t|_p > p^N`.
pub fn ball_index(t: &PHat, n: u32) -> usize {
    assert!(t.denom_exp() <= n, "point outside ball");
    let scale = u64::from(t.p()).pow(n - t.denom_exp());
    (t.numer() * scale) as usize
}

impl std::fmt::Display for PHat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.k, self.abs_p())
        }
    }
}

/// Wire form of a dual-group element: `{"k":3,"n":3}`. The prime is implied
/// by the session.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PHatWire {
    pub k: u64,
    pub n: u32,
}

impl PHat {
    pub fn to_wire(&self) -> PHatWire {
        PHatWire { k: self.k, n: self.n }
    }

    pub fn from_wire(p: u32, w: &PHatWire) -> PHat {
        PHat::make(p, w.k as i128, w.n)
    }
}

/// Parse the textual form `k/p^n` with the denominator written out
/// (`"3/8"`), or `"0"`.
pub fn parse_phat(s: &str, p: u32) -> Result<PHat> {
    let s = s.trim();
    if s == "0" {
        return Ok(PHat::zero(p));
    }
    let (ks, ds) = s
        .split_once('/')
        .ok_or_else(|| Error::Parse(format!("expected k/denominator, got '{s}'")))?;
    let k: u64 = ks.parse().map_err(|_| Error::Parse(format!("bad numerator '{ks}'")))?;
    let d: u64 = ds.parse().map_err(|_| Error::Parse(format!("bad denominator '{ds}'")))?;
    let mut n = 0u32;
    let mut m = d;
    while m > 1 {
        if m % u64::from(p) != 0 {
            return Err(Error::Parse(format!("denominator {d} is not a power of {p}")));
        }
        m /= u64::from(p);
        n += 1;
    }
    if d == 0 {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(PHat::make(p, k as i128, n))
}
