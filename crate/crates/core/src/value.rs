//! One interface over the two value backends.
//!
//! The exact backend ([`ExactBackend`], values [`CycloNum`]) is authoritative
//! for equality: every identity the library checks holds on the nose there.
//! The numeric backend ([`QAdicBackend`], values [`QAdicNum`]) is
//! authoritative for size: it realizes `|.|_q` through the pinned embedding.
//! An exact backend may carry an embedding so that norms of cyclotomic
//! values can be taken without leaving exact arithmetic.

use std::sync::Arc;

use num::rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::cyclo::CycloNum;
use crate::dual::PHat;
use crate::error::{Error, Result};
use crate::qadic::{FieldCtx, QAdicNum, QVal};

/// Ring operations, characters, and valuations over one value type.
pub trait Backend: Sync {
    type Val: Clone + PartialEq + Send + Sync + std::fmt::Debug;

    fn p(&self) -> u32;
    fn zero(&self) -> Self::Val;
    fn one(&self) -> Self::Val;
    fn from_int(&self, v: i64) -> Self::Val;
    /// Embed a rational scalar. Panics only if the numeric precision cannot
    /// represent a q-power denominator, which is a configuration defect.
    fn from_ratio(&self, r: &BigRational) -> Self::Val;
    /// The root of unity `e^{2 pi i t}`.
    fn root(&self, t: &PHat) -> Self::Val;
    fn add(&self, a: &Self::Val, b: &Self::Val) -> Self::Val;
    fn sub(&self, a: &Self::Val, b: &Self::Val) -> Self::Val;
    fn mul(&self, a: &Self::Val, b: &Self::Val) -> Self::Val;
    fn neg(&self, a: &Self::Val) -> Self::Val;
    fn inv(&self, a: &Self::Val) -> Result<Self::Val>;
    /// Zero as far as this backend can tell (exactly, or to precision).
    fn is_zero(&self, a: &Self::Val) -> bool;
    /// Backend-appropriate equality: structural for exact values, equality
    /// to working precision for truncated ones.
    fn eq(&self, a: &Self::Val, b: &Self::Val) -> bool;
    /// q-adic valuation data; `Err(NoEmbedding)` on an exact backend without
    /// an attached field context.
    fn qval(&self, a: &Self::Val) -> Result<QVal>;
}

/// Exact cyclotomic backend; optionally carries the embedding used for
/// valuation queries.
#[derive(Clone)]
pub struct ExactBackend {
    p: u32,
    embedding: Option<Arc<FieldCtx>>,
}

impl ExactBackend {
    pub fn new(p: u32) -> ExactBackend {
        ExactBackend { p, embedding: None }
    }

    pub fn with_embedding(ctx: Arc<FieldCtx>) -> ExactBackend {
        ExactBackend { p: ctx.p(), embedding: Some(ctx) }
    }

    pub fn embedding(&self) -> Option<&Arc<FieldCtx>> {
        self.embedding.as_ref()
    }
}

impl Backend for ExactBackend {
    type Val = CycloNum;

    fn p(&self) -> u32 {
        self.p
    }
    fn zero(&self) -> CycloNum {
        CycloNum::zero(self.p)
    }
    fn one(&self) -> CycloNum {
        CycloNum::one(self.p)
    }
    fn from_int(&self, v: i64) -> CycloNum {
        CycloNum::from_int(self.p, v)
    }
    fn from_ratio(&self, r: &BigRational) -> CycloNum {
        CycloNum::from_ratio(self.p, r.clone())
    }
    fn root(&self, t: &PHat) -> CycloNum {
        assert_eq!(t.p(), self.p, "cross-prime character");
        CycloNum::root(self.p, t.denom_exp(), t.numer() as i64)
    }
    fn add(&self, a: &CycloNum, b: &CycloNum) -> CycloNum {
        a.add(b)
    }
    fn sub(&self, a: &CycloNum, b: &CycloNum) -> CycloNum {
        a.sub(b)
    }
    fn mul(&self, a: &CycloNum, b: &CycloNum) -> CycloNum {
        a.mul(b)
    }
    fn neg(&self, a: &CycloNum) -> CycloNum {
        a.neg()
    }
    fn inv(&self, a: &CycloNum) -> Result<CycloNum> {
        a.inv()
    }
    fn is_zero(&self, a: &CycloNum) -> bool {
        a.is_zero()
    }
    fn eq(&self, a: &CycloNum, b: &CycloNum) -> bool {
        a == b
    }
    fn qval(&self, a: &CycloNum) -> Result<QVal> {
        let ctx = self.embedding.as_ref().ok_or(Error::NoEmbedding)?;
        Ok(ctx.qval(&ctx.from_exact(a)?))
    }
}

/// Truncated q-adic backend.
#[derive(Clone)]
pub struct QAdicBackend {
    pub ctx: Arc<FieldCtx>,
}

impl QAdicBackend {
    pub fn new(ctx: Arc<FieldCtx>) -> QAdicBackend {
        QAdicBackend { ctx }
    }
}

impl Backend for QAdicBackend {
    type Val = QAdicNum;

    fn p(&self) -> u32 {
        self.ctx.p()
    }
    fn zero(&self) -> QAdicNum {
        self.ctx.zero()
    }
    fn one(&self) -> QAdicNum {
        self.ctx.one()
    }
    fn from_int(&self, v: i64) -> QAdicNum {
        self.ctx.from_int(v)
    }
    fn from_ratio(&self, r: &BigRational) -> QAdicNum {
        self.ctx.from_ratio(r).expect("rational exceeds q-adic precision")
    }
    fn root(&self, t: &PHat) -> QAdicNum {
        self.ctx.root(t).expect("character conductor exceeds field context")
    }
    fn add(&self, a: &QAdicNum, b: &QAdicNum) -> QAdicNum {
        self.ctx.add(a, b)
    }
    fn sub(&self, a: &QAdicNum, b: &QAdicNum) -> QAdicNum {
        self.ctx.sub(a, b)
    }
    fn mul(&self, a: &QAdicNum, b: &QAdicNum) -> QAdicNum {
        self.ctx.mul(a, b)
    }
    fn neg(&self, a: &QAdicNum) -> QAdicNum {
        self.ctx.neg(a)
    }
    fn inv(&self, a: &QAdicNum) -> Result<QAdicNum> {
        self.ctx.inv(a)
    }
    fn is_zero(&self, a: &QAdicNum) -> bool {
        a.is_zero_to_prec()
    }
    fn eq(&self, a: &QAdicNum, b: &QAdicNum) -> bool {
        self.ctx.eq_to_prec(a, b)
    }
    fn qval(&self, a: &QAdicNum) -> Result<QVal> {
        Ok(self.ctx.qval(a))
    }
}

/// An exactly-represented non-archimedean norm value: either 0 or a power
/// `q^{-v}` (stored through its valuation v, which may be negative).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QNorm {
    Zero,
    /// `q^{-v}` for the recorded valuation v.
    Pow(i64),
}

impl QNorm {
    pub fn from_qval(v: QVal) -> Result<QNorm> {
        match v {
            QVal::ExactZero => Ok(QNorm::Zero),
            QVal::Finite(v) => Ok(QNorm::Pow(v)),
            QVal::AtLeast(b) => Err(Error::PrecisionExhausted { available: b }),
        }
    }

    pub fn one() -> QNorm {
        QNorm::Pow(0)
    }

    /// `q^{-v}`.
    pub fn pow(v: i64) -> QNorm {
        QNorm::Pow(v)
    }

    pub fn mul(self, rhs: QNorm) -> QNorm {
        match (self, rhs) {
            (QNorm::Zero, _) | (_, QNorm::Zero) => QNorm::Zero,
            (QNorm::Pow(a), QNorm::Pow(b)) => QNorm::Pow(a + b),
        }
    }

    pub fn is_zero(self) -> bool {
        self == QNorm::Zero
    }
}

impl PartialOrd for QNorm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QNorm {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (QNorm::Zero, QNorm::Zero) => Equal,
            (QNorm::Zero, QNorm::Pow(_)) => Less,
            (QNorm::Pow(_), QNorm::Zero) => Greater,
            // larger valuation means smaller norm
            (QNorm::Pow(a), QNorm::Pow(b)) => b.cmp(a),
        }
    }
}

impl std::fmt::Display for QNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QNorm::Zero => write!(f, "0"),
            QNorm::Pow(v) => write!(f, "q^{}", -v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_ordering() {
        assert!(QNorm::Zero < QNorm::pow(100));
        assert!(QNorm::pow(3) < QNorm::pow(2)); // q^-3 < q^-2
        assert!(QNorm::pow(-1) > QNorm::one()); // q^1 > 1
        assert_eq!(QNorm::pow(2).mul(QNorm::pow(3)), QNorm::pow(5));
        assert_eq!(QNorm::Zero.mul(QNorm::pow(3)), QNorm::Zero);
        assert_eq!(QNorm::pow(1).to_string(), "q^-1");
    }
}
