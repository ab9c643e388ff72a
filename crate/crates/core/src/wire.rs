//! JSON wire formats for the exact-backend objects the CLI exchanges.
//!
//! Values serialize as bare rational strings (`"3/4"`) when they lie in Q
//! and as conductor/coefficient objects otherwise. Dual-group points use
//! the textual `k/denominator` form. The session prime comes from the
//! command line, so none of the payloads repeat it.

use serde::{Deserialize, Serialize};

use crate::cyclo::{parse_ratio, ratio_string, CycloNum, CycloWire};
use crate::dual::{parse_phat, PHat};
use crate::error::{Error, Result};
use crate::fourier::{DualFn, LCFn};
use crate::measures::{BaseHat, MeasureHat, MeasureTerm};
use crate::value::{Backend, ExactBackend};
use crate::wtt::NondensityWitness;

/// A value: rational shorthand or full cyclotomic form.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueWire {
    Ratio(String),
    Cyclo(CycloWire),
}

pub fn value_to_wire(v: &CycloNum) -> ValueWire {
    match v.as_rational() {
        Some(r) => ValueWire::Ratio(ratio_string(&r)),
        None => ValueWire::Cyclo(v.to_wire()),
    }
}

pub fn value_from_wire(p: u32, w: &ValueWire) -> Result<CycloNum> {
    match w {
        ValueWire::Ratio(s) => Ok(CycloNum::from_ratio(p, parse_ratio(s)?)),
        ValueWire::Cyclo(c) => CycloNum::from_wire(p, c),
    }
}

/// `{"level":N,"values":[...]}`, one value per residue class mod `p^N`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LCFnWire {
    pub level: u32,
    pub values: Vec<ValueWire>,
}

pub fn lcfn_to_wire(f: &LCFn<CycloNum>) -> LCFnWire {
    LCFnWire {
        level: f.level(),
        values: f.values().iter().map(value_to_wire).collect(),
    }
}

pub fn lcfn_from_wire(backend: &ExactBackend, w: &LCFnWire) -> Result<LCFn<CycloNum>> {
    let expect = (backend.p() as usize)
        .checked_pow(w.level)
        .ok_or_else(|| Error::Parse("level too large".into()))?;
    if w.values.len() != expect {
        return Err(Error::Parse(format!(
            "level {} needs {} values, got {}",
            w.level,
            expect,
            w.values.len()
        )));
    }
    let values = w
        .values
        .iter()
        .map(|v| value_from_wire(backend.p(), v))
        .collect::<Result<Vec<_>>>()?;
    Ok(LCFn::new(backend, w.level, values))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualEntryWire {
    pub t: String,
    pub v: ValueWire,
}

/// `{"support":[{"t":"k/p^n","v":...}]}`, zero entries omitted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualFnWire {
    pub support: Vec<DualEntryWire>,
}

pub fn dualfn_to_wire(f: &DualFn<CycloNum>) -> DualFnWire {
    DualFnWire {
        support: f
            .support()
            .map(|(t, v)| DualEntryWire { t: t.to_string(), v: value_to_wire(v) })
            .collect(),
    }
}

pub fn dualfn_from_wire(backend: &ExactBackend, w: &DualFnWire) -> Result<DualFn<CycloNum>> {
    let mut out = DualFn::new();
    for e in &w.support {
        let t = parse_phat(&e.t, backend.p())?;
        let v = value_from_wire(backend.p(), &e.v)?;
        out.accumulate(backend, t, v);
    }
    Ok(out)
}

/// A measure term: `{"coeff":...,"shift":"k/p^n","base":...}` where the
/// base is `"aq"`, `"dirac0"`, `"pointmass"`, or `{"table":{...}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BaseWire {
    Named(String),
    Table { table: DualFnWire },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureTermWire {
    pub coeff: ValueWire,
    pub shift: String,
    pub base: BaseWire,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureWire {
    pub terms: Vec<MeasureTermWire>,
}

pub fn measure_to_wire(mu: &MeasureHat<CycloNum>) -> MeasureWire {
    let terms = mu
        .terms()
        .iter()
        .map(|term| MeasureTermWire {
            coeff: value_to_wire(&term.coeff),
            shift: term.shift.to_string(),
            base: match &term.base {
                BaseHat::AqProduct => BaseWire::Named("aq".into()),
                BaseHat::DiracZero => BaseWire::Named("dirac0".into()),
                BaseHat::PointMass => BaseWire::Named("pointmass".into()),
                BaseHat::Table(t) => BaseWire::Table { table: dualfn_to_wire(t) },
            },
        })
        .collect();
    MeasureWire { terms }
}

pub fn measure_from_wire(backend: &ExactBackend, w: &MeasureWire) -> Result<MeasureHat<CycloNum>> {
    if w.terms.is_empty() {
        return Err(Error::Parse("measure needs at least one term".into()));
    }
    let mut terms = Vec::with_capacity(w.terms.len());
    for tw in &w.terms {
        let base = match &tw.base {
            BaseWire::Named(name) => match name.as_str() {
                "aq" => {
                    if backend.p() != 2 {
                        return Err(Error::Parse("base \"aq\" requires p = 2".into()));
                    }
                    BaseHat::AqProduct
                }
                "dirac0" => BaseHat::DiracZero,
                "pointmass" => BaseHat::PointMass,
                other => {
                    return Err(Error::Parse(format!(
                        "unknown base '{other}' (expected aq, dirac0, pointmass, or a table)"
                    )))
                }
            },
            BaseWire::Table { table } => BaseHat::Table(dualfn_from_wire(backend, table)?),
        };
        terms.push(MeasureTerm {
            coeff: value_from_wire(backend.p(), &tw.coeff)?,
            shift: parse_phat(&tw.shift, backend.p())?,
            base,
        });
    }
    Ok(MeasureHat::from_terms(backend, terms))
}

/// Serialized continuous-theorem report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WttReportWire {
    pub level: u32,
    pub zero_set: Vec<u64>,
    pub dft_values: Vec<ValueWire>,
    pub circulant_rank_full: bool,
    pub inverse_transform: Option<DualFnWire>,
}

pub fn wtt_report_to_wire(rep: &crate::wtt::WttContinuousReport<CycloNum>) -> WttReportWire {
    WttReportWire {
        level: rep.level,
        zero_set: rep.zero_set.clone(),
        dft_values: rep.dft_values.iter().map(value_to_wire).collect(),
        circulant_rank_full: rep.circulant_rank_full,
        inverse_transform: rep.inverse_transform.as_ref().map(dualfn_to_wire),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComboEntryWire {
    pub coeff: ValueWire,
    pub shift: String,
}

/// Serialized non-density certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessWire {
    pub z0: crate::base::ZpPoint,
    pub combo: Vec<ComboEntryWire>,
    pub n_star: u32,
    pub windowed_max: String,
    pub verdict: bool,
}

pub fn witness_to_wire(w: &NondensityWitness) -> WitnessWire {
    WitnessWire {
        z0: w.z0.clone(),
        combo: w
            .combo
            .iter()
            .map(|(c, s)| ComboEntryWire { coeff: value_to_wire(c), shift: s.to_string() })
            .collect(),
        n_star: w.n_star,
        windowed_max: w.windowed_max.to_string(),
        verdict: w.verdict,
    }
}

pub fn combo_from_wire(backend: &ExactBackend, combo: &[ComboEntryWire]) -> Result<Vec<(CycloNum, PHat)>> {
    combo
        .iter()
        .map(|e| Ok((value_from_wire(backend.p(), &e.coeff)?, parse_phat(&e.shift, backend.p())?)))
        .collect()
}
