//! Dense conditional distributions `P(a|x)` over binary inputs and outcomes.

use std::fmt;
use std::fmt::Write as _;

use serde_json::Value;

use crate::bits::{parity, MAX_PARTIES};
use crate::error::{check_party_count, Error, Result};
use crate::scalar::ExactScalar;

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Entry storage. Exact tables share one power-of-two denominator.
#[derive(Debug, Clone, PartialEq)]
pub enum Probabilities {
    Exact { exponent: u32, numerators: Vec<i64> },
    Float(Vec<f64>),
}

/// `P(a|x)` for every pair of `m`-bit words, indexed `(x << m) | a`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    m: usize,
    data: Probabilities,
}

/// The first entry or column breaking positivity or normalisation.
#[derive(Debug, Clone, PartialEq)]
pub enum TableViolation {
    Positivity { x: u32, a: u32, value: f64 },
    Normalisation { x: u32, sum: f64 },
}

impl fmt::Display for TableViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableViolation::Positivity { x, a, value } => {
                write!(f, "positivity violated at x={x:#b}, a={a:#b}: P = {value}")
            }
            TableViolation::Normalisation { x, sum } => {
                write!(f, "normalisation violated at x={x:#b}: sum = {sum}")
            }
        }
    }
}

fn entry_count(m: usize) -> usize {
    1usize << (2 * m)
}

impl CorrelationTable {
    /// Exact table from shared-denominator numerators.
    pub fn exact(m: usize, exponent: u32, numerators: Vec<i64>) -> Result<Self> {
        check_party_count(m, 1, MAX_PARTIES)?;
        if numerators.len() != entry_count(m) {
            return Err(Error::Dimension(format!(
                "{} entries given, {} expected for m = {m}",
                numerators.len(),
                entry_count(m)
            )));
        }
        Ok(Self { m, data: Probabilities::Exact { exponent, numerators } }.reduced())
    }

    pub fn float(m: usize, values: Vec<f64>) -> Result<Self> {
        check_party_count(m, 1, MAX_PARTIES)?;
        if values.len() != entry_count(m) {
            return Err(Error::Dimension(format!(
                "{} entries given, {} expected for m = {m}",
                values.len(),
                entry_count(m)
            )));
        }
        Ok(Self { m, data: Probabilities::Float(values) })
    }

    /// Exact table from a per-entry function.
    pub fn from_exact_fn(m: usize, f: impl Fn(u32, u32) -> ExactScalar) -> Result<Self> {
        check_party_count(m, 1, MAX_PARTIES)?;
        let values: Vec<ExactScalar> = (0..entry_count(m) as u32)
            .map(|idx| f(idx >> m, idx & ((1 << m) - 1)))
            .collect();
        Self::from_exact_values(m, &values)
    }

    pub(crate) fn from_exact_values(m: usize, values: &[ExactScalar]) -> Result<Self> {
        let exponent = values.iter().map(|v| v.exponent()).max().unwrap_or(0);
        let numerators = values
            .iter()
            .map(|v| {
                i64::try_from(v.numerator_at(exponent).unwrap())
                    .map_err(|_| Error::Unsupported("exact table denominator too fine".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::exact(m, exponent, numerators)
    }

    /// `P(a|x) = 2^{-m}` everywhere.
    pub fn uniform(m: usize) -> Result<Self> {
        Self::exact(m, m as u32, vec![1; entry_count(m)])
    }

    /// Drops common factors of two from an exact table's numerators.
    fn reduced(mut self) -> Self {
        if let Probabilities::Exact { exponent, numerators } = &mut self.data {
            let tz = numerators
                .iter()
                .filter(|&&n| n != 0)
                .map(|n| n.trailing_zeros())
                .min()
                .unwrap_or(*exponent)
                .min(*exponent);
            if tz > 0 {
                numerators.iter_mut().for_each(|n| *n >>= tz);
                *exponent -= tz;
            }
        }
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn data(&self) -> &Probabilities {
        &self.data
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.data, Probabilities::Exact { .. })
    }

    pub fn len(&self) -> usize {
        entry_count(self.m)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, x: u32, a: u32) -> usize {
        ((x as usize) << self.m) | a as usize
    }

    pub fn get(&self, x: u32, a: u32) -> f64 {
        let i = self.index(x, a);
        match &self.data {
            Probabilities::Exact { exponent, numerators } => {
                numerators[i] as f64 / 2f64.powi(*exponent as i32)
            }
            Probabilities::Float(v) => v[i],
        }
    }

    /// The exact entry, or `None` for floating tables.
    pub fn get_exact(&self, x: u32, a: u32) -> Option<ExactScalar> {
        match &self.data {
            Probabilities::Exact { exponent, numerators } => {
                Some(ExactScalar::new(numerators[self.index(x, a)], *exponent))
            }
            Probabilities::Float(_) => None,
        }
    }

    /// Floating copy of any table.
    pub fn to_float(&self) -> CorrelationTable {
        let n = self.len() as u32;
        let values = (0..n).map(|i| self.get(i >> self.m, i & ((1 << self.m) - 1))).collect();
        CorrelationTable { m: self.m, data: Probabilities::Float(values) }
    }

    /// Checks positivity and normalisation, scanning inputs in ascending order
    /// and, within an input, outcomes in ascending order before the column sum.
    /// Exact tables are compared exactly; `tol` bounds the permitted deviation.
    pub fn validate(&self, tol: f64) -> std::result::Result<(), TableViolation> {
        let cols = 1u32 << self.m;
        for x in 0..cols {
            match &self.data {
                Probabilities::Exact { exponent, numerators } => {
                    let scale = 2f64.powi(*exponent as i32);
                    let mut sum: i128 = 0;
                    for a in 0..cols {
                        let n = numerators[self.index(x, a)];
                        if (n as f64) / scale < -tol {
                            return Err(TableViolation::Positivity { x, a, value: n as f64 / scale });
                        }
                        sum += n as i128;
                    }
                    let dev = (sum - (1i128 << exponent)) as f64 / scale;
                    if dev.abs() > tol {
                        return Err(TableViolation::Normalisation { x, sum: sum as f64 / scale });
                    }
                }
                Probabilities::Float(v) => {
                    let mut sum = 0.0;
                    for a in 0..cols {
                        let p = v[self.index(x, a)];
                        if p < -tol || p.is_nan() {
                            return Err(TableViolation::Positivity { x, a, value: p });
                        }
                        sum += p;
                    }
                    if (sum - 1.0).abs() > tol || sum.is_nan() {
                        return Err(TableViolation::Normalisation { x, sum });
                    }
                }
            }
        }
        Ok(())
    }

    /// `Σ_a (-1)^{Σa_i} P(a|x)`, the full correlator for one input word.
    pub fn correlator(&self, x: u32) -> f64 {
        (0..1u32 << self.m)
            .map(|a| if parity(a) == 0 { self.get(x, a) } else { -self.get(x, a) })
            .sum()
    }

    /// JSON form: exact entries `[x, a, numerator, exponent]`, floating
    /// entries `[x, a, value]` printed with 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        let repr = if self.is_exact() { "exact" } else { "floating" };
        write!(out, "{{\"m\":{},\"representation\":\"{repr}\",\"entries\":[", self.m).unwrap();
        let cols = 1u32 << self.m;
        let mut first = true;
        for x in 0..cols {
            for a in 0..cols {
                if !first {
                    out.push(',');
                }
                first = false;
                match self.get_exact(x, a) {
                    Some(v) => {
                        write!(out, "[{x},{a},{},{}]", v.numerator(), v.exponent()).unwrap()
                    }
                    None => write!(out, "[{x},{a},{:.16e}]", self.get(x, a)).unwrap(),
                }
            }
        }
        out.push_str("]}");
        out
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s)?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let m = v
            .get("m")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("table needs integer field `m`".into()))?
            as usize;
        check_party_count(m, 1, MAX_PARTIES)?;
        let entries = v
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("table needs array field `entries`".into()))?;
        if entries.len() != entry_count(m) {
            return Err(Error::Dimension(format!(
                "{} entries given, {} expected for m = {m}",
                entries.len(),
                entry_count(m)
            )));
        }
        let limit = 1u64 << m;
        let mut exact: Vec<Option<ExactScalar>> = vec![None; entry_count(m)];
        let mut float: Vec<Option<f64>> = vec![None; entry_count(m)];
        let mut arity = None;
        for e in entries {
            let row = e.as_array().ok_or_else(|| Error::Parse("entry is not an array".into()))?;
            if *arity.get_or_insert(row.len()) != row.len() {
                return Err(Error::Parse("mixed exact and floating entries".into()));
            }
            let word = |k: usize| {
                row[k]
                    .as_u64()
                    .filter(|&w| w < limit)
                    .ok_or_else(|| Error::Parse(format!("bad word in entry {e}")))
            };
            let (x, a) = (word(0)?, word(1)?);
            let idx = ((x as usize) << m) | a as usize;
            let duplicate = match row.len() {
                4 => {
                    let n = row[2].as_i64().ok_or_else(|| Error::Parse(format!("bad numerator in {e}")))?;
                    let k = row[3]
                        .as_u64()
                        .filter(|&k| k < 63)
                        .ok_or_else(|| Error::Parse(format!("bad exponent in {e}")))?;
                    exact[idx].replace(ExactScalar::new(n, k as u32)).is_some()
                }
                3 => {
                    let p = row[2].as_f64().ok_or_else(|| Error::Parse(format!("bad value in {e}")))?;
                    float[idx].replace(p).is_some()
                }
                _ => return Err(Error::Parse(format!("entry {e} has {} fields", row.len()))),
            };
            if duplicate {
                return Err(Error::Dimension(format!("duplicate entry for x={x}, a={a}")));
            }
        }
        if arity == Some(4) {
            let values: Vec<ExactScalar> = exact.into_iter().map(Option::unwrap).collect();
            Self::from_exact_values(m, &values)
        } else {
            Self::float(m, float.into_iter().map(Option::unwrap).collect())
        }
    }
}
