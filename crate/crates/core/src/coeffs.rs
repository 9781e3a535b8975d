//! Mermin and Svetlichny coefficient tables.
//!
//! `M_m = Σ_x F_m(x) A_1^{x_1}…A_m^{x_m}` and `S_m = Σ_x μ_m(x) A_1^{x_1}…A_m^{x_m}`.
//! The Mermin coefficients are produced by the one-step recursion
//!
//! ```text
//! F_2(x_1, x_2) = ½ (-1)^{x_1 x_2}
//! F_n(x', x_n)  = ½ [F_{n-1}(x') + (-1)^{x_n} F_{n-1}(x̄')]
//! ```
//!
//! (and, for even `m`, by the equivalent two-step recursion), and the
//! Svetlichny coefficients follow as `μ_m = F_m` for even `m` and
//! `μ_m(x) = ½ [F_m(x) + F_m(x̄)]` for odd `m`. Independently of that, the
//! Svetlichny coefficients have the closed form
//!
//! ```text
//! μ_m(x) = 2^{-q} (-1)^{Σ_{i<j} x_i x_j + (q+1) Σ_i x_i + (q² - q)/2},  q = ⌈m/2⌉
//! ```
//!
//! and both routes are kept so they can be checked against each other.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bits::{full_mask, sign_of, BitWord, MAX_PARTIES, MIN_PARTIES};
use crate::error::{check_party_count, Error, Result};
use crate::scalar::{ExactScalar, Value};
use crate::table::{CorrelationTable, Probabilities};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientKind {
    Mermin,
    Svetlichny,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Closed,
    Recursive,
}

/// Exact coefficients indexed by input word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientTable {
    m: usize,
    kind: CoefficientKind,
    values: Vec<ExactScalar>,
}

/// `q = ⌈m/2⌉`.
pub fn q_of(m: usize) -> u32 {
    m.div_ceil(2) as u32
}

impl CoefficientTable {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> CoefficientKind {
        self.kind
    }

    pub fn q(&self) -> u32 {
        q_of(self.m)
    }

    pub fn values(&self) -> &[ExactScalar] {
        &self.values
    }

    pub fn value(&self, x: u32) -> ExactScalar {
        self.values[x as usize]
    }

    /// Common magnitude of every coefficient, if they share one.
    pub fn uniform_magnitude(&self) -> Option<ExactScalar> {
        let first = self.values[0].abs();
        self.values.iter().all(|v| v.abs() == first && !v.is_zero()).then_some(first)
    }

    /// Bit `x` set iff the coefficient at `x` is negative.
    pub fn sign_word(&self) -> BitWord {
        BitWord::from_fn(self.values.len(), |x| self.values[x].signum() < 0)
    }

    /// `{ "m", "q", "kind", "values": [[x, numerator, exponent], ...] }`.
    pub fn to_json(&self) -> serde_json::Value {
        let values: Vec<_> = self
            .values
            .iter()
            .enumerate()
            .map(|(x, v)| json!([x, v.numerator(), v.exponent()]))
            .collect();
        json!({ "m": self.m, "q": self.q(), "kind": self.kind, "values": values })
    }
}

fn f2(x1: u32, x2: u32) -> ExactScalar {
    ExactScalar::new(sign_of((x1 & x2) as u8), 1)
}

/// Mermin coefficients `F_m` by the one-step recursion.
pub fn mermin_coeffs(m: usize) -> Result<CoefficientTable> {
    check_party_count(m, MIN_PARTIES, MAX_PARTIES)?;
    let mut values: Vec<ExactScalar> = (0..4u32).map(|x| f2(x & 1, x >> 1)).collect();
    for n in 3..=m {
        let prev = n - 1;
        let mask = full_mask(prev);
        let next = (0..1u32 << n)
            .map(|x| {
                let head = x & mask;
                let last = x >> prev;
                let flipped = values[(!head & mask) as usize];
                let flipped = if last == 1 { -flipped } else { flipped };
                (values[head as usize] + flipped).halve()
            })
            .collect();
        values = next;
    }
    Ok(CoefficientTable { m, kind: CoefficientKind::Mermin, values })
}

/// Mermin coefficients for even `m` by the two-step recursion
/// `F_{n+2}(x, y) = ½[F_n(x)(F_2(y) + F_2(ȳ)) + F_n(x̄)(F_2(y) - F_2(ȳ))]`.
pub fn mermin_coeffs_double_step(m: usize) -> Result<CoefficientTable> {
    check_party_count(m, MIN_PARTIES, MAX_PARTIES)?;
    if !m.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!("two-step recursion needs even m, got {m}")));
    }
    let mut values: Vec<ExactScalar> = (0..4u32).map(|x| f2(x & 1, x >> 1)).collect();
    for n in (2..m).step_by(2) {
        let mask = full_mask(n);
        let next = (0..1u32 << (n + 2))
            .map(|x| {
                let head = x & mask;
                let (y1, y2) = ((x >> n) & 1, (x >> (n + 1)) & 1);
                let plain = f2(y1, y2);
                let flipped = f2(y1 ^ 1, y2 ^ 1);
                let keep = values[head as usize] * (plain + flipped);
                let swap = values[(!head & mask) as usize] * (plain - flipped);
                (keep + swap).halve()
            })
            .collect();
        values = next;
    }
    Ok(CoefficientTable { m, kind: CoefficientKind::Mermin, values })
}

/// Exponent of the closed form, reduced mod 2.
pub fn closed_form_exponent(m: usize, x: u32) -> u8 {
    let q = q_of(m) as u64;
    let w = (x & full_mask(m)).count_ones() as u64;
    let pairs = w * w.saturating_sub(1) / 2;
    let constant = (q * q - q) / 2;
    ((pairs + (q + 1) * w + constant) % 2) as u8
}

pub fn svetlichny_coeffs(m: usize, method: Method) -> Result<CoefficientTable> {
    check_party_count(m, MIN_PARTIES, MAX_PARTIES)?;
    let values = match method {
        Method::Closed => {
            let q = q_of(m);
            (0..1u32 << m)
                .map(|x| ExactScalar::new(sign_of(closed_form_exponent(m, x)), q))
                .collect()
        }
        Method::Recursive => {
            let f = mermin_coeffs(m)?;
            if m.is_multiple_of(2) {
                f.values
            } else {
                let mask = full_mask(m);
                (0..1u32 << m)
                    .map(|x| (f.value(x) + f.value(!x & mask)).halve())
                    .collect()
            }
        }
    };
    Ok(CoefficientTable { m, kind: CoefficientKind::Svetlichny, values })
}

/// `Σ_{x,a} c(x) (-1)^{Σ a_i} P(a|x)`; exact when the table is.
pub fn evaluate(table: &CorrelationTable, coeffs: &CoefficientTable) -> Result<Value> {
    if table.m() != coeffs.m() {
        return Err(Error::Dimension(format!(
            "table has m = {}, coefficients have m = {}",
            table.m(),
            coeffs.m()
        )));
    }
    let m = table.m();
    let cols = 1u32 << m;
    match table.data() {
        Probabilities::Exact { exponent, numerators } => {
            let total = (0..cols)
                .map(|x| {
                    let row = &numerators[(x as usize) << m..((x as usize + 1) << m)];
                    let signed: i128 = row
                        .iter()
                        .enumerate()
                        .map(|(a, &n)| if (a as u32).count_ones().is_multiple_of(2) { n as i128 } else { -(n as i128) })
                        .sum();
                    let c = coeffs.value(x);
                    ExactScalar::from_wide(c.numerator() as i128 * signed, c.exponent() + exponent)
                })
                .sum();
            Ok(Value::Exact(total))
        }
        Probabilities::Float(_) => Ok(Value::Float(
            (0..cols).map(|x| coeffs.value(x).to_f64() * table.correlator(x)).sum(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoryBounds {
    pub lhv_separable: f64,
    pub quantum: f64,
    pub algebraic: f64,
}

/// `(2^{m-q-1}, 2^{m-q-1/2}, 2^{m-q})`.
pub fn theory_bounds(m: usize) -> Result<TheoryBounds> {
    check_party_count(m, MIN_PARTIES, MAX_PARTIES)?;
    let e = m as f64 - q_of(m) as f64;
    Ok(TheoryBounds {
        lhv_separable: 2f64.powf(e - 1.0),
        quantum: 2f64.powf(e - 0.5),
        algebraic: 2f64.powf(e),
    })
}

/// `2^{m-q}` exactly.
pub fn algebraic_max(m: usize) -> ExactScalar {
    ExactScalar::from_int(1i64 << (m as u32 - q_of(m)))
}

/// `2^{m-q-1}` exactly.
pub fn lhv_bound(m: usize) -> ExactScalar {
    algebraic_max(m).halve()
}
