//! No-signalling checks and the uniform parity-preserving mixtures.
//!
//! Shifting every output of a strategy by a vector `b` with `Σ b_i` even leaves
//! the global parity, hence the Svetlichny value, unchanged. Mixing all
//! `2^{m-1}` such shifts uniformly gives
//!
//! ```text
//! P(a|x) = 2^{-(m-1)}  if parity(a) = parity(a⁰(x)),  0 otherwise,
//! ```
//!
//! whose marginal on any `m - k` parties (`k ≥ 1` summed out) is the constant
//! `2^{k-m}`, so the mixture cannot signal.

use serde::Serialize;

use crate::bits::{full_mask, parity};
use crate::error::{Error, Result};
use crate::graphs::mask_to_parties;
use crate::scalar::{ExactScalar, Value};
use crate::strategies::DeterministicStrategy;
use crate::table::{CorrelationTable, Probabilities};

pub const MAX_NOSIGNAL_PARTIES: usize = 8;

/// A subset `S` whose inputs move the marginal of the other parties.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignallingReport {
    /// Parties whose outcomes are summed out and whose inputs vary.
    pub subset: Vec<usize>,
    /// `(party, outcome bit)` for every party outside `subset`.
    pub fixed_outcomes: Vec<(usize, u8)>,
    /// Reference input (all of `subset`'s inputs zero) and the input that
    /// differs from it on `subset` only.
    pub x_reference: u32,
    pub x_other: u32,
    pub marginal_reference: f64,
    pub marginal_other: f64,
    pub difference: f64,
    /// Exact marginals when the table is exact, as rational strings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<(ExactScalar, ExactScalar)>,
}

impl SignallingReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Subsets `1..2^m - 1` ordered by size, then by their sorted party lists.
pub fn proper_subsets(m: usize) -> Vec<u32> {
    let mut subsets: Vec<u32> = (1..full_mask(m)).collect();
    subsets.sort_by_key(|&s| (s.count_ones(), mask_to_parties(s)));
    subsets
}

/// Marginal `Σ_{a_S} P(a|x)` with the outcomes outside `summed` fixed to
/// those of `a_rest` (its bits inside `summed` are ignored).
pub fn marginal(table: &CorrelationTable, summed: u32, x: u32, a_rest: u32) -> Value {
    let m = table.m();
    let base = a_rest & !summed & full_mask(m);
    let mut sub = summed;
    let mut exact = ExactScalar::ZERO;
    let mut float = 0.0;
    loop {
        let a = base | sub;
        match table.get_exact(x, a) {
            Some(v) => exact += v,
            None => float += table.get(x, a),
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & summed;
    }
    if table.is_exact() {
        Value::Exact(exact)
    } else {
        Value::Float(float)
    }
}

/// Checks that for every nonempty proper subset `S` the marginal on the other
/// parties is independent of `x_S`. Exact tables are compared exactly and a
/// deviation counts only when it exceeds `tol`. Returns the first violation in
/// subset order, then input word, then fixed outcome word.
pub fn check_nosignalling(table: &CorrelationTable, tol: f64) -> Result<Option<SignallingReport>> {
    let m = table.m();
    if m > MAX_NOSIGNAL_PARTIES {
        return Err(Error::Unsupported(format!("no-signalling scan limited to m <= {MAX_NOSIGNAL_PARTIES}")));
    }
    let cols = 1usize << m;
    for s in proper_subsets(m) {
        let rest = !s & full_mask(m);
        let marg: Vec<f64>;
        let marg_exact: Option<(u32, Vec<i128>)>;
        match table.data() {
            Probabilities::Exact { exponent, numerators } => {
                let mut acc = vec![0i128; cols * cols];
                for (idx, &n) in numerators.iter().enumerate() {
                    let (x, a) = (idx >> m, idx & (cols - 1));
                    acc[(x << m) | (a & rest as usize)] += n as i128;
                }
                let scale = 2f64.powi(*exponent as i32);
                marg = acc.iter().map(|&n| n as f64 / scale).collect();
                marg_exact = Some((*exponent, acc));
            }
            Probabilities::Float(values) => {
                let mut acc = vec![0f64; cols * cols];
                for (idx, &p) in values.iter().enumerate() {
                    let (x, a) = (idx >> m, idx & (cols - 1));
                    acc[(x << m) | (a & rest as usize)] += p;
                }
                marg = acc;
                marg_exact = None;
            }
        }
        for x in 0..cols as u32 {
            if x & s == 0 {
                continue;
            }
            let x_ref = x & !s;
            let mut a_rest = 0u32;
            loop {
                let i_ref = ((x_ref as usize) << m) | a_rest as usize;
                let i_other = ((x as usize) << m) | a_rest as usize;
                let (violates, exact) = match &marg_exact {
                    Some((e, acc)) => {
                        let diff = ExactScalar::from_wide(acc[i_other] - acc[i_ref], *e);
                        let pair = (ExactScalar::from_wide(acc[i_ref], *e), ExactScalar::from_wide(acc[i_other], *e));
                        (!diff.is_zero() && diff.abs().to_f64() > tol, Some(pair))
                    }
                    None => ((marg[i_other] - marg[i_ref]).abs() > tol, None),
                };
                if violates {
                    return Ok(Some(SignallingReport {
                        subset: mask_to_parties(s),
                        fixed_outcomes: mask_to_parties(rest)
                            .into_iter()
                            .map(|p| (p, (a_rest >> (p - 1) & 1) as u8))
                            .collect(),
                        x_reference: x_ref,
                        x_other: x,
                        marginal_reference: marg[i_ref],
                        marginal_other: marg[i_other],
                        difference: marg[i_other] - marg[i_ref],
                        exact,
                    }));
                }
                // next outcome word supported on `rest`
                if a_rest == rest {
                    break;
                }
                a_rest = ((a_rest | !rest) + 1) & rest;
            }
        }
    }
    Ok(None)
}

/// Closed form of the uniform mixture over all even-parity output shifts.
pub fn parity_mixture(s: &DeterministicStrategy) -> CorrelationTable {
    let m = s.m();
    let cols = 1u32 << m;
    let mut numerators = vec![0i64; 1 << (2 * m)];
    for x in 0..cols {
        let target = parity(s.outputs(x));
        for a in 0..cols {
            if parity(a) == target {
                numerators[((x as usize) << m) | a as usize] = 1;
            }
        }
    }
    CorrelationTable::exact(m, m as u32 - 1, numerators).expect("dimensions fixed by m")
}

/// The `2^{m-1}` shift vectors with even parity, ascending.
pub fn even_shifts(m: usize) -> Vec<u32> {
    (0..1u32 << m).filter(|&b| parity(b) == 0).collect()
}

/// Weighted deterministic strategies over a common party count.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    components: Vec<(ExactScalar, DeterministicStrategy)>,
}

impl MixtureSpec {
    /// Weights must be non-negative and sum to exactly 1.
    pub fn new(components: Vec<(ExactScalar, DeterministicStrategy)>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidMixture("no components".into()))?;
        let m = first.1.m();
        if components.iter().any(|(_, s)| s.m() != m) {
            return Err(Error::InvalidMixture("components disagree on m".into()));
        }
        if let Some((w, _)) = components.iter().find(|(w, _)| w.signum() < 0) {
            return Err(Error::InvalidMixture(format!("negative weight {w}")));
        }
        let total: ExactScalar = components.iter().map(|(w, _)| *w).sum();
        if total != ExactScalar::ONE {
            return Err(Error::InvalidMixture(format!("weights sum to {total}")));
        }
        Ok(Self { components })
    }

    /// Uniform mixture of `s ⊕ b` over every even-parity `b`.
    pub fn even_shifts_of(s: &DeterministicStrategy) -> Self {
        let m = s.m();
        let w = ExactScalar::pow2_neg(m as u32 - 1);
        Self { components: even_shifts(m).into_iter().map(|b| (w, s.shifted(b))).collect() }
    }

    pub fn m(&self) -> usize {
        self.components[0].1.m()
    }

    pub fn components(&self) -> &[(ExactScalar, DeterministicStrategy)] {
        &self.components
    }
}

/// `P(a|x) = Σ_μ p(μ) P^μ(a|x)`, exactly.
pub fn mixture_from_weights(spec: &MixtureSpec) -> CorrelationTable {
    let m = spec.m();
    let mut values = vec![ExactScalar::ZERO; 1 << (2 * m)];
    for (w, s) in &spec.components {
        for x in 0..1u32 << m {
            values[((x as usize) << m) | s.outputs(x) as usize] += *w;
        }
    }
    CorrelationTable::from_exact_values(m, &values).expect("dimensions fixed by m")
}
