//! Deterministic strategies constrained by a communication graph, and the
//! maximum of the Svetlichny functional over them.
//!
//! For a deterministic strategy the functional only sees the global parity
//! `c(x) = Σ_i a_i(x) mod 2`:
//!
//! ```text
//! ⟨S⟩ = Σ_x μ(x) (-1)^{c(x)}
//! ```
//!
//! Party `i` may output any boolean function of the inputs in `Dep(i)`, so in
//! algebraic normal form it contributes any XOR of monomials `∏_{t∈T} x_t`
//! with `T ⊆ Dep(i)`. The achievable parities are therefore exactly the GF(2)
//! span of those monomials (the empty monomial gives the constants), and
//! maximizing `⟨S⟩` is a nearest-codeword search: with all `|μ(x)| = 2^{-q}`
//! and `g` the sign word of `μ`, `⟨S⟩ = 2^{-q} (2^m - 2·d(g, c))`.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde_json::{json, Value as Json};

use crate::bits::{BitWord, MAX_PARTIES};
use crate::coeffs::{evaluate, q_of, CoefficientTable};
use crate::error::{Error, Result};
use crate::graphs::{classify, mask_to_parties, Classification, CommGraph, DependencyProfile};
use crate::scalar::ExactScalar;
use crate::table::CorrelationTable;

pub const DEFAULT_DIM_CAP: usize = 24;
pub const DEFAULT_BRUTE_FORCE_CAP: u128 = 1 << 24;

/// Packs the bits of `x` selected by `mask` into the low bits, lowest party first.
#[inline]
pub(crate) fn restrict(x: u32, mask: u32) -> u32 {
    let mut out = 0;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let b = m.trailing_zeros();
        out |= ((x >> b) & 1) << k;
        k += 1;
        m &= m - 1;
    }
    out
}

/// Truth table of one party over its dependency set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartyTable {
    dep_mask: u32,
    bits: BitWord,
}

impl PartyTable {
    /// `Dep(i)` as sorted 1-based indices.
    pub fn dep(&self) -> Vec<usize> {
        mask_to_parties(self.dep_mask)
    }

    pub fn dep_mask(&self) -> u32 {
        self.dep_mask
    }

    /// Bit `l` is the output when the dependency inputs, packed lowest party
    /// first, read `l`.
    pub fn bits(&self) -> &BitWord {
        &self.bits
    }

    #[inline]
    pub fn output(&self, x: u32) -> u8 {
        self.bits.get(restrict(x, self.dep_mask) as usize) as u8
    }
}

/// One output function per party, each reading only its `Dep(i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    graph: CommGraph,
    tables: Vec<PartyTable>,
}

impl DeterministicStrategy {
    /// Builds from `f(i, x)`, which is only ever called with the inputs
    /// outside `Dep(i)` cleared.
    pub fn from_fn(graph: &CommGraph, f: impl Fn(usize, u32) -> u8) -> Self {
        let deps = graph.dependency_sets();
        let tables = (1..=graph.m())
            .map(|i| {
                let mask = deps.mask(i);
                let width = mask.count_ones();
                let bits = BitWord::from_fn(1 << width, |l| {
                    let x = deposit(l as u32, mask);
                    f(i, x) & 1 == 1
                });
                PartyTable { dep_mask: mask, bits }
            })
            .collect();
        Self { graph: graph.clone(), tables }
    }

    /// Builds each `a_i` as the XOR of the monomials (party masks) assigned
    /// to it; every monomial must lie inside that party's `Dep(i)`.
    pub fn from_monomials(graph: &CommGraph, monomials: &[Vec<u32>]) -> Result<Self> {
        if monomials.len() != graph.m() {
            return Err(Error::InvalidStrategy(format!(
                "{} monomial lists for {} parties",
                monomials.len(),
                graph.m()
            )));
        }
        let deps = graph.dependency_sets();
        for (i, list) in monomials.iter().enumerate() {
            if let Some(t) = list.iter().find(|&&t| t & deps.mask(i + 1) != t) {
                return Err(Error::InvalidStrategy(format!(
                    "monomial {:?} outside Dep({})",
                    mask_to_parties(*t),
                    i + 1
                )));
            }
        }
        Ok(Self::from_fn(graph, |i, x| {
            monomials[i - 1].iter().filter(|&&t| x & t == t).count() as u8 & 1
        }))
    }

    pub fn from_tables(graph: &CommGraph, tables: Vec<PartyTable>) -> Result<Self> {
        let deps = graph.dependency_sets();
        if tables.len() != graph.m() {
            return Err(Error::InvalidStrategy("one table per party required".into()));
        }
        for (i, t) in tables.iter().enumerate() {
            if t.dep_mask != deps.mask(i + 1) {
                return Err(Error::InvalidStrategy(format!("table {} does not match Dep({})", i + 1, i + 1)));
            }
        }
        Ok(Self { graph: graph.clone(), tables })
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    pub fn graph(&self) -> &CommGraph {
        &self.graph
    }

    pub fn tables(&self) -> &[PartyTable] {
        &self.tables
    }

    /// `a_i(x)` for 1-based party `i`.
    pub fn output(&self, i: usize, x: u32) -> u8 {
        self.tables[i - 1].output(x)
    }

    /// Outcome word `a(x)`.
    pub fn outputs(&self, x: u32) -> u32 {
        self.tables
            .iter()
            .enumerate()
            .map(|(i, t)| (t.output(x) as u32) << i)
            .sum()
    }

    pub fn parity_function(&self) -> ParityFunction {
        let m = self.m();
        ParityFunction {
            m,
            word: BitWord::from_fn(1 << m, |x| self.outputs(x as u32).count_ones() % 2 == 1),
        }
    }

    /// `a(x) ⊕ b`: party `i`'s table is inverted when bit `i - 1` of `b` is set.
    pub fn shifted(&self, b: u32) -> Self {
        let tables = self
            .tables
            .iter()
            .enumerate()
            .map(|(i, t)| {
                if b >> i & 1 == 1 {
                    PartyTable { dep_mask: t.dep_mask, bits: t.bits.not() }
                } else {
                    t.clone()
                }
            })
            .collect();
        Self { graph: self.graph.clone(), tables }
    }

    /// Whether `a_i` actually varies with some input other than `x_i`.
    pub fn uses_cross_dependency(&self) -> bool {
        let m = self.m();
        (1..=m).any(|i| {
            let own = 1u32 << (i - 1);
            (0..1u32 << m).any(|x| {
                (0..m).any(|b| {
                    let flip = 1u32 << b;
                    flip != own && self.output(i, x) != self.output(i, x ^ flip)
                })
            })
        })
    }

    /// `{ "m", "tables": { "i": { "dep": [...], "bits": hex } } }`.
    pub fn to_json(&self) -> Json {
        let tables: serde_json::Map<String, Json> = self
            .tables
            .iter()
            .enumerate()
            .map(|(i, t)| ((i + 1).to_string(), json!({ "dep": t.dep(), "bits": t.bits.to_hex() })))
            .collect();
        json!({ "m": self.m(), "tables": tables })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_json_value(&serde_json::from_str(s)?)
    }

    /// Reads the strategy file format. The graph is rebuilt from the `dep`
    /// lists, which must contain their own party.
    pub fn from_json_value(v: &Json) -> Result<Self> {
        let m = v
            .get("m")
            .and_then(Json::as_u64)
            .ok_or_else(|| Error::Parse("strategy needs integer field `m`".into()))? as usize;
        crate::error::check_party_count(m, 1, MAX_PARTIES)?;
        let tables = v
            .get("tables")
            .and_then(Json::as_object)
            .ok_or_else(|| Error::Parse("strategy needs object field `tables`".into()))?;
        if tables.len() != m {
            return Err(Error::InvalidStrategy(format!("{} tables for {m} parties", tables.len())));
        }
        let mut parsed = BTreeMap::new();
        for (key, entry) in tables {
            let i: usize = key
                .parse()
                .ok()
                .filter(|&i| (1..=m).contains(&i))
                .ok_or_else(|| Error::InvalidStrategy(format!("bad party key `{key}`")))?;
            let dep: Vec<usize> = serde_json::from_value(
                entry.get("dep").cloned().ok_or_else(|| Error::Parse(format!("party {i} lacks `dep`")))?,
            )?;
            if !dep.contains(&i) {
                return Err(Error::InvalidStrategy(format!("Dep({i}) must contain {i}")));
            }
            if dep.iter().any(|&j| j == 0 || j > m) {
                return Err(Error::InvalidStrategy(format!("Dep({i}) names a party outside 1..={m}")));
            }
            let mask: u32 = dep.iter().map(|&j| 1u32 << (j - 1)).fold(0, |a, b| a | b);
            let hex = entry
                .get("bits")
                .and_then(Json::as_str)
                .ok_or_else(|| Error::Parse(format!("party {i} lacks hex `bits`")))?;
            let bits = BitWord::from_hex(1 << mask.count_ones(), hex)?;
            parsed.insert(i, (dep, PartyTable { dep_mask: mask, bits }));
        }
        let deps: Vec<Vec<usize>> = parsed.values().map(|(d, _)| d.clone()).collect();
        let graph = CommGraph::from_dependencies(&deps)?;
        let tables = parsed.into_values().map(|(_, t)| t).collect();
        Self::from_tables(&graph, tables)
    }
}

/// Inverse of [`restrict`]: spreads the low bits of `l` onto the positions of `mask`.
#[inline]
fn deposit(l: u32, mask: u32) -> u32 {
    let mut out = 0;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let b = m.trailing_zeros();
        out |= ((l >> k) & 1) << b;
        k += 1;
        m &= m - 1;
    }
    out
}

/// Global parity `c(x)` as a `2^m`-bit word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParityFunction {
    m: usize,
    word: BitWord,
}

impl ParityFunction {
    pub fn new(m: usize, word: BitWord) -> Result<Self> {
        if word.len() != 1 << m {
            return Err(Error::Dimension(format!("parity word of {} bits for m = {m}", word.len())));
        }
        Ok(Self { m, word })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn word(&self) -> &BitWord {
        &self.word
    }

    pub fn get(&self, x: u32) -> u8 {
        self.word.get(x as usize) as u8
    }

    pub fn to_hex(&self) -> String {
        self.word.to_hex()
    }

    /// `Σ_x coeffs(x) (-1)^{c(x)}`.
    pub fn value(&self, coeffs: &CoefficientTable) -> Result<ExactScalar> {
        if coeffs.m() != self.m {
            return Err(Error::Dimension(format!("coefficients for m = {}, parity for m = {}", coeffs.m(), self.m)));
        }
        Ok((0..1u32 << self.m)
            .map(|x| if self.get(x) == 1 { -coeffs.value(x) } else { coeffs.value(x) })
            .sum())
    }

    /// Algebraic normal form: the monomials (party masks) whose XOR is `c`.
    pub fn anf(&self) -> Vec<u32> {
        let n = 1usize << self.m;
        let mut coef: Vec<u8> = (0..n).map(|x| self.word.get(x) as u8).collect();
        for b in 0..self.m {
            let bit = 1 << b;
            for x in 0..n {
                if x & bit != 0 {
                    coef[x] ^= coef[x ^ bit];
                }
            }
        }
        (0..n as u32).filter(|&t| coef[t as usize] == 1).collect()
    }
}

/// The monomials available to a graph; their span plus constants is the set of
/// achievable parity functions (the empty monomial is the constant 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParitySubspace {
    m: usize,
    basis: Vec<u32>,
}

impl ParitySubspace {
    pub fn m(&self) -> usize {
        self.m
    }

    /// Monomials as party masks, ascending.
    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn contains_monomial(&self, t: u32) -> bool {
        self.basis.binary_search(&t).is_ok()
    }

    /// The function `x ↦ ∏_{t∈T} x_t` as a `2^m`-bit word.
    pub fn monomial_word(&self, t: u32) -> BitWord {
        BitWord::from_fn(1 << self.m, |x| x as u32 & t == t)
    }
}

pub fn parity_basis(g: &CommGraph) -> ParitySubspace {
    let deps = g.dependency_sets();
    let mut basis = HashSet::new();
    for &d in deps.masks() {
        let mut sub = d;
        loop {
            basis.insert(sub);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & d;
        }
    }
    let mut basis: Vec<u32> = basis.into_iter().collect();
    basis.sort_unstable();
    ParitySubspace { m: g.m(), basis }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxResult {
    pub value: ExactScalar,
    pub best_parity: ParityFunction,
    pub witness: DeterministicStrategy,
    pub dimension: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxOptions {
    pub dim_cap: usize,
}

impl Default for MaxOptions {
    fn default() -> Self {
        Self { dim_cap: DEFAULT_DIM_CAP }
    }
}

fn check_m(g: &CommGraph, coeffs: &CoefficientTable) -> Result<()> {
    if g.m() != coeffs.m() {
        return Err(Error::Dimension(format!("graph has m = {}, coefficients have m = {}", g.m(), coeffs.m())));
    }
    Ok(())
}

/// Strictly better candidate: lower cost, then numerically smaller word.
fn better(cost: i128, word: &[u64], best_cost: i128, best: &[u64]) -> bool {
    cost < best_cost || (cost == best_cost && word.iter().rev().lt(best.iter().rev()))
}

/// Minimizes `cost` over the span of `basis` by Gray-code enumeration, in
/// parallel chunks, reducing to (lowest cost, smallest word).
fn search_span(basis: &[Vec<u64>], limbs: usize, cost: impl Fn(&[u64]) -> i128 + Sync) -> (i128, Vec<u64>) {
    let dim = basis.len();
    let chunk_bits = dim.saturating_sub(14).min(10);
    let chunk_len = 1u64 << (dim - chunk_bits);
    (0..1u64 << chunk_bits)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * chunk_len;
            let gray = start ^ (start >> 1);
            let mut word = vec![0u64; limbs];
            for (b, v) in basis.iter().enumerate() {
                if gray >> b & 1 == 1 {
                    word.iter_mut().zip(v).for_each(|(w, x)| *w ^= x);
                }
            }
            let mut best_cost = cost(&word);
            let mut best = word.clone();
            for i in start + 1..start + chunk_len {
                let v = &basis[i.trailing_zeros() as usize];
                word.iter_mut().zip(v).for_each(|(w, x)| *w ^= x);
                let c = cost(&word);
                if c <= best_cost && better(c, &word, best_cost, &best) {
                    best_cost = c;
                    best.copy_from_slice(&word);
                }
            }
            (best_cost, best)
        })
        .reduce_with(|a, b| if better(b.0, &b.1, a.0, &a.1) { b } else { a })
        .expect("at least one chunk")
}

/// Exact maximum of `Σ_x coeffs(x)(-1)^{c(x)}` over every parity `c` the
/// graph can produce, with a strategy realising it.
pub fn max_over_graph(g: &CommGraph, coeffs: &CoefficientTable, opts: MaxOptions) -> Result<MaxResult> {
    check_m(g, coeffs)?;
    let m = g.m();
    let space = parity_basis(g);
    if space.dimension() > opts.dim_cap {
        return Err(Error::Capacity { dim: space.dimension(), cap: opts.dim_cap });
    }
    let n = 1usize << m;
    let limbs = n.div_ceil(64);
    let basis: Vec<Vec<u64>> = space.basis().iter().map(|&t| space.monomial_word(t).limbs().to_vec()).collect();

    let (cost, best) = match coeffs.uniform_magnitude() {
        Some(mag) => {
            let sign = coeffs.sign_word();
            let sign = sign.limbs();
            let (d, best) = search_span(&basis, limbs, |w| {
                w.iter().zip(sign).map(|(a, b)| (a ^ b).count_ones() as i128).sum()
            });
            let value = mag * ExactScalar::from_int(n as i64 - 2 * d as i64);
            (value, best)
        }
        None => {
            // Weighted form: value = W - 2 Σ_{c(x)=1} w(x) at a common denominator.
            let e = coeffs.values().iter().map(|v| v.exponent()).max().unwrap_or(0);
            let weights: Vec<i128> = coeffs.values().iter().map(|v| v.numerator_at(e).unwrap()).collect();
            let total: i128 = weights.iter().sum();
            let (s, best) = search_span(&basis, limbs, |w| {
                let mut s = 0i128;
                for (li, &limb) in w.iter().enumerate() {
                    let mut bits = limb;
                    while bits != 0 {
                        s += weights[li * 64 + bits.trailing_zeros() as usize];
                        bits &= bits - 1;
                    }
                }
                s
            });
            (ExactScalar::from_wide(total - 2 * s, e), best)
        }
    };

    let best_parity = ParityFunction { m, word: BitWord::from_limbs(n, best) };
    let witness = strategy_for_parity(g, &g.dependency_sets(), &best_parity)?;
    Ok(MaxResult { value: cost, best_parity, witness, dimension: space.dimension() })
}

/// Assigns each monomial of `c`'s normal form to the lowest-index party that
/// can compute it.
fn strategy_for_parity(g: &CommGraph, deps: &DependencyProfile, c: &ParityFunction) -> Result<DeterministicStrategy> {
    let mut monomials = vec![Vec::new(); g.m()];
    for t in c.anf() {
        let k = deps
            .lowest_cover(t)
            .ok_or_else(|| Error::InvalidStrategy(format!("monomial {:?} not computable", mask_to_parties(t))))?;
        monomials[k - 1].push(t);
    }
    DeterministicStrategy::from_monomials(g, &monomials)
}

/// Strategy whose parity equals the closed-form sign exponent
/// `Σ_{i<j} x_i x_j + (q+1)Σ x_i + (q²-q)/2`: each pair monomial goes to the
/// lowest-index party seeing both inputs, each linear term to its own party and
/// the constant to party 1.
pub fn tp_strategy(g: &CommGraph) -> Result<DeterministicStrategy> {
    let cover = match classify(g)? {
        Classification::PartiallyPaired { pair: (i, j) } => return Err(Error::PartiallyPaired(i, j)),
        Classification::TotallyPaired { cover } => cover,
    };
    let m = g.m();
    let q = q_of(m) as u64;
    let mut monomials = vec![Vec::new(); m];
    for ((i, j), k) in cover {
        monomials[k - 1].push(1 << (i - 1) | 1 << (j - 1));
    }
    if (q + 1) % 2 == 1 {
        for (i, list) in monomials.iter_mut().enumerate() {
            list.push(1 << i);
        }
    }
    if ((q * q - q) / 2) % 2 == 1 {
        monomials[0].push(0);
    }
    DeterministicStrategy::from_monomials(g, &monomials)
}

/// Exact delta table: `P(a|x) = 1` iff `a = a(x)`.
pub fn strategy_to_table(s: &DeterministicStrategy) -> CorrelationTable {
    let m = s.m();
    let cols = 1u32 << m;
    let mut numerators = vec![0i64; 1 << (2 * m)];
    for x in 0..cols {
        numerators[((x as usize) << m) | s.outputs(x) as usize] = 1;
    }
    CorrelationTable::exact(m, 0, numerators).expect("dimensions fixed by m")
}

/// `Σ_x coeffs(x) (-1)^{Σ_i a_i(x)}`.
pub fn eval_strategy(s: &DeterministicStrategy, coeffs: &CoefficientTable) -> Result<ExactScalar> {
    if s.m() != coeffs.m() {
        return Err(Error::Dimension(format!("strategy has m = {}, coefficients have m = {}", s.m(), coeffs.m())));
    }
    s.parity_function().value(coeffs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForceResult {
    pub value: ExactScalar,
    /// Number of strategies covered, `Π_i 2^{2^{|Dep(i)|}}`.
    pub strategies: u128,
    pub distinct_parities: usize,
    pub witness: DeterministicStrategy,
}

/// `Π_i 2^{2^{|Dep(i)|}}`, or `None` on overflow.
pub fn strategy_count(g: &CommGraph) -> Option<u128> {
    let deps = g.dependency_sets();
    deps.masks().iter().try_fold(1u128, |acc, d| {
        let table_bits = 1u32 << d.count_ones();
        let tables = 1u128.checked_shl(table_bits).filter(|_| table_bits < 128)?;
        acc.checked_mul(tables)
    })
}

enum Reach {
    Dense(Vec<u64>),
    Sparse(HashSet<u64>),
}

impl Reach {
    fn new(word_bits: usize) -> Self {
        if word_bits <= 16 {
            Reach::Dense(vec![0; (1usize << word_bits).div_ceil(64)])
        } else {
            Reach::Sparse(HashSet::new())
        }
    }

    fn insert(&mut self, w: u64) {
        match self {
            Reach::Dense(b) => b[(w / 64) as usize] |= 1 << (w % 64),
            Reach::Sparse(s) => {
                s.insert(w);
            }
        }
    }

    fn contains(&self, w: u64) -> bool {
        match self {
            Reach::Dense(b) => b[(w / 64) as usize] >> (w % 64) & 1 == 1,
            Reach::Sparse(s) => s.contains(&w),
        }
    }

    fn words(&self) -> Vec<u64> {
        match self {
            Reach::Dense(b) => b
                .iter()
                .enumerate()
                .flat_map(|(i, &limb)| {
                    (0..64).filter(move |k| limb >> k & 1 == 1).map(move |k| i as u64 * 64 + k)
                })
                .collect(),
            Reach::Sparse(s) => {
                let mut v: Vec<u64> = s.iter().copied().collect();
                v.sort_unstable();
                v
            }
        }
    }
}

/// Exhaustive maximum over every deterministic strategy of the graph.
///
/// Every combination of per-party truth tables is covered. Combinations are
/// folded party by party into the set of reachable global parity words, so
/// strategies agreeing on their partial parity are visited once; each distinct
/// final parity is scored by summing the signed coefficients directly, and the
/// winning strategy's delta table is scored again with [`evaluate`]. Limited
/// to `m ≤ 6` and `strategy_count(g) ≤ cap`.
pub fn brute_force_max(g: &CommGraph, coeffs: &CoefficientTable, cap: u128) -> Result<BruteForceResult> {
    check_m(g, coeffs)?;
    let m = g.m();
    if m > 6 {
        return Err(Error::Unsupported(format!("brute force limited to m <= 6, got {m}")));
    }
    let count = strategy_count(g);
    match count {
        Some(c) if c <= cap => {}
        _ => {
            let log2: u32 = g.dependency_sets().masks().iter().map(|d| 1u32 << d.count_ones()).sum();
            return Err(Error::StrategyCap { count: format!("2^{log2}"), cap });
        }
    }
    let count = count.unwrap();
    let deps = g.dependency_sets();
    let n = 1u32 << m;

    // lifts[i][f]: parity word contributed by party i using truth table f.
    let lifts: Vec<Vec<u64>> = deps
        .masks()
        .iter()
        .map(|&d| {
            let width = 1u32 << d.count_ones();
            let locals: Vec<u32> = (0..n).map(|x| restrict(x, d)).collect();
            (0..1u64 << width)
                .map(|f| (0..n).filter(|&x| f >> locals[x as usize] & 1 == 1).map(|x| 1u64 << x).sum())
                .collect()
        })
        .collect();

    let mut layers = vec![{
        let mut r = Reach::new(n as usize);
        r.insert(0);
        r
    }];
    for lift in &lifts {
        let prev = layers.last().unwrap().words();
        let mut next = Reach::new(n as usize);
        for w in prev {
            for &l in lift {
                next.insert(w ^ l);
            }
        }
        layers.push(next);
    }

    let e = coeffs.values().iter().map(|v| v.exponent()).max().unwrap_or(0);
    let weights: Vec<i128> = coeffs.values().iter().map(|v| v.numerator_at(e).unwrap()).collect();
    let finals = layers.last().unwrap().words();
    let (best_word, best_score) = finals
        .iter()
        .map(|&c| {
            let score: i128 = (0..n as usize).map(|x| if c >> x & 1 == 1 { -weights[x] } else { weights[x] }).sum();
            (c, score)
        })
        .fold(None, |acc: Option<(u64, i128)>, (c, s)| match acc {
            Some((_, bs)) if bs >= s => acc,
            _ => Some((c, s)),
        })
        .expect("the zero strategy is always reachable");

    // Walk back through the layers to recover one strategy per party.
    let mut choice = vec![0u64; m];
    let mut cur = best_word;
    for i in (0..m).rev() {
        let f = lifts[i]
            .iter()
            .position(|&l| layers[i].contains(cur ^ l))
            .expect("reachable word has a predecessor");
        choice[i] = f as u64;
        cur ^= lifts[i][f];
    }
    let tables = deps
        .masks()
        .iter()
        .zip(&choice)
        .map(|(&d, &f)| PartyTable { dep_mask: d, bits: BitWord::from_limbs(1 << d.count_ones(), vec![f]) })
        .collect();
    let witness = DeterministicStrategy::from_tables(g, tables)?;
    let value = evaluate(&strategy_to_table(&witness), coeffs)?
        .exact()
        .expect("delta tables are exact");
    debug_assert_eq!(value, ExactScalar::from_wide(best_score, e));
    Ok(BruteForceResult { value, strategies: count, distinct_parities: finals.len(), witness })
}
