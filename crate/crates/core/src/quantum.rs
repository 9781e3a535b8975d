//! GHZ measurement statistics and the search for the quantum maximum.
//!
//! Each party measures the observable `n̂·σ` with `n̂ = (sin θ cos φ, sin θ sin φ, cos θ)`
//! chosen by its input bit. On the equator (`θ = π/2`) the full correlator on
//! the GHZ state has the closed form `E(x) = cos(Σ_i φ_i^{x_i})`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coeffs::{q_of, CoefficientTable, Method, svetlichny_coeffs};
use crate::error::{check_party_count, Error, Result};
use crate::table::CorrelationTable;

pub const MAX_GHZ_PARTIES: usize = 10;
pub const MAX_TABLE_PARTIES: usize = 8;
pub const MAX_GENERAL_PARTIES: usize = 4;
pub const DEFAULT_RESTARTS: usize = 32;
pub const DEFAULT_SEED: u64 = 0x005e_ed0f_ab1e;

/// Unit-norm state on `m` qubits; qubit `k` is bit `k` of the amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    m: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Applies a 2×2 matrix to one qubit in place.
    pub fn apply(&mut self, qubit: usize, u: &[[Complex64; 2]; 2]) {
        let bit = 1usize << qubit;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[i | bit] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    }
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz(m: usize) -> Result<StateVector> {
    check_party_count(m, 2, MAX_GHZ_PARTIES)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << m];
    amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[(1 << m) - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    Ok(StateVector { m, amps })
}

/// Measurement directions, indexed `[party][setting]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngleSet {
    m: usize,
    phi: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<Vec<[f64; 2]>>,
}

impl AngleSet {
    pub fn equatorial(phi: Vec<[f64; 2]>) -> Result<Self> {
        check_party_count(phi.len(), 2, MAX_GHZ_PARTIES)?;
        Ok(Self { m: phi.len(), phi, theta: None })
    }

    pub fn general(theta: Vec<[f64; 2]>, phi: Vec<[f64; 2]>) -> Result<Self> {
        check_party_count(phi.len(), 2, MAX_GHZ_PARTIES)?;
        if theta.len() != phi.len() {
            return Err(Error::Dimension("theta and phi need one pair per party".into()));
        }
        Ok(Self { m: phi.len(), phi, theta: Some(theta) })
    }

    /// Uniformly random equatorial angles.
    pub fn random_equatorial(m: usize, rng: &mut impl Rng) -> Result<Self> {
        Self::equatorial((0..m).map(|_| [rng.random_range(0.0..TAU), rng.random_range(0.0..TAU)]).collect())
    }

    /// Directions uniform on the sphere.
    pub fn random_general(m: usize, rng: &mut impl Rng) -> Result<Self> {
        let mut theta = Vec::with_capacity(m);
        let mut phi = Vec::with_capacity(m);
        for _ in 0..m {
            let t: [f64; 2] = std::array::from_fn(|_| rng.random_range(-1.0f64..1.0).acos());
            theta.push(t);
            phi.push([rng.random_range(0.0..TAU), rng.random_range(0.0..TAU)]);
        }
        Self::general(theta, phi)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_equatorial(&self) -> bool {
        self.theta.is_none()
    }

    pub fn phi(&self) -> &[[f64; 2]] {
        &self.phi
    }

    pub fn theta(&self) -> Option<&[[f64; 2]]> {
        self.theta.as_deref()
    }

    /// `(θ, φ)` of 1-based party `i` under setting `x`.
    pub fn direction(&self, i: usize, x: u8) -> (f64, f64) {
        let theta = self.theta.as_ref().map_or(FRAC_PI_2, |t| t[i - 1][x as usize]);
        (theta, self.phi[i - 1][x as usize])
    }

    /// Wraps φ into `[0, 2π)` and θ into `[0, π]` without changing any direction.
    fn normalized(mut self) -> Self {
        for p in 0..self.m {
            for s in 0..2 {
                if let Some(theta) = self.theta.as_mut() {
                    let mut t = theta[p][s].rem_euclid(TAU);
                    if t > PI {
                        t = TAU - t;
                        self.phi[p][s] += PI;
                    }
                    theta[p][s] = t;
                }
                self.phi[p][s] = self.phi[p][s].rem_euclid(TAU);
            }
        }
        self
    }
}

fn observable(theta: f64, phi: f64) -> [[Complex64; 2]; 2] {
    let (st, ct) = theta.sin_cos();
    [
        [Complex64::new(ct, 0.0), Complex64::from_polar(st, -phi)],
        [Complex64::from_polar(st, phi), Complex64::new(-ct, 0.0)],
    ]
}

/// Rows are the conjugated `+1` and `-1` eigenvectors of `n̂·σ`, so applying it
/// maps amplitudes into the measurement basis (outcome bit 0 ↔ `+1`).
fn measurement_basis(theta: f64, phi: f64) -> [[Complex64; 2]; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    let e = Complex64::from_polar(1.0, -phi);
    [
        [Complex64::new(c, 0.0), e * s],
        [Complex64::new(s, 0.0), -e * c],
    ]
}

fn check_input(angles: &AngleSet, x: u32) -> Result<()> {
    if (x as u64) >> angles.m != 0 {
        return Err(Error::Dimension(format!("input word {x:#b} too wide for m = {}", angles.m)));
    }
    Ok(())
}

/// `⟨GHZ| ⊗_i n̂_i·σ |GHZ⟩` by explicit tensor contraction.
pub fn correlator_contraction(angles: &AngleSet, x: u32) -> Result<f64> {
    check_input(angles, x)?;
    let psi = ghz(angles.m)?;
    let mut out = psi.clone();
    for i in 1..=angles.m {
        let (t, p) = angles.direction(i, (x >> (i - 1) & 1) as u8);
        out.apply(i - 1, &observable(t, p));
    }
    Ok(psi.inner(&out).re)
}

/// `cos(Σ_i φ_i^{x_i})`; equatorial angle sets only.
pub fn correlator_closed(angles: &AngleSet, x: u32) -> Result<f64> {
    check_input(angles, x)?;
    if !angles.is_equatorial() {
        return Err(Error::Unsupported("closed-form correlator needs equatorial angles".into()));
    }
    Ok(phase_sum(&angles.phi, x).cos())
}

#[inline]
fn phase_sum(phi: &[[f64; 2]], x: u32) -> f64 {
    phi.iter().enumerate().map(|(i, p)| p[(x >> i & 1) as usize]).sum()
}

/// Correlator for input `x`: closed form on the equator, contraction otherwise.
pub fn correlator(angles: &AngleSet, x: u32) -> Result<f64> {
    if angles.is_equatorial() {
        correlator_closed(angles, x)
    } else {
        correlator_contraction(angles, x)
    }
}

/// `Σ_x μ(x) E(x)`.
pub fn quantum_value(angles: &AngleSet, coeffs: &CoefficientTable) -> Result<f64> {
    if angles.m != coeffs.m() {
        return Err(Error::Dimension(format!("angles for m = {}, coefficients for m = {}", angles.m, coeffs.m())));
    }
    (0..1u32 << angles.m)
        .map(|x| Ok(coeffs.value(x).to_f64() * correlator(angles, x)?))
        .sum()
}

/// Full outcome distribution of the GHZ measurements.
pub fn measurement_table(angles: &AngleSet) -> Result<CorrelationTable> {
    let m = angles.m;
    check_party_count(m, 2, MAX_TABLE_PARTIES)?;
    let psi = ghz(m)?;
    let cols = 1usize << m;
    let mut values = vec![0.0; cols * cols];
    for x in 0..cols as u32 {
        let mut rotated = psi.clone();
        for i in 1..=m {
            let (t, p) = angles.direction(i, (x >> (i - 1) & 1) as u8);
            rotated.apply(i - 1, &measurement_basis(t, p));
        }
        for (a, amp) in rotated.amps.iter().enumerate() {
            values[((x as usize) << m) | a] = amp.norm_sqr();
        }
    }
    CorrelationTable::float(m, values)
}

/// `2^{m-q-1/2}`.
pub fn quantum_target(m: usize) -> f64 {
    2f64.powf(m as f64 - q_of(m) as f64 - 0.5)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeOptions {
    pub restarts: usize,
    pub tol: f64,
    pub seed: u64,
    /// Optimize polar angles too (m ≤ 4).
    pub general: bool,
    pub max_sweeps: usize,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self { restarts: DEFAULT_RESTARTS, tol: 1e-6, seed: DEFAULT_SEED, general: false, max_sweeps: 400 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimization {
    pub angles: AngleSet,
    pub value: f64,
    pub target: f64,
    pub converged: bool,
    /// 0 is the analytic seed, `1..=restarts` the random starts.
    pub restart: usize,
    pub seed: u64,
}

/// Objective over a flat parameter vector: `2m` azimuths, then `2m` polar
/// angles in general mode.
struct Objective<'a> {
    m: usize,
    general: bool,
    coeffs: &'a CoefficientTable,
    weights: Vec<f64>,
}

impl Objective<'_> {
    fn angles(&self, params: &[f64]) -> AngleSet {
        let m = self.m;
        let phi = (0..m).map(|i| [params[2 * i], params[2 * i + 1]]).collect();
        if self.general {
            let theta = (0..m).map(|i| [params[2 * m + 2 * i], params[2 * m + 2 * i + 1]]).collect();
            AngleSet::general(theta, phi).unwrap()
        } else {
            AngleSet::equatorial(phi).unwrap()
        }
    }

    fn value(&self, params: &[f64]) -> f64 {
        if self.general {
            return quantum_value(&self.angles(params), self.coeffs).unwrap();
        }
        let phi: Vec<[f64; 2]> = (0..self.m).map(|i| [params[2 * i], params[2 * i + 1]]).collect();
        self.weights
            .iter()
            .enumerate()
            .map(|(x, w)| w * phase_sum(&phi, x as u32).cos())
            .sum()
    }
}

const GRID: usize = 16;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximizes a function of one angle. The objective is a sinusoid in every
/// coordinate, so the best of a coarse grid brackets the maximum and
/// golden-section search refines it.
fn line_search(mut f: impl FnMut(f64) -> f64, center: f64) -> (f64, f64) {
    let step = TAU / GRID as f64;
    let (mut best_t, mut best_v) = (center, f(center));
    for k in 1..GRID {
        let t = center + step * k as f64;
        let v = f(t);
        if v > best_v {
            best_t = t;
            best_v = v;
        }
    }
    let (mut lo, mut hi) = (best_t - step, best_t + step);
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > 1e-11 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    let t = 0.5 * (lo + hi);
    let v = f(t);
    if v >= best_v {
        (t, v)
    } else {
        (best_t, best_v)
    }
}

fn coordinate_ascent(obj: &Objective, mut params: Vec<f64>, max_sweeps: usize) -> (Vec<f64>, f64) {
    let mut value = obj.value(&params);
    for _ in 0..max_sweeps {
        let before = value;
        for k in 0..params.len() {
            let mut trial = params.clone();
            let (t, v) = line_search(
                |t| {
                    trial[k] = t;
                    obj.value(&trial)
                },
                params[k],
            );
            if v > value {
                params[k] = t;
                value = v;
            }
        }
        if value - before < 1e-14 {
            break;
        }
    }
    (params, value)
}

/// Starting point with `φ_i^1 - φ_i^0 = π/2` for every party and the common
/// phase chosen from multiples of `π/4`.
fn analytic_seed(obj: &Objective) -> Vec<f64> {
    let m = obj.m;
    let base = |offset: f64| {
        let mut p: Vec<f64> = (0..m).flat_map(|_| [0.0, FRAC_PI_2]).collect();
        p[0] += offset;
        p[1] += offset;
        if obj.general {
            p.extend(std::iter::repeat_n(FRAC_PI_2, 2 * m));
        }
        p
    };
    (0..8)
        .map(|k| base(k as f64 * FRAC_PI_4))
        .max_by(|a, b| obj.value(a).total_cmp(&obj.value(b)))
        .unwrap()
}

/// Multi-start coordinate ascent for `⟨S_m⟩` on the GHZ state.
///
/// Restart 0 starts from the analytic seed, restarts `1..=restarts` from
/// random points drawn from `seed`. The best value wins, ties going to the
/// lowest restart index, so the result does not depend on thread count.
/// Falling short of the target is reported through `converged`, not an error.
pub fn optimize_angles(m: usize, opts: OptimizeOptions) -> Result<Optimization> {
    check_party_count(m, 2, MAX_TABLE_PARTIES)?;
    if opts.general && m > MAX_GENERAL_PARTIES {
        return Err(Error::Unsupported(format!("general mode limited to m <= {MAX_GENERAL_PARTIES}")));
    }
    let coeffs = svetlichny_coeffs(m, Method::Closed)?;
    let obj = Objective {
        m,
        general: opts.general,
        weights: coeffs.values().iter().map(|v| v.to_f64()).collect(),
        coeffs: &coeffs,
    };
    let dims = if opts.general { 4 * m } else { 2 * m };
    let (restart, params, value) = (0..=opts.restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                analytic_seed(&obj)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(r as u64);
                (0..dims)
                    .map(|k| if k < 2 * m { rng.random_range(0.0..TAU) } else { rng.random_range(0.0..PI) })
                    .collect()
            };
            let (p, v) = coordinate_ascent(&obj, start, opts.max_sweeps);
            (r, p, v)
        })
        .reduce_with(|a, b| if b.2 > a.2 || (b.2 == a.2 && b.0 < a.0) { b } else { a })
        .unwrap();
    let target = quantum_target(m);
    Ok(Optimization {
        angles: obj.angles(&params).normalized(),
        value,
        target,
        converged: value >= target - opts.tol,
        restart,
        seed: opts.seed,
    })
}
