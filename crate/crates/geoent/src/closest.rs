//! Alternating fixed-point solver for the stationarity system of the
//! distance functional, with seeded multi-restart.
//!
//! Extremizing D^2 = <phi - psi|phi - psi> over the entries of one factor,
//! holding the others fixed, gives the update
//!
//! ```text
//! a_i  <-  ( sum_{jk...} chi_{ijk...} b*_j c*_k ... ) / (N_B N_C ...)
//! ```
//!
//! (the conjugate of the stationarity equation solved for that factor). A
//! sweep applies this once per factor in order, Gauss-Seidel style, so D^2
//! never increases. Each converged run is a stationary point at which the
//! overlap <psi|phi> is real and equals prod N_X; the entanglement reported
//! is `1 - max prod N_X` over the deduplicated extrema.

use crate::qstate::{distance_sq, factor_norms, overlap, ProductState, PureState, StateError};
use crate::rng::{subseed, Xoshiro256pp};
use num_complex::Complex64;
use thiserror::Error;

/// Values below this are treated as a collapsed (identically zero) factor.
const ZERO_COLLAPSE_TOL: f64 = 1e-280;
/// Two extrema are the same branch if their norm products differ by less
/// than this and their normalized expansions have fidelity above
/// `1 - DEDUP_TOL`.
const DEDUP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("factor {factor} is the zero vector")]
    ZeroFactor { factor: usize },
    #[error("contraction for factor {factor} collapsed to zero")]
    ZeroCollapse { factor: usize },
    #[error("no restart converged; best residual achieved {best_residual:.3e}")]
    NoConvergence { best_residual: f64 },
    #[error("state must be normalized (norm^2 = {norm_sqr:.6e})")]
    NotNormalized { norm_sqr: f64 },
}

/// Knobs for [`find_extrema`]. Defaults: 32 restarts, 10000 sweeps,
/// relative D^2 tolerance 1e-12, residual tolerance 1e-10, seed 0.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub restarts: usize,
    pub max_sweeps: usize,
    pub tol_delta: f64,
    pub tol_residual: f64,
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            restarts: 32,
            max_sweeps: 10_000,
            tol_delta: 1e-12,
            tol_residual: 1e-10,
            rng_seed: 0,
        }
    }
}

/// A converged stationary point of the distance functional.
#[derive(Debug, Clone)]
pub struct ExtremumResult {
    /// Gauge-fixed product state: equal factor norms, real-nonnegative overlap.
    pub product: ProductState,
    /// Per-factor norms N_X.
    pub norms: Vec<f64>,
    /// prod N_X = cos^2(theta_C) at the extremum.
    pub norm_product: f64,
    /// sqrt(prod N_X).
    pub cos_theta: f64,
    /// D_C^2 = 1 - prod N_X.
    pub dist_sq: f64,
    /// D_N^2 = 2 (1 - cos theta_C): the normalized-product-state distance.
    pub dist_sq_normalized: f64,
    /// Stationarity residual (see [`residual`]).
    pub residual: f64,
    /// Sweeps consumed by the run that found this extremum.
    pub sweeps: usize,
    pub converged: bool,
    /// True for the trivial stationary point phi = 0 (a zero-collapse run).
    pub degenerate: bool,
}

impl ExtremumResult {
    fn from_product(
        product: ProductState,
        residual: f64,
        sweeps: usize,
        converged: bool,
    ) -> ExtremumResult {
        let norms = factor_norms(&product);
        let norm_product: f64 = norms.iter().product();
        let cos_theta = norm_product.max(0.0).sqrt();
        ExtremumResult {
            norms,
            norm_product,
            cos_theta,
            dist_sq: 1.0 - norm_product,
            dist_sq_normalized: 2.0 * (1.0 - cos_theta),
            residual,
            sweeps,
            converged,
            degenerate: false,
            product,
        }
    }
}

/// All deduplicated extrema found by the restarts, sorted by norm product
/// descending; `best()` is the nearest product state.
#[derive(Debug, Clone)]
pub struct ExtremaReport {
    pub extrema: Vec<ExtremumResult>,
    best_index: usize,
    /// 1 - best norm product = sin^2(theta_C).
    pub entanglement: f64,
}

impl ExtremaReport {
    pub fn best(&self) -> &ExtremumResult {
        &self.extrema[self.best_index]
    }
}

fn require_match(psi: &PureState, phi: &ProductState) -> Result<(), SolveError> {
    if !phi.matches(psi.shape()) {
        return Err(SolveError::State(phi.mismatch_error(psi.shape())));
    }
    Ok(())
}

fn digit(flat: usize, stride: usize, dim: usize) -> usize {
    (flat / stride) % dim
}

/// Contract chi against the conjugates of every factor except `skip`:
/// out[i] = sum over the other indices of chi_{...i...} * prod conj(entries).
fn contract_except(psi: &PureState, phi: &ProductState, skip: usize) -> Vec<Complex64> {
    let dims = psi.shape().dims();
    let strides = psi.shape().strides();
    let factors = phi.factors();
    let mut out = vec![Complex64::new(0.0, 0.0); dims[skip]];
    for (flat, &chi) in psi.amplitudes().iter().enumerate() {
        if chi.re == 0.0 && chi.im == 0.0 {
            continue;
        }
        let mut prod = chi;
        for f in 0..dims.len() {
            if f == skip {
                continue;
            }
            prod *= factors[f][digit(flat, strides[f], dims[f])].conj();
        }
        out[digit(flat, strides[skip], dims[skip])] += prod;
    }
    out
}

fn norms_product_except(norms: &[f64], skip: usize) -> f64 {
    norms
        .iter()
        .enumerate()
        .filter(|&(f, _)| f != skip)
        .map(|(_, &n)| n)
        .product()
}

/// One cyclic Gauss-Seidel pass: each factor is replaced by the conjugated
/// contraction of chi against the other *current* factors divided by the
/// product of their norms, so later updates see earlier ones.
pub fn sweep(psi: &PureState, phi: &ProductState) -> Result<ProductState, SolveError> {
    require_match(psi, phi)?;
    let mut factors = phi.factors().to_vec();
    let mut norms = factor_norms(phi);
    for (factor, norm) in norms.iter().enumerate() {
        if *norm <= ZERO_COLLAPSE_TOL {
            return Err(SolveError::ZeroFactor { factor });
        }
    }
    for x in 0..factors.len() {
        let current = ProductState::new(factors.clone())?;
        let contraction = contract_except(psi, &current, x);
        let other = norms_product_except(&norms, x);
        let updated: Vec<Complex64> = contraction.iter().map(|&c| c / other).collect();
        let norm: f64 = updated.iter().map(|a| a.norm_sqr()).sum();
        if !norm.is_finite() || norm <= ZERO_COLLAPSE_TOL {
            return Err(SolveError::ZeroCollapse { factor: x });
        }
        factors[x] = updated;
        norms[x] = norm;
    }
    Ok(ProductState::new(factors)?)
}

/// Stationarity residual: the worst factor's Euclidean gap between the two
/// sides of its (conjugated) stationarity equation, normalized by
/// max(1, prod N_X). Zero exactly at stationary points.
pub fn residual(psi: &PureState, phi: &ProductState) -> Result<f64, SolveError> {
    require_match(psi, phi)?;
    let norms = factor_norms(phi);
    let norm_product: f64 = norms.iter().product();
    let mut worst = 0.0f64;
    for x in 0..phi.factor_count() {
        let contraction = contract_except(psi, phi, x);
        let other = norms_product_except(&norms, x);
        let gap_sq: f64 = phi.factors()[x]
            .iter()
            .zip(contraction.iter())
            .map(|(&a, &c)| (a * other - c).norm_sqr())
            .sum();
        worst = worst.max(gap_sq.sqrt());
    }
    Ok(worst / norm_product.max(1.0))
}

/// Rescale so every factor carries the same norm (prod N_X)^(1/F) and apply
/// a global phase to the first factor making <psi|phi> real-nonnegative.
/// The expansion is unchanged up to that global phase, so the residual and
/// all norms are preserved.
pub fn gauge_fix(psi: &PureState, phi: &ProductState) -> Result<ProductState, SolveError> {
    require_match(psi, phi)?;
    let norms = factor_norms(phi);
    for (factor, &norm) in norms.iter().enumerate() {
        if norm <= ZERO_COLLAPSE_TOL {
            return Err(SolveError::ZeroFactor { factor });
        }
    }
    let norm_product: f64 = norms.iter().product();
    let target = norm_product.powf(1.0 / phi.factor_count() as f64);
    let mut factors: Vec<Vec<Complex64>> = phi
        .factors()
        .iter()
        .zip(norms.iter())
        .map(|(factor, &norm)| {
            let scale = (target / norm).sqrt();
            factor.iter().map(|&a| a * scale).collect()
        })
        .collect();
    let rescaled = ProductState::new(factors.clone())?;
    let ov = overlap(psi, &rescaled)?;
    if ov.norm() > 0.0 {
        let phase = ov.conj() / ov.norm();
        for entry in &mut factors[0] {
            *entry *= phase;
        }
    }
    Ok(ProductState::new(factors)?)
}

/// Passes iff the norm product respects the Cauchy-Schwarz bound
/// prod N_X <= 1 (+1e-9 slack).
pub fn cauchy_schwarz_check(result: &ExtremumResult) -> bool {
    result.norm_product <= 1.0 + 1e-9
}

fn random_product(shape_dims: &[usize], rng: &mut Xoshiro256pp) -> ProductState {
    let factors = shape_dims
        .iter()
        .map(|&dim| (0..dim).map(|_| rng.standard_complex()).collect())
        .collect();
    ProductState::new(factors).expect("gaussian factors are finite and nonempty")
}

/// |<phi1_hat|phi2_hat>|^2 computed factor by factor.
fn product_fidelity(a: &ProductState, b: &ProductState) -> f64 {
    let mut inner = Complex64::new(1.0, 0.0);
    for (fa, fb) in a.factors().iter().zip(b.factors()) {
        let dot: Complex64 = fa.iter().zip(fb.iter()).map(|(x, y)| x.conj() * y).sum();
        inner *= dot;
    }
    let na: f64 = factor_norms(a).iter().product();
    let nb: f64 = factor_norms(b).iter().product();
    if na <= 0.0 || nb <= 0.0 {
        return 0.0;
    }
    inner.norm_sqr() / (na * nb)
}

fn zero_extremum(psi: &PureState, sweeps: usize) -> ExtremumResult {
    let factors = psi
        .shape()
        .dims()
        .iter()
        .map(|&dim| vec![Complex64::new(0.0, 0.0); dim])
        .collect();
    let product = ProductState::new(factors).expect("zero factors are structurally valid");
    ExtremumResult {
        norms: vec![0.0; psi.shape().factor_count()],
        norm_product: 0.0,
        cos_theta: 0.0,
        dist_sq: 1.0,
        dist_sq_normalized: 2.0,
        residual: 0.0,
        sweeps,
        converged: true,
        degenerate: true,
        product,
    }
}

/// Run `cfg.restarts` independent fixed-point iterations from seeded random
/// complex Gaussian starts, keep the converged stationary points, dedupe
/// them, and report the entanglement `1 - max prod N_X`.
///
/// Restarts draw from independent streams derived from `cfg.rng_seed`, so
/// the report is identical for a given seed regardless of scheduling. Runs
/// whose contraction collapses to the zero vector are recorded as the
/// trivial stationary point phi = 0 and excluded from `best()` unless
/// nothing else converged.
pub fn find_extrema(psi: &PureState, cfg: &SolverConfig) -> Result<ExtremaReport, SolveError> {
    let norm_sqr = psi.norm_sqr();
    if (norm_sqr - 1.0).abs() > crate::qstate::NORMALIZATION_TOL {
        return Err(SolveError::NotNormalized { norm_sqr });
    }

    let mut converged_runs: Vec<(usize, ExtremumResult)> = Vec::new();
    let mut zero_runs: Vec<ExtremumResult> = Vec::new();
    let mut best_failed_residual = f64::INFINITY;

    for restart in 0..cfg.restarts {
        let mut rng = Xoshiro256pp::new(subseed(cfg.rng_seed, restart as u64));
        let start = random_product(psi.shape().dims(), &mut rng);
        let mut phi = match gauge_fix(psi, &start) {
            Ok(fixed) => fixed,
            Err(_) => start,
        };
        let mut prev_d2 = distance_sq(psi, &phi)?;
        let mut sweeps_done = 0;
        let mut last_residual = f64::INFINITY;
        let mut outcome: Option<ExtremumResult> = None;

        for _ in 0..cfg.max_sweeps {
            let next = match sweep(psi, &phi) {
                Ok(next) => next,
                Err(SolveError::ZeroCollapse { .. }) | Err(SolveError::ZeroFactor { .. }) => {
                    outcome = Some(zero_extremum(psi, sweeps_done));
                    break;
                }
                Err(other) => return Err(other),
            };
            phi = gauge_fix(psi, &next)?;
            sweeps_done += 1;
            let d2 = distance_sq(psi, &phi)?;
            last_residual = residual(psi, &phi)?;
            let rel_change = (d2 - prev_d2).abs() / d2.max(f64::MIN_POSITIVE);
            if rel_change < cfg.tol_delta && last_residual < cfg.tol_residual {
                outcome = Some(ExtremumResult::from_product(
                    phi.clone(),
                    last_residual,
                    sweeps_done,
                    true,
                ));
                break;
            }
            prev_d2 = d2;
        }

        match outcome {
            Some(result) if result.degenerate => zero_runs.push(result),
            Some(result) => converged_runs.push((restart, result)),
            None => best_failed_residual = best_failed_residual.min(last_residual),
        }
    }

    if converged_runs.is_empty() && zero_runs.is_empty() {
        return Err(SolveError::NoConvergence {
            best_residual: best_failed_residual,
        });
    }

    // Sort by norm product descending, restart index ascending, then merge
    // branches that agree in value and in state.
    converged_runs.sort_by(|(ia, a), (ib, b)| {
        b.norm_product
            .partial_cmp(&a.norm_product)
            .expect("norm products are finite")
            .then(ia.cmp(ib))
    });
    let mut extrema: Vec<ExtremumResult> = Vec::new();
    for (_, candidate) in converged_runs {
        let mut merged = false;
        for kept in extrema.iter_mut() {
            if (kept.norm_product - candidate.norm_product).abs() < DEDUP_TOL
                && product_fidelity(&kept.product, &candidate.product) > 1.0 - DEDUP_TOL
            {
                if candidate.residual < kept.residual {
                    *kept = candidate.clone();
                }
                merged = true;
                break;
            }
        }
        if !merged {
            extrema.push(candidate);
        }
    }
    if !zero_runs.is_empty() {
        extrema.push(zero_runs.swap_remove(0));
    }

    let best_index = extrema
        .iter()
        .position(|e| !e.degenerate)
        .unwrap_or(0);
    let entanglement = (1.0 - extrema[best_index].norm_product).clamp(0.0, 1.0);
    Ok(ExtremaReport {
        extrema,
        best_index,
        entanglement,
    })
}
