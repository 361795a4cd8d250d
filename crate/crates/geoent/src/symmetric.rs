//! Constructors and closed-form extremal branches for four exactly solved
//! symmetric q-qubit families, plus their large-q asymptotics.
//!
//! Under the all-equal-factor ansatz (every factor = (alpha0, alpha1)), the
//! stationarity system collapses to two scalar equations with a closed-form
//! solution for:
//!
//! - weighted GHZ: sqrt(p)|0..0> + sqrt(1-p)|1..1>,
//! - W: one excitation shared equally,
//! - ring pairs: cyclic adjacent pairs of excitations (with wrap term),
//! - Dicke(p): equal superposition of all p-excitation basis states.
//!
//! The branch values N^q reported here are the symmetric-ansatz stationary
//! branches; for the GHZ and ring families at larger q the globally nearest
//! product state is basis-aligned and has a larger norm, so these values are
//! always labelled as branch values, never as the global measure.

use crate::qstate::{FactorShape, ProductState, PureState, StateError};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("ghz weight p must lie strictly inside (0, 1), got {p}")]
    BadGhzWeight { p: f64 },
    #[error("dicke excitation count must satisfy 1 <= p <= q-1, got p={p}, q={q}")]
    BadDickeExcitations { p: usize, q: usize },
    #[error("closed forms require q >= 3, got q={q}")]
    TooFewQubits { q: usize },
    #[error(transparent)]
    State(#[from] StateError),
}

/// One of the four exactly solved families.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    /// sqrt(p)|0..0> + sqrt(1-p)|1..1>.
    GhzP(f64),
    /// Single shared excitation.
    W,
    /// Cyclic adjacent excitation pairs, including the wrap term.
    RingPairs,
    /// All combinations of p excitations.
    Dicke(usize),
}

impl FamilyKind {
    /// Canonical CLI label: `ghz:<p>`, `w`, `ring`, `dicke:<p>`.
    pub fn label(&self) -> String {
        match self {
            FamilyKind::GhzP(p) => format!("ghz:{p}"),
            FamilyKind::W => "w".into(),
            FamilyKind::RingPairs => "ring".into(),
            FamilyKind::Dicke(p) => format!("dicke:{p}"),
        }
    }

    /// q -> infinity limit of N^q where the family has a finite nonzero one.
    pub fn large_q_limit(&self) -> Option<f64> {
        match self {
            FamilyKind::W => Some((-1.0f64).exp()),
            FamilyKind::Dicke(p) => {
                let pf = *p as f64;
                Some(pf.powf(pf - 1.0) * (-pf).exp() / factorial(*p - 1))
            }
            FamilyKind::GhzP(_) | FamilyKind::RingPairs => None,
        }
    }
}

/// A family tag plus the qubit count q.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricFamily {
    pub kind: FamilyKind,
    pub q: usize,
}

impl SymmetricFamily {
    pub fn new(kind: FamilyKind, q: usize) -> Result<Self, FamilyError> {
        if q < 3 {
            return Err(FamilyError::TooFewQubits { q });
        }
        match kind {
            FamilyKind::GhzP(p) if !(p > 0.0 && p < 1.0) => Err(FamilyError::BadGhzWeight { p }),
            FamilyKind::Dicke(p) if p < 1 || p > q - 1 => {
                Err(FamilyError::BadDickeExcitations { p, q })
            }
            kind => Ok(SymmetricFamily { kind, q }),
        }
    }
}

/// The all-equal-factor solution: every factor is (alpha0, alpha1), both
/// real-nonnegative by convention.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricAnsatz {
    pub alpha0: f64,
    pub alpha1: f64,
}

impl SymmetricAnsatz {
    /// Common single-factor norm N = alpha0^2 + alpha1^2.
    pub fn factor_norm(&self) -> f64 {
        self.alpha0 * self.alpha0 + self.alpha1 * self.alpha1
    }

    /// The product state with all q factors equal to (alpha0, alpha1).
    pub fn product_state(&self, q: usize) -> ProductState {
        let factor = vec![
            Complex64::new(self.alpha0, 0.0),
            Complex64::new(self.alpha1, 0.0),
        ];
        ProductState::new(vec![factor; q]).expect("ansatz factors are finite and nonempty")
    }
}

/// Closed-form branch value N^q with its reconstructed ansatz.
#[derive(Debug, Clone)]
pub struct ClosedFormResult {
    /// N^q = prod N_X on the symmetric-ansatz branch.
    pub n_q_exact: f64,
    /// Large-q approximation evaluated at this q, for families that have one.
    pub n_q_asymptotic: Option<f64>,
    /// 1 - N^q, the branch entanglement (not necessarily the global measure).
    pub entanglement_branch: f64,
    pub ansatz: SymmetricAnsatz,
}

/// Large-q approximation of N^q at the family's q.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticNq {
    pub value: f64,
    /// False when the family has no closed asymptotic formula and the exact
    /// expression's value is returned instead.
    pub closed_formula: bool,
}

/// Build the normalized q-qubit member of a family.
pub fn build_state(family: &SymmetricFamily) -> Result<PureState, FamilyError> {
    let q = family.q;
    let shape = FactorShape::qubits(q)?;
    let n = shape.total_dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); n];
    match &family.kind {
        FamilyKind::GhzP(p) => {
            amps[0] = Complex64::new(p.sqrt(), 0.0);
            amps[n - 1] = Complex64::new((1.0 - p).sqrt(), 0.0);
        }
        FamilyKind::W => {
            let coeff = Complex64::new(1.0 / (q as f64).sqrt(), 0.0);
            for f in 0..q {
                amps[1 << (q - 1 - f)] = coeff;
            }
        }
        FamilyKind::RingPairs => {
            let coeff = Complex64::new(1.0 / (q as f64).sqrt(), 0.0);
            for f in 0..q {
                let g = (f + 1) % q;
                amps[(1 << (q - 1 - f)) | (1 << (q - 1 - g))] = coeff;
            }
        }
        FamilyKind::Dicke(p) => {
            let coeff = Complex64::new(1.0 / binomial(q as u64, *p as u64).sqrt(), 0.0);
            for (flat, amp) in amps.iter_mut().enumerate() {
                if flat.count_ones() as usize == *p {
                    *amp = coeff;
                }
            }
        }
    }
    Ok(PureState::new(shape, amps)?)
}

/// Closed-form N^q of the symmetric-ansatz branch, with the ansatz
/// reconstructed from the per-case ratio equations.
pub fn closed_form_nq(family: &SymmetricFamily) -> Result<ClosedFormResult, FamilyError> {
    let q = family.q as f64;
    let (n_q, alpha0_sq, alpha1_sq) = match &family.kind {
        FamilyKind::GhzP(p) => {
            let exponent = 1.0 / (q - 2.0);
            let denom = (p.powf(exponent) + (1.0 - p).powf(exponent)).powf(q - 2.0);
            let n_q = p * (1.0 - p) / denom;
            let n = n_q.powf(1.0 / q);
            let scale = n.powf(2.0 * (q - 1.0) / (q - 2.0));
            (n_q, scale / p.powf(exponent), scale / (1.0 - p).powf(exponent))
        }
        FamilyKind::W => {
            let n_q = (1.0 - 1.0 / q).powf(q - 1.0);
            let n = n_q.powf(1.0 / q);
            (n_q, n * (q - 1.0) / q, n / q)
        }
        FamilyKind::RingPairs => {
            let n_q = 4.0 * (q - 2.0).powf(q - 2.0) * q.powf(1.0 - q);
            let n = n_q.powf(1.0 / q);
            (n_q, n * (q - 2.0) / q, n * 2.0 / q)
        }
        FamilyKind::Dicke(p) => {
            let pf = *p as f64;
            let n_q = (pf / q).powf(pf - 1.0)
                * (1.0 - pf / q).powf(q - pf)
                * binomial(family.q as u64 - 1, *p as u64 - 1);
            let n = n_q.powf(1.0 / q);
            (n_q, n * (1.0 - pf / q), n * pf / q)
        }
    };
    Ok(ClosedFormResult {
        n_q_exact: n_q,
        n_q_asymptotic: match family.kind {
            FamilyKind::GhzP(_) | FamilyKind::Dicke(_) => Some(asymptotic_nq(family).value),
            FamilyKind::W | FamilyKind::RingPairs => None,
        },
        entanglement_branch: 1.0 - n_q,
        ansatz: SymmetricAnsatz {
            alpha0: alpha0_sq.sqrt(),
            alpha1: alpha1_sq.sqrt(),
        },
    })
}

/// Large-q approximation of N^q evaluated at the family's q. W has no
/// finite-q approximation (its exact value is returned and the limit is
/// e^-1); the ring family has no asymptote at all, so the exact value is
/// returned with `closed_formula: false`.
pub fn asymptotic_nq(family: &SymmetricFamily) -> AsymptoticNq {
    let q = family.q as f64;
    match &family.kind {
        FamilyKind::GhzP(p) => AsymptoticNq {
            value: (p * (1.0 - p)).sqrt() / 2.0f64.powf(q - 2.0),
            closed_formula: true,
        },
        FamilyKind::W => AsymptoticNq {
            value: (1.0 - 1.0 / q).powf(q - 1.0),
            closed_formula: false,
        },
        FamilyKind::RingPairs => AsymptoticNq {
            value: closed_form_nq(family)
                .expect("ring family is valid for q >= 3")
                .n_q_exact,
            closed_formula: false,
        },
        FamilyKind::Dicke(p) => {
            let pf = *p as f64;
            AsymptoticNq {
                value: pf.powf(pf - 1.0) * (-pf).exp() / factorial(*p - 1),
                closed_formula: true,
            }
        }
    }
}

/// One row of the entanglement-vs-q table.
#[derive(Debug, Clone)]
pub struct Fig2Row {
    pub q: usize,
    pub family: String,
    pub entanglement: f64,
}

/// Branch entanglement 1 - N^q per family per q, ordered family-major.
pub fn fig2_table(
    q_min: usize,
    q_max: usize,
    families: &[FamilyKind],
) -> Result<Vec<Fig2Row>, FamilyError> {
    if q_min < 3 {
        return Err(FamilyError::TooFewQubits { q: q_min });
    }
    let mut rows = Vec::new();
    for kind in families {
        for q in q_min..=q_max {
            let family = SymmetricFamily::new(kind.clone(), q)?;
            let closed = closed_form_nq(&family)?;
            rows.push(Fig2Row {
                q,
                family: kind.label(),
                entanglement: closed.entanglement_branch,
            });
        }
    }
    Ok(rows)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Binomial coefficient in f64: exact integer product up to n = 20,
/// log-gamma beyond that to avoid overflow.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 20 {
        let mut numer: u64 = 1;
        let mut denom: u64 = 1;
        for i in 0..k {
            numer *= n - i;
            denom *= i + 1;
        }
        (numer / denom) as f64
    } else {
        (ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0))
            .exp()
    }
}

/// Lanczos approximation (g = 7, 9 coefficients), valid for x > 0.
#[allow(clippy::excessive_precision)]
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    let x = x - 1.0;
    let mut acc = 0.99999999999980993;
    for (i, &c) in COEFFS.iter().enumerate() {
        acc += c / (x + i as f64 + 1.0);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}
