//! Bipartite machinery: reduced density matrices, Schmidt decompositions,
//! the single-qubit-split quadratic, and the sequential multipartite chain.
//!
//! For a split of the state tensor into subsystems A and B, chi becomes a
//! u x v matrix; the squared singular values of that matrix are the Schmidt
//! coefficients p_k and simultaneously the eigenvalues of both reduced
//! density matrices. Every converged norm product of the `closest` solver
//! on a two-factor state is one of these eigenvalues.

use crate::linalg::{svd, ComplexMatrix, LinalgError};
use crate::qstate::{FactorShape, PureState, StateError};
use num_complex::Complex64;
use thiserror::Error;

/// Default cap on exhaustive permutation search in [`chain_min_over_orders`].
pub const DEFAULT_ORDER_CAP: usize = 8;
/// Cap on the exhaustive-branch chain comparison mode.
pub const EXHAUSTIVE_BRANCH_CAP: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchmidtError {
    #[error("invalid split: {reason}")]
    InvalidSplit { reason: String },
    #[error("factor {index} has dimension {dim}, expected a qubit")]
    NonQubitFactor { index: usize, dim: usize },
    #[error("order {order:?} is not a permutation of 0..{factors}")]
    BadOrder { order: Vec<usize>, factors: usize },
    #[error("{qubits} qubits exceeds the cap of {cap}; raise the cap explicitly to override")]
    QubitCapExceeded { qubits: usize, cap: usize },
    #[error("coefficient {value:.3e} is negative beyond tolerance")]
    NegativeCoefficient { value: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Which reduced density matrix to form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// A bipartition of the factors into subsystem A (`left`) and B (`right`).
/// Both sides are kept in ascending factor order; that is also the axis
/// order used when matricizing non-contiguous splits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteSplit {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl BipartiteSplit {
    /// Split with the given factors on side A and the complement on side B.
    pub fn new(left_factors: &[usize], factor_count: usize) -> Result<Self, SchmidtError> {
        let mut left: Vec<usize> = left_factors.to_vec();
        left.sort_unstable();
        left.dedup();
        if left.len() != left_factors.len() {
            return Err(SchmidtError::InvalidSplit {
                reason: "repeated factor index".into(),
            });
        }
        if left.is_empty() {
            return Err(SchmidtError::InvalidSplit {
                reason: "side A is empty".into(),
            });
        }
        if let Some(&bad) = left.iter().find(|&&f| f >= factor_count) {
            return Err(SchmidtError::InvalidSplit {
                reason: format!("factor {bad} out of range for {factor_count} factors"),
            });
        }
        let right: Vec<usize> = (0..factor_count).filter(|f| !left.contains(f)).collect();
        if right.is_empty() {
            return Err(SchmidtError::InvalidSplit {
                reason: "side B is empty".into(),
            });
        }
        Ok(BipartiteSplit { left, right })
    }

    /// Split given explicitly as both sides; they must partition the factors.
    pub fn from_parts(
        left_factors: &[usize],
        right_factors: &[usize],
        factor_count: usize,
    ) -> Result<Self, SchmidtError> {
        let split = BipartiteSplit::new(left_factors, factor_count)?;
        let mut right: Vec<usize> = right_factors.to_vec();
        right.sort_unstable();
        if right != split.right {
            return Err(SchmidtError::InvalidSplit {
                reason: "sides do not partition the factor set".into(),
            });
        }
        Ok(split)
    }

    pub fn left_factors(&self) -> &[usize] {
        &self.left
    }

    pub fn right_factors(&self) -> &[usize] {
        &self.right
    }

    pub fn left_dim(&self, shape: &FactorShape) -> usize {
        self.left.iter().map(|&f| shape.dims()[f]).product()
    }

    pub fn right_dim(&self, shape: &FactorShape) -> usize {
        self.right.iter().map(|&f| shape.dims()[f]).product()
    }
}

/// Reduced density matrix of one side of a split; Hermitian, PSD, unit trace.
#[derive(Debug, Clone)]
pub struct ReducedDensity {
    pub matrix: ComplexMatrix,
    pub side: Side,
}

/// psi = sum_k sqrt(p_k) |alpha_k> |beta_k> with p_k descending and
/// orthonormal vectors on both sides.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left_vectors: ComplexMatrix,
    pub right_vectors: ComplexMatrix,
}

/// Closed-form eigenvalues of the 2x2 reduced density matrix for a
/// single-qubit split: mu_pm = (1 +- sqrt(1 - 4C))/2 with C the sum of
/// squared 2x2 minors of the matricization.
///
/// `theta_max` follows the identification cos(theta_max) = mu_plus; note
/// that this differs from the critical-angle convention cos(theta_C) =
/// sqrt(prod N_X) = sqrt(mu_plus), which is exposed as `theta_c`.
#[derive(Debug, Clone)]
pub struct QubitSplitResult {
    pub c_invariant: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
    /// arccos(mu_plus): the literal cos(theta_max) = mu_plus identification.
    pub theta_max: f64,
    /// arccos(sqrt(mu_plus)): the critical-angle convention.
    pub theta_c: f64,
}

/// One stage of the sequential chain: the qubit split off, the full
/// coefficient list (descending), and the selected branch index.
#[derive(Debug, Clone)]
pub struct ChainStage {
    pub qubit: usize,
    pub coefficients: Vec<f64>,
    pub selected: usize,
}

/// Sequential single-qubit Schmidt decompositions in a given order.
#[derive(Debug, Clone)]
pub struct SchmidtChain {
    pub order: Vec<usize>,
    pub stages: Vec<ChainStage>,
    /// Product of the selected coefficient at each stage.
    pub chain_norm: f64,
    pub entanglement_chain: f64,
}

/// Configuration for [`chain_min_over_orders`].
#[derive(Debug, Clone)]
pub struct ChainSearchConfig {
    /// Maximum qubit count for exhaustive permutation enumeration.
    pub qubit_cap: usize,
}

impl Default for ChainSearchConfig {
    fn default() -> Self {
        ChainSearchConfig {
            qubit_cap: DEFAULT_ORDER_CAP,
        }
    }
}

/// View the amplitude tensor as a (prod left dims) x (prod right dims)
/// matrix, with each side's factors in ascending index order.
pub fn matricize(psi: &PureState, split: &BipartiteSplit) -> Result<ComplexMatrix, SchmidtError> {
    validate_split(psi, split)?;
    let shape = psi.shape();
    let dims = shape.dims();
    let strides = shape.strides();
    let rows = split.left_dim(shape);
    let cols = split.right_dim(shape);
    let mut m = ComplexMatrix::zeros(rows, cols);
    for (flat, &amp) in psi.amplitudes().iter().enumerate() {
        let mut row = 0;
        for &f in &split.left {
            row = row * dims[f] + (flat / strides[f]) % dims[f];
        }
        let mut col = 0;
        for &f in &split.right {
            col = col * dims[f] + (flat / strides[f]) % dims[f];
        }
        m[(row, col)] = amp;
    }
    Ok(m)
}

fn validate_split(psi: &PureState, split: &BipartiteSplit) -> Result<(), SchmidtError> {
    let count = psi.shape().factor_count();
    let mut all: Vec<usize> = split.left.iter().chain(split.right.iter()).copied().collect();
    all.sort_unstable();
    if all != (0..count).collect::<Vec<_>>() {
        return Err(SchmidtError::InvalidSplit {
            reason: format!(
                "split {:?}|{:?} does not partition 0..{count}",
                split.left, split.right
            ),
        });
    }
    Ok(())
}

/// rho_A[i,i'] = sum_j chi[i,j] chi*[i',j] (trace over B), or the
/// analogous contraction for side B.
pub fn reduced_density(
    psi: &PureState,
    split: &BipartiteSplit,
    side: Side,
) -> Result<ReducedDensity, SchmidtError> {
    let m = matricize(psi, split)?;
    let matrix = match side {
        Side::A => m.mul(&m.conj_transpose())?,
        Side::B => {
            let (rows, cols) = (m.nrows(), m.ncols());
            let mut rho = ComplexMatrix::zeros(cols, cols);
            for j in 0..cols {
                for jp in 0..cols {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..rows {
                        acc += m[(i, j)] * m[(i, jp)].conj();
                    }
                    rho[(j, jp)] = acc;
                }
            }
            rho
        }
    };
    Ok(ReducedDensity { matrix, side })
}

/// Schmidt decomposition across a split via the SVD of the matricization:
/// p_k are the squared singular values.
pub fn schmidt_decompose(
    psi: &PureState,
    split: &BipartiteSplit,
) -> Result<SchmidtDecomposition, SchmidtError> {
    let m = matricize(psi, split)?;
    let dec = svd(&m)?;
    let coefficients: Vec<f64> = dec.singulars.iter().map(|s| s * s).collect();
    Ok(SchmidtDecomposition {
        coefficients,
        left_vectors: dec.left,
        right_vectors: dec.right,
    })
}

/// Von Neumann entropy S = -sum p_k log2(p_k) in bits; 0 log 0 = 0.
pub fn von_neumann_entropy(coefficients: &[f64]) -> Result<f64, SchmidtError> {
    let mut entropy = 0.0;
    for &p in coefficients {
        if p < -1e-12 {
            return Err(SchmidtError::NegativeCoefficient { value: p });
        }
        if p > 0.0 {
            entropy -= p * p.log2();
        }
    }
    Ok(entropy.max(0.0))
}

/// The quadratic closed form for a single-qubit split:
/// C = sum_{j>k} |chi_0j chi_1k - chi_1j chi_0k|^2, mu_pm = (1 +- sqrt(1-4C))/2.
pub fn qubit_split_quadratic(
    psi: &PureState,
    qubit_index: usize,
) -> Result<QubitSplitResult, SchmidtError> {
    let dims = psi.shape().dims();
    if qubit_index >= dims.len() {
        return Err(SchmidtError::InvalidSplit {
            reason: format!("factor {qubit_index} out of range"),
        });
    }
    if dims[qubit_index] != 2 {
        return Err(SchmidtError::NonQubitFactor {
            index: qubit_index,
            dim: dims[qubit_index],
        });
    }
    let split = BipartiteSplit::new(&[qubit_index], dims.len())?;
    let m = matricize(psi, &split)?;
    let cols = m.ncols();
    let mut c_invariant = 0.0;
    for j in 1..cols {
        for k in 0..j {
            let minor = m[(0, j)] * m[(1, k)] - m[(1, j)] * m[(0, k)];
            c_invariant += minor.norm_sqr();
        }
    }
    let disc = (1.0 - 4.0 * c_invariant).max(0.0).sqrt();
    let mu_plus = 0.5 * (1.0 + disc);
    let mu_minus = 0.5 * (1.0 - disc);
    Ok(QubitSplitResult {
        c_invariant,
        mu_plus,
        mu_minus,
        theta_max: mu_plus.clamp(-1.0, 1.0).acos(),
        theta_c: mu_plus.max(0.0).sqrt().clamp(0.0, 1.0).acos(),
    })
}

fn check_all_qubits(psi: &PureState) -> Result<usize, SchmidtError> {
    for (index, &dim) in psi.shape().dims().iter().enumerate() {
        if dim != 2 {
            return Err(SchmidtError::NonQubitFactor { index, dim });
        }
    }
    Ok(psi.shape().factor_count())
}

fn check_order(order: &[usize], factors: usize) -> Result<(), SchmidtError> {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..factors).collect::<Vec<_>>() {
        return Err(SchmidtError::BadOrder {
            order: order.to_vec(),
            factors,
        });
    }
    Ok(())
}

/// Split one qubit (at `pos` among the remaining labels) off `state` and
/// return the stage coefficients plus every normalized remainder branch.
fn chain_stage(
    state: &PureState,
    pos: usize,
) -> Result<(Vec<f64>, Vec<PureState>), SchmidtError> {
    let factors = state.shape().factor_count();
    let split = BipartiteSplit::new(&[pos], factors)?;
    let dec = schmidt_decompose(state, &split)?;
    let remainder_dims: Vec<usize> = (0..factors)
        .filter(|&f| f != pos)
        .map(|f| state.shape().dims()[f])
        .collect();
    let remainder_shape = FactorShape::new(remainder_dims)?;
    let mut branches = Vec::with_capacity(dec.coefficients.len());
    for k in 0..dec.coefficients.len() {
        let column = dec.right_vectors.column(k);
        branches.push(PureState::raw(remainder_shape.clone(), column)?);
    }
    Ok((dec.coefficients, branches))
}

/// Sequential Schmidt chain: split off `order[0]`, keep the dominant
/// branch (largest coefficient, ties to the lowest index), recurse on the
/// normalized remainder with `order[1]`, and so on until two qubits remain.
/// `chain_norm` is the product of the selected coefficients.
pub fn schmidt_chain(psi: &PureState, order: &[usize]) -> Result<SchmidtChain, SchmidtError> {
    let qubits = check_all_qubits(psi)?;
    check_order(order, qubits)?;

    let mut labels: Vec<usize> = (0..qubits).collect();
    let mut current = psi.clone();
    let mut stages = Vec::with_capacity(qubits - 1);
    let mut chain_norm = 1.0;
    for &target in order.iter().take(qubits - 1) {
        let pos = labels
            .iter()
            .position(|&l| l == target)
            .expect("order entries are valid labels");
        let (coefficients, branches) = chain_stage(&current, pos)?;
        // Coefficients are sorted descending, so the dominant branch is the
        // first; equal values keep their eigen-order, which is the tie rule.
        let selected = 0;
        chain_norm *= coefficients[selected];
        current = branches[selected].clone();
        labels.remove(pos);
        stages.push(ChainStage {
            qubit: target,
            coefficients,
            selected,
        });
    }
    Ok(SchmidtChain {
        order: order.to_vec(),
        stages,
        chain_norm,
        entanglement_chain: (1.0 - chain_norm).clamp(0.0, 1.0),
    })
}

/// Exhaustive-branch variant of [`schmidt_chain`] for comparison: explores
/// every branch combination and returns the chain with maximal norm for the
/// given order. Capped at [`EXHAUSTIVE_BRANCH_CAP`] qubits.
pub fn schmidt_chain_exhaustive(
    psi: &PureState,
    order: &[usize],
) -> Result<SchmidtChain, SchmidtError> {
    let qubits = check_all_qubits(psi)?;
    if qubits > EXHAUSTIVE_BRANCH_CAP {
        return Err(SchmidtError::QubitCapExceeded {
            qubits,
            cap: EXHAUSTIVE_BRANCH_CAP,
        });
    }
    check_order(order, qubits)?;
    let labels: Vec<usize> = (0..qubits).collect();

    fn explore(
        state: &PureState,
        labels: &[usize],
        order: &[usize],
        depth: usize,
    ) -> Result<(f64, Vec<ChainStage>), SchmidtError> {
        if labels.len() == 1 {
            return Ok((1.0, Vec::new()));
        }
        let target = order[depth];
        let pos = labels.iter().position(|&l| l == target).expect("valid label");
        let (coefficients, branches) = chain_stage(state, pos)?;
        let mut remaining = labels.to_vec();
        remaining.remove(pos);
        let mut best: Option<(f64, Vec<ChainStage>)> = None;
        for (k, branch) in branches.iter().enumerate() {
            if coefficients[k] <= 0.0 {
                continue;
            }
            let (sub_norm, sub_stages) = explore(branch, &remaining, order, depth + 1)?;
            let norm = coefficients[k] * sub_norm;
            let better = match &best {
                None => true,
                Some((best_norm, _)) => norm > *best_norm,
            };
            if better {
                let mut stages = vec![ChainStage {
                    qubit: target,
                    coefficients: coefficients.clone(),
                    selected: k,
                }];
                stages.extend(sub_stages);
                best = Some((norm, stages));
            }
        }
        Ok(best.expect("a normalized state has at least one positive coefficient"))
    }

    let (chain_norm, stages) = explore(psi, &labels, order, 0)?;
    Ok(SchmidtChain {
        order: order.to_vec(),
        stages,
        chain_norm,
        entanglement_chain: (1.0 - chain_norm).clamp(0.0, 1.0),
    })
}

fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Evaluate [`schmidt_chain`] for every decomposition order and return the
/// order minimizing the chain entanglement (ties: lexicographically
/// smallest order, which is the first encountered).
pub fn chain_min_over_orders(
    psi: &PureState,
    cfg: &ChainSearchConfig,
) -> Result<(Vec<usize>, SchmidtChain), SchmidtError> {
    let qubits = check_all_qubits(psi)?;
    if qubits > cfg.qubit_cap {
        return Err(SchmidtError::QubitCapExceeded {
            qubits,
            cap: cfg.qubit_cap,
        });
    }
    let mut order: Vec<usize> = (0..qubits).collect();
    let mut best: Option<(Vec<usize>, SchmidtChain)> = None;
    loop {
        let chain = schmidt_chain(psi, &order)?;
        let better = match &best {
            None => true,
            Some((_, kept)) => chain.entanglement_chain < kept.entanglement_chain,
        };
        if better {
            best = Some((order.clone(), chain));
        }
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(best.expect("at least one order exists"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eig;
    use crate::qstate::FactorShape;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(
            FactorShape::qubits(2).unwrap(),
            vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)],
        )
        .unwrap()
    }

    fn w3() -> PureState {
        let s = 1.0 / 3.0f64.sqrt();
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[0b100] = c(s, 0.0);
        amps[0b010] = c(s, 0.0);
        amps[0b001] = c(s, 0.0);
        PureState::new(FactorShape::qubits(3).unwrap(), amps).unwrap()
    }

    fn ghz3() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[0] = c(h, 0.0);
        amps[7] = c(h, 0.0);
        PureState::new(FactorShape::qubits(3).unwrap(), amps).unwrap()
    }

    #[test]
    fn reduced_density_examples() {
        let shape = FactorShape::qubits(2).unwrap();
        let zero_zero = PureState::basis(shape, &[0, 0]).unwrap();
        let split = BipartiteSplit::new(&[0], 2).unwrap();
        let rho = reduced_density(&zero_zero, &split, Side::A).unwrap();
        assert!((rho.matrix[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(rho.matrix[(1, 1)].norm() < 1e-15);

        let rho = reduced_density(&bell(), &split, Side::A).unwrap();
        assert!((rho.matrix[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((rho.matrix[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!(rho.matrix[(0, 1)].norm() < 1e-15);

        let split = BipartiteSplit::new(&[0], 3).unwrap();
        let rho = reduced_density(&w3(), &split, Side::A).unwrap();
        assert!((rho.matrix[(0, 0)].re - 2.0 / 3.0).abs() < 1e-15);
        assert!((rho.matrix[(1, 1)].re - 1.0 / 3.0).abs() < 1e-15);
        assert!((rho.matrix.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schmidt_decompose_examples() {
        let shape = FactorShape::qubits(2).unwrap();
        let zero_one = PureState::basis(shape, &[0, 1]).unwrap();
        let split = BipartiteSplit::new(&[0], 2).unwrap();
        let dec = schmidt_decompose(&zero_one, &split).unwrap();
        assert!((dec.coefficients[0] - 1.0).abs() < 1e-14);
        assert!(dec.coefficients[1].abs() < 1e-14);
        assert!((dec.left_vectors[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((dec.right_vectors[(1, 0)].norm() - 1.0).abs() < 1e-12);

        let dec = schmidt_decompose(&bell(), &split).unwrap();
        assert!((dec.coefficients[0] - 0.5).abs() < 1e-14);
        assert!((dec.coefficients[1] - 0.5).abs() < 1e-14);

        // GHZ3 split 1|2: two nonzero entries 1/sqrt(2) in a 2x4
        // matricization; right vectors are |00> and |11> up to phase.
        let split = BipartiteSplit::new(&[0], 3).unwrap();
        let dec = schmidt_decompose(&ghz3(), &split).unwrap();
        assert!((dec.coefficients[0] - 0.5).abs() < 1e-14);
        assert!((dec.coefficients[1] - 0.5).abs() < 1e-14);
        let b0 = dec.right_vectors.column(0);
        let b1 = dec.right_vectors.column(1);
        assert!((b0[0].norm() - 1.0).abs() < 1e-12);
        assert!((b1[3].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schmidt_reconstructs_state() {
        let split = BipartiteSplit::new(&[0], 3).unwrap();
        let dec = schmidt_decompose(&w3(), &split).unwrap();
        let mut rebuilt = [c(0.0, 0.0); 8];
        for k in 0..dec.coefficients.len() {
            let weight = dec.coefficients[k].max(0.0).sqrt();
            let alpha = dec.left_vectors.column(k);
            let beta = dec.right_vectors.column(k);
            for (i, &a) in alpha.iter().enumerate() {
                for (j, &b) in beta.iter().enumerate() {
                    rebuilt[i * 4 + j] += a * b * weight;
                }
            }
        }
        let err: f64 = rebuilt
            .iter()
            .zip(w3().amplitudes())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-10, "reconstruction error {err}");
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(von_neumann_entropy(&[1.0]).unwrap(), 0.0);
        assert!((von_neumann_entropy(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-15);
        // -(2/3) log2(2/3) - (1/3) log2(1/3), evaluated directly.
        let s = von_neumann_entropy(&[2.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!((s - 0.9182958340544896).abs() < 1e-12);
        assert!(von_neumann_entropy(&[1.0, -1e-3]).is_err());
        assert_eq!(von_neumann_entropy(&[1.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn qubit_quadratic_examples() {
        let shape = FactorShape::qubits(2).unwrap();
        let zero_zero = PureState::basis(shape, &[0, 0]).unwrap();
        let result = qubit_split_quadratic(&zero_zero, 0).unwrap();
        assert_eq!(result.c_invariant, 0.0);
        assert_eq!(result.mu_plus, 1.0);
        assert_eq!(result.mu_minus, 0.0);

        let result = qubit_split_quadratic(&bell(), 0).unwrap();
        assert!((result.c_invariant - 0.25).abs() < 1e-15);
        assert!((result.mu_plus - 0.5).abs() < 1e-12);
        assert!((result.mu_minus - 0.5).abs() < 1e-12);

        let result = qubit_split_quadratic(&w3(), 0).unwrap();
        assert!((result.c_invariant - 2.0 / 9.0).abs() < 1e-15);
        assert!((result.mu_plus - 2.0 / 3.0).abs() < 1e-14);
        assert!((result.mu_minus - 1.0 / 3.0).abs() < 1e-14);
        // mu_pm are the eigenvalues of the 2x2 reduced density matrix.
        let split = BipartiteSplit::new(&[0], 3).unwrap();
        let rho = reduced_density(&w3(), &split, Side::A).unwrap();
        let eig = hermitian_eig(&rho.matrix).unwrap();
        assert!((eig.eigenvalues[0] - result.mu_plus).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - result.mu_minus).abs() < 1e-12);
    }

    #[test]
    fn quadratic_rejects_non_qubit_factor() {
        let shape = FactorShape::new(vec![3, 2]).unwrap();
        let psi = PureState::basis(shape, &[0, 0]).unwrap();
        assert!(matches!(
            qubit_split_quadratic(&psi, 0),
            Err(SchmidtError::NonQubitFactor { index: 0, dim: 3 })
        ));
    }

    #[test]
    fn chain_examples() {
        let shape = FactorShape::qubits(3).unwrap();
        let product = PureState::basis(shape, &[0, 0, 0]).unwrap();
        let chain = schmidt_chain(&product, &[0, 1, 2]).unwrap();
        assert!((chain.chain_norm - 1.0).abs() < 1e-12);
        assert!(chain.entanglement_chain < 1e-12);

        let chain = schmidt_chain(&ghz3(), &[0, 1, 2]).unwrap();
        assert!((chain.chain_norm - 0.5).abs() < 1e-12);
        assert!((chain.stages[0].coefficients[0] - 0.5).abs() < 1e-12);
        assert!((chain.stages[1].coefficients[0] - 1.0).abs() < 1e-12);

        // W3: dominant stage-1 branch is |0> x (|10>+|01>)/sqrt(2), whose
        // own split is Bell-like, so the chain norm is (2/3)(1/2) = 1/3.
        let chain = schmidt_chain(&w3(), &[0, 1, 2]).unwrap();
        assert!((chain.chain_norm - 1.0 / 3.0).abs() < 1e-12);
        assert!((chain.stages[0].coefficients[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((chain.stages[1].coefficients[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn chain_min_examples() {
        let (order, chain) = chain_min_over_orders(&ghz3(), &ChainSearchConfig::default()).unwrap();
        assert_eq!(order, vec![0, 1, 2]);
        assert!((chain.entanglement_chain - 0.5).abs() < 1e-12);

        let (_, chain) = chain_min_over_orders(&w3(), &ChainSearchConfig::default()).unwrap();
        assert!((chain.entanglement_chain - 2.0 / 3.0).abs() < 1e-12);

        // |0> x Bell(1,2): the Bell pair must be cut at some stage, so every
        // order gives entanglement 1/2.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[0b000] = c(h, 0.0);
        amps[0b011] = c(h, 0.0);
        let psi = PureState::new(FactorShape::qubits(3).unwrap(), amps).unwrap();
        let mut order = vec![0, 1, 2];
        loop {
            let chain = schmidt_chain(&psi, &order).unwrap();
            assert!(
                (chain.entanglement_chain - 0.5).abs() < 1e-12,
                "order {order:?} gave {}",
                chain.entanglement_chain
            );
            if !next_permutation(&mut order) {
                break;
            }
        }
    }

    #[test]
    fn chain_cap_and_order_validation() {
        let psi = PureState::basis(FactorShape::qubits(3).unwrap(), &[0, 0, 0]).unwrap();
        assert!(matches!(
            schmidt_chain(&psi, &[0, 1, 1]),
            Err(SchmidtError::BadOrder { .. })
        ));
        let cfg = ChainSearchConfig { qubit_cap: 2 };
        assert!(matches!(
            chain_min_over_orders(&psi, &cfg),
            Err(SchmidtError::QubitCapExceeded { qubits: 3, cap: 2 })
        ));
    }

    #[test]
    fn exhaustive_branch_mode_matches_dominant_on_ghz() {
        let greedy = schmidt_chain(&ghz3(), &[0, 1, 2]).unwrap();
        let exhaustive = schmidt_chain_exhaustive(&ghz3(), &[0, 1, 2]).unwrap();
        assert!((greedy.chain_norm - exhaustive.chain_norm).abs() < 1e-12);
    }
}
