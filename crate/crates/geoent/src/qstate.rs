//! State representations, inner products, the distance functional, and the
//! on-disk state format.
//!
//! A pure state is a dense complex amplitude tensor over a list of factor
//! dimensions; a product state is one complex vector per factor and is
//! deliberately *not* normalized — its factor norms carry information.

use num_complex::Complex64;
use thiserror::Error;

/// Tolerance on `|<psi|psi> - 1|` when ingesting normalized states.
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("a state needs at least one factor")]
    EmptyShape,
    #[error("factor {index} has dimension {dim}; every factor dimension must be at least 2")]
    InvalidDim { index: usize, dim: usize },
    #[error("amplitude count {got} does not match total dimension {expected}")]
    AmplitudeCount { expected: usize, got: usize },
    #[error("non-finite amplitude at flat index {index}")]
    NonFinite { index: usize },
    #[error("state norm^2 = {norm_sqr:.12e} violates the normalization tolerance")]
    NotNormalized { norm_sqr: f64 },
    #[error("factor {index} is empty")]
    EmptyFactor { index: usize },
    #[error("non-finite entry in factor {index}")]
    NonFiniteFactor { index: usize },
    #[error("shape mismatch: state dims {state_dims:?} vs product factor lengths {factor_lens:?}")]
    ShapeMismatch {
        state_dims: Vec<usize>,
        factor_lens: Vec<usize>,
    },
    #[error("cannot renormalize a zero state")]
    ZeroState,
}

/// Ordered factor dimensions (u, v, w, ...); the total dimension is their
/// product. Flat indexing is row-major with the first factor most
/// significant, matching the computational-basis order |i>|j>|k>.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorShape {
    dims: Vec<usize>,
}

impl FactorShape {
    pub fn new(dims: Vec<usize>) -> Result<Self, StateError> {
        if dims.is_empty() {
            return Err(StateError::EmptyShape);
        }
        for (index, &dim) in dims.iter().enumerate() {
            if dim < 2 {
                return Err(StateError::InvalidDim { index, dim });
            }
        }
        Ok(FactorShape { dims })
    }

    /// Shape of `count` qubit factors.
    pub fn qubits(count: usize) -> Result<Self, StateError> {
        FactorShape::new(vec![2; count])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn factor_count(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major strides: stride of the last factor is 1.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for f in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[f] = strides[f + 1] * self.dims[f + 1];
        }
        strides
    }

    pub fn flat_index(&self, multi: &[usize]) -> Option<usize> {
        if multi.len() != self.dims.len() {
            return None;
        }
        let mut flat = 0;
        for (f, &idx) in multi.iter().enumerate() {
            if idx >= self.dims[f] {
                return None;
            }
            flat = flat * self.dims[f] + idx;
        }
        Some(flat)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut multi = vec![0; self.dims.len()];
        for f in (0..self.dims.len()).rev() {
            multi[f] = flat % self.dims[f];
            flat /= self.dims[f];
        }
        multi
    }
}

/// Dense pure state |psi>. Normalized on construction unless built `raw`
/// (e.g. expanded product tensors used in cross-checks).
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    shape: FactorShape,
    amplitudes: Vec<Complex64>,
    raw: bool,
}

impl PureState {
    pub fn new(shape: FactorShape, amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        let state = PureState::raw(shape, amplitudes)?;
        let norm_sqr = state.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORMALIZATION_TOL {
            return Err(StateError::NotNormalized { norm_sqr });
        }
        Ok(PureState { raw: false, ..state })
    }

    /// Construct without the normalization check; finiteness is still enforced.
    pub fn raw(shape: FactorShape, amplitudes: Vec<Complex64>) -> Result<Self, StateError> {
        if amplitudes.len() != shape.total_dim() {
            return Err(StateError::AmplitudeCount {
                expected: shape.total_dim(),
                got: amplitudes.len(),
            });
        }
        for (index, a) in amplitudes.iter().enumerate() {
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(StateError::NonFinite { index });
            }
        }
        Ok(PureState {
            shape,
            amplitudes,
            raw: true,
        })
    }

    /// Computational-basis state |i j k ...>.
    pub fn basis(shape: FactorShape, multi: &[usize]) -> Result<Self, StateError> {
        let flat = shape.flat_index(multi).ok_or(StateError::AmplitudeCount {
            expected: shape.factor_count(),
            got: multi.len(),
        })?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); shape.total_dim()];
        amplitudes[flat] = Complex64::new(1.0, 0.0);
        PureState::new(shape, amplitudes)
    }

    pub fn shape(&self) -> &FactorShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn is_raw(&self) -> bool {
        self.raw
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Explicitly rescale to unit norm. States are never renormalized
    /// silently; ingest rejects out-of-tolerance data instead.
    pub fn renormalize(&self) -> Result<PureState, StateError> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(StateError::ZeroState);
        }
        let amplitudes = self.amplitudes.iter().map(|a| a / norm).collect();
        PureState::new(self.shape.clone(), amplitudes)
    }
}

/// Unnormalized product state |A>|B>|C>...: one complex vector per factor.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    factors: Vec<Vec<Complex64>>,
}

impl ProductState {
    pub fn new(factors: Vec<Vec<Complex64>>) -> Result<Self, StateError> {
        if factors.is_empty() {
            return Err(StateError::EmptyShape);
        }
        for (index, factor) in factors.iter().enumerate() {
            if factor.is_empty() {
                return Err(StateError::EmptyFactor { index });
            }
            if factor.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
                return Err(StateError::NonFiniteFactor { index });
            }
        }
        Ok(ProductState { factors })
    }

    pub fn factors(&self) -> &[Vec<Complex64>] {
        &self.factors
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn matches(&self, shape: &FactorShape) -> bool {
        self.factors.len() == shape.factor_count()
            && self
                .factors
                .iter()
                .zip(shape.dims())
                .all(|(factor, &dim)| factor.len() == dim)
    }

    pub(crate) fn mismatch_error(&self, shape: &FactorShape) -> StateError {
        StateError::ShapeMismatch {
            state_dims: shape.dims().to_vec(),
            factor_lens: self.factors.iter().map(Vec::len).collect(),
        }
    }
}

/// Per-factor squared norms N_A = sum |a_i|^2, N_B = ...; their product is
/// <phi|phi>.
pub fn factor_norms(phi: &ProductState) -> Vec<f64> {
    phi.factors()
        .iter()
        .map(|factor| factor.iter().map(|a| a.norm_sqr()).sum())
        .collect()
}

/// <psi|phi> = sum chi*_{ijk...} a_i b_j c_k ..., contracted factor by
/// factor from the last to the first, holding partial tensors. O(n) overall.
pub fn overlap(psi: &PureState, phi: &ProductState) -> Result<Complex64, StateError> {
    if !phi.matches(psi.shape()) {
        return Err(phi.mismatch_error(psi.shape()));
    }
    let mut current: Vec<Complex64> = psi.amplitudes().iter().map(|a| a.conj()).collect();
    for (f, factor) in phi.factors().iter().enumerate().rev() {
        let dim = psi.shape().dims()[f];
        let blocks = current.len() / dim;
        let mut next = vec![Complex64::new(0.0, 0.0); blocks];
        for (block, slot) in next.iter_mut().enumerate() {
            let base = block * dim;
            let mut acc = Complex64::new(0.0, 0.0);
            for (idx, &coeff) in factor.iter().enumerate() {
                acc += current[base + idx] * coeff;
            }
            *slot = acc;
        }
        current = next;
    }
    Ok(current[0])
}

/// Squared Euclidean distance D^2 = <psi|psi> - 2 Re<psi|phi> + prod N_X;
/// equals the elementwise sum of |a_i b_j c_k ... - chi_{ijk...}|^2.
pub fn distance_sq(psi: &PureState, phi: &ProductState) -> Result<f64, StateError> {
    let ov = overlap(psi, phi)?;
    let norm_product: f64 = factor_norms(phi).iter().product();
    let d2 = psi.norm_sqr() - 2.0 * ov.re + norm_product;
    Ok(d2.max(0.0))
}

/// Expand a product state into its full (raw) amplitude tensor:
/// amplitude at (i, j, k, ...) is a_i b_j c_k ...
pub fn expand_product(phi: &ProductState) -> PureState {
    let dims: Vec<usize> = phi.factors().iter().map(Vec::len).collect();
    let mut amplitudes = vec![Complex64::new(1.0, 0.0)];
    for factor in phi.factors() {
        let mut next = Vec::with_capacity(amplitudes.len() * factor.len());
        for &partial in &amplitudes {
            for &entry in factor {
                next.push(partial * entry);
            }
        }
        amplitudes = next;
    }
    let shape = FactorShape::new(dims).expect("product factors are nonempty with len >= 1");
    PureState::raw(shape, amplitudes).expect("finite product entries expand to finite amplitudes")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("missing `dims:` header")]
    MissingDims,
    #[error("line {line}: repeated `{header}` header")]
    RepeatedHeader { line: usize, header: &'static str },
    #[error("line {line}: malformed: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: index {index} out of range for factor {factor} (dim {dim})")]
    IndexOutOfRange {
        line: usize,
        factor: usize,
        index: usize,
        dim: usize,
    },
    #[error("line {line}: duplicate amplitude for multi-index {multi:?}")]
    DuplicateIndex { line: usize, multi: Vec<usize> },
    #[error("line {line}: non-finite amplitude")]
    NonFinite { line: usize },
    #[error("line {line}: {source}")]
    InvalidShape {
        line: usize,
        #[source]
        source: StateError,
    },
    #[error("state norm^2 = {norm_sqr:.12e} violates normalization (set `raw: true` for unnormalized data)")]
    NotNormalized { norm_sqr: f64 },
}

/// Parse the line-oriented state format:
///
/// ```text
/// # optional comments
/// dims: 2 2
/// 0 0 0.7071067811865476 0.0
/// 1 1 0.7071067811865476 0.0
/// ```
///
/// One index column per factor, then re and im. Unlisted amplitudes are
/// zero. An optional `raw: true` header skips the normalization check.
pub fn read_state(text: &str) -> Result<PureState, ParseError> {
    let mut shape: Option<(FactorShape, Vec<usize>)> = None;
    let mut raw = false;
    let mut saw_raw_header = false;
    let mut amplitudes: Vec<Complex64> = Vec::new();
    let mut seen: Vec<bool> = Vec::new();

    for (line_idx, raw_line) in text.lines().enumerate() {
        let line = line_idx + 1;
        let content = raw_line.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        if let Some(rest) = content.strip_prefix("dims:") {
            if shape.is_some() {
                return Err(ParseError::RepeatedHeader {
                    line,
                    header: "dims:",
                });
            }
            let dims: Vec<usize> = rest
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| ParseError::Malformed {
                        line,
                        reason: format!("bad dimension `{tok}`"),
                    })
                })
                .collect::<Result<_, _>>()?;
            let parsed =
                FactorShape::new(dims).map_err(|source| ParseError::InvalidShape { line, source })?;
            amplitudes = vec![Complex64::new(0.0, 0.0); parsed.total_dim()];
            seen = vec![false; parsed.total_dim()];
            let strides = parsed.strides();
            shape = Some((parsed, strides));
            continue;
        }
        if let Some(rest) = content.strip_prefix("raw:") {
            if saw_raw_header {
                return Err(ParseError::RepeatedHeader {
                    line,
                    header: "raw:",
                });
            }
            saw_raw_header = true;
            raw = match rest.trim() {
                "true" => true,
                "false" => false,
                other => {
                    return Err(ParseError::Malformed {
                        line,
                        reason: format!("expected true or false after raw:, got `{other}`"),
                    })
                }
            };
            continue;
        }

        let (shape_ref, _strides) = shape.as_ref().ok_or(ParseError::MissingDims)?;
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let factor_count = shape_ref.factor_count();
        if tokens.len() != factor_count + 2 {
            return Err(ParseError::Malformed {
                line,
                reason: format!(
                    "expected {} index columns plus re and im, got {} fields",
                    factor_count,
                    tokens.len()
                ),
            });
        }
        let mut multi = Vec::with_capacity(factor_count);
        for (factor, tok) in tokens[..factor_count].iter().enumerate() {
            let index: usize = tok.parse().map_err(|_| ParseError::Malformed {
                line,
                reason: format!("bad index `{tok}`"),
            })?;
            let dim = shape_ref.dims()[factor];
            if index >= dim {
                return Err(ParseError::IndexOutOfRange {
                    line,
                    factor,
                    index,
                    dim,
                });
            }
            multi.push(index);
        }
        let re: f64 = tokens[factor_count].parse().map_err(|_| ParseError::Malformed {
            line,
            reason: format!("bad real part `{}`", tokens[factor_count]),
        })?;
        let im: f64 = tokens[factor_count + 1]
            .parse()
            .map_err(|_| ParseError::Malformed {
                line,
                reason: format!("bad imaginary part `{}`", tokens[factor_count + 1]),
            })?;
        if !re.is_finite() || !im.is_finite() {
            return Err(ParseError::NonFinite { line });
        }
        let flat = shape_ref
            .flat_index(&multi)
            .expect("indices already range-checked");
        if seen[flat] {
            return Err(ParseError::DuplicateIndex { line, multi });
        }
        seen[flat] = true;
        amplitudes[flat] = Complex64::new(re, im);
    }

    let (shape, _) = shape.ok_or(ParseError::MissingDims)?;
    if raw {
        Ok(PureState::raw(shape, amplitudes).expect("amplitudes validated line by line"))
    } else {
        PureState::new(shape, amplitudes).map_err(|err| match err {
            StateError::NotNormalized { norm_sqr } => ParseError::NotNormalized { norm_sqr },
            other => ParseError::InvalidShape {
                line: 0,
                source: other,
            },
        })
    }
}

/// Canonical text form: `dims:` header, `raw: true` if applicable, then the
/// nonzero amplitudes in ascending flat-index order. Floats are written in
/// shortest round-trip form, so read(write(s)) == s exactly.
pub fn write_state(psi: &PureState) -> String {
    let mut out = String::new();
    out.push_str("dims:");
    for dim in psi.shape().dims() {
        out.push_str(&format!(" {dim}"));
    }
    out.push('\n');
    if psi.is_raw() {
        out.push_str("raw: true\n");
    }
    for (flat, amp) in psi.amplitudes().iter().enumerate() {
        if amp.re == 0.0 && amp.im == 0.0 {
            continue;
        }
        let multi = psi.shape().multi_index(flat);
        for idx in &multi {
            out.push_str(&format!("{idx} "));
        }
        out.push_str(&format!("{} {}\n", amp.re, amp.im));
    }
    out
}
