//! Dense Hermitian operators, states, POVMs and the Born rule.

use std::ops::{Add, Deref, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::tolerances;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A dense complex Hermitian matrix.
///
/// Entries are symmetrized on construction, so the stored matrix is
/// exactly equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: CMatrix,
}

/// Eigenvalues in descending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }
}

impl HermitianOperator {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let d = mat.nrows();
        let mut deviation: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for j in 0..d {
            for i in 0..d {
                deviation = deviation.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
                scale = scale.max(mat[(i, j)].norm());
            }
        }
        if deviation > tolerances().hermitian * scale {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::symmetrized(mat))
    }

    /// Builds `(m + m†)/2`, which is Hermitian by construction.
    pub fn symmetrized(mat: CMatrix) -> Self {
        assert!(mat.is_square(), "operator must be square");
        let adj = mat.adjoint();
        Self {
            mat: (mat + adj) * C64::new(0.5, 0.0),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut mat = CMatrix::zeros(d, d);
        for (i, &x) in diag.iter().enumerate() {
            mat[(i, i)] = C64::new(x, 0.0);
        }
        Self { mat }
    }

    /// `|psi><psi|`.
    pub fn projector(psi: &PureState) -> Self {
        Self::outer(psi.amplitudes())
    }

    pub(crate) fn outer(v: &CVector) -> Self {
        Self::symmetrized(v * v.adjoint())
    }

    /// Weighted sum of rank-one projectors `sum_i w_i |v_i><v_i|` over matrix columns.
    pub fn from_eigenpairs(values: &[f64], vectors: &CMatrix) -> Self {
        let d = vectors.nrows();
        let mut scaled = vectors.clone();
        for (j, &w) in values.iter().enumerate() {
            let mut col = scaled.column_mut(j);
            col *= C64::new(w, 0.0);
        }
        let cols = values.len();
        let m = scaled.columns(0, cols) * vectors.columns(0, cols).adjoint();
        debug_assert_eq!(m.nrows(), d);
        Self::symmetrized(m)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }

    /// `Re tr(self · other)`; exact for Hermitian pairs up to rounding.
    pub fn trace_product(&self, other: &HermitianOperator) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        // tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B.
        self.mat
            .as_slice()
            .iter()
            .zip(other.mat.as_slice())
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    /// `<psi|A|psi>`.
    pub fn expectation(&self, psi: &CVector) -> f64 {
        (psi.adjoint() * &self.mat * psi)[(0, 0)].re
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &Unitary) -> Self {
        Self::symmetrized(u.matrix() * &self.mat * u.matrix().adjoint())
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|j| (0..d).all(|i| i == j || self.mat[(i, j)] == ZERO))
    }

    pub fn eigh(&self) -> EigenDecomposition {
        let d = self.dim();
        if d == 0 {
            return EigenDecomposition {
                values: vec![],
                vectors: CMatrix::zeros(0, 0),
            };
        }
        if self.is_diagonal() {
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|&a, &b| self.mat[(b, b)].re.total_cmp(&self.mat[(a, a)].re));
            let mut vectors = CMatrix::zeros(d, d);
            for (col, &i) in order.iter().enumerate() {
                vectors[(i, col)] = ONE;
            }
            return EigenDecomposition {
                values: order.iter().map(|&i| self.mat[(i, i)].re).collect(),
                vectors,
            };
        }
        let eig = SymmetricEigen::new(self.mat.clone());
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let mut vectors = CMatrix::zeros(d, d);
        for (col, &i) in order.iter().enumerate() {
            vectors.set_column(col, &eig.eigenvectors.column(i));
        }
        EigenDecomposition {
            values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
            vectors,
        }
    }

    pub fn max_abs_diff(&self, other: &HermitianOperator) -> f64 {
        self.mat
            .iter()
            .zip(other.mat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_same_dim(&self, other: &HermitianOperator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn try_sub(&self, other: &HermitianOperator) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self - other)
    }

    pub fn try_add(&self, other: &HermitianOperator) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self + other)
    }

    /// Zero-pads (or keeps) the operator into the top-left block of a `dim`-sized matrix.
    pub fn embed(&self, dim: usize) -> Result<Self> {
        if dim < self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            });
        }
        let mut mat = CMatrix::zeros(dim, dim);
        mat.view_mut((0, 0), (self.dim(), self.dim()))
            .copy_from(&self.mat);
        Ok(Self { mat })
    }

    /// Top-left `dim × dim` block, i.e. `P A P` restricted to the first `dim` basis vectors.
    pub fn compress(&self, dim: usize) -> Result<Self> {
        if dim > self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            });
        }
        Ok(Self {
            mat: self.mat.view((0, 0), (dim, dim)).into_owned(),
        })
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: Self) -> HermitianOperator {
        HermitianOperator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: Self) -> HermitianOperator {
        HermitianOperator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        HermitianOperator {
            mat: &self.mat * C64::new(rhs, 0.0),
        }
    }
}

impl Neg for &HermitianOperator {
    type Output = HermitianOperator;
    fn neg(self) -> HermitianOperator {
        HermitianOperator { mat: -&self.mat }
    }
}

/// A positive semidefinite operator of unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
}

impl DensityMatrix {
    /// Validates trace and positivity. Eigenvalues in `[-tol, 0)` are
    /// clamped to zero; anything more negative is rejected.
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tol = tolerances();
        let trace = op.trace();
        if (trace - 1.0).abs() > tol.normalization.max(tol.constraint) {
            return Err(Error::TraceNotOne { trace });
        }
        let eig = op.eigh();
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -tol.constraint {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        if min < 0.0 {
            return Ok(Self::from_clamped(&eig));
        }
        Ok(Self { op })
    }

    /// Nearest-state map used by the optimizers: clamp negative
    /// eigenvalues to zero and renormalize the trace. Falls back to the
    /// maximally mixed state when nothing positive survives.
    pub fn project(op: &HermitianOperator) -> Self {
        Self::from_clamped(&op.eigh())
    }

    fn from_clamped(eig: &EigenDecomposition) -> Self {
        let d = eig.vectors.nrows();
        let clamped: Vec<f64> = eig.values.iter().map(|&x| x.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        if total <= f64::MIN_POSITIVE {
            return Self::maximally_mixed(d);
        }
        let normalized: Vec<f64> = clamped.iter().map(|x| x / total).collect();
        Self {
            op: HermitianOperator::from_eigenpairs(&normalized, &eig.vectors),
        }
    }

    /// For operators that are states by construction (projectors divided by rank, diagonal weights).
    pub(crate) fn new_trusted(op: HermitianOperator) -> Self {
        Self { op }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            op: HermitianOperator::projector(psi),
        }
    }

    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut diag = vec![0.0; dim];
        diag[index] = 1.0;
        Self {
            op: HermitianOperator::from_real_diagonal(&diag),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: &HermitianOperator::identity(dim) * (1.0 / dim as f64),
        }
    }

    pub fn from_diagonal(weights: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diagonal(weights))
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_operator(self) -> HermitianOperator {
        self.op
    }

    pub fn conjugate_by(&self, u: &Unitary) -> Self {
        Self {
            op: self.op.conjugate_by(u),
        }
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Self {
        Self {
            op: tensor(&self.op, &other.op),
        }
    }
}

impl Deref for DensityMatrix {
    type Target = HermitianOperator;
    fn deref(&self) -> &HermitianOperator {
        &self.op
    }
}

/// A unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: CVector,
}

impl PureState {
    pub fn new(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > tolerances().normalization {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amps })
    }

    pub fn normalized(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amps: amps / C64::new(norm, 0.0),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = CVector::zeros(dim);
        amps[index] = ONE;
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn distance(&self, other: &PureState) -> f64 {
        (&self.amps - &other.amps).norm()
    }

    pub fn tensor(&self, other: &PureState) -> Self {
        Self {
            amps: self.amps.kronecker(&other.amps),
        }
    }

    pub fn with_phase(&self, phase: C64) -> Self {
        Self {
            amps: &self.amps * phase,
        }
    }
}

/// An effect `0 <= E <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    op: HermitianOperator,
}

impl PovmElement {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let c = tolerances().constraint;
        let eig = op.eigh();
        let max = eig.values.first().copied().unwrap_or(0.0);
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -c || max > 1.0 + c {
            return Err(Error::InvalidEffect { min, max });
        }
        Ok(Self { op })
    }

    pub(crate) fn new_trusted(op: HermitianOperator) -> Self {
        Self { op }
    }

    /// `weight · |psi><psi|` with `weight` clamped into `[0, 1]`.
    pub fn rank_one(psi: &PureState, weight: f64) -> Self {
        Self {
            op: &HermitianOperator::projector(psi) * weight.clamp(0.0, 1.0),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            op: HermitianOperator::identity(dim),
        }
    }

    pub fn complement(&self) -> Self {
        Self {
            op: &HermitianOperator::identity(self.dim()) - &self.op,
        }
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn tensor(&self, other: &PovmElement) -> Self {
        Self {
            op: tensor(&self.op, &other.op),
        }
    }
}

impl Deref for PovmElement {
    type Target = HermitianOperator;
    fn deref(&self) -> &HermitianOperator {
        &self.op
    }
}

/// A finite-outcome POVM.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    elements: Vec<PovmElement>,
}

impl Measurement {
    pub fn new(elements: Vec<PovmElement>) -> Result<Self> {
        let first = elements.first().ok_or(Error::EmptyMeasurement)?;
        let d = first.dim();
        let mut sum = CMatrix::zeros(d, d);
        for e in &elements {
            if e.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: e.dim(),
                });
            }
            sum += e.matrix();
        }
        let deviation = (sum - CMatrix::identity(d, d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if deviation > tolerances().constraint {
            return Err(Error::IncompleteMeasurement { deviation });
        }
        Ok(Self { elements })
    }

    pub(crate) fn new_trusted(elements: Vec<PovmElement>) -> Self {
        Self { elements }
    }

    /// Rank-one projective measurement onto the columns of `u`.
    pub fn from_basis(u: &Unitary) -> Self {
        let elements = (0..u.dim())
            .map(|i| PovmElement::new_trusted(HermitianOperator::outer(&u.column(i))))
            .collect();
        Self { elements }
    }

    pub fn computational(dim: usize) -> Self {
        Self::from_basis(&Unitary::identity(dim))
    }

    /// `{E, 1 - E}`.
    pub fn binary(effect: PovmElement) -> Self {
        let complement = effect.complement();
        Self {
            elements: vec![effect, complement],
        }
    }

    /// The one-outcome measurement `{1}`.
    pub fn trivial(dim: usize) -> Self {
        Self {
            elements: vec![PovmElement::identity(dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.elements[0].dim()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }
}

/// Outcome weights of a measurement. `signed` marks vectors produced from
/// operators that are not states; those are exempt from nonnegativity.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    weights: Vec<f64>,
    signed: bool,
}

impl ProbabilityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let tol = tolerances();
        if let Some(&w) = weights
            .iter()
            .find(|&&w| w < -tol.hermitian || !w.is_finite())
        {
            return Err(Error::InvalidArgument(format!("negative probability {w}")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tol.constraint {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self {
            weights,
            signed: false,
        })
    }

    pub fn signed(weights: Vec<f64>) -> Self {
        Self {
            weights,
            signed: true,
        }
    }

    /// Labels the vector signed unless it satisfies the probability invariants.
    pub fn classify(weights: Vec<f64>) -> Self {
        let tol = tolerances();
        let proper = weights.iter().all(|&w| w >= -tol.hermitian)
            && (weights.iter().sum::<f64>() - 1.0).abs() <= tol.constraint;
        Self {
            weights,
            signed: !proper,
        }
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            weights: vec![1.0 / n as f64; n],
            signed: false,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }
}

/// A unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    mat: CMatrix,
}

impl Unitary {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        let d = mat.nrows();
        let deviation = (mat.adjoint() * &mat - CMatrix::identity(d, d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if deviation > tolerances().constraint {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { mat })
    }

    pub(crate) fn new_trusted(mat: CMatrix) -> Self {
        Self { mat }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim, dim),
        }
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            mat: CMatrix::from_row_slice(
                2,
                2,
                &[
                    C64::new(h, 0.0),
                    C64::new(h, 0.0),
                    C64::new(h, 0.0),
                    C64::new(-h, 0.0),
                ],
            ),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    pub fn column(&self, i: usize) -> CVector {
        self.mat.column(i).into_owned()
    }

    pub fn column_state(&self, i: usize) -> PureState {
        PureState {
            amps: self.column(i),
        }
    }

    pub fn apply(&self, psi: &PureState) -> PureState {
        PureState {
            amps: &self.mat * psi.amplitudes(),
        }
    }

    pub fn compose(&self, other: &Unitary) -> Self {
        Self {
            mat: &self.mat * &other.mat,
        }
    }

    pub fn tensor(&self, other: &Unitary) -> Self {
        Self {
            mat: self.mat.kronecker(&other.mat),
        }
    }

    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        (self.mat.adjoint() * &self.mat - CMatrix::identity(d, d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Frobenius distance `||U - V||_2`.
    pub fn distance(&self, other: &Unitary) -> f64 {
        (&self.mat - &other.mat)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// An orthogonal projector together with an isometry onto its support.
#[derive(Debug, Clone)]
pub struct Projector {
    op: HermitianOperator,
    support: CMatrix,
}

impl Projector {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let sq = op.matrix() * op.matrix();
        let deviation = (sq - op.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if deviation > tolerances().constraint {
            return Err(Error::NotProjector { deviation });
        }
        let eig = op.eigh();
        let rank = eig.values.iter().filter(|&&x| x > 0.5).count();
        let support = eig.vectors.columns(0, rank).into_owned();
        Ok(Self { op, support })
    }

    /// Projector onto the span of the given computational basis vectors.
    pub fn coordinate(dim: usize, indices: &[usize]) -> Self {
        let mut diag = vec![0.0; dim];
        let mut support = CMatrix::zeros(dim, indices.len());
        for (col, &i) in indices.iter().enumerate() {
            diag[i] = 1.0;
            support[(i, col)] = ONE;
        }
        Self {
            op: HermitianOperator::from_real_diagonal(&diag),
            support,
        }
    }

    /// Projector onto the span of orthonormal columns.
    pub fn from_isometry(support: CMatrix) -> Result<Self> {
        let r = support.ncols();
        let defect = (support.adjoint() * &support - CMatrix::identity(r, r))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if defect > tolerances().constraint {
            return Err(Error::NotUnitary { deviation: defect });
        }
        let op = HermitianOperator::symmetrized(&support * support.adjoint());
        Ok(Self { op, support })
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn rank(&self) -> usize {
        self.support.ncols()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Columns form an orthonormal basis of the support.
    pub fn support(&self) -> &CMatrix {
        &self.support
    }

    /// `V† A V` for the support isometry `V`.
    pub fn compress(&self, a: &HermitianOperator) -> HermitianOperator {
        HermitianOperator::symmetrized(self.support.adjoint() * a.matrix() * &self.support)
    }

    /// `P A P` in the ambient space.
    pub fn sandwich(&self, a: &HermitianOperator) -> HermitianOperator {
        HermitianOperator::symmetrized(self.op.matrix() * a.matrix() * self.op.matrix())
    }
}

/// Eigenvalues sorted in descending order.
pub fn spectrum(a: &HermitianOperator) -> Vec<f64> {
    a.eigh().values
}

/// Sum of absolute eigenvalues.
pub fn trace_norm(a: &HermitianOperator) -> f64 {
    spectrum(a).iter().map(|x| x.abs()).sum()
}

/// Splits `A = A_+ + A_-` along the eigenbasis, with `A_+ >= 0`, `A_- <= 0`
/// and orthogonal supports.
pub fn pos_neg_parts(a: &HermitianOperator) -> (HermitianOperator, HermitianOperator) {
    let eig = a.eigh();
    let pos: Vec<f64> = eig.values.iter().map(|&x| x.max(0.0)).collect();
    let neg: Vec<f64> = eig.values.iter().map(|&x| x.min(0.0)).collect();
    (
        HermitianOperator::from_eigenpairs(&pos, &eig.vectors),
        HermitianOperator::from_eigenpairs(&neg, &eig.vectors),
    )
}

/// `i ↦ tr(E_i A)`. For states this is the outcome distribution; other
/// operators give a vector labelled signed.
pub fn born_rule(m: &Measurement, a: &HermitianOperator) -> Result<ProbabilityVector> {
    if m.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: a.dim(),
        });
    }
    let weights = m.elements().iter().map(|e| e.trace_product(a)).collect();
    Ok(ProbabilityVector::classify(weights))
}

/// Kronecker product `A ⊗ B`.
pub fn tensor(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    HermitianOperator {
        mat: a.matrix().kronecker(b.matrix()),
    }
}

/// `tr_A((E ⊗ 1) X)` for `X` on `A ⊗ B`, returned as an operator on `B`.
pub fn reduce_left(x: &CMatrix, e: &CMatrix, dim_a: usize, dim_b: usize) -> CMatrix {
    debug_assert_eq!(x.nrows(), dim_a * dim_b);
    let mut out = CMatrix::zeros(dim_b, dim_b);
    for i in 0..dim_a {
        for k in 0..dim_a {
            let w = e[(i, k)];
            if w == ZERO {
                continue;
            }
            // R[j,l] += E[i,k] X[(k,j),(i,l)]
            let block = x.view((k * dim_b, i * dim_b), (dim_b, dim_b));
            out.zip_apply(&block, |o, b| *o += w * b);
        }
    }
    out
}

/// `tr_B((1 ⊗ F) X)` for `X` on `A ⊗ B`, returned as an operator on `A`.
pub fn reduce_right(x: &CMatrix, f: &CMatrix, dim_a: usize, dim_b: usize) -> CMatrix {
    debug_assert_eq!(x.nrows(), dim_a * dim_b);
    let mut out = CMatrix::zeros(dim_a, dim_a);
    for i in 0..dim_a {
        for k in 0..dim_a {
            let block = x.view((i * dim_b, k * dim_b), (dim_b, dim_b));
            // sum_{j,l} F[j,l] X[(i,l),(k,j)] = tr(F · block)
            let mut acc = ZERO;
            for j in 0..dim_b {
                for l in 0..dim_b {
                    acc += f[(j, l)] * block[(l, j)];
                }
            }
            out[(i, k)] = acc;
        }
    }
    out
}

/// A measurement `M_A ⊗ M_B` on a bipartite space, evaluated without
/// forming the product elements.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductMeasurement {
    pub left: Measurement,
    pub right: Measurement,
}

impl ProductMeasurement {
    pub fn new(left: Measurement, right: Measurement) -> Self {
        Self { left, right }
    }

    pub fn dim(&self) -> usize {
        self.left.dim() * self.right.dim()
    }

    pub fn len(&self) -> usize {
        self.left.len() * self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dense product elements, outcome `(a, b)` at index `a * |M_B| + b`.
    pub fn to_measurement(&self) -> Measurement {
        let mut elements = Vec::with_capacity(self.len());
        for ea in self.left.elements() {
            for eb in self.right.elements() {
                elements.push(ea.tensor(eb));
            }
        }
        Measurement::new_trusted(elements)
    }
}

/// Born rule for a product measurement; outcome `(a, b)` sits at index `a * |M_B| + b`.
pub fn born_rule_product(
    m: &ProductMeasurement,
    a: &HermitianOperator,
) -> Result<ProbabilityVector> {
    if m.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: a.dim(),
        });
    }
    let (da, db) = (m.left.dim(), m.right.dim());
    let mut weights = Vec::with_capacity(m.len());
    for ea in m.left.elements() {
        let reduced = HermitianOperator::symmetrized(reduce_left(a.matrix(), ea.matrix(), da, db));
        for eb in m.right.elements() {
            weights.push(eb.trace_product(&reduced));
        }
    }
    Ok(ProbabilityVector::classify(weights))
}

/// Restricts every element to the support of `pi`: `E ↦ V† E V`.
pub fn restrict_measurement(m: &Measurement, pi: &Projector) -> Result<Measurement> {
    if m.dim() != pi.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: pi.dim(),
        });
    }
    let elements = m
        .elements()
        .iter()
        .map(|e| PovmElement::new_trusted(pi.compress(e)))
        .collect();
    Measurement::new(elements)
}

/// Compresses a state supported inside `pi` onto the support.
pub fn restrict_state(rho: &DensityMatrix, pi: &Projector) -> Result<DensityMatrix> {
    let compressed = pi.compress(rho);
    let t = compressed.trace();
    if t <= 0.0 {
        return Err(Error::InvalidArgument(
            "state has no weight on the projector's support".into(),
        ));
    }
    DensityMatrix::new(&compressed * (1.0 / t))
}

/// Gentle measurement: `||ρ - ΠρΠ||_1 <= 2 sqrt(1 - tr(Πρ))`. Returns both sides.
pub fn gentle_measurement_check(rho: &DensityMatrix, pi: &Projector) -> Result<(f64, f64)> {
    if rho.dim() != pi.dim() {
        return Err(Error::DimensionMismatch {
            expected: pi.dim(),
            found: rho.dim(),
        });
    }
    let sandwiched = pi.sandwich(rho);
    let lhs = trace_norm(&(rho.operator() - &sandwiched));
    let rhs = 2.0 * (1.0 - sandwiched.trace()).max(0.0).sqrt();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn singlet() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(CVector::from_vec(vec![
            c(0.0, 0.0),
            c(h, 0.0),
            c(-h, 0.0),
            c(0.0, 0.0),
        ]))
        .unwrap()
    }

    #[test]
    fn rejects_non_finite_and_non_hermitian() {
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = c(f64::NAN, 0.0);
        assert_eq!(HermitianOperator::new(m), Err(Error::NonFinite));
        let mut m = CMatrix::identity(2, 2);
        m[(0, 1)] = c(0.5, 0.0);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotHermitian { .. })
        ));
        let m = CMatrix::zeros(2, 3);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn spectrum_examples() {
        assert_eq!(spectrum(&HermitianOperator::identity(2)), vec![1.0, 1.0]);
        let d = HermitianOperator::from_real_diagonal(&[0.1, 0.4, 0.2, 0.3]);
        assert_eq!(spectrum(&d), vec![0.4, 0.3, 0.2, 0.1]);
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(trace_norm(&HermitianOperator::zeros(3)), 0.0);
        let z = HermitianOperator::from_real_diagonal(&[1.0, -1.0]);
        assert!((trace_norm(&z) - 2.0).abs() < 1e-12);
        let s = HermitianOperator::projector(&singlet());
        let diff = &s - &(&HermitianOperator::identity(4) * 0.25);
        assert!((trace_norm(&diff) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn pos_neg_parts_diagonal_and_psd() {
        let a = HermitianOperator::from_real_diagonal(&[1.0, -2.0]);
        let (p, n) = pos_neg_parts(&a);
        assert!(p.max_abs_diff(&HermitianOperator::from_real_diagonal(&[1.0, 0.0])) < 1e-14);
        assert!(n.max_abs_diff(&HermitianOperator::from_real_diagonal(&[0.0, -2.0])) < 1e-14);
        let psd = HermitianOperator::projector(&singlet());
        let (p, n) = pos_neg_parts(&psd);
        assert!(p.max_abs_diff(&psd) < 1e-12);
        assert!(n.frobenius_norm() < 1e-12);
    }

    #[test]
    fn born_rule_basics() {
        let m = Measurement::computational(2);
        let p = born_rule(&m, &DensityMatrix::basis_state(2, 0)).unwrap();
        assert_eq!(p.weights(), &[1.0, 0.0]);
        assert!(!p.is_signed());
        let traceless = HermitianOperator::from_real_diagonal(&[0.3, -0.3]);
        let p = born_rule(&m, &traceless).unwrap();
        assert!(p.is_signed());
        assert!(p.total().abs() < 1e-12);
        let wrong = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            born_rule(&m, &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn singlet_in_matched_computational_bases() {
        let rho = DensityMatrix::from_pure(&singlet());
        let m =
            ProductMeasurement::new(Measurement::computational(2), Measurement::computational(2));
        let p = born_rule_product(&m, &rho).unwrap();
        let expected = [0.0, 0.5, 0.5, 0.0];
        for (x, y) in p.weights().iter().zip(expected) {
            assert!((x - y).abs() < 1e-12);
        }
        let dense = born_rule(&m.to_measurement(), &rho).unwrap();
        for (x, y) in p.weights().iter().zip(dense.weights()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn tensor_examples() {
        let id = tensor(
            &HermitianOperator::identity(2),
            &HermitianOperator::identity(3),
        );
        assert_eq!(id, HermitianOperator::identity(6));
        let p0 = HermitianOperator::from_real_diagonal(&[1.0, 0.0]);
        let p1 = HermitianOperator::from_real_diagonal(&[0.0, 1.0]);
        let t = tensor(&p0, &p1);
        assert_eq!(t.matrix()[(1, 1)], c(1.0, 0.0));
        assert_eq!(t.trace(), 1.0);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(matches!(
            DensityMatrix::from_diagonal(&[0.5, 0.6]),
            Err(Error::TraceNotOne { .. })
        ));
        assert!(matches!(
            DensityMatrix::from_diagonal(&[1.5, -0.5]),
            Err(Error::NotPositive { .. })
        ));
        // Tiny negativity is clamped.
        let rho = DensityMatrix::from_diagonal(&[1.0 + 5e-11, -5e-11]).unwrap();
        assert!(spectrum(&rho).iter().all(|&x| x >= 0.0));
        assert!((rho.trace() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn measurement_validation() {
        let half = PovmElement::new(&HermitianOperator::identity(2) * 0.5).unwrap();
        assert!(matches!(
            Measurement::new(vec![half.clone()]),
            Err(Error::IncompleteMeasurement { .. })
        ));
        assert!(Measurement::new(vec![half.clone(), half]).is_ok());
        assert_eq!(Measurement::new(vec![]), Err(Error::EmptyMeasurement));
        assert!(matches!(
            PovmElement::new(&HermitianOperator::identity(2) * 1.5),
            Err(Error::InvalidEffect { .. })
        ));
    }

    #[test]
    fn restriction_examples() {
        let m = Measurement::computational(3);
        let full = Projector::coordinate(3, &[0, 1, 2]);
        let r = restrict_measurement(&m, &full).unwrap();
        for (a, b) in r.elements().iter().zip(m.elements()) {
            assert!(a.max_abs_diff(b) < 1e-14);
        }
        let psi = PureState::normalized(CVector::from_vec(vec![
            c(1.0, 0.0),
            c(1.0, 1.0),
            c(0.0, 2.0),
        ]))
        .unwrap();
        let rank1 = Projector::from_isometry(CMatrix::from_column_slice(
            3,
            1,
            psi.amplitudes().as_slice(),
        ))
        .unwrap();
        let r = restrict_measurement(&m, &rank1).unwrap();
        let total: f64 = r.elements().iter().map(|e| e.trace()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for e in r.elements() {
            assert_eq!(e.dim(), 1);
            assert!((-1e-12..=1.0 + 1e-12).contains(&e.trace()));
        }
        let not_projector = &HermitianOperator::identity(2) * 0.5;
        assert!(matches!(
            Projector::new(not_projector),
            Err(Error::NotProjector { .. })
        ));
    }

    #[test]
    fn gentle_measurement_examples() {
        let rho = DensityMatrix::from_diagonal(&[0.5, 0.5, 0.0]).unwrap();
        let pi = Projector::coordinate(3, &[0, 1]);
        let (lhs, rhs) = gentle_measurement_check(&rho, &pi).unwrap();
        assert!(lhs.abs() < 1e-14 && rhs.abs() < 1e-7);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)])).unwrap();
        let (lhs, rhs) = gentle_measurement_check(
            &DensityMatrix::from_pure(&plus),
            &Projector::coordinate(2, &[0]),
        )
        .unwrap();
        // rho - P rho P = [[0, 1/2], [1/2, 1/2]] has eigenvalues (1 ± sqrt 5)/4.
        assert!((lhs - 5f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((rhs - 2f64.sqrt()).abs() < 1e-12);
    }
}
