//! Truncated operator algebra on atom ⊗ mode₊ ⊗ mode₋.
//!
//! Slot order is fixed: the atom is the slowest index, mode₋ the fastest.
//! Atomic index 0 is |g⟩ and 1 is |e⟩, so σᶻ = diag(−1, 1) and
//! |g,n₊,n₋⟩ has composite index n₊·(n_max+1) + n₋.

use std::ops::{Add, Mul, Neg, Sub};

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Normalization of σʸ.
///
/// `Pauli` is the usual −i(σ⁺ − σ⁻). `Commutator` is i[σᶻ, σˣ] taken
/// literally, which equals −2σʸ_Pauli in the |g⟩,|e⟩ basis used here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaYConvention {
    #[default]
    Pauli,
    Commutator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HilbertConfig {
    pub n_max: usize,
    #[serde(default)]
    pub sigma_y: SigmaYConvention,
}

impl Default for HilbertConfig {
    fn default() -> Self {
        Self { n_max: 5, sigma_y: SigmaYConvention::Pauli }
    }
}

impl HilbertConfig {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::Domain("n_max must be at least 1".into()));
        }
        Ok(Self { n_max, sigma_y: SigmaYConvention::Pauli })
    }

    pub fn mode_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn total_dim(&self) -> usize {
        2 * self.mode_dim() * self.mode_dim()
    }

    /// Composite index of |atom, n₊, n₋⟩ (atom: 0 = g, 1 = e).
    pub fn index(&self, atom: usize, n_plus: usize, n_minus: usize) -> usize {
        let m = self.mode_dim();
        atom * m * m + n_plus * m + n_minus
    }

    pub fn basis_state(&self, atom: Atom, n_plus: usize, n_minus: usize) -> StateVector {
        StateVector::basis(self.total_dim(), self.index(atom as usize, n_plus, n_minus))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atom {
    Ground = 0,
    Excited = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Atom,
    Plus,
    Minus,
}

/// Dense complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    mat: Mat<C64>,
}

impl OperatorMatrix {
    pub fn from_mat(mat: Mat<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch { expected: mat.nrows(), got: mat.ncols() });
        }
        Ok(Self { mat })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self { mat: Mat::from_fn(dim, dim, f) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { mat: Mat::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: Mat::identity(dim, dim) }
    }

    pub fn diagonal(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.mat[(i, i)] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &Mat<C64> {
        &self.mat
    }

    pub fn into_mat(self) -> Mat<C64> {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.mat[(i, j)] = v;
    }

    pub fn adjoint(&self) -> Self {
        Self { mat: self.mat.adjoint().to_owned() }
    }

    pub fn transpose(&self) -> Self {
        Self { mat: self.mat.transpose().to_owned() }
    }

    pub fn conjugate(&self) -> Self {
        Self { mat: self.mat.conjugate().to_owned() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { mat: &self.mat * faer::Scale(s) }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { mat: self.mat.kron(&other.mat) }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self * other - other * self
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.mat[(i, i)]).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        let n = self.dim();
        let mut m = 0.0_f64;
        for j in 0..n {
            for i in 0..n {
                m = m.max(self.mat[(i, j)].norm());
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm_l2()
    }

    /// max |A − A†|.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut m = 0.0_f64;
        for j in 0..n {
            for i in 0..=j {
                m = m.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        m
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|i| i == j || self.mat[(i, j)] == ZERO))
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        check_dim(self.dim(), v.dim())?;
        let n = self.dim();
        let amps = (0..n)
            .map(|i| (0..n).map(|j| self.mat[(i, j)] * v.amplitudes[j]).sum())
            .collect();
        Ok(StateVector { amplitudes: amps })
    }

    /// ⟨u|A|v⟩.
    pub fn matrix_element(&self, u: &StateVector, v: &StateVector) -> Result<C64> {
        let av = self.apply(v)?;
        Ok(u.inner(&av))
    }

    /// Eigenvalues of the Hermitian part (A + A†)/2, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = (&self.mat + self.mat.adjoint()) * faer::Scale(C64::new(0.5, 0.0));
        h.self_adjoint_eigenvalues(faer::Side::Lower)
            .expect("Hermitian eigenvalue iteration did not converge")
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

impl Add for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: Self) -> OperatorMatrix {
        OperatorMatrix { mat: &self.mat + &rhs.mat }
    }
}

impl Sub for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: Self) -> OperatorMatrix {
        OperatorMatrix { mat: &self.mat - &rhs.mat }
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: Self) -> OperatorMatrix {
        OperatorMatrix { mat: &self.mat * &rhs.mat }
    }
}

impl Neg for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn neg(self) -> OperatorMatrix {
        OperatorMatrix { mat: -&self.mat }
    }
}

impl Add for OperatorMatrix {
    type Output = OperatorMatrix;
    fn add(self, rhs: Self) -> OperatorMatrix {
        &self + &rhs
    }
}

impl Sub for OperatorMatrix {
    type Output = OperatorMatrix;
    fn sub(self, rhs: Self) -> OperatorMatrix {
        &self - &rhs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() < 1e-12
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// |ψ⟩⟨ψ|.
    pub fn projector(&self) -> OperatorMatrix {
        let a = &self.amplitudes;
        OperatorMatrix::from_fn(a.len(), |i, j| a[i] * a[j].conj())
    }
}

/// Bosonic lowering operator on n_max + 1 Fock states: a[n−1, n] = √n.
pub fn annihilation(n_max: usize) -> Result<OperatorMatrix> {
    if n_max < 1 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let mut a = OperatorMatrix::zeros(n_max + 1);
    for n in 1..=n_max {
        a.set(n - 1, n, C64::new((n as f64).sqrt(), 0.0));
    }
    Ok(a)
}

pub fn sigma_z() -> OperatorMatrix {
    OperatorMatrix::diagonal(&[-ONE, ONE])
}

/// σ⁺ = |e⟩⟨g|.
pub fn sigma_plus() -> OperatorMatrix {
    let mut s = OperatorMatrix::zeros(2);
    s.set(1, 0, ONE);
    s
}

pub fn sigma_minus() -> OperatorMatrix {
    sigma_plus().adjoint()
}

pub fn sigma_x() -> OperatorMatrix {
    &sigma_plus() + &sigma_minus()
}

pub fn sigma_y(convention: SigmaYConvention) -> OperatorMatrix {
    match convention {
        SigmaYConvention::Pauli => (&sigma_plus() - &sigma_minus()).scale(-C64::i()),
        SigmaYConvention::Commutator => sigma_z().commutator(&sigma_x()).scale(C64::i()),
    }
}

/// Kronecker embedding of a single-slot operator into the composite space.
pub fn embed(op: &OperatorMatrix, slot: Slot, config: &HilbertConfig) -> Result<OperatorMatrix> {
    let m = config.mode_dim();
    let expected = match slot {
        Slot::Atom => 2,
        Slot::Plus | Slot::Minus => m,
    };
    check_dim(expected, op.dim())?;
    let ia = OperatorMatrix::identity(2);
    let im = OperatorMatrix::identity(m);
    Ok(match slot {
        Slot::Atom => op.kron(&im).kron(&im),
        Slot::Plus => ia.kron(op).kron(&im),
        Slot::Minus => ia.kron(&im).kron(op),
    })
}

/// Embedded operators shared by the model builders.
#[derive(Debug, Clone)]
pub struct CompositeOps {
    pub config: HilbertConfig,
    pub a_plus: OperatorMatrix,
    pub a_minus: OperatorMatrix,
    pub n_plus: OperatorMatrix,
    pub n_minus: OperatorMatrix,
    pub sigma_plus: OperatorMatrix,
    pub sigma_minus: OperatorMatrix,
    pub sigma_z: OperatorMatrix,
    pub sigma_y: OperatorMatrix,
}

impl CompositeOps {
    pub fn new(config: &HilbertConfig) -> Result<Self> {
        let a = annihilation(config.n_max)?;
        let a_plus = embed(&a, Slot::Plus, config)?;
        let a_minus = embed(&a, Slot::Minus, config)?;
        let n_plus = &a_plus.adjoint() * &a_plus;
        let n_minus = &a_minus.adjoint() * &a_minus;
        Ok(Self {
            config: *config,
            a_plus,
            a_minus,
            n_plus,
            n_minus,
            sigma_plus: embed(&sigma_plus(), Slot::Atom, config)?,
            sigma_minus: embed(&sigma_minus(), Slot::Atom, config)?,
            sigma_z: embed(&sigma_z(), Slot::Atom, config)?,
            sigma_y: embed(&sigma_y(config.sigma_y), Slot::Atom, config)?,
        })
    }
}

/// N̂ = σᶻ + a₊†a₊ + a₋†a₋, as written for the ring model.
///
/// With σᶻ rather than σ⁺σ⁻ this operator does not commute with the coupling
/// terms: σ⁺a moves σᶻ by 2 and the photon number by 1. See
/// [`conserved_excitation_number`] for the quantity that is conserved.
pub fn excitation_number(config: &HilbertConfig) -> Result<OperatorMatrix> {
    let ops = CompositeOps::new(config)?;
    Ok(&(&ops.sigma_z + &ops.n_plus) + &ops.n_minus)
}

/// σ⁺σ⁻ + a₊†a₊ + a₋†a₋, which commutes with the undriven JC Hamiltonian.
pub fn conserved_excitation_number(config: &HilbertConfig) -> Result<OperatorMatrix> {
    let ops = CompositeOps::new(config)?;
    let ee = &ops.sigma_plus * &ops.sigma_minus;
    Ok(&(&ee + &ops.n_plus) + &ops.n_minus)
}
