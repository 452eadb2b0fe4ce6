//! Lindblad master equation
//! ρ̇ = i[ρ, H] + Σ_α (γ/2)(2c_α ρ c_α† − {ρ, c_α†c_α})
//! as a sparse superoperator on column-stacked density matrices,
//! vec(ρ)[i + d·j] = ρ[i, j], so that vec(AXB) = (Bᵀ ⊗ A) vec(X).

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Mat};

use crate::error::{Error, Result};
use crate::hilbert::{check_dim, CompositeOps, HilbertConfig, OperatorMatrix, StateVector, C64};
use crate::model::{rotating_frame_hamiltonian_with, PhysicalParams};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Tolerances a [`DensityMatrix`] must meet.
pub const DENSITY_HERMITIAN_TOL: f64 = 1e-10;
pub const DENSITY_TRACE_TOL: f64 = 1e-10;
pub const DENSITY_MIN_EIGENVALUE: f64 = -1e-8;

/// Largest superoperator size for which the dense fallbacks (rank count,
/// dense LU) are attempted.
pub const DENSE_LIMIT: usize = 5184;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: OperatorMatrix,
}

/// Deviations of a state from the density-matrix axioms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityDefects {
    pub trace_error: f64,
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
}

impl DensityDefects {
    pub fn is_valid(&self) -> bool {
        self.trace_error <= DENSITY_TRACE_TOL
            && self.hermiticity <= DENSITY_HERMITIAN_TOL
            && self.min_eigenvalue >= DENSITY_MIN_EIGENVALUE
    }
}

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positivity.
    pub fn new(op: OperatorMatrix) -> Result<Self> {
        let rho = Self { op };
        let d = rho.defects();
        if !d.is_valid() {
            return Err(Error::Domain(format!(
                "not a density matrix: trace error {:.2e}, hermiticity {:.2e}, min eigenvalue {:.2e}",
                d.trace_error, d.hermiticity, d.min_eigenvalue
            )));
        }
        Ok(rho)
    }

    /// Wraps a matrix without checking it.
    pub fn from_operator_unchecked(op: OperatorMatrix) -> Self {
        Self { op }
    }

    pub fn pure(state: &StateVector) -> Self {
        Self { op: state.projector() }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn matrix(&self) -> &OperatorMatrix {
        &self.op
    }

    pub fn trace(&self) -> C64 {
        self.op.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.op.hermitian_eigenvalues()[0]
    }

    pub fn defects(&self) -> DensityDefects {
        DensityDefects {
            trace_error: (self.trace() - C64::new(1.0, 0.0)).norm(),
            hermiticity: self.op.hermiticity_defect(),
            min_eigenvalue: self.min_eigenvalue(),
        }
    }

    /// ½‖ρ − σ‖₁.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        let diff = &self.op - &other.op;
        Ok(0.5 * diff.hermitian_eigenvalues().iter().map(|x| x.abs()).sum::<f64>())
    }
}

pub fn vectorize(op: &OperatorMatrix) -> Vec<C64> {
    let d = op.dim();
    let mut v = Vec::with_capacity(d * d);
    for j in 0..d {
        for i in 0..d {
            v.push(op.get(i, j));
        }
    }
    v
}

pub fn unvectorize(v: &[C64], dim: usize) -> Result<OperatorMatrix> {
    check_dim(dim * dim, v.len())?;
    Ok(OperatorMatrix::from_fn(dim, |i, j| v[i + dim * j]))
}

/// Generator of the master equation acting on vec(ρ).
#[derive(Debug, Clone)]
pub struct Superoperator {
    dim: usize,
    mat: SparseColMat<usize, C64>,
}

impl Superoperator {
    /// Hilbert-space dimension d; the matrix itself is d² × d².
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.dim * self.dim
    }

    pub fn nnz(&self) -> usize {
        self.mat.compute_nnz()
    }

    pub fn sparse(&self) -> &SparseColMat<usize, C64> {
        &self.mat
    }

    pub fn to_dense(&self) -> Mat<C64> {
        self.mat.to_dense()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.val().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.val().iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        check_dim(self.size(), x.len())?;
        let mut y = vec![ZERO; x.len()];
        self.apply_into(x, &mut y);
        Ok(y)
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = ZERO);
        let m = self.mat.as_ref();
        let sym = m.symbolic();
        for (j, &xj) in x.iter().enumerate() {
            if xj == ZERO {
                continue;
            }
            for (&i, &v) in sym.row_idx_of_col_raw(j).iter().zip(m.val_of_col(j)) {
                y[i] += v * xj;
            }
        }
    }

    /// unvec(L·vec(ρ)).
    pub fn apply_to(&self, rho: &OperatorMatrix) -> Result<OperatorMatrix> {
        unvectorize(&self.apply(&vectorize(rho))?, self.dim)
    }
}

/// Accumulates (A ⊗ B)·s into a triplet list, skipping zero entries.
fn push_kron(a: &OperatorMatrix, b: &OperatorMatrix, s: C64, out: &mut Vec<Triplet<usize, usize, C64>>) {
    let d = b.dim();
    let nz = |m: &OperatorMatrix| {
        let n = m.dim();
        let mut v = Vec::new();
        for q in 0..n {
            for p in 0..n {
                let x = m.get(p, q);
                if x != ZERO {
                    v.push((p, q, x));
                }
            }
        }
        v
    };
    let (na, nb) = (nz(a), nz(b));
    for &(p, q, x) in &na {
        let xs = x * s;
        for &(i, k, y) in &nb {
            out.push(Triplet::new(p * d + i, q * d + k, xs * y));
        }
    }
}

/// L = i(Hᵀ⊗I − I⊗H) + Σ (γ/2)(2c̄⊗c − I⊗c†c − (c†c)ᵀ⊗I), every collapse
/// operator sharing the rate γ.
pub fn liouvillian(h: &OperatorMatrix, gamma: f64, collapse: &[OperatorMatrix]) -> Result<Superoperator> {
    let channels: Vec<(f64, &OperatorMatrix)> = collapse.iter().map(|c| (gamma, c)).collect();
    liouvillian_with_rates(h, &channels)
}

pub fn liouvillian_with_rates(h: &OperatorMatrix, channels: &[(f64, &OperatorMatrix)]) -> Result<Superoperator> {
    let d = h.dim();
    for (_, c) in channels {
        check_dim(d, c.dim())?;
    }
    let id = OperatorMatrix::identity(d);
    let i = C64::i();
    let mut trip = Vec::new();
    push_kron(&h.transpose(), &id, i, &mut trip);
    push_kron(&id, h, -i, &mut trip);
    for &(rate, c) in channels {
        if rate == 0.0 {
            continue;
        }
        let n = &c.adjoint() * c;
        push_kron(&c.conjugate(), c, C64::new(rate, 0.0), &mut trip);
        push_kron(&id, &n, C64::new(-0.5 * rate, 0.0), &mut trip);
        push_kron(&n.transpose(), &id, C64::new(-0.5 * rate, 0.0), &mut trip);
    }
    let mat = SparseColMat::try_new_from_triplets(d * d, d * d, &trip)
        .map_err(|e| Error::Domain(format!("superoperator assembly failed: {e:?}")))?;
    Ok(Superoperator { dim: d, mat })
}

/// Liouvillian of the drive-frame model with cavity decay on both modes.
pub fn model_liouvillian(p: &PhysicalParams, ops: &CompositeOps) -> Result<Superoperator> {
    let h = rotating_frame_hamiltonian_with(p, ops)?;
    liouvillian(&h, p.gamma, &[ops.a_plus.clone(), ops.a_minus.clone()])
}

/// Replaces row 0 of L by w·tr(·); the right-hand side becomes w·e₀.
/// The weight keeps the trace row on the scale of the other rows.
fn trace_constrained(l: &Superoperator) -> (SparseColMat<usize, C64>, f64) {
    let d = l.dim;
    let w = match l.max_abs() {
        x if x > 0.0 => x,
        _ => 1.0,
    };
    let m = l.mat.as_ref();
    let sym = m.symbolic();
    let mut trip = Vec::with_capacity(l.nnz() + d);
    for j in 0..l.size() {
        for (&i, &v) in sym.row_idx_of_col_raw(j).iter().zip(m.val_of_col(j)) {
            if i != 0 {
                trip.push(Triplet::new(i, j, v));
            }
        }
    }
    for k in 0..d {
        trip.push(Triplet::new(0, k * d + k, C64::new(w, 0.0)));
    }
    let a = SparseColMat::try_new_from_triplets(l.size(), l.size(), &trip).expect("valid triplets");
    (a, w)
}

/// ‖L·vec(ρ)‖₂.
pub fn residual_norm(l: &Superoperator, rho: &DensityMatrix) -> Result<f64> {
    let r = l.apply(&vectorize(rho.matrix()))?;
    Ok(r.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
}

/// Relative residual below which a trace-constrained solve is accepted.
const ACCEPT_RESIDUAL: f64 = 1e-10;

fn accept(l: &Superoperator, x: Vec<C64>) -> Result<DensityMatrix> {
    let d = l.dim;
    let finite = x.iter().all(|v| v.re.is_finite() && v.im.is_finite());
    if finite {
        let rho = DensityMatrix::from_operator_unchecked(unvectorize(&x, d)?);
        let r = residual_norm(l, &rho)?;
        let scale = l.frobenius_norm() * rho.matrix().frobenius_norm();
        if r <= ACCEPT_RESIDUAL * scale.max(f64::MIN_POSITIVE) {
            return Ok(rho);
        }
    }
    Err(Error::DegenerateSteadyState { null_dim: null_space_dimension(l).unwrap_or(2) })
}

/// Unique steady state: solves L·vec(ρ) = 0 with tr ρ = 1 by sparse LU.
///
/// The returned matrix is the raw solution; it is not symmetrized or
/// renormalized, so its [`DensityMatrix::defects`] measure solver accuracy.
pub fn steady_state(l: &Superoperator) -> Result<DensityMatrix> {
    let (a, w) = trace_constrained(l);
    let symbolic = SymbolicLu::try_new(a.symbolic()).map_err(|_| Error::DegenerateSteadyState {
        null_dim: null_space_dimension(l).unwrap_or(2),
    })?;
    let lu = match Lu::try_new_with_symbolic(symbolic, a.as_ref()) {
        Ok(lu) => lu,
        Err(_) => return Err(Error::DegenerateSteadyState { null_dim: null_space_dimension(l).unwrap_or(2) }),
    };
    let mut b = Col::<C64>::zeros(l.size());
    b[0] = C64::new(w, 0.0);
    let x = lu.solve(&b);
    accept(l, (0..l.size()).map(|i| x[i]).collect())
}

/// Same constrained system solved by dense partial-pivoting LU. Only for
/// small spaces; used to cross-check the sparse path.
pub fn steady_state_dense(l: &Superoperator) -> Result<DensityMatrix> {
    if l.size() > DENSE_LIMIT {
        return Err(Error::Unsupported(format!("dense solve limited to {DENSE_LIMIT} unknowns")));
    }
    let (a, w) = trace_constrained(l);
    let lu = a.to_dense().partial_piv_lu();
    let mut b = Col::<C64>::zeros(l.size());
    b[0] = C64::new(w, 0.0);
    let x = lu.solve(&b);
    accept(l, (0..l.size()).map(|i| x[i]).collect())
}

/// Number of singular values of L below 1e-10·σ_max, from a dense SVD.
/// Returns `None` above [`DENSE_LIMIT`].
pub fn null_space_dimension(l: &Superoperator) -> Option<usize> {
    if l.size() > DENSE_LIMIT {
        return None;
    }
    let s = l.to_dense().singular_values().ok()?;
    let top = s.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return Some(l.size());
    }
    Some(s.iter().filter(|&&x| x <= 1e-10 * top).count())
}

/// tr(ρ·O).
pub fn expectation(rho: &DensityMatrix, o: &OperatorMatrix) -> Result<C64> {
    check_dim(rho.dim(), o.dim())?;
    let (r, d) = (rho.matrix(), rho.dim());
    let mut s = ZERO;
    for i in 0..d {
        for j in 0..d {
            s += r.get(i, j) * o.get(j, i);
        }
    }
    Ok(s)
}

/// Output photon current γ·n̄ for a mode with its own output port.
pub fn output_current(n_bar: f64, gamma: f64) -> f64 {
    gamma * n_bar
}

/// Classical fourth-order Runge-Kutta for vec(ρ̇) = L·vec(ρ), using
/// ⌈t_final/dt⌉ equal steps.
///
/// Each stage preserves the trace to rounding error, so an unstable step
/// shows up as growth of ‖ρ‖_F beyond 1 rather than as trace drift. The
/// reported drift is the larger of the two.
pub fn time_evolve(l: &Superoperator, rho0: &DensityMatrix, t_final: f64, dt: f64) -> Result<DensityMatrix> {
    check_dim(l.dim(), rho0.dim())?;
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(Error::Domain("time_evolve needs dt > 0 and t_final ≥ 0".into()));
    }
    let steps = (t_final / dt).ceil() as usize;
    let mut x = vectorize(rho0.matrix());
    if steps > 0 {
        let h = t_final / steps as f64;
        let n = x.len();
        let (mut k1, mut k2, mut k3, mut k4) = (vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]);
        let mut tmp = vec![ZERO; n];
        for _ in 0..steps {
            l.apply_into(&x, &mut k1);
            axpy(&x, 0.5 * h, &k1, &mut tmp);
            l.apply_into(&tmp, &mut k2);
            axpy(&x, 0.5 * h, &k2, &mut tmp);
            l.apply_into(&tmp, &mut k3);
            axpy(&x, h, &k3, &mut tmp);
            l.apply_into(&tmp, &mut k4);
            for i in 0..n {
                x[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
        }
    }
    let rho = DensityMatrix::from_operator_unchecked(unvectorize(&x, l.dim())?);
    let tr0 = rho0.trace();
    let drift = (rho.trace() - tr0)
        .norm()
        .max(rho.matrix().frobenius_norm() - rho0.matrix().frobenius_norm().max(1.0));
    if !(drift <= 1e-6) {
        return Err(Error::StepSize { drift: if drift.is_nan() { f64::INFINITY } else { drift } });
    }
    Ok(rho)
}

fn axpy(x: &[C64], a: f64, y: &[C64], out: &mut [C64]) {
    for i in 0..x.len() {
        out[i] = x[i] + y[i] * a;
    }
}

/// Steady ⟨a₊†a₊⟩ and ⟨a₋†a₋⟩ of the driven model.
pub fn steady_photon_numbers(p: &PhysicalParams, ops: &CompositeOps) -> Result<(f64, f64)> {
    p.validate()?;
    let l = model_liouvillian(p, ops)?;
    let rho = steady_state(&l)?;
    Ok((expectation(&rho, &ops.n_plus)?.re, expectation(&rho, &ops.n_minus)?.re))
}

/// Convenience wrapper that builds the operators for `h`.
pub fn steady_photon_numbers_at(p: &PhysicalParams, h: &HilbertConfig) -> Result<(f64, f64)> {
    steady_photon_numbers(p, &CompositeOps::new(h)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::Atom;

    fn random_hermitian(d: usize, seed: u64) -> OperatorMatrix {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = OperatorMatrix::from_fn(d, |_, _| C64::new(next(), next()));
        &a + &a.adjoint()
    }

    fn small() -> (HilbertConfig, CompositeOps) {
        let c = HilbertConfig::new(2).unwrap();
        let ops = CompositeOps::new(&c).unwrap();
        (c, ops)
    }

    #[test]
    fn vectorization_convention() {
        let (c, ops) = small();
        let d = c.total_dim();
        let x = random_hermitian(d, 3);
        let a = ops.a_plus.clone();
        let b = ops.sigma_plus.clone();
        // vec(A X B) = (Bᵀ ⊗ A) vec(X)
        let lhs = vectorize(&(&(&a * &x) * &b));
        let mut trip = Vec::new();
        push_kron(&b.transpose(), &a, C64::new(1.0, 0.0), &mut trip);
        let m = SparseColMat::try_new_from_triplets(d * d, d * d, &trip).unwrap();
        let s = Superoperator { dim: d, mat: m };
        let rhs = s.apply(&vectorize(&x)).unwrap();
        for (p, q) in lhs.iter().zip(&rhs) {
            assert!((p - q).norm() < 1e-12);
        }
        assert_eq!(unvectorize(&vectorize(&x), d).unwrap(), x);
    }

    #[test]
    fn zero_generator() {
        let l = liouvillian(&OperatorMatrix::zeros(6), 0.0, &[]).unwrap();
        assert_eq!(l.nnz(), 0);
    }

    #[test]
    fn matches_direct_master_equation() {
        let (_, ops) = small();
        let p = PhysicalParams::baseline().with_delta(1e-5).with_drive_detuning(4e-5);
        let h = rotating_frame_hamiltonian_with(&p, &ops).unwrap();
        let l = model_liouvillian(&p, &ops).unwrap();
        let rho = random_hermitian(h.dim(), 11);
        let mut want = (&(&rho * &h) - &(&h * &rho)).scale(C64::i());
        for c in [&ops.a_plus, &ops.a_minus] {
            let n = &c.adjoint() * c;
            let jump = (&(c * &rho) * &c.adjoint()).scale_re(2.0);
            let anti = &(&rho * &n) + &(&n * &rho);
            want = &want + &(&jump - &anti).scale_re(0.5 * p.gamma);
        }
        let got = l.apply_to(&rho).unwrap();
        assert!((&got - &want).max_abs() < 1e-15);
        assert!(got.trace().norm() < 1e-12);
        assert!(got.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn mismatched_collapse() {
        let err = liouvillian(&OperatorMatrix::zeros(4), 1.0, &[OperatorMatrix::zeros(3)]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn undriven_steady_state_is_ground() {
        let (c, ops) = small();
        let p = PhysicalParams { drive_amp: 0.0, ..PhysicalParams::baseline().with_delta(1e-5) };
        let l = model_liouvillian(&p, &ops).unwrap();
        let ground = DensityMatrix::pure(&c.basis_state(Atom::Ground, 0, 0));
        for rho in [steady_state(&l).unwrap(), steady_state_dense(&l).unwrap()] {
            assert!((rho.matrix() - ground.matrix()).max_abs() < 1e-10);
        }
    }

    #[test]
    fn sparse_and_dense_agree() {
        let (_, ops) = small();
        let p = PhysicalParams::baseline().with_delta(1e-5).with_drive_detuning(1.3e-4);
        let l = model_liouvillian(&p, &ops).unwrap();
        let a = steady_state(&l).unwrap();
        let b = steady_state_dense(&l).unwrap();
        assert!((a.matrix() - b.matrix()).max_abs() < 1e-10);
        assert!(a.defects().is_valid());
        assert_eq!(null_space_dimension(&l), Some(1));
    }

    #[test]
    fn decoupled_atom_is_degenerate() {
        let (_, ops) = small();
        let p = PhysicalParams { g: 0.0, ..PhysicalParams::baseline() };
        let l = model_liouvillian(&p, &ops).unwrap();
        match steady_state(&l) {
            Err(Error::DegenerateSteadyState { null_dim }) => assert!(null_dim >= 2),
            other => panic!("expected degenerate steady state, got {other:?}"),
        }
    }

    #[test]
    fn expectation_basics() {
        let (c, ops) = small();
        let rho = DensityMatrix::pure(&c.basis_state(Atom::Ground, 1, 0));
        assert_eq!(expectation(&rho, &OperatorMatrix::identity(c.total_dim())).unwrap(), C64::new(1.0, 0.0));
        assert!((expectation(&rho, &ops.n_plus).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);
        let mixed = DensityMatrix::new(
            (&rho.matrix().scale_re(0.25) + &DensityMatrix::pure(&c.basis_state(Atom::Excited, 0, 2)).matrix().scale_re(0.75))
                .clone(),
        )
        .unwrap();
        let o = random_hermitian(c.total_dim(), 5);
        assert!(expectation(&mixed, &o).unwrap().im.abs() < 1e-12);
        assert!(expectation(&mixed, &OperatorMatrix::identity(3)).is_err());
    }

    #[test]
    fn current() {
        assert_eq!(output_current(0.0, 0.5e-4), 0.0);
        assert!((output_current(0.01, 0.5e-4) - 5e-7).abs() < 1e-15 * 5e-7);
        let (np, nm) = (0.02, 0.005);
        assert!((output_current(np, 3.0) / output_current(nm, 3.0) - np / nm).abs() < 1e-12);
    }

    #[test]
    fn evolution_identity_and_decay() {
        let (c, ops) = small();
        let rho0 = DensityMatrix::pure(&c.basis_state(Atom::Ground, 1, 0));
        let zero = liouvillian(&OperatorMatrix::zeros(c.total_dim()), 0.0, &[]).unwrap();
        assert_eq!(time_evolve(&zero, &rho0, 10.0, 1.0).unwrap(), rho0);

        let p = PhysicalParams { g: 0.0, drive_amp: 0.0, ..PhysicalParams::baseline() };
        let l = model_liouvillian(&p, &ops).unwrap();
        let t = 1.0 / p.gamma;
        let rho = time_evolve(&l, &rho0, t, 0.02 / p.gamma).unwrap();
        let n = expectation(&rho, &ops.n_plus).unwrap().re;
        assert!((n - (-1.0f64).exp()).abs() < 1e-6);

        let err = time_evolve(&l, &rho0, 100.0 / p.gamma, 5.0 / p.gamma).unwrap_err();
        assert!(matches!(err, Error::StepSize { .. }));
    }

    #[test]
    fn photon_number_helper() {
        let c = HilbertConfig::new(3).unwrap();
        let (np, nm) = steady_photon_numbers_at(&PhysicalParams::baseline(), &c).unwrap();
        assert!((np - 0.01).abs() < 1e-4);
        assert!((nm - 0.01).abs() < 1e-4);
    }
}
