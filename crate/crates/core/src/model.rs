//! Model parameters and the Jaynes-Cummings Hamiltonians of the ring.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{CompositeOps, HilbertConfig, OperatorMatrix, C64};

/// Relative tolerance used to decide whether Ω_a = ω₀.
pub const RESONANCE_TOL: f64 = 1e-12;

/// Model constants in ħ = 1 units.
///
/// The drive is stored through its detuning from the atom,
/// Ω̃ = Ω_a − ω_d, rather than through ω_d itself: the physics lives at
/// |Ω̃| ~ g ≪ Ω_a and forming Ω_a − ω_d in floating point would lose most
/// of its digits. [`PhysicalParams::drive_freq`] recovers ω_d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    pub omega0: f64,
    pub omega_atom: f64,
    pub delta: f64,
    pub g: f64,
    #[serde(default)]
    pub xi: f64,
    pub gamma: f64,
    pub drive_amp: f64,
    #[serde(default)]
    pub drive_detuning: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::baseline()
    }
}

impl PhysicalParams {
    /// ω₀ = Ω_a = 1, g = 1e-4, γ = 0.5e-4, ℰ = 0.05e-4, Δ = 0, ξ = 0.
    pub fn baseline() -> Self {
        Self {
            omega0: 1.0,
            omega_atom: 1.0,
            delta: 0.0,
            g: 1e-4,
            xi: 0.0,
            gamma: 0.5e-4,
            drive_amp: 0.05e-4,
            drive_detuning: 0.0,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_drive_detuning(mut self, detuning: f64) -> Self {
        self.drive_detuning = detuning;
        self
    }

    pub fn with_drive_freq(mut self, omega_d: f64) -> Self {
        self.drive_detuning = self.omega_atom - omega_d;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega0", self.omega0),
            ("omega_atom", self.omega_atom),
            ("delta", self.delta),
            ("g", self.g),
            ("xi", self.xi),
            ("gamma", self.gamma),
            ("drive_amp", self.drive_amp),
            ("drive_detuning", self.drive_detuning),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite")));
            }
        }
        if !(self.gamma > 0.0) {
            return Err(Error::Domain("gamma must be positive".into()));
        }
        if self.g < 0.0 {
            return Err(Error::Domain("g must be non-negative".into()));
        }
        if self.drive_amp < 0.0 {
            return Err(Error::Domain("drive_amp must be non-negative".into()));
        }
        Ok(())
    }

    pub fn drive_freq(&self) -> f64 {
        self.omega_atom - self.drive_detuning
    }

    /// ω₊ = ω₀ + Δ.
    pub fn omega_plus(&self) -> f64 {
        self.omega0 + self.delta
    }

    /// ω₋ = ω₀ − Δ.
    pub fn omega_minus(&self) -> f64 {
        self.omega0 - self.delta
    }

    /// ω̃₊ = ω₊ − ω_d, evaluated as (ω₀ − Ω_a) + Ω̃ + Δ.
    pub fn omega_plus_tilde(&self) -> f64 {
        (self.omega0 - self.omega_atom) + self.drive_detuning + self.delta
    }

    /// ω̃₋ = ω₋ − ω_d, evaluated as (ω₀ − Ω_a) + Ω̃ − Δ.
    pub fn omega_minus_tilde(&self) -> f64 {
        (self.omega0 - self.omega_atom) + self.drive_detuning - self.delta
    }

    pub fn is_resonant(&self) -> bool {
        let scale = self.omega0.abs().max(self.omega_atom.abs());
        (self.omega0 - self.omega_atom).abs() <= RESONANCE_TOL * scale
    }

    /// Δ_g = sqrt(Δ² + 2g²).
    pub fn delta_g(&self) -> f64 {
        self.delta.hypot(std::f64::consts::SQRT_2 * self.g)
    }

    pub(crate) fn require_xi_zero(&self) -> Result<()> {
        if self.xi != 0.0 {
            return Err(Error::Unsupported(
                "the σʸ correction is not invariant under the drive-frame transformation; set xi = 0".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn require_resonant(&self, what: &str) -> Result<()> {
        if !self.is_resonant() {
            return Err(Error::Unsupported(format!(
                "{what} needs omega_atom = omega0 (got {} and {})",
                self.omega_atom, self.omega0
            )));
        }
        Ok(())
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn coupling(ops: &CompositeOps, g: f64) -> OperatorMatrix {
    let a = &ops.a_plus + &ops.a_minus;
    let up = &ops.sigma_plus * &a;
    let down = up.adjoint();
    (&up + &down).scale_re(g)
}

/// H = (Ω_a/2)σᶻ + ξσʸ + ω₊a₊†a₊ + ω₋a₋†a₋ + g[σ⁺(a₊ + a₋) + σ⁻(a₊† + a₋†)].
pub fn jc_hamiltonian(p: &PhysicalParams, h: &HilbertConfig) -> Result<OperatorMatrix> {
    let ops = CompositeOps::new(h)?;
    Ok(jc_hamiltonian_with(p, &ops))
}

pub fn jc_hamiltonian_with(p: &PhysicalParams, ops: &CompositeOps) -> OperatorMatrix {
    let mut h = ops.sigma_z.scale_re(0.5 * p.omega_atom);
    if p.xi != 0.0 {
        h = &h + &ops.sigma_y.scale_re(p.xi);
    }
    h = &h + &ops.n_plus.scale_re(p.omega_plus());
    h = &h + &ops.n_minus.scale_re(p.omega_minus());
    &h + &coupling(ops, p.g)
}

/// H_d(t) = ℰ(e^{iω_d t}a₊ + e^{−iω_d t}a₊†).
pub fn drive_hamiltonian(p: &PhysicalParams, t: f64, h: &HilbertConfig) -> Result<OperatorMatrix> {
    let ops = CompositeOps::new(h)?;
    let phase = C64::from_polar(p.drive_amp, p.drive_freq() * t);
    let a = ops.a_plus.scale(phase);
    Ok(&a + &a.adjoint())
}

/// Time-independent Hamiltonian in the frame rotating at ω_d:
/// H' = (Ω̃/2)σᶻ + ω̃₊a₊†a₊ + ω̃₋a₋†a₋ + g[σ⁺(a₊ + a₋) + h.c.] + ℰ(a₊ + a₊†).
pub fn rotating_frame_hamiltonian(p: &PhysicalParams, h: &HilbertConfig) -> Result<OperatorMatrix> {
    let ops = CompositeOps::new(h)?;
    rotating_frame_hamiltonian_with(p, &ops)
}

pub fn rotating_frame_hamiltonian_with(p: &PhysicalParams, ops: &CompositeOps) -> Result<OperatorMatrix> {
    p.require_xi_zero()?;
    let mut h = ops.sigma_z.scale_re(0.5 * p.drive_detuning);
    h = &h + &ops.n_plus.scale_re(p.omega_plus_tilde());
    h = &h + &ops.n_minus.scale_re(p.omega_minus_tilde());
    h = &h + &coupling(ops, p.g);
    let drive = ops.a_plus.scale(re(p.drive_amp));
    Ok(&h + &(&drive + &drive.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{conserved_excitation_number, excitation_number, Atom};

    fn cfg() -> HilbertConfig {
        HilbertConfig::new(3).unwrap()
    }

    fn elem(h: &OperatorMatrix, c: &HilbertConfig, a: (Atom, usize, usize), b: (Atom, usize, usize)) -> C64 {
        h.matrix_element(&c.basis_state(a.0, a.1, a.2), &c.basis_state(b.0, b.1, b.2)).unwrap()
    }

    #[test]
    fn decoupled_is_diagonal() {
        let c = cfg();
        let p = PhysicalParams { g: 0.0, delta: 3e-3, ..PhysicalParams::baseline() };
        let h = jc_hamiltonian(&p, &c).unwrap();
        assert!(h.is_diagonal());
        assert_eq!(elem(&h, &c, (Atom::Excited, 0, 0), (Atom::Excited, 0, 0)).re, 0.5);
    }

    #[test]
    fn ground_state_and_couplings() {
        let c = cfg();
        let p = PhysicalParams::baseline().with_delta(1e-5);
        let h = jc_hamiltonian(&p, &c).unwrap();
        let g0 = c.basis_state(Atom::Ground, 0, 0);
        let hg = h.apply(&g0).unwrap();
        assert!((hg.amplitudes[0] - re(-0.5)).norm() < 1e-16);
        assert!(hg.amplitudes[1..].iter().all(|a| a.norm() == 0.0));

        let e = (Atom::Excited, 0, 0);
        let p10 = (Atom::Ground, 1, 0);
        let p01 = (Atom::Ground, 0, 1);
        assert!((elem(&h, &c, e, p10) - re(1e-4)).norm() < 1e-18);
        assert!((elem(&h, &c, e, p01) - re(1e-4)).norm() < 1e-18);
        assert_eq!(elem(&h, &c, p10, p01).norm(), 0.0);
        let diff = elem(&h, &c, p10, p10).re - elem(&h, &c, p01, p01).re;
        assert!((diff - 2e-5).abs() < 1e-15);
        // One photon plus a ground-state atom: ω₊ − Ω_a/2.
        assert!((elem(&h, &c, p10, p10).re - (1.0 + 1e-5 - 0.5)).abs() < 1e-15);
        assert!(h.hermiticity_defect() < 1e-14);
    }

    #[test]
    fn degenerate_modes_at_rest() {
        let c = cfg();
        let h = jc_hamiltonian(&PhysicalParams::baseline(), &c).unwrap();
        assert_eq!(
            elem(&h, &c, (Atom::Ground, 1, 0), (Atom::Ground, 1, 0)),
            elem(&h, &c, (Atom::Ground, 0, 1), (Atom::Ground, 0, 1))
        );
    }

    #[test]
    fn drive_term() {
        let c = cfg();
        let mut p = PhysicalParams::baseline().with_drive_detuning(3e-5);
        let ops = CompositeOps::new(&c).unwrap();
        let h0 = drive_hamiltonian(&p, 0.0, &c).unwrap();
        let want = (&ops.a_plus + &ops.a_plus.adjoint()).scale_re(p.drive_amp);
        assert!((&h0 - &want).max_abs() < 1e-20);
        let ht = drive_hamiltonian(&p, 12.3, &c).unwrap();
        assert!(ht.hermiticity_defect() < 1e-14);
        // Only mode₊ is touched.
        assert_eq!(ht.commutator(&ops.a_minus).max_abs(), 0.0);
        assert_eq!(ht.commutator(&ops.sigma_z).max_abs(), 0.0);
        p.drive_amp = 0.0;
        assert_eq!(drive_hamiltonian(&p, 1.0, &c).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn rotating_frame_identities() {
        let c = cfg();
        let base = PhysicalParams { drive_amp: 0.0, delta: 2e-5, ..PhysicalParams::baseline() };
        let p = base.with_drive_freq(0.0);
        let hr = rotating_frame_hamiltonian(&p, &c).unwrap();
        let hl = jc_hamiltonian(&p, &c).unwrap();
        assert!((&hr - &hl).max_abs() < 1e-15);

        let p = PhysicalParams { delta: 0.0, ..PhysicalParams::baseline() }.with_drive_freq(1.0);
        let h = rotating_frame_hamiltonian(&p, &c).unwrap();
        for i in 0..c.total_dim() {
            assert_eq!(h.get(i, i).norm(), 0.0);
        }

        let p = PhysicalParams::baseline().with_delta(1e-5).with_drive_detuning(7e-5);
        assert_eq!(p.omega_plus_tilde(), 7e-5 + 1e-5);
        assert_eq!(p.omega_minus_tilde(), 7e-5 - 1e-5);
        assert!((p.drive_freq() - (1.0 - 7e-5)).abs() < 1e-16);

        let bad = PhysicalParams { xi: 1e-6, ..PhysicalParams::baseline() };
        assert!(matches!(rotating_frame_hamiltonian(&bad, &c), Err(Error::Unsupported(_))));
    }

    #[test]
    fn excitation_conservation() {
        let c = cfg();
        let p = PhysicalParams { drive_amp: 0.0, ..PhysicalParams::baseline().with_delta(1e-5).with_drive_detuning(3e-5) };
        let nc = conserved_excitation_number(&c).unwrap();
        let nl = excitation_number(&c).unwrap();
        for h in [jc_hamiltonian(&p, &c).unwrap(), rotating_frame_hamiltonian(&p, &c).unwrap()] {
            assert!(nc.commutator(&h).max_abs() < 1e-12);
            // The σᶻ form is not conserved once g ≠ 0.
            assert!(nl.commutator(&h).max_abs() > 0.5 * p.g);
        }
    }

    #[test]
    fn validation() {
        assert!(PhysicalParams::baseline().validate().is_ok());
        assert!(PhysicalParams { gamma: 0.0, ..PhysicalParams::baseline() }.validate().is_err());
        assert!(PhysicalParams { g: -1.0, ..PhysicalParams::baseline() }.validate().is_err());
        assert!(PhysicalParams { drive_amp: -1.0, ..PhysicalParams::baseline() }.validate().is_err());
        assert!(PhysicalParams { omega0: f64::NAN, ..PhysicalParams::baseline() }.validate().is_err());
    }
}
