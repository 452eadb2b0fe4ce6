//! Rotating-frame electromagnetic layer: metric, dispersion, mode normalization,
//! atom-field coupling constants and the mode orthogonality relations.
//!
//! The symbol Ω is used for three different things in the literature this model
//! comes from. Here the ring's angular speed is `omega_rot`, the atomic
//! transition frequency is `omega_atom`, and the prefactor of the coupling
//! constant is read as the atomic frequency (it comes from the momentum matrix
//! element between the two atomic levels).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants. Defaults to natural units ħ = ε₀ = c = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Units {
    pub hbar: f64,
    pub eps0: f64,
    pub c: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self { hbar: 1.0, eps0: 1.0, c: 1.0 }
    }
}

/// Ring resonator geometry.
///
/// The circumference is taken as 2πR; the small length correction from
/// relativistic contraction of the rim (second order in v_R/c) is ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingGeometry {
    pub radius: f64,
    pub circumference: f64,
    pub cross_section: f64,
    pub mode_index: i64,
    pub omega_rot: f64,
    pub light_speed: f64,
}

impl RingGeometry {
    pub fn new(
        radius: f64,
        cross_section: f64,
        mode_index: i64,
        omega_rot: f64,
        light_speed: f64,
    ) -> Result<Self> {
        Self::with_circumference(
            radius,
            2.0 * PI * radius,
            cross_section,
            mode_index,
            omega_rot,
            light_speed,
        )
    }

    pub fn with_circumference(
        radius: f64,
        circumference: f64,
        cross_section: f64,
        mode_index: i64,
        omega_rot: f64,
        light_speed: f64,
    ) -> Result<Self> {
        if !(radius > 0.0 && circumference > 0.0) {
            return Err(Error::Domain("ring radius and circumference must be positive".into()));
        }
        if !(cross_section > 0.0) {
            return Err(Error::Domain("cross section must be positive".into()));
        }
        if !(light_speed > 0.0) {
            return Err(Error::Domain("light speed must be positive".into()));
        }
        let geom = Self { radius, circumference, cross_section, mode_index, omega_rot, light_speed };
        if geom.linear_speed().abs() >= light_speed {
            return Err(Error::Domain(format!(
                "rim speed |v_R| = {:e} is not below c = {:e}",
                geom.linear_speed().abs(),
                light_speed
            )));
        }
        Ok(geom)
    }

    pub fn volume(&self) -> f64 {
        self.circumference * self.cross_section
    }

    /// k = 2πn/L.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI * self.mode_index as f64 / self.circumference
    }

    /// v_R = Ω_rot·R.
    pub fn linear_speed(&self) -> f64 {
        self.omega_rot * self.radius
    }

    /// ω₀ = c|k|.
    pub fn rest_frequency(&self) -> f64 {
        self.light_speed * self.wavenumber().abs()
    }

    /// Δ = −v_R·k.
    pub fn rotation_detuning(&self) -> f64 {
        -self.linear_speed() * self.wavenumber()
    }
}

/// Metric of the co-rotating frame at a point (x, y) of the rotation plane.
/// Index order is (ct, x, y, z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor {
    pub contravariant: [[f64; 4]; 4],
    pub covariant: [[f64; 4]; 4],
    pub x: f64,
    pub y: f64,
}

impl MetricTensor {
    /// Largest entry of |g^{μν}g_{νλ} − δ^μ_λ|.
    pub fn inverse_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for mu in 0..4 {
            for lam in 0..4 {
                let s: f64 = (0..4).map(|nu| self.contravariant[mu][nu] * self.covariant[nu][lam]).sum();
                let target = if mu == lam { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }
}

pub fn metric_at(x: f64, y: f64, omega_rot: f64, c: f64) -> MetricTensor {
    let ax = omega_rot * x / c;
    let ay = omega_rot * y / c;

    let mut up = [[0.0; 4]; 4];
    up[0][0] = -1.0;
    up[0][1] = -ay;
    up[1][0] = -ay;
    up[0][2] = ax;
    up[2][0] = ax;
    up[1][1] = 1.0 - ay * ay;
    up[1][2] = ax * ay;
    up[2][1] = ax * ay;
    up[2][2] = 1.0 - ax * ax;
    up[3][3] = 1.0;

    let mut down = [[0.0; 4]; 4];
    down[0][0] = -1.0 + ax * ax + ay * ay;
    down[0][1] = -ay;
    down[1][0] = -ay;
    down[0][2] = ax;
    down[2][0] = ax;
    down[1][1] = 1.0;
    down[2][2] = 1.0;
    down[3][3] = 1.0;

    MetricTensor { contravariant: up, covariant: down, x, y }
}

/// Frequencies of the two counter-propagating modes with |k|:
/// ω₊ = (c − v_R)|k| and ω₋ = (c + v_R)|k|.
pub fn dispersion(k: f64, v_r: f64, c: f64) -> Result<(f64, f64)> {
    if v_r.abs() >= c {
        return Err(Error::Domain(format!("|v_R| = {:e} must be below c = {:e}", v_r.abs(), c)));
    }
    let ak = k.abs();
    Ok(((c - v_r) * ak, (c + v_r) * ak))
}

/// Residual of ω² + 2v_R kω − (c² − v_R²)k² = 0, scaled by (c|k|)².
pub fn dispersion_residual(omega: f64, k: f64, v_r: f64, c: f64) -> f64 {
    let r = omega * omega + 2.0 * v_r * k * omega - (c * c - v_r * v_r) * k * k;
    r / (c * k).powi(2)
}

/// Mode normalization Z̄_k = sqrt(ħ / (2ε₀Vc|k|)).
pub fn normalization_constant(k: f64, volume: f64, units: &Units) -> Result<f64> {
    if k == 0.0 {
        return Err(Error::Domain("the k = 0 mode is excluded".into()));
    }
    if !(volume > 0.0) {
        return Err(Error::Domain("mode volume must be positive".into()));
    }
    Ok((units.hbar / (2.0 * units.eps0 * volume * units.c * k.abs())).sqrt())
}

/// Atomic dipole and its orientation relative to the ring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DipoleConfig {
    pub dipole_moment: [f64; 3],
    pub polarization: [f64; 3],
    pub tangent: [f64; 3],
    pub electron_mass: f64,
    pub charge: f64,
    pub position: f64,
}

impl DipoleConfig {
    pub fn validate(&self) -> Result<()> {
        const TOL: f64 = 1e-12;
        if (norm(&self.polarization) - 1.0).abs() > TOL {
            return Err(Error::Domain("polarization vector must have unit length".into()));
        }
        if (norm(&self.tangent) - 1.0).abs() > TOL {
            return Err(Error::Domain("tangent vector must have unit length".into()));
        }
        if dot(&self.polarization, &self.tangent).abs() > TOL {
            return Err(Error::Domain("polarization must be transverse to the tangent".into()));
        }
        if self.charge == 0.0 {
            return Err(Error::Domain("charge must be nonzero".into()));
        }
        Ok(())
    }
}

pub fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// g = i·Ω_a·(𝔭·ê)·Z̄_k·e^{iks₀}.
pub fn coupling_strength(
    dipole: &DipoleConfig,
    omega_atom: f64,
    k: f64,
    volume: f64,
    units: &Units,
) -> Result<Complex64> {
    let z = normalization_constant(k, volume, units)?;
    let amp = omega_atom * dot(&dipole.dipole_moment, &dipole.polarization) * z;
    Ok(Complex64::i() * amp * Complex64::from_polar(1.0, k * dipole.position))
}

/// |g| after absorbing the phase into the atomic operators.
pub fn coupling_magnitude(
    dipole: &DipoleConfig,
    omega_atom: f64,
    k: f64,
    volume: f64,
    units: &Units,
) -> Result<f64> {
    Ok(coupling_strength(dipole, omega_atom, k, volume, units)?.norm())
}

/// ξ = −(m·v_R·Ω_rot / e)·(𝔭·ê_s).
pub fn xi_correction(dipole: &DipoleConfig, v_r: f64, omega_rot: f64) -> f64 {
    -(dipole.electron_mass * v_r * omega_rot / dipole.charge) * dot(&dipole.dipole_moment, &dipole.tangent)
}

/// A travelling ring mode ê·Z̄·e^{iks − iω_k t} with ω_k = c|k| − v_R·k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingMode {
    pub k: f64,
    pub z_bar: f64,
    pub polarization: [f64; 3],
}

impl RingMode {
    pub fn frequency(&self, v_r: f64, c: f64) -> f64 {
        c * self.k.abs() - v_r * self.k
    }
}

/// Which bilinear to integrate: ∫[A_q^* 𝒟 A_k] or ∫[A_q 𝒟 A_k].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapKind {
    Conjugated,
    Plain,
}

/// Quadrature of the density bilinear
/// U·∂₀W − W·∂₀U − ṽ(U·∂ₛW − W·∂ₛU), ∂₀ = ∂_t/c, ṽ = v_R/c,
/// with W = A_k and U = A_q^* (or A_q), over one circumference at time `t`.
/// Derivatives are taken analytically; the periodic trapezoid rule is used
/// with `points` nodes.
#[allow(clippy::too_many_arguments)]
pub fn mode_overlap(
    mode_k: &RingMode,
    mode_q: &RingMode,
    kind: OverlapKind,
    v_r: f64,
    c: f64,
    circumference: f64,
    t: f64,
    points: usize,
) -> Complex64 {
    let pol = dot(&mode_k.polarization, &mode_q.polarization);
    if pol == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let i = Complex64::i();
    let vt = v_r / c;
    let wk = mode_k.frequency(v_r, c);
    let wq = mode_q.frequency(v_r, c);
    // U = Z̄ e^{iθ_U(s,t)}; for the conjugated case θ_U flips sign.
    let sign = match kind {
        OverlapKind::Conjugated => -1.0,
        OverlapKind::Plain => 1.0,
    };
    let du_dt = sign * (-i * wq) / c;
    let du_ds = sign * (i * mode_q.k);
    let dw_dt = -i * wk / c;
    let dw_ds = i * mode_k.k;
    let kernel = (dw_dt - du_dt) - vt * (dw_ds - du_ds);

    let h = circumference / points as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..points {
        let s = n as f64 * h;
        let phase_w = mode_k.k * s - wk * t;
        let phase_u = sign * (mode_q.k * s - wq * t);
        sum += Complex64::from_polar(1.0, phase_w + phase_u);
    }
    sum * kernel * (pol * mode_k.z_bar * mode_q.z_bar * h)
}

/// Closed form of the conjugated overlap for identical modes:
/// −(2i|Z̄|²L/c)(ω_k + v_R k).
pub fn mode_overlap_closed_form(mode: &RingMode, v_r: f64, c: f64, circumference: f64) -> Complex64 {
    let w = mode.frequency(v_r, c);
    Complex64::new(0.0, -2.0 * mode.z_bar * mode.z_bar * circumference / c * (w + v_r * mode.k))
}
