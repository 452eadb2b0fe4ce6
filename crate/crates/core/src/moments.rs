//! First-order moment closure of the driven-dissipative model and its
//! closed-form steady photon numbers.
//!
//! Unknowns are α± = ⟨a±⟩, S± = ⟨σᶻa±⟩, Z± = ⟨σ⁺a±⟩, ⟨σ⁻⟩ and ⟨σᶻ⟩.
//! Third-order moments such as ⟨σᶻa†a⟩ are dropped, which closes the
//! hierarchy and is accurate at weak drive.
//!
//! Every equation is homogeneous of degree one in the rates (ω̃±, Ω̃, g, γ,
//! ℰ), and the closed forms are ratios of homogeneous polynomials, so all
//! evaluation happens in units of a reference rate (g, or γ when g = 0).
//! At the physical parameters the raw polynomial terms are ~1e-24 and
//! would otherwise sit uncomfortably close to underflow in intermediate
//! products.

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::PhysicalParams;

/// Number of real unknowns: seven complex moments and ⟨σᶻ⟩.
pub const UNKNOWNS: usize = 15;

/// Condition number above which the moment system is treated as singular.
pub const MAX_CONDITION: f64 = 1e14;

/// Steady moments from the closed linear system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSolution {
    pub alpha_plus: Complex64,
    pub alpha_minus: Complex64,
    pub s_plus: Complex64,
    pub s_minus: Complex64,
    pub z_plus: Complex64,
    pub z_minus: Complex64,
    pub sigma_minus: Complex64,
    pub sigma_z: f64,
    /// ‖Ax − b‖ / (‖A‖‖x‖ + ‖b‖) of the solved system.
    pub residual: f64,
    pub condition: f64,
}

impl MomentSolution {
    /// −1 ≤ ⟨σᶻ⟩ ≤ 1. The closure is approximate, so a violation is a
    /// warning sign rather than an error.
    pub fn is_physical(&self) -> bool {
        (-1.0..=1.0).contains(&self.sigma_z)
    }

    pub fn photon_numbers(&self) -> (f64, f64) {
        (self.alpha_plus.norm_sqr(), self.alpha_minus.norm_sqr())
    }

    fn from_vec(x: &[f64], residual: f64, condition: f64) -> Self {
        let c = |k: usize| Complex64::new(x[2 * k], x[2 * k + 1]);
        Self {
            alpha_plus: c(0),
            alpha_minus: c(1),
            s_plus: c(2),
            s_minus: c(3),
            z_plus: c(4),
            z_minus: c(5),
            sigma_minus: c(6),
            sigma_z: x[14],
            residual,
            condition,
        }
    }
}

/// Real 15×15 system A·x = b. Rows are the real and imaginary parts of the
/// seven complex equations followed by Im Z₊ + Im Z₋ = 0; columns follow the
/// unknown order of [`MomentSolution`] with (Re, Im) pairs and ⟨σᶻ⟩ last.
/// Coefficients are in units of `scale`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSystem {
    pub matrix: [[f64; UNKNOWNS]; UNKNOWNS],
    pub rhs: [f64; UNKNOWNS],
    pub scale: f64,
}

/// Reference rate used to make every evaluation dimensionless.
fn reference_rate(p: &PhysicalParams) -> f64 {
    if p.g > 0.0 {
        p.g
    } else {
        p.gamma
    }
}

/// Dimensionless copies of the rates.
#[derive(Debug, Clone, Copy)]
struct Scaled {
    wp: f64,
    wm: f64,
    om: f64,
    g: f64,
    gamma: f64,
    delta: f64,
    e: f64,
}

impl Scaled {
    fn new(p: &PhysicalParams) -> Self {
        let s = reference_rate(p);
        Self {
            wp: p.omega_plus_tilde() / s,
            wm: p.omega_minus_tilde() / s,
            om: p.drive_detuning / s,
            g: p.g / s,
            gamma: p.gamma / s,
            delta: p.delta / s,
            e: p.drive_amp / s,
        }
    }
}

/// Affine residual of the eight moment equations at the real vector x.
fn moment_residual(s: &Scaled, x: &[f64; UNKNOWNS]) -> [f64; UNKNOWNS] {
    let i = Complex64::i();
    let c = |k: usize| Complex64::new(x[2 * k], x[2 * k + 1]);
    let (ap, am, sp, sm, zp, zm, sig) = (c(0), c(1), c(2), c(3), c(4), c(5), c(6));
    let sz = x[14];
    let half = Complex64::new(0.0, 0.5 * s.gamma);
    let wp = Complex64::new(s.wp, 0.0) - half;
    let wm = Complex64::new(s.wm, 0.0) - half;
    let (g, e, om) = (s.g, s.e, s.om);

    let eqs = [
        -i * wp * ap - i * g * sig - i * e,
        -i * wm * am - i * g * sig,
        -i * wp * sp - i * e * sz + i * g * sig,
        -i * wm * sm + i * g * sig,
        -i * (wp - om) * zp - i * e * sig.conj() - i * (0.5 * g) * (sz + 1.0),
        -i * (wm - om) * zm - i * (0.5 * g) * (sz + 1.0),
        -i * om * sig + i * g * (sp + sm),
    ];
    let mut r = [0.0; UNKNOWNS];
    for (k, q) in eqs.iter().enumerate() {
        r[2 * k] = q.re;
        r[2 * k + 1] = q.im;
    }
    // (Z₊ − Z₊*) + (Z₋ − Z₋*) = 2i(Im Z₊ + Im Z₋)
    r[14] = zp.im + zm.im;
    r
}

pub fn moment_system(p: &PhysicalParams) -> Result<MomentSystem> {
    p.require_xi_zero()?;
    let s = Scaled::new(p);
    let zero = [0.0; UNKNOWNS];
    let b0 = moment_residual(&s, &zero);
    let mut matrix = [[0.0; UNKNOWNS]; UNKNOWNS];
    for col in 0..UNKNOWNS {
        let mut unit = zero;
        unit[col] = 1.0;
        let r = moment_residual(&s, &unit);
        for row in 0..UNKNOWNS {
            matrix[row][col] = r[row] - b0[row];
        }
    }
    let mut rhs = [0.0; UNKNOWNS];
    for row in 0..UNKNOWNS {
        rhs[row] = -b0[row];
    }
    Ok(MomentSystem { matrix, rhs, scale: reference_rate(p) })
}

/// Solves the moment system.
///
/// At g = 0 the atomic block decouples and ⟨σᶻ⟩ is left undetermined by
/// the closure; the atom is then taken to sit in its ground state, which
/// gives α₊ = −ℰ/(ω̃₊ − iγ/2) and zero for all atomic moments.
pub fn solve_moments(p: &PhysicalParams) -> Result<MomentSolution> {
    p.validate()?;
    let sys = moment_system(p)?;
    if p.g == 0.0 {
        let w = Complex64::new(p.omega_plus_tilde(), -0.5 * p.gamma);
        let alpha = -Complex64::new(p.drive_amp, 0.0) / w;
        let zero = Complex64::new(0.0, 0.0);
        return Ok(MomentSolution {
            alpha_plus: alpha,
            alpha_minus: zero,
            s_plus: -alpha,
            s_minus: zero,
            z_plus: zero,
            z_minus: zero,
            sigma_minus: zero,
            sigma_z: -1.0,
            residual: 0.0,
            condition: f64::INFINITY,
        });
    }
    let a = Mat::<f64>::from_fn(UNKNOWNS, UNKNOWNS, |i, j| sys.matrix[i][j]);
    let sv = a.singular_values().map_err(|_| Error::SingularSystem { condition: f64::INFINITY })?;
    let (hi, lo) = (sv.iter().cloned().fold(0.0, f64::max), sv.iter().cloned().fold(f64::INFINITY, f64::min));
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition < MAX_CONDITION) {
        return Err(Error::SingularSystem { condition });
    }
    let b = Mat::<f64>::from_fn(UNKNOWNS, 1, |i, _| sys.rhs[i]);
    let x = a.partial_piv_lu().solve(&b);
    let xs: Vec<f64> = (0..UNKNOWNS).map(|i| x[(i, 0)]).collect();

    let mut rnorm = 0.0_f64;
    for i in 0..UNKNOWNS {
        let ax: f64 = (0..UNKNOWNS).map(|j| sys.matrix[i][j] * xs[j]).sum();
        rnorm += (ax - sys.rhs[i]).powi(2);
    }
    let xnorm = xs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let bnorm = sys.rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let residual = rnorm.sqrt() / (hi * xnorm + bnorm).max(f64::MIN_POSITIVE);
    Ok(MomentSolution::from_vec(&xs, residual, condition))
}

/// Polynomial building blocks of the closed-form photon numbers, in units
/// of the reference rate (M ~ rate⁴, F ~ rate⁶, D ~ rate², G ~ rate⁴).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormTerms {
    pub m: f64,
    pub f: f64,
    pub d: f64,
    pub g: f64,
    pub scale: f64,
}

/// M and F at Ω_a = ω₀ written through Ω̃² so that F(Ω̃) = F(−Ω̃) holds
/// bit for bit.
fn resonant_m_f(s: &Scaled) -> (f64, f64) {
    let (om, g2, gam2, d) = (s.om, s.g * s.g, s.gamma * s.gamma, s.delta);
    let q = om * om;
    let d2 = d * d;
    let m = 4.0 * (g2 - om * (om - d)).powi(2) + gam2 * q;
    let f = gam2 * gam2 * q
        + 8.0 * gam2 * (2.0 * g2 * g2 + q * q - 2.0 * g2 * q + d2 * q)
        + 16.0 * q * (2.0 * g2 - q + d2).powi(2);
    (m, f)
}

fn general_m_f(s: &Scaled) -> (f64, f64) {
    let (om, g2, gam2, wp, wm) = (s.om, s.g * s.g, s.gamma * s.gamma, s.wp, s.wm);
    let m = 4.0 * (g2 - om * wm).powi(2) + gam2 * om * om;
    let f = gam2 * gam2 * om * om
        + 4.0 * gam2 * (2.0 * g2 * g2 + (wp * om - g2).powi(2) + (wm * om - g2).powi(2))
        + 16.0 * (om * (wp * wm) - g2 * (wp + wm)).powi(2);
    (m, f)
}

/// D = 2(δ₊² + δ₋²) + γ² with δ± = ω̃± − Ω̃; G = (4δ₋² + γ²)·X.
/// At Ω_a = ω₀ these reduce to D = γ² + 4Δ² and the printed resonant G.
fn general_d_g(s: &Scaled) -> (f64, f64) {
    let (om, g2, gam2, wp, wm) = (s.om, s.g * s.g, s.gamma * s.gamma, s.wp, s.wm);
    let dp = wp - om;
    let dm = wm - om;
    let d = 2.0 * (dp * dp + dm * dm) + gam2;
    let x = 4.0 * (g2 * (wp * wp + wm * wm) - om * om * wm * wm + om * g2 * (wm - wp)) + gam2 * (2.0 * g2 - om * om);
    (d, (4.0 * dm * dm + gam2) * x)
}

pub fn closed_form_terms(p: &PhysicalParams) -> Result<ClosedFormTerms> {
    p.require_xi_zero()?;
    let s = Scaled::new(p);
    let (m, f) = if p.is_resonant() { resonant_m_f(&s) } else { general_m_f(&s) };
    let (d, g) = general_d_g(&s);
    Ok(ClosedFormTerms { m, f, d, g, scale: reference_rate(p) })
}

/// Decoupled cavity: n̄₊ = ℰ²/(ω̃₊² + γ²/4), n̄₋ = 0.
fn decoupled(p: &PhysicalParams) -> (f64, f64) {
    let s = Scaled::new(p);
    (s.e * s.e / (s.wp * s.wp + 0.25 * s.gamma * s.gamma), 0.0)
}

/// Weak-drive photon numbers n̄₊ = 4ℰ²M/F and n̄₋ = 16ℰ²g⁴/F.
pub fn n_weak_drive(p: &PhysicalParams) -> Result<(f64, f64)> {
    p.validate()?;
    p.require_xi_zero()?;
    if p.g == 0.0 {
        return Ok(decoupled(p));
    }
    let s = Scaled::new(p);
    let t = closed_form_terms(p)?;
    let e2 = s.e * s.e;
    let g4 = s.g.powi(4);
    Ok((4.0 * e2 * t.m / t.f, 16.0 * e2 * g4 / t.f))
}

/// ⟨σᶻ⟩ of the closed system: −FD/(FD + 4ℰ²G).
pub fn sigma_z_closed(p: &PhysicalParams) -> Result<f64> {
    if p.g == 0.0 {
        return Ok(-1.0);
    }
    let s = Scaled::new(p);
    let t = closed_form_terms(p)?;
    let fd = t.f * t.d;
    Ok(-fd / (fd + 4.0 * s.e * s.e * t.g))
}

/// |α±|² of the closed moment system in closed form.
///
/// With ε = 1 + ⟨σᶻ⟩ and W± = ω̃±² + γ²/4,
/// n̄₊ = (4ℰ²/F)[M − 8εg²R/W₊ + 4ε²g⁴W₋/W₊], R = Ω̃W₋ω̃₊ − g²(ω̃₋ω̃₊ + γ²/4),
/// n̄₋ = 16ℰ²g⁴⟨σᶻ⟩²/F.
/// Both reduce to [`n_weak_drive`] as ℰ → 0 since ε = O(ℰ²).
pub fn n_closed_full(p: &PhysicalParams) -> Result<(f64, f64)> {
    p.validate()?;
    p.require_xi_zero()?;
    if p.g == 0.0 {
        return Ok(decoupled(p));
    }
    let s = Scaled::new(p);
    let t = closed_form_terms(p)?;
    let sz = sigma_z_closed(p)?;
    let eps = 1.0 + sz;
    let (g2, q) = (s.g * s.g, 0.25 * s.gamma * s.gamma);
    let w_plus = s.wp * s.wp + q;
    let w_minus = s.wm * s.wm + q;
    let r = s.om * w_minus * s.wp - g2 * (s.wm * s.wp + q);
    let e2 = s.e * s.e;
    let n_plus = 4.0 * e2 / t.f * (t.m - 8.0 * eps * g2 * r / w_plus + 4.0 * eps * eps * g2 * g2 * w_minus / w_plus);
    let n_minus = 16.0 * e2 * g2 * g2 * sz * sz / t.f;
    Ok((n_plus, n_minus))
}

/// 64√2·g·ℰ² / (γ²(γ² + 8g²)), the closed-form rotation sensitivity of the
/// n̄₊ side peak probed at Ω̃ = √2g.
pub fn slope_closed_form(p: &PhysicalParams) -> Result<f64> {
    p.validate()?;
    p.require_resonant("the closed-form slope")?;
    let (g, e, gam) = (p.g, p.drive_amp, p.gamma);
    let gam2 = gam * gam;
    Ok(64.0 * std::f64::consts::SQRT_2 * g * e * e / (gam2 * (gam2 + 8.0 * g * g)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline() -> PhysicalParams {
        PhysicalParams::baseline()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn undriven_fixed_point() {
        let sol = solve_moments(&PhysicalParams { drive_amp: 0.0, ..baseline().with_drive_detuning(3e-5) }).unwrap();
        assert_eq!(sol.alpha_plus.norm(), 0.0);
        assert_eq!(sol.sigma_minus.norm(), 0.0);
        assert!((sol.sigma_z + 1.0).abs() < 1e-15);
        assert!(sol.is_physical());
    }

    #[test]
    fn decoupled_cavity() {
        let p = PhysicalParams { g: 0.0, ..baseline().with_drive_detuning(2e-5).with_delta(1e-5) };
        let sol = solve_moments(&p).unwrap();
        let want = -Complex64::new(p.drive_amp, 0.0) / Complex64::new(p.omega_plus_tilde(), -0.5 * p.gamma);
        assert!((sol.alpha_plus - want).norm() < 1e-15 * want.norm());
        assert_eq!(sol.alpha_minus.norm(), 0.0);
        let (np, nm) = n_closed_full(&p).unwrap();
        assert!(rel(np, want.norm_sqr()) < 1e-14);
        assert_eq!(nm, 0.0);
        assert_eq!(n_weak_drive(&p).unwrap().1, 0.0);
    }

    #[test]
    fn residual_is_small() {
        for &(om, d) in &[(0.0, 0.0), (1.3e-4, 1e-5), (-2e-4, -3e-5)] {
            let sol = solve_moments(&baseline().with_drive_detuning(om).with_delta(d)).unwrap();
            assert!(sol.residual < 1e-12, "{}", sol.residual);
        }
    }

    #[test]
    fn system_encodes_first_equation() {
        // Row pair 0/1 is −i(ω̃₊ − iγ/2)α₊ − ig⟨σ⁻⟩ − iℰ = 0, in units of g.
        let p = baseline().with_drive_detuning(3e-5).with_delta(1e-5);
        let sys = moment_system(&p).unwrap();
        let (wp, gam, e) = (p.omega_plus_tilde() / p.g, p.gamma / p.g, p.drive_amp / p.g);
        // Re: ω̃₊ Im α₊ − (γ/2) Re α₊ + g Im σ⁻
        assert!((sys.matrix[0][0] + 0.5 * gam).abs() < 1e-15);
        assert!((sys.matrix[0][1] - wp).abs() < 1e-15);
        assert!((sys.matrix[0][13] - 1.0).abs() < 1e-15);
        assert!((sys.rhs[1] - e).abs() < 1e-15);
        assert_eq!(sys.matrix[14][9], 1.0);
        assert_eq!(sys.matrix[14][11], 1.0);
    }

    #[test]
    fn spot_values() {
        let (np, nm) = n_weak_drive(&baseline()).unwrap();
        assert!(rel(np, 0.01) < 1e-14);
        assert!(rel(nm, 0.01) < 1e-14);
        let t = closed_form_terms(&baseline()).unwrap();
        assert!(rel(t.m, 4.0) < 1e-15);
        assert!(rel(t.f, 16.0 * 0.25) < 1e-15);
    }

    #[test]
    fn weak_drive_symmetry() {
        for i in 0..50 {
            let om = 3e-4 * (i as f64 / 49.0);
            let a = n_weak_drive(&baseline().with_drive_detuning(om)).unwrap();
            let b = n_weak_drive(&baseline().with_drive_detuning(-om)).unwrap();
            assert_eq!(a, b);
            let p = baseline().with_delta(1e-5);
            let a = n_weak_drive(&p.with_drive_detuning(om)).unwrap();
            let b = n_weak_drive(&p.with_drive_detuning(-om)).unwrap();
            assert_eq!(a.1, b.1);
            if om > 0.5e-4 {
                assert!(rel(a.0, b.0) > 1e-3);
            }
        }
    }

    #[test]
    fn closed_form_matches_linear_system() {
        for &w0 in &[1.0, 1.00005, 0.99997] {
            for i in 0..5 {
                for j in 0..5 {
                    let om = -3e-4 + 6e-4 * i as f64 / 4.0;
                    let d = -2e-5 + 7e-5 * j as f64 / 4.0;
                    let p = PhysicalParams { omega0: w0, ..baseline() }.with_drive_detuning(om).with_delta(d);
                    let (ap, am) = solve_moments(&p).unwrap().photon_numbers();
                    let (np, nm) = n_closed_full(&p).unwrap();
                    assert!(rel(np, ap) < 1e-8, "w0={w0} om={om} d={d}: {np} vs {ap}");
                    assert!(rel(nm, am) < 1e-8, "w0={w0} om={om} d={d}: {nm} vs {am}");
                    let sz = solve_moments(&p).unwrap().sigma_z;
                    assert!((sz - sigma_z_closed(&p).unwrap()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn full_tends_to_weak_drive() {
        let base = baseline().with_drive_detuning(1.1e-4).with_delta(1e-5);
        let mut last = f64::INFINITY;
        for k in 0..4 {
            let e = 0.05e-4 / 10f64.powi(k);
            let p = PhysicalParams { drive_amp: e, ..base };
            let (fp, fm) = n_closed_full(&p).unwrap();
            let (wp, wm) = n_weak_drive(&p).unwrap();
            let dev = rel(fp, wp).max(rel(fm, wm));
            // The correction is O(ℰ²): each decade in ℰ buys two in deviation.
            assert!(dev < 0.02 * last, "{dev} vs {last}");
            last = dev;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn general_terms_reduce_at_resonance() {
        let p = baseline().with_drive_detuning(0.7e-4).with_delta(2e-5);
        let s = Scaled::new(&p);
        let (m1, f1) = resonant_m_f(&s);
        let (m2, f2) = general_m_f(&s);
        assert!(rel(m1, m2) < 1e-13 && rel(f1, f2) < 1e-13);
        let (d, _) = general_d_g(&s);
        assert!(rel(d, s.gamma * s.gamma + 4.0 * s.delta * s.delta) < 1e-14);
    }

    #[test]
    fn slope_value_and_scaling() {
        let s = slope_closed_form(&baseline()).unwrap();
        assert!(rel(s, 1097.0868847500374) < 1e-12);
        let s2 = slope_closed_form(&PhysicalParams { drive_amp: 0.1e-4, ..baseline() }).unwrap();
        assert!(rel(s2, 4.0 * s) < 1e-14);
        assert!(slope_closed_form(&PhysicalParams { omega0: 1.01, ..baseline() }).is_err());
    }

    #[test]
    fn rejects_xi() {
        let p = PhysicalParams { xi: 1e-6, ..baseline() };
        assert!(matches!(moment_system(&p), Err(Error::Unsupported(_))));
        assert!(n_weak_drive(&p).is_err());
    }
}
