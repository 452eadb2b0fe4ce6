//! Single-excitation eigensystem of the undriven Hamiltonian, in the basis
//! {|e,0,0⟩, |g,1,0⟩, |g,0,1⟩}.

use faer::Mat;

use crate::error::Result;
use crate::model::PhysicalParams;

pub type Matrix3 = [[f64; 3]; 3];

/// How an [`EigenTriple`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    ClosedForm,
    Numeric,
}

/// Energies and states of the three single-excitation levels.
///
/// At resonance E₀ is the dark level and E± = E₀ ± Δ_g. Off resonance the
/// three levels are labelled by ascending energy as (E₋, E₀, E₊).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenTriple {
    pub e0: f64,
    pub e_plus: f64,
    pub e_minus: f64,
    pub state0: [f64; 3],
    pub state_plus: [f64; 3],
    pub state_minus: [f64; 3],
    pub delta_g: f64,
    pub method: EigenMethod,
}

impl EigenTriple {
    /// (energy, state) pairs in ascending energy order.
    pub fn sorted(&self) -> [(f64, [f64; 3]); 3] {
        [(self.e_minus, self.state_minus), (self.e0, self.state0), (self.e_plus, self.state_plus)]
    }

    /// Largest |⟨u|v⟩ − δ_uv| over the three states.
    pub fn orthonormality_defect(&self) -> f64 {
        let s = [self.state_minus, self.state0, self.state_plus];
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(&s[i], &s[j]) - want).abs());
            }
        }
        worst
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn normalized(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = dot(&v, &v).sqrt();
    (n > 0.0 && n.is_finite()).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

pub fn mat_vec(m: &Matrix3, v: &[f64; 3]) -> [f64; 3] {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

/// Restriction of the lab-frame Hamiltonian to the single-excitation sector.
pub fn single_excitation_matrix(p: &PhysicalParams) -> Result<Matrix3> {
    p.require_xi_zero()?;
    let half = 0.5 * p.omega_atom;
    Ok([
        [half, p.g, p.g],
        [p.g, p.omega_plus() - half, 0.0],
        [p.g, 0.0, p.omega_minus() - half],
    ])
}

/// Closed-form eigensystem at Ω_a = ω₀: E₀ = Ω_a/2, E± = Ω_a/2 ± Δ_g,
/// |E₀⟩ ∝ (Δ, −g, g), |E±⟩ ∝ (g s±, s±²/2, g²) with s± = Δ ± Δ_g.
pub fn eigen_resonant(p: &PhysicalParams) -> Result<EigenTriple> {
    p.require_xi_zero()?;
    p.require_resonant("the closed-form eigensystem")?;
    let (d, g) = (p.delta, p.g);
    let dg = p.delta_g();
    let half = 0.5 * p.omega_atom;

    // One of s± suffers cancellation; rewrite it through s₊s₋ = −2g² and
    // scale that eigenvector by 1/g² so it stays finite as g → 0.
    let large = |s: f64| [g * s, 0.5 * s * s, g * g];
    let small = |t: f64| [g * t, 0.5 * g * g * t * t, 1.0];
    let (vp, vm) = if d >= 0.0 {
        (large(d + dg), small(-2.0 / (d + dg)))
    } else {
        (small(-2.0 / (d - dg)), large(d - dg))
    };
    let bare = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let state0 = normalized([d, -g, g]).unwrap_or(bare[1]);
    let (state_minus, state_plus) = match (normalized(vm), normalized(vp)) {
        (Some(m), Some(pl)) => (m, pl),
        // g = Δ = 0: fully degenerate, fall back to basis order.
        _ => (bare[0], bare[2]),
    };
    Ok(EigenTriple {
        e0: half,
        e_plus: half + dg,
        e_minus: half - dg,
        state0,
        state_plus,
        state_minus,
        delta_g: dg,
        method: EigenMethod::ClosedForm,
    })
}

/// Hermitian diagonalization of [`single_excitation_matrix`], ascending.
pub fn eigen_numeric(p: &PhysicalParams) -> Result<EigenTriple> {
    let m = single_excitation_matrix(p)?;
    let mat = Mat::<f64>::from_fn(3, 3, |i, j| m[i][j]);
    let eig = mat
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("3x3 symmetric eigenproblem did not converge");
    let (u, s) = (eig.U(), eig.S());
    let mut pairs: Vec<(f64, usize, [f64; 3])> = (0..3)
        .map(|c| {
            let mut v = [u[(0, c)], u[(1, c)], u[(2, c)]];
            // Fix the sign by the dominant component (lowest index on ties).
            let k = (0..3).fold(0, |best, i| if v[i].abs() > v[best].abs() { i } else { best });
            if v[k] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            (s[c], k, v)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(EigenTriple {
        e_minus: pairs[0].0,
        e0: pairs[1].0,
        e_plus: pairs[2].0,
        state_minus: pairs[0].2,
        state0: pairs[1].2,
        state_plus: pairs[2].2,
        delta_g: p.delta_g(),
        method: EigenMethod::Numeric,
    })
}

/// E_G = −Ω_a/2, the energy of |g,0,0⟩.
pub fn ground_energy(p: &PhysicalParams) -> Result<f64> {
    p.require_xi_zero()?;
    Ok(-0.5 * p.omega_atom)
}
