//! Invariant suites behind `ringjc validate`.

use std::f64::consts::{PI, SQRT_2};

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use serde::Serialize;

use ringjc::analysis::symmetric_grid;
use ringjc::field::{metric_at, mode_overlap, mode_overlap_closed_form, OverlapKind, RingMode};
use ringjc::hilbert::{CompositeOps, HilbertConfig, C64};
use ringjc::liouville::{liouvillian, residual_norm, steady_photon_numbers, steady_state};
use ringjc::model::rotating_frame_hamiltonian_with;
use ringjc::moments::{n_closed_full, solve_moments};
use ringjc::{OperatorMatrix, PhysicalParams};

use crate::config::{Format, Resolved};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

fn verdict(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

const SEED: u64 = 0x5a91;

fn metric_inverse() -> SuiteResult {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let omega = rng.random_range(0.1..10.0);
        let r = rng.random_range(0.0..0.5) / omega;
        let th = rng.random_range(0.0..2.0 * PI);
        worst = worst.max(metric_at(r * th.cos(), r * th.sin(), omega, 1.0).inverse_defect());
    }
    SuiteResult {
        name: "metric_inverse",
        status: verdict(worst <= 1e-12),
        detail: format!("worst |g^mn g_nl - delta| {worst:.1e} over 1000 points (tol 1e-12)"),
    }
}

fn overlap_quadrature() -> SuiteResult {
    let l = 2.0 * PI;
    let mode = |n: i64| RingMode { k: 2.0 * PI * n as f64 / l, z_bar: 0.7, polarization: [0.0, 0.0, 1.0] };
    let (mut diag, mut cross) = (0.0_f64, 0.0_f64);
    for v in [0.0, 0.01, 0.1] {
        for n in (-5i64..=5).filter(|&n| n != 0) {
            let a = mode(n);
            let q = mode_overlap(&a, &a, OverlapKind::Conjugated, v, 1.0, l, 0.3, 4096);
            let want = mode_overlap_closed_form(&a, v, 1.0, l);
            diag = diag.max((q - want).norm() / want.norm());
            for m in (-5i64..=5).filter(|&m| m != 0 && m != n) {
                let off = mode_overlap(&a, &mode(m), OverlapKind::Conjugated, v, 1.0, l, 0.3, 4096);
                cross = cross.max(off.norm() / want.norm());
            }
        }
    }
    SuiteResult {
        name: "overlap_quadrature",
        status: verdict(diag <= 1e-6 && cross <= 1e-6),
        detail: format!("diagonal vs closed form {diag:.1e}, off-diagonal {cross:.1e} (tol 1e-6)"),
    }
}

fn hamiltonian(p: &PhysicalParams, ops: &CompositeOps, corrupt: bool) -> ringjc::Result<OperatorMatrix> {
    let mut h = rotating_frame_hamiltonian_with(p, ops)?;
    if corrupt {
        let v = h.get(0, 1) + C64::new(1e-3 * h.max_abs().max(1.0), 0.0);
        h.set(0, 1, v);
    }
    Ok(h)
}

fn hermiticity(p: &PhysicalParams, ops: &CompositeOps, corrupt: bool) -> SuiteResult {
    let name = "hermiticity";
    match hamiltonian(p, ops, corrupt) {
        Ok(h) => {
            let d = h.hermiticity_defect();
            SuiteResult { name, status: verdict(d <= 1e-12), detail: format!("|H - H^dag| {d:.1e} (tol 1e-12)") }
        }
        Err(e) => SuiteResult { name, status: Status::Fail, detail: e.to_string() },
    }
}

fn lindblad_trace(p: &PhysicalParams, ops: &CompositeOps) -> SuiteResult {
    let name = "lindblad_trace";
    let run = || -> ringjc::Result<(bool, String)> {
        let h = rotating_frame_hamiltonian_with(p, ops)?;
        let l = liouvillian(&h, p.gamma, &[ops.a_plus.clone(), ops.a_minus.clone()])?;
        let d = h.dim();
        let mut rng = StdRng::seed_from_u64(SEED);
        let a = OperatorMatrix::from_fn(d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let rho = &a + &a.adjoint();
        let out = l.apply_to(&rho)?;
        let scale = rho.max_abs() * l.max_abs() * d as f64;
        let tr = out.trace().norm() / scale;
        let herm = out.hermiticity_defect() / scale;
        let ss = steady_state(&l)?;
        let resid = residual_norm(&l, &ss)? / l.frobenius_norm();
        let def = ss.defects();
        let ok = tr <= 1e-14 && herm <= 1e-14 && resid <= 1e-10 && def.is_valid();
        Ok((
            ok,
            format!(
                "tr(L rho) {tr:.1e}, hermiticity {herm:.1e} (relative, tol 1e-14); steady state residual {resid:.1e}, \
                 trace err {:.1e}, hermiticity {:.1e}, min eig {:.1e}",
                def.trace_error, def.hermiticity, def.min_eigenvalue
            ),
        ))
    };
    match run() {
        Ok((ok, detail)) => SuiteResult { name, status: verdict(ok), detail },
        Err(e) => SuiteResult { name, status: Status::Fail, detail: e.to_string() },
    }
}

fn oracle_equivalence(p: &PhysicalParams) -> SuiteResult {
    let name = "oracle_equivalence";
    if p.xi != 0.0 {
        return SuiteResult { name, status: Status::Skip, detail: "moment closure needs xi = 0".into() };
    }
    let span = p.delta.abs().max(1e-5 * p.omega_atom.abs());
    let mut worst = 0.0_f64;
    for w in symmetric_grid(3.0 * SQRT_2 * p.g, 5) {
        for d in symmetric_grid(span, 5) {
            let q = p.with_delta(d).with_drive_detuning(w);
            match (solve_moments(&q), n_closed_full(&q)) {
                (Ok(m), Ok((cp, cm))) => {
                    let (mp, mm) = m.photon_numbers();
                    for (a, b) in [(mp, cp), (mm, cm)] {
                        worst = worst.max((a - b).abs() / b.abs().max(1e-300));
                    }
                }
                (Err(e), _) | (_, Err(e)) => return SuiteResult { name, status: Status::Fail, detail: e.to_string() },
            }
        }
    }
    SuiteResult {
        name,
        status: verdict(worst <= 1e-8),
        detail: format!("moment system vs closed form {worst:.1e} on a 5x5 grid (tol 1e-8)"),
    }
}

fn truncation(p: &PhysicalParams, hilbert: &HilbertConfig) -> SuiteResult {
    let name = "truncation_convergence";
    let probe = p.with_drive_detuning(SQRT_2 * p.g);
    let high = HilbertConfig { n_max: hilbert.n_max + 3, ..*hilbert };
    let run = || -> ringjc::Result<f64> {
        let a = steady_photon_numbers(&probe, &CompositeOps::new(hilbert)?)?;
        let b = steady_photon_numbers(&probe, &CompositeOps::new(&high)?)?;
        Ok(((a.0 - b.0).abs() / b.0).max((a.1 - b.1).abs() / b.1))
    };
    match run() {
        Ok(shift) => SuiteResult {
            name,
            status: verdict(shift < 1e-6),
            detail: format!("n_max {} vs {}: relative shift {shift:.1e} at Ω̃ = √2g (tol 1e-6)", hilbert.n_max, high.n_max),
        },
        Err(e) => SuiteResult { name, status: Status::Fail, detail: e.to_string() },
    }
}

pub fn run_suites(r: &Resolved, corrupt_hamiltonian: bool) -> Vec<SuiteResult> {
    let p = &r.params;
    let mut out = vec![metric_inverse(), overlap_quadrature()];
    match CompositeOps::new(&r.hilbert) {
        Ok(ops) => {
            out.push(hermiticity(p, &ops, corrupt_hamiltonian));
            out.push(lindblad_trace(p, &ops));
        }
        Err(e) => {
            for name in ["hermiticity", "lindblad_trace"] {
                out.push(SuiteResult { name, status: Status::Fail, detail: e.to_string() });
            }
        }
    }
    out.push(oracle_equivalence(p));
    out.push(truncation(p, &r.hilbert));
    out
}

pub fn render(results: &[SuiteResult], format: Format) -> String {
    match format {
        Format::Structured => crate::output::json(&results),
        Format::Csv => {
            let mut s = String::new();
            for r in results {
                let tag = match r.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Skip => "SKIP",
                };
                s.push_str(&format!("[{tag}] {}: {}\n", r.name, r.detail));
            }
            let failed = results.iter().filter(|r| r.status == Status::Fail).count();
            s.push_str(&format!("{} suite(s), {failed} failed\n", results.len()));
            s
        }
    }
}
