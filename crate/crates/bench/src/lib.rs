//! Fixtures shared by the solver benchmarks.

use ringjc::analysis::default_grid;
use ringjc::hilbert::{CompositeOps, HilbertConfig};
use ringjc::PhysicalParams;

/// Baseline parameters probed on the upper side peak, with rotation on.
pub fn probe_params() -> PhysicalParams {
    let p = PhysicalParams::baseline().with_delta(1e-5);
    p.with_drive_detuning(std::f64::consts::SQRT_2 * p.g)
}

pub fn ops(n_max: usize) -> CompositeOps {
    CompositeOps::new(&HilbertConfig::new(n_max).expect("n_max >= 1")).expect("operators build")
}

pub fn sweep_grid() -> Vec<f64> {
    default_grid(&PhysicalParams::baseline())
}
