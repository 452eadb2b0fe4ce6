use serde::Serialize;
use serde_json::json;

use ringjc::analysis::{
    self, peak_warnings, sensitivity_curve, sensitivity_curve_numeric, SensitivityCurve, SweepResult,
};
use ringjc::liouville::output_current;
use ringjc::spectrum::{eigen_numeric, eigen_resonant, ground_energy, EigenMethod};

use crate::config::{Format, Resolved, RunConfig};
use crate::output::{header, json, num, row};
use crate::CliError;

pub fn eigen(config: &RunConfig, r: &Resolved) -> Result<String, CliError> {
    let p = &r.params;
    let t = if p.is_resonant() {
        eigen_resonant(p)?
    } else {
        eprintln!("note: Ω_a ≠ ω₀, using numeric diagonalization");
        eigen_numeric(p)?
    };
    let method = match t.method {
        EigenMethod::ClosedForm => "closed_form",
        EigenMethod::Numeric => "numeric",
    };
    let eg = ground_energy(p)?;
    let levels = [
        ("ground", eg, None),
        ("minus", t.e_minus, Some(t.state_minus)),
        ("zero", t.e0, Some(t.state0)),
        ("plus", t.e_plus, Some(t.state_plus)),
    ];
    Ok(match r.format {
        Format::Structured => json(&json!({
            "config": config,
            "params": p,
            "method": method,
            "delta_g": t.delta_g,
            "basis": ["e,0,0", "g,1,0", "g,0,1"],
            "levels": levels.iter().map(|(name, e, s)| json!({"level": name, "energy": e, "amplitudes": s})).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut out = header("eigen", config, r);
            out.push_str(&format!("# method: {method}\n# delta_g: {}\n", num(t.delta_g)));
            out.push_str("# amplitudes in the basis |e,0,0>, |g,1,0>, |g,0,1>\n");
            out.push_str("level,energy,amp_e00,amp_g10,amp_g01\n");
            for (name, e, s) in levels {
                let amps = match s {
                    Some(v) => row(&v),
                    None => ",,".into(),
                };
                out.push_str(&format!("{name},{},{amps}\n", num(e)));
            }
            out
        }
    })
}

fn currents(s: &SweepResult, gamma: f64) -> (Vec<f64>, Vec<f64>) {
    let (np, nm) = match (&s.n_plus_numeric, &s.n_minus_numeric) {
        (Some(a), Some(b)) => (a, b),
        _ => (s.n_plus_analytic.as_ref().unwrap(), s.n_minus_analytic.as_ref().unwrap()),
    };
    (
        np.iter().map(|n| output_current(*n, gamma)).collect(),
        nm.iter().map(|n| output_current(*n, gamma)).collect(),
    )
}

pub fn sweep(config: &RunConfig, r: &Resolved) -> Result<String, CliError> {
    let p = &r.params;
    let s = analysis::sweep(p, &r.grid, r.method, &r.sweep_options())?;
    let warnings = peak_warnings(&s, p.gamma, 3);
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let (cp, cm) = currents(&s, p.gamma);
    Ok(match r.format {
        Format::Structured => json(&json!({
            "config": config,
            "params": p,
            "sweep": s,
            "current_plus": cp,
            "current_minus": cm,
            "warnings": warnings,
        })),
        Format::Csv => {
            let mut out = header("sweep", config, r);
            let mut cols = vec!["omega_tilde"];
            let mut series: Vec<&[f64]> = Vec::new();
            if let (Some(a), Some(b)) = (&s.n_plus_analytic, &s.n_minus_analytic) {
                cols.extend(["n_plus_analytic", "n_minus_analytic"]);
                series.extend([a.as_slice(), b.as_slice()]);
            }
            if let (Some(a), Some(b)) = (&s.n_plus_numeric, &s.n_minus_numeric) {
                cols.extend(["n_plus_numeric", "n_minus_numeric"]);
                series.extend([a.as_slice(), b.as_slice()]);
            }
            cols.extend(["current_plus", "current_minus"]);
            series.extend([cp.as_slice(), cm.as_slice()]);
            out.push_str(&cols.join(","));
            out.push('\n');
            for (i, x) in s.grid.iter().enumerate() {
                let mut v = vec![*x];
                v.extend(series.iter().map(|col| col[i]));
                out.push_str(&row(&v));
                out.push('\n');
            }
            out.push_str("# peaks\n# mode,path,index,grid_position,position,height\n");
            for pk in &s.peaks {
                out.push_str(&format!(
                    "# {},{},{},{}\n",
                    format!("{:?}", pk.mode).to_lowercase(),
                    format!("{:?}", pk.path).to_lowercase(),
                    pk.index,
                    row(&[pk.grid_position, pk.position, pk.height])
                ));
            }
            for w in &warnings {
                out.push_str(&format!("# warning: {w}\n"));
            }
            out
        }
    })
}

#[derive(Serialize)]
struct SlopeReport<'a> {
    config: &'a RunConfig,
    params: &'a ringjc::PhysicalParams,
    analytic: Option<&'a SensitivityCurve>,
    numeric: Option<&'a SensitivityCurve>,
}

fn summary(label: &str, c: &SensitivityCurve) -> String {
    format!(
        "# {label}: fitted_slope={} closed_form_slope={} relative_difference={} fit_window=[{},{}] fit_rms={} linear_regime={}\n",
        num(c.fitted_slope),
        num(c.closed_form_slope),
        num(c.relative_difference),
        num(c.fit_window.0),
        num(c.fit_window.1),
        num(c.fit_residual),
        c.window_in_linear_regime
    )
}

pub fn slope(config: &RunConfig, r: &Resolved) -> Result<String, CliError> {
    let p = &r.params;
    let analytic = if r.method.analytic() { Some(sensitivity_curve(p, &r.delta_grid)?) } else { None };
    let numeric =
        if r.method.numeric() { Some(sensitivity_curve_numeric(p, &r.delta_grid, &r.sweep_options())?) } else { None };
    Ok(match r.format {
        Format::Structured => {
            json(&SlopeReport { config, params: p, analytic: analytic.as_ref(), numeric: numeric.as_ref() })
        }
        Format::Csv => {
            let mut out = header("slope", config, r);
            let mut cols = vec!["delta"];
            let mut series: Vec<&[f64]> = Vec::new();
            if let Some(c) = &analytic {
                out.push_str(&summary("analytic", c));
                cols.push("n_plus_analytic");
                series.push(&c.heights);
            }
            if let Some(c) = &numeric {
                out.push_str(&summary("numeric", c));
                cols.push("n_plus_numeric");
                series.push(&c.heights);
            }
            out.push_str(&cols.join(","));
            out.push('\n');
            for (i, d) in r.delta_grid.iter().enumerate() {
                let mut v = vec![*d];
                v.extend(series.iter().map(|col| col[i]));
                out.push_str(&row(&v));
                out.push('\n');
            }
            out
        }
    })
}
