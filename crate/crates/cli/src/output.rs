//! Text rendering shared by the subcommands.

use serde::Serialize;

use crate::config::{Resolved, RunConfig};

/// Shortest round-trip scientific notation, so output is byte-stable.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn row(values: &[f64]) -> String {
    values.iter().map(|v| num(*v)).collect::<Vec<_>>().join(",")
}

fn commented(out: &mut String, text: &str) {
    for line in text.lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
}

#[derive(Serialize)]
struct ResolvedView<'a> {
    params: &'a ringjc::PhysicalParams,
    n_max: usize,
    points: usize,
    grid: [f64; 2],
}

/// Comment block carrying the effective config and the resolved parameters.
pub fn header(command: &str, config: &RunConfig, resolved: &Resolved) -> String {
    let mut out = format!("# ringjc {} {command}\n", env!("CARGO_PKG_VERSION"));
    commented(&mut out, &config.to_toml());
    let view = ResolvedView {
        params: &resolved.params,
        n_max: resolved.hilbert.n_max,
        points: resolved.grid.len(),
        grid: [resolved.grid[0], resolved.grid[resolved.grid.len() - 1]],
    };
    out.push_str("#\n# resolved:\n");
    commented(&mut out, &toml::to_string(&view).expect("resolved view serializes"));
    out
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}
