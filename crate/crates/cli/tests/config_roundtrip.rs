use proptest::prelude::*;

use ringjc::analysis::Method;
use ringjc::hilbert::SigmaYConvention;
use ringjc_cli::config::{
    Format, Geometry, OutputSection, ParamsSection, RotationSection, RunConfig, SlopeSection, SolverSection,
    SweepSection, Velocity,
};

fn opt() -> impl Strategy<Value = Option<f64>> {
    prop::option::of(-1e3..1e3f64)
}

fn rotation() -> impl Strategy<Value = RotationSection> {
    prop_oneof![
        Just(RotationSection::default()),
        (-1e-3..1e-3f64).prop_map(|d| RotationSection { delta: Some(d), ..Default::default() }),
        (-0.5..0.5f64, -10.0..10.0f64)
            .prop_map(|(v_r, k)| RotationSection { velocity: Some(Velocity { v_r, k }), ..Default::default() }),
        (0.0..1.0f64, 0.1..10.0f64, -50i64..50, opt(), opt()).prop_map(|(omega_rot, radius, mode_index, circumference, cross_section)| {
            RotationSection {
                geometry: Some(Geometry { omega_rot, radius, mode_index, circumference, cross_section }),
                ..Default::default()
            }
        }),
    ]
}

fn method() -> impl Strategy<Value = Method> {
    prop_oneof![Just(Method::Analytic), Just(Method::Numeric), Just(Method::Both)]
}

fn config() -> impl Strategy<Value = RunConfig> {
    (
        (opt(), opt(), opt(), opt(), opt(), opt()),
        rotation(),
        (1usize..10, prop::option::of(1usize..8), prop::bool::ANY),
        (1usize..1000, prop::option::of((-1.0..0.0f64, 0.0..1.0f64)), prop::collection::vec(method(), 0..3)),
        (2usize..50, opt()),
        (prop::option::of("[a-z]{1,8}\\.csv"), prop::bool::ANY),
    )
        .prop_map(|(p, rotation, s, sw, sl, out)| RunConfig {
            params: ParamsSection { omega0: p.0, omega_atom: p.1, g: p.2, xi: p.3, gamma: p.4, drive_amp: p.5 },
            rotation,
            units: None,
            dipole: None,
            solver: SolverSection {
                n_max: s.0,
                threads: s.1,
                sigma_y: if s.2 { SigmaYConvention::Pauli } else { SigmaYConvention::Commutator },
            },
            sweep: SweepSection { points: sw.0, range: sw.1.map(|(a, b)| [a, b]), methods: sw.2 },
            slope: SlopeSection { points: sl.0, half_width: sl.1 },
            output: OutputSection {
                path: out.0.map(Into::into),
                format: if out.1 { Format::Csv } else { Format::Structured },
            },
        })
}

proptest! {
    #[test]
    fn toml_round_trip(c in config()) {
        let text = c.to_toml();
        let back = RunConfig::from_toml(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_toml(), text);
    }
}

#[test]
fn full_sections_round_trip() {
    let text = r#"
[params]
omega0 = 1.0
g = 2e-4

[rotation.geometry]
omega_rot = 1e-6
radius = 1.0
mode_index = 3

[units]
hbar = 1.0
eps0 = 1.0
c = 1.0

[dipole]
dipole_moment = [1e-3, 0.0, 1e-3]
polarization = [0.0, 0.0, 1.0]
tangent = [1.0, 0.0, 0.0]
electron_mass = 1.0
charge = 1.0
position = 0.25
"#;
    let c = RunConfig::from_toml(text).unwrap();
    assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    let r = c.resolve().unwrap();
    assert_eq!(r.params.g, 2e-4);
    assert!(r.params.xi != 0.0);
}
