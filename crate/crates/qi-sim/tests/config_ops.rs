use std::io::Write;

use qi_sim::{Overrides, SimConfig, SimError};

#[test]
fn defaults_match_documented_values() {
    let cfg = SimConfig::default();
    assert_eq!(cfg.eta, 0.1);
    assert_eq!(cfg.p, 0.8);
    assert_eq!(cfg.thermal_n, 0.5);
    assert_eq!(cfg.nt, 0.01);
    assert_eq!(cfg.dim, 10);
    assert_eq!(cfg.gamma, 1.0);
    assert_eq!(cfg.tol_s, 1e-6);
    assert_eq!(cfg.jobs, 1);
}

#[test]
fn parse_assigns_every_key() {
    let mut set = Overrides::default();
    set.parse_str(
        "eta = 0.2\np = 0.7\nthermal_n = 0.4\nnt = 0.02\ndim = 8\ngamma = 0.5\n\
         tol_s = 1e-5\njobs = 3",
    )
    .unwrap();
    assert_eq!(set.eta, Some(0.2));
    assert_eq!(set.p, Some(0.7));
    assert_eq!(set.thermal_n, Some(0.4));
    assert_eq!(set.nt, Some(0.02));
    assert_eq!(set.dim, Some(8));
    assert_eq!(set.gamma, Some(0.5));
    assert_eq!(set.tol_s, Some(1e-5));
    assert_eq!(set.jobs, Some(3));
}

#[test]
fn parse_skips_comments_and_blank_lines() {
    let mut set = Overrides::default();
    set.parse_str("# a comment\n\n  \t\neta = 0.3\n   # indented comment\n").unwrap();
    assert_eq!(set.eta, Some(0.3));
    assert_eq!(set.p, None);
}

#[test]
fn parse_errors_carry_line_numbers() {
    let mut set = Overrides::default();
    let err = set.parse_str("eta = 0.1\n\nwavelength = 5").unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("line 3"), "{msg}");
    assert!(msg.contains("wavelength"), "{msg}");

    let err = Overrides::default().parse_str("just words").unwrap_err();
    assert!(err.to_string().contains("line 1"), "{err}");

    let err = Overrides::default().parse_str("eta = fast").unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("line 1") && msg.contains("fast"), "{msg}");
}

#[test]
fn flags_override_file_which_overrides_defaults() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "eta = 0.3\nnt = 0.02").unwrap();

    let flags = Overrides { eta: Some(0.5), ..Overrides::default() };
    let cfg = SimConfig::resolve(Some(file.path()), &flags).unwrap();
    assert_eq!(cfg.eta, 0.5); // flag beats file
    assert_eq!(cfg.nt, 0.02); // file beats default
    assert_eq!(cfg.p, 0.8); // default survives

    let cfg = SimConfig::resolve(None, &flags).unwrap();
    assert_eq!(cfg.eta, 0.5);
    assert_eq!(cfg.nt, 0.01);
}

#[test]
fn merge_keeps_stronger_values() {
    let strong = Overrides { eta: Some(0.5), ..Overrides::default() };
    let weak = Overrides { eta: Some(0.3), p: Some(0.7), ..Overrides::default() };
    let merged = strong.or(&weak);
    assert_eq!(merged.eta, Some(0.5));
    assert_eq!(merged.p, Some(0.7));
    assert_eq!(merged.dim, None);
}

#[test]
fn validation_rejects_out_of_range_values() {
    for text in [
        "eta = 1.5",
        "p = -0.1",
        "thermal_n = -1",
        "nt = -0.5",
        "gamma = -2",
        "tol_s = 0",
        "tol_s = 1",
        "dim = 1",
        "jobs = 0",
    ] {
        let mut set = Overrides::default();
        set.parse_str(text).unwrap();
        let err = SimConfig::from_overrides(&set).unwrap_err();
        assert!(matches!(err, SimError::Config(_)), "{text}: {err}");
        assert_eq!(err.exit_code(), 1, "{text}");
    }
}

#[test]
fn missing_config_file_is_an_io_error() {
    let err =
        SimConfig::resolve(Some(std::path::Path::new("/nonexistent/qi.conf")), &Overrides::default())
            .unwrap_err();
    assert!(matches!(err, SimError::Io(_)), "{err}");
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn display_round_trips_through_the_parser() {
    let cfg = SimConfig {
        eta: 0.07,
        p: 0.65,
        thermal_n: 0.51,
        nt: 0.013,
        dim: 12,
        gamma: 0.25,
        tol_s: 2e-6,
        jobs: 4,
    };
    let mut set = Overrides::default();
    set.parse_str(&cfg.to_string()).unwrap();
    assert_eq!(SimConfig::from_overrides(&set).unwrap(), cfg);
}
