use holodyn::cli::{run, EXIT_IO, EXIT_NUMERIC, EXIT_PARSE, REPORT_SCHEMA};

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("holodyn").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn bad_map_spec_exits_with_parse_code() {
    let (code, _, err) = invoke(&["classify", "--map", "poly: 1 0 zz"]);
    assert_eq!(code, EXIT_PARSE);
    assert!(err.contains("column"), "{err}");
    let (code, _, _) = invoke(&["classify"]);
    assert_eq!(code, EXIT_PARSE);
    let (code, _, _) = invoke(&["frobnicate"]);
    assert_eq!(code, EXIT_PARSE);
}

#[test]
fn flagged_report_exits_with_numeric_code() {
    // the Milnor chart needs a polynomial
    let (code, out, _) = invoke(&["boettcher", "--map", "rat: 1 0 0 / 1 0 1", "--method", "milnor"]);
    assert_eq!(code, EXIT_NUMERIC);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["schema"], REPORT_SCHEMA);
}

#[test]
fn unwritable_output_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("image.ppm");
    let (code, _, err) = invoke(&[
        "render",
        "--map",
        "poly: 1 0 -1",
        "--viewport",
        "0,0,2,16,16",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_IO, "{err}");
}

#[test]
fn classify_report_is_deterministic_json() {
    let a = invoke(&["classify", "--map", "poly: 1 0 -1", "--max-period", "3"]);
    let b = invoke(&["classify", "--map", "poly: 1 0 -1", "--max-period", "3"]);
    assert_eq!(a.0, 0, "{}", a.2);
    assert_eq!(a.1, b.1);
    let json: serde_json::Value = serde_json::from_str(&a.1).unwrap();
    assert_eq!(json["schema"], REPORT_SCHEMA);
    assert!(json.get("timing").map_or(true, |t| t.is_null()));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    std::fs::write(&config, "# classify settings\nmap = poly: 1 0 -1\nmax-period = 1\n").unwrap();
    let config = config.to_str().unwrap();

    let (code, from_file, err) = invoke(&["classify", "--config", config]);
    assert_eq!(code, 0, "{err}");
    let (_, overridden, _) = invoke(&["classify", "--config", config, "--max-period", "2"]);
    let (_, direct, _) = invoke(&["classify", "--map", "poly: 1 0 -1", "--max-period", "2"]);
    assert_ne!(from_file, overridden);
    assert_eq!(overridden, direct);

    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "map = poly: 1 0 0\nwidth = 3\n").unwrap();
    let (code, _, err) = invoke(&["classify", "--config", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_PARSE);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn help_lists_the_map_grammar() {
    let (code, out, _) = invoke(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("poly:"));
    assert!(out.contains("classify") && out.contains("render"));
}
