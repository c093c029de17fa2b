use std::path::PathBuf;
use std::process::{Command, Output};

fn fibgrowth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibgrowth"))
        .args(args)
        .env_remove("FIBGROWTH_LEVEL_CAP")
        .output()
        .expect("binary runs")
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

const GOLDEN: &[(&str, &[&str])] = &[
    ("normalize_fff", &["normalize", "fff"]),
    ("normalize_diagram_json", &["--format", "json", "normalize", "f4 f3 f3 f4"]),
    ("reduce_trace", &["reduce", "--trace", "f1 f3 f3"]),
    ("reduce_csv", &["--format", "csv", "reduce", "f4 f3 f3 f4"]),
    ("act_bundled", &["act", "fsf", "011010"]),
    ("growth_csv", &["growth", "--max-length", "1000", "--format", "csv"]),
    ("growth_text", &["growth", "--max-length", "200", "--checkpoints", "1,2,3,50,200"]),
    ("wn_level1_verify", &["wn", "--level", "1", "--verify"]),
    ("wn_level4_json", &["--format", "json", "wn", "--level", "4", "--verify"]),
    ("trace_f5f4", &["trace", "f5 f4", "--levels", "0..7"]),
    ("trace_s_csv", &["--format", "csv", "trace", "s", "--levels", "0..3"]),
    ("ideal_witness_f5f4", &["ideal-witness", "f5 f4"]),
    ("ideal_witness_json", &["--format", "json", "ideal-witness", "f1 f4 f6 f5 f2"]),
    ("hausdorff_csv", &["hausdorff", "--max", "12", "--format", "csv"]),
    ("verify_relations", &["verify", "relations", "--max-len", "8", "--level", "10"]),
    ("verify_lemmas_json", &["verify", "lemmas", "--level", "11", "--json"]),
    ("verify_identity_random", &["verify", "identity", "--level", "10", "--max-len", "12", "--count", "40", "--seed", "3"]),
    ("theta_check", &["theta-check", "--level", "8"]),
];

#[test]
fn golden_outputs() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut mismatched = Vec::new();
    for (name, args) in GOLDEN {
        let out = fibgrowth(args);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let actual = String::from_utf8(out.stdout).unwrap();
        let path = golden_dir().join(format!("{name}.txt"));
        if update {
            std::fs::write(&path, &actual).unwrap();
            continue;
        }
        let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
        if expected != actual {
            mismatched.push(format!("{name}:\n--- expected\n{expected}--- actual\n{actual}"));
        }
    }
    assert!(mismatched.is_empty(), "{}", mismatched.join("\n"));
}

#[test]
fn normalize_prints_form_and_length() {
    let out = fibgrowth(&["normalize", "fff"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "f1 f3\nlength: 1\n");
}

#[test]
fn first_quotient_has_four_elements() {
    let out = fibgrowth(&["wn", "--level", "1", "--verify"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("order: 4\n") && text.contains("formula: 4\n") && text.contains("relations: pass"));
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn growth_csv_has_thousandth_ball() {
    let out = fibgrowth(&["growth", "--max-length", "1000", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("length,gamma,ratio,lower_ok,upper_ok"));
    let last = lines.last().unwrap();
    assert!(last.starts_with("1000,4293898,0.2049"), "{last}");
}

#[test]
fn exit_codes() {
    assert_eq!(fibgrowth(&["normalize", "fxf"]).status.code(), Some(64));
    assert_eq!(fibgrowth(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(fibgrowth(&["growth", "--max-length", "ten"]).status.code(), Some(64));
    assert_eq!(fibgrowth(&["wn", "--level", "11"]).status.code(), Some(65));
    assert_eq!(fibgrowth(&["trace", "f4", "--levels", "0..40"]).status.code(), Some(65));
    assert_eq!(fibgrowth(&["ideal-witness", "s"]).status.code(), Some(65));
    assert_eq!(fibgrowth(&["verify", "no-solution", "--level", "0", "--max-len", "3"]).status.code(), Some(2));
    assert_eq!(fibgrowth(&["--help"]).status.code(), Some(0));
    assert_eq!(fibgrowth(&["--version"]).status.code(), Some(0));
}

#[test]
fn cap_override_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_fibgrowth"))
        .args(["trace", "f4", "--levels", "0..18"])
        .env("FIBGROWTH_LEVEL_CAP", "18")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().contains("18,1/4"));
}

#[test]
fn machine_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("fibgrowth-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("i.txt");
    std::fs::write(&path, fibgrowth_core::mealy::MealyMachine::bundled_definition()).unwrap();
    for (states, input) in [("f", "1"), ("fsf", "011010"), ("ssff", "0000111"), ("e", "0101")] {
        let bundled = fibgrowth(&["act", states, input]);
        let from_file = fibgrowth(&["act", "--machine", path.to_str().unwrap(), states, input]);
        assert!(bundled.status.success());
        assert_eq!(bundled.stdout, from_file.stdout, "{states} on {input}");
    }
    std::fs::write(&path, "alphabet 2\nstates a\nedge a 0 -> b 0\n").unwrap();
    let bad = fibgrowth(&["act", "--machine", path.to_str().unwrap(), "a", "0"]);
    assert_eq!(bad.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 3"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bundled_machine_edge_set() {
    use fibgrowth_core::mealy::MealyMachine;
    let m = MealyMachine::parse(MealyMachine::bundled_definition()).unwrap();
    let mut edges: Vec<(String, usize, String, usize)> = m
        .edges()
        .into_iter()
        .map(|e| (m.state_name(e.from).to_string(), e.input, m.state_name(e.to).to_string(), e.output))
        .collect();
    edges.sort();
    let expected = [("e", 0, "e", 0), ("e", 1, "e", 1), ("f", 0, "s", 0), ("f", 1, "f", 0), ("s", 0, "e", 1), ("s", 1, "e", 0)];
    let expected: Vec<_> = expected.iter().map(|&(a, i, b, o)| (a.to_string(), i, b.to_string(), o)).collect();
    assert_eq!(edges, expected);
    let reparsed = MealyMachine::parse(&m.to_definition()).unwrap();
    assert_eq!(reparsed.edges(), m.edges());
}
