use quadflip::cli::run_with;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let argv = std::iter::once("quadflip").chain(args.iter().copied()).map(String::from);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn enumerate_counts() {
    assert_eq!(json(&["enumerate", "--what", "labelled", "--n", "3"])["count"], "135");
    assert_eq!(json(&["enumerate", "--what", "trees", "--n", "4", "--r", "2"])["count"], "224");
    assert_eq!(json(&["enumerate", "--what", "quad", "--n", "4"])["count"], "378");
    assert_eq!(json(&["enumerate", "--what", "quad-pointed", "--n", "2"])["count"], "36");
}

#[test]
fn convert_round_trips() {
    let v = json(&["convert", "--tree", "(+)(-)", "--sign", "-1"]);
    assert_eq!(v["round_trip"], true);
    let quad = v["quad"].as_str().unwrap().to_string();
    let back = json(&["convert", "--quad", &quad]);
    assert_eq!(back["tree"], "(+)(-)");
    assert_eq!(back["sign"], -1);
}

#[test]
fn simulate_csv_is_deterministic() {
    let args = ["simulate", "--chain", "translate", "--n", "5", "--r", "2", "--steps", "200", "--seed", "4", "--observables", "height,leaves", "--every", "20"];
    let (c1, a, _) = run(&args);
    let (c2, b, _) = run(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "step,height,leaves");
    assert_eq!(lines.len(), 12);
    assert!(lines[1].starts_with("0,1,5"));
}

#[test]
fn simulate_json_summary() {
    let v = json(&["simulate", "--chain", "flip", "--n", "3", "--steps", "50", "--format", "json"]);
    assert_eq!(v["steps"], 50);
    assert!(v["final_state"].as_str().unwrap().starts_with("QM v1 n=3"));
}

#[test]
fn gap_reports_agreeing_solvers() {
    let v = json(&["gap", "--chain", "flip", "--n", "1,2"]);
    let g = v["gaps"][1]["gap"].as_f64().unwrap();
    assert!((g - 0.1458524300392372).abs() < 1e-12);
    assert!(v["log_log_slope"].as_f64().unwrap() < 0.0);
}

#[test]
fn verify_paths_subcommands() {
    let v = json(&["verify-paths", "--what", "flip", "--n", "2", "--exhaustive"]);
    assert_eq!(v["failures"], serde_json::json!([]));
    assert_eq!(v["families"]["root-reversal"]["labels"], 18);
    assert_eq!(json(&["verify-paths", "--what", "hierarchy", "--n", "5", "--r", "2"])["column_sum"], "6");
    assert_eq!(json(&["verify-paths", "--what", "fibers", "--n", "3", "--r", "2"])["max_fiber"], 5);
    json(&["verify-paths", "--what", "gamma", "--n", "2"]);
    json(&["verify-paths", "--what", "congestion", "--n", "2"]);
}

#[test]
fn stats_law_fails_at_three_edges() {
    let (code, out, _) = run(&["stats", "--what", "law", "--n", "3"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["equal"], false);
    assert_eq!(json(&["stats", "--what", "law", "--n", "2"])["equal"], true);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["gap", "--chain", "bogus", "--n", "2"]).0, 2);
    assert_eq!(run(&["enumerate", "--what", "trees"]).0, 2);
    assert_eq!(run(&["convert", "--tree", "(+"]).0, 2);
    assert_eq!(run(&["--ceiling", "10", "gap", "--chain", "flip", "--n", "4"]).0, 2);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("verify-paths"));
}
