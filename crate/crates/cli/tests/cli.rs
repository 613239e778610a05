use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn rmop(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmop"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

fn gen(dir: &Path, name: &str, extra: &[&str]) {
    let mut args = vec!["gen", "--out", name];
    args.extend_from_slice(extra);
    let out = rmop(&args, dir);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

const CROSSOVER: [&str; 10] = [
    "--vertices",
    "96",
    "--robots",
    "10",
    "--alpha",
    "3",
    "--budget",
    "60",
    "--seed",
    "7",
];

#[test]
fn gen_writes_a_loadable_scenario() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "s.json", &CROSSOVER);
    let scenario = rmop::load_scenario(&fs::read(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(scenario.graph().len(), 96);
    assert_eq!(
        (scenario.n_robots(), scenario.alpha(), scenario.budget()),
        (10, 3, 60.0)
    );
}

#[test]
fn gen_without_out_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = rmop(
        &[
            "gen",
            "--vertices",
            "9",
            "--robots",
            "2",
            "--alpha",
            "1",
            "--budget",
            "5",
            "--seed",
            "1",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn gen_rejects_alpha_equal_to_team_size() {
    let dir = TempDir::new().unwrap();
    let out = rmop(
        &[
            "gen",
            "--vertices",
            "20",
            "--robots",
            "10",
            "--alpha",
            "10",
            "--budget",
            "60",
            "--seed",
            "1",
            "--out",
            "s.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("alpha must be < N"), "{}", stderr(&out));
    assert!(!dir.path().join("s.json").exists());
}

#[test]
fn solve_shapes_per_planner() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "s.json", &CROSSOVER);
    for (planner, s1_len) in [("rmop", 3), ("sga", 0), ("ng", 0)] {
        let file = format!("{planner}.json");
        let out = rmop(
            &[
                "solve",
                "--scenario",
                "s.json",
                "--planner",
                planner,
                "--subroutine",
                "gcb",
                "--out",
                &file,
            ],
            dir.path(),
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let doc = json(dir.path().join(&file));
        assert_eq!(doc["s1"].as_array().unwrap().len(), s1_len, "{planner}");
        assert_eq!(
            doc["s1"].as_array().unwrap().len() + doc["s2"].as_array().unwrap().len(),
            10
        );
        assert_eq!(doc["paths"].as_array().unwrap().len(), 10);
        assert_eq!(doc["planner"], planner);
        assert!(doc["bound_report"]["k_f_ground_set_note"].is_string());
    }
}

#[test]
fn exact_subroutine_refuses_large_graphs() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "s.json", &CROSSOVER);
    let out = rmop(
        &[
            "solve",
            "--scenario",
            "s.json",
            "--subroutine",
            "exact",
            "--out",
            "r.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("gcb"), "{}", stderr(&out));
}

#[test]
fn attack_reports_are_consistent_and_reproducible() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "s.json", &CROSSOVER);
    assert_eq!(
        code(&rmop(&["solve", "--scenario", "s.json", "--out", "r.json"], dir.path())),
        0
    );

    let out = rmop(
        &[
            "attack",
            "--scenario",
            "s.json",
            "--model",
            "worst",
            "--size",
            "3",
            "r.json",
            "--out",
            "a.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = json(dir.path().join("a.json"));
    assert_eq!(report["removed"].as_array().unwrap().len(), 3);
    assert!(report["residual"].as_f64().unwrap() <= report["team_reward"].as_f64().unwrap());

    let random = |seed: &str| {
        let out = rmop(
            &[
                "attack",
                "--scenario",
                "s.json",
                "--model",
                "random",
                "--size",
                "3",
                "--seed",
                seed,
                "r.json",
            ],
            dir.path(),
        );
        assert_eq!(code(&out), 0);
        out.stdout
    };
    assert_eq!(random("1"), random("1"));

    let greedy = rmop(
        &[
            "attack",
            "--scenario",
            "s.json",
            "--model",
            "greedy",
            "--size",
            "3",
            "r.json",
        ],
        dir.path(),
    );
    let greedy: Value = serde_json::from_slice(&greedy.stdout).unwrap();
    assert!(greedy["residual"].as_f64().unwrap() >= report["residual"].as_f64().unwrap() - 1e-9);

    let partial = rmop(
        &[
            "attack",
            "--scenario",
            "s.json",
            "--model",
            "partial",
            "--size",
            "2",
            "r.json",
        ],
        dir.path(),
    );
    let partial: Value = serde_json::from_slice(&partial.stdout).unwrap();
    assert_eq!(partial["planned_alpha"], 3);
    assert!(partial["residual"].as_f64().unwrap() >= report["residual"].as_f64().unwrap() - 1e-9);

    let missing_seed = rmop(
        &[
            "attack",
            "--scenario",
            "s.json",
            "--model",
            "random",
            "--size",
            "3",
            "r.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&missing_seed), 2);
}

#[test]
fn attack_refuses_a_different_scenario() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "s.json", &CROSSOVER);
    gen(
        dir.path(),
        "other.json",
        &[
            "--vertices",
            "96",
            "--robots",
            "10",
            "--alpha",
            "3",
            "--budget",
            "60",
            "--seed",
            "8",
        ],
    );
    assert_eq!(
        code(&rmop(&["solve", "--scenario", "s.json", "--out", "r.json"], dir.path())),
        0
    );
    let out = rmop(
        &["attack", "--scenario", "other.json", "--size", "3", "r.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("refusing"), "{}", stderr(&out));
}

fn bench_spec(dir: &Path, trials: usize, planners: &str) {
    let spec = format!(
        r#"{{"scenario": {{"file": "maps/s.json"}}, "planners": {planners}, "attacks": [{{"model": "worst", "sizes": [1, 2]}}], "trials": {trials}, "seed": 5, "record_timing": false}}"#
    );
    fs::create_dir_all(dir.join("exp/maps")).unwrap();
    fs::write(dir.join("exp/spec.json"), spec).unwrap();
}

#[test]
fn bench_writes_csv_and_summary() {
    let dir = TempDir::new().unwrap();
    fs::create_dir_all(dir.path().join("exp/maps")).unwrap();
    gen(
        dir.path(),
        "exp/maps/s.json",
        &[
            "--vertices",
            "30",
            "--robots",
            "5",
            "--alpha",
            "2",
            "--budget",
            "30",
            "--seed",
            "3",
        ],
    );
    bench_spec(dir.path(), 3, r#"["rmop", "sga"]"#);
    let out = rmop(
        &[
            "bench",
            "--spec",
            "exp/spec.json",
            "--out",
            "out.csv",
            "--summary",
            "sum.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "trial,planner,attack_model,attack_size,f_S,residual,plan_ms,loop_iters"
    );
    assert_eq!(lines.len(), 1 + 3 * 2 * 2);
    let summary = json(dir.path().join("sum.json"));
    assert_eq!(summary.as_array().unwrap().len(), 4);

    let again = rmop(&["bench", "--spec", "exp/spec.json", "--out", "again.csv"], dir.path());
    assert_eq!(code(&again), 0);
    assert_eq!(csv, fs::read_to_string(dir.path().join("again.csv")).unwrap());
}

#[test]
fn bench_with_zero_trials_writes_only_the_header() {
    let dir = TempDir::new().unwrap();
    fs::create_dir_all(dir.path().join("exp/maps")).unwrap();
    gen(
        dir.path(),
        "exp/maps/s.json",
        &[
            "--vertices",
            "20",
            "--robots",
            "4",
            "--alpha",
            "1",
            "--budget",
            "20",
            "--seed",
            "3",
        ],
    );
    bench_spec(dir.path(), 0, r#"["rmop"]"#);
    let out = rmop(&["bench", "--spec", "exp/spec.json", "--out", "out.csv"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(
        fs::read_to_string(dir.path().join("out.csv")).unwrap().lines().count(),
        1
    );
}

#[test]
fn bench_rejects_unknown_planner() {
    let dir = TempDir::new().unwrap();
    bench_spec(dir.path(), 1, r#"["rmop", "magic"]"#);
    let out = rmop(&["bench", "--spec", "exp/spec.json", "--out", "out.csv"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("magic"), "{}", stderr(&out));
}

#[test]
fn verify_accepts_clean_inputs() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "s.json", &CROSSOVER);
    assert_eq!(
        code(&rmop(&["solve", "--scenario", "s.json", "--out", "r.json"], dir.path())),
        0
    );
    let out = rmop(
        &["verify", "--scenario", "s.json", "--solution", "r.json", "--json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["clean"], true);
}

#[test]
fn verify_lists_triangle_violations() {
    let dir = TempDir::new().unwrap();
    let scenario = r#"{
        "vertices": [
            {"id": 0, "x": 0, "y": 0, "reward": 1},
            {"id": 1, "x": 0, "y": 0, "reward": 2},
            {"id": 2, "x": 0, "y": 0, "reward": 3}
        ],
        "distance_matrix": [[0, 1, 10], [1, 0, 1], [10, 1, 0]],
        "starts": [0, 1],
        "budget": 5,
        "alpha": 1
    }"#;
    fs::write(dir.path().join("bad.json"), scenario).unwrap();
    let out = rmop(&["verify", "--scenario", "bad.json"], dir.path());
    assert_eq!(code(&out), 1);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("triangle violation (0,1,2)"), "{text}");
    let out = rmop(&["verify", "--scenario", "bad.json", "--json"], dir.path());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!report["scenario"]["metric"]["triangle"].as_array().unwrap().is_empty());
}

#[test]
fn verify_names_tampered_paths() {
    let dir = TempDir::new().unwrap();
    gen(dir.path(), "s.json", &CROSSOVER);
    assert_eq!(
        code(&rmop(&["solve", "--scenario", "s.json", "--out", "r.json"], dir.path())),
        0
    );
    let mut doc = json(dir.path().join("r.json"));
    let first = doc["paths"][0]["vertices"][0].clone();
    doc["paths"][0]["vertices"].as_array_mut().unwrap().push(first);
    fs::write(dir.path().join("t.json"), serde_json::to_vec_pretty(&doc).unwrap()).unwrap();
    let out = rmop(&["verify", "--scenario", "s.json", "--solution", "t.json"], dir.path());
    assert_eq!(code(&out), 1);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("repeated"), "{text}");
}

#[test]
fn every_written_file_reads_back() {
    let dir = TempDir::new().unwrap();
    for seed in 0..8u64 {
        let seed_text = seed.to_string();
        let vertices = (10 + 7 * seed).to_string();
        let layout = if seed % 2 == 0 { "grid" } else { "uniform-random" };
        let kind = if seed % 3 == 0 { "coverage" } else { "modular" };
        gen(
            dir.path(),
            "s.json",
            &[
                "--vertices",
                &vertices,
                "--robots",
                "4",
                "--alpha",
                "2",
                "--budget",
                "35",
                "--seed",
                &seed_text,
                "--layout",
                layout,
                "--reward-kind",
                kind,
            ],
        );
        let bytes = fs::read(dir.path().join("s.json")).unwrap();
        let scenario = rmop::load_scenario(&bytes).unwrap();
        assert_eq!(format!("{}\n", scenario.to_json()), String::from_utf8(bytes).unwrap());

        for planner in ["rmop", "sga", "ng"] {
            let out = rmop(
                &["solve", "--scenario", "s.json", "--planner", planner, "--out", "r.json"],
                dir.path(),
            );
            assert_eq!(code(&out), 0, "{}", stderr(&out));
            let doc = json(dir.path().join("r.json"));
            let solver = rmop::OpSolverConfig::gcb();
            let expected = match planner {
                "rmop" => rmop::solve_rmop(&scenario, &solver).unwrap(),
                "sga" => rmop::solve_sga(&scenario, &solver).unwrap(),
                _ => {
                    let model = rmop::RewardModel::for_scenario(&scenario);
                    let paths = rmop::bench::naive_greedy_baseline(&scenario);
                    rmop::Solution::baseline(rmop::PlannerKind::Ng, &model, paths).unwrap()
                }
            };
            assert_eq!(doc["team_reward"].as_f64().unwrap(), expected.team_reward);
            for (p, e) in doc["paths"].as_array().unwrap().iter().zip(&expected.paths) {
                assert_eq!(p["cost"].as_f64().unwrap(), e.cost);
                let vertices: Vec<usize> = p["vertices"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|v| v.as_u64().unwrap() as usize)
                    .collect();
                assert_eq!(vertices, e.vertices);
            }
            let verify = rmop(&["verify", "--scenario", "s.json", "--solution", "r.json"], dir.path());
            assert_eq!(code(&verify), 0, "{}", String::from_utf8_lossy(&verify.stdout));
            let attack = rmop(
                &[
                    "attack",
                    "--scenario",
                    "s.json",
                    "--size",
                    "2",
                    "r.json",
                    "--out",
                    "a.json",
                ],
                dir.path(),
            );
            assert_eq!(code(&attack), 0, "{}", stderr(&attack));
            let report = json(dir.path().join("a.json"));
            assert_eq!(report["model"], "worst-exhaustive");
        }
    }
}
