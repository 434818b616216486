use std::path::Path;

use reachop::cli::{run, Report};
use reachop::data::{read_dataset, write_dataset, Sample};
use reachop::grid::{Domain, ValueGrid};

fn s(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

fn reachop(args: &[&str]) -> i32 {
    run(std::iter::once("reachop").chain(args.iter().copied()))
}

fn gen_small(dir: &Path, experiment: &str, n_train: &str) {
    let out = s(dir);
    assert_eq!(
        reachop(&[
            "--seed",
            "3",
            "gen",
            "--experiment",
            experiment,
            "--n-train",
            n_train,
            "--n-test",
            "1",
            "--resolution",
            "16",
            "--out-dir",
            &out,
        ]),
        0
    );
}

fn train_tiny(dir: &Path, epochs: &str) -> (String, String) {
    let model = s(&dir.join("m.hjrm"));
    let log = s(&dir.join("log.csv"));
    let data = s(&dir.join("train.hjrd"));
    let code = reachop(&[
        "--seed",
        "1",
        "train",
        "--data",
        &data,
        "--width",
        "6",
        "--modes",
        "3",
        "--blocks",
        "1",
        "--epochs",
        epochs,
        "--batch-size",
        "2",
        "--out",
        &model,
        "--log",
        &log,
    ]);
    assert_eq!(code, 0);
    (model, log)
}

#[test]
fn solve_translation_smoke_converges_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, m) = (dir.path().join("a.hjrd"), dir.path().join("b.hjrd"), dir.path().join("m.toml"));
    let args = |out: &Path| {
        vec![
            "solve".to_string(),
            "--system".into(),
            "translation".into(),
            "--resolution".into(),
            "24".into(),
            "--out".into(),
            s(out),
        ]
    };
    let mut first = args(&a);
    first.extend(["--metrics".to_string(), s(&m)]);
    assert_eq!(reachop(&first.iter().map(String::as_str).collect::<Vec<_>>()), 0);
    assert_eq!(reachop(&args(&b).iter().map(String::as_str).collect::<Vec<_>>()), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let metrics: toml::Table = toml::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(metrics["converged"].as_bool(), Some(true));
    let sol = read_dataset(&a).unwrap();
    assert_eq!(sol.len(), 1);
    assert_eq!(sol[0].dims, vec![24, 24]);
    assert!(sol[0].target.iter().zip(sol[0].value_channel()).all(|(v, l)| v <= l));
}

#[test]
fn zero_horizon_warns_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let (out, m) = (s(&dir.path().join("z.hjrd")), dir.path().join("m.toml"));
    let code = reachop(&["solve", "--system", "translation", "--max-horizon", "0", "--out", &out, "--metrics", &s(&m)]);
    assert_eq!(code, 0);
    let metrics: toml::Table = toml::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    assert_eq!(metrics["converged"].as_bool(), Some(false));
    let sol = &read_dataset(Path::new(&out)).unwrap()[0];
    assert_eq!(sol.target, sol.value_channel());
}

#[test]
fn exit_codes() {
    assert_eq!(reachop(&["frobnicate"]), 1);
    assert_eq!(reachop(&["solve"]), 1);
    assert_eq!(reachop(&["solve", "--system", "boat", "--out", "x"]), 1);
    assert_eq!(reachop(&["solve", "--cfl", "3", "--out", "/nonexistent/x.hjrd"]), 1);
    assert_eq!(reachop(&["--help"]), 0);
    let dir = tempfile::tempdir().unwrap();
    let missing = s(&dir.path().join("missing.hjrd"));
    assert_eq!(reachop(&["eval", "--model", &missing, "--data", &missing, "--out", &missing]), 2);
    let garbage = dir.path().join("garbage.hjrd");
    std::fs::write(&garbage, b"HJRD\x01\0\0\0").unwrap();
    assert_eq!(reachop(&["render", "--data", &s(&garbage), "--out-prefix", &s(&dir.path().join("g"))]), 2);
}

#[test]
fn non_finite_training_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let d = Domain::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
    let l = ValueGrid::from_fn(d, vec![8, 8], |x| x[0] - 0.5).unwrap();
    let mut sample = Sample::from_grids(1, 0, &l, &l, &[0.0, 0.0]).unwrap();
    sample.input[0] = f32::NAN;
    let data = dir.path().join("train.hjrd");
    write_dataset(&data, &[sample]).unwrap();
    let out = s(&dir.path().join("m.hjrm"));
    assert_eq!(
        reachop(&["train", "--data", &s(&data), "--width", "4", "--modes", "2", "--blocks", "1", "--out", &out]),
        3
    );
}

#[test]
fn eval_on_training_set_matches_final_log_entry() {
    let dir = tempfile::tempdir().unwrap();
    gen_small(dir.path(), "single_obstacle", "3");
    let (model, log) = train_tiny(dir.path(), "3");
    let text = std::fs::read_to_string(&log).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("epoch,train_mse,train_rel_l2,test_rel_l2,seconds"));
    let last: Vec<&str> = lines.last().unwrap().split(',').collect();
    assert_eq!(last[0], "3");
    let logged: f64 = last[2].parse().unwrap();

    let report_path = dir.path().join("report.toml");
    let data = s(&dir.path().join("train.hjrd"));
    assert_eq!(reachop(&["eval", "--model", &model, "--data", &data, "--out", &s(&report_path)]), 0);
    let text = std::fs::read_to_string(&report_path).unwrap();
    let report = Report::from_toml(&text).unwrap();
    assert!((report.mean_rel_l2 - logged).abs() < 1e-6, "{} vs {logged}", report.mean_rel_l2);
    assert_eq!(report.to_toml(), text);
    assert_eq!(report.samples, 3);
    assert_eq!(report.per_sample_rel_l2.len(), 3);
    assert!((0.0..=1.0).contains(&report.sign_mismatch_rate) && (0.0..=1.0).contains(&report.false_safe_rate));
    assert!(report.mean_solve_seconds.is_none());

    // channel-count mismatch: air3d samples carry one hyperparameter, not two
    let air = dir.path().join("air");
    gen_small(&air, "air3d", "1");
    let air_data = s(&air.join("test.hjrd"));
    assert_eq!(reachop(&["eval", "--model", &model, "--data", &air_data, "--out", &s(&report_path)]), 2);

    // super-resolution re-solves each test sample on a finer grid
    let test = s(&dir.path().join("test.hjrd"));
    let sr = dir.path().join("sr.toml");
    assert_eq!(reachop(&["eval", "--model", &model, "--data", &test, "--out", &s(&sr), "--resolution-scale", "2"]), 0);
    let sr = Report::from_toml(&std::fs::read_to_string(&sr).unwrap()).unwrap();
    assert_eq!(sr.resolution, vec![32, 32]);
    assert!(sr.mean_solve_seconds.unwrap() > 0.0);
}

#[test]
fn infer_writes_predictions_and_render_writes_both() {
    let dir = tempfile::tempdir().unwrap();
    gen_small(dir.path(), "velocity", "2");
    let (model, _) = train_tiny(dir.path(), "1");
    let data = s(&dir.path().join("test.hjrd"));
    let pred = s(&dir.path().join("pred.hjrd"));
    let timing = dir.path().join("timing.csv");
    assert_eq!(reachop(&["infer", "--model", &model, "--data", &data, "--out", &pred, "--timing", &s(&timing)]), 0);
    let p = read_dataset(Path::new(&pred)).unwrap();
    let t = read_dataset(Path::new(&data)).unwrap();
    assert_eq!(p.len(), t.len());
    assert_eq!(p[0].experiment, 7);
    assert_eq!(p[0].input, t[0].input);
    assert!(std::fs::read_to_string(&timing).unwrap().starts_with("sample,seconds\n0,"));

    let prefix = dir.path().join("fig");
    assert_eq!(reachop(&["render", "--data", &data, "--pred", &pred, "--scale", "2", "--out-prefix", &s(&prefix)]), 0);
    for name in ["fig_truth.pgm", "fig_truth_contour.ppm", "fig_pred.pgm", "fig_pred_contour.ppm"] {
        let bytes = std::fs::read(dir.path().join(name)).unwrap();
        assert!(bytes.starts_with(if name.ends_with("pgm") { b"P5\n32 32\n255\n" } else { b"P6\n32 32\n255\n" }));
    }
}

#[test]
fn render_needs_a_two_dimensional_selection() {
    let dir = tempfile::tempdir().unwrap();
    let sol = s(&dir.path().join("sol.hjrd"));
    assert_eq!(
        reachop(&[
            "solve",
            "--system",
            "dubins",
            "--resolution",
            "8",
            "--speed-samples",
            "3",
            "--heading-samples",
            "4",
            "--max-horizon",
            "0.5",
            "--out",
            &sol
        ]),
        0
    );
    let prefix = s(&dir.path().join("slice"));
    assert_eq!(reachop(&["render", "--data", &sol, "--out-prefix", &prefix]), 1);
    assert_eq!(reachop(&["render", "--data", &sol, "--fix", "2=1", "--out-prefix", &prefix]), 1);
    assert_eq!(reachop(&["render", "--data", &sol, "--fix", "2=1", "--fix", "3=0", "--out-prefix", &prefix]), 0);
    assert!(dir.path().join("slice.pgm").exists() && dir.path().join("slice_contour.ppm").exists());
    assert_eq!(reachop(&["render", "--data", &sol, "--fix", "2=9", "--fix", "3=0", "--out-prefix", &prefix]), 1);
}

#[test]
fn constant_field_renders_uniform() {
    let dir = tempfile::tempdir().unwrap();
    let d = Domain::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
    let c = ValueGrid::from_fn(d, vec![6, 5], |_| 2.5).unwrap();
    let data = dir.path().join("c.hjrd");
    write_dataset(&data, &[Sample::from_grids(6, 0, &c, &c, &[]).unwrap()]).unwrap();
    let prefix = dir.path().join("c");
    assert_eq!(reachop(&["render", "--data", &s(&data), "--scale", "1", "--out-prefix", &s(&prefix)]), 0);
    let bytes = std::fs::read(dir.path().join("c.pgm")).unwrap();
    let header = b"P5\n6 5\n255\n";
    assert!(bytes.starts_with(header));
    let pixels = &bytes[header.len()..];
    assert_eq!(pixels.len(), 30);
    assert!(pixels.iter().all(|&p| p == pixels[0]));
}
