use std::path::Path;
use std::process::{Command, Output};

fn pinn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pinn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tiny_config(dir: &Path) -> String {
    let path = dir.join("run.toml");
    std::fs::write(
        &path,
        "[network]\nhidden_layers = 2\nwidth = 6\n\
         [sampling]\nn0 = 10\nnb = 10\nnc = 40\n\
         [training]\niterations = 20\nlog_every = 0\n\
         [evaluation]\nh = 0.1\ndt = 0.1\ntiming_counts = [50, 100]\ntiming_repeats = 1\n",
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn check_passes() {
    let out = pinn(&["check"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 5);
}

#[test]
fn train_then_inspect() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let out_dir = dir.path().join("run");
    let out_dir = out_dir.to_str().unwrap();
    let common = ["--config", &cfg, "--problem", "nws", "--seed", "4", "--out", out_dir];

    let out = pinn(&[&["train"], &common[..]].concat());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["model.ckpt", "history.csv", "manifest.json"] {
        assert!(Path::new(out_dir).join(name).exists(), "{name}");
    }

    let out = pinn(&[&["evaluate"], &common[..]].concat());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("max_abs_error"));

    // an untrained-quality network cannot meet a tiny threshold
    let out = pinn(&[&["evaluate", "--max-error", "1e-12"], &common[..]].concat());
    assert_eq!(out.status.code(), Some(3));

    let out = pinn(&[&["tables"], &common[..]].concat());
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ECBS"));

    let out = pinn(&[&["benchmark"], &common[..]].concat());
    assert_eq!(out.status.code(), Some(0));
    assert!(Path::new(out_dir).join("timing.csv").exists());

    // the nws checkpoint does not fit the allen-cahn architecture
    let ckpt = Path::new(out_dir).join("model.ckpt");
    let out = pinn(&[
        "tables",
        "--problem",
        "allen-cahn",
        "--checkpoint",
        ckpt.to_str().unwrap(),
        "--out",
        out_dir,
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("expected layer sizes"));
}

#[test]
fn same_seed_gives_identical_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let mut bytes = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let out = pinn(&["train", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        bytes.push(std::fs::read(out_dir.join("model.ckpt")).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn validation_errors_exit_with_one() {
    let out = pinn(&["train", "--problem", "heat"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("problem.name"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[training]\nschedule = [[0, 1e-2], [50, 1e-3], [20, 1e-4]]\n").unwrap();
    let out = pinn(&["train", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("training.schedule"));

    let out = pinn(&["train", "--profile", "fast"]);
    assert_eq!(out.status.code(), Some(1));

    let out = pinn(&["evaluate", "--checkpoint", "/nonexistent/model.ckpt"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn diverging_training_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("diverge.toml");
    std::fs::write(
        &path,
        "[network]\nhidden_layers = 1\nwidth = 4\nactivation = \"relu\"\n\
         [sampling]\nn0 = 4\nnb = 4\nnc = 4\n\
         [training]\niterations = 200\noptimizer = \"sgd\"\nschedule = [[0, 1e200]]\nlog_every = 0\n",
    )
    .unwrap();
    let out = pinn(&["train", "--config", path.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}
