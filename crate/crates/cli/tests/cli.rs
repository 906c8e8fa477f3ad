use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use programport::world::Scene;

const GOLDEN: &str = "do(goal(filter(filter(hexagon), blue), filter(filter(box), orange), in), pack)";

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/tabletop.json")
}

fn cli(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_programport"))
        .arg("--output-dir")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn parse_golden_and_empty() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(dir.path(), &["parse", "pack the blue hexagon in the orange box"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some(GOLDEN));
    assert_eq!(cli(dir.path(), &["parse", ""]).status.code(), Some(2));
    assert_eq!(cli(dir.path(), &["parse", "box the"]).status.code(), Some(2));
    // Parsing writes nothing.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn parse_reports_oov_guesses() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(dir.path(), &["parse", "pack the daxy shape into the box", "--top-k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "do(goal(filter(filter(shape), daxy), filter(box), into), pack)");
    assert_eq!(lines[2], "# oov daxy N/N \\x.filter(x, daxy)");
    assert_eq!(lines.iter().filter(|l| !l.starts_with('#')).count(), 2);
}

#[test]
fn run_moves_hexagon_into_box() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture();
    let o = cli(dir.path(), &["run", f.to_str().unwrap(), "pack the blue hexagon in the orange box"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let action: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(action["program"], GOLDEN);
    for name in ["action.json", "pick.pgm", "place_r00.pgm", "map_0.1.pgm", "before.ppm", "after.ppm", "scene_after.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let after = Scene::load(&dir.path().join("scene_after.json")).unwrap();
    let hexagon = after.object(2).unwrap();
    let boxed = after.object(1).unwrap();
    assert!(boxed.interior_contains(hexagon.x, hexagon.y));
    assert_ne!(
        std::fs::read(dir.path().join("before.ppm")).unwrap(),
        std::fs::read(dir.path().join("after.ppm")).unwrap()
    );

    let emb = tempfile::tempdir().unwrap();
    let o2 = cli(
        emb.path(),
        &["run", f.to_str().unwrap(), "pack the blue hexagon in the orange box", "--backend", "embedding", "--weights", "identity"],
    );
    assert_eq!(o2.status.code(), Some(0));
    let action2: serde_json::Value = serde_json::from_str(&stdout(&o2)).unwrap();
    assert_eq!(action["steps"], action2["steps"]);
}

#[test]
fn run_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture();
    let f = f.to_str().unwrap();
    assert_eq!(cli(dir.path(), &["run", "/nonexistent/scene.json", "pack the star into the box"]).status.code(), Some(1));
    assert_eq!(cli(dir.path(), &["run", f, "box box box"]).status.code(), Some(2));
    // No purple object: the grounding is empty.
    assert_eq!(cli(dir.path(), &["run", f, "pack the purple star into the box"]).status.code(), Some(3));
    assert_eq!(cli(dir.path(), &["run", f, "pack the star into the box", "--weights", "/nonexistent"]).status.code(), Some(1));
}

#[test]
fn eval_validates_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cli(dir.path(), &["eval", "--episodes", "0"]).status.code(), Some(1));
    let cfg = dir.path().join("suite.json");
    std::fs::write(&cfg, r#"{"tasks": ["packing_shapes", "separating_piles"], "episodes": 3, "seed": 9}"#).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = cli(d, &["eval", "--config", cfg.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains("packing_shapes"));
    }
    assert_eq!(std::fs::read(a.join("report.json")).unwrap(), std::fs::read(b.join("report.json")).unwrap());
    std::fs::write(&cfg, r#"{"episodes": 3, "bogus": 1}"#).unwrap();
    assert_eq!(cli(dir.path(), &["eval", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn generate_writes_episode() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(dir.path(), &["--seed", "7", "generate", "--task", "packing_shapes"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("pack the "));
    assert!(dir.path().join("packing_shapes_7.json").exists());
    let scene = Scene::load(&dir.path().join("packing_shapes_7_scene.json")).unwrap();
    assert_eq!(scene.objects.len(), 6);
}

#[test]
fn repl_session() {
    use std::io::Write;
    use std::process::Stdio;
    let dir = tempfile::tempdir().unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_programport"))
        .arg("--output-dir")
        .arg(dir.path())
        .arg("repl")
        .arg(fixture())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b":render\npack the star into the box\n:render\n:foo\n:undo\n:objects\n:quit\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("error: unknown command :foo"));
    assert!(text.contains("program: do(goal(filter(star), filter(box), into), pack)"));
    let first = std::fs::read(dir.path().join("render_001.ppm")).unwrap();
    let second = std::fs::read(dir.path().join("render_002.ppm")).unwrap();
    assert_ne!(first, second);
    // After :undo the object table matches the initial one.
    let tables: Vec<&str> = text.split(" id kind").collect();
    let initial = Scene::load(&fixture()).unwrap();
    let star = initial.object(3).unwrap();
    let row = format!("{:>7.2} {:>7.2}", star.x, star.y);
    assert!(tables.last().unwrap().contains(&row));
    assert!(!tables[1].contains(&row));
    let log = std::fs::read_to_string(dir.path().join("transcript.log")).unwrap();
    assert!(log.contains("> :foo") && log.contains("undone"));
}
