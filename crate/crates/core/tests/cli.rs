use std::process::Command;

const ORBIT: &str = r#"{"kind":"Two","gamma1":{"cross":["4","5"],"to_basepoint":true},"gamma2":{"cross":["1","3","4","5"],"to_basepoint":true}}"#;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_snakefold")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write_files() -> (tempdir::Dir, String, String) {
    let dir = tempdir::Dir::new("snakefold-cli");
    let tri = dir.path("run.json");
    let orbit = dir.path("orbit.json");
    let spec = serde_json::to_string(&snakefold::fixtures::running().to_spec()).unwrap();
    std::fs::write(&tri, spec).unwrap();
    std::fs::write(&orbit, ORBIT).unwrap();
    (dir, tri, orbit)
}

mod tempdir {
    use std::path::PathBuf;

    pub struct Dir(PathBuf);

    impl Dir {
        pub fn new(tag: &str) -> Dir {
            let p = std::env::temp_dir().join(format!("{}-{}-{:?}", tag, std::process::id(), std::thread::current().id()));
            std::fs::create_dir_all(&p).unwrap();
            Dir(p)
        }

        pub fn path(&self, name: &str) -> String {
            self.0.join(name).to_string_lossy().into_owned()
        }
    }

    impl Drop for Dir {
        fn drop(&mut self) {
            let _ = std::fs::remove_dir_all(&self.0);
        }
    }
}

#[test]
fn orbit_from_files() {
    let (_d, tri, orbit) = write_files();
    let (code, out, err) = run(&["orbit", "--triangulation", &tri, "--orbit", &orbit]);
    assert_eq!(code, 0, "{}", err);
    let f = out.lines().find(|l| l.starts_with("F = ")).unwrap();
    assert_eq!(f.matches(" + ").count() + 1, 16);
    assert!(out.contains("g = (-1,1,2,-2,2)"));
    assert!(out.contains("crosscheck: OK"));
}

#[test]
fn orbit_json_is_deterministic() {
    let (_d, tri, orbit) = write_files();
    let a = run(&["orbit", "--triangulation", &tri, "--orbit", &orbit, "--json"]);
    let b = run(&["orbit", "--triangulation", &tri, "--orbit", &orbit, "--json"]);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a.1).unwrap();
    assert_eq!(v["matchings"], 23);
    assert_eq!(v["f"]["terms"], 16);
}

#[test]
fn mutate_involution_echoes_initial_seed() {
    let (code, out, _) = run(&["mutate", "--matrix", "[[0,1,0],[-1,0,2],[0,-1,0]]", "--sequence", "2,2"]);
    assert_eq!(code, 0);
    for i in 1..=3 {
        assert!(out.contains(&format!("x{i}' = x{i}\n")), "{}", out);
    }
}

#[test]
fn enumerate_type_b2() {
    let (code, out, _) = run(&["enumerate", "--matrix", "[[0,1],[-2,0]]", "--depth", "10"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("variables: 6\n"), "{}", out);
}

#[test]
fn verify_b2() {
    let (code, out, _) = run(&["verify", "--case", "b2"]);
    assert_eq!(code, 0);
    assert!(out.contains("6 variables") && out.contains("agree"), "{}", out);
}

#[test]
fn validation_errors_exit_2() {
    let (code, _, err) = run(&["orbit", "--triangulation", "running", "--orbit", r#"{"kind":"Two","gamma1":{"cross":["4","5"],"to_basepoint":true}}"#]);
    assert_eq!(code, 2);
    let rec: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(rec["error"], "ValidationError");
    let (code, _, err) = run(&["snake", "--triangulation", "/nonexistent/t.json", "--arc", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("ParseError"));
    assert_eq!(run(&["render", "--triangulation", "running", "--format", "png"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
}

#[test]
fn render_formats() {
    let (_d, tri, orbit) = write_files();
    let (code, svg, _) = run(&["render", "--triangulation", &tri, "--orbit", &orbit, "--format", "svg"]);
    assert_eq!(code, 0);
    assert!(svg.starts_with("<svg") && svg.contains("stroke-dasharray"));
    let (code, tikz, _) = run(&["render", "--triangulation", &tri, "--arc", "4", "--format", "tikz"]);
    assert_eq!(code, 0);
    assert_eq!(tikz.matches("\\draw").count(), 4);
}

#[test]
fn module_and_quiver() {
    let (code, out, _) = run(&["module", "--triangulation", "running", "--arc", "1,3,4,5", "--to-basepoint"]);
    assert_eq!(code, 0);
    assert!(out.contains("g = (-1,1,1,-1,0)"), "{}", out);
    let (code, out, _) = run(&["quiver", "--triangulation", "running", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 9);
    assert!(v["involution"].is_object());
}
