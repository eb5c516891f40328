//! End-to-end tests of the khc binary against the stock data.

use std::path::PathBuf;
use std::process::{Command, Output};

fn khc(args: &[&str]) -> Output {
    let bin = env!("CARGO_BIN_EXE_khc");
    let root = PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../.."));
    Command::new(bin).current_dir(root).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).to_string()
}

#[test]
fn homology_table_trefoil() {
    let out = khc(&["homology", "--theory", "kh-z", "data/pd/trefoil-right.pd"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("h=  3 q=  7: t2"), "torsion row missing:\n{text}");
    assert!(text.contains("h=  0 q=  1: free"));
}

#[test]
fn reports_are_deterministic() {
    let a = khc(&["homology", "--theory", "bn-f2h", "--format", "json", "data/pd/figure8.pd"]);
    let b = khc(&["homology", "--theory", "bn-f2h", "--format", "json", "data/pd/figure8.pd"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b), "byte-identical reports");
    assert!(stdout(&a).contains("\"input_hash\""));
}

#[test]
fn map_946_disk_values() {
    let d = khc(&["map", "--theory", "kh-f2", "data/movies/946-mD.movie", "--class", "data/classes/phi-m946.json"]);
    assert!(d.status.success());
    assert!(stdout(&d).contains("scalar: 1"), "{}", stdout(&d));
    let dp = khc(&["map", "--theory", "kh-f2", "data/movies/946-mDprime.movie", "--class", "data/classes/phi-m946.json"]);
    assert!(stdout(&dp).contains("scalar: 0"), "{}", stdout(&dp));
    let th = khc(&["map", "--theory", "bn-f2h", "data/movies/946-mD.movie", "--class", "data/classes/theta-m946.json"]);
    assert!(stdout(&th).contains("scalar: 1"), "{}", stdout(&th));
}

#[test]
fn closed_surface_values() {
    let t = khc(&["closed", "--theory", "kh-z", "data/movies/torus.movie"]);
    assert!(stdout(&t).contains("value: 2"), "{}", stdout(&t));
    let s = khc(&["closed", "--theory", "kh-z", "data/movies/sphere.movie"]);
    assert!(stdout(&s).contains("value: 0"));
    let g2 = khc(&["closed", "--theory", "kh-z", "data/movies/genus2.movie"]);
    assert!(stdout(&g2).contains("value: 0"));
    let tb = khc(&["closed", "--theory", "bn-f2h", "data/movies/torus.movie"]);
    assert!(stdout(&tb).contains("value: 0"));
}

#[test]
fn diff_of_the_946_disks() {
    let out = khc(&["diff", "--theory", "kh-f2", "data/movies/946-D.movie", "data/movies/946-Dprime.movie"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("delta_is_zero_class: false"), "{}", stdout(&out));
    let bn = khc(&["diff", "--theory", "bn-f2h", "data/movies/946-D.movie", "data/movies/946-Dprime.movie"]);
    assert!(stdout(&bn).contains("delta_is_zero_class: false"), "{}", stdout(&bn));
}

#[test]
fn verify_formal_passes() {
    let out = khc(&["verify-formal"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("certificate: pass"));
}

#[test]
fn psi_s_profile_and_ribbon() {
    let out = khc(&["psi", "--theory", "kh-f2", "data/pd/10_148.braid"]);
    assert!(stdout(&out).contains("bigrading: (0, 1)"), "{}", stdout(&out));
    assert!(stdout(&out).contains("cycle: true"));
    let out = khc(&["s", "data/pd/trefoil-right.pd"]);
    assert!(stdout(&out).contains("s: 2"));
    let out = khc(&["profile", "--format", "json", "data/pd/unknot.pd"]);
    assert!(stdout(&out).contains("\"stable_rank\":\"2\""), "{}", stdout(&out));
    let out = khc(&["ribbon-check", "data/movies/tref-ribbon.movie"]);
    assert!(stdout(&out).contains("injective: true"), "{}", stdout(&out));
}

#[test]
fn exit_codes() {
    // bad input: 2
    let out = khc(&["homology", "no-such-file.pd"]);
    assert_eq!(out.status.code(), Some(2));
    let out = khc(&["nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    // refusal (budget): 1
    let out = khc(&["homology", "--budget", "4", "data/pd/9_46.pd"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    // strict mode rejects r3 with exit 2
    let d = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/pd/trefoil-right.pd")).unwrap();
    let tmp = std::env::temp_dir().join("khc-r3-test.movie");
    std::fs::write(&tmp, format!("frame\n{d}r3 1 2 3\nframe\n{d}")).unwrap();
    let out = khc(&["map", tmp.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_report() {
    let tmp = std::env::temp_dir().join("khc-out-test.json");
    let _ = std::fs::remove_file(&tmp);
    let out = khc(&["jones", "data/pd/hopf-plus.pd", "--format", "json", "--out", tmp.to_str().unwrap()]);
    assert!(out.status.success());
    let written = std::fs::read_to_string(&tmp).unwrap();
    assert!(written.contains("\"jones\""));
}
