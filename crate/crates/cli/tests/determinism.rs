//! Acceptance criterion: every subcommand re-run with identical flags and
//! seed produces byte-identical output files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_zeroone")
}

fn work_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("zeroone-determinism-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

/// Runs the binary, asserting success; returns stdout bytes.
fn run(args: &[&str]) -> Vec<u8> {
    let out = Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "command {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries = Vec::new();
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(String, Vec<u8>)>) {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        paths.sort();
        for p in paths {
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    walk(dir, dir, &mut entries);
    entries
}

#[test]
fn acceptance_8_cli_determinism() {
    let dir = work_dir();
    let path = |name: &str| dir.join(name).to_string_lossy().into_owned();

    // fixtures the commands read
    use zeroone::graph::Graph;
    use zeroone::graph6;
    let k3 = path("k3.g6");
    fs::write(&k3, format!("{}\n", graph6::encode(&Graph::complete(3)))).unwrap();
    let p3 = path("p3.g6");
    fs::write(&p3, format!("{}\n", graph6::encode(&Graph::path(3)))).unwrap();
    let pair = path("pair.txt");
    fs::write(
        &pair,
        format!("{}\n", graph6::encode_pair(&Graph::complete(3), &[0, 1])),
    )
    .unwrap();
    // pendant edge pair: K2 over a single root
    let safe_pair = path("safe_pair.txt");
    fs::write(
        &safe_pair,
        format!("{}\n", graph6::encode_pair(&Graph::complete(2), &[0])),
    )
    .unwrap();
    let formulas = path("formulas.txt");
    fs::write(&formulas, "Ex.Ey.(x~y)\nAx.Ey.(x~y) # degree\n").unwrap();
    let grid = path("grid.txt");
    fs::write(&grid, "1/1 60\n1/1 80\n").unwrap();
    let gparams = path("gset.cfg");
    fs::write(&gparams, "v0_bound=3\next_bound=2\nlayers=1\n").unwrap();

    // each entry: (name, args, output files to compare)
    let sample_out = path("sample.g6");
    let probe_out = path("probe.csv");
    let ehr_probe_out = path("ehr.csv");
    let maxext_out = path("maxext.csv");
    let profile_out = path("profile.txt");
    let witness_out = path("witness.txt");
    let reg_dir = path("registry");

    let commands: Vec<(&str, Vec<String>, Vec<String>)> = vec![
        (
            "sample",
            vec![
                "sample".into(),
                "--n".into(),
                "200".into(),
                "--alpha".into(),
                "3/5".into(),
                "--seed".into(),
                "42".into(),
                "--out".into(),
                sample_out.clone(),
            ],
            vec![sample_out.clone()],
        ),
        (
            "classify-pair",
            vec![
                "classify-pair".into(),
                "--pair".into(),
                pair.clone(),
                "--alpha".into(),
                "3/5".into(),
            ],
            vec![],
        ),
        (
            "rhomax",
            vec!["rhomax".into(), "--graph".into(), k3.clone()],
            vec![],
        ),
        (
            "eval-fo",
            vec![
                "eval-fo".into(),
                "--graph".into(),
                k3.clone(),
                "--formulas".into(),
                formulas.clone(),
            ],
            vec![],
        ),
        (
            "ehr",
            vec![
                "ehr".into(),
                "--x".into(),
                k3.clone(),
                "--y".into(),
                p3.clone(),
                "--k".into(),
                "2".into(),
                "--trace".into(),
            ],
            vec![],
        ),
        (
            "synthesize",
            vec![
                "synthesize".into(),
                "--x".into(),
                k3.clone(),
                "--y".into(),
                p3.clone(),
                "--k".into(),
                "2".into(),
            ],
            vec![],
        ),
        (
            "gset-enum",
            vec![
                "gset-enum".into(),
                "--gset-params".into(),
                gparams.clone(),
                "--out-dir".into(),
                reg_dir.clone(),
            ],
            vec![reg_dir.clone()],
        ),
        (
            "profile",
            vec![
                "profile".into(),
                "--graph".into(),
                k3.clone(),
                "--vertex".into(),
                "0".into(),
                "--registry".into(),
                reg_dir.clone(),
                "--out".into(),
                profile_out.clone(),
            ],
            vec![profile_out.clone()],
        ),
        (
            "witness",
            vec![
                "witness".into(),
                "--graph".into(),
                k3.clone(),
                "--vertex".into(),
                "0".into(),
                "--registry".into(),
                reg_dir.clone(),
                "--out".into(),
                witness_out.clone(),
            ],
            vec![witness_out.clone()],
        ),
        (
            "probe-k3",
            vec![
                "probe".into(),
                "--detector".into(),
                "triangle".into(),
                "--grid".into(),
                grid.clone(),
                "--samples".into(),
                "50".into(),
                "--seed".into(),
                "7".into(),
                "--out".into(),
                probe_out.clone(),
            ],
            vec![probe_out.clone()],
        ),
        (
            "probe-ehr",
            vec![
                "probe".into(),
                "--detector".into(),
                "ehr".into(),
                "--alpha".into(),
                "2/1".into(),
                "--n".into(),
                "12".into(),
                "--m".into(),
                "12".into(),
                "--k".into(),
                "2".into(),
                "--samples".into(),
                "30".into(),
                "--seed".into(),
                "9".into(),
                "--out".into(),
                ehr_probe_out.clone(),
            ],
            vec![ehr_probe_out.clone()],
        ),
        (
            "probe-max-ext",
            vec![
                "probe".into(),
                "--detector".into(),
                "max-ext".into(),
                "--pair".into(),
                safe_pair.clone(),
                "--template".into(),
                "tick".into(),
                "--alpha".into(),
                "61/100".into(),
                "--n".into(),
                "40".into(),
                "--samples".into(),
                "40".into(),
                "--seed".into(),
                "11".into(),
                "--out".into(),
                maxext_out.clone(),
            ],
            vec![maxext_out.clone()],
        ),
    ];

    for (name, args, outputs) in &commands {
        let argv: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        let stdout1 = run(&argv);
        let files1: Vec<_> = outputs
            .iter()
            .map(|o| {
                let p = Path::new(o);
                if p.is_dir() {
                    (o.clone(), format!("{:?}", read_tree(p)).into_bytes())
                } else {
                    (o.clone(), fs::read(p).unwrap())
                }
            })
            .collect();
        let stdout2 = run(&argv);
        let files2: Vec<_> = outputs
            .iter()
            .map(|o| {
                let p = Path::new(o);
                if p.is_dir() {
                    (o.clone(), format!("{:?}", read_tree(p)).into_bytes())
                } else {
                    (o.clone(), fs::read(p).unwrap())
                }
            })
            .collect();
        assert_eq!(stdout1, stdout2, "{name}: stdout differs between runs");
        assert_eq!(files1, files2, "{name}: output files differ between runs");
    }
    fs::remove_dir_all(&dir).ok();
    println!(
        "ACCEPTANCE 8 (CLI determinism, {} subcommands): PASS",
        commands.len()
    );
}
