#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cellarith")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden")
}

/// A golden case: file name and arguments. Cases whose output goes to a file
/// receive `--out <path>`; the others are compared on stdout.
pub struct Golden {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub to_file: bool,
}

pub const GOLDENS: &[Golden] = &[
    Golden {
        name: "table_9519.json",
        args: &["table", "--rule", "0:1:3:9519", "--ns", "3"],
        to_file: true,
    },
    Golden {
        name: "table_110.json",
        args: &["table", "--rule", "1:1:2:110", "--ns", "12"],
        to_file: true,
    },
    Golden {
        name: "shiftcode_170.txt",
        args: &["shiftcode", "--l", "1", "--r", "1", "--p", "2", "--m", "1"],
        to_file: false,
    },
    Golden {
        name: "approx_mu08.pgm",
        args: &[
            "approx",
            "--map",
            "logistic",
            "--mu",
            "0.8",
            "--p",
            "2",
            "--ns",
            "50",
            "--seed-site",
            "1",
            "--steps",
            "150",
        ],
        to_file: true,
    },
    Golden {
        name: "evolve_r30.pgm",
        args: &[
            "evolve", "--rule", "1:1:2:30", "--ns", "64", "--steps", "32", "--ic", "random",
            "--seed", "7",
        ],
        to_file: true,
    },
    Golden {
        name: "charfn_9519.csv",
        args: &["charfn", "--rule", "0:1:3:9519", "--ns", "4"],
        to_file: true,
    },
    Golden {
        name: "debruijn_232_fp.dot",
        args: &["debruijn", "--rule", "1:1:2:232", "--fixed-points"],
        to_file: true,
    },
    Golden {
        name: "bifurcate.csv",
        args: &[
            "bifurcate",
            "--mu-lo",
            "2.8",
            "--mu-hi",
            "3.6",
            "--points",
            "9",
            "--ns",
            "50",
            "--transient",
            "500",
            "--sample",
            "2000",
            "--samples",
            "4",
        ],
        to_file: true,
    },
    Golden {
        name: "grouptest.txt",
        args: &["grouptest", "--l", "1", "--r", "1", "--p", "2"],
        to_file: false,
    },
];

pub fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

/// Runs a golden case with the given thread count and returns its bytes.
pub fn produce(case: &Golden, threads: usize, dir: &Path) -> Vec<u8> {
    let threads = threads.to_string();
    let mut args: Vec<&str> = case.args.to_vec();
    args.extend(["--threads", &threads]);
    let out_path = dir.join(case.name);
    let out_str = out_path.to_str().expect("utf-8 path").to_string();
    if case.to_file {
        args.extend(["--out", &out_str]);
    }
    let output = run(&args);
    assert!(
        output.status.success(),
        "{} failed: {}",
        case.name,
        String::from_utf8_lossy(&output.stderr)
    );
    if case.to_file {
        let bytes = std::fs::read(&out_path).expect("output written");
        std::fs::remove_file(&out_path).expect("cleanup");
        bytes
    } else {
        output.stdout
    }
}
