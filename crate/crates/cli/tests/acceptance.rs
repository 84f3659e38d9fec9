//! Acceptance criteria, rechecked from the written CSV files. Prints one
//! line per criterion and exits nonzero if any fails.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::process::Command as Process;
use std::time::{Duration, Instant};

use agsp_lab::{run, Command, Config};

struct Csv {
    rows: Vec<HashMap<String, String>>,
}

impl Csv {
    fn read(path: &Path) -> Csv {
        let text =
            std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let body = text.strip_prefix("# schema=1\n").expect("schema line");
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let headers = r.headers().unwrap().clone();
        let rows = r
            .records()
            .map(|rec| {
                headers
                    .iter()
                    .zip(rec.unwrap().iter())
                    .map(|(h, v)| (h.to_string(), v.to_string()))
                    .collect()
            })
            .collect();
        Csv { rows }
    }
}

fn f(row: &HashMap<String, String>, key: &str) -> f64 {
    row[key]
        .parse()
        .unwrap_or_else(|_| panic!("{key} = {:?}", row[key]))
}

fn u(row: &HashMap<String, String>, key: &str) -> usize {
    row[key]
        .parse()
        .unwrap_or_else(|_| panic!("{key} = {:?}", row[key]))
}

struct Run {
    dir: tempfile::TempDir,
    elapsed: Duration,
}

impl Run {
    fn table(&self, name: &str) -> Csv {
        Csv::read(&self.dir.path().join(format!("{name}.csv")))
    }
}

fn execute(command: Command, edit: impl FnOnce(&mut Config)) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = Config {
        seed: Some(0),
        out: Some(dir.path().to_path_buf()),
        ..Config::default()
    };
    edit(&mut cfg);
    let start = Instant::now();
    run(command, cfg).expect("command runs");
    Run {
        dir,
        elapsed: start.elapsed(),
    }
}

type Verdict = (bool, String);

fn timed(ok: bool, detail: String, elapsed: Duration, limit: f64) -> Verdict {
    let secs = elapsed.as_secs_f64();
    (
        ok && secs < limit,
        format!("{detail}; {secs:.2} s (limit {limit} s)"),
    )
}

fn criterion1() -> Verdict {
    let r = execute(Command::SharpnessDemo, |c| c.sharpness_shrink = vec![0.25]);
    let t = r.table("sharpness");
    let row = &t.rows[0];
    let (s, e, e2) = (f(row, "shrink"), f(row, "epsilon"), f(row, "epsilon_after"));
    let ok = (s - 0.25).abs() <= 1e-15
        && (e - 1.0).abs() <= 1e-12
        && (e2 - s * e).abs() <= 1e-12
        && (e2 - 0.25).abs() <= 1e-12;
    timed(ok, format!("Δ = {s}, ε = {e}, ε′ = {e2}"), r.elapsed, 1.0)
}

/// Runs every verification suite once; criteria 2 to 8 read its tables.
fn lemmas() -> Run {
    execute(Command::VerifyLemmas, |c| c.workers = 4)
}

fn count_failures<F: Fn(&HashMap<String, String>) -> bool>(t: &Csv, ok: F) -> usize {
    t.rows.iter().filter(|r| !ok(r)).count()
}

fn criterion2(r: &Run) -> Verdict {
    let t = r.table("error_ratio");
    let family = t.rows.iter().all(|r| {
        u(r, "ambient") <= 32
            && u(r, "dim_z") <= 6
            && [0.0, 1e-4, 0.1, 0.5, 0.99].contains(&f(r, "shrink_param"))
            && [1.0, 2.0, 10.0].contains(&f(r, "dilation_max"))
    });
    let combos: std::collections::BTreeSet<(String, String)> = t
        .rows
        .iter()
        .map(|r| (r["shrink_param"].clone(), r["dilation_max"].clone()))
        .collect();
    let ratio = count_failures(&t, |r| {
        f(r, "epsilon_after") <= f(r, "shrink") * f(r, "epsilon") + 1e-9
    });
    let viab = count_failures(&t, |r| {
        f(r, "delta_after") <= f(r, "shrink") * f(r, "delta") / f(r, "mu") + 1e-9
    });
    let ok = t.rows.len() >= 1000 && family && combos.len() == 15 && ratio == 0 && viab == 0;
    (
        ok,
        format!(
            "{} trials, {} (Δ, dilation) pairs, {ratio} ratio and {viab} viability violations",
            t.rows.len(),
            combos.len()
        ),
    )
}

fn criterion3(r: &Run) -> Verdict {
    let t = r.table("lifting");
    let bad = count_failures(&t, |r| {
        f(r, "lift_residual") <= 1e-9
            && f(r, "lift_norm") <= f(r, "mu").powf(-0.5) + 1e-9
            && f(r, "perp_norm") <= f(r, "epsilon").sqrt() + 1e-9
    });
    let s = r.table("sharpness");
    let sharp = s
        .rows
        .iter()
        .all(|r| (f(r, "lift_norm") - 2f64.sqrt()).abs() <= 1e-10);
    (
        t.rows.len() >= 1000 && bad == 0 && sharp,
        format!(
            "{} trials, {bad} violations, sharp instance ‖W‖ = √2: {sharp}",
            t.rows.len()
        ),
    )
}

fn criterion4(r: &Run) -> Verdict {
    let t = r.table("symmetry");
    let worst = t
        .rows
        .iter()
        .map(|r| (f(r, "mu_vz") - f(r, "mu_zv")).abs())
        .fold(0.0, f64::max);
    let covering = t.rows.iter().all(|r| f(r, "mu_vz") > 0.0);
    (
        t.rows.len() >= 1000 && covering && worst <= 1e-10,
        format!("{} pairs, max |μ(V,Z) − μ(Z,V)| = {worst:e}", t.rows.len()),
    )
}

fn criterion5(r: &Run) -> Verdict {
    let t = r.table("amplification");
    let boundary = t.rows.iter().all(|r| {
        let (s, mu) = (f(r, "shrink_param"), f(r, "mu"));
        mu >= s - 1e-9 && mu <= 2.0 * s + 1e-9
    });
    let applies = t
        .rows
        .iter()
        .filter(|r| f(r, "mu") >= f(r, "shrink"))
        .count();
    let bad = count_failures(&t, |r| {
        f(r, "mu") < f(r, "shrink") || f(r, "mu_after") >= 0.5 - 1e-9
    });
    (
        t.rows.len() >= 500 && boundary && bad == 0,
        format!(
            "{} instances with μ ∈ [Δ, 2Δ], {applies} with μ ≥ Δ_meas, {bad} violations",
            t.rows.len()
        ),
    )
}

fn criterion6(r: &Run) -> Verdict {
    let t = r.table("tail");
    let bad = count_failures(&t, |r| {
        u(r, "dim_z") <= 4 && f(r, "tail") <= f(r, "delta").sqrt() + 1e-9
    });
    (
        t.rows.len() >= 500 && bad == 0,
        format!("{} instances (8 x 8), {bad} violations", t.rows.len()),
    )
}

fn criterion7(r: &Run) -> Verdict {
    let t = r.table("dyadic");
    let bad = count_failures(&t, |r| f(r, "entropy") <= f(r, "bound") + 1e-9);
    let uniform = &t.rows[0];
    let eq =
        uniform["blocks"] == "4" && (f(uniform, "entropy") - f(uniform, "bound")).abs() <= 1e-12;
    let secs = r.elapsed.as_secs_f64();
    (
        t.rows.len() >= 1000 && bad == 0 && eq,
        format!(
            "{} sequences, {bad} violations, uniform-4 equality: {eq} (suite run {secs:.2} s)",
            t.rows.len()
        ),
    )
}

fn criterion8(r: &Run) -> Verdict {
    let t = r.table("formulas");
    let capped = t
        .rows
        .iter()
        .filter(|r| u(r, "reduced_v") == u(r, "w"))
        .count();
    let bad_reduced = count_failures(&t, |r| {
        let (w, d, nu, v) = (f(r, "w"), f(r, "d"), f(r, "nu"), f(r, "reduced_v"));
        v == w || d / 2.0 * (9.0 / nu).ln() + w.ln() - v / 16.0 <= 0.0
    });
    let bad_loose = count_failures(&t, |r| {
        f(r, "nu_sampled") >= 1.0 || f(r, "log_eta_loose") >= f(r, "log_eta")
    });
    (
        t.rows.len() == 1000 && bad_reduced == 0 && bad_loose == 0,
        format!(
            "{} grid points ({capped} capped at V = W), {bad_reduced} with log η̃ > 0, {bad_loose} with η̃ < η",
            t.rows.len()
        ),
    )
}

fn criterion9() -> Verdict {
    let r = execute(Command::ChainExperiment, |c| {
        c.sites = vec![8];
        c.degrees = (1..=12).collect();
        c.workers = 4;
    });
    let t = r.table("chain");
    let first = t
        .rows
        .iter()
        .find(|r| f(r, "rank") * f(r, "shrink") <= 1.0 / 32.0);
    let Some(row) = first else {
        return (false, "no degree reached R·Δ ≤ 1/32".into());
    };
    let ising_d = t.rows.iter().all(|r| u(r, "degeneracy") == 2);
    let ok = row["status"] == "ok"
        && row["converged"] == "true"
        && u(row, "dim_v") <= 8
        && (f(row, "s_max") - 1.0).abs() <= 1e-6
        && f(row, "bound") >= f(row, "s_max")
        && ising_d;
    timed(
        ok,
        format!(
            "k = {}, R = {}, Δ = {:e}, dim V = {}, S_max = {}, bound = {:.3}",
            row["k"],
            row["rank"],
            f(row, "shrink"),
            row["dim_v"],
            row["s_max"],
            f(row, "bound")
        ),
        r.elapsed,
        600.0,
    )
}

fn criterion10() -> Verdict {
    let r = execute(Command::FrustratedRun, |c| c.workers = 4);
    let t = r.table("frustrated");
    let s = r.table("frustrated_summary");
    let sum = &s.rows[0];
    let n: Vec<usize> = t.rows.iter().map(|r| u(r, "n")).collect();
    let rotated = t
        .rows
        .iter()
        .all(|r| (f(r, "delta_n") - 0.25f64.powi(u(r, "n") as i32)).abs() <= 1e-15);
    let bad = count_failures(&t, |r| {
        let bound =
            (f(&sum.clone(), "shrink").powf(f(r, "n") / 2.0) + f(r, "delta_n").sqrt()).powi(2);
        f(r, "viability") <= bound + 1e-9
    });
    let instance = u(sum, "dl") == 8 && u(sum, "dr") == 8 && u(sum, "degeneracy") == 2;
    let (c_delta, s_max, bound) = (f(sum, "c_delta"), f(sum, "s_max"), f(sum, "bound"));
    let ok =
        n == [1, 2, 3, 4, 5] && rotated && instance && bad == 0 && c_delta == 1.0 && s_max <= bound;
    timed(
        ok,
        format!("stages {n:?}, {bad} viability violations, c_δ = {c_delta}, S_max = {s_max:.6} ≤ {bound:.3}"),
        r.elapsed,
        300.0,
    )
}

fn files(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "csv") {
                out.insert(
                    p.strip_prefix(dir).unwrap().to_path_buf(),
                    std::fs::read(&p).unwrap(),
                );
            }
        }
    }
    out
}

fn criterion11() -> Verdict {
    let cfg_dir = tempfile::tempdir().unwrap();
    let cfg = cfg_dir.path().join("small.toml");
    std::fs::write(
        &cfg,
        "seed = 11\nsuite_trials = 200\nboundary_trials = 100\nsites = [6]\ndegrees = [1, 2, 3, 4, 5, 6]\nrestarts = 8\n",
    )
    .unwrap();
    let mut details = Vec::new();
    let mut ok = true;
    for cmd in [
        "verify-lemmas",
        "sharpness-demo",
        "chain-experiment",
        "bound-table",
        "frustrated-run",
    ] {
        let outputs: Vec<_> = ["1", "3"]
            .iter()
            .map(|workers| {
                let dir = tempfile::tempdir().unwrap();
                let status = Process::new(env!("CARGO_BIN_EXE_agsp-lab"))
                    .args([cmd, "--config"])
                    .arg(&cfg)
                    .arg("--out")
                    .arg(dir.path())
                    .args(["--workers", workers])
                    .output()
                    .unwrap()
                    .status;
                (status.success(), files(dir.path()))
            })
            .collect();
        let same = outputs[0].0
            && outputs[1].0
            && !outputs[0].1.is_empty()
            && outputs[0].1 == outputs[1].1;
        ok &= same;
        details.push(format!(
            "{cmd} {} files {}",
            outputs[0].1.len(),
            if same { "identical" } else { "DIFFER" }
        ));
    }
    (ok, details.join(", "))
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, (ok, detail): Verdict| {
        println!(
            "criterion {n}: {} {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        failed += usize::from(!ok);
    };
    report(1, criterion1());
    let start = Instant::now();
    let suite = lemmas();
    let suite_secs = start.elapsed().as_secs_f64();
    println!("verification suites ran in {suite_secs:.2} s");
    report(2, criterion2(&suite));
    report(3, criterion3(&suite));
    report(4, criterion4(&suite));
    report(5, criterion5(&suite));
    report(6, criterion6(&suite));
    report(7, criterion7(&suite));
    report(8, criterion8(&suite));
    report(9, criterion9());
    report(10, criterion10());
    report(11, criterion11());
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
