//! End-to-end acceptance checks. Prints one line per criterion and exits
//! nonzero if any fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use spherefree::curve::{
    construct_for_grid, construct_for_grid_with, validate_system, CurveError, TweakPolicy,
};
use spherefree::field::{find_construction_prime, next_admissible_prime, FieldContext};
use spherefree::points::{eval_curve, parse_csv};
use spherefree::verify::{
    max_incidence, verify, vieta_check, Predicate, Ring, VerifyMode, VerifyOptions,
};
use spherefree::{CurveSystem, DensePolynomial, Mode, PrimeThreshold};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spherefree"))
}

fn run(cmd: &mut Command) -> Result<(i32, String, Duration), String> {
    let start = Instant::now();
    let out = cmd.output().map_err(|e| format!("spawn failed: {e}"))?;
    let elapsed = start.elapsed();
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    let code = out.status.code().unwrap_or(-1);
    if code == 2 {
        return Err(format!("error exit: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok((code, stdout, elapsed))
}

fn read_json(path: &Path) -> Result<Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn construct_and_verify(d: usize, n: u64, p_expected: u64, min_modular: u64, min_grid: u64) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (code, _, t_construct) = run(bin()
        .args(["construct", "--d", &d.to_string(), "--n", &n.to_string(), "--mode", "full", "--out"])
        .arg(dir.path()))?;
    ensure!(code == 0, "construct exited {code}");
    let manifest = read_json(&dir.path().join("manifest.json"))?;
    let p = manifest["p"].as_u64().unwrap_or(0);
    let modular = manifest["modular_points"].as_u64().unwrap_or(0);
    let grid = manifest["grid_points"].as_u64().unwrap_or(0);
    ensure!(p == p_expected, "p = {p}, expected {p_expected}");
    ensure!(modular >= min_modular, "{modular} modular points < {min_modular}");
    ensure!(grid >= min_grid, "{grid} grid points < {min_grid}");

    let csv = std::fs::read_to_string(dir.path().join("points.csv")).map_err(|e| e.to_string())?;
    let points = parse_csv(&csv).map_err(|e| e.to_string())?;
    ensure!(points.len() as u64 == grid, "points.csv has {} rows", points.len());
    ensure!(
        points.iter().flatten().all(|&c| (1..=n as i64).contains(&c)),
        "coordinates outside [1, {n}]"
    );

    let report_path = dir.path().join("report.json");
    let (code, _, t_verify) = run(bin()
        .args(["verify", "--ring", "int", "--mode", "oracle", "--in"])
        .arg(dir.path().join("points.csv"))
        .arg("--report")
        .arg(&report_path))?;
    let report = read_json(&report_path)?;
    let max = report["max_on_sphere_or_plane"]["count"].as_u64().unwrap_or(u64::MAX);
    ensure!(code == 0, "verify exited {code} with max {max}");
    ensure!(max <= d as u64 + 1, "max on a sphere or plane {max} > {}", d + 1);
    Ok(format!(
        "p = {p}, |S| = {modular}, grid = {grid}, integer max = {max}; construct {t_construct:.2?}, verify {t_verify:.2?}"
    ))
    .and_then(|s| {
        let (tc, tv) = (t_construct.as_secs_f64(), t_verify.as_secs_f64());
        ensure!(d != 2 || tc < 10.0, "construct took {tc:.1} s");
        ensure!(tv < 60.0 && tc + tv < 60.0, "took {:.1} s", tc + tv);
        Ok(s)
    })
}

fn criterion_1() -> Outcome {
    construct_and_verify(2, 100, 101, 97, 96)
}

fn criterion_2() -> Outcome {
    construct_and_verify(3, 50, 53, 48, 41)
}

fn signed(points: &[Vec<u64>]) -> Vec<Vec<i64>> {
    points.iter().map(|x| x.iter().map(|&c| c as i64).collect()).collect()
}

fn criterion_3() -> Outcome {
    let mut details = Vec::new();
    for (d, p, limit) in [(2, 101, 30.0), (3, 53, 60.0)] {
        let start = Instant::now();
        let ctx = FieldContext::new(p, d).map_err(|e| e.to_string())?;
        let system = CurveSystem::build(ctx, Mode::Full).map_err(|e| e.to_string())?;
        let set = eval_curve(&system, Mode::Full).map_err(|e| e.to_string())?;
        let ring = Ring::ModP(FieldContext::prime_field(p).map_err(|e| e.to_string())?);
        let (found, _) =
            max_incidence(&signed(&set.points), d, Predicate::SphereOrPlane, VerifyMode::Fast, ring, None)
                .map_err(|e| e.to_string())?;
        let elapsed = start.elapsed().as_secs_f64();
        ensure!(found.count <= d + 1, "d = {d}, p = {p}: {} points on one surface", found.count);
        ensure!(elapsed < limit, "d = {d}, p = {p}: {elapsed:.1} s");
        details.push(format!("d = {d}, p = {p}: {} points, max {} ({elapsed:.2} s)", set.len(), found.count));
    }
    Ok(details.join("; "))
}

fn criterion_4() -> Outcome {
    let standard_only = construct_for_grid_with(10, 2, Mode::Strict, PrimeThreshold::Factorial, TweakPolicy::StandardOnly);
    let standard_note = match standard_only {
        Err(CurveError::RetriesExhausted { rejected }) => format!("standard adjustment degenerate at all {} primes tried", rejected.len()),
        Err(e) => format!("standard adjustment: {e}"),
        Ok(c) => format!("standard adjustment succeeded at p = {}", c.system.ctx.p()),
    };
    let mut details = vec![standard_note];
    for n in [10, 50, 100, 200] {
        let built = construct_for_grid(n, 2, Mode::Strict, PrimeThreshold::Factorial).map_err(|e| e.to_string())?;
        let system = built.system;
        let p = system.ctx.p();
        let report = validate_system(&system);
        ensure!(report.passed(), "p = {p}: {report}");
        let set = eval_curve(&system, Mode::Strict).map_err(|e| e.to_string())?;
        let floor = (p - 1) / 3 - 3;
        ensure!(set.len() as u64 >= floor, "p = {p}: {} strict points < {floor}", set.len());
        if set.len() < 4 {
            details.push(format!("p = {p}: {} points", set.len()));
            continue;
        }
        let ring = Ring::ModP(FieldContext::prime_field(p).map_err(|e| e.to_string())?);
        let options = VerifyOptions { mode: VerifyMode::Oracle, plane_only: true, budget: None };
        let r = verify(&signed(&set.points), 2, ring, options).map_err(|e| e.to_string())?;
        let plane = r.max_on_plane.as_ref().map_or(usize::MAX, |i| i.count);
        ensure!(plane <= 2, "p = {p}: {plane} collinear points");
        ensure!(r.max_on_sphere_or_plane.count <= 3, "p = {p}: {} concyclic points", r.max_on_sphere_or_plane.count);
        details.push(format!(
            "p = {p}: {} points, line max {plane}, circle max {}",
            set.len(),
            r.max_on_sphere_or_plane.count
        ));
    }
    Ok(details.join("; "))
}

/// First five admissible primes for each d in 2..=6.
fn sweep() -> Vec<(usize, u64)> {
    let mut out = Vec::new();
    for d in 2..=6 {
        let mut p = find_construction_prime(1, d).expect("prime exists");
        for _ in 0..5 {
            out.push((d, p));
            p = next_admissible_prime(p).expect("prime exists");
        }
    }
    out
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let (mut strict_ok, mut degenerate) = (0, 0);
    for (d, p) in sweep() {
        let ctx = FieldContext::new(p, d).map_err(|e| e.to_string())?;
        let full = CurveSystem::build(ctx, Mode::Full).map_err(|e| format!("d = {d}, p = {p}: {e}"))?;
        let report = validate_system(&full);
        for name in ["identity", "degree", "independence"] {
            ensure!(report.check(name).is_some_and(|c| c.passed), "d = {d}, p = {p}: {name} fails");
        }
        match CurveSystem::build(ctx, Mode::Strict) {
            Ok(strict) => {
                let report = validate_system(&strict);
                ensure!(report.passed(), "d = {d}, p = {p} strict: {report}");
                ensure!(report.check("vanish").is_some_and(|c| c.passed), "vanish fails");
                strict_ok += 1;
            }
            Err(CurveError::DegenerateTweak { .. }) => degenerate += 1,
            Err(e @ CurveError::Poly(_)) => return Err(format!("d = {d}, p = {p}: {e}")),
            Err(e) => return Err(format!("d = {d}, p = {p}: {e}")),
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure!(elapsed < 5.0, "sweep took {elapsed:.1} s");
    Ok(format!("25 full systems valid; strict: {strict_ok} valid, {degenerate} degenerate; no inexact division; {elapsed:.2} s"))
}

fn criterion_6() -> Outcome {
    let mut collisions = 0;
    let mut smallest_margin = i64::MAX;
    for (d, p) in sweep() {
        let ctx = FieldContext::new(p, d).map_err(|e| e.to_string())?;
        let system = CurveSystem::build(ctx, Mode::Full).map_err(|e| e.to_string())?;
        let set = eval_curve(&system, Mode::Full).map_err(|e| format!("d = {d}, p = {p}: {e}"))?;
        ensure!(set.self_intersections.len() <= 1, "d = {d}, p = {p}: {:?}", set.self_intersections);
        let bound = p - d as u64 - 2;
        ensure!(set.len() as u64 >= bound, "d = {d}, p = {p}: {} < {bound}", set.len());
        // every pole-free parameter is accounted for
        ensure!(set.len() + set.self_intersections.len() == set.domain_size, "d = {d}, p = {p}: bad accounting");
        collisions += set.self_intersections.len();
        smallest_margin = smallest_margin.min(set.len() as i64 - bound as i64);
    }
    Ok(format!("25 images, {collisions} self-intersections total, min |S| − (p−d−2) = {smallest_margin}"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    for trial in 0..50 {
        let d = 2 + trial % 2;
        let size = rng.gen_range(d + 2..=40);
        let range = [2i64, 4, 8, 1000][trial % 4];
        let points: Vec<Vec<i64>> =
            (0..size).map(|_| (0..d).map(|_| rng.gen_range(-range..=range)).collect()).collect();
        for predicate in [Predicate::SphereOrPlane, Predicate::PlaneOnly] {
            let a = max_incidence(&points, d, predicate, VerifyMode::Oracle, Ring::Integers, None)
                .map_err(|e| e.to_string())?;
            let b = max_incidence(&points, d, predicate, VerifyMode::Fast, Ring::Integers, None)
                .map_err(|e| e.to_string())?;
            ensure!(a.0 == b.0, "set {trial} {predicate:?}: oracle {:?} vs fast {:?}", a.0, b.0);
        }
    }

    let circle = vec![vec![7, 7], vec![5, 0], vec![0, 5], vec![-5, 0], vec![2, 9], vec![3, -4]];
    let r = verify(&circle, 2, Ring::Integers, VerifyOptions::default()).map_err(|e| e.to_string())?;
    ensure!(r.max_on_sphere_or_plane.witness == vec![1, 2, 3, 5], "circle witness {:?}", r.max_on_sphere_or_plane.witness);
    ensure!(!r.passed(), "concyclic control passed");
    let plane = vec![vec![1, 2, 3], vec![4, 0, 1], vec![0, 0, 0], vec![2, 4, 6], vec![5, 2, 4], vec![1, 9, 2], vec![3, 3, 9]];
    let options = VerifyOptions { plane_only: true, ..VerifyOptions::default() };
    let r = verify(&plane, 3, Ring::Integers, options).map_err(|e| e.to_string())?;
    let witness = r.max_on_plane.as_ref().map(|i| i.witness.clone()).unwrap_or_default();
    ensure!(witness == vec![0, 1, 2, 3, 4], "plane witness {witness:?}");
    ensure!(r.max_on_sphere_or_plane.count >= 5 && !r.passed(), "coplanar control passed");

    let mut primes = vec![13];
    while primes.len() < 8 {
        primes.push(next_admissible_prime(*primes.last().unwrap()).unwrap());
    }
    let mut checked = 0;
    while checked < 100 {
        let p = primes[rng.gen_range(0..primes.len())];
        let ctx = FieldContext::new(p, 2).map_err(|e| e.to_string())?;
        let k = rng.gen_range(2..=5usize);
        let mut roots: Vec<u64> = Vec::new();
        while roots.len() < k {
            let r = rng.gen_range(1..p);
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
        let mut poly = DensePolynomial::constant(ctx, 1);
        for &r in &roots {
            poly = &poly * &DensePolynomial::new(ctx, [p - r, 1]);
        }
        if !poly.is_nice() {
            continue;
        }
        ensure!(vieta_check(&poly, &roots) == Ok(true), "p = {p}, roots {roots:?}");
        checked += 1;
    }
    Ok("50 random sets agree; circle and plane controls flagged; 100 nice polynomials satisfy Σ 1/r = 0".into())
}

fn criterion_8() -> Outcome {
    let mut compared = 0;
    let cases: [&[&str]; 3] = [
        &["--d", "2", "--n", "100", "--mode", "full", "--seed", "3"],
        &["--d", "3", "--n", "40", "--mode", "strict", "--seed", "11", "--translation", "sample", "--samples", "2000"],
        &["--d", "4", "--n", "120", "--mode", "full", "--seed", "5", "--budget", "1000", "--samples", "500", "--skip-verify"],
    ];
    for flags in cases {
        let dirs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
        for (i, dir) in dirs.iter().enumerate() {
            let threads = if i == 0 { "1" } else { "4" };
            let (code, _, _) = run(bin().arg("construct").args(flags).args(["--threads", threads, "--out"]).arg(dir.path()))?;
            let expected = if flags.contains(&"--skip-verify") { 3 } else { 0 };
            ensure!(code == expected, "{flags:?} exited {code}");
        }
        for file in ["points.csv", "points.json", "modular.csv", "modular.json", "manifest.json"] {
            let a = std::fs::read(dirs[0].path().join(file)).map_err(|e| e.to_string())?;
            let b = std::fs::read(dirs[1].path().join(file)).map_err(|e| e.to_string())?;
            ensure!(a == b, "{file} differs for {flags:?}");
            compared += 1;
        }
    }
    Ok(format!("{compared} files byte-identical across 3 configurations (1 vs 4 threads)"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 d=2 full pipeline, integer oracle", criterion_1),
        ("2 d=3 full pipeline, integer oracle", criterion_2),
        ("3 whole modular image over F_p", criterion_3),
        ("4 d=2 strict: no 3 collinear, no 4 concyclic", criterion_4),
        ("5 construction sweep d=2..6", criterion_5),
        ("6 self-intersections and image size", criterion_6),
        ("7 verifier soundness and Vieta", criterion_7),
        ("8 reproducibility", criterion_8),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({elapsed:.2?}): {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}): {reason}");
            }
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
