mod common;

use std::path::Path;

use nestmip::io::load_instance;
use nestmip::solve::{solve_external, solve_instance, Backend, SolveLimits, Solver};
use nestmip::Error;
use nestmip_core::enumerate::enumerate_model;
use nestmip_core::mip::{export_model, ExportFormat, ExportOptions, VarKind};
use nestmip_core::{build_model, verify_placement, BuildOptions, BuiltModel, EnumLimits, ModelVariant, SolveStatus};

fn instance(name: &str) -> nestmip_core::ProblemInstance {
    load_instance(&common::repo_root().join(format!("data/synthetic/{name}.json")), None).unwrap()
}

/// A backend that runs a shell script with the model and solution paths.
fn script_backend(dir: &Path, body: &str) -> Backend {
    let script = dir.join("backend.sh");
    std::fs::write(&script, body).unwrap();
    Backend::new(format!("sh {} {{model}} {{sol}} {{time}}", script.display()))
}

fn limits() -> SolveLimits {
    SolveLimits { time_s: 30.0, ..SolveLimits::default() }
}

/// Writes the enumerator's optimum as a solution file, perturbed the way a
/// floating-point solver would leave it.
fn canned_solution(built: &BuiltModel, status: &str) -> String {
    let names = export_model(&built.model, ExportFormat::Mps, ExportOptions::default()).unwrap().names;
    let best = enumerate_model(&built.model, EnumLimits::default()).unwrap();
    let values = best.values.unwrap();
    let mut text = format!("status = {status}\nobjective = {}\nnodes = 7\niterations = 41\ntime = 0.5\n", best.objective);
    for ((name, v), var) in names.iter().zip(&values).zip(&built.model.variables) {
        let noisy = match var.kind {
            VarKind::Binary if *v > 0.5 => v - 3e-7,
            VarKind::Binary => v + 2e-7,
            _ => v + 1e-8,
        };
        text.push_str(&format!("{name} {noisy}\n"));
    }
    text
}

#[test]
fn external_point_is_polished_and_verified() {
    let dir = tempfile::tempdir().unwrap();
    let inst = instance("s05_ell_square");
    let built = build_model(&inst, ModelVariant::NfpCmVs, BuildOptions::default()).unwrap();
    let sol = dir.path().join("canned.sol");
    std::fs::write(&sol, canned_solution(&built, "optimal")).unwrap();
    let backend = script_backend(dir.path(), &format!("cp {} \"$2\"\n", sol.display()));
    let r = solve_external(&built, &backend, &limits()).unwrap();
    assert_eq!(r.status, SolveStatus::Optimal);
    assert!((r.upper_bound - 2.0).abs() < 1e-9, "{}", r.upper_bound);
    assert_eq!((r.nodes, r.simplex_iterations, r.counts_reported), (7, 41, true));
    assert_eq!(r.wall_time_s, 0.5);
    assert!(verify_placement(&inst, r.placement.as_ref().unwrap(), 1e-9).is_clean());
}

#[test]
fn reported_statuses_map_to_results() {
    let dir = tempfile::tempdir().unwrap();
    let inst = instance("s01_two_squares");
    let built = build_model(&inst, ModelVariant::NfpCm, BuildOptions::default()).unwrap();

    let b = script_backend(dir.path(), "echo 'status = infeasible' > \"$2\"\n");
    let r = solve_external(&built, &b, &limits()).unwrap();
    assert_eq!(r.status, SolveStatus::Infeasible);
    assert!(r.placement.is_none());

    let b = script_backend(dir.path(), "printf 'status = time_limit\\nbound = 1.5\\n' > \"$2\"\n");
    let r = solve_external(&built, &b, &limits()).unwrap();
    assert_eq!(r.status, SolveStatus::TimeLimit);
    assert_eq!(r.wall_time_s, 30.0);
    assert_eq!(r.lower_bound, 1.5);
    assert!(!r.counts_reported);

    let sol = dir.path().join("canned.sol");
    std::fs::write(&sol, canned_solution(&built, "time_limit")).unwrap();
    let b = script_backend(dir.path(), &format!("cp {} \"$2\"\n", sol.display()));
    let r = solve_external(&built, &b, &limits()).unwrap();
    assert_eq!(r.status, SolveStatus::Feasible);
    assert_eq!(r.wall_time_s, 30.0);
    assert!(r.placement.is_some());
}

#[test]
fn failures_carry_solver_output() {
    let dir = tempfile::tempdir().unwrap();
    let built = build_model(&instance("s01_two_squares"), ModelVariant::NfpCm, BuildOptions::default()).unwrap();

    let b = script_backend(dir.path(), "echo starting; echo 'licence expired' >&2; exit 3\n");
    match solve_external(&built, &b, &limits()) {
        Err(Error::Backend { stdout, stderr, .. }) => {
            assert!(stdout.contains("starting"));
            assert!(stderr.contains("licence expired"));
        }
        other => panic!("expected a backend error, got {other:?}"),
    }

    let b = script_backend(dir.path(), "exit 0\n");
    assert!(matches!(solve_external(&built, &b, &limits()), Err(Error::Backend { .. })));

    let names = export_model(&built.model, ExportFormat::Mps, ExportOptions::default()).unwrap().names;
    let bin = built.model.variables.iter().position(|v| v.kind == VarKind::Binary).unwrap();
    let b = script_backend(dir.path(), &format!("echo '{} 0.5' > \"$2\"\n", names[bin]));
    assert!(matches!(solve_external(&built, &b, &limits()), Err(Error::Parse { .. })), "fractional binary accepted");

    let b = Backend::new("/nonexistent/solver {model}");
    assert!(matches!(solve_external(&built, &b, &limits()), Err(Error::Backend { .. })));
}

#[test]
fn placeholders_are_substituted() {
    let dir = tempfile::tempdir().unwrap();
    let built = build_model(&instance("s01_two_squares"), ModelVariant::NfpCm, BuildOptions::default()).unwrap();
    let log = dir.path().join("args.txt");
    let script = dir.path().join("args.sh");
    std::fs::write(&script, format!("echo \"$@\" > {}\necho 'status = no_solution' > \"$2\"\n", log.display())).unwrap();
    let b = Backend::new(format!("sh {} {{model}} {{sol}} t={{time}} g={{gap}} p={{threads}} s={{seed}}", script.display()));
    let lim = SolveLimits { time_s: 12.5, gap_tol: 0.01, threads: 3, seed: 9 };
    let r = solve_external(&built, &b, &lim).unwrap();
    assert_eq!(r.status, SolveStatus::NoSolution);
    let args = std::fs::read_to_string(&log).unwrap();
    assert!(args.contains(".mps"), "{args}");
    assert!(args.trim_end().ends_with("t=12.5 g=0.01 p=3 s=9"), "{args}");
}

/// The process is killed once the limit plus grace has passed.
#[test]
fn hung_solver_is_killed() {
    let dir = tempfile::tempdir().unwrap();
    let built = build_model(&instance("s01_two_squares"), ModelVariant::NfpCm, BuildOptions::default()).unwrap();
    let b = script_backend(dir.path(), "exec sleep 60\n");
    let lim = SolveLimits { time_s: 0.1, ..SolveLimits::default() };
    let start = std::time::Instant::now();
    let r = solve_external(&built, &b, &lim).unwrap();
    assert!(start.elapsed().as_secs_f64() < 30.0);
    assert_eq!(r.status, SolveStatus::TimeLimit);
    assert_eq!(r.wall_time_s, 0.1);
}

#[test]
fn highs_matches_frozen_optima() {
    let Some(backend) = common::external_backend() else {
        eprintln!("skipped: no external solver available");
        return;
    };
    let lim = SolveLimits { time_s: 120.0, gap_tol: 0.0, ..SolveLimits::default() };
    for (name, l) in common::frozen_optima().into_iter().take(6) {
        let inst = instance(&name);
        for v in [ModelVariant::NfpCm, ModelVariant::NfpCmVs2] {
            let r = solve_instance(&inst, v, BuildOptions::default(), &Solver::External(backend.clone(), lim)).unwrap();
            assert_eq!(r.status, SolveStatus::Optimal, "{name} {v}");
            assert!((r.upper_bound - l).abs() <= 1e-6 * l, "{name} {v}: {} vs {l}", r.upper_bound);
            assert!(verify_placement(&inst, r.placement.as_ref().unwrap(), 1e-6).is_clean());
        }
    }
}
