use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nestmip::bench::{render_svg, run_benchmark, BenchConfig};
use nestmip::io::{instance_files, load_instance};
use nestmip::profile::{profile_from_csvs, write_profile};
use nestmip::{solve_instance, Backend, SolveLimits, Solver};
use nestmip_core::builder::BuiltModel;
use nestmip_core::{
    build_model, export_model, verify_placement, BuildOptions, CutToggles, EnumLimits, ExportFormat, ExportOptions,
    ModelVariant, Placement,
};

#[derive(Parser)]
#[command(name = "nestmip", version, about = "Continuous MIP models for irregular strip packing")]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build and solve one instance.
    Solve {
        instance: PathBuf,
        #[arg(long, env = "NESTMIP_VARIANT", default_value = "nfp-cm-vs", value_parser = parse_variant)]
        variant: ModelVariant,
        /// Directory for the result JSON and the SVG.
        #[arg(long, env = "NESTMIP_OUT")]
        out: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve a set of instances under several variants.
    Bench {
        /// Instance files or directories.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Variants to run (comma separated); all six by default.
        #[arg(long, env = "NESTMIP_VARIANT", value_delimiter = ',', value_parser = parse_variant)]
        variant: Vec<ModelVariant>,
        #[arg(long, env = "NESTMIP_OUT", default_value = "results")]
        out: PathBuf,
        /// Run instances concurrently (times become non-comparable).
        #[arg(long)]
        parallel: bool,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Performance profile from results CSVs, one per model.
    Profile {
        #[arg(required = true)]
        csvs: Vec<PathBuf>,
        #[arg(long, env = "NESTMIP_OUT", default_value = "profile.csv")]
        out: PathBuf,
        /// Ratio assigned to unsolved instances (default: twice the largest observed ratio).
        #[arg(long)]
        r_max: Option<f64>,
    },
    /// Check a placement JSON against an instance.
    Verify {
        instance: PathBuf,
        placement: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Write the model of one instance as MPS or LP.
    Export {
        instance: PathBuf,
        #[arg(long, env = "NESTMIP_VARIANT", default_value = "nfp-cm-vs", value_parser = parse_variant)]
        variant: ModelVariant,
        #[arg(long, env = "NESTMIP_FORMAT", value_enum, default_value = "mps")]
        format: FormatArg,
        /// Output file; standard output when omitted.
        #[arg(long, env = "NESTMIP_OUT")]
        out: Option<PathBuf>,
        /// Write SOS-1 sets as rows.
        #[arg(long, env = "NESTMIP_SOS_ROWS")]
        sos_rows: bool,
        #[command(flatten)]
        model: ModelArgs,
    },
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Maximum number of triple cuts per model.
    #[arg(long, env = "NESTMIP_CUT_CAP")]
    cut_cap: Option<usize>,
    /// Disable symmetry breaking, eliminations, merges and all cuts.
    #[arg(long)]
    no_cuts: bool,
    /// Write the generated triple cuts to this CSV file.
    #[arg(long)]
    cut_dump: Option<PathBuf>,
}

impl ModelArgs {
    fn options(&self) -> BuildOptions {
        BuildOptions {
            cuts: if self.no_cuts { CutToggles::none() } else { CutToggles::default() },
            triple_cut_cap: self.cut_cap,
        }
    }
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// External solver command template; the built-in enumerator is used when absent.
    #[arg(long, env = "NESTMIP_SOLVER_CMD")]
    solver_cmd: Option<String>,
    #[arg(long, env = "NESTMIP_TIME_LIMIT", default_value_t = 3600.0)]
    time_limit: f64,
    #[arg(long, env = "NESTMIP_GAP", default_value_t = 1e-4)]
    gap: f64,
    #[arg(long, env = "NESTMIP_THREADS", default_value_t = 1)]
    threads: usize,
    #[arg(long, env = "NESTMIP_SEED", default_value_t = 0)]
    seed: u64,
    /// Model file format handed to the solver.
    #[arg(long, env = "NESTMIP_FORMAT", value_enum, default_value = "mps")]
    format: FormatArg,
    /// Write SOS-1 sets as rows (for solvers without SOS support).
    #[arg(long, env = "NESTMIP_SOS_ROWS")]
    sos_rows: bool,
    /// Node limit of the built-in enumerator.
    #[arg(long, env = "NESTMIP_NODE_CAP", default_value_t = 1_000_000)]
    node_cap: usize,
}

impl SolverArgs {
    fn solver(&self) -> Solver {
        match &self.solver_cmd {
            None => Solver::Enumerate(EnumLimits { node_cap: self.node_cap }),
            Some(t) => Solver::External(
                Backend { template: t.clone(), format: self.format.into(), sos_as_constraints: self.sos_rows },
                SolveLimits { time_s: self.time_limit, gap_tol: self.gap, threads: self.threads, seed: self.seed },
            ),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Mps,
    Lp,
}

impl From<FormatArg> for ExportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Mps => ExportFormat::Mps,
            FormatArg::Lp => ExportFormat::Lp,
        }
    }
}

fn parse_variant(s: &str) -> Result<ModelVariant, String> {
    s.parse().map_err(|e: nestmip_core::Error| e.to_string())
}

fn dump_cuts(built: &BuiltModel, path: &Path) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["i", "j", "u", "f", "g", "h", "k_ij", "k_iu", "k_ju", "vars", "rhs"])?;
    for c in &built.triple_cuts {
        let k_ju: Vec<String> = c.k_ju.iter().map(|k| k.tag()).collect();
        let vars: Vec<&str> = c.vars.iter().map(|v| built.model.var(*v).name.as_str()).collect();
        w.write_record([
            c.i.to_string(),
            c.j.to_string(),
            c.u.to_string(),
            c.f.to_string(),
            c.g.to_string(),
            c.h.to_string(),
            c.k_ij.tag(),
            c.k_iu.tag(),
            k_ju.join(" "),
            vars.join(" "),
            c.rhs.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match cli.cmd {
        Cmd::Solve { instance, variant, out, model, solver } => {
            let inst = load_instance(&instance, None)?;
            if let Some(p) = &model.cut_dump {
                dump_cuts(&build_model(&inst, variant, model.options())?, p)?;
            }
            let r = solve_instance(&inst, variant, model.options(), &solver.solver())?;
            println!(
                "{} {}: status={} L={} LB={} gap={} time={:.3}s",
                inst.name,
                variant,
                r.status.as_str(),
                r.upper_bound,
                r.lower_bound,
                r.gap().map_or_else(|| "X".into(), |g| g.to_string()),
                r.wall_time_s
            );
            if let Some(p) = &r.placement {
                let rep = verify_placement(&inst, p, 1e-6);
                println!("verification: {}", rep.summary());
            }
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                let stem = format!("{}.{}", inst.name, variant.slug());
                std::fs::write(dir.join(format!("{stem}.json")), serde_json::to_string_pretty(&r)?)?;
                if let Some(p) = &r.placement {
                    std::fs::write(dir.join(format!("{stem}.placement.json")), serde_json::to_string_pretty(p)?)?;
                    std::fs::write(dir.join(format!("{stem}.svg")), render_svg(&inst, p))?;
                }
            }
        }
        Cmd::Bench { paths, variant, out, parallel, model, solver } => {
            let mut instances = Vec::new();
            for p in paths {
                if p.is_dir() {
                    instances.extend(instance_files(&p)?);
                } else {
                    instances.push(p);
                }
            }
            if instances.is_empty() {
                bail!("no instance files found");
            }
            let variants = if variant.is_empty() { ModelVariant::ALL.to_vec() } else { variant };
            let cfg = BenchConfig {
                instances,
                variants,
                options: model.options(),
                solver: solver.solver(),
                out_dir: out.clone(),
                verify_tol: 1e-6,
                parallel,
            };
            for (v, outcomes) in run_benchmark(&cfg)? {
                let solved = outcomes.iter().filter(|o| nestmip::bench::is_optimal(&o.status.status)).count();
                println!("{v}: {solved}/{} optimal", outcomes.len());
            }
            println!("results in {}", out.display());
        }
        Cmd::Profile { csvs, out, r_max } => {
            let points = profile_from_csvs(&csvs, r_max)?;
            write_profile(&out, &points)?;
            println!("{} points written to {}", points.len(), out.display());
        }
        Cmd::Verify { instance, placement, tol } => {
            let inst = load_instance(&instance, None)?;
            let text = std::fs::read_to_string(&placement).with_context(|| placement.display().to_string())?;
            let p: Placement = serde_json::from_str(&text).context("placement JSON")?;
            let rep = verify_placement(&inst, &p, tol);
            println!("{} (recomputed length {})", rep.summary(), rep.recomputed_length);
            if !rep.is_clean() {
                std::process::exit(1);
            }
        }
        Cmd::Export { instance, variant, format, out, sos_rows, model } => {
            let inst = load_instance(&instance, None)?;
            let built = build_model(&inst, variant, model.options())?;
            if let Some(p) = &model.cut_dump {
                dump_cuts(&built, p)?;
            }
            let e = export_model(&built.model, format.into(), ExportOptions { sos_as_constraints: sos_rows })?;
            for w in built.report.warnings.iter().chain(&e.warnings) {
                log::warn!("{w}");
            }
            match out {
                Some(p) => std::fs::write(&p, &e.text).with_context(|| p.display().to_string())?,
                None => std::io::stdout().write_all(e.text.as_bytes())?,
            }
        }
    }
    Ok(())
}
