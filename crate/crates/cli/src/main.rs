use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperdomain::domain::Status;
use hyperdomain::io::{fiber_report_json, nc_report_json, singular_report_json, DomainFile, SystemFile};
use hyperdomain::plot::{render_factor_svg, Window};
use hyperdomain::{build_domain, build_system, check_nc, BuildOptions, DomainSpec, FiberConfig, Label, ManifoldSystem, Mode, NcConfig};
use serde_json::json;

#[derive(Parser)]
#[command(name = "hyperdomain", version, about = "Build and verify domains bounded by hyperbola branches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a domain from a sequence and interval labels.
    Build(BuildArgs),
    /// Verify the five structural conditions of a domain file.
    Check(CheckArgs),
    /// Report on the fibre of the first coordinate over one value.
    Fiber(FiberArgs),
    /// Predict and verify the singular values.
    Singular(SingularArgs),
    /// Estimate the image of the first coordinate.
    Image(ImageArgs),
    /// Write the polynomial system of the manifold as JSON.
    ExportSystem(ExportArgs),
    /// Draw one planar factor as SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Strictly increasing values, comma separated.
    #[arg(long = "t", value_delimiter = ',', allow_hyphen_values = true, required = true)]
    t: Vec<f64>,
    /// One 0/1 label per interval, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    labels: Vec<u8>,
    #[arg(long, default_value = "minimal")]
    mode: String,
    /// Radius of the pinch factors.
    #[arg(long)]
    pinch_rho: Option<f64>,
    /// Output file; the document goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, env = "HYPERDOMAIN_SEED", default_value_t = 0)]
    seed: u64,
    /// Also list spurious-component witnesses and the full rank table.
    #[arg(long)]
    literal_report: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SystemArgs {
    file: PathBuf,
    /// Block sizes, one per hypersurface or a single value for all.
    #[arg(long = "d", value_delimiter = ',')]
    blocks: Vec<usize>,
}

#[derive(Args)]
struct FiberArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long = "t", allow_hyphen_values = true)]
    t: f64,
    #[arg(long, default_value_t = 200)]
    k: usize,
    #[arg(long)]
    eps: Option<f64>,
    /// Truncation for unbounded fibres.
    #[arg(long = "R")]
    truncation: Option<f64>,
    #[arg(long, env = "HYPERDOMAIN_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SingularArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Random samples for the off-corner estimate.
    #[arg(long, default_value_t = 256)]
    samples: usize,
    #[arg(long, env = "HYPERDOMAIN_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ImageArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long, default_value_t = 401)]
    grid: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "HYPERDOMAIN_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PlotArgs {
    file: PathBuf,
    /// 0-based factor index; 0 is the lens.
    #[arg(long, default_value_t = 0)]
    factor: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// x_min,x_max,y_min,y_max
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    window: Option<Vec<f64>>,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn read_domain(path: &Path) -> Result<DomainSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))?;
    Ok(DomainFile::from_json(&text)?.to_domain()?)
}

fn load_system(args: &SystemArgs) -> Result<ManifoldSystem, Failure> {
    let d = read_domain(&args.file)?;
    let l = d.num_hypersurfaces();
    let blocks = match args.blocks.len() {
        0 => None,
        1 => Some(vec![args.blocks[0]; l]),
        _ => Some(args.blocks.clone()),
    };
    Ok(build_system(d, blocks.as_deref())?)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn cmd_build(a: BuildArgs) -> CmdResult {
    let labels = a.labels.iter().map(|&b| Label::from_bit(b)).collect::<Result<Vec<_>, _>>()?;
    let opts = BuildOptions {
        mode: Mode::parse(&a.mode)?,
        pinch_rho: a.pinch_rho,
    };
    let d = build_domain(&a.t, &labels, opts)?;
    let file = DomainFile::from_domain(&d);
    let text = file.to_json() + "\n";
    let Some(out) = a.out.as_deref() else {
        print!("{text}");
        return Ok(ExitCode::SUCCESS);
    };
    write_or_print(Some(out), &text)?;
    let corners = d.corners();
    if a.json {
        print_json(&json!({
            "n": d.n(),
            "hypersurfaces": d.num_hypersurfaces(),
            "extension": d.is_extension(),
            "corners": corners.iter().map(|c| json!({
                "x1": c.x1,
                "factor": c.factor,
                "point": c.point,
                "pair": [c.pair.0 + 1, c.pair.1 + 1],
            })).collect::<Vec<_>>(),
        }));
    } else {
        println!("wrote {}", out.display());
        println!("n = {}, L = {}", d.n(), d.num_hypersurfaces());
        if d.is_extension() {
            println!("note: two values with label 1 lie outside the literal factor lists");
        }
        println!("{:>12} {:>7} {:>12} {:>9}", "x1", "factor", "height", "pair");
        for c in corners {
            println!(
                "{:>12} {:>7} {:>12} {:>9}",
                c.x1,
                c.factor,
                c.point[1],
                format!("f{},f{}", c.pair.0 + 1, c.pair.1 + 1)
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(a: CheckArgs) -> CmdResult {
    let d = read_domain(&a.file)?;
    if a.samples == 0 {
        return Err(Failure("--samples must be at least 1".into()));
    }
    let cfg = NcConfig {
        samples: a.samples,
        tol: a.tol,
        seed: a.seed,
        ..NcConfig::default()
    };
    let rep = check_nc(&d, &cfg);
    if a.json {
        print_json(&nc_report_json(&rep));
    } else {
        println!("{:<4} {:<28} {:<6} detail", "cond", "name", "status");
        for c in &rep.conditions {
            println!("{:<4} {:<28} {:<6} {}", c.condition, c.name, c.status.as_str(), c.detail);
            if c.status != Status::Pass || a.literal_report {
                for w in c.witnesses.iter().take(if a.literal_report { usize::MAX } else { 1 }) {
                    println!("       witness {w:?}");
                }
            }
        }
        println!("intersection sets checked: {}", rep.sets_checked);
        for e in &rep.rank_table {
            if a.literal_report || !e.is_full() {
                let lambda: Vec<String> = e.lambda.iter().map(|j| format!("f{}", j + 1)).collect();
                println!(
                    "  {{{}}} rank {} of {} at {:?}",
                    lambda.join(","),
                    e.rank,
                    e.lambda.len(),
                    e.point
                );
            }
        }
    }
    Ok(if rep.has_failure() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_fiber(a: FiberArgs) -> CmdResult {
    let s = load_system(&a.system)?;
    let cfg = FiberConfig {
        k: a.k,
        epsilon: a.eps,
        truncation: a.truncation,
        seed: a.seed,
    };
    let r = s.fiber_report(a.t, &cfg)?;
    if a.json {
        print_json(&fiber_report_json(&r));
    } else {
        println!("t = {}", r.t);
        println!("nonempty: {}", r.nonempty);
        if r.nonempty {
            println!("bounded: {}", r.bounded);
            println!("regular value: {}", r.regular);
            println!("single point: {}", r.point_fiber);
            println!(
                "sampled components: {} ({} samples, epsilon {}{})",
                r.sampled_components,
                r.sample_count,
                r.epsilon,
                if r.truncated { format!(", truncated at {}", r.truncation) } else { String::new() }
            );
            println!("fibre dimension: {}", r.fiber_dim);
        }
        println!("model: {}", r.model);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_singular(a: SingularArgs) -> CmdResult {
    let s = load_system(&a.system)?;
    let r = s.singular_values_with(a.samples, a.seed)?;
    if a.json {
        print_json(&singular_report_json(&r));
    } else {
        println!("predicted singular values: {:?}", r.predicted_values);
        for c in &r.corners {
            println!(
                "  x1 = {:<12} factor {} pair f{},f{}: {}",
                c.x1,
                c.factor,
                c.pair.0 + 1,
                c.pair.1 + 1,
                if c.verified { "verified" } else { "NOT verified" }
            );
        }
        println!("regular at {} of {} random samples", r.off_corner_clean * r.off_corner_samples as f64, r.off_corner_samples);
    }
    Ok(if r.all_verified() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_image(a: ImageArgs) -> CmdResult {
    let s = load_system(&a.system)?;
    let (lo, hi) = s.image_estimate(a.grid)?;
    let d = s.domain();
    let step = 2.0 * d.span() / (a.grid - 1) as f64;
    if a.json {
        print_json(&json!({ "image": [lo, hi], "grid": a.grid, "step": step, "expected": [d.t_first(), d.t_last()] }));
    } else {
        println!("image ~ [{lo}, {hi}] (grid step {step})");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_export(a: ExportArgs) -> CmdResult {
    let s = load_system(&a.system)?;
    let f = SystemFile::from_system(&s, a.seed)?;
    write_or_print(a.out.as_deref(), &(f.to_json() + "\n"))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_plot(a: PlotArgs) -> CmdResult {
    let d = read_domain(&a.file)?;
    let window = match a.window.as_deref() {
        Some([x0, x1, y0, y1]) => Some(Window::new(*x0, *x1, *y0, *y1)?),
        Some(_) => return Err(Failure("--window needs four values".into())),
        None => None,
    };
    let svg = render_factor_svg(&d, a.factor, window)?;
    write_or_print(a.out.as_deref(), &svg)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Check(a) => cmd_check(a),
        Command::Fiber(a) => cmd_fiber(a),
        Command::Singular(a) => cmd_singular(a),
        Command::Image(a) => cmd_image(a),
        Command::ExportSystem(a) => cmd_export(a),
        Command::Plot(a) => cmd_plot(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
