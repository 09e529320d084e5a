use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{ArgGroup, Args, Parser, Subcommand};
use fels_core::curves::ClosedCurve;
use fels_core::error::Error;
use fels_core::hyperspace::{project_curve, projection_simplicity, wireframe, ProjectionMap, NAMED_PROJECTIONS};
use fels_core::io::{self, MeshFormat, PolylineFormat, SculptureConfig};
use fels_core::session::protocol::serve;
use fels_core::session::SessionStore;
use fels_core::validate::{validate_mesh, ValidateOptions, ValidationReport};

#[derive(Parser)]
#[command(name = "fels", version, about = "Build, check and export swept toroidal sculptures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the sculpture described by a config file and write the mesh.
    Generate(GenerateArgs),
    /// Audit a mesh file and print the report as JSON.
    Validate(ValidateArgs),
    /// Write wireframes of 3D projections of a 4D curve.
    Project(ProjectArgs),
    /// Run the live sculpting session service.
    Serve(ServeArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// stl, obj or mesh-json
    #[arg(long, default_value = "stl")]
    format: String,
    #[arg(long)]
    sections: Option<usize>,
    #[arg(long)]
    ring: Option<usize>,
    #[arg(long)]
    check_intersections: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    skip_intersections: bool,
}

#[derive(Args)]
#[command(group(ArgGroup::new("projection").required(true).args(["axes", "all", "matrix"])))]
struct ProjectArgs {
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Take the curve from a sculpture config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    axes: Option<String>,
    /// Write all four coordinate projections, one file each.
    #[arg(long)]
    all: bool,
    /// JSON file holding three orthonormal rows.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long, default_value_t = 2048)]
    samples: usize,
    /// Output file; `.obj` writes line elements, anything else JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 7878)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Config(_) | Error::Io(_) | Error::Format(_) | Error::InvalidParameter(_) | Error::NotFound(_) => 1,
            Error::DimensionMismatch { .. } => 1,
            Error::BadSchedule(_) | Error::NonUniqueExtremum { .. } | Error::SeamMismatch { .. } => 2,
            Error::SelfIntersecting { .. } | Error::CurveClearance { .. } => 3,
            _ => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn generate(args: GenerateArgs) -> Result<(), Failure> {
    let format: MeshFormat = args.format.parse()?;
    let mut config = SculptureConfig::load(&args.config)?;
    if let Some(n) = args.sections {
        config.resolution.sections = n;
    }
    if let Some(m) = args.ring {
        config.resolution.ring = m;
    }
    config.checks.self_intersection |= args.check_intersections;
    let sculpture = config.build()?;
    let mesh = sculpture.generate()?;
    io::write_mesh(&mesh, &args.out, format)?;
    for w in &mesh.warnings {
        log::warn!("{w:?}");
    }
    let curve =
        sculpture.projection.as_ref().map_or(Ok(sculpture.curve.clone()), |p| project_curve(&sculpture.curve, p))?;
    let opts = ValidateOptions { self_intersection: false, ..Default::default() };
    let report = validate_mesh(&mesh, Some(&curve), &opts);
    println!("wrote {} ({} vertices, {} triangles)", args.out.display(), mesh.vertices.len(), mesh.triangles.len());
    print_summary(&report, config.checks.self_intersection);
    Ok(())
}

fn print_summary(r: &ValidationReport, intersections_checked: bool) {
    let genus = r.genus.map_or("undefined".to_string(), |g| g.to_string());
    println!("watertight: {}  euler: {}  genus: {genus}", r.watertight, r.euler_characteristic);
    if let Some(p) = &r.area_profile {
        let at = |t: Option<f64>| t.map_or("none".to_string(), |t| format!("{t:.6}"));
        println!(
            "area extrema: {}  unique min at t = {}  unique max at t = {}",
            p.extrema.len(),
            if p.unique_min { at(p.global_min_t()) } else { "none".into() },
            if p.unique_max { at(p.global_max_t()) } else { "none".into() }
        );
    }
    if let Some(d) = r.centroid_max_deviation {
        println!("centroid deviation: {d:e}");
    }
    if intersections_checked {
        println!("self-intersections: none");
    }
    for f in &r.failures {
        println!("note: {f}");
    }
}

fn validate(args: ValidateArgs) -> Result<(), Failure> {
    let mesh = io::read_mesh(&args.input)?;
    let opts = ValidateOptions { self_intersection: !args.skip_intersections, ..Default::default() };
    let report = validate_mesh(&mesh, None, &opts);
    let text = serde_json::to_string_pretty(&report).map_err(|e| usage(e.to_string()))?;
    println!("{text}");
    if report.pass {
        Ok(())
    } else {
        Err(Failure { code: 4, message: format!("validation failed: {}", report.failures.join("; ")) })
    }
}

fn with_suffix(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("projection");
    let name = match out.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}-{suffix}.{ext}"),
        None => format!("{stem}-{suffix}"),
    };
    out.with_file_name(name)
}

fn project(args: ProjectArgs) -> Result<(), Failure> {
    let curve = match (&args.preset, &args.config) {
        (_, Some(path)) => SculptureConfig::load(path)?.curve.build()?,
        (Some(name), None) => ClosedCurve::preset(name)?,
        (None, None) => ClosedCurve::preset("fels4d")?,
    };
    let dim = curve.dimension();
    let maps: Vec<(Option<&str>, ProjectionMap)> = if args.all {
        NAMED_PROJECTIONS.iter().map(|n| Ok((Some(*n), ProjectionMap::axes(n, dim)?))).collect::<Result<_, Error>>()?
    } else if let Some(axes) = &args.axes {
        vec![(None, ProjectionMap::axes(axes, dim)?)]
    } else {
        let path = args.matrix.as_ref().expect("clap enforces one projection choice");
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let rows: Vec<Vec<f64>> = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        vec![(None, ProjectionMap::general(&rows)?)]
    };
    let format = PolylineFormat::from_path(&args.out);
    for (name, map) in maps {
        let projected = project_curve(&curve, &map)?;
        let poly = wireframe(&projected, args.samples)?;
        let out = name.map_or_else(|| args.out.clone(), |n| with_suffix(&args.out, n));
        io::write_polyline(&poly, &out, format)?;
        let label = name.unwrap_or("projection");
        match projection_simplicity(&projected, args.samples, 0.0) {
            Ok(r) => println!("{label}: {} (min non-adjacent distance {:e})", out.display(), r.min_distance),
            Err(_) => println!("{label}: {}", out.display()),
        }
    }
    Ok(())
}

fn run_server(args: ServeArgs) -> Result<(), Failure> {
    let addr = format!("{}:{}", args.host, args.port);
    let listener = TcpListener::bind(&addr).map_err(|e| usage(format!("cannot listen on {addr}: {e}")))?;
    println!("listening on {}", listener.local_addr().map_err(|e| usage(e.to_string()))?);
    serve(listener, Arc::new(SessionStore::new())).map_err(|e| Failure { code: 4, message: e.to_string() })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("FELS_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Validate(a) => validate(a),
        Command::Project(a) => project(a),
        Command::Serve(a) => run_server(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
