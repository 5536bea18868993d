use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use orbihear_core::football::{
    asymptotic_prediction, default_window, extrapolate_with_order, log_grid, sample_traces,
};
use orbihear_core::heat::{equivariant_expansion, Mode, TorusElement};
use orbihear_core::inversion::{
    default_r_grid, reconstruct_pipeline, roundtrip, synthesize_spectral_samples, InversionOptions,
    DEFAULT_OMEGA_MAX,
};
use orbihear_core::lattice::isotropy_group;
use orbihear_core::minkowski::{reconstruct_2d, reconstruct_nd, MinkowskiInput, SolverOptions};
use orbihear_core::polytope::{face_volume, faces, validate_rational_simple};
use orbihear_core::rational::format_rational;
use orbihear_core::{CurvatureIntegrals, Error, LabeledPolytope, SpectralSamples};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "orbihear", version, about = "Heat invariants of labeled toric polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a polytope file is rational simple.
    Validate { input: PathBuf },
    /// List faces of a given codimension with their volumes.
    Faces {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        codim: usize,
    },
    /// Print the isotropy group of every face.
    Isotropy {
        input: PathBuf,
        /// Restrict to one codimension.
        #[arg(long)]
        codim: Option<usize>,
    },
    /// Leading heat coefficients along a one-parameter subgroup.
    Forward(ForwardArgs),
    /// Recover the labeled polytope from spectral samples.
    Invert(InvertArgs),
    /// Polytope with prescribed facet normals and volumes.
    Minkowski {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
    },
    /// Exact equivariant heat trace of a (p,p) football.
    Football(FootballArgs),
    /// Constant-scalar-curvature test from curvature integrals.
    Csc {
        input: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Synthesize samples from a random polytope and invert them.
    Roundtrip {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        facets: usize,
        #[arg(long, default_value_t = DEFAULT_OMEGA_MAX)]
        omega_max: u32,
        #[arg(long, default_value_t = Mode::Inclusive)]
        mode: Mode,
    },
}

#[derive(Args, Debug)]
struct ForwardArgs {
    input: PathBuf,
    /// Integer direction, comma separated. Repeat for several.
    #[arg(long = "direction", value_delimiter = ';', required = true)]
    directions: Vec<String>,
    /// Comma-separated parameter values; defaults to the resonance-avoiding grid.
    #[arg(long, value_delimiter = ',')]
    r: Vec<f64>,
    #[arg(long, default_value_t = Mode::Inclusive)]
    mode: Mode,
    #[arg(long, default_value_t = DEFAULT_OMEGA_MAX)]
    omega_max: u32,
    /// CSV destination; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write leading-coefficient curves as a samples file for `invert`.
    #[arg(long)]
    samples: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InvertArgs {
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_OMEGA_MAX)]
    omega_max: u32,
    #[arg(long, default_value_t = Mode::Inclusive)]
    mode: Mode,
    /// Relative residual accepted when fitting a label and volume.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Output prefix; `<prefix>_plus.json` and `<prefix>_minus.json` are written.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FootballArgs {
    #[arg(long)]
    p: u32,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long)]
    tmin: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long, default_value_t = 12)]
    points: usize,
    /// Number of positive powers of t in the fit.
    #[arg(long, default_value_t = 3)]
    order: usize,
    #[arg(long, default_value_t = Mode::Inclusive)]
    mode: Mode,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn sink(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn parse_direction(s: &str) -> anyhow::Result<Vec<i64>> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().with_context(|| format!("bad direction entry '{x}'")))
        .collect()
}

fn join(v: &[i64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn positive(name: &str, x: f64) -> anyhow::Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        bail!(Error::Parse(format!("{name} must be positive, got {x}")));
    }
    Ok(())
}

fn polytope(path: &Path) -> anyhow::Result<LabeledPolytope> {
    Ok(LabeledPolytope::from_json(&read(path)?)?)
}

fn validate(input: &Path) -> anyhow::Result<()> {
    let report = validate_rational_simple(&polytope(input)?);
    println!("{report}");
    if !report.passed() {
        bail!(Error::InvalidPolytope(report.violations[0].detail.clone()));
    }
    Ok(())
}

fn list_faces(input: &Path, codim: usize) -> anyhow::Result<()> {
    let p = polytope(input)?;
    let mut out = csv::Writer::from_writer(io::stdout().lock());
    out.write_record(["facets", "dim", "vertices", "volume"])?;
    for f in faces(&p, codim)? {
        let ids: Vec<String> = f.tight_set.iter().map(|i| i.to_string()).collect();
        let verts: Vec<String> = f
            .vertices
            .iter()
            .map(|v| format!("({})", v.iter().map(format_rational).collect::<Vec<_>>().join(" ")))
            .collect();
        out.write_record([
            ids.join("-"),
            f.dim(p.dim()).to_string(),
            verts.join(" "),
            format!("{}", face_volume(&p, &f)?),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn isotropy(input: &Path, codim: Option<usize>) -> anyhow::Result<()> {
    let p = polytope(input)?;
    let range = match codim {
        Some(k) => k..=k,
        None => 1..=p.dim(),
    };
    for k in range {
        for f in faces(&p, k)? {
            let ids: Vec<String> = f.tight_set.iter().map(|i| i.to_string()).collect();
            println!("face {}: {}", ids.join("-"), isotropy_group(&p, &f)?);
        }
    }
    Ok(())
}

fn forward(a: &ForwardArgs) -> anyhow::Result<()> {
    let p = polytope(&a.input)?;
    let dirs: Vec<Vec<i64>> = a.directions.iter().map(|s| parse_direction(s)).collect::<anyhow::Result<_>>()?;
    let r_values = if a.r.is_empty() { default_r_grid(a.omega_max) } else { a.r.clone() };
    let mut out = csv::Writer::from_writer(sink(a.output.as_deref())?);
    out.write_record(["direction", "r", "t_exponent", "coefficient", "source"])?;
    for d in &dirs {
        for &r in &r_values {
            let u = TorusElement::new(d.clone(), r)?;
            for term in equivariant_expansion(&p, &u, 0, a.mode)?.terms {
                let source = if term.model { format!("{} (model)", term.source) } else { term.source.to_string() };
                out.write_record([
                    join(d),
                    format!("{r}"),
                    format_rational(&term.t_exponent),
                    format!("{}", term.coefficient),
                    source,
                ])?;
            }
        }
    }
    out.flush()?;
    if let Some(path) = &a.samples {
        let s = synthesize_spectral_samples(&p, &dirs, &r_values, a.mode)?;
        write_file(path, &s.to_json())?;
    }
    Ok(())
}

fn suffixed(prefix: &Path, tag: &str) -> PathBuf {
    let stem = prefix.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    prefix.with_file_name(format!("{stem}_{tag}.json"))
}

fn invert(a: &InvertArgs) -> anyhow::Result<()> {
    positive("--tol", a.tol)?;
    let samples = SpectralSamples::from_json(&read(&a.input)?)?;
    let opts = InversionOptions { omega_max: a.omega_max, mode: a.mode, fit_tol: a.tol, ..Default::default() };
    let rec = reconstruct_pipeline(&samples, &opts)?;
    let prefix = a.output.clone().unwrap_or_else(|| a.input.clone());
    let (plus, minus) = (suffixed(&prefix, "plus"), suffixed(&prefix, "minus"));
    write_file(&plus, &rec.plus.to_json())?;
    write_file(&minus, &rec.minus.to_json())?;
    for (dir, fit) in &rec.fits {
        println!("direction {}: label {}, volume {}, residual {:e}", join(dir), fit.label, fit.volume, fit.residual);
    }
    println!("wrote {} and {}", plus.display(), minus.display());
    Ok(())
}

#[derive(Serialize)]
struct MinkowskiOutput<'a> {
    normals: &'a [Vec<f64>],
    offsets: &'a [f64],
    vertices: &'a [Vec<f64>],
    iterations: usize,
}

fn minkowski(input: &Path, output: Option<&Path>, tol: f64, max_iter: usize) -> anyhow::Result<()> {
    positive("--tol", tol)?;
    let inp = MinkowskiInput::from_json(&read(input)?)?;
    let sol = if inp.dim() == 2 {
        reconstruct_2d(&inp)?
    } else {
        reconstruct_nd(&inp, &SolverOptions { tol, max_iter, initial: None })?
    };
    let doc = MinkowskiOutput { normals: inp.normals(), offsets: &sol.offsets, vertices: &sol.vertices, iterations: sol.iterations };
    let mut w = sink(output)?;
    writeln!(w, "{}", serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

fn football(a: &FootballArgs) -> anyhow::Result<()> {
    let (lo, hi) = default_window(a.p.max(1), a.alpha);
    let tmin = a.tmin.unwrap_or(lo);
    let tmax = a.tmax.unwrap_or(hi.max(10.0 * tmin));
    positive("--tmin", tmin)?;
    if !(tmax > tmin) {
        bail!(Error::Parse(format!("--tmax {tmax} must exceed --tmin {tmin}")));
    }
    let pred = asymptotic_prediction(a.p, a.alpha, a.mode)?;
    let samples = sample_traces(a.p, a.alpha, &log_grid(tmin, tmax, a.points))?;
    let mut out = csv::Writer::from_writer(sink(a.output.as_deref())?);
    out.write_record(["t", "exact_trace", "prediction"])?;
    for &(t, y) in &samples {
        out.write_record([format!("{t:e}"), format!("{y}"), format!("{}", pred.leading / t + pred.constant)])?;
    }
    let mut w = out.into_inner().map_err(|e| anyhow::anyhow!(e.to_string()))?;
    let fit = extrapolate_with_order(&samples, a.order)?;
    writeln!(
        w,
        "# c_minus1 {} c0 {} predicted_c_minus1 {} predicted_c0 {} condition {:e} residual {:e}",
        fit.c_minus1, fit.c0, pred.leading, pred.constant, fit.condition, fit.residual
    )?;
    Ok(())
}

fn csc(input: &Path, tol: f64) -> anyhow::Result<()> {
    positive("--tol", tol)?;
    let d = CurvatureIntegrals::from_json(&read(input)?)?;
    let report = orbihear_core::csc::is_csc(&d, tol)?;
    println!("csc: {}", report.csc);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn run_roundtrip(seed: u64, n: usize, facets: usize, omega_max: u32, mode: Mode) -> anyhow::Result<()> {
    let opts = InversionOptions { omega_max, mode, ..Default::default() };
    let rep = roundtrip(seed, n, facets, &opts)?;
    println!("truth: {}", rep.truth.to_json());
    println!("hausdorff: {:e}", rep.hausdorff);
    println!("labels_match: {}", rep.labels_match);
    println!("mirrored: {}", rep.mirrored);
    Ok(())
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("ORBIHEAR_THREADS") {
        let n: usize = v.parse().with_context(|| format!("ORBIHEAR_THREADS='{v}'"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Validate { input } => validate(&input),
        Command::Faces { input, codim } => list_faces(&input, codim),
        Command::Isotropy { input, codim } => isotropy(&input, codim),
        Command::Forward(a) => forward(&a),
        Command::Invert(a) => invert(&a),
        Command::Minkowski { input, output, tol, max_iter } => minkowski(&input, output.as_deref(), tol, max_iter),
        Command::Football(a) => football(&a),
        Command::Csc { input, tol } => csc(&input, tol),
        Command::Roundtrip { seed, n, facets, omega_max, mode } => run_roundtrip(seed, n, facets, omega_max, mode),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("error[USAGE]: {e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, status) = match e.downcast_ref::<Error>() {
                Some(err) => (err.code(), if err.is_numerical() { 2 } else { 1 }),
                None => ("IO", 1),
            };
            eprintln!("error[{code}]: {e:#}");
            ExitCode::from(status)
        }
    }
}
