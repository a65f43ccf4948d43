//! Command-line front end: JSON matrix I/O, subcommands for the major
//! geometric operations, CSV emitters for parameter sweeps, and a seeded
//! randomized self-test.
//!
//! Exit codes: 0 success, 2 parse/input errors, 3 geometry-domain errors,
//! 4 index mismatches, 1 self-test failure.

mod io;
mod selftest;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rsphere::manifold::{
    self, finsler_dist, log_p0, log_general, norm_distance, SphereProjection, TangentVector,
};
use rsphere::matfun::{min_eig_hermitian, op_norm, op_norm_hermitian};
use rsphere::{opgraph, spectral, CMat, Tolerances};

use io::{format_sig, read_matrix, MatrixDocument, SweepTable};

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Lib(rsphere::Error),
}

impl From<rsphere::Error> for CliError {
    fn from(e: rsphere::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Lib(rsphere::Error::IndexNonZero { .. }) => 4,
            CliError::Lib(_) => 3,
        }
    }

    fn name(&self) -> &'static str {
        use rsphere::Error as E;
        match self {
            CliError::Parse(_) => "ParseError",
            CliError::Lib(e) => match e {
                E::NotHermitian { .. } => "NotHermitian",
                E::SpectrumOutOfDomain { .. } => "SpectrumOutOfDomain",
                E::NotUnitary { .. } => "NotUnitary",
                E::SpectrumTouchesMinusOne { .. } => "SpectrumTouchesMinusOne",
                E::DimensionMismatch { .. } => "DimensionMismatch",
                E::NotInSphere { .. } => "NotInSphere",
                E::TopBlockSingular => "TopBlockSingular",
                E::NotInChart => "NotInChart",
                E::NotSameFiber { .. } => "NotSameFiber",
                E::NotTangent { .. } => "NotTangent",
                E::NotCodiagonal { .. } => "NotCodiagonal",
                E::NotProjection { .. } => "NotProjection",
                E::MobiusPole => "MobiusPole",
                E::OutsideLogDomain { .. } => "OutsideLogDomain",
                E::ProjectionsTooFar { .. } => "ProjectionsTooFar",
                E::ParameterOutOfRange { .. } => "ParameterOutOfRange",
                E::PathTooCoarse { .. } => "PathTooCoarse",
                E::KernelMismatch { .. } => "KernelMismatch",
                E::IndexNonZero { .. } => "IndexNonZero",
                E::TraceMismatch { .. } => "TraceMismatch",
                E::NoGeodesicFound => "NoGeodesicFound",
                E::NotRsp { .. } => "NotRsp",
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Parse(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "rsphere",
    version,
    about = "Geometry of the projection sphere of a matrix algebra: geodesics, logs, graphs, deformations"
)]
struct Cli {
    /// Override the base membership/rank tolerance (default 1e-8).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Seed for the randomized self-test.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Integration steps for the parallel-transport self-test.
    #[arg(long, global = true, default_value_t = 200)]
    steps: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the geodesic generated by a tangent block over a t-grid.
    ///
    /// Emits a CSV table (t, distance to the base point, sin(t * speed))
    /// on stdout and, with --out-dir, one JSON matrix per grid point.
    Geodesic {
        /// JSON matrix of the tangent block a (n x n).
        #[arg(long)]
        generator: PathBuf,
        /// Grid: "start:end:count" or a comma-separated list of t values.
        #[arg(long, default_value = "0:1:11")]
        grid: String,
        /// Directory for the per-sample projection matrices.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Logarithm from projection p to projection q, with the distance and
    /// the branch used (closed-form at the base point, general otherwise).
    Logmap {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        /// Write the anti-Hermitian generator to this JSON file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finsler distance between two projections.
    Dist {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
    },
    /// Graph projection of an operator.
    GraphProj {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bounded-deformation sweep towards an operator's graph: CSV with
    /// columns t, ||A(t)||, tan(t arctan ||T||), accumulated length,
    /// distance to the endpoint.
    Deform {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 11)]
        samples: usize,
    },
    /// Differentiation-operator sweep on a truncated Fourier basis: CSV
    /// with columns t, truncated norm, analytic limit, subspace gap.
    Diffop {
        /// Truncation frequency N (basis -N..N).
        #[arg(long)]
        max_freq: usize,
        #[arg(long, default_value = "0.1:0.9:9")]
        grid: String,
    },
    /// Kernel dimension and conjugate-parameter index of a matrix.
    Jacobi {
        #[arg(long)]
        input: PathBuf,
    },
    /// Move a projection inside the principal chart along a geodesic,
    /// within a given distance.
    Density {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded randomized invariant checks.
    Selftest,
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error[{}]: {}", e.name(), e.message());
            std::process::exit(e.exit_code());
        }
    }
}

fn tolerances(cli: &Cli) -> Tolerances {
    match cli.tol {
        Some(t) => Tolerances {
            membership: t,
            rank_rel: t,
            projection_accept: (t * 100.0).max(1e-10),
            ..Tolerances::default()
        },
        None => Tolerances::default(),
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |m: String| CliError::Parse(m);
    let mut values: Vec<f64> = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad(format!("grid '{spec}' is not start:end:count")));
        }
        let start: f64 =
            parts[0].parse().map_err(|_| bad(format!("bad grid start '{}'", parts[0])))?;
        let end: f64 =
            parts[1].parse().map_err(|_| bad(format!("bad grid end '{}'", parts[1])))?;
        let count: usize =
            parts[2].parse().map_err(|_| bad(format!("bad grid count '{}'", parts[2])))?;
        if count < 1 {
            return Err(bad("grid count must be at least 1".into()));
        }
        if count == 1 {
            vec![start]
        } else {
            (0..count)
                .map(|k| start + (end - start) * k as f64 / (count as f64 - 1.0))
                .collect()
        }
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad(format!("bad grid value '{s}'"))))
            .collect::<Result<_, _>>()?
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(bad("grid values must be finite".into()));
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(values)
}

fn read_projection(path: &Path, tol: &Tolerances) -> Result<SphereProjection, CliError> {
    let m = read_matrix(path)?;
    Ok(SphereProjection::try_new(m, tol)?)
}

fn emit_matrix(m: &CMat, out: &Option<PathBuf>) -> Result<(), CliError> {
    let doc = MatrixDocument::from_matrix(m);
    match out {
        Some(path) => doc.write(path),
        None => {
            println!("{}", serde_json::to_string(&doc).expect("serializes"));
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let tol = tolerances(cli);
    match &cli.command {
        Command::Geodesic { generator, grid, out_dir } => {
            let a = read_matrix(generator)?;
            if a.nrows() != a.ncols() {
                return Err(CliError::Parse(format!(
                    "generator must be square, got {}x{}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            let grid = parse_grid(grid)?;
            let x = TangentVector::new(a);
            let speed = x.norm();
            let base = SphereProjection::base_point(x.algebra_dim());
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(dir).map_err(|e| {
                    CliError::Parse(format!("cannot create {}: {e}", dir.display()))
                })?;
            }
            let mut table = SweepTable::new(&["t", "dist_to_base", "sin_law"]);
            for (k, &t) in grid.iter().enumerate() {
                let g = manifold::geodesic_eval(&x, t);
                table.push_row(&[t, norm_distance(&g, &base), (t * speed).sin()]);
                if let Some(dir) = out_dir {
                    MatrixDocument::from_matrix(g.matrix())
                        .write(&dir.join(format!("geodesic_{k:04}.json")))?;
                }
            }
            let stdout = std::io::stdout();
            table.write_csv(&mut stdout.lock()).expect("stdout");
            if let Some(dir) = out_dir {
                let mut f = std::fs::File::create(dir.join("sweep.csv"))
                    .map_err(|e| CliError::Parse(e.to_string()))?;
                table.write_csv(&mut f).map_err(|e| CliError::Parse(e.to_string()))?;
            }
            Ok(0)
        }
        Command::Logmap { p, q, out } => {
            let p = read_projection(p, &tol)?;
            let q = read_projection(q, &tol)?;
            let at_base =
                norm_distance(&p, &SphereProjection::base_point(p.algebra_dim()))
                    <= tol.projection_accept;
            let in_closed_domain = min_eig_hermitian(&q.block(0, 0)) > 0.5;
            let (branch, gen) = if at_base && in_closed_domain {
                ("closed-form", log_p0(&q)?.tilde())
            } else {
                ("general", log_general(&p, &q)?)
            };
            let dist = op_norm_hermitian(&(&gen * Complex64::new(0.0, 1.0)));
            if let Some(path) = out {
                MatrixDocument::from_matrix(&gen).write(path)?;
            }
            let mut obj = serde_json::Map::new();
            obj.insert("branch".into(), branch.into());
            obj.insert("dist".into(), dist.into());
            if out.is_none() {
                obj.insert(
                    "generator".into(),
                    serde_json::to_value(MatrixDocument::from_matrix(&gen)).unwrap(),
                );
            }
            println!("{}", serde_json::Value::Object(obj));
            Ok(0)
        }
        Command::Dist { p, q } => {
            let p = read_projection(p, &tol)?;
            let q = read_projection(q, &tol)?;
            println!("{}", format_sig(finsler_dist(&p, &q)?));
            Ok(0)
        }
        Command::GraphProj { input, out } => {
            let t = read_matrix(input)?;
            if t.nrows() != t.ncols() {
                return Err(CliError::Parse(format!(
                    "operator must be square, got {}x{}",
                    t.nrows(),
                    t.ncols()
                )));
            }
            emit_matrix(opgraph::proj_graph(&t).matrix(), out)?;
            Ok(0)
        }
        Command::Deform { input, samples } => {
            let t_op = read_matrix(input)?;
            if *samples < 2 {
                return Err(CliError::Lib(rsphere::Error::ParameterOutOfRange {
                    value: *samples as f64,
                    range: "samples >= 2",
                }));
            }
            let geo = opgraph::minimal_geodesic_to_graph(&t_op);
            let norm_t = op_norm(&t_op);
            let mut table =
                SweepTable::new(&["t", "norm", "norm_law", "length_so_far", "dist_to_end"]);
            let mut length = 0.0f64;
            let mut prev: Option<SphereProjection> = None;
            for k in 0..*samples {
                let t = k as f64 / (*samples as f64 - 1.0);
                let a_t = if t < 1.0 {
                    opgraph::deformation_schedule(&t_op, t)?
                } else {
                    t_op.clone()
                };
                let point = geo.evaluate(t);
                if let Some(p) = &prev {
                    length += norm_distance(p, &point);
                }
                let dist_to_end = (1.0 - t) * geo.speed();
                table.push_row(&[t, op_norm(&a_t), (t * norm_t.atan()).tan(), length, dist_to_end]);
                prev = Some(point);
            }
            let stdout = std::io::stdout();
            table.write_csv(&mut stdout.lock()).expect("stdout");
            Ok(0)
        }
        Command::Diffop { max_freq, grid } => {
            let trunc = spectral::FourierTruncation::new(*max_freq)?;
            let grid = parse_grid(grid)?;
            let mut table =
                SweepTable::new(&["t", "truncated_norm", "analytic_limit", "subspace_gap"]);
            for &t in &grid {
                let g = spectral::norm_growth(&trunc, t)?;
                let gap = spectral::diff_subspace_gap(&trunc, t)?;
                table.push_row(&[t, g.truncated_norm, g.analytic_limit, gap]);
            }
            let stdout = std::io::stdout();
            table.write_csv(&mut stdout.lock()).expect("stdout");
            Ok(0)
        }
        Command::Jacobi { input } => {
            let f = read_matrix(input)?;
            let (dim_ker, dim_coker) = spectral::kernel_dims(&f);
            if dim_ker != dim_coker {
                return Err(CliError::Lib(rsphere::Error::IndexNonZero { dim_ker, dim_coker }));
            }
            let index = spectral::conjugate_index(&f)?;
            println!("{{\"kernel_dim\":{dim_ker},\"conjugate_index\":{index}}}");
            Ok(0)
        }
        Command::Density { input, eps, out } => {
            let q = read_projection(input, &tol)?;
            let q0 = opgraph::densify(&q, *eps)?;
            let base = SphereProjection::base_point(q.algebra_dim());
            let d_target = norm_distance(&q0, &q);
            let d_base = norm_distance(&q0, &base);
            emit_matrix(q0.matrix(), out)?;
            let mut msg = std::io::stderr();
            writeln!(
                msg,
                "dist_to_target = {}  dist_to_base = {}",
                format_sig(d_target),
                format_sig(d_base)
            )
            .ok();
            Ok(0)
        }
        Command::Selftest => {
            if selftest::run(cli.seed, cli.steps) {
                Ok(0)
            } else {
                Ok(1)
            }
        }
    }
}
