use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use knotcert::crofton::{bridge_certificate, crofton_estimate, maxima_average, CroftonMode};
use knotcert::curvature::{angular_length, total_curvature};
use knotcert::diagram::{axis_or_generic_diagram, build_diagram, coloring_space, color_faces, render_svg, tricolorable, KnotDiagram, SvgStyle};
use knotcert::geom::{generate, io, KnotKind};
use knotcert::hull2::{in_second_hull, second_hull_witness, HullVerdict};
use knotcert::isotopy::{greedy_simplify, unknot_by_height};
use knotcert::quadrisecant::{find_quadrisecants, OrderType, QuadFilter};
use knotcert::verify::{verify, Verdict, VerifyOptions};
use knotcert::{Direction, KnotError, PolygonalKnot, Vec3};

const EXIT_USAGE: u8 = 1;
const EXIT_FAIL: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

/// Certificates for the total curvature of polygonal knots.
#[derive(Parser, Debug)]
#[command(name = "knotcert", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Incidence tolerance relative to the bounding-box diagonal.
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Write a JSON result to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Write an SVG drawing to this path.
    #[arg(long, global = true, value_name = "PATH")]
    svg: Option<PathBuf>,
    /// Write the primary output (a knot) to this path.
    #[arg(short = 'o', long = "output", global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Record wall-clock time per check in verification reports.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a fixture knot.
    Generate(GenerateArgs),
    /// Print the total curvature.
    Curvature {
        knot: PathBuf,
        /// Also print the angular length seen from this point.
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        point: Option<Vec3>,
    },
    /// Monte Carlo estimates of the total curvature from projections.
    Crofton {
        knot: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Both)]
        mode: ModeArg,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        /// Sample size for the mean number of local maxima of height functions.
        #[arg(long, default_value_t = 10_000)]
        maxima_samples: usize,
    },
    /// Search for a height function with a single local maximum and convert it into moves.
    Bridge {
        knot: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// Remove vertices by triangular moves.
    Simplify {
        knot: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Reduce along the height function of this direction instead of greedily.
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        direction: Option<Vec3>,
    },
    /// Project to a knot diagram.
    Diagram {
        knot: PathBuf,
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        direction: Option<Vec3>,
        /// Fill faces with their chessboard colors in the SVG.
        #[arg(long)]
        faces: bool,
    },
    /// Search for a nontrivial Fox 3-coloring of a diagram.
    Tricolor {
        knot: PathBuf,
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        direction: Option<Vec3>,
    },
    /// Find lines meeting the knot in four points.
    Quadrisecant {
        knot: PathBuf,
        /// Keep only alternating quadrisecants.
        #[arg(long)]
        alternating: bool,
        /// Print at most this many records.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Search for a point every plane through which crosses the knot at least four times.
    Secondhull {
        knot: PathBuf,
        #[arg(long, default_value_t = 9)]
        grid: usize,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        /// Test this point instead of searching the grid.
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        point: Option<Vec3>,
    },
    /// Run the full certificate suite.
    Verify {
        knot: PathBuf,
        #[arg(long, default_value_t = 200_000)]
        crofton_samples: usize,
        #[arg(long, default_value_t = 10_000)]
        maxima_samples: usize,
        #[arg(long, default_value_t = 10_000)]
        bridge_budget: usize,
        #[arg(long, default_value_t = 10_000)]
        greedy_budget: usize,
        #[arg(long, default_value_t = 9)]
        hull_grid: usize,
        #[arg(long, default_value_t = 10_000)]
        hull_budget: usize,
        #[arg(long, default_value_t = 100_000)]
        sphere_samples: usize,
    },
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Vertex count (convex_ngon, random_closed).
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 2)]
    p: u32,
    #[arg(long, default_value_t = 3)]
    q: u32,
    #[arg(long, default_value_t = 60)]
    samples: usize,
    #[arg(long, default_value_t = 2.0)]
    major: f64,
    #[arg(long, default_value_t = 1.0)]
    minor: f64,
    /// Number of random moves (scrambled_unknot).
    #[arg(long, default_value_t = 100)]
    steps: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KindArg {
    #[value(name = "convex_ngon")]
    ConvexNgon,
    #[value(name = "torus_knot")]
    TorusKnot,
    #[value(name = "trefoil")]
    Trefoil,
    #[value(name = "random_closed")]
    RandomClosed,
    #[value(name = "scrambled_unknot")]
    ScrambledUnknot,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum ModeArg {
    Plane,
    Line,
    Both,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Domain(KnotError),
}

impl From<KnotError> for CliError {
    fn from(e: KnotError) -> Self {
        CliError::Domain(e)
    }
}

type CliResult = Result<u8, CliError>;

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match parts {
        Ok(v) if v.len() == 3 => Ok(Vec3::new(v[0], v[1], v[2])),
        _ => Err(format!("expected x,y,z, got `{s}`")),
    }
}

fn load(path: &Path, g: &Global) -> Result<PolygonalKnot, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let vertices = io::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let knot = match g.eps {
        Some(eps) => PolygonalKnot::with_rel_eps(vertices, eps),
        None => PolygonalKnot::new(vertices),
    };
    knot.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(g: &Global, value: &T) -> Result<(), CliError> {
    if let Some(path) = &g.json {
        let mut text = serde_json::to_string_pretty(value).expect("result serializes");
        text.push('\n');
        write_file(path, &text)?;
    }
    Ok(())
}

fn write_knot(path: &Path, knot: &PolygonalKnot) -> Result<(), CliError> {
    let text = match path.extension().and_then(|e| e.to_str()) {
        Some("txt" | "xyz") => io::to_text(knot),
        _ => io::to_json(knot) + "\n",
    };
    write_file(path, &text)
}

fn direction(v: Option<Vec3>) -> Result<Option<Direction>, CliError> {
    v.map(|v| Direction::new(v).map_err(|e| CliError::Usage(e.to_string()))).transpose()
}

fn diagram_for(knot: &PolygonalKnot, dir: Option<Vec3>, g: &Global) -> Result<KnotDiagram, CliError> {
    Ok(match direction(dir)? {
        Some(u) => build_diagram(knot, Some(&u), g.seed)?,
        None => axis_or_generic_diagram(knot, g.seed)?,
    })
}

fn run(cli: Cli) -> CliResult {
    let g = &cli.global;
    match cli.command {
        Command::Generate(a) => {
            let kind = match a.kind {
                KindArg::ConvexNgon => KnotKind::ConvexNgon { n: a.n, radius: a.radius },
                KindArg::TorusKnot => {
                    KnotKind::TorusKnot { p: a.p, q: a.q, samples: a.samples, major: a.major, minor: a.minor }
                }
                KindArg::Trefoil => KnotKind::TREFOIL,
                KindArg::RandomClosed => KnotKind::RandomClosed { n: a.n },
                KindArg::ScrambledUnknot => KnotKind::ScrambledUnknot { steps: a.steps },
            };
            let knot = generate(kind, g.seed).map_err(|e| CliError::Usage(e.to_string()))?;
            let knot = match g.eps {
                Some(eps) => knot.rescaled_eps(eps)?,
                None => knot,
            };
            match &g.output {
                Some(path) => write_knot(path, &knot)?,
                None => println!("{}", io::to_json(&knot)),
            }
            Ok(0)
        }
        Command::Curvature { knot, point } => {
            let knot = load(&knot, g)?;
            let profile = total_curvature(&knot);
            println!("{:.9}", profile.total);
            let psi = point.map(|o| angular_length(&knot, &o)).transpose()?;
            if let Some(psi) = psi {
                println!("angular length {psi:.9}");
            }
            write_json(
                g,
                &serde_json::json!({
                    "total_curvature": profile.total,
                    "over_pi": profile.total / PI,
                    "angles": profile.angles,
                    "angular_length": psi,
                }),
            )?;
            Ok(0)
        }
        Command::Crofton { knot, mode, samples, maxima_samples } => {
            let knot = load(&knot, g)?;
            let phi = total_curvature(&knot).total;
            let modes: &[CroftonMode] = match mode {
                ModeArg::Plane => &[CroftonMode::PlaneProjection],
                ModeArg::Line => &[CroftonMode::LineProjection],
                ModeArg::Both => &[CroftonMode::PlaneProjection, CroftonMode::LineProjection],
            };
            println!("total curvature {phi:.9}");
            let mut estimates = Vec::new();
            for &m in modes {
                let est = crofton_estimate(&knot, m, samples, g.seed)?;
                println!(
                    "{:<16} mean {:.9}  stderr {:.3e}  deviation {:.2} sigma",
                    serde_json::to_value(m).unwrap().as_str().unwrap_or_default(),
                    est.mean,
                    est.stderr,
                    (est.mean - phi).abs() / est.stderr.max(f64::MIN_POSITIVE)
                );
                estimates.push(est);
            }
            let maxima = if maxima_samples > 0 {
                let avg = maxima_average(&knot, maxima_samples, g.seed)?;
                println!("mean local maxima {:.6}  stderr {:.3e}  expected {:.6}", avg.mean, avg.stderr, phi / (2.0 * PI));
                Some(avg)
            } else {
                None
            };
            write_json(g, &serde_json::json!({ "total_curvature": phi, "estimates": estimates, "maxima": maxima }))?;
            Ok(0)
        }
        Command::Bridge { knot, budget } => {
            let knot = load(&knot, g)?;
            match bridge_certificate(&knot, budget, g.seed) {
                Some(cert) => {
                    let u = *cert.direction;
                    println!("single maximum along ({:.9}, {:.9}, {:.9}); {} moves to a triangle", u.x, u.y, u.z, cert.moves.moves.len());
                    write_json(g, &cert)?;
                    Ok(0)
                }
                None => {
                    println!("no single-maximum direction found in {budget} directions");
                    write_json(g, &serde_json::json!({ "found": false, "budget": budget }))?;
                    Ok(EXIT_INCONCLUSIVE)
                }
            }
        }
        Command::Simplify { knot, budget, direction: dir } => {
            let knot = load(&knot, g)?;
            let seq = match direction(dir)? {
                Some(u) => unknot_by_height(&knot, &u)?,
                None => greedy_simplify(&knot, budget).1,
            };
            let end = &seq.final_knot;
            println!("{} -> {} vertices in {} moves", knot.len(), end.len(), seq.moves.len());
            if let Some(path) = &g.output {
                write_knot(path, end)?;
            }
            write_json(g, &seq)?;
            if seq.reaches_triangle() {
                println!("reached a triangle: trivial");
                Ok(0)
            } else {
                println!("stalled: inconclusive");
                Ok(EXIT_INCONCLUSIVE)
            }
        }
        Command::Diagram { knot, direction: dir, faces } => {
            let knot = load(&knot, g)?;
            let d = diagram_for(&knot, dir, g)?;
            let coloring = color_faces(&d)?;
            println!("crossings {}", d.crossing_count());
            println!("faces {}", d.faces.len());
            println!("arcs {}", d.arcs.len());
            for o in &coloring.white_points {
                println!("white point ({:.6}, {:.6})  angular length {:.9}", o.x, o.y, d.planar_angular_length(o));
            }
            if let Some(path) = &g.svg {
                let style = SvgStyle { faces, marks: coloring.white_points.clone(), ..SvgStyle::default() };
                write_file(path, &render_svg(&d, &style))?;
            }
            if let Some(path) = &g.json {
                write_file(path, &(d.to_json() + "\n"))?;
            }
            Ok(0)
        }
        Command::Tricolor { knot, direction: dir } => {
            let knot = load(&knot, g)?;
            let d = diagram_for(&knot, dir, g)?;
            let coloring = tricolorable(&d);
            let dim = coloring_space(&d).len();
            println!("crossings {}  arcs {}  coloring space dimension {dim}", d.crossing_count(), d.arcs.len());
            match &coloring {
                Some(c) => println!("tricolorable: true ({} colors) {:?}", c.colors_used(), c.colors),
                None => println!("tricolorable: false"),
            }
            write_json(
                g,
                &serde_json::json!({
                    "crossings": d.crossing_count(),
                    "arcs": d.arcs.len(),
                    "dimension": dim,
                    "tricolorable": coloring.is_some(),
                    "coloring": coloring,
                }),
            )?;
            Ok(0)
        }
        Command::Quadrisecant { knot, alternating, limit } => {
            let knot = load(&knot, g)?;
            let filter = if alternating { QuadFilter::Alternating } else { QuadFilter::All };
            let mut scan = find_quadrisecants(&knot, filter)?;
            let alt = scan.records.iter().filter(|r| r.order == OrderType::Alternating).count();
            println!("{} quadrisecants ({alt} alternating) from {} edge quadruples", scan.records.len(), scan.tuples);
            if let Some(limit) = limit {
                scan.records.truncate(limit);
            }
            for r in &scan.records {
                let edges: Vec<usize> = r.hits.iter().map(|h| h.edge).collect();
                println!("  {:?} edges {:?} residual {:.2e}", r.order, edges, r.residual);
            }
            write_json(g, &scan)?;
            Ok(0)
        }
        Command::Secondhull { knot, grid, budget, point } => {
            let knot = load(&knot, g)?;
            if let Some(x) = point {
                let w = in_second_hull(&knot, &x, budget, g.seed);
                println!("{:?}: minimum crossing count {} over {} planes", w.verdict, w.min_count, w.planes_tested);
                write_json(g, &w)?;
                return Ok(if w.verdict == HullVerdict::InsideSampled { 0 } else { EXIT_INCONCLUSIVE });
            }
            match second_hull_witness(&knot, grid, budget, g.seed)? {
                Some((o, w)) => {
                    let psi = angular_length(&knot, &o)?;
                    println!("witness ({:.9}, {:.9}, {:.9}) minimum crossing count {}", o.x, o.y, o.z, w.min_count);
                    println!("angular length {psi:.9}");
                    write_json(g, &serde_json::json!({ "found": true, "point": o, "witness": w, "angular_length": psi }))?;
                    Ok(0)
                }
                None => {
                    println!("no witness on a {grid}^3 grid");
                    write_json(g, &serde_json::json!({ "found": false }))?;
                    Ok(EXIT_INCONCLUSIVE)
                }
            }
        }
        Command::Verify {
            knot,
            crofton_samples,
            maxima_samples,
            bridge_budget,
            greedy_budget,
            hull_grid,
            hull_budget,
            sphere_samples,
        } => {
            let knot = load(&knot, g)?;
            let opts = VerifyOptions {
                seed: g.seed,
                crofton_samples,
                maxima_samples,
                bridge_budget,
                greedy_budget,
                hull_grid,
                hull_budget,
                sphere_samples,
                timings: g.timings,
            };
            let report = verify(&knot, &opts);
            for c in &report.checks {
                let v = serde_json::to_value(c.verdict).unwrap();
                println!("{:<13} {}", v.as_str().unwrap_or_default(), c.name);
            }
            println!("status {:?}", report.status);
            println!("overall {:?}", report.overall);
            if let Some(path) = &g.json {
                write_file(path, &(report.to_json() + "\n"))?;
            }
            Ok(match report.overall {
                Verdict::Pass => 0,
                Verdict::Fail => EXIT_FAIL,
                Verdict::Inconclusive => EXIT_INCONCLUSIVE,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            let code = match e {
                KnotError::RetryBudgetExhausted(_) | KnotError::NoGenericDirection(_) | KnotError::TooManyEdges(..) => {
                    EXIT_INCONCLUSIVE
                }
                _ => EXIT_FAIL,
            };
            ExitCode::from(code)
        }
    }
}
