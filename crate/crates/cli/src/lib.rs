//! Command-line front end: builds surfaces, runs the analyses and writes JSON,
//! text tables or SVG.

pub mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use flatsurf::builders::{Family, FamilySpec};
use flatsurf::developing::{first_return, trace, unfold_disk, SurfacePoint, TraceOutcome};
use flatsurf::geometry::{parse_scalar, Point2, Scalar, Segment, Vec2};
use flatsurf::saddle::{enumerate, unfold_at_class, SaddleConnection};
use flatsurf::topology::{
    connection_from_point, cut_along, family_report, is_non_separating, witness_infinite_genus, FamilyReport,
    ReportOptions, WitnessBudget,
};
use flatsurf::{svg, Error, Genus, Surface, SurfaceComplex};

pub use config::CliConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "flatsurf", version, about = "Exact analysis of translation surfaces built from polygons")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GlobalOpts {
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Maximum developed charts per unfolding [default: 1000000].
    #[arg(long, global = true, env = "FLATSURF_CHART_CAP")]
    pub chart_cap: Option<usize>,
    /// Dyadic grid depth for generalized immersion radii [default: 6].
    #[arg(long, global = true)]
    pub grid_depth: Option<u32>,
    /// TOML file with chart_cap, grid_depth and json.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Treat this vertex class as singular (repeatable).
    #[arg(long = "mark", global = true)]
    pub marks: Vec<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a surface of a named family and print its JSON.
    Build {
        /// torus, l-shaped, chamanara, icicled or nested-cylinders.
        family: String,
        #[arg(long, default_value_t = 1)]
        depth: u32,
        /// Slit height of the nested cylinders, as p/q [default: 4].
        #[arg(long)]
        height: Option<String>,
    },
    /// Check the gluing structure of a surface file.
    Validate { surface: PathBuf },
    /// Genus from the Euler characteristic.
    Genus { surface: PathBuf },
    /// Vertex classes with cone angles and boundary sectors.
    Singularities { surface: PathBuf },
    /// Follow a straight line from a point.
    Trace {
        surface: PathBuf,
        #[command(flatten)]
        ray: RayArgs,
    },
    /// First return of the flow to a transversal segment.
    FirstReturn {
        surface: PathBuf,
        #[arg(long)]
        polygon: usize,
        /// Segment as `x0,y0:x1,y1`.
        #[arg(long)]
        transversal: String,
        /// Start point on the transversal, `x,y`.
        #[arg(long)]
        from: String,
        #[arg(long)]
        dir: String,
        #[arg(long, default_value = "100")]
        max_param: String,
    },
    /// Saddle connections leaving a singular class.
    Saddles {
        surface: PathBuf,
        #[arg(long)]
        class: usize,
        #[arg(long, default_value = "4")]
        max_len_sq: String,
        /// Also draw the unfolding with the connections.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Cut along saddle connections and report the components.
    Cut {
        surface: PathBuf,
        /// Start class for `--holonomy` selections.
        #[arg(long)]
        class: Option<usize>,
        /// Shortest connection from `--class` with this holonomy, `x,y` (repeatable).
        #[arg(long)]
        holonomy: Vec<String>,
        /// Connection leaving the corner at a point, `x,y:dx,dy` (repeatable).
        #[arg(long)]
        ray: Vec<String>,
        /// Exit 1 unless the set is non-separating.
        #[arg(long)]
        require_non_separating: bool,
    },
    /// Greedy search for disjoint non-separating self-connections.
    Witness {
        surface: PathBuf,
        #[arg(long)]
        class: usize,
        #[arg(long)]
        target: usize,
        #[arg(long, default_value = "1")]
        max_len_sq: String,
    },
    /// Per-depth genus, singularities and shortest connections of a family.
    FamilyReport {
        family: String,
        /// `a-b` or a comma list.
        #[arg(long, default_value = "1-3")]
        depths: String,
        #[arg(long)]
        witness_target: Option<usize>,
        #[arg(long, default_value = "4")]
        probe_max_sq: String,
        #[arg(long, default_value = "1")]
        max_len_sq: String,
    },
    /// Draw a surface, a traced path or an unfolding.
    ExportSvg {
        surface: PathBuf,
        #[arg(long, value_enum, default_value_t = SvgKind::Surface)]
        kind: SvgKind,
        #[arg(long)]
        polygon: Option<usize>,
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        dir: Option<String>,
        #[arg(long, default_value = "10")]
        max_param: String,
        #[arg(long, default_value = "1")]
        radius_sq: String,
    },
    /// Print the effective configuration as TOML.
    Config,
}

#[derive(Args, Debug)]
pub struct RayArgs {
    #[arg(long)]
    pub polygon: usize,
    /// Start point `x,y`.
    #[arg(long)]
    pub point: String,
    /// Direction `dx,dy`.
    #[arg(long)]
    pub dir: String,
    #[arg(long, default_value = "10")]
    pub max_param: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SvgKind {
    Surface,
    Trace,
    Unfolding,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    /// A requested check ran and failed; the message goes to stderr.
    Verification(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(Error::BudgetExceeded(_)) => EXIT_BUDGET,
            CliError::Core(_) => EXIT_USAGE,
            CliError::Verification(_) => EXIT_VERIFY,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Verification(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut ctx = match Context::new(&cli.global) {
        Ok(ctx) => ctx,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            return e.exit_code();
        }
    };
    let result = dispatch(&cli.command, &mut ctx);
    let flushed = ctx.flush(stdout);
    match flushed.and(result) {
        Ok(code) => {
            if let Some(note) = ctx.note {
                let _ = writeln!(stderr, "{note}");
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

struct Context {
    config: CliConfig,
    output: Option<PathBuf>,
    marks: Vec<usize>,
    buffer: String,
    note: Option<String>,
}

impl Context {
    fn new(g: &GlobalOpts) -> CliResult<Self> {
        let mut config = match &g.config {
            Some(path) => CliConfig::load(path).map_err(CliError::Usage)?,
            None => CliConfig::default(),
        };
        if let Some(cap) = g.chart_cap {
            config.chart_cap = cap;
        }
        if let Some(d) = g.grid_depth {
            config.grid_depth = d;
        }
        config.json |= g.json;
        if config.chart_cap == 0 {
            return Err(CliError::Usage("chart cap must be positive".into()));
        }
        Ok(Context {
            config,
            output: g.output.clone(),
            marks: g.marks.clone(),
            buffer: String::new(),
            note: None,
        })
    }

    fn emit_json<T: Serialize>(&mut self, value: &T) -> CliResult<()> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Core(e.into()))?;
        self.buffer.push_str(&text);
        self.buffer.push('\n');
        Ok(())
    }

    fn flush(&mut self, stdout: &mut dyn Write) -> CliResult<i32> {
        let text = std::mem::take(&mut self.buffer);
        match &self.output {
            Some(path) => write_file(path, &text)?,
            None => stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Usage(format!("stdout: {e}")))?,
        }
        Ok(EXIT_OK)
    }

    fn load(&self, path: &Path) -> CliResult<Surface> {
        let complex = load_complex(path)?;
        let report = complex.validate();
        if !report.is_valid() {
            return Err(CliError::Verification(format!(
                "{} is not a valid surface: {}",
                path.display(),
                report.violations.join("; ")
            )));
        }
        Ok(Surface::with_marked(complex, &self.marks)?)
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_complex(path: &Path) -> CliResult<SurfaceComplex> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(SurfaceComplex::from_json(&text)?)
}

/// Text rendering; integers without a denominator.
fn show(s: &Scalar) -> String {
    s.to_string()
}

fn scalar(text: &str) -> CliResult<Scalar> {
    Ok(parse_scalar(text)?)
}

fn pair(text: &str) -> CliResult<(Scalar, Scalar)> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("expected `x,y`, got {text:?}")))?;
    Ok((scalar(a)?, scalar(b)?))
}

fn point(text: &str) -> CliResult<Point2> {
    let (x, y) = pair(text)?;
    Ok(Point2::new(x, y))
}

fn vector(text: &str) -> CliResult<Vec2> {
    let (x, y) = pair(text)?;
    Ok(Vec2::new(x, y))
}

fn family(text: &str) -> CliResult<Family> {
    text.parse::<Family>().map_err(|e| CliError::Usage(e.to_string()))
}

fn depths(text: &str) -> CliResult<Vec<u32>> {
    let bad = || CliError::Usage(format!("bad depth list {text:?}"));
    if let Some((a, b)) = text.split_once('-') {
        let a: u32 = a.trim().parse().map_err(|_| bad())?;
        let b: u32 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',').map(|d| d.trim().parse().map_err(|_| bad())).collect()
}

fn dispatch(command: &Command, ctx: &mut Context) -> CliResult<i32> {
    match command {
        Command::Build { family: f, depth, height } => {
            let mut spec = FamilySpec::new(family(f)?, *depth);
            if let Some(h) = height {
                spec.height = scalar(h)?;
            }
            let complex = spec.build()?;
            ctx.buffer.push_str(&complex.to_json()?);
            ctx.buffer.push('\n');
            Ok(EXIT_OK)
        }
        Command::Validate { surface } => {
            let report = load_complex(surface)?.validate();
            if ctx.config.json {
                ctx.emit_json(&report)?;
            } else if report.is_valid() {
                ctx.buffer.push_str("valid\n");
            } else {
                for v in &report.violations {
                    writeln!(ctx.buffer, "{v}").unwrap();
                }
            }
            Ok(if report.is_valid() { EXIT_OK } else { EXIT_VERIFY })
        }
        Command::Genus { surface } => {
            let s = ctx.load(surface)?;
            let genus = s.complex().genus()?;
            if ctx.config.json {
                #[derive(Serialize)]
                struct Out {
                    #[serde(flatten)]
                    genus: Genus,
                    euler_characteristic: i64,
                }
                ctx.emit_json(&Out {
                    genus,
                    euler_characteristic: s.complex().euler_characteristic(),
                })?;
            } else {
                match genus {
                    Genus::Closed { genus } => writeln!(ctx.buffer, "{genus}"),
                    Genus::WithBoundary { genus, boundary_cycles } => {
                        writeln!(ctx.buffer, "{genus} ({boundary_cycles} boundary cycles)")
                    }
                }
                .unwrap();
            }
            Ok(EXIT_OK)
        }
        Command::Singularities { surface } => {
            let s = ctx.load(surface)?;
            if ctx.config.json {
                #[derive(Serialize)]
                struct Row<'a> {
                    #[serde(flatten)]
                    cone: &'a flatsurf::ConeData,
                    singular: bool,
                    corners: &'a [flatsurf::CornerRef],
                }
                let rows: Vec<Row> = s
                    .cones()
                    .iter()
                    .map(|c| Row {
                        cone: c,
                        singular: s.is_singular(c.class_id),
                        corners: &s.classes()[c.class_id].corners,
                    })
                    .collect();
                ctx.emit_json(&rows)?;
            } else {
                writeln!(ctx.buffer, "{:>5}  {:<10}  {:>8}  corners", "class", "kind", "angle").unwrap();
                for c in s.cones() {
                    let (kind, angle) = match &c.kind {
                        flatsurf::ConeKind::InteriorCone { multiplicity } => ("cone", format!("{}pi", 2 * multiplicity)),
                        flatsurf::ConeKind::Boundary { half_turns, exact_multiple, .. } => {
                            ("boundary", format!("{}{half_turns}pi", if *exact_multiple { "" } else { ">" }))
                        }
                    };
                    let mark = if s.is_singular(c.class_id) { "*" } else { " " };
                    writeln!(
                        ctx.buffer,
                        "{:>4}{mark}  {kind:<10}  {angle:>8}  {}",
                        c.class_id,
                        s.classes()[c.class_id].corners.len()
                    )
                    .unwrap();
                }
            }
            Ok(EXIT_OK)
        }
        Command::Trace { surface, ray } => {
            let s = ctx.load(surface)?;
            let out = run_trace(&s, ray)?;
            if ctx.config.json {
                ctx.emit_json(&out)?;
            } else {
                let p = out.path();
                writeln!(ctx.buffer, "outcome  {}", out.name()).unwrap();
                writeln!(ctx.buffer, "param    {}", show(&p.total_param)).unwrap();
                writeln!(ctx.buffer, "legs     {}", p.legs.len()).unwrap();
                if let TraceOutcome::Closed { period, .. } = &out {
                    writeln!(ctx.buffer, "period   {}", show(period)).unwrap();
                }
                let end = p.point_at(&p.total_param);
                writeln!(ctx.buffer, "end      polygon {} at {}", end.polygon, end.position).unwrap();
            }
            Ok(EXIT_OK)
        }
        Command::FirstReturn {
            surface,
            polygon,
            transversal,
            from,
            dir,
            max_param,
        } => {
            let s = ctx.load(surface)?;
            let (a, b) = transversal
                .split_once(':')
                .ok_or_else(|| CliError::Usage("transversal must be `x0,y0:x1,y1`".into()))?;
            let seg = Segment::new(point(a)?, point(b)?)?;
            let ret = first_return(&s, *polygon, &seg, &vector(dir)?, &point(from)?, &scalar(max_param)?)?;
            if ctx.config.json {
                ctx.emit_json(&ret)?;
            } else {
                match &ret {
                    Some(r) => writeln!(ctx.buffer, "returns at {} after {}", r.point.position, show(&r.param)),
                    None => writeln!(ctx.buffer, "no return within the budget"),
                }
                .unwrap();
            }
            Ok(EXIT_OK)
        }
        Command::Saddles {
            surface,
            class,
            max_len_sq,
            svg: svg_path,
        } => {
            let s = ctx.load(surface)?;
            let bound = scalar(max_len_sq)?;
            let limits = ctx.config.limits();
            let list = enumerate(&s, *class, &bound, &limits)?;
            if let Some(path) = svg_path {
                let u = unfold_at_class(&s, *class, &bound, &limits)?;
                let centered: Vec<SaddleConnection> = list.iter().map(centered_at_origin).collect();
                write_file(path, &svg::unfolding_svg(&s, &u, &centered))?;
            }
            if ctx.config.json {
                ctx.emit_json(&list)?;
            } else {
                write_connections(&mut ctx.buffer, &list);
            }
            Ok(EXIT_OK)
        }
        Command::Cut {
            surface,
            class,
            holonomy,
            ray,
            require_non_separating,
        } => {
            let s = ctx.load(surface)?;
            let set = select_connections(&s, *class, holonomy, ray, &ctx.config)?;
            let cut = cut_along(&s, &set)?;
            let verdict = is_non_separating(&s, &set)?;
            #[derive(Serialize)]
            struct Out<'a> {
                connections: &'a [SaddleConnection],
                component_count: usize,
                non_separating: bool,
                pieces: usize,
                euler_characteristic: i64,
                sides: &'a [flatsurf::topology::CutSides],
                witness: &'a [Option<Vec<usize>>],
            }
            let out = Out {
                connections: &set,
                component_count: cut.component_count,
                non_separating: verdict.non_separating,
                pieces: cut.pieces.polygons.len(),
                euler_characteristic: cut.pieces.euler_characteristic(),
                sides: &cut.side_map,
                witness: &verdict.witness,
            };
            if ctx.config.json {
                ctx.emit_json(&out)?;
            } else {
                write_connections(&mut ctx.buffer, &set);
                writeln!(ctx.buffer, "components      {}", out.component_count).unwrap();
                writeln!(ctx.buffer, "pieces          {}", out.pieces).unwrap();
                writeln!(ctx.buffer, "non-separating  {}", out.non_separating).unwrap();
            }
            if *require_non_separating && !verdict.non_separating {
                return Err(CliError::Verification(format!(
                    "the set separates the surface into {} components",
                    cut.component_count
                )));
            }
            Ok(EXIT_OK)
        }
        Command::Witness {
            surface,
            class,
            target,
            max_len_sq,
        } => {
            let s = ctx.load(surface)?;
            let budget = WitnessBudget {
                max_len_sq: scalar(max_len_sq)?,
                grid_depth: ctx.config.grid_depth,
                chart_cap: ctx.config.chart_cap,
            };
            let report = witness_infinite_genus(&s, *class, *target, &budget)?;
            if ctx.config.json {
                ctx.emit_json(&report)?;
            } else {
                writeln!(ctx.buffer, "{:>4}  {:>16}  {:>14}  {:>14}  non-separating", "step", "holonomy", "length_sq", "budget_sq")
                    .unwrap();
                for (i, st) in report.steps.iter().enumerate() {
                    writeln!(
                        ctx.buffer,
                        "{:>4}  {:>16}  {:>14}  {:>14}  {}",
                        i + 1,
                        st.holonomy.to_string(),
                        show(&st.length_sq),
                        show(&st.budget_sq),
                        st.non_separating
                    )
                    .unwrap();
                }
                writeln!(ctx.buffer, "verified {} of {}, genus >= {}", report.verified, report.target, report.genus_lower_bound)
                    .unwrap();
            }
            if !report.reached_target() {
                ctx.note = Some(format!("target {} not reached: {:?}", report.target, report.stop));
                return Ok(EXIT_VERIFY);
            }
            Ok(EXIT_OK)
        }
        Command::FamilyReport {
            family: f,
            depths: d,
            witness_target,
            probe_max_sq,
            max_len_sq,
        } => {
            let options = ReportOptions {
                probe_max_sq: scalar(probe_max_sq)?,
                witness_target: *witness_target,
                witness_budget: WitnessBudget {
                    max_len_sq: scalar(max_len_sq)?,
                    grid_depth: ctx.config.grid_depth,
                    chart_cap: ctx.config.chart_cap,
                },
            };
            let report = family_report(family(f)?, &depths(d)?, &options)?;
            if ctx.config.json {
                ctx.emit_json(&report)?;
            } else {
                write_family_table(&mut ctx.buffer, &report);
            }
            Ok(EXIT_OK)
        }
        Command::ExportSvg {
            surface,
            kind,
            polygon,
            point: pt,
            dir,
            max_param,
            radius_sq,
        } => {
            let s = ctx.load(surface)?;
            let need = |name: &str| CliError::Usage(format!("--kind {kind:?} needs --{name}").to_lowercase());
            let text = match kind {
                SvgKind::Surface => svg::surface_svg(&s),
                SvgKind::Trace => {
                    let ray = RayArgs {
                        polygon: polygon.ok_or_else(|| need("polygon"))?,
                        point: pt.clone().ok_or_else(|| need("point"))?,
                        dir: dir.clone().ok_or_else(|| need("dir"))?,
                        max_param: max_param.clone(),
                    };
                    svg::path_svg(&s, run_trace(&s, &ray)?.path())
                }
                SvgKind::Unfolding => {
                    let center = SurfacePoint::new(
                        polygon.ok_or_else(|| need("polygon"))?,
                        point(pt.as_deref().ok_or_else(|| need("point"))?)?,
                    );
                    let u = unfold_disk(&s, &center, &scalar(radius_sq)?, &ctx.config.limits())?;
                    svg::unfolding_svg(&s, &u, &[])
                }
            };
            ctx.buffer.push_str(&text);
            Ok(EXIT_OK)
        }
        Command::Config => {
            ctx.buffer.push_str(&ctx.config.to_toml());
            Ok(EXIT_OK)
        }
    }
}

fn run_trace(s: &Surface, ray: &RayArgs) -> CliResult<TraceOutcome> {
    let start = SurfacePoint::new(ray.polygon, point(&ray.point)?);
    Ok(trace(s, &start, &vector(&ray.dir)?, &scalar(&ray.max_param)?)?)
}

/// Shifts the developed path so it leaves the apex at the origin.
fn centered_at_origin(sc: &SaddleConnection) -> SaddleConnection {
    let mut sc = sc.clone();
    let shift = sc.path.start.position.to_vec();
    for leg in &mut sc.path.legs {
        leg.offset = &leg.offset - &shift;
    }
    sc
}

fn select_connections(
    s: &Surface,
    class: Option<usize>,
    holonomies: &[String],
    rays: &[String],
    config: &CliConfig,
) -> CliResult<Vec<SaddleConnection>> {
    if holonomies.is_empty() && rays.is_empty() {
        return Err(CliError::Usage("give at least one --holonomy or --ray".into()));
    }
    let mut set = Vec::new();
    if !holonomies.is_empty() {
        let class = class.ok_or_else(|| CliError::Usage("--holonomy needs --class".into()))?;
        let wanted = holonomies.iter().map(|h| vector(h)).collect::<CliResult<Vec<_>>>()?;
        let bound = wanted.iter().map(Vec2::norm_sq).max().expect("nonempty");
        let found = enumerate(s, class, &bound, &config.limits())?;
        for h in &wanted {
            let sc = found
                .iter()
                .find(|sc| &sc.holonomy == h)
                .ok_or_else(|| CliError::Usage(format!("no saddle connection from class {class} with holonomy {h}")))?;
            set.push(sc.clone());
        }
    }
    for r in rays {
        let (p, d) = r
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("expected `x,y:dx,dy`, got {r:?}")))?;
        let sc = connection_from_point(s, &point(p)?, &vector(d)?, &Scalar::from_integer(1_000_000.into()))?
            .ok_or_else(|| CliError::Usage(format!("no saddle connection along {r}")))?;
        set.push(sc);
    }
    Ok(set)
}

fn write_connections(buf: &mut String, list: &[SaddleConnection]) {
    writeln!(buf, "{:>5}  {:>5}  {:>16}  {:>14}  crossings", "from", "to", "holonomy", "length_sq").unwrap();
    for sc in list {
        writeln!(
            buf,
            "{:>5}  {:>5}  {:>16}  {:>14}  {}",
            sc.start_class,
            sc.end_class,
            sc.holonomy.to_string(),
            show(&sc.length_sq),
            sc.crossing_sequence.len()
        )
        .unwrap();
    }
}

fn write_family_table(buf: &mut String, report: &FamilyReport) {
    writeln!(buf, "family {}", report.family).unwrap();
    writeln!(
        buf,
        "{:>5}  {:>5}  {:>11}  {:>7}  {:>12}  {:>14}  {:>7}",
        "depth", "genus", "singular", "primary", "multiplicity", "shortest_sq", "witness"
    )
    .unwrap();
    let dash = || "-".to_string();
    for r in &report.rows {
        writeln!(
            buf,
            "{:>5}  {:>5}  {:>11}  {:>7}  {:>12}  {:>14}  {:>7}",
            r.depth,
            r.genus.value(),
            r.singularities.len(),
            r.primary_class.map_or_else(dash, |c| c.to_string()),
            r.primary_multiplicity.map_or_else(dash, |m| m.to_string()),
            r.shortest_self_connection_sq.as_ref().map_or_else(dash, show),
            r.witness_size.map_or_else(dash, |w| w.to_string())
        )
        .unwrap();
    }
    let t = &report.trends;
    writeln!(buf, "genus strictly increasing  {}", t.genus_strictly_increasing).unwrap();
    writeln!(buf, "genus constant             {}", t.genus_constant).unwrap();
    writeln!(buf, "shortest nonincreasing     {}", t.shortest_nonincreasing).unwrap();
    writeln!(buf, "multiplicity increasing    {}", t.multiplicity_increasing).unwrap();
}
