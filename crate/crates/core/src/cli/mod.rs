//! Command-line entry point: experiment commands, seeding, config files and run records.
//!
//! Exit codes are 0 on success, 1 on a domain or I/O error and 2 on a usage error.

pub mod experiments;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::analysis::{closed_form_rate, fit_power_law, schedule_closed_form, xx_correlation, CorrelationMethod};
use crate::compiler::{compile, parse_circuit};
use crate::core_model::{InterpolationSpec, TwistedGraph};
use crate::error::Error;
use crate::freefermion::wire_modes;
use crate::gadgets::{build_amplifier, verify_amplifier, verify_extended_router, verify_router, RouterField};
use crate::spectral_ed::{gap_curve, linspace, logical_fidelity, Ramp};
use experiments::{fig4, fig4_config, fig5, fig5_config, scaling, scaling_csv, Family, ScalingConfig};
use output::{csv, envelope, io_err, out_path, read_csv, Cell, Sink};

pub use output::{derive_seed, fmt_f64, RunRecord};

#[derive(Debug)]
pub enum CliError {
    /// Help or version text.
    Info(String),
    Usage(String),
    Run(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "aqt", version, about = "Adiabatic quantum transistor laboratory")]
struct Cli {
    /// TOML file with one table per subcommand; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Compile a circuit file to a graph JSON.
    Compile {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Low spectrum and gap of a graph's H(s) on an s-grid.
    GapScan(GapScanArgs),
    /// Free-fermion modes of an untwisted wire.
    WireSpectrum(WireSpectrumArgs),
    /// Gap at fixed s over sizes and random samples.
    Scaling(ScalingArgs),
    /// Power-law fit of two CSV columns.
    Fit(FitArgs),
    /// Closed-form adiabatic schedule.
    Schedule(ScheduleArgs),
    /// Nearest-neighbour XX correlation of the transverse Ising chain.
    Correlations(CorrelationsArgs),
    /// Sweep a compiled graph and compare with a circuit's unitary.
    Evolve(EvolveArgs),
    /// Router and amplifier checks.
    Gadget {
        #[command(subcommand)]
        which: GadgetCmd,
    },
    /// Regenerate a figure's data.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
struct GapScanArgs {
    #[arg(long)]
    graph: PathBuf,
    /// a:b:steps
    #[arg(long)]
    s_grid: Option<String>,
    /// Golden-section search around the grid minimum.
    #[arg(long)]
    refine: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WireSpectrumArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    s_grid: Option<String>,
    /// Relative coupling disorder; adds a seed column.
    #[arg(long)]
    lambda: Option<f64>,
    /// Number of disorder draws.
    #[arg(long)]
    seeds: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScalingArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    chi: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScheduleArgs {
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CorrelationsArgs {
    #[arg(long)]
    s_grid: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RampArg {
    Linear,
    Smooth,
    Smoother,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long = "T")]
    total_time: Option<f64>,
    /// Circuit file the graph was compiled from.
    #[arg(long)]
    check: PathBuf,
    #[arg(long, value_enum)]
    ramp: Option<RampArg>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum GadgetCmd {
    /// Binary-tree measurement amplifier.
    Amplifier {
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        verify: bool,
        /// Also run an explicit sweep of this length.
        #[arg(long = "T")]
        total_time: Option<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Four-qubit router, or the eight-qubit instance with --extended.
    Router {
        #[arg(long = "final")]
        field: String,
        #[arg(long = "T")]
        total_time: Option<f64>,
        #[arg(long)]
        extended: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Figure {
    Fig4,
    Fig5,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    #[arg(value_enum)]
    figure: Figure,
    /// Desk-scale sizes (the only scale available).
    #[arg(long)]
    desk: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    chi: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Values from the config file's table for one subcommand.
struct Layer(Option<toml::Table>);

impl Layer {
    fn load(path: Option<&Path>, section: &str) -> CliResult<Self> {
        let Some(path) = path else { return Ok(Layer(None)) };
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        let mut doc: toml::Table =
            text.parse().map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        match doc.remove(section) {
            None => Ok(Layer(None)),
            Some(toml::Value::Table(t)) => Ok(Layer(Some(t))),
            Some(_) => Err(CliError::Usage(format!("{}: [{section}] must be a table", path.display()))),
        }
    }

    /// flag, else file, else default.
    fn pick<T: DeserializeOwned>(&self, key: &str, flag: Option<T>, default: T) -> CliResult<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.0.as_ref().and_then(|t| t.get(key)) {
            Some(v) => v.clone().try_into().map_err(|e| CliError::Usage(format!("config key {key}: {e}"))),
            None => Ok(default),
        }
    }
}

fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("s-grid {text:?} is not a:b:steps"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if steps == 0 || !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || (steps > 1 && b <= a) {
        return Err(bad());
    }
    Ok(linspace(a, b, steps))
}

fn read_text(path: &Path) -> CliResult<String> {
    Ok(fs::read_to_string(path).map_err(|e| io_err(path, e))?)
}

fn load_graph(path: &Path) -> CliResult<TwistedGraph> {
    Ok(TwistedGraph::from_json(&read_text(path)?)?)
}

fn target(flag: Option<PathBuf>, default: &str) -> PathBuf {
    out_path(&flag.unwrap_or_else(|| PathBuf::from(default)))
}

/// Parse and run one command line (including the program name).
pub fn run_args<I, S>(argv: I) -> CliResult<()>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&argv).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Info(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    })?;
    let cfg = cli.config.as_deref();
    match cli.cmd {
        Cmd::Compile { file, output } => {
            let circuit = parse_circuit(&read_text(&file)?)?;
            let g = compile(&circuit)?;
            let path = target(output, "graph.json");
            let mut sink = Sink::new(argv, json!({ "file": file }), None);
            sink.write(&path, &(g.to_json() + "\n"))?;
            sink.finish()?;
            println!("{}: {} vertices, {} edges", path.display(), g.n(), g.edges().len());
        }
        Cmd::GapScan(a) => {
            let layer = Layer::load(cfg, "gap-scan")?;
            let grid_text: String = layer.pick("s-grid", a.s_grid, "0:1:41".into())?;
            let refine = a.refine || layer.pick("refine", None, false)?;
            let grid = parse_grid(&grid_text)?;
            let g = load_graph(&a.graph)?;
            let curve = gap_curve(&InterpolationSpec::from_graph(&g), &grid, refine)?;
            let rows: Vec<Vec<Cell>> = curve
                .slices
                .iter()
                .map(|sl| {
                    let mut r = vec![Cell::from(sl.s)];
                    // small graphs have fewer than six levels
                    r.extend((0..6).map(|k| Cell::from(sl.eigenvalues.get(k).copied().unwrap_or(f64::NAN))));
                    r.push(sl.gap.into());
                    r
                })
                .collect();
            let path = target(a.output, "curve.csv");
            let params = json!({ "graph": a.graph, "s_grid": grid_text, "refine": refine });
            let mut sink = Sink::new(argv, params, None);
            sink.write(&path, &csv(&["s", "e0", "e1", "e2", "e3", "e4", "e5", "gap"], &rows))?;
            sink.finish()?;
            let (s, gap) = curve.refined.unwrap_or((curve.argmin_s, curve.min_gap));
            println!("{}: min gap {} at s = {}", path.display(), fmt_f64(gap), fmt_f64(s));
        }
        Cmd::WireSpectrum(a) => {
            let layer = Layer::load(cfg, "wire-spectrum")?;
            let n: usize = layer.pick("n", a.n, 0)?;
            if n < 2 {
                return Err(CliError::Usage("--n N with N >= 2 is required".into()));
            }
            let grid_text: String = layer.pick("s-grid", a.s_grid, "0:1:101".into())?;
            let lambda: Option<f64> = layer.pick("lambda", a.lambda.map(Some), None)?;
            let seeds: usize = layer.pick("seeds", a.seeds, 1)?;
            let master: u64 = layer.pick("seed", a.seed, 0)?;
            let grid = parse_grid(&grid_text)?;
            let mut rows = Vec::new();
            match lambda {
                None => {
                    for &s in &grid {
                        for (k, w) in wire_modes(n, s, 0.0, 0)?.into_iter().enumerate() {
                            rows.push(vec![n.into(), s.into(), k.into(), w.into()]);
                        }
                    }
                }
                Some(lam) => {
                    for j in 0..seeds {
                        let seed = derive_seed(master, &["wire-spectrum", &j.to_string()]);
                        for &s in &grid {
                            for (k, w) in wire_modes(n, s, lam, seed)?.into_iter().enumerate() {
                                rows.push(vec![n.into(), s.into(), k.into(), w.into(), seed.into()]);
                            }
                        }
                    }
                }
            }
            let header: &[&str] = if lambda.is_some() { &["n", "s", "k", "omega", "seed"] } else { &["n", "s", "k", "omega"] };
            let path = target(a.output, "modes.csv");
            let params = json!({ "n": n, "s_grid": grid_text, "lambda": lambda, "seeds": seeds, "seed": master });
            let mut sink = Sink::new(argv, params, lambda.map(|_| master));
            sink.write(&path, &csv(header, &rows))?;
            sink.finish()?;
            println!("{}: {} rows", path.display(), rows.len());
        }
        Cmd::Scaling(a) => {
            let layer = Layer::load(cfg, "scaling")?;
            let family: String = layer.pick("family", a.family, "random1d".into())?;
            let family: Family = family.parse().map_err(|e: Error| CliError::Usage(e.to_string()))?;
            let sizes: Vec<usize> = layer.pick("sizes", a.sizes, vec![8, 16, 24, 32])?;
            let config = ScalingConfig {
                family,
                samples: layer.pick("samples", a.samples, 5)?,
                seed: layer.pick("seed", a.seed, 7)?,
                s: layer.pick("s", a.s, 0.5)?,
                chi: layer.pick("chi", a.chi, 64)?,
                sizes,
            };
            let rows = scaling(&config)?;
            let path = target(a.output, "scaling.csv");
            let params = serde_json::to_value(&config).expect("json");
            let mut sink = Sink::new(argv, params, Some(config.seed));
            sink.write(&path, &scaling_csv(&rows))?;
            sink.finish()?;
            let worst = rows.iter().map(|r| r.variance).fold(0.0, f64::max);
            println!("{}: {} cells, max variance {}", path.display(), rows.len(), fmt_f64(worst));
        }
        Cmd::Fit(a) => {
            let layer = Layer::load(cfg, "fit")?;
            let x: String = layer.pick("x", a.x, "n".into())?;
            let y: String = layer.pick("y", a.y, "gap".into())?;
            let (header, rows) = read_csv(&a.input)?;
            let col = |name: &str| {
                header.iter().position(|h| h == name).ok_or_else(|| {
                    Error::Domain(format!("{}: no column {name:?} (have {})", a.input.display(), header.join(",")))
                })
            };
            let (ix, iy) = (col(&x)?, col(&y)?);
            let num = |r: &Vec<String>, i: usize| -> crate::Result<f64> {
                r.get(i)
                    .and_then(|f| f.parse::<f64>().ok())
                    .ok_or_else(|| Error::Domain(format!("{}: bad numeric field in row {r:?}", a.input.display())))
            };
            let pts = rows.iter().map(|r| Ok((num(r, ix)?, num(r, iy)?))).collect::<crate::Result<Vec<_>>>()?;
            let fit = fit_power_law(&pts)?;
            let path = target(a.output, "fit.json");
            let params = json!({ "input": a.input, "x": x, "y": y });
            let mut sink = Sink::new(argv, params.clone(), None);
            sink.write(&path, &envelope(params, serde_json::to_value(&fit).expect("json")))?;
            sink.finish()?;
            println!("{}: {y} = {} * {x}^{}", path.display(), fmt_f64(fit.coefficient), fmt_f64(fit.exponent));
        }
        Cmd::Schedule(a) => {
            let layer = Layer::load(cfg, "schedule")?;
            let l: usize = layer.pick("l", a.l, 40)?;
            let eps: f64 = layer.pick("eps", a.eps, 0.01)?;
            let points: usize = layer.pick("points", a.points, 201)?;
            let sched = schedule_closed_form(l, eps, points)?;
            let rows: Vec<Vec<Cell>> =
                sched.samples.iter().map(|&(t, s)| vec![t.into(), s.into(), closed_form_rate(l, eps, s).into()]).collect();
            let path = target(a.output, "sched.csv");
            let mut sink = Sink::new(argv, json!({ "l": l, "eps": eps, "points": points }), None);
            sink.write(&path, &csv(&["t", "s", "rate"], &rows))?;
            sink.finish()?;
            println!("{}: T = {}", path.display(), fmt_f64(sched.total_time));
        }
        Cmd::Correlations(a) => {
            let layer = Layer::load(cfg, "correlations")?;
            let grid_text: String = layer.pick("s-grid", a.s_grid, "0:1:101".into())?;
            let grid = parse_grid(&grid_text)?;
            let mut rows = Vec::new();
            for &s in &grid {
                let e = xx_correlation(s, CorrelationMethod::Elliptic)?.value;
                // the integral form is undefined at s = 1
                let q = if s < 1.0 { xx_correlation(s, CorrelationMethod::Quadrature)?.value } else { f64::NAN };
                rows.push(vec![s.into(), e.into(), q.into()]);
            }
            let path = target(a.output, "corr.csv");
            let mut sink = Sink::new(argv, json!({ "s_grid": grid_text }), None);
            sink.write(&path, &csv(&["s", "elliptic", "quadrature"], &rows))?;
            sink.finish()?;
            println!("{}: {} points", path.display(), rows.len());
        }
        Cmd::Evolve(a) => {
            let layer = Layer::load(cfg, "evolve")?;
            let total_time: f64 = layer.pick("T", a.total_time, 200.0)?;
            let ramp_name: String = layer.pick(
                "ramp",
                a.ramp.map(|r| format!("{r:?}").to_ascii_lowercase()),
                "smoother".into(),
            )?;
            let ramp = match ramp_name.as_str() {
                "linear" => Ramp::Linear,
                "smooth" => Ramp::Smooth,
                "smoother" => Ramp::Smoother,
                other => return Err(CliError::Usage(format!("unknown ramp {other:?}"))),
            };
            let g = load_graph(&a.graph)?;
            let circuit = parse_circuit(&read_text(&a.check)?)?;
            let report = logical_fidelity(&g, &circuit, total_time, ramp)?;
            let path = target(a.output, "report.json");
            let params = json!({ "graph": a.graph, "check": a.check, "T": total_time, "ramp": ramp_name });
            let mut sink = Sink::new(argv, params.clone(), None);
            sink.write(&path, &envelope(params, serde_json::to_value(&report).expect("json")))?;
            sink.finish()?;
            println!("{}: worst probe fidelity {}", path.display(), fmt_f64(report.worst));
        }
        Cmd::Gadget { which } => gadget(which, cfg, argv)?,
        Cmd::Reproduce(a) => reproduce(a, cfg, argv)?,
    }
    Ok(())
}

fn gadget(which: GadgetCmd, cfg: Option<&Path>, argv: Vec<String>) -> CliResult<()> {
    match which {
        GadgetCmd::Amplifier { levels, verify, total_time, output } => {
            let layer = Layer::load(cfg, "amplifier")?;
            let levels: usize = layer.pick("levels", levels, 1)?;
            let verify = verify || layer.pick("verify", None, false)?;
            let total_time: Option<f64> = layer.pick("T", total_time.map(Some), None)?;
            let amp = build_amplifier(levels)?;
            let params = json!({ "levels": levels, "verify": verify, "T": total_time });
            let tree = json!({
                "graph": serde_json::from_str::<Value>(&amp.graph.to_json()).expect("json"),
                "root": amp.root,
                "leaves": amp.leaves,
                "field_support": amp.field_support,
            });
            let (results, verdict) = if verify {
                let report = verify_amplifier(&amp, total_time)?;
                let verdict = report.verdict();
                (json!({ "tree": tree, "report": report }), verdict)
            } else {
                (json!({ "tree": tree }), Ok(()))
            };
            let path = target(output, "report.json");
            let mut sink = Sink::new(argv, params.clone(), None);
            sink.write(&path, &envelope(params, results))?;
            sink.finish()?;
            verdict?;
            println!("{}: {} qubits, {} leaves", path.display(), amp.graph.n(), amp.leaves.len());
        }
        GadgetCmd::Router { field, total_time, extended, output } => {
            let layer = Layer::load(cfg, "router")?;
            let total_time: f64 = layer.pick("T", total_time, 200.0)?;
            let f: RouterField = field.parse().map_err(|e: Error| CliError::Usage(e.to_string()))?;
            let params = json!({ "final": field, "T": total_time, "extended": extended });
            let (results, x_out) = if extended {
                let x = verify_extended_router(f, total_time)?;
                (json!({ "field": f, "x_out": x }), x)
            } else {
                let r = verify_router(f, total_time)?;
                let x = r.x_out;
                (serde_json::to_value(&r).expect("json"), x)
            };
            let path = target(output, "report.json");
            let mut sink = Sink::new(argv, params.clone(), None);
            sink.write(&path, &envelope(params, results))?;
            sink.finish()?;
            println!("{}: <X_o> = {}", path.display(), fmt_f64(x_out));
        }
    }
    Ok(())
}

fn reproduce(a: ReproduceArgs, cfg: Option<&Path>, argv: Vec<String>) -> CliResult<()> {
    if !a.desk {
        return Err(CliError::Usage("only desk scale is available; pass --desk".into()));
    }
    let (section, default_dir) = match a.figure {
        Figure::Fig4 => ("fig4", "fig4"),
        Figure::Fig5 => ("fig5", "fig5"),
    };
    let layer = Layer::load(cfg, section)?;
    let seed: u64 = layer.pick("seed", a.seed, 7)?;
    let dir = out_path(&layer.pick("out", a.out, PathBuf::from(default_dir))?);
    let (config, csv_text, results) = match a.figure {
        Figure::Fig4 => {
            let mut config = fig4_config(seed);
            config.samples = layer.pick("samples", a.samples, config.samples)?;
            config.chi = layer.pick("chi", a.chi, config.chi)?;
            let f = fig4(config.clone())?;
            println!(
                "fig4: gap = {} * n^{} over {} cells, max variance {}",
                fmt_f64(f.fit.coefficient),
                fmt_f64(f.fit.exponent),
                f.rows.len(),
                fmt_f64(f.max_variance)
            );
            let results = json!({
                "fit": f.fit,
                "per_size": f.per_size,
                "max_variance": f.max_variance,
                "flagged": f.flagged,
            });
            (config, scaling_csv(&f.rows), results)
        }
        Figure::Fig5 => {
            let mut config = fig5_config(seed);
            config.samples = layer.pick("samples", a.samples, config.samples)?;
            let f = fig5(config.clone())?;
            println!("fig5: mean gap*n = {}", fmt_f64(f.coefficient));
            for e in &f.even_odd {
                println!("fig5: untwisted L = {}: gap*n = {}", e.l, fmt_f64(e.gap_times_n));
            }
            let results = json!({
                "fit": f.fit,
                "per_size": f.per_size,
                "coefficient": f.coefficient,
                "even_odd": f.even_odd,
            });
            (config, scaling_csv(&f.rows), results)
        }
    };
    let params = serde_json::to_value(&config).expect("json");
    let mut sink = Sink::new(argv, params.clone(), Some(seed));
    sink.write(&dir.join("scaling.csv"), &csv_text)?;
    sink.write(&dir.join("fit.json"), &envelope(params, results))?;
    sink.finish()?;
    println!("{}: scaling.csv, fit.json", dir.display());
    Ok(())
}

/// Run a command line and map the outcome to an exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    match run_args(argv) {
        Ok(()) => 0,
        Err(CliError::Info(msg)) => {
            print!("{msg}");
            0
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("{}", msg.trim_end());
            2
        }
        Err(CliError::Run(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}
