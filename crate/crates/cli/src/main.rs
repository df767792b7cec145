mod config;
mod report;

use clap::{Parser, Subcommand};
use config::{Format, RunConfig};
use hollowtree::bintab::CountTable;
use hollowtree::graph::Graph;
use hollowtree::infer::{IpfOptions, Model, ScreenMethod, TstatMethod};
use hollowtree::io::{read_graph, read_table};
use hollowtree::Error;
use report::{Route, Section};
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const SCHEMA: &str = "1";

#[derive(Parser)]
#[command(name = "hollowtree", version, about = "Ising models on hollow trees: decomposition, fitting, tests and selection")]
struct Cli {
    /// TOML run configuration (default: $HOLLOWTREE_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// IPF convergence tolerance on the largest margin discrepancy.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// IPF iteration cap.
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prime graphs, cut-sets, elimination scheme and class of a graph.
    Decompose { graph: Option<PathBuf> },
    /// Structural class of a graph.
    Classify { graph: Option<PathBuf> },
    /// Estimated 3-factor interactions with t-values for every triple.
    Screen {
        counts: Option<PathBuf>,
        /// Use raw +-1 products instead of standardized variables.
        #[arg(long)]
        raw: bool,
    },
    /// Saturated palindromic fit with its correlation matrices.
    Symmetrize { counts: Option<PathBuf> },
    /// Drop pairs whose partial correlation is below the threshold.
    Select {
        counts: Option<PathBuf>,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Maximum-likelihood Ising fit on a graph.
    Fit {
        counts: Option<PathBuf>,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "general")]
        model: ModelArg,
        #[arg(long, value_enum, default_value = "auto")]
        route: Route,
        #[arg(long, value_enum, default_value = "fisher")]
        tstat: TstatArg,
    },
    /// Likelihood-ratio tests decomposed along the primes of a graph.
    Test {
        counts: Option<PathBuf>,
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Run the requested stages in the order screen, symmetrize, select, fit, tests.
    Analyze {
        counts: Option<PathBuf>,
        #[arg(long)]
        screen: bool,
        #[arg(long)]
        symmetrize: bool,
        /// Threshold for selection; without a value the configured one is used.
        #[arg(long, num_args = 0..=1, value_name = "THRESHOLD")]
        select: Option<Option<f64>>,
        /// Graph file, or `selected` for the graph chosen by --select.
        #[arg(long, value_name = "GRAPH|selected")]
        fit: Option<String>,
        /// Decomposed tests on the fitted graph.
        #[arg(long)]
        tests: bool,
        #[arg(long, value_enum, default_value = "fisher")]
        tstat: TstatArg,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModelArg {
    General,
    Palindromic,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum TstatArg {
    Fisher,
    SaturatedDelta,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Model {
        match m {
            ModelArg::General => Model::General,
            ModelArg::Palindromic => Model::Palindromic,
        }
    }
}

impl From<TstatArg> for TstatMethod {
    fn from(t: TstatArg) -> TstatMethod {
        match t {
            TstatArg::Fisher => TstatMethod::Fisher,
            TstatArg::SaturatedDelta => TstatMethod::SaturatedDelta,
        }
    }
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }

    fn stage(stage: &str, e: Error) -> Failure {
        Failure { code: exit_code(&e), message: format!("{stage}: {e}") }
    }
}

/// 2 for malformed input, 4 for non-convergence, 3 for everything the
/// model cannot handle.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_)
        | Error::NodeOutOfRange { .. }
        | Error::DuplicateEdge(..)
        | Error::DimensionMismatch(_)
        | Error::SizeGuard(_)
        | Error::InvalidScheme(_)
        | Error::NotPrime(_) => 2,
        Error::NonConvergence { .. } => 4,
        _ => 3,
    }
}

struct Settings {
    config: RunConfig,
    format: Format,
    opts: IpfOptions,
}

impl Settings {
    fn new(cli: &Cli) -> Result<Settings, Failure> {
        let mut config = RunConfig::resolve(cli.config.as_deref()).map_err(Failure::input)?;
        config.tolerance = cli.tol.or(config.tolerance);
        config.max_iter = cli.max_iter.or(config.max_iter);
        config.validate().map_err(Failure::input)?;
        let mut opts = IpfOptions::default();
        opts.tol = config.tolerance.unwrap_or(opts.tol);
        opts.max_iter = config.max_iter.unwrap_or(opts.max_iter);
        let format = cli.format.or(config.format).unwrap_or_default();
        Ok(Settings { config, format, opts })
    }

    fn path(&self, given: &Option<PathBuf>, fallback: &Option<PathBuf>, what: &str) -> Result<PathBuf, Failure> {
        given.clone().or_else(|| fallback.clone()).ok_or_else(|| Failure::input(format!("no {what} file given")))
    }

    fn counts(&self, given: &Option<PathBuf>) -> Result<CountTable, Failure> {
        let p = self.path(given, &self.config.counts, "counts")?;
        read_table(&p).map_err(|e| Failure::stage("read counts", e))
    }

    fn graph(&self, given: &Option<PathBuf>) -> Result<Graph, Failure> {
        let p = self.path(given, &self.config.graph, "graph")?;
        read_graph(&p).map_err(|e| Failure::stage("read graph", e))
    }

    fn threshold(&self, given: Option<f64>) -> Result<f64, Failure> {
        let t = given.or(self.config.threshold).ok_or_else(|| Failure::input("a selection threshold is required"))?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Failure::input(format!("threshold must lie in [0, 1], got {t}")));
        }
        Ok(t)
    }
}

fn check_dims(counts: &CountTable, g: &Graph) -> Result<(), Failure> {
    if counts.d() != g.d() {
        return Err(Failure::input(format!("table has {} variables, graph has {}", counts.d(), g.d())));
    }
    Ok(())
}

/// Report envelope: schema version, command name and the command's
/// sections. Keys are emitted sorted so that reports re-serialize identically.
struct Report {
    command: &'static str,
    sections: Vec<(&'static str, Section)>,
}

impl Report {
    fn new(command: &'static str) -> Report {
        Report { command, sections: Vec::new() }
    }

    fn single(command: &'static str, s: Section) -> Report {
        Report { command, sections: vec![(command, s)] }
    }

    fn render(self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut m = Map::new();
                m.insert("schema".into(), json!(SCHEMA));
                m.insert("command".into(), json!(self.command));
                for (name, s) in self.sections {
                    m.insert(name.into(), s.json);
                }
                serde_json::to_string_pretty(&Value::Object(m)).expect("report serializes") + "\n"
            }
            Format::Text => {
                if let [(_, s)] = self.sections.as_slice() {
                    return s.text.clone();
                }
                self.sections.iter().map(|(name, s)| format!("== {name}\n{}", s.text)).collect::<Vec<_>>().join("\n")
            }
        }
    }
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let st = Settings::new(cli)?;
    let opts = st.opts;
    let report = match &cli.command {
        Command::Decompose { graph } => {
            let g = st.graph(graph)?;
            Report::single("decompose", report::decompose(&g).map_err(|e| Failure::stage("decompose", e))?)
        }
        Command::Classify { graph } => {
            let g = st.graph(graph)?;
            Report::single("classify", report::classify_graph(&g).map_err(|e| Failure::stage("classify", e))?)
        }
        Command::Screen { counts, raw } => {
            let c = st.counts(counts)?;
            let method = if *raw { ScreenMethod::Raw } else { ScreenMethod::Standardized };
            Report::single("screen", report::screen(&c, method).map_err(|e| Failure::stage("screen", e))?)
        }
        Command::Symmetrize { counts } => {
            let c = st.counts(counts)?;
            Report::single("symmetrize", report::symmetrize(&c, opts).map_err(|e| Failure::stage("symmetrize", e))?)
        }
        Command::Select { counts, threshold } => {
            let c = st.counts(counts)?;
            let t = st.threshold(*threshold)?;
            Report::single("select", report::select(&c, t, opts).map_err(|e| Failure::stage("select", e))?.0)
        }
        Command::Fit { counts, graph, model, route, tstat } => {
            let c = st.counts(counts)?;
            let g = st.graph(graph)?;
            check_dims(&c, &g)?;
            let (f, r) = report::run_fit(&c, &g, (*model).into(), *route, (*tstat).into(), opts).map_err(|e| Failure::stage("fit", e))?;
            Report::single("fit", report::fit_section(&f, r))
        }
        Command::Test { counts, graph } => {
            let c = st.counts(counts)?;
            let g = st.graph(graph)?;
            check_dims(&c, &g)?;
            Report::single("tests", report::tests(&c, &g, opts).map_err(|e| Failure::stage("tests", e))?)
        }
        Command::Analyze { counts, screen, symmetrize, select, fit, tests, tstat } => {
            analyze(&st, counts, *screen, *symmetrize, *select, fit.as_deref(), *tests, (*tstat).into())?
        }
    };
    Ok(report.render(st.format))
}

#[allow(clippy::too_many_arguments)]
fn analyze(
    st: &Settings,
    counts: &Option<PathBuf>,
    screen: bool,
    symmetrize: bool,
    select: Option<Option<f64>>,
    fit: Option<&str>,
    tests: bool,
    tstat: TstatMethod,
) -> Result<Report, Failure> {
    let c = st.counts(counts)?;
    let opts = st.opts;
    let mut rep = Report::new("analyze");
    if screen {
        rep.sections.push(("screen", report::screen(&c, ScreenMethod::Standardized).map_err(|e| Failure::stage("screen", e))?));
    }
    if symmetrize {
        rep.sections.push(("symmetrize", report::symmetrize(&c, opts).map_err(|e| Failure::stage("symmetrize", e))?));
    }
    let mut selected = None;
    if let Some(t) = select {
        let t = st.threshold(t)?;
        let (s, sel) = report::select(&c, t, opts).map_err(|e| Failure::stage("select", e))?;
        rep.sections.push(("select", s));
        selected = Some(sel.graph);
    }
    let graph = match fit {
        None => None,
        Some("selected") => Some(selected.clone().ok_or_else(|| Failure::input("--fit selected needs --select"))?),
        Some(p) => Some(read_graph(Path::new(p)).map_err(|e| Failure::stage("read graph", e))?),
    };
    if let Some(g) = &graph {
        check_dims(&c, g)?;
        rep.sections.push(("fit", report::fit_both(&c, g, Route::Auto, tstat, opts).map_err(|e| Failure::stage("fit", e))?));
    }
    if tests {
        let g = match graph.or(selected) {
            Some(g) => g,
            None => st.graph(&None)?,
        };
        check_dims(&c, &g)?;
        rep.sections.push(("tests", report::tests(&c, &g, opts).map_err(|e| Failure::stage("tests", e))?));
    }
    if rep.sections.is_empty() {
        return Err(Failure::input("no stage requested; use --screen, --symmetrize, --select, --fit or --tests"));
    }
    Ok(rep)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
