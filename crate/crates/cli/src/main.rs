//! `bondmatcher`: bond graphs of electron densities and bond stability over
//! ensembles of densities.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use bondmatcher_core::bondgraph::{cross_check_atoms, BondClass};
use bondmatcher_core::ensemble::{induce_arc_map, occurrence_rates, optimal_assignment, EnsembleError};
use bondmatcher_core::export;
use bondmatcher_core::io::{read_grid, write_cube, write_raw, IoError};
use bondmatcher_core::morse::{DEFAULT_DELTA, DEFAULT_EPSILON};
use bondmatcher_core::pipeline::{analyze, Analysis, PipelineError, RunConfig};
use bondmatcher_core::synth::{FixtureSpec, SynthError};

#[derive(Parser)]
#[command(name = "bondmatcher", version, about = "Bond graphs and bond occurrence rates from electron densities")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Persistence below which minima are cancelled.
    #[arg(long, global = true, default_value_t = DEFAULT_EPSILON, allow_negative_numbers = true)]
    epsilon: f64,
    /// Value window for saddle-saddle cancellation.
    #[arg(long, global = true, default_value_t = DEFAULT_DELTA, allow_negative_numbers = true)]
    delta: f64,
    /// Node values below this are oxygen.
    #[arg(long, global = true, default_value_t = -4.0, allow_negative_numbers = true)]
    oxygen_cut: f64,
    /// O-H arcs with saddle value below this are covalent.
    #[arg(long, global = true, default_value_t = -0.1, allow_negative_numbers = true)]
    covalent_cut: f64,
    /// Keep exactly this many minima; overrides --epsilon.
    #[arg(long, global = true)]
    target_min_count: Option<usize>,
    /// Reference member, as an index into the sorted inputs.
    #[arg(long, global = true)]
    reference: Option<usize>,
    /// Skip members whose node count differs from the reference.
    #[arg(long, global = true)]
    permissive_counts: bool,
    #[arg(long, global = true, env = "BONDMATCHER_THREADS")]
    threads: Option<usize>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
}

impl Opts {
    fn config(&self) -> RunConfig {
        RunConfig {
            epsilon: self.epsilon,
            delta: self.delta,
            oxygen_cut: self.oxygen_cut,
            covalent_cut: self.covalent_cut,
            target_min_count: self.target_min_count,
            reference_index: self.reference,
            permissive_counts: self.permissive_counts,
            threads: self.threads,
            output_dir: Some(self.out.display().to_string()),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Bond graph of one density: JSON, OBJ geometry and indicator CSV.
    Analyze { input: PathBuf },
    /// Occurrence rate of every reference arc across an ensemble.
    ///
    /// Inputs are files or directories; members are sorted by file name and
    /// the middle one is the default reference.
    Ensemble {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Node assignment and arc correspondence between two densities.
    Match { a: PathBuf, b: PathBuf },
    /// Writes the densities described by a fixture spec.
    Synth {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Cube)]
        format: Format,
        /// File name prefix; defaults to the spec file stem.
        #[arg(long)]
        prefix: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Cube,
    Raw,
}

#[derive(Debug, Serialize)]
struct Failure {
    kind: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
    #[serde(skip)]
    code: u8,
}

impl Failure {
    fn new(kind: &'static str, code: u8, message: impl ToString) -> Self {
        Self {
            kind,
            message: message.to_string(),
            path: None,
            line: None,
            code,
        }
    }

    fn at(mut self, path: &Path) -> Self {
        self.path = Some(path.display().to_string());
        self
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        let line = match &e {
            IoError::MalformedHeader { line, .. }
            | IoError::NonOrthogonalAxes { line }
            | IoError::ValueCountMismatch { line, .. }
            | IoError::BadValue { line, .. } => Some(*line),
            _ => None,
        };
        let (kind, code) = match e {
            IoError::Io(_) => ("io", 1),
            _ => ("parse", 2),
        };
        Self {
            line,
            ..Failure::new(kind, code, e)
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::new("pipeline", 1, e)
    }
}

impl From<EnsembleError> for Failure {
    fn from(e: EnsembleError) -> Self {
        match e {
            EnsembleError::SizeMismatch { .. } | EnsembleError::MemberSizeMismatch { .. } => {
                Failure::new("size_mismatch", 3, e)
            }
            _ => Failure::new("ensemble", 1, e),
        }
    }
}

impl From<SynthError> for Failure {
    fn from(e: SynthError) -> Self {
        Failure::new("synth", 1, e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new("io", 1, e)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::from(e).at(path))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), Failure> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Failure::from(e).at(path))?;
    println!("{}", path.display());
    Ok(())
}

fn source_id(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into())
}

fn load_and_analyze(path: &Path, cfg: &RunConfig) -> Result<Analysis, Failure> {
    let loaded = read_grid(path).map_err(|e| Failure::from(e).at(path))?;
    let id = source_id(path);
    let analysis = analyze(&loaded.grid, &id, cfg).map_err(|e| Failure::from(e).at(path))?;
    for d in cross_check_atoms(&analysis.bonds, &loaded.atoms) {
        log::warn!(
            "{id}: node {} classified {:?} but nearest file atom has Z = {} at {:.3} Å",
            d.node,
            d.class,
            d.atomic_number,
            d.distance
        );
    }
    for w in &analysis.bonds.warnings {
        log::warn!("{id}: {w}");
    }
    Ok(analysis)
}

fn cmd_analyze(input: &Path, opts: &Opts) -> Result<(), Failure> {
    let cfg = opts.config();
    let a = load_and_analyze(input, &cfg)?;
    let name = stem(input);
    let json = export::bond_graph_json(&a, &cfg);
    write_file(&opts.out.join(format!("{name}.bonds.json")), |w| w.write_all(json.as_bytes()))?;
    write_file(&opts.out.join(format!("{name}.obj")), |w| export::write_obj(w, &a.bonds, &cfg))?;
    write_file(&opts.out.join(format!("{name}.indicators.csv")), |w| {
        export::write_indicator_csv(w, &a.bonds, &cfg)
    })?;
    log::info!(
        "{}: {} nodes, {} arcs, {} covalent, {} hydrogen bonds",
        a.graph().source_id,
        a.graph().nodes.len(),
        a.graph().arcs.len(),
        a.bonds.count(BondClass::Covalent),
        a.bonds.count(BondClass::HydrogenBond)
    );
    Ok(())
}

fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            for entry in fs::read_dir(p).map_err(|e| Failure::from(e).at(p))? {
                let path = entry.map_err(|e| Failure::from(e).at(p))?.path();
                let hidden = path.file_name().is_some_and(|n| n.to_string_lossy().starts_with('.'));
                if path.is_file() && !hidden {
                    files.push(path);
                }
            }
        } else {
            files.push(p.clone());
        }
    }
    files.sort_by(|a, b| source_id(a).cmp(&source_id(b)).then(a.cmp(b)));
    if files.is_empty() {
        return Err(Failure::from(EnsembleError::Empty));
    }
    Ok(files)
}

fn cmd_ensemble(inputs: &[PathBuf], opts: &Opts) -> Result<(), Failure> {
    let cfg = opts.config();
    let files = collect_inputs(inputs)?;
    let reference = opts.reference.unwrap_or((files.len() - 1) / 2);
    let analyses = files
        .par_iter()
        .map(|p| load_and_analyze(p, &cfg))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let graphs: Vec<_> = analyses.iter().map(|a| a.graph().clone()).collect();
    let report = occurrence_rates(&graphs, reference, cfg.permissive_counts)?;
    let refb = &analyses[reference].bonds;
    let sources: Vec<String> = graphs.iter().map(|g| g.source_id.clone()).collect();
    write_file(&opts.out.join("occurrence.csv"), |w| {
        export::write_occurrence_csv(w, &report, refb, &cfg)
    })?;
    let json = export::occurrence_json(&report, refb, &sources, &cfg);
    write_file(&opts.out.join("occurrence.json"), |w| w.write_all(json.as_bytes()))?;
    let json = export::bond_graph_json(&analyses[reference], &cfg);
    write_file(&opts.out.join("reference.bonds.json"), |w| w.write_all(json.as_bytes()))?;
    log::info!(
        "reference {}: {} members, {} unstable bonds",
        sources[reference],
        report.members,
        export::unstable_bonds(&report, refb)
    );
    Ok(())
}

fn cmd_match(a: &Path, b: &Path, opts: &Opts) -> Result<(), Failure> {
    let cfg = opts.config();
    let (ra, rb) = rayon::join(|| load_and_analyze(a, &cfg), || load_and_analyze(b, &cfg));
    let (ra, rb) = (ra?, rb?);
    let pa: Vec<_> = ra.graph().nodes.iter().map(|n| n.position).collect();
    let pb: Vec<_> = rb.graph().nodes.iter().map(|n| n.position).collect();
    let phi = optimal_assignment(&pa, &pb)?;
    let iso = induce_arc_map(&phi, &ra.graph().arcs, &rb.graph().arcs);
    let json = export::match_json(&ra.bonds, &rb.bonds, &phi, &iso, &cfg);
    write_file(&opts.out.join("match.json"), |w| w.write_all(json.as_bytes()))
}

fn cmd_synth(spec_path: &Path, format: Format, prefix: Option<&str>, opts: &Opts) -> Result<(), Failure> {
    let text = fs::read_to_string(spec_path).map_err(|e| Failure::from(e).at(spec_path))?;
    let spec: FixtureSpec = serde_json::from_str(&text).map_err(|e| {
        Failure {
            line: Some(e.line()),
            ..Failure::new("parse", 2, e)
        }
        .at(spec_path)
    })?;
    let prefix = prefix.map_or_else(|| stem(spec_path), str::to_owned);
    let n = spec.member_count();
    let width = (n.saturating_sub(1)).to_string().len().max(2);
    let ext = match format {
        Format::Cube => "cube",
        Format::Raw => "raw",
    };
    let grids = (0..n).into_par_iter().map(|k| spec.member(k)).collect::<Result<Vec<_>, _>>()?;
    for (k, grid) in grids.iter().enumerate() {
        let name = if spec.ensemble.is_some() {
            format!("{prefix}_{k:0width$}.{ext}")
        } else {
            format!("{prefix}.{ext}")
        };
        let path = opts.out.join(name);
        let mut w = create(&path)?;
        match format {
            Format::Cube => write_cube(&mut w, grid, &[], &format!("{prefix} member {k} seed {}", spec.seed)),
            Format::Raw => write_raw(&mut w, grid),
        }
        .map_err(|e| Failure::from(e).at(&path))?;
        w.flush().map_err(|e| Failure::from(e).at(&path))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.opts.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::new("threads", 1, e))?;
    }
    fs::create_dir_all(&cli.opts.out).map_err(|e| Failure::from(e).at(&cli.opts.out))?;
    match &cli.cmd {
        Cmd::Analyze { input } => cmd_analyze(input, &cli.opts),
        Cmd::Ensemble { inputs } => cmd_ensemble(inputs, &cli.opts),
        Cmd::Match { a, b } => cmd_match(a, b, &cli.opts),
        Cmd::Synth { spec, format, prefix } => cmd_synth(spec, *format, prefix.as_deref(), &cli.opts),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let body = serde_json::json!({ "error": &f, "exit_code": f.code });
            eprintln!("{body}");
            ExitCode::from(f.code)
        }
    }
}
