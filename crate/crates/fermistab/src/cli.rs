//! Command-line front end.
//!
//! Per point `generate` writes `points/<id>.circuit` and `points/<id>.json`,
//! `sample` adds `points/<id>.fsb`, `analyze` and `sweep` write
//! `results.csv` and `results.json`, `plot` writes `plots/*.svg`.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fermistab_core::analysis::DEFAULT_RESAMPLES;
use fermistab_core::encodings::DkArtifacts;
use fermistab_core::SquareLattice;

use crate::batch::read_batch;
use crate::config::{ConfigError, Point, SweepConfig, DEFAULT_SHOTS};
use crate::format::{parse, to_text};
use crate::report::{read_csv, write_csv, PointResult, ResultRow, ResultsFile, Sidecar};
use crate::run::{analyze_rows, assemble_all, noisy_circuit, results, sweep};
use crate::sample::{init_threads, sample_to};

pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "fermistab", version, about = "Noise benchmarks of fermion-to-qubit encodings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Sweep configuration (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed (overrides the config); with explicit files, the sampling seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shots per point (overrides the config).
    #[arg(long)]
    pub shots: Option<usize>,
    /// Output directory (overrides the config).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the resolved experiment matrix before running.
    #[arg(long)]
    pub explain: bool,
    /// Explicit input files instead of the config's points.
    pub files: Vec<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DumpKind {
    Lattice,
    Operators,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write circuit files and JSON sidecars.
    Generate(Common),
    /// Sample circuit files into packed batch files.
    Sample(Common),
    /// Analyze batch files into CSV and JSON results.
    Analyze(Common),
    /// Generate, sample and analyze in one pass.
    Sweep(Common),
    /// Render result CSVs as SVG plots.
    Plot(Common),
    /// Print the lattice table or the DK operator listing.
    Dump {
        #[arg(value_enum)]
        what: DumpKind,
        /// Lattice side length.
        #[arg(long, default_value_t = 4)]
        l: usize,
    },
}

struct Context_ {
    cfg: Option<SweepConfig>,
    out: PathBuf,
    shots: Option<usize>,
    resamples: usize,
}

impl Context_ {
    fn new(c: &Common) -> Result<Self, ConfigError> {
        let cfg = match &c.config {
            Some(p) => {
                let mut cfg = SweepConfig::load(p)?;
                if let Some(s) = c.seed {
                    cfg.seed = s;
                }
                Some(cfg)
            }
            None => None,
        };
        let out = c
            .out
            .clone()
            .or_else(|| cfg.as_ref().map(|c| c.out.clone()))
            .unwrap_or_else(|| PathBuf::from("fermistab-out"));
        let resamples = cfg.as_ref().map_or(DEFAULT_RESAMPLES, |c| c.resamples);
        Ok(Context_ { cfg, out, shots: c.shots, resamples })
    }

    fn config(&self) -> Result<&SweepConfig, ConfigError> {
        self.cfg.as_ref().ok_or_else(|| ConfigError::Invalid("--config is required without input files".into()))
    }

    fn points(&self, explain: bool) -> Result<Vec<Point>, ConfigError> {
        let cfg = self.config()?;
        if explain {
            print!("{}", cfg.explain(self.shots)?);
        }
        cfg.points(self.shots)
    }

    fn points_dir(&self) -> PathBuf {
        self.out.join("points")
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn read_sidecar(path: &Path) -> anyhow::Result<Option<Sidecar>> {
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Some(serde_json::from_str(&text).with_context(|| format!("sidecar schema mismatch in {}", path.display()))?))
}

fn cmd_generate(c: &Common) -> anyhow::Result<()> {
    let ctx = Context_::new(c)?;
    let points = ctx.points(c.explain)?;
    let specs = ctx.config()?.specs()?;
    let circuits = assemble_all(&specs)?;
    let dir = ctx.points_dir();
    for p in &points {
        let exp = &circuits[p.circuit];
        let noisy = noisy_circuit(exp, &p.model)?;
        write_file(&dir.join(format!("{}.circuit", p.id)), to_text(&noisy).as_bytes())?;
        let json = serde_json::to_string_pretty(&Sidecar::new(p, exp))?;
        write_file(&dir.join(format!("{}.json", p.id)), json.as_bytes())?;
    }
    log::info!("wrote {} circuits to {}", points.len(), dir.display());
    Ok(())
}

fn cmd_sample(c: &Common) -> anyhow::Result<()> {
    let ctx = Context_::new(c)?;
    // (circuit path, batch path, shots, seed)
    let mut jobs = Vec::new();
    if c.files.is_empty() {
        for p in ctx.points(c.explain)? {
            let dir = ctx.points_dir();
            let (circuit, batch) = (dir.join(format!("{}.circuit", p.id)), dir.join(format!("{}.fsb", p.id)));
            jobs.push((circuit, batch, Some(p.shots), Some(p.seed)));
        }
    } else {
        for f in &c.files {
            let target = match &c.out {
                Some(dir) => dir.join(f.file_name().unwrap_or_default()).with_extension("fsb"),
                None => f.with_extension("fsb"),
            };
            jobs.push((f.clone(), target, c.shots, c.seed));
        }
    }
    for (circuit, target, shots, seed) in jobs {
        let text = fs::read_to_string(&circuit)
            .with_context(|| format!("reading {} (run `generate` first?)", circuit.display()))?;
        let circ = parse(&text).with_context(|| format!("parsing {}", circuit.display()))?;
        let side = read_sidecar(&circuit.with_extension("json"))?;
        let shots = shots.or(side.as_ref().map(|s| s.shots)).unwrap_or(DEFAULT_SHOTS);
        let seed = seed.or(side.as_ref().map(|s| s.seed)).unwrap_or(0);
        let aux = side.map(|s| s.aux_rows).unwrap_or_default();
        if let Some(dir) = target.parent() {
            fs::create_dir_all(dir)?;
        }
        let f = File::create(&target).with_context(|| format!("creating {}", target.display()))?;
        let w = sample_to(&circ, shots, seed, &aux, BufWriter::new(f))?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        log::info!("sampled {} shots into {}", shots, target.display());
    }
    Ok(())
}

fn write_results(out: &Path, resamples: usize, rows: Vec<(ResultRow, PointResult)>) -> anyhow::Result<()> {
    let (csv_rows, full): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let mut csv = Vec::new();
    write_csv(&mut csv, &csv_rows)?;
    write_file(&out.join("results.csv"), &csv)?;
    let json = serde_json::to_string_pretty(&ResultsFile::new(resamples, full))?;
    write_file(&out.join("results.json"), json.as_bytes())?;
    log::info!("wrote {}", out.join("results.csv").display());
    Ok(())
}

fn cmd_analyze(c: &Common) -> anyhow::Result<()> {
    let ctx = Context_::new(c)?;
    let files: Vec<PathBuf> = if c.files.is_empty() {
        ctx.points(c.explain)?.iter().map(|p| ctx.points_dir().join(format!("{}.fsb", p.id))).collect()
    } else {
        c.files.clone()
    };
    let mut rows = Vec::new();
    for f in &files {
        let reader = File::open(f).with_context(|| format!("opening {} (run `sample` first?)", f.display()))?;
        let (header, batch) = read_batch(BufReader::new(reader)).with_context(|| format!("reading {}", f.display()))?;
        let side_path = f.with_extension("json");
        let side = read_sidecar(&side_path)?.with_context(|| format!("missing sidecar {}", side_path.display()))?;
        let aux = side.aux_rows.len();
        if header.detectors as usize != side.detectors.len()
            || header.observables as usize + aux != side.observables.len()
            || header.aux as usize != aux
        {
            bail!("schema mismatch: {} does not match {}", f.display(), side_path.display());
        }
        let metrics = analyze_rows(&batch, &side.postselection_rows, ctx.resamples, header.seed)?;
        let point = Point {
            id: side.id.clone(),
            spec: side.spec.clone(),
            circuit: 0,
            model: side.error_model,
            shots: header.shots as usize,
            seed: header.seed,
        };
        rows.push(results(&point, side.gate_counts, metrics));
    }
    write_results(&ctx.out, ctx.resamples, rows)
}

fn cmd_sweep(c: &Common) -> anyhow::Result<()> {
    let ctx = Context_::new(c)?;
    let points = ctx.points(c.explain)?;
    let circuits = assemble_all(&ctx.config()?.specs()?)?;
    let rows = sweep(&points, &circuits, ctx.resamples)?;
    write_results(&ctx.out, ctx.resamples, rows)
}

fn cmd_plot(c: &Common) -> anyhow::Result<()> {
    let ctx = Context_::new(c)?;
    let files = if c.files.is_empty() { vec![ctx.out.join("results.csv")] } else { c.files.clone() };
    let mut rows = Vec::new();
    for f in &files {
        let r = File::open(f).with_context(|| format!("opening {}", f.display()))?;
        rows.extend(read_csv(r).with_context(|| format!("CSV schema mismatch in {}", f.display()))?);
    }
    let written = crate::plot::plot_rows(&rows, &ctx.out.join("plots")).map_err(|e| anyhow::anyhow!("plotting: {e}"))?;
    for p in written {
        log::info!("wrote {}", p.display());
    }
    Ok(())
}

fn cmd_dump(what: DumpKind, l: usize) -> anyhow::Result<()> {
    let lattice = SquareLattice::new(l).map_err(ConfigError::from_core)?;
    let text = match what {
        DumpKind::Lattice => lattice.dump(),
        DumpKind::Operators => DkArtifacts::new(lattice).map_err(ConfigError::from_core)?.dump(),
    };
    std::io::stdout().write_all(text.as_bytes())?;
    Ok(())
}

impl ConfigError {
    fn from_core(e: fermistab_core::Error) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    init_threads();
    match cli.command {
        Command::Generate(c) => cmd_generate(&c),
        Command::Sample(c) => cmd_sample(&c),
        Command::Analyze(c) => cmd_analyze(&c),
        Command::Sweep(c) => cmd_sweep(&c),
        Command::Plot(c) => cmd_plot(&c),
        Command::Dump { what, l } => cmd_dump(what, l),
    }
}

/// Exit code for an error: configuration problems are distinguished from
/// runtime failures.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    if e.chain().any(|c| c.downcast_ref::<ConfigError>().is_some()) {
        EXIT_CONFIG
    } else {
        EXIT_RUNTIME
    }
}

pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}
