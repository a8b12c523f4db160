use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use serde::Serialize;

use qkm_core::gas_sim::seed_batch;
use qkm_core::randomness::{
    gap_classify, parse_estimators, prefix_trace, read_list, rng_list, score_corpus, smooth_box_list, write_list,
    ComplexityReport, EncodedList, GapClass, GapVerdict, ListFormat, TracePoint,
};
use qkm_core::{Exec, Result};

use crate::manifest::{write_json, RunManifest};

#[derive(Debug, Clone, Subcommand)]
pub enum RandomnessCmd {
    /// Estimate complexity and deficiency of list files
    Audit(AuditArgs),
    /// Write an RNG or smooth-box corpus
    Generate(GenerateArgs),
    /// Classify each list's prefix trace as random-like, structured or transitioning
    Gap(GapArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Decimal,
    Bits,
}

impl From<FormatArg> for ListFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Decimal => ListFormat::Decimal,
            FormatArg::Bits => ListFormat::Bits,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceArg {
    Rng,
    SmoothBox,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AuditArgs {
    /// List files
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "decimal")]
    pub format: FormatArg,
    /// Comma-separated estimator names, or `all`
    #[arg(long, default_value = "all")]
    pub estimators: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub source: SourceArg,
    /// Number of files
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Data per list; smooth-box list i holds n + i levels
    #[arg(long, default_value_t = 7693)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "decimal")]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GapArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "decimal")]
    pub format: FormatArg,
    #[arg(long, default_value = "all")]
    pub estimators: String,
    /// Number of prefixes per list
    #[arg(long, default_value_t = 20)]
    pub segments: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cmd: &RandomnessCmd, exec: Exec) -> Result<()> {
    match cmd {
        RandomnessCmd::Audit(a) => audit(a, exec),
        RandomnessCmd::Generate(a) => generate(a, exec),
        RandomnessCmd::Gap(a) => gap(a, exec),
    }
}

fn load(files: &[PathBuf], format: FormatArg) -> Result<Vec<EncodedList>> {
    files.iter().map(|p| read_list(BufReader::new(File::open(p)?), format.into())).collect()
}

#[derive(Serialize)]
struct AuditEntry<'a> {
    file: &'a Path,
    n: usize,
    k: u32,
    source_tag: &'a str,
    report: ComplexityReport,
}

#[derive(Serialize)]
struct AuditSummary {
    files: usize,
    random_like: usize,
    structured: usize,
}

#[derive(Serialize)]
struct AuditOutput<'a> {
    reports: Vec<AuditEntry<'a>>,
    summary: AuditSummary,
}

fn audit(args: &AuditArgs, exec: Exec) -> Result<()> {
    let ests = parse_estimators(&args.estimators)?;
    let lists = load(&args.files, args.format)?;
    let reports = score_corpus(&lists, &ests, exec)?;
    let count = |c: GapClass| reports.iter().filter(|r| r.gap_class == c).count();
    let summary = AuditSummary {
        files: reports.len(),
        random_like: count(GapClass::RandomLike),
        structured: count(GapClass::Structured),
    };
    let reports = args
        .files
        .iter()
        .zip(&lists)
        .zip(reports)
        .map(|((file, l), report)| AuditEntry { file, n: l.n(), k: l.k(), source_tag: l.source_tag(), report })
        .collect();
    let manifest = RunManifest::new("randomness audit", args, 0);
    write_json(args.out.as_deref(), &manifest, &AuditOutput { reports, summary })
}

#[derive(Serialize)]
struct GenerateOutput {
    files: Vec<PathBuf>,
}

fn generate(args: &GenerateArgs, exec: Exec) -> Result<()> {
    fs::create_dir_all(&args.out_dir)?;
    let manifest = RunManifest::new("randomness generate", args, args.seed);
    let seeds = seed_batch(args.seed, args.count);
    let idx: Vec<usize> = (0..args.count).collect();
    let lists = qkm_core::par::map(exec, &idx, |&i| match args.source {
        SourceArg::Rng => rng_list(args.n, seeds[i]),
        SourceArg::SmoothBox => smooth_box_list(args.n + i),
    });
    let stem = match args.source {
        SourceArg::Rng => "rng",
        SourceArg::SmoothBox => "smooth-box",
    };
    let mut files = Vec::with_capacity(args.count);
    for (i, list) in lists.into_iter().enumerate() {
        let list = list?;
        let path = args.out_dir.join(format!("{stem}-{i:03}.list"));
        let mut w = BufWriter::new(File::create(&path)?);
        for line in manifest.preamble(seeds[i]) {
            writeln!(w, "# {line}")?;
        }
        write_list(&mut w, &list, args.format.into())?;
        files.push(path);
    }
    write_json(None, &manifest, &GenerateOutput { files })
}

#[derive(Serialize)]
struct GapEntry<'a> {
    file: &'a Path,
    verdict: GapVerdict,
    trace: Vec<TracePoint>,
}

#[derive(Serialize)]
struct GapOutput<'a> {
    verdicts: Vec<GapEntry<'a>>,
}

fn gap(args: &GapArgs, exec: Exec) -> Result<()> {
    let ests = parse_estimators(&args.estimators)?;
    let lists = load(&args.files, args.format)?;
    let traces = qkm_core::par::map(exec, &lists, |l| prefix_trace(l, args.segments, &ests, Exec::Sequential));
    let mut verdicts = Vec::with_capacity(lists.len());
    for (file, trace) in args.files.iter().zip(traces) {
        let trace = trace?;
        verdicts.push(GapEntry { file, verdict: gap_classify(&trace)?, trace });
    }
    let manifest = RunManifest::new("randomness gap", args, 0);
    write_json(args.out.as_deref(), &manifest, &GapOutput { verdicts })
}
