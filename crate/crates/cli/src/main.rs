//! `fpindex`: build and query text fingerprint indexes.
//!
//! Exit codes: 0 on success or a positive answer, 1 on a negative answer,
//! 2 on any error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fpindex::fingerprint_index::{BuildOptions, BuilderKind, EqualityMethod, FingerprintIndex};
use fpindex::oracle::{gen_wk, oracle_all_capped, DEFAULT_CAP};
use fpindex::participation_tree::ParticipationTree;
use fpindex::suffix_tree::SuffixTree;
use fpindex::{normalize, Alphabet, Error, Fingerprint, MaximalLocation, Rank};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "fpindex",
    version,
    about = "Index the character-set fingerprints of a text"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builder {
    Exact,
    Randomized,
    Mc,
}

impl From<Builder> for BuilderKind {
    fn from(b: Builder) -> Self {
        match b {
            Builder::Exact => BuilderKind::Exact,
            Builder::Randomized => BuilderKind::Randomized,
            Builder::Mc => BuilderKind::Mc,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Bits,
    Hash,
    Partitioned,
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeKind {
    Suffix,
    Participation,
}

#[derive(clap::Args)]
struct BuildArgs {
    /// Which construction to use.
    #[arg(long, value_enum, default_value = "exact")]
    builder: Builder,
    /// Seed for every random choice made while building.
    #[arg(long, env = "FPINDEX_SEED", default_value_t = 0)]
    seed: u64,
    /// Confidence exponent of the Monte Carlo builder.
    #[arg(long, default_value_t = 1)]
    confidence: u32,
}

impl BuildArgs {
    fn options(&self) -> BuildOptions {
        BuildOptions {
            builder: self.builder.into(),
            seed: self.seed,
            mc_confidence: self.confidence,
        }
    }
}

#[derive(clap::Args)]
struct QueryArgs {
    /// Index file written by `build`.
    index: PathBuf,
    /// Comma-separated characters, e.g. "a,c".
    #[arg(long)]
    set: String,
    /// Set-equality method used while answering.
    #[arg(long, value_enum, default_value = "bits")]
    method: Method,
    /// Number of phases of the partitioned method.
    #[arg(long, default_value_t = 2)]
    phases: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index from a text file and write it out.
    Build {
        /// Input text ("-" for standard input).
        input: PathBuf,
        #[command(flatten)]
        build: BuildArgs,
        /// Output index file.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Is the set a fingerprint? Prints true or false.
    Exists(QueryArgs),
    /// Print the maximal locations of a fingerprint, one "i<TAB>j" per line.
    Report {
        #[command(flatten)]
        query: QueryArgs,
        /// Print positions in the original text instead of the run-collapsed one.
        #[arg(long)]
        raw_coords: bool,
    },
    /// Build in memory and print statistics as JSON.
    Stats {
        /// Input text ("-" for standard input).
        input: PathBuf,
        #[command(flatten)]
        build: BuildArgs,
        /// Cross-check every count against brute force.
        #[arg(long)]
        verify: bool,
        /// Longest normalized text the brute-force check accepts.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        oracle_cap: usize,
    },
    /// Print the word w_k (1 <= k <= 26).
    GenWk { k: usize },
    /// Build with every builder and compare what they found.
    Compare {
        /// Input text ("-" for standard input).
        input: PathBuf,
        #[arg(long, env = "FPINDEX_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Print an index file as JSON.
    Dump { index: PathBuf },
    /// Print the suffix tree or participation tree of a text in DOT format.
    Dot {
        /// Input text ("-" for standard input).
        input: PathBuf,
        #[arg(long, value_enum, default_value = "participation")]
        tree: TreeKind,
    },
}

#[derive(Serialize)]
struct StatsReport {
    n: usize,
    raw_length: usize,
    sigma: usize,
    fingerprints: usize,
    maximal_locations: usize,
    copy_classes: Option<usize>,
    builder: &'static str,
    build_ms: f64,
    seed: u64,
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin()
            .read_to_end(&mut buf)
            .context("reading standard input")?;
        Ok(buf)
    } else {
        fs::read(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn load_index(path: &Path) -> Result<FingerprintIndex> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    FingerprintIndex::from_bytes(&bytes).with_context(|| format!("loading {}", path.display()))
}

/// "a,c" -> b"ac"; every item must be exactly one byte.
fn parse_set(text: &str) -> Result<Vec<u8>> {
    text.split(',')
        .map(|item| match item.as_bytes() {
            [b] => Ok(*b),
            _ => bail!("set items must be single characters, got {item:?}"),
        })
        .collect()
}

fn scratch_for(
    index: &FingerprintIndex,
    q: &QueryArgs,
) -> Result<fpindex::fingerprint_index::QueryScratch> {
    let method = match q.method {
        Method::Bits => EqualityMethod::Bits,
        Method::Hash => EqualityMethod::Hash,
        Method::Partitioned if q.phases >= 2 => EqualityMethod::Partitioned(q.phases),
        Method::Partitioned => bail!("--phases must be at least 2"),
    };
    Ok(fpindex::fingerprint_index::QueryScratch::new(
        index.sequence().sigma(),
        method,
    ))
}

fn symbol_of(alphabet: &Alphabet) -> impl Fn(Rank) -> String + '_ {
    move |r| match alphabet.unrank(r) {
        Some(b) if b.is_ascii_graphic() && b != b'"' && b != b'\\' => char::from(b).to_string(),
        Some(b) => format!("\\\\x{b:02x}"),
        None => "#".to_string(),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Build {
            input,
            build,
            out: path,
        } => {
            let raw = read_input(&input)?;
            let index = FingerprintIndex::build(&raw, build.options())?;
            fs::write(&path, index.to_bytes())
                .with_context(|| format!("writing {}", path.display()))?;
            eprintln!(
                "{} fingerprints, {} maximal locations -> {}",
                index.fingerprint_count(),
                index.location_count(),
                path.display()
            );
        }
        Command::Exists(q) => {
            let index = load_index(&q.index)?;
            let set = parse_set(&q.set)?;
            let mut scratch = scratch_for(&index, &q)?;
            let found = index.exists_with(&set, &mut scratch);
            writeln!(out, "{found}")?;
            if !found {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Report {
            query: q,
            raw_coords,
        } => {
            let index = load_index(&q.index)?;
            let set = parse_set(&q.set)?;
            let mut scratch = scratch_for(&index, &q)?;
            let locations = index.report_with(&set, &mut scratch)?;
            for loc in locations {
                let (i, j) = if raw_coords {
                    index.sequence().denormalize(loc)?
                } else {
                    (loc.start, loc.end)
                };
                writeln!(out, "{i}\t{j}")?;
            }
        }
        Command::Stats {
            input,
            build,
            verify,
            oracle_cap,
        } => {
            let raw = read_input(&input)?;
            let start = Instant::now();
            let index = FingerprintIndex::build(&raw, build.options())?;
            let build_ms = start.elapsed().as_secs_f64() * 1e3;
            let seq = index.sequence();
            let mut report = StatsReport {
                n: seq.len(),
                raw_length: seq.raw_len(),
                sigma: seq.sigma(),
                fingerprints: index.fingerprint_count(),
                maximal_locations: index.location_count(),
                copy_classes: None,
                builder: index.builder().as_str(),
                build_ms,
                seed: build.seed,
            };
            if verify {
                let gt = oracle_all_capped(seq, oracle_cap)?;
                if gt.fingerprint_count() != report.fingerprints
                    || gt.location_count() != report.maximal_locations
                {
                    bail!(
                        "verification failed: index has {} fingerprints and {} locations, brute force finds {} and {}",
                        report.fingerprints,
                        report.maximal_locations,
                        gt.fingerprint_count(),
                        gt.location_count()
                    );
                }
                let mut found: Vec<(Fingerprint, Vec<MaximalLocation>)> = index.all_locations();
                found.sort();
                let expect: Vec<_> = gt
                    .fingerprints
                    .iter()
                    .map(|f| (f.clone(), gt.locations_of(f)))
                    .collect();
                if found != expect {
                    bail!("verification failed: location lists differ from brute force");
                }
                report.copy_classes = Some(gt.class_count());
            }
            serde_json::to_writer(&mut out, &report)?;
            writeln!(out)?;
        }
        Command::GenWk { k } => {
            out.write_all(&gen_wk(k)?)?;
        }
        Command::Compare { input, seed } => {
            let raw = read_input(&input)?;
            let mut rows = Vec::new();
            let mut partitions = Vec::new();
            for builder in [BuilderKind::Exact, BuilderKind::Randomized, BuilderKind::Mc] {
                let start = Instant::now();
                let index = FingerprintIndex::build(&raw, BuildOptions::new(builder, seed))?;
                let build_ms = start.elapsed().as_secs_f64() * 1e3;
                let mut all = index.all_locations();
                all.sort();
                rows.push(serde_json::json!({
                    "builder": builder.as_str(),
                    "fingerprints": index.fingerprint_count(),
                    "maximal_locations": index.location_count(),
                    "build_ms": build_ms,
                }));
                partitions.push(all);
            }
            let agree = partitions.windows(2).all(|w| w[0] == w[1]);
            let summary = serde_json::json!({ "seed": seed, "builders": rows, "agree": agree });
            writeln!(out, "{}", serde_json::to_string_pretty(&summary)?)?;
            if !agree {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Dump { index } => {
            let index = load_index(&index)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&index.to_json())?)?;
        }
        Command::Dot { input, tree } => {
            let raw = read_input(&input)?;
            let (seq, alphabet) = normalize(&raw)?;
            let st = SuffixTree::build(&seq);
            let dot = match tree {
                TreeKind::Suffix => st.to_dot(&seq, symbol_of(&alphabet)),
                TreeKind::Participation => {
                    ParticipationTree::build(&st, &seq).to_dot(symbol_of(&alphabet))
                }
            };
            out.write_all(dot.as_bytes())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err)
            if err
                .downcast_ref::<io::Error>()
                .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(err) => {
            match err.downcast_ref::<Error>() {
                Some(Error::UnknownFingerprint) => eprintln!("error: unknown fingerprint"),
                _ => eprintln!("error: {err:#}"),
            }
            ExitCode::from(2)
        }
    }
}
