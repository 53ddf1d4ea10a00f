use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use psi_core::differential::{render, run_differential, verify_index, OracleConfig};
use psi_core::format;
use psi_core::{AlphabetMode, Error, Index, IndexConfig};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "psi", version, about = "Sparse suffix index for packed texts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlphabetArg {
    /// Codes for the bytes that occur in the text.
    Auto,
    /// All 256 byte values.
    Byte,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index file from a text file.
    Build {
        text: PathBuf,
        /// Block size.
        #[arg(short = 'r', value_parser = clap::value_parser!(u64).range(1..))]
        block: u64,
        /// Characters per machine word.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        word_capacity: Option<u64>,
        #[arg(long, value_enum, default_value = "auto")]
        alphabet: AlphabetArg,
        #[arg(short = 'o')]
        output: PathBuf,
    },
    /// Print the 1-based positions of a pattern.
    Query {
        index: PathBuf,
        pattern: String,
        /// Print only the number of occurrences.
        #[arg(long)]
        count: bool,
    },
    /// Check an index, or freshly built random ones, against brute force.
    Verify {
        index: Option<PathBuf>,
        #[arg(long, conflicts_with = "index")]
        random: bool,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Patterns for an index file, instances for --random.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Print component sizes.
    Stats { index: PathBuf },
    /// Print per-query work counters and timings.
    Bench {
        index: PathBuf,
        /// One pattern per line.
        patterns: PathBuf,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
    },
}

enum Failure {
    Data(Error),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(Error::Io(e))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli.command, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(EXIT_DATA)
        }
        Err(Failure::Verify) => ExitCode::from(EXIT_VERIFY),
    }
}

fn load(path: &Path) -> Result<Index, Error> {
    let mut file = io::BufReader::new(fs::File::open(path)?);
    format::deserialize(&mut file)
}

fn run(command: Command, out: &mut impl Write) -> Result<(), Failure> {
    match command {
        Command::Build { text, block, word_capacity, alphabet, output } => {
            let raw = fs::read(&text)?;
            let mut config = IndexConfig::new(block as usize);
            config.word_capacity = word_capacity.map(|w| w as usize);
            config.alphabet = match alphabet {
                AlphabetArg::Auto => AlphabetMode::Auto,
                AlphabetArg::Byte => AlphabetMode::Byte,
            };
            let index = Index::build(&raw, &config)?;
            let bytes = format::to_bytes(&index);
            fs::write(&output, &bytes)?;
            let sections: Vec<String> =
                format::section_sizes(&index).iter().map(|(name, size)| format!("{name}={size}")).collect();
            writeln!(
                out,
                "n={} r={} sigma={} bytes={} {}",
                index.text().len(),
                index.block(),
                index.text().alphabet().size(),
                bytes.len(),
                sections.join(" ")
            )?;
        }
        Command::Query { index, pattern, count } => {
            let index = load(&index)?;
            let occ = index.find_all(pattern.as_bytes())?;
            if count {
                writeln!(out, "{}", occ.len())?;
            } else {
                for o in occ {
                    writeln!(out, "{}", o.pos)?;
                }
            }
        }
        Command::Verify { index, random, seed, samples } => {
            let report = match (index, random) {
                (Some(path), _) => {
                    let index = match load(&path) {
                        Ok(index) => index,
                        Err(Error::Io(e)) => return Err(Failure::Data(Error::Io(e))),
                        Err(e) => {
                            eprintln!("error: {}: {e}", e.name());
                            return Err(Failure::Verify);
                        }
                    };
                    verify_index(&index, seed, samples.unwrap_or(200))
                }
                (None, true) => {
                    let instances = samples.unwrap_or(100);
                    let config = OracleConfig {
                        seed,
                        instances,
                        exhaustive: instances > 0,
                        ..OracleConfig::default()
                    };
                    run_differential(&config)
                }
                (None, false) => {
                    eprintln!("error: verify needs an index path or --random");
                    std::process::exit(EXIT_USAGE.into());
                }
            };
            write!(out, "{}", render(&report))?;
            if !report.passed() {
                return Err(Failure::Verify);
            }
        }
        Command::Stats { index } => {
            let index = load(&index)?;
            let s = index.stats();
            writeln!(out, "n: {}", s.len)?;
            writeln!(out, "text length: {}", s.raw_len)?;
            writeln!(out, "r: {}", s.block)?;
            writeln!(out, "sigma: {}", s.sigma)?;
            writeln!(out, "bits per char: {}", s.bits_per_char)?;
            writeln!(out, "word capacity: {}", s.word_capacity)?;
            writeln!(out, "half block: {}", s.half_block)?;
            writeln!(out, "n/r: {}", s.blocks)?;
            writeln!(out, "text words: {}", s.text_words)?;
            writeln!(out, "suffix array words: {}", s.sa_words)?;
            writeln!(out, "tree nodes: {} ({} leaves)", s.tree_nodes, s.tree_leaves)?;
            writeln!(out, "tree words: {}", s.tree_words)?;
            writeln!(out, "trie nodes: {}", s.trie_nodes)?;
            writeln!(
                out,
                "rho letters: {} (n + n/r = {}, within: {})",
                s.rho_letters,
                s.len + s.blocks,
                s.rho_within_bound()
            )?;
            writeln!(out, "rho entries: {}", s.rho_entries)?;
            writeln!(out, "c cells: {}", s.count_cells)?;
            writeln!(out, "leaf ordinals: {}", s.leaf_ordinals)?;
            match s.table_cells {
                Some(cells) => writeln!(out, "C: {cells}")?,
                None => writeln!(out, "C: disabled")?,
            }
        }
        Command::Bench { index, patterns, repeat } => {
            let index = load(&index)?;
            let list = fs::read(&patterns)?;
            writeln!(out, "pattern\tm\tocc\tword_cmp\tchar_cmp\tlinks\ttrie_nodes\tscan_cmp\ttime_ns")?;
            if repeat == 0 {
                return Ok(());
            }
            for pattern in list.split(|&b| b == b'\n').filter(|p| !p.is_empty()) {
                let pattern = pattern.strip_suffix(b"\r").unwrap_or(pattern);
                let start = Instant::now();
                let mut result = None;
                for _ in 0..repeat {
                    result = Some(index.find_all_with_stats(pattern)?);
                }
                let nanos = start.elapsed().as_nanos() / repeat as u128;
                let (occ, stats) = result.expect("repeat is positive");
                let left = stats.left_total();
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{nanos}",
                    String::from_utf8_lossy(pattern),
                    pattern.len(),
                    occ.len(),
                    stats.right.word_comparisons,
                    stats.right.char_comparisons,
                    stats.right.link_follows,
                    left.total(),
                    stats.scan_comparisons,
                )?;
            }
        }
    }
    Ok(())
}
