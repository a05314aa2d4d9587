//! `gaptrack` command line.
//!
//! Exit codes: 0 on success (or a supported track for `verify`), 1 on usage,
//! file or validation errors, 2 when `verify` finds failing offsets.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand};

use crate::adversary::lowerbound_sweep;
use crate::builders::{self, Algorithm};
use crate::exec::with_jobs;
use crate::harness::{run_bench, BenchConfig};
use crate::interface::codec::{self, CodecError};
use crate::interface::render::render_ascii;
use crate::model::{coverage, Instance, TrackLayout, WheelConfig};
use crate::oracle::{min_track_exact_with, min_track_greedy, ExactOptions, DEFAULT_NODE_LIMIT};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNSUPPORTED: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gaptrack", version, about = "Sparse pillar tracks for multi-wheel train cars")]
pub struct Cli {
    /// Worker threads for sweeps and benchmarks; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a supporting track for a car.
    Build {
        /// even | random | derand | lll | minhash
        #[arg(long, value_parser = parse_algorithm)]
        algo: Algorithm,
        #[arg(long)]
        car: PathBuf,
        #[arg(long)]
        length: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a track against a car at every offset.
    Verify {
        #[arg(long)]
        car: PathBuf,
        #[arg(long)]
        track: PathBuf,
    },
    /// Minimum track by exact search or greedy cover.
    #[command(group(ArgGroup::new("method").required(true).args(["exact", "greedy"])))]
    Oracle {
        #[arg(long)]
        car: PathBuf,
        #[arg(long)]
        length: u64,
        #[arg(long)]
        exact: bool,
        /// Only accept tracks with at most this many pillars.
        #[arg(long, requires = "exact")]
        cap: Option<usize>,
        #[arg(long, requires = "exact", default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: u64,
        #[arg(long)]
        greedy: bool,
        /// Write the track here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact minimum tracks for random cars with f = 2n, l = 4n.
    Lowerbound {
        /// Comma separated list of n.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark grid described by a JSON config.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a track, optionally with the car at one offset.
    Render {
        #[arg(long)]
        track: PathBuf,
        #[arg(long, requires = "offset")]
        car: Option<PathBuf>,
        #[arg(long, requires = "car")]
        offset: Option<u64>,
    },
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

/// Failure carrying its exit code and message.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn error(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_ERROR,
            message: message.into(),
        }
    }
}

type CliResult = Result<i32, Failure>;

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => Failure::error(format!("file not found: {}", path.display())),
        _ => Failure::error(format!("cannot read {}: {e}", path.display())),
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .map_err(|e| Failure::error(format!("cannot write {}: {e}", path.display())))
}

fn load<T>(path: &Path, kind: &str, decode: fn(&str) -> Result<T, CodecError>) -> Result<T, Failure> {
    let text = read_text(path)?;
    decode(&text).map_err(|e| match e {
        CodecError::Invalid(inner) => {
            Failure::error(format!("invalid {kind} file {}: {inner}", path.display()))
        }
        other => Failure::error(format!("malformed {kind} file {}: {other}", path.display())),
    })
}

fn load_car(path: &Path) -> Result<WheelConfig, Failure> {
    load(path, "car", codec::decode_car)
}

fn load_track(path: &Path) -> Result<TrackLayout, Failure> {
    load(path, "track", codec::decode_track)
}

fn instance(car: WheelConfig, length: u64) -> Result<Instance, Failure> {
    Instance::new(car, length).map_err(|e| Failure::error(format!("invalid instance: {e}")))
}

fn io_err(e: io::Error) -> Failure {
    Failure::error(format!("output error: {e}"))
}

fn run_command(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult {
    let jobs = cli.jobs.max(1);
    match cli.command {
        Command::Build {
            algo,
            car,
            length,
            seed,
            out,
        } => {
            let inst = instance(load_car(&car)?, length)?;
            let outcome =
                builders::build(&inst, algo, seed).map_err(|e| Failure::error(e.to_string()))?;
            let report = coverage(&inst, &outcome.track).expect("lengths match");
            if !report.supported {
                return Err(Failure::error(format!(
                    "internal error: {algo} left {} failing offsets",
                    report.failure_count
                )));
            }
            write_text(&out, &(codec::encode_track(&outcome.track) + "\n"))?;
            let seed_text = outcome.seed.map_or("none".to_string(), |s| s.to_string());
            writeln!(
                stdout,
                "algorithm={} n={} f={} l={} pillars={} alterations={} phases={} seed={} p={:.6}",
                outcome.algorithm,
                inst.n(),
                inst.car().quarter_length(),
                length,
                outcome.pillar_count,
                outcome.alteration_count,
                outcome.phase_count,
                seed_text,
                outcome.install_probability
            )
            .map_err(io_err)?;
            Ok(EXIT_OK)
        }
        Command::Verify { car, track } => {
            let car = load_car(&car)?;
            let track = load_track(&track)?;
            let inst = instance(car, track.track_length())?;
            let report = coverage(&inst, &track).expect("lengths match");
            if report.supported {
                writeln!(stdout, "supported Y=0").map_err(io_err)?;
                return Ok(EXIT_OK);
            }
            let shown: Vec<String> = report
                .failing_offsets
                .iter()
                .take(10)
                .map(u64::to_string)
                .collect();
            let more = if report.failure_count > 10 { ", ..." } else { "" };
            writeln!(stdout, "unsupported Y={}", report.failure_count).map_err(io_err)?;
            writeln!(stdout, "failing offsets: {}{more}", shown.join(", ")).map_err(io_err)?;
            Ok(EXIT_UNSUPPORTED)
        }
        Command::Oracle {
            car,
            length,
            exact,
            cap,
            node_limit,
            greedy: _,
            out,
        } => {
            let inst = instance(load_car(&car)?, length)?;
            let result = if exact {
                min_track_exact_with(
                    &inst,
                    ExactOptions {
                        size_cap: cap,
                        node_limit,
                    },
                )
            } else {
                min_track_greedy(&inst)
            };
            let size = result.size().map_or("none".to_string(), |s| s.to_string());
            writeln!(
                stdout,
                "method={} status={:?} size={} nodes={} lower_bound={}",
                if exact { "exact" } else { "greedy" },
                result.status,
                size,
                result.explored_nodes,
                inst.counting_lower_bound()
            )
            .map_err(io_err)?;
            let Some(track) = result.track else {
                return Err(Failure::error(format!(
                    "no supporting track with at most {} pillars",
                    cap.unwrap_or_default()
                )));
            };
            let text = codec::encode_track(&track) + "\n";
            match out {
                Some(path) => write_text(&path, &text)?,
                None => stdout.write_all(text.as_bytes()).map_err(io_err)?,
            }
            Ok(EXIT_OK)
        }
        Command::Lowerbound {
            n_list,
            trials,
            seed,
            out,
        } => {
            let report = with_jobs(jobs, |exec| lowerbound_sweep(&n_list, trials, seed, exec))
                .map_err(|e| Failure::error(e.to_string()))?;
            let text = report.to_csv();
            stdout.write_all(text.as_bytes()).map_err(io_err)?;
            if let Some(path) = out {
                write_text(&path, &text)?;
            }
            Ok(EXIT_OK)
        }
        Command::Bench { config, out } => {
            let text = read_text(&config)?;
            let config: BenchConfig = serde_json::from_str(&text).map_err(|e| {
                Failure::error(format!("malformed bench config {}: {e}", config.display()))
            })?;
            let output = with_jobs(jobs, |exec| run_bench(&config, exec))
                .map_err(|e| Failure::error(e.to_string()))?;
            write_text(&out, &codec::bench_csv(&output.rows))?;
            for s in &output.skipped {
                let algo = s.algorithm.map_or("*".to_string(), |a| a.to_string());
                writeln!(stderr, "skipped {} n={} {}: {}", s.family, s.n, algo, s.reason)
                    .map_err(io_err)?;
            }
            writeln!(stdout, "rows={} skipped={}", output.rows.len(), output.skipped.len())
                .map_err(io_err)?;
            Ok(EXIT_OK)
        }
        Command::Render { track, car, offset } => {
            let track = load_track(&track)?;
            let picture = match (car, offset) {
                (Some(car), Some(offset)) => {
                    let inst = instance(load_car(&car)?, track.track_length())?;
                    render_ascii(&track, Some((&inst, offset)))
                }
                _ => render_ascii(&track, None),
            }
            .map_err(|e| Failure::error(e.to_string()))?;
            writeln!(stdout, "{picture}").map_err(io_err)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match run_command(cli, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
