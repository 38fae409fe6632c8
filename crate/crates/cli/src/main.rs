use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use meppm::design::{BibdCode, Construction};
use meppm::modem::{
    cmeppm_constellation, dmeppm_constellation, ook_constellation, partition_bibd, Constellation,
    MeppmType, Scheme,
};
use meppm::ooc::{
    johnson_bound, search_ooc_with, CorrelationMode, OocCode, OocParams, SearchOptions,
};
use meppm::simulator::{csv_record, min_distance, sweep, DistanceSpace, CSV_HEADER};

mod config;
mod experiment;
mod plot;

/// Seed used when neither `--seed`, the config file nor `MEPPM_SEED` gives one.
const DEFAULT_SEED: u64 = 1;
const SEED_VAR: &str = "MEPPM_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Invalid(String),
}

impl From<meppm::Error> for CliError {
    fn from(e: meppm::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Invalid(_) => 2,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "meppm",
    version,
    about = "BIBD/OOC code tools and MEPPM multiple-access BER simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a cyclic BIBD code from a residue difference set.
    GenBibd {
        #[arg(long)]
        q: usize,
        /// `qr` or `quartic`.
        #[arg(long, default_value = "qr")]
        construction: String,
        /// Translate the difference set by this amount.
        #[arg(long, default_value_t = 0)]
        shift: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for an optical orthogonal code.
    GenOoc {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        w: usize,
        #[arg(long)]
        alpha: usize,
        /// Requested number of codewords.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 200_000)]
        budget: u64,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        /// `strict` or `zero-shift`.
        #[arg(long, default_value = "strict")]
        mode: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a BIBD or OOC file.
    Verify {
        file: PathBuf,
        /// OOC correlation mode: `strict` or `zero-shift`.
        #[arg(long, default_value = "strict")]
        mode: String,
    },
    /// Print a user's constellation as `SYM m: levels`.
    Constellation {
        /// BIBD code file; alternatively use --q and --construction.
        #[arg(long)]
        bibd: Option<PathBuf>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long, default_value = "qr")]
        construction: String,
        /// `cmeppm`, `dmeppm1`, `dmeppm2` or `ook`.
        #[arg(long)]
        scheme: String,
        /// OOC file for cmeppm and ook.
        #[arg(long)]
        ooc: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        user: usize,
        /// D-MEPPM codewords per user.
        #[arg(long)]
        subset_size: Option<usize>,
        /// D-MEPPM branches; defaults to the subset size (type-II) or half of it (type-I).
        #[arg(long)]
        branches: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the sweep described by an experiment file and emit CSV.
    Simulate {
        config: PathBuf,
        /// Worker threads; results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// CSV destination, overriding the config's `[output] csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render BER-versus-N curves from a simulation CSV.
    Plot { csv: PathBuf, svg: PathBuf },
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn read_file(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_VAR) {
        Ok(v) => {
            v.trim().parse().map(Some).map_err(|_| {
                CliError::Invalid(format!("{SEED_VAR}={v:?} is not an unsigned integer"))
            })
        }
        Err(_) => Ok(None),
    }
}

fn gen_bibd(
    q: usize,
    construction: &str,
    shift: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let construction: Construction = construction.parse()?;
    let code = BibdCode::from_difference_set(&construction.difference_set(q)?.translate(shift));
    let report = code.verify();
    if !report.is_empty() {
        return Err(CliError::Invalid(format!(
            "generated code fails verification:\n{report}"
        )));
    }
    let text = code.to_text();
    let summary = format!("{} BIBD, PAPR {}", code.params(), code.papr());
    match out {
        Some(p) => {
            write_out(Some(p), &text)?;
            println!("{summary}");
        }
        None => {
            eprintln!("{summary}");
            write_out(None, &text)?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn gen_ooc(
    l: usize,
    w: usize,
    alpha: usize,
    n: usize,
    seed: u64,
    budget: u64,
    restarts: usize,
    mode: &str,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let params = OocParams::new(l, w, alpha);
    params.validate()?;
    let bound = johnson_bound(l, w, alpha)?;
    let opts = SearchOptions {
        restarts,
        mode: mode.parse()?,
        ..SearchOptions::new(n, seed, budget)
    };
    let code = search_ooc_with(params, &opts)?;
    let mut summary = format!(
        "{params} OOC: Johnson bound {bound}, requested {n}, achieved {}",
        code.len()
    );
    if code.len() < n {
        summary.push_str("\nwarning: fewer codewords than requested");
    }
    match out {
        Some(p) => {
            write_out(Some(p), &code.to_text())?;
            println!("{summary}");
        }
        None => {
            eprintln!("{summary}");
            write_out(None, &code.to_text())?;
        }
    }
    Ok(())
}

fn verify(file: &Path, mode: &str) -> Result<(), CliError> {
    let text = read_file(file)?;
    let first = text.split_whitespace().next().unwrap_or("");
    let (what, report) = match first {
        "BIBD" => {
            let code = BibdCode::from_text(&text)?;
            let report = code.verify();
            (
                format!("{} BIBD", code.params()),
                (report.is_empty(), report.to_string()),
            )
        }
        "OOC" => {
            let code = OocCode::from_text(&text)?;
            let mode: CorrelationMode = mode.parse()?;
            let report = code.verify(mode);
            (
                format!("{} OOC with {} codewords", code.params(), code.len()),
                (report.is_empty(), report.to_string()),
            )
        }
        _ => {
            return Err(CliError::Invalid(format!(
                "{}: not a BIBD or OOC file",
                file.display()
            )))
        }
    };
    let (valid, report) = report;
    if valid {
        println!("{what}: ok");
        Ok(())
    } else {
        println!("{what}: violations");
        print!("{report}");
        Err(CliError::Invalid(format!(
            "{} failed verification",
            file.display()
        )))
    }
}

#[allow(clippy::too_many_arguments)]
fn constellation(
    bibd: Option<&Path>,
    q: Option<usize>,
    construction: &str,
    scheme: &str,
    ooc: Option<&Path>,
    user: usize,
    subset_size: Option<usize>,
    branches: Option<usize>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let scheme: Scheme = scheme.parse()?;
    let load_bibd = || -> Result<BibdCode, CliError> {
        match (bibd, q) {
            (Some(p), None) => Ok(BibdCode::from_text(&read_file(p)?)?),
            (None, Some(q)) => {
                let c: Construction = construction.parse()?;
                Ok(BibdCode::from_difference_set(&c.difference_set(q)?))
            }
            _ => Err(CliError::Invalid(
                "give exactly one of --bibd and --q".into(),
            )),
        }
    };
    let load_ooc = || -> Result<OocCode, CliError> {
        let p = ooc.ok_or_else(|| CliError::Invalid(format!("{scheme} needs --ooc")))?;
        let code = OocCode::from_text(&read_file(p)?)?;
        if user >= code.len() {
            return Err(CliError::Invalid(format!(
                "user {user} out of range, the OOC has {} codewords",
                code.len()
            )));
        }
        Ok(code)
    };
    let (c, bibd): (Constellation, Option<BibdCode>) = match scheme {
        Scheme::CMeppm => {
            let b = load_bibd()?;
            let o = load_ooc()?;
            (cmeppm_constellation(o.codeword(user), &b)?, Some(b))
        }
        Scheme::OokOcdma => (ook_constellation(load_ooc()?.codeword(user)), None),
        Scheme::DMeppmI | Scheme::DMeppmII => {
            let b = load_bibd()?;
            let kind = if scheme == Scheme::DMeppmI {
                MeppmType::I
            } else {
                MeppmType::II
            };
            let size = subset_size
                .ok_or_else(|| CliError::Invalid("D-MEPPM needs --subset-size".into()))?;
            let users = b.len() / size.max(1);
            if user >= users {
                return Err(CliError::Invalid(format!(
                    "user {user} out of range, {users} subsets of size {size} fit"
                )));
            }
            let mut a = partition_bibd(&b, &vec![size; users])?
                .assignments
                .swap_remove(user);
            a.branches = branches.unwrap_or(match kind {
                MeppmType::I => size / 2,
                MeppmType::II => size,
            });
            (dmeppm_constellation(&a, kind, &b)?, Some(b))
        }
    };
    let d_signal = min_distance(&c, DistanceSpace::Signal)?;
    let d_corr = bibd
        .as_ref()
        .map(|b| min_distance(&c, DistanceSpace::Correlator(b)))
        .transpose()?
        .flatten();
    let fmt_d = |d: Option<f64>| d.map_or("n/a".to_string(), |d| format!("{d:.9}"));
    let summary = format!(
        "{scheme}: M={} bits/symbol={} min distance per Λ0: signal {} correlator {}",
        c.len(),
        c.bits_per_symbol(),
        fmt_d(d_signal),
        fmt_d(d_corr)
    );
    match out {
        Some(p) => {
            write_out(Some(p), &c.to_text())?;
            println!("{summary}");
        }
        None => {
            eprintln!("{summary}");
            write_out(None, &c.to_text())?;
        }
    }
    Ok(())
}

fn simulate(
    config_path: &Path,
    threads: Option<usize>,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let (cfg, base) = config::ExperimentConfig::load(config_path)?;
    let seed = match seed.or(cfg.sweep.seed) {
        Some(s) => s,
        None => env_seed()?.unwrap_or(DEFAULT_SEED),
    };
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = threads {
            if t == 0 {
                return Err(CliError::Invalid("--threads must be positive".into()));
            }
            b = b.num_threads(t);
        }
        b.build().map_err(|e| CliError::Io(e.to_string()))?
    };
    let (exp, rows) = pool.install(|| -> Result<_, CliError> {
        let exp = experiment::build(&cfg, &base, seed)?;
        let rows = sweep(&exp.grid)?;
        Ok((exp, rows))
    })?;
    for note in &exp.notes {
        eprintln!("note: {note}");
    }

    let mut writer = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    writer.write_record(CSV_HEADER).map_err(io)?;
    for (i, (point, outcome)) in exp.grid.iter().zip(&rows).enumerate() {
        if let Err(e) = outcome {
            eprintln!("point {i} ({} N={}) failed: {e}", point.scheme, point.users);
        }
        writer
            .write_record(csv_record(point, outcome))
            .map_err(io)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let text = String::from_utf8(bytes).expect("csv output is utf-8");

    let csv_path = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.csv.as_ref().map(|p| config::resolve(&base, p)));
    write_out(csv_path.as_deref(), &text)?;
    if let Some(svg) = &cfg.output.svg {
        let series = plot::read_series(&text)?;
        write_out(
            Some(&config::resolve(&base, svg)),
            &plot::render_svg(&series),
        )?;
    }
    Ok(())
}

fn plot_cmd(csv: &Path, svg: &Path) -> Result<(), CliError> {
    let series = plot::read_series(&read_file(csv)?)?;
    write_out(Some(svg), &plot::render_svg(&series))?;
    println!("{} series written to {}", series.len(), svg.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::GenBibd {
            q,
            construction,
            shift,
            out,
        } => gen_bibd(q, &construction, shift, out.as_deref()),
        Command::GenOoc {
            l,
            w,
            alpha,
            n,
            seed,
            budget,
            restarts,
            mode,
            out,
        } => {
            let seed = match seed {
                Some(s) => s,
                None => env_seed()?.unwrap_or(DEFAULT_SEED),
            };
            gen_ooc(
                l,
                w,
                alpha,
                n,
                seed,
                budget,
                restarts,
                &mode,
                out.as_deref(),
            )
        }
        Command::Verify { file, mode } => verify(&file, &mode),
        Command::Constellation {
            bibd,
            q,
            construction,
            scheme,
            ooc,
            user,
            subset_size,
            branches,
            out,
        } => constellation(
            bibd.as_deref(),
            q,
            &construction,
            &scheme,
            ooc.as_deref(),
            user,
            subset_size,
            branches,
            out.as_deref(),
        ),
        Command::Simulate {
            config,
            threads,
            seed,
            out,
        } => simulate(&config, threads, seed, out.as_deref()),
        Command::Plot { csv, svg } => plot_cmd(&csv, &svg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
