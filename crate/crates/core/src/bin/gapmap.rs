use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use gapmap::experiments::{
    self, parse_theta_arg, render, summarize_bounded, summarize_growth, summarize_limsup, summarize_trimmed,
    ExperimentConfig, Format, OutputMeta,
};
use gapmap::measure::{
    integral_log_norm, khinchin_experiment, series_bound, KhinchinConfig, ThresholdFamily, UlamConfig,
};
use gapmap::orbit::{discrepancy_profile, encode_orbit};
use gapmap::renorm::{
    compose_stats, expand_word, level_lengths, orbit_matrices, orbit_rules, renorm_report, run_length, top_eigenvalue,
};
use gapmap::trajectory::leading_quotients;
use gapmap::{gap_trajectory, gates, CFExpansion, ExactReal, Letter};

#[derive(Parser)]
#[command(name = "gapmap", version = gapmap::experiments::VERSION, about = "Gap-map renormalization of rotation discrepancy")]
struct Cli {
    /// Machine-readable output on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct ThetaArg {
    /// `cf:[..]`, `cfper:[..][..]`, `rat:p/q`, or a decimal.
    #[arg(long)]
    theta: String,
    /// Denominator bound for decimal input.
    #[arg(long, default_value_t = 1_000_000)]
    max_den: u64,
}

impl ThetaArg {
    fn expansion(&self) -> Result<CFExpansion> {
        Ok(parse_theta_arg(&self.theta, &BigInt::from(self.max_den))?.expansion()?)
    }
}

#[derive(Args, Clone)]
struct ExpArgs {
    /// JSON experiment config; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long, default_value_t = 1_000_000)]
    max_den: u64,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    orbit_len: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    points: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    checkpoints: Vec<usize>,
}

impl ExpArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(t) = &self.theta {
            cfg.theta_spec = Some(parse_theta_arg(t, &BigInt::from(self.max_den))?.to_string());
        }
        macro_rules! take {
            ($($f:ident),*) => { $(if let Some(v) = self.$f.clone() { cfg.$f = v; })* };
        }
        take!(depth, orbit_len, seed, samples, format, k, epsilon);
        if self.c.is_some() {
            cfg.c = self.c;
        }
        if self.output.is_some() {
            cfg.output = self.output.clone();
        }
        if !self.points.is_empty() {
            cfg.points = self.points.clone();
        }
        if !self.checkpoints.is_empty() {
            cfg.checkpoints = self.checkpoints.clone();
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Gap-map orbit θ₀, …, θₙ with δ factors.
    Traj {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// The level-n word of a letter, with its prefix statistics.
    Word {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long, default_value_t = 3)]
        level: usize,
        #[arg(long, default_value = "A")]
        letter: char,
        /// Refuse to expand words longer than this.
        #[arg(long, default_value_t = 100_000)]
        limit: u64,
    },
    /// Renormalization table by level, or the discrepancy profile of one orbit with `--x`.
    Rho {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long, default_value_t = 20)]
        levels: usize,
        /// Starting point `p/q`.
        #[arg(long)]
        x: Option<String>,
        #[arg(long, default_value_t = 1000)]
        len: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Return matrices along the orbit.
    Matrix {
        #[command(flatten)]
        theta: ThetaArg,
        #[arg(long, default_value_t = 10)]
        levels: usize,
    },
    /// Invariant density by Ulam's method, with the log-norm integral.
    Ulam {
        /// JSON with keys bins, tol, max_iter, branch_cutoff_mass, seed.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exceedance counts of E(a₁(θᵢ)) over a threshold family.
    Khinchin {
        #[arg(long, default_value = "linear")]
        family: ThresholdFamily,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 100)]
        n_min: usize,
        #[arg(long, default_value_t = 5000)]
        n_max: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// ρ(Ωₙ) against iterated-log growth families.
    Growth(ExpArgs),
    /// Half-sums with the largest term removed.
    Trimmed(ExpArgs),
    /// ρ_N(x)/log N for bounded partial quotients.
    Boundedpq(ExpArgs),
    /// Running max of ρ(Ωₙ)/(n log n).
    Limsup(ExpArgs),
    /// Run the acceptance gates; exits nonzero if any fails.
    Verify {
        /// Only these gate ids.
        #[arg(long, value_delimiter = ',')]
        gate: Vec<u8>,
    },
}

#[derive(Serialize)]
struct TrajRow {
    i: usize,
    cf: String,
    a1: u64,
    e: u64,
    theta: f64,
    delta: String,
    decay_rate: Option<f64>,
}

#[derive(Serialize)]
struct MatrixRow {
    n: usize,
    a1: u64,
    a2: Option<u64>,
    a3: Option<u64>,
    m: String,
    det: String,
    spectral_radius: f64,
    table_eigenvalue: f64,
    len_a: String,
    len_c: String,
}

#[derive(Serialize)]
struct ProfileRow {
    i: usize,
    s: i64,
    rho: u64,
}

#[derive(Serialize)]
struct DensityRow {
    bin: usize,
    left: f64,
    right: f64,
    value: f64,
}

struct Out {
    json: bool,
}

impl Out {
    fn format(&self, fallback: Format) -> Format {
        if self.json {
            Format::Json
        } else {
            fallback
        }
    }

    /// Records to `path` if given, else stdout.
    fn records<T: Serialize>(&self, rows: &[T], meta: &OutputMeta, fmt: Format, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) => {
                experiments::emit(rows, meta, fmt, p)?;
                eprintln!("wrote {} rows to {}", rows.len(), p.display());
            }
            None => say(&render(rows, meta, fmt)?),
        }
        Ok(())
    }

    /// Summaries go to stderr so stdout stays a single table.
    fn summary<T: Serialize + std::fmt::Debug>(&self, label: &str, s: &T) {
        if self.json {
            eprintln!("{}", serde_json::to_string(s).unwrap_or_default());
        } else {
            eprintln!("{label}: {s:?}");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let out = Out { json: cli.json };
    match cli.cmd {
        Cmd::Traj { theta, n } => {
            let th = theta.expansion()?;
            let t = gap_trajectory(&th, n)?;
            let rows: Vec<TrajRow> = t
                .entries
                .iter()
                .enumerate()
                .map(|(i, s)| TrajRow {
                    i,
                    cf: s.cf.spec(),
                    a1: s.a1,
                    e: s.e,
                    theta: s.cf.value().to_f64(),
                    delta: s.delta.to_string(),
                    decay_rate: (i > 0).then(|| t.decay_rate(i)),
                })
                .collect();
            let meta = OutputMeta::new("traj", &th.spec(), 0).param("n", n);
            out.records(&rows, &meta, out.format(Format::Csv), None)?;
        }
        Cmd::Word {
            theta,
            level,
            letter,
            limit,
        } => {
            let th = theta.expansion()?;
            let l = Letter::from_char(letter).with_context(|| format!("letter must be A, B or C, got {letter}"))?;
            let rules = orbit_rules(&th, level)?;
            let stats = compose_stats(&rules, l);
            let word = expand_word(&rules, l, limit)?;
            #[derive(Serialize)]
            struct WordOut {
                level: usize,
                letter: char,
                rho: String,
                stats: gapmap::WordStats,
                runs: String,
            }
            let w = WordOut {
                level,
                letter,
                rho: stats.rho().to_string(),
                stats,
                runs: run_length(&word),
            };
            if out.json {
                say(&serde_json::to_string_pretty(&w)?);
            } else {
                say(&format!(
                    "level {level} letter {letter}: len {} rho {}",
                    w.stats.len, w.rho
                ));
                say(&w.runs);
            }
        }
        Cmd::Rho {
            theta,
            levels,
            x,
            len,
            output,
        } => {
            let th = theta.expansion()?;
            match x {
                Some(x) => {
                    let x0: BigRational = x.parse().map_err(|_| anyhow::anyhow!("--x must be p/q, got {x:?}"))?;
                    let enc = encode_orbit(&ExactReal::from_rational(x0), &th.value(), len)?;
                    let prof = discrepancy_profile(&enc);
                    let rows: Vec<ProfileRow> = prof
                        .sums
                        .iter()
                        .zip(&prof.rho)
                        .enumerate()
                        .map(|(i, (&s, &rho))| ProfileRow { i: i + 1, s, rho })
                        .collect();
                    let meta = OutputMeta::new("rho-profile", &th.spec(), 0)
                        .param("x", &x)
                        .param("len", len);
                    out.records(&rows, &meta, out.format(Format::Csv), output.as_deref())?;
                }
                None => {
                    let rows = renorm_report(&th, levels)?;
                    let meta = OutputMeta::new("rho", &th.spec(), 0).param("levels", levels);
                    out.records(&rows, &meta, out.format(Format::Csv), output.as_deref())?;
                }
            }
        }
        Cmd::Matrix { theta, levels } => {
            let th = theta.expansion()?;
            let qs = leading_quotients(&th, levels)?;
            let mats = orbit_matrices(&th, levels)?;
            let lens = level_lengths(&mats);
            let rows = qs
                .iter()
                .zip(&mats)
                .enumerate()
                .map(|(i, (q, m))| {
                    Ok(MatrixRow {
                        n: i + 1,
                        a1: q.a1,
                        a2: q.a2,
                        a3: q.a3,
                        m: m.to_string(),
                        det: m.det().to_string(),
                        spectral_radius: m.spectral_radius(),
                        table_eigenvalue: top_eigenvalue(q)?,
                        len_a: lens[i + 1][0].to_string(),
                        len_c: lens[i + 1][1].to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let meta = OutputMeta::new("matrix", &th.spec(), 0).param("levels", levels);
            out.records(&rows, &meta, out.format(Format::Csv), None)?;
        }
        Cmd::Ulam {
            config,
            bins,
            tol,
            max_iter,
            output,
        } => {
            let mut cfg = match config {
                Some(p) => {
                    UlamConfig::from_json(&std::fs::read_to_string(&p).with_context(|| p.display().to_string())?)?
                }
                None => UlamConfig::default(),
            };
            cfg.bins = bins.unwrap_or(cfg.bins);
            cfg.tol = tol.unwrap_or(cfg.tol);
            cfg.max_iter = max_iter.unwrap_or(cfg.max_iter);
            let (_, d) = cfg.solve()?;
            let n = d.bins as f64;
            let rows: Vec<DensityRow> = d
                .values
                .iter()
                .enumerate()
                .map(|(i, &value)| DensityRow {
                    bin: i,
                    left: i as f64 / n,
                    right: (i + 1) as f64 / n,
                    value,
                })
                .collect();
            let meta = OutputMeta::new("ulam", "none", cfg.seed)
                .param("bins", cfg.bins)
                .param("tol", cfg.tol)
                .param("branch_cutoff_mass", cfg.branch_cutoff_mass);
            out.records(&rows, &meta, out.format(Format::Csv), output.as_deref())?;
            #[derive(Debug, Serialize)]
            struct UlamSummary {
                residual: f64,
                iterations: usize,
                min: f64,
                max: f64,
                mass_upper_half: f64,
                integral: gapmap::measure::LogNormIntegral,
                series: gapmap::measure::SeriesBound,
            }
            out.summary(
                "ulam",
                &UlamSummary {
                    residual: d.residual,
                    iterations: d.iterations,
                    min: d.min(),
                    max: d.max(),
                    mass_upper_half: d.mass_upper_half(),
                    integral: integral_log_norm(&d),
                    series: series_bound(),
                },
            );
        }
        Cmd::Khinchin {
            family,
            samples,
            n_min,
            n_max,
            seed,
            output,
        } => {
            let cfg = KhinchinConfig::new(family, samples, n_min, n_max, seed);
            let report = khinchin_experiment(&cfg)?;
            if let Some(p) = &output {
                report.write_csv(p)?;
                eprintln!("wrote {} rows to {}", report.samples.len(), p.display());
            }
            if out.json {
                say(&serde_json::to_string_pretty(&report)?);
            } else {
                say(&format!(
                    "family {family}, window [{n_min}, {n_max}], {samples} samples"
                ));
                for (end, m) in report.ends.iter().zip(&report.median_at) {
                    say(&format!("  n ≤ {end:>7}: median exceedances {m}"));
                }
                say(&format!("  growing fraction {:.3}", report.growing_fraction));
            }
        }
        Cmd::Growth(a) => {
            let cfg = a.resolve()?;
            let fam = experiments::IteratedLog::from_config(&cfg)?;
            let rows = experiments::run_growth_experiment(&cfg, &fam)?;
            let meta = meta_for("growth", &cfg)
                .param("k", fam.k)
                .param("epsilon", fam.epsilon)
                .param("c", fam.c);
            out.records(&rows, &meta, out.format(cfg.format), cfg.output.as_deref())?;
            out.summary("growth", &summarize_growth(&rows));
        }
        Cmd::Trimmed(a) => {
            let cfg = a.resolve()?;
            let rows = experiments::run_trimmed_sums(&cfg)?;
            out.records(
                &rows,
                &meta_for("trimmed", &cfg),
                out.format(cfg.format),
                cfg.output.as_deref(),
            )?;
            out.summary("trimmed", &summarize_trimmed(&rows));
        }
        Cmd::Boundedpq(a) => {
            let mut cfg = a.resolve()?;
            cfg.theta_spec
                .get_or_insert_with(|| experiments::bounded::DEFAULT_THETA.into());
            let rows = experiments::run_bounded_pq_check(&cfg)?;
            let meta = meta_for("boundedpq", &cfg).param("orbit_len", cfg.orbit_len);
            out.records(&rows, &meta, out.format(cfg.format), cfg.output.as_deref())?;
            out.summary("boundedpq", &summarize_bounded(&rows));
        }
        Cmd::Limsup(a) => {
            let cfg = a.resolve()?;
            let rows = experiments::run_limsup_probe(&cfg)?;
            out.records(
                &rows,
                &meta_for("limsup", &cfg),
                out.format(cfg.format),
                cfg.output.as_deref(),
            )?;
            out.summary("limsup", &summarize_limsup(&rows));
        }
        Cmd::Verify { gate } => {
            let verdicts: Vec<gates::GateVerdict> = if gate.is_empty() {
                gates::run_all()
            } else {
                if let Some(bad) = gate.iter().find(|&&g| !(1..=11).contains(&g)) {
                    bail!("gate ids run from 1 to 11, got {bad}");
                }
                gate.iter().map(|&g| gates::run_gate(g)).collect()
            };
            if out.json {
                say(&serde_json::to_string_pretty(&verdicts)?);
            } else {
                for v in &verdicts {
                    say(&format!("{v}"));
                }
            }
            return Ok(verdicts.iter().all(|v| v.passed));
        }
    }
    Ok(true)
}

/// Writes to stdout; a closed pipe ends the process quietly.
fn say(s: &str) {
    let mut out = std::io::stdout().lock();
    let text = if s.ends_with('\n') {
        s.to_string()
    } else {
        format!("{s}\n")
    };
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(2);
    }
}

fn meta_for(name: &str, cfg: &ExperimentConfig) -> OutputMeta {
    OutputMeta::new(name, &cfg.theta_label(), cfg.seed)
        .param("depth", cfg.depth)
        .param("samples", cfg.samples)
}
