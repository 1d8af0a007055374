//! `kh`: Khovanov homology of braid closures from the command line.

mod cache;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kh_core::braid::{parse_braid_word, BraidWord, MurasugiClass, MurasugiKind, Transform};
use kh_core::complex::{CubeComplex, CubeStats, FrobeniusTheory};
use kh_core::diagram::{braid_closure, PlanarDiagram, SignConvention};
use kh_core::homology::{field_homology, integral_homology, BigradedGroup};
use kh_core::linalg::RingTag;
use kh_core::spectral::{
    bockstein_pages, bockstein_torsion_check, d_b1, infinity_predictions, pages_consistent, sequence_pages,
    HomologyBasis, SpectralPage,
};
use kh_core::suite::{verify_families, Check};
use kh_core::thin::analyze;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use cache::Cache;

/// Crossing counts above this need `--force` whatever the budget.
const HARD_LIMIT: usize = 22;

#[derive(Parser, Debug)]
#[command(name = "kh", version, about = "Khovanov homology of braid closures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Largest crossing count accepted.
    #[arg(long, default_value_t = 16, global = true)]
    budget: usize,
    /// Allow more than 22 crossings.
    #[arg(long, global = true)]
    force: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Include wall-clock timings in the output.
    #[arg(long, global = true)]
    timings: bool,
    /// Directory for cached integral homology.
    #[arg(long, env = "KH_CACHE_DIR", global = true)]
    cache_dir: Option<PathBuf>,
    /// Neither read nor write the cache.
    #[arg(long, global = true)]
    no_cache: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Seq {
    Lee,
    Turner,
    Bockstein,
}

#[derive(Args, Debug, Clone)]
struct LinkArgs {
    /// Braid word: integers (k for sigma_k, -k for its inverse), D or D^n for half twists.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "omega", conflicts_with = "omega")]
    braid: Option<String>,
    /// Number of strands.
    #[arg(long, required_unless_present = "omega")]
    strands: Option<usize>,
    /// Murasugi class index 0..=6, instead of --braid.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=6))]
    omega: Option<u8>,
    /// Twist parameter of the class.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    n: i64,
    /// Comma-separated sigma_1 exponents of the class.
    #[arg(long = "class-p", value_delimiter = ',')]
    class_p: Vec<i64>,
    /// Comma-separated sigma_2 exponents of the class.
    #[arg(long = "class-q", value_delimiter = ',')]
    class_q: Vec<i64>,
    /// Which crossing sign a positive letter gets.
    #[arg(long, default_value = "standard")]
    sign_convention: SignConvention,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Khovanov homology over Z, Q or Z_p.
    Compute {
        #[command(flatten)]
        link: LinkArgs,
        #[arg(long, default_value = "Z")]
        ring: RingTag,
    },
    /// Lee, Turner or Bockstein spectral sequence pages.
    Spectral {
        #[command(flatten)]
        link: LinkArgs,
        #[arg(long, value_enum)]
        seq: Seq,
        /// Coefficients for Lee (Q or an odd prime).
        #[arg(long)]
        ring: Option<RingTag>,
        /// Prime for Bockstein.
        #[arg(long, default_value_t = 2)]
        p: u64,
    },
    /// Thin regions, torsion theorem hypotheses and verdicts.
    Thin {
        #[command(flatten)]
        link: LinkArgs,
    },
    /// Check the 3-braid families Omega_0..Omega_3 within the crossing budget.
    VerifyPaper {
        /// Largest twist parameter n.
        #[arg(long, default_value_t = 2)]
        max_n: i64,
        #[arg(long, default_value = "standard")]
        sign_convention: SignConvention,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Compute(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Compute(_) => "computation",
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn compute_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

/// The link after parsing, with everything needed to echo it.
struct Job {
    word: BraidWord,
    text: String,
    convention: SignConvention,
    transforms: Vec<Transform>,
    class: Option<MurasugiClass>,
}

impl Job {
    fn from_args(a: &LinkArgs, g: &Global) -> Result<Self, CliError> {
        let (word, text, transforms, class) = if let Some(k) = a.omega {
            let kind = [
                MurasugiKind::Omega0,
                MurasugiKind::Omega1,
                MurasugiKind::Omega2,
                MurasugiKind::Omega3,
                MurasugiKind::Omega4,
                MurasugiKind::Omega5,
                MurasugiKind::Omega6,
            ][k as usize];
            let class = MurasugiClass::new(kind, a.n, a.class_p.clone(), a.class_q.clone()).map_err(input)?;
            let reduction = class.reduce_to_nonneg();
            let word = reduction.class.word().map_err(input)?;
            let text = letters_text(&word);
            (word, text, reduction.transforms, Some(class))
        } else {
            let text = a.braid.clone().unwrap_or_default();
            let strands = a.strands.ok_or_else(|| input("--strands is required with --braid"))?;
            (parse_braid_word(&text, strands).map_err(input)?, text, Vec::new(), None)
        };
        let n = word.len();
        if n > HARD_LIMIT && !g.force {
            return Err(input(format!("{n} crossings is above the hard limit {HARD_LIMIT}; pass --force")));
        }
        if n > g.budget {
            return Err(input(format!("{n} crossings exceeds the budget {}; raise --budget", g.budget)));
        }
        Ok(Self {
            word,
            text,
            convention: a.sign_convention,
            transforms,
            class,
        })
    }

    fn diagram(&self) -> PlanarDiagram {
        braid_closure(&self.word, self.convention)
    }

    fn echo(&self) -> Value {
        let mut v = json!({
            "braid": self.text,
            "letters": self.word.letters(),
            "strands": self.word.strands(),
            "sign_convention": self.convention.as_str(),
            "transforms": self.transforms,
        });
        if let Some(c) = &self.class {
            v["class"] = serde_json::to_value(c).expect("class serializes");
        }
        v
    }
}

fn letters_text(w: &BraidWord) -> String {
    w.letters().iter().map(i32::to_string).collect::<Vec<_>>().join(" ")
}

struct Outcome {
    /// JSON payload.
    result: Value,
    /// CSV and table renderings.
    csv: String,
    table: String,
    verified: bool,
    stats: Option<CubeStats>,
    cache: Option<&'static str>,
}

fn cache_for(g: &Global) -> Option<Cache> {
    if g.no_cache {
        return None;
    }
    let dir = g
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("kh")))?;
    Some(Cache::new(dir))
}

/// Integral homology through the cache.
fn integral(job: &Job, d: &PlanarDiagram, g: &Global) -> Result<(BigradedGroup, CubeStats, &'static str), CliError> {
    let c = CubeComplex::build(d, FrobeniusTheory::Khovanov, RingTag::Integers).map_err(input)?;
    let stats = c.stats();
    let cache = cache_for(g);
    let key = cache::key(&job.word, job.convention);
    if let Some(z) = cache.as_ref().and_then(|c| c.load(&key)) {
        return Ok((z, stats, "hit"));
    }
    let z = integral_homology(&c).map_err(compute_err)?;
    if let Some(cache) = &cache {
        if let Err(e) = cache.store(&key, &z) {
            eprintln!("warning: could not write cache in {}: {e}", cache.dir().display());
        }
    }
    Ok((z, stats, if cache.is_some() { "miss" } else { "off" }))
}

fn cmd_compute(job: &Job, ring: RingTag, g: &Global) -> Result<Outcome, CliError> {
    let d = job.diagram();
    if ring == RingTag::Integers {
        let (z, stats, cache) = integral(job, &d, g)?;
        let jones = z.jones();
        Ok(Outcome {
            result: json!({
                "ring": "Z",
                "homology": z,
                "jones": jones.to_string(),
                "jones_terms": jones,
            }),
            csv: output::group_csv(&z),
            table: format!("{}Jones: {jones}\n", output::group_table(&z)),
            verified: true,
            stats: Some(stats),
            cache: Some(cache),
        })
    } else {
        let c = CubeComplex::build(&d, FrobeniusTheory::Khovanov, ring).map_err(input)?;
        let t = field_homology(&c, ring).map_err(compute_err)?;
        Ok(Outcome {
            result: json!({ "ring": ring.label(), "homology": t }),
            csv: output::field_csv(&t),
            table: output::field_grid(&t),
            verified: true,
            stats: Some(c.stats()),
            cache: None,
        })
    }
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check::new(name, passed, detail)
}

fn cmd_spectral(job: &Job, seq: Seq, ring: Option<RingTag>, p: u64, g: &Global) -> Result<Outcome, CliError> {
    let d = job.diagram();
    let predictions = infinity_predictions(&d);
    let mut checks = Vec::new();
    let (pages, stats, prediction): (Vec<SpectralPage>, CubeStats, Value) = match seq {
        Seq::Lee | Seq::Turner => {
            let (theory, ring) = match seq {
                Seq::Lee => (FrobeniusTheory::Lee, ring.unwrap_or(RingTag::Rationals)),
                _ => (FrobeniusTheory::Turner, ring.unwrap_or(RingTag::ModP(2))),
            };
            let pages = sequence_pages(&d, theory, ring).map_err(input)?;
            let kh = CubeComplex::build(&d, FrobeniusTheory::Khovanov, ring).map_err(input)?;
            let e1 = field_homology(&kh, ring).map_err(compute_err)?;
            let last = pages.last().map(|p| p.table.totals_by_i()).unwrap_or_default();
            let total: usize = last.values().sum();
            checks.push(check("e1_is_khovanov", pages.first().map(|p| &p.table) == Some(&e1), format!("{} classes", e1.total())));
            checks.push(check(
                "e_inf_total",
                total == 1 << d.components,
                format!("{total} vs 2^{}", d.components),
            ));
            checks.push(check("e_inf_by_i", last == predictions, format!("{last:?} vs {predictions:?}")));
            (pages, kh.stats(), json!({ "by_i": predictions, "total": 1usize << d.components }))
        }
        Seq::Bockstein => {
            if let Some(r) = ring {
                return Err(input(format!("--ring {r} does not apply to Bockstein; use --p")));
            }
            let field = RingTag::mod_p(p).map_err(input)?;
            let (z, stats, _) = integral(job, &d, g)?;
            let c = CubeComplex::build(&d, FrobeniusTheory::Khovanov, RingTag::Integers).map_err(input)?;
            let pages = bockstein_pages(&c, p).map_err(compute_err)?;
            let free = z.field_table(RingTag::Rationals).with_field(field);
            let e1 = z.field_table(field);
            checks.push(check("e1_is_khovanov", pages.first().map(|p| &p.table) == Some(&e1), format!("{} classes", e1.total())));
            checks.push(check(
                "terminal_is_free_part",
                pages.last().map(|p| &p.table) == Some(&free),
                format!("{} free classes", free.total()),
            ));
            let kp = CubeComplex::build(&d, FrobeniusTheory::Khovanov, field).map_err(input)?;
            let basis = HomologyBasis::mod_p(&kp, p as u32).map_err(compute_err)?;
            let db1 = d_b1(&c, &basis).map_err(compute_err)?;
            let mismatches = bockstein_torsion_check(&z, &db1);
            let d1_rank = pages.first().map_or(0, SpectralPage::total_rank);
            checks.push(check(
                "d1_matches_torsion",
                mismatches.is_empty() && db1.total_rank() == d1_rank,
                format!("rank {d1_rank}, {} mismatches", mismatches.len()),
            ));
            (pages, stats, json!({ "terminal": free }))
        }
    };
    checks.push(check("pages_consistent", pages_consistent(&pages), format!("{} pages", pages.len())));
    let verified = checks.iter().all(|c| c.passed);
    let mut table = output::pages_table(&pages);
    for c in &checks {
        table.push_str(&format!("{}: {} ({})\n", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail));
    }
    Ok(Outcome {
        result: json!({
            "sequence": pages.first().map(|p| p.sequence.to_string()),
            "pages": pages,
            "predictions": prediction,
            "checks": checks,
        }),
        csv: output::pages_csv(&pages),
        table,
        verified,
        stats: Some(stats),
        cache: None,
    })
}

fn cmd_thin(job: &Job, g: &Global) -> Result<Outcome, CliError> {
    let d = job.diagram();
    let (z, stats, cache) = integral(job, &d, g)?;
    let a = analyze(&d, &z, true).map_err(compute_err)?;
    let inapplicable: Vec<Value> = a
        .thick_gradings
        .iter()
        .map(|&i| json!({ "i": i, "diagonals": a.profile.at(i), "count": a.profile.count_at(i) }))
        .collect();
    Ok(Outcome {
        result: json!({
            "homology": z,
            "analysis": a,
            "inapplicable": inapplicable,
            "sound": a.sound(),
        }),
        csv: output::thin_csv(&a),
        table: output::thin_table(&a),
        verified: a.sound(),
        stats: Some(stats),
        cache: Some(cache),
    })
}

fn cmd_verify(max_n: i64, convention: SignConvention, g: &Global) -> Result<Outcome, CliError> {
    if g.budget > HARD_LIMIT && !g.force {
        return Err(input(format!("budget {} is above the hard limit {HARD_LIMIT}; pass --force", g.budget)));
    }
    let report = verify_families(max_n, g.budget, convention).map_err(compute_err)?;
    for s in &report.skipped {
        eprintln!("skipped {} ({} crossings, budget {})", s.label, s.crossings, g.budget);
    }
    Ok(Outcome {
        result: serde_json::to_value(&report).expect("report serializes"),
        csv: output::suite_csv(&report),
        table: output::suite_table(&report),
        verified: report.passed(),
        stats: None,
        cache: None,
    })
}

#[derive(Serialize)]
struct Provenance {
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<CubeStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<Value>,
}

fn run(cli: &Cli) -> Result<(String, bool), CliError> {
    let g = &cli.global;
    if let Some(n) = g.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(input)?;
    }
    let start = Instant::now();
    let (name, echo, outcome) = match &cli.command {
        Command::Compute { link, ring } => {
            let job = Job::from_args(link, g)?;
            ("compute", job.echo(), cmd_compute(&job, *ring, g)?)
        }
        Command::Spectral { link, seq, ring, p } => {
            let job = Job::from_args(link, g)?;
            ("spectral", job.echo(), cmd_spectral(&job, *seq, *ring, *p, g)?)
        }
        Command::Thin { link } => {
            let job = Job::from_args(link, g)?;
            ("thin", job.echo(), cmd_thin(&job, g)?)
        }
        Command::VerifyPaper { max_n, sign_convention } => (
            "verify-paper",
            json!({ "max_n": max_n, "budget": g.budget, "sign_convention": sign_convention.as_str() }),
            cmd_verify(*max_n, *sign_convention, g)?,
        ),
    };
    let timings = g.timings.then(|| {
        json!({ "seconds": start.elapsed().as_secs_f64(), "cache": outcome.cache })
    });
    let text = match g.format {
        Format::Json => {
            let envelope = json!({
                "command": name,
                "input": echo,
                "result": outcome.result,
                "provenance": Provenance {
                    version: env!("CARGO_PKG_VERSION"),
                    stats: outcome.stats,
                    timings,
                },
            });
            serde_json::to_string_pretty(&envelope).expect("envelope serializes") + "\n"
        }
        Format::Csv => outcome.csv,
        Format::Table => {
            let mut t = outcome.table;
            if let Some(v) = timings {
                t.push_str(&format!("timings: {v}\n"));
            }
            t
        }
    };
    Ok((text, outcome.verified))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let err = json!({ "error": { "kind": "input", "message": e.to_string().trim() } });
            println!("{}", serde_json::to_string_pretty(&err).expect("error serializes"));
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok((text, verified)) => {
            print!("{text}");
            if verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            let err = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            println!("{}", serde_json::to_string_pretty(&err).expect("error serializes"));
            ExitCode::from(1)
        }
    }
}
