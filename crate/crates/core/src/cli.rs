//! The `sccodes` command line.
//!
//! Exit codes: 0 pass, 1 verification mismatch, 2 invalid configuration,
//! 3 enumeration budget exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::charsums::{check_subspace_sum, omega_check_all, verify_sum_identities, SumCheck};
use crate::error::{Error, Result};
use crate::gf::{FieldTower, DEFAULT_BUDGET};
use crate::optimality::{gray_claims_from_spectrum, gray_image_prediction, gray_verdict, GrayCase};
use crate::ringcode::{
    build_defining_set, generator_matrix, write_generator_matrix, DefiningSet, Family,
};
use crate::simplicial::{SetStats, Support, Supports};
use crate::spectra::{compare, empirical_spectrum, predicted_spectrum, LeeSpectrum};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Seed for every sampled oracle check, so reports are reproducible.
const ORACLE_SEED: u64 = 0x5eed;
/// Largest `q^m` for which verify runs the sum identities.
const IDENTITY_LIMIT: u32 = 1 << 12;
/// Largest `q^m` for which verify runs the `Ω` identity.
const OMEGA_LIMIT: u32 = 1 << 10;

#[derive(Parser, Debug)]
#[command(
    name = "sccodes",
    version,
    about = "Trace codes over Fq + uFq from simplicial complexes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the defining set and report the code length.
    Construct {
        #[command(flatten)]
        job: JobArgs,
        /// Write the Gray-image generator matrix.
        #[arg(long)]
        matrix: bool,
    },
    /// Enumerate the Lee weight distribution and compare it with the closed form.
    Spectrum {
        #[command(flatten)]
        job: JobArgs,
        /// Compare against this spectrum JSON instead of the closed form.
        #[arg(long, value_name = "FILE")]
        inject: Option<PathBuf>,
    },
    /// Run every check for one configuration and emit a JSON report.
    Verify {
        #[command(flatten)]
        job: JobArgs,
    },
    /// Classify the Gray image against the Griesmer bound.
    Optimal {
        #[command(flatten)]
        job: JobArgs,
    },
    /// Enumerate one representative per cardinality class and tabulate verdicts.
    Sweep {
        #[command(flatten)]
        job: JobArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Matrix,
}

#[derive(Args, Debug, Clone)]
pub struct JobArgs {
    /// Base field order (a prime power).
    #[arg(short = 'q')]
    pub q: u64,
    /// Extension degree.
    #[arg(short = 'm')]
    pub m: u32,
    /// Defining-set family (1–4).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub family: Option<u8>,
    /// Gray-image case (5–9); implies its family.
    #[arg(long, value_parser = clap::value_parser!(u8).range(5..=9))]
    pub theorem: Option<u8>,
    /// Support A as a comma-separated 1-based list ("-" or empty for ∅).
    #[arg(short = 'A', default_value = "", allow_hyphen_values = true)]
    pub a: String,
    /// Support B.
    #[arg(short = 'B', default_value = "", allow_hyphen_values = true)]
    pub b: String,
    /// Support B′ ⊆ B.
    #[arg(long = "Bp", default_value = "", allow_hyphen_values = true)]
    pub bp: String,
    /// Maximum number of messages to enumerate.
    #[arg(long)]
    pub budget: Option<u128>,
    /// Write the result to this file instead of stdout.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    /// Output format; `matrix` applies to construct.
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

/// A failed run: exit code plus message.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            Error::NotPrime(_)
            | Error::NotPrimePower(_)
            | Error::InvalidParameter(_)
            | Error::OutOfRange { .. }
            | Error::DimensionMismatch { .. }
            | Error::NotASubset { .. }
            | Error::EmptyComponent { .. }
            | Error::HypothesisViolated { .. } => EXIT_INVALID,
            _ => EXIT_MISMATCH,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: msg.into(),
    }
}

/// Output of a successful run.
struct Outcome {
    code: i32,
    body: String,
}

pub fn parse_support(m: u32, s: &str) -> Result<Support> {
    let s = s.trim();
    if s.is_empty() || s == "-" {
        return Ok(Support::empty(m as usize));
    }
    let idx = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("bad support index {x:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Support::new(m as usize, idx)
}

/// A fully parsed job.
struct Job {
    tower: FieldTower,
    supports: Supports,
    family: Option<Family>,
    case: Option<GrayCase>,
    format: Format,
    output: Option<PathBuf>,
}

impl Job {
    fn new(args: &JobArgs) -> std::result::Result<Job, Failure> {
        if args.m == 0 {
            return Err(invalid("m must be at least 1"));
        }
        let tower = FieldTower::for_order(args.q, args.m, args.budget.unwrap_or(DEFAULT_BUDGET))?;
        let supports = Supports::new(
            parse_support(args.m, &args.a)?,
            parse_support(args.m, &args.b)?,
            parse_support(args.m, &args.bp)?,
        )?;
        let case = args.theorem.map(GrayCase::from_number).transpose()?;
        let family = args.family.map(Family::from_number).transpose()?;
        let family = match (family, case) {
            (Some(f), Some(c)) if f != c.family() => {
                return Err(invalid(format!(
                    "theorem {} uses family {}, not {}",
                    c.number(),
                    c.family(),
                    f
                )))
            }
            (f, c) => f.or(c.map(GrayCase::family)),
        };
        Ok(Job {
            tower,
            supports,
            family,
            case,
            format: args.format,
            output: args.output.clone(),
        })
    }

    fn family(&self) -> std::result::Result<Family, Failure> {
        self.family
            .ok_or_else(|| invalid("one of --family or --theorem is required"))
    }

    fn defining_set(&self) -> std::result::Result<DefiningSet, Failure> {
        Ok(build_defining_set(
            &self.tower,
            self.family()?,
            &self.supports,
        )?)
    }

    fn stats(&self) -> SetStats {
        self.supports.stats()
    }

    fn config_json(&self) -> Value {
        let t = &self.tower;
        let s = &self.supports;
        json!({
            "q": t.q(),
            "p": t.p(),
            "s": t.s(),
            "m": t.m(),
            "family": self.family.map(Family::number),
            "theorem": self.case.map(GrayCase::number),
            "A": s.a.indices(),
            "B": s.b.indices(),
            "Bp": s.bp.indices(),
            "budget": t.budget().to_string(),
        })
    }
}

fn render(format: Format, v: &Value, text: impl FnOnce() -> String) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(v).expect("json")),
        _ => text(),
    }
}

fn construct(job: &Job, matrix: bool) -> std::result::Result<Outcome, Failure> {
    let t = &job.tower;
    let l = job.defining_set()?;
    if matrix || job.format == Format::Matrix {
        let g = generator_matrix(t, &l);
        let mut buf = Vec::new();
        write_generator_matrix(&mut buf, t, &l, &g).map_err(|e| Failure {
            code: EXIT_MISMATCH,
            message: e.to_string(),
        })?;
        return Ok(Outcome {
            code: EXIT_PASS,
            body: String::from_utf8(buf).expect("ascii"),
        });
    }
    let v = json!({
        "config": job.config_json(),
        "n": l.len(),
        "first_len": l.first().len(),
        "second_len": l.second().len(),
    });
    let body = render(job.format, &v, || {
        format!(
            "n={}\n|L1|={}\n|L2|={}\n",
            l.len(),
            l.first().len(),
            l.second().len()
        )
    });
    Ok(Outcome {
        code: EXIT_PASS,
        body,
    })
}

/// Closed-form spectrum for the job: the Gray-image case when one is selected,
/// otherwise the family table.
fn predicted(job: &Job) -> Result<LeeSpectrum> {
    let (q, m, s) = (job.tower.q(), job.tower.m(), job.stats());
    match job.case {
        Some(c) => Ok(gray_image_prediction(c, q, m, &s)?.as_spectrum()),
        None => predicted_spectrum(job.family.expect("family checked"), q, m, &s),
    }
}

fn spectrum(job: &Job, inject: Option<&PathBuf>) -> std::result::Result<Outcome, Failure> {
    let l = job.defining_set()?;
    let e = empirical_spectrum(&job.tower, &l)?;
    let p = match inject {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|err| invalid(format!("cannot read {}: {err}", path.display())))?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|err| invalid(format!("{}: {err}", path.display())))?;
            LeeSpectrum::from_json(&v, job.tower.q())?
        }
        None => predicted(job)?,
    };
    let diff = compare(&e, &p);
    let v = json!({
        "config": job.config_json(),
        "empirical": e.to_json(),
        "predicted": p.to_json(),
        "diff": diff.to_json(),
    });
    let body = render(job.format, &v, || {
        let mut s = format!("n={}\nempirical: {e}\npredicted: {p}\n", e.n);
        if diff.is_empty() {
            s.push_str("diff: none\n");
        } else {
            if let Some((a, b)) = diff.length {
                s.push_str(&format!("diff: length {a} vs {b}\n"));
            }
            if let Some((a, b)) = &diff.size {
                s.push_str(&format!("diff: size {a} vs {b}\n"));
            }
            for r in &diff.rows {
                s.push_str(&format!(
                    "diff: weight {} empirical {} predicted {}\n",
                    r.weight, r.empirical, r.predicted
                ));
            }
        }
        s
    });
    Ok(Outcome {
        code: if diff.is_empty() {
            EXIT_PASS
        } else {
            EXIT_MISMATCH
        },
        body,
    })
}

fn status(c: Option<&SumCheck>) -> &'static str {
    match c {
        None => "skipped",
        Some(c) if c.pass() => "pass",
        Some(_) => "fail",
    }
}

fn sum_check_json(c: &SumCheck) -> Value {
    json!({
        "checked": c.checked,
        "exhaustive": c.exhaustive,
        "failures": c.failures,
        "counterexamples": c.counterexamples,
    })
}

fn verify(job: &Job) -> std::result::Result<Outcome, Failure> {
    let t = &job.tower;
    let family = job.family()?;
    let l = job.defining_set()?;
    let stats = job.stats();
    let e = empirical_spectrum(t, &l)?;
    let mut ok = true;

    let p = predicted_spectrum(family, t.q(), t.m(), &stats)?;
    let diff = compare(&e, &p);
    ok &= diff.is_empty();

    let cases = match job.case {
        Some(c) => vec![c],
        None => GrayCase::applicable(t.q(), t.m(), &stats)
            .into_iter()
            .filter(|c| c.family() == family)
            .collect(),
    };
    let verdict = gray_verdict(&e)?;
    let mut claims = Vec::new();
    for c in &cases {
        let r = gray_claims_from_spectrum(*c, t.m(), &stats, e.clone())?;
        ok &= r.all_pass();
        for chk in &r.checks {
            let mut v = chk.to_json();
            v["theorem"] = json!(c.number());
            claims.push(v);
        }
    }

    let s = &job.supports;
    let subspace = {
        let mut r = check_subspace_sum(t, &s.a, ORACLE_SEED)?;
        r.merge(check_subspace_sum(t, &s.b, ORACLE_SEED)?);
        r.merge(check_subspace_sum(t, &s.bp, ORACLE_SEED)?);
        r
    };
    let identities = if t.ext_order() <= IDENTITY_LIMIT {
        let r = verify_sum_identities(t, &s.a, &s.b, &s.bp, ORACLE_SEED)?;
        let mut all = r.difference;
        all.merge(r.delta_complement);
        all.merge(r.difference_complement);
        Some(all)
    } else {
        None
    };
    let omega = if t.ext_order() <= OMEGA_LIMIT {
        Some(omega_check_all(t, &l, ORACLE_SEED)?)
    } else {
        None
    };
    for c in [Some(&subspace), identities.as_ref(), omega.as_ref()]
        .into_iter()
        .flatten()
    {
        ok &= c.pass();
    }

    let v = json!({
        "config": job.config_json(),
        "pass": ok,
        "spectra": {
            "empirical": e.to_json(),
            "predicted": p.to_json(),
            "diff": diff.to_json(),
        },
        "gray": {
            "params": {"n": verdict.n, "k": verdict.k, "d": verdict.d},
            "verdict": verdict.to_json(),
            "theorems": cases.iter().map(|c| c.number()).collect::<Vec<_>>(),
            "claims_checked": claims,
        },
        "charsums": {
            "lemma2": status(Some(&subspace)),
            "identities": status(identities.as_ref()),
            "omega": status(omega.as_ref()),
            "details": {
                "lemma2": sum_check_json(&subspace),
                "identities": identities.as_ref().map(sum_check_json),
                "omega": omega.as_ref().map(sum_check_json),
            },
        },
    });
    // verify always emits JSON; text adds a one-line summary in front.
    let json_text = format!("{}\n", serde_json::to_string_pretty(&v).expect("json"));
    let body = match job.format {
        Format::Json => json_text,
        _ => format!("{}\n{json_text}", if ok { "PASS" } else { "FAIL" }),
    };
    Ok(Outcome {
        code: if ok { EXIT_PASS } else { EXIT_MISMATCH },
        body,
    })
}

fn optimal(job: &Job) -> std::result::Result<Outcome, Failure> {
    let l = job.defining_set()?;
    let e = empirical_spectrum(&job.tower, &l)?;
    let verdict = gray_verdict(&e)?;
    let claims = match job.case {
        Some(c) => {
            let r = gray_claims_from_spectrum(c, job.tower.m(), &job.stats(), e)?;
            Some(r)
        }
        None => None,
    };
    let v = json!({
        "config": job.config_json(),
        "verdict": verdict.to_json(),
        "claims_checked": claims.as_ref().map(|r| r.checks.iter().map(|c| c.to_json()).collect::<Vec<_>>()),
    });
    let body = render(job.format, &v, || {
        let mut s = format!("{verdict}\n");
        if let Some(r) = &claims {
            for c in &r.checks {
                s.push_str(&format!(
                    "{} {}: expected {}, observed {}\n",
                    if c.pass { "ok  " } else { "FAIL" },
                    c.claim,
                    c.expected,
                    c.observed
                ));
            }
        }
        s
    });
    let pass = claims.as_ref().is_none_or(|r| r.all_pass());
    Ok(Outcome {
        code: if pass { EXIT_PASS } else { EXIT_MISMATCH },
        body,
    })
}

pub const SWEEP_HEADER: [&str; 12] = [
    "family",
    "q",
    "m",
    "|A|",
    "|B|",
    "|B′|",
    "|A∪B|",
    "|A∪B′|",
    "n",
    "k",
    "d",
    "verdict",
];

/// One row of the sweep table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub family: Family,
    pub q: u32,
    pub m: u32,
    pub stats: SetStats,
    /// Gray-image length.
    pub n: u64,
    pub k: u32,
    pub d: u64,
    pub verdict: String,
    /// Whether the enumeration agreed with the closed-form table.
    pub matches: bool,
}

/// Every admissible cardinality class of the given families, enumerated once each.
pub fn sweep_rows(t: &FieldTower, families: &[Family]) -> Result<Vec<SweepRow>> {
    let (q, m) = (t.q(), t.m());
    let mut rows = Vec::new();
    for &family in families {
        for stats in SetStats::enumerate(m) {
            let Ok(p) = predicted_spectrum(family, q, m, &stats) else {
                continue;
            };
            let l = build_defining_set(t, family, &stats.representative(m)?)?;
            let e = empirical_spectrum(t, &l)?;
            let v = gray_verdict(&e)?;
            rows.push(SweepRow {
                family,
                q,
                m,
                stats,
                n: v.n,
                k: v.k,
                d: v.d,
                verdict: v.label().to_string(),
                matches: compare(&e, &p).is_empty(),
            });
        }
    }
    Ok(rows)
}

fn sweep(job: &Job) -> std::result::Result<Outcome, Failure> {
    let families: Vec<Family> = match job.family {
        Some(f) => vec![f],
        None => Family::ALL.to_vec(),
    };
    let rows = sweep_rows(&job.tower, &families)?;
    let all_match = rows.iter().all(|r| r.matches);
    let body = if job.format == Format::Json {
        let v: Vec<Value> = rows
            .iter()
            .map(|r| {
                json!({
                    "family": r.family.number(), "q": r.q, "m": r.m,
                    "stats": r.stats, "n": r.n, "k": r.k, "d": r.d,
                    "verdict": r.verdict, "matches_prediction": r.matches,
                })
            })
            .collect();
        format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
    } else {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Failure {
            code: EXIT_MISMATCH,
            message: e.to_string(),
        };
        w.write_record(SWEEP_HEADER).map_err(csv_err)?;
        for r in &rows {
            let s = r.stats;
            w.write_record([
                r.family.number().to_string(),
                r.q.to_string(),
                r.m.to_string(),
                s.a.to_string(),
                s.b.to_string(),
                s.bp.to_string(),
                s.ab.to_string(),
                s.abp.to_string(),
                r.n.to_string(),
                r.k.to_string(),
                r.d.to_string(),
                r.verdict.clone(),
            ])
            .map_err(csv_err)?;
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf8")
    };
    Ok(Outcome {
        code: if all_match { EXIT_PASS } else { EXIT_MISMATCH },
        body,
    })
}

fn dispatch(cli: &Cli) -> std::result::Result<(Outcome, Option<PathBuf>), Failure> {
    let job_args = match &cli.command {
        Command::Construct { job, .. }
        | Command::Spectrum { job, .. }
        | Command::Verify { job }
        | Command::Optimal { job }
        | Command::Sweep { job } => job,
    };
    let job = Job::new(job_args)?;
    if !matches!(cli.command, Command::Sweep { .. }) {
        job.family()?;
    }
    let out = match &cli.command {
        Command::Construct { matrix, .. } => construct(&job, *matrix),
        Command::Spectrum { inject, .. } => spectrum(&job, inject.as_ref()),
        Command::Verify { .. } => verify(&job),
        Command::Optimal { .. } => optimal(&job),
        Command::Sweep { .. } => sweep(&job),
    }?;
    Ok((out, job.output.clone()))
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_PASS
            };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok((out, path)) => {
            let written = match path {
                Some(p) => fs::write(&p, &out.body)
                    .map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => stdout
                    .write_all(out.body.as_bytes())
                    .map_err(|e| e.to_string()),
            };
            if let Err(msg) = written {
                let _ = writeln!(stderr, "error: {msg}");
                return EXIT_MISMATCH;
            }
            if out.code == EXIT_MISMATCH {
                let _ = writeln!(stderr, "verification mismatch");
            }
            out.code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
