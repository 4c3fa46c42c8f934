//! The `k3ls` command-line interface.
//!
//! Every subcommand supports `--format human|json|csv` (csv only where the
//! output is tabular) and `--output FILE`. Exit codes: 0 success, 1 usage
//! error, 2 computation error.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use k3ls_core::classifier::{classify, segre_audit, Verdict};
use k3ls_core::degeneration::{theorem_deg_certify, CertificateTree, HomogeneousSystem};
use k3ls_core::model::{K3Model, K3ModelSpec, ModelVariant};
use k3ls_core::numerics::SystemClass;
use k3ls_core::oracle::{
    measure_general_multiplicity, speciality_test, speciality_test_with_reseed, OracleReport,
    DEFAULT_PRIME, DEFAULT_TRIALS,
};

use crate::certificate::{verify_document, CertificateDocument};
use crate::model_file::{parse_model, render_model};
use crate::shorthand::parse_mults;
use crate::sweep::{sweep, OracleConfig, SweepRow};
use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "k3ls",
    version,
    about = "Linear systems through fat points on generic K3 surfaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Human)]
    pub format: OutputFormat,
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

/// One system class `L^n(d, m_1, ..., m_r)`.
#[derive(Debug, Args)]
pub struct ClassArgs {
    /// Polarization self-intersection H^2 (even, >= 2).
    #[arg(long)]
    pub n: u64,
    /// Degree d of the class d*H.
    #[arg(long)]
    pub d: u64,
    /// Point multiplicities; exponent shorthand allowed (e.g. "2^4,3").
    #[arg(long, default_value = "")]
    pub mults: String,
}

#[derive(Debug, Args)]
pub struct OracleOpts {
    /// Field characteristic (a prime above 10^6).
    #[arg(long, env = "K3LS_PRIME", default_value_t = DEFAULT_PRIME)]
    pub prime: u64,
    /// Seed for the deterministic model and point streams.
    #[arg(long, env = "K3LS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Independent point configurations per measurement.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Virtual and expected dimension of one class.
    Vdim(ClassArgs),
    /// Conjectural classification of one class.
    Classify(ClassArgs),
    /// Audit a hypothesized fixed-part decomposition.
    Audit {
        /// Polarization self-intersection H^2 shared by all components.
        #[arg(long)]
        n: u64,
        /// Fixed component as "d:mults:multiplicity", repeatable.
        #[arg(long = "part", required = true)]
        parts: Vec<String>,
        /// Mobile part as "d:mults"; defaults to the zero class.
        #[arg(long)]
        mobile: Option<String>,
    },
    /// Degeneration certificate for a homogeneous system L^n(d, m^(4^h 9^k)).
    Certify {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: u64,
        /// Common multiplicity of all points.
        #[arg(long)]
        m: u64,
        /// Exponent of 4 in the point count.
        #[arg(long, default_value_t = 0)]
        h: u32,
        /// Exponent of 9 in the point count.
        #[arg(long = "k", default_value_t = 0)]
        k9: u32,
        /// Run the interpolation oracle on the single-point leaf.
        #[arg(long)]
        check_leaves: bool,
        #[command(flatten)]
        oracle: OracleOpts,
    },
    /// Verify a serialized certificate, re-deriving every stored integer.
    Verify {
        /// Certificate JSON file.
        file: PathBuf,
        /// Skip the deterministic leaf-oracle re-run.
        #[arg(long)]
        skip_oracle: bool,
    },
    /// Finite-field interpolation oracle for one class.
    Oracle {
        #[command(flatten)]
        class: ClassArgs,
        #[command(flatten)]
        oracle: OracleOpts,
        /// Use an explicit model file instead of the seeded default
        /// (disables the reseed-on-evidence policy).
        #[arg(long)]
        model_file: Option<PathBuf>,
    },
    /// Measured multiplicity of the general member at one point.
    Mult {
        #[command(flatten)]
        class: ClassArgs,
        /// Index of the point to probe (0-based, into the multiplicity list).
        #[arg(long)]
        index: usize,
        #[command(flatten)]
        oracle: OracleOpts,
    },
    /// Classify every configuration in a range, optionally oracle-checked.
    Sweep {
        /// Lattice degrees to cover, comma separated (e.g. "2,4").
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        d_min: u64,
        #[arg(long)]
        d_max: u64,
        /// Maximum number of points per configuration.
        #[arg(long, default_value_t = 5)]
        r_max: usize,
        /// Cross-check every row against the interpolation oracle.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        opts: OracleOpts,
    },
    /// Generate and print a concrete model file.
    Model {
        /// Polarization self-intersection (4: quartic, 2: double plane).
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        oracle: OracleOpts,
    },
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

fn class_from_args(args: &ClassArgs) -> Result<SystemClass> {
    let mults = parse_mults(&args.mults).map_err(|e| usage(format!("{e:#}")))?;
    SystemClass::new(args.n, args.d, mults).map_err(|e| usage(format!("{e}")))
}

fn variant_for(n: u64) -> Result<ModelVariant> {
    ModelVariant::for_n(n)
        .ok_or_else(|| usage(format!("no concrete model for n = {n}; supported: 2, 4")))
}

fn spec_for(n: u64, opts: &OracleOpts) -> Result<K3ModelSpec> {
    K3ModelSpec::new(variant_for(n)?, opts.prime, opts.seed).map_err(|e| usage(format!("{e}")))
}

fn doc(command: &str, config: Value, result: Value) -> Value {
    json!({
        "tool": "k3ls",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "result": result,
    })
}

fn class_echo(l: &SystemClass) -> Value {
    json!({
        "n": l.n(),
        "d": l.d(),
        "mults": l.mults(),
        "shorthand": l.mults_shorthand(),
        "display": l.to_string(),
    })
}

pub const CSV_HEADER: &str = "n,d,mults,v,e,case_tag,predicted_dim,actual_dim,agreement";

fn csv_row(row: &SweepRow) -> String {
    format!(
        "{},{},\"{}\",{},{},{},{},{},{}",
        row.n,
        row.d,
        row.mults,
        row.v,
        row.e,
        row.case_tag,
        row.predicted_dim,
        row.actual_dim.map(|a| a.to_string()).unwrap_or_default(),
        row.agreement.map(|a| a.to_string()).unwrap_or_default(),
    )
}

fn csv_table(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&csv_row(row));
        out.push('\n');
    }
    out
}

fn row_from_parts(
    l: &SystemClass,
    verdict: Option<&Verdict>,
    report: Option<&OracleReport>,
) -> Result<SweepRow> {
    let pair = l.expected_dim()?;
    let (case_tag, predicted) = match verdict {
        Some(v) => (v.case_tag.as_str().to_string(), v.predicted_dim),
        None => (String::new(), pair.e),
    };
    Ok(SweepRow {
        n: l.n(),
        d: l.d(),
        mults: l.mults_shorthand(),
        v: pair.v,
        e: pair.e,
        case_tag,
        predicted_dim: predicted,
        actual_dim: report.map(|r| r.actual_dim),
        agreement: report.map(|r| r.actual_dim as i128 == verdict.map_or(pair.e, |v| v.predicted_dim)),
    })
}

struct Rendered {
    human: String,
    json: Value,
    csv: Option<String>,
}

fn finish(format: OutputFormat, r: Rendered) -> Result<String> {
    match format {
        OutputFormat::Human => Ok(r.human),
        OutputFormat::Json => Ok(format!("{:#}\n", r.json)),
        OutputFormat::Csv => r
            .csv
            .ok_or_else(|| usage("csv output is not supported for this command")),
    }
}

fn cmd_vdim(args: &ClassArgs) -> Result<Rendered> {
    let l = class_from_args(args)?;
    let pair = l.expected_dim()?;
    let human = format!("{l}: v = {}, e = {}\n", pair.v, pair.e);
    let json = doc(
        "vdim",
        class_echo(&l),
        json!({ "virtual_dim": pair.v, "expected_dim": pair.e }),
    );
    let row = row_from_parts(&l, None, None)?;
    Ok(Rendered {
        human,
        json,
        csv: Some(csv_table(std::slice::from_ref(&row))),
    })
}

fn describe_verdict(l: &SystemClass, verdict: &Verdict) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{l}: {}", verdict.case_tag.as_str());
    let _ = writeln!(
        out,
        "  special: {}, predicted dim: {}",
        verdict.special, verdict.predicted_dim
    );
    for (cls, mu) in &verdict.fixed_part {
        let _ = writeln!(out, "  fixed component: {mu} x {cls}");
    }
    if verdict.mobile_part.d() > 0 {
        let _ = writeln!(out, "  mobile part: {}", verdict.mobile_part);
    }
    if !verdict.notes.is_empty() {
        let _ = writeln!(out, "  note: {}", verdict.notes);
    }
    out
}

fn cmd_classify(args: &ClassArgs) -> Result<Rendered> {
    let l = class_from_args(args)?;
    let verdict = classify(&l)?;
    let human = describe_verdict(&l, &verdict);
    let json = doc(
        "classify",
        class_echo(&l),
        serde_json::to_value(&verdict)?,
    );
    let row = row_from_parts(&l, Some(&verdict), None)?;
    Ok(Rendered {
        human,
        json,
        csv: Some(csv_table(std::slice::from_ref(&row))),
    })
}

fn parse_part(n: u64, s: &str) -> Result<(SystemClass, u64)> {
    let fields: Vec<&str> = s.split(':').collect();
    let [d, mults, mu] = fields.as_slice() else {
        return Err(usage(format!("part must be d:mults:multiplicity, got {s:?}")));
    };
    let d: u64 = d.parse().map_err(|_| usage(format!("bad degree in part {s:?}")))?;
    let mults = parse_mults(mults).map_err(|e| usage(format!("{e:#}")))?;
    let mu: u64 = mu
        .parse()
        .map_err(|_| usage(format!("bad multiplicity in part {s:?}")))?;
    let cls = SystemClass::new(n, d, mults).map_err(|e| usage(format!("{e}")))?;
    Ok((cls, mu))
}

fn parse_mobile(n: u64, s: &str) -> Result<SystemClass> {
    let fields: Vec<&str> = s.split(':').collect();
    let [d, mults] = fields.as_slice() else {
        return Err(usage(format!("mobile must be d:mults, got {s:?}")));
    };
    let d: u64 = d.parse().map_err(|_| usage(format!("bad degree in mobile {s:?}")))?;
    let mults = parse_mults(mults).map_err(|e| usage(format!("{e:#}")))?;
    SystemClass::new(n, d, mults).map_err(|e| usage(format!("{e}")))
}

fn cmd_audit(n: u64, parts: &[String], mobile: Option<&str>) -> Result<Rendered> {
    let parts: Vec<(SystemClass, u64)> = parts
        .iter()
        .map(|s| parse_part(n, s))
        .collect::<Result<_>>()?;
    let mobile = match mobile {
        Some(s) => parse_mobile(n, s)?,
        None => SystemClass::zero(n).map_err(|e| usage(format!("{e}")))?,
    };
    let report = segre_audit(&parts, &mobile)?;
    let mut human = String::new();
    for pair in &report.pairs {
        let _ = writeln!(
            human,
            "pair {} | {}: v = ({}, {}), product = {}{}{}",
            pair.left,
            pair.right,
            pair.v_left,
            pair.v_right,
            pair.product,
            if pair.allowed_unit { " [allowed unit]" } else { "" },
            if pair.violation { " VIOLATION" } else { "" },
        );
    }
    for sc in &report.self_checks {
        let _ = writeln!(
            human,
            "self {} x{}: C^2 = {}{}",
            sc.cls,
            sc.mu,
            sc.self_intersection,
            if sc.violation { " VIOLATION" } else { "" },
        );
    }
    let _ = writeln!(
        human,
        "audit: {}",
        if report.is_clean() { "clean" } else { "violations found" }
    );
    let json = doc(
        "audit",
        json!({
            "n": n,
            "parts": parts
                .iter()
                .map(|(c, mu)| json!({ "class": class_echo(c), "multiplicity": mu }))
                .collect::<Vec<_>>(),
            "mobile": class_echo(&mobile),
        }),
        json!({
            "clean": report.is_clean(),
            "report": serde_json::to_value(&report.pairs)?,
            "self_checks": serde_json::to_value(&report.self_checks)?,
        }),
    );
    Ok(Rendered {
        human,
        json,
        csv: None,
    })
}

fn describe_tree(tree: &CertificateTree) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "root: {}", tree.root);
    for (i, node) in tree.steps.iter().enumerate() {
        let _ = writeln!(
            out,
            "step {}: {} -> {} planes x {} points, twist {}, K3 part {}, \
             gluing correction {} [{}]",
            i + 1,
            node.system,
            node.plan.b,
            node.plan.per_plane_points,
            node.plan.twist,
            node.plan.s_part,
            node.audit.gluing_correction,
            if node.audit.ok { "ok" } else { "FAILED" },
        );
    }
    let _ = writeln!(out, "leaf: {}", tree.leaf);
    let _ = writeln!(out, "verdict: {}", tree.verdict.as_str());
    if let Some(report) = &tree.leaf_report {
        let _ = writeln!(
            out,
            "leaf oracle: rank {}/{} over p = {}, seed {}, actual = {}, expected = {}",
            report.effective_rank,
            report.basis_dim,
            report.prime,
            report.seed,
            report.actual_dim,
            report.expected_dim,
        );
    }
    let _ = writeln!(out, "note: {}", tree.note);
    out
}

fn cmd_certify(
    n: u64,
    d: u64,
    m: u64,
    h: u32,
    k9: u32,
    check_leaves: bool,
    opts: &OracleOpts,
) -> Result<Rendered> {
    let root = HomogeneousSystem::new(n, d, m, h, k9).map_err(|e| usage(format!("{e}")))?;
    let tree = if check_leaves {
        let prime = opts.prime;
        let seed = opts.seed;
        let trials = opts.trials;
        let checker = move |leaf: &SystemClass| -> Result<Option<OracleReport>, k3ls_core::Error> {
            let Some(variant) = ModelVariant::for_n(leaf.n()) else {
                return Ok(None);
            };
            let spec = K3ModelSpec::new(variant, prime, seed)?;
            speciality_test_with_reseed(&spec, leaf, trials).map(Some)
        };
        theorem_deg_certify(&root, Some(&checker))?
    } else {
        theorem_deg_certify(&root, None)?
    };
    let human = describe_tree(&tree);
    let json = serde_json::to_value(CertificateDocument::new(tree))?;
    Ok(Rendered {
        human,
        json,
        csv: None,
    })
}

fn cmd_verify(file: &PathBuf, skip_oracle: bool) -> Result<Rendered> {
    let text = std::fs::read_to_string(file)
        .with_context(|| format!("cannot read {}", file.display()))?;
    let lines = verify_document(&text, !skip_oracle)?;
    let mut human = String::new();
    for line in &lines {
        let _ = writeln!(human, "ok: {line}");
    }
    let _ = writeln!(human, "certificate verified");
    let json = doc(
        "verify",
        json!({ "file": file.display().to_string(), "recheck_oracle": !skip_oracle }),
        json!({ "verified": true, "checks": lines }),
    );
    Ok(Rendered {
        human,
        json,
        csv: None,
    })
}

fn oracle_opts_echo(opts: &OracleOpts) -> Value {
    json!({ "prime": opts.prime, "seed": opts.seed, "trials": opts.trials })
}

fn describe_report(l: &SystemClass, report: &OracleReport, verdict: &Verdict) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{l}: rank {}/{} over p = {}, seed {}",
        report.effective_rank, report.basis_dim, report.prime, report.seed
    );
    let _ = writeln!(
        out,
        "  actual dim = {}, expected dim = {}",
        report.actual_dim, report.expected_dim
    );
    let status = if report.certified_nonspecial {
        "certified non-special"
    } else if report.special_evidence {
        "speciality evidence (not a proof)"
    } else {
        "inconclusive"
    };
    let _ = writeln!(out, "  status: {status}");
    let _ = writeln!(
        out,
        "  classifier: {} predicts dim {} ({})",
        verdict.case_tag.as_str(),
        verdict.predicted_dim,
        if report.actual_dim as i128 == verdict.predicted_dim {
            "agrees"
        } else {
            "disagrees"
        },
    );
    out
}

fn cmd_oracle(
    class: &ClassArgs,
    opts: &OracleOpts,
    model_file: Option<&PathBuf>,
) -> Result<Rendered> {
    let l = class_from_args(class)?;
    let verdict = classify(&l)?;
    let (report, model_source) = match model_file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            let model: K3Model = parse_model(&text)?;
            if model.n() != l.n() {
                return Err(usage(format!(
                    "model file has n = {}, class has n = {}",
                    model.n(),
                    l.n()
                )));
            }
            (
                speciality_test(&model, &l, opts.trials)?,
                json!({ "file": path.display().to_string() }),
            )
        }
        None => {
            let spec = spec_for(l.n(), opts)?;
            (
                speciality_test_with_reseed(&spec, &l, opts.trials)?,
                json!({ "seeded": true, "reseed_policy": true }),
            )
        }
    };
    let human = describe_report(&l, &report, &verdict);
    let json = doc(
        "oracle",
        json!({
            "class": class_echo(&l),
            "options": oracle_opts_echo(opts),
            "model": model_source,
        }),
        json!({
            "report": serde_json::to_value(&report)?,
            "classifier": serde_json::to_value(&verdict)?,
            "agreement": report.actual_dim as i128 == verdict.predicted_dim,
        }),
    );
    let row = row_from_parts(&l, Some(&verdict), Some(&report))?;
    Ok(Rendered {
        human,
        json,
        csv: Some(csv_table(std::slice::from_ref(&row))),
    })
}

fn cmd_mult(class: &ClassArgs, index: usize, opts: &OracleOpts) -> Result<Rendered> {
    let l = class_from_args(class)?;
    if index >= l.normalized().point_count() {
        return Err(usage(format!(
            "index {index} out of range for {} points",
            l.normalized().point_count()
        )));
    }
    let spec = spec_for(l.n(), opts)?;
    let measured = measure_general_multiplicity(&spec.build(), &l, index, opts.trials)?;
    let imposed = l.normalized().mults()[index];
    let human = format!(
        "{l}: point {index} imposed multiplicity {imposed}, measured {measured}{}\n",
        if measured == imposed {
            " (exact)"
        } else {
            " (general member exceeds the imposed multiplicity)"
        },
    );
    let json = doc(
        "mult",
        json!({
            "class": class_echo(&l),
            "index": index,
            "options": oracle_opts_echo(opts),
        }),
        json!({
            "imposed": imposed,
            "measured": measured,
            "exact": measured == imposed,
        }),
    );
    Ok(Rendered {
        human,
        json,
        csv: None,
    })
}

fn cmd_sweep(
    n: &[u64],
    d_min: u64,
    d_max: u64,
    r_max: usize,
    with_oracle: bool,
    opts: &OracleOpts,
) -> Result<Rendered> {
    if d_min == 0 || d_min > d_max {
        return Err(usage(format!("need 1 <= d_min <= d_max, got {d_min}..{d_max}")));
    }
    let oracle = if with_oracle {
        for &ni in n {
            variant_for(ni)?;
        }
        Some(OracleConfig {
            prime: opts.prime,
            seed: opts.seed,
            trials: opts.trials,
        })
    } else {
        None
    };
    let rows = sweep(n, d_min, d_max, r_max, oracle)?;
    let mut human = String::new();
    let _ = writeln!(
        human,
        "{} configurations (n in {:?}, d in {d_min}..={d_max}, r <= {r_max})",
        rows.len(),
        n
    );
    for row in &rows {
        let _ = writeln!(
            human,
            "L^{}({},{}) v={} e={} {} predicted={}{}",
            row.n,
            row.d,
            if row.mults.is_empty() { "-" } else { &row.mults },
            row.v,
            row.e,
            row.case_tag,
            row.predicted_dim,
            match (row.actual_dim, row.agreement) {
                (Some(a), Some(true)) => format!(" actual={a} agrees"),
                (Some(a), Some(false)) => format!(" actual={a} DISAGREES"),
                _ => String::new(),
            },
        );
    }
    let json = doc(
        "sweep",
        json!({
            "n": n,
            "d_min": d_min,
            "d_max": d_max,
            "r_max": r_max,
            "oracle": with_oracle,
            "options": oracle_opts_echo(opts),
        }),
        json!({ "rows": serde_json::to_value(&rows)? }),
    );
    Ok(Rendered {
        human,
        json,
        csv: Some(csv_table(&rows)),
    })
}

fn cmd_model(n: u64, opts: &OracleOpts) -> Result<Rendered> {
    let spec = spec_for(n, opts)?;
    let model = spec.build();
    let text = render_model(&model);
    let json = doc(
        "model",
        json!({ "n": n, "options": oracle_opts_echo(opts) }),
        json!({ "variant": model.spec.variant.as_str(), "model_file": text }),
    );
    Ok(Rendered {
        human: text,
        json,
        csv: None,
    })
}

/// Runs one parsed invocation and returns the text to emit.
pub fn run(cli: &Cli) -> Result<String> {
    let rendered = match &cli.command {
        Command::Vdim(args) => cmd_vdim(args)?,
        Command::Classify(args) => cmd_classify(args)?,
        Command::Audit { n, parts, mobile } => cmd_audit(*n, parts, mobile.as_deref())?,
        Command::Certify {
            n,
            d,
            m,
            h,
            k9,
            check_leaves,
            oracle,
        } => cmd_certify(*n, *d, *m, *h, *k9, *check_leaves, oracle)?,
        Command::Verify { file, skip_oracle } => cmd_verify(file, *skip_oracle)?,
        Command::Oracle {
            class,
            oracle,
            model_file,
        } => cmd_oracle(class, oracle, model_file.as_ref())?,
        Command::Mult {
            class,
            index,
            oracle,
        } => cmd_mult(class, *index, oracle)?,
        Command::Sweep {
            n,
            d_min,
            d_max,
            r_max,
            oracle,
            opts,
        } => cmd_sweep(n, *d_min, *d_max, *r_max, *oracle, opts)?,
        Command::Model { n, oracle } => cmd_model(*n, oracle)?,
    };
    finish(cli.format, rendered)
}
