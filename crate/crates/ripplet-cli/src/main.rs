//! Command-line front end for the ripplet construction pipeline.
//!
//! Every subcommand emits a deterministic, plot-ready artifact (CSV or
//! JSON) on stdout or into `--out`. Exit codes: 0 success, 2 parameter
//! domain, 3 input/output, 4 structural mismatch, 5 check-mode failure.

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ripplet::biorthogonal::{bezout_solve, closed_form_dual_n3};
use ripplet::filterbank::{
    analyze, synthesize, Decomposition, DetailBand, FamilyKind, FilterFamily, Signal,
};
use ripplet::laurent::CoeffSeq;
use ripplet::masks::{nonstationary_mask, MaskParams};
use ripplet::prewavelet::sample_prewavelet;
use ripplet::reference::{DUAL_TABLE_N3_MU11, FOUR_DIGIT_TOL, MASK_TABLE_N3_MU11};
use ripplet::refinable::{
    bspline_evaluate, cascade_evaluate, cascade_evaluate_with, shifted_combination, CascadeConfig,
    SampledFunction,
};

#[derive(Parser)]
#[command(
    name = "ripplet",
    version,
    about = "Nonstationary ripplet construction pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Emit scaling mask coefficients for a level or an inclusive level range
    Mask {
        #[arg(long, default_value_t = 3)]
        n: u32,
        /// Level or inclusive range, e.g. `2` or `0..8`
        #[arg(long, default_value = "0..8")]
        m: String,
        #[arg(long, default_value_t = 1.1)]
        mu: f64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Verify the published four-digit values (n=3, mu=1.1, m=0..8)
        #[arg(long)]
        check: bool,
    },
    /// Sample the refinable function of one level by the cascade
    Phi {
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long, default_value_t = 1.1)]
        mu: f64,
        /// Cascade depth
        #[arg(long, default_value_t = 8)]
        depth: u32,
        /// Grid exponent K (grid step 2^-K); default m + depth + 2
        #[arg(long)]
        resolution: Option<u32>,
        /// Add a column with the B-spline of the same order and level
        #[arg(long)]
        overlay_bspline: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the prewavelet of one level
    Psi {
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long, default_value_t = 1.1)]
        mu: f64,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        #[arg(long)]
        resolution: Option<u32>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the dual refinable function of one level (order 3 only)
    Phidual {
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long, default_value_t = 1.1)]
        mu: f64,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        #[arg(long)]
        resolution: Option<u32>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the dual wavelet of one level (order 3 only)
    Psidual {
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long, default_value_t = 1.1)]
        mu: f64,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        #[arg(long)]
        resolution: Option<u32>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the dual masks and compare against the closed form (order 3)
    Biorth {
        #[arg(long, default_value_t = 3)]
        n: u32,
        /// Level or inclusive range, e.g. `1..8`
        #[arg(long, default_value = "0..8")]
        m: String,
        #[arg(long, default_value_t = 1.1)]
        mu: f64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Verify solver/closed-form agreement and the published table
        /// (documented anomalies are reported, not asserted)
        #[arg(long)]
        check: bool,
    },
    /// Decompose a signal file over the multilevel filter bank
    Analyze {
        /// Signal file: CSV `index,value` or JSON array of {index, value}
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value_t = 1.1)]
        mu: f64,
        #[arg(long, default_value_t = 3)]
        levels: u32,
        /// Threshold for the nonzero-coefficient report
        #[arg(long, default_value_t = 1e-8)]
        tau: f64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also decompose with the stationary family and print both counts
        #[arg(long)]
        compare_stationary: bool,
        /// Run the synthesis round trip and print the maximum error
        #[arg(long)]
        verify_pr: bool,
    },
    /// Reconstruct a signal from a JSON decomposition artifact
    Synthesize {
        /// Decomposition artifact produced by `analyze --format json`
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Domain(String),
    Io(String),
    Structure(String),
    Check(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 2,
            CliError::Io(_) => 3,
            CliError::Structure(_) => 4,
            CliError::Check(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Domain(s) | CliError::Io(s) | CliError::Structure(s) | CliError::Check(s) => {
                s
            }
        }
    }
}

impl From<ripplet::Error> for CliError {
    fn from(e: ripplet::Error) -> Self {
        use ripplet::Error::*;
        match e {
            InvalidParameter(_)
            | Resolution(_)
            | NoSolution { .. }
            | IterationLimit { .. }
            | Singular(_) => CliError::Domain(e.to_string()),
            Dimension(_) => CliError::Structure(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Mask {
            n,
            m,
            mu,
            format,
            out,
            check,
        } => {
            let range = parse_level_range(&m)?;
            cmd_mask(n, range, mu, format, out.as_deref(), check)
        }
        Command::Phi {
            n,
            m,
            mu,
            depth,
            resolution,
            overlay_bspline,
            format,
            out,
        } => cmd_phi(
            n,
            m,
            mu,
            depth,
            resolution,
            overlay_bspline,
            format,
            out.as_deref(),
        ),
        Command::Psi {
            n,
            m,
            mu,
            depth,
            resolution,
            format,
            out,
        } => cmd_sampled("psi", n, m, mu, depth, resolution, format, out.as_deref()),
        Command::Phidual {
            n,
            m,
            mu,
            depth,
            resolution,
            format,
            out,
        } => cmd_sampled(
            "phidual",
            n,
            m,
            mu,
            depth,
            resolution,
            format,
            out.as_deref(),
        ),
        Command::Psidual {
            n,
            m,
            mu,
            depth,
            resolution,
            format,
            out,
        } => cmd_sampled(
            "psidual",
            n,
            m,
            mu,
            depth,
            resolution,
            format,
            out.as_deref(),
        ),
        Command::Biorth {
            n,
            m,
            mu,
            format,
            out,
            check,
        } => {
            let range = parse_level_range(&m)?;
            cmd_biorth(n, range, mu, format, out.as_deref(), check)
        }
        Command::Analyze {
            input,
            n,
            mu,
            levels,
            tau,
            format,
            out,
            compare_stationary,
            verify_pr,
        } => cmd_analyze(
            &input,
            n,
            mu,
            levels,
            tau,
            format,
            out.as_deref(),
            compare_stationary,
            verify_pr,
        ),
        Command::Synthesize { input, format, out } => {
            cmd_synthesize(&input, format, out.as_deref())
        }
    }
}

/// Parses `5` or an inclusive `lo..hi`.
fn parse_level_range(text: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError::Domain(format!("cannot parse level range '{text}'"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
        if hi < lo {
            return Err(CliError::Domain(format!("empty level range '{text}'")));
        }
        Ok((lo, hi))
    } else {
        let single: u32 = text.trim().parse().map_err(|_| bad())?;
        Ok((single, single))
    }
}

fn write_artifact(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    use std::io::Write;
    match out {
        Some(path) => std::fs::write(path, contents)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => match std::io::stdout().write_all(contents.as_bytes()) {
            Ok(()) => Ok(()),
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            Err(e) => Err(CliError::Io(format!("cannot write to stdout: {e}"))),
        },
    }
}

#[derive(Serialize)]
struct SequenceArtifact {
    metadata: serde_json::Value,
    rows: Vec<SequenceRow>,
}

#[derive(Serialize)]
struct SequenceRow {
    m: u32,
    index: i64,
    value: f64,
}

fn cmd_mask(
    n: u32,
    (m_lo, m_hi): (u32, u32),
    mu: f64,
    format: Format,
    out: Option<&Path>,
    check: bool,
) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for m in m_lo..=m_hi {
        let mask = nonstationary_mask(&MaskParams::new(n, m, mu)?);
        for (index, value) in mask.iter() {
            rows.push(SequenceRow { m, index, value });
        }
    }
    let contents = match format {
        Format::Csv => {
            let mut s = String::new();
            if m_lo == m_hi {
                s.push_str("index,value\n");
                for r in &rows {
                    let _ = writeln!(s, "{},{}", r.index, r.value);
                }
            } else {
                s.push_str("m,index,value\n");
                for r in &rows {
                    let _ = writeln!(s, "{},{},{}", r.m, r.index, r.value);
                }
            }
            s
        }
        Format::Json => {
            let artifact = SequenceArtifact {
                metadata: serde_json::json!({"command": "mask", "n": n, "mu": mu, "m_lo": m_lo, "m_hi": m_hi}),
                rows,
            };
            to_json(&artifact)?
        }
    };
    write_artifact(out, &contents)?;
    if check {
        check_mask_table(n, (m_lo, m_hi), mu)?;
    }
    Ok(())
}

fn check_mask_table(n: u32, (m_lo, m_hi): (u32, u32), mu: f64) -> Result<(), CliError> {
    if n != 3 || (mu - 1.1).abs() > 1e-12 {
        return Err(CliError::Domain(
            "--check compares against the published table, which needs n=3 and mu=1.1".into(),
        ));
    }
    let mut mismatches = Vec::new();
    for m in m_lo..=m_hi.min(8) {
        let mask = nonstationary_mask(&MaskParams::new(3, m, 1.1)?);
        let row = MASK_TABLE_N3_MU11[m as usize];
        let expected: Vec<f64> = if m == 0 {
            vec![row[0], row[1]]
        } else {
            vec![row[0], row[1], row[2], row[1], row[0]]
        };
        for (alpha, want) in expected.iter().enumerate() {
            let got = mask.coeff(alpha as i64);
            if (got - want).abs() > FOUR_DIGIT_TOL {
                mismatches.push(format!("m={m} alpha={alpha}: {got} vs {want}"));
            }
        }
    }
    if mismatches.is_empty() {
        eprintln!("check: mask table reproduced to four digits");
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "mask table mismatch: {}",
            mismatches.join("; ")
        )))
    }
}

#[derive(Serialize)]
struct SampledArtifact {
    metadata: serde_json::Value,
    rows: Vec<serde_json::Value>,
}

fn sampled_csv(f: &SampledFunction, overlay: Option<(u32, u32)>) -> String {
    let mut s = String::new();
    if overlay.is_some() {
        s.push_str("x,value,bspline\n");
    } else {
        s.push_str("x,value\n");
    }
    for (i, v) in f.values().iter().enumerate() {
        let x = f.x_at(i);
        match overlay {
            Some((n, m)) => {
                let _ = writeln!(s, "{},{},{}", x, v, bspline_evaluate(n, m, x));
            }
            None => {
                let _ = writeln!(s, "{},{}", x, v);
            }
        }
    }
    s
}

#[allow(clippy::too_many_arguments)]
fn emit_sampled(
    command: &str,
    f: &SampledFunction,
    n: u32,
    m: u32,
    mu: f64,
    depth: u32,
    overlay: Option<(u32, u32)>,
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let contents = match format {
        Format::Csv => sampled_csv(f, overlay),
        Format::Json => {
            let rows = f
                .values()
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let x = f.x_at(i);
                    match overlay {
                        Some((bn, bm)) => serde_json::json!({
                            "x": x, "value": v, "bspline": bspline_evaluate(bn, bm, x)
                        }),
                        None => serde_json::json!({"x": x, "value": v}),
                    }
                })
                .collect();
            let artifact = SampledArtifact {
                metadata: serde_json::json!({
                    "command": command, "n": n, "m": m, "mu": mu,
                    "depth": depth, "resolution": f.resolution(),
                }),
                rows,
            };
            to_json(&artifact)?
        }
    };
    write_artifact(out, &contents)
}

#[allow(clippy::too_many_arguments)]
fn cmd_phi(
    n: u32,
    m: u32,
    mu: f64,
    depth: u32,
    resolution: Option<u32>,
    overlay: bool,
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let cfg = CascadeConfig::with_depth(depth);
    let resolution = resolution.unwrap_or_else(|| cfg.default_resolution(m));
    let f = cascade_evaluate(&MaskParams::new(n, m, mu)?, &cfg, resolution)?;
    let overlay = overlay.then_some((n, m));
    emit_sampled("phi", &f, n, m, mu, depth, overlay, format, out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sampled(
    command: &str,
    n: u32,
    m: u32,
    mu: f64,
    depth: u32,
    resolution: Option<u32>,
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let cfg = CascadeConfig::with_depth(depth);
    let f = match command {
        "psi" => {
            let resolution = resolution.unwrap_or_else(|| cfg.default_resolution(m + 1));
            sample_prewavelet(n, m, mu, &cfg, resolution)?
        }
        "phidual" => {
            let resolution = resolution.unwrap_or_else(|| cfg.default_resolution(m));
            dual_cascade(n, m, mu, &cfg, resolution)?
        }
        "psidual" => {
            let resolution = resolution.unwrap_or_else(|| cfg.default_resolution(m + 1));
            let family = dual_family(n, mu)?;
            let quartet = family.quartet(m)?;
            let phi_dual_next = dual_cascade(n, m + 1, mu, &cfg, resolution)?;
            shifted_combination(&quartet.q_dual, &phi_dual_next, m + 1)?
        }
        _ => unreachable!(),
    };
    emit_sampled(command, &f, n, m, mu, depth, None, format, out)
}

fn dual_family(n: u32, mu: f64) -> Result<FilterFamily, CliError> {
    if n != 3 {
        return Err(CliError::Domain(
            "dual functions are provided for the order-3 family only".into(),
        ));
    }
    Ok(FilterFamily::nonstationary(3, mu)?)
}

/// Cascade over the recentered dual masks of the order-3 family.
fn dual_cascade(
    n: u32,
    m: u32,
    mu: f64,
    cfg: &CascadeConfig,
    resolution: u32,
) -> Result<SampledFunction, CliError> {
    let family = dual_family(n, mu)?;
    // precompute the per-level dual masks the recursion will touch
    let mut duals: Vec<CoeffSeq> = Vec::new();
    for level in m..m + cfg.depth {
        duals.push(family.quartet(level)?.a_dual);
    }
    let base = m;
    Ok(cascade_evaluate_with(
        n,
        m,
        move |level| duals[(level - base) as usize].clone(),
        cfg,
        resolution,
    )?)
}

#[derive(Serialize)]
struct DualRow {
    m: u32,
    index: i64,
    solver: f64,
    closed_form: f64,
    deviation: f64,
}

fn cmd_biorth(
    n: u32,
    (m_lo, m_hi): (u32, u32),
    mu: f64,
    format: Format,
    out: Option<&Path>,
    check: bool,
) -> Result<(), CliError> {
    if n != 3 {
        return Err(CliError::Domain(
            "the closed-form comparison is defined for the order-3 family only".into(),
        ));
    }
    let mut rows = Vec::new();
    let mut max_deviation = 0.0f64;
    for m in m_lo..=m_hi {
        let a = nonstationary_mask(&MaskParams::new(n, m, mu)?);
        let support_len = if m == 0 { 1 } else { 14 };
        let solved = bezout_solve(&a, support_len, true)?;
        let closed = (m >= 1).then(|| closed_form_dual_n3(m, mu)).transpose()?;
        for index in 0..=support_len as i64 {
            let solver = solved.coeff(index);
            let closed_form = closed.as_ref().map_or(solver, |c| c.coeff(index));
            let deviation = (solver - closed_form).abs();
            max_deviation = max_deviation.max(deviation);
            rows.push(DualRow {
                m,
                index,
                solver,
                closed_form,
                deviation,
            });
        }
    }
    let notes = table_anomaly_notes((m_lo, m_hi), mu, &rows);
    let contents = match format {
        Format::Csv => {
            let mut s = String::from("m,index,solver,closed_form,deviation\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.m, r.index, r.solver, r.closed_form, r.deviation
                );
            }
            s
        }
        Format::Json => {
            let artifact = serde_json::json!({
                "metadata": {
                    "command": "biorth", "n": n, "mu": mu, "m_lo": m_lo, "m_hi": m_hi,
                    "max_deviation": max_deviation,
                    "notes": notes,
                },
                "rows": rows,
            });
            to_json(&artifact)?
        }
    };
    write_artifact(out, &contents)?;
    for note in &notes {
        eprintln!("note: {note}");
    }
    if check {
        check_dual_table((m_lo, m_hi), mu, &rows, max_deviation)?;
    }
    Ok(())
}

/// Differences against the published table that are known defects of the
/// table itself (reported, never asserted).
fn table_anomaly_notes((m_lo, m_hi): (u32, u32), mu: f64, rows: &[DualRow]) -> Vec<String> {
    let mut notes = Vec::new();
    if (mu - 1.1).abs() > 1e-12 {
        return notes;
    }
    for r in rows {
        if r.index > 7 || r.m < m_lo || r.m > m_hi || r.m > 8 {
            continue;
        }
        let published = DUAL_TABLE_N3_MU11[r.m as usize][r.index as usize];
        let off = (r.solver - published).abs() > FOUR_DIGIT_TOL;
        if off && (r.m == 5 || (r.m == 2 && r.index == 5)) {
            notes.push(format!(
                "published table cell (alpha={}, m={}) is {:.4}, construction gives {:.4} \
                 (factor {:.3}); treated as a table defect",
                r.index,
                r.m,
                published,
                r.solver,
                published / r.solver
            ));
        }
    }
    notes
}

fn check_dual_table(
    (m_lo, m_hi): (u32, u32),
    mu: f64,
    rows: &[DualRow],
    max_deviation: f64,
) -> Result<(), CliError> {
    if (mu - 1.1).abs() > 1e-12 {
        return Err(CliError::Domain(
            "--check compares against the published table, which needs mu=1.1".into(),
        ));
    }
    if max_deviation > 1e-9 {
        return Err(CliError::Check(format!(
            "solver deviates from the closed form by {max_deviation:.3e}"
        )));
    }
    let mut mismatches = Vec::new();
    for r in rows {
        if r.index > 7 || r.m > 8 || r.m < m_lo || r.m > m_hi {
            continue;
        }
        // documented table defects are reported via notes instead
        if r.m == 5 || (r.m == 2 && r.index == 5) {
            continue;
        }
        let published = DUAL_TABLE_N3_MU11[r.m as usize][r.index as usize];
        if (r.solver - published).abs() > FOUR_DIGIT_TOL {
            mismatches.push(format!(
                "(alpha={}, m={}): {} vs {published}",
                r.index, r.m, r.solver
            ));
        }
    }
    if mismatches.is_empty() {
        eprintln!("check: dual table reproduced to four digits (documented defects noted)");
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "dual table mismatch: {}",
            mismatches.join("; ")
        )))
    }
}

#[derive(Serialize, Deserialize)]
struct DecompositionArtifact {
    metadata: DecompositionMeta,
    rows: Vec<CoefficientRow>,
}

#[derive(Serialize, Deserialize)]
struct DecompositionMeta {
    n: u32,
    mu: f64,
    family: String,
    base_level: u32,
    top_level: u32,
    convention: ConventionMeta,
}

#[derive(Serialize, Deserialize)]
struct ConventionMeta {
    analysis_gain: f64,
    synthesis_gain: f64,
    highpass_shift: i64,
    highpass_sign: f64,
    dual_highpass_sign: f64,
}

#[derive(Serialize, Deserialize)]
struct CoefficientRow {
    level: u32,
    kind: String,
    index: i64,
    value: f64,
}

fn decomposition_rows(d: &Decomposition) -> Vec<CoefficientRow> {
    let mut rows = Vec::new();
    for (i, v) in d.approx.samples.iter().enumerate() {
        rows.push(CoefficientRow {
            level: d.base_level,
            kind: "approx".into(),
            index: d.approx.start + i as i64,
            value: *v,
        });
    }
    for band in &d.details {
        for (i, v) in band.signal.samples.iter().enumerate() {
            rows.push(CoefficientRow {
                level: band.level,
                kind: "detail".into(),
                index: band.signal.start + i as i64,
                value: *v,
            });
        }
    }
    rows
}

fn decomposition_artifact(d: &Decomposition) -> DecompositionArtifact {
    let c = d.family.convention;
    DecompositionArtifact {
        metadata: DecompositionMeta {
            n: d.family.n,
            mu: d.family.mu,
            family: match d.family.kind {
                FamilyKind::Nonstationary => "nonstationary".into(),
                FamilyKind::Stationary => "stationary".into(),
            },
            base_level: d.base_level,
            top_level: d.top_level,
            convention: ConventionMeta {
                analysis_gain: c.analysis_gain,
                synthesis_gain: c.synthesis_gain,
                highpass_shift: c.highpass_shift,
                highpass_sign: c.highpass_sign,
                dual_highpass_sign: c.dual_highpass_sign,
            },
        },
        rows: decomposition_rows(d),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_analyze(
    input: &Path,
    n: u32,
    mu: f64,
    levels: u32,
    tau: f64,
    format: Format,
    out: Option<&Path>,
    compare_stationary: bool,
    verify_pr: bool,
) -> Result<(), CliError> {
    if levels == 0 {
        return Err(CliError::Domain("need at least one level".into()));
    }
    let signal = read_signal(input)?;
    let family = FilterFamily::nonstationary(n, mu)?;
    let decomposition = if signal.is_empty() {
        Decomposition {
            base_level: 0,
            top_level: levels,
            approx: Signal::new(0, Vec::new()),
            details: (0..levels)
                .map(|level| DetailBand {
                    level,
                    signal: Signal::new(0, Vec::new()),
                })
                .collect(),
            family: family.clone(),
        }
    } else {
        analyze(&signal, 0, levels, &family)?
    };

    let contents = match format {
        Format::Csv => {
            let mut s = String::from("level,kind,index,value\n");
            for r in decomposition_rows(&decomposition) {
                let _ = writeln!(s, "{},{},{},{}", r.level, r.kind, r.index, r.value);
            }
            s
        }
        Format::Json => to_json(&decomposition_artifact(&decomposition))?,
    };
    write_artifact(out, &contents)?;

    eprintln!(
        "nonzero coefficients above {tau:e}: {}",
        decomposition.count_above(tau)
    );
    if compare_stationary && !signal.is_empty() {
        let stationary = analyze(&signal, 0, levels, &FilterFamily::stationary(n)?)?;
        eprintln!(
            "stationary comparison: nonstationary {} vs stationary {}",
            decomposition.count_above(tau),
            stationary.count_above(tau)
        );
    }
    if verify_pr && !signal.is_empty() {
        let back = synthesize(&decomposition)?;
        eprintln!("round-trip max error: {:.3e}", back.max_abs_diff(&signal));
    }
    Ok(())
}

fn cmd_synthesize(input: &Path, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", input.display())))?;
    let artifact: DecompositionArtifact = serde_json::from_str(&text).map_err(|e| {
        CliError::Io(format!(
            "cannot parse decomposition artifact {}: {e}",
            input.display()
        ))
    })?;
    let decomposition = rebuild_decomposition(artifact)?;
    let signal = synthesize(&decomposition)?;

    let contents = match format {
        Format::Csv => {
            let mut s = String::from("index,value\n");
            for (i, v) in signal.samples.iter().enumerate() {
                let _ = writeln!(s, "{},{}", signal.start + i as i64, v);
            }
            s
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = signal
                .samples
                .iter()
                .enumerate()
                .map(|(i, v)| serde_json::json!({"index": signal.start + i as i64, "value": v}))
                .collect();
            to_json(&serde_json::json!({"metadata": {"command": "synthesize"}, "rows": rows}))?
        }
    };
    write_artifact(out, &contents)
}

fn rebuild_decomposition(artifact: DecompositionArtifact) -> Result<Decomposition, CliError> {
    let meta = &artifact.metadata;
    if meta.top_level <= meta.base_level {
        return Err(CliError::Structure(format!(
            "artifact levels are inconsistent: base {} top {}",
            meta.base_level, meta.top_level
        )));
    }
    let mut family = match meta.family.as_str() {
        "nonstationary" => FilterFamily::nonstationary(meta.n, meta.mu)?,
        "stationary" => FilterFamily::stationary(meta.n)?,
        other => return Err(CliError::Structure(format!("unknown family '{other}'"))),
    };
    family.convention = ripplet::biorthogonal::WaveletConvention {
        analysis_gain: meta.convention.analysis_gain,
        synthesis_gain: meta.convention.synthesis_gain,
        highpass_shift: meta.convention.highpass_shift,
        highpass_sign: meta.convention.highpass_sign,
        dual_highpass_sign: meta.convention.dual_highpass_sign,
    };

    let collect_band = |level: u32, kind: &str| -> Result<Signal, CliError> {
        let mut entries: Vec<(i64, f64)> = artifact
            .rows
            .iter()
            .filter(|r| r.level == level && r.kind == kind)
            .map(|r| (r.index, r.value))
            .collect();
        entries.sort_by_key(|e| e.0);
        if entries.is_empty() {
            return Ok(Signal::new(0, Vec::new()));
        }
        let lo = entries[0].0;
        let hi = entries[entries.len() - 1].0;
        let mut samples = vec![0.0; (hi - lo + 1) as usize];
        for (idx, v) in entries {
            samples[(idx - lo) as usize] = v;
        }
        Ok(Signal::new(lo, samples))
    };

    let approx = collect_band(meta.base_level, "approx")?;
    let mut details = Vec::new();
    for level in meta.base_level..meta.top_level {
        details.push(DetailBand {
            level,
            signal: collect_band(level, "detail")?,
        });
    }
    let expected = (meta.top_level - meta.base_level) as usize;
    let present = artifact
        .rows
        .iter()
        .filter(|r| r.kind == "detail")
        .map(|r| r.level)
        .collect::<std::collections::BTreeSet<_>>();
    if present
        .iter()
        .any(|&l| l < meta.base_level || l >= meta.top_level)
    {
        return Err(CliError::Structure(format!(
            "artifact contains detail levels outside {}..{}",
            meta.base_level, meta.top_level
        )));
    }
    if details.len() != expected {
        return Err(CliError::Structure("artifact level count mismatch".into()));
    }
    Ok(Decomposition {
        base_level: meta.base_level,
        top_level: meta.top_level,
        approx,
        details,
        family,
    })
}

/// Reads a signal from CSV (`index,value`, optional header) or a JSON
/// array of `{index, value}` objects; the format is sniffed from the
/// first non-whitespace byte.
fn read_signal(path: &Path) -> Result<Signal, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let trimmed = text.trim_start();
    let pairs: Vec<(i64, f64)> = if trimmed.starts_with('[') {
        #[derive(Deserialize)]
        struct Sample {
            index: i64,
            value: f64,
        }
        let samples: Vec<Sample> = serde_json::from_str(trimmed)
            .map_err(|e| CliError::Io(format!("cannot parse JSON signal: {e}")))?;
        samples.into_iter().map(|s| (s.index, s.value)).collect()
    } else {
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let (Some(idx), Some(val)) = (fields.next(), fields.next()) else {
                return Err(CliError::Io(format!(
                    "line {}: expected index,value",
                    lineno + 1
                )));
            };
            match (idx.trim().parse::<i64>(), val.trim().parse::<f64>()) {
                (Ok(i), Ok(v)) => pairs.push((i, v)),
                _ if lineno == 0 => continue, // header row
                _ => {
                    return Err(CliError::Io(format!(
                        "line {}: cannot parse '{line}'",
                        lineno + 1
                    )))
                }
            }
        }
        pairs
    };
    if pairs.is_empty() {
        return Ok(Signal::new(0, Vec::new()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for (idx, _) in &pairs {
        if !seen.insert(*idx) {
            return Err(CliError::Structure(format!("duplicate sample index {idx}")));
        }
    }
    let lo = *seen.iter().next().unwrap();
    let hi = *seen.iter().next_back().unwrap();
    let mut samples = vec![0.0; (hi - lo + 1) as usize];
    for (idx, v) in pairs {
        samples[(idx - lo) as usize] = v;
    }
    Ok(Signal::new(lo, samples))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Io(format!("cannot serialize artifact: {e}")))
}
