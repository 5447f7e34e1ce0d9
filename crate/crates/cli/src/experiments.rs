//! Experiment runners: each resolves its inputs, computes, writes CSV (and
//! SVG on request), and returns a one-line summary for stdout. Wall time is
//! reported by the caller and never written into an output file.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sig_core::curve::Curve;
use sig_core::engine::{self, CoeffTable};
use sig_core::invert;
use sig_core::kernel::{self, KernelIndex};
use sig_core::math;
use sig_core::norms;
use sig_core::quad::QuadConfig;
use sig_core::RationalScheme;

use crate::csvout::{fmt_f64, CsvDoc};
use crate::parallel::build_table_parallel;
use crate::svg::{self, GuideLine, Plot, PlotKind, Series};
use crate::{tablefile, CliError};

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))
}

fn write_plot(plot: &Plot, path: &Path) -> Result<(), CliError> {
    let text = svg::render(plot).map_err(CliError::config)?;
    write_text(path, &text)
}

fn scheme_summary(scheme: &RationalScheme) -> &'static str {
    scheme.name()
}

// ---------------------------------------------------------------------------
// table
// ---------------------------------------------------------------------------

pub struct TableCmd {
    pub curve: Curve,
    pub n: usize,
    pub raw: bool,
    pub out: PathBuf,
    pub quad: QuadConfig,
}

pub fn run_table(cmd: &TableCmd) -> Result<String, CliError> {
    let table = build_table_parallel(&cmd.curve, cmd.n, &cmd.quad)?;
    let is_csv = cmd
        .out
        .extension()
        .map(|e| e.eq_ignore_ascii_case("csv"))
        .unwrap_or(false);
    if is_csv {
        write_text(&cmd.out, &tablefile::emit_csv(&table, !cmd.raw))?;
    } else {
        tablefile::write_json(&table, !cmd.raw, &cmd.out)?;
    }
    Ok(format!(
        "table d={} i={} N={} ({} cells) -> {}",
        table.dim(),
        table.axial_index(),
        table.n_max(),
        (table.dim() - 1) * (table.n_max() + 1) * (table.n_max() + 2) / 2,
        cmd.out.display()
    ))
}

// ---------------------------------------------------------------------------
// invert
// ---------------------------------------------------------------------------

pub struct InvertCmd {
    pub table: CoeffTable,
    /// When the curve is known analytically, rows carry err_vs_oracle.
    pub oracle: Option<Curve>,
    pub j: usize,
    pub x: f64,
    pub scheme: RationalScheme,
    pub n_max: usize,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

pub fn run_invert(cmd: &InvertCmd) -> Result<String, CliError> {
    let seq = invert::recover_derivative_at(&cmd.table, cmd.j, cmd.x, &cmd.scheme, cmd.n_max)?;
    let oracle_value = cmd
        .oracle
        .as_ref()
        .map(|c| c.deriv_component(cmd.j, cmd.x));
    let header: &[&str] = if oracle_value.is_some() {
        &["n", "p", "q", "estimate", "err_vs_oracle"]
    } else {
        &["n", "p", "q", "estimate"]
    };
    let mut doc = CsvDoc::new(header);
    doc.comment("experiment", "invert");
    doc.comment("x", fmt_f64(cmd.x));
    doc.comment("j", cmd.j);
    doc.comment("scheme", scheme_summary(&cmd.scheme));
    doc.comment("nmax", cmd.n_max);
    doc.comment("final_estimate", fmt_f64(seq.final_estimate));
    doc.comment("stagnation", fmt_f64(seq.stagnation));
    doc.comment("truncated", seq.truncated);
    for step in &seq.steps {
        let mut row = vec![
            step.n.to_string(),
            step.p.to_string(),
            step.q.to_string(),
            fmt_f64(step.estimate),
        ];
        if let Some(want) = oracle_value {
            row.push(fmt_f64((step.estimate - want).abs()));
        }
        doc.row(row);
    }
    if let Some(out) = &cmd.out {
        doc.write(out)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", out.display())))?;
    }
    if let Some(plot_path) = &cmd.plot {
        let plot = match oracle_value {
            Some(want) => Plot {
                kind: PlotKind::LogLog,
                title: format!("recovery error at x={}", fmt_f64(cmd.x)),
                x_label: "q".into(),
                y_label: "|estimate - y'(x)|".into(),
                series: vec![Series {
                    name: format!("{} scheme", scheme_summary(&cmd.scheme)),
                    points: seq
                        .steps
                        .iter()
                        .map(|s| (s.q as f64, (s.estimate - want).abs()))
                        .collect(),
                }],
                guides: vec![],
            },
            None => Plot {
                kind: PlotKind::Profile,
                title: format!("recovery sequence at x={}", fmt_f64(cmd.x)),
                x_label: "q".into(),
                y_label: "estimate".into(),
                series: vec![Series {
                    name: "estimate".into(),
                    points: seq.steps.iter().map(|s| (s.q as f64, s.estimate)).collect(),
                }],
                guides: vec![],
            },
        };
        write_plot(&plot, plot_path)?;
    }
    Ok(format!(
        "invert x={} j={} scheme={}: final estimate {} (stagnation {}, {} steps{})",
        fmt_f64(cmd.x),
        cmd.j,
        scheme_summary(&cmd.scheme),
        fmt_f64(seq.final_estimate),
        fmt_f64(seq.stagnation),
        seq.steps.len(),
        if seq.truncated { ", truncated" } else { "" }
    ))
}

// ---------------------------------------------------------------------------
// trace
// ---------------------------------------------------------------------------

pub struct TraceCmd {
    pub table: CoeffTable,
    pub n: usize,
    pub out: PathBuf,
    pub plot: Option<PathBuf>,
    pub oracle: Option<Curve>,
}

pub fn run_trace(cmd: &TraceCmd) -> Result<String, CliError> {
    let table = &cmd.table;
    let mut profiles = Vec::new();
    for j in (1..=table.dim()).filter(|&j| j != table.axial_index()) {
        profiles.push(invert::recover_profile(table, j, cmd.n)?);
    }
    let trace = invert::reconstruct_trace(&profiles, table.axial_index(), table.axial_speed())?;
    let text = crate::config::polyline_to_csv(
        &trace,
        &[
            ("experiment", "trace".to_string()),
            ("n", cmd.n.to_string()),
        ],
    );
    write_text(&cmd.out, &text)?;
    if let Some(plot_path) = &cmd.plot {
        let first_j = (1..=table.dim())
            .find(|&j| j != table.axial_index())
            .expect("d >= 2");
        let mut series = vec![Series {
            name: format!("recovered x{first_j}'"),
            points: profiles[0]
                .values
                .iter()
                .enumerate()
                .map(|(k, v)| (profiles[0].abscissa(k), *v))
                .collect(),
        }];
        if let Some(curve) = &cmd.oracle {
            series.push(Series {
                name: format!("true x{first_j}'"),
                points: (0..=cmd.n)
                    .map(|k| {
                        let s = k as f64 / cmd.n as f64;
                        (s, curve.deriv_component(first_j, s))
                    })
                    .collect(),
            });
        }
        write_plot(
            &Plot {
                kind: PlotKind::Profile,
                title: format!("derivative profile at n={}", cmd.n),
                x_label: "s".into(),
                y_label: "derivative".into(),
                series,
                guides: vec![],
            },
            plot_path,
        )?;
    }
    Ok(format!(
        "trace n={} ({} vertices) -> {}",
        cmd.n,
        cmd.n + 1,
        cmd.out.display()
    ))
}

// ---------------------------------------------------------------------------
// length
// ---------------------------------------------------------------------------

pub struct LengthCmd {
    pub table: CoeffTable,
    pub n: usize,
    pub out: Option<PathBuf>,
}

pub fn run_length(cmd: &LengthCmd) -> Result<String, CliError> {
    let value = invert::recover_length(&cmd.table, cmd.n)?;
    if let Some(out) = &cmd.out {
        let mut doc = CsvDoc::new(&["n", "estimate"]);
        doc.comment("experiment", "length");
        doc.comment("n", cmd.n);
        for n in 1..=cmd.n {
            doc.row_f64(&[n as f64, invert::recover_length(&cmd.table, n)?]);
        }
        doc.write(out)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", out.display())))?;
    }
    Ok(format!("length estimate at n={}: {}", cmd.n, fmt_f64(value)))
}

// ---------------------------------------------------------------------------
// rate
// ---------------------------------------------------------------------------

pub struct RateCmd {
    pub curve: Curve,
    pub j: usize,
    pub x: f64,
    pub scheme: RationalScheme,
    pub eps0: f64,
    pub q_max: usize,
    pub slack: f64,
    pub samples: usize,
    pub seed: u64,
    pub quad: QuadConfig,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

pub struct RateOutcome {
    pub slope: Option<f64>,
    pub bound_slope: f64,
    pub within_bound: Option<bool>,
    pub degenerate: bool,
}

struct RateRow {
    x: f64,
    n: usize,
    p: u64,
    q: u64,
    estimate: f64,
    true_value: f64,
}

fn rate_rows_for(
    cmd: &RateCmd,
    x: f64,
    rows: &mut Vec<RateRow>,
) -> Result<(), CliError> {
    let pairs = cmd.scheme.pairs(x, cmd.q_max as u64)?;
    if !sig_core::rational::meets_rate_condition(&pairs, x) {
        return Err(CliError::config(format!(
            "scheme {} fails the rate condition |p/q - x| < q^(-1/2) at x = {x}",
            scheme_summary(&cmd.scheme)
        )));
    }
    let true_value = cmd.curve.deriv_component(cmd.j, x);
    for (pos, pair) in pairs.iter().enumerate() {
        let idx = KernelIndex::new(pair.p as usize, (pair.q - pair.p) as usize);
        let estimate = engine::scaled_coefficient(&cmd.curve, cmd.j, idx, &cmd.quad)?;
        rows.push(RateRow {
            x,
            n: pos + 1,
            p: pair.p,
            q: pair.q,
            estimate,
            true_value,
        });
    }
    Ok(())
}

/// Error-decay study: records the recovery error against the analytic
/// derivative along the scheme, then fits the tail-half log-log slope and
/// compares it to the Hölder rate `-(1/2 - ε₀)·α` plus slack.
///
/// The scheme is validated against the rate condition before any quadrature
/// runs; curves without Hölder metadata are rejected.
pub fn run_rate(cmd: &RateCmd) -> Result<(String, RateOutcome), CliError> {
    let holder = cmd.curve.holder().ok_or_else(|| {
        CliError::config("rate experiment needs a curve with Holder metadata (alpha)")
    })?;
    if !(cmd.eps0 > 0.0 && cmd.eps0 < 0.5) {
        return Err(CliError::config(format!(
            "eps0 = {} must lie in (0, 1/2)",
            cmd.eps0
        )));
    }
    let mut rows = Vec::new();
    rate_rows_for(cmd, cmd.x, &mut rows)?;
    let primary_rows = rows.len();
    if cmd.samples > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cmd.seed);
        for _ in 0..cmd.samples {
            let x: f64 = rng.gen();
            rate_rows_for(cmd, x, &mut rows)?;
        }
    }

    // Tail-half fit on the primary x only; the theorem is asymptotic, so the
    // first half of the q range is deliberately ignored.
    let bound_slope = -(0.5 - cmd.eps0) * holder.alpha;
    let tail_from = cmd.q_max / 2;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut max_err: f64 = 0.0;
    for row in &rows[..primary_rows] {
        let err = (row.estimate - row.true_value).abs();
        max_err = max_err.max(err);
        if row.q as usize >= tail_from && err > 0.0 {
            xs.push(math::ln(row.q as f64));
            ys.push(math::ln(err));
        }
    }
    let degenerate = max_err < 1e-12 || xs.len() < 2;
    let slope = if degenerate {
        None
    } else {
        math::ls_slope(&xs, &ys)
    };
    let within_bound = slope.map(|s| s <= bound_slope + cmd.slack);

    let mut doc = CsvDoc::new(&["x", "n", "p", "q", "estimate", "true_value", "abs_err"]);
    doc.comment("experiment", "rate");
    doc.comment("scheme", scheme_summary(&cmd.scheme));
    doc.comment("x", fmt_f64(cmd.x));
    doc.comment("alpha", fmt_f64(holder.alpha));
    doc.comment("eps0", fmt_f64(cmd.eps0));
    doc.comment("qmax", cmd.q_max);
    doc.comment("slack", fmt_f64(cmd.slack));
    doc.comment("seed", cmd.seed);
    doc.comment("samples", cmd.samples);
    doc.comment("bound_slope", fmt_f64(bound_slope));
    match slope {
        Some(s) => {
            doc.comment("fitted_slope", fmt_f64(s));
            doc.comment("within_bound", within_bound.unwrap_or(false));
        }
        None => doc.comment("fitted_slope", "degenerate"),
    }
    for row in &rows {
        doc.row(vec![
            fmt_f64(row.x),
            row.n.to_string(),
            row.p.to_string(),
            row.q.to_string(),
            fmt_f64(row.estimate),
            fmt_f64(row.true_value),
            fmt_f64((row.estimate - row.true_value).abs()),
        ]);
    }
    if let Some(out) = &cmd.out {
        doc.write(out)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", out.display())))?;
    }
    if let Some(plot_path) = &cmd.plot {
        let points: Vec<(f64, f64)> = rows[..primary_rows]
            .iter()
            .map(|r| (r.q as f64, (r.estimate - r.true_value).abs()))
            .collect();
        let mut guides = vec![];
        if let Some(s) = slope {
            // Anchor both guide lines at the last tail point.
            if let Some(&(qa, ea)) = points.iter().rev().find(|(_, e)| *e > 0.0) {
                let (lx, ly) = (qa.log10(), ea.log10());
                guides.push(GuideLine {
                    name: format!("fit slope {:.3}", s),
                    slope: s,
                    intercept: ly - s * lx,
                });
                guides.push(GuideLine {
                    name: format!("bound slope {:.3}", bound_slope),
                    slope: bound_slope,
                    intercept: ly - bound_slope * lx,
                });
            }
        }
        write_plot(
            &Plot {
                kind: PlotKind::LogLog,
                title: format!("recovery error decay at x={}", fmt_f64(cmd.x)),
                x_label: "q".into(),
                y_label: "abs err".into(),
                series: vec![Series {
                    name: "error".into(),
                    points,
                }],
                guides,
            },
            plot_path,
        )?;
    }
    let summary = match slope {
        Some(s) => format!(
            "rate x={} alpha={} eps0={}: fitted slope {:.4} vs bound {:.4}+{} -> {}",
            fmt_f64(cmd.x),
            fmt_f64(holder.alpha),
            fmt_f64(cmd.eps0),
            s,
            bound_slope,
            fmt_f64(cmd.slack),
            if within_bound.unwrap_or(false) {
                "within bound"
            } else {
                "OUTSIDE BOUND"
            }
        ),
        None => format!(
            "rate x={}: errors are at noise level, slope fit skipped (degenerate)",
            fmt_f64(cmd.x)
        ),
    };
    Ok((
        summary,
        RateOutcome {
            slope,
            bound_slope,
            within_bound,
            degenerate,
        },
    ))
}

// ---------------------------------------------------------------------------
// fastdecay
// ---------------------------------------------------------------------------

pub struct FastDecayCmd {
    pub ns: Vec<usize>,
    pub eps0: f64,
    pub s_grid: usize,
    pub out: Option<PathBuf>,
}

pub fn run_fastdecay(cmd: &FastDecayCmd) -> Result<String, CliError> {
    let report = kernel::check_fast_decay(&cmd.ns, cmd.eps0, cmd.s_grid)?;
    let mut doc = CsvDoc::new(&["n", "epsilon0", "worst_ratio", "violations"]);
    doc.comment("experiment", "fastdecay");
    doc.comment("sgrid", cmd.s_grid);
    match report.empirical_n0 {
        Some(n0) => doc.comment("empirical_n0", n0),
        None => doc.comment("empirical_n0", "not reached"),
    }
    let mut total_violations = 0usize;
    for row in &report.rows {
        total_violations += row.violations;
        doc.row(vec![
            row.n.to_string(),
            fmt_f64(row.eps0),
            fmt_f64(row.worst_ratio),
            row.violations.to_string(),
        ]);
    }
    if let Some(out) = &cmd.out {
        doc.write(out)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", out.display())))?;
    }
    Ok(format!(
        "fastdecay eps0={} over {:?}: {} violations, empirical n0 = {:?}",
        fmt_f64(cmd.eps0),
        cmd.ns,
        total_violations,
        report.empirical_n0
    ))
}

// ---------------------------------------------------------------------------
// crosscheck
// ---------------------------------------------------------------------------

pub struct CrossCheckCmd {
    pub curve: Curve,
    pub vertices: usize,
    pub max_level: usize,
    pub quad: QuadConfig,
    pub out: Option<PathBuf>,
}

pub fn run_crosscheck(cmd: &CrossCheckCmd) -> Result<String, CliError> {
    if cmd.max_level < 1 {
        return Err(CliError::config("maxlevel must be >= 1"));
    }
    let table = build_table_parallel(&cmd.curve, cmd.max_level.max(2) - 1, &cmd.quad)?;
    let poly = sig_core::curve::Polyline::sample_curve(&cmd.curve, cmd.vertices)?;
    let sig = engine::chen_truncated_signature(&poly, cmd.max_level)?;
    let report = engine::cross_check(&table, &sig, cmd.max_level)?;
    let mut doc = CsvDoc::new(&["j", "k", "l", "table_value", "chen_value", "rel_err"]);
    doc.comment("experiment", "crosscheck");
    doc.comment("vertices", cmd.vertices);
    doc.comment("max_level", cmd.max_level);
    doc.comment("max_rel_err", fmt_f64(report.max_rel_err));
    if let Some((j, k, l)) = report.worst {
        doc.comment("worst_cell", format!("j={j} k={k} l={l}"));
    }
    for row in &report.rows {
        doc.row(vec![
            row.j.to_string(),
            row.k.to_string(),
            row.l.to_string(),
            fmt_f64(row.table_value),
            fmt_f64(row.chen_value),
            fmt_f64(row.rel_err),
        ]);
    }
    if let Some(out) = &cmd.out {
        doc.write(out)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", out.display())))?;
    }
    Ok(format!(
        "crosscheck levels<={} over {} vertices: max rel err {}",
        cmd.max_level,
        cmd.vertices,
        fmt_f64(report.max_rel_err)
    ))
}

// ---------------------------------------------------------------------------
// norms
// ---------------------------------------------------------------------------

pub struct NormsCmd {
    pub curve_a: Curve,
    pub curve_b: Curve,
    pub n: usize,
    pub quad: QuadConfig,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

fn norm_sequence_csv(
    seq: &sig_core::norms::NormSequence,
    extra: &[(&str, String)],
) -> CsvDoc {
    let mut doc = CsvDoc::new(&["n", "value", "reference", "rel_err"]);
    doc.comment("experiment", "norms");
    doc.comment("kind", seq.kind.as_str());
    for (k, v) in extra {
        doc.comment(k, v.clone());
    }
    let reference = seq.reference.unwrap_or(f64::NAN);
    for p in &seq.points {
        let rel = (p.value - reference).abs() / reference.abs().max(1e-12);
        doc.row(vec![
            p.n.to_string(),
            fmt_f64(p.value),
            fmt_f64(reference),
            fmt_f64(rel),
        ]);
    }
    doc
}

pub fn run_norms(cmd: &NormsCmd) -> Result<String, CliError> {
    let report = norms::isometry_check(&cmd.curve_a, &cmd.curve_b, cmd.n, &cmd.quad)?;
    if let Some(out) = &cmd.out {
        let stem = out.with_extension("");
        let stem = stem.to_string_lossy();
        let trend = |s: &sig_core::norms::NormSequence| {
            s.trend_slope()
                .map(|v| fmt_f64(v))
                .unwrap_or_else(|| "n/a".to_string())
        };
        let doc_as = norm_sequence_csv(
            &report.as_seq,
            &[
                ("d_c1", fmt_f64(report.d_c1)),
                ("rel_dev_at_N", fmt_f64(report.as_rel_dev)),
                ("trend_slope", trend(&report.as_seq)),
            ],
        );
        doc_as
            .write(Path::new(&format!("{stem}_as.csv")))
            .map_err(|e| CliError::config(format!("cannot write AS csv: {e}")))?;
        let doc_l1 = norm_sequence_csv(
            &report.al1_seq,
            &[
                ("d_bv", fmt_f64(report.d_bv)),
                ("rel_dev_at_N", fmt_f64(report.al1_rel_dev)),
                ("trend_slope", trend(&report.al1_seq)),
            ],
        );
        doc_l1
            .write(Path::new(&format!("{stem}_al1.csv")))
            .map_err(|e| CliError::config(format!("cannot write AL1 csv: {e}")))?;
    }
    if let Some(plot_path) = &cmd.plot {
        let to_points = |seq: &sig_core::norms::NormSequence| {
            seq.points
                .iter()
                .filter(|p| p.n > 0)
                .map(|p| (p.n as f64, p.value))
                .collect::<Vec<_>>()
        };
        write_plot(
            &Plot {
                kind: PlotKind::Profile,
                title: "asymptotic norm approximants".into(),
                x_label: "n".into(),
                y_label: "value".into(),
                series: vec![
                    Series {
                        name: format!("AS (ref {})", fmt_f64(report.d_c1)),
                        points: to_points(&report.as_seq),
                    },
                    Series {
                        name: format!("AL1 (ref {})", fmt_f64(report.d_bv)),
                        points: to_points(&report.al1_seq),
                    },
                ],
                guides: vec![],
            },
            plot_path,
        )?;
    }
    Ok(format!(
        "norms N={}: AS {} vs d_C1 {} (rel dev {:.4}); AL1 {} vs d_BV {} (rel dev {:.4})",
        cmd.n,
        fmt_f64(report.as_seq.last_value()),
        fmt_f64(report.d_c1),
        report.as_rel_dev,
        fmt_f64(report.al1_seq.last_value()),
        fmt_f64(report.d_bv),
        report.al1_rel_dev
    ))
}

// ---------------------------------------------------------------------------
// discont
// ---------------------------------------------------------------------------

pub struct DiscontCmd {
    pub ms: Vec<u32>,
    pub n: usize,
    pub vertices: usize,
    pub quad: QuadConfig,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

pub fn run_discont(cmd: &DiscontCmd) -> Result<String, CliError> {
    let report = norms::discontinuity_demo(&cmd.ms, cmd.n, cmd.vertices, &cmd.quad)?;
    let mut doc = CsvDoc::new(&["m", "proj_upper", "d_bv"]);
    doc.comment("experiment", "discont");
    doc.comment("N", cmd.n);
    doc.comment("vertices", cmd.vertices);
    doc.comment("upper_strictly_decreasing", report.upper_strictly_decreasing);
    for row in &report.rows {
        doc.row(vec![
            row.m.to_string(),
            fmt_f64(row.proj_upper),
            fmt_f64(row.d_bv),
        ]);
    }
    if let Some(out) = &cmd.out {
        doc.write(out)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", out.display())))?;
    }
    if let Some(plot_path) = &cmd.plot {
        write_plot(
            &Plot {
                kind: PlotKind::LogLog,
                title: "projective bound shrinks while BV distance stays".into(),
                x_label: "m".into(),
                y_label: "value".into(),
                series: vec![
                    Series {
                        name: "proj upper".into(),
                        points: report
                            .rows
                            .iter()
                            .map(|r| (r.m as f64, r.proj_upper))
                            .collect(),
                    },
                    Series {
                        name: "d_BV".into(),
                        points: report.rows.iter().map(|r| (r.m as f64, r.d_bv)).collect(),
                    },
                ],
                guides: vec![],
            },
            plot_path,
        )?;
    }
    Ok(format!(
        "discont N={} m={:?}: proj upper {} -> {}, d_BV flat at 1, strictly decreasing: {}",
        cmd.n,
        cmd.ms,
        fmt_f64(report.rows.first().map(|r| r.proj_upper).unwrap_or(0.0)),
        fmt_f64(report.rows.last().map(|r| r.proj_upper).unwrap_or(0.0)),
        report.upper_strictly_decreasing
    ))
}

// ---------------------------------------------------------------------------
// modcont
// ---------------------------------------------------------------------------

pub struct ModContCmd {
    pub base: Curve,
    pub config: norms::ModContConfig,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

pub fn run_modcont(cmd: &ModContCmd) -> Result<String, CliError> {
    let report = norms::modcont_experiment(&cmd.base, &cmd.config)?;
    let mut doc = CsvDoc::new(&["epsilon", "delta_theorem", "delta_empirical", "dc1"]);
    doc.comment("experiment", "modcont");
    doc.comment("alpha", fmt_f64(cmd.config.alpha));
    doc.comment("eps0", fmt_f64(cmd.config.eps0));
    doc.comment("K", fmt_f64(cmd.config.k_bound));
    doc.comment("cbar1", fmt_f64(cmd.config.cbar1));
    doc.comment("cbar2", fmt_f64(cmd.config.cbar2));
    doc.comment("N", cmd.config.n_max);
    doc.comment(
        "skipped_scales",
        format!("{:?}", report.skipped),
    );
    doc.comment(
        "implication_holds",
        report.rows.iter().all(|r| r.implication_holds),
    );
    for row in &report.rows {
        doc.row(vec![
            fmt_f64(row.epsilon),
            fmt_f64(row.delta_theorem),
            fmt_f64(row.delta_empirical),
            fmt_f64(row.d_c1_inside),
        ]);
    }
    if let Some(out) = &cmd.out {
        doc.write(out)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", out.display())))?;
    }
    if let Some(plot_path) = &cmd.plot {
        write_plot(
            &Plot {
                kind: PlotKind::Frontier,
                title: "modulus-of-continuity frontier".into(),
                x_label: "proj upper bound".into(),
                y_label: "d_C1 / epsilon".into(),
                series: vec![
                    Series {
                        name: "tested perturbations".into(),
                        points: report
                            .points
                            .iter()
                            .map(|p| (p.proj_upper, p.d_c1))
                            .collect(),
                    },
                    Series {
                        name: "theorem delta(eps)".into(),
                        points: report
                            .rows
                            .iter()
                            .map(|r| (r.delta_theorem, r.epsilon))
                            .collect(),
                    },
                    Series {
                        name: "empirical delta(eps)".into(),
                        points: report
                            .rows
                            .iter()
                            .map(|r| (r.delta_empirical, r.epsilon))
                            .collect(),
                    },
                ],
                guides: vec![],
            },
            plot_path,
        )?;
    }
    Ok(format!(
        "modcont over {} scales x {} epsilons: implication holds = {}, skipped {:?}",
        cmd.config.scales.len(),
        cmd.config.eps_grid.len(),
        report.rows.iter().all(|r| r.implication_holds),
        report.skipped
    ))
}

// ---------------------------------------------------------------------------
// shared helpers for main
// ---------------------------------------------------------------------------

/// Builds a table from whichever curve source resolved, or loads it from a
/// file.
pub fn table_from_source(
    table_path: Option<&Path>,
    curve: Option<&Curve>,
    n: usize,
    quad: &QuadConfig,
) -> Result<CoeffTable, CliError> {
    match (table_path, curve) {
        (Some(path), _) => tablefile::read_json(path),
        (None, Some(curve)) => Ok(build_table_parallel(curve, n, quad)?),
        (None, None) => Err(CliError::config(
            "need either --table <file> or a curve (--preset ... / --config / --polyline)",
        )),
    }
}

pub fn first_non_axial(table: &CoeffTable) -> usize {
    (1..=table.dim())
        .find(|&j| j != table.axial_index())
        .expect("d >= 2")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("sig-exp-tests");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn rate_rejects_bad_scheme_before_compute() {
        let cmd = RateCmd {
            curve: Curve::holder_kink(0.5, 0.5).unwrap(),
            j: 2,
            x: 0.5,
            scheme: RationalScheme::FixedList(vec![
                // q not increasing -> fails the rate condition
                sig_core::RationalPair { p: 1, q: 2 },
                sig_core::RationalPair { p: 2, q: 2 },
            ]),
            eps0: 0.1,
            q_max: 16,
            slack: 0.15,
            samples: 0,
            seed: 0,
            quad: QuadConfig::with_tol(1e-7),
            out: None,
            plot: None,
        };
        assert!(matches!(run_rate(&cmd), Err(CliError::Config(_))));
    }

    #[test]
    fn rate_linear_is_degenerate() {
        let cmd = RateCmd {
            curve: Curve::linear(1.0),
            j: 2,
            x: 0.3,
            scheme: RationalScheme::Naive,
            eps0: 0.1,
            q_max: 24,
            slack: 0.15,
            samples: 0,
            seed: 0,
            quad: QuadConfig::default(),
            out: None,
            plot: None,
        };
        let (_, outcome) = run_rate(&cmd).unwrap();
        assert!(outcome.degenerate);
        assert!(outcome.slope.is_none());
    }

    #[test]
    fn rate_kink_decays_within_bound() {
        let out = tmp("rate_kink.csv");
        let plot = tmp("rate_kink.svg");
        let cmd = RateCmd {
            curve: Curve::holder_kink(0.5, 0.5).unwrap(),
            j: 2,
            x: 0.5,
            scheme: RationalScheme::Naive,
            eps0: 0.1,
            q_max: 64,
            slack: 0.15,
            samples: 2,
            seed: 42,
            quad: QuadConfig::with_tol(1e-7),
            out: Some(out.clone()),
            plot: Some(plot.clone()),
        };
        let (_, outcome) = run_rate(&cmd).unwrap();
        assert_eq!(outcome.within_bound, Some(true));
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.starts_with("# experiment: rate"));
        let (header, rows) = crate::csvout::read_numeric_csv(&text).unwrap();
        assert_eq!(header[0], "x");
        // 64 primary rows plus two sampled sweeps of 64.
        assert_eq!(rows.len(), 3 * 64);
        assert!(std::fs::read_to_string(&plot).unwrap().starts_with("<svg"));
    }

    #[test]
    fn invert_csv_has_oracle_column_when_curve_known() {
        let curve = Curve::monomial(1);
        let table = build_table_parallel(&curve, 32, &QuadConfig::default()).unwrap();
        let out = tmp("invert.csv");
        let cmd = InvertCmd {
            table,
            oracle: Some(curve),
            j: 2,
            x: 0.5,
            scheme: RationalScheme::ContinuedFraction,
            n_max: 32,
            out: Some(out.clone()),
            plot: None,
        };
        let summary = run_invert(&cmd).unwrap();
        assert!(summary.contains("final estimate"));
        let (header, rows) = crate::csvout::read_numeric_csv(
            &std::fs::read_to_string(&out).unwrap(),
        )
        .unwrap();
        assert_eq!(header, vec!["n", "p", "q", "estimate", "err_vs_oracle"]);
        assert!(!rows.is_empty());
    }

    #[test]
    fn length_and_trace_outputs() {
        let curve = Curve::monomial(1);
        let table = build_table_parallel(&curve, 24, &QuadConfig::default()).unwrap();
        let out = tmp("trace.csv");
        let summary = run_trace(&TraceCmd {
            table: table.clone(),
            n: 24,
            out: out.clone(),
            plot: None,
            oracle: Some(curve),
        })
        .unwrap();
        assert!(summary.contains("25 vertices"));
        let (header, rows) =
            crate::csvout::read_numeric_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(header, vec!["s", "x1", "x2"]);
        assert_eq!(rows.len(), 25);

        let summary = run_length(&LengthCmd {
            table,
            n: 24,
            out: None,
        })
        .unwrap();
        assert!(summary.contains("length estimate"));
    }
}
