//! Diagnostic reports: a serializable payload per command and a plain-text
//! rendering of it.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use sre_core::diagnostics::{Decomposition, DeviationKind, SreVerdict};
use sre_core::nash::{ComponentKind, NashEnumeration};
use sre_core::oracle::{Evidence, SampleEvidence, SamplingConfig};
use sre_core::uncertainty::{ShrinkingReport, UValidityReport};
use sre_core::Deviation;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub zero_tol: f64,
    pub psi_tol: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Game file path, or `gallery:<name>` with its parameters.
    pub source: String,
    pub config: ConfigEcho,
    /// `population:strategy` label of every pure strategy, in `(p, i)` order.
    pub labels: Vec<(Deviation, String)>,
    pub payload: Payload,
}

impl DiagnosticReport {
    pub fn label(&self, dev: Deviation) -> &str {
        self.labels
            .iter()
            .find(|(d, _)| *d == dev)
            .map(|(_, l)| l.as_str())
            .unwrap_or("?")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Check {
        state: Vec<f64>,
        verdict: SreVerdict,
    },
    Nash {
        enumeration: NashEnumeration,
        /// Per candidate, present with `--classify`.
        verdicts: Option<Vec<SreVerdict>>,
        decomposition: Option<Decomposition>,
    },
    Uvalid {
        state: Vec<f64>,
        region: String,
        report: UValidityReport,
    },
    Shrink {
        state: Vec<f64>,
        r0: f64,
        m_max: u32,
        report: ShrinkingReport,
    },
    Oracle {
        state: Vec<f64>,
        sampling: SamplingConfig,
        rows: Vec<OracleRow>,
        agreement: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub sample: SampleEvidence,
    pub kind: DeviationKind,
    pub agrees: bool,
}

/// Human-oriented number: six decimals, trailing zeros dropped.
pub fn num(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-4 {
        return format!("{v:.3e}");
    }
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

pub fn vector(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| num(*x)).collect();
    format!("({})", parts.join(", "))
}

fn kind_name(kind: DeviationKind) -> &'static str {
    match kind {
        DeviationKind::StrictlyWorse => "strictly worse",
        DeviationKind::ProtectedZeroGap => "protected tie",
        DeviationKind::ExposedZeroGap => "exposed tie",
        DeviationKind::PositiveGap => "positive gap",
    }
}

fn verdict_line(v: &SreVerdict) -> &'static str {
    match (v.is_nash, v.is_sre) {
        (true, true) => "SRE",
        (true, false) => "Nash, exposed (not SRE)",
        _ => "not Nash",
    }
}

fn table(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |out: &mut String, cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(out, "  {}", padded.join("  ").trim_end());
    };
    line(out, header.to_vec());
    for row in rows {
        line(out, row.iter().map(String::as_str).collect());
    }
}

fn render_verdict(out: &mut String, report: &DiagnosticReport, v: &SreVerdict) {
    let rows: Vec<Vec<String>> = v
        .deviations
        .iter()
        .map(|d| {
            vec![
                report.label(d.deviation).to_string(),
                num(d.gap),
                kind_name(d.kind).to_string(),
                d.psi.map(num).unwrap_or_else(|| "-".into()),
            ]
        })
        .collect();
    table(out, &["deviation", "gap", "kind", "psi"], &rows);
    for c in &v.witnesses {
        let _ = writeln!(out, "  certificate for {}", report.label(c.deviation));
        let _ = writeln!(out, "    direction  {}", vector(&c.direction));
        let _ = writeln!(out, "    blend      {}", num(c.blend));
        let _ = writeln!(out, "    step       {}", num(c.step));
        let _ = writeln!(out, "    witness    {}", vector(&c.witness));
        let _ = writeln!(out, "    gap there  {}", num(c.witnessed_gap));
    }
}

pub fn render_text(report: &DiagnosticReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}  {}  {}", report.tool, report.version, report.command, report.source);
    let _ = writeln!(
        out,
        "tolerances: zero {}, psi {}; seed {}",
        num(report.config.zero_tol),
        num(report.config.psi_tol),
        report.config.seed
    );
    match &report.payload {
        Payload::Check { state, verdict } => {
            let _ = writeln!(out, "state    {}", vector(state));
            let _ = writeln!(out, "verdict  {}", verdict_line(verdict));
            render_verdict(&mut out, report, verdict);
        }
        Payload::Nash {
            enumeration,
            verdicts,
            decomposition,
        } => {
            let _ = writeln!(
                out,
                "{} Nash candidates from {} support profiles",
                enumeration.candidates.len(),
                enumeration.profiles_examined
            );
            let rows: Vec<Vec<String>> = enumeration
                .candidates
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let mut row = vec![
                        k.to_string(),
                        vector(c.state.coords()),
                        match c.kind {
                            ComponentKind::Isolated => "isolated".into(),
                            ComponentKind::ContinuumRepresentative => "continuum rep.".into(),
                        },
                    ];
                    if let Some(vs) = verdicts {
                        row.push(verdict_line(&vs[k]).into());
                    }
                    row
                })
                .collect();
            if verdicts.is_some() {
                table(&mut out, &["#", "state", "component", "verdict"], &rows);
            } else {
                table(&mut out, &["#", "state", "component"], &rows);
            }
            for (support, reason) in &enumeration.failures {
                let _ = writeln!(out, "  unsolved support {support:?}: {reason}");
            }
            if let Some(d) = decomposition {
                let _ = writeln!(out, "SRE candidates: {:?}", d.robust);
                for (dev, set) in d.sets.iter().filter(|(_, s)| !s.is_empty()) {
                    let _ = writeln!(out, "  exposed set of {}: {set:?}", report.label(*dev));
                }
            }
        }
        Payload::Uvalid {
            state,
            region,
            report: r,
        } => {
            let _ = writeln!(out, "state    {}", vector(state));
            let _ = writeln!(out, "region   {region}");
            if r.empty_region {
                let _ = writeln!(out, "region does not meet the state space; vacuously valid");
            } else {
                let _ = writeln!(out, "verdict  {}", if r.valid { "valid" } else { "invalid" });
                if !r.candidate_in_region {
                    let _ = writeln!(out, "note: the candidate lies outside the region");
                }
                let rows: Vec<Vec<String>> = r
                    .entries
                    .iter()
                    .map(|e| vec![report.label(e.deviation).to_string(), num(e.worst_value), vector(&e.worst_state)])
                    .collect();
                table(&mut out, &["deviation", "worst gap", "worst state"], &rows);
            }
        }
        Payload::Shrink {
            state, report: r, ..
        } => {
            let _ = writeln!(out, "state    {}", vector(state));
            let rows: Vec<Vec<String>> = r
                .levels
                .iter()
                .map(|l| {
                    let worst = l
                        .worst
                        .as_ref()
                        .map(|w| format!("{} {}", report.label(w.deviation), num(w.worst_value)))
                        .unwrap_or_else(|| "-".into());
                    vec![
                        l.level.to_string(),
                        num(l.radius),
                        if l.valid { "valid" } else { "invalid" }.into(),
                        worst,
                    ]
                })
                .collect();
            table(&mut out, &["m", "radius", "verdict", "worst"], &rows);
            let _ = writeln!(
                out,
                "stabilized verdict  {}{}",
                if r.verdict { "valid" } else { "invalid" },
                if r.stable { "" } else { " (last levels disagree)" }
            );
        }
        Payload::Oracle {
            state,
            rows,
            agreement,
            ..
        } => {
            let _ = writeln!(out, "state    {}", vector(state));
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        report.label(r.sample.deviation).to_string(),
                        match r.sample.evidence {
                            Evidence::ExposedEvidence { .. } => "exposed".into(),
                            Evidence::NoPositiveFound => "none found".into(),
                        },
                        format!("{:?}", r.sample.hits),
                        kind_name(r.kind).into(),
                        if r.agrees { "yes" } else { "NO" }.into(),
                    ]
                })
                .collect();
            table(&mut out, &["deviation", "sampling", "hits", "battery", "agree"], &cells);
            let _ = writeln!(out, "agreement  {}", if *agreement { "yes" } else { "no" });
        }
    }
    out
}
