//! Command orchestration and JSON/CSV reports.
//!
//! Exit codes: 0 when every check passes, 1 on a verification failure,
//! 2 on usage or internal errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::ambient::{
    load_preset, mean_curvature, positions_obj, preset_names, ImmersedSurface, PerturbedShape, ShapeField,
};
use crate::chart::Grid;
use crate::clifford::audit::{audit_table, AuditTable, DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::clifford::CliffordConvention;
use crate::error::{Error, Result};
use crate::reconstruction::extract::q_identity_residuals;
use crate::reconstruction::{
    align, derive_coefficients, extract_shape_operator, gauss_codazzi_residual, integrate_frame,
    norm_assumption_check, norm_assumption_check_with_eta, q_tensors, spinor_count, DiracCoefficients,
    EmbeddedGrid, ExtractOptions, GaussCodazziReport, IntegrateOptions, ReconstructionTrace, SpinorKind,
};
use crate::transport::{
    dirac_residual, holonomy_convergence, transport_solve, Branch, SpecialKillingData, TransportResult,
};

pub const SCHEMA: &str = "spinsurf.report/1";
pub const MIN_GRID: usize = 8;
pub const DEFAULT_GRID: usize = 64;
pub const HOLONOMY_SIZES: [usize; 3] = [32, 64, 128];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Audit,
    Roundtrip,
    Reconstruct,
    Adjudicate,
    Report,
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "audit" => Command::Audit,
            "roundtrip" => Command::Roundtrip,
            "reconstruct" => Command::Reconstruct,
            "adjudicate" => Command::Adjudicate,
            "report" => Command::Report,
            other => return Err(Error::Parse(format!("unknown command '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::Parse(format!("unknown format '{other}'"))),
        }
    }
}

/// Named tolerances, overridable with `KEY=VAL`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances(pub BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        let entries = [
            ("dirac", 1e-6),
            ("killing", 1e-6),
            ("holonomy", 1e-6),
            ("norm", 1e-6),
            ("shape", 1e-4),
            ("trace-law", 1e-10),
            ("integrability", 1e-6),
            ("frame-drift", 1e-6),
            ("embedding", 1e-6),
            ("quadric", 1e-8),
            ("pair-margin", 1e-8),
        ];
        Self(entries.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }
}

impl Tolerances {
    pub fn get(&self, key: &str) -> f64 {
        self.0[key]
    }

    /// Applies `KEY=VAL`; unknown keys and non-positive values are errors.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, val) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("tolerance '{assignment}' is not KEY=VAL")))?;
        let val: f64 = val
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("tolerance value '{val}' is not a number")))?;
        if !(val.is_finite() && val > 0.0) {
            return Err(Error::Parse(format!("tolerance {key} = {val} must be positive and finite")));
        }
        let slot = self
            .0
            .get_mut(key.trim())
            .ok_or_else(|| Error::Parse(format!("unknown tolerance key '{key}'")))?;
        *slot = val;
        Ok(())
    }
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub presets: Vec<String>,
    pub grid: (usize, usize),
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub export_obj: Option<PathBuf>,
    pub seed: u64,
    pub samples: usize,
    pub format: Format,
    pub force_convention: Option<CliffordConvention>,
    pub perturb: Option<f64>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            presets: Vec::new(),
            grid: (DEFAULT_GRID, DEFAULT_GRID),
            tolerances: Tolerances::default(),
            out: None,
            export_obj: None,
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            format: Format::Json,
            force_convention: None,
            perturb: None,
        }
    }

    pub fn with_preset(mut self, name: &str) -> Self {
        self.presets = vec![name.to_string()];
        self
    }

    pub fn with_grid(mut self, n: usize) -> Self {
        self.grid = (n, n);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.0 < MIN_GRID || self.grid.1 < MIN_GRID {
            return Err(Error::GridTooCoarse {
                min: MIN_GRID,
                nu: self.grid.0,
                nv: self.grid.1,
            });
        }
        if let Some((k, v)) = self.tolerances.0.iter().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Parse(format!("tolerance {k} = {v} must be positive")));
        }
        if self.samples == 0 {
            return Err(Error::Parse("sample count must be positive".into()));
        }
        if self.force_convention.is_some() && self.command != Command::Audit {
            return Err(Error::Parse("a forced convention only applies to the audit".into()));
        }
        if let Some(d) = self.perturb {
            if !d.is_finite() || d == 0.0 {
                return Err(Error::Parse(format!("perturbation {d} must be finite and nonzero")));
            }
        }
        if matches!(self.command, Command::Roundtrip | Command::Reconstruct) && self.presets.is_empty() {
            return Err(Error::Parse("a preset is required".into()));
        }
        if self.export_obj.is_some() && self.command != Command::Roundtrip {
            return Err(Error::Parse("OBJ export is produced by roundtrip".into()));
        }
        Ok(())
    }
}

/// Exit code plus payloads of one run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit: u8,
    pub json: Value,
    pub csv: String,
    pub obj: Option<String>,
}

impl Outcome {
    fn usage(command: &str, err: &Error) -> Self {
        Self {
            exit: 2,
            json: json!({ "schema": SCHEMA, "command": command, "error": err.to_string() }),
            csv: String::new(),
            obj: None,
        }
    }

    /// Payload selected by `format`.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("report values serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone(),
        }
    }
}

/// Whether an error reports failed numerics rather than bad input.
pub fn is_verification_error(e: &Error) -> bool {
    matches!(
        e,
        Error::IsotropicSpinor { .. }
            | Error::VanishingHalfSpinor { .. }
            | Error::StepUnstable { .. }
            | Error::DiracResidualTooLarge { .. }
            | Error::NormAssumptionViolated { .. }
            | Error::CaseUndetermined { .. }
            | Error::IntegrabilityViolated { .. }
            | Error::FrameDrift { .. }
            | Error::AuditInconclusive { .. }
    )
}

/// One named comparison against a tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub bound: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Default, Clone)]
struct Checks(Vec<Check>);

impl Checks {
    fn le(&mut self, name: &str, value: f64, tol: f64) {
        self.0.push(Check {
            name: name.into(),
            value: Some(value),
            bound: format!("<= {tol:e}"),
            passed: value <= tol,
            error: None,
        });
    }

    fn ge(&mut self, name: &str, value: f64, tol: f64) {
        self.0.push(Check {
            name: name.into(),
            value: Some(value),
            bound: format!(">= {tol:e}"),
            passed: value >= tol,
            error: None,
        });
    }

    fn error(&mut self, name: &str, e: &Error) {
        self.0.push(Check {
            name: name.into(),
            value: None,
            bound: "no error".into(),
            passed: false,
            error: Some(e.to_string()),
        });
    }

    fn passed(&self) -> bool {
        self.0.iter().all(|c| c.passed)
    }

    fn failures(&self) -> Vec<String> {
        self.0.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect()
    }
}

/// Splits an error into a recorded failure (exit 1) or a usage error (exit 2).
fn stage<T>(checks: &mut Checks, name: &str, r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if is_verification_error(&e) => {
            checks.error(name, &e);
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Entry point for every command.
pub fn run(config: &RunConfig) -> Outcome {
    let name = serde_json::to_value(config.command)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default();
    if let Err(e) = config.validate() {
        return Outcome::usage(&name, &e);
    }
    let r = match config.command {
        Command::Audit => Ok(run_audit(config)),
        Command::Roundtrip => run_roundtrip(config),
        Command::Reconstruct => run_reconstruct(config),
        Command::Adjudicate => run_adjudicate(config),
        Command::Report => run_report(config),
    };
    r.unwrap_or_else(|e| Outcome::usage(&name, &e))
}

fn config_value(config: &RunConfig) -> Value {
    json!({
        "seed": config.seed,
        "samples": config.samples,
        "grid": [config.grid.0, config.grid.1],
        "tolerances": config.tolerances,
        "presets": config.presets,
        "perturbation": config.perturb,
    })
}

fn audit_value(table: &AuditTable) -> Value {
    let mut v = serde_json::to_value(table).expect("audit table serializes");
    if let Some(map) = v.as_object_mut() {
        map.remove("elapsed_ms");
    }
    v
}

/// Convention audit: exit 0 iff exactly one convention passes and it is the
/// forced one when a convention is forced.
pub fn run_audit(config: &RunConfig) -> Outcome {
    let table = audit_table(config.seed, config.samples);
    let frozen = table.frozen();
    let judged = config.force_convention.or(frozen);
    let ok = match (frozen, judged) {
        (Some(f), Some(j)) => f == j,
        _ => false,
    };
    let judged_residual = judged.map(|c| table.max_residual(c));
    let csv = audit_csv(&table);
    Outcome {
        exit: if ok { 0 } else { 1 },
        json: json!({
            "schema": SCHEMA,
            "command": "audit",
            "config": config_value(config),
            "frozen": frozen,
            "forced": config.force_convention,
            "judged_max_residual": judged_residual,
            "passed": ok,
            "table": audit_value(&table),
        }),
        csv,
        obj: None,
    }
}

fn audit_csv(table: &AuditTable) -> String {
    let mut out = String::from(
        "sigma,tau,signature,epsilon,identification,normal_chain,six_case,six_case_plus_i,pairing,passed\n",
    );
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:e},{:e},{:e},{:e},{:e},{}",
            r.sigma,
            r.tau,
            r.signature,
            r.epsilon.label(),
            r.residual_identification,
            r.residual_normal_chain,
            r.residual_six_case,
            r.residual_six_case_plus_i,
            r.residual_pairing,
            r.passed
        );
    }
    out
}

fn preset_value(s: &ImmersedSurface) -> Value {
    json!({
        "name": s.name,
        "ambient": s.model.label(),
        "signature": s.patch.signature.to_string(),
        "frame_signs": s.frame.eps,
        "epsilon": s.context.epsilon.label(),
        "lambda": [s.context.lambda.re, s.context.lambda.im],
        "kappa": s.context.kappa,
    })
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::First => "first",
        Branch::Second => "second",
    }
}

/// Spinors prescribed by the table, one per branch.
pub fn required_branches(s: &ImmersedSurface) -> Result<(usize, SpinorKind, Vec<Branch>)> {
    let (count, kind) = spinor_count(s.patch.signature.p, s.patch.signature.q, s.context.epsilon)?;
    let branches = [Branch::First, Branch::Second][..count].to_vec();
    Ok((count, kind, branches))
}

/// Product check between the two transported spinors.
#[derive(Debug, Clone, Serialize)]
pub struct PairCheck {
    /// `orthogonal` (definite) or `non-degenerate` (1,1).
    pub kind: &'static str,
    /// `pairing` or `hermitian`.
    pub product: &'static str,
    pub max_product: f64,
    pub min_product: f64,
    pub margin: f64,
    pub passed: bool,
}

/// Signature (0,2) uses the positive Hermitian product `phi1^H phi2`, the
/// quantity conserved by the two equations there; other signatures use the
/// spinor pairing.
pub fn pair_check(a: &TransportResult, b: &TransportResult, margin: f64) -> Result<PairCheck> {
    let hermitian = a.field.rep.signature.p == 0;
    let products = if hermitian {
        crate::transport::hermitian_products(&a.field, &b.field)?
    } else {
        crate::transport::pair_products(&a.field, &b.field)?
    };
    let max_product = products.iter().copied().fold(0.0, f64::max);
    let min_product = products.iter().copied().fold(f64::INFINITY, f64::min);
    let indefinite = a.field.rep.signature.q == 1;
    let (kind, passed) = if indefinite {
        ("non-degenerate", min_product >= margin)
    } else {
        ("orthogonal", max_product <= margin)
    };
    Ok(PairCheck {
        kind,
        product: if hermitian { "hermitian" } else { "pairing" },
        max_product,
        min_product,
        margin,
        passed,
    })
}

/// Largest `|A_extracted - A_true| / max(|A_true|, 1)` over the grid.
pub fn shape_error(trace: &ReconstructionTrace, truth: &dyn ShapeField, grid: &Grid) -> f64 {
    grid.nodes()
        .map(|(i, j)| {
            let (u, v) = grid.coords(i, j);
            let a = truth.at(u, v);
            (trace.nodes[grid.index(i, j)].a - a).abs().max() / a.abs().max().max(1.0)
        })
        .fold(0.0, f64::max)
}

fn gc_value(r: &GaussCodazziReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

struct RoundTrip {
    checks: Checks,
    json: Value,
    csv: String,
    embedding: Option<EmbeddedGrid>,
}

fn roundtrip_one(name: &str, config: &RunConfig) -> Result<RoundTrip> {
    let tol = &config.tolerances;
    let s = load_preset(name)?;
    let grid = Grid::new(s.patch.domain, config.grid.0, config.grid.1)?;
    let truth = s.shape_field();
    let input: Arc<dyn ShapeField> = match config.perturb {
        Some(d) => Arc::new(PerturbedShape::new(truth.clone(), d, s.patch.domain)),
        None => truth.clone(),
    };
    let mut checks = Checks::default();
    let (count, kind, branches) = required_branches(&s)?;

    let input_gc = gauss_codazzi_residual(&s.frame, input.as_ref(), &s.context, &grid)?;
    checks.le("input.gauss", input_gc.g_max, tol.get("integrability"));
    checks.le("input.codazzi", input_gc.c_max, tol.get("integrability"));

    let mut transports = Vec::new();
    let mut transport_json = Vec::new();
    for &b in &branches {
        let data = SpecialKillingData::with_shape(&s, input.clone(), b)?;
        let tag = format!("transport.{}", branch_name(b));
        let Some(t) = stage(&mut checks, &tag, transport_solve(&data, &grid))? else {
            continue;
        };
        let dirac = dirac_residual(&t, &data, &DiracCoefficients::ORACLE)?;
        checks.le(&format!("{tag}.killing"), t.killing_residual, tol.get("killing"));
        checks.le(&format!("{tag}.holonomy"), t.holonomy_defect, tol.get("holonomy"));
        checks.le(&format!("{tag}.dirac"), dirac, tol.get("dirac"));
        let norm = stage(
            &mut checks,
            &format!("{tag}.norm"),
            norm_assumption_check(&t.field, &s.frame, &s.context, b, tol.get("norm")),
        )?;
        if let Some(n) = &norm {
            if s.frame.rep.signature.q == 1 {
                checks.ge(&format!("{tag}.norm"), n.value, n.tolerance);
            } else {
                checks.le(&format!("{tag}.norm"), n.value, n.tolerance);
            }
        }
        transport_json.push(json!({
            "branch": branch_name(b),
            "summary": t.summary(),
            "dirac_residual": dirac,
            "norm": norm,
        }));
        transports.push((b, t));
    }

    let pair = if count == 2 && transports.len() == 2 {
        let p = pair_check(&transports[0].1, &transports[1].1, tol.get("pair-margin"))?;
        let value = if p.kind == "orthogonal" { p.max_product } else { p.min_product };
        if p.kind == "orthogonal" {
            checks.le("pair.orthogonal", value, p.margin);
        } else {
            checks.ge("pair.non-degenerate", value, p.margin);
        }
        serde_json::to_value(&p).expect("pair check serializes")
    } else {
        Value::Null
    };

    let options = ExtractOptions {
        dirac_tol: tol.get("dirac"),
        norm_tol: tol.get("norm"),
        ..ExtractOptions::default()
    };
    let mut extraction_json = Vec::new();
    let mut extracted: Option<ReconstructionTrace> = None;
    for (b, t) in &transports {
        let tag = format!("extract.{}", branch_name(*b));
        let r = stage(
            &mut checks,
            &tag,
            extract_shape_operator(&t.field, &s.frame, &s.context, *b, &options),
        )?;
        match r {
            Some(trace) => {
                let err = shape_error(&trace, truth.as_ref(), &grid);
                checks.le(&format!("{tag}.shape"), err, tol.get("shape"));
                checks.le(&format!("{tag}.trace-law"), trace.trace_law_defect, tol.get("trace-law"));
                let mut v = serde_json::to_value(&trace).expect("trace serializes");
                v["branch_taken"] = v["branch"].clone();
                v["branch"] = json!(branch_name(*b));
                v["shape_error"] = json!(err);
                extraction_json.push(v);
                if extracted.is_none() {
                    extracted = Some(trace);
                }
            }
            None => extraction_json.push(json!({ "branch": branch_name(*b), "error": checks.0.last().and_then(|c| c.error.clone()) })),
        }
    }

    let (gc_json, embedding_json, embedding) = match &extracted {
        Some(trace) => {
            let gc = gauss_codazzi_residual(&s.frame, &trace.shape, &s.context, &grid)?;
            checks.le("extracted.gauss", gc.g_max, tol.get("integrability"));
            checks.le("extracted.codazzi", gc.c_max, tol.get("integrability"));
            let (ej, emb) = embed(&s, &trace.shape, &grid, config, &mut checks)?;
            (gc_value(&gc), ej, emb)
        }
        None => {
            let (ej, emb) = embed(&s, input.as_ref(), &grid, config, &mut checks)?;
            (Value::Null, ej, emb)
        }
    };

    let csv = roundtrip_csv(&s, &grid, extracted.as_ref(), truth.as_ref(), embedding.as_ref());
    let json = json!({
        "preset": preset_value(&s),
        "spinors": { "required": count, "kind": kind, "transported": transports.len() },
        "input_gauss_codazzi": gc_value(&input_gc),
        "transport": transport_json,
        "pair": pair,
        "extraction": extraction_json,
        "extracted_gauss_codazzi": gc_json,
        "embedding": embedding_json,
        "checks": checks.0,
        "failures": checks.failures(),
        "passed": checks.passed(),
    });
    Ok(RoundTrip {
        checks,
        json,
        csv,
        embedding,
    })
}

fn embed(
    s: &ImmersedSurface,
    shape: &dyn ShapeField,
    grid: &Grid,
    config: &RunConfig,
    checks: &mut Checks,
) -> Result<(Value, Option<EmbeddedGrid>)> {
    let tol = &config.tolerances;
    let options = IntegrateOptions {
        integrability_tol: tol.get("integrability"),
        drift_tol: tol.get("frame-drift"),
    };
    let r = integrate_frame(&s.frame, shape, &s.context, grid, &options);
    let Some(e) = stage(checks, "embedding", r)? else {
        let msg = checks.0.last().and_then(|c| c.error.clone());
        return Ok((json!({ "error": msg }), None));
    };
    let truth = EmbeddedGrid::from_surface(s, grid)?;
    let al = align(&e, &truth)?;
    checks.le("embedding.distance", al.distance, tol.get("embedding"));
    checks.le("embedding.quadric", e.quadric_defect(), tol.get("quadric"));
    let v = json!({
        "ambient_signs": e.signs,
        "kappa": e.kappa,
        "distance": al.distance,
        "isometry_defect": al.isometry_defect,
        "quadric_defect": e.quadric_defect(),
        "path_defect": e.path_defect,
        "gram_drift": e.gram_drift,
    });
    Ok((v, Some(e)))
}

fn roundtrip_csv(
    s: &ImmersedSurface,
    grid: &Grid,
    trace: Option<&ReconstructionTrace>,
    truth: &dyn ShapeField,
    embedding: Option<&EmbeddedGrid>,
) -> String {
    let dim = embedding.map_or(0, |e| e.dim());
    let mut out = String::from("preset,u,v,a11,a12,a21,a22,h,true_a11,true_a12,true_a21,true_a22");
    for k in 0..dim {
        let _ = write!(out, ",x{k}");
    }
    out.push('\n');
    for (i, j) in grid.nodes() {
        let (u, v) = grid.coords(i, j);
        let idx = grid.index(i, j);
        let t = truth.at(u, v);
        let _ = write!(out, "{},{u:.12e},{v:.12e}", s.name);
        match trace {
            Some(tr) => {
                let n = &tr.nodes[idx];
                let _ = write!(
                    out,
                    ",{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                    n.a[(0, 0)],
                    n.a[(0, 1)],
                    n.a[(1, 0)],
                    n.a[(1, 1)],
                    n.h
                );
            }
            None => out.push_str(",,,,,"),
        }
        let _ = write!(
            out,
            ",{:.12e},{:.12e},{:.12e},{:.12e}",
            t[(0, 0)],
            t[(0, 1)],
            t[(1, 0)],
            t[(1, 1)]
        );
        if let Some(e) = embedding {
            for x in e.positions[idx].iter() {
                let _ = write!(out, ",{x:.12e}");
            }
        }
        out.push('\n');
    }
    out
}

/// Full pipeline on each configured preset.
pub fn run_roundtrip(config: &RunConfig) -> Result<Outcome> {
    let results: Vec<RoundTrip> = config
        .presets
        .par_iter()
        .map(|p| roundtrip_one(p, config))
        .collect::<Result<_>>()?;
    let passed = results.iter().all(|r| r.checks.passed());
    let obj = match &config.export_obj {
        Some(_) => {
            let first = results.first().and_then(|r| r.embedding.as_ref()).ok_or_else(|| {
                Error::InvalidContext("no reconstructed embedding to export".into())
            })?;
            Some(positions_obj(&first.positions, &first.grid)?)
        }
        None => None,
    };
    let csv = results
        .iter()
        .enumerate()
        .map(|(k, r)| if k == 0 { r.csv.clone() } else { r.csv.lines().skip(1).map(|l| format!("{l}\n")).collect() })
        .collect();
    Ok(Outcome {
        exit: if passed { 0 } else { 1 },
        json: json!({
            "schema": SCHEMA,
            "command": "roundtrip",
            "config": config_value(config),
            "coefficients": DiracCoefficients::ORACLE,
            "convention": CliffordConvention::FROZEN,
            "results": results.iter().map(|r| r.json.clone()).collect::<Vec<_>>(),
            "passed": passed,
        }),
        csv,
        obj,
    })
}

/// Transport and extraction only.
pub fn run_reconstruct(config: &RunConfig) -> Result<Outcome> {
    let tol = &config.tolerances;
    let mut results = Vec::new();
    let mut csv = String::from("preset,branch,u,v,a11,a12,a21,a22,h\n");
    let mut passed = true;
    for name in &config.presets {
        let s = load_preset(name)?;
        let grid = Grid::new(s.patch.domain, config.grid.0, config.grid.1)?;
        let (_, _, branches) = required_branches(&s)?;
        let mut checks = Checks::default();
        let mut traces = Vec::new();
        for b in branches {
            let data = SpecialKillingData::for_surface(&s, b)?;
            let Some(t) = stage(&mut checks, "transport", transport_solve(&data, &grid))? else {
                continue;
            };
            let options = ExtractOptions {
                dirac_tol: tol.get("dirac"),
                norm_tol: tol.get("norm"),
                ..ExtractOptions::default()
            };
            let tag = format!("extract.{}", branch_name(b));
            let r = stage(
                &mut checks,
                &tag,
                extract_shape_operator(&t.field, &s.frame, &s.context, b, &options),
            )?;
            if let Some(trace) = r {
                let err = shape_error(&trace, s.shape_field().as_ref(), &grid);
                checks.le(&format!("{tag}.shape"), err, tol.get("shape"));
                checks.le(&format!("{tag}.trace-law"), trace.trace_law_defect, tol.get("trace-law"));
                for (i, j) in grid.nodes() {
                    let (u, v) = grid.coords(i, j);
                    let n = &trace.nodes[grid.index(i, j)];
                    let _ = writeln!(
                        csv,
                        "{name},{},{u:.12e},{v:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                        branch_name(b),
                        n.a[(0, 0)],
                        n.a[(0, 1)],
                        n.a[(1, 0)],
                        n.a[(1, 1)],
                        n.h
                    );
                }
                let mut v = serde_json::to_value(&trace).expect("trace serializes");
                v["branch_taken"] = v["branch"].clone();
                v["branch"] = json!(branch_name(b));
                v["shape_error"] = json!(err);
                traces.push(v);
            }
        }
        passed &= checks.passed();
        results.push(json!({
            "preset": preset_value(&s),
            "traces": traces,
            "checks": checks.0,
            "failures": checks.failures(),
            "passed": checks.passed(),
        }));
    }
    Ok(Outcome {
        exit: if passed { 0 } else { 1 },
        json: json!({
            "schema": SCHEMA,
            "command": "reconstruct",
            "config": config_value(config),
            "results": results,
            "passed": passed,
        }),
        csv,
        obj: None,
    })
}

/// Discrepancy evidence for one preset.
#[derive(Debug, Clone, Serialize)]
pub struct PresetAdjudication {
    pub preset: String,
    pub signature: String,
    pub epsilon: &'static str,
    /// Mean curvature at the domain center.
    pub mean_curvature: f64,
    pub gauss_equation: f64,
    pub codazzi: f64,
    pub sign_variant_min: f64,
    pub sign_variant_max: f64,
    /// Dirac residuals of the first transported spinor per coefficient pair.
    pub dirac_oracle: f64,
    pub dirac_doubled: f64,
    pub dirac_unit: f64,
    /// Norm defects with `eta = -eps^2 lambda` and with `eta = lambda`.
    pub norm_eta_ours: Option<f64>,
    pub norm_eta_lambda: Option<f64>,
    /// `Q` trace and symmetry identity residuals, ours and as displayed.
    pub q_identities_ours: Option<[f64; 2]>,
    pub q_identities_displayed: Option<[f64; 2]>,
}

fn adjudicate_one(name: &str, config: &RunConfig) -> Result<PresetAdjudication> {
    let s = load_preset(name)?;
    let grid = Grid::new(s.patch.domain, config.grid.0, config.grid.1)?;
    let truth = s.shape_field();
    let gc = gauss_codazzi_residual(&s.frame, truth.as_ref(), &s.context, &grid)?;
    let data = SpecialKillingData::for_surface(&s, Branch::First)?;
    let t = transport_solve(&data, &grid)?;
    let dirac = |c: &DiracCoefficients| dirac_residual(&t, &data, c);
    let (uc, vc) = s.patch.domain.center();
    let definite = s.frame.rep.signature.q != 1;
    let (norm_ours, norm_lambda) = if definite {
        let tol = config.tolerances.get("norm");
        let a = norm_assumption_check(&t.field, &s.frame, &s.context, Branch::First, tol)?;
        let b = norm_assumption_check_with_eta(&t.field, &s.frame, &s.context, Branch::First, s.context.lambda, tol)?;
        (Some(a.value), Some(b.value))
    } else {
        (None, None)
    };
    let (q_ours, q_disp) = if definite {
        let qs = q_tensors(&t.field, &s.frame, &s.context)?;
        let mut ours = [0.0f64; 2];
        let mut disp = [0.0f64; 2];
        for ((i, j), q) in grid.nodes().zip(&qs) {
            let (u, v) = grid.coords(i, j);
            let h = mean_curvature(&truth.at(u, v));
            let (o, d) = q_identity_residuals(q, s.frame.eps, &s.context, s.context.lambda, h);
            for k in 0..2 {
                ours[k] = ours[k].max(o[k]);
                disp[k] = disp[k].max(d[k]);
            }
        }
        (Some(ours), Some(disp))
    } else {
        (None, None)
    };
    Ok(PresetAdjudication {
        preset: s.name.clone(),
        signature: s.patch.signature.to_string(),
        epsilon: s.context.epsilon.label(),
        mean_curvature: mean_curvature(&truth.at(uc, vc)),
        gauss_equation: gc.g_max,
        codazzi: gc.c_max,
        sign_variant_min: gc.sign_variant_min,
        sign_variant_max: gc.sign_variant_max,
        dirac_oracle: dirac(&DiracCoefficients::ORACLE)?,
        dirac_doubled: dirac(&DiracCoefficients::DOUBLED)?,
        dirac_unit: dirac(&DiracCoefficients::UNIT)?,
        norm_eta_ours: norm_ours,
        norm_eta_lambda: norm_lambda,
        q_identities_ours: q_ours,
        q_identities_displayed: q_disp,
    })
}

/// Thresholds separating a vanishing identity from a failing one.
pub const CONSISTENT: f64 = 1e-8;
pub const INCONSISTENT: f64 = 1e-1;

/// Discrepancy table over the configured presets.
pub fn run_adjudicate(config: &RunConfig) -> Result<Outcome> {
    let rows: Vec<PresetAdjudication> = config
        .presets
        .par_iter()
        .map(|p| adjudicate_one(p, config))
        .collect::<Result<_>>()?;
    let fit = derive_coefficients(config.seed, config.samples.min(32))?;
    let oracle = DiracCoefficients {
        a: fit.a.round(),
        b: fit.b.round(),
        source: crate::reconstruction::CoefficientSource::DerivedOracle,
    };
    let displays = [("doubled", DiracCoefficients::DOUBLED), ("unit", DiracCoefficients::UNIT)];
    let selected: Vec<&str> = displays.iter().filter(|(_, d)| d.same_pair(&oracle)).map(|(n, _)| *n).collect();
    let gauss_form_consistent = rows.iter().all(|r| r.gauss_equation <= CONSISTENT && r.codazzi <= CONSISTENT);
    let variant_inconsistent_on: Vec<&str> = rows
        .iter()
        .filter(|r| r.sign_variant_min > INCONSISTENT)
        .map(|r| r.preset.as_str())
        .collect();
    let rejected_max = rows
        .iter()
        .filter(|r| r.mean_curvature.abs() > 1e-12)
        .map(|r| if selected == ["unit"] { r.dirac_doubled } else { r.dirac_unit })
        .fold(0.0, f64::max);
    let oracle_max = rows.iter().map(|r| r.dirac_oracle).fold(0.0, f64::max);
    let mut csv = String::from(
        "preset,signature,epsilon,H,gauss,codazzi,variant_min,variant_max,dirac_oracle,dirac_doubled,dirac_unit\n",
    );
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.preset,
            r.signature,
            r.epsilon,
            r.mean_curvature,
            r.gauss_equation,
            r.codazzi,
            r.sign_variant_min,
            r.sign_variant_max,
            r.dirac_oracle,
            r.dirac_doubled,
            r.dirac_unit
        );
    }
    Ok(Outcome {
        exit: 0,
        json: json!({
            "schema": SCHEMA,
            "command": "adjudicate",
            "config": config_value(config),
            "gauss_codazzi": {
                "gauss_form_consistent": gauss_form_consistent,
                "variant_inconsistent_on": variant_inconsistent_on,
            },
            "dirac": {
                "oracle_fit": fit,
                "oracle": oracle,
                "selected_display": selected,
                "oracle_max_residual": oracle_max,
                "rejected_max_residual": rejected_max,
            },
            "rows": rows,
        }),
        csv,
        obj: None,
    })
}

/// Holonomy convergence, adjudication and round trips over the presets.
pub fn run_report(config: &RunConfig) -> Result<Outcome> {
    let audit = run_audit(config);
    let adjudication = run_adjudicate(config)?;
    let roundtrip = run_roundtrip(config)?;
    let holonomy: Vec<Value> = config
        .presets
        .iter()
        .map(|name| {
            let s = load_preset(name)?;
            let c = holonomy_convergence(&s.frame, &HOLONOMY_SIZES)?;
            Ok(json!({
                "preset": name,
                "sizes": c.sizes,
                "defects": c.defects,
                "orders": c.orders,
                "exact": c.exact,
                "passed": c.exact || c.min_order() >= 0.9,
            }))
        })
        .collect::<Result<_>>()?;
    let holonomy_ok = holonomy.iter().all(|h| h["passed"] == json!(true));
    let exit = audit.exit.max(roundtrip.exit).max(if holonomy_ok { 0 } else { 1 });
    let mut csv = adjudication.csv.clone();
    csv.push('\n');
    csv.push_str(&roundtrip_summary_csv(&roundtrip.json));
    Ok(Outcome {
        exit,
        json: json!({
            "schema": SCHEMA,
            "command": "report",
            "config": config_value(config),
            "audit": audit.json,
            "holonomy": holonomy,
            "adjudication": adjudication.json,
            "roundtrip": roundtrip.json,
            "passed": exit == 0,
        }),
        csv,
        obj: None,
    })
}

fn roundtrip_summary_csv(rt: &Value) -> String {
    let mut out = String::from("preset,check,value,bound,passed\n");
    for r in rt["results"].as_array().into_iter().flatten() {
        let name = r["preset"]["name"].as_str().unwrap_or_default();
        for c in r["checks"].as_array().into_iter().flatten() {
            let value = c["value"].as_f64().map(|v| format!("{v:e}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{name},{},{value},{},{}",
                c["name"].as_str().unwrap_or_default(),
                c["bound"].as_str().unwrap_or_default(),
                c["passed"]
            );
        }
    }
    out
}

/// Presets used when none are named.
pub fn default_presets() -> Vec<String> {
    preset_names().iter().map(|s| s.to_string()).collect()
}

/// `|<phi1, phi2>|` range of two transported spinors on a preset.
pub fn preset_pair(name: &str, n: usize) -> Result<Option<PairCheck>> {
    let s = load_preset(name)?;
    let (count, _, _) = required_branches(&s)?;
    if count != 2 {
        return Ok(None);
    }
    let grid = Grid::new(s.patch.domain, n, n)?;
    let t1 = transport_solve(&SpecialKillingData::for_surface(&s, Branch::First)?, &grid)?;
    let t2 = transport_solve(&SpecialKillingData::for_surface(&s, Branch::Second)?, &grid)?;
    pair_check(&t1, &t2, Tolerances::default().get("pair-margin")).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(RunConfig::new(Command::Audit).validate().is_ok());
        assert!(RunConfig::new(Command::Audit).with_grid(7).validate().is_err());
        assert!(RunConfig::new(Command::Roundtrip).validate().is_err());
        let mut c = RunConfig::new(Command::Audit);
        assert!(c.tolerances.set("dirac=0").is_err());
        assert!(c.tolerances.set("dirac=inf").is_err());
        c.tolerances.0.insert("dirac".into(), -1.0);
        assert!(c.validate().is_err());
        assert!(c.tolerances.set("nonsense=1").is_err());
        assert!(c.tolerances.set("dirac").is_err());
        let mut c = RunConfig::new(Command::Adjudicate);
        c.force_convention = Some(CliffordConvention::FROZEN);
        assert!(c.validate().is_err());
    }

    #[test]
    fn malformed_config_exits_two() {
        let o = run(&RunConfig::new(Command::Roundtrip).with_preset("no-such-surface"));
        assert_eq!(o.exit, 2);
        assert_eq!(o.json["schema"], SCHEMA);
        let o = run(&RunConfig::new(Command::Audit).with_grid(3));
        assert_eq!(o.exit, 2);
    }

    #[test]
    fn audit_exit_codes() {
        let mut c = RunConfig::new(Command::Audit);
        c.samples = 16;
        let o = run(&c);
        assert_eq!(o.exit, 0);
        assert_eq!(o.json["frozen"]["sigma"], -1);
        assert_eq!(o.json["frozen"]["tau"], -1);
        c.force_convention = Some(CliffordConvention::new(1, 1).unwrap());
        assert_eq!(run(&c).exit, 1);
    }

    #[test]
    fn roundtrip_passes_on_sphere() {
        let o = run(&RunConfig::new(Command::Roundtrip).with_preset("round-sphere-R3").with_grid(32));
        assert_eq!(o.exit, 0, "{}", o.json);
        assert_eq!(o.json["results"][0]["spinors"]["required"], 1);
        assert!(o.csv.lines().count() == 32 * 32 + 1);
    }

    #[test]
    fn perturbed_roundtrip_fails() {
        let mut c = RunConfig::new(Command::Roundtrip).with_preset("de-sitter-R21").with_grid(24);
        c.perturb = Some(0.01);
        let o = run(&c);
        assert_eq!(o.exit, 1);
        let failures = o.json["results"][0]["failures"].as_array().unwrap();
        assert!(failures.iter().any(|f| f == "input.gauss"));
        assert!(failures.iter().any(|f| f == "embedding"));
    }

    #[test]
    fn empty_adjudication() {
        let o = run(&RunConfig::new(Command::Adjudicate));
        assert_eq!(o.exit, 0);
        assert_eq!(o.json["rows"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn reports_are_byte_stable() {
        let mut c = RunConfig::new(Command::Adjudicate).with_preset("round-sphere-R3").with_grid(16);
        c.samples = 8;
        let a = run(&c).render(Format::Json);
        let b = run(&c).render(Format::Json);
        assert_eq!(a, b);
    }
}
