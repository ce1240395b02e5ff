//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line to
//! stderr, bypassing the test harness capture, then asserts.

use std::io::Write;
use std::time::Instant;

use nalgebra::Matrix2;
use rayon::prelude::*;
use spinsurf::ambient::{load_preset, mean_curvature, preset_names, PerturbedShape, ShapeField};
use spinsurf::chart::{Grid, GridSpinorField};
use spinsurf::clifford::audit::{audit_table, convention_audit_with, DEFAULT_SEED};
use spinsurf::clifford::{CliffordConvention, Spinor};
use spinsurf::reconstruction::{
    align, beta_tensor, extract_shape_operator, gauss_codazzi_residual, integrate_frame, q_tensors,
    DiracCoefficients, EmbeddedGrid, ExtractOptions, IntegrateOptions, ReconstructionTrace,
};
use spinsurf::report::{self, Command, RunConfig, HOLONOMY_SIZES};
use spinsurf::transport::{dirac_residual, holonomy_convergence, transport_solve, Branch, SpecialKillingData};
use spinsurf::Error;

const N: usize = 64;
const AUDIT_SAMPLES: usize = 128;
const IDENTITY_TOL: f64 = 1e-12;
const AUDIT_SECONDS: f64 = 5.0;
const O1: f64 = 1e-1;
const MIN_ORDER: f64 = 0.9;
const DIRAC_TOL: f64 = 1e-6;
const SHAPE_TOL: f64 = 1e-4;
const TRACE_TOL: f64 = 1e-10;
const ROUNDTRIP_SECONDS: f64 = 60.0;
const GC_TOL: f64 = 1e-8;
const EMBED_TOL: f64 = 1e-6;
const QUADRIC_TOL: f64 = 1e-8;
const PAIR_MARGIN: f64 = 1e-8;
const PERTURBATION: f64 = 0.01;
const PERTURBED_FLOOR: f64 = 1e-3;
const FLAT: &str = "flat-plane-R3";

fn verdict(n: u32, ok: bool, detail: &str) {
    let line = format!("\ncriterion {n}: {} {detail}\n", if ok { "PASS" } else { "FAIL" });
    match std::fs::OpenOptions::new().append(true).open("/dev/stderr") {
        Ok(mut f) => {
            let _ = f.write_all(line.as_bytes());
        }
        Err(_) => eprint!("{line}"),
    }
}

fn grid_for(name: &str) -> (spinsurf::ambient::ImmersedSurface, Grid) {
    let s = load_preset(name).unwrap();
    let grid = Grid::new(s.patch.domain, N, N).unwrap();
    (s, grid)
}

fn branches(s: &spinsurf::ambient::ImmersedSurface) -> Vec<Branch> {
    let (count, _) = s.spinor_requirement().unwrap();
    [Branch::First, Branch::Second][..count].to_vec()
}

fn relative_shape_error(trace: &ReconstructionTrace, truth: &dyn ShapeField, grid: &Grid) -> f64 {
    grid.nodes()
        .map(|(i, j)| {
            let (u, v) = grid.coords(i, j);
            let a = truth.at(u, v);
            let got: Matrix2<f64> = trace.shape.values[grid.index(i, j)];
            (got - a).abs().max() / a.abs().max().max(1.0)
        })
        .fold(0.0, f64::max)
}

#[test]
fn criterion_1_convention_audit() {
    let start = Instant::now();
    let table = convention_audit_with(DEFAULT_SEED, AUDIT_SAMPLES).unwrap();
    let seconds = start.elapsed().as_secs_f64();
    let frozen = table.frozen().unwrap();
    let residual = table.max_residual(frozen);
    let ok = table.passing.len() == 1
        && frozen == CliffordConvention::FROZEN
        && residual <= IDENTITY_TOL
        && table.samples >= 100
        && seconds < AUDIT_SECONDS;
    verdict(
        1,
        ok,
        &format!(
            "unique pair (sigma,tau)=({},{}), max residual {residual:.1e}, {} samples/case, {seconds:.3} s",
            frozen.sigma, frozen.tau, table.samples
        ),
    );
    assert!(ok);
}

fn six_case_max(sigma: i8, tau: i8) -> (f64, usize) {
    let table = audit_table(DEFAULT_SEED, AUDIT_SAMPLES);
    let rows: Vec<_> = table.rows.iter().filter(|r| r.sigma == sigma && r.tau == tau).collect();
    let finite: Vec<f64> = rows.iter().map(|r| r.residual_six_case).filter(|r| r.is_finite()).collect();
    (finite.iter().copied().fold(0.0, f64::max), rows.len() - finite.len())
}

#[test]
fn criterion_2_six_case_identity() {
    let f = CliffordConvention::FROZEN;
    let (frozen, missing) = six_case_max(f.sigma, f.tau);
    let mut ok = frozen <= IDENTITY_TOL && missing == 0;
    let mut full = true;
    let mut detail = format!("frozen max {frozen:.1e};");
    for c in CliffordConvention::candidates() {
        if c == f {
            continue;
        }
        let (r, missing) = six_case_max(c.sigma, c.tau);
        let fails = r >= O1;
        detail += &format!(" ({},{}) max {r:.2} with {missing} unrepresentable cases;", c.sigma, c.tau);
        full &= fails;
        if c.sigma == f.sigma {
            // identity does not involve tau; see ignored test below
            continue;
        }
        ok &= fails;
    }
    verdict(
        2,
        ok && full,
        &format!("{detail} the tau-only alternative cannot fail this identity (ledger)"),
    );
    assert!(ok);
}

/// Full reading of criterion 2. The six-case identity involves only
/// Clifford multiplication and the volume element, so it holds for
/// `(sigma, tau) = (-1, +1)` wherever that convention has a representation.
#[test]
#[ignore = "unattainable: six-case identity is independent of tau; see decisions ledger"]
fn criterion_2_every_other_convention_fails_six_case() {
    let f = CliffordConvention::FROZEN;
    for c in CliffordConvention::candidates().into_iter().filter(|&c| c != f) {
        let (r, _) = six_case_max(c.sigma, c.tau);
        assert!(r >= O1, "({},{}) six-case max residual {r}", c.sigma, c.tau);
    }
}

#[test]
fn criterion_3_holonomy_convergence() {
    let rows: Vec<(String, f64, bool)> = preset_names()
        .par_iter()
        .map(|name| {
            let s = load_preset(name).unwrap();
            let h = holonomy_convergence(&s.frame, &HOLONOMY_SIZES).unwrap();
            (name.to_string(), h.min_order(), h.exact)
        })
        .collect();
    let ok = rows.iter().all(|(_, order, _)| *order >= MIN_ORDER);
    let worst = rows
        .iter()
        .filter(|r| !r.2)
        .map(|r| r.1)
        .fold(f64::INFINITY, f64::min);
    let exact: Vec<&str> = rows.iter().filter(|r| r.2).map(|r| r.0.as_str()).collect();
    verdict(
        3,
        ok,
        &format!("min order {worst:.3} on {HOLONOMY_SIZES:?}; exact (zero defect) on {exact:?}"),
    );
    assert!(ok, "{rows:?}");
}

#[test]
fn criterion_4_roundtrip() {
    let start = Instant::now();
    let rows: Vec<(String, f64, f64, f64)> = preset_names()
        .par_iter()
        .flat_map(|name| {
            let (s, grid) = grid_for(name);
            let truth = s.shape_field();
            branches(&s)
                .into_iter()
                .map(|b| {
                    let data = SpecialKillingData::for_surface(&s, b).unwrap();
                    let t = transport_solve(&data, &grid).unwrap();
                    let dirac = dirac_residual(&t, &data, &DiracCoefficients::ORACLE).unwrap();
                    let trace =
                        extract_shape_operator(&t.field, &s.frame, &s.context, b, &ExtractOptions::default())
                            .unwrap();
                    let err = relative_shape_error(&trace, truth.as_ref(), &grid);
                    (format!("{name}/{b:?}"), dirac.max(trace.dirac_residual), err, trace.trace_law_defect)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let seconds = start.elapsed().as_secs_f64();
    let max = |k: fn(&(String, f64, f64, f64)) -> f64| rows.iter().map(k).fold(0.0, f64::max);
    let (dirac, shape, trace) = (max(|r| r.1), max(|r| r.2), max(|r| r.3));
    let ok = dirac <= DIRAC_TOL && shape <= SHAPE_TOL && trace <= TRACE_TOL && seconds < ROUNDTRIP_SECONDS;
    verdict(
        4,
        ok,
        &format!(
            "{} spinors at {N}x{N}: dirac {dirac:.1e}, relative A {shape:.1e}, trace law {trace:.1e}, {seconds:.1} s",
            rows.len()
        ),
    );
    assert!(ok, "{rows:?}");
}

#[test]
fn criterion_5_gauss_codazzi_and_dirac_display() {
    let rows: Vec<(String, f64, f64, f64, f64, f64, f64)> = preset_names()
        .par_iter()
        .map(|name| {
            let (s, grid) = grid_for(name);
            let truth = s.shape_field();
            let gc = gauss_codazzi_residual(&s.frame, truth.as_ref(), &s.context, &grid).unwrap();
            let data = SpecialKillingData::for_surface(&s, Branch::First).unwrap();
            let t = transport_solve(&data, &grid).unwrap();
            let doubled = dirac_residual(&t, &data, &DiracCoefficients::DOUBLED).unwrap();
            let unit = dirac_residual(&t, &data, &DiracCoefficients::UNIT).unwrap();
            let (uc, vc) = s.patch.domain.center();
            let h = mean_curvature(&truth.at(uc, vc));
            (name.to_string(), gc.g_max, gc.c_max, gc.sign_variant_min, doubled, unit, h)
        })
        .collect();
    let g = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let c = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let sphere_variant = rows.iter().find(|r| r.0 == "round-sphere-R3").unwrap().3;
    let vanishes = |k: fn(&(String, f64, f64, f64, f64, f64, f64)) -> f64| rows.iter().all(|r| k(r) <= DIRAC_TOL);
    let (doubled_ok, unit_ok) = (vanishes(|r| r.4), vanishes(|r| r.5));
    let rejected: fn(&(String, f64, f64, f64, f64, f64, f64)) -> f64 = if unit_ok { |r| r.4 } else { |r| r.5 };
    let rejected_max = rows
        .iter()
        .filter(|r| r.6.abs() > 1e-12)
        .map(rejected)
        .fold(0.0, f64::max);
    let ok = g <= GC_TOL
        && c <= GC_TOL
        && sphere_variant > O1
        && (doubled_ok != unit_ok)
        && rejected_max >= O1;
    verdict(
        5,
        ok,
        &format!(
            "max |G| {g:.1e}, max |C| {c:.1e}; sphere variant {sphere_variant:.2}; selected {}, rejected residual {rejected_max:.2} on H != 0",
            if unit_ok { "a = 1 pair" } else { "a = 2 pair" }
        ),
    );
    assert!(ok, "{rows:?}");
}

#[test]
fn criterion_6_embedding() {
    let rows: Vec<(String, f64, f64)> = preset_names()
        .par_iter()
        .map(|name| {
            let (s, grid) = grid_for(name);
            let built = integrate_frame(
                &s.frame,
                s.shape_field().as_ref(),
                &s.context,
                &grid,
                &IntegrateOptions::default(),
            )
            .unwrap();
            let truth = EmbeddedGrid::from_surface(&s, &grid).unwrap();
            let a = align(&built, &truth).unwrap();
            (name.to_string(), a.distance, built.quadric_defect())
        })
        .collect();
    let d = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let q = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let ok = d <= EMBED_TOL && q <= QUADRIC_TOL;
    verdict(6, ok, &format!("max aligned distance {d:.1e}, max quadric defect {q:.1e} at {N}x{N}"));
    assert!(ok, "{rows:?}");
}

#[test]
fn criterion_7_table_logic() {
    let expected = [
        ("round-sphere-R3", 1, "RSK", None),
        ("hyperbolic-plane-R21", 2, "ISK", Some("orthogonal")),
        ("de-sitter-R21", 2, "RSK", Some("non-degenerate")),
        ("de-sitter-R12", 2, "ISK", None),
        ("hyperbolic-plane-R12", 2, "RSK", None),
        ("round-sphere-R03", 1, "ISK", None),
    ];
    let mut config = RunConfig::new(Command::Roundtrip);
    config.presets = expected.iter().map(|e| e.0.to_string()).collect();
    config.grid = (N, N);
    config.tolerances.set(&format!("pair-margin={PAIR_MARGIN}")).unwrap();
    let out = report::run(&config);
    let mut ok = out.exit == 0;
    let mut pairs = Vec::new();
    for ((name, count, kind, pair), r) in expected.iter().zip(out.json["results"].as_array().unwrap()) {
        ok &= r["preset"]["name"] == *name
            && r["spinors"]["required"] == *count
            && r["spinors"]["transported"] == *count
            && r["spinors"]["kind"] == *kind;
        if let Some(p) = pair {
            let value = if *p == "orthogonal" {
                r["pair"]["max_product"].as_f64().unwrap()
            } else {
                r["pair"]["min_product"].as_f64().unwrap()
            };
            let within = if *p == "orthogonal" { value <= PAIR_MARGIN } else { value >= PAIR_MARGIN };
            ok &= r["pair"]["kind"] == *p && r["pair"]["passed"] == true && within;
            pairs.push(format!("{name} {p} {value:.1e}"));
        }
    }
    verdict(7, ok, &format!("six table entries matched; pair checks: {}", pairs.join(", ")));
    assert!(ok, "{}", out.json);
}

struct Perturbed {
    name: String,
    holonomy: f64,
    gauss: f64,
    rejected: bool,
}

fn perturbed(name: &str) -> Perturbed {
    let (s, grid) = grid_for(name);
    let shape: std::sync::Arc<dyn ShapeField> =
        std::sync::Arc::new(PerturbedShape::new(s.shape_field(), PERTURBATION, s.patch.domain));
    let holonomy = branches(&s)
        .into_iter()
        .map(|b| {
            let data = SpecialKillingData::with_shape(&s, shape.clone(), b).unwrap();
            transport_solve(&data, &grid).unwrap().holonomy_defect
        })
        .fold(f64::INFINITY, f64::min);
    let gauss = gauss_codazzi_residual(&s.frame, shape.as_ref(), &s.context, &grid).unwrap().g_max;
    let rejected = matches!(
        integrate_frame(&s.frame, shape.as_ref(), &s.context, &grid, &IntegrateOptions::default()),
        Err(Error::IntegrabilityViolated { .. })
    );
    Perturbed {
        name: name.to_string(),
        holonomy,
        gauss,
        rejected,
    }
}

#[test]
fn criterion_8_perturbation_detected() {
    let rows: Vec<Perturbed> = preset_names().par_iter().map(|n| perturbed(n)).collect();
    let holonomy = rows.iter().map(|r| r.holonomy).fold(f64::INFINITY, f64::min);
    let curved_gauss = rows
        .iter()
        .filter(|r| r.name != FLAT)
        .map(|r| r.gauss)
        .fold(f64::INFINITY, f64::min);
    let flat_gauss = rows.iter().find(|r| r.name == FLAT).unwrap().gauss;
    let rejected = rows.iter().all(|r| r.rejected);
    let ok = holonomy >= PERTURBED_FLOOR && curved_gauss >= PERTURBED_FLOOR && rejected;
    verdict(
        8,
        ok && flat_gauss >= PERTURBED_FLOOR,
        &format!(
            "min holonomy {holonomy:.1e}, all rejected {rejected}, min |G| {curved_gauss:.1e} on presets with A != 0; \
             {FLAT} |G| {flat_gauss:.1e} < {PERTURBED_FLOOR:.0e} is bounded by delta^2 (ledger)"
        ),
    );
    assert!(ok);
}

/// Full reading of criterion 8 on the totally geodesic plane. With `A = 0`
/// a perturbation of size `delta` moves `det A` by at most `O(delta^2)`.
#[test]
#[ignore = "unattainable: |G| <= delta^2 when the unperturbed A vanishes; see decisions ledger"]
fn criterion_8_flat_plane_gauss_floor() {
    let r = perturbed(FLAT);
    assert!(r.gauss >= PERTURBED_FLOOR, "|G| = {}", r.gauss);
}

#[test]
fn criterion_9_degenerate_spinors_rejected() {
    let s = load_preset("de-sitter-R21").unwrap();
    let grid = Grid::new(s.patch.domain, 16, 16).unwrap();
    let isotropic = Spinor::real(1.0, 0.0);
    let base = SpecialKillingData::new(s.frame.clone(), s.shape_field(), s.context, isotropic, Branch::First);
    let field = GridSpinorField::sample(s.frame.rep.clone(), grid, |_, _| isotropic);
    let beta = beta_tensor(&field, &s.frame, &s.context);
    let iso_ok = matches!(base, Err(Error::IsotropicSpinor { .. })) && matches!(beta, Err(Error::IsotropicSpinor { .. }));

    let s = load_preset("round-sphere-R3").unwrap();
    let grid = Grid::new(s.patch.domain, 16, 16).unwrap();
    let tiny = GridSpinorField::sample(s.frame.rep.clone(), grid, |_, _| Spinor::real(1e-6, 1e-6));
    let zero = GridSpinorField::sample(s.frame.rep.clone(), grid, |_, _| Spinor::ZERO);
    let vanish_ok = matches!(q_tensors(&tiny, &s.frame, &s.context), Err(Error::VanishingHalfSpinor { .. }))
        && matches!(q_tensors(&zero, &s.frame, &s.context), Err(Error::VanishingHalfSpinor { .. }))
        && matches!(
            extract_shape_operator(&zero, &s.frame, &s.context, Branch::First, &ExtractOptions::default()),
            Err(Error::VanishingHalfSpinor { .. })
        );

    let ok = iso_ok && vanish_ok;
    verdict(
        9,
        ok,
        &format!("isotropic (1,1) spinor -> IsotropicSpinor: {iso_ok}; vanishing half-spinor -> VanishingHalfSpinor: {vanish_ok}"),
    );
    assert!(ok);
}
