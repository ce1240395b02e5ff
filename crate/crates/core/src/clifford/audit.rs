//! Executable check of the sign conventions relating surface and ambient
//! Clifford multiplication.
//!
//! For every candidate `(sigma, tau)` and each of the six combinations of
//! surface signature and immersion type, the ambient action is rebuilt from
//! the surface one: the normal acts by `N = c g1 g2` with the root `c` chosen
//! so that the ambient volume element acts as the identity, and tangent
//! vectors act by `X. = (eps N)^-1 X.` so that `X.phi = eps nu. X. phi`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    build_rep, i_pow, identity, max_abs, CliffordConvention, Epsilon, GammaRep, Mat2,
    SignaturePair, Spinor, C64, I,
};
use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 0x5eed_c11f;
pub const DEFAULT_SAMPLES: usize = 128;
pub const PASS_THRESHOLD: f64 = 1e-12;

/// One `(convention, signature, epsilon)` cell of the audit.
#[derive(Debug, Clone, Serialize)]
pub struct AuditRow {
    pub sigma: i8,
    pub tau: i8,
    pub signature: String,
    pub epsilon: Epsilon,
    /// Ambient Clifford relations and `X.phi = eps nu. X. phi`.
    pub residual_identification: f64,
    /// `nu.phi = i^s eps^2 e1.e2.phi`.
    pub residual_normal_chain: f64,
    /// `X.phi = -i X.phi-bar`.
    pub residual_six_case: f64,
    /// Same identity with `+i`, reported but not used for the verdict.
    pub residual_six_case_plus_i: f64,
    /// Pairing adjointness and block structure.
    pub residual_pairing: f64,
    pub passed: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditTable {
    pub seed: u64,
    pub samples: usize,
    pub threshold: f64,
    pub rows: Vec<AuditRow>,
    pub passing: Vec<CliffordConvention>,
    /// Largest residual of the `+i` form under the passing convention(s).
    pub plus_i_discrepancy: f64,
    pub elapsed_ms: f64,
}

impl AuditTable {
    /// The unique passing convention, if exactly one passed.
    pub fn frozen(&self) -> Option<CliffordConvention> {
        match self.passing.as_slice() {
            [c] => Some(*c),
            _ => None,
        }
    }

    pub fn max_residual(&self, conv: CliffordConvention) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.sigma == conv.sigma && r.tau == conv.tau)
            .map(|r| {
                r.residual_identification
                    .max(r.residual_normal_chain)
                    .max(r.residual_six_case)
                    .max(r.residual_pairing)
            })
            .fold(0.0, f64::max)
    }
}

/// The six surface cases: each signature paired with `epsilon = 1` and `epsilon = i`.
pub fn audit_cases() -> Vec<(SignaturePair, Epsilon)> {
    let mut out = Vec::with_capacity(6);
    for eps in [[1i8, 1], [1, -1], [-1, -1]] {
        for e in [Epsilon::Spacelike, Epsilon::Timelike] {
            out.push((SignaturePair::from_signs(&eps).expect("static signs"), e));
        }
    }
    out
}

/// Runs the audit with the default seed and sample count.
pub fn convention_audit() -> Result<AuditTable> {
    convention_audit_with(DEFAULT_SEED, DEFAULT_SAMPLES)
}

/// Runs the audit and fails unless exactly one convention passes.
pub fn convention_audit_with(seed: u64, samples: usize) -> Result<AuditTable> {
    let table = audit_table(seed, samples);
    if table.passing.len() != 1 {
        return Err(Error::AuditInconclusive {
            passing: table.passing.len(),
        });
    }
    Ok(table)
}

/// Evaluates every candidate on every case without judging uniqueness.
pub fn audit_table(seed: u64, samples: usize) -> AuditTable {
    let start = Instant::now();
    let mut rows = Vec::new();
    for conv in CliffordConvention::candidates() {
        for (k, (sig, eps)) in audit_cases().into_iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((k as u64) << 32));
            rows.push(audit_case(conv, &sig, eps, samples, &mut rng));
        }
    }
    let passing: Vec<CliffordConvention> = CliffordConvention::candidates()
        .into_iter()
        .filter(|c| {
            rows.iter()
                .filter(|r| r.sigma == c.sigma && r.tau == c.tau)
                .all(|r| r.passed)
        })
        .collect();
    let plus_i_discrepancy = rows
        .iter()
        .filter(|r| passing.iter().any(|c| c.sigma == r.sigma && c.tau == r.tau))
        .map(|r| r.residual_six_case_plus_i)
        .fold(0.0, f64::max);
    AuditTable {
        seed,
        samples,
        threshold: PASS_THRESHOLD,
        rows,
        passing,
        plus_i_discrepancy,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn random_spinor(rng: &mut ChaCha8Rng) -> Spinor {
    let mut c = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    Spinor::new(c(), c())
}

fn failed_row(
    conv: CliffordConvention,
    sig: &SignaturePair,
    eps: Epsilon,
    note: String,
) -> AuditRow {
    AuditRow {
        sigma: conv.sigma,
        tau: conv.tau,
        signature: sig.to_string(),
        epsilon: eps,
        residual_identification: f64::INFINITY,
        residual_normal_chain: f64::INFINITY,
        residual_six_case: f64::INFINITY,
        residual_six_case_plus_i: f64::INFINITY,
        residual_pairing: f64::INFINITY,
        passed: false,
        note: Some(note),
    }
}

fn audit_case(
    conv: CliffordConvention,
    sig: &SignaturePair,
    eps: Epsilon,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> AuditRow {
    let rep = match build_rep(sig, conv) {
        Ok(r) => r,
        Err(e) => return failed_row(conv, sig, eps, e.to_string()),
    };
    let sigma = conv.sigma as f64;
    let e2 = eps.square();
    let ev = eps.value();
    let mut ambient_signs = sig.eps.clone();
    ambient_signs.push(e2 as i8);
    let ambient_sig = SignaturePair::from_signs(&ambient_signs).expect("valid ambient signs");
    let s = ambient_sig.q as i32;

    let g12 = rep.e1e2();
    // N^2 = sigma eps^2 requires c^2 = -sigma eps^2 eps1 eps2
    let c_sq = -sigma * e2 * sig.eps_product();
    let root = if c_sq > 0.0 {
        C64::from(c_sq.sqrt())
    } else {
        I * (-c_sq).sqrt()
    };
    let ambient_for = |c: C64| {
        let n = g12 * c;
        let en_inv = (n * ev).try_inverse().expect("normal action invertible");
        let x: Vec<Mat2> = rep.gamma.iter().map(|g| en_inv * g).collect();
        let vol = x[0] * x[1] * n * (-i_pow(s));
        (n, x, vol)
    };
    let (n, xb, vol) = {
        let a = ambient_for(root);
        let b = ambient_for(-root);
        if max_abs(&(a.2 - identity())) <= max_abs(&(b.2 - identity())) {
            a
        } else {
            b
        }
    };

    // ambient Clifford relations
    let mut res_a = max_abs(&(vol - identity()));
    let amb: [Mat2; 3] = [xb[0], xb[1], n];
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j {
                identity() * C64::from(2.0 * sigma * ambient_signs[i] as f64)
            } else {
                Mat2::zeros()
            };
            res_a = res_a.max(max_abs(&(amb[i] * amb[j] + amb[j] * amb[i] - target)));
        }
    }
    let mut ambient_note = None;
    if let Err(e) = build_rep(&ambient_sig, conv) {
        res_a = res_a.max(1.0);
        ambient_note = Some(e.to_string());
    }

    let chain = g12 * (i_pow(s) * e2);
    let (mut res_b, mut res_c, mut res_c_lit) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let v: [f64; 2] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let phi = random_spinor(rng);
        let scale = phi.norm() * (v[0] * v[0] + v[1] * v[1]).sqrt();
        let xs = rep.vec_mat(&v);
        let xa = xb[0] * C64::from(v[0]) + xb[1] * C64::from(v[1]);
        // X.phi = eps nu. X. phi
        let ident = (xs * phi - (n * (xa * phi)) * ev).norm() / scale;
        res_a = res_a.max(ident);
        res_b = res_b.max((n * phi - chain * phi).norm() / phi.norm());
        let bar = rep.omega * phi;
        let xa_phi = xa * phi;
        let xs_bar = xs * bar;
        res_c = res_c.max((xa_phi - xs_bar * (-I)).norm() / scale);
        let rel = xs_bar.norm().max(f64::MIN_POSITIVE);
        res_c_lit = res_c_lit.max((xa_phi - xs_bar * I).norm() / rel);
    }
    let res_d = rep.invariant_residual();
    let passed = [res_a, res_b, res_c, res_d]
        .iter()
        .all(|r| r.is_finite() && *r <= PASS_THRESHOLD);
    AuditRow {
        sigma: conv.sigma,
        tau: conv.tau,
        signature: sig.to_string(),
        epsilon: eps,
        residual_identification: res_a,
        residual_normal_chain: res_b,
        residual_six_case: res_c,
        residual_six_case_plus_i: res_c_lit,
        residual_pairing: res_d,
        passed,
        note: ambient_note,
    }
}

/// Frozen-convention surface representation for use by the other modules.
pub fn frozen_surface_rep(eps1: i8, eps2: i8) -> Result<GammaRep> {
    GammaRep::frozen(&SignaturePair::from_signs(&[eps1, eps2])?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn audit_freezes_negative_square() {
        let t = convention_audit().unwrap();
        assert_eq!(t.frozen(), Some(CliffordConvention::FROZEN));
        assert!(t.max_residual(CliffordConvention::FROZEN) < 1e-12);
    }

    #[test]
    fn wrong_sigma_breaks_identification() {
        let t = audit_table(7, 100);
        let row = t
            .rows
            .iter()
            .find(|r| r.sigma == 1 && r.signature == "(1,1)" && r.epsilon == Epsilon::Spacelike)
            .unwrap();
        assert!(!row.passed);
        assert!(row.residual_identification > 0.1);
    }

    #[test]
    fn plus_i_form_is_off_by_sign() {
        let t = audit_table(3, 100);
        assert!((t.plus_i_discrepancy - 2.0).abs() < 1e-12);
    }

    #[test]
    fn audit_is_reproducible() {
        let a = audit_table(11, 100);
        let b = audit_table(11, 100);
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.residual_six_case.to_bits(), y.residual_six_case.to_bits());
        }
    }
}
