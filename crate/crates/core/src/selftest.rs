//! The acceptance suite as a library: eleven numbered criteria, each run on
//! seeded draws and reported with its measured worst case and runtime.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::construct::{
    basis_vectors_3, build_h2, build_h3, build_hn, check_pt_symmetry, fit_pt2, m_matrix2,
    m_matrix3, m_matrix_oracle, search_parity3, split_eigenspaces, SearchOptions,
};
use crate::cpt::{
    beta2, build_c, build_frame, c_closed2, eta2_closed, pt_eigenstates, pt_inner, spectrum2_closed, weight, EtaBranch,
};
use crate::error::Error;
use crate::linalg::{eigen_decompose, inner, SquareMatrix, C64, I};
use crate::parity::{parity2, parity3, parity3_coeffs, parity_generic, Cos2ChiBranch, ParityDescriptor, Sign};
use crate::random::{random_angle, random_pt2, random_pt3, random_unbroken_pt2, random_unitary};
use crate::special::{bbj_case, bmw_case, bmw_pt_eigenstates, hermitian_case, map_mo, map_mostafazadeh};
use crate::sun::BasisSet;

pub const CRITERIA: usize = 11;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SelftestConfig {
    pub seed: u64,
    /// Divide the 10^3 and 10^4 draw counts by ten.
    pub quick: bool,
}

impl SelftestConfig {
    fn draws(&self, full: usize) -> usize {
        if self.quick {
            full / 10
        } else {
            full
        }
    }

    fn rng(&self, id: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(id as u64))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed residual, or the offending value when a check fails.
    pub detail: String,
    pub draws: usize,
    #[serde(serialize_with = "secs")]
    pub elapsed: Duration,
    #[serde(serialize_with = "secs")]
    pub budget: Duration,
}

fn secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {:<28} {:>6} draws  {:>8.3} s (limit {} s)  {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.draws,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub quick: bool,
    pub results: Vec<CriterionResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

/// Outcome of the numeric part of a criterion.
struct Check {
    ok: bool,
    detail: String,
    draws: usize,
}

/// Tracks the largest value seen for a named quantity against its limit.
struct Worst {
    entries: Vec<(&'static str, f64, f64)>,
    failure: Option<String>,
}

impl Worst {
    fn new() -> Self {
        Self { entries: Vec::new(), failure: None }
    }

    fn record(&mut self, name: &'static str, value: f64, limit: f64) {
        let value = if value.is_nan() { f64::INFINITY } else { value };
        match self.entries.iter_mut().find(|e| e.0 == name) {
            Some(e) => e.1 = e.1.max(value),
            None => self.entries.push((name, value, limit)),
        }
    }

    fn fail(&mut self, msg: impl Into<String>) {
        if self.failure.is_none() {
            self.failure = Some(msg.into());
        }
    }

    fn finish(self, draws: usize) -> Check {
        let ok = self.failure.is_none() && self.entries.iter().all(|(_, v, l)| v <= l);
        let mut parts: Vec<String> = self.entries.iter().map(|(n, v, l)| format!("{n}={v:.2e}/{l:.0e}")).collect();
        if let Some(f) = self.failure {
            parts.insert(0, f);
        }
        Check { ok, detail: parts.join(" "), draws }
    }
}

pub fn criterion_name(id: usize) -> &'static str {
    match id {
        1 => "parity validity",
        2 => "m-matrix oracle",
        3 => "three-level eigenbases",
        4 => "two-level spectrum",
        5 => "cpt frame",
        6 => "closed forms",
        7 => "two-level completeness",
        8 => "special cases",
        9 => "parameter counting",
        10 => "planted parity search",
        11 => "n = 4 generalization",
        _ => "unknown",
    }
}

fn budget(id: usize) -> Duration {
    Duration::from_secs(match id {
        1 | 9 => 1,
        5 => 30,
        7 => 10,
        10 => 60,
        _ => 5,
    })
}

/// Runs criterion `id` (1 to 11). Each criterion draws from its own stream,
/// so single criteria reproduce the same draws as a full run.
pub fn run_criterion(id: usize, cfg: &SelftestConfig) -> CriterionResult {
    let start = Instant::now();
    let check = match id {
        1 => parity_validity(cfg),
        2 => m_matrix_equivalence(cfg),
        3 => eigenbases3(cfg),
        4 => spectrum_formula(cfg),
        5 => cpt_frames(cfg),
        6 => closed_forms(cfg),
        7 => completeness2(cfg),
        8 => special_fixtures(),
        9 => parameter_counting(cfg),
        10 => planted_search(cfg),
        11 => generalization4(cfg),
        _ => Check { ok: false, detail: format!("no criterion {id}"), draws: 0 },
    };
    let elapsed = start.elapsed();
    let budget = budget(id);
    let mut detail = check.detail;
    if elapsed > budget {
        detail = format!("over time; {detail}");
    }
    CriterionResult {
        id,
        name: criterion_name(id),
        passed: check.ok && elapsed <= budget,
        detail,
        draws: check.draws,
        elapsed,
        budget,
    }
}

pub fn run_all(cfg: &SelftestConfig) -> SelftestReport {
    run_with(cfg, |_| {})
}

/// Like [`run_all`], calling `on_result` as each criterion finishes.
pub fn run_with(cfg: &SelftestConfig, mut on_result: impl FnMut(&CriterionResult)) -> SelftestReport {
    let results = (1..=CRITERIA)
        .map(|id| {
            let r = run_criterion(id, cfg);
            on_result(&r);
            r
        })
        .collect();
    SelftestReport { seed: cfg.seed, quick: cfg.quick, results }
}

fn parity_residuals(w: &mut Worst, p: &ParityDescriptor) {
    let r = p.residuals();
    w.record("hermiticity", r.hermiticity, 1e-12);
    w.record("involution", r.involution, 1e-12);
}

fn parity_validity(cfg: &SelftestConfig) -> Check {
    let n = cfg.draws(1000);
    let mut rng = cfg.rng(1);
    let mut w = Worst::new();
    let mut branches = [0usize; 2];
    for k in 0..n {
        parity_residuals(&mut w, &parity2(random_angle(&mut rng), random_angle(&mut rng)));
        // every tenth draw sits on a cos 2chi = 0 boundary
        let chi = if k % 10 == 0 { FRAC_PI_4 + FRAC_PI_2 * rng.gen_range(0..4) as f64 } else { random_angle(&mut rng) };
        let sign = if rng.gen() { Sign::Plus } else { Sign::Minus };
        match Cos2ChiBranch::of(chi) {
            Cos2ChiBranch::NonNeg => branches[0] += 1,
            Cos2ChiBranch::Neg => branches[1] += 1,
        }
        let p = parity3(chi, random_angle(&mut rng), random_angle(&mut rng), random_angle(&mut rng), sign);
        parity_residuals(&mut w, &p);
    }
    if branches.contains(&0) {
        w.fail(format!("branch coverage {branches:?}"));
    }
    w.finish(2 * n)
}

fn m_matrix_equivalence(cfg: &SelftestConfig) -> Check {
    let n = cfg.draws(1000);
    let mut rng = cfg.rng(2);
    let mut w = Worst::new();
    let (b2, b3) = (BasisSet::shared(2).unwrap(), BasisSet::shared(3).unwrap());
    for _ in 0..n {
        let p = parity2(random_angle(&mut rng), random_angle(&mut rng));
        let oracle = m_matrix_oracle(&p, b2).unwrap();
        w.record("m2", m_matrix2(&p).unwrap().max_abs_diff(&oracle), 1e-10);
        if oracle.multiplicities(1e-8) != (1, 2) {
            w.fail(format!("n=2 multiplicities {:?}", oracle.multiplicities(1e-8)));
        }

        let angles: [f64; 4] = std::array::from_fn(|_| random_angle(&mut rng));
        let p = parity3(angles[0], angles[1], angles[2], angles[3], Sign::Plus);
        let oracle = m_matrix_oracle(&p, b3).unwrap();
        let closed = m_matrix3(&parity3_coeffs(angles[0], angles[1], angles[2], angles[3]), b3).unwrap();
        w.record("m3", closed.max_abs_diff(&oracle), 1e-10);
        if oracle.multiplicities(1e-8) != (4, 4) {
            w.fail(format!("n=3 multiplicities {:?}", oracle.multiplicities(1e-8)));
        }
    }
    w.finish(2 * n)
}

fn eigenbases3(cfg: &SelftestConfig) -> Check {
    let n = cfg.draws(1000);
    let mut rng = cfg.rng(3);
    let mut w = Worst::new();
    let basis = BasisSet::shared(3).unwrap();
    let mut accepted = 0;
    while accepted < n {
        let chi = random_angle(&mut rng);
        if (2.0 * chi).sin().abs() <= 0.1 {
            continue;
        }
        accepted += 1;
        let (theta, rho, phi) = (random_angle(&mut rng), random_angle(&mut rng), random_angle(&mut rng));
        let m = m_matrix_oracle(&parity3(chi, theta, rho, phi, Sign::Plus), basis).unwrap();
        let vectors = basis_vectors_3(chi, theta, rho, phi);
        for (set, sign, name) in [(&vectors.a, 1.0, "plus"), (&vectors.b, -1.0, "minus")] {
            for v in set {
                let mv = m.apply(v);
                let r = mv.iter().zip(v).map(|(x, y)| (x - sign * y).abs()).fold(0.0, f64::max);
                w.record(name, r, 1e-10);
            }
        }
        w.record("orthonormality", vectors.orthonormality_residual(), 1e-10);
    }
    w.finish(n)
}

fn spectrum_formula(cfg: &SelftestConfig) -> Check {
    let n = cfg.draws(10_000);
    let mut rng = cfg.rng(4);
    let mut w = Worst::new();
    let mut phases = [0usize; 2];
    for _ in 0..n {
        let p = random_pt2(&mut rng);
        let ev = match eigen_decompose(&build_h2(&p), 1e-12) {
            Ok(s) => s.eigenvalues,
            Err(e) => {
                w.fail(format!("eigen_decompose: {e}"));
                continue;
            }
        };
        let d = p.discriminant();
        if d > 0.0 {
            phases[0] += 1;
            let root = d.sqrt();
            let expected = [p.epsilon - root, p.epsilon + root];
            let err = ev.iter().zip(expected).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            w.record("unbroken", err, 1e-10);
        } else if d < 0.0 {
            phases[1] += 1;
            let root = (-d).sqrt();
            let pair = (ev[0] - ev[1].conj()).norm();
            let values = (ev[0] - C64::new(p.epsilon, -root)).norm().max((ev[1] - C64::new(p.epsilon, root)).norm());
            w.record("conjugate_pair", pair.max(values), 1e-10);
        }
    }
    if phases.contains(&0) {
        w.fail(format!("phase coverage {phases:?}"));
    }
    w.finish(n)
}

/// Unbroken three-level draws whose spectrum is separated enough for the
/// frame residuals to be meaningful at 1e-9.
fn well_separated_pt3(rng: &mut ChaCha8Rng) -> (SquareMatrix, ParityDescriptor) {
    loop {
        let p = random_pt3(rng, 2.0, 0.5);
        let h = build_h3(&p);
        let Ok(s) = eigen_decompose(&h, 1e-12) else { continue };
        let scale = h.frobenius_norm().max(1.0);
        if s.max_imag() <= 1e-8 * scale && s.min_gap() >= 1e-2 * scale && s.condition_estimate <= 1e3 {
            return (h, p.parity());
        }
    }
}

fn cpt_frames(cfg: &SelftestConfig) -> Check {
    let n = cfg.draws(1000);
    let mut rng = cfg.rng(5);
    let mut w = Worst::new();
    for dim in [2, 3] {
        for _ in 0..n {
            let (h, parity) = if dim == 2 {
                let p = random_unbroken_pt2(&mut rng, 0.9);
                (build_h2(&p), p.parity())
            } else {
                well_separated_pt3(&mut rng)
            };
            match build_frame(&h, &parity, 1e-10) {
                Ok(frame) => {
                    w.record(if dim == 2 { "max_residual_2" } else { "max_residual_3" }, frame.max_residual(), 1e-9);
                    if frame.w_min_eigenvalue <= 0.0 {
                        w.fail(format!("W not positive definite: {:.3e}", frame.w_min_eigenvalue));
                    }
                }
                Err(e) => w.fail(format!("n={dim}: {e}")),
            }
        }
    }
    w.finish(2 * n)
}

fn phase_aligned_distance(a: &[C64], b: &[C64]) -> f64 {
    let overlap = inner(b, a);
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
    a.iter().zip(b).map(|(x, y)| (x - y * phase).norm_sqr()).sum::<f64>().sqrt()
}

fn closed_forms(cfg: &SelftestConfig) -> Check {
    let n = cfg.draws(1000);
    let mut rng = cfg.rng(6);
    let mut w = Worst::new();
    for _ in 0..n {
        let p = random_unbroken_pt2(&mut rng, 0.9);
        let h = build_h2(&p);
        let parity = p.parity();
        let (c_num, closed, c_cl) = match (build_c(&h, &parity, 1e-10), spectrum2_closed(&p), c_closed2(&p)) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            _ => {
                w.fail("closed form or build_c refused an unbroken draw");
                continue;
            }
        };
        w.record("c", c_cl.distance(&c_num), 1e-12);

        let numeric = pt_eigenstates(&h, &parity, 1e-10).unwrap();
        w.record("state_minus", phase_aligned_distance(&closed.state_minus, &numeric[0].state), 1e-12);
        w.record("state_plus", phase_aligned_distance(&closed.state_plus, &numeric[1].state), 1e-12);

        let g = p.gamma.signum();
        let norm_plus = pt_inner(&closed.state_plus, &closed.state_plus, &parity).unwrap();
        let norm_minus = pt_inner(&closed.state_minus, &closed.state_minus, &parity).unwrap();
        w.record("pt_norm", (norm_plus - g).norm().max((norm_minus + g).norm()), 1e-12);

        let wm = weight(&parity, &c_cl).unwrap();
        for (branch, name) in [(EtaBranch::Plus, "eta_plus"), (EtaBranch::Minus, "eta_minus")] {
            match eta2_closed(&wm, closed.u, branch, 1e-10) {
                Ok(eta) => w.record(name, (&eta * &eta).distance(&wm), 1e-12),
                Err(Error::MinusBranchSingular) => {}
                Err(e) => w.fail(format!("{name}: {e}")),
            }
        }
        let beta_sq: f64 = beta2(&p).unwrap().iter().map(|x| x * x).sum();
        w.record("u_beta", (closed.u * closed.u * (1.0 - beta_sq) - 1.0).abs(), 1e-12);
    }
    w.finish(n)
}

/// `eps + (a + i b) . sigma` with `a . b = 0` and `|b| < |a|`, drawn without
/// reference to the family parametrization.
fn random_real_spectrum2(rng: &mut ChaCha8Rng) -> SquareMatrix {
    let a: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
    let a_norm2: f64 = a.iter().map(|x| x * x).sum();
    let raw: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let along: f64 = raw.iter().zip(&a).map(|(x, y)| x * y).sum::<f64>() / a_norm2;
    let perp: [f64; 3] = std::array::from_fn(|k| raw[k] - along * a[k]);
    let perp_norm = perp.iter().map(|x| x * x).sum::<f64>().sqrt();
    let ratio = rng.gen_range(0.0..0.95) * a_norm2.sqrt();
    let b: [f64; 3] = if perp_norm > 1e-9 { perp.map(|x| x / perp_norm * ratio) } else { [0.0; 3] };
    let eps = rng.gen_range(-2.0..2.0);
    let z: [C64; 3] = std::array::from_fn(|k| C64::new(a[k], b[k]));
    SquareMatrix::from_array([[z[2] + eps, z[0] - I * z[1]], [z[0] + I * z[1], -z[2] + eps]])
}

fn completeness2(cfg: &SelftestConfig) -> Check {
    let n = cfg.draws(10_000);
    let mut rng = cfg.rng(7);
    let mut w = Worst::new();
    for _ in 0..n {
        let h = random_real_spectrum2(&mut rng);
        match fit_pt2(&h, 1e-10) {
            Ok((p, _)) => w.record("roundtrip", build_h2(&p).distance(&h), 1e-8),
            Err(e) => w.fail(format!("fit_pt2: {e}")),
        }
    }
    w.finish(n)
}

fn special_fixtures() -> Check {
    let mut w = Worst::new();
    let c = C64::new;

    // Hermitian member: C = P, W = 1
    let h = hermitian_case(0.5, 1.5, 0.8, -0.3);
    let parity = parity2(0.8, -0.3);
    match build_c(&h, &parity, 1e-10) {
        Ok(cm) => {
            w.record("hermitian_c", cm.distance(&parity.matrix), 1e-10);
            w.record("hermitian_w", weight(&parity, &cm).unwrap().distance(&SquareMatrix::identity(2)), 1e-10);
        }
        Err(e) => w.fail(format!("hermitian: {e}")),
    }

    // BBJ at (0, 5, 3)
    let displayed_h = SquareMatrix::from_array([[c(0.0, -3.0), c(5.0, 0.0)], [c(5.0, 0.0), c(0.0, 3.0)]]);
    let displayed_c = SquareMatrix::from_array([[c(0.0, -0.75), c(1.25, 0.0)], [c(1.25, 0.0), c(0.0, 0.75)]]);
    match bbj_case(0.0, 5.0, 3.0) {
        Ok(case) => {
            w.record("bbj_h", case.h.distance(&displayed_h), 1e-10);
            w.record("bbj_c", case.c.distance(&displayed_c), 1e-10);
            let numeric = build_c(&build_h2(&case.params), &case.params.parity(), 1e-10).unwrap();
            w.record("bbj_c_general", numeric.distance(&displayed_c), 1e-10);
        }
        Err(e) => w.fail(format!("bbj: {e}")),
    }

    // symmetric family at theta = pi/3
    match bmw_case(0.0, 5.0, 3.0, PI / 3.0) {
        Ok(case) => {
            let parity = case.params.parity();
            w.record("bmw_symmetric", case.h.distance(&case.h.transpose()), 1e-10);
            w.record("bmw_h_general", case.h.distance(&build_h2(&case.params)), 1e-10);
            w.record("bmw_c_general", case.c.distance(&build_c(&case.h, &parity, 1e-10).unwrap()), 1e-10);
            for v in bmw_pt_eigenstates(&case, 1e-10).unwrap() {
                let pv = parity.matrix.mul_vec(&v.iter().map(|z| z.conj()).collect::<Vec<_>>());
                let r = pv.iter().zip(&v).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                w.record("bmw_pt_eigenstate", r, 1e-10);
            }
        }
        Err(e) => w.fail(format!("bmw: {e}")),
    }

    match map_mostafazadeh(0.4, 0.7, 1.3, -0.6, 0.9) {
        Ok(rec) => w.record("mostafazadeh_map", rec.residual, 1e-10),
        Err(e) => w.fail(format!("mostafazadeh: {e}")),
    }
    match map_mo(0.2, 1.7, c(0.6, 0.25), c(1.1, -0.3), 1e-10) {
        Ok(rec) => w.record("mo_map", rec.residual, 1e-10),
        Err(e) => w.fail(format!("mo: {e}")),
    }
    if map_mo(0.2, 0.0, c(0.6, 0.25), c(1.1, -0.3), 1e-10) != Err(Error::DegeneratePoint) {
        w.fail("E = 0 not reported as degenerate");
    }
    w.finish(1)
}

/// Rank of a list of real vectors by Gram-Schmidt with a relative floor.
fn rank(vectors: &[Vec<f64>]) -> usize {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let d: f64 = q.iter().zip(&r).map(|(a, b)| a * b).sum();
                r.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
            }
        }
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 * scale.max(1e-300) {
            basis.push(r.into_iter().map(|x| x / norm).collect());
        }
    }
    basis.len()
}

/// Dimension of the parity manifold through `p`: the rank of the tangent
/// vectors `i [lambda_k, P]` expanded in the generator basis.
fn parity_manifold_dim(p: &ParityDescriptor, basis: &BasisSet) -> usize {
    let tangents: Vec<Vec<f64>> = basis
        .generators()
        .iter()
        .map(|l| {
            let t = l.commutator(&p.matrix).scale(I);
            let (_, coeffs) = basis.expand(&t).unwrap();
            coeffs.iter().map(|z| z.re).collect()
        })
        .collect();
    rank(&tangents)
}

fn parameter_counting(cfg: &SelftestConfig) -> Check {
    let mut rng = cfg.rng(9);
    let mut w = Worst::new();
    let mut counts = Vec::new();
    for (n, expected) in [(2usize, 6usize), (3, 13)] {
        let basis = BasisSet::shared(n).unwrap();
        let parity = if n == 2 {
            parity2(random_angle(&mut rng), random_angle(&mut rng))
        } else {
            let chi = FRAC_PI_4 * rng.gen_range(0.2..0.8);
            parity3(chi, random_angle(&mut rng), random_angle(&mut rng), random_angle(&mut rng), Sign::Plus)
        };
        let m = m_matrix_oracle(&parity, basis).unwrap();
        let split = match split_eigenspaces(&m, 1e-8) {
            Ok(s) => s,
            Err(e) => {
                w.fail(format!("n={n}: {e}"));
                continue;
            }
        };
        let total = 1 + split.plus.len() + split.minus.len() + parity_manifold_dim(&parity, basis);
        counts.push(format!("n={n}: 1+{}+{}+{}={total}", split.plus.len(), split.minus.len(), parity_manifold_dim(&parity, basis)));
        if total != expected {
            w.fail(format!("n={n} count {total}, expected {expected}"));
        }
    }
    let mut check = w.finish(2);
    check.detail = format!("{} {}", counts.join(", "), check.detail).trim().to_string();
    check
}

fn planted_search(cfg: &SelftestConfig) -> Check {
    let mut rng = cfg.rng(10);
    let mut w = Worst::new();
    let instances = 50;
    for _ in 0..instances {
        let h = build_h3(&random_pt3(&mut rng, 2.0, 1.0));
        let opts = SearchOptions { restarts: 50, seed: rng.gen(), ..Default::default() };
        match search_parity3(&h, opts) {
            Ok(r) => w.record("residual", r.residual, 1e-8),
            Err(e) => w.fail(format!("search: {e}")),
        }
    }
    w.finish(instances)
}

fn generalization4(cfg: &SelftestConfig) -> Check {
    let mut rng = cfg.rng(11);
    let mut w = Worst::new();
    let basis = BasisSet::shared(4).unwrap();
    let signatures: [[i8; 4]; 3] = [[1, 1, -1, -1], [1, 1, 1, -1], [1, -1, -1, -1]];
    let draws = 100;
    for k in 0..draws {
        let parity = match parity_generic(&random_unitary(&mut rng, 4), &signatures[k % 3], 1e-10) {
            Ok(p) => p,
            Err(e) => {
                w.fail(format!("parity_generic: {e}"));
                continue;
            }
        };
        let m = m_matrix_oracle(&parity, basis).unwrap();
        w.record("m_symmetry", m.symmetry_residual(), 1e-10);
        w.record("m_involution", m.involution_residual(), 1e-10);
        let split = match split_eigenspaces(&m, 1e-8) {
            Ok(s) => s,
            Err(e) => {
                w.fail(format!("split: {e}"));
                continue;
            }
        };
        let combine = |space: &[Vec<f64>], rng: &mut ChaCha8Rng| {
            let mut v = vec![0.0; basis.len()];
            for q in space {
                let c: f64 = rng.gen_range(-1.0..1.0);
                v.iter_mut().zip(q).for_each(|(x, y)| *x += c * y);
            }
            v
        };
        let a = combine(&split.plus, &mut rng);
        let b = combine(&split.minus, &mut rng);
        match build_hn(rng.gen_range(-1.0..1.0), &a, &b, &parity, basis, 1e-10) {
            Ok(h) => w.record("pt_residual", check_pt_symmetry(&h, &parity).unwrap(), 1e-10),
            Err(e) => w.fail(format!("build_hn: {e}")),
        }
    }
    w.finish(draws)
}
