use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use ptmat::construct::{build_h2, build_h3, check_pt_symmetry, classify2, PhaseLabel, Pt2Params, Pt3Params};
use ptmat::cpt::{NEAR_EXCEPTIONAL_GAP, REAL_SPECTRUM_TOL};
use ptmat::linalg::eigen_decompose;
use ptmat::random::{random_pt2, random_pt3};
use ptmat::SquareMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const MAX_SWEPT: usize = 3;
pub const MAX_POINTS: usize = 10_000_000;

pub const PT2_NAMES: [&str; 6] = ["epsilon", "gamma", "mu", "nu", "theta", "phi"];
pub const PT3_NAMES: [&str; 13] =
    ["epsilon", "gamma1", "gamma2", "gamma3", "gamma4", "mu1", "mu2", "mu3", "mu4", "chi", "theta", "rho", "phi"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Pt2,
    Pt3,
}

impl Family {
    pub fn names(self) -> &'static [&'static str] {
        match self {
            Family::Pt2 => &PT2_NAMES,
            Family::Pt3 => &PT3_NAMES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Sweep {
    fn value(&self, k: usize) -> f64 {
        if self.steps == 1 {
            self.min
        } else {
            self.min + (self.max - self.min) * k as f64 / (self.steps - 1) as f64
        }
    }

    /// Parses `name=min:max:steps`.
    pub fn parse(s: &str) -> Result<Self> {
        let (name, range) = s.split_once('=').with_context(|| format!("sweep {s:?}: expected name=min:max:steps"))?;
        let parts: Vec<&str> = range.split(':').collect();
        ensure!(parts.len() == 3, "sweep {s:?}: expected name=min:max:steps");
        Ok(Sweep {
            name: name.to_string(),
            min: parts[0].parse().with_context(|| format!("sweep {s:?}: min"))?,
            max: parts[1].parse().with_context(|| format!("sweep {s:?}: max"))?,
            steps: parts[2].parse().with_context(|| format!("sweep {s:?}: steps"))?,
        })
    }
}

/// Parses `name=value`.
pub fn parse_assignment(s: &str) -> Result<(String, f64)> {
    let (name, value) = s.split_once('=').with_context(|| format!("{s:?}: expected name=value"))?;
    Ok((name.to_string(), value.parse().with_context(|| format!("{s:?}: value"))?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub family: Family,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    /// The first entry varies slowest in the output.
    #[serde(default)]
    pub swept: Vec<Sweep>,
    #[serde(default = "stdout_path")]
    pub output: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn stdout_path() -> PathBuf {
    PathBuf::from("-")
}

impl ScanConfig {
    pub fn validate(&self) -> Result<usize> {
        let names = self.family.names();
        for name in self.fixed.keys().chain(self.swept.iter().map(|s| &s.name)) {
            ensure!(names.contains(&name.as_str()), "unknown parameter {name:?}; expected one of {}", names.join(", "));
        }
        for (k, s) in self.swept.iter().enumerate() {
            ensure!(s.steps >= 1, "sweep {}: steps must be at least 1", s.name);
            ensure!(s.min.is_finite() && s.max.is_finite(), "sweep {}: non-finite bound", s.name);
            ensure!(!self.fixed.contains_key(&s.name), "{} is both fixed and swept", s.name);
            ensure!(self.swept[..k].iter().all(|o| o.name != s.name), "{} is swept twice", s.name);
        }
        ensure!(self.fixed.values().all(|v| v.is_finite()), "non-finite fixed value");
        ensure!(self.swept.len() <= MAX_SWEPT, "at most {MAX_SWEPT} swept parameters");
        let points = self.swept.iter().try_fold(1usize, |acc, s| acc.checked_mul(s.steps)).unwrap_or(usize::MAX);
        if points > MAX_POINTS {
            bail!("grid has {points} points; the cap is {MAX_POINTS}");
        }
        Ok(points)
    }

    /// Starting values: fixed entries, then a seeded draw for the rest.
    fn base(&self) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let drawn = match self.family {
            Family::Pt2 => {
                let p = random_pt2(&mut rng);
                vec![p.epsilon, p.gamma, p.mu, p.nu, p.theta, p.phi]
            }
            Family::Pt3 => {
                let p = random_pt3(&mut rng, 2.0, 1.0);
                let mut v = vec![p.epsilon];
                v.extend(p.gamma);
                v.extend(p.mu);
                v.extend([p.chi, p.theta, p.rho, p.phi]);
                v
            }
        };
        let names = self.family.names();
        names.iter().zip(drawn).map(|(n, d)| self.fixed.get(*n).copied().unwrap_or(d)).collect()
    }
}

/// Shortest round-trip form, exponent notation for small and large values.
fn num(x: f64) -> String {
    if x.is_finite() {
        serde_json::to_string(&x).expect("finite float")
    } else {
        x.to_string()
    }
}

struct Row {
    values: Vec<f64>,
    discriminant: Option<f64>,
    label: PhaseLabel,
    max_im: f64,
    pt_residual: f64,
}

fn spectrum_label(h: &SquareMatrix) -> (PhaseLabel, f64) {
    let scale = h.frobenius_norm().max(1.0);
    match eigen_decompose(h, 1e-12) {
        Ok(s) => {
            let max_im = s.max_imag();
            let label = if max_im > REAL_SPECTRUM_TOL * scale {
                PhaseLabel::Broken
            } else if s.min_gap() < NEAR_EXCEPTIONAL_GAP * scale {
                PhaseLabel::Exceptional
            } else {
                PhaseLabel::Unbroken
            };
            (label, max_im)
        }
        Err(_) => (PhaseLabel::Exceptional, f64::NAN),
    }
}

fn evaluate(family: Family, values: Vec<f64>, tol: f64) -> Row {
    match family {
        Family::Pt2 => {
            let p = Pt2Params { epsilon: values[0], gamma: values[1], mu: values[2], nu: values[3], theta: values[4], phi: values[5] };
            let h = build_h2(&p);
            let class = classify2(&p, tol);
            let (_, max_im) = spectrum_label(&h);
            let pt_residual = check_pt_symmetry(&h, &p.parity()).unwrap_or(f64::NAN);
            Row { values, discriminant: Some(class.discriminant), label: class.label, max_im, pt_residual }
        }
        Family::Pt3 => {
            let v = &values;
            let p = Pt3Params {
                epsilon: v[0],
                gamma: [v[1], v[2], v[3], v[4]],
                mu: [v[5], v[6], v[7], v[8]],
                chi: v[9],
                theta: v[10],
                rho: v[11],
                phi: v[12],
            };
            let h = build_h3(&p);
            let (label, max_im) = spectrum_label(&h);
            let pt_residual = check_pt_symmetry(&h, &p.parity()).unwrap_or(f64::NAN);
            Row { values, discriminant: None, label, max_im, pt_residual }
        }
    }
}

/// Writes one CSV row per grid point, in grid order.
pub fn run_scan(cfg: &ScanConfig, tol: f64, out: &mut dyn Write) -> Result<usize> {
    let points = cfg.validate()?;
    let names = cfg.family.names();
    let base = cfg.base();
    let index_of = |name: &str| names.iter().position(|n| *n == name).expect("validated name");
    let swept_idx: Vec<usize> = cfg.swept.iter().map(|s| index_of(&s.name)).collect();

    let rows: Vec<Row> = (0..points)
        .into_par_iter()
        .map(|mut k| {
            let mut values = base.clone();
            for (s, &idx) in cfg.swept.iter().zip(&swept_idx).rev() {
                values[idx] = s.value(k % s.steps);
                k /= s.steps;
            }
            evaluate(cfg.family, values, tol)
        })
        .collect();

    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = names.to_vec();
    header.extend(["discriminant", "label", "max_im_eigenvalue", "pt_residual"]);
    w.write_record(&header)?;
    for r in &rows {
        let mut record: Vec<String> = r.values.iter().map(|&x| num(x)).collect();
        record.push(r.discriminant.map(num).unwrap_or_default());
        record.push(r.label.as_str().to_string());
        record.push(num(r.max_im));
        record.push(num(r.pt_residual));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(rows.len())
}
