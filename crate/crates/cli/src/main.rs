mod io;
mod scan;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ptmat::construct::{
    build_h2, check_pt_symmetry, classify2, fit_pt2, search_parity3, PhaseLabel, Pt2Params, Pt3Params,
    PtFamilyParams, SearchOptions,
};
use ptmat::cpt::{build_c, build_frame, weight, NEAR_EXCEPTIONAL_GAP, REAL_SPECTRUM_TOL};
use ptmat::linalg::eigen_decompose;
use ptmat::parity::{parity2, parity3, parity_trivial, Sign};
use ptmat::selftest::{run_with, SelftestConfig};
use ptmat::special::{bbj_case, bmw_case, hermitian_case, map_mo, map_mostafazadeh, ParameterMapRecord};
use ptmat::sun::BasisSet;
use ptmat::{SquareMatrix, C64};
use serde::Serialize;
use serde_json::json;

use crate::io::{open_output, read_input, read_matrix, read_parity, write_json};
use crate::scan::{parse_assignment, run_scan, Family, ScanConfig, Sweep};

const SCAN_HELP: &str = "\
CSV columns, in order:
  pt2: epsilon,gamma,mu,nu,theta,phi,discriminant,label,max_im_eigenvalue,pt_residual
  pt3: epsilon,gamma1..gamma4,mu1..mu4,chi,theta,rho,phi,discriminant,label,max_im_eigenvalue,pt_residual
discriminant is gamma^2 - mu^2 - nu^2 for pt2 and empty for pt3. label is
unbroken, broken or exceptional. Parameters neither fixed nor swept are drawn
once from the seed. Rows follow grid order, the first sweep varying slowest.";

#[derive(Parser)]
#[command(name = "ptmat", version, about = "PT-symmetric matrix Hamiltonians: build, verify, fit, scan")]
struct Cli {
    /// Numerical tolerance.
    #[arg(long, global = true, env = "PTMAT_TOL", default_value_t = ptmat::DEFAULT_TOL)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a parity operator and its Hermiticity and involution residuals.
    Parity(ParityArgs),
    /// Build a family Hamiltonian and report its phase and eigenvalues.
    Build(BuildArgs),
    /// Check P H^dagger P = H for a Hamiltonian and parity.
    Verify(VerifyArgs),
    /// C operator, CPT weight and Hermitian equivalent.
    #[command(subcommand)]
    Cpt(CptCommand),
    /// Named special cases and parameter maps from other parametrizations.
    Reduce(ReduceArgs),
    /// Recover two-level family parameters from a 2x2 matrix.
    Fit(FitArgs),
    /// Search for a three-level parity making a 3x3 matrix PT-symmetric.
    Search(SearchArgs),
    /// Sweep family parameters over a grid and write CSV.
    #[command(after_help = SCAN_HELP)]
    Scan(ScanArgs),
    /// Run the acceptance criteria.
    Selftest(SelftestArgs),
    /// Dump nonzero structure constants of the generalized Gell-Mann basis as CSV (i,j,k,d,f).
    Basis(BasisArgs),
}

#[derive(Args)]
struct ParityArgs {
    #[arg(long)]
    n: usize,
    /// Print the trivial parity `sign * 1`.
    #[arg(long)]
    trivial: bool,
    #[arg(long, allow_hyphen_values = true)]
    chi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    /// Overall sign, 1 or -1 (three-level and trivial parities).
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    sign: i8,
    #[arg(long, short, default_value = "-")]
    output: PathBuf,
}

#[derive(Args)]
struct BuildArgs {
    /// Parameter file (`{"family": "pt2" | "pt3", ...}`); overrides the flags.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<Family>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    epsilon: f64,
    /// One value for pt2, four comma-separated values for pt3.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gamma: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    nu: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    chi: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    rho: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi: f64,
    #[arg(long, short, default_value = "-")]
    output: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Hamiltonian matrix JSON, or `-` for stdin.
    #[arg(long)]
    hamiltonian: PathBuf,
    /// Parity JSON: a tagged description or a bare matrix.
    #[arg(long)]
    parity: PathBuf,
    #[arg(long, short, default_value = "-")]
    output: PathBuf,
}

#[derive(Subcommand)]
enum CptCommand {
    /// Build the frame {C, W, eta, h, residuals}.
    Build(CptBuildArgs),
}

#[derive(Args)]
struct CptBuildArgs {
    #[arg(long)]
    hamiltonian: PathBuf,
    #[arg(long)]
    parity: PathBuf,
    /// Limit on every frame residual for exit status 0.
    #[arg(long, default_value_t = 1e-9)]
    check_tol: f64,
    #[arg(long, short, default_value = "-")]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Case {
    Hermitian,
    Bbj,
    Bmw,
    Mostafazadeh,
    Mo,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long, value_enum)]
    case: Case,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Azimuth (hermitian) or the external angle (mostafazadeh).
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    u: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<f64>,
    /// Energy scale of the six-parameter form.
    #[arg(long = "energy", allow_hyphen_values = true)]
    energy: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    big_theta_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    big_theta_im: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    big_phi_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    big_phi_im: f64,
    #[arg(long, short, default_value = "-")]
    output: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    /// 2x2 matrix JSON, or `-` for stdin.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, short, default_value = "-")]
    output: PathBuf,
}

#[derive(Args)]
struct SearchArgs {
    /// 3x3 matrix JSON, or `-` for stdin.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 400)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Residual at or below which the result is certified.
    #[arg(long, default_value_t = 1e-8)]
    certify_tol: f64,
    #[arg(long, short, default_value = "-")]
    output: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    /// JSON scan configuration; flags are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<Family>,
    /// `name=value`, repeatable.
    #[arg(long = "fix", allow_hyphen_values = true)]
    fix: Vec<String>,
    /// `name=min:max:steps`, repeatable, at most three.
    #[arg(long = "sweep", allow_hyphen_values = true)]
    sweep: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// 10^2 draws instead of 10^3 (and 10^3 instead of 10^4).
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the full report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct BasisArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, short, default_value = "-")]
    output: PathBuf,
}

/// A check ran and did not pass; exits with status 3.
#[derive(Debug)]
struct VerificationFailed(String);

impl fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn failed(e: impl fmt::Display) -> anyhow::Error {
    VerificationFailed(e.to_string()).into()
}

fn sign_of(v: i8) -> Result<Sign> {
    Sign::try_from(v).map_err(|_| anyhow::anyhow!("--sign must be 1 or -1"))
}

fn required(name: &str, v: Option<f64>) -> Result<f64> {
    v.with_context(|| format!("--{name} is required for this case"))
}

#[derive(Serialize)]
struct ParityOutput<'a> {
    matrix: &'a SquareMatrix,
    hermiticity: f64,
    involution: f64,
}

fn cmd_parity(a: &ParityArgs, tol: f64) -> Result<ExitCode> {
    let sign = sign_of(a.sign)?;
    let descriptor = if a.trivial {
        if a.n == 0 {
            bail!("--n must be positive");
        }
        parity_trivial(a.n, sign)
    } else {
        match a.n {
            2 => {
                if a.sign != 1 {
                    bail!("the two-level parity has no sign flag");
                }
                parity2(required("theta", a.theta)?, required("phi", a.phi)?)
            }
            3 => parity3(
                required("chi", a.chi)?,
                required("theta", a.theta)?,
                required("rho", a.rho)?,
                required("phi", a.phi)?,
                sign,
            ),
            n => bail!("angle parametrizations exist for n = 2 and 3, not {n}; use --trivial"),
        }
    };
    let r = descriptor.residuals();
    write_json(&a.output, &ParityOutput { matrix: &descriptor.matrix, hermiticity: r.hermiticity, involution: r.involution })?;
    if r.max() > tol {
        return Err(failed(format!("parity residual {:.3e} exceeds {tol:e}", r.max())));
    }
    Ok(ExitCode::SUCCESS)
}

fn eigen_pairs(h: &SquareMatrix) -> Result<(Vec<[f64; 2]>, f64, f64)> {
    let s = eigen_decompose(h, 1e-12)?;
    Ok((s.eigenvalues.iter().map(|e| [e.re, e.im]).collect(), s.max_imag(), s.min_gap()))
}

fn cmd_build(a: &BuildArgs, tol: f64) -> Result<ExitCode> {
    let params = match &a.params {
        Some(path) => serde_json::from_str::<PtFamilyParams>(&read_input(path)?).context("parameter file")?,
        None => match a.family.context("--family or --params is required")? {
            Family::Pt2 => {
                let one = |v: &[f64], name: &str| -> Result<f64> {
                    match v {
                        [] => Ok(0.0),
                        [x] => Ok(*x),
                        _ => bail!("--{name} takes one value for pt2"),
                    }
                };
                PtFamilyParams::Pt2(Pt2Params {
                    epsilon: a.epsilon,
                    gamma: one(&a.gamma, "gamma")?,
                    mu: one(&a.mu, "mu")?,
                    nu: a.nu,
                    theta: a.theta,
                    phi: a.phi,
                })
            }
            Family::Pt3 => {
                let four = |v: &[f64], name: &str| -> Result<[f64; 4]> {
                    match v.len() {
                        0 => Ok([0.0; 4]),
                        4 => Ok([v[0], v[1], v[2], v[3]]),
                        _ => bail!("--{name} takes four comma-separated values for pt3"),
                    }
                };
                PtFamilyParams::Pt3(Pt3Params {
                    epsilon: a.epsilon,
                    gamma: four(&a.gamma, "gamma")?,
                    mu: four(&a.mu, "mu")?,
                    chi: a.chi,
                    theta: a.theta,
                    rho: a.rho,
                    phi: a.phi,
                })
            }
        },
    };
    let h = params.build();
    if !h.is_finite() {
        bail!("parameters produce a non-finite matrix");
    }
    let (eigenvalues, max_im, gap) = eigen_pairs(&h)?;
    let (phase, discriminant) = match &params {
        PtFamilyParams::Pt2(p) => {
            let c = classify2(p, tol);
            (c.label, Some(c.discriminant))
        }
        PtFamilyParams::Pt3(_) => {
            let scale = h.frobenius_norm().max(1.0);
            let label = if max_im > REAL_SPECTRUM_TOL * scale {
                PhaseLabel::Broken
            } else if gap < NEAR_EXCEPTIONAL_GAP * scale {
                PhaseLabel::Exceptional
            } else {
                PhaseLabel::Unbroken
            };
            (label, None)
        }
    };
    write_json(
        &a.output,
        &json!({
            "params": params,
            "H": h,
            "parity": params.parity().matrix,
            "phase": phase,
            "discriminant": discriminant,
            "eigenvalues": eigenvalues,
        }),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: &VerifyArgs, tol: f64) -> Result<ExitCode> {
    let h = read_matrix(&a.hamiltonian)?;
    let parity = read_parity(&a.parity, tol)?;
    let residual = check_pt_symmetry(&h, &parity)?;
    let ok = residual <= tol;
    write_json(&a.output, &json!({ "pt_residual": residual, "tol": tol, "pt_symmetric": ok }))?;
    if !ok {
        return Err(failed(format!("PT residual {residual:.3e} exceeds {tol:e}")));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_cpt_build(a: &CptBuildArgs, tol: f64) -> Result<ExitCode> {
    let h = read_matrix(&a.hamiltonian)?;
    let parity = read_parity(&a.parity, tol)?;
    let frame = build_frame(&h, &parity, tol).map_err(failed)?;
    write_json(
        &a.output,
        &json!({
            "C": frame.c,
            "W": frame.w,
            "eta": frame.eta,
            "eta_plus": frame.eta_plus,
            "eta_minus": frame.eta_minus,
            "h": frame.h,
            "energies": frame.energies,
            "pt_norms": frame.pt_norms,
            "w_min_eigenvalue": frame.w_min_eigenvalue,
            "residuals": frame.residuals,
            "max_residual": frame.max_residual(),
        }),
    )?;
    if !frame.passes(a.check_tol) {
        return Err(failed(format!("frame residual {:.3e} exceeds {:e}", frame.max_residual(), a.check_tol)));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ReduceOutput {
    case: &'static str,
    #[serde(rename = "H")]
    h: SquareMatrix,
    #[serde(rename = "C")]
    c: Option<SquareMatrix>,
    mapped_params: Pt2Params,
    #[serde(skip_serializing_if = "Option::is_none")]
    source_params: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    caveats: Vec<String>,
    residuals: BTreeMap<&'static str, f64>,
}

fn general_residuals(h: &SquareMatrix, c: Option<&SquareMatrix>, p: &Pt2Params, tol: f64) -> BTreeMap<&'static str, f64> {
    let mut r = BTreeMap::new();
    let parity = p.parity();
    r.insert("h_vs_family", h.distance(&build_h2(p)));
    r.insert("pt", check_pt_symmetry(h, &parity).unwrap_or(f64::NAN));
    if let (Some(c), Ok(general)) = (c, build_c(h, &parity, tol)) {
        r.insert("c_vs_general", c.distance(&general));
        if let Ok(w) = weight(&parity, c) {
            r.insert("w_hermiticity", w.distance(&w.dagger()));
        }
    }
    r
}

fn from_record(case: &'static str, rec: ParameterMapRecord, tol: f64) -> ReduceOutput {
    let c = build_c(&rec.external, &rec.target.parity(), tol).ok();
    let mut residuals = general_residuals(&rec.external, None, &rec.target, tol);
    residuals.insert("map", rec.residual);
    ReduceOutput {
        case,
        h: rec.external,
        c,
        mapped_params: rec.target,
        source_params: Some(rec.source_params),
        caveats: rec.caveats,
        residuals,
    }
}

fn cmd_reduce(a: &ReduceArgs, tol: f64) -> Result<ExitCode> {
    let out = match a.case {
        Case::Hermitian => {
            let (eps, g, th, ph) =
                (required("epsilon", a.epsilon)?, required("gamma", a.gamma)?, required("theta", a.theta)?, required("phi", a.phi)?);
            let h = hermitian_case(eps, g, th, ph);
            let p = Pt2Params { epsilon: eps, gamma: g, mu: 0.0, nu: 0.0, theta: th, phi: ph };
            // C = P for every Hermitian member
            let c = p.parity().matrix;
            let residuals = general_residuals(&h, Some(&c), &p, tol);
            ReduceOutput { case: "hermitian", h, c: Some(c), mapped_params: p, source_params: None, caveats: vec![], residuals }
        }
        Case::Bbj | Case::Bmw => {
            let (eps, g, mu) = (required("epsilon", a.epsilon)?, required("gamma", a.gamma)?, required("mu", a.mu)?);
            let (name, case) = match a.case {
                Case::Bbj => ("bbj", bbj_case(eps, g, mu)),
                _ => ("bmw", bmw_case(eps, g, mu, required("theta", a.theta)?)),
            };
            let case = case.map_err(failed)?;
            let residuals = general_residuals(&case.h, Some(&case.c), &case.params, tol);
            ReduceOutput { case: name, h: case.h, c: Some(case.c), mapped_params: case.params, source_params: None, caveats: vec![], residuals }
        }
        Case::Mostafazadeh => {
            let rec = map_mostafazadeh(
                required("r", a.r)?,
                required("s", a.s)?,
                required("t", a.t)?,
                required("u", a.u)?,
                required("phi", a.phi)?,
            )
            .map_err(failed)?;
            from_record("mostafazadeh", rec, tol)
        }
        Case::Mo => {
            let rec = map_mo(
                required("q", a.q)?,
                required("energy", a.energy)?,
                C64::new(a.big_theta_re, a.big_theta_im),
                C64::new(a.big_phi_re, a.big_phi_im),
                tol,
            )
            .map_err(failed)?;
            from_record("mo", rec, tol)
        }
    };
    write_json(&a.output, &out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_fit(a: &FitArgs, tol: f64) -> Result<ExitCode> {
    let h = read_matrix(&a.input)?;
    let (params, parity) = fit_pt2(&h, tol).map_err(failed)?;
    let roundtrip = build_h2(&params).distance(&h);
    write_json(&a.output, &json!({ "params": params, "parity": parity.matrix, "roundtrip_residual": roundtrip }))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_search(a: &SearchArgs) -> Result<ExitCode> {
    let h = read_matrix(&a.input)?;
    let opts = SearchOptions { restarts: a.restarts, iterations_per_start: a.iterations, seed: a.seed, tol: a.certify_tol };
    let r = search_parity3(&h, opts)?;
    write_json(
        &a.output,
        &json!({
            "parity": r.parity.spec(),
            "matrix": r.parity.matrix,
            "residual": r.residual,
            "certified": r.certified,
            "restart": r.restart,
        }),
    )?;
    if !r.certified {
        return Err(failed(format!("best residual {:.3e} above {:e}; not certified", r.residual, a.certify_tol)));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_scan(a: &ScanArgs, tol: f64) -> Result<ExitCode> {
    let cfg = match &a.config {
        Some(path) => {
            let mut cfg: ScanConfig = serde_json::from_str(&read_input(path)?).context("scan configuration")?;
            if let Some(out) = &a.output {
                cfg.output = out.clone();
            }
            cfg
        }
        None => ScanConfig {
            family: a.family.context("--family or --config is required")?,
            fixed: a.fix.iter().map(|s| parse_assignment(s)).collect::<Result<_>>()?,
            swept: a.sweep.iter().map(|s| Sweep::parse(s)).collect::<Result<_>>()?,
            output: a.output.clone().unwrap_or_else(|| PathBuf::from("-")),
            seed: a.seed,
        },
    };
    cfg.validate()?;
    let mut out = open_output(&cfg.output)?;
    run_scan(&cfg, tol, &mut out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_selftest(a: &SelftestArgs) -> Result<ExitCode> {
    let cfg = SelftestConfig { seed: a.seed, quick: a.quick };
    let report = run_with(&cfg, |r| println!("{r}"));
    let failures = report.results.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed", report.results.len() - failures, report.results.len());
    if let Some(path) = &a.json {
        write_json(path, &report)?;
    }
    Ok(if failures == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_basis(a: &BasisArgs) -> Result<ExitCode> {
    let basis = BasisSet::new(a.n)?;
    let mut out = open_output(&a.output)?;
    basis.write_structure_csv(&mut out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        bail!("tolerance must be a positive finite number");
    }
    let tol = cli.tol;
    match &cli.command {
        Command::Parity(a) => cmd_parity(a, tol),
        Command::Build(a) => cmd_build(a, tol),
        Command::Verify(a) => cmd_verify(a, tol),
        Command::Cpt(CptCommand::Build(a)) => cmd_cpt_build(a, tol),
        Command::Reduce(a) => cmd_reduce(a, tol),
        Command::Fit(a) => cmd_fit(a, tol),
        Command::Search(a) => cmd_search(a),
        Command::Scan(a) => cmd_scan(a, tol),
        Command::Selftest(a) => cmd_selftest(a),
        Command::Basis(a) => cmd_basis(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            let closed_pipe = e
                .chain()
                .filter_map(|c| c.downcast_ref::<std::io::Error>())
                .any(|io| io.kind() == std::io::ErrorKind::BrokenPipe);
            if closed_pipe {
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {e:#}");
            if e.downcast_ref::<VerificationFailed>().is_some() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
