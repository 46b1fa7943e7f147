use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use xprlab_bignum::BigReal;
use xprlab_certify::{det_certificate, entropy_bound, exp_poly_certificate, hankel_certificate, vdw_composite_certificate, Certificate, SubCertifier};
use xprlab_families::{random, sample, sample_complex, FamilyParams, SampleGrid, Sigma};
use xprlab_fitlab::{fit_family, FamilySpec, FitInstance, Verdict};
use xprlab_kronecker::{fit_single_sine_with, solve_orbit_with, DiophantineInstance, KroneckerError, OrbitOptions};
use xprlab_limits::{polynomial_combo, recover_coefficients, resonance_combo, sigma_limit_path, sup_distance, LimitKind, RecoveryInstance, Root};
use xprlab_netlab::{
    branch_coloring, branched_certificate, build_universal_sin_arcsin, eval_network, validate_single_transcendental, BranchedNetwork,
    LayerCheck, NetworkGraph, FIG1_NODES, FIG1_PARAMS,
};

use crate::{emit_plot_data, suite, CliError, ExperimentConfig};

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "xprlab", version, about = "Expressivity experiments for sine-based function families")]
pub(crate) struct Cli {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Working precision in bits.
    #[arg(long, global = true, env = "XPRLAB_BITS")]
    pub bits: Option<u32>,
    /// JSON file of flags, expanded before parsing.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Also write the result JSON here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub(crate) enum Command {
    /// Frequency ω with c·sin(ω x_k) ≈ y_k, or ω·x_k ≈ θ_k mod 2π with --phases.
    Kronecker(KroneckerArgs),
    /// Polynomial-identity certificates on sample grids
    #[command(subcommand)]
    Certify(CertifyCmd),
    /// Limit constructions, coefficient recovery and derivative bounds
    #[command(subcommand)]
    Limits(LimitsCmd),
    /// Network evaluation, validation and branch colorings
    #[command(subcommand)]
    Net(NetCmd),
    /// Multi-start least-squares fit of a family to CSV data.
    Fit(FitArgs),
    /// Largest N with N·log2(M/ε) ≤ p·B.
    Bound(BoundArgs),
    /// The acceptance battery.
    Suite(SuiteArgs),
}

impl Command {
    pub fn path(&self) -> Vec<String> {
        let (a, b) = match self {
            Command::Kronecker(_) => ("kronecker", None),
            Command::Certify(c) => ("certify", Some(match c {
                CertifyCmd::Det(_) => "det",
                CertifyCmd::Exppoly(_) => "exppoly",
                CertifyCmd::Vdw(_) => "vdw",
            })),
            Command::Limits(c) => ("limits", Some(match c {
                LimitsCmd::Resonance(_) => "resonance",
                LimitsCmd::Polycombo(_) => "polycombo",
                LimitsCmd::Recover(_) => "recover",
                LimitsCmd::Sigmapath(_) => "sigmapath",
            })),
            Command::Net(c) => ("net", Some(match c {
                NetCmd::Eval(_) => "eval",
                NetCmd::Validate(_) => "validate",
                NetCmd::Color(_) => "color",
                NetCmd::Fig1(_) => "fig1",
            })),
            Command::Fit(_) => ("fit", None),
            Command::Bound(_) => ("bound", None),
            Command::Suite(_) => ("suite", None),
        };
        std::iter::once(a).chain(b).map(String::from).collect()
    }
}

#[derive(Debug, Args)]
pub(crate) struct KroneckerArgs {
    /// Points x_k (comma list or JSON array).
    #[arg(long)]
    points: String,
    /// Targets y_k, or phases θ_k with --phases.
    #[arg(long)]
    targets: String,
    #[arg(long)]
    eps: String,
    /// Frequency budget Ω_max.
    #[arg(long)]
    budget: Option<String>,
    /// Treat the targets as phases.
    #[arg(long)]
    phases: bool,
}

#[derive(Debug, Subcommand)]
pub(crate) enum CertifyCmd {
    /// Determinant of translates, singular for every sum of N sine waves.
    Det(DetArgs),
    /// Exponential identity of level d.
    Exppoly(ExpPolyArgs),
    /// Branch-colored van der Waerden composite.
    Vdw(VdwArgs),
}

#[derive(Debug, Args)]
pub(crate) struct DetArgs {
    /// Family member as JSON (inline or a file path).
    #[arg(long)]
    family: String,
    #[arg(long, default_value = "0")]
    x0: String,
    #[arg(long, requires = "betas")]
    alphas: Option<String>,
    #[arg(long, requires = "alphas")]
    betas: Option<String>,
    /// Progression `a,h,m` for the Hankel form.
    #[arg(long, conflicts_with = "alphas")]
    grid: Option<String>,
    /// Number of waves; read from the family when omitted.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    tol: Option<String>,
}

#[derive(Debug, Args)]
pub(crate) struct ExpPolyArgs {
    #[arg(long)]
    family: String,
    /// `a,h,m`
    #[arg(long)]
    grid: String,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    tol: Option<String>,
}

#[derive(Debug, Args)]
pub(crate) struct VdwArgs {
    /// Network JSON; points are colored by branch.
    #[arg(long, required_unless_present = "family", conflicts_with = "family")]
    net: Option<String>,
    /// Family member JSON; a single color.
    #[arg(long)]
    family: Option<String>,
    /// `a,b`
    #[arg(long, default_value = "0,1")]
    interval: String,
    /// `det:N` or `exppoly:d`
    #[arg(long)]
    sub: String,
    /// Sub-progression length; defaults to what the certifier needs.
    #[arg(long)]
    s: Option<usize>,
    /// Number of colors; defaults to 2^(piecewise neurons).
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    tol: Option<String>,
}

#[derive(Debug, Subcommand)]
pub(crate) enum LimitsCmd {
    /// m+1 waves converging to x^m·sin(ωx + h).
    Resonance(ResonanceArgs),
    /// M₀ waves converging to a polynomial.
    Polycombo(PolyComboArgs),
    /// Coefficients of an exponential sum with known roots.
    Recover(RecoverArgs),
    /// Members of c·sin(ω·σ(bx) + h) approaching a limit.
    Sigmapath(SigmaPathArgs),
}

#[derive(Debug, Args)]
pub(crate) struct ResonanceArgs {
    #[arg(long)]
    omega: String,
    #[arg(long)]
    h: String,
    #[arg(long)]
    m: u32,
    /// One or more Δω.
    #[arg(long)]
    dw: String,
    /// Grid points for the sup error on [0, 1].
    #[arg(long, default_value_t = 2000)]
    points: usize,
    /// CSV of (Δω, sup_error).
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub(crate) struct PolyComboArgs {
    #[arg(long)]
    m0: usize,
    /// Coefficients in increasing degree.
    #[arg(long)]
    coef: String,
    #[arg(long)]
    dw: String,
    #[arg(long, default_value_t = 2000)]
    points: usize,
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub(crate) struct RecoverArgs {
    /// CSV of equally spaced (x, u) samples.
    #[arg(long)]
    samples: PathBuf,
    /// JSON list of {"z": {"re", "im"}, "multiplicity"}.
    #[arg(long)]
    roots: String,
}

#[derive(Debug, Args)]
pub(crate) struct SigmaPathArgs {
    /// `sigmoid`, `tanh`, `gaussian`, `sin` or JSON.
    #[arg(long)]
    sigma: String,
    /// Limit JSON, e.g. {"kind":"monomial","a0":0,"ar":1,"r":1}.
    #[arg(long)]
    kind: String,
    /// Path parameters in (0, 1].
    #[arg(long)]
    t: String,
    #[arg(long, default_value_t = 1000)]
    points: usize,
}

#[derive(Debug, Subcommand)]
pub(crate) enum NetCmd {
    /// Output and branch trace at points.
    Eval(NetPointsArgs),
    /// At most one transcendental neuron on every path.
    Validate(NetArgs),
    /// Branch colors on a grid.
    Color(NetGridArgs),
    /// The 4-block sin/arcsin universal graph.
    Fig1(Fig1Args),
}

#[derive(Debug, Args)]
pub(crate) struct NetArgs {
    #[arg(long)]
    net: String,
}

#[derive(Debug, Args)]
pub(crate) struct NetPointsArgs {
    #[arg(long)]
    net: String,
    #[arg(long, required_unless_present = "grid", conflicts_with = "grid")]
    x: Option<String>,
    /// `a,h,m`
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Debug, Args)]
pub(crate) struct NetGridArgs {
    #[arg(long)]
    net: String,
    /// `a,h,m`
    #[arg(long)]
    grid: String,
}

#[derive(Debug, Args)]
pub(crate) struct Fig1Args {
    /// 69 weights; drawn from the seed in [-0.5, 0.5] when omitted.
    #[arg(long)]
    weights: Option<String>,
    #[arg(long, default_value = "0.25,0.5,0.75")]
    x: String,
}

#[derive(Debug, Args)]
pub(crate) struct FitArgs {
    /// e.g. {"family":"H2","n":1} or {"family":"Hsigma","sigma":"sigmoid"}.
    #[arg(long)]
    family: String,
    /// CSV of (x, y).
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    eps: String,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 300)]
    max_iter: usize,
}

#[derive(Debug, Args)]
pub(crate) struct BoundArgs {
    /// Parameter count.
    #[arg(long)]
    p: u64,
    /// Bits per parameter.
    #[arg(long = "B")]
    b: u64,
    /// Amplitude bound.
    #[arg(long = "M", default_value = "1")]
    m: String,
    #[arg(long)]
    eps: String,
}

#[derive(Debug, Args)]
pub(crate) struct SuiteArgs {
    /// Criteria to run (comma list); all by default.
    #[arg(long, value_delimiter = ',')]
    only: Vec<usize>,
}

pub(crate) struct Report {
    pub body: Value,
    pub pass: bool,
}

fn ok(body: Value) -> Result<Report> {
    Ok(Report { body, pass: true })
}

fn real(s: &str, bits: u32, flag: &str) -> Result<BigReal> {
    BigReal::parse_with_bits(s, bits).map_err(|e| CliError::Usage(format!("--{flag} {s:?}: {e}")))
}

fn reals(s: &str, bits: u32, flag: &str) -> Result<Vec<BigReal>> {
    let t = s.trim();
    if t.starts_with('[') {
        let items: Vec<Value> = serde_json::from_str(t).map_err(|e| CliError::Usage(format!("--{flag}: {e}")))?;
        return items
            .iter()
            .map(|v| match v {
                Value::String(s) => real(s, bits, flag),
                Value::Number(n) => real(&n.to_string(), bits, flag),
                other => Err(CliError::Usage(format!("--{flag}: {other} is not a number"))),
            })
            .collect();
    }
    t.split(',').map(str::trim).filter(|p| !p.is_empty()).map(|p| real(p, bits, flag)).collect()
}

fn grid(s: &str, bits: u32, flag: &str) -> Result<(BigReal, BigReal, usize)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, h, m] = parts[..] else {
        return Err(CliError::Usage(format!("--{flag} expects a,h,m")));
    };
    let m = m.parse().map_err(|_| CliError::Usage(format!("--{flag}: m = {m:?} is not a count")))?;
    Ok((real(a, bits, flag)?, real(h, bits, flag)?, m))
}

fn json_arg<T: DeserializeOwned>(s: &str, flag: &str) -> Result<T> {
    let t = s.trim_start();
    let text = if t.starts_with(['{', '[', '"']) {
        s.to_string()
    } else {
        std::fs::read_to_string(s).map_err(|e| CliError::Input(format!("--{flag} {s}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("--{flag}: {e}")))
}

fn sigma_arg(s: &str) -> Result<Sigma> {
    let t = s.trim();
    if t.starts_with(['{', '"']) {
        json_arg(t, "sigma")
    } else {
        serde_json::from_value(Value::String(t.to_ascii_lowercase())).map_err(|e| CliError::Usage(format!("--sigma: {e}")))
    }
}

/// Numeric rows of a two-column CSV; a non-numeric first row is a header.
fn read_pairs(path: &PathBuf, bits: u32, flag: &str) -> Result<Vec<(BigReal, BigReal)>> {
    let input = |e: &dyn std::fmt::Display| CliError::Input(format!("--{flag} {}: {e}", path.display()));
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path).map_err(|e| input(&e))?;
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| input(&e))?;
        if rec.len() < 2 {
            return Err(input(&format!("row {} has fewer than two columns", i + 1)));
        }
        match (BigReal::parse_with_bits(&rec[0], bits), BigReal::parse_with_bits(&rec[1], bits)) {
            (Ok(x), Ok(y)) => rows.push((x, y)),
            _ if i == 0 => {}
            _ => return Err(input(&format!("row {} is not numeric", i + 1))),
        }
    }
    Ok(rows)
}

fn kronecker_error(e: KroneckerError) -> CliError {
    match e {
        KroneckerError::Invalid(m) => CliError::Input(m),
        KroneckerError::NotFound(w) => {
            CliError::Failed { message: format!("not found: {w}"), detail: serde_json::to_value(&w).unwrap_or(Value::Null) }
        }
        other => CliError::failed(other),
    }
}

fn certificate(c: Certificate) -> Result<Report> {
    let pass = c.pass;
    Ok(Report { body: json!({ "certificate": c }), pass })
}

fn tolerance(tol: &Option<String>, bits: u32) -> Result<Option<BigReal>> {
    tol.as_deref().map(|t| real(t, bits, "tol")).transpose()
}

pub(crate) fn execute(cmd: &Command, cfg: &ExperimentConfig) -> Result<Report> {
    let bits = cfg.bits;
    match cmd {
        Command::Kronecker(a) => kronecker(a, bits),
        Command::Certify(c) => match c {
            CertifyCmd::Det(a) => certify_det(a, bits),
            CertifyCmd::Exppoly(a) => {
                let family: FamilyParams = json_arg(&a.family, "family")?;
                let (x0, h, m) = grid(&a.grid, bits, "grid")?;
                let g = sample_complex(&family, &x0, &h, m).map_err(CliError::failed)?;
                certificate(exp_poly_certificate(&g, a.d, tolerance(&a.tol, bits)?).map_err(CliError::failed)?)
            }
            CertifyCmd::Vdw(a) => certify_vdw(a, bits),
        },
        Command::Limits(c) => match c {
            LimitsCmd::Resonance(a) => resonance(a, bits),
            LimitsCmd::Polycombo(a) => polycombo(a, bits),
            LimitsCmd::Recover(a) => recover(a, bits),
            LimitsCmd::Sigmapath(a) => sigma_path(a, bits),
        },
        Command::Net(c) => net(c, cfg),
        Command::Fit(a) => fit(a, cfg),
        Command::Bound(a) => {
            let n = entropy_bound(a.p, a.b, &real(&a.m, bits, "M")?, &real(&a.eps, bits, "eps")?).map_err(|e| CliError::Usage(e.to_string()))?;
            ok(json!({ "max_N": n, "p": a.p, "B": a.b, "M": a.m, "eps": a.eps }))
        }
        Command::Suite(a) => {
            let results = suite::run_criteria(cfg.seed, &a.only);
            for r in &results {
                eprintln!("{}", r.line());
            }
            let passed = results.iter().filter(|r| r.pass).count();
            let pass = passed == results.len();
            Ok(Report { body: json!({ "criteria": results, "passed": passed, "total": results.len() }), pass })
        }
    }
}

fn kronecker(a: &KroneckerArgs, bits: u32) -> Result<Report> {
    let points = reals(&a.points, bits, "points")?;
    let targets = reals(&a.targets, bits, "targets")?;
    let eps = real(&a.eps, bits, "eps")?;
    let budget = a.budget.as_deref().map(|b| real(b, bits, "budget")).transpose()?;
    let opts = OrbitOptions::default();
    if a.phases {
        let mut inst = DiophantineInstance::new(points, targets, eps).map_err(kronecker_error)?;
        if let Some(b) = budget {
            inst = inst.with_budget(b);
        }
        let s = solve_orbit_with(&inst, &opts).map_err(kronecker_error)?;
        return ok(json!({ "omega": s.omega, "residuals": s.residuals, "verified": s.verified, "method": s.method }));
    }
    let f = fit_single_sine_with(&points, &targets, &eps, budget.as_ref(), &opts).map_err(kronecker_error)?;
    ok(json!({ "omega": f.omega, "c": f.c, "residuals": f.residuals, "verified": f.verified }))
}

fn certify_det(a: &DetArgs, bits: u32) -> Result<Report> {
    let family: FamilyParams = json_arg(&a.family, "family")?;
    family.validate().map_err(|e| CliError::Input(format!("--family: {e}")))?;
    let n = match (a.n, &family) {
        (Some(n), _) => n,
        (None, FamilyParams::H1(_)) => 1,
        (None, FamilyParams::H2(p)) => p.n(),
        (None, _) => return Err(CliError::Usage("--n is required for this family".into())),
    };
    let tol = tolerance(&a.tol, bits)?;
    let c = match (&a.alphas, &a.betas, &a.grid) {
        (Some(al), Some(be), _) => {
            let x0 = real(&a.x0, bits, "x0")?;
            let g = |x: &BigReal| family.evaluate(x);
            det_certificate(g, &x0, &reals(al, bits, "alphas")?, &reals(be, bits, "betas")?, n, tol)
        }
        (_, _, Some(gr)) => {
            let (x0, h, m) = grid(gr, bits, "grid")?;
            let s = sample(&family, &x0, &h, m).map_err(CliError::failed)?;
            hankel_certificate(&s.values, n, tol)
        }
        _ => return Err(CliError::Usage("give --alphas and --betas, or --grid".into())),
    }
    .map_err(|e| CliError::Input(e.to_string()))?;
    certificate(c)
}

fn sub_certifier(s: &str) -> Result<SubCertifier> {
    let bad = || CliError::Usage(format!("--sub {s:?}: expected det:N or exppoly:d"));
    let (kind, k) = s.split_once(':').ok_or_else(bad)?;
    let k: usize = k.trim().parse().map_err(|_| bad())?;
    match kind.trim() {
        "det" => Ok(SubCertifier::Det { n: k }),
        "exppoly" | "exp_poly" => Ok(SubCertifier::ExpPoly { d: k }),
        _ => Err(bad()),
    }
}

fn certify_vdw(a: &VdwArgs, bits: u32) -> Result<Report> {
    let ends = reals(&a.interval, bits, "interval")?;
    let [lo, hi] = &ends[..] else {
        return Err(CliError::Usage("--interval expects a,b".into()));
    };
    let sub = sub_certifier(&a.sub)?;
    let s = a.s.unwrap_or(sub.samples_needed());
    let tol = tolerance(&a.tol, bits)?;
    let c = if let Some(n) = &a.net {
        let net: NetworkGraph = json_arg(n, "net")?;
        let pieces = net.nodes.iter().filter(|n| n.act.is_piecewise()).count() as u32;
        let p = a.p.unwrap_or(1usize.checked_shl(pieces).unwrap_or(usize::MAX));
        branched_certificate(&BranchedNetwork { net, sub, s, p }, lo, hi, tol).map_err(CliError::failed)?
    } else {
        let family: FamilyParams = json_arg(a.family.as_deref().unwrap_or_default(), "family")?;
        let p = a.p.unwrap_or(1);
        vdw_composite_certificate(|x: &BigReal| family.evaluate(x), lo, hi, |_: &BigReal| Ok(0), sub, s, p, tol)
            .map_err(CliError::failed)?
    };
    certificate(c)
}

fn sup(f: impl Fn(&BigReal) -> std::result::Result<BigReal, String> + Sync, g: impl Fn(&BigReal) -> std::result::Result<BigReal, String> + Sync, n: usize, bits: u32) -> Result<BigReal> {
    sup_distance(f, g, n, bits).map_err(CliError::failed)
}

fn sweep_plot(plot: &Option<PathBuf>, dws: &[BigReal], errors: &[BigReal]) -> Result<()> {
    if let Some(path) = plot {
        let cols = vec![dws.iter().map(BigReal::to_f64).collect(), errors.iter().map(BigReal::to_f64).collect()];
        emit_plot_data(&["dw", "sup_error"], &cols, path).map_err(|e| CliError::Input(format!("--plot {}: {e}", path.display())))?;
    }
    Ok(())
}

fn resonance(a: &ResonanceArgs, bits: u32) -> Result<Report> {
    let omega = real(&a.omega, bits, "omega")?;
    let h = real(&a.h, bits, "h")?;
    let dws = reals(&a.dw, bits, "dw")?;
    let m = a.m;
    let target = |x: &BigReal| (&omega * x + &h).sin().map(|s| s * x.powi(m as i32)).map_err(|e| e.to_string());
    let mut runs = Vec::new();
    let mut errors = Vec::new();
    for dw in &dws {
        let p = resonance_combo(&omega, &h, m, dw).map_err(CliError::failed)?;
        let err = sup(|x: &BigReal| p.eval(x).map_err(|e| e.to_string()), target, a.points, bits)?;
        runs.push(json!({ "dw": dw, "sup_error": err, "waves": p.waves }));
        errors.push(err);
    }
    sweep_plot(&a.plot, &dws, &errors)?;
    ok(json!({ "m": m, "runs": runs }))
}

fn polycombo(a: &PolyComboArgs, bits: u32) -> Result<Report> {
    let coef = reals(&a.coef, bits, "coef")?;
    let dws = reals(&a.dw, bits, "dw")?;
    let target = |x: &BigReal| Ok(coef.iter().rev().fold(BigReal::zero(bits), |acc, c| acc * x + c));
    let mut runs = Vec::new();
    let mut errors = Vec::new();
    for dw in &dws {
        let p = polynomial_combo(a.m0, &coef, dw).map_err(CliError::failed)?;
        let err = sup(|x: &BigReal| p.eval(x).map_err(|e| e.to_string()), target, a.points, bits)?;
        runs.push(json!({ "dw": dw, "sup_error": err, "waves": p.waves }));
        errors.push(err);
    }
    sweep_plot(&a.plot, &dws, &errors)?;
    ok(json!({ "m0": a.m0, "runs": runs }))
}

fn recover(a: &RecoverArgs, bits: u32) -> Result<Report> {
    let rows = read_pairs(&a.samples, bits, "samples")?;
    if rows.len() < 2 {
        return Err(CliError::Input("--samples needs at least two rows".into()));
    }
    let x0 = rows[0].0.clone();
    let h = &rows[1].0 - &x0;
    let slack = BigReal::one(bits).ldexp(-(bits as i32) / 2) * (h.abs() + 1.0);
    for (k, (x, _)) in rows.iter().enumerate() {
        if (x - (&x0 + &h * (k as f64))).abs() > slack {
            return Err(CliError::Input(format!("--samples: row {} breaks the equal spacing", k + 1)));
        }
    }
    let m = rows.len() - 1;
    let samples = SampleGrid::new(x0, h, m, rows.into_iter().map(|(_, y)| y).collect()).map_err(|e| CliError::Input(e.to_string()))?;
    let roots: Vec<Root> = json_arg(&a.roots, "roots")?;
    let r = recover_coefficients(&RecoveryInstance { samples, roots }).map_err(CliError::failed)?;
    ok(json!({ "recovered": r }))
}

fn sigma_path(a: &SigmaPathArgs, bits: u32) -> Result<Report> {
    let sigma = sigma_arg(&a.sigma)?;
    let kind: LimitKind = json_arg(&a.kind, "kind")?;
    let mut runs = Vec::new();
    for t in reals(&a.t, bits, "t")? {
        let p = sigma_limit_path(&sigma, &kind, &t).map_err(CliError::failed)?;
        let err = sup(
            |x: &BigReal| p.eval(x).map_err(|e| e.to_string()),
            |x: &BigReal| kind.eval(&sigma, x).map_err(|e| e.to_string()),
            a.points,
            bits,
        )?;
        runs.push(json!({ "t": t, "member": p, "sup_error": err }));
    }
    ok(json!({ "sigma": sigma, "limit": kind, "runs": runs }))
}

fn points(x: &Option<String>, g: &Option<String>, bits: u32) -> Result<Vec<BigReal>> {
    match (x, g) {
        (Some(x), _) => reals(x, bits, "x"),
        (_, Some(g)) => {
            let (a, h, m) = grid(g, bits, "grid")?;
            Ok((0..=m).map(|k| &a + &h * (k as f64)).collect())
        }
        _ => Err(CliError::Usage("give --x or --grid".into())),
    }
}

fn evaluate_all(net: &NetworkGraph, xs: &[BigReal]) -> Result<Vec<Value>> {
    xs.iter()
        .map(|x| {
            let (y, trace) = eval_network(net, x).map_err(CliError::failed)?;
            Ok(json!({ "x": x, "y": y, "branches": trace.branches }))
        })
        .collect()
}

fn net(c: &NetCmd, cfg: &ExperimentConfig) -> Result<Report> {
    let bits = cfg.bits;
    let load = |s: &str| -> Result<NetworkGraph> {
        let n: NetworkGraph = json_arg(s, "net")?;
        n.validate().map_err(|e| CliError::Input(format!("--net: {e}")))?;
        Ok(n)
    };
    match c {
        NetCmd::Eval(a) => {
            let n = load(&a.net)?;
            ok(json!({ "values": evaluate_all(&n, &points(&a.x, &a.grid, bits)?)? }))
        }
        NetCmd::Validate(a) => {
            let check = validate_single_transcendental(&load(&a.net)?).map_err(CliError::failed)?;
            let pass = check == LayerCheck::Ok;
            Ok(Report { body: json!({ "check": check }), pass })
        }
        NetCmd::Color(a) => {
            let n = load(&a.net)?;
            let (x0, h, m) = grid(&a.grid, bits, "grid")?;
            let col = branch_coloring(&n, &x0, &h, m).map_err(CliError::failed)?;
            let distinct = col.colors.iter().max().map_or(0, |c| c + 1);
            ok(json!({ "colors": col.colors, "distinct": distinct }))
        }
        NetCmd::Fig1(a) => {
            let seeded = a.weights.is_none();
            let weights = match &a.weights {
                Some(w) => reals(w, bits, "weights")?,
                None => {
                    let mut rng = random::stream_rng(cfg.seed, 0);
                    (0..FIG1_PARAMS).map(|_| random::uniform(&mut rng, -0.5, 0.5, bits)).collect()
                }
            };
            let n = build_universal_sin_arcsin(&weights).map_err(|e| CliError::Input(e.to_string()))?;
            let check = validate_single_transcendental(&n).map_err(CliError::failed)?;
            ok(json!({
                "nodes": FIG1_NODES,
                "params": FIG1_PARAMS,
                "weights_from_seed": seeded,
                "values": evaluate_all(&n, &reals(&a.x, bits, "x")?)?,
                "check": check,
            }))
        }
    }
}

fn fit(a: &FitArgs, cfg: &ExperimentConfig) -> Result<Report> {
    let family: FamilySpec = json_arg(&a.family, "family")?;
    let rows = read_pairs(&a.data, cfg.bits, "data")?;
    let (xs, ys) = rows.into_iter().unzip();
    let mut inst = FitInstance::new(family, xs, ys, real(&a.eps, cfg.bits, "eps")?);
    inst.restarts = a.restarts;
    inst.max_iter = a.max_iter;
    inst.validate().map_err(|e| CliError::Input(e.to_string()))?;
    let r = fit_family(&inst, cfg.seed).map_err(CliError::failed)?;
    let pass = r.verdict == Verdict::Achieved;
    Ok(Report { body: json!({ "report": r }), pass })
}
