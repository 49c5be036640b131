//! The `horoxt` command line.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 bad usage,
//! 3 a capacity or horizon limit was hit at run time.

use std::ffi::OsString;
use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::dist;
use crate::error::{Error, Result};
use crate::lattice::{Disk, TriangleRegion};
use crate::mc::{self, SamplerSpec};
use crate::section::{direct_crossing_oracle, hit_process, sup_excursion_height, HitEvent, OrbitSpec};
use crate::sl2::{geodesic_flow, GroupElement};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

const MAX_GRID_ROWS: f64 = 1e7;

#[derive(Parser, Debug, Serialize)]
#[command(name = "horoxt", version, about = "Cusp excursions of horocycle flows on the modular surface")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Tabulate a limit density.
    Density(DensityArgs),
    /// Hit process or maximal excursion of one orbit.
    Simulate(SimulateArgs),
    /// Run a verification suite; exits 1 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityName {
    Psi,
    Rho,
    Omega,
    #[value(name = "psi_rt")]
    PsiRt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Serialize)]
pub struct Output {
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Serialize)]
pub struct DensityArgs {
    #[arg(value_enum)]
    pub name: DensityName,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Evaluate at a single point.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["from", "to", "step"])]
    pub at: Option<f64>,
    /// Distance `ℓ_y` of the base point from the length-one horocycle (omega).
    #[arg(long, default_value_t = 0.0)]
    pub ell: f64,
    /// Height `t` for the joint density `Ψ(r, t)`.
    #[arg(long = "t")]
    pub t: Option<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulateWhat {
    Hits,
    Sup,
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub what: SimulateWhat,
    /// Initial lift as `a,b,c,d` (row-major).
    #[arg(long, allow_hyphen_values = true, default_value = "1,0,0,1", conflicts_with = "random")]
    pub g0: String,
    /// Draw the initial lift from Haar measure using `--seed`.
    #[arg(long)]
    pub random: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long = "R", default_value_t = 0.0, allow_hyphen_values = true)]
    pub r: f64,
    #[arg(long = "T", default_value_t = 1.0)]
    pub t: f64,
    /// Recompute the hits with the direct-crossing oracle and report agreement.
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Constants,
    Oracle,
    Farey,
    Siegel,
    Extreme,
    Firsthit,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Sample size (suite default when omitted).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Farey order.
    #[arg(long = "Q", default_value_t = 2000)]
    pub q: u64,
    #[command(flatten)]
    pub output: Output,
}

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub target: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// `|observed - target| ≤ tolerance`.
    pub fn close(name: &str, target: f64, observed: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            target,
            observed,
            tolerance,
            passed: (observed - target).abs() <= tolerance,
        }
    }

    /// `observed ≤ bound`.
    pub fn at_most(name: &str, observed: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            target: 0.0,
            observed,
            tolerance: bound,
            passed: observed <= bound,
        }
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct Emitter {
    header: serde_json::Value,
}

impl Emitter {
    fn csv(&self, columns: &str, rows: &[Vec<String>], trailer: &[String]) -> String {
        let mut s = String::new();
        s.push_str(&format!("# horoxt {VERSION}\n"));
        s.push_str(&format!("# config: {}\n", self.header["config"]));
        s.push_str(&format!("# seed: {}\n", self.header["seed"]));
        s.push_str(columns);
        s.push('\n');
        for r in rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        for t in trailer {
            s.push_str(&format!("# {t}\n"));
        }
        s
    }

    fn json(&self, body: serde_json::Value) -> String {
        let mut v = self.header.clone();
        if let (Some(m), serde_json::Value::Object(b)) = (v.as_object_mut(), body) {
            m.extend(b);
        }
        let mut s = serde_json::to_string_pretty(&v).expect("reports serialise");
        s.push('\n');
        s
    }
}

fn emitter<T: Serialize>(config: &T, seed: Option<u64>) -> Emitter {
    Emitter {
        header: json!({
            "version": VERSION,
            "config": config,
            "seed": seed,
        }),
    }
}

fn write_out(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Error::Domain(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut o = std::io::stdout().lock();
            o.write_all(text.as_bytes())
                .and_then(|_| o.flush())
                .map_err(|e| Error::Domain(format!("cannot write to stdout: {e}")))
        }
    }
}

fn grid(args: &DensityArgs) -> Result<Vec<f64>> {
    if let Some(x) = args.at {
        return Ok(vec![x]);
    }
    let (Some(a), Some(b), Some(h)) = (args.from, args.to, args.step) else {
        return Err(Error::Domain("give either --at or all of --from, --to, --step".into()));
    };
    if !(h > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("bad grid from {a} to {b} step {h}")));
    }
    let steps = ((b - a) / h + 1e-9).floor();
    if steps + 1.0 > MAX_GRID_ROWS {
        return Err(Error::Domain(format!("grid has more than {MAX_GRID_ROWS} rows")));
    }
    Ok((0..=steps as usize).map(|k| a + k as f64 * h).collect())
}

fn cmd_density(args: &DensityArgs) -> Result<i32> {
    let xs = grid(args)?;
    let eval = |x: f64| -> Result<f64> {
        match args.name {
            DensityName::Psi => dist::hall_psi(x),
            DensityName::Rho => Ok(dist::rho(x)),
            DensityName::Omega => dist::omega_y(x, args.ell),
            DensityName::PsiRt => {
                let t = args
                    .t
                    .ok_or_else(|| Error::Domain("psi_rt needs --t".into()))?;
                dist::hall_psi_rt(x, t)
            }
        }
    };
    let values: Vec<(f64, f64)> = xs.iter().map(|&x| eval(x).map(|v| (x, v))).collect::<Result<_>>()?;
    let em = emitter(&Command::Density(clone_density(args)), None);
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let rows: Vec<Vec<String>> = values.iter().map(|&(x, v)| vec![fmt_f64(x), fmt_f64(v)]).collect();
            em.csv("x,value", &rows, &[])
        }
        Format::Json => em.json(json!({
            "rows": values.iter().map(|&(x, v)| json!({"x": x, "value": v})).collect::<Vec<_>>()
        })),
    };
    write_out(&args.output, &text)?;
    Ok(0)
}

// the echoed config omits the output location so files compare equal
fn clone_density(a: &DensityArgs) -> DensityArgs {
    DensityArgs {
        name: a.name,
        from: a.from,
        to: a.to,
        step: a.step,
        at: a.at,
        ell: a.ell,
        t: a.t,
        output: Output { out: None, format: a.output.format },
    }
}

pub fn parse_group_element(s: &str) -> Result<GroupElement> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Domain(format!("cannot parse --g0 {s:?}: {e}")))?;
    let [a, b, c, d] = parts[..] else {
        return Err(Error::Domain(format!("--g0 needs four entries, got {}", parts.len())));
    };
    GroupElement::new(a, b, c, d)
}

fn hit_row(h: &HitEvent) -> Vec<String> {
    vec![
        h.j.to_string(),
        fmt_f64(h.xi),
        fmt_f64(h.s),
        fmt_f64(h.t),
        fmt_f64(h.xi_entry),
        fmt_f64(h.delta),
        h.vector.c.to_string(),
        h.vector.d.to_string(),
    ]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleMatch {
    pub matched: bool,
    pub lattice_hits: usize,
    pub oracle_hits: usize,
    pub max_time_error: f64,
    pub max_height_error: f64,
}

/// Compares two hit lists: equal counts, times and heights within `1e-7`.
pub fn compare_hits(a: &[HitEvent], b: &[HitEvent]) -> OracleMatch {
    let mut dxi: f64 = 0.0;
    let mut dt: f64 = 0.0;
    for (x, y) in a.iter().zip(b) {
        dxi = dxi.max((x.xi - y.xi).abs());
        dt = dt.max((x.t - y.t).abs());
    }
    OracleMatch {
        matched: a.len() == b.len() && dxi <= 1e-7 && dt <= 1e-7,
        lattice_hits: a.len(),
        oracle_hits: b.len(),
        max_time_error: dxi,
        max_height_error: dt,
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<i32> {
    let g0 = if args.random {
        mc::sample_initial(&SamplerSpec::haar(args.seed), 0)
    } else {
        parse_group_element(&args.g0)?
    };
    let config = json!({
        "command": "simulate",
        "what": args.what,
        "g0": [g0.a, g0.b, g0.c, g0.d],
        "random": args.random,
        "R": args.r,
        "T": args.t,
        "oracle": args.oracle,
    });
    let em = emitter(&config, args.random.then_some(args.seed));
    let mut code = 0;
    let text = match args.what {
        SimulateWhat::Hits => {
            let spec = OrbitSpec::new(g0, args.r, args.t)?;
            let hits = hit_process(&spec)?;
            let check = if args.oracle {
                let m = compare_hits(&hits, &direct_crossing_oracle(&spec)?);
                if !m.matched {
                    code = 1;
                }
                Some(m)
            } else {
                None
            };
            match args.output.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let rows: Vec<Vec<String>> = hits.iter().map(hit_row).collect();
                    let trailer: Vec<String> = check
                        .iter()
                        .map(|m| format!("oracle: {}", serde_json::to_string(m).unwrap()))
                        .collect();
                    em.csv("j,xi,s,t,xi_entry,delta,c,d", &rows, &trailer)
                }
                Format::Json => em.json(json!({ "hits": hits, "oracle": check })),
            }
        }
        SimulateWhat::Sup => {
            if args.oracle {
                return Err(Error::Domain("--oracle applies to `simulate hits`".into()));
            }
            let sup = sup_excursion_height(&g0, args.t)?;
            match args.output.format.unwrap_or(Format::Json) {
                Format::Json => em.json(json!({ "sup_height": sup.height, "argmax": sup.argmax })),
                Format::Csv => em.csv("sup_height,argmax", &[vec![fmt_f64(sup.height), fmt_f64(sup.argmax)]], &[]),
            }
        }
    };
    write_out(&args.output, &text)?;
    Ok(code)
}

/// Outcome of a KS check with one escalation step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsOutcome {
    pub ks: f64,
    pub n: usize,
    pub tolerance: f64,
    pub escalated: bool,
    pub passed: bool,
}

/// Runs `ks(n)` against `tol`; on failure reruns at `10 n` against `tol / 2`.
pub fn ks_with_escalation<F: Fn(usize) -> Result<f64>>(ks: F, n: usize, tol: f64) -> Result<KsOutcome> {
    let d = ks(n)?;
    if d <= tol {
        return Ok(KsOutcome { ks: d, n, tolerance: tol, escalated: false, passed: true });
    }
    let n2 = 10 * n;
    let d2 = ks(n2)?;
    Ok(KsOutcome {
        ks: d2,
        n: n2,
        tolerance: tol / 2.0,
        escalated: true,
        passed: d2 <= tol / 2.0,
    })
}

fn ks_check(name: &str, o: KsOutcome) -> Check {
    Check {
        name: if o.escalated { format!("{name} (n={}, escalated)", o.n) } else { format!("{name} (n={})", o.n) },
        target: 0.0,
        observed: o.ks,
        tolerance: o.tolerance,
        passed: o.passed,
    }
}

/// Horocycle-segment sampler used by the extreme-value suite.
pub fn segment_sampler(seed: u64) -> Result<SamplerSpec> {
    let base = geodesic_flow(&GroupElement::IDENTITY, 3.0)?;
    SamplerSpec::horocycle_segment(base, 0.0, 1.0, seed)
}

pub fn suite_checks(suite: Suite, n: Option<usize>, seed: u64, q: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    match suite {
        Suite::Constants => {
            let eta = dist::eta_bar_multi(&[0.0], dist::MODULAR_AREA)?;
            checks.push(Check::close("mean return time", PI * PI / 3.0, eta, 1e-12));
            let flat = dist::psi_sigma_flat(dist::MODULAR_AREA)?;
            checks.push(Check::close("hit intensity", 3.0 / (PI * PI), flat, 1e-15));
            checks.push(Check::close("Psi on [0,1)", 3.0 / (PI * PI), dist::hall_psi(0.5)?, 1e-15));
            checks.push(Check::close("mean of rho", dist::RHO_MEAN, dist::rho_moment(1)?, 1e-5));
            checks.push(Check::close("mass of rho", 1.0, dist::rho_total_mass()?, 1e-8));
            checks.push(Check::close("mass of Psi", 1.0, dist::psi_total_mass()?, 1e-8));
        }
        Suite::Oracle => {
            let n = n.unwrap_or(50);
            let spec = SamplerSpec::haar(seed);
            let results = mc::par_samples(n, |i| {
                let orbit = OrbitSpec::new(mc::sample_initial(&spec, i), 0.0, 20.0)?;
                Ok(compare_hits(&hit_process(&orbit)?, &direct_crossing_oracle(&orbit)?))
            })?;
            let mismatched = results.iter().filter(|m| m.lattice_hits != m.oracle_hits).count();
            checks.push(Check::close("orbits with different hit counts", 0.0, mismatched as f64, 0.0));
            let dxi = results.iter().map(|m| m.max_time_error).fold(0.0, f64::max);
            let dt = results.iter().map(|m| m.max_height_error).fold(0.0, f64::max);
            checks.push(Check::at_most("max hit-time difference", dxi, 1e-7));
            checks.push(Check::at_most("max height difference", dt, 1e-7));
        }
        Suite::Farey => {
            let e = mc::farey_gap_oracle(q)?;
            let qf = q as f64;
            checks.push(Check::close("smallest scaled gap", qf / (qf - 1.0), e.min(), 1e-9));
            let mean = e.mean();
            checks.push(Check::close("mean scaled gap", dist::MEAN_RETURN_TIME, mean, 0.005 * dist::MEAN_RETURN_TIME));
            checks.push(Check::at_most("tail sup-error against (pi^2/3) Psi", mc::ks_distance(&e, mc::farey_gap_cdf), 0.01));
        }
        Suite::Siegel => {
            let n = n.unwrap_or(10_000);
            for (name, est) in [
                ("triangle X=10", mc::siegel_check(&TriangleRegion::new(10.0)?, n, seed)?),
                ("unit disk", mc::siegel_check(&Disk { radius: 1.0 }, n, seed)?),
            ] {
                checks.push(Check::close(&format!("Siegel mean, {name}"), est.expected, est.mean, 0.02 * est.expected));
            }
            let small = mc::siegel_check(&TriangleRegion::new(0.1)?, n, seed)?;
            checks.push(Check::at_most("P(count >= 1), area 0.05", small.hit_fraction, small.expected + 0.02));
        }
        Suite::Extreme => {
            let n = n.unwrap_or(10_000);
            let haar = SamplerSpec::haar(seed);
            let seg = segment_sampler(seed)?;
            let horizon = 1000.0;
            let run = |s: SamplerSpec| {
                move |m: usize| Ok(mc::ks_distance(&mc::experiment_extreme(&s, horizon, m)?, mc::extreme_cdf))
            };
            checks.push(ks_check("sup height, Haar starts", ks_with_escalation(run(haar), n, 0.02)?));
            checks.push(ks_check("sup height, horocycle segment", ks_with_escalation(run(seg), n, 0.02)?));
            let peaks = |m: usize| {
                let a = mc::experiment_extreme(&haar, horizon, m)?;
                let b = mc::experiment_extreme_peaks(&haar, horizon, m)?;
                Ok(mc::ks_two_sample(&a, &b))
            };
            checks.push(ks_check("peaks-only vs full sup", ks_with_escalation(peaks, n, 0.02)?));
            let dist_run = |m: usize| {
                Ok(mc::ks_distance(&mc::experiment_extreme_distance(&haar, horizon, m)?, mc::extreme_cdf))
            };
            checks.push(ks_check("sup distance from i", ks_with_escalation(dist_run, n, 0.03)?));
        }
        Suite::Firsthit => {
            let n = n.unwrap_or(10_000);
            let haar = SamplerSpec::haar(seed);
            let first = |m: usize| Ok(mc::ks_distance(&mc::experiment_first_hit(&haar, 6.0, m)?, dist::psi_cdf));
            checks.push(ks_check("first hit, R=6", ks_with_escalation(first, n, 0.02)?));
            let entry = |m: usize| Ok(mc::ks_distance(&mc::experiment_first_entry(&haar, 6.0, m)?, dist::psi_cdf));
            checks.push(ks_check("first entry, R=6", ks_with_escalation(entry, n, 0.02)?));
            let other = SamplerSpec::haar(seed.wrapping_add(1));
            let stable = |m: usize| {
                let a = mc::experiment_first_hit(&haar, 5.0, m)?;
                let b = mc::experiment_first_hit(&other, 8.0, m)?;
                Ok(mc::ks_two_sample(&a, &b))
            };
            checks.push(ks_check("R=5 vs R=8", ks_with_escalation(stable, n, 0.02)?));
        }
    }
    Ok(checks)
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let checks = suite_checks(args.suite, args.n, args.seed, args.q)?;
    let passed = checks.iter().all(|c| c.passed);
    let config = json!({ "command": "verify", "suite": args.suite, "n": args.n, "Q": args.q });
    let em = emitter(&config, Some(args.seed));
    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => em.json(json!({ "passed": passed, "checks": checks })),
        Format::Csv => {
            let rows: Vec<Vec<String>> = checks
                .iter()
                .map(|c| {
                    vec![
                        format!("\"{}\"", c.name),
                        fmt_f64(c.target),
                        fmt_f64(c.observed),
                        fmt_f64(c.tolerance),
                        c.passed.to_string(),
                    ]
                })
                .collect();
            em.csv("check,target,observed,tolerance,passed", &rows, &[format!("passed: {passed}")])
        }
    };
    write_out(&args.output, &text)?;
    Ok(if passed { 0 } else { 1 })
}

/// Runs the command line on `args` (including the program name).
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let started = Instant::now();
    let result = match &cli.command {
        Command::Density(a) => cmd_density(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Verify(a) => cmd_verify(a),
    };
    eprintln!("wall time: {:.3} s", started.elapsed().as_secs_f64());
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_runtime() {
                3
            } else {
                2
            }
        }
    }
}

pub fn main_exit_code() -> i32 {
    run(std::env::args_os())
}
