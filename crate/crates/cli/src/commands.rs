use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use bilocal_core::network::{noise_sweep, EXPERIMENTAL_NORM_TOL};
use bilocal_core::statistics::{
    b13_with_error, chsh_with_error, counts_to_table, hom_dip_fit, hom_visibility_bound,
    read_dip_csv, sample_counts, EstimateWithError,
};
use bilocal_core::{
    b13_from_table, bundled, chsh_from_table, load_geometry, BilocalResult, ChshResult,
    CountsTable, NetworkConfig, ProbabilityTable, TestMode,
};
use serde::Serialize;

use crate::{EvalArgs, Format, ModeArg, ModelArgs, Verdict};

pub const SEED_ENV: &str = "BILOCAL_SEED";

/// The environment variable wins over the flag when set.
fn resolve_seed(flag: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .with_context(|| format!("{SEED_ENV}={s:?} is not an unsigned integer")),
        Err(_) => Ok(flag),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_table(path: &Path) -> Result<ProbabilityTable> {
    let table = ProbabilityTable::from_json(&read_text(path)?)
        .with_context(|| format!("invalid probability table {}", path.display()))?;
    for (x, z, sum) in table.normalization_violations(EXPERIMENTAL_NORM_TOL) {
        eprintln!("warning: block x={x} z={z} sums to {sum:.5}, not 1");
    }
    Ok(table)
}

fn model_table(model: &ModelArgs, mode: TestMode) -> Result<ProbabilityTable> {
    let cfg = NetworkConfig::from_swapped_visibility(mode, model.v, model.lam, model.p)?;
    Ok(cfg.model()?.probability_table()?)
}

fn emit(format: Format, text: String, json: &impl Serialize) -> Result<()> {
    match format {
        Format::Text => print!("{text}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(json)?),
    }
    Ok(())
}

fn verdict(violated: bool) -> Verdict {
    if violated {
        Verdict::Ok
    } else {
        Verdict::NotViolated
    }
}

fn fmt_estimate(name: &str, value: f64, err: Option<EstimateWithError>) -> String {
    match err {
        Some(e) => format!("{name} = {value:.6} ± {:.6}\n", e.sigma),
        None => format!("{name} = {value:.6}\n"),
    }
}

#[derive(Serialize)]
struct B13Report<'a> {
    #[serde(flatten)]
    result: &'a BilocalResult,
    sigma: Option<f64>,
    violated: bool,
}

fn b13_text(r: &BilocalResult, err: Option<EstimateWithError>) -> String {
    let mut s = String::new();
    for (k, (c0, c1)) in r.correlators_b0.iter().zip(&r.correlators_b1).enumerate() {
        let _ = writeln!(s, "<A{} B0 C{}> = {c0:+.5}   <A{} B1 C{}> = {c1:+.5}", k / 2, k % 2, k / 2, k % 2);
    }
    let _ = writeln!(s, "I = {:.6}", r.i);
    let _ = writeln!(s, "J = {:.6}", r.j);
    s.push_str(&fmt_estimate("B13", r.b13, err));
    s
}

fn report_b13(table: &ProbabilityTable, n_boot: usize, seed: u64, format: Format) -> Result<Verdict> {
    let result = b13_from_table(table)?;
    let err = if table.has_sigmas() {
        Some(b13_with_error(table, n_boot, seed)?)
    } else {
        None
    };
    let violated = result.b13 > 1.0;
    let mut text = b13_text(&result, err);
    text.push_str(if violated { "bilocal bound violated\n" } else { "bilocal bound not violated\n" });
    emit(
        format,
        text,
        &B13Report { result: &result, sigma: err.map(|e| e.sigma), violated },
    )?;
    Ok(verdict(violated))
}

#[derive(Serialize)]
struct ChshReport<'a> {
    #[serde(flatten)]
    result: &'a ChshResult,
    sigma: Option<f64>,
    violated: bool,
}

fn report_chsh(table: &ProbabilityTable, n_boot: usize, seed: u64, format: Format) -> Result<Verdict> {
    let result = chsh_from_table(table)?;
    let err = if table.has_sigmas() {
        Some(chsh_with_error(table, n_boot, seed)?)
    } else {
        None
    };
    let violated = result.s > 2.0;
    let mut text = String::new();
    for (k, (e, ps)) in result.correlators.iter().zip(&result.success_probability).enumerate() {
        let _ = writeln!(text, "<A{} C{}>|01 = {e:+.5}   P(01) = {ps:.5}", k / 2, k % 2);
    }
    text.push_str(&fmt_estimate("S", result.s, err));
    text.push_str(if violated { "local bound violated\n" } else { "local bound not violated\n" });
    emit(
        format,
        text,
        &ChshReport { result: &result, sigma: err.map(|e| e.sigma), violated },
    )?;
    Ok(verdict(violated))
}

pub fn cmd_b13(args: &EvalArgs) -> Result<Verdict> {
    let seed = resolve_seed(args.seed)?;
    let table = match &args.table {
        Some(path) => load_table(path)?,
        None => model_table(&args.model, TestMode::Bilocality)?,
    };
    report_b13(&table, args.n_boot, seed, args.format)
}

pub fn cmd_chsh(args: &EvalArgs) -> Result<Verdict> {
    let seed = resolve_seed(args.seed)?;
    let table = match &args.table {
        Some(path) => load_table(path)?,
        None => model_table(&args.model, TestMode::Chsh)?,
    };
    report_chsh(&table, args.n_boot, seed, args.format)
}

pub fn cmd_sweep(
    p_min: f64,
    p_max: f64,
    steps: usize,
    v: f64,
    lam_low: f64,
    lam_high: f64,
    out: Option<&Path>,
) -> Result<Verdict> {
    if steps == 0 {
        bail!("--steps must be at least 1");
    }
    for (name, value) in [("p-min", p_min), ("p-max", p_max), ("v", v), ("lam-low", lam_low), ("lam-high", lam_high)] {
        if !(0.0..=1.0).contains(&value) {
            bail!("--{name} = {value} must lie in [0, 1]");
        }
    }
    if p_min > p_max {
        bail!("--p-min must not exceed --p-max");
    }
    let grid: Vec<f64> = if steps == 1 {
        vec![p_min]
    } else {
        (0..steps)
            .map(|i| p_min + (p_max - p_min) * i as f64 / (steps - 1) as f64)
            .collect()
    };
    let mut csv = String::from("p,b13_low,b13_high,s_low,s_high\n");
    for pt in noise_sweep(&grid, v, lam_low, lam_high) {
        let _ = writeln!(
            csv,
            "{:.4},{:.6},{:.6},{:.6},{:.6}",
            pt.p, pt.b13_low, pt.b13_high, pt.s_low, pt.s_high
        );
    }
    match out {
        Some(path) => fs::write(path, csv).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(Verdict::Ok)
}

pub fn cmd_simulate(model: &ModelArgs, n: u64, seed: u64, mode: ModeArg, out: Option<&Path>) -> Result<Verdict> {
    let seed = resolve_seed(seed)?;
    let mode = match mode {
        ModeArg::Bilocality => TestMode::Bilocality,
        ModeArg::Chsh => TestMode::Chsh,
    };
    let cfg = NetworkConfig::from_swapped_visibility(mode, model.v, model.lam, model.p)?;
    let counts = sample_counts(&cfg, n, seed)?;
    let mut json = counts.to_json();
    json.push('\n');
    match out {
        Some(path) => fs::write(path, json).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{json}"),
    }
    Ok(Verdict::Ok)
}

pub fn cmd_analyze(path: &Path, n_boot: usize, seed: u64, format: Format) -> Result<Verdict> {
    let seed = resolve_seed(seed)?;
    let counts = CountsTable::from_json(&read_text(path)?)
        .with_context(|| format!("invalid counts file {}", path.display()))?;
    let table = counts_to_table(&counts)?;
    match counts.mode() {
        Some(TestMode::Chsh) => report_chsh(&table, n_boot, seed, format),
        Some(TestMode::Bilocality) | None => report_b13(&table, n_boot, seed, format),
    }
}

pub fn cmd_spacetime(path: Option<&Path>, format: Format) -> Result<Verdict> {
    let geometry = match path {
        Some(p) => load_geometry(&read_text(p)?).with_context(|| format!("invalid geometry {}", p.display()))?,
        None => bundled::site_geometry()?,
    };
    let report = bilocal_core::audit(&geometry.conditions)?;
    emit(format, report.to_text(), &report)?;
    Ok(verdict(report.all_satisfied))
}

#[derive(Serialize)]
struct HomBounds {
    mu: f64,
    bound: f64,
    bound_discarding_multi_clicks: f64,
}

pub fn cmd_hom(mu: Option<f64>, data: Option<&Path>, format: Format) -> Result<Verdict> {
    if let Some(path) = data {
        let file = fs::File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
        let points = read_dip_csv(file).with_context(|| format!("invalid dip data {}", path.display()))?;
        let fit = hom_dip_fit(&points)?;
        let width = fit.width.map_or_else(|| "-".to_string(), |w| format!("{w:.3}"));
        let text = format!(
            "visibility = {:.5} ± {:.5}\nwidth_ps = {width}\nbaseline = {:.3}\n",
            fit.visibility.value, fit.visibility.sigma, fit.baseline
        );
        emit(format, text, &fit)?;
        return Ok(Verdict::Ok);
    }
    let mu = mu.context("either --mu or --data is required")?;
    let bounds = HomBounds {
        mu,
        bound: hom_visibility_bound(mu, false)?,
        bound_discarding_multi_clicks: hom_visibility_bound(mu, true)?,
    };
    let text = format!(
        "mu = {mu}\nV_max = {:.5}\nV_max (multi-clicks discarded) = {:.5}\n",
        bounds.bound, bounds.bound_discarding_multi_clicks
    );
    emit(format, text, &bounds)?;
    Ok(Verdict::Ok)
}
