use std::fmt::Write;
use std::path::Path;

use anyhow::Context;
use carpet_quant::asymptotics::{
    beta, dimension_estimate_at_power, f_paper, g, golden_max, h, profile_csv, scaled_profile,
};
use carpet_quant::distortion::{distortion_bounds, Interval, LloydReport};
use carpet_quant::oracle::{brute_force, diagonal_trap_check, OracleConfig, TrapCase};
use carpet_quant::optimal::{enumerate_optimal, enumerate_with_t, optimal_by_index, optimal_set, quantization_error};
use carpet_quant::point::{format_rational, to_f64, Rational};
use carpet_quant::{measure, Codebook, Word};
use log::info;
use num::bigint::BigUint;
use serde_json::{json, Value};

use crate::document::{documents_csv, parse_documents, CodebookDocument, Provenance};
use crate::render::{render_svg, MAX_CARPET_DEPTH};
use crate::{parse_list, CliResult, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

fn to_json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn rational_json(q: &Rational) -> Value {
    json!({ "exact": format_rational(q), "approx": to_f64(q) })
}

pub struct OptimalArgs {
    pub n: u64,
    pub t: Option<String>,
    pub variants: Option<String>,
    pub index: Option<String>,
    pub limit: usize,
    pub format: Format,
}

fn parse_words(s: &str) -> CliResult<Vec<Word>> {
    s.split(',')
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(|w| Word::parse(w).map_err(Failure::from))
        .collect()
}

pub fn optimal(args: &OptimalArgs) -> CliResult<String> {
    if args.n == 0 {
        return Err(Failure::input("n must be at least 1"));
    }
    let t = args.t.as_deref().map(parse_words).transpose()?.unwrap_or_default();
    let docs: Vec<CodebookDocument> = if let Some(index) = &args.index {
        let i: BigUint = index.parse().map_err(|_| Failure::input(format!("bad index {index:?}")))?;
        vec![CodebookDocument::from_optimal(&optimal_by_index(args.n, &i)?, Some(i.to_string()))]
    } else if let Some(v) = &args.variants {
        let variants: Vec<usize> = parse_list(v)?.into_iter().map(|x| x as usize).collect();
        vec![CodebookDocument::from_optimal(&optimal_set(args.n, &t, Some(&variants))?, None)]
    } else if args.t.is_some() {
        enumerate_with_t(args.n, &t, args.limit)?
            .iter()
            .map(|s| CodebookDocument::from_optimal(s, None))
            .collect()
    } else {
        enumerate_optimal(args.n, args.limit)?
            .iter()
            .enumerate()
            .map(|(i, s)| CodebookDocument::from_optimal(s, Some(i.to_string())))
            .collect()
    };
    info!("{} optimal set(s) for n = {}", docs.len(), args.n);
    match args.format {
        Format::Json => Ok(to_json(&docs)),
        Format::Csv => documents_csv(&docs).map_err(Failure::Input),
    }
}

pub const ERROR_CSV_HEADER: &str = "n,v_n,decimal";

pub fn error(n_list: &str) -> CliResult<String> {
    let mut out = String::from(ERROR_CSV_HEADER);
    out.push('\n');
    for n in parse_list(n_list)? {
        if n == 0 {
            return Err(Failure::input("n must be at least 1"));
        }
        let v = quantization_error(n);
        writeln!(out, "{n},{},{:.6}", format_rational(&v), to_f64(&v)).unwrap();
    }
    Ok(out)
}

fn report_json(r: &LloydReport) -> Value {
    json!({
        "iterations": r.iterations,
        "converged": r.converged,
        "distortion": rational_json(&r.distortion),
        "codebook": CodebookDocument::from_codebook(&r.codebook, Provenance::Lloyd),
    })
}

pub fn lloyd(n: usize, depth: u32, restarts: usize, seed: u64, max_iter: usize) -> CliResult<String> {
    let config = OracleConfig { n, depth, restarts, seed, max_iter };
    let r = brute_force(&config)?;
    info!(
        "best restart {} of {}, {} degenerate, corrected distortion {}",
        r.best_restart, restarts, r.degenerate_restarts, r.corrected_distortion
    );
    let mut best = CodebookDocument::from_codebook(&r.best.codebook, Provenance::Lloyd);
    if let Some(i) = r.matched_optimal {
        let set = optimal_by_index(n as u64, &BigUint::from(i))?;
        best.decomposition = CodebookDocument::from_optimal(&set, None).decomposition;
        best.index = Some(i.to_string());
    }
    Ok(to_json(&json!({
        "config": { "n": n, "depth": depth, "restarts": restarts, "seed": seed, "max_iter": max_iter },
        "best_restart": r.best_restart,
        "iterations": r.best.iterations,
        "converged": r.best.converged,
        "distortion": rational_json(&r.best.distortion),
        "corrected_distortion": rational_json(&r.corrected_distortion),
        "quantization_error": rational_json(&quantization_error(n as u64)),
        "matched_optimal": r.matched_optimal,
        "match_distance": r.match_distance,
        "degenerate_restarts": r.degenerate_restarts,
        "optimal_restarts": r.optimal_restarts,
        "codebook": best,
    })))
}

pub const DIMENSION_CSV_HEADER: &str = "ell,estimate,beta,beta_minus_estimate";

pub fn dimension(levels: &str) -> CliResult<String> {
    let b = beta();
    let mut out = String::from(DIMENSION_CSV_HEADER);
    out.push('\n');
    for l in parse_list(levels)? {
        if l == 0 || l > 100_000 {
            return Err(Failure::input(format!("level {l} outside 1..=100000")));
        }
        let d = dimension_estimate_at_power(l as u32);
        writeln!(out, "{l},{d:.12},{b:.12},{:.12}", b - d).unwrap();
    }
    Ok(out)
}

pub fn coefficient(levels: &str, grid: usize, format: Format) -> CliResult<String> {
    let list = parse_list(levels)?;
    let (lo, hi) = (*list.iter().min().unwrap() as u32, *list.iter().max().unwrap() as u32);
    let r = scaled_profile(lo, hi, grid)?;
    let (xg, gmax) = golden_max(g, 1.0, 2.0);
    let (xh, hmax) = golden_max(h, 2.0, 4.0);
    info!(
        "levels {lo}..={hi}: inf {:.6}, sup {:.6} (max h {hmax:.6}); reference f range [{:.6}, {:.6}]",
        r.inf_observed,
        r.sup_observed,
        f_paper(1.0),
        f_paper(2.0)
    );
    match format {
        Format::Csv => Ok(profile_csv(&r)),
        Format::Json => Ok(to_json(&json!({
            "beta": beta(),
            "levels": [lo, hi],
            "grid": grid,
            "inf_observed": r.inf_observed,
            "sup_observed": r.sup_observed,
            "inf_lower_half": r.inf_lower_half,
            "sup_lower_half": r.sup_lower_half,
            "max_g": { "x": xg, "value": gmax },
            "max_h": { "x": xh, "value": hmax },
            "f_paper_range": [f_paper(1.0), f_paper(2.0)],
            "dimension_estimates": r.dimension_estimates.iter()
                .map(|(n, e)| json!({ "n": n, "estimate": e })).collect::<Vec<_>>(),
            "samples": r.samples.iter().map(|s| json!({
                "ell": s.level, "n": s.n, "x": s.x, "v_n": format_rational(&s.v_n),
                "scaled": s.scaled, "g_or_h": s.limit, "f_paper": s.f_paper,
            })).collect::<Vec<_>>(),
        }))),
    }
}

pub enum RenderSource {
    Optimal { n: u64, index: String },
    File { path: String, doc: usize },
}

fn read_input(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {path}")).map_err(Failure::Input)
}

fn load_codebook(source: &RenderSource) -> CliResult<Codebook> {
    match source {
        RenderSource::Optimal { n, index } => {
            let i: BigUint = index.parse().map_err(|_| Failure::input(format!("bad index {index:?}")))?;
            Ok(optimal_by_index(*n, &i)?.codebook)
        }
        RenderSource::File { path, doc } => {
            let docs = parse_documents(&read_input(path)?).map_err(Failure::Input)?;
            let d = docs.get(*doc).ok_or_else(|| Failure::input(format!("{path} has no document {doc}")))?;
            d.codebook().map_err(Failure::Input)
        }
    }
}

pub fn render(source: &RenderSource, carpet_depth: u32) -> CliResult<String> {
    if carpet_depth > MAX_CARPET_DEPTH {
        return Err(Failure::input(format!("carpet depth {carpet_depth} exceeds {MAX_CARPET_DEPTH}")));
    }
    Ok(render_svg(&load_codebook(source)?, carpet_depth))
}

fn interval_json(b: &Interval) -> Value {
    json!({
        "lo": format_rational(&b.lo),
        "hi": format_rational(&b.hi),
        "exact": b.is_exact(),
        "lo_approx": to_f64(&b.lo),
        "hi_approx": to_f64(&b.hi),
    })
}

pub fn bounds(path: &str, depth: u32) -> CliResult<String> {
    let docs = parse_documents(&read_input(path)?).map_err(Failure::Input)?;
    let mut out = Vec::new();
    for d in &docs {
        let cb = d.codebook().map_err(Failure::Input)?;
        out.push(json!({ "n": cb.len(), "depth": depth, "bounds": interval_json(&distortion_bounds(&cb, depth)?) }));
    }
    Ok(to_json(&out))
}

pub fn atoms(depth: u32) -> CliResult<String> {
    Ok(measure::atoms_csv(depth)?)
}

fn trap_json(c: &TrapCase) -> Value {
    json!({
        "start": CodebookDocument::from_codebook(&c.start, Provenance::Constructed),
        "is_cvt": c.is_cvt,
        "exact_distortion": rational_json(&c.exact_distortion),
        "bounds": interval_json(&c.bounds),
        "partial_sum": rational_json(&c.partial_sum),
        "lloyd": report_json(&c.lloyd),
        "drift": c.drift,
        "corrected_distortion": rational_json(&c.corrected_distortion),
        "optimum": rational_json(&c.optimum),
        "is_trap": c.is_trap(),
    })
}

pub fn trap(depth: u32) -> CliResult<String> {
    let r = diagonal_trap_check(depth)?;
    Ok(to_json(&json!({
        "depth": r.depth,
        "diagonal": trap_json(&r.diagonal),
        "beta3": trap_json(&r.beta3),
        "alpha3_distortion": rational_json(&r.alpha3_distortion),
    })))
}

/// Writes `text` to `out`, or to standard output when `out` is `None`.
pub fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Failure::Output),
        None => {
            use std::io::Write as _;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .context("cannot write to standard output")
                .map_err(Failure::Output)
        }
    }
}
