//! WebAssembly bindings for the browser demo in `www/`.
//!
//! The `*_impl` functions hold the logic and are tested natively; the
//! exported wrappers only convert errors.

use std::time::Duration;

use innerpave::bench;
use innerpave::contract::{bc3_contract, hc_contract, ContractorKind};
use innerpave::io::{render_svg, view_of};
use innerpave::solver::{solve, Method, SolverConfig};
use innerpave::{parse, IntervalBox, Problem};
use wasm_bindgen::prelude::*;

/// Hard caps so a page never hangs.
const MAX_ITERATIONS: u64 = 200_000;
const TIMEOUT: Duration = Duration::from_secs(10);

/// Outcome of [`solve_svg`].
#[wasm_bindgen(getter_with_clone)]
#[derive(Debug, Clone)]
pub struct Rendered {
    pub svg: String,
    pub summary: String,
    pub n_inner: usize,
    pub n_outer: usize,
    pub n_undecided: usize,
    pub inner_volume: f64,
}

fn load(text: &str) -> Result<Problem, String> {
    parse(text).map_err(|e| e.to_string())
}

fn var(p: &Problem, name: &str) -> Result<usize, String> {
    p.var_index(name.trim()).ok_or_else(|| format!("unknown variable `{}`", name.trim()))
}

pub fn benchmark_text_impl(name: &str) -> Result<String, String> {
    bench::build(name).map(|b| b.problem.to_string()).map_err(|e| e.to_string())
}

pub fn solve_svg_impl(text: &str, algo: &str, eps: f64, omega: f64, x: &str, y: &str) -> Result<Rendered, String> {
    let p = load(text)?;
    let method: Method = algo.parse()?;
    let (dx, dy) = (var(&p, x)?, var(&p, y)?);
    let cfg = SolverConfig {
        epsilon: eps,
        omega,
        timeout: Some(TIMEOUT),
        max_iterations: Some(MAX_ITERATIONS),
        ..SolverConfig::default()
    };
    let s = solve(&p, method, &cfg).map_err(|e| e.to_string())?;
    let svg = render_svg(&s.paving, dx, dy, view_of(&p.domain, dx, dy, 480.0));
    let stopped = if s.stats.timed_out || s.stats.exhausted {
        " (stopped early, rest undecided)"
    } else {
        ""
    };
    Ok(Rendered {
        summary: format!(
            "{} inner, {} outer, {} undecided boxes; inner volume {:.6}; {:.3} s{stopped}",
            s.paving.inner.len(),
            s.paving.outer.len(),
            s.paving.undecided.len(),
            s.inner_volume(),
            s.stats.elapsed.as_secs_f64()
        ),
        svg,
        n_inner: s.paving.inner.len(),
        n_outer: s.paving.outer.len(),
        n_undecided: s.paving.undecided.len(),
        inner_volume: s.inner_volume(),
    })
}

/// Contracts the problem's initial box with each constraint in turn, once,
/// and prints the result one variable per line.
pub fn contract_impl(text: &str, contractor: &str) -> Result<String, String> {
    let p = load(text)?;
    let kind: ContractorKind = contractor.parse()?;
    let mut b: IntervalBox = p.domain.clone();
    for c in &p.constraints {
        b = match kind {
            ContractorKind::Hc => hc_contract(c, &b),
            ContractorKind::Bc3 => bc3_contract(c, &b),
        };
        if b.is_empty() {
            return Ok("empty: no point of the box satisfies every constraint\n".to_string());
        }
    }
    Ok(p.vars
        .iter()
        .zip(b.dims())
        .map(|(v, d)| format!("{v} in [{}, {}]\n", d.lo(), d.hi()))
        .collect())
}

#[wasm_bindgen]
pub fn benchmark_names() -> Vec<String> {
    bench::NAMES.iter().map(|s| s.to_string()).collect()
}

#[wasm_bindgen]
pub fn benchmark_text(name: &str) -> Result<String, JsError> {
    benchmark_text_impl(name).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn solve_svg(text: &str, algo: &str, eps: f64, omega: f64, x: &str, y: &str) -> Result<Rendered, JsError> {
    solve_svg_impl(text, algo, eps, omega, x, y).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn contract(text: &str, contractor: &str) -> Result<String, JsError> {
    contract_impl(text, contractor).map_err(|e| JsError::new(&e))
}
