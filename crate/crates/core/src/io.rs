//! Paving files and SVG rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::boxes::IntervalBox;
use crate::contract::ContractorKind;
use crate::expr::Problem;
use crate::interval::Interval;
use crate::solver::{Method, Paving, Schedule, SolverConfig, Solution, Strategy};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("malformed paving file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid paving file: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantifierRecord {
    pub var: String,
    pub lo: f64,
    pub hi: f64,
}

/// The run that produced a paving.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algo: Method,
    pub eps: f64,
    pub omega: f64,
    pub contractor: ContractorKind,
    pub strategy: Strategy,
    pub schedule: Schedule,
    pub seed: u64,
    pub first_only: bool,
    pub timeout_s: Option<f64>,
}

impl RunRecord {
    pub fn new(method: Method, cfg: &SolverConfig) -> Self {
        RunRecord {
            algo: method,
            eps: cfg.epsilon,
            omega: cfg.omega,
            contractor: cfg.contractor,
            strategy: cfg.strategy,
            schedule: cfg.schedule,
            seed: cfg.seed,
            first_only: cfg.first_only,
            timeout_s: cfg.timeout.map(|t| t.as_secs_f64()),
        }
    }
}

/// Boxes are lists of `[lo, hi]` pairs, one per variable in `vars` order.
pub type BoxRecord = Vec<[f64; 2]>;

/// The on-disk form of a paving (`paving.json`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PavingFile {
    pub vars: Vec<String>,
    pub quantifier: Option<QuantifierRecord>,
    pub inner: Vec<BoxRecord>,
    pub outer: Vec<BoxRecord>,
    pub undecided: Vec<BoxRecord>,
    pub config: RunRecord,
}

fn record(b: &IntervalBox) -> BoxRecord {
    b.dims().iter().map(|d| [d.lo(), d.hi()]).collect()
}

fn unrecord(r: &BoxRecord) -> IntervalBox {
    IntervalBox::new(r.iter().map(|&[lo, hi]| Interval::new(lo, hi)).collect())
}

impl PavingFile {
    pub fn new(problem: &Problem, solution: &Solution, method: Method, cfg: &SolverConfig) -> Self {
        let set = |s: &[IntervalBox]| s.iter().map(record).collect();
        PavingFile {
            vars: problem.vars.clone(),
            quantifier: problem.quantifier.as_ref().map(|q| QuantifierRecord {
                var: problem.vars[q.var].clone(),
                lo: q.domain.lo(),
                hi: q.domain.hi(),
            }),
            inner: set(&solution.paving.inner),
            outer: set(&solution.paving.outer),
            undecided: set(&solution.paving.undecided),
            config: RunRecord::new(method, cfg),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite doubles serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        let file: PavingFile = serde_json::from_str(text)?;
        file.validate()?;
        Ok(file)
    }

    fn validate(&self) -> Result<(), IoError> {
        let n = self.vars.len();
        for (kind, set) in [("inner", &self.inner), ("outer", &self.outer), ("undecided", &self.undecided)] {
            for (i, b) in set.iter().enumerate() {
                if b.len() != n {
                    return Err(IoError::Invalid(format!(
                        "{kind} box {i} has {} components, expected {n}",
                        b.len()
                    )));
                }
                if b.iter().any(|&[lo, hi]| !(lo <= hi)) {
                    return Err(IoError::Invalid(format!("{kind} box {i} has an inverted bound")));
                }
            }
        }
        if let Some(q) = &self.quantifier {
            if !self.vars.contains(&q.var) {
                return Err(IoError::Invalid(format!("unknown quantified variable `{}`", q.var)));
            }
        }
        Ok(())
    }

    pub fn paving(&self) -> Paving {
        let set = |s: &[BoxRecord]| s.iter().map(unrecord).collect();
        Paving {
            inner: set(&self.inner),
            outer: set(&self.outer),
            undecided: set(&self.undecided),
        }
    }
}

/// Drawing area of an SVG rendering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct View {
    pub x: Interval,
    pub y: Interval,
    pub width: f64,
    pub height: f64,
}

const INNER_FILL: &str = "#2b8a3e";
const OUTER_FILL: &str = "#e9ecef";
const UNDECIDED_STROKE: &str = "#f08c00";

/// Renders the projection of `paving` on dimensions `dx`, `dy`: outer boxes
/// light, undecided boxes outlined, inner boxes filled and drawn last.
pub fn render_svg(paving: &Paving, dx: usize, dy: usize, view: View) -> String {
    let (sx, sy) = (view.width / view.x.width(), view.height / view.y.width());
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = view.width,
        h = view.height
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let mut layer = |set: &[IntervalBox], style: &str| {
        let _ = writeln!(out, "<g {style}>");
        for b in set {
            let (x, y) = (b.get(dx), b.get(dy));
            let px = (x.lo() - view.x.lo()) * sx;
            // SVG y grows downwards
            let py = (view.y.hi() - y.hi()) * sy;
            let _ = writeln!(
                out,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/>"#,
                px,
                py,
                x.width() * sx,
                y.width() * sy
            );
        }
        out.push_str("</g>\n");
    };
    layer(&paving.outer, &format!(r#"class="outer" fill="{OUTER_FILL}" stroke="none""#));
    layer(
        &paving.undecided,
        &format!(r#"class="undecided" fill="none" stroke="{UNDECIDED_STROKE}" stroke-width="0.5""#),
    );
    layer(&paving.inner, &format!(r#"class="inner" fill="{INNER_FILL}" stroke="none""#));
    out.push_str("</svg>\n");
    out
}

/// A view covering dimensions `dx`, `dy` of `domain`, `size` pixels on its
/// longer side.
pub fn view_of(domain: &IntervalBox, dx: usize, dy: usize, size: f64) -> View {
    let (x, y) = (domain.get(dx), domain.get(dy));
    let scale = size / x.width().max(y.width());
    View {
        x,
        y,
        width: (x.width() * scale).max(1.0),
        height: (y.width() * scale).max(1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse;
    use crate::solver::ipa;
    use proptest::prelude::*;

    fn sample() -> (Problem, Solution, SolverConfig) {
        let p = parse("var a in [0, 1]; var b in [0, 1]; var c in [0, 1]\nforall t in [0, 2]:\na*t^2 + b*t + c >= 2*t - 1\n")
            .unwrap();
        let cfg = SolverConfig {
            epsilon: 0.25,
            ..Default::default()
        };
        let s = ipa(&p, &cfg).unwrap();
        (p, s, cfg)
    }

    #[test]
    fn json_round_trip() {
        let (p, s, cfg) = sample();
        let file = PavingFile::new(&p, &s, Method::Ipa, &cfg);
        let text = file.to_json();
        let back = PavingFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.paving(), s.paving);
        assert_eq!(back.to_json(), text);
        assert!(text.contains(r#""quantifier":{"var":"t","lo":0.0,"hi":2.0}"#));
        assert!(text.contains(r#""algo":"ipabc""#));
        assert!(text.contains(r#""schedule":"dfs""#));
    }

    #[test]
    fn json_rejects_bad_boxes() {
        let (p, s, cfg) = sample();
        let mut file = PavingFile::new(&p, &s, Method::Ipa, &cfg);
        file.inner.push(vec![[0.0, 1.0]]);
        assert!(matches!(PavingFile::from_json(&file.to_json()), Err(IoError::Invalid(_))));
        file.inner.pop();
        file.outer.push(vec![[1.0, 0.0]; 4]);
        assert!(matches!(PavingFile::from_json(&file.to_json()), Err(IoError::Invalid(_))));
        assert!(matches!(PavingFile::from_json("{"), Err(IoError::Json(_))));
    }

    #[test]
    fn svg_draws_inner_last() {
        let (p, s, _) = sample();
        let svg = render_svg(&s.paving, 0, 2, view_of(&p.domain, 0, 2, 400.0));
        let (o, u, i) = (
            svg.find(r#"class="outer""#).unwrap(),
            svg.find(r#"class="undecided""#).unwrap(),
            svg.find(r#"class="inner""#).unwrap(),
        );
        assert!(o < u && u < i);
        let rects = svg.matches("<rect x=").count();
        assert_eq!(rects, s.paving.len());
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn svg_flips_y() {
        let paving = Paving {
            inner: vec![IntervalBox::new(vec![Interval::new(0.0, 1.0), Interval::new(9.0, 10.0)])],
            ..Default::default()
        };
        let view = View {
            x: Interval::new(0.0, 10.0),
            y: Interval::new(0.0, 10.0),
            width: 100.0,
            height: 100.0,
        };
        let svg = render_svg(&paving, 0, 1, view);
        assert!(svg.contains(r#"<rect x="0.000" y="0.000" width="10.000" height="10.000"/>"#), "{svg}");
    }

    proptest! {
        #[test]
        fn arbitrary_doubles_round_trip(
            bounds in prop::collection::vec((-1e300f64..1e300, 0f64..1e300), 1..20)
        ) {
            let boxes: Vec<BoxRecord> = bounds.chunks(2)
                .map(|c| c.iter().map(|&(lo, w)| [lo, lo + w]).collect::<Vec<_>>())
                .filter(|b: &BoxRecord| b.len() == 2)
                .collect();
            let file = PavingFile {
                vars: vec!["x".into(), "y".into()],
                quantifier: None,
                inner: boxes.clone(),
                outer: vec![],
                undecided: boxes,
                config: RunRecord::new(Method::Subpaving, &SolverConfig::default()),
            };
            prop_assert_eq!(PavingFile::from_json(&file.to_json()).unwrap(), file);
        }
    }
}
