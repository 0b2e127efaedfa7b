//! The benchmark problems, with independent oracles for membership in the
//! solution set.
//!
//! Builders produce [`Problem`]s from expression trees. Oracles never touch
//! those trees: each benchmark's residuals are restated as plain Rust over the
//! [`Scalar`] trait, so a transcription slip in one cannot hide in the other.

use std::fmt;

use crate::boxes::IntervalBox;
use crate::expr::{Constraint, Expr, Num, Problem, Quantifier, Rel};
use crate::interval::Interval;
use crate::scalar::{Dual, Scalar};

pub const NAMES: [&str; 12] = [
    "parabola",
    "circle1",
    "circle2",
    "circle3",
    "satellite",
    "robot",
    "pointpath",
    "projection4",
    "projection5",
    "projection8",
    "garloffgraf1",
    "garloffgraf2",
];

/// The quantified oracles certify on a grid of `2^ORACLE_DEPTH` t-cells.
pub const ORACLE_DEPTH: u32 = 12;

/// Extra halvings allowed inside grid cells that are still ambiguous.
pub const ORACLE_LOCAL_DEPTH: u32 = 12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BenchError {
    #[error("unknown benchmark `{0}`")]
    Unknown(String),
    #[error("expected a point with {expected} coordinates, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("point lies outside the initial box")]
    OutOfDomain,
    #[error("no area oracle for `{0}`")]
    NoAreaOracle(String),
}

/// A wall-clock figure from the published comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Timing {
    Seconds(f64),
    /// The run was cut off at this many seconds.
    AtLeast(f64),
    /// Not reported.
    Missing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    /// `false` for time to first inner box, `true` for a complete paving.
    pub all_solutions: bool,
    pub epsilon: Option<f64>,
    pub jla: Timing,
    pub ipabc: Timing,
}

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub name: &'static str,
    pub problem: Problem,
    /// Constants not given by the published description and chosen here.
    pub reconstructed: Vec<&'static str>,
    pub reference: Vec<Reference>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Solution,
    NonSolution,
    /// Neither membership nor a violation could be certified.
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Solution => "SOLUTION",
            Verdict::NonSolution => "NONSOLUTION",
            Verdict::Undecided => "UNDECIDED",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Id {
    Parabola,
    Circle(usize),
    Satellite,
    Robot,
    PointPath,
    Projection(usize),
    Garloff1,
    Garloff2,
}

fn id_of(name: &str) -> Result<Id, BenchError> {
    Ok(match name {
        "parabola" => Id::Parabola,
        "circle1" => Id::Circle(1),
        "circle2" => Id::Circle(2),
        "circle3" => Id::Circle(3),
        "satellite" => Id::Satellite,
        "robot" => Id::Robot,
        "pointpath" => Id::PointPath,
        "projection4" => Id::Projection(4),
        "projection5" => Id::Projection(5),
        "projection8" => Id::Projection(8),
        "garloffgraf1" => Id::Garloff1,
        "garloffgraf2" => Id::Garloff2,
        _ => return Err(BenchError::Unknown(name.to_string())),
    })
}

pub fn build(name: &str) -> Result<Benchmark, BenchError> {
    let id = id_of(name)?;
    let name = NAMES.iter().copied().find(|n| *n == name).expect("listed");
    let (problem, reconstructed) = match id {
        Id::Parabola => (parabola(), vec![]),
        Id::Circle(n) => circle(n),
        Id::Satellite => satellite(),
        Id::Robot => (robot(), vec![]),
        Id::PointPath => pointpath(),
        Id::Projection(n) => projection(n),
        Id::Garloff1 => (garloffgraf1(), vec![]),
        Id::Garloff2 => (garloffgraf2(), vec![]),
    };
    Ok(Benchmark {
        name,
        problem,
        reconstructed,
        reference: reference(id),
    })
}

// ---------------------------------------------------------------------------
// Expression builders

fn v(k: usize) -> Expr {
    Expr::var(k)
}

fn n(x: f64) -> Expr {
    Expr::num(x)
}

/// A decimal literal as the parser would read it.
fn lit(text: &str) -> Expr {
    Expr::Num(Num::from_literal(text).expect("valid literal"))
}

/// A constant given as a decimal string or a multiple of pi (`"pi/2"`).
fn konst(text: &str) -> Expr {
    match text {
        "pi" => Expr::Pi,
        "pi/2" => Expr::Pi / n(2.0),
        _ => lit(text),
    }
}

fn ge(a: Expr, b: Expr) -> Constraint {
    Constraint::new(a, Rel::Geq, b)
}

fn le(a: Expr, b: Expr) -> Constraint {
    Constraint::new(a, Rel::Leq, b)
}

fn itv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi)
}

/// Encloses `[-pi, pi]` with doubles.
fn minus_pi_pi() -> Interval {
    itv(-Interval::PI.hi(), Interval::PI.hi())
}

/// Encloses `[0, 2 pi]` with doubles.
fn zero_two_pi() -> Interval {
    itv(0.0, (Interval::PI * Interval::point(2.0)).hi())
}

fn problem(
    vars: &[&str],
    domain: Vec<Interval>,
    constraints: Vec<Constraint>,
    quantified: bool,
) -> Problem {
    let quantifier = quantified.then(|| Quantifier {
        var: vars.len() - 1,
        domain: *domain.last().expect("quantified variable"),
    });
    Problem {
        vars: vars.iter().map(|s| s.to_string()).collect(),
        domain: IntervalBox::new(domain),
        constraints,
        quantifier,
    }
}

fn parabola() -> Problem {
    let (a, b, c, t) = (v(0), v(1), v(2), v(3));
    problem(
        &["a", "b", "c", "t"],
        vec![itv(0.0, 1.0), itv(0.0, 1.0), itv(0.0, 1.0), itv(0.0, 2.0)],
        vec![ge(a * t.clone().sqr() + b * t.clone() + c, n(2.0) * t - n(1.0))],
        true,
    )
}

/// Circle radii and phases; the first circle has no phase term.
const CIRCLES: [(&str, &str); 3] = [("2.5", ""), ("1.5", "pi/2"), ("3.5", "pi")];

fn circle(count: usize) -> (Problem, Vec<&'static str>) {
    let (x, y, t) = (v(0), v(1), v(2));
    let constraints = CIRCLES[..count]
        .iter()
        .map(|&(r, phase)| {
            let angle = if phase.is_empty() {
                t.clone()
            } else {
                t.clone() + konst(phase)
            };
            let dx = lit(r) * angle.clone().sin() - x.clone();
            let dy = lit(r) * angle.cos() - y.clone();
            ge((dx.sqr() + dy.sqr()).sqrt(), lit("0.5"))
        })
        .collect();
    let reconstructed = match count {
        1 => vec![],
        2 => vec!["second circle radius 1.5 and phase pi/2"],
        _ => vec![
            "second circle radius 1.5 and phase pi/2",
            "third circle radius 3.5 and phase pi",
        ],
    };
    (
        problem(
            &["x", "y", "t"],
            vec![itv(-5.0, 5.0), itv(-5.0, 5.0), minus_pi_pi()],
            constraints,
            true,
        ),
        reconstructed,
    )
}

/// Known satellites as (phi, theta, psi); all have d = 5 and omega = 1.
const SATELLITES: [(&str, &str, &str); 3] = [("0", "0", "0"), ("1", "1", "1"), ("2", "1.5", "1.5")];

/// Position of a satellite at angle `a = omega t + phi`.
fn orbit(d: Expr, theta: Expr, psi: Expr, a: Expr) -> [Expr; 3] {
    let (sa, ca) = (a.clone().sin(), a.cos());
    [
        d.clone() * theta.clone().cos() * sa.clone(),
        d.clone() * (psi.clone().sin() * theta.clone().sin() * sa.clone() + psi.clone().cos() * ca.clone()),
        d * (-(psi.clone().cos() * theta.sin() * sa) + psi.sin() * ca),
    ]
}

fn satellite() -> (Problem, Vec<&'static str>) {
    let (theta, phi, psi, t) = (v(0), v(1), v(2), v(3));
    let unknown = orbit(n(5.0), theta, psi, t.clone() + phi);
    let constraints = SATELLITES
        .iter()
        .map(|&(p, th, ps)| {
            let angle = if p == "0" { t.clone() } else { t.clone() + lit(p) };
            let known = orbit(n(5.0), lit(th), lit(ps), angle);
            let d2 = known
                .into_iter()
                .zip(unknown.iter().cloned())
                .map(|(k, u)| (k - u).sqr())
                .reduce(|a, b| a + b)
                .expect("three coordinates");
            ge(d2.sqrt(), n(1.0))
        })
        .collect();
    (
        problem(
            &["theta", "phi", "psi", "t"],
            vec![zero_two_pi(), zero_two_pi(), zero_two_pi(), minus_pi_pi()],
            constraints,
            true,
        ),
        vec![
            "unknown satellite orbit radius 5 and angular speed 1",
            "safety distance 1",
        ],
    )
}

fn robot() -> Problem {
    let (x, y, t) = (v(0), v(1), v(2));
    let a1 = t.clone() + Expr::Pi / n(4.0);
    let a2 = n(2.0) * t.clone() - n(1.0);
    let a3 = lit("0.2") * t + lit("0.1");
    let arm = |f: fn(Expr) -> Expr| {
        f(a1.clone())
            + n(2.0) * f(a1.clone() + a2.clone() - Expr::Pi)
            + f(a1.clone() + a2.clone() + a3.clone())
    };
    let px = arm(Expr::sin);
    let py = arm(Expr::cos);
    problem(
        &["x", "y", "t"],
        vec![itv(0.0, 5.0), itv(0.0, 5.0), itv(0.0, 2.0)],
        vec![ge(((x - px).sqr() + (y - py).sqr()).sqrt(), lit("0.5"))],
        true,
    )
}

/// Path endpoints M0 and M1.
const PATH_START: (f64, f64) = (0.0, 1.0);
const PATH_END: (f64, f64) = (10.0, 1.0);

/// Cubic Bezier coordinate with fixed endpoints `m0`, `m1` and free controls.
fn bezier(m0: f64, p1: Expr, p2: Expr, m1: f64, t: &Expr) -> Expr {
    let s = n(1.0) - t.clone();
    let mut terms = Vec::new();
    if m0 != 0.0 {
        terms.push(n(m0) * s.clone().powi(3));
    }
    terms.push(p1 * n(3.0) * t.clone() * s.clone().sqr());
    terms.push(p2 * n(3.0) * t.clone().sqr() * s);
    if m1 != 0.0 {
        terms.push(n(m1) * t.clone().powi(3));
    }
    terms.into_iter().reduce(|a, b| a + b).expect("nonempty")
}

fn pointpath() -> (Problem, Vec<&'static str>) {
    let t = v(4);
    let x = bezier(PATH_START.0, v(0), v(2), PATH_END.0, &t);
    let y = bezier(PATH_START.1, v(1), v(3), PATH_END.1, &t);
    let obstacle = ge((x.clone() - lit("4.8")).sqr() + (y.clone() - n(1.0)).sqr(), n(1.0));
    let floor = ge(y, x.sin());
    let d = itv(-10.0, 10.0);
    (
        problem(
            &["p1x", "p1y", "p2x", "p2y", "t"],
            vec![d, d, d, d, itv(0.0, 1.0)],
            vec![obstacle, floor],
            true,
        ),
        vec!["path endpoints M0 = (0, 1) and M1 = (10, 1)"],
    )
}

struct Sphere {
    xs: &'static str,
    /// `ys(t) = y0 + dy t`.
    y0: &'static str,
    dy: &'static str,
    zs: &'static str,
    r: &'static str,
    frame: [&'static str; 4],
}

const SPHERES: [Sphere; 2] = [
    Sphere {
        xs: "-8",
        y0: "-2",
        dy: "0.2",
        zs: "2",
        r: "0.5",
        frame: ["-0.4", "0.4", "-0.3", "0.3"],
    },
    Sphere {
        xs: "-9",
        y0: "1",
        dy: "-0.1",
        zs: "1.5",
        r: "0.4",
        frame: ["-0.5", "0.3", "-0.4", "0.2"],
    },
];

const CAMERA_Z: &str = "2";
const GAMMA: &str = "0.8";

/// A decimal constant, possibly negative.
fn slit(text: &str) -> Expr {
    match text.strip_prefix('-') {
        Some(rest) => -lit(rest),
        None => lit(text),
    }
}

fn sphere_y(s: &Sphere, t: &Expr) -> Expr {
    match s.dy.strip_prefix('-') {
        Some(rate) => slit(s.y0) - lit(rate) * t.clone(),
        None => slit(s.y0) + lit(s.dy) * t.clone(),
    }
}

/// The sphere center relative to the camera, in camera coordinates.
fn camera_frame(s: &Sphere, xc: &Expr, yc: &Expr, phi: &Expr, t: &Expr) -> [Expr; 3] {
    let ys = sphere_y(s, t);
    let dx = slit(s.xs) - xc.clone();
    let dz = slit(s.zs) - lit(CAMERA_Z);
    [
        ys - yc.clone(),
        -(dx.clone() * phi.clone().sin()) + dz.clone() * phi.clone().cos(),
        -(dx * phi.clone().cos()) + dz * phi.clone().sin(),
    ]
}

fn projection(count: usize) -> (Problem, Vec<&'static str>) {
    let (xc, yc, phi, t) = (v(0), v(1), v(2), v(3));
    let spheres = if count == 8 { &SPHERES[..] } else { &SPHERES[..1] };
    let mut constraints = Vec::new();
    for s in spheres {
        let [x, y, z] = camera_frame(s, &xc, &yc, &phi, &t);
        let depth = z / lit(GAMMA);
        let r = || lit(s.r);
        let [x1, x2, y1, y2] = s.frame.map(slit);
        constraints.push(le(x1, (x.clone() + r()) / depth.clone()));
        constraints.push(ge(x2, (x - r()) / depth.clone()));
        constraints.push(le(y1, (y.clone() + r()) / depth.clone()));
        constraints.push(ge(y2, (y - r()) / depth));
    }
    if count == 5 {
        let s = &SPHERES[0];
        let ys = sphere_y(s, &t);
        let d2 = (slit(s.xs) - xc.clone()).sqr()
            + (ys - yc.clone()).sqr()
            + (slit(s.zs) - lit(CAMERA_Z)).sqr();
        constraints.push(ge(d2.sqrt(), n(6.0)));
    }
    let mut reconstructed = vec![
        "camera height 2, tilt 0, focal factor 0.8",
        "time range [0, 20]",
        "sphere at (-8, -2 + 0.2 t, 2) with radius 0.5",
        "frame [-0.4, 0.4] x [-0.3, 0.3]",
    ];
    if count == 5 {
        reconstructed.push("minimum camera distance 6");
    }
    if count == 8 {
        reconstructed.push("second sphere at (-9, 1 - 0.1 t, 1.5) with radius 0.4");
        reconstructed.push("second frame [-0.5, 0.3] x [-0.4, 0.2]");
    }
    (
        problem(
            &["xc", "yc", "phic", "t"],
            vec![itv(-3.0, 3.0), itv(-3.0, 3.0), itv(-0.5, 0.5), itv(0.0, 20.0)],
            constraints,
            true,
        ),
        reconstructed,
    )
}

fn garloffgraf1() -> Problem {
    let (vv, w) = (v(0), v(1));
    let e = -(n(5.0) * vv.clone().sqr()) - n(13.0) * vv.clone() + vv * w.clone() - w;
    problem(
        &["v", "w"],
        vec![itv(2.0, 10.0), itv(40.0, 50.0)],
        vec![ge(e, n(0.0)).strict()],
        false,
    )
}

fn garloffgraf2() -> Problem {
    let (a, b, d) = (v(0), v(1), v(2));
    let gt = |e: Expr| ge(e, n(0.0)).strict();
    let c = |x: f64| n(x);
    let constraints = vec![
        gt(a.clone()),
        gt(b.clone()),
        gt(d.clone()),
        gt(a.clone() * b.clone().sqr() - d.clone().sqr()),
        gt(-(a.clone() * b.clone()) + a.clone() + d.clone().sqr() - d.clone() - c(1.0)),
        gt(a.clone() * b.clone() - a.clone() * d.clone() - c(2.0) * a.clone()
            + d.clone().powi(3)
            + c(4.0) * d.clone().sqr()
            + c(4.0) * d.clone()),
        gt(a.clone() * b.clone().powi(3) - a.clone() * b.clone().sqr() * d.clone()
            - c(4.0) * a.clone() * b.clone().sqr()
            + c(2.0) * a.clone() * b.clone() * d.clone()
            + c(4.0) * a.clone() * b.clone()
            + c(2.0) * b.clone() * d.clone().powi(3)
            + c(5.0) * b.clone() * d.clone().sqr()
            + c(2.0) * b.clone() * d.clone()
            - d.clone().powi(3)
            - c(4.0) * d.clone().sqr()
            - c(4.0) * d.clone()),
        gt(a.clone() * b.clone() - c(2.0) * a - b.clone() * d.clone().sqr()
            - c(4.0) * b.clone() * d.clone()
            - c(4.0) * b
            - c(2.0) * d.clone().sqr()
            + c(3.0) * d
            - c(2.0)),
    ];
    problem(
        &["A", "B", "D"],
        vec![itv(100.0, 120.0), itv(0.0, 2.0), itv(10.0, 20.0)],
        constraints,
        false,
    )
}

fn reference(id: Id) -> Vec<Reference> {
    use Timing::*;
    let first = |eps: f64, jla: Timing, ipabc: Timing| Reference {
        all_solutions: false,
        epsilon: Some(eps),
        jla,
        ipabc,
    };
    let all = |eps: Option<f64>, jla: Timing, ipabc: Timing| Reference {
        all_solutions: true,
        epsilon: eps,
        jla,
        ipabc,
    };
    match id {
        Id::Parabola => vec![
            first(1e-2, Seconds(0.04), Seconds(0.02)),
            first(1e-3, Seconds(0.77), Seconds(0.02)),
            all(None, Seconds(10.65), Seconds(1.22)),
        ],
        Id::Circle(1) => vec![],
        Id::Circle(2) => vec![
            first(1e-2, Seconds(3.52), Seconds(0.01)),
            first(1e-3, Seconds(3.57), Seconds(0.01)),
            all(None, Seconds(3.16), Seconds(0.15)),
        ],
        Id::Circle(_) => vec![all(None, Seconds(3.41), Seconds(0.55))],
        Id::Satellite => vec![
            first(1e-2, Seconds(0.91), Seconds(0.99)),
            first(1e-3, Seconds(68.7), Seconds(0.99)),
            all(None, AtLeast(600.0), Seconds(54.91)),
        ],
        Id::Robot => vec![
            first(1e-1, Seconds(0.13), Seconds(0.01)),
            first(1e-2, Seconds(0.50), Seconds(0.01)),
            all(None, Seconds(22.65), Seconds(1.97)),
        ],
        Id::PointPath => vec![
            first(0.5, Missing, Seconds(7.85)),
            all(Some(0.5), Missing, Seconds(534.14)),
        ],
        Id::Projection(4) => vec![
            first(1e-2, Seconds(0.11), Seconds(0.03)),
            first(1e-3, Seconds(1.11), Seconds(0.03)),
        ],
        Id::Projection(5) => vec![all(None, Seconds(182.09), Seconds(16.01))],
        Id::Projection(_) => vec![
            first(1e-1, Seconds(0.05), Seconds(0.07)),
            first(1e-2, Seconds(0.14), Seconds(0.07)),
            first(1e-3, Seconds(3.01), Seconds(0.07)),
            all(None, AtLeast(600.0), Seconds(3.43)),
        ],
        Id::Garloff1 => vec![
            first(1e-2, Seconds(15.79), Seconds(0.01)),
            all(Some(1e-2), Seconds(422.54), Seconds(1.49)),
        ],
        Id::Garloff2 => vec![
            first(1e-2, Seconds(5.58), Seconds(0.04)),
            all(Some(1e-2), Seconds(29.54), Seconds(1.04)),
        ],
    }
}

// ---------------------------------------------------------------------------
// Oracles

/// Residuals of the quantified benchmarks at free point `x` and parameter
/// `t`; the point is a solution iff all are nonnegative for every `t`.
fn residuals<S: Scalar>(id: Id, x: &[S], t: S) -> Vec<S> {
    match id {
        Id::Circle(count) => {
            let radii = [2.5, 1.5, 3.5];
            let phases = [S::lit(0.0), S::pi() / S::lit(2.0), S::pi()];
            (0..count)
                .map(|i| {
                    let a = if i == 0 { t } else { t + phases[i] };
                    let r = S::lit(radii[i]);
                    ((r * a.sin() - x[0]).sqr() + (r * a.cos() - x[1]).sqr()).sqrt() - S::lit(0.5)
                })
                .collect()
        }
        Id::Satellite => {
            let pos = |theta: S, phi: S, psi: S| {
                let a = t + phi;
                let d = S::lit(5.0);
                [
                    d * theta.cos() * a.sin(),
                    d * (psi.sin() * theta.sin() * a.sin() + psi.cos() * a.cos()),
                    d * (psi.sin() * a.cos() - psi.cos() * theta.sin() * a.sin()),
                ]
            };
            let me = pos(x[0], x[1], x[2]);
            [(0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (2.0, 1.5, 1.5)]
                .iter()
                .map(|&(phi, theta, psi)| {
                    let other = pos(S::lit(theta), S::lit(phi), S::lit(psi));
                    let d2 = (0..3).fold(S::lit(0.0), |acc, k| acc + (other[k] - me[k]).sqr());
                    d2.sqrt() - S::lit(1.0)
                })
                .collect()
        }
        Id::Robot => {
            let a1 = t + S::pi() / S::lit(4.0);
            let a12 = a1 + S::lit(2.0) * t - S::lit(1.0);
            let a123 = a12 + S::lit(0.2) * t + S::lit(0.1);
            let px = a1.sin() + S::lit(2.0) * (a12 - S::pi()).sin() + a123.sin();
            let py = a1.cos() + S::lit(2.0) * (a12 - S::pi()).cos() + a123.cos();
            vec![((x[0] - px).sqr() + (x[1] - py).sqr()).sqrt() - S::lit(0.5)]
        }
        Id::PointPath => {
            let s = S::lit(1.0) - t;
            let (b0, b1, b2, b3) = (
                s * s * s,
                S::lit(3.0) * t * s * s,
                S::lit(3.0) * t * t * s,
                t * t * t,
            );
            let px = S::lit(PATH_START.0) * b0 + x[0] * b1 + x[2] * b2 + S::lit(PATH_END.0) * b3;
            let py = S::lit(PATH_START.1) * b0 + x[1] * b1 + x[3] * b2 + S::lit(PATH_END.1) * b3;
            vec![
                (px - S::lit(4.8)).sqr() + (py - S::lit(1.0)).sqr() - S::lit(1.0),
                py - px.sin(),
            ]
        }
        Id::Projection(count) => {
            let (xc, yc, phi) = (x[0], x[1], x[2]);
            let g = S::lit(0.8);
            let spheres: &[(f64, f64, f64, f64, f64, [f64; 4])] = &[
                (-8.0, -2.0, 0.2, 2.0, 0.5, [-0.4, 0.4, -0.3, 0.3]),
                (-9.0, 1.0, -0.1, 1.5, 0.4, [-0.5, 0.3, -0.4, 0.2]),
            ];
            let used = if count == 8 { 2 } else { 1 };
            let mut out = Vec::new();
            for &(xs, y0, dy, zs, r, frame) in &spheres[..used] {
                let ys = S::lit(y0) + S::lit(dy) * t;
                let (ex, ez) = (S::lit(xs) - xc, S::lit(zs) - S::lit(2.0));
                let px = ys - yc;
                let py = ez * phi.cos() - ex * phi.sin();
                let pz = ez * phi.sin() - ex * phi.cos();
                let scale = g / pz;
                let r = S::lit(r);
                out.push((px + r) * scale - S::lit(frame[0]));
                out.push(S::lit(frame[1]) - (px - r) * scale);
                out.push((py + r) * scale - S::lit(frame[2]));
                out.push(S::lit(frame[3]) - (py - r) * scale);
                if count == 5 {
                    out.push((ex.sqr() + (ys - yc).sqr() + ez.sqr()).sqrt() - S::lit(6.0));
                }
            }
            out
        }
        Id::Parabola | Id::Garloff1 | Id::Garloff2 => unreachable!("closed-form oracle"),
    }
}

fn sign_verdict(values: &[Interval]) -> Verdict {
    if values.iter().all(|r| r.lo() >= 0.0) {
        Verdict::Solution
    } else if values.iter().any(|r| r.hi() < 0.0) {
        Verdict::NonSolution
    } else {
        Verdict::Undecided
    }
}

/// Minimum over `t` in `[0, 2]` of `a t^2 + (b - 2) t + c + 1`.
fn parabola_verdict(a: f64, b: f64, c: f64) -> Verdict {
    let p = Interval::point;
    let q = |t: f64| p(a) * p(t).sqr() + (p(b) - p(2.0)) * p(t) + p(c) + p(1.0);
    let ends = Interval::new(q(0.0).lo().min(q(2.0).lo()), q(0.0).hi().min(q(2.0).hi()));
    if a == 0.0 {
        return sign_verdict(&[ends]);
    }
    // Vertex at t* = (2 - b) / (2a), value c + 1 - (2 - b)^2 / (4a).
    let num = p(2.0) - p(b);
    let four_a = p(4.0) * p(a);
    let vertex = p(c) + p(1.0) - num.sqr() / four_a;
    if num.hi() < four_a.lo() {
        // t* in [0, 2): the vertex is the minimum.
        sign_verdict(&[vertex])
    } else if num.lo() > four_a.hi() {
        sign_verdict(&[ends])
    } else {
        // t* is within rounding of 2; the true minimum lies between.
        let lower = Interval::new(vertex.lo().min(ends.lo()), ends.hi());
        sign_verdict(&[lower])
    }
}

fn garloff1_verdict(vv: f64, w: f64) -> Verdict {
    // w > (5 v^2 + 13 v) / (v - 1) for v > 1.
    let p = Interval::point;
    let h = (p(5.0) * p(vv).sqr() + p(13.0) * p(vv)) / (p(vv) - p(1.0));
    sign_verdict(&[p(w) - h])
}

fn garloff2_verdict(x: &[f64]) -> Verdict {
    let p = Interval::point;
    let (a, b, d) = (p(x[0]), p(x[1]), p(x[2]));
    let k = p;
    sign_verdict(&[
        a,
        b,
        d,
        a * b.sqr() - d.sqr(),
        -(a * b) + a + d.sqr() - d - k(1.0),
        a * b - a * d - k(2.0) * a + d.powi(3) + k(4.0) * d.sqr() + k(4.0) * d,
        a * b.powi(3) - a * b.sqr() * d - k(4.0) * a * b.sqr() + k(2.0) * a * b * d + k(4.0) * a * b
            + k(2.0) * b * d.powi(3)
            + k(5.0) * b * d.sqr()
            + k(2.0) * b * d
            - d.powi(3)
            - k(4.0) * d.sqr()
            - k(4.0) * d,
        a * b - k(2.0) * a - b * d.sqr() - k(4.0) * b * d - k(4.0) * b - k(2.0) * d.sqr() + k(3.0) * d
            - k(2.0),
    ])
}

/// Residual enclosures over the t-cell `cell`: the natural extension
/// intersected with the mean-value form around the midpoint.
fn cell_residuals(id: Id, xs: &[Interval], xd: &[Dual], cell: Interval) -> Vec<Interval> {
    let natural = residuals(id, xs, cell);
    let m = Interval::point(cell.mid());
    let at_mid = residuals(id, xs, m);
    let slope = residuals(id, xd, Dual::var(cell));
    natural
        .iter()
        .zip(at_mid.iter().zip(&slope))
        .map(|(n, (c, s))| {
            let mv = *c + s.d * (cell - m);
            let both = n.intersect(&mv);
            if both.is_empty() {
                *n
            } else {
                both
            }
        })
        .collect()
}

/// Certifies `forall t in j` on a grid of `2^depth` cells, halving
/// ambiguous grid cells at most [`ORACLE_LOCAL_DEPTH`] more times. A cell
/// still ambiguous after that is probed at its endpoints and midpoint for a
/// certain violation.
fn certify_forall(id: Id, x: &[f64], j: Interval, depth: u32) -> Verdict {
    let xs: Vec<Interval> = x.iter().map(|&xi| Interval::point(xi)).collect();
    let xd: Vec<Dual> = xs.iter().map(|&xi| Dual::constant(xi)).collect();
    let mut stack = vec![(j, 0u32)];
    let mut undecided = false;
    while let Some((cell, level)) = stack.pop() {
        match sign_verdict(&cell_residuals(id, &xs, &xd, cell)) {
            Verdict::Solution => continue,
            Verdict::NonSolution => return Verdict::NonSolution,
            Verdict::Undecided => {}
        }
        if level < depth + ORACLE_LOCAL_DEPTH {
            let m = cell.mid();
            stack.push((Interval::new(m, cell.hi()), level + 1));
            stack.push((Interval::new(cell.lo(), m), level + 1));
            continue;
        }
        for t in [cell.lo(), cell.mid(), cell.hi()] {
            if sign_verdict(&residuals(id, &xs, Interval::point(t))) == Verdict::NonSolution {
                return Verdict::NonSolution;
            }
        }
        undecided = true;
    }
    if undecided {
        Verdict::Undecided
    } else {
        Verdict::Solution
    }
}

/// Decides whether the point `x` (one coordinate per free variable, in
/// problem order) belongs to the solution set, using `2^ORACLE_DEPTH`
/// t-cells for quantified benchmarks.
///
/// Strict inequalities are judged as their non-strict closures.
pub fn oracle_eval(name: &str, x: &[f64]) -> Result<Verdict, BenchError> {
    oracle_eval_at_depth(name, x, ORACLE_DEPTH)
}

pub fn oracle_eval_at_depth(name: &str, x: &[f64], depth: u32) -> Result<Verdict, BenchError> {
    let id = id_of(name)?;
    let b = build(name)?;
    let free = b.problem.free_vars();
    if x.len() != free.len() {
        return Err(BenchError::Arity {
            expected: free.len(),
            got: x.len(),
        });
    }
    if free.iter().zip(x).any(|(&k, &xi)| !b.problem.domain.get(k).contains(xi)) {
        return Err(BenchError::OutOfDomain);
    }
    Ok(match id {
        Id::Parabola => parabola_verdict(x[0], x[1], x[2]),
        Id::Garloff1 => garloff1_verdict(x[0], x[1]),
        Id::Garloff2 => garloff2_verdict(x),
        _ => {
            let j = b.problem.quantifier.as_ref().expect("quantified").domain;
            certify_forall(id, x, j, depth)
        }
    })
}

/// Area of the solution set of `garloffgraf1` inside `region` (over `v`,
/// `w`) by the midpoint rule on `cells x cells` cells.
pub fn oracle_area(name: &str, region: &IntervalBox, cells: usize) -> Result<f64, BenchError> {
    if id_of(name)? != Id::Garloff1 {
        return Err(BenchError::NoAreaOracle(name.to_string()));
    }
    if region.dim() != 2 {
        return Err(BenchError::Arity {
            expected: 2,
            got: region.dim(),
        });
    }
    let (vr, wr) = (region.get(0), region.get(1));
    if vr.is_empty() || wr.is_empty() {
        return Ok(0.0);
    }
    let (dv, dw) = (vr.width() / cells as f64, wr.width() / cells as f64);
    if dv == 0.0 || dw == 0.0 {
        return Ok(0.0);
    }
    let mut count = 0usize;
    for i in 0..cells {
        let vv = vr.lo() + (i as f64 + 0.5) * dv;
        if vv <= 1.0 {
            continue;
        }
        let h = (5.0 * vv * vv + 13.0 * vv) / (vv - 1.0);
        for k in 0..cells {
            let w = wr.lo() + (k as f64 + 0.5) * dw;
            if w > h {
                count += 1;
            }
        }
    }
    Ok(count as f64 * dv * dw)
}

/// Exact area of the `garloffgraf1` solution set over its initial box.
///
/// Over `v` in `[2, 10]` the set is `h(v) < w <= 50` with
/// `h(v) = 5v + 18 + 18/(v - 1)`; `h(v) = 50` at `v2 = (37 + sqrt 369)/10`
/// and `h >= 40` throughout.
pub fn garloffgraf1_area() -> f64 {
    let v2 = (37.0 + 369f64.sqrt()) / 10.0;
    32.0 * (v2 - 2.0) - 2.5 * (v2 * v2 - 4.0) - 18.0 * (v2 - 1.0).ln()
}

/// A point sampled uniformly from the free dimensions of `b`.
pub fn sample_point(b: &IntervalBox, free: &[usize], u: impl FnMut() -> f64) -> Vec<f64> {
    let mut u = u;
    free.iter()
        .map(|&k| {
            let d = b.get(k);
            (d.lo() + u() * d.width()).clamp(d.lo(), d.hi())
        })
        .collect()
}

/// The corners of `b` over the free dimensions.
pub fn corners(b: &IntervalBox, free: &[usize]) -> Vec<Vec<f64>> {
    (0..1usize << free.len())
        .map(|mask| {
            free.iter()
                .enumerate()
                .map(|(i, &k)| {
                    let d = b.get(k);
                    if mask >> i & 1 == 1 {
                        d.hi()
                    } else {
                        d.lo()
                    }
                })
                .collect()
        })
        .collect()
}
