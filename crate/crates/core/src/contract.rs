//! Outer contractors: three-valued satisfaction tests and narrowing
//! operators that never discard a solution of the constraint.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::boxes::IntervalBox;
use crate::expr::{decompose, BinOp, Constraint, Operand, PrimOp, PrimitiveSystem, Rel, UnOp};
use crate::interval::{powi_dn, powi_up, Interval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SatVerdict {
    /// Every point of the box satisfies the constraint.
    True,
    /// No point of the box satisfies the constraint.
    False,
    Unknown,
}

/// Verdict of `rel` for an enclosure `f` of the constraint function.
pub fn verdict(f: Interval, rel: Rel) -> SatVerdict {
    if f.is_empty() {
        return SatVerdict::False;
    }
    match rel {
        Rel::Leq if f.hi() <= 0.0 => SatVerdict::True,
        Rel::Leq if f.lo() > 0.0 => SatVerdict::False,
        Rel::Geq if f.lo() >= 0.0 => SatVerdict::True,
        Rel::Geq if f.hi() < 0.0 => SatVerdict::False,
        _ => SatVerdict::Unknown,
    }
}

pub fn glob_sat(c: &Constraint, b: &IntervalBox) -> SatVerdict {
    glob_sat_dims(c, b.dims())
}

pub fn glob_sat_dims(c: &Constraint, dims: &[Interval]) -> SatVerdict {
    verdict(c.expr.eval(dims), c.rel)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContractorKind {
    Hc,
    Bc3,
}

impl ContractorKind {
    pub fn name(self) -> &'static str {
        match self {
            ContractorKind::Hc => "hc",
            ContractorKind::Bc3 => "bc3",
        }
    }
}

impl FromStr for ContractorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "hc" => Ok(ContractorKind::Hc),
            "bc3" => Ok(ContractorKind::Bc3),
            _ => Err(format!("unknown contractor `{s}` (expected hc or bc3)")),
        }
    }
}

/// Relative width decrease below which a sweep counts as stalled.
const STALL: f64 = 1e-12;
/// Upper bound on propagation sweeps per call.
const MAX_SWEEPS: usize = 64;
/// Upper bound on glob_sat calls per quasi-zero search.
const MAX_PROBES: usize = 4096;

fn shrunk(old: Interval, new: Interval) -> bool {
    let (w0, w1) = (old.width(), new.width());
    w0 - w1 > STALL * w0
}

/// An outer contractor bound to one constraint.
#[derive(Debug, Clone)]
pub struct OuterContractor {
    pub kind: ContractorKind,
    pub constraint: Constraint,
    system: PrimitiveSystem,
    /// BC3 quasi-zero width; 0 means canonical intervals.
    pub delta: f64,
}

impl OuterContractor {
    pub fn new(kind: ContractorKind, constraint: Constraint) -> Self {
        let system = decompose(&constraint);
        OuterContractor {
            kind,
            constraint,
            system,
            delta: 0.0,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn contract(&self, b: &IntervalBox) -> IntervalBox {
        match self.kind {
            ContractorKind::Hc => hc_system(&self.system, b),
            ContractorKind::Bc3 => bc3_with(&self.constraint, b, self.delta),
        }
    }
}

/// Hull-consistency contraction by forward evaluation and backward
/// projection over the primitive decomposition of `c`.
pub fn hc_contract(c: &Constraint, b: &IntervalBox) -> IntervalBox {
    hc_system(&decompose(c), b)
}

fn empty_like(b: &IntervalBox) -> IntervalBox {
    IntervalBox::new(vec![Interval::EMPTY; b.dim()])
}

pub(crate) fn hc_system(sys: &PrimitiveSystem, b: &IntervalBox) -> IntervalBox {
    if b.is_empty() {
        return b.clone();
    }
    let mut st = HcState {
        vars: b.dims().to_vec(),
        aux: vec![Interval::ENTIRE; sys.prims.len()],
    };
    for _ in 0..MAX_SWEEPS {
        let before = st.vars.clone();
        if !st.revise(sys) {
            return empty_like(b);
        }
        if !before.iter().zip(&st.vars).any(|(o, n)| shrunk(*o, *n)) {
            break;
        }
    }
    IntervalBox::new(st.vars)
}

struct HcState {
    vars: Vec<Interval>,
    aux: Vec<Interval>,
}

impl HcState {
    fn get(&self, o: Operand) -> Interval {
        match o {
            Operand::Var(k) => self.vars[k],
            Operand::Aux(k) => self.aux[k],
            Operand::Const(c) => c,
        }
    }

    /// Intersects operand `o` with `v`; false when it becomes empty.
    fn narrow(&mut self, o: Operand, v: Interval) -> bool {
        let slot = match o {
            Operand::Var(k) => &mut self.vars[k],
            Operand::Aux(k) => &mut self.aux[k],
            Operand::Const(c) => return c.overlaps(&v),
        };
        *slot = slot.intersect(&v);
        !slot.is_empty()
    }

    fn revise(&mut self, sys: &PrimitiveSystem) -> bool {
        for p in &sys.prims {
            let v = match p.op {
                PrimOp::Bin(op, a, b) => op.apply(self.get(a), self.get(b)),
                PrimOp::Un(op, a) => op.apply(self.get(a)),
            };
            let cur = self.aux[p.out].intersect(&v);
            if cur.is_empty() {
                return false;
            }
            self.aux[p.out] = cur;
        }
        if !self.narrow(sys.root, sys.rel.admissible()) {
            return false;
        }
        for p in sys.prims.iter().rev() {
            let z = self.aux[p.out];
            let ok = match p.op {
                PrimOp::Bin(op, a, b) => self.project_binary(op, z, a, b),
                PrimOp::Un(op, a) => self.project_unary(op, z, a),
            };
            if !ok {
                return false;
            }
        }
        true
    }

    fn project_binary(&mut self, op: BinOp, z: Interval, a: Operand, b: Operand) -> bool {
        let y = self.get(b);
        match op {
            BinOp::Add => self.narrow(a, z - y) && self.narrow(b, z - self.get(a)),
            BinOp::Sub => self.narrow(a, z + y) && self.narrow(b, self.get(a) - z),
            BinOp::Mul => {
                // z = x*y: x in z/y, y in z/x, keeping both pieces apart
                self.narrow(a, div_into(z, y, self.get(a))) && self.narrow(b, div_into(z, self.get(a), y))
            }
            BinOp::Div => {
                // z = x/y with y != 0: x in z*y, y in x/z
                self.narrow(a, z * y) && self.narrow(b, div_into(self.get(a), z, y))
            }
        }
    }

    fn project_unary(&mut self, op: UnOp, z: Interval, a: Operand) -> bool {
        let x = self.get(a);
        let v = match op {
            UnOp::Neg => -z,
            UnOp::Sqr => even_root(z, 2, x),
            UnOp::Pow(n) if n % 2 == 0 => even_root(z, n, x),
            UnOp::Pow(n) => odd_root(z, n),
            UnOp::Sqrt => z.intersect(&Interval::NON_NEGATIVE).sqr(),
            UnOp::Exp => z.log(),
            UnOp::Log => z.exp(),
            UnOp::Sin | UnOp::Cos => return true,
        };
        self.narrow(a, v)
    }
}

/// `{q in cur : q * d in n}` enclosed via extended division.
fn div_into(n: Interval, d: Interval, cur: Interval) -> Interval {
    // q * 0 = 0 for every q
    if d.contains_zero() && n.contains_zero() {
        return cur;
    }
    let (p, q) = n.div_split(d);
    cur.intersect(&p).hull(&cur.intersect(&q))
}

/// A double `r >= 0` not above the real `n`-th root of `x`.
fn root_dn(x: f64, n: u32) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return f64::INFINITY;
    }
    let mut r = x.powf(1.0 / n as f64);
    while r > 0.0 && powi_up(r, n) > x {
        r = r.next_down();
    }
    r
}

/// A double `r >= 0` not below the real `n`-th root of `x`.
fn root_up(x: f64, n: u32) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return f64::INFINITY;
    }
    let mut r = x.powf(1.0 / n as f64);
    while powi_dn(r, n) < x {
        r = r.next_up();
    }
    r
}

fn even_root(z: Interval, n: u32, cur: Interval) -> Interval {
    let z = z.intersect(&Interval::NON_NEGATIVE);
    if z.is_empty() {
        return Interval::EMPTY;
    }
    let (lo, hi) = (root_dn(z.lo(), n), root_up(z.hi(), n));
    let pos = Interval::new(lo, hi);
    let neg = -pos;
    cur.intersect(&pos).hull(&cur.intersect(&neg))
}

fn odd_root(z: Interval, n: u32) -> Interval {
    if z.is_empty() {
        return Interval::EMPTY;
    }
    let signed_dn = |x: f64| if x >= 0.0 { root_dn(x, n) } else { -root_up(-x, n) };
    let signed_up = |x: f64| if x >= 0.0 { root_up(x, n) } else { -root_dn(-x, n) };
    Interval::new(signed_dn(z.lo()), signed_up(z.hi()))
}

/// Box-consistency contraction with canonical quasi-zeros.
pub fn bc3_contract(c: &Constraint, b: &IntervalBox) -> IntervalBox {
    bc3_with(c, b, 0.0)
}

/// Box-consistency contraction; quasi-zeros have width at most `delta`, or
/// are canonical when `delta` is 0.
pub fn bc3_with(c: &Constraint, b: &IntervalBox, delta: f64) -> IntervalBox {
    if b.is_empty() {
        return b.clone();
    }
    match glob_sat(c, b) {
        SatVerdict::True => return b.clone(),
        SatVerdict::False => return empty_like(b),
        SatVerdict::Unknown => {}
    }
    let vars: Vec<usize> = (0..b.dim()).filter(|&k| c.expr.mentions(k)).collect();
    let mut dims = b.dims().to_vec();
    for _ in 0..MAX_SWEEPS {
        let mut progress = false;
        for &k in &vars {
            let old = dims[k];
            let Some(lo) = quasi_zero(c, &mut dims, k, delta, true) else {
                return empty_like(b);
            };
            dims[k] = Interval::new(lo, old.hi());
            let Some(hi) = quasi_zero(c, &mut dims, k, delta, false) else {
                return empty_like(b);
            };
            dims[k] = Interval::new(lo, hi);
            progress |= shrunk(old, dims[k]);
        }
        if !progress {
            break;
        }
    }
    IntervalBox::new(dims)
}

fn small_enough(i: Interval, delta: f64) -> bool {
    i.is_canonical() || (delta > 0.0 && i.width() <= delta)
}

/// Outer endpoint of the leftmost (or rightmost) quasi-zero of `c` along
/// dimension `k`. Leaves `dims[k]` as it found it.
fn quasi_zero(c: &Constraint, dims: &mut [Interval], k: usize, delta: f64, left: bool) -> Option<f64> {
    let full = dims[k];
    // the extreme canonical interval settles the common no-narrowing case
    let end = if left {
        Interval::new(full.lo(), full.lo().next_up().min(full.hi()))
    } else {
        Interval::new(full.hi().next_down().max(full.lo()), full.hi())
    };
    dims[k] = end;
    if glob_sat_dims(c, dims) != SatVerdict::False {
        dims[k] = full;
        return Some(if left { full.lo() } else { full.hi() });
    }
    let mut stack = vec![full];
    let mut probes = 0;
    let mut found = None;
    while let Some(i) = stack.pop() {
        if probes >= MAX_PROBES {
            // out of budget: everything still pending may hold solutions
            found = Some(if left { i.lo() } else { i.hi() });
            break;
        }
        probes += 1;
        dims[k] = i;
        if glob_sat_dims(c, dims) == SatVerdict::False {
            continue;
        }
        if small_enough(i, delta) {
            found = Some(if left { i.lo() } else { i.hi() });
            break;
        }
        let m = i.mid();
        let (l, r) = (Interval::new(i.lo(), m), Interval::new(m, i.hi()));
        if left {
            stack.push(r);
            stack.push(l);
        } else {
            stack.push(l);
            stack.push(r);
        }
    }
    dims[k] = full;
    found
}
