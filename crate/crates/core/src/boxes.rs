//! Boxes (Cartesian products of intervals) and the set operations used by the
//! solvers: hull, intersection, box difference and splitting.
//!
//! Boxes are positional: dimension `k` is the `k`-th variable of the owning
//! problem. Name-based access goes through [`crate::expr::Problem`].

use std::fmt;

use thiserror::Error;

use crate::interval::Interval;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoxError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("no dimension {0} in a box of dimension {1}")]
    NoSuchDimension(usize, usize),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("box difference requires the subtracted box to be inside the first")]
    NotASubset,
    #[error("no splittable dimension")]
    Atomic,
    #[error("cannot take the hull of an empty box set")]
    EmptySet,
}

/// A box of interval domains, one per variable.
#[derive(Clone, PartialEq)]
pub struct IntervalBox {
    dims: Vec<Interval>,
}

/// A set of boxes; the represented point set is the union of its members.
pub type BoxSet = Vec<IntervalBox>;

/// Which dimension [`split`] cuts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitPolicy {
    /// Widest splittable dimension; ties go to the lowest index.
    LargestFirst,
    /// First splittable dimension at or after `start`, cyclically.
    RoundRobin { start: usize },
}

impl IntervalBox {
    pub fn new(dims: Vec<Interval>) -> Self {
        IntervalBox { dims }
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[Interval] {
        &self.dims
    }

    pub fn get(&self, k: usize) -> Interval {
        self.dims[k]
    }

    /// EMPTY as soon as one component is.
    pub fn is_empty(&self) -> bool {
        self.dims.iter().any(Interval::is_empty)
    }

    /// `B[I_k <- J]`.
    pub fn replace(&self, k: usize, itv: Interval) -> Result<IntervalBox, BoxError> {
        if k >= self.dims.len() {
            return Err(BoxError::NoSuchDimension(k, self.dims.len()));
        }
        let mut b = self.clone();
        b.dims[k] = itv;
        Ok(b)
    }

    pub fn subset_of(&self, other: &IntervalBox) -> bool {
        self.dim() == other.dim()
            && (self.is_empty() || self.dims.iter().zip(&other.dims).all(|(a, b)| a.subset_of(b)))
    }

    pub fn intersect(&self, other: &IntervalBox) -> Result<IntervalBox, BoxError> {
        self.check_dim(other)?;
        Ok(IntervalBox::new(
            self.dims.iter().zip(&other.dims).map(|(a, b)| a.intersect(b)).collect(),
        ))
    }

    /// Product of widths over the given dimensions, 0 for an EMPTY box.
    pub fn volume_over(&self, dims: impl IntoIterator<Item = usize>) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        dims.into_iter().map(|k| self.dims[k].hi() - self.dims[k].lo()).product()
    }

    pub fn volume(&self) -> f64 {
        self.volume_over(0..self.dim())
    }

    /// Largest width among dimensions other than `exclude`.
    pub fn max_width(&self, exclude: Option<usize>) -> f64 {
        self.dims
            .iter()
            .enumerate()
            .filter(|(k, _)| Some(*k) != exclude)
            .map(|(_, d)| d.width())
            .fold(0.0, f64::max)
    }

    pub fn center(&self) -> Vec<f64> {
        self.dims.iter().map(Interval::mid).collect()
    }

    /// Shares a set of positive measure with `other` over the given dims.
    pub fn interiors_meet(&self, other: &IntervalBox, dims: &[usize]) -> bool {
        dims.iter().all(|&k| {
            let (a, b) = (self.dims[k], other.dims[k]);
            a.lo().max(b.lo()) < a.hi().min(b.hi())
        })
    }

    fn check_dim(&self, other: &IntervalBox) -> Result<(), BoxError> {
        if self.dim() != other.dim() {
            Err(BoxError::DimensionMismatch(self.dim(), other.dim()))
        } else {
            Ok(())
        }
    }
}

impl From<Vec<Interval>> for IntervalBox {
    fn from(dims: Vec<Interval>) -> Self {
        IntervalBox::new(dims)
    }
}

impl fmt::Debug for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, d) in self.dims.iter().enumerate() {
            if k > 0 {
                write!(f, " x ")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Smallest box containing every member of `set`.
pub fn hull(set: &[IntervalBox]) -> Result<IntervalBox, BoxError> {
    let (first, rest) = set.split_first().ok_or(BoxError::EmptySet)?;
    let mut dims = first.dims.clone();
    for b in rest {
        first.check_dim(b)?;
        for (d, x) in dims.iter_mut().zip(&b.dims) {
            *d = d.hull(x);
        }
    }
    Ok(IntervalBox::new(dims))
}

/// Box difference `outer ⊟ inner`, returning at most `2n` boxes.
///
/// Dimensions are swept in order; at step `k` the slabs `[lo_D, lo_B]` and
/// `[hi_B, hi_D]` are carved along dimension `k`, with dimensions before `k`
/// restricted to `inner` and dimensions after `k` spanning `outer`. The slabs
/// share only boundary faces with each other and with `inner`.
pub fn box_diff(outer: &IntervalBox, inner: &IntervalBox) -> Result<BoxSet, BoxError> {
    outer.check_dim(inner)?;
    if inner.is_empty() {
        return Ok(if outer.is_empty() { vec![] } else { vec![outer.clone()] });
    }
    if !inner.subset_of(outer) {
        return Err(BoxError::NotASubset);
    }
    let mut out = Vec::new();
    let mut core = outer.clone();
    for k in 0..outer.dim() {
        let (d, b) = (outer.dims[k], inner.dims[k]);
        if d.lo() < b.lo() {
            out.push(core.replace(k, Interval::new(d.lo(), b.lo()))?);
        }
        if b.hi() < d.hi() {
            out.push(core.replace(k, Interval::new(b.hi(), d.hi()))?);
        }
        core.dims[k] = b;
    }
    Ok(out)
}

/// Dimension that [`split`] would cut, if any.
pub fn split_dimension(b: &IntervalBox, exclude: Option<usize>, policy: SplitPolicy) -> Option<usize> {
    let splittable = |k: usize| Some(k) != exclude && !b.dims[k].is_canonical();
    match policy {
        SplitPolicy::LargestFirst => {
            let mut best: Option<(usize, f64)> = None;
            for k in (0..b.dim()).filter(|&k| splittable(k)) {
                let w = b.dims[k].width();
                if best.is_none_or(|(_, bw)| w > bw) {
                    best = Some((k, w));
                }
            }
            best.map(|(k, _)| k)
        }
        SplitPolicy::RoundRobin { start } => {
            let n = b.dim();
            (0..n).map(|i| (start + i) % n).find(|&k| splittable(k))
        }
    }
}

/// Cuts dimension `k` of `b` into `pieces` interior-disjoint parts.
pub fn split_at_dimension(b: &IntervalBox, k: usize, pieces: usize) -> BoxSet {
    let d = b.dims[k];
    let mut cuts = vec![d.lo()];
    for i in 1..pieces {
        let c = d.split_point(i, pieces);
        if c > *cuts.last().unwrap() && c < d.hi() {
            cuts.push(c);
        }
    }
    cuts.push(d.hi());
    cuts.windows(2)
        .map(|w| {
            let mut part = b.clone();
            part.dims[k] = Interval::new(w[0], w[1]);
            part
        })
        .collect()
}

/// `Split_k`: cuts one dimension chosen by `policy` into `k` parts. The
/// excluded dimension (the quantified variable) is never cut and is copied
/// into every part.
pub fn split(
    b: &IntervalBox,
    k: usize,
    exclude: Option<usize>,
    policy: SplitPolicy,
) -> Result<BoxSet, BoxError> {
    if b.is_empty() {
        return Err(BoxError::Atomic);
    }
    let dim = split_dimension(b, exclude, policy).ok_or(BoxError::Atomic)?;
    Ok(split_at_dimension(b, dim, k.max(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::next_float;
    use proptest::prelude::*;

    fn bx(v: &[(f64, f64)]) -> IntervalBox {
        IntervalBox::new(v.iter().map(|&(a, b)| Interval::new(a, b)).collect())
    }

    #[test]
    fn hull_and_intersect() {
        let h = hull(&[bx(&[(0.0, 1.0), (0.0, 1.0)]), bx(&[(2.0, 3.0), (0.0, 1.0)])]).unwrap();
        assert_eq!(h, bx(&[(0.0, 3.0), (0.0, 1.0)]));
        let i = bx(&[(0.0, 2.0), (0.0, 2.0)])
            .intersect(&bx(&[(1.0, 3.0), (3.0, 4.0)]))
            .unwrap();
        assert!(i.is_empty());
        let i = bx(&[(0.0, 2.0)]).intersect(&bx(&[(1.0, 3.0)])).unwrap();
        assert_eq!(i, bx(&[(1.0, 2.0)]));
        assert_eq!(
            bx(&[(0.0, 1.0)]).intersect(&bx(&[(0.0, 1.0), (0.0, 1.0)])),
            Err(BoxError::DimensionMismatch(1, 2))
        );
        assert_eq!(hull(&[]), Err(BoxError::EmptySet));
    }

    #[test]
    fn box_diff_sweep_order() {
        let d = bx(&[(0.0, 4.0), (0.0, 4.0)]);
        let b = bx(&[(1.0, 2.0), (1.0, 2.0)]);
        assert_eq!(
            box_diff(&d, &b).unwrap(),
            vec![
                bx(&[(0.0, 1.0), (0.0, 4.0)]),
                bx(&[(2.0, 4.0), (0.0, 4.0)]),
                bx(&[(1.0, 2.0), (0.0, 1.0)]),
                bx(&[(1.0, 2.0), (2.0, 4.0)]),
            ]
        );
        assert!(box_diff(&d, &d).unwrap().is_empty());
        let p = 1.0f64.next_down();
        assert_eq!(
            box_diff(&bx(&[(0.0, 1.0)]), &bx(&[(0.0, p)])).unwrap(),
            vec![bx(&[(p, 1.0)])]
        );
        assert_eq!(box_diff(&b, &d), Err(BoxError::NotASubset));
        let empty = IntervalBox::new(vec![Interval::EMPTY, Interval::new(0.0, 1.0)]);
        assert_eq!(box_diff(&d, &empty).unwrap(), vec![d.clone()]);
    }

    #[test]
    fn replace_dom() {
        let b = bx(&[(0.0, 1.0), (0.0, 1.0)]);
        assert_eq!(b.replace(1, Interval::new(5.0, 6.0)).unwrap(), bx(&[(0.0, 1.0), (5.0, 6.0)]));
        assert_eq!(b.replace(0, b.get(0)).unwrap(), b);
        assert_eq!(b.replace(2, Interval::ZERO), Err(BoxError::NoSuchDimension(2, 2)));
        let e = IntervalBox::new(vec![Interval::EMPTY, Interval::EMPTY]);
        let r = e.replace(0, Interval::new(0.0, 1.0)).unwrap();
        assert_eq!(r.get(0), Interval::new(0.0, 1.0));
        assert!(r.is_empty());
    }

    #[test]
    fn split_examples() {
        let b = bx(&[(0.0, 4.0), (0.0, 2.0)]);
        assert_eq!(
            split(&b, 2, None, SplitPolicy::LargestFirst).unwrap(),
            vec![bx(&[(0.0, 2.0), (0.0, 2.0)]), bx(&[(2.0, 4.0), (0.0, 2.0)])]
        );
        assert_eq!(
            split(&b, 2, Some(0), SplitPolicy::LargestFirst).unwrap(),
            vec![bx(&[(0.0, 4.0), (0.0, 1.0)]), bx(&[(0.0, 4.0), (1.0, 2.0)])]
        );
        assert_eq!(
            split(&b, 2, None, SplitPolicy::RoundRobin { start: 1 }).unwrap(),
            vec![bx(&[(0.0, 4.0), (0.0, 1.0)]), bx(&[(0.0, 4.0), (1.0, 2.0)])]
        );
        let n = next_float(1.0).unwrap();
        let atomic = bx(&[(1.0, n), (3.0, 3.0)]);
        assert_eq!(split(&atomic, 2, None, SplitPolicy::LargestFirst), Err(BoxError::Atomic));
        let three = split(&bx(&[(0.0, 3.0)]), 3, None, SplitPolicy::LargestFirst).unwrap();
        assert_eq!(three, vec![bx(&[(0.0, 1.0)]), bx(&[(1.0, 2.0)]), bx(&[(2.0, 3.0)])]);
    }

    #[test]
    fn split_near_canonical() {
        let lo = 1.0;
        let hi = next_float(next_float(lo).unwrap()).unwrap();
        let parts = split(&bx(&[(lo, hi)]), 2, None, SplitPolicy::LargestFirst).unwrap();
        assert_eq!(parts.len(), 2);
        for p in &parts {
            assert!(p.get(0).width() < hi - lo);
        }
    }

    fn arb_box() -> impl Strategy<Value = IntervalBox> {
        prop::collection::vec((-100f64..100.0, 0.001f64..50.0), 1..5).prop_map(|v| {
            IntervalBox::new(v.into_iter().map(|(a, w)| Interval::new(a, a + w)).collect())
        })
    }

    fn arb_nested() -> impl Strategy<Value = (IntervalBox, IntervalBox)> {
        arb_box().prop_flat_map(|d| {
            let n = d.dim();
            (Just(d), prop::collection::vec((0f64..=1.0, 0f64..=1.0), n))
        })
        .prop_map(|(d, fr)| {
            let inner = d
                .dims()
                .iter()
                .zip(fr)
                .map(|(i, (s, t))| {
                    let (s, t) = if s <= t { (s, t) } else { (t, s) };
                    let w = i.hi() - i.lo();
                    let a = (i.lo() + s * w).min(i.hi());
                    let b = (i.lo() + t * w).clamp(a, i.hi());
                    Interval::new(a, b)
                })
                .collect();
            (d, IntervalBox::new(inner))
        })
    }

    proptest! {
        #[test]
        fn box_diff_partitions((d, b) in arb_nested(), probe in prop::collection::vec(0f64..=1.0, 4)) {
            let parts = box_diff(&d, &b).unwrap();
            prop_assert!(parts.len() <= 2 * d.dim());
            let all: Vec<usize> = (0..d.dim()).collect();
            for p in &parts {
                prop_assert!(p.subset_of(&d));
                prop_assert!(!p.interiors_meet(&b, &all));
            }
            for (i, p) in parts.iter().enumerate() {
                for q in &parts[i + 1..] {
                    prop_assert!(!p.interiors_meet(q, &all));
                }
            }
            // a probe point of D lies in B or in one of the parts
            let pt: Vec<f64> = d.dims().iter().zip(probe.iter().cycle())
                .map(|(i, t)| (i.lo() + t * (i.hi() - i.lo())).clamp(i.lo(), i.hi()))
                .collect();
            let inside = |x: &IntervalBox| x.dims().iter().zip(&pt).all(|(i, v)| i.contains(*v));
            prop_assert!(inside(&b) || parts.iter().any(inside));
        }

        #[test]
        fn split_reconstructs(b in arb_box(), k in 2usize..5, rr in 0usize..4) {
            for policy in [SplitPolicy::LargestFirst, SplitPolicy::RoundRobin { start: rr }] {
                let parts = split(&b, k, None, policy).unwrap();
                prop_assert_eq!(hull(&parts).unwrap(), b.clone());
                let total: f64 = parts.iter().map(IntervalBox::volume).sum();
                prop_assert!((total - b.volume()).abs() <= 1e-9 * b.volume().max(1.0));
                for p in &parts {
                    prop_assert!(p.subset_of(&b) && p != &b);
                }
            }
        }

        #[test]
        fn hull_is_idempotent(a in arb_box()) {
            let h = hull(std::slice::from_ref(&a)).unwrap();
            prop_assert_eq!(&h, &a);
            prop_assert_eq!(hull(&[h.clone(), h.clone()]).unwrap(), h);
        }
    }
}
