//! Rational-slope line bundles on the torus `T^2 = [0, 1)^2`.
//!
//! A line of slope `p/q` closes after length `sqrt(p^2 + q^2)` and crosses the
//! circle `{x = 0}` at `q` heights spaced by `1/q`. Two lines of equal slope
//! either coincide or are disjoint, so bundle disjointness is decided on the
//! `x = 0` cross-section.
//!
//! Bundles are parameterized by their start heights `J` at `x = 0`; the
//! frequency parameter `xi` of a line maps to the start height
//! `p/2 + xi / sin(alpha)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::RationalSlope;

/// Finite union of half-open arcs `[a, b)` of `R/Z`, stored sorted, disjoint
/// and merged inside `[0, 1]`. An arc through `0` is stored as two pieces.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct CircleIntervalSet {
    arcs: Vec<(f64, f64)>,
}

fn frac(t: f64) -> f64 {
    let f = t - t.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

impl CircleIntervalSet {
    pub fn empty() -> Self {
        Self { arcs: Vec::new() }
    }

    pub fn full() -> Self {
        Self { arcs: vec![(0.0, 1.0)] }
    }

    /// Projection of the real interval `[a, b)` to the circle.
    pub fn arc(a: f64, b: f64) -> Self {
        Self::from_arcs([(a, b)])
    }

    pub fn from_arcs<I: IntoIterator<Item = (f64, f64)>>(arcs: I) -> Self {
        let mut raw = Vec::new();
        for (a, b) in arcs {
            if !(b > a) {
                continue;
            }
            if b - a >= 1.0 {
                return Self::full();
            }
            let s = frac(a);
            let e = s + (b - a);
            if e <= 1.0 {
                raw.push((s, e));
            } else {
                raw.push((s, 1.0));
                raw.push((0.0, e - 1.0));
            }
        }
        Self::normalize(raw)
    }

    fn normalize(mut raw: Vec<(f64, f64)>) -> Self {
        raw.retain(|(a, b)| b > a);
        raw.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut arcs: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match arcs.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => arcs.push((a, b)),
            }
        }
        Self { arcs }
    }

    pub fn arcs(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, t: f64) -> bool {
        let t = frac(t);
        self.arcs.iter().any(|&(a, b)| t >= a && t < b)
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::normalize(self.arcs.iter().chain(&other.arcs).copied().collect())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.arcs.len() && j < other.arcs.len() {
            let (a0, a1) = self.arcs[i];
            let (b0, b1) = other.arcs[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if hi > lo {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::normalize(out)
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        let mut cursor = 0.0;
        for &(a, b) in &self.arcs {
            if a > cursor {
                out.push((cursor, a));
            }
            cursor = b;
        }
        if cursor < 1.0 {
            out.push((cursor, 1.0));
        }
        Self { arcs: out }
    }

    pub fn translate(&self, t: f64) -> Self {
        Self::from_arcs(self.arcs.iter().map(|&(a, b)| (a + t, b + t)))
    }

    /// Grows every arc by `delta` on both sides.
    pub fn dilate(&self, delta: f64) -> Self {
        Self::from_arcs(self.arcs.iter().map(|&(a, b)| (a - delta, b + delta)))
    }

    /// Maximal arcs of the complement as `(start, length)`, merged across `0`.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        let comp = self.complement();
        let mut arcs: Vec<(f64, f64)> = comp.arcs.iter().map(|&(a, b)| (a, b - a)).collect();
        if arcs.len() > 1 {
            let first = arcs[0];
            let last = *arcs.last().unwrap();
            if first.0 == 0.0 && last.0 + last.1 >= 1.0 {
                arcs.remove(0);
                arcs.last_mut().unwrap().1 += first.1;
            }
        }
        arcs
    }

    /// Circular distance between the closures of two sets; 0 when they meet.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.is_empty() || other.is_empty() {
            return f64::INFINITY;
        }
        let mut best = f64::INFINITY;
        for &(a0, a1) in &self.arcs {
            for &(b0, b1) in &other.arcs {
                if a0 <= b1 && b0 <= a1 {
                    return 0.0;
                }
                best = best.min(frac(b0 - a1)).min(frac(a0 - b1));
            }
        }
        best
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }
}

pub fn line_length(slope: RationalSlope) -> f64 {
    slope.length()
}

/// Heights at `x = 0` of the lines starting in `J`: `union_j (J + j/q) mod 1`.
pub fn height_section(slope: RationalSlope, start_heights: &CircleIntervalSet) -> CircleIntervalSet {
    let q = slope.q();
    let mut out = CircleIntervalSet::empty();
    for j in 0..q {
        out = out.union(&start_heights.translate(j as f64 / q as f64));
    }
    out
}

/// `union_{j<q} (p/2 + I/sin(alpha) + j/q) mod 1` for a frequency interval `I`.
pub fn cross_section(slope: RationalSlope, interval: (f64, f64)) -> Result<CircleIntervalSet> {
    let (lo, hi) = interval;
    if !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidInput(format!("bad interval [{lo}, {hi}]")));
    }
    let measure = slope.length() * (hi - lo);
    if measure >= 1.0 {
        return Err(Error::CoversTorus { measure });
    }
    let s = slope.sin_alpha();
    let base = 0.5 * slope.p() as f64;
    Ok(height_section(
        slope,
        &CircleIntervalSet::arc(base + lo / s, base + hi / s),
    ))
}

/// Slopes with start-height intervals whose bundles are pairwise separated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineBundleFamily {
    pub slopes: Vec<RationalSlope>,
    /// Start-height intervals `J_k` at `x = 0`.
    pub intervals: Vec<(f64, f64)>,
    pub margin: f64,
}

/// One failed separation in an audit.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparationViolation {
    pub slope: RationalSlope,
    pub k: usize,
    pub l: usize,
    pub gap: f64,
}

impl LineBundleFamily {
    pub fn section(&self, slope: RationalSlope, k: usize) -> CircleIntervalSet {
        let (a, b) = self.intervals[k];
        height_section(slope, &CircleIntervalSet::arc(a, b))
    }

    /// All `(slope, k, l)` with section gap below `margin` (minus rounding slack).
    pub fn audit(&self) -> Vec<SeparationViolation> {
        let mut bad = Vec::new();
        for &slope in &self.slopes {
            let sections: Vec<CircleIntervalSet> = (0..self.intervals.len()).map(|k| self.section(slope, k)).collect();
            for k in 0..sections.len() {
                for l in k + 1..sections.len() {
                    let gap = sections[k].distance(&sections[l]);
                    if gap < self.margin - 1e-12 || !sections[k].is_disjoint(&sections[l]) {
                        bad.push(SeparationViolation { slope, k, l, gap });
                    }
                }
            }
        }
        bad
    }

    /// Smallest section gap over all slopes and pairs.
    pub fn min_gap(&self) -> f64 {
        let mut best = f64::INFINITY;
        for &slope in &self.slopes {
            for k in 0..self.intervals.len() {
                for l in k + 1..self.intervals.len() {
                    best = best.min(self.section(slope, k).distance(&self.section(slope, l)));
                }
            }
        }
        best
    }
}

/// Greedy left-to-right placement of `n` start-height intervals of length
/// `width` in `(0, 1)`, separated by `margin` in every slope's section.
pub fn select_intervals(slopes: &[RationalSlope], n: usize, width: f64, margin: f64) -> Result<LineBundleFamily> {
    if slopes.is_empty() || n == 0 {
        return Err(Error::InvalidInput("need at least one slope and one interval".into()));
    }
    if !(width > 0.0) || !(margin >= 0.0) || !width.is_finite() || !margin.is_finite() {
        return Err(Error::InvalidInput(format!("width {width} must be > 0 and margin {margin} >= 0")));
    }
    let total_length: f64 = slopes.iter().map(|s| s.length()).sum();
    let budget = n as f64 * (width + 2.0 * margin) * total_length;
    if budget >= 1.0 {
        return Err(Error::Infeasible(format!(
            "N (width + 2 delta) sum_j L_j = {n} * ({width} + 2 * {margin}) * {total_length:.6} = {budget:.6} >= 1"
        )));
    }
    let mut chosen: Vec<(f64, f64)> = Vec::with_capacity(n);
    let mut blocked = CircleIntervalSet::empty();
    let mut cursor = margin;
    for k in 0..n {
        let mut placed = None;
        // first admissible start at or after `cursor` with [start, start+width] clear
        let mut start = cursor;
        for _ in 0..10_000 {
            if start + width + margin >= 1.0 {
                break;
            }
            let cand = CircleIntervalSet::arc(start, start + width);
            match blocked.intersection(&cand).arcs().last() {
                None => {
                    placed = Some(start);
                    break;
                }
                Some(&(_, end)) => {
                    // jump past the blocking arc that overlaps the candidate
                    let next = blocked
                        .arcs()
                        .iter()
                        .find(|&&(a, b)| b >= end && a <= end)
                        .map(|&(_, b)| b)
                        .unwrap_or(end);
                    start = if next > start { next } else { start + 1e-9 };
                }
            }
        }
        let start = placed.ok_or_else(|| {
            Error::Infeasible(format!(
                "no gap of width {width} left for interval {} of {n} after greedy placement",
                k + 1
            ))
        })?;
        let j = (start, start + width);
        for &slope in slopes {
            let q = slope.q() as f64;
            if width + margin > 1.0 / q {
                return Err(Error::Infeasible(format!(
                    "width + margin = {} exceeds the crossing spacing 1/q = {} of slope {slope}",
                    width + margin,
                    1.0 / q
                )));
            }
            let own = height_section(slope, &CircleIntervalSet::arc(j.0, j.1)).dilate(margin);
            blocked = blocked.union(&height_section(slope, &own));
        }
        chosen.push(j);
        cursor = start;
    }
    let family = LineBundleFamily {
        slopes: slopes.to_vec(),
        intervals: chosen,
        margin,
    };
    let bad = family.audit();
    if !bad.is_empty() {
        return Err(Error::Infeasible(format!("construction audit failed: {bad:?}")));
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: i64, q: i64) -> RationalSlope {
        RationalSlope::new(p, q).unwrap()
    }

    #[test]
    fn arc_normalization() {
        let a = CircleIntervalSet::arc(0.9, 1.2);
        assert_eq!(a.arcs().len(), 2);
        assert!((a.measure() - 0.3).abs() < 1e-15);
        assert!(a.contains(0.05) && a.contains(0.95) && !a.contains(0.5));
        assert_eq!(CircleIntervalSet::arc(-3.0, -1.5), CircleIntervalSet::full());
        let u = CircleIntervalSet::from_arcs([(0.1, 0.3), (0.2, 0.4), (0.6, 0.7)]);
        assert_eq!(u.arcs(), &[(0.1, 0.4), (0.6, 0.7)]);
        assert_eq!(CircleIntervalSet::from_arcs(u.arcs().to_vec()), u);
    }

    #[test]
    fn set_algebra() {
        let a = CircleIntervalSet::from_arcs([(0.1, 0.4), (0.6, 0.7)]);
        let b = CircleIntervalSet::arc(0.35, 0.65);
        let i = a.intersection(&b);
        assert!((i.measure() - 0.1).abs() < 1e-15);
        let c = a.complement();
        assert!((c.measure() + a.measure() - 1.0).abs() < 1e-15);
        assert!(c.is_disjoint(&a));
        assert!((a.union(&b).measure() - 0.6).abs() < 1e-15);
        let gaps = CircleIntervalSet::arc(0.2, 0.5).gaps();
        assert_eq!(gaps.len(), 1);
        assert!((gaps[0].0 - 0.5).abs() < 1e-15 && (gaps[0].1 - 0.7).abs() < 1e-15);
        assert!((CircleIntervalSet::arc(0.1, 0.2).distance(&CircleIntervalSet::arc(0.9, 0.95)) - 0.15).abs() < 1e-15);
        assert_eq!(a.distance(&b), 0.0);
    }

    #[test]
    fn lengths() {
        assert!((line_length(s(2, 1)) - 5f64.sqrt()).abs() < 1e-15);
        assert!((line_length(s(1, 1)) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(line_length(s(3, 4)), 5.0);
    }

    #[test]
    fn cross_section_examples() {
        for (p, q) in [(2, 1), (1, 2), (-3, 5), (1, 1)] {
            let sl = s(p, q);
            let sec = cross_section(sl, (0.013, 0.063)).unwrap();
            assert!((sec.measure() - sl.length() * 0.05).abs() < 1e-12);
        }
        let one = cross_section(s(3, 1), (0.0, 0.02)).unwrap();
        assert_eq!(one.arcs().len(), 1);
        let two = cross_section(s(1, 2), (0.2, 0.3)).unwrap();
        assert_eq!(two.arcs().len(), 2);
        assert!((two.measure() - 0.1 * 5f64.sqrt()).abs() < 1e-12);
        assert!(matches!(cross_section(s(1, 1), (0.0, 0.8)), Err(Error::CoversTorus { .. })));
    }

    #[test]
    fn cross_section_translation() {
        let sl = s(2, 3);
        let t = 0.137;
        let a = cross_section(sl, (0.1 + t, 0.15 + t)).unwrap();
        let b = cross_section(sl, (0.1, 0.15)).unwrap().translate(t / sl.sin_alpha());
        assert_eq!(a.arcs().len(), b.arcs().len());
        for (x, y) in a.arcs().iter().zip(b.arcs()) {
            assert!((x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12);
        }
    }

    #[test]
    fn selection_examples() {
        let fam = select_intervals(&[s(1, 1)], 2, 0.05, 0.01).unwrap();
        assert_eq!(fam.intervals.len(), 2);
        assert!(fam.section(s(1, 1), 0).is_disjoint(&fam.section(s(1, 1), 1)));
        let slopes = [s(1, 1), s(2, 1), s(1, 2)];
        let fam = select_intervals(&slopes, 2, 0.02, 0.005).unwrap();
        assert!(fam.audit().is_empty());
        assert!(fam.min_gap() >= 0.005 - 1e-12);
        for &(a, b) in &fam.intervals {
            assert!(a > 0.0 && b < 1.0);
        }
        assert!(matches!(select_intervals(&slopes, 10, 0.05, 0.0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn disjoint_sections_mean_disjoint_bundles() {
        let slopes = [s(1, 1), s(2, 1), s(-1, 2)];
        let fam = select_intervals(&slopes, 3, 0.03, 0.01).unwrap();
        for &sl in &slopes {
            let r = sl.ratio();
            let secs: Vec<_> = (0..3).map(|k| fam.section(sl, k)).collect();
            let n = 300;
            for i in 0..n {
                for j in 0..n {
                    let (x, y) = (i as f64 / n as f64, j as f64 / n as f64);
                    // the line through (x, y) starts at height y - r x
                    let h = y - r * x;
                    let hits = secs.iter().filter(|sec| sec.contains(h)).count();
                    assert!(hits <= 1);
                }
            }
        }
    }
}
