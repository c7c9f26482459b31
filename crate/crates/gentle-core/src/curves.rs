//! Curves on a dissected surface and their winding numbers.
//!
//! A curve is an edge path in the dissection. Its winding number with respect
//! to the line field of the dual dissection is a signed count of turns at the
//! green points it passes: every passage leaves the green point on one side,
//! and the sign records which.

use serde::Serialize;
use thiserror::Error;

use crate::ribbon::{edge_of, end_of, half, reverse_walk, twin, Half, Ribbon, RibbonError};
use crate::surface::{DissectedSurface, RegionKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    Closed,
    Open,
}

/// A curve as the list of half-edges it departs along.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CurvePath {
    pub kind: CurveKind,
    pub walk: Vec<Half>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("passage through interior green point {0} has no defined winding")]
    InteriorVertex(String),
    #[error("steps {0} and {1} do not meet at a green point")]
    Disconnected(usize, usize),
    #[error("curve backtracks along arc {0}")]
    Backtrack(String),
    #[error("empty curve")]
    Empty,
    #[error("unknown arc `{0}`")]
    UnknownArc(String),
    #[error("cannot parse step `{0}`")]
    BadToken(String),
    #[error("direction of step {0} is ambiguous; add `via <arc>.<end>`")]
    Ambiguous(String),
    #[error("no orientation of the steps forms a curve")]
    NoConsistentOrientation,
    #[error("end point of the first path is not the start point of the second")]
    EndpointMismatch,
    #[error("the curves do not cross at green point {0}")]
    NoCrossing(String),
    #[error(transparent)]
    Ribbon(#[from] RibbonError),
}

/// A boundary or puncture curve: the sides of one face, with the face on the
/// right of the walk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryCurve {
    pub kind: RegionKind,
    pub walk: Vec<Half>,
    /// Number of green points on the boundary component (0 for punctures).
    pub marks: usize,
    pub winding: i64,
}

impl CurvePath {
    pub fn closed(d: &DissectedSurface, walk: Vec<Half>) -> Result<Self, CurveError> {
        let c = CurvePath {
            kind: CurveKind::Closed,
            walk,
        };
        c.check(d)?;
        Ok(c)
    }

    pub fn open(d: &DissectedSurface, walk: Vec<Half>) -> Result<Self, CurveError> {
        let c = CurvePath {
            kind: CurveKind::Open,
            walk,
        };
        c.check(d)?;
        Ok(c)
    }

    /// A single arc traversed from the given end.
    pub fn arc(from: Half) -> Self {
        CurvePath {
            kind: CurveKind::Open,
            walk: vec![from],
        }
    }

    fn check(&self, d: &DissectedSurface) -> Result<(), CurveError> {
        let r = d.ribbon();
        let n = self.walk.len();
        if n == 0 {
            return Err(CurveError::Empty);
        }
        let links = match self.kind {
            CurveKind::Closed => n,
            CurveKind::Open => n - 1,
        };
        for k in 0..links {
            let (a, b) = (self.walk[k], self.walk[(k + 1) % n]);
            if r.vertex(twin(a)) != r.vertex(b) {
                return Err(CurveError::Disconnected(k, (k + 1) % n));
            }
            if b == twin(a) {
                return Err(CurveError::Backtrack(d.arcs[edge_of(a)].clone()));
            }
        }
        Ok(())
    }

    /// `(arc, forward)` per step.
    pub fn steps(&self) -> Vec<(usize, bool)> {
        self.walk.iter().map(|&h| (edge_of(h), end_of(h) == 0)).collect()
    }

    /// `(incoming, outgoing)` half-edges at each interior passage; closed
    /// curves also include the passage closing the loop.
    pub fn passages(&self) -> Vec<(Half, Half)> {
        match self.kind {
            CurveKind::Closed => Ribbon::passages(&self.walk),
            CurveKind::Open => (0..self.walk.len() - 1)
                .map(|k| (twin(self.walk[k]), self.walk[k + 1]))
                .collect(),
        }
    }

    pub fn reverse(&self) -> CurvePath {
        CurvePath {
            kind: self.kind,
            walk: reverse_walk(&self.walk),
        }
    }

    pub fn start_vertex(&self, d: &DissectedSurface) -> usize {
        d.ribbon().vertex(self.walk[0])
    }

    pub fn end_vertex(&self, d: &DissectedSurface) -> usize {
        d.ribbon().vertex(twin(*self.walk.last().unwrap()))
    }

    pub fn is_simple(&self, d: &DissectedSurface) -> bool {
        match self.kind {
            CurveKind::Closed => d.ribbon().is_simple_closed(&self.walk),
            CurveKind::Open => {
                let mut used = vec![false; d.arcs.len()];
                for &h in &self.walk {
                    if std::mem::replace(&mut used[edge_of(h)], true) {
                        return false;
                    }
                }
                let ps = self.passages();
                (0..ps.len()).all(|i| (i + 1..ps.len()).all(|j| !d.ribbon().interleave(ps[i], ps[j])))
            }
        }
    }

    pub fn format(&self, d: &DissectedSurface) -> String {
        self.walk
            .iter()
            .map(|&h| format!("{}.{}", d.arcs[edge_of(h)], if end_of(h) == 0 { '+' } else { '-' }))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// +1 when the passage from `inc` to `out` turns with its green point on the
/// side calibrated as positive, -1 otherwise.
pub fn turn_sign(d: &DissectedSurface, inc: Half, out: Half) -> Result<i64, CurveError> {
    let v = d.ribbon().vertex(inc);
    if d.fans[v].interior {
        return Err(CurveError::InteriorVertex(d.fan_name(v)));
    }
    Ok(d.ribbon().turn_sign(inc, out)?)
}

pub fn winding(d: &DissectedSurface, path: &CurvePath) -> Result<i64, CurveError> {
    path.passages().into_iter().map(|(x, y)| turn_sign(d, x, y)).sum()
}

/// Boundary curves first (in face order), then puncture curves.
pub fn boundary_curves(d: &DissectedSurface) -> Result<Vec<BoundaryCurve>, CurveError> {
    let mut bnd = Vec::new();
    let mut punct = Vec::new();
    for f in d.faces() {
        let marks = f.mark_count();
        let w: i64 = Ribbon::passages(&f.walk)
            .into_iter()
            .map(|(x, y)| turn_sign(d, x, y))
            .sum::<Result<i64, _>>()?;
        let c = BoundaryCurve {
            kind: if marks > 0 {
                RegionKind::Boundary
            } else {
                RegionKind::Puncture
            },
            walk: f.walk,
            marks,
            winding: w,
        };
        if marks > 0 {
            bnd.push(c);
        } else {
            punct.push(c);
        }
    }
    bnd.extend(punct);
    Ok(bnd)
}

pub fn concatenate(d: &DissectedSurface, a: &CurvePath, b: &CurvePath) -> Result<CurvePath, CurveError> {
    if a.kind != CurveKind::Open || b.kind != CurveKind::Open || a.end_vertex(d) != b.start_vertex(d) {
        return Err(CurveError::EndpointMismatch);
    }
    let mut walk = a.walk.clone();
    walk.extend_from_slice(&b.walk);
    CurvePath::open(d, walk)
}

/// Joins the end of an open path to its start.
pub fn close(d: &DissectedSurface, a: &CurvePath) -> Result<CurvePath, CurveError> {
    if a.kind != CurveKind::Open || a.end_vertex(d) != a.start_vertex(d) {
        return Err(CurveError::EndpointMismatch);
    }
    CurvePath::closed(d, a.walk.clone())
}

/// Oriented smoothing of two closed curves at a crossing: the result lies in
/// the homology class of the sum. `at` restricts the crossing to one green
/// point; otherwise the first crossing found is used.
pub fn smooth_compose(
    d: &DissectedSurface,
    a: &CurvePath,
    b: &CurvePath,
    at: Option<usize>,
) -> Result<CurvePath, CurveError> {
    let r = d.ribbon();
    let pa = Ribbon::passages(&a.walk);
    let pb = Ribbon::passages(&b.walk);
    for (i, &p) in pa.iter().enumerate() {
        if at.is_some_and(|v| r.vertex(p.0) != v) {
            continue;
        }
        for (j, &q) in pb.iter().enumerate() {
            if r.interleave(p, q) {
                let mut w = Vec::with_capacity(a.walk.len() + b.walk.len());
                w.extend((0..a.walk.len()).map(|k| a.walk[(i + 1 + k) % a.walk.len()]));
                w.extend((0..b.walk.len()).map(|k| b.walk[(j + 1 + k) % b.walk.len()]));
                let out = CurvePath::closed(d, w)?;
                if log::log_enabled!(log::Level::Debug) {
                    if let (Ok(wa), Ok(wb), Ok(wc)) = (winding(d, a), winding(d, b), winding(d, &out)) {
                        log::debug!("smoothing: w(a)={wa} w(b)={wb} w(a#b)={wc} defect={}", wc - wa - wb);
                    }
                }
                return Ok(out);
            }
        }
    }
    let name = at.map(|v| d.fan_name(v)).unwrap_or_else(|| "(any)".into());
    Err(CurveError::NoCrossing(name))
}

/// Parses a curve literal such as `a.+ b.- c` or `a via a.1 b`. A step
/// without a direction is oriented so that consecutive steps meet; if several
/// orientations fit, the literal is rejected as ambiguous.
pub fn parse_curve(d: &DissectedSurface, text: &str, kind: CurveKind) -> Result<CurvePath, CurveError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    let mut steps: Vec<(usize, Option<usize>, String)> = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        let t = toks[i];
        if t == "via" {
            let spec = toks.get(i + 1).ok_or_else(|| CurveError::BadToken("via".into()))?;
            let (a, e) = spec
                .rsplit_once('.')
                .ok_or_else(|| CurveError::BadToken(spec.to_string()))?;
            let last = steps.last_mut().ok_or_else(|| CurveError::BadToken("via".into()))?;
            let ai = d.arc_index(a).ok_or_else(|| CurveError::UnknownArc(a.into()))?;
            if ai != last.0 {
                return Err(CurveError::BadToken(spec.to_string()));
            }
            last.1 = Some(match e {
                "0" => 0,
                "1" => 1,
                _ => return Err(CurveError::BadToken(spec.to_string())),
            });
            i += 2;
            continue;
        }
        let (name, dir) = match t.rsplit_once('.') {
            Some((a, "+")) => (a, Some(0)),
            Some((a, "-")) | Some((a, "\u{2212}")) => (a, Some(1)),
            _ => (t, None),
        };
        let ai = d.arc_index(name).ok_or_else(|| CurveError::UnknownArc(name.into()))?;
        steps.push((ai, dir, t.to_string()));
        i += 1;
    }
    if steps.is_empty() {
        return Err(CurveError::Empty);
    }
    let free: Vec<usize> = (0..steps.len()).filter(|&k| steps[k].1.is_none()).collect();
    if free.len() > 16 {
        return Err(CurveError::Ambiguous(steps[free[0]].2.clone()));
    }
    let mut found: Option<CurvePath> = None;
    for mask in 0u32..(1u32 << free.len()) {
        let walk: Vec<Half> = steps
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let end = match s.1 {
                    Some(e) => e,
                    None => ((mask >> free.iter().position(|&f| f == k).unwrap()) & 1) as usize,
                };
                half(s.0, end)
            })
            .collect();
        let c = CurvePath { kind, walk };
        if c.check(d).is_ok() {
            if found.is_some() {
                let k = free.first().copied().unwrap_or(0);
                return Err(CurveError::Ambiguous(steps[k].2.clone()));
            }
            found = Some(c);
        }
    }
    found.ok_or(CurveError::NoConsistentOrientation)
}
