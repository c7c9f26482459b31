//! Graded dissections, grading synthesis and silting verdicts.
//!
//! Candidate arcs are edge paths in the original dissection. Two candidates
//! cross either transversally at a green point (their chords interleave) or
//! along a shared run of edges, when they enter the run in one order and
//! leave it in the other.

use std::cmp::Ordering;
use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::curves::{parse_curve, winding, CurveError, CurveKind, CurvePath};
use crate::ribbon::{half, twin, Half, Slot};
use crate::surface::{compute_shape, DissectedSurface, Fan, SurfaceShape};

#[derive(Debug, Error)]
pub enum TiltError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("arc {arc}: {source}")]
    Curve {
        arc: String,
        #[source]
        source: CurveError,
    },
    #[error("arc {0} ends at an interior green point")]
    InteriorEndpoint(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedDissection {
    pub names: Vec<String>,
    pub arcs: Vec<CurvePath>,
    pub gradings: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DissectionWitness {
    NotSimple {
        arc: String,
    },
    Crossing {
        first: String,
        second: String,
    },
    Duplicate {
        first: String,
        second: String,
    },
    WrongCount {
        found: usize,
        expected: usize,
    },
    Regions {
        expected: SurfaceShape,
        found: SurfaceShape,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum DissectionCheck {
    Admissible,
    Not { witness: DissectionWitness },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Synthesis {
    Gradings {
        gradings: Vec<i64>,
        levels: BTreeMap<String, i64>,
    },
    Obstruction {
        cycle: Vec<String>,
        mismatch: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SiltingVerdict {
    Tilting,
    SiltingNotTilting,
    /// The level condition fails at `point`: `first` precedes `second`
    /// counter-clockwise but sits strictly lower.
    NotSilting {
        point: String,
        first: String,
        second: String,
        levels: (i64, i64),
    },
}

/// An end of a candidate arc, seen from the green point it sits at.
#[derive(Debug, Clone, Copy)]
struct End {
    arc: usize,
    /// Arc oriented to start here.
    reversed: bool,
    first: Half,
}

fn oriented(c: &CurvePath, reversed: bool) -> Vec<Half> {
    if reversed {
        c.reverse().walk
    } else {
        c.walk.clone()
    }
}

/// Counter-clockwise offset of slot `b` from slot `a` at the same vertex.
fn offset(d: &DissectedSurface, v: usize, a: usize, b: usize) -> usize {
    let n = d.ribbon().slots(v).len();
    (b + n - a) % n
}

fn mark_pos(d: &DissectedSurface, v: usize) -> Option<usize> {
    d.ribbon().slots(v).iter().position(|s| *s == Slot::Mark)
}

/// Slot where a strand enters a run starting with `walk[k]`, or the gap if
/// the walk starts there.
fn in_slot(d: &DissectedSurface, walk: &[Half], k: usize) -> Option<usize> {
    let v = d.ribbon().vertex(walk[k]);
    if k == 0 {
        mark_pos(d, v)
    } else {
        Some(d.ribbon().position(twin(walk[k - 1])))
    }
}

fn out_slot(d: &DissectedSurface, walk: &[Half], k: usize) -> Option<usize> {
    let v = d.ribbon().vertex(twin(walk[k]));
    if k + 1 == walk.len() {
        mark_pos(d, v)
    } else {
        Some(d.ribbon().position(walk[k + 1]))
    }
}

/// Relative order of two strands running together along `a[ka..ka+len]` and
/// `b[kb..kb+len]`: `(at start, at end)`, each `Greater` when `a` is to the
/// left of `b` there.
fn run_order(d: &DissectedSurface, a: &[Half], ka: usize, b: &[Half], kb: usize, len: usize) -> (Ordering, Ordering) {
    let r = d.ribbon();
    let h = a[ka];
    let v = r.vertex(h);
    let ph = r.position(h);
    // entering: a smaller ccw offset from the run means further left
    let start = match (in_slot(d, a, ka), in_slot(d, b, kb)) {
        (Some(x), Some(y)) => offset(d, v, ph, y).cmp(&offset(d, v, ph, x)),
        _ => Ordering::Equal,
    };
    let g = twin(a[ka + len - 1]);
    let w = r.vertex(g);
    let pg = r.position(g);
    // leaving: a larger ccw offset from the run means further left
    let end = match (out_slot(d, a, ka + len - 1), out_slot(d, b, kb + len - 1)) {
        (Some(x), Some(y)) => offset(d, w, pg, x).cmp(&offset(d, w, pg, y)),
        _ => Ordering::Equal,
    };
    (start, end)
}

/// Chords of a walk at green points: passages, plus `(half, gap)` at both
/// ends.
fn chords(d: &DissectedSurface, walk: &[Half]) -> Vec<(usize, usize, usize)> {
    let r = d.ribbon();
    let mut out = Vec::new();
    let v0 = r.vertex(walk[0]);
    if let Some(m) = mark_pos(d, v0) {
        out.push((v0, m, r.position(walk[0])));
    }
    for k in 0..walk.len() - 1 {
        let x = twin(walk[k]);
        out.push((r.vertex(x), r.position(x), r.position(walk[k + 1])));
    }
    let last = twin(*walk.last().unwrap());
    let v1 = r.vertex(last);
    if let Some(m) = mark_pos(d, v1) {
        out.push((v1, r.position(last), m));
    }
    out
}

fn chords_cross(n: usize, p: (usize, usize), q: (usize, usize)) -> bool {
    let s = [p.0, p.1, q.0, q.1];
    for i in 0..4 {
        for j in i + 1..4 {
            if s[i] == s[j] {
                return false;
            }
        }
    }
    let inside = |k: usize| (k + n - p.0) % n < (p.1 + n - p.0) % n;
    inside(q.0) != inside(q.1)
}

#[derive(Debug, PartialEq, Eq)]
enum PairRelation {
    Disjoint,
    Cross,
    Duplicate,
}

fn pair_relation(d: &DissectedSurface, a: &CurvePath, b: &CurvePath) -> PairRelation {
    let r = d.ribbon();
    for ca in chords(d, &a.walk) {
        for cb in chords(d, &b.walk) {
            if ca.0 == cb.0 && chords_cross(r.slots(ca.0).len(), (ca.1, ca.2), (cb.1, cb.2)) {
                return PairRelation::Cross;
            }
        }
    }
    let aw = &a.walk;
    for rev in [false, true] {
        let bw = oriented(b, rev);
        for ka in 0..aw.len() {
            for kb in 0..bw.len() {
                if aw[ka] != bw[kb] || (ka > 0 && kb > 0 && aw[ka - 1] == bw[kb - 1]) {
                    continue;
                }
                let mut len = 1;
                while ka + len < aw.len() && kb + len < bw.len() && aw[ka + len] == bw[kb + len] {
                    len += 1;
                }
                let (s, e) = run_order(d, aw, ka, &bw, kb, len);
                if s == Ordering::Equal && e == Ordering::Equal {
                    return PairRelation::Duplicate;
                }
                if s != Ordering::Equal && e != Ordering::Equal && s != e {
                    return PairRelation::Cross;
                }
            }
        }
    }
    PairRelation::Disjoint
}

/// Ends of all candidate arcs at each green point, in counter-clockwise
/// order.
fn derived_fans(d: &DissectedSurface, names: &[String], arcs: &[CurvePath]) -> Result<Vec<Vec<End>>, TiltError> {
    let r = d.ribbon();
    let mut at: Vec<Vec<End>> = vec![Vec::new(); d.fans.len()];
    for (i, c) in arcs.iter().enumerate() {
        for reversed in [false, true] {
            let w = oriented(c, reversed);
            let v = r.vertex(w[0]);
            if d.fans[v].interior {
                return Err(TiltError::InteriorEndpoint(names[i].clone()));
            }
            at[v].push(End {
                arc: i,
                reversed,
                first: w[0],
            });
        }
    }
    for ends in at.iter_mut() {
        ends.sort_by(|x, y| {
            r.position(x.first).cmp(&r.position(y.first)).then_with(|| {
                let a = oriented(&arcs[x.arc], x.reversed);
                let b = oriented(&arcs[y.arc], y.reversed);
                let mut len = 1;
                while len < a.len() && len < b.len() && a[len] == b[len] {
                    len += 1;
                }
                // more left leaving the point means later counter-clockwise
                run_order(d, &a, 0, &b, 0, len).1
            })
        });
    }
    Ok(at)
}

pub fn expected_arc_count(d: &DissectedSurface) -> usize {
    d.arcs.len()
}

/// Checks that the candidate arcs form an admissible dissection of the same
/// surface.
pub fn check_dissection(
    d: &DissectedSurface,
    names: &[String],
    arcs: &[CurvePath],
) -> Result<DissectionCheck, TiltError> {
    let not = |witness| Ok(DissectionCheck::Not { witness });
    for (i, c) in arcs.iter().enumerate() {
        if !c.is_simple(d) {
            return not(DissectionWitness::NotSimple { arc: names[i].clone() });
        }
    }
    for i in 0..arcs.len() {
        for j in i + 1..arcs.len() {
            match pair_relation(d, &arcs[i], &arcs[j]) {
                PairRelation::Disjoint => {}
                PairRelation::Cross => {
                    return not(DissectionWitness::Crossing {
                        first: names[i].clone(),
                        second: names[j].clone(),
                    })
                }
                PairRelation::Duplicate => {
                    return not(DissectionWitness::Duplicate {
                        first: names[i].clone(),
                        second: names[j].clone(),
                    })
                }
            }
        }
    }
    let expected = expected_arc_count(d);
    if arcs.len() != expected {
        return not(DissectionWitness::WrongCount {
            found: arcs.len(),
            expected,
        });
    }
    let original = compute_shape(d);
    let derived = derived_surface(d, names, arcs)?;
    let found = match &derived {
        Some(s) => compute_shape(s),
        None => SurfaceShape {
            genus: 0,
            boundary: 0,
            punctures: 0,
            marked_green: 0,
            marked_red: 0,
            boundary_marks: Vec::new(),
            interior_green: 0,
        },
    };
    if found != original {
        return not(DissectionWitness::Regions {
            expected: original,
            found,
        });
    }
    Ok(DissectionCheck::Admissible)
}

/// The dissected surface whose arcs are the candidates, with fans read off
/// from the original one. `None` when the candidates leave the green points
/// disconnected.
pub fn derived_surface(
    d: &DissectedSurface,
    names: &[String],
    arcs: &[CurvePath],
) -> Result<Option<DissectedSurface>, TiltError> {
    let fans: Vec<Fan> = derived_fans(d, names, arcs)?
        .into_iter()
        .filter(|e| !e.is_empty())
        .map(|ends| Fan {
            ends: ends.iter().map(|e| half(e.arc, usize::from(e.reversed))).collect(),
            interior: false,
        })
        .collect();
    Ok(DissectedSurface::new(format!("{}-derived", d.name), names.to_vec(), fans).ok())
}

/// Assigns a level `n(x)` to every green point so that each arc climbs by
/// its winding number, or reports a cycle where that is impossible.
pub fn synthesize_grading(d: &DissectedSurface, names: &[String], arcs: &[CurvePath]) -> Result<Synthesis, TiltError> {
    let mut w = Vec::with_capacity(arcs.len());
    for (i, c) in arcs.iter().enumerate() {
        w.push(winding(d, c).map_err(|source| TiltError::Curve {
            arc: names[i].clone(),
            source,
        })?);
    }
    let ends: Vec<(usize, usize)> = arcs.iter().map(|c| (c.start_vertex(d), c.end_vertex(d))).collect();
    for (i, &(s, e)) in ends.iter().enumerate() {
        if d.fans[s].interior || d.fans[e].interior {
            return Err(TiltError::InteriorEndpoint(names[i].clone()));
        }
    }
    let mut inc: Vec<Vec<usize>> = vec![Vec::new(); d.fans.len()];
    for (i, &(s, e)) in ends.iter().enumerate() {
        inc[s].push(i);
        if e != s {
            inc[e].push(i);
        }
    }
    let mut level: Vec<Option<i64>> = vec![None; d.fans.len()];
    let mut parent: Vec<Option<usize>> = vec![None; d.fans.len()];
    let mut tree = vec![false; arcs.len()];
    let mut order: Vec<usize> = (0..d.fans.len()).collect();
    order.sort_by_key(|&v| d.fan_name(v));
    for root in order {
        if level[root].is_some() || inc[root].is_empty() {
            continue;
        }
        level[root] = Some(0);
        let mut q = VecDeque::from([root]);
        while let Some(v) = q.pop_front() {
            for &i in &inc[v] {
                let (s, e) = ends[i];
                let (other, val) = if s == v {
                    (e, level[v].unwrap() + w[i])
                } else {
                    (s, level[v].unwrap() - w[i])
                };
                if level[other].is_none() {
                    level[other] = Some(val);
                    parent[other] = Some(i);
                    tree[i] = true;
                    q.push_back(other);
                }
            }
        }
    }
    for i in 0..arcs.len() {
        if tree[i] {
            continue;
        }
        let (s, e) = ends[i];
        let mismatch = level[s].unwrap() + w[i] - level[e].unwrap();
        if mismatch != 0 {
            // the arc together with the tree path back from its end
            let mut cycle = vec![names[i].clone()];
            let path_up = |mut v: usize| {
                let mut p = Vec::new();
                while let Some(a) = parent[v] {
                    p.push(a);
                    v = if ends[a].0 == v { ends[a].1 } else { ends[a].0 };
                }
                p
            };
            let (pe, ps) = (path_up(e), path_up(s));
            let common = pe.iter().rev().zip(ps.iter().rev()).take_while(|(x, y)| x == y).count();
            cycle.extend(pe[..pe.len() - common].iter().map(|&a| names[a].clone()));
            cycle.extend(ps[..ps.len() - common].iter().rev().map(|&a| names[a].clone()));
            return Ok(Synthesis::Obstruction { cycle, mismatch });
        }
    }
    let levels = (0..d.fans.len())
        .filter_map(|v| level[v].map(|l| (d.fan_name(v), l)))
        .collect();
    Ok(Synthesis::Gradings {
        gradings: ends.iter().map(|&(s, _)| level[s].unwrap()).collect(),
        levels,
    })
}

/// Levels at the start and end of each graded arc.
pub fn endpoint_levels(d: &DissectedSurface, gd: &GradedDissection) -> Result<Vec<(i64, i64)>, TiltError> {
    gd.arcs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let w = winding(d, c).map_err(|source| TiltError::Curve {
                arc: gd.names[i].clone(),
                source,
            })?;
            Ok((gd.gradings[i], gd.gradings[i] + w))
        })
        .collect()
}

/// Green point name with `(arc, level)` for each arc end there.
pub type PointLevels = (String, Vec<(String, i64)>);

/// Levels at each green point counter-clockwise, with the arc names.
pub fn levels_at_points(d: &DissectedSurface, gd: &GradedDissection) -> Result<Vec<PointLevels>, TiltError> {
    let lv = endpoint_levels(d, gd)?;
    let fans = derived_fans(d, &gd.names, &gd.arcs)?;
    Ok(fans
        .into_iter()
        .enumerate()
        .filter(|(_, e)| !e.is_empty())
        .map(|(v, ends)| {
            let seq = ends
                .iter()
                .map(|e| {
                    let l = if e.reversed { lv[e.arc].1 } else { lv[e.arc].0 };
                    (gd.names[e.arc].clone(), l)
                })
                .collect();
            (d.fan_name(v), seq)
        })
        .collect())
}

pub fn silting_verdict(d: &DissectedSurface, gd: &GradedDissection) -> Result<SiltingVerdict, TiltError> {
    let mut verdict = SiltingVerdict::Tilting;
    for (point, seq) in levels_at_points(d, gd)? {
        for k in 0..seq.len().saturating_sub(1) {
            let (a, b) = (&seq[k], &seq[k + 1]);
            if a.1 < b.1 {
                return Ok(SiltingVerdict::NotSilting {
                    point,
                    first: a.0.clone(),
                    second: b.0.clone(),
                    levels: (a.1, b.1),
                });
            }
            if a.1 > b.1 {
                verdict = SiltingVerdict::SiltingNotTilting;
            }
        }
    }
    Ok(verdict)
}

/// The dissection itself as candidate arcs, each traversed from end 0.
pub fn dissection_arcs(d: &DissectedSurface) -> (Vec<String>, Vec<CurvePath>) {
    (
        d.arcs.clone(),
        (0..d.arcs.len()).map(|e| CurvePath::arc(half(e, 0))).collect(),
    )
}

/// Parses a candidate file:
///
/// ```text
/// candidate flip
/// arc x: 1.+ 2.-
/// arc y: 3.+ @ -1
/// ```
///
/// Arcs without `@ <grading>` get grading 0.
pub fn parse_candidate(d: &DissectedSurface, text: &str) -> Result<GradedDissection, TiltError> {
    let mut gd = GradedDissection {
        names: Vec::new(),
        arcs: Vec::new(),
        gradings: Vec::new(),
    };
    let err = |line, msg: &str| TiltError::Syntax {
        line,
        msg: msg.to_string(),
    };
    for (ln0, raw) in text.lines().enumerate() {
        let ln = ln0 + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("candidate") {
            if rest.split_whitespace().count() != 1 {
                return Err(err(ln, "expected `candidate <name>`"));
            }
            continue;
        }
        let Some(rest) = line.strip_prefix("arc ") else {
            return Err(err(ln, "expected `arc <id>: <steps> [@ <grading>]`"));
        };
        let (id, body) = rest
            .split_once(':')
            .ok_or_else(|| err(ln, "missing `:` after arc id"))?;
        let id = id.trim();
        if id.is_empty() || id.contains(char::is_whitespace) {
            return Err(err(ln, "invalid arc id"));
        }
        let (steps, grading) = match body.split_once('@') {
            Some((s, g)) => (
                s,
                g.trim()
                    .parse::<i64>()
                    .map_err(|_| err(ln, "grading must be an integer"))?,
            ),
            None => (body, 0),
        };
        let c = parse_curve(d, steps, CurveKind::Open).map_err(|source| TiltError::Curve {
            arc: id.to_string(),
            source,
        })?;
        gd.names.push(id.to_string());
        gd.arcs.push(c);
        gd.gradings.push(grading);
    }
    Ok(gd)
}
