//! Dissected marked surfaces of gentle algebras.
//!
//! Each vertex of the quiver becomes an arc with two ends. The ends meeting at
//! a green marked point form a fan, listed counter-clockwise, and the boundary
//! of the surface passes through the gap after the last member. A fan without
//! gap is an interior green point; only locally gentle algebras have those.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::presentation::{validate_gentle, Classification, GentlePresentation, InvalidReason};
use crate::ribbon::{edge_of, end_of, half, twin, Face, Half, Ribbon, RibbonError, Slot};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fan {
    pub ends: Vec<Half>,
    pub interior: bool,
}

#[derive(Debug, Clone)]
pub struct DissectedSurface {
    pub name: String,
    pub arcs: Vec<String>,
    pub fans: Vec<Fan>,
    ribbon: Ribbon,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("presentation is not locally gentle: {0}")]
    Invalid(InvalidReason),
    #[error("inconsistent arrow attachments at arc {arc}: {detail}")]
    Inconsistent { arc: String, detail: String },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("arc end {0} is not in exactly one fan")]
    BadFans(String),
    #[error("the ribbon graph is disconnected")]
    Disconnected,
    #[error(transparent)]
    Ribbon(#[from] RibbonError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceShape {
    pub genus: usize,
    pub boundary: usize,
    pub punctures: usize,
    pub marked_green: usize,
    pub marked_red: usize,
    pub boundary_marks: Vec<usize>,
    #[serde(skip_serializing_if = "is_zero")]
    pub interior_green: usize,
}

fn is_zero(x: &usize) -> bool {
    *x == 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionKind {
    /// A disc whose red point sits on a boundary segment.
    Boundary,
    /// A punctured disc around an interior red point.
    Puncture,
}

/// One complementary region of the dissection. `sides` lists the arc sides
/// with the region on their right; a boundary region is closed up by one
/// boundary segment running from the end of the last side to the start of the
/// first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Region {
    pub kind: RegionKind,
    pub face: usize,
    pub sides: Vec<Half>,
}

impl DissectedSurface {
    pub fn new(name: impl Into<String>, arcs: Vec<String>, fans: Vec<Fan>) -> Result<Self, SurfaceError> {
        let mut count = vec![0usize; 2 * arcs.len()];
        for f in &fans {
            for &h in &f.ends {
                if h >= count.len() {
                    return Err(SurfaceError::BadFans(h.to_string()));
                }
                count[h] += 1;
            }
        }
        if let Some(h) = count.iter().position(|&c| c != 1) {
            return Err(SurfaceError::BadFans(format!("{}.{}", arcs[edge_of(h)], end_of(h))));
        }
        let rot = fans
            .iter()
            .map(|f| {
                let mut s: Vec<Slot> = f.ends.iter().map(|&h| Slot::Half(h)).collect();
                if !f.interior {
                    s.push(Slot::Mark);
                }
                s
            })
            .collect();
        let ribbon = Ribbon::new(arcs.len(), rot)?;
        if !ribbon.is_connected() {
            return Err(SurfaceError::Disconnected);
        }
        Ok(DissectedSurface {
            name: name.into(),
            arcs,
            fans,
            ribbon,
        })
    }

    pub fn ribbon(&self) -> &Ribbon {
        &self.ribbon
    }

    pub fn half_name(&self, h: Half) -> String {
        format!("{}.{}", self.arcs[edge_of(h)], end_of(h))
    }

    pub fn arc_index(&self, id: &str) -> Option<usize> {
        self.arcs.iter().position(|a| a == id)
    }

    /// Name of a fan: the name of its first end.
    pub fn fan_name(&self, v: usize) -> String {
        self.half_name(self.fans[v].ends[0])
    }

    pub fn has_interior(&self) -> bool {
        self.fans.iter().any(|f| f.interior)
    }

    /// Faces in a fixed order: by smallest half-edge in the walk.
    pub fn faces(&self) -> Vec<Face> {
        self.ribbon.faces()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("surface {}\n", self.name);
        for a in &self.arcs {
            out.push_str(&format!("arc {a}\n"));
        }
        for f in &self.fans {
            out.push_str(if f.interior { "interior-vertex:" } else { "vertex:" });
            for &h in &f.ends {
                out.push(' ');
                out.push_str(&self.half_name(h));
            }
            out.push('\n');
        }
        out
    }
}

/// Builds the surface of a gentle or locally gentle presentation.
pub fn build_dissected_surface(p: &GentlePresentation) -> Result<DissectedSurface, SurfaceError> {
    if let Classification::Invalid { reason } = validate_gentle(p) {
        return Err(SurfaceError::Invalid(reason));
    }
    let n = p.vertices.len();
    // Attachment variables: (arrow, is_out). Ends are chosen arc by arc.
    let mut at_arc: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for (a, ar) in p.arrows.iter().enumerate() {
        at_arc[ar.source].push((a, true));
        at_arc[ar.target].push((a, false));
    }
    let mut end_in = vec![usize::MAX; p.arrows.len()];
    let mut end_out = vec![usize::MAX; p.arrows.len()];
    for (j, vars) in at_arc.iter_mut().enumerate() {
        vars.sort_by(|x, y| (&p.arrows[x.0].id, x.1).cmp(&(&p.arrows[y.0].id, y.1)));
        // parity[u][v] = 1 when u and v must sit at opposite ends
        let m = vars.len();
        let mut cons: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
        for u in 0..m {
            for v in u + 1..m {
                let (a, ao) = vars[u];
                let (b, bo) = vars[v];
                let par = match (ao, bo) {
                    (true, true) | (false, false) => 1,
                    (false, true) => usize::from(p.is_relation(a, b)),
                    (true, false) => usize::from(p.is_relation(b, a)),
                };
                cons[u].push((v, par));
                cons[v].push((u, par));
            }
        }
        let mut col = vec![usize::MAX; m];
        for s in 0..m {
            if col[s] != usize::MAX {
                continue;
            }
            col[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &(v, par) in &cons[u] {
                    let want = col[u] ^ par;
                    if col[v] == usize::MAX {
                        col[v] = want;
                        q.push_back(v);
                    } else if col[v] != want {
                        return Err(SurfaceError::Inconsistent {
                            arc: p.vertices[j].clone(),
                            detail: "attachment constraints cannot be satisfied".into(),
                        });
                    }
                }
            }
        }
        for (k, &(a, out)) in vars.iter().enumerate() {
            if out {
                end_out[a] = col[k];
            } else {
                end_in[a] = col[k];
            }
        }
    }
    let mut succ: Vec<Option<Half>> = vec![None; 2 * n];
    let mut has_pred = vec![false; 2 * n];
    for (a, ar) in p.arrows.iter().enumerate() {
        let from = half(ar.source, end_out[a]);
        let to = half(ar.target, end_in[a]);
        if succ[from].is_some() || has_pred[to] {
            return Err(SurfaceError::Inconsistent {
                arc: p.vertices[if succ[from].is_some() { ar.source } else { ar.target }].clone(),
                detail: format!("two arrows attach at the same end (arrow {})", ar.id),
            });
        }
        succ[from] = Some(to);
        has_pred[to] = true;
    }
    let mut seen = vec![false; 2 * n];
    let mut fans = Vec::new();
    for h in 0..2 * n {
        if has_pred[h] || seen[h] {
            continue;
        }
        let mut ends = Vec::new();
        let mut cur = Some(h);
        while let Some(x) = cur {
            seen[x] = true;
            ends.push(x);
            cur = succ[x];
        }
        fans.push(Fan { ends, interior: false });
    }
    for h in 0..2 * n {
        if seen[h] {
            continue;
        }
        let mut ends = Vec::new();
        let mut x = h;
        while !seen[x] {
            seen[x] = true;
            ends.push(x);
            x = succ[x].expect("cyclic chains are closed");
        }
        fans.push(Fan { ends, interior: true });
    }
    log::debug!("built surface {} with {} fans", p.name, fans.len());
    DissectedSurface::new(p.name.clone(), p.vertices.clone(), fans)
}

/// The algebra of a dissection: one vertex per arc, an arrow per consecutive
/// pair in a fan (including the wrap-around pair at interior points), and a
/// relation whenever two arrows meet at opposite ends of their common arc.
pub fn algebra_of_dissection(d: &DissectedSurface) -> GentlePresentation {
    let mut p = GentlePresentation::new(d.name.clone());
    for a in &d.arcs {
        p.add_vertex(a);
    }
    // arrow index by the half-edge it leaves from
    let mut from_half: HashMap<Half, usize> = HashMap::new();
    let mut pairs = Vec::new();
    for f in &d.fans {
        let s = f.ends.len();
        let count = if f.interior { s } else { s.saturating_sub(1) };
        for t in 0..count {
            pairs.push((f.ends[t], f.ends[(t + 1) % s]));
        }
    }
    for (k, &(x, y)) in pairs.iter().enumerate() {
        let a = p.add_arrow(&format!("a{}", k + 1), edge_of(x), edge_of(y));
        from_half.insert(x, a);
    }
    for (k, &(_, y)) in pairs.iter().enumerate() {
        if let Some(&b) = from_half.get(&twin(y)) {
            p.relations.insert((k, b));
        }
    }
    p
}

pub fn compute_shape(d: &DissectedSurface) -> SurfaceShape {
    let faces = d.faces();
    let mut boundary_marks: Vec<usize> = faces.iter().map(Face::mark_count).filter(|&m| m > 0).collect();
    boundary_marks.sort_unstable();
    let b = boundary_marks.len();
    let p = faces.len() - b;
    let v = d.fans.len() as i64;
    let e = d.arcs.len() as i64;
    let chi = v - e + faces.len() as i64;
    let genus = ((2 - chi) / 2) as usize;
    SurfaceShape {
        genus,
        boundary: b,
        punctures: p,
        marked_green: d.fans.len(),
        marked_red: boundary_marks.iter().sum(),
        boundary_marks,
        interior_green: d.fans.iter().filter(|f| f.interior).count(),
    }
}

/// Splits faces at their gap corners.
pub fn regions(d: &DissectedSurface) -> Vec<Region> {
    let mut out = Vec::new();
    for (fi, f) in d.faces().into_iter().enumerate() {
        let k = f.walk.len();
        let gaps: Vec<usize> = (0..k).filter(|&i| f.marks[i] > 0).collect();
        if gaps.is_empty() {
            out.push(Region {
                kind: RegionKind::Puncture,
                face: fi,
                sides: f.walk.clone(),
            });
            continue;
        }
        for (gi, &g) in gaps.iter().enumerate() {
            let next = gaps[(gi + 1) % gaps.len()];
            let mut sides = Vec::new();
            let mut i = (g + 1) % k;
            loop {
                sides.push(f.walk[i]);
                if i == next {
                    break;
                }
                i = (i + 1) % k;
            }
            out.push(Region {
                kind: RegionKind::Boundary,
                face: fi,
                sides,
            });
        }
    }
    out
}

pub fn parse_dissection(text: &str) -> Result<DissectedSurface, SurfaceError> {
    let mut name = String::new();
    let mut arcs: Vec<String> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut fans = Vec::new();
    let err = |line: usize, msg: String| SurfaceError::Syntax { line, msg };
    for (ln0, raw) in text.lines().enumerate() {
        let ln = ln0 + 1;
        let line = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };
        match head {
            "surface" => {
                if toks.len() != 2 {
                    return Err(err(ln, "expected `surface <name>`".into()));
                }
                name = toks[1].to_string();
            }
            "arc" => {
                if toks.len() != 2 {
                    return Err(err(ln, "expected `arc <id>`".into()));
                }
                if index.insert(toks[1].to_string(), arcs.len()).is_some() {
                    return Err(err(ln, format!("duplicate arc `{}`", toks[1])));
                }
                arcs.push(toks[1].to_string());
            }
            "vertex:" | "interior-vertex:" => {
                let mut ends = Vec::new();
                for t in &toks[1..] {
                    let (a, e) = t
                        .rsplit_once('.')
                        .ok_or_else(|| err(ln, format!("expected <arc>.<0|1>, found `{t}`")))?;
                    let &ai = index.get(a).ok_or_else(|| err(ln, format!("unknown arc `{a}`")))?;
                    let e = match e {
                        "0" => 0,
                        "1" => 1,
                        _ => return Err(err(ln, format!("arc end must be 0 or 1 in `{t}`"))),
                    };
                    ends.push(half(ai, e));
                }
                if ends.is_empty() {
                    return Err(err(ln, "empty fan".into()));
                }
                fans.push(Fan {
                    ends,
                    interior: head == "interior-vertex:",
                });
            }
            _ => return Err(err(ln, format!("unknown directive `{head}`"))),
        }
    }
    DissectedSurface::new(name, arcs, fans)
}
