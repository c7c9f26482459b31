//! Surface cut algebras.
//!
//! A triangulation of a marked surface (marked points on the boundary only)
//! together with an admissible cut: one angle of degree 1 in every triangle
//! whose three sides are internal arcs. The cut algebra keeps the degree 0
//! angles as arrows and kills compositions inside a triangle.
//!
//! Closed curves are recorded as sequences of triangle crossings. The degree
//! of a curve counts the degree 1 corners it cuts off, with sign +1 for a
//! corner on its right.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::homology::HomologyError;
use crate::invariants::{compare_genus, genus_datum, Clause, GenusDatum, InvariantError, InvariantOptions, Verdict};
use crate::presentation::GentlePresentation;
use crate::ribbon::{half, reduce_closed, twin, Half, Ribbon, RibbonError, Slot};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Side {
    pub id: String,
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Triangle {
    pub id: String,
    /// Side indices in counter-clockwise order. Corner `k` sits between
    /// sides `k` and `k + 1`.
    pub sides: [usize; 3],
}

/// One passage of a curve through a triangle, as side slots `0..3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Crossing {
    pub triangle: usize,
    pub entry: usize,
    pub exit: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedCurve {
    pub name: String,
    pub crossings: Vec<Crossing>,
}

#[derive(Debug, Clone)]
pub struct CutTriangulation {
    pub name: String,
    pub sides: Vec<Side>,
    pub triangles: Vec<Triangle>,
    /// Corners `(triangle, k)` of degree 1.
    pub cut: BTreeSet<(usize, usize)>,
    pub curves: Vec<NamedCurve>,
    /// Edge index of each internal side (`None` for boundary sides).
    edge_of_side: Vec<Option<usize>>,
    /// Sides of each dual edge.
    internal: Vec<usize>,
    dual: Ribbon,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("side {side} is used {count} times; internal sides need 2 slots, boundary sides 1")]
    BadSide { side: String, count: usize },
    #[error("triangle {0} is self-folded (uses one side twice)")]
    SelfFolded(String),
    #[error("triangle {triangle} has {count} cut corners; {expected} expected")]
    Inadmissible {
        triangle: String,
        count: usize,
        expected: usize,
    },
    #[error("crossing {step}: {msg}")]
    BadCurve { step: usize, msg: String },
    #[error("the triangulation is disconnected")]
    Disconnected,
    #[error("boundary face {0} carries no marked point (interior punctures are not supported)")]
    InteriorPuncture(usize),
    #[error(transparent)]
    Ribbon(#[from] RibbonError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CutShape {
    pub genus: usize,
    pub boundary: usize,
    pub marked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CutRecord {
    pub shape: CutShape,
    /// Sorted pairs `(n_j, d(c_j))`.
    pub boundary: Vec<(usize, i64)>,
    pub genus_datum: GenusDatum,
}

#[derive(Debug, Error)]
pub enum CutInvariantError {
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

impl From<HomologyError> for CutInvariantError {
    fn from(e: HomologyError) -> Self {
        CutInvariantError::Invariant(InvariantError::Homology(e))
    }
}

/// A boundary curve of the triangulated surface, reduced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutBoundary {
    pub walk: Vec<Half>,
    pub marks: usize,
    pub degree: i64,
}

impl CutTriangulation {
    pub fn new(
        name: impl Into<String>,
        sides: Vec<Side>,
        triangles: Vec<Triangle>,
        cut: BTreeSet<(usize, usize)>,
    ) -> Result<CutTriangulation, CutError> {
        let mut uses: Vec<Vec<(usize, usize)>> = vec![Vec::new(); sides.len()];
        for (t, tri) in triangles.iter().enumerate() {
            let s = tri.sides;
            if s[0] == s[1] || s[1] == s[2] || s[0] == s[2] {
                return Err(CutError::SelfFolded(tri.id.clone()));
            }
            for (k, &x) in s.iter().enumerate() {
                uses[x].push((t, k));
            }
        }
        let mut edge_of_side = vec![None; sides.len()];
        let mut internal = Vec::new();
        for (i, side) in sides.iter().enumerate() {
            let want = if side.boundary { 1 } else { 2 };
            if uses[i].len() != want {
                return Err(CutError::BadSide {
                    side: side.id.clone(),
                    count: uses[i].len(),
                });
            }
            if !side.boundary {
                edge_of_side[i] = Some(internal.len());
                internal.push(i);
            }
        }
        // first use of an internal side is end 0 of its dual edge
        let mut rot = vec![Vec::new(); triangles.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for &x in &tri.sides {
                rot[t].push(match edge_of_side[x] {
                    None => Slot::Mark,
                    Some(e) => Slot::Half(half(e, usize::from(uses[x][0].0 != t))),
                });
            }
        }
        let dual = Ribbon::new(internal.len(), rot)?;
        if !dual.is_connected() {
            return Err(CutError::Disconnected);
        }
        for (t, tri) in triangles.iter().enumerate() {
            let is_internal = tri.sides.iter().all(|&x| !sides[x].boundary);
            let count = (0..3).filter(|&k| cut.contains(&(t, k))).count();
            let expected = usize::from(is_internal);
            if count != expected {
                return Err(CutError::Inadmissible {
                    triangle: tri.id.clone(),
                    count,
                    expected,
                });
            }
        }
        Ok(CutTriangulation {
            name: name.into(),
            sides,
            triangles,
            cut,
            curves: Vec::new(),
            edge_of_side,
            internal,
            dual,
        })
    }

    /// The dual ribbon graph: one vertex per triangle, one edge per internal
    /// side, boundary sides as markers.
    pub fn dual(&self) -> &Ribbon {
        &self.dual
    }

    pub fn side_index(&self, id: &str) -> Option<usize> {
        self.sides.iter().position(|s| s.id == id)
    }

    pub fn triangle_index(&self, id: &str) -> Option<usize> {
        self.triangles.iter().position(|t| t.id == id)
    }

    pub fn degree(&self, t: usize, corner: usize) -> i64 {
        i64::from(self.cut.contains(&(t, corner)))
    }

    pub fn curve(&self, name: &str) -> Option<&[Crossing]> {
        self.curves
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.crossings.as_slice())
    }

    /// Same triangulation with another cut.
    pub fn with_cut(&self, cut: BTreeSet<(usize, usize)>) -> Result<CutTriangulation, CutError> {
        let mut t = CutTriangulation::new(self.name.clone(), self.sides.clone(), self.triangles.clone(), cut)?;
        t.curves = self.curves.clone();
        Ok(t)
    }

    /// Signed contribution of one crossing.
    fn crossing_degree(&self, c: Crossing) -> Result<i64, String> {
        if c.entry == c.exit || c.entry > 2 || c.exit > 2 {
            return Err("entry and exit must be two different sides".into());
        }
        if c.exit == (c.entry + 1) % 3 {
            Ok(self.degree(c.triangle, c.entry))
        } else {
            Ok(-self.degree(c.triangle, c.exit))
        }
    }

    /// Crossings of a closed walk in the dual ribbon graph.
    pub fn walk_crossings(&self, walk: &[Half]) -> Vec<Crossing> {
        Ribbon::passages(walk)
            .into_iter()
            .map(|(x, y)| Crossing {
                triangle: self.dual.vertex(x),
                entry: self.dual.position(x),
                exit: self.dual.position(y),
            })
            .collect()
    }

    /// The dual walk of a closed crossing sequence.
    pub fn crossings_walk(&self, cs: &[Crossing]) -> Result<Vec<Half>, CutError> {
        check_cycle(self, cs)?;
        let mut walk = Vec::with_capacity(cs.len());
        for c in cs {
            let s = self.triangles[c.triangle].sides[c.exit];
            let e = self.edge_of_side[s].expect("checked internal");
            let h = if self.dual.vertex(half(e, 0)) == c.triangle && self.dual.position(half(e, 0)) == c.exit {
                half(e, 0)
            } else {
                half(e, 1)
            };
            walk.push(h);
        }
        Ok(walk)
    }

    pub fn shape(&self) -> Result<CutShape, CutError> {
        let faces = self.dual.faces();
        let mut marked = 0;
        for (i, f) in faces.iter().enumerate() {
            if f.mark_count() == 0 {
                return Err(CutError::InteriorPuncture(i));
            }
            marked += f.mark_count();
        }
        let chi = self.triangles.len() as i64 - self.internal.len() as i64 + faces.len() as i64;
        Ok(CutShape {
            genus: ((2 - chi) / 2) as usize,
            boundary: faces.len(),
            marked,
        })
    }

    /// Boundary curves: each face of the dual graph traced backwards (so the
    /// boundary lies to the left), with U-turns at ears cancelled.
    pub fn boundary_curves(&self) -> Result<Vec<CutBoundary>, CutError> {
        let mut out = Vec::new();
        for (i, f) in self.dual.faces().into_iter().enumerate() {
            if f.mark_count() == 0 {
                return Err(CutError::InteriorPuncture(i));
            }
            let walk = reduce_closed(&crate::ribbon::reverse_walk(&f.walk));
            let degree = if walk.is_empty() {
                // contractible: the surface is a disc
                2
            } else {
                cut_degree(self, &self.walk_crossings(&walk))?
            };
            out.push(CutBoundary {
                walk,
                marks: f.mark_count(),
                degree,
            });
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("triangulation {}\n", self.name);
        for t in &self.triangles {
            out.push_str(&format!(
                "triangle {}: {} {} {}\n",
                t.id, self.sides[t.sides[0]].id, self.sides[t.sides[1]].id, self.sides[t.sides[2]].id
            ));
        }
        for s in self.sides.iter().filter(|s| s.boundary) {
            out.push_str(&format!("boundary {}\n", s.id));
        }
        for &(t, k) in &self.cut {
            out.push_str(&format!("cut {}.{} = 1\n", self.triangles[t].id, k));
        }
        for c in &self.curves {
            out.push_str(&format!("curve {}\n", c.name));
            for x in &c.crossings {
                let tri = &self.triangles[x.triangle];
                out.push_str(&format!(
                    "cross {} {} {}\n",
                    tri.id, self.sides[tri.sides[x.entry]].id, self.sides[tri.sides[x.exit]].id
                ));
            }
        }
        out
    }
}

fn check_cycle(t: &CutTriangulation, cs: &[Crossing]) -> Result<(), CutError> {
    if cs.is_empty() {
        return Err(CutError::BadCurve {
            step: 0,
            msg: "empty curve".into(),
        });
    }
    for (i, c) in cs.iter().enumerate() {
        if c.entry == c.exit {
            return Err(CutError::BadCurve {
                step: i,
                msg: "entry side equals exit side".into(),
            });
        }
        let next = cs[(i + 1) % cs.len()];
        let s_out = t.triangles[c.triangle].sides[c.exit];
        let s_in = t.triangles[next.triangle].sides[next.entry];
        if s_out != s_in {
            return Err(CutError::BadCurve {
                step: i,
                msg: format!(
                    "exit side {} differs from the next entry side {}",
                    t.sides[s_out].id, t.sides[s_in].id
                ),
            });
        }
        let Some(e) = t.edge_of_side[s_out] else {
            return Err(CutError::BadCurve {
                step: i,
                msg: format!("side {} is a boundary side", t.sides[s_out].id),
            });
        };
        // leaving through one slot of the side, entering through the other
        let here = twin_slot(t, e, c.triangle, c.exit);
        if here != Some((next.triangle, next.entry)) {
            return Err(CutError::BadCurve {
                step: i,
                msg: format!(
                    "side {} does not lead into triangle {}",
                    t.sides[s_out].id, t.triangles[next.triangle].id
                ),
            });
        }
    }
    Ok(())
}

fn twin_slot(t: &CutTriangulation, e: usize, tri: usize, k: usize) -> Option<(usize, usize)> {
    for end in 0..2 {
        let h = half(e, end);
        if t.dual.vertex(h) == tri && t.dual.position(h) == k {
            let o = twin(h);
            return Some((t.dual.vertex(o), t.dual.position(o)));
        }
    }
    None
}

/// Signed count of degree 1 corners cut off by a closed crossing sequence.
pub fn cut_degree(t: &CutTriangulation, curve: &[Crossing]) -> Result<i64, CutError> {
    check_cycle(t, curve)?;
    let mut total = 0;
    for (i, &c) in curve.iter().enumerate() {
        total += t
            .crossing_degree(c)
            .map_err(|msg| CutError::BadCurve { step: i, msg })?;
    }
    Ok(total)
}

pub fn reverse_crossings(curve: &[Crossing]) -> Vec<Crossing> {
    curve
        .iter()
        .rev()
        .map(|c| Crossing {
            triangle: c.triangle,
            entry: c.exit,
            exit: c.entry,
        })
        .collect()
}

/// Quiver with relations of the degree 0 part: internal sides as vertices,
/// degree 0 corners between two internal sides as arrows (from side `k + 1`
/// to side `k`), and zero relations for consecutive arrows in a triangle.
pub fn cut_algebra(t: &CutTriangulation) -> GentlePresentation {
    let mut p = GentlePresentation::new(t.name.clone());
    let mut vid = BTreeMap::new();
    for &s in &t.internal {
        vid.insert(s, p.add_vertex(&t.sides[s].id));
    }
    let mut arrow_at = BTreeMap::new();
    for (ti, tri) in t.triangles.iter().enumerate() {
        for k in 0..3 {
            let (s0, s1) = (tri.sides[k], tri.sides[(k + 1) % 3]);
            if t.sides[s0].boundary || t.sides[s1].boundary || t.cut.contains(&(ti, k)) {
                continue;
            }
            let a = p.add_arrow(&format!("{}.{}", tri.id, k), vid[&s1], vid[&s0]);
            arrow_at.insert((ti, k), a);
        }
    }
    for (&(ti, k), &a) in &arrow_at {
        if let Some(&b) = arrow_at.get(&(ti, (k + 2) % 3)) {
            p.relations.insert((a, b));
        }
    }
    p
}

pub fn cut_record(t: &CutTriangulation, opts: &InvariantOptions) -> Result<CutRecord, CutInvariantError> {
    let shape = t.shape()?;
    let bs = t.boundary_curves()?;
    let mut boundary: Vec<(usize, i64)> = bs.iter().map(|b| (b.marks, b.degree)).collect();
    boundary.sort_unstable();
    let walks: Vec<Vec<Half>> = bs.iter().map(|b| b.walk.clone()).collect();
    let degrees: Vec<i64> = bs.iter().map(|b| b.degree).collect();
    let weight = |w: &[Half]| cut_degree(t, &t.walk_crossings(w)).map_err(|e| e.to_string());
    let root = (0..t.triangles.len()).min_by_key(|&i| &t.triangles[i].id).unwrap_or(0);
    let genus_datum = genus_datum(&t.dual, shape.genus, &walks, &degrees, root, &weight, opts)?;
    Ok(CutRecord {
        shape,
        boundary,
        genus_datum,
    })
}

pub fn compare_cut_records(a: &CutRecord, b: &CutRecord) -> Verdict {
    if a.shape != b.shape {
        return Verdict::Inequivalent {
            clause: Clause::Shape,
            detail: format!("{:?} vs {:?}", a.shape, b.shape),
        };
    }
    if a.boundary != b.boundary {
        return Verdict::Inequivalent {
            clause: Clause::BoundaryData,
            detail: format!("{:?} vs {:?}", a.boundary, b.boundary),
        };
    }
    compare_genus(&a.genus_datum, &b.genus_datum)
}

pub fn cut_equivalent(
    a: &CutTriangulation,
    b: &CutTriangulation,
    opts: &InvariantOptions,
) -> Result<Verdict, CutInvariantError> {
    Ok(compare_cut_records(&cut_record(a, opts)?, &cut_record(b, opts)?))
}

pub fn parse_triangulation(text: &str) -> Result<CutTriangulation, CutError> {
    let mut name = String::new();
    let mut sides: Vec<Side> = Vec::new();
    let mut side_ix: BTreeMap<String, usize> = BTreeMap::new();
    let mut tris: Vec<(String, [String; 3], usize)> = Vec::new();
    let mut boundary: Vec<(String, usize)> = Vec::new();
    let mut cuts: Vec<(String, usize, usize)> = Vec::new();
    // (name, [(triangle, entry side, exit side, line)])
    type RawCurve = (String, Vec<(String, String, String, usize)>);
    let mut curves: Vec<RawCurve> = Vec::new();
    let err = |line, msg: String| CutError::Syntax { line, msg };

    for (ln0, raw) in text.lines().enumerate() {
        let ln = ln0 + 1;
        let line = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };
        match head {
            "triangulation" => {
                if toks.len() != 2 {
                    return Err(err(ln, "expected `triangulation <name>`".into()));
                }
                name = toks[1].to_string();
            }
            "triangle" => {
                if toks.len() != 5 || !toks[1].ends_with(':') {
                    return Err(err(ln, "expected `triangle <id>: <side> <side> <side>`".into()));
                }
                let ss = [toks[2].to_string(), toks[3].to_string(), toks[4].to_string()];
                for s in &ss {
                    if !side_ix.contains_key(s) {
                        side_ix.insert(s.clone(), sides.len());
                        sides.push(Side {
                            id: s.clone(),
                            boundary: false,
                        });
                    }
                }
                tris.push((toks[1].trim_end_matches(':').to_string(), ss, ln));
            }
            "boundary" => {
                if toks.len() < 2 {
                    return Err(err(ln, "expected `boundary <side> ...`".into()));
                }
                for s in &toks[1..] {
                    boundary.push((s.to_string(), ln));
                }
            }
            "cut" => {
                // cut <tri>.<k> = <0|1>
                if toks.len() != 4 || toks[2] != "=" {
                    return Err(err(ln, "expected `cut <triangle>.<corner> = 1`".into()));
                }
                let (t, k) = toks[1]
                    .rsplit_once('.')
                    .ok_or_else(|| err(ln, "expected <triangle>.<corner>".into()))?;
                let k: usize = k
                    .parse()
                    .ok()
                    .filter(|&k| k < 3)
                    .ok_or_else(|| err(ln, "corner index must be 0, 1 or 2".into()))?;
                match toks[3] {
                    "1" => cuts.push((t.to_string(), k, ln)),
                    "0" => {}
                    _ => return Err(err(ln, "cut degree must be 0 or 1".into())),
                }
            }
            "curve" => {
                if toks.len() != 2 {
                    return Err(err(ln, "expected `curve <name>`".into()));
                }
                curves.push((toks[1].to_string(), Vec::new()));
            }
            "cross" => {
                if toks.len() != 4 {
                    return Err(err(ln, "expected `cross <triangle> <entry> <exit>`".into()));
                }
                let c = curves
                    .last_mut()
                    .ok_or_else(|| err(ln, "`cross` before any `curve`".into()))?;
                c.1.push((toks[1].to_string(), toks[2].to_string(), toks[3].to_string(), ln));
            }
            _ => return Err(err(ln, format!("unknown directive `{head}`"))),
        }
    }
    for (s, ln) in boundary {
        let &i = side_ix
            .get(&s)
            .ok_or_else(|| err(ln, format!("boundary side `{s}` is not used by any triangle")))?;
        sides[i].boundary = true;
    }
    let mut triangles = Vec::new();
    let mut tri_ix = BTreeMap::new();
    for (id, ss, ln) in &tris {
        if tri_ix.insert(id.clone(), triangles.len()).is_some() {
            return Err(err(*ln, format!("duplicate triangle `{id}`")));
        }
        triangles.push(Triangle {
            id: id.clone(),
            sides: [side_ix[&ss[0]], side_ix[&ss[1]], side_ix[&ss[2]]],
        });
    }
    let mut cut = BTreeSet::new();
    for (t, k, ln) in cuts {
        let &ti = tri_ix
            .get(&t)
            .ok_or_else(|| err(ln, format!("unknown triangle `{t}`")))?;
        cut.insert((ti, k));
    }
    let mut out = CutTriangulation::new(name, sides, triangles, cut)?;
    for (cname, steps) in curves {
        let mut crossings = Vec::new();
        for (t, a, b, ln) in steps {
            let &ti = tri_ix
                .get(&t)
                .ok_or_else(|| err(ln, format!("unknown triangle `{t}`")))?;
            let slot = |s: &str| {
                out.side_index(s)
                    .and_then(|si| out.triangles[ti].sides.iter().position(|&x| x == si))
                    .ok_or_else(|| err(ln, format!("side `{s}` is not a side of triangle `{t}`")))
            };
            crossings.push(Crossing {
                triangle: ti,
                entry: slot(&a)?,
                exit: slot(&b)?,
            });
        }
        check_cycle(&out, &crossings)?;
        out.curves.push(NamedCurve { name: cname, crossings });
    }
    Ok(out)
}
