//! The complete derived invariant and the equivalence decision.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::curves::{boundary_curves, CurveError};
use crate::homology::{
    arf_invariant, find_symplectic_pair, genus_one_gcd, quadratic_form, HomologyError, HomologySpace, QuadraticOutcome,
    TreeChoice,
};
use crate::presentation::{validate_gentle, Classification, GentlePresentation};
use crate::ribbon::{Half, Ribbon};
use crate::surface::{build_dissected_surface, compute_shape, DissectedSurface, RegionKind, SurfaceError};

pub const DEFAULT_BUDGET: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvariantOptions {
    /// Cap on spliced candidates in the genus one search.
    pub budget: usize,
    /// `None` uses the canonical spanning tree.
    pub seed: Option<u64>,
}

impl Default for InvariantOptions {
    fn default() -> Self {
        InvariantOptions {
            budget: DEFAULT_BUDGET,
            seed: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum InvariantError {
    #[error("algebra is not gentle: {0}")]
    NotGentle(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ShapeKey {
    pub genus: usize,
    pub boundary: usize,
    pub punctures: usize,
    pub marked_green: usize,
    pub marked_red: usize,
}

/// The genus part of the invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum GenusDatum {
    /// Genus zero: nothing beyond the boundary data.
    None,
    /// Genus one: `gcd{w(alpha), w(beta), w(c) + 2}`.
    Gcd { value: u64 },
    /// Genus at least two and some winding is odd.
    OddWinding,
    /// All windings even and some boundary winding divisible by 4.
    EvenZeroModFour,
    /// All windings even, all boundary windings 2 mod 4: the Arf invariant.
    Arf { value: u8 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct InvariantRecord {
    pub shape: ShapeKey,
    /// Sorted pairs `(n_j, w(c_j))` over boundary components.
    pub boundary: Vec<(usize, i64)>,
    /// Sorted windings of the puncture curves.
    pub punctures: Vec<i64>,
    /// Sorted pairs `(n_j, n_j - w(c_j))`, punctures included with `n = 0`.
    pub ag: Vec<(i64, i64)>,
    pub genus_datum: GenusDatum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    Shape,
    BoundaryData,
    PunctureData,
    GenusOneGcd,
    ParityCase,
    Arf,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Clause::Shape => "shape",
            Clause::BoundaryData => "boundary-data",
            Clause::PunctureData => "puncture-data",
            Clause::GenusOneGcd => "genus-one-gcd",
            Clause::ParityCase => "parity-case",
            Clause::Arf => "arf",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Equivalent,
    Inequivalent { clause: Clause, detail: String },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent)
    }
}

/// Genus datum of a surface given as a ribbon graph with its boundary curves
/// and a winding function on closed walks.
pub fn genus_datum(
    r: &Ribbon,
    genus: usize,
    boundary_walks: &[Vec<Half>],
    boundary_winding: &[i64],
    root: usize,
    weight: &dyn Fn(&[Half]) -> Result<i64, String>,
    opts: &InvariantOptions,
) -> Result<GenusDatum, InvariantError> {
    if genus == 0 {
        return Ok(GenusDatum::None);
    }
    let choice = match opts.seed {
        Some(s) => TreeChoice::Seeded(s),
        None => TreeChoice::Canonical(root),
    };
    let h = HomologySpace::new(r, boundary_walks, genus, choice)?;
    if genus == 1 {
        let pair = find_symplectic_pair(r, &h, weight, opts.budget)?;
        return Ok(GenusDatum::Gcd {
            value: genus_one_gcd(&pair, boundary_winding),
        });
    }
    let basis_w = h
        .basis
        .iter()
        .map(|b| weight(b))
        .collect::<Result<Vec<i64>, String>>()
        .map_err(HomologyError::Weight)?;
    match quadratic_form(&basis_w, boundary_winding) {
        QuadraticOutcome::NotDefined { witness } => {
            log::debug!("odd winding witness: {witness:?}");
            Ok(GenusDatum::OddWinding)
        }
        QuadraticOutcome::Defined(q) => {
            if boundary_winding.iter().any(|w| w.rem_euclid(4) == 0) {
                Ok(GenusDatum::EvenZeroModFour)
            } else {
                Ok(GenusDatum::Arf {
                    value: arf_invariant(&q, &h)?,
                })
            }
        }
    }
}

/// Index of the fan whose name is lexicographically least.
pub fn least_fan(d: &DissectedSurface) -> usize {
    (0..d.fans.len()).min_by_key(|&v| d.fan_name(v)).unwrap_or(0)
}

pub fn surface_invariants(d: &DissectedSurface, opts: &InvariantOptions) -> Result<InvariantRecord, InvariantError> {
    let shape = compute_shape(d);
    let curves = boundary_curves(d)?;
    let mut boundary = Vec::new();
    let mut punctures = Vec::new();
    let mut ag = Vec::new();
    for c in &curves {
        match c.kind {
            RegionKind::Boundary => boundary.push((c.marks, c.winding)),
            RegionKind::Puncture => punctures.push(c.winding),
        }
        ag.push((c.marks as i64, c.marks as i64 - c.winding));
    }
    boundary.sort_unstable();
    punctures.sort_unstable();
    ag.sort_unstable();
    let walks: Vec<Vec<Half>> = curves.iter().map(|c| c.walk.clone()).collect();
    let windings: Vec<i64> = curves.iter().map(|c| c.winding).collect();
    let r = d.ribbon();
    let weight = |w: &[Half]| r.winding_closed(w).map_err(|e| e.to_string());
    let genus_datum = genus_datum(r, shape.genus, &walks, &windings, least_fan(d), &weight, opts)?;
    Ok(InvariantRecord {
        shape: ShapeKey {
            genus: shape.genus,
            boundary: shape.boundary,
            punctures: shape.punctures,
            marked_green: shape.marked_green,
            marked_red: shape.marked_red,
        },
        boundary,
        punctures,
        ag,
        genus_datum,
    })
}

fn require_gentle(p: &GentlePresentation) -> Result<(), InvariantError> {
    match validate_gentle(p) {
        Classification::Gentle => Ok(()),
        Classification::LocallyGentleInfinite { cycle } => {
            let ids: Vec<&str> = cycle.iter().map(|&a| p.arrows[a].id.as_str()).collect();
            Err(InvariantError::NotGentle(format!(
                "infinite dimensional, relation-free cycle {}",
                ids.join(" ")
            )))
        }
        Classification::Invalid { reason } => Err(InvariantError::NotGentle(reason.to_string())),
    }
}

pub fn compute_invariants(p: &GentlePresentation, opts: &InvariantOptions) -> Result<InvariantRecord, InvariantError> {
    require_gentle(p)?;
    let d = build_dissected_surface(p)?;
    surface_invariants(&d, opts)
}

pub fn ag_invariant(p: &GentlePresentation) -> Result<Vec<(i64, i64)>, InvariantError> {
    require_gentle(p)?;
    let d = build_dissected_surface(p)?;
    let mut ag: Vec<(i64, i64)> = boundary_curves(&d)?
        .into_iter()
        .map(|c| (c.marks as i64, c.marks as i64 - c.winding))
        .collect();
    ag.sort_unstable();
    Ok(ag)
}

/// Compares two records clause by clause and names the first that differs.
pub fn compare_records(a: &InvariantRecord, b: &InvariantRecord) -> Verdict {
    let differ = |clause, detail: String| Verdict::Inequivalent { clause, detail };
    if a.shape != b.shape {
        return differ(Clause::Shape, format!("{:?} vs {:?}", a.shape, b.shape));
    }
    if a.boundary != b.boundary {
        return differ(Clause::BoundaryData, format!("{:?} vs {:?}", a.boundary, b.boundary));
    }
    if a.punctures != b.punctures {
        return differ(Clause::PunctureData, format!("{:?} vs {:?}", a.punctures, b.punctures));
    }
    compare_genus(&a.genus_datum, &b.genus_datum)
}

pub fn compare_genus(a: &GenusDatum, b: &GenusDatum) -> Verdict {
    match (a, b) {
        _ if a == b => Verdict::Equivalent,
        (GenusDatum::Gcd { value: x }, GenusDatum::Gcd { value: y }) => Verdict::Inequivalent {
            clause: Clause::GenusOneGcd,
            detail: format!("gcd {x} vs {y}"),
        },
        (GenusDatum::Arf { value: x }, GenusDatum::Arf { value: y }) => Verdict::Inequivalent {
            clause: Clause::Arf,
            detail: format!("Arf {x} vs {y}"),
        },
        _ => Verdict::Inequivalent {
            clause: Clause::ParityCase,
            detail: format!("{a:?} vs {b:?}"),
        },
    }
}

pub fn derived_equivalent(
    a: &GentlePresentation,
    b: &GentlePresentation,
    opts: &InvariantOptions,
) -> Result<Verdict, InvariantError> {
    Ok(compare_records(
        &compute_invariants(a, opts)?,
        &compute_invariants(b, opts)?,
    ))
}
