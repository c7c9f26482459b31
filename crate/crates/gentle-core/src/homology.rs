//! First homology of the punctured surface, intersection forms, the winding
//! quadratic form and its Arf invariant.
//!
//! The surface minus its punctures retracts onto the ribbon graph, so a basis
//! of its first homology is given by the fundamental cycles of a spanning
//! tree. Coordinates of a closed walk in that basis are its signed traversal
//! counts of the non-tree edges.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ribbon::{edge_of, end_of, Half, Ribbon, RibbonError, SpanningTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("the Z/2 intersection form has rank {rank}, expected {expected}")]
    Degenerate { rank: usize, expected: usize },
    #[error("boundary class {0} is not in the radical of the Z/2 form")]
    BoundaryNotRadical(usize),
    #[error("the quadratic form does not vanish on boundary class {0}, so it does not descend to the closed surface")]
    NotDescended(usize),
    #[error("no pair of simple closed curves with intersection number one found within {0} spliced candidates")]
    SearchExhausted(usize),
    #[error("genus one pair requested on a surface of genus {0}")]
    NotGenusOne(usize),
    #[error(transparent)]
    Ribbon(#[from] RibbonError),
    #[error("{0}")]
    Weight(String),
}

#[derive(Debug, Clone)]
pub struct HomologySpace {
    pub tree: SpanningTree,
    /// Fundamental cycles, one per non-tree edge.
    pub basis: Vec<Vec<Half>>,
    pub basis_edges: Vec<usize>,
    coord_of_edge: Vec<Option<usize>>,
    /// `z_form[i][j]` is the algebraic intersection of basis cycles i and j.
    pub z_form: Vec<Vec<i64>>,
    /// Coordinates of the boundary and puncture curves.
    pub boundary: Vec<Vec<i64>>,
    pub genus: usize,
}

/// Tree choice for [`HomologySpace::new`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeChoice {
    /// Breadth-first from the given root, neighbours in rotation order.
    Canonical(usize),
    /// Random root and neighbour order drawn from the seed.
    Seeded(u64),
}

impl HomologySpace {
    pub fn new(
        r: &Ribbon,
        boundary_walks: &[Vec<Half>],
        genus: usize,
        choice: TreeChoice,
    ) -> Result<HomologySpace, HomologyError> {
        let tree = match choice {
            TreeChoice::Canonical(root) => SpanningTree::bfs(r, root, &mut |_| {}),
            TreeChoice::Seeded(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let root = rng.gen_range(0..r.vertex_count());
                SpanningTree::bfs(r, root, &mut |hs| hs.shuffle(&mut rng))
            }
        };
        let basis_edges: Vec<usize> = (0..r.edge_count()).filter(|&e| !tree.in_tree[e]).collect();
        let mut coord_of_edge = vec![None; r.edge_count()];
        for (i, &e) in basis_edges.iter().enumerate() {
            coord_of_edge[e] = Some(i);
        }
        let basis: Vec<Vec<Half>> = basis_edges.iter().map(|&e| tree.fundamental_cycle(r, e)).collect();
        let n = basis.len();
        let mut z_form = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    z_form[i][j] = r.intersection(&basis[i], &basis[j])?;
                }
            }
        }
        let mut h = HomologySpace {
            tree,
            basis,
            basis_edges,
            coord_of_edge,
            z_form,
            boundary: Vec::new(),
            genus,
        };
        h.boundary = boundary_walks.iter().map(|w| h.coords(w)).collect();
        let rank = gf2_rank(&h.z2_form());
        if rank != 2 * genus {
            return Err(HomologyError::Degenerate {
                rank,
                expected: 2 * genus,
            });
        }
        for (j, c) in h.boundary.iter().enumerate() {
            let c2 = mod2(c);
            if (0..n).any(|i| h.pair2(&c2, &unit(n, i)) != 0) {
                return Err(HomologyError::BoundaryNotRadical(j));
            }
        }
        Ok(h)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn coords(&self, walk: &[Half]) -> Vec<i64> {
        let mut c = vec![0i64; self.dim()];
        for &h in walk {
            if let Some(i) = self.coord_of_edge[edge_of(h)] {
                c[i] += if end_of(h) == 0 { 1 } else { -1 };
            }
        }
        c
    }

    pub fn z2_form(&self) -> Vec<Vec<u8>> {
        self.z_form
            .iter()
            .map(|row| row.iter().map(|&x| x.rem_euclid(2) as u8).collect())
            .collect()
    }

    pub fn pair_z(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut s = 0;
        for (xi, row) in x.iter().zip(&self.z_form) {
            if *xi != 0 {
                s += xi * row.iter().zip(y).map(|(f, yj)| f * yj).sum::<i64>();
            }
        }
        s
    }

    pub fn pair2(&self, x: &[u8], y: &[u8]) -> u8 {
        let mut s = 0u8;
        for (xi, row) in x.iter().zip(&self.z_form) {
            if *xi == 0 {
                continue;
            }
            for (f, yj) in row.iter().zip(y) {
                if *yj != 0 {
                    s ^= f.rem_euclid(2) as u8;
                }
            }
        }
        s
    }
}

pub fn mod2(x: &[i64]) -> Vec<u8> {
    x.iter().map(|&v| v.rem_euclid(2) as u8).collect()
}

pub fn unit(n: usize, i: usize) -> Vec<u8> {
    let mut v = vec![0u8; n];
    v[i] = 1;
    v
}

pub fn gf2_rank(m: &[Vec<u8>]) -> usize {
    let mut rows: Vec<Vec<u8>> = m.to_vec();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] == 1 {
                let pivot = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// The odd winding that prevents the quadratic form from existing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "curve", rename_all = "kebab-case")]
pub enum OddWitness {
    Basis { index: usize, winding: i64 },
    Boundary { index: usize, winding: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindingQuadraticForm {
    pub basis_q: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum QuadraticOutcome {
    Defined(WindingQuadraticForm),
    NotDefined { witness: OddWitness },
}

/// `q = w/2 + 1 (mod 2)` on the basis cycles, provided every basis and
/// boundary winding is even.
pub fn quadratic_form(basis_winding: &[i64], boundary_winding: &[i64]) -> QuadraticOutcome {
    if let Some(i) = basis_winding.iter().position(|w| w % 2 != 0) {
        return QuadraticOutcome::NotDefined {
            witness: OddWitness::Basis {
                index: i,
                winding: basis_winding[i],
            },
        };
    }
    if let Some(j) = boundary_winding.iter().position(|w| w % 2 != 0) {
        return QuadraticOutcome::NotDefined {
            witness: OddWitness::Boundary {
                index: j,
                winding: boundary_winding[j],
            },
        };
    }
    QuadraticOutcome::Defined(WindingQuadraticForm {
        basis_q: basis_winding.iter().map(|w| (w / 2 + 1).rem_euclid(2) as u8).collect(),
    })
}

impl WindingQuadraticForm {
    /// Value on an arbitrary class, extended from the basis by
    /// `q(x + y) = q(x) + q(y) + <x, y>`.
    pub fn q(&self, h: &HomologySpace, x: &[u8]) -> u8 {
        let mut s = 0u8;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            s ^= self.basis_q[i];
            for (j, xj) in x.iter().enumerate().skip(i + 1) {
                if *xj != 0 {
                    s ^= h.z_form[i][j].rem_euclid(2) as u8;
                }
            }
        }
        s
    }
}

/// Arf invariant of the form induced on the closed surface, by symplectic
/// reduction of the coordinate basis.
pub fn arf_invariant(q: &WindingQuadraticForm, h: &HomologySpace) -> Result<u8, HomologyError> {
    for (j, c) in h.boundary.iter().enumerate() {
        if q.q(h, &mod2(c)) != 0 {
            return Err(HomologyError::NotDescended(j));
        }
    }
    let n = h.dim();
    let mut pool: Vec<Vec<u8>> = (0..n).map(|i| unit(n, i)).collect();
    let mut arf = 0u8;
    let mut pairs = 0;
    loop {
        let mut hit = None;
        'search: for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                if h.pair2(&pool[i], &pool[j]) == 1 {
                    hit = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((i, j)) = hit else { break };
        let y = pool.remove(j);
        let x = pool.remove(i);
        arf ^= q.q(h, &x) & q.q(h, &y);
        pairs += 1;
        for z in pool.iter_mut() {
            let bzy = h.pair2(z, &y);
            let bzx = h.pair2(z, &x);
            for k in 0..n {
                z[k] ^= (bzy & x[k]) ^ (bzx & y[k]);
            }
        }
    }
    if pairs != h.genus {
        return Err(HomologyError::Degenerate {
            rank: 2 * pairs,
            expected: 2 * h.genus,
        });
    }
    Ok(arf)
}

/// Two simple closed curves meeting algebraically once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticPair {
    pub alpha: Vec<Half>,
    pub beta: Vec<Half>,
    pub w_alpha: i64,
    pub w_beta: i64,
    /// Number of spliced candidates generated before the pair was found.
    pub spliced: usize,
}

/// Looks for a pair of simple closed curves with intersection number +-1,
/// first among the fundamental cycles, then among curves obtained by repeated
/// oriented smoothing, stopping after `budget` spliced candidates.
pub fn find_symplectic_pair(
    r: &Ribbon,
    h: &HomologySpace,
    weight: &dyn Fn(&[Half]) -> Result<i64, String>,
    budget: usize,
) -> Result<SymplecticPair, HomologyError> {
    if h.genus != 1 {
        return Err(HomologyError::NotGenusOne(h.genus));
    }
    let mut cands: Vec<(Vec<Half>, Vec<i64>)> = h.basis.iter().map(|b| (b.clone(), h.coords(b))).collect();
    let make = |a: &[Half], b: &[Half], spliced: usize| -> Result<SymplecticPair, HomologyError> {
        Ok(SymplecticPair {
            alpha: a.to_vec(),
            beta: b.to_vec(),
            w_alpha: weight(a).map_err(HomologyError::Weight)?,
            w_beta: weight(b).map_err(HomologyError::Weight)?,
            spliced,
        })
    };
    for i in 0..cands.len() {
        for j in i + 1..cands.len() {
            if h.pair_z(&cands[i].1, &cands[j].1).abs() == 1 {
                return make(&cands[i].0, &cands[j].0, 0);
            }
        }
    }
    log::info!("no unimodular pair among fundamental cycles; splicing");
    let mut seen: std::collections::HashSet<Vec<i64>> = cands.iter().map(|c| c.1.clone()).collect();
    let mut spliced = 0;
    let mut next = 0;
    while next < cands.len() {
        let cur = cands[next].clone();
        next += 1;
        for k in 0..cands.len() {
            let Some(results) = r.splice(&cur.0, &cands[k].0) else {
                continue;
            };
            for w in results {
                spliced += 1;
                if spliced > budget {
                    return Err(HomologyError::SearchExhausted(budget));
                }
                if !r.is_simple_closed(&w) {
                    continue;
                }
                let c = h.coords(&w);
                if c.iter().all(|&x| x == 0) || !seen.insert(c.clone()) {
                    continue;
                }
                for (other, oc) in &cands {
                    if h.pair_z(&c, oc).abs() == 1 {
                        log::info!("unimodular pair found after {spliced} splices");
                        return make(&w, other, spliced);
                    }
                }
                cands.push((w, c));
            }
        }
    }
    Err(HomologyError::SearchExhausted(budget))
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `gcd{|w(alpha)|, |w(beta)|, |w(c) + 2|}` over all boundary and puncture
/// curves `c`; the gcd of zeros is zero.
pub fn genus_one_gcd(pair: &SymplecticPair, boundary_winding: &[i64]) -> u64 {
    let mut g = gcd(pair.w_alpha.unsigned_abs(), pair.w_beta.unsigned_abs());
    for &w in boundary_winding {
        g = gcd(g, (w + 2).unsigned_abs());
    }
    g
}
