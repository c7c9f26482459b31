//! Shared fixtures and brute-force oracles for the integration tests.
//!
//! The oracles here deliberately avoid the library's own algorithms: the AG
//! pairs come from a thread walk on the blossoming quiver, intersection
//! numbers from straight chords in discs, and Arf invariants from counting
//! the values of the quadratic form.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::f64::consts::TAU;
use std::path::PathBuf;

use gentle_core::presentation::{validate_gentle, Arrow, Classification, GentlePresentation};
use gentle_core::ribbon::{edge_of, end_of, twin, Half, Ribbon, Slot};
use gentle_core::surface::{parse_dissection, DissectedSurface};
use gentle_core::surface_cut::{parse_triangulation, CutTriangulation, Triangle};
use rand::seq::SliceRandom;
use rand::Rng;
pub use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

pub const NAMED_ALGEBRAS: [&str; 5] = ["k", "torus1", "torus2", "second1", "second2"];
pub const NAMED_CUTS: [&str; 3] = ["genus2-cut0", "genus2-cut1", "genus2-cut2"];

pub fn corpus_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(file)
}

fn read(file: &str) -> String {
    std::fs::read_to_string(corpus_path(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

pub fn load_alg(name: &str) -> GentlePresentation {
    gentle_core::parse_presentation(&read(&format!("{name}.alg"))).unwrap()
}

pub fn load_tri(name: &str) -> CutTriangulation {
    parse_triangulation(&read(&format!("{name}.tri"))).unwrap()
}

pub fn load_surf(name: &str) -> DissectedSurface {
    parse_dissection(&read(&format!("{name}.surf"))).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// random gentle algebras

/// A random connected gentle algebra with at most `max_arrows` arrows.
///
/// Arrows are scattered subject to the in/out bound of two, then relations are
/// chosen per vertex so that every incoming arrow has at most one relation and
/// at most one non-relation continuation (and dually). Infinite dimensional
/// or disconnected draws are rejected.
pub fn random_gentle(rng: &mut impl Rng, max_arrows: usize) -> GentlePresentation {
    loop {
        let n = rng.gen_range(1..=8usize);
        let want = rng.gen_range(0..=max_arrows);
        let mut p = GentlePresentation::new("random");
        for v in 0..n {
            p.add_vertex(&format!("v{v}"));
        }
        let mut outd = vec![0; n];
        let mut ind = vec![0; n];
        for _ in 0..want * 6 {
            if p.arrows.len() == want {
                break;
            }
            let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if s == t && rng.gen_bool(0.8) {
                continue;
            }
            if outd[s] < 2 && ind[t] < 2 {
                outd[s] += 1;
                ind[t] += 1;
                let id = format!("x{}", p.arrows.len());
                p.add_arrow(&id, s, t);
            }
        }
        for v in 0..n {
            let ins = p.incoming(v);
            let outs = p.outgoing(v);
            match (ins.len(), outs.len()) {
                (2, 2) => {
                    let flip = usize::from(rng.gen_bool(0.5));
                    p.relations.insert((ins[0], outs[flip]));
                    p.relations.insert((ins[1], outs[1 - flip]));
                }
                (2, 1) => {
                    p.relations.insert((ins[rng.gen_range(0..2)], outs[0]));
                }
                (1, 2) => {
                    p.relations.insert((ins[0], outs[rng.gen_range(0..2)]));
                }
                (1, 1) if rng.gen_bool(0.5) => {
                    p.relations.insert((ins[0], outs[0]));
                }
                _ => {}
            }
        }
        if validate_gentle(&p) == Classification::Gentle {
            return p;
        }
    }
}

/// The same algebra with vertices and arrows shuffled and renamed.
pub fn relabel(p: &GentlePresentation, rng: &mut impl Rng) -> GentlePresentation {
    let mut vperm: Vec<usize> = (0..p.vertices.len()).collect();
    vperm.shuffle(rng);
    let mut aperm: Vec<usize> = (0..p.arrows.len()).collect();
    aperm.shuffle(rng);
    // vnew[old] = new position
    let mut vnew = vec![0; vperm.len()];
    for (new, &old) in vperm.iter().enumerate() {
        vnew[old] = new;
    }
    let mut anew = vec![0; aperm.len()];
    for (new, &old) in aperm.iter().enumerate() {
        anew[old] = new;
    }
    let mut vnames: Vec<usize> = (0..vperm.len()).collect();
    vnames.shuffle(rng);
    let mut anames: Vec<usize> = (0..aperm.len()).collect();
    anames.shuffle(rng);
    GentlePresentation {
        name: format!("{}-relabelled", p.name),
        vertices: vperm
            .iter()
            .enumerate()
            .map(|(i, _)| format!("w{}", vnames[i]))
            .collect(),
        arrows: aperm
            .iter()
            .enumerate()
            .map(|(i, &old)| Arrow {
                id: format!("y{}", anames[i]),
                source: vnew[p.arrows[old].source],
                target: vnew[p.arrows[old].target],
            })
            .collect(),
        relations: p.relations.iter().map(|&(a, b)| (anew[a], anew[b])).collect(),
    }
}

// ---------------------------------------------------------------------------
// isomorphism of quivers with relations

/// Backtracking search for a bijection of vertices and arrows that preserves
/// sources, targets and relations.
pub fn isomorphic(p: &GentlePresentation, q: &GentlePresentation) -> bool {
    if p.vertices.len() != q.vertices.len()
        || p.arrows.len() != q.arrows.len()
        || p.relations.len() != q.relations.len()
    {
        return false;
    }
    let mut order = Vec::new();
    let mut seen = vec![false; p.arrows.len()];
    // order arrows so each one touches an earlier one when possible
    for start in 0..p.arrows.len() {
        if seen[start] {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(a) = queue.pop_front() {
            order.push(a);
            for (b, arrow) in p.arrows.iter().enumerate() {
                if !seen[b] && shares_vertex(&p.arrows[a], arrow) {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
    }
    let mut vmap = vec![None; p.vertices.len()];
    let mut vused = vec![false; q.vertices.len()];
    let mut amap = vec![None; p.arrows.len()];
    let mut aused = vec![false; q.arrows.len()];
    extend(p, q, &order, 0, &mut vmap, &mut vused, &mut amap, &mut aused)
}

fn shares_vertex(a: &Arrow, b: &Arrow) -> bool {
    a.source == b.source || a.source == b.target || a.target == b.source || a.target == b.target
}

#[allow(clippy::too_many_arguments)]
fn extend(
    p: &GentlePresentation,
    q: &GentlePresentation,
    order: &[usize],
    k: usize,
    vmap: &mut Vec<Option<usize>>,
    vused: &mut Vec<bool>,
    amap: &mut Vec<Option<usize>>,
    aused: &mut Vec<bool>,
) -> bool {
    if k == order.len() {
        // isolated vertices only occur in the one-vertex algebra
        return true;
    }
    let a = order[k];
    let (s, t) = (p.arrows[a].source, p.arrows[a].target);
    for b in 0..q.arrows.len() {
        if aused[b] {
            continue;
        }
        let (qs, qt) = (q.arrows[b].source, q.arrows[b].target);
        if (s == t) != (qs == qt) {
            continue;
        }
        let mut fresh = Vec::new();
        let mut ok = true;
        for (x, y) in [(s, qs), (t, qt)] {
            match vmap[x] {
                Some(m) if m != y => ok = false,
                Some(_) => {}
                None => {
                    if vused[y] {
                        ok = false;
                    } else {
                        vmap[x] = Some(y);
                        vused[y] = true;
                        fresh.push(x);
                    }
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            amap[a] = Some(b);
            aused[b] = true;
            let consistent = order[..=k].iter().all(|&c| {
                let mc = amap[c].unwrap();
                p.relations.contains(&(a, c)) == q.relations.contains(&(b, mc))
                    && p.relations.contains(&(c, a)) == q.relations.contains(&(mc, b))
            });
            if consistent && extend(p, q, order, k + 1, vmap, vused, amap, aused) {
                return true;
            }
            amap[a] = None;
            aused[b] = false;
        }
        for x in fresh {
            vused[vmap[x].unwrap()] = false;
            vmap[x] = None;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// AG pairs via the blossoming quiver

/// Avella-Alaminos and Geiss pairs computed from threads.
///
/// Every vertex is completed to two incoming and two outgoing arrows by
/// adding leaves, with relations completed so that each incoming arrow has
/// exactly one relation continuation. Permitted threads are then maximal
/// relation-free paths and forbidden threads maximal paths of relations, each
/// running from leaf to leaf. The walk goes forward along a permitted thread,
/// backward along the forbidden thread ending at the same leaf, and repeats;
/// `n` counts permitted threads and `m` the original arrows on the forbidden
/// ones. Forbidden cycles contribute `(0, length)`.
pub fn ag_oracle(p: &GentlePresentation) -> Vec<(i64, i64)> {
    let m = p.arrows.len();
    // extended arrows: (source, target) with None for a leaf
    let mut ends: Vec<(Option<usize>, Option<usize>)> =
        p.arrows.iter().map(|a| (Some(a.source), Some(a.target))).collect();
    let mut rel_next: Vec<Option<usize>> = vec![None; m];
    let mut free_next: Vec<Option<usize>> = vec![None; m];
    for v in 0..p.vertices.len() {
        let mut ins = p.incoming(v);
        let mut outs = p.outgoing(v);
        while ins.len() < 2 {
            ends.push((None, Some(v)));
            rel_next.push(None);
            free_next.push(None);
            ins.push(ends.len() - 1);
        }
        while outs.len() < 2 {
            ends.push((Some(v), None));
            rel_next.push(None);
            free_next.push(None);
            outs.push(ends.len() - 1);
        }
        let is_rel = |a: usize, b: usize| -> Option<bool> { (a < m && b < m).then(|| p.relations.contains(&(a, b))) };
        let matchings = [[(0, 0), (1, 1)], [(0, 1), (1, 0)]];
        let fits = |mt: &[(usize, usize); 2]| {
            (0..2).all(|i| {
                (0..2).all(|j| match is_rel(ins[i], outs[j]) {
                    None => true,
                    Some(r) => r == mt.contains(&(i, j)),
                })
            })
        };
        let mt = matchings.iter().find(|mt| fits(mt)).expect("local gentle conditions");
        for i in 0..2 {
            for (j, &o) in outs.iter().enumerate() {
                if mt.contains(&(i, j)) {
                    rel_next[ins[i]] = Some(o);
                } else {
                    free_next[ins[i]] = Some(o);
                }
            }
        }
    }
    let total = ends.len();
    let mut rel_prev = vec![None; total];
    let mut free_prev = vec![None; total];
    for a in 0..total {
        if let Some(b) = rel_next[a] {
            rel_prev[b] = Some(a);
        }
        if let Some(b) = free_next[a] {
            free_prev[b] = Some(a);
        }
    }
    let into_leaf: Vec<usize> = (0..total).filter(|&a| ends[a].1.is_none()).collect();
    let mut done = BTreeSet::new();
    let mut pairs = Vec::new();
    for &start in &into_leaf {
        if done.contains(&start) {
            continue;
        }
        let (mut n, mut len) = (0i64, 0i64);
        let mut x = start;
        loop {
            done.insert(x);
            // back along the forbidden thread ending with x
            let mut y = x;
            len += i64::from(y < m);
            while let Some(z) = rel_prev[y] {
                y = z;
                len += i64::from(y < m);
            }
            // forward along the permitted thread starting with y
            let mut h = y;
            while let Some(z) = free_next[h] {
                h = z;
            }
            n += 1;
            x = h;
            if x == start {
                break;
            }
        }
        pairs.push((n, len));
    }
    // forbidden cycles
    let mut on_cycle = vec![false; m];
    for a in 0..m {
        if on_cycle[a] {
            continue;
        }
        let mut cyc = vec![a];
        let mut b = a;
        let closed = loop {
            match rel_next[b] {
                Some(c) if c == a => break true,
                Some(c) if c < m && !cyc.contains(&c) => {
                    cyc.push(c);
                    b = c;
                }
                _ => break false,
            }
        };
        if closed {
            for &c in &cyc {
                on_cycle[c] = true;
            }
            pairs.push((0, cyc.len() as i64));
        }
    }
    pairs.sort_unstable();
    pairs
}

// ---------------------------------------------------------------------------
// geometric crossing counter

/// Whether every vertex neighbourhood of `r` is a disc in which a chord between
/// two slots is unique up to isotopy (true unless some vertex is a puncture
/// with more than three slots).
pub fn chords_are_unique(r: &Ribbon) -> bool {
    (0..r.vertex_count()).all(|v| r.has_mark(v) || r.slots(v).len() <= 3)
}

/// Realizes `walks` as curves on the thickened graph: every traversal of an
/// edge is a strand at its own transverse offset, every passage a straight
/// chord in the unit disc of its vertex. Returns the chords per curve as
/// `(vertex, from, to)`.
/// `(vertex, from, to)` of one straight chord.
type Chord = (usize, [f64; 2], [f64; 2]);

fn realize(r: &Ribbon, walks: &[&[Half]], rng: &mut impl Rng) -> Vec<Vec<Chord>> {
    // offsets: strands on each edge get distinct random slots in (0, 1)
    let mut per_edge: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (c, w) in walks.iter().enumerate() {
        for (k, &h) in w.iter().enumerate() {
            per_edge.entry(edge_of(h)).or_default().push((c, k));
        }
    }
    let mut offset: HashMap<(usize, usize), f64> = HashMap::new();
    for strands in per_edge.values_mut() {
        strands.shuffle(rng);
        let n = strands.len() as f64;
        for (i, &s) in strands.iter().enumerate() {
            offset.insert(s, (i as f64 + 1.0) / (n + 1.0));
        }
    }
    // a strand at offset t (left of the end 0 -> end 1 direction) meets the
    // disc of vertex(h) a little counter-clockwise of slot h when h is end 0
    let point = |h: Half, t: f64| -> [f64; 2] {
        let v = r.vertex(h);
        let s = r.slots(v).len() as f64;
        let theta = TAU * r.position(h) as f64 / s;
        let sign = if end_of(h) == 0 { 1.0 } else { -1.0 };
        let ang = theta + sign * 0.8 * (TAU / s) * (t - 0.5);
        [ang.cos(), ang.sin()]
    };
    walks
        .iter()
        .enumerate()
        .map(|(c, w)| {
            (0..w.len())
                .map(|k| {
                    let k1 = (k + 1) % w.len();
                    let x = twin(w[k]);
                    let y = w[k1];
                    (r.vertex(x), point(x, offset[&(c, k)]), point(y, offset[&(c, k1)]))
                })
                .collect()
        })
        .collect()
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn cross(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> Option<i64> {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        let ta = [p2[0] - p1[0], p2[1] - p1[1]];
        let tb = [q2[0] - q1[0], q2[1] - q1[1]];
        Some(if ta[0] * tb[1] - ta[1] * tb[0] > 0.0 { 1 } else { -1 })
    } else {
        None
    }
}

/// Signed and unsigned crossing counts of two closed walks, realized in
/// general position. A crossing is +1 when `b` passes from the right of `a`
/// to its left.
pub fn chord_crossings(r: &Ribbon, a: &[Half], b: &[Half], rng: &mut impl Rng) -> (i64, u64) {
    let ch = realize(r, &[a, b], rng);
    let (mut signed, mut count) = (0, 0);
    for &(va, p1, p2) in &ch[0] {
        for &(vb, q1, q2) in &ch[1] {
            if va == vb {
                if let Some(s) = cross(p1, p2, q1, q2) {
                    signed += s;
                    count += 1;
                }
            }
        }
    }
    (signed, count)
}

/// Self-crossings of one closed walk in a random realization.
pub fn self_crossings(r: &Ribbon, a: &[Half], rng: &mut impl Rng) -> u64 {
    let ch = realize(r, &[a], rng);
    let mut count = 0;
    for i in 0..ch[0].len() {
        for j in i + 1..ch[0].len() {
            let (va, p1, p2) = ch[0][i];
            let (vb, q1, q2) = ch[0][j];
            if va == vb && cross(p1, p2, q1, q2).is_some() {
                count += 1;
            }
        }
    }
    count
}

/// Halves at `v`.
fn halves_at(r: &Ribbon, v: usize) -> Vec<Half> {
    r.slots(v)
        .iter()
        .filter_map(|s| match *s {
            Slot::Half(h) => Some(h),
            Slot::Mark => None,
        })
        .collect()
}

fn shortest_path(r: &Ribbon, from: usize, to: usize) -> Vec<Half> {
    let mut prev: Vec<Option<Half>> = vec![None; r.vertex_count()];
    let mut seen = vec![false; r.vertex_count()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for h in halves_at(r, v) {
            let w = r.vertex(twin(h));
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some(h);
                queue.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut v = to;
    while v != from {
        let h = prev[v].expect("connected");
        path.push(h);
        v = r.vertex(h);
    }
    path.reverse();
    path
}

/// Cyclically cancels `h, twin(h)`.
pub fn cyclic_reduce(walk: &[Half]) -> Vec<Half> {
    let mut st: Vec<Half> = Vec::new();
    for &h in walk {
        if st.last() == Some(&twin(h)) {
            st.pop();
        } else {
            st.push(h);
        }
    }
    while st.len() >= 2 && st[0] == twin(*st.last().unwrap()) {
        st.pop();
        st.remove(0);
    }
    st
}

/// A random cyclically reduced closed walk: a non-backtracking random walk
/// closed up along a shortest path.
pub fn random_cycle(r: &Ribbon, rng: &mut impl Rng, max_len: usize) -> Option<Vec<Half>> {
    if r.edge_count() == 0 {
        return None;
    }
    for _ in 0..50 {
        let start = rng.gen_range(0..r.vertex_count());
        let mut v = start;
        let mut walk: Vec<Half> = Vec::new();
        for _ in 0..rng.gen_range(1..=max_len) {
            let mut opts = halves_at(r, v);
            if let Some(&last) = walk.last() {
                opts.retain(|&h| h != twin(last));
            }
            let Some(&h) = opts.choose(rng) else { break };
            walk.push(h);
            v = r.vertex(twin(h));
        }
        walk.extend(shortest_path(r, v, start));
        let red = cyclic_reduce(&walk);
        if !red.is_empty() {
            return Some(red);
        }
    }
    None
}

/// A random open walk without backtracking, between two vertices.
pub fn random_open_walk(r: &Ribbon, rng: &mut impl Rng, max_len: usize) -> Option<Vec<Half>> {
    if r.edge_count() == 0 {
        return None;
    }
    let mut v = rng.gen_range(0..r.vertex_count());
    let mut walk: Vec<Half> = Vec::new();
    for _ in 0..rng.gen_range(1..=max_len) {
        let mut opts = halves_at(r, v);
        if let Some(&last) = walk.last() {
            opts.retain(|&h| h != twin(last));
        }
        let Some(&h) = opts.choose(rng) else { break };
        walk.push(h);
        v = r.vertex(twin(h));
    }
    (!walk.is_empty()).then_some(walk)
}

// ---------------------------------------------------------------------------
// Arf invariant by majority

/// Arf invariant of the form `q(e_i) = basis_q[i]` with bilinear form `b`,
/// found as the value `q` takes most often over the whole space. The form may
/// be degenerate as long as `q` vanishes on the radical.
pub fn arf_by_majority(basis_q: &[u8], b: &[Vec<u8>]) -> u8 {
    let n = basis_q.len();
    assert!(n <= 20, "space too large to enumerate");
    let mut ones = 0u64;
    // Gray code walk: flip one coordinate at a time
    let mut x = vec![0u8; n];
    let mut qx = 0u8;
    for step in 1u64..(1u64 << n) {
        let i = step.trailing_zeros() as usize;
        // q(x + e_i) = q(x) + q(e_i) + b(x, e_i)
        let bx: u8 = (0..n).fold(0, |acc, j| acc ^ (x[j] & b[j][i]));
        qx ^= basis_q[i] ^ bx;
        x[i] ^= 1;
        ones += u64::from(qx);
    }
    let zeros = (1u64 << n) - ones;
    assert_ne!(ones, zeros, "q is not constant on radical cosets");
    u8::from(ones > zeros)
}

// ---------------------------------------------------------------------------
// random triangulations and cuts

/// Flips the internal side `s` shared by two different triangles. Returns
/// `None` when the flip would fold a triangle.
pub fn flip(t: &CutTriangulation, s: usize) -> Option<Vec<Triangle>> {
    let uses: Vec<(usize, usize)> = t
        .triangles
        .iter()
        .enumerate()
        .flat_map(|(i, tri)| (0..3).filter(move |&k| tri.sides[k] == s).map(move |k| (i, k)))
        .collect();
    if uses.len() != 2 || uses[0].0 == uses[1].0 {
        return None;
    }
    let rot = |(i, k): (usize, usize)| {
        let x = t.triangles[i].sides;
        (x[(k + 1) % 3], x[(k + 2) % 3])
    };
    let (a, b) = rot(uses[0]);
    let (c, d) = rot(uses[1]);
    if a == d || b == c {
        return None;
    }
    let mut tris = t.triangles.clone();
    tris[uses[0].0].sides = [s, d, a];
    tris[uses[1].0].sides = [s, b, c];
    Some(tris)
}

/// One degree 1 corner in each internal triangle, uniformly.
pub fn random_cut(sides_boundary: &[bool], tris: &[Triangle], rng: &mut impl Rng) -> BTreeSet<(usize, usize)> {
    tris.iter()
        .enumerate()
        .filter(|(_, tri)| tri.sides.iter().all(|&x| !sides_boundary[x]))
        .map(|(i, _)| (i, rng.gen_range(0..3)))
        .collect()
}

/// A random cut triangulation of the same surface as `t`, after `flips`
/// random diagonal flips.
pub fn random_triangulation(t: &CutTriangulation, flips: usize, rng: &mut impl Rng) -> CutTriangulation {
    let boundary: Vec<bool> = t.sides.iter().map(|s| s.boundary).collect();
    let internal: Vec<usize> = (0..t.sides.len()).filter(|&i| !boundary[i]).collect();
    let mut cur = t.clone();
    for _ in 0..flips {
        let s = *internal.choose(rng).unwrap();
        if let Some(tris) = flip(&cur, s) {
            let cut = random_cut(&boundary, &tris, rng);
            cur = CutTriangulation::new(cur.name.clone(), cur.sides.clone(), tris, cut).expect("flip keeps validity");
        }
    }
    let cut = random_cut(&boundary, &cur.triangles, rng);
    CutTriangulation::new(cur.name.clone(), cur.sides.clone(), cur.triangles.clone(), cut).unwrap()
}
