//! Ribbon graphs with marker slots.
//!
//! Every vertex carries the counter-clockwise cyclic order of its slots. A
//! slot is either a half-edge or a marker. Markers are places a curve may not
//! sweep across: the boundary gap of a fan, or a boundary side of a triangle.
//!
//! Half-edge `h` belongs to edge `h / 2` and its twin is `h ^ 1`.
//!
//! Curves are stored as walks: the sequence of half-edges by which the curve
//! leaves a vertex. Step `k` departs along `d[k]`, arrives through
//! `twin(d[k])`, and the passage at the next vertex goes from `twin(d[k])` to
//! `d[k + 1]`.

use thiserror::Error;

pub type Half = usize;

#[inline]
pub fn twin(h: Half) -> Half {
    h ^ 1
}

#[inline]
pub fn edge_of(h: Half) -> usize {
    h >> 1
}

#[inline]
pub fn end_of(h: Half) -> usize {
    h & 1
}

#[inline]
pub fn half(edge: usize, end: usize) -> Half {
    2 * edge + end
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Half(Half),
    Mark,
}

/// Which way a pushed-off curve sweeps around a vertex during a passage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    Ccw,
    Cw,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RibbonError {
    #[error("half-edge {0} appears {1} times in the rotation system")]
    BadRotation(Half, usize),
    #[error("passage through vertex {vertex} is ambiguous (vertex has no marker)")]
    AmbiguousPassage { vertex: usize },
    #[error("walk is not connected at step {0}")]
    Disconnected(usize),
    #[error("empty walk")]
    Empty,
    #[error("vertices {0} and {1} do not cross in a common vertex")]
    NoCrossing(usize, usize),
}

/// One face of the ribbon graph: the walk along its sides plus, for each
/// corner, how many markers the face swallows there. The face lies to the
/// right of the walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub walk: Vec<Half>,
    /// `marks[k]` counts markers in the corner between `walk[k]` arriving and
    /// `walk[k + 1]` leaving.
    pub marks: Vec<usize>,
}

impl Face {
    pub fn mark_count(&self) -> usize {
        self.marks.iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct Ribbon {
    rot: Vec<Vec<Slot>>,
    place: Vec<(usize, usize)>,
}

impl Ribbon {
    pub fn new(edges: usize, rot: Vec<Vec<Slot>>) -> Result<Ribbon, RibbonError> {
        let mut place = vec![(usize::MAX, usize::MAX); 2 * edges];
        let mut count = vec![0usize; 2 * edges];
        for (v, slots) in rot.iter().enumerate() {
            for (i, s) in slots.iter().enumerate() {
                if let Slot::Half(h) = *s {
                    if h >= 2 * edges {
                        return Err(RibbonError::BadRotation(h, 0));
                    }
                    count[h] += 1;
                    place[h] = (v, i);
                }
            }
        }
        if let Some(h) = count.iter().position(|&c| c != 1) {
            return Err(RibbonError::BadRotation(h, count[h]));
        }
        Ok(Ribbon { rot, place })
    }

    pub fn vertex_count(&self) -> usize {
        self.rot.len()
    }

    pub fn edge_count(&self) -> usize {
        self.place.len() / 2
    }

    pub fn slots(&self, v: usize) -> &[Slot] {
        &self.rot[v]
    }

    pub fn vertex(&self, h: Half) -> usize {
        self.place[h].0
    }

    pub fn position(&self, h: Half) -> usize {
        self.place[h].1
    }

    pub fn has_mark(&self, v: usize) -> bool {
        self.rot[v].contains(&Slot::Mark)
    }

    /// The next half-edge counter-clockwise after `h` at its vertex, and the
    /// number of markers skipped on the way.
    pub fn next_half(&self, h: Half) -> (Half, usize) {
        let (v, i) = self.place[h];
        let slots = &self.rot[v];
        let mut marks = 0;
        for k in 1..=slots.len() {
            match slots[(i + k) % slots.len()] {
                Slot::Half(x) => return (x, marks),
                Slot::Mark => marks += 1,
            }
        }
        unreachable!()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for s in &self.rot[v] {
                if let Slot::Half(h) = *s {
                    let w = self.vertex(twin(h));
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Traces all faces. Each half-edge is used by exactly one face walk.
    pub fn faces(&self) -> Vec<Face> {
        let mut used = vec![false; self.place.len()];
        let mut out = Vec::new();
        for start in 0..self.place.len() {
            if used[start] {
                continue;
            }
            let mut walk = Vec::new();
            let mut marks = Vec::new();
            let mut h = start;
            loop {
                used[h] = true;
                walk.push(h);
                let (nh, m) = self.next_half(twin(h));
                marks.push(m);
                h = nh;
                if h == start {
                    break;
                }
            }
            out.push(Face { walk, marks });
        }
        out
    }

    /// Slots strictly counter-clockwise after position `i` and before `j`.
    fn open_ccw(&self, v: usize, i: usize, j: usize) -> Vec<Slot> {
        let slots = &self.rot[v];
        let n = slots.len();
        let mut out = Vec::new();
        let mut k = (i + 1) % n;
        while k != j {
            out.push(slots[k]);
            k = (k + 1) % n;
        }
        out
    }

    /// Which side a passage from `x` to `y` (both at the same vertex) goes
    /// round. The curve runs through the sector free of markers. At a vertex
    /// without markers only adjacent slots have a well-defined sector.
    pub fn sector(&self, x: Half, y: Half) -> Result<Option<Sweep>, RibbonError> {
        if x == y {
            return Ok(None);
        }
        let (v, i) = self.place[x];
        let j = self.place[y].1;
        let ccw = self.open_ccw(v, i, j);
        if self.has_mark(v) {
            if ccw.contains(&Slot::Mark) {
                Ok(Some(Sweep::Cw))
            } else {
                Ok(Some(Sweep::Ccw))
            }
        } else if ccw.is_empty() {
            Ok(Some(Sweep::Ccw))
        } else if self.open_ccw(v, j, i).is_empty() {
            Ok(Some(Sweep::Cw))
        } else {
            Err(RibbonError::AmbiguousPassage { vertex: v })
        }
    }

    /// +1 when the marker sits in the counter-clockwise sector from `x` to
    /// `y`, i.e. the curve itself goes the clockwise way round. A U-turn
    /// (`x == y`) leaves the marker on its ccw side and counts +1.
    pub fn turn_sign(&self, x: Half, y: Half) -> Result<i64, RibbonError> {
        match self.sector(x, y)? {
            None | Some(Sweep::Cw) => Ok(1),
            Some(Sweep::Ccw) => Ok(-1),
        }
    }

    /// Half-edges crossed by a copy of the passage `x -> y` pushed to the left
    /// of the curve, with the direction of the sweep.
    pub fn left_pushoff(&self, x: Half, y: Half) -> Result<(Vec<Half>, Sweep), RibbonError> {
        let (v, i) = self.place[x];
        let j = self.place[y].1;
        let halves = |s: Vec<Slot>| -> Vec<Half> {
            s.into_iter()
                .filter_map(|s| match s {
                    Slot::Half(h) => Some(h),
                    Slot::Mark => None,
                })
                .collect()
        };
        match self.sector(x, y)? {
            None => Ok((vec![x], Sweep::Ccw)),
            Some(Sweep::Ccw) => {
                let mut out = vec![x];
                out.extend(halves(self.open_ccw(v, i, j)));
                out.push(y);
                Ok((out, Sweep::Ccw))
            }
            Some(Sweep::Cw) => {
                let mut mid = halves(self.open_ccw(v, j, i));
                mid.reverse();
                Ok((mid, Sweep::Cw))
            }
        }
    }

    pub fn check_closed(&self, walk: &[Half]) -> Result<(), RibbonError> {
        if walk.is_empty() {
            return Err(RibbonError::Empty);
        }
        for k in 0..walk.len() {
            let nxt = walk[(k + 1) % walk.len()];
            if self.vertex(twin(walk[k])) != self.vertex(nxt) {
                return Err(RibbonError::Disconnected(k));
            }
        }
        Ok(())
    }

    pub fn check_open(&self, walk: &[Half]) -> Result<(), RibbonError> {
        if walk.is_empty() {
            return Err(RibbonError::Empty);
        }
        for k in 0..walk.len() - 1 {
            if self.vertex(twin(walk[k])) != self.vertex(walk[k + 1]) {
                return Err(RibbonError::Disconnected(k));
            }
        }
        Ok(())
    }

    /// Passages `(in, out)` of a closed walk, one per step.
    pub fn passages(walk: &[Half]) -> Vec<(Half, Half)> {
        (0..walk.len())
            .map(|k| (twin(walk[k]), walk[(k + 1) % walk.len()]))
            .collect()
    }

    pub fn winding_closed(&self, walk: &[Half]) -> Result<i64, RibbonError> {
        Self::passages(walk)
            .into_iter()
            .map(|(x, y)| self.turn_sign(x, y))
            .sum()
    }

    pub fn winding_open(&self, walk: &[Half]) -> Result<i64, RibbonError> {
        (0..walk.len().saturating_sub(1))
            .map(|k| self.turn_sign(twin(walk[k]), walk[k + 1]))
            .sum()
    }

    /// Algebraic intersection number of two closed walks: `a` stays on the
    /// graph and `b` is pushed off to its left. Each crossing counts +1 when
    /// `b` crosses `a` from the right of `a` to its left.
    pub fn intersection(&self, a: &[Half], b: &[Half]) -> Result<i64, RibbonError> {
        let mut flow = vec![0i64; self.place.len()];
        for &d in a {
            flow[d] += 1;
            flow[twin(d)] -= 1;
        }
        let mut total = 0;
        for (x, y) in Self::passages(b) {
            let (crossed, sweep) = self.left_pushoff(x, y)?;
            let s: i64 = crossed.iter().map(|&h| flow[h]).sum();
            total += match sweep {
                Sweep::Ccw => s,
                Sweep::Cw => -s,
            };
        }
        Ok(total)
    }

    /// A walk is simple when no edge is used twice and no two passages at a
    /// vertex interleave (markers count as slots, so a passage through the
    /// gap sector is a different chord than one avoiding it).
    pub fn is_simple_closed(&self, walk: &[Half]) -> bool {
        let mut used = vec![false; self.edge_count()];
        for &d in walk {
            if std::mem::replace(&mut used[edge_of(d)], true) {
                return false;
            }
        }
        let ps = Self::passages(walk);
        for i in 0..ps.len() {
            for j in i + 1..ps.len() {
                if self.interleave(ps[i], ps[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// Whether the chords `p` and `q` (passages at the same vertex) cross.
    /// Passages through different vertices never do.
    pub fn interleave(&self, p: (Half, Half), q: (Half, Half)) -> bool {
        let v = self.vertex(p.0);
        if self.vertex(q.0) != v {
            return false;
        }
        let pos = |h: Half| self.place[h].1;
        let (a1, a2, b1, b2) = (pos(p.0), pos(p.1), pos(q.0), pos(q.1));
        if a1 == a2 || b1 == b2 {
            return false;
        }
        let distinct = [a1, a2, b1, b2];
        for i in 0..4 {
            for j in i + 1..4 {
                if distinct[i] == distinct[j] {
                    return false;
                }
            }
        }
        let n = self.rot[v].len();
        let inside = |k: usize| (k + n - a1) % n < (a2 + n - a1) % n;
        inside(b1) != inside(b2)
    }

    /// Cuts two closed walks at a vertex where a passage of `a` and one of
    /// `b` interleave and reconnects them into one closed walk: the incoming
    /// strand of each continues along the outgoing strand of the other.
    pub fn splice(&self, a: &[Half], b: &[Half]) -> Option<Vec<Vec<Half>>> {
        let pa = Self::passages(a);
        let pb = Self::passages(b);
        let mut out = Vec::new();
        for (i, &p) in pa.iter().enumerate() {
            for (j, &q) in pb.iter().enumerate() {
                if self.interleave(p, q) {
                    // a passage i sits between a[i] and a[i+1]
                    let mut w = Vec::with_capacity(a.len() + b.len());
                    w.extend((0..a.len()).map(|k| a[(i + 1 + k) % a.len()]));
                    w.extend((0..b.len()).map(|k| b[(j + 1 + k) % b.len()]));
                    out.push(w);
                }
            }
        }
        if out.is_empty() {
            None
        } else {
            Some(out)
        }
    }
}

/// Cancels immediate backtracks `h, twin(h)` cyclically.
pub fn reduce_closed(walk: &[Half]) -> Vec<Half> {
    let mut st: Vec<Half> = Vec::new();
    for &h in walk {
        if st.last() == Some(&twin(h)) {
            st.pop();
        } else {
            st.push(h);
        }
    }
    let mut lo = 0;
    let mut hi = st.len();
    while hi - lo >= 2 && st[hi - 1] == twin(st[lo]) {
        lo += 1;
        hi -= 1;
    }
    st[lo..hi].to_vec()
}

pub fn reverse_walk(walk: &[Half]) -> Vec<Half> {
    walk.iter().rev().map(|&h| twin(h)).collect()
}

/// Spanning tree of a ribbon graph by breadth-first search.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    pub root: usize,
    /// Half-edge leaving each vertex towards its parent.
    pub up: Vec<Option<Half>>,
    pub depth: Vec<usize>,
    pub in_tree: Vec<bool>,
}

impl SpanningTree {
    /// `order` permutes the neighbour scan at each vertex; pass the identity
    /// for the canonical tree.
    pub fn bfs(r: &Ribbon, root: usize, shuffle: &mut dyn FnMut(&mut Vec<Half>)) -> SpanningTree {
        let n = r.vertex_count();
        let mut up = vec![None; n];
        let mut depth = vec![usize::MAX; n];
        let mut in_tree = vec![false; r.edge_count()];
        depth[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let mut hs: Vec<Half> = r
                .slots(v)
                .iter()
                .filter_map(|s| match *s {
                    Slot::Half(h) => Some(h),
                    Slot::Mark => None,
                })
                .collect();
            shuffle(&mut hs);
            for h in hs {
                let w = r.vertex(twin(h));
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    up[w] = Some(twin(h));
                    in_tree[edge_of(h)] = true;
                    queue.push_back(w);
                }
            }
        }
        SpanningTree {
            root,
            up,
            depth,
            in_tree,
        }
    }

    /// Walk inside the tree from `from` to `to`.
    pub fn path(&self, r: &Ribbon, mut from: usize, mut to: usize) -> Vec<Half> {
        let mut head = Vec::new();
        let mut tail = Vec::new();
        while from != to {
            if self.depth[from] >= self.depth[to] {
                let h = self.up[from].unwrap();
                head.push(h);
                from = r.vertex(twin(h));
            } else {
                let h = self.up[to].unwrap();
                tail.push(twin(h));
                to = r.vertex(twin(h));
            }
        }
        tail.reverse();
        head.extend(tail);
        head
    }

    /// The cycle closed by a non-tree edge, traversed forwards along it.
    pub fn fundamental_cycle(&self, r: &Ribbon, edge: usize) -> Vec<Half> {
        let h = half(edge, 0);
        let mut w = vec![h];
        w.extend(self.path(r, r.vertex(twin(h)), r.vertex(h)));
        w
    }
}
