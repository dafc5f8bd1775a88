//! Link diagrams and the geometry of their resolution cube.
//!
//! Input is a planar diagram code: `X[a,b,c,d]` lists the four arcs at a
//! crossing counterclockwise starting from the incoming under-strand. Slot 0
//! is that incoming under-arc, slot 2 the outgoing under-arc, and the
//! over-strand occupies slots 1 and 3.
//!
//! The 0-smoothing joins slots 0–1 and 2–3; the 1-smoothing joins 0–3 and
//! 1–2. The surgery arc of a crossing runs from the 0–1 smoothing arc to the
//! 2–3 smoothing arc (or the reverse when the crossing's arrow is flipped).

use crate::cube::{Cochain, Vertex};
use crate::oddcomplex::{compose_on_local_basis, Composite};
use crate::Error;

/// One crossing: four dense arc indices in PD order, plus orientation data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub arcs: [u32; 4],
    /// The over-strand enters at slot 3 and leaves at slot 1.
    pub positive: bool,
    /// Reverses the surgery arrow at this crossing.
    pub reversed: bool,
}

/// A validated link diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkDiagram {
    crossings: Vec<Crossing>,
    /// Original label of each dense arc index (ascending).
    labels: Vec<u32>,
    /// Crossing-free unknotted components.
    free_loops: usize,
    /// Basepoint as a dense arc index.
    basepoint: Option<u32>,
    /// The two (crossing, slot) ends of every arc.
    ends: Vec<[(u32, u8); 2]>,
    components: usize,
}

fn parse_err(pos: usize, msg: &str) -> Error {
    Error::Input(format!("PD parse error at byte {pos}: {msg}"))
}

impl LinkDiagram {
    /// Parses PD text: `X[a,b,c,d]` tokens, `U` for a free unknot, `* <arc>`
    /// for a basepoint.
    pub fn parse_pd(text: &str) -> Result<Self, Error> {
        let b = text.as_bytes();
        let mut pos = 0usize;
        let mut raw: Vec<[u32; 4]> = Vec::new();
        let mut free_loops = 0usize;
        let mut basepoint = None;
        let skip_ws = |pos: &mut usize| {
            while *pos < b.len() && (b[*pos].is_ascii_whitespace() || b[*pos] == b',') {
                *pos += 1;
            }
        };
        let read_num = |pos: &mut usize| -> Result<u32, Error> {
            while *pos < b.len() && b[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            let start = *pos;
            while *pos < b.len() && b[*pos].is_ascii_digit() {
                *pos += 1;
            }
            if start == *pos {
                return Err(parse_err(start, "expected an arc label"));
            }
            text[start..*pos]
                .parse::<u32>()
                .map_err(|_| parse_err(start, "arc label out of range"))
        };
        loop {
            skip_ws(&mut pos);
            if pos >= b.len() {
                break;
            }
            match b[pos] {
                b'X' => {
                    pos += 1;
                    if b.get(pos) != Some(&b'[') {
                        return Err(parse_err(pos, "expected '[' after X"));
                    }
                    pos += 1;
                    let mut xs = [0u32; 4];
                    for (k, x) in xs.iter_mut().enumerate() {
                        *x = read_num(&mut pos)?;
                        while pos < b.len() && b[pos].is_ascii_whitespace() {
                            pos += 1;
                        }
                        let want = if k == 3 { b']' } else { b',' };
                        if b.get(pos) != Some(&want) {
                            return Err(parse_err(pos, &format!("expected '{}'", want as char)));
                        }
                        pos += 1;
                    }
                    raw.push(xs);
                }
                b'U' => {
                    free_loops += 1;
                    pos += 1;
                }
                b'*' => {
                    pos += 1;
                    basepoint = Some(read_num(&mut pos)?);
                }
                _ => return Err(parse_err(pos, "unexpected character")),
            }
        }
        if raw.is_empty() && free_loops == 0 {
            return Err(Error::Input("empty diagram".into()));
        }
        Self::from_codes(&raw, free_loops, basepoint)
    }

    /// Builds a diagram from PD 4-tuples of arc labels.
    pub fn from_codes(
        codes: &[[u32; 4]],
        free_loops: usize,
        basepoint: Option<u32>,
    ) -> Result<Self, Error> {
        let mut labels: Vec<u32> = codes.iter().flat_map(|x| x.iter().copied()).collect();
        labels.sort_unstable();
        for w in labels.chunks(2) {
            if w.len() != 2 || w[0] != w[1] {
                return Err(Error::Input(format!(
                    "arc {} does not occur exactly twice",
                    w[0]
                )));
            }
        }
        labels.dedup();
        if labels.len() != 2 * codes.len() {
            return Err(Error::Input("arc label occurs more than twice".into()));
        }
        let dense = |l: u32| labels.binary_search(&l).unwrap() as u32;
        let mut ends: Vec<Vec<(u32, u8)>> = vec![Vec::new(); labels.len()];
        let mut crossings = Vec::with_capacity(codes.len());
        for (c, x) in codes.iter().enumerate() {
            let arcs = [dense(x[0]), dense(x[1]), dense(x[2]), dense(x[3])];
            for (p, &a) in arcs.iter().enumerate() {
                ends[a as usize].push((c as u32, p as u8));
            }
            crossings.push(Crossing {
                arcs,
                positive: false,
                reversed: false,
            });
        }
        let ends: Vec<[(u32, u8); 2]> = ends.into_iter().map(|e| [e[0], e[1]]).collect();
        let basepoint = match basepoint {
            None => None,
            Some(l) => Some(
                labels
                    .binary_search(&l)
                    .map_err(|_| Error::Input(format!("basepoint arc {l} not in diagram")))?
                    as u32,
            ),
        };
        let mut d = LinkDiagram {
            crossings,
            labels,
            free_loops,
            basepoint,
            ends,
            components: 0,
        };
        d.orient()?;
        Ok(d)
    }

    /// Determines strand directions and crossing signs.
    fn orient(&mut self) -> Result<(), Error> {
        let na = self.labels.len();
        // head[a] = index (0/1) of the end at which arc a enters a crossing.
        let mut head: Vec<Option<u8>> = vec![None; na];
        let mut queue: Vec<(usize, u8)> = Vec::new();
        let assign = |head: &mut Vec<Option<u8>>,
                      queue: &mut Vec<(usize, u8)>,
                      a: usize,
                      h: u8|
         -> Result<(), Error> {
            match head[a] {
                Some(x) if x != h => Err(Error::Input(
                    "inconsistent strand orientation in PD code".into(),
                )),
                Some(_) => Ok(()),
                None => {
                    head[a] = Some(h);
                    queue.push((a, h));
                    Ok(())
                }
            }
        };
        let end_index = |ends: &[[(u32, u8); 2]], a: usize, c: u32, p: u8| -> u8 {
            if ends[a][0] == (c, p) {
                0
            } else {
                1
            }
        };
        for a in 0..na {
            for e in 0..2u8 {
                let (_, p) = self.ends[a][e as usize];
                if p == 0 {
                    assign(&mut head, &mut queue, a, e)?;
                } else if p == 2 {
                    assign(&mut head, &mut queue, a, 1 - e)?;
                }
            }
        }
        let mut next_seed = 0usize;
        loop {
            while let Some((a, h)) = queue.pop() {
                // Arc a enters crossing at end h and leaves its other end.
                let (hc, hp) = self.ends[a][h as usize];
                if hp == 1 || hp == 3 {
                    let q = 4 - hp;
                    let b = self.crossings[hc as usize].arcs[q as usize] as usize;
                    let eb = end_index(&self.ends, b, hc, q);
                    assign(&mut head, &mut queue, b, 1 - eb)?;
                }
                let (tc, tp) = self.ends[a][1 - h as usize];
                if tp == 1 || tp == 3 {
                    let q = 4 - tp;
                    let b = self.crossings[tc as usize].arcs[q as usize] as usize;
                    let eb = end_index(&self.ends, b, tc, q);
                    assign(&mut head, &mut queue, b, eb)?;
                }
            }
            while next_seed < na && head[next_seed].is_some() {
                next_seed += 1;
            }
            if next_seed == na {
                break;
            }
            // A component that never passes under: orient it arbitrarily.
            assign(&mut head, &mut queue, next_seed, 0)?;
        }
        for c in 0..self.crossings.len() {
            let a3 = self.crossings[c].arcs[3] as usize;
            let e3 = end_index(&self.ends, a3, c as u32, 3);
            self.crossings[c].positive = head[a3] == Some(e3);
        }
        // Components: join the two strands through every crossing.
        let mut uf = UnionFind::new(na);
        for x in &self.crossings {
            uf.union(x.arcs[0] as usize, x.arcs[2] as usize);
            uf.union(x.arcs[1] as usize, x.arcs[3] as usize);
        }
        self.components = uf.count() + self.free_loops;
        Ok(())
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn n(&self) -> usize {
        self.crossings.len()
    }

    pub fn n_plus(&self) -> usize {
        self.crossings.iter().filter(|x| x.positive).count()
    }

    pub fn n_minus(&self) -> usize {
        self.n() - self.n_plus()
    }

    pub fn num_arcs(&self) -> usize {
        self.labels.len()
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// Original label of a dense arc index.
    pub fn label(&self, arc: u32) -> u32 {
        self.labels[arc as usize]
    }

    /// The basepoint arc (dense index); defaults to the first arc.
    pub fn basepoint(&self) -> Option<u32> {
        self.basepoint.or(if self.labels.is_empty() {
            None
        } else {
            Some(0)
        })
    }

    /// Sets the basepoint by original arc label.
    pub fn with_basepoint(mut self, label: u32) -> Result<Self, Error> {
        let a = self
            .labels
            .binary_search(&label)
            .map_err(|_| Error::Input(format!("basepoint arc {label} not in diagram")))?;
        self.basepoint = Some(a as u32);
        Ok(self)
    }

    /// The mirror image: every crossing switched.
    pub fn mirror(&self) -> Self {
        let codes: Vec<[u32; 4]> = self
            .crossings
            .iter()
            .map(|x| {
                let l = x.arcs.map(|a| self.labels[a as usize]);
                if x.positive {
                    [l[3], l[0], l[1], l[2]]
                } else {
                    [l[1], l[2], l[3], l[0]]
                }
            })
            .collect();
        let bp = self.basepoint.map(|a| self.labels[a as usize]);
        let mut m =
            Self::from_codes(&codes, self.free_loops, bp).expect("mirror of a valid diagram");
        for (x, y) in m.crossings.iter_mut().zip(&self.crossings) {
            x.reversed = y.reversed;
        }
        m
    }

    /// Flips the surgery arrows at the crossings set in `mask`.
    pub fn with_reversed_arrows(&self, mask: u32) -> Self {
        let mut d = self.clone();
        for (c, x) in d.crossings.iter_mut().enumerate() {
            if mask >> c & 1 == 1 {
                x.reversed = !x.reversed;
            }
        }
        d
    }

    /// PD text of this diagram (original labels).
    pub fn to_pd(&self) -> String {
        let mut parts: Vec<String> = self
            .crossings
            .iter()
            .map(|x| {
                let l = x.arcs.map(|a| self.labels[a as usize]);
                format!("X[{},{},{},{}]", l[0], l[1], l[2], l[3])
            })
            .collect();
        parts.extend(std::iter::repeat_n("U".to_string(), self.free_loops));
        if let Some(b) = self.basepoint {
            parts.push(format!("* {}", self.labels[b as usize]));
        }
        parts.join(" ")
    }

    /// The circles of the resolution at vertex `u`.
    pub fn resolve(&self, u: Vertex) -> Smoothing {
        let na = self.labels.len();
        let mut uf = UnionFind::new(na);
        for (c, x) in self.crossings.iter().enumerate() {
            let [a0, a1, a2, a3] = x.arcs.map(|a| a as usize);
            if u >> c & 1 == 0 {
                uf.union(a0, a1);
                uf.union(a2, a3);
            } else {
                uf.union(a0, a3);
                uf.union(a1, a2);
            }
        }
        // Circle id = minimal arc label; dense indices are label-ordered, so
        // the root's minimal member decides.
        let mut min_of_root = vec![u32::MAX; na];
        for a in 0..na {
            let r = uf.find(a);
            min_of_root[r] = min_of_root[r].min(a as u32);
        }
        let mut mins: Vec<u32> = (0..na)
            .filter(|&a| uf.find(a) == a)
            .map(|r| min_of_root[r])
            .collect();
        mins.sort_unstable();
        let mut circle_of_arc = vec![0u16; na];
        for a in 0..na {
            let m = min_of_root[uf.find(a)];
            circle_of_arc[a] = mins.binary_search(&m).unwrap() as u16;
        }
        let max_label = self.labels.last().copied().unwrap_or(0);
        let mut ids: Vec<u32> = mins.iter().map(|&m| self.labels[m as usize]).collect();
        ids.extend((0..self.free_loops as u32).map(|k| max_label + 1 + k));
        Smoothing {
            vertex: u,
            ids,
            circle_of_arc,
        }
    }

    /// Surgery data for the cube edge `v → u = v + e_c`.
    pub fn surgery_event(&self, sv: &Smoothing, su: &Smoothing, c: usize) -> SurgeryEvent {
        debug_assert_eq!(su.vertex, sv.vertex | (1 << c));
        debug_assert_eq!(sv.vertex >> c & 1, 0);
        let x = &self.crossings[c];
        let a = x.arcs;
        let map: Vec<u16> = (0..sv.num_circles())
            .map(|p| {
                if p >= sv.num_arc_circles() {
                    // Free loops keep their relative position at the end.
                    (su.num_arc_circles() + (p - sv.num_arc_circles())) as u16
                } else {
                    let rep = sv
                        .circle_of_arc
                        .iter()
                        .position(|&q| q as usize == p)
                        .unwrap();
                    su.circle_of_arc[rep]
                }
            })
            .collect();
        let p1 = sv.circle_of_arc[a[0] as usize];
        let p2 = sv.circle_of_arc[a[2] as usize];
        let kind = if p1 != p2 {
            SurgeryKind::Merge {
                s1: p1,
                s2: p2,
                s: su.circle_of_arc[a[0] as usize],
            }
        } else {
            let (mut s1, mut s2) = (
                su.circle_of_arc[a[1] as usize],
                su.circle_of_arc[a[0] as usize],
            );
            if x.reversed {
                std::mem::swap(&mut s1, &mut s2);
            }
            SurgeryKind::Split { s: p1, s1, s2 }
        };
        let mut map = map;
        if let SurgeryKind::Split { s, s1, .. } = kind {
            map[s as usize] = s1;
        }
        SurgeryEvent {
            crossing: c,
            kind,
            map,
        }
    }

    /// Traverses the circle through `start_arc` at vertex `u`, returning the
    /// crossing passes `(crossing, entry slot, exit slot)` in order.
    pub fn trace_circle(&self, u: Vertex, start_arc: u32) -> Vec<(usize, u8, u8)> {
        let partner = |c: usize, p: u8| -> u8 {
            if u >> c & 1 == 0 {
                [1, 0, 3, 2][p as usize]
            } else {
                [3, 2, 1, 0][p as usize]
            }
        };
        let mut passes = Vec::new();
        let (mut arc, mut from_end) = (start_arc as usize, 0usize);
        loop {
            let (c, p) = self.ends[arc][1 - from_end];
            let q = partner(c as usize, p);
            passes.push((c as usize, p, q));
            let next = self.crossings[c as usize].arcs[q as usize] as usize;
            let e = if self.ends[next][0] == (c, q) { 0 } else { 1 };
            arc = next;
            from_end = e;
            if arc == start_arc as usize && from_end == 0 {
                break;
            }
        }
        passes
    }
}

/// Disjoint-set forest over `0..n`.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller index as root.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    fn count(&mut self) -> usize {
        (0..self.parent.len())
            .filter(|&a| self.find(a) == a)
            .count()
    }
}

/// The circles of one resolution, ordered by ascending id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Smoothing {
    pub vertex: Vertex,
    /// Circle ids (minimal arc label; free loops get labels past the maximum).
    pub ids: Vec<u32>,
    /// Position (in `ids`) of the circle through each dense arc.
    pub circle_of_arc: Vec<u16>,
}

impl Smoothing {
    pub fn num_circles(&self) -> usize {
        self.ids.len()
    }

    /// Circles that contain at least one arc (free loops come last).
    pub fn num_arc_circles(&self) -> usize {
        self.circle_of_arc
            .iter()
            .map(|&c| c as usize + 1)
            .max()
            .unwrap_or(0)
    }
}

/// What happens to the circles along one cube edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurgeryKind {
    /// Circles `s1 ≠ s2` of the source merge into `s` of the target.
    Merge { s1: u16, s2: u16, s: u16 },
    /// Circle `s` of the source splits into `s1`, `s2` of the target; `s2`
    /// is the circle the rotated arrow points to.
    Split { s: u16, s1: u16, s2: u16 },
}

/// Surgery data of a cube edge, with circle positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeryEvent {
    pub crossing: usize,
    pub kind: SurgeryKind,
    /// Source circle position → target circle position (a split circle maps to `s1`).
    pub map: Vec<u16>,
}

/// Commutation type of a square face of the cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaceType {
    A,
    C,
    X,
    Y,
}

/// Which ladybug type is treated as special by an edge assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AssignmentType {
    X,
    Y,
}

/// All smoothings and edge surgeries of a diagram's cube.
#[derive(Clone, Debug)]
pub struct ResolutionCube {
    pub n: usize,
    pub smoothings: Vec<Smoothing>,
    /// Indexed by `u * n + c` for edges `u − e_c → u`.
    events: Vec<Option<SurgeryEvent>>,
}

impl ResolutionCube {
    pub fn new(d: &LinkDiagram) -> Self {
        let n = d.n();
        assert!(n <= 20, "too many crossings");
        let smoothings: Vec<Smoothing> = (0..(1u32 << n)).map(|u| d.resolve(u)).collect();
        let mut events = vec![None; n << n];
        for u in 0..(1u32 << n) {
            for c in (0..n).filter(|&c| u >> c & 1 == 1) {
                let v = u & !(1 << c);
                events[u as usize * n + c] =
                    Some(d.surgery_event(&smoothings[v as usize], &smoothings[u as usize], c));
            }
        }
        ResolutionCube {
            n,
            smoothings,
            events,
        }
    }

    /// The event on the edge `u − e_c → u`.
    pub fn event(&self, u: Vertex, c: usize) -> &SurgeryEvent {
        self.events[u as usize * self.n + c]
            .as_ref()
            .expect("not an edge")
    }
}

/// Classifies the face with top `u` and directions `i < j`.
pub fn classify_face(
    d: &LinkDiagram,
    rc: &ResolutionCube,
    u: Vertex,
    i: usize,
    j: usize,
) -> Result<FaceType, Error> {
    match compose_on_local_basis(rc, u, i, j) {
        Composite::Equal => Ok(FaceType::C),
        Composite::Negated => Ok(FaceType::A),
        Composite::Zero => Ok(ladybug_type(d, rc, u, i, j)),
        Composite::Mixed => Err(Error::Internal(format!(
            "face ({u:b}; {i},{j}) has one zero and one nonzero composite"
        ))),
    }
}

/// X/Y type of a ladybug face, from the cyclic order of the surgery-arc
/// endpoints along the circle at the bottom vertex.
fn ladybug_type(d: &LinkDiagram, rc: &ResolutionCube, u: Vertex, i: usize, j: usize) -> FaceType {
    let w = u & !(1 << i) & !(1 << j);
    let start = d.crossings[i].arcs[0];
    let _ = rc;
    let passes = d.trace_circle(w, start);
    // Events along the circle: (crossing, is_tail, on_left).
    let mut evs = Vec::new();
    for &(c, p, q) in &passes {
        if c != i && c != j {
            continue;
        }
        let p1 = (p, q) == (0, 1) || (p, q) == (1, 0);
        let on_left = (p, q) == (0, 1) || (p, q) == (2, 3);
        let is_tail = p1 != d.crossings[c].reversed;
        evs.push((c, is_tail, on_left));
    }
    debug_assert_eq!(
        evs.len(),
        4,
        "ladybug circle must meet both crossings twice"
    );
    let a = evs.iter().find(|e| e.2).map(|e| e.0).unwrap_or(i);
    let ta = evs.iter().position(|e| e.0 == a && e.1).unwrap();
    let next = evs[(ta + 1) % evs.len()];
    if next.0 != a && next.1 {
        FaceType::X
    } else {
        FaceType::Y
    }
}

/// All face types, indexed as a 2-cochain (`0..4` = A, C, X, Y).
pub fn classify_all_faces(
    d: &LinkDiagram,
    rc: &ResolutionCube,
) -> Result<Vec<(Vertex, usize, usize, FaceType)>, Error> {
    let n = d.n();
    let mut out = Vec::new();
    for u in 0..(1u32 << n) {
        for j in 0..n {
            for i in 0..j {
                if u >> i & 1 == 1 && u >> j & 1 == 1 {
                    out.push((u, i, j, classify_face(d, rc, u, i, j)?));
                }
            }
        }
    }
    Ok(out)
}

/// The prescribed `δε` for an edge assignment of the given type.
pub fn prescribed_faces(
    n: usize,
    faces: &[(Vertex, usize, usize, FaceType)],
    kind: AssignmentType,
) -> Cochain {
    let mut g = Cochain::zero(n, 2.min(n));
    for &(u, i, j, t) in faces {
        let one = match (t, kind) {
            (FaceType::A, _) => 1,
            (FaceType::X, AssignmentType::X) | (FaceType::Y, AssignmentType::Y) => 1,
            _ => 0,
        };
        g.set_face(u, i, j, one);
    }
    g
}

/// Solves `δε = g` on the cube by gauge fixing on a spanning tree: edges
/// `u → u − e_m` with `m` the highest coordinate of `u` get `ε = 0`.
/// Fails if `g` is not a cocycle.
pub fn solve_edge_assignment(n: usize, g: &Cochain) -> Result<Cochain, Error> {
    let mut eps = Cochain::zero(n, 1.min(n));
    if n < 2 {
        return Ok(eps);
    }
    let mut order: Vec<u32> = (0..(1u32 << n)).collect();
    order.sort_by_key(|u| u.count_ones());
    for &u in &order {
        if u == 0 {
            continue;
        }
        let m = 31 - u.leading_zeros() as usize;
        for i in (0..m).filter(|&i| u >> i & 1 == 1) {
            let val = g.face(u, i, m) ^ eps.edge(u & !(1 << m), i);
            eps.set_edge(u, i, val);
        }
    }
    let d = crate::cube::coboundary(&eps);
    if d != *g {
        return Err(Error::FaceClassification(
            "prescribed face cochain is not a coboundary".into(),
        ));
    }
    Ok(eps)
}

/// An edge assignment of the requested type for the diagram.
pub fn edge_assignment(
    d: &LinkDiagram,
    rc: &ResolutionCube,
    kind: AssignmentType,
) -> Result<Cochain, Error> {
    let faces = classify_all_faces(d, rc)?;
    solve_edge_assignment(d.n(), &prescribed_faces(d.n(), &faces, kind))
}
