//! The odd Khovanov cube: exterior-algebra edge maps, the graded chain
//! complexes over Z and F2, and the reduced subcomplex.
//!
//! A monomial at vertex `u` is a bitmask over the circle positions of `S_u`.
//! Signs are computed relative to a per-vertex circle order (`ranks`): the
//! basis word lists the circles of a monomial in decreasing rank.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap};

use crate::cube::{self, Cochain, Vertex};
use crate::diagram::{
    self, AssignmentType, FaceType, LinkDiagram, ResolutionCube, SurgeryEvent, SurgeryKind,
};
use crate::exactla::{
    integral_cohomology, rank_torsion, AbelianGroup, F2Cohomology, IntMatrix, RankTorsion,
    SparseF2, SparseInt,
};
use crate::Error;

/// Image of a monomial under an edge map: up to two signed terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Psi {
    len: u8,
    terms: [(u32, bool); 2],
}

impl Psi {
    fn push(&mut self, mask: u32, negative: bool) {
        self.terms[self.len as usize] = (mask, negative);
        self.len += 1;
    }

    /// `(target monomial, coefficient is −1)` pairs.
    pub fn terms(&self) -> &[(u32, bool)] {
        &self.terms[..self.len as usize]
    }
}

/// Maps monomial `x` through `map`, returning the image mask and the parity
/// of the permutation needed to sort the image word.
#[inline]
fn map_monomial(x: u32, map: &[u16], rank_v: &[u8], rank_u: &[u8]) -> (u32, bool) {
    let mut items = [0u8; 32];
    let mut k = 0;
    let mut rest = x;
    let mut mask = 0u32;
    while rest != 0 {
        let p = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        items[k] = p as u8;
        k += 1;
        mask |= 1 << map[p];
    }
    let items = &mut items[..k];
    // Word order at the source: decreasing rank.
    items.sort_unstable_by(|&a, &b| rank_v[b as usize].cmp(&rank_v[a as usize]));
    let mut inv = 0u32;
    for s in 0..k {
        let rs = rank_u[map[items[s] as usize] as usize];
        for t in s + 1..k {
            if rs < rank_u[map[items[t] as usize] as usize] {
                inv += 1;
            }
        }
    }
    (mask, inv & 1 == 1)
}

/// Sign of `c ∧ y` relative to the basis word of `y ∪ {c}`.
#[inline]
fn wedge_left_parity(c: u16, y: u32, rank: &[u8]) -> bool {
    let rc = rank[c as usize];
    let mut cnt = 0u32;
    let mut rest = y;
    while rest != 0 {
        let p = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if rank[p] > rc {
            cnt += 1;
        }
    }
    cnt & 1 == 1
}

/// The odd Khovanov edge map `ψ_{v,u}` (no sign twists) on monomial `x`.
pub fn psi(ev: &SurgeryEvent, rank_v: &[u8], rank_u: &[u8], x: u32) -> Psi {
    let mut out = Psi::default();
    match ev.kind {
        SurgeryKind::Merge { s1, s2, .. } => {
            if x >> s1 & 1 == 1 && x >> s2 & 1 == 1 {
                return out;
            }
            let (m, par) = map_monomial(x, &ev.map, rank_v, rank_u);
            out.push(m, par);
        }
        SurgeryKind::Split { s1, s2, .. } => {
            let (m, par) = map_monomial(x, &ev.map, rank_v, rank_u);
            if m >> s1 & 1 == 0 {
                out.push(m | 1 << s1, par ^ wedge_left_parity(s1, m, rank_u));
            }
            out.push(m | 1 << s2, !(par ^ wedge_left_parity(s2, m, rank_u)));
        }
    }
    out
}

/// Outcome of comparing the two composites around a face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Composite {
    Equal,
    Negated,
    Zero,
    Mixed,
}

fn identity_ranks(m: usize) -> Vec<u8> {
    (0..m as u8).collect()
}

/// Compares the two composites around the face with top `u`, directions
/// `i < j`, on all monomials in the circles meeting crossings `i` and `j`.
pub fn compose_on_local_basis(rc: &ResolutionCube, u: Vertex, i: usize, j: usize) -> Composite {
    let w = u & !(1 << i) & !(1 << j);
    let (v1, v2) = (u & !(1 << i), u & !(1 << j));
    let sw = &rc.smoothings[w as usize];
    let ranks = |v: Vertex| identity_ranks(rc.smoothings[v as usize].num_circles());
    let (rw, r1, r2, ru) = (ranks(w), ranks(v1), ranks(v2), ranks(u));
    let _ = sw;
    // Circles at w touched by the two crossings.
    let involved: u32 = {
        let d = &rc.smoothings[w as usize];
        let mut m = 0u32;
        for c in [i, j] {
            let ev = rc.event(w | 1 << c, c);
            match ev.kind {
                SurgeryKind::Merge { s1, s2, .. } => m |= 1 << s1 | 1 << s2,
                SurgeryKind::Split { s, .. } => m |= 1 << s,
            }
        }
        let _ = d;
        m
    };
    let route =
        |x: u32, first: &SurgeryEvent, r_mid: &[u8], second: &SurgeryEvent| -> BTreeMap<u32, i32> {
            let mut acc = BTreeMap::new();
            for &(y, n1) in psi(first, &rw, r_mid, x).terms() {
                for &(z, n2) in psi(second, r_mid, &ru, y).terms() {
                    *acc.entry(z).or_insert(0) += if n1 ^ n2 { -1 } else { 1 };
                }
            }
            acc.retain(|_, c| *c != 0);
            acc
        };
    let e_w_v1 = rc.event(v1, j);
    let e_v1_u = rc.event(u, i);
    let e_w_v2 = rc.event(v2, i);
    let e_v2_u = rc.event(u, j);
    let (mut eq, mut neg, mut zero1, mut zero2) = (true, true, true, true);
    let mut sub = involved;
    loop {
        let m1 = route(sub, e_w_v1, &r1, e_v1_u);
        let m2 = route(sub, e_w_v2, &r2, e_v2_u);
        zero1 &= m1.is_empty();
        zero2 &= m2.is_empty();
        let negm2: BTreeMap<u32, i32> = m2.iter().map(|(&k, &c)| (k, -c)).collect();
        eq &= m1 == m2;
        neg &= m1 == negm2;
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & involved;
    }
    match (zero1, zero2) {
        (true, true) => Composite::Zero,
        (false, false) if eq => Composite::Equal,
        (false, false) if neg => Composite::Negated,
        _ => Composite::Mixed,
    }
}

/// The choices entering the construction, all irrelevant for the exported
/// invariants.
#[derive(Clone, Debug)]
pub struct Choices {
    /// Ladybug type treated as special by the edge assignment.
    pub assignment: AssignmentType,
    /// Arrow reversals (bit `c` reverses crossing `c`).
    pub arrow_mask: u32,
    /// Gauge change `ε + δg` of the edge assignment (vertex 0-cochain bits).
    pub eps_gauge: Vec<u8>,
    /// Sign assignment `s* + δh`.
    pub sign_gauge: Vec<u8>,
    /// Frame assignment gauge `+ δk` (1-cochain values per edge, in cell order).
    pub frame_gauge: Option<Cochain>,
    /// Random permutations of the circle order at every vertex.
    pub order_seed: Option<u64>,
}

impl Choices {
    /// Deterministic defaults: type-X assignment, standard signs and frames,
    /// ascending circle ids.
    pub fn standard() -> Self {
        Choices {
            assignment: AssignmentType::X,
            arrow_mask: 0,
            eps_gauge: Vec::new(),
            sign_gauge: Vec::new(),
            frame_gauge: None,
            order_seed: None,
        }
    }

    /// Seeded random choices for an `n`-crossing diagram.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nv = 1usize << n;
        let mut fg = Cochain::zero(n, 1.min(n));
        let cells: Vec<_> = fg.cells().collect();
        for c in cells {
            fg.set(c, rng.gen_range(0..2));
        }
        Choices {
            assignment: if rng.gen_bool(0.5) {
                AssignmentType::X
            } else {
                AssignmentType::Y
            },
            arrow_mask: if n == 0 {
                0
            } else {
                rng.gen_range(0..(1u64 << n)) as u32
            },
            eps_gauge: (0..nv).map(|_| rng.gen_range(0..2)).collect(),
            sign_gauge: (0..nv).map(|_| rng.gen_range(0..2)).collect(),
            frame_gauge: Some(fg),
            order_seed: Some(rng.gen()),
        }
    }
}

fn vertex_cochain(n: usize, bits: &[u8]) -> Cochain {
    let mut c = Cochain::zero(n, 0);
    for (u, &b) in bits.iter().enumerate() {
        c.set_dirs(u as u32, 0, b);
    }
    c
}

/// The decorated odd Khovanov cube of a diagram.
#[derive(Clone, Debug)]
pub struct OddCube {
    pub diagram: LinkDiagram,
    pub rc: ResolutionCube,
    pub faces: Vec<(Vertex, usize, usize, FaceType)>,
    /// Circle order at each vertex: `ranks[u][p]` = rank of circle position `p`.
    pub ranks: Vec<Vec<u8>>,
    /// Edge assignment.
    pub eps: Cochain,
    /// Cube sign assignment.
    pub sign: Cochain,
    /// Cube frame assignment (compatible with `sign`).
    pub frame: Cochain,
    /// Global generator offset of each vertex.
    offsets: Vec<usize>,
}

impl OddCube {
    pub fn new(d: &LinkDiagram, ch: &Choices) -> Result<Self, Error> {
        let d = d.with_reversed_arrows(ch.arrow_mask);
        let n = d.n();
        if n > 16 {
            return Err(Error::Unsupported(format!(
                "{n} crossings exceed the supported cube size"
            )));
        }
        let rc = ResolutionCube::new(&d);
        let faces = diagram::classify_all_faces(&d, &rc)?;
        let g = diagram::prescribed_faces(n, &faces, ch.assignment);
        let mut eps = diagram::solve_edge_assignment(n, &g)?;
        let nv = 1usize << n;
        if !ch.eps_gauge.is_empty() && n > 0 {
            eps = eps.add(&cube::coboundary(&vertex_cochain(n, &ch.eps_gauge[..nv])));
        }
        let s_std = cube::standard_sign(n);
        let f_std = cube::standard_frame(n);
        let (sign, mut frame) = if !ch.sign_gauge.is_empty() && n > 0 {
            let s = s_std.add(&cube::coboundary(&vertex_cochain(n, &ch.sign_gauge[..nv])));
            let f = if n >= 2 {
                cube::change_frame_assignment(&s_std, &f_std, &s, 0, 0)?
            } else {
                f_std.clone()
            };
            (s, f)
        } else {
            (s_std, f_std)
        };
        if let Some(fg) = &ch.frame_gauge {
            if n >= 2 {
                frame = frame.add(&cube::coboundary(fg));
            }
        }
        let mut ranks: Vec<Vec<u8>> = rc
            .smoothings
            .iter()
            .map(|s| identity_ranks(s.num_circles()))
            .collect();
        if let Some(seed) = ch.order_seed {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for r in ranks.iter_mut() {
                r.shuffle(&mut rng);
            }
        }
        let mut offsets = Vec::with_capacity(nv + 1);
        let mut acc = 0usize;
        for s in &rc.smoothings {
            offsets.push(acc);
            acc += 1usize << s.num_circles();
        }
        offsets.push(acc);
        Ok(OddCube {
            diagram: d,
            rc,
            faces,
            ranks,
            eps,
            sign,
            frame,
            offsets,
        })
    }

    pub fn n(&self) -> usize {
        self.diagram.n()
    }

    /// Total number of generators.
    pub fn num_generators(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Global id of monomial `x` at vertex `u`.
    #[inline]
    pub fn gen_id(&self, u: Vertex, x: u32) -> usize {
        self.offsets[u as usize] + x as usize
    }

    /// Inverse of [`OddCube::gen_id`].
    pub fn gen_of(&self, id: usize) -> (Vertex, u32) {
        let u = self.offsets.partition_point(|&o| o <= id) - 1;
        (u as Vertex, (id - self.offsets[u]) as u32)
    }

    pub fn num_circles(&self, u: Vertex) -> usize {
        self.rc.smoothings[u as usize].num_circles()
    }

    /// Homological degree `|u| − n₋`.
    pub fn hdeg(&self, u: Vertex) -> i32 {
        u.count_ones() as i32 - self.diagram.n_minus() as i32
    }

    /// Quantum degree `|S_u| − 2|x| + |u| + n₊ − 2n₋`.
    pub fn qdeg(&self, u: Vertex, x: u32) -> i32 {
        self.num_circles(u) as i32 - 2 * x.count_ones() as i32
            + u.count_ones() as i32
            + self.diagram.n_plus() as i32
            - 2 * self.diagram.n_minus() as i32
    }

    /// The odd edge map on the edge `u − e_c → u`, with the edge assignment
    /// twist but without the cube sign.
    pub fn edge_map(&self, u: Vertex, c: usize, x: u32) -> Psi {
        let v = u & !(1 << c);
        let mut p = psi(
            self.rc.event(u, c),
            &self.ranks[v as usize],
            &self.ranks[u as usize],
            x,
        );
        if self.eps.edge(u, c) == 1 {
            for t in p.terms.iter_mut().take(p.len as usize) {
                t.1 = !t.1;
            }
        }
        p
    }

    /// Circle position of the basepoint at vertex `u`.
    pub fn basepoint_circle(&self, u: Vertex) -> Option<u16> {
        let b = self.diagram.basepoint()?;
        Some(self.rc.smoothings[u as usize].circle_of_arc[b as usize])
    }

    /// Monomials of vertex `u` in canonical order: by word length, then
    /// lexicographically on the decreasing word of circle ids.
    pub fn vertex_basis(&self, u: Vertex) -> Vec<Monomial> {
        let s = &self.rc.smoothings[u as usize];
        let mut out: Vec<Monomial> = (0..(1u32 << s.num_circles()))
            .map(|x| {
                let mut word: Vec<u32> = (0..s.num_circles())
                    .filter(|&p| x >> p & 1 == 1)
                    .map(|p| s.ids[p])
                    .collect();
                word.sort_unstable_by(|a, b| b.cmp(a));
                Monomial {
                    vertex: u,
                    mask: x,
                    word,
                }
            })
            .collect();
        out.sort_by(|a, b| (a.word.len(), &a.word).cmp(&(b.word.len(), &b.word)));
        out
    }

    /// The matrix of the edge `v → u` from the span of `F_v` to `F_u`, with
    /// both signs, in mask order.
    pub fn edge_matrix(&self, u: Vertex, c: usize) -> IntMatrix {
        let v = u & !(1 << c);
        let (nv, nu) = (1usize << self.num_circles(v), 1usize << self.num_circles(u));
        let mut m = IntMatrix::zeros(nu, nv);
        let s = self.sign.edge(u, c) == 1;
        for x in 0..nv as u32 {
            for &(y, neg) in self.edge_map(u, c, x).terms() {
                m.add(y as usize, x as usize, if neg ^ s { -1 } else { 1 });
            }
        }
        m
    }
}

/// A monomial with its basis word (decreasing circle ids).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub vertex: Vertex,
    pub mask: u32,
    pub word: Vec<u32>,
}

/// Which signs the differential carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Theory {
    /// Odd Khovanov: edge-map signs, edge assignment and cube signs.
    Odd,
    /// Even Khovanov: only the cube signs.
    Even,
}

/// Whether to use the whole complex or the reduced subcomplex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reduction {
    Unreduced,
    /// Monomials containing the basepoint circle; q-degrees shifted by +1.
    Reduced,
}

/// One quantum degree of a cochain complex: generators per homological
/// degree and integral differentials between consecutive degrees.
#[derive(Clone, Debug)]
pub struct ComplexSlice {
    pub q: i32,
    /// Generators (global ids) per homological degree.
    pub gens: BTreeMap<i32, Vec<usize>>,
    /// `d[i]` maps degree `i` to degree `i + 1` (rows = targets).
    pub d: BTreeMap<i32, SparseInt>,
}

impl ComplexSlice {
    pub fn dim(&self, i: i32) -> usize {
        self.gens.get(&i).map_or(0, |g| g.len())
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.gens.keys().copied()
    }

    /// The differential out of degree `i` (possibly empty).
    pub fn diff(&self, i: i32) -> SparseInt {
        self.d
            .get(&i)
            .cloned()
            .unwrap_or_else(|| SparseInt::new(self.dim(i + 1), self.dim(i)))
    }

    pub fn diff_f2(&self, i: i32) -> SparseF2 {
        match self.d.get(&i) {
            Some(m) => m.mod2_columns(),
            None => SparseF2 {
                nrows: self.dim(i + 1),
                cols: vec![Vec::new(); self.dim(i)],
            },
        }
    }

    /// F2 cohomology in degree `i`.
    pub fn f2_cohomology(&self, i: i32) -> F2Cohomology {
        F2Cohomology::compute(self.dim(i), &self.diff_f2(i - 1), &self.diff_f2(i))
    }

    /// Integral cohomology in degree `i`.
    pub fn integral_cohomology(&self, i: i32) -> Result<AbelianGroup, Error> {
        let din = rank_torsion(&self.diff(i - 1))?;
        let dout = rank_torsion(&self.diff(i))?;
        integral_cohomology(self.dim(i), &din, &dout)
    }

    /// Integral cohomology of all degrees (nonzero groups only).
    pub fn integral_cohomology_all(&self) -> Result<BTreeMap<i32, AbelianGroup>, Error> {
        let mut rt: BTreeMap<i32, RankTorsion> = BTreeMap::new();
        for (&i, m) in &self.d {
            rt.insert(i, rank_torsion(m)?);
        }
        let empty = RankTorsion {
            rank: 0,
            torsion: Vec::new(),
        };
        let mut out = BTreeMap::new();
        for i in self.degrees() {
            let g = integral_cohomology(
                self.dim(i),
                rt.get(&(i - 1)).unwrap_or(&empty),
                rt.get(&i).unwrap_or(&empty),
            )?;
            if !g.is_zero() {
                out.insert(i, g);
            }
        }
        Ok(out)
    }

    /// Checks `d ∘ d = 0` over Z.
    pub fn check_d_squared(&self) -> bool {
        for (&i, m) in &self.d {
            if let Some(m2) = self.d.get(&(i + 1)) {
                for col in 0..m.ncols {
                    let mut x = vec![0i64; m.ncols];
                    x[col] = 1;
                    let y = m.apply(&x);
                    if m2.apply(&y).iter().any(|&z| z != 0) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// The graded cochain complex of a decorated cube, split by q-degree.
#[derive(Clone, Debug)]
pub struct GradedComplex {
    pub theory: Theory,
    pub reduction: Reduction,
    pub slices: BTreeMap<i32, ComplexSlice>,
}

impl GradedComplex {
    pub fn slice(&self, q: i32) -> Option<&ComplexSlice> {
        self.slices.get(&q)
    }

    /// F2 dimensions of cohomology per `(i, q)`, nonzero entries only.
    pub fn f2_dims(&self) -> BTreeMap<(i32, i32), usize> {
        let mut out = BTreeMap::new();
        for (&q, s) in &self.slices {
            for i in s.degrees() {
                let h = s.f2_cohomology(i).dim();
                if h > 0 {
                    out.insert((i, q), h);
                }
            }
        }
        out
    }

    /// Integral cohomology per `(i, q)`, nonzero groups only.
    pub fn integral(&self) -> Result<BTreeMap<(i32, i32), AbelianGroup>, Error> {
        let mut out = BTreeMap::new();
        for (&q, s) in &self.slices {
            for (i, g) in s.integral_cohomology_all()? {
                out.insert((i, q), g);
            }
        }
        Ok(out)
    }
}

/// Builds the cochain complex of the decorated cube.
pub fn build_complex(
    oc: &OddCube,
    theory: Theory,
    reduction: Reduction,
) -> Result<GradedComplex, Error> {
    build_complex_window(oc, theory, reduction, None, None)
}

/// Builds the complex restricted to q-degree `only_q` (if given) and to
/// homological degrees in `window` (if given).
pub fn build_complex_window(
    oc: &OddCube,
    theory: Theory,
    reduction: Reduction,
    only_q: Option<i32>,
    window: Option<(i32, i32)>,
) -> Result<GradedComplex, Error> {
    let n = oc.n();
    let shift = if reduction == Reduction::Reduced {
        1
    } else {
        0
    };
    if reduction == Reduction::Reduced && oc.diagram.basepoint().is_none() {
        return Err(Error::Input(
            "reduced complex needs a basepoint on an arc".into(),
        ));
    }
    let in_window = |i: i32| window.is_none_or(|(lo, hi)| lo <= i && i <= hi);
    let keep = |u: Vertex, x: u32| -> bool {
        match reduction {
            Reduction::Unreduced => true,
            Reduction::Reduced => x >> oc.basepoint_circle(u).unwrap() & 1 == 1,
        }
    };
    // Position of each generator within its (q, i) block.
    let mut pos: HashMap<usize, usize> = HashMap::new();
    let mut slices: BTreeMap<i32, ComplexSlice> = BTreeMap::new();
    for u in 0..(1u32 << n) {
        let i = oc.hdeg(u);
        if !in_window(i) {
            continue;
        }
        for x in 0..(1u32 << oc.num_circles(u)) {
            if !keep(u, x) {
                continue;
            }
            let q = oc.qdeg(u, x) + shift;
            if only_q.is_some_and(|j| j != q) {
                continue;
            }
            let sl = slices.entry(q).or_insert_with(|| ComplexSlice {
                q,
                gens: BTreeMap::new(),
                d: BTreeMap::new(),
            });
            let g = sl.gens.entry(i).or_default();
            pos.insert(oc.gen_id(u, x), g.len());
            g.push(oc.gen_id(u, x));
        }
    }
    for sl in slices.values_mut() {
        let degrees: Vec<i32> = sl.gens.keys().copied().collect();
        for &i in &degrees {
            let Some(tgt) = sl.gens.get(&(i + 1)) else {
                continue;
            };
            let src = &sl.gens[&i];
            let mut m = SparseInt::new(tgt.len(), src.len());
            for (col, &gid) in src.iter().enumerate() {
                let (v, x) = oc.gen_of(gid);
                for c in (0..n).filter(|&c| v >> c & 1 == 0) {
                    let u = v | 1 << c;
                    let s = oc.sign.edge(u, c) == 1;
                    let p = match theory {
                        Theory::Odd => oc.edge_map(u, c, x),
                        Theory::Even => {
                            let mut p = psi(
                                oc.rc.event(u, c),
                                &oc.ranks[v as usize],
                                &oc.ranks[u as usize],
                                x,
                            );
                            for t in p.terms.iter_mut().take(p.len as usize) {
                                t.1 = false;
                            }
                            p
                        }
                    };
                    for &(y, neg) in p.terms() {
                        let row = pos[&oc.gen_id(u, y)];
                        m.push(row, col, if neg ^ s { -1 } else { 1 });
                    }
                }
            }
            m.finish();
            sl.d.insert(i, m);
        }
    }
    Ok(GradedComplex {
        theory,
        reduction,
        slices,
    })
}

/// Checks `d ∘ d = 0` over Z on the whole complex.
pub fn check_d_squared(c: &GradedComplex) -> Result<(), Error> {
    for (q, s) in &c.slices {
        if !s.check_d_squared() {
            return Err(Error::Internal(format!(
                "edge assignment or face types invalid: d² ≠ 0 at q = {q}"
            )));
        }
    }
    Ok(())
}
