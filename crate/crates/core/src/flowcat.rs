//! Framed 1-flow categories: data model, axiom validation, sign changes, and
//! the signed cover of the cube built from the odd Khovanov functor.
//!
//! Conventions: a point `A ∈ M(a,b)` has `|a| = |b| + 1` and contributes
//! `(−1)^{s(A)}` to the coefficient of `a` in `δ(b)`. An interval
//! `I ⊂ M(a,c)` has two ends `(B, A)` with `A ∈ M(a,b)`, `B ∈ M(b,c)`.

use std::collections::{BTreeMap, HashMap};

use crate::cube::{self, FaceSignQuad, Vertex};
use crate::exactla::{SparseF2, SparseInt};
use crate::oddcomplex::{ComplexSlice, OddCube};
use crate::Error;

/// An object: a monomial at a cube vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FlowObject {
    pub vertex: Vertex,
    pub mono: u32,
    /// Homological grading `|u| − n₋`.
    pub grading: i32,
    pub q: i32,
}

/// A point of a 0-dimensional moduli space `M(from, to)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModuliPoint {
    pub from: u32,
    pub to: u32,
    /// Sign `s_F(P)`.
    pub sign: u8,
    /// Sign of the covered cube edge.
    pub cube_sign: u8,
    /// Functor sign `σ` (edge map coefficient with edge assignment twist).
    pub sigma: u8,
    /// Covered edge: top vertex and direction.
    pub edge: (Vertex, u8),
}

/// An interval component of `M(from, to)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModuliInterval {
    pub from: u32,
    pub to: u32,
    /// Boundary `(B, A)` point pairs; the end through `v1 = u − e_i` first.
    pub ends: [(u32, u32); 2],
    pub framing: u8,
    /// Covered face: top vertex and directions `i < j`.
    pub face: (Vertex, u8, u8),
    /// Framing of the covered face.
    pub cube_framing: u8,
}

/// A framed circle component of `M(from, to)` (never produced by cube covers).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModuliCircle {
    pub from: u32,
    pub to: u32,
    pub framing: u8,
}

/// Which functor the cover comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Odd Khovanov: point signs include the functor sign.
    Odd,
    /// Even Khovanov: functor signs forgotten.
    Even,
}

/// Which framing-change table induces interval framings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FramingTable {
    Standard,
    Alternative,
}

/// A framed 1-flow category.
#[derive(Clone, Debug)]
pub struct FramedOneFlowCategory {
    pub objects: Vec<FlowObject>,
    pub points: Vec<ModuliPoint>,
    pub intervals: Vec<ModuliInterval>,
    pub circles: Vec<ModuliCircle>,
    pub delta: u8,
    pub epsilon: u8,
    pub variant: Variant,
    pub table: FramingTable,
    /// Points leaving each object (`from == a`).
    out_points: Vec<Vec<u32>>,
    /// Interval and end index owning each `(B, A)` pair.
    end_index: HashMap<(u32, u32), (u32, u8)>,
    /// Objects per grading, in id order, and each object's position there.
    by_degree: BTreeMap<i32, Vec<u32>>,
    pos_in_degree: Vec<u32>,
}

/// Cover parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverParams {
    pub delta: u8,
    pub epsilon: u8,
    pub variant: Variant,
    pub table: FramingTable,
}

impl CoverParams {
    pub fn odd(epsilon: u8) -> Self {
        CoverParams {
            delta: 0,
            epsilon,
            variant: Variant::Odd,
            table: FramingTable::Standard,
        }
    }

    pub fn even() -> Self {
        CoverParams {
            delta: 0,
            epsilon: 0,
            variant: Variant::Even,
            table: FramingTable::Standard,
        }
    }
}

impl FramedOneFlowCategory {
    /// Assembles a category from raw data and indexes it.
    pub fn from_parts(
        objects: Vec<FlowObject>,
        points: Vec<ModuliPoint>,
        intervals: Vec<ModuliInterval>,
        circles: Vec<ModuliCircle>,
        params: CoverParams,
    ) -> Self {
        let mut cat = FramedOneFlowCategory {
            objects,
            points,
            intervals,
            circles,
            delta: params.delta,
            epsilon: params.epsilon,
            variant: params.variant,
            table: params.table,
            out_points: Vec::new(),
            end_index: HashMap::new(),
            by_degree: BTreeMap::new(),
            pos_in_degree: Vec::new(),
        };
        cat.reindex();
        cat
    }

    fn reindex(&mut self) {
        self.out_points = vec![Vec::new(); self.objects.len()];
        for (k, p) in self.points.iter().enumerate() {
            self.out_points[p.from as usize].push(k as u32);
        }
        self.end_index.clear();
        for (k, iv) in self.intervals.iter().enumerate() {
            for (e, &end) in iv.ends.iter().enumerate() {
                self.end_index.insert(end, (k as u32, e as u8));
            }
        }
        self.by_degree.clear();
        self.pos_in_degree = vec![0; self.objects.len()];
        for (k, o) in self.objects.iter().enumerate() {
            let list = self.by_degree.entry(o.grading).or_default();
            self.pos_in_degree[k] = list.len() as u32;
            list.push(k as u32);
        }
    }

    /// Points `A ∈ M(a, ·)`.
    pub fn out_points(&self, a: u32) -> &[u32] {
        &self.out_points[a as usize]
    }

    /// The interval having `(B, A)` as an end, with the end's index.
    pub fn interval_with_end(&self, b: u32, a: u32) -> Option<(u32, u8)> {
        self.end_index.get(&(b, a)).copied()
    }

    /// Objects of grading `k`.
    pub fn objects_in_degree(&self, k: i32) -> &[u32] {
        self.by_degree.get(&k).map_or(&[], |v| v.as_slice())
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.by_degree.keys().copied()
    }

    /// Position of an object within its grading.
    pub fn position(&self, obj: u32) -> usize {
        self.pos_in_degree[obj as usize] as usize
    }

    /// Integral coboundary `C^k → C^{k+1}`, `[a:b] = Σ_A (−1)^{s(A)}`.
    pub fn coboundary(&self, k: i32) -> SparseInt {
        let src = self.objects_in_degree(k);
        let tgt = self.objects_in_degree(k + 1);
        let mut m = SparseInt::new(tgt.len(), src.len());
        for &a in tgt {
            for &pi in self.out_points(a) {
                let p = &self.points[pi as usize];
                m.push(
                    self.position(a),
                    self.position(p.to),
                    if p.sign == 1 { -1 } else { 1 },
                );
            }
        }
        m.finish();
        m
    }

    /// Coboundary over F2.
    pub fn coboundary_f2(&self, k: i32) -> SparseF2 {
        self.coboundary(k).mod2_columns()
    }

    /// Recomputes the framing of interval `k` from its covered face data.
    fn induced_framing(&self, iv: &ModuliInterval) -> Result<u8, Error> {
        let [(b1, a1), (b2, a2)] = iv.ends;
        let p = |x: u32| &self.points[x as usize];
        let old = FaceSignQuad::new(
            p(b1).cube_sign,
            p(b2).cube_sign,
            p(a2).cube_sign,
            p(a1).cube_sign,
        );
        let new = FaceSignQuad::new(p(b1).sign, p(b2).sign, p(a2).sign, p(a1).sign);
        match self.table {
            FramingTable::Standard => {
                cube::frame_change(iv.cube_framing, old, new, self.delta, self.epsilon)
            }
            FramingTable::Alternative => {
                cube::alt_frame_change(iv.cube_framing, old, new, self.epsilon)
            }
        }
    }

    /// The category obtained by a sign change at object `x`: signs of all
    /// points incident to `x` flip and the framings of the intervals that
    /// contain such points are recomputed from the cube data.
    pub fn sign_change_at(&self, x: u32) -> Result<FramedOneFlowCategory, Error> {
        let mut out = self.clone();
        let mut touched = vec![false; self.points.len()];
        for (k, p) in out.points.iter_mut().enumerate() {
            if p.from == x || p.to == x {
                p.sign ^= 1;
                touched[k] = true;
            }
        }
        for k in 0..out.intervals.len() {
            let iv = out.intervals[k];
            let [(b1, a1), (b2, a2)] = iv.ends;
            if [b1, a1, b2, a2].iter().any(|&p| touched[p as usize]) {
                out.intervals[k].framing = out.induced_framing(&iv)?;
            }
        }
        Ok(out)
    }

    /// The full subcategory on the objects with `keep[x]` set. Intervals
    /// survive when all their boundary points do.
    pub fn full_subcategory(&self, keep: &[bool]) -> FramedOneFlowCategory {
        let mut obj_map = vec![u32::MAX; self.objects.len()];
        let mut objects = Vec::new();
        for (k, o) in self.objects.iter().enumerate() {
            if keep[k] {
                obj_map[k] = objects.len() as u32;
                objects.push(*o);
            }
        }
        let mut pt_map = vec![u32::MAX; self.points.len()];
        let mut points = Vec::new();
        for (k, p) in self.points.iter().enumerate() {
            if keep[p.from as usize] && keep[p.to as usize] {
                pt_map[k] = points.len() as u32;
                points.push(ModuliPoint {
                    from: obj_map[p.from as usize],
                    to: obj_map[p.to as usize],
                    ..*p
                });
            }
        }
        let intervals = self
            .intervals
            .iter()
            .filter(|iv| {
                iv.ends
                    .iter()
                    .all(|&(b, a)| pt_map[b as usize] != u32::MAX && pt_map[a as usize] != u32::MAX)
            })
            .map(|iv| ModuliInterval {
                from: obj_map[iv.from as usize],
                to: obj_map[iv.to as usize],
                ends: iv
                    .ends
                    .map(|(b, a)| (pt_map[b as usize], pt_map[a as usize])),
                ..*iv
            })
            .collect();
        let circles = self
            .circles
            .iter()
            .filter(|c| keep[c.from as usize] && keep[c.to as usize])
            .map(|c| ModuliCircle {
                from: obj_map[c.from as usize],
                to: obj_map[c.to as usize],
                ..*c
            })
            .collect();
        let params = CoverParams {
            delta: self.delta,
            epsilon: self.epsilon,
            variant: self.variant,
            table: self.table,
        };
        FramedOneFlowCategory::from_parts(objects, points, intervals, circles, params)
    }

    /// Checks the axioms; returns the violations found.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        let np = self.points.len() as u32;
        // Boundary points exist and match the interval's endpoints.
        for (k, iv) in self.intervals.iter().enumerate() {
            for &(b, a) in &iv.ends {
                let ok = b < np && a < np && {
                    let (pb, pa) = (&self.points[b as usize], &self.points[a as usize]);
                    pa.from == iv.from && pa.to == pb.from && pb.to == iv.to
                };
                if !ok {
                    rep.boundary.push(k);
                }
            }
        }
        if !rep.boundary.is_empty() {
            return rep;
        }
        for (k, iv) in self.intervals.iter().enumerate() {
            let [(b1, a1), (b2, a2)] = iv.ends;
            let s = |x: u32| self.points[x as usize].sign;
            if (s(b1) + s(a1) + s(b2) + s(a2)) & 1 != 1 {
                rep.sign.push(k);
            }
        }
        // Every broken path a → b → c is an end of exactly one interval.
        let mut seen: HashMap<(u32, u32), u32> = HashMap::new();
        for iv in &self.intervals {
            for &e in &iv.ends {
                *seen.entry(e).or_default() += 1;
            }
        }
        for (ai, pa) in self.points.iter().enumerate() {
            for &bi in self.out_points(pa.to) {
                if seen.get(&(bi, ai as u32)).copied().unwrap_or(0) != 1 {
                    rep.unmatched_paths.push((bi, ai as u32));
                }
            }
        }
        if !rep.unmatched_paths.is_empty() {
            return rep;
        }
        // Compatibility over every (a, d) with |a| = |d| + 3.
        rep.compatibility = self.compatibility_violations();
        rep
    }

    /// Pairs `(a, d)` with `|a| = |d| + 3` where `Σ_C (1 + f̃(C)) ≠ 0`.
    fn compatibility_violations(&self) -> Vec<(u32, u32)> {
        let mut bad = Vec::new();
        // Corner (P, B, A): A ∈ M(a,b), B ∈ M(b,c), P ∈ M(c,d).
        for a in 0..self.objects.len() as u32 {
            let mut corners: Vec<(u32, u32, u32)> = Vec::new();
            for &ai in self.out_points(a) {
                let b = self.points[ai as usize].to;
                for &bi in self.out_points(b) {
                    let c = self.points[bi as usize].to;
                    for &pi in self.out_points(c) {
                        corners.push((pi, bi, ai));
                    }
                }
            }
            if corners.is_empty() {
                continue;
            }
            let idx: HashMap<(u32, u32, u32), usize> =
                corners.iter().enumerate().map(|(k, &c)| (c, k)).collect();
            let mut visited = vec![false; corners.len()];
            let mut total: HashMap<u32, u8> = HashMap::new();
            for start in 0..corners.len() {
                if visited[start] {
                    continue;
                }
                let d = self.points[corners[start].0 as usize].to;
                let mut ft = 0u8;
                let mut cur = start;
                loop {
                    visited[cur] = true;
                    let (p, b, a_) = corners[cur];
                    // Edge I × {A}: I ⊂ M(b, d) with end (P, B).
                    let Some((ii, e)) = self.interval_with_end(p, b) else {
                        bad.push((a, d));
                        break;
                    };
                    let iv = &self.intervals[ii as usize];
                    ft ^= iv.framing;
                    let (p2, b2) = iv.ends[1 - e as usize];
                    let next = idx[&(p2, b2, a_)];
                    visited[next] = true;
                    // Edge {P'} × J: J ⊂ M(a, c') with end (B', A).
                    let Some((ji, e2)) = self.interval_with_end(b2, a_) else {
                        bad.push((a, d));
                        break;
                    };
                    let jv = &self.intervals[ji as usize];
                    ft ^= 1 ^ self.points[p2 as usize].sign ^ jv.framing;
                    let (b3, a3) = jv.ends[1 - e2 as usize];
                    cur = idx[&(p2, b3, a3)];
                    if cur == start {
                        break;
                    }
                }
                *total.entry(d).or_default() ^= 1 ^ ft;
            }
            for (d, t) in total {
                if t != 0 {
                    bad.push((a, d));
                }
            }
        }
        bad.sort_unstable();
        bad.dedup();
        bad
    }
}

/// The cochain complex of a category, one slice per q-degree present.
pub fn cochain_complex(cat: &FramedOneFlowCategory) -> BTreeMap<i32, ComplexSlice> {
    let mut out: BTreeMap<i32, ComplexSlice> = BTreeMap::new();
    for (k, o) in cat.objects.iter().enumerate() {
        out.entry(o.q)
            .or_insert_with(|| ComplexSlice {
                q: o.q,
                gens: BTreeMap::new(),
                d: BTreeMap::new(),
            })
            .gens
            .entry(o.grading)
            .or_default()
            .push(k);
    }
    for sl in out.values_mut() {
        let degrees: Vec<i32> = sl.gens.keys().copied().collect();
        let pos: HashMap<usize, usize> = sl
            .gens
            .values()
            .flat_map(|g| g.iter().enumerate().map(|(p, &k)| (k, p)))
            .collect();
        for i in degrees {
            let Some(tgt) = sl.gens.get(&(i + 1)) else {
                continue;
            };
            let src = &sl.gens[&i];
            let mut m = SparseInt::new(tgt.len(), src.len());
            for &a in tgt {
                for &pi in cat.out_points(a as u32) {
                    let p = &cat.points[pi as usize];
                    m.push(
                        pos[&a],
                        pos[&(p.to as usize)],
                        if p.sign == 1 { -1 } else { 1 },
                    );
                }
            }
            m.finish();
            sl.d.insert(i, m);
        }
    }
    out
}

/// Violations found by [`FramedOneFlowCategory::validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// Intervals whose boundary points are missing or mismatched.
    pub boundary: Vec<usize>,
    /// Intervals violating `s(P1)+s(Q1)+s(P2)+s(Q2) = 1`.
    pub sign: Vec<usize>,
    /// Broken paths `(B, A)` not bounding exactly one interval.
    pub unmatched_paths: Vec<(u32, u32)>,
    /// Pairs `(a, d)` violating the compatibility condition.
    pub compatibility: Vec<(u32, u32)>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.boundary.is_empty()
            && self.sign.is_empty()
            && self.unmatched_paths.is_empty()
            && self.compatibility.is_empty()
    }
}

/// Builds the signed cover over the q-slice `q`, restricted to objects of
/// grading in `window` (inclusive) when given.
pub fn build_cover(
    oc: &OddCube,
    q: i32,
    window: Option<(i32, i32)>,
    params: CoverParams,
) -> Result<FramedOneFlowCategory, Error> {
    let n = oc.n();
    let in_window = |i: i32| window.is_none_or(|(lo, hi)| lo <= i && i <= hi);
    let mut objects = Vec::new();
    let mut obj_of: HashMap<usize, u32> = HashMap::new();
    for u in 0..(1u32 << n) {
        let i = oc.hdeg(u);
        if !in_window(i) {
            continue;
        }
        for x in 0..(1u32 << oc.num_circles(u)) {
            if oc.qdeg(u, x) == q {
                obj_of.insert(oc.gen_id(u, x), objects.len() as u32);
                objects.push(FlowObject {
                    vertex: u,
                    mono: x,
                    grading: i,
                    q,
                });
            }
        }
    }
    // Points, and for each target object the incoming points.
    let mut points = Vec::new();
    let mut in_points: Vec<Vec<u32>> = vec![Vec::new(); objects.len()];
    for (bi, b) in objects.iter().enumerate() {
        let v = b.vertex;
        for c in (0..n).filter(|&c| v >> c & 1 == 0) {
            let u = v | 1 << c;
            if !in_window(oc.hdeg(u)) {
                continue;
            }
            let cube_sign = oc.sign.edge(u, c);
            for &(y, neg) in oc.edge_map(u, c, b.mono).terms() {
                let a = obj_of[&oc.gen_id(u, y)];
                let sigma = neg as u8;
                let sign = match params.variant {
                    Variant::Odd => cube_sign ^ sigma,
                    Variant::Even => cube_sign,
                };
                in_points[bi].push(points.len() as u32);
                points.push(ModuliPoint {
                    from: a,
                    to: bi as u32,
                    sign,
                    cube_sign,
                    sigma,
                    edge: (u, c as u8),
                });
            }
        }
    }
    // Intervals: pair the two routes around each face by functor sign.
    let mut intervals = Vec::new();
    for ci in 0..objects.len() {
        let w = objects[ci].vertex;
        // (a, route vertex) -> list of (B, A, composite sign)
        let mut paths: BTreeMap<u32, Vec<(u32, u32, u8, Vertex)>> = BTreeMap::new();
        for &bi in &in_points[ci] {
            let pb = &points[bi as usize];
            for &ai in &in_points[pb.from as usize] {
                let pa = &points[ai as usize];
                paths.entry(pa.from).or_default().push((
                    bi,
                    ai,
                    pb.sigma ^ pa.sigma,
                    objects[pb.from as usize].vertex,
                ));
            }
        }
        for (a, list) in paths {
            let u = objects[a as usize].vertex;
            let dirs = u ^ w;
            let i = dirs.trailing_zeros() as usize;
            let j = 31 - dirs.leading_zeros() as usize;
            let v1 = u & !(1 << i);
            let (r1, r2): (Vec<_>, Vec<_>) = list.into_iter().partition(|p| p.3 == v1);
            if r1.len() != r2.len() {
                return Err(Error::Internal(format!(
                    "composition bijection mismatch on face ({u:b}; {i},{j})"
                )));
            }
            for sgn in 0..2u8 {
                let e1: Vec<_> = r1.iter().filter(|p| p.2 == sgn).collect();
                let e2: Vec<_> = r2.iter().filter(|p| p.2 == sgn).collect();
                if e1.len() != e2.len() || e1.len() > 1 {
                    return Err(Error::Internal(format!(
                        "no unique sign-preserving bijection on face ({u:b}; {i},{j})"
                    )));
                }
                if let (Some(p1), Some(p2)) = (e1.first(), e2.first()) {
                    let f = oc.frame.face(u, i, j);
                    let mut iv = ModuliInterval {
                        from: a,
                        to: ci as u32,
                        ends: [(p1.0, p1.1), (p2.0, p2.1)],
                        framing: f,
                        face: (u, i as u8, j as u8),
                        cube_framing: f,
                    };
                    iv.framing = induced_framing_raw(&points, &iv, params)?;
                    intervals.push(iv);
                }
            }
        }
    }
    Ok(FramedOneFlowCategory::from_parts(
        objects,
        points,
        intervals,
        Vec::new(),
        params,
    ))
}

fn induced_framing_raw(
    points: &[ModuliPoint],
    iv: &ModuliInterval,
    params: CoverParams,
) -> Result<u8, Error> {
    let [(b1, a1), (b2, a2)] = iv.ends;
    let p = |x: u32| &points[x as usize];
    let old = FaceSignQuad::new(
        p(b1).cube_sign,
        p(b2).cube_sign,
        p(a2).cube_sign,
        p(a1).cube_sign,
    );
    let new = FaceSignQuad::new(p(b1).sign, p(b2).sign, p(a2).sign, p(a1).sign);
    match params.table {
        FramingTable::Standard => {
            cube::frame_change(iv.cube_framing, old, new, params.delta, params.epsilon)
        }
        FramingTable::Alternative => {
            cube::alt_frame_change(iv.cube_framing, old, new, params.epsilon)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::LinkDiagram;
    use crate::oddcomplex::Choices;

    #[test]
    fn unknot_cover_has_no_moduli() {
        let d = LinkDiagram::parse_pd("U").unwrap();
        let oc = OddCube::new(&d, &Choices::standard()).unwrap();
        for q in [-1, 1] {
            let cat = build_cover(&oc, q, None, CoverParams::odd(0)).unwrap();
            assert_eq!(cat.objects.len(), 1);
            assert!(cat.points.is_empty() && cat.intervals.is_empty());
        }
    }

    #[test]
    fn trefoil_cover_validates() {
        let d = LinkDiagram::parse_pd("X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]").unwrap();
        let oc = OddCube::new(&d, &Choices::standard()).unwrap();
        for q in [1, 3, 5, 7, 9] {
            for eps in 0..2 {
                let cat = build_cover(&oc, q, None, CoverParams::odd(eps)).unwrap();
                assert!(cat.circles.is_empty());
                let rep = cat.validate();
                assert!(rep.is_ok(), "q={q} eps={eps}: {rep:?}");
            }
        }
    }
}
