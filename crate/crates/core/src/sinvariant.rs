//! The Bar-Natan filtered complex over F2, the Rasmussen invariant
//! `s_{F2}`, and its refinements `r±^α`, `s±^α` by a cohomology operation
//! `α` landing in homological degree 0.
//!
//! The Bar-Natan deformation uses the Frobenius algebra `F2[X]/(X² − X)`:
//! `m(X, X) = X`, `Δ(1) = 1⊗X + X⊗1 + 1⊗1`, `Δ(X) = X⊗X`. Generators are
//! the monomials of the unreduced cube (a set bit is an `X`) and the
//! filtration level of a generator is its quantum degree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::diagram::{LinkDiagram, SurgeryKind};
use crate::exactla::{column_eliminate, Echelon, F2Cohomology, F2Vec, SparseF2};
use crate::oddcomplex::{Choices, OddCube};
use crate::steenrod::{self, Operation, ReportOptions};
use crate::Error;

/// An F2 cochain complex with a quantum filtration level per generator.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    /// Generator levels per homological degree, in cube order.
    pub levels: BTreeMap<i32, Vec<i32>>,
    /// `d[i]: C^i → C^{i+1}`, column-wise.
    pub d: BTreeMap<i32, SparseF2>,
}

impl FilteredComplex {
    pub fn dim(&self, i: i32) -> usize {
        self.levels.get(&i).map_or(0, |l| l.len())
    }

    pub fn diff(&self, i: i32) -> SparseF2 {
        self.d.get(&i).cloned().unwrap_or_else(|| SparseF2 {
            nrows: self.dim(i + 1),
            cols: vec![Vec::new(); self.dim(i)],
        })
    }

    /// Checks `d² = 0`.
    pub fn check_d_squared(&self) -> bool {
        self.d.iter().all(|(&i, m)| {
            let next = self.diff(i + 1);
            (0..m.ncols()).all(|c| next.apply(&m.column_vec(c)).is_zero())
        })
    }

    /// Checks that `d` never lowers the filtration level.
    pub fn is_filtered(&self) -> bool {
        self.d.iter().all(|(&i, m)| {
            let (src, tgt) = (&self.levels[&i], &self.levels[&(i + 1)]);
            m.cols
                .iter()
                .enumerate()
                .all(|(c, rows)| rows.iter().all(|&r| tgt[r as usize] >= src[c]))
        })
    }

    /// The part of `d[i]` preserving the level, i.e. the associated graded.
    pub fn associated_graded(&self, i: i32) -> SparseF2 {
        let m = self.diff(i);
        let (src, tgt) = (self.levels.get(&i), self.levels.get(&(i + 1)));
        let cols = m
            .cols
            .iter()
            .enumerate()
            .map(|(c, rows)| {
                rows.iter()
                    .copied()
                    .filter(|&r| tgt.unwrap()[r as usize] == src.unwrap()[c])
                    .collect()
            })
            .collect();
        SparseF2 {
            nrows: m.nrows,
            cols,
        }
    }
}

fn map_mask(x: u32, map: &[u16]) -> u32 {
    let mut m = 0;
    let mut rest = x;
    while rest != 0 {
        let p = rest.trailing_zeros();
        rest &= rest - 1;
        m |= 1 << map[p as usize];
    }
    m
}

/// Builds the Bar-Natan complex of a knot diagram in homological degrees
/// within `window` (inclusive) if given.
pub fn build_bn_complex(
    oc: &OddCube,
    window: Option<(i32, i32)>,
) -> Result<FilteredComplex, Error> {
    if oc.diagram.components() != 1 {
        return Err(Error::Unsupported(
            "the s-invariant is computed for knots only".into(),
        ));
    }
    let n = oc.n();
    let in_window = |i: i32| window.is_none_or(|(lo, hi)| lo <= i && i <= hi);
    let mut levels: BTreeMap<i32, Vec<i32>> = BTreeMap::new();
    let mut pos: Vec<u32> = vec![0; oc.num_generators()];
    for u in 0..(1u32 << n) {
        let i = oc.hdeg(u);
        if !in_window(i) {
            continue;
        }
        let l = levels.entry(i).or_default();
        for x in 0..(1u32 << oc.num_circles(u)) {
            pos[oc.gen_id(u, x)] = l.len() as u32;
            l.push(oc.qdeg(u, x));
        }
    }
    let mut d = BTreeMap::new();
    for (&i, src) in &levels {
        let Some(tgt) = levels.get(&(i + 1)) else {
            continue;
        };
        let mut cols = vec![Vec::new(); src.len()];
        for v in (0..(1u32 << n)).filter(|&v| oc.hdeg(v) == i) {
            for c in (0..n).filter(|&c| v >> c & 1 == 0) {
                let u = v | 1 << c;
                let ev = oc.rc.event(u, c);
                for x in 0..(1u32 << oc.num_circles(v)) {
                    let m = map_mask(x, &ev.map);
                    let col = &mut cols[pos[oc.gen_id(v, x)] as usize];
                    let mut push = |y: u32| col.push(pos[oc.gen_id(u, y)]);
                    match ev.kind {
                        SurgeryKind::Merge { .. } => push(m),
                        SurgeryKind::Split { s, s1, s2 } => {
                            if x >> s & 1 == 1 {
                                push(m | 1 << s2);
                            } else {
                                push(m | 1 << s1);
                                push(m | 1 << s2);
                                push(m);
                            }
                        }
                    }
                }
            }
        }
        for col in cols.iter_mut() {
            col.sort_unstable();
        }
        d.insert(
            i,
            SparseF2 {
                nrows: tgt.len(),
                cols,
            },
        );
    }
    Ok(FilteredComplex { levels, d })
}

/// Degree-0 data of a Bar-Natan complex: a filtration-adapted cocycle
/// basis and the class of each basis cocycle in `H⁰_BN ≅ F2²`.
#[derive(Clone, Debug)]
pub struct BnAnalysis {
    levels0: Vec<i32>,
    /// Cocycle basis of `ker d⁰`; `cocycles[k]` has minimal level `cocycle_level[k]`
    /// and `Z⁰ ∩ F_j` is spanned by the cocycles of level `≥ j`.
    cocycles: Vec<F2Vec>,
    cocycle_level: Vec<i32>,
    /// Coordinates in `H⁰_BN`.
    classes: Vec<F2Vec>,
    /// Columns of `d⁻¹` (for the associated graded coboundaries).
    d_in: SparseF2,
    levels_in: Vec<i32>,
    h0_dim: usize,
}

/// Whether an odd `j` is `α`-half-full or `α`-full.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlphaStatus {
    NotHalfFull,
    HalfFull,
    Full,
}

impl BnAnalysis {
    pub fn new(c: &FilteredComplex) -> Result<Self, Error> {
        let levels0 = c.levels.get(&0).cloned().unwrap_or_default();
        let d0 = c.diff(0);
        let d_in = c.diff(-1);
        // Columns in descending level order: each kernel tag's last index is
        // its lowest-level generator.
        let mut order: Vec<usize> = (0..levels0.len()).collect();
        order.sort_by_key(|&g| (std::cmp::Reverse(levels0[g]), g));
        let cols: Vec<F2Vec> = order.iter().map(|&g| d0.column_vec(g)).collect();
        let (_, tags) = column_eliminate(d0.nrows, &cols);
        let mut cocycles = Vec::with_capacity(tags.len());
        let mut cocycle_level = Vec::with_capacity(tags.len());
        for t in &tags {
            let mut v = F2Vec::zeros(levels0.len());
            let mut low = i32::MAX;
            for p in t.ones() {
                v.set(order[p], true);
                low = low.min(levels0[order[p]]);
            }
            cocycles.push(v);
            cocycle_level.push(low);
        }
        let h0 = F2Cohomology::compute(levels0.len(), &d_in, &d0);
        let classes = cocycles
            .iter()
            .map(|z| {
                h0.coords(z)
                    .ok_or_else(|| Error::Internal("kernel vector is not a cocycle".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let levels_in = c.levels.get(&-1).cloned().unwrap_or_default();
        Ok(BnAnalysis {
            levels0,
            cocycles,
            cocycle_level,
            classes,
            d_in,
            levels_in,
            h0_dim: h0.dim(),
        })
    }

    /// Dimension of `H⁰_BN` (2 for a knot).
    pub fn h0_dim(&self) -> usize {
        self.h0_dim
    }

    /// Odd levels to scan: two beyond the degree-0 level range.
    pub fn scan_range(&self) -> Vec<i32> {
        let lo = self.levels0.iter().min().copied().unwrap_or(0) - 2;
        let hi = self.levels0.iter().max().copied().unwrap_or(0) + 2;
        (lo..=hi).filter(|j| j.rem_euclid(2) == 1).collect()
    }

    fn rank_of<'a>(&self, vecs: impl Iterator<Item = &'a F2Vec>) -> usize {
        let mut e = Echelon::new(self.h0_dim, 0);
        let mut r = 0;
        for v in vecs {
            if e.insert(v.clone(), F2Vec::zeros(0)) {
                r += 1;
            }
        }
        r
    }

    /// Rank of `i*: H⁰(F_j) → H⁰_BN`.
    pub fn istar_rank(&self, j: i32) -> usize {
        self.rank_of(
            (0..self.cocycles.len())
                .filter(|&k| self.cocycle_level[k] >= j)
                .map(|k| &self.classes[k]),
        )
    }

    /// `s_{F2} = max{j : i*_j onto} + 1`, cross-checked against
    /// `max{j : i*_j ≠ 0} − 1`.
    pub fn s_f2(&self) -> Result<i32, Error> {
        if self.h0_dim != 2 {
            return Err(Error::Internal(format!(
                "H⁰ of the Bar-Natan complex has dimension {}",
                self.h0_dim
            )));
        }
        let range = self.scan_range();
        let onto = range
            .iter()
            .copied()
            .filter(|&j| self.istar_rank(j) == 2)
            .max();
        let nonzero = range
            .iter()
            .copied()
            .filter(|&j| self.istar_rank(j) > 0)
            .max();
        match (onto, nonzero) {
            (Some(a), Some(b)) if a + 1 == b - 1 => Ok(a + 1),
            _ => Err(Error::Internal(format!(
                "inconsistent filtration scan: {onto:?} vs {nonzero:?}"
            ))),
        }
    }

    /// Status of `j` for an operation whose image in `Kh^{0,j}` is spanned
    /// by the given cocycles of the level-`j` slice.
    pub fn alpha_status(&self, j: i32, images: &[F2Vec]) -> AlphaStatus {
        // Coordinates of the level-j slice inside degree 0 and degree −1.
        let slice0: Vec<usize> = (0..self.levels0.len())
            .filter(|&g| self.levels0[g] == j)
            .collect();
        let mut slice_pos = vec![usize::MAX; self.levels0.len()];
        for (p, &g) in slice0.iter().enumerate() {
            slice_pos[g] = p;
        }
        // W = Im α + coboundaries of the associated graded slice.
        let mut w = Echelon::new(slice0.len(), 0);
        for (c, rows) in self.d_in.cols.iter().enumerate() {
            if self.levels_in[c] != j {
                continue;
            }
            let idx: Vec<usize> = rows
                .iter()
                .map(|&r| slice_pos[r as usize])
                .filter(|&p| p != usize::MAX)
                .collect();
            w.insert(F2Vec::from_indices(slice0.len(), &idx), F2Vec::zeros(0));
        }
        for img in images {
            assert_eq!(
                img.len(),
                slice0.len(),
                "image cocycle has the wrong length"
            );
            w.insert(img.clone(), F2Vec::zeros(0));
        }
        // Cocycles of level > j lie in V; level-j ones need p(z) ∈ W.
        let mut v_classes: Vec<F2Vec> = Vec::new();
        let exact: Vec<usize> = (0..self.cocycles.len())
            .filter(|&k| self.cocycle_level[k] == j)
            .collect();
        for k in (0..self.cocycles.len()).filter(|&k| self.cocycle_level[k] > j) {
            v_classes.push(self.classes[k].clone());
        }
        let mut e = Echelon::new(slice0.len(), exact.len());
        for (t, &k) in exact.iter().enumerate() {
            let idx: Vec<usize> = self.cocycles[k]
                .ones()
                .filter_map(|g| Some(slice_pos[g]).filter(|&p| p != usize::MAX))
                .collect();
            let mut pz = F2Vec::from_indices(slice0.len(), &idx);
            w.reduce(&mut pz);
            let mut tag = F2Vec::unit(exact.len(), t);
            e.reduce_tagged(&mut pz, &mut tag);
            if pz.is_zero() {
                let mut cls = F2Vec::zeros(self.h0_dim);
                for s in tag.ones() {
                    cls.xor_assign(&self.classes[exact[s]]);
                }
                v_classes.push(cls);
            } else {
                e.push_reduced(pz, tag);
            }
        }
        match self.rank_of(v_classes.iter()) {
            0 => AlphaStatus::NotHalfFull,
            1 => AlphaStatus::HalfFull,
            _ => AlphaStatus::Full,
        }
    }

    /// `(r₊, s₊)` for an operation given its image cocycles per odd `j`.
    pub fn refine_plus(&self, images: &BTreeMap<i32, Vec<F2Vec>>) -> Result<(i32, i32), Error> {
        let empty = Vec::new();
        let range = self.scan_range();
        let statuses: Vec<(i32, AlphaStatus)> = range
            .iter()
            .map(|&j| (j, self.alpha_status(j, images.get(&j).unwrap_or(&empty))))
            .collect();
        if statuses.windows(2).any(|w| w[1].1 > w[0].1) {
            return Err(Error::Internal(
                "α-status is not monotone in the filtration level".into(),
            ));
        }
        let half = statuses
            .iter()
            .filter(|s| s.1 >= AlphaStatus::HalfFull)
            .map(|s| s.0)
            .max();
        let full = statuses
            .iter()
            .filter(|s| s.1 == AlphaStatus::Full)
            .map(|s| s.0)
            .max();
        match (half, full) {
            (Some(h), Some(f)) => Ok((h + 1, f + 3)),
            _ => Err(Error::Internal(
                "filtration scan found no half-full level".into(),
            )),
        }
    }
}

/// Image cocycles in `Kh^{0,j}` of an operation landing in degree 0, for
/// every q-degree where the image is nonzero.
pub fn alpha_images(oc: &OddCube, op: Operation) -> Result<BTreeMap<i32, Vec<F2Vec>>, Error> {
    alpha_images_with_dims(oc, op, &steenrod::f2_dims_window(oc, (-3, 1))?)
}

/// As [`alpha_images`] with F2 dimensions valid in degrees −2 to 0.
pub fn alpha_images_with_dims(
    oc: &OddCube,
    op: Operation,
    dims: &BTreeMap<(i32, i32), usize>,
) -> Result<BTreeMap<i32, Vec<F2Vec>>, Error> {
    let src = -op.degree();
    let mut out = BTreeMap::new();
    let js: BTreeSet<i32> = dims
        .keys()
        .filter(|&&(i, _)| i == src)
        .map(|&(_, j)| j)
        .collect();
    for j in js {
        if dims.contains_key(&(0, j)) {
            let imgs = steenrod::image_cocycles(oc, op, src, j, ReportOptions::default())?;
            if !imgs.iter().all(|v| v.is_zero()) {
                out.insert(j, imgs);
            }
        }
    }
    Ok(out)
}

/// `s_{F2}` and refined invariants of a knot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SInvariantReport {
    pub s_f2: i32,
    /// `(operation, [r₊, s₊, r₋, s₋])`.
    pub refinements: Vec<(Operation, [i32; 4])>,
}

impl fmt::Display for SInvariantReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s = {}", self.s_f2)?;
        for (op, t) in &self.refinements {
            write!(
                f,
                "; {}: ({}, {}, {}, {})",
                op.name(),
                t[0],
                t[1],
                t[2],
                t[3]
            )?;
        }
        Ok(())
    }
}

/// One side of a knot: its cube and Bar-Natan analysis.
struct Side {
    oc: OddCube,
    bn: BnAnalysis,
}

impl Side {
    fn new(d: &LinkDiagram) -> Result<Self, Error> {
        let oc = OddCube::new(d, &Choices::standard())?;
        let bn = BnAnalysis::new(&build_bn_complex(&oc, Some((-1, 1)))?)?;
        Ok(Side { oc, bn })
    }
}

/// Computes `s_{F2}` and `(r₊, s₊, r₋, s₋)` for each operation.
pub fn s_invariants(d: &LinkDiagram, ops: &[Operation]) -> Result<SInvariantReport, Error> {
    let k = Side::new(d)?;
    let m = Side::new(&d.mirror())?;
    let s = k.bn.s_f2()?;
    let sm = m.bn.s_f2()?;
    if s != -sm {
        return Err(Error::Internal(format!(
            "s of the mirror is {sm}, expected {}",
            -s
        )));
    }
    let mut refinements = Vec::new();
    for &op in ops {
        let (rp, sp) = k.bn.refine_plus(&alpha_images(&k.oc, op)?)?;
        let (rm, smm) = m.bn.refine_plus(&alpha_images(&m.oc, op)?)?;
        refinements.push((op, [rp, sp, -rm, -smm]));
    }
    Ok(SInvariantReport {
        s_f2: s,
        refinements,
    })
}

/// For each operation into degree 0, whether it vanishes on a knot and its
/// mirror, in which case its refinement is the constant tuple `(s, s, s, s)`.
pub fn vanishing_ops(d: &LinkDiagram, ops: &[Operation]) -> Result<Vec<bool>, Error> {
    let mut out = vec![true; ops.len()];
    for dd in [d.clone(), d.mirror()] {
        let oc = OddCube::new(&dd, &Choices::standard())?;
        let dims = steenrod::f2_dims_window(&oc, (-3, 1))?;
        for (k, &op) in ops.iter().enumerate() {
            if out[k] && !alpha_images_with_dims(&oc, op, &dims)?.is_empty() {
                out[k] = false;
            }
        }
    }
    Ok(out)
}
