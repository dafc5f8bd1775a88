//! Second Steenrod squares of framed 1-flow categories via combinatorial
//! boundary matchings and special graph structures, the Bockstein `Sq¹`,
//! and Chang-word summaries of width-three slices.
//!
//! Cochains on a category are F2 vectors indexed by the position of each
//! object within its grading (see [`FramedOneFlowCategory::position`]).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactla::{F2Cohomology, F2Matrix, F2Vec};
use crate::flowcat::{build_cover, CoverParams, FramedOneFlowCategory, FramingTable, Variant};
use crate::oddcomplex::{build_complex_window, ComplexSlice, OddCube, Reduction, Theory};
use crate::Error;

/// For each object `b`, the points of `M(b, φ)` split into ordered pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundaryMatching {
    pub pairs: BTreeMap<u32, Vec<(u32, u32)>>,
}

/// Object-indexed support of a degree-`k` cochain.
fn support(cat: &FramedOneFlowCategory, k: i32, phi: &F2Vec) -> Vec<bool> {
    let mut s = vec![false; cat.objects.len()];
    let objs = cat.objects_in_degree(k);
    assert_eq!(
        phi.len(),
        objs.len(),
        "cochain length does not match degree {k}"
    );
    for p in phi.ones() {
        s[objs[p] as usize] = true;
    }
    s
}

/// A combinatorial boundary matching for the degree-`k` cochain `φ`.
/// Without a seed the elements of each `M(b, φ)` are sorted by (target,
/// point id) and paired consecutively; with a seed they are shuffled and
/// each pair is oriented at random.
pub fn boundary_matching(
    cat: &FramedOneFlowCategory,
    k: i32,
    phi: &F2Vec,
    seed: Option<u64>,
) -> Result<BoundaryMatching, Error> {
    let supp = support(cat, k, phi);
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut pairs = BTreeMap::new();
    for &b in cat.objects_in_degree(k + 1) {
        let mut elems: Vec<u32> = cat
            .out_points(b)
            .iter()
            .copied()
            .filter(|&p| supp[cat.points[p as usize].to as usize])
            .collect();
        if elems.is_empty() {
            continue;
        }
        if elems.len() % 2 == 1 {
            return Err(Error::Contract(format!(
                "φ is not a cocycle: |M(b, φ)| is odd at object {b}"
            )));
        }
        elems.sort_by_key(|&p| (cat.points[p as usize].to, p));
        if let Some(r) = rng.as_mut() {
            elems.shuffle(r);
        }
        let list = elems
            .chunks(2)
            .map(|c| {
                let swap = rng.as_mut().is_some_and(|r| r.gen_bool(0.5));
                if swap {
                    (c[1], c[0])
                } else {
                    (c[0], c[1])
                }
            })
            .collect();
        pairs.insert(b, list);
    }
    Ok(BoundaryMatching { pairs })
}

/// The special graph structure `Γ(a, φ)` for one object `a`.
#[derive(Clone, Debug, Default)]
pub struct SpecialGraphStructure {
    /// Vertices `(B, A)` as point ids.
    pub vertices: Vec<(u32, u32)>,
    pub signs: Vec<u8>,
    /// Interval edges with their framings.
    pub e_prime: Vec<(usize, usize, u8)>,
    /// Directed matching edges `(from, to)`.
    pub directed: Vec<(usize, usize)>,
    /// Undirected matching edges.
    pub undirected: Vec<(usize, usize)>,
    /// Number of loops (framing-0 circle components).
    pub loops: usize,
}

/// Builds `Γ(a, φ)` from a degree-`k` cochain, `|a| = k + 2`.
pub fn graph_structure(
    cat: &FramedOneFlowCategory,
    a: u32,
    k: i32,
    phi: &F2Vec,
    m: &BoundaryMatching,
) -> Result<SpecialGraphStructure, Error> {
    graph_from_support(cat, a, &support(cat, k, phi), m)
}

fn graph_from_support(
    cat: &FramedOneFlowCategory,
    a: u32,
    supp: &[bool],
    m: &BoundaryMatching,
) -> Result<SpecialGraphStructure, Error> {
    let mut g = SpecialGraphStructure::default();
    let mut index: HashMap<(u32, u32), usize> = HashMap::new();
    for &ai in cat.out_points(a) {
        let b = cat.points[ai as usize].to;
        let Some(pairs) = m.pairs.get(&b) else {
            continue;
        };
        for &(b1, b2) in pairs {
            for bi in [b1, b2] {
                index.insert((bi, ai), g.vertices.len());
                g.vertices.push((bi, ai));
                g.signs
                    .push(cat.points[bi as usize].sign ^ cat.points[ai as usize].sign);
            }
            let (s1, s2) = (cat.points[b1 as usize].sign, cat.points[b2 as usize].sign);
            let e = (index[&(b1, ai)], index[&(b2, ai)]);
            if s1 == s2 {
                g.directed.push(e);
            } else {
                g.undirected.push(e);
            }
        }
    }
    for (v, &(bi, ai)) in g.vertices.iter().enumerate() {
        let (iv, end) = cat.interval_with_end(bi, ai).ok_or_else(|| {
            Error::Internal(format!("broken path ({bi}, {ai}) bounds no interval"))
        })?;
        if end == 0 {
            let ivl = &cat.intervals[iv as usize];
            let w = *index
                .get(&ivl.ends[1])
                .ok_or_else(|| Error::Internal("interval end missing from graph".into()))?;
            g.e_prime.push((v, w, ivl.framing));
        }
    }
    g.loops = cat
        .circles
        .iter()
        .filter(|c| c.from == a && supp[c.to as usize] && c.framing == 0)
        .count();
    g.check()?;
    Ok(g)
}

impl SpecialGraphStructure {
    /// Checks the special graph structure conditions.
    pub fn check(&self) -> Result<(), Error> {
        let n = self.vertices.len();
        let mut ep = vec![0u8; n];
        let mut other = vec![0u8; n];
        for &(v, w, _) in &self.e_prime {
            ep[v] += 1;
            ep[w] += 1;
            if self.signs[v] == self.signs[w] {
                return Err(Error::Internal(
                    "interval edge joins vertices of equal sign".into(),
                ));
            }
        }
        for &(v, w) in &self.directed {
            other[v] += 1;
            other[w] += 1;
            if self.signs[v] != self.signs[w] {
                return Err(Error::Internal(
                    "directed edge joins vertices of opposite sign".into(),
                ));
            }
        }
        for &(v, w) in &self.undirected {
            other[v] += 1;
            other[w] += 1;
            if self.signs[v] == self.signs[w] {
                return Err(Error::Internal(
                    "undirected edge joins vertices of equal sign".into(),
                ));
            }
        }
        if (0..n).any(|v| ep[v] != 1 || other[v] != 1) {
            return Err(Error::Internal(
                "vertex not on exactly one interval and one matching edge".into(),
            ));
        }
        Ok(())
    }

    /// `|L| + Σ_C (1 + F(C) + D(C))` mod 2. `D(C)` is evaluated for both
    /// traversal directions; a disagreement is an error.
    pub fn value(&self) -> Result<u8, Error> {
        let n = self.vertices.len();
        let mut ep = vec![(usize::MAX, 0u8); n];
        for &(v, w, f) in &self.e_prime {
            ep[v] = (w, f);
            ep[w] = (v, f);
        }
        // Matching neighbour and edge orientation: 0 none, 1 outgoing, 2 incoming.
        let mut mt = vec![(usize::MAX, 0u8); n];
        for &(v, w) in &self.directed {
            mt[v] = (w, 1);
            mt[w] = (v, 2);
        }
        for &(v, w) in &self.undirected {
            mt[v] = (w, 0);
            mt[w] = (v, 0);
        }
        let mut seen = vec![false; n];
        let mut total = (self.loops & 1) as u8;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let (mut f, mut forward, mut directed) = (0u8, 0u32, 0u32);
            let mut v = start;
            loop {
                seen[v] = true;
                let (w, fr) = ep[v];
                f ^= fr;
                seen[w] = true;
                let (x, dir) = mt[w];
                if dir != 0 {
                    directed += 1;
                    if dir == 1 {
                        forward += 1;
                    }
                }
                v = x;
                if v == start {
                    break;
                }
            }
            let backward = directed - forward;
            if (forward ^ backward) & 1 != 0 {
                return Err(Error::Internal(
                    "D(C) depends on the traversal direction".into(),
                ));
            }
            total ^= 1 ^ f ^ (forward & 1) as u8;
        }
        Ok(total)
    }
}

/// The cochain `sq^φ` on degree `k + 2`.
pub fn sq_cochain(
    cat: &FramedOneFlowCategory,
    k: i32,
    phi: &F2Vec,
    m: &BoundaryMatching,
) -> Result<F2Vec, Error> {
    let supp = support(cat, k, phi);
    let top = cat.objects_in_degree(k + 2);
    let mut out = F2Vec::zeros(top.len());
    for (p, &a) in top.iter().enumerate() {
        if graph_from_support(cat, a, &supp, m)?.value()? == 1 {
            out.set(p, true);
        }
    }
    Ok(out)
}

/// F2 cohomology of a category in degree `k`.
pub fn f2_cohomology(cat: &FramedOneFlowCategory, k: i32) -> F2Cohomology {
    F2Cohomology::compute(
        cat.objects_in_degree(k).len(),
        &cat.coboundary_f2(k - 1),
        &cat.coboundary_f2(k),
    )
}

/// Matrix of `Sq²: H^k → H^{k+2}` in the canonical cohomology bases.
pub fn sq2_matrix(cat: &FramedOneFlowCategory, k: i32) -> Result<F2Matrix, Error> {
    sq2_matrix_with(
        cat,
        k,
        &f2_cohomology(cat, k),
        &f2_cohomology(cat, k + 2),
        None,
    )
}

/// `Sq²` with precomputed cohomology and an optional matching seed.
pub fn sq2_matrix_with(
    cat: &FramedOneFlowCategory,
    k: i32,
    src: &F2Cohomology,
    tgt: &F2Cohomology,
    seed: Option<u64>,
) -> Result<F2Matrix, Error> {
    let mut cols = Vec::with_capacity(src.dim());
    for phi in src.reps() {
        cols.push(sq_class(cat, k, phi, tgt, seed)?);
    }
    Ok(F2Matrix::from_columns(tgt.dim(), &cols))
}

/// Coordinates of `[sq^φ]` in the target basis.
pub fn sq_class(
    cat: &FramedOneFlowCategory,
    k: i32,
    phi: &F2Vec,
    tgt: &F2Cohomology,
    seed: Option<u64>,
) -> Result<F2Vec, Error> {
    let m = boundary_matching(cat, k, phi, seed)?;
    let s = sq_cochain(cat, k, phi, &m)?;
    tgt.coords(&s)
        .ok_or_else(|| Error::Internal(format!("sq^φ is not a cocycle in degree {}", k + 2)))
}

/// Matrix of the Bockstein `Sq¹: H^k → H^{k+1}` of an integral complex.
pub fn sq1_matrix(slice: &ComplexSlice, k: i32) -> Result<F2Matrix, Error> {
    let src = slice.f2_cohomology(k);
    let tgt = slice.f2_cohomology(k + 1);
    let d = slice.diff(k);
    let mut cols = Vec::with_capacity(src.dim());
    for z in src.reps() {
        let lift: Vec<i64> = (0..z.len()).map(|i| z.get(i) as i64).collect();
        let dz = d.apply(&lift);
        let mut y = F2Vec::zeros(dz.len());
        for (r, &v) in dz.iter().enumerate() {
            if v % 2 != 0 {
                return Err(Error::Internal(
                    "lift of an F2 cocycle has odd coboundary".into(),
                ));
            }
            if (v / 2) % 2 != 0 {
                y.set(r, true);
            }
        }
        cols.push(
            tgt.coords(&y)
                .ok_or_else(|| Error::Internal("Bockstein image is not a cocycle".into()))?,
        );
    }
    Ok(F2Matrix::from_columns(tgt.dim(), &cols))
}

/// The operations available in a [`SteenrodReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operation {
    /// `Sq²_ε` of the odd theory.
    Sq2Odd(u8),
    /// `Sq²` of the even theory.
    Sq2Even,
    /// Bockstein of odd integral Khovanov homology.
    Sq1Odd,
    /// Bockstein of even integral Khovanov homology.
    Sq1Even,
}

impl Operation {
    /// Short name used by the command line interface.
    pub fn name(&self) -> &'static str {
        match self {
            Operation::Sq2Odd(0) => "sq2e0",
            Operation::Sq2Odd(_) => "sq2e1",
            Operation::Sq2Even => "sq2even",
            Operation::Sq1Odd => "sq1odd",
            Operation::Sq1Even => "sq1even",
        }
    }

    /// Homological degree shift.
    pub fn degree(&self) -> i32 {
        match self {
            Operation::Sq2Odd(_) | Operation::Sq2Even => 2,
            Operation::Sq1Odd | Operation::Sq1Even => 1,
        }
    }
}

/// One matrix of a report: the operation `H^{i,j} → H^{i+deg,j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteenrodEntry {
    pub i: i32,
    pub j: i32,
    pub rank: usize,
    pub matrix: F2Matrix,
}

/// An operation evaluated on every bidegree where source and target are
/// both nonzero (all other matrices vanish).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteenrodReport {
    pub op: Operation,
    pub entries: Vec<SteenrodEntry>,
}

impl SteenrodReport {
    pub fn entry(&self, i: i32, j: i32) -> Option<&SteenrodEntry> {
        self.entries.iter().find(|e| e.i == i && e.j == j)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.rank == 0)
    }
}

/// Options for building covers in reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReportOptions {
    pub delta: u8,
    pub table: FramingTable,
    /// Restrict to one q-degree.
    pub only_q: Option<i32>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            delta: 0,
            table: FramingTable::Standard,
            only_q: None,
        }
    }
}

/// F2 cohomology dimensions of the unreduced complex per `(i, j)`.
pub fn f2_dims(oc: &OddCube, only_q: Option<i32>) -> Result<BTreeMap<(i32, i32), usize>, Error> {
    Ok(build_complex_window(oc, Theory::Even, Reduction::Unreduced, only_q, None)?.f2_dims())
}

/// F2 cohomology dimensions of the unreduced complex for homological
/// degrees inside `window`; the outermost degrees are not meaningful.
pub fn f2_dims_window(
    oc: &OddCube,
    window: (i32, i32),
) -> Result<BTreeMap<(i32, i32), usize>, Error> {
    let mut dims =
        build_complex_window(oc, Theory::Even, Reduction::Unreduced, None, Some(window))?.f2_dims();
    dims.retain(|&(i, _), _| i > window.0 && i < window.1);
    Ok(dims)
}

/// Evaluates an operation on the unreduced complex of a decorated cube.
pub fn steenrod_report(
    oc: &OddCube,
    op: Operation,
    opts: ReportOptions,
) -> Result<SteenrodReport, Error> {
    let dims = f2_dims(oc, opts.only_q)?;
    steenrod_report_with_dims(oc, op, opts, &dims)
}

/// As [`steenrod_report`] with precomputed F2 dimensions.
pub fn steenrod_report_with_dims(
    oc: &OddCube,
    op: Operation,
    opts: ReportOptions,
    dims: &BTreeMap<(i32, i32), usize>,
) -> Result<SteenrodReport, Error> {
    let deg = op.degree();
    let mut targets: BTreeMap<i32, Vec<i32>> = BTreeMap::new();
    for &(i, j) in dims.keys() {
        if opts.only_q.is_none_or(|q| q == j) && dims.contains_key(&(i + deg, j)) {
            targets.entry(j).or_default().push(i);
        }
    }
    let mut entries = Vec::new();
    for (j, is) in targets {
        let window = (is[0] - 1, is[is.len() - 1] + deg + 1);
        match op {
            Operation::Sq1Odd | Operation::Sq1Even => {
                let theory = if op == Operation::Sq1Odd {
                    Theory::Odd
                } else {
                    Theory::Even
                };
                let c =
                    build_complex_window(oc, theory, Reduction::Unreduced, Some(j), Some(window))?;
                let Some(sl) = c.slice(j) else { continue };
                for &i in &is {
                    let m = sq1_matrix(sl, i)?;
                    entries.push(SteenrodEntry {
                        i,
                        j,
                        rank: m.rank(),
                        matrix: m,
                    });
                }
            }
            Operation::Sq2Odd(_) | Operation::Sq2Even => {
                let eps = if let Operation::Sq2Odd(e) = op { e } else { 0 };
                let params = CoverParams {
                    delta: opts.delta,
                    epsilon: eps,
                    variant: if op == Operation::Sq2Even {
                        Variant::Even
                    } else {
                        Variant::Odd
                    },
                    table: opts.table,
                };
                let cat = build_cover(oc, j, Some(window), params)?;
                for &i in &is {
                    let m = sq2_matrix(&cat, i)?;
                    entries.push(SteenrodEntry {
                        i,
                        j,
                        rank: m.rank(),
                        matrix: m,
                    });
                }
            }
        }
    }
    Ok(SteenrodReport { op, entries })
}

/// Cochain-level images of a basis of `H^{i,j}` under an operation: the
/// cocycles `sq^φ` (or Bockstein lifts) in degree `i + deg` of q-slice `j`,
/// indexed like the unreduced complex. Empty when the source vanishes.
pub fn image_cocycles(
    oc: &OddCube,
    op: Operation,
    i: i32,
    j: i32,
    opts: ReportOptions,
) -> Result<Vec<F2Vec>, Error> {
    let deg = op.degree();
    let window = (i - 1, i + deg + 1);
    match op {
        Operation::Sq1Odd | Operation::Sq1Even => {
            let theory = if op == Operation::Sq1Odd {
                Theory::Odd
            } else {
                Theory::Even
            };
            let c = build_complex_window(oc, theory, Reduction::Unreduced, Some(j), Some(window))?;
            let Some(sl) = c.slice(j) else {
                return Ok(Vec::new());
            };
            let d = sl.diff(i);
            let mut out = Vec::new();
            for z in sl.f2_cohomology(i).reps() {
                let lift: Vec<i64> = (0..z.len()).map(|r| z.get(r) as i64).collect();
                let bits: Vec<bool> = d.apply(&lift).iter().map(|&v| (v / 2) % 2 != 0).collect();
                out.push(F2Vec::from_bools(&bits));
            }
            Ok(out)
        }
        Operation::Sq2Odd(_) | Operation::Sq2Even => {
            let eps = if let Operation::Sq2Odd(e) = op { e } else { 0 };
            let variant = if op == Operation::Sq2Even {
                Variant::Even
            } else {
                Variant::Odd
            };
            let params = CoverParams {
                delta: opts.delta,
                epsilon: eps,
                variant,
                table: opts.table,
            };
            let cat = build_cover(oc, j, Some(window), params)?;
            let mut out = Vec::new();
            for phi in f2_cohomology(&cat, i).reps() {
                let m = boundary_matching(&cat, i, phi, None)?;
                out.push(sq_cochain(&cat, i, phi, &m)?);
            }
            Ok(out)
        }
    }
}

/// A Chang-word summary of a q-slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChangWord {
    /// `Sq²` vanishes on the slice.
    None,
    Eta,
    /// `_2η`: `Sq¹(x) ≠ 0` for every `x` with `Sq²(x) ≠ 0`.
    TwoEta,
    /// `η2`: the image of `Sq²` lies in the image of `Sq¹`.
    EtaTwo,
    TwoEtaTwo,
    /// `Sq²` has rank above one or is nonzero in several degrees.
    Wide,
}

impl fmt::Display for ChangWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChangWord::None => "",
            ChangWord::Eta => "η",
            ChangWord::TwoEta => "_2η",
            ChangWord::EtaTwo => "η2",
            ChangWord::TwoEtaTwo => "_2η2",
            ChangWord::Wide => "wide",
        })
    }
}

/// Classifies `Sq²: H^i → H^{i+2}` against `Sq¹` out of `H^i`
/// (`sq1_low`) and out of `H^{i+1}` (`sq1_high`).
pub fn chang_word(sq2: &F2Matrix, sq1_low: &F2Matrix, sq1_high: &F2Matrix) -> ChangWord {
    let r = sq2.rank();
    if r == 0 {
        return ChangWord::None;
    }
    if r > 1 {
        return ChangWord::Wide;
    }
    // ker Sq¹ ⊆ ker Sq² iff the rows of Sq² lie in the row space of Sq¹.
    let prefix = sq1_low.vstack(sq2).rank() == sq1_low.rank();
    // Im Sq² ⊆ Im Sq¹.
    let suffix = sq1_high.hstack(sq2).rank() == sq1_high.rank();
    match (prefix, suffix) {
        (false, false) => ChangWord::Eta,
        (true, false) => ChangWord::TwoEta,
        (false, true) => ChangWord::EtaTwo,
        (true, true) => ChangWord::TwoEtaTwo,
    }
}

/// The Chang word of q-slice `j` from an `Sq²` report and the matching
/// `Sq¹` report, with `dims` the F2 cohomology dimensions.
pub fn slice_chang_word(
    sq2: &SteenrodReport,
    sq1: &SteenrodReport,
    dims: &BTreeMap<(i32, i32), usize>,
    j: i32,
) -> ChangWord {
    let nonzero: Vec<&SteenrodEntry> = sq2
        .entries
        .iter()
        .filter(|e| e.j == j && e.rank > 0)
        .collect();
    match nonzero.as_slice() {
        [] => ChangWord::None,
        [e] => {
            let dim = |i: i32| dims.get(&(i, j)).copied().unwrap_or(0);
            let (i, d0, d1, d2) = (e.i, dim(e.i), dim(e.i + 1), dim(e.i + 2));
            let low = sq1
                .entry(i, j)
                .map_or_else(|| F2Matrix::zeros(d1, d0), |x| x.matrix.clone());
            let high = sq1
                .entry(i + 1, j)
                .map_or_else(|| F2Matrix::zeros(d2, d1), |x| x.matrix.clone());
            chang_word(&e.matrix, &low, &high)
        }
        _ => ChangWord::Wide,
    }
}

/// Chang words of all three second Steenrod squares for one diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChangTable {
    /// `(j, even, ε = 0, ε = 1)` for every q-degree where any word is nonempty.
    pub rows: Vec<(i32, ChangWord, ChangWord, ChangWord)>,
}

/// Computes [`ChangTable`]; odd squares are paired with the odd Bockstein
/// and the even square with the even Bockstein.
pub fn chang_table(oc: &OddCube, opts: ReportOptions) -> Result<ChangTable, Error> {
    let dims = f2_dims(oc, opts.only_q)?;
    let rep = |op| steenrod_report_with_dims(oc, op, opts, &dims);
    let (even, e0, e1) = (
        rep(Operation::Sq2Even)?,
        rep(Operation::Sq2Odd(0))?,
        rep(Operation::Sq2Odd(1))?,
    );
    let (b_even, b_odd) = (rep(Operation::Sq1Even)?, rep(Operation::Sq1Odd)?);
    let mut js: Vec<i32> = even
        .entries
        .iter()
        .chain(&e0.entries)
        .chain(&e1.entries)
        .map(|e| e.j)
        .collect();
    js.sort_unstable();
    js.dedup();
    let mut rows = Vec::new();
    for j in js {
        let w = (
            slice_chang_word(&even, &b_even, &dims, j),
            slice_chang_word(&e0, &b_odd, &dims, j),
            slice_chang_word(&e1, &b_odd, &dims, j),
        );
        if w != (ChangWord::None, ChangWord::None, ChangWord::None) {
            rows.push((j, w.0, w.1, w.2));
        }
    }
    Ok(ChangTable { rows })
}
