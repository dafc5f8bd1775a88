//! The cube category `2^n`: vertices, sub-cubes, cochains, sign and frame
//! assignments, and the two framing-change tables.
//!
//! A vertex is a bitmask: bit `i` holds coordinate `i` (zero-based). A
//! `k`-dimensional sub-cube is identified by its top vertex and the set of
//! `k` coordinates along which it extends downwards.

use crate::Error;

/// A vertex of `{0,1}^n`, bit `i` = coordinate `i`.
pub type Vertex = u32;

/// Homological grading `|u|`.
#[inline]
pub fn weight(u: Vertex) -> u32 {
    u.count_ones()
}

/// Mask of the coordinates strictly below `i`.
#[inline]
pub fn below(i: usize) -> u32 {
    (1u32 << i) - 1
}

/// A sub-cube `C_{top,bottom}` with `top ≥ bottom`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubCube {
    pub top: Vertex,
    pub bottom: Vertex,
}

impl SubCube {
    pub fn new(top: Vertex, bottom: Vertex) -> Self {
        assert_eq!(top & bottom, bottom, "top must dominate bottom");
        SubCube { top, bottom }
    }

    /// Sub-cube from its top vertex and direction set.
    pub fn from_dirs(top: Vertex, dirs: u32) -> Self {
        debug_assert_eq!(top & dirs, dirs);
        SubCube {
            top,
            bottom: top & !dirs,
        }
    }

    pub fn dirs(&self) -> u32 {
        self.top ^ self.bottom
    }

    pub fn dim(&self) -> u32 {
        self.dirs().count_ones()
    }
}

fn reverse_bits(u: Vertex, n: usize) -> u32 {
    if n == 0 {
        0
    } else {
        u.reverse_bits() >> (32 - n)
    }
}

/// All `k`-dimensional sub-cubes of `2^n`, ordered lexicographically on
/// `(bottom, top)` read as coordinate sequences `(u_1, …, u_n)`.
pub fn enumerate_subcubes(n: usize, k: usize) -> Vec<SubCube> {
    assert!(k <= n && n <= 24);
    let mut out = Vec::new();
    for dirs in subsets_of_size(n, k) {
        for rest in 0..(1u32 << n) {
            if rest & dirs == 0 {
                out.push(SubCube::from_dirs(rest | dirs, dirs));
            }
        }
    }
    out.sort_by_key(|c| (reverse_bits(c.bottom, n), reverse_bits(c.top, n)));
    out
}

/// All `k`-element subsets of `{0, …, n−1}` as masks, in increasing order.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<u32> {
    (0..(1u32 << n))
        .filter(|m| m.count_ones() as usize == k)
        .collect()
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// An F2-valued cochain on the `k`-dimensional sub-cubes of `2^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    n: usize,
    k: usize,
    /// Rank of each direction mask among the masks of equal size.
    rank: std::sync::Arc<Vec<u32>>,
    stride: usize,
    values: Vec<u8>,
}

impl Cochain {
    pub fn zero(n: usize, k: usize) -> Self {
        assert!(k <= n && n <= 20, "cube dimension out of supported range");
        let mut rank = vec![0u32; 1 << n];
        let mut counters = vec![0u32; n + 1];
        for (m, r) in rank.iter_mut().enumerate() {
            let c = (m as u32).count_ones() as usize;
            *r = counters[c];
            counters[c] += 1;
        }
        let stride = binomial(n, k);
        Cochain {
            n,
            k,
            rank: std::sync::Arc::new(rank),
            stride,
            values: vec![0; stride << n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    fn index(&self, top: Vertex, dirs: u32) -> usize {
        debug_assert_eq!(dirs.count_ones() as usize, self.k);
        debug_assert_eq!(top & dirs, dirs);
        top as usize * self.stride + self.rank[dirs as usize] as usize
    }

    #[inline]
    pub fn get_dirs(&self, top: Vertex, dirs: u32) -> u8 {
        self.values[self.index(top, dirs)]
    }

    #[inline]
    pub fn set_dirs(&mut self, top: Vertex, dirs: u32, x: u8) {
        let i = self.index(top, dirs);
        self.values[i] = x & 1;
    }

    pub fn get(&self, c: SubCube) -> u8 {
        self.get_dirs(c.top, c.dirs())
    }

    pub fn set(&mut self, c: SubCube, x: u8) {
        self.set_dirs(c.top, c.dirs(), x)
    }

    /// Value on the edge `top → top − e_i`.
    #[inline]
    pub fn edge(&self, top: Vertex, i: usize) -> u8 {
        self.get_dirs(top, 1 << i)
    }

    #[inline]
    pub fn set_edge(&mut self, top: Vertex, i: usize, x: u8) {
        self.set_dirs(top, 1 << i, x)
    }

    /// Value on the face with top `top` and directions `i ≠ j`.
    #[inline]
    pub fn face(&self, top: Vertex, i: usize, j: usize) -> u8 {
        self.get_dirs(top, (1 << i) | (1 << j))
    }

    #[inline]
    pub fn set_face(&mut self, top: Vertex, i: usize, j: usize, x: u8) {
        self.set_dirs(top, (1 << i) | (1 << j), x)
    }

    /// Iterates over the sub-cubes of this cochain's dimension.
    pub fn cells(&self) -> impl Iterator<Item = SubCube> + '_ {
        let dirs_list = subsets_of_size(self.n, self.k);
        (0..(1u32 << self.n)).flat_map(move |top| {
            dirs_list
                .clone()
                .into_iter()
                .filter(move |&d| top & d == d)
                .map(move |d| SubCube::from_dirs(top, d))
        })
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        assert_eq!((self.n, self.k), (other.n, other.k));
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a ^= *b;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&x| x == 0)
    }
}

/// Cellular coboundary of the cube `[0,1]^n` over F2.
pub fn coboundary(c: &Cochain) -> Cochain {
    let (n, k) = (c.n, c.k);
    let mut out = Cochain::zero(n, (k + 1).min(n));
    if k >= n {
        return out;
    }
    let dirs_list = subsets_of_size(n, k + 1);
    for top in 0..(1u32 << n) {
        for &dirs in dirs_list.iter().filter(|&&d| top & d == d) {
            let mut acc = 0u8;
            let mut rest = dirs;
            while rest != 0 {
                let d = rest & rest.wrapping_neg();
                rest ^= d;
                acc ^= c.get_dirs(top, dirs ^ d) ^ c.get_dirs(top ^ d, dirs ^ d);
            }
            out.set_dirs(top, dirs, acc);
        }
    }
    out
}

/// The standard sign assignment `s*(C_{u,v}) = Σ_{j<i} v_j`.
pub fn standard_sign(n: usize) -> Cochain {
    let mut s = Cochain::zero(n, 1.min(n));
    if n == 0 {
        return s;
    }
    for u in 0..(1u32 << n) {
        for i in (0..n).filter(|&i| u >> i & 1 == 1) {
            s.set_edge(u, i, ((u & below(i)).count_ones() & 1) as u8);
        }
    }
    s
}

/// The standard frame assignment
/// `f*(C_{u,w}) = (w_1+…+w_{i−1})(w_{i+1}+…+w_{j−1})`.
pub fn standard_frame(n: usize) -> Cochain {
    let mut f = Cochain::zero(n, 2.min(n));
    if n < 2 {
        return f;
    }
    for u in 0..(1u32 << n) {
        for j in 0..n {
            for i in 0..j {
                if u >> i & 1 == 1 && u >> j & 1 == 1 {
                    let x = (u & below(i)).count_ones() & 1;
                    let y = (u & below(j) & !below(i + 1)).count_ones() & 1;
                    f.set_face(u, i, j, (x & y) as u8);
                }
            }
        }
    }
    f
}

/// Whether `δs = 1` on every 2-face.
pub fn is_sign_assignment(s: &Cochain) -> bool {
    if s.n < 2 {
        return true;
    }
    let d = coboundary(s);
    let ok = d.cells().all(|c| d.get(c) == 1);
    ok
}

/// Whether `δf(C_{u,x}) = s(C_{w1,x}) + s(C_{w2,x}) + s(C_{w3,x})` on every 3-cube.
pub fn is_frame_assignment(s: &Cochain, f: &Cochain) -> bool {
    frame_violations(s, f).is_empty()
}

/// The 3-cubes on which the compatibility condition fails.
pub fn frame_violations(s: &Cochain, f: &Cochain) -> Vec<SubCube> {
    let n = s.n;
    if n < 3 {
        return Vec::new();
    }
    let df = coboundary(f);
    let mut bad = Vec::new();
    for c in df.cells() {
        let x = c.bottom;
        let mut rhs = 0u8;
        let mut rest = c.dirs();
        while rest != 0 {
            let d = rest & rest.wrapping_neg();
            rest ^= d;
            rhs ^= s.edge(x | d, d.trailing_zeros() as usize);
        }
        if df.get(c) != rhs {
            bad.push(c);
        }
    }
    bad
}

/// The four edge values of a 2-face in the square layout
/// `a = s(v1→w)`, `b = s(v2→w)`, `c = s(u→v2)`, `d = s(u→v1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FaceSignQuad {
    pub a: u8,
    pub b: u8,
    pub c: u8,
    pub d: u8,
}

impl FaceSignQuad {
    pub fn new(a: u8, b: u8, c: u8, d: u8) -> Self {
        FaceSignQuad {
            a: a & 1,
            b: b & 1,
            c: c & 1,
            d: d & 1,
        }
    }

    pub fn sum(&self) -> u8 {
        (self.a + self.b + self.c + self.d) & 1
    }
}

/// The quad of `s` on the face with top `u` and directions `i < j`, taking
/// `v1 = u − e_i` and `v2 = u − e_j`.
pub fn face_quad(s: &Cochain, u: Vertex, i: usize, j: usize) -> FaceSignQuad {
    let (v1, v2) = (u & !(1 << i), u & !(1 << j));
    FaceSignQuad::new(s.edge(v1, j), s.edge(v2, i), s.edge(u, j), s.edge(u, i))
}

fn diff_pattern(old: FaceSignQuad, new: FaceSignQuad) -> Result<[bool; 4], Error> {
    if old.sum() != 1 || new.sum() != 1 {
        return Err(Error::InvalidSigns("face quad does not sum to 1".into()));
    }
    let p = [
        old.a != new.a,
        old.b != new.b,
        old.c != new.c,
        old.d != new.d,
    ];
    if p.iter().filter(|&&x| x).count() % 2 == 1 {
        return Err(Error::InvalidSigns(
            "odd number of differing face signs".into(),
        ));
    }
    Ok(p)
}

/// The framing-change table: new face framing after changing the signs of
/// the face from `old` to `new`, with parameters `δ` and `ε`.
pub fn frame_change(
    f: u8,
    old: FaceSignQuad,
    new: FaceSignQuad,
    delta: u8,
    eps: u8,
) -> Result<u8, Error> {
    let FaceSignQuad { a, b, c, d } = old;
    let add = match diff_pattern(old, new)? {
        [false, false, false, false] => 0,
        [true, true, false, false] => 1,
        [false, false, true, true] => c + d,
        [true, false, false, true] => delta + a,
        [false, true, true, false] => delta + b,
        [true, false, true, false] => delta + eps + b,
        [false, true, false, true] => delta + eps + a,
        [true, true, true, true] => a + b,
        _ => unreachable!("odd patterns rejected above"),
    };
    Ok((f + add) & 1)
}

/// The alternative framing-change table.
pub fn alt_frame_change(f: u8, old: FaceSignQuad, new: FaceSignQuad, eps: u8) -> Result<u8, Error> {
    let FaceSignQuad { c, d, .. } = old;
    let add = match diff_pattern(old, new)? {
        [false, false, false, false] => 0,
        [true, true, false, false] => c + d,
        [false, false, true, true] => 0,
        [true, false, false, true] => d,
        [false, true, true, false] => c,
        [true, false, true, false] => eps + d,
        [false, true, false, true] => eps + c,
        [true, true, true, true] => c + d,
        _ => unreachable!("odd patterns rejected above"),
    };
    Ok((f + add) & 1)
}

/// Applies `frame_change` face-wise to move a framing of `s_old` to `s_new`.
pub fn change_frame_assignment(
    s_old: &Cochain,
    f: &Cochain,
    s_new: &Cochain,
    delta: u8,
    eps: u8,
) -> Result<Cochain, Error> {
    let mut out = f.clone();
    for face in f.cells() {
        let dirs = face.dirs();
        let i = dirs.trailing_zeros() as usize;
        let j = 31 - dirs.leading_zeros() as usize;
        let old = face_quad(s_old, face.top, i, j);
        let new = face_quad(s_new, face.top, i, j);
        out.set(face, frame_change(f.get(face), old, new, delta, eps)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(bits: &[u8]) -> Vertex {
        bits.iter().enumerate().map(|(i, &b)| (b as u32) << i).sum()
    }

    #[test]
    fn subcube_counts() {
        assert_eq!(enumerate_subcubes(2, 2).len(), 1);
        assert_eq!(enumerate_subcubes(3, 1).len(), 12);
        assert_eq!(enumerate_subcubes(3, 2).len(), 6);
        assert_eq!(enumerate_subcubes(0, 0).len(), 1);
    }

    #[test]
    fn standard_sign_examples() {
        let s = standard_sign(3);
        assert_eq!(s.get(SubCube::new(v(&[1, 0, 1]), v(&[1, 0, 0]))), 1);
        let s1 = standard_sign(1);
        assert_eq!(s1.edge(1, 0), 0);
        let s2 = standard_sign(2);
        assert_eq!(s2.get(SubCube::new(v(&[1, 1]), v(&[0, 1]))), 0);
    }

    #[test]
    fn standard_frame_examples() {
        let f = standard_frame(4);
        assert_eq!(f.get(SubCube::new(v(&[1, 1, 0, 1]), v(&[0, 1, 0, 0]))), 0);
        assert_eq!(standard_frame(2).face(3, 0, 1), 0);
        let f3 = standard_frame(3);
        assert_eq!(f3.get(SubCube::new(v(&[0, 1, 1]), 0)), 0);
        assert_eq!(f3.get(SubCube::new(v(&[1, 1, 0]), 0)), 0);
    }

    #[test]
    fn coboundary_examples() {
        assert!(coboundary(&Cochain::zero(3, 1)).is_zero());
        let mut c = Cochain::zero(1, 0);
        c.set_dirs(1, 0, 1);
        assert_eq!(coboundary(&c).edge(1, 0), 1);
        assert_eq!(coboundary(&standard_sign(2)).face(3, 0, 1), 1);
    }

    #[test]
    fn frame_change_rows() {
        let q = FaceSignQuad::new;
        let old = q(1, 0, 0, 0);
        assert_eq!(frame_change(0, old, old, 0, 0).unwrap(), 0);
        assert_eq!(frame_change(0, old, q(0, 1, 0, 0), 0, 0).unwrap(), 1);
        // a,d differ with δ = 0, a = 1: f + δ + a = f + 1.
        assert_eq!(frame_change(0, old, q(0, 0, 0, 1), 0, 1).unwrap(), 1);
        assert!(frame_change(0, old, q(0, 0, 0, 0), 0, 0).is_err());
        assert_eq!(alt_frame_change(0, old, old, 0).unwrap(), 0);
        let o2 = q(1, 0, 1, 1);
        assert_eq!(alt_frame_change(0, o2, q(0, 1, 1, 1), 0).unwrap(), 0);
        assert_eq!(alt_frame_change(0, o2, q(1, 0, 0, 0), 0).unwrap(), 0);
    }
}
