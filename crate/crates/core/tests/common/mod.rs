//! Shared helpers for integration tests: reference data loading.
#![allow(dead_code)]

use oddkh::exactla::AbelianGroup;
use std::collections::BTreeMap;

pub const KHOVANOV_TSV: &str = include_str!("../data/khovanov.tsv");
pub const KNOTS11_TSV: &str = include_str!("../data/knots11.tsv");

/// Reference row: Rasmussen s, reduced odd and unreduced even integral homology.
pub struct Reference {
    pub name: String,
    pub s: i32,
    pub odd_reduced: BTreeMap<(i32, i32), AbelianGroup>,
    pub even_unreduced: BTreeMap<(i32, i32), AbelianGroup>,
}

fn exponent(tok: &str, var: &str) -> Option<i32> {
    let rest = tok.strip_prefix(var)?;
    if rest.is_empty() {
        return Some(1);
    }
    let inner = rest.strip_prefix("^(")?.strip_suffix(')')?;
    inner.parse().ok()
}

/// Parses `c*t^(a)*q^(b)*T^(m) + …` into groups per `(a, b)`.
pub fn parse_poly(text: &str) -> BTreeMap<(i32, i32), AbelianGroup> {
    let mut out: BTreeMap<(i32, i32), AbelianGroup> = BTreeMap::new();
    for term in text.split('+').filter(|t| !t.is_empty()) {
        let (mut c, mut a, mut b, mut m) = (1u64, 0i32, 0i32, 0u64);
        for f in term.split('*') {
            if let Some(e) = exponent(f, "t") {
                a = e;
            } else if let Some(e) = exponent(f, "q") {
                b = e;
            } else if let Some(e) = exponent(f, "T") {
                m = e as u64;
            } else {
                c = f
                    .parse()
                    .unwrap_or_else(|_| panic!("bad factor {f} in {text}"));
            }
        }
        let g = out.entry((a, b)).or_default();
        if m == 0 {
            g.free += c as usize;
        } else {
            for _ in 0..c {
                g.torsion.push(m);
            }
            g.torsion.sort();
        }
    }
    out.into_iter().map(|(k, g)| (k, g.normalized())).collect()
}

pub fn references() -> Vec<Reference> {
    KHOVANOV_TSV
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            Reference {
                name: f[0].to_string(),
                s: f[1].parse().unwrap(),
                odd_reduced: parse_poly(f[2]),
                even_unreduced: parse_poly(f[3]),
            }
        })
        .collect()
}

/// F2 dimensions implied by integral cohomology (universal coefficients:
/// `Z/2^k` in degree `i` contributes to degrees `i` and `i − 1`).
pub fn f2_dims_from_integral(
    g: &BTreeMap<(i32, i32), AbelianGroup>,
) -> BTreeMap<(i32, i32), usize> {
    let mut out: BTreeMap<(i32, i32), usize> = BTreeMap::new();
    for (&(i, q), grp) in g {
        *out.entry((i, q)).or_default() += grp.free;
        for &t in &grp.torsion {
            if t % 2 == 0 {
                *out.entry((i, q)).or_default() += 1;
                *out.entry((i - 1, q)).or_default() += 1;
            }
        }
    }
    out.retain(|_, v| *v > 0);
    out
}
