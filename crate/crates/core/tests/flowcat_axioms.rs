//! Signed covers of the odd Khovanov cube: axioms, fault injection, sign
//! changes, and agreement of the cochain complex with the direct build.

use oddkh::flowcat::{
    build_cover, cochain_complex, CoverParams, FramedOneFlowCategory, FramingTable, Variant,
};
use oddkh::knottable;
use oddkh::oddcomplex::{build_complex_window, Choices, OddCube, Reduction, Theory};

fn q_range(oc: &OddCube) -> Vec<i32> {
    let c = build_complex_window(oc, Theory::Even, Reduction::Unreduced, None, None).unwrap();
    c.slices.keys().copied().collect()
}

fn all_params() -> Vec<CoverParams> {
    let mut v = Vec::new();
    for variant in [Variant::Odd, Variant::Even] {
        for delta in 0..2 {
            for epsilon in 0..2 {
                for table in [FramingTable::Standard, FramingTable::Alternative] {
                    v.push(CoverParams {
                        delta,
                        epsilon,
                        variant,
                        table,
                    });
                }
            }
        }
    }
    v
}

#[test]
fn covers_validate_on_small_knots() {
    for name in ["3_1", "4_1", "5_2", "6_2", "8_19", "T2_3+T2_3"] {
        let d = knottable::lookup(name).unwrap();
        for seed in 0..3u64 {
            let ch = if seed == 0 {
                Choices::standard()
            } else {
                Choices::random(d.n(), seed)
            };
            let oc = OddCube::new(&d, &ch).unwrap();
            for q in q_range(&oc) {
                for p in all_params() {
                    if p.table == FramingTable::Alternative && p.delta == 1 {
                        continue;
                    }
                    let cat = build_cover(&oc, q, None, p).unwrap();
                    assert!(cat.circles.is_empty());
                    let rep = cat.validate();
                    assert!(rep.is_ok(), "{name} seed={seed} q={q} {p:?}: {rep:?}");
                }
            }
        }
    }
}

#[test]
fn even_cover_ignores_epsilon() {
    let d = knottable::lookup("8_19").unwrap();
    let oc = OddCube::new(&d, &Choices::random(d.n(), 3)).unwrap();
    for q in q_range(&oc) {
        let a = build_cover(
            &oc,
            q,
            None,
            CoverParams {
                epsilon: 0,
                ..CoverParams::even()
            },
        )
        .unwrap();
        let b = build_cover(
            &oc,
            q,
            None,
            CoverParams {
                epsilon: 1,
                ..CoverParams::even()
            },
        )
        .unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.intervals, b.intervals);
    }
}

#[test]
fn cochain_complex_matches_direct_build() {
    for name in ["3_1", "m3_1", "6_3", "8_19"] {
        let d = knottable::lookup(name).unwrap();
        let oc = OddCube::new(&d, &Choices::random(d.n(), 11)).unwrap();
        for (variant, theory) in [(Variant::Odd, Theory::Odd), (Variant::Even, Theory::Even)] {
            let direct =
                build_complex_window(&oc, theory, Reduction::Unreduced, None, None).unwrap();
            for (&q, sl) in &direct.slices {
                let cat = build_cover(
                    &oc,
                    q,
                    None,
                    CoverParams {
                        variant,
                        ..CoverParams::odd(0)
                    },
                )
                .unwrap();
                let cc = cochain_complex(&cat);
                let mine = &cc[&q];
                for (i, m) in &sl.d {
                    assert_eq!(
                        mine.diff(*i).to_int_matrix(),
                        m.to_int_matrix(),
                        "{name} q={q} i={i}"
                    );
                }
            }
        }
    }
}

fn trefoil_cat(q: i32) -> FramedOneFlowCategory {
    let d = knottable::lookup("3_1").unwrap();
    let oc = OddCube::new(&d, &Choices::standard()).unwrap();
    build_cover(&oc, q, None, CoverParams::odd(0)).unwrap()
}

#[test]
fn flipped_framing_is_reported() {
    let d = knottable::lookup("8_19").unwrap();
    let oc = OddCube::new(&d, &Choices::standard()).unwrap();
    let cat = build_cover(&oc, 11, None, CoverParams::odd(0)).unwrap();
    let mut bad = cat.clone();
    let k = bad.intervals.len() / 2;
    bad.intervals[k].framing ^= 1;
    let rep = bad.validate();
    assert!(rep.sign.is_empty() && rep.unmatched_paths.is_empty());
    let (a, c) = (bad.intervals[k].from, bad.intervals[k].to);
    // Each violation involves the flipped interval as a top or bottom piece.
    assert!(!rep.compatibility.is_empty());
    for &(x, y) in &rep.compatibility {
        let involves = x == a || y == c;
        assert!(involves, "unexpected violation {x}->{y}");
    }
}

#[test]
fn flipped_point_sign_is_reported() {
    let cat = trefoil_cat(5);
    assert!(!cat.intervals.is_empty());
    let mut bad = cat.clone();
    let (b, _) = bad.intervals[0].ends[0];
    bad.points[b as usize].sign ^= 1;
    let rep = bad.validate();
    assert!(rep.sign.contains(&0));
}

#[test]
fn sign_change_is_an_involution_and_valid() {
    let d = knottable::lookup("8_19").unwrap();
    let oc = OddCube::new(&d, &Choices::standard()).unwrap();
    for eps in 0..2 {
        let cat = build_cover(&oc, 11, None, CoverParams::odd(eps)).unwrap();
        for x in (0..cat.objects.len() as u32).step_by(7) {
            let once = cat.sign_change_at(x).unwrap();
            assert!(once.validate().is_ok(), "x={x}");
            let twice = once.sign_change_at(x).unwrap();
            assert_eq!(twice.points, cat.points);
            assert_eq!(twice.intervals, cat.intervals, "x={x}");
        }
    }
}
