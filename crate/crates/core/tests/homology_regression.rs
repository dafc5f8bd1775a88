//! Regression of integral odd (reduced) and even (unreduced) Khovanov
//! homology against tabulated values for small knots.

mod common;

use oddkh::knottable;
use oddkh::oddcomplex::{build_complex, check_d_squared, Choices, OddCube, Reduction, Theory};

fn check_upto(max_crossings: usize) {
    let refs = common::references();
    let table = knottable::bundled();
    let mut checked = 0;
    for r in refs.iter() {
        let e = table.iter().find(|e| e.name == r.name).unwrap();
        if e.crossing_number().unwrap() > max_crossings {
            continue;
        }
        let d = e.diagram().unwrap();
        let oc = OddCube::new(&d, &Choices::standard()).unwrap();
        let odd = build_complex(&oc, Theory::Odd, Reduction::Reduced).unwrap();
        check_d_squared(&odd).unwrap();
        assert_eq!(
            odd.integral().unwrap(),
            r.odd_reduced,
            "odd reduced homology of {}",
            r.name
        );
        let even = build_complex(&oc, Theory::Even, Reduction::Unreduced).unwrap();
        assert_eq!(
            even.integral().unwrap(),
            r.even_unreduced,
            "even homology of {}",
            r.name
        );
        checked += 1;
    }
    assert!(checked > 0);
}

#[test]
fn integral_homology_up_to_ten_crossings() {
    check_upto(10);
}
