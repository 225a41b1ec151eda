use std::sync::Arc;

use proptest::prelude::*;
use snb_core::graded::{parse, rat, random_homogeneous, GradedSpace, Side, Supernumber};
use snb_core::laws::GradedValue;

fn space() -> Arc<GradedSpace> {
    Arc::new("x:b,y:b,a:f,b:f,c:f".parse().unwrap())
}

fn homogeneous(parity: u8, seed: u64) -> Supernumber {
    random_homogeneous(&space(), parity, 2, seed).unwrap()
}

fn bit(f: &Supernumber) -> u32 {
    f.parity_bit().unwrap() as u32
}

const COORDS: [&str; 5] = ["x", "y", "a", "b", "c"];

fn coord_parity(name: &str) -> u32 {
    space().coord(name).unwrap().kind.parity() as u32
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn right_and_left_derivatives_differ_by_parity(p in 0u8..2, seed: u64, z in 2usize..5) {
        let f = homogeneous(p, seed);
        let name = COORDS[z];
        let l = f.deriv(name, Side::Left).unwrap();
        let r = f.deriv(name, Side::Right).unwrap();
        prop_assert_eq!(r, l.signed(p as u32 + 1));
    }

    #[test]
    fn graded_commutativity(p in 0u8..2, q in 0u8..2, s1: u64, s2: u64) {
        let f = homogeneous(p, s1);
        let g = homogeneous(q, s2);
        prop_assert_eq!(&f * &g, (&g * &f).signed(bit(&f) * bit(&g)));
    }

    #[test]
    fn associativity_and_distributivity(p in 0u8..2, q in 0u8..2, r in 0u8..2, s1: u64, s2: u64, s3: u64) {
        let (f, g, h) = (homogeneous(p, s1), homogeneous(q, s2), homogeneous(r, s3));
        prop_assert_eq!(&(&f * &g) * &h, &f * &(&g * &h));
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
    }

    #[test]
    fn product_parity_adds(p in 0u8..2, q in 0u8..2, s1: u64, s2: u64) {
        let fg = &homogeneous(p, s1) * &homogeneous(q, s2);
        prop_assume!(!fg.is_zero());
        prop_assert_eq!(fg.parity_bit(), Some((p + q) % 2));
    }

    #[test]
    fn derivatives_obey_graded_leibniz(p in 0u8..2, q in 0u8..2, s1: u64, s2: u64, z in 0usize..5) {
        let (f, g) = (homogeneous(p, s1), homogeneous(q, s2));
        let name = COORDS[z];
        let pz = coord_parity(name);
        let d = |h: &Supernumber, side| h.deriv(name, side).unwrap();
        // left: the derivative passes f from the left
        let left = &(&d(&f, Side::Left) * &g) + &(&f * &d(&g, Side::Left)).signed(pz * bit(&f));
        prop_assert_eq!(d(&(&f * &g), Side::Left), left);
        // right: the derivative passes g from the right
        let right = &(&f * &d(&g, Side::Right)) + &(&d(&f, Side::Right) * &g).signed(pz * bit(&g));
        prop_assert_eq!(d(&(&f * &g), Side::Right), right);
    }

    #[test]
    fn odd_derivative_squares_to_zero(p in 0u8..2, seed: u64, z in 2usize..5) {
        let f = homogeneous(p, seed);
        for side in [Side::Left, Side::Right] {
            let once = f.deriv(COORDS[z], side).unwrap();
            prop_assert!(once.deriv(COORDS[z], side).unwrap().is_zero());
        }
    }

    #[test]
    fn mixed_partials_graded_commute(p in 0u8..2, seed: u64, i in 0usize..5, j in 0usize..5) {
        let f = homogeneous(p, seed);
        let (a, b) = (COORDS[i], COORDS[j]);
        let ab = f.deriv(b, Side::Left).unwrap().deriv(a, Side::Left).unwrap();
        let ba = f.deriv(a, Side::Left).unwrap().deriv(b, Side::Left).unwrap();
        prop_assert_eq!(ab, ba.signed(coord_parity(a) * coord_parity(b)));
    }

    #[test]
    fn format_parse_round_trip(p in 0u8..2, q in 0u8..2, s1: u64, s2: u64) {
        let f = &homogeneous(p, s1) + &homogeneous(q, s2).scale(&rat(-3, 7));
        prop_assert_eq!(parse(&f.to_string(), &space()).unwrap(), f);
    }
}
