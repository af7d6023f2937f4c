mod common;

use common::{convex_hull, convex_polygon, inside_margin};
use nestmip_core::{convex_minkowski_sum, convex_nfp, polygons_overlap, ConvexPart, Point};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn minkowski_sum_is_hull_of_vertex_sums(a in convex_polygon(7, 2.0), b in convex_polygon(7, 2.0)) {
        let sum = convex_minkowski_sum(&a, &b).unwrap();
        prop_assert!(sum.len() <= a.len() + b.len());
        prop_assert!(sum.is_convex());
        let sums: Vec<Point> = a.vertices().iter().flat_map(|&p| b.vertices().iter().map(move |&q| p + q)).collect();
        let hull = convex_hull(sums);
        prop_assert_eq!(hull.len(), sum.len());
        prop_assert!((sum.area() - nestmip_core::signed_area(&hull).unwrap()).abs() < 1e-9 * sum.area().max(1.0));
        for v in &hull {
            prop_assert!(sum.vertices().iter().any(|w| w.approx_eq(*v, 1e-9)));
        }
    }

    #[test]
    fn nfp_interior_iff_overlap(
        a in convex_polygon(6, 1.5),
        b in convex_polygon(6, 1.5),
        tx in -5.0..5.0f64,
        ty in -5.0..5.0f64,
    ) {
        let pa = ConvexPart::new(a, 1).unwrap();
        let pb = ConvexPart::new(b.clone(), 1).unwrap();
        let r = b.vertices()[0];
        let nfp = convex_nfp(&pa, &pb, r).unwrap();
        let t = Point::new(tx, ty);
        let margin = inside_margin(&nfp, t);
        prop_assume!(margin.abs() > 1e-6);
        let moved = b.translate(t - r);
        prop_assert_eq!(margin > 0.0, polygons_overlap(&pa.polygon, &moved));
    }
}
