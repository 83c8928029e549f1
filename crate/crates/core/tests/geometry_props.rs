use std::f64::consts::PI;

use loscov::geometry::{foot_point, rect_contains_origin, CoverageRect, Line, Point};
use proptest::prelude::*;

/// Corners built from `(offset, angle)` directly, counterclockwise.
fn oracle_corners(offset: f64, angle: f64, lo: f64, hi: f64, h: f64) -> [(f64, f64); 4] {
    let (s, c) = angle.sin_cos();
    let at = |u: f64, t: f64| {
        let n = offset + t;
        (u * c - n * s, u * s + n * c)
    };
    [at(lo, -h), at(hi, -h), at(hi, h), at(lo, h)]
}

/// Signed distances of `p` to each edge of a counterclockwise polygon;
/// all nonnegative means inside.
fn edge_margins(poly: &[(f64, f64); 4], p: (f64, f64)) -> [f64; 4] {
    let mut out = [0.0; 4];
    for i in 0..4 {
        let (a, b) = (poly[i], poly[(i + 1) % 4]);
        let (ex, ey) = (b.0 - a.0, b.1 - a.1);
        let len = (ex * ex + ey * ey).sqrt();
        out[i] = (ex * (p.1 - a.1) - ey * (p.0 - a.0)) / len;
    }
    out
}

fn rect_strategy() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
    (-300.0..300.0f64, -4.0 * PI..4.0 * PI, -400.0..400.0f64, 0.1..400.0f64, 0.5..200.0f64)
        .prop_map(|(offset, angle, lo, len, h)| (offset, angle, lo, lo + len, h))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn origin_test_matches_polygon_test((offset, angle, lo, hi, h) in rect_strategy()) {
        let line = Line::new(offset, angle);
        let rect = CoverageRect::new(line, lo, hi, h);
        let margins = edge_margins(&oracle_corners(line.offset(), line.angle(), lo, hi, h), (0.0, 0.0));
        let slack = margins.iter().map(|m| m.abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(slack > 1e-7);
        prop_assert_eq!(rect_contains_origin(&rect), margins.iter().all(|&m| m >= 0.0));
    }

    #[test]
    fn point_test_matches_polygon_test(
        (offset, angle, lo, hi, h) in rect_strategy(),
        px in -800.0..800.0f64,
        py in -800.0..800.0f64,
    ) {
        let line = Line::new(offset, angle);
        let rect = CoverageRect::new(line, lo, hi, h);
        let margins = edge_margins(&oracle_corners(line.offset(), line.angle(), lo, hi, h), (px, py));
        let slack = margins.iter().map(|m| m.abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(slack > 1e-7);
        prop_assert_eq!(rect.contains(Point::new(px, py)), margins.iter().all(|&m| m >= 0.0));
    }

    #[test]
    fn corners_match_oracle((offset, angle, lo, hi, h) in rect_strategy()) {
        let line = Line::new(offset, angle);
        let rect = CoverageRect::new(line, lo, hi, h);
        let want = oracle_corners(line.offset(), line.angle(), lo, hi, h);
        for (w, g) in want.iter().zip(rect.corners()) {
            prop_assert!(g.distance(Point::new(w.0, w.1)) < 1e-8, "{:?} vs {:?}", w, g);
        }
    }

    #[test]
    fn origin_containment_is_rotation_invariant(
        (offset, angle, lo, hi, h) in rect_strategy(),
        delta in -10.0..10.0f64,
    ) {
        let rect = CoverageRect::new(Line::new(offset, angle), lo, hi, h);
        let slack = (offset.abs() - h).abs().min(lo.abs()).min(hi.abs());
        prop_assume!(slack > 1e-7);
        prop_assert_eq!(rect.contains_origin(), rect.rotated(delta).contains_origin());
    }

    #[test]
    fn rotation_moves_points_rigidly(
        (offset, angle, lo, hi, h) in rect_strategy(),
        delta in -10.0..10.0f64,
    ) {
        let rect = CoverageRect::new(Line::new(offset, angle), lo, hi, h);
        let (s, c) = delta.sin_cos();
        let turned: Vec<Point> = rect.corners().iter().map(|p| Point::new(p.x * c - p.y * s, p.x * s + p.y * c)).collect();
        for p in rect.rotated(delta).corners() {
            let best = turned.iter().map(|q| q.distance(p)).fold(f64::INFINITY, f64::min);
            prop_assert!(best < 1e-8);
        }
    }

    #[test]
    fn foot_point_is_nearest_point(offset in -500.0..500.0f64, angle in -7.0..7.0f64, t in -1000.0..1000.0f64) {
        let line = Line::new(offset, angle);
        let foot = foot_point(&line);
        prop_assert!((foot.norm() - offset.abs()).abs() < 1e-9);
        prop_assert!((0.0..PI).contains(&line.angle()));
        // any other point of the original line is at least as far away
        let (s, c) = angle.sin_cos();
        let q = Point::new(t * c - offset * s, t * s + offset * c);
        prop_assert!(q.norm() + 1e-9 >= foot.norm());
        // and the foot point lies on the original line
        prop_assert!((foot.x * -s + foot.y * c - offset).abs() < 1e-9);
    }
}
