//! Plane geometry for road lines in `(offset, angle)` form.
//!
//! A [`Line`] with angle `θ` runs in direction `d = (cos θ, sin θ)`, measured
//! counterclockwise from the x-axis. Its unit normal is `n = (-sin θ, cos θ)`
//! and the line is the set `{ p : p·n = offset }`. The foot point (closest
//! point to the origin) is therefore `offset · n`.
//!
//! Positions on a line are given by a signed abscissa `s` along `d`, with
//! `s = 0` at the foot point. Every module that stores on-line positions uses
//! this frame.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// A point in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(&self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn distance(&self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// An undirected line, normalized so that `angle ∈ [0, π)`.
///
/// The offset is signed, so each `(offset, angle)` pair names exactly one
/// line and `|offset|` is its distance from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    offset: f64,
    angle: f64,
}

impl Line {
    /// Builds a line, folding `angle` into `[0, π)`. Every fold by `π`
    /// reverses the normal, so the offset changes sign with it.
    pub fn new(offset: f64, angle: f64) -> Self {
        let (offset, angle, _) = normalize(offset, angle);
        Self { offset, angle }
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Distance from the origin.
    pub fn distance_to_origin(&self) -> f64 {
        self.offset.abs()
    }

    pub fn direction(&self) -> Point {
        Point::new(self.angle.cos(), self.angle.sin())
    }

    pub fn normal(&self) -> Point {
        Point::new(-self.angle.sin(), self.angle.cos())
    }

    /// Rotates the line about the origin by `delta` radians.
    ///
    /// The returned flag is true when normalization reversed the line's
    /// direction; abscissas on the rotated line must then be negated.
    pub fn rotated(&self, delta: f64) -> (Line, bool) {
        let (offset, angle, flipped) = normalize(self.offset, self.angle + delta);
        (Line { offset, angle }, flipped)
    }

    pub fn frame(&self) -> LineFrame {
        LineFrame::new(*self)
    }
}

fn normalize(offset: f64, angle: f64) -> (f64, f64, bool) {
    let turns = (angle / PI).floor();
    let mut a = angle - turns * PI;
    let mut flipped = turns.rem_euclid(2.0) == 1.0;
    // Rounding can land exactly on π or slightly below zero.
    if a >= PI {
        a -= PI;
        flipped = !flipped;
    }
    if a < 0.0 {
        a = 0.0;
    }
    let offset = if flipped { -offset } else { offset };
    (offset, a, flipped)
}

/// The orthogonal projection of the origin onto `line`.
pub fn foot_point(line: &Line) -> Point {
    let n = line.normal();
    Point::new(line.offset * n.x, line.offset * n.y)
}

/// Coordinate chart of a line: abscissa `s` along the direction, `0` at the
/// foot point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFrame {
    line: Line,
    foot: Point,
    direction: Point,
    normal: Point,
}

impl LineFrame {
    pub fn new(line: Line) -> Self {
        Self {
            line,
            foot: foot_point(&line),
            direction: line.direction(),
            normal: line.normal(),
        }
    }

    pub fn line(&self) -> &Line {
        &self.line
    }

    pub fn to_plane(&self, s: f64) -> Point {
        Point::new(
            self.foot.x + s * self.direction.x,
            self.foot.y + s * self.direction.y,
        )
    }

    /// Point at abscissa `s` displaced by `t` along the normal.
    pub fn to_plane_offset(&self, s: f64, t: f64) -> Point {
        let p = self.to_plane(s);
        Point::new(p.x + t * self.normal.x, p.y + t * self.normal.y)
    }

    /// Abscissa of the orthogonal projection of `p` onto the line.
    pub fn abscissa(&self, p: Point) -> f64 {
        p.dot(self.direction)
    }

    /// Signed distance from the line to `p`, positive along the normal.
    pub fn signed_distance(&self, p: Point) -> f64 {
        p.dot(self.normal) - self.line.offset
    }
}

/// A closed rectangle `[lo, hi] × [-half_width, half_width]` in a line's frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageRect {
    pub line: Line,
    pub lo: f64,
    pub hi: f64,
    pub half_width: f64,
}

impl CoverageRect {
    pub fn new(line: Line, lo: f64, hi: f64, half_width: f64) -> Self {
        debug_assert!(lo <= hi, "rect bounds out of order: {lo} > {hi}");
        debug_assert!(half_width > 0.0);
        Self {
            line,
            lo,
            hi,
            half_width,
        }
    }

    /// True iff the origin lies in the closed rectangle. The origin sits at
    /// abscissa 0 and at distance `|offset|` from the line.
    pub fn contains_origin(&self) -> bool {
        self.line.offset.abs() <= self.half_width && self.lo <= 0.0 && 0.0 <= self.hi
    }

    pub fn contains(&self, p: Point) -> bool {
        let frame = self.line.frame();
        let s = frame.abscissa(p);
        let t = frame.signed_distance(p);
        t.abs() <= self.half_width && self.lo <= s && s <= self.hi
    }

    /// Corners in counterclockwise order.
    pub fn corners(&self) -> [Point; 4] {
        let frame = self.line.frame();
        let h = self.half_width;
        [
            frame.to_plane_offset(self.lo, -h),
            frame.to_plane_offset(self.hi, -h),
            frame.to_plane_offset(self.hi, h),
            frame.to_plane_offset(self.lo, h),
        ]
    }

    /// The same rectangle after rotating the plane about the origin.
    pub fn rotated(&self, delta: f64) -> CoverageRect {
        let (line, flipped) = self.line.rotated(delta);
        let (lo, hi) = if flipped {
            (-self.hi, -self.lo)
        } else {
            (self.lo, self.hi)
        };
        CoverageRect {
            line,
            lo,
            hi,
            half_width: self.half_width,
        }
    }
}

/// Convenience wrapper over [`CoverageRect::contains_origin`].
pub fn rect_contains_origin(rect: &CoverageRect) -> bool {
    rect.contains_origin()
}
