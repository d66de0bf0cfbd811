//! The blown-up surface, its anticanonical height, the affine chart at the
//! center point `Q`, the sector decomposition around `Q`, and the thin-set
//! membership test.
//!
//! Points are unordered data: a pair of primitive integer representatives
//! `[x:y] x [s:t]`, one per projective factor, with canonical signs. The
//! anticanonical height of a point off the exceptional divisors is
//!
//! ```text
//! H(P) = max(|x^2 s t|, |y^2 s t|, |t^2 x y|, |s^2 x y|, |x y s t|, |y^2 t^2|)
//!        / ( gcd(x,t) * gcd(y,s) * gcd(y,t) )
//! ```
//!
//! and the divisor above is provably the gcd of all six section values,
//! which is cross-checked by a debug assertion on every call.
//!
//! The chart at `Q = [1:1]x[1:1]` is `(w, z) = (x/y - 1, s/t - 1)`; the
//! distance to `Q` is `max(|w|, |z|)`. The three accumulating lines through
//! `Q` are `w = 0`, `z = 0` and `wz + w + z = 0`, and the four open sectors
//! `S1..S4` between them classify every nearby off-line point up to the
//! factor-swap symmetry.

use crate::rat::{gcd_i128, Rat};
use crate::Error;
use std::fmt;
use std::str::FromStr;

/// Largest admitted coordinate magnitude for a projective point pair.
/// Six-fold products of coordinates this size stay inside `i128`, which
/// keeps the height computation overflow-free by construction.
pub const COORD_LIMIT: i128 = 1 << 30;

/// Largest admitted numerator/denominator magnitude for a chart point.
/// Degree-four polynomial expressions in two chart coordinates (the worst
/// case used by the region and thin-set tests) stay inside `i128`.
pub const CHART_LIMIT: i128 = 1 << 31;

/// A point of `P^1 x P^1` in primitive integer coordinates, written
/// `[x:y] x [s:t]`. Invariants: `gcd(x,y) = gcd(s,t) = 1`, `y > 0` or
/// (`y = 0` and `x > 0`), likewise for `(t, s)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ProjPointPair {
    x: i128,
    y: i128,
    s: i128,
    t: i128,
}

fn normalize_factor(a: i128, b: i128) -> (i128, i128) {
    assert!(a != 0 || b != 0, "[0:0] is not a projective point");
    let g = gcd_i128(a, b);
    let (mut a, mut b) = (a / g, b / g);
    // Canonical sign: second coordinate positive, or first positive if it is zero.
    if b < 0 || (b == 0 && a < 0) {
        a = -a;
        b = -b;
    }
    (a, b)
}

impl ProjPointPair {
    /// Builds the canonical representative. Errors with [`Error::Overflow`]
    /// if a reduced coordinate exceeds [`COORD_LIMIT`].
    pub fn new(x: i128, y: i128, s: i128, t: i128) -> Result<ProjPointPair, Error> {
        let (x, y) = normalize_factor(x, y);
        let (s, t) = normalize_factor(s, t);
        let p = ProjPointPair { x, y, s, t };
        if [x, y, s, t].iter().any(|c| c.abs() > COORD_LIMIT) {
            return Err(Error::Overflow);
        }
        Ok(p)
    }

    /// The center of the zoom, `[1:1] x [1:1]`.
    pub fn q() -> ProjPointPair {
        ProjPointPair { x: 1, y: 1, s: 1, t: 1 }
    }

    pub fn x(&self) -> i128 {
        self.x
    }
    pub fn y(&self) -> i128 {
        self.y
    }
    pub fn s(&self) -> i128 {
        self.s
    }
    pub fn t(&self) -> i128 {
        self.t
    }

    /// True for the three blown-up base points, where the height and the
    /// enumeration are undefined.
    pub fn is_blown_up_base_point(&self) -> bool {
        (self.y == 0 && self.t == 0) // [1:0] x [1:0]
            || (self.x == 0 && self.t == 0) // [0:1] x [1:0]
            || (self.y == 0 && self.s == 0) // [1:0] x [0:1]
    }
}

impl fmt::Display for ProjPointPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{},{}:{}", self.x, self.y, self.s, self.t)
    }
}

impl FromStr for ProjPointPair {
    type Err = String;

    /// Parses the `"x:y,s:t"` form.
    fn from_str(input: &str) -> Result<ProjPointPair, String> {
        let (first, second) = input
            .split_once(',')
            .ok_or_else(|| format!("expected x:y,s:t, got {input:?}"))?;
        let parse_factor = |txt: &str| -> Result<(i128, i128), String> {
            let (a, b) = txt
                .split_once(':')
                .ok_or_else(|| format!("expected a:b, got {txt:?}"))?;
            let a: i128 = a.trim().parse().map_err(|e| format!("bad coordinate {a:?}: {e}"))?;
            let b: i128 = b.trim().parse().map_err(|e| format!("bad coordinate {b:?}: {e}"))?;
            if a == 0 && b == 0 {
                return Err("[0:0] is not a projective point".to_string());
            }
            Ok((a, b))
        };
        let (x, y) = parse_factor(first)?;
        let (s, t) = parse_factor(second)?;
        ProjPointPair::new(x, y, s, t).map_err(|e| e.to_string())
    }
}

/// Chart coordinates `(w, z)` of a point near `Q`; `(0, 0)` is `Q` itself.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ChartPoint {
    w: Rat,
    z: Rat,
}

impl ChartPoint {
    /// Errors with [`Error::Overflow`] if a reduced part exceeds
    /// [`CHART_LIMIT`]; everything downstream relies on that cap.
    pub fn new(w: Rat, z: Rat) -> Result<ChartPoint, Error> {
        for r in [&w, &z] {
            if r.num().abs() > CHART_LIMIT || r.den() > CHART_LIMIT {
                return Err(Error::Overflow);
            }
        }
        Ok(ChartPoint { w, z })
    }

    pub fn origin() -> ChartPoint {
        ChartPoint { w: Rat::ZERO, z: Rat::ZERO }
    }

    pub fn w(&self) -> Rat {
        self.w
    }

    pub fn z(&self) -> Rat {
        self.z
    }

    /// `(z, w)` — the chart image of the factor-swap symmetry.
    pub fn swapped(&self) -> ChartPoint {
        ChartPoint { w: self.z, z: self.w }
    }
}

impl fmt::Display for ChartPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.w, self.z)
    }
}

impl FromStr for ChartPoint {
    type Err = String;

    /// Parses the `"p/q,r/s"` form.
    fn from_str(input: &str) -> Result<ChartPoint, String> {
        let (a, b) = input
            .split_once(',')
            .ok_or_else(|| format!("expected p/q,r/s, got {input:?}"))?;
        let w: Rat = a.parse()?;
        let z: Rat = b.parse()?;
        ChartPoint::new(w, z).map_err(|e| e.to_string())
    }
}

/// Classification of a chart point relative to the three lines through `Q`.
///
/// `S1..S4` are the four open sectors cut out by the lines (`S1`: `w > 0`,
/// `z > w`; `S2`: `w < 0`, `z > w`, `wz + w + z > 0`; `S3`: `w > 0`,
/// `z < w`, `wz + w + z < 0`; `S4`: `w < 0`, `z < w`, `wz + w + z < 0`).
/// Points on a line classify as `OnLine`, `Q` as `AtQ`, and everything
/// else — including the diagonal `z = w` off `Q` — as `Outside`. The four
/// sectors cover one representative of each off-line, off-diagonal point
/// up to the factor-swap symmetry `(w, z) -> (z, w)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Region {
    S1,
    S2,
    S3,
    S4,
    OnLine(u8),
    AtQ,
    Outside,
}

impl Region {
    pub fn is_on_line(&self) -> bool {
        matches!(self, Region::OnLine(_) | Region::AtQ)
    }

    pub fn is_sector(&self) -> bool {
        matches!(self, Region::S1 | Region::S2 | Region::S3 | Region::S4)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::S1 => write!(f, "S1"),
            Region::S2 => write!(f, "S2"),
            Region::S3 => write!(f, "S3"),
            Region::S4 => write!(f, "S4"),
            Region::OnLine(i) => write!(f, "L{i}"),
            Region::AtQ => write!(f, "AtQ"),
            Region::Outside => write!(f, "Out"),
        }
    }
}

impl FromStr for Region {
    type Err = String;

    fn from_str(s: &str) -> Result<Region, String> {
        match s {
            "S1" => Ok(Region::S1),
            "S2" => Ok(Region::S2),
            "S3" => Ok(Region::S3),
            "S4" => Ok(Region::S4),
            "L1" => Ok(Region::OnLine(1)),
            "L2" => Ok(Region::OnLine(2)),
            "L3" => Ok(Region::OnLine(3)),
            "AtQ" => Ok(Region::AtQ),
            "Out" => Ok(Region::Outside),
            other => Err(format!("unknown region {other:?}")),
        }
    }
}

/// Anticanonical height of a point off the exceptional divisors.
///
/// Errors: [`Error::BlownUpPoint`] on the three base points, and
/// [`Error::Overflow`] when a coordinate exceeds `2^30` (the documented
/// width guard: sections of admissible points fit in `i128`).
pub fn height(p: &ProjPointPair) -> Result<i128, Error> {
    if p.is_blown_up_base_point() {
        return Err(Error::BlownUpPoint);
    }
    let (x, y, s, t) = (p.x, p.y, p.s, p.t);
    if [x, y, s, t].iter().any(|c| c.abs() > COORD_LIMIT) {
        return Err(Error::Overflow);
    }
    let sections = [
        x * x * s * t,
        y * y * s * t,
        t * t * x * y,
        s * s * x * y,
        x * y * s * t,
        y * y * t * t,
    ];
    let divisor = gcd_i128(x, t) * gcd_i128(y, s) * gcd_i128(y, t);
    debug_assert_eq!(
        sections.iter().fold(0i128, |acc, &v| gcd_i128(acc, v)),
        divisor,
        "gcd of the six sections must equal gcd(x,t)*gcd(y,s)*gcd(y,t) at {p}"
    );
    let max_section = sections.iter().map(|v| v.abs()).max().unwrap();
    debug_assert_eq!(max_section % divisor, 0);
    Ok(max_section / divisor)
}

/// Chart coordinates `(x/y - 1, s/t - 1)`; requires `y != 0` and `t != 0`.
pub fn chart(p: &ProjPointPair) -> Result<ChartPoint, Error> {
    if p.y == 0 || p.t == 0 {
        return Err(Error::OffChart);
    }
    let w = Rat::new(p.x - p.y, p.y);
    let z = Rat::new(p.s - p.t, p.t);
    ChartPoint::new(w, z)
}

/// Inverse of [`chart`]: `[w_num + w_den : w_den] x [z num + den : den]`.
/// Total on exact rational pairs; errors with [`Error::Overflow`] only if
/// the resulting coordinates exceed the width cap.
pub fn chart_inv(c: &ChartPoint) -> Result<ProjPointPair, Error> {
    let x = c
        .w
        .num()
        .checked_add(c.w.den())
        .ok_or(Error::Overflow)?;
    let s = c
        .z
        .num()
        .checked_add(c.z.den())
        .ok_or(Error::Overflow)?;
    ProjPointPair::new(x, c.w.den(), s, c.z.den())
}

/// Distance to `Q` in the chart: `max(|w|, |z|)`.
pub fn distance(c: &ChartPoint) -> Rat {
    c.w.abs().max(c.z.abs())
}

/// The value `wz + w + z`, whose vanishing defines the third line.
pub fn line3_form(c: &ChartPoint) -> Rat {
    c.w * c.z + c.w + c.z
}

/// Classifies a chart point; see [`Region`] for the exact sector
/// definitions. Boundary points never classify as a sector.
pub fn region_of(c: &ChartPoint) -> Region {
    let w = c.w;
    let z = c.z;
    if w.is_zero() && z.is_zero() {
        return Region::AtQ;
    }
    if w.is_zero() {
        return Region::OnLine(1);
    }
    if z.is_zero() {
        return Region::OnLine(2);
    }
    let h = line3_form(c);
    if h.is_zero() {
        return Region::OnLine(3);
    }
    if w.is_positive() && z > w {
        Region::S1
    } else if w.is_negative() && z > w && h.is_positive() {
        Region::S2
    } else if w.is_positive() && z < w && h.is_negative() {
        Region::S3
    } else if w.is_negative() && z < w && h.is_negative() {
        Region::S4
    } else {
        Region::Outside
    }
}

/// Thin-set membership: true iff `-(wz + w + z)` is a nonzero rational
/// square. Exact; no floating point.
pub fn is_thin(c: &ChartPoint) -> bool {
    line3_form(c).neg().is_nonzero_square()
}

/// The factor-swap symmetry `[x:y] x [s:t] -> [s:t] x [x:y]`. Preserves
/// the height (the six sections are permuted) and swaps chart coordinates.
pub fn swap_symmetry(p: &ProjPointPair) -> ProjPointPair {
    ProjPointPair { x: p.s, y: p.t, s: p.x, t: p.y }
}
