//! Curve descriptors near `Q`, the approximation-constant formula, the
//! three accumulating lines, the nodal and cuspidal quintic families with
//! exact membership tests, and an empirical estimator for the
//! approximation exponent.
//!
//! The approximation constant of a curve through `Q` is
//! `min_branches degree / (multiplicity * r)` where `r` is 1 for a branch
//! with rational tangent data, 2 for a real-quadratic pair, and the
//! convention `r = 0 -> infinity` for complex branches (such a curve does
//! not approximate `Q` along real points at all).

use crate::rat::Rat;
use crate::surface::{ChartPoint, ProjPointPair};
use crate::Error;
use num::BigRational;

/// Residue-field class of a branch at `Q`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FieldClass {
    Rational,
    RealQuadratic,
    Complex,
}

/// One branch of a curve at `Q`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BranchData {
    pub multiplicity: u32,
    pub field_class: FieldClass,
}

impl BranchData {
    pub fn new(multiplicity: u32, field_class: FieldClass) -> BranchData {
        assert!(multiplicity >= 1, "branch multiplicity must be >= 1");
        BranchData { multiplicity, field_class }
    }
}

/// Summary of a curve through `Q`: anticanonical degree and branch list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CurveDescriptor {
    pub degree: u32,
    pub branches: Vec<BranchData>,
}

impl CurveDescriptor {
    pub fn new(degree: u32, branches: Vec<BranchData>) -> CurveDescriptor {
        assert!(degree >= 1, "degree must be >= 1");
        assert!(!branches.is_empty(), "branch list must be nonempty");
        CurveDescriptor { degree, branches }
    }
}

/// An approximation constant: a positive rational or infinity.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Alpha {
    Finite(Rat),
    Infinity,
}

/// `min` over branches of `degree / (multiplicity * r)`, where
/// `r(Rational) = 1`, `r(RealQuadratic) = 2`, and `Complex` branches
/// contribute infinity. Returns [`Alpha::Infinity`] iff every branch is
/// complex.
pub fn alpha_of(desc: &CurveDescriptor) -> Alpha {
    let mut best: Option<Rat> = None;
    for branch in &desc.branches {
        let r = match branch.field_class {
            FieldClass::Rational => 1,
            FieldClass::RealQuadratic => 2,
            FieldClass::Complex => continue,
        };
        let value = Rat::new(
            desc.degree as i128,
            branch.multiplicity as i128 * r as i128,
        );
        best = Some(match best {
            None => value,
            Some(b) => b.min(value),
        });
    }
    match best {
        Some(v) => Alpha::Finite(v),
        None => Alpha::Infinity,
    }
}

/// The nodal quintic family: in chart coordinates,
/// `a (1+w) z^2 = b (1+z) w^2`. The node at `Q` has tangents
/// `+- sqrt(b/a)`, rational iff `a*b` is a perfect square.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NodalCurve {
    a: i128,
    b: i128,
}

/// The cuspidal quintic family: in chart coordinates,
/// `(a z - b w)^2 + z w (a^2 z + b^2 w) = 0`, with a multiplicity-2
/// rational branch at `Q`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CuspidalCurve {
    a: i128,
    b: i128,
}

fn check_pair(a: i128, b: i128) -> Result<(), Error> {
    if a < 1 || b < 1 || crate::rat::gcd_i128(a, b) != 1 {
        return Err(Error::DegenerateParams);
    }
    Ok(())
}

impl NodalCurve {
    pub fn new(a: i128, b: i128) -> Result<NodalCurve, Error> {
        check_pair(a, b)?;
        Ok(NodalCurve { a, b })
    }

    pub fn a(&self) -> i128 {
        self.a
    }
    pub fn b(&self) -> i128 {
        self.b
    }

    /// True iff the node tangents `+- sqrt(b/a)` are rational.
    pub fn tangents_rational(&self) -> bool {
        crate::rat::is_square_i128(self.a * self.b)
    }

    /// Branch summary: degree 5; one real-quadratic branch pair when the
    /// tangents are irrational, two rational branches (each of
    /// approximation constant 5) when they are rational.
    pub fn descriptor(&self) -> CurveDescriptor {
        if self.tangents_rational() {
            CurveDescriptor::new(
                5,
                vec![
                    BranchData::new(1, FieldClass::Rational),
                    BranchData::new(1, FieldClass::Rational),
                ],
            )
        } else {
            CurveDescriptor::new(5, vec![BranchData::new(1, FieldClass::RealQuadratic)])
        }
    }
}

impl CuspidalCurve {
    pub fn new(a: i128, b: i128) -> Result<CuspidalCurve, Error> {
        check_pair(a, b)?;
        Ok(CuspidalCurve { a, b })
    }

    pub fn a(&self) -> i128 {
        self.a
    }
    pub fn b(&self) -> i128 {
        self.b
    }

    /// Branch summary: degree 5, one rational branch of multiplicity 2.
    pub fn descriptor(&self) -> CurveDescriptor {
        CurveDescriptor::new(5, vec![BranchData::new(2, FieldClass::Rational)])
    }
}

/// A curve with an exact chart-coordinate membership test.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Curve {
    Nodal(NodalCurve),
    Cuspidal(CuspidalCurve),
    /// The three accumulating lines: 1 is `w = 0`, 2 is `z = 0`,
    /// 3 is `wz + w + z = 0`.
    Line(u8),
}

fn big(r: Rat) -> BigRational {
    BigRational::new(r.num().into(), r.den().into())
}

/// Exact evaluation of the defining equation of `curve` at `c`.
pub fn contains(curve: &Curve, c: &ChartPoint) -> bool {
    let w = big(c.w());
    let z = big(c.z());
    let one = BigRational::from_integer(1.into());
    match curve {
        Curve::Nodal(n) => {
            let a = BigRational::from_integer(n.a.into());
            let b = BigRational::from_integer(n.b.into());
            a * (one.clone() + &w) * (&z * &z) == b * (one + &z) * (&w * &w)
        }
        Curve::Cuspidal(cc) => {
            let a = BigRational::from_integer(cc.a.into());
            let b = BigRational::from_integer(cc.b.into());
            let lhs = &a * &z - &b * &w;
            let lhs = &lhs * &lhs;
            let rhs = &z * &w * (&a * &a * &z + &b * &b * &w);
            lhs + rhs == BigRational::from_integer(0.into())
        }
        Curve::Line(1) => c.w().is_zero(),
        Curve::Line(2) => c.z().is_zero(),
        Curve::Line(3) => crate::surface::line3_form(c).is_zero(),
        Curve::Line(i) => panic!("line index {i} out of range 1..=3"),
    }
}

/// Rational points of the cuspidal curve `(a, b)` from the slope
/// parametrization `z = tau * w`:
///
/// ```text
/// w = -(a tau - b)^2 / (tau (a^2 tau + b^2)),  z = tau * w.
/// ```
///
/// `tau = b/a` gives `Q` itself. Errors: [`Error::PoleParameter`] at
/// `tau = 0` and `a^2 tau + b^2 = 0`; [`Error::DegenerateParams`] for an
/// invalid `(a, b)`; [`Error::Overflow`] if intermediate values leave the
/// supported width.
pub fn cusp_points(a: i128, b: i128, taus: &[Rat]) -> Result<Vec<ChartPoint>, Error> {
    check_pair(a, b)?;
    let ra = Rat::int(a);
    let rb = Rat::int(b);
    let a2 = ra.checked_mul(&ra).ok_or(Error::Overflow)?;
    let b2 = rb.checked_mul(&rb).ok_or(Error::Overflow)?;
    let mut out = Vec::with_capacity(taus.len());
    for &tau in taus {
        if tau.is_zero() {
            return Err(Error::PoleParameter);
        }
        let denom_factor = a2
            .checked_mul(&tau)
            .and_then(|v| v.checked_add(&b2))
            .ok_or(Error::Overflow)?;
        if denom_factor.is_zero() {
            return Err(Error::PoleParameter);
        }
        let numer = ra
            .checked_mul(&tau)
            .and_then(|v| v.checked_sub(&rb))
            .ok_or(Error::Overflow)?;
        let numer_sq = numer.checked_mul(&numer).ok_or(Error::Overflow)?;
        let denom = tau.checked_mul(&denom_factor).ok_or(Error::Overflow)?;
        let w = numer_sq.checked_div(&denom).ok_or(Error::Overflow)?.neg();
        let z = tau.checked_mul(&w).ok_or(Error::Overflow)?;
        let c = ChartPoint::new(w, z)?;
        debug_assert!(
            contains(&Curve::Cuspidal(CuspidalCurve { a, b }), &c),
            "parametrized point must lie on the cuspidal curve"
        );
        out.push(c);
    }
    Ok(out)
}

/// Rational points marching along line `i` towards `Q`, one per index `n`:
/// line 1 gives `[1:1] x [n:n+1]`, line 2 gives `[n:n+1] x [1:1]`, and
/// line 3 gives `[n:n+1] x [n+1:n]`.
pub fn line_points(
    i: u8,
    ns: impl IntoIterator<Item = i128>,
) -> Result<Vec<ProjPointPair>, Error> {
    assert!((1..=3).contains(&i), "line index {i} out of range 1..=3");
    let mut out = Vec::new();
    for n in ns {
        assert!(n >= 1, "line point index must be >= 1");
        let p = match i {
            1 => ProjPointPair::new(1, 1, n, n + 1)?,
            2 => ProjPointPair::new(n, n + 1, 1, 1)?,
            _ => ProjPointPair::new(n, n + 1, n + 1, n)?,
        };
        out.push(p);
    }
    Ok(out)
}

/// Least-squares estimate of the approximation exponent from a cloud of
/// `(height, distance)` samples.
///
/// The estimator first restricts to best approximants (strictly smaller
/// distance than every point of smaller height; ties in distance keep the
/// smaller height), then to the lower convex envelope in
/// `(-log distance, log height)`, and fits a least-squares line through
/// the envelope vertices. Needs at least 10 samples with positive
/// distance, else [`Error::TooFewPoints`].
pub fn empirical_alpha(points: &[(i128, Rat)]) -> Result<f64, Error> {
    let mut usable: Vec<(i128, Rat)> = points
        .iter()
        .filter(|(h, d)| *h >= 1 && d.is_positive())
        .cloned()
        .collect();
    if usable.len() < 10 {
        return Err(Error::TooFewPoints { min: 10 });
    }
    usable.sort_by(|(h1, d1), (h2, d2)| h1.cmp(h2).then(d1.cmp(d2)));
    let mut frontier: Vec<(f64, f64)> = Vec::new();
    let mut best_d: Option<Rat> = None;
    for (h, d) in &usable {
        if best_d.map_or(true, |b| *d < b) {
            best_d = Some(*d);
            frontier.push((-d.to_f64().ln(), (*h as f64).ln()));
        }
    }
    // Lower convex envelope (monotone chain, inputs already x-sorted).
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in frontier {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let n = hull.len() as f64;
    let mean_x = hull.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = hull.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = hull.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = hull.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::TooFewPoints { min: 10 });
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{chart, distance, height};

    fn cp(wn: i128, wd: i128, zn: i128, zd: i128) -> ChartPoint {
        ChartPoint::new(Rat::new(wn, wd), Rat::new(zn, zd)).unwrap()
    }

    #[test]
    fn alpha_formula() {
        let d = |deg, m, f| CurveDescriptor::new(deg, vec![BranchData::new(m, f)]);
        assert_eq!(
            alpha_of(&d(2, 1, FieldClass::Rational)),
            Alpha::Finite(Rat::int(2))
        );
        assert_eq!(
            alpha_of(&d(5, 2, FieldClass::Rational)),
            Alpha::Finite(Rat::new(5, 2))
        );
        assert_eq!(
            alpha_of(&d(5, 1, FieldClass::RealQuadratic)),
            Alpha::Finite(Rat::new(5, 2))
        );
        assert_eq!(alpha_of(&d(3, 1, FieldClass::Complex)), Alpha::Infinity);
        // Minimum over mixed branches.
        let mixed = CurveDescriptor::new(
            5,
            vec![
                BranchData::new(1, FieldClass::Rational),
                BranchData::new(1, FieldClass::RealQuadratic),
                BranchData::new(1, FieldClass::Complex),
            ],
        );
        assert_eq!(alpha_of(&mixed), Alpha::Finite(Rat::new(5, 2)));
    }

    #[test]
    fn family_descriptors() {
        let generic = NodalCurve::new(1, 2).unwrap();
        assert!(!generic.tangents_rational());
        assert_eq!(alpha_of(&generic.descriptor()), Alpha::Finite(Rat::new(5, 2)));
        let split = NodalCurve::new(1, 4).unwrap();
        assert!(split.tangents_rational());
        assert_eq!(alpha_of(&split.descriptor()), Alpha::Finite(Rat::int(5)));
        let cusp = CuspidalCurve::new(1, 1).unwrap();
        assert_eq!(alpha_of(&cusp.descriptor()), Alpha::Finite(Rat::new(5, 2)));
        assert_eq!(NodalCurve::new(2, 4), Err(Error::DegenerateParams));
        assert_eq!(CuspidalCurve::new(0, 1), Err(Error::DegenerateParams));
    }

    #[test]
    fn membership_tests() {
        let nodal = Curve::Nodal(NodalCurve::new(1, 2).unwrap());
        assert!(contains(&nodal, &cp(1, 3, 1, 2)));
        assert!(!contains(&nodal, &cp(1, 3, 1, 5)));
        let cusp = Curve::Cuspidal(CuspidalCurve::new(1, 1).unwrap());
        assert!(contains(&cusp, &cp(-1, 6, -1, 3)));
        assert!(!contains(&cusp, &cp(-1, 6, -1, 4)));
        assert!(!contains(&Curve::Line(3), &cp(-1, 2, -1, 3)));
        assert!(contains(&Curve::Line(3), &cp(-1, 11, 1, 10)));
        assert!(contains(&Curve::Line(1), &cp(0, 1, 3, 7)));
        assert!(contains(&Curve::Line(2), &cp(3, 7, 0, 1)));
    }

    #[test]
    fn cusp_parametrization_values() {
        let pts = cusp_points(1, 1, &[Rat::int(2)]).unwrap();
        assert_eq!(pts, vec![cp(-1, 6, -1, 3)]);
        let pts = cusp_points(1, 1, &[Rat::int(1)]).unwrap();
        assert_eq!(pts, vec![ChartPoint::origin()]);
        let pts = cusp_points(1, 2, &[Rat::int(1)]).unwrap();
        assert_eq!(pts, vec![cp(-1, 5, -1, 5)]);
        assert_eq!(
            cusp_points(1, 1, &[Rat::ZERO]),
            Err(Error::PoleParameter)
        );
        // a^2 tau + b^2 = 0 at tau = -1 for (a, b) = (1, 1).
        assert_eq!(
            cusp_points(1, 1, &[Rat::int(-1)]),
            Err(Error::PoleParameter)
        );
    }

    #[test]
    fn line_point_families() {
        assert_eq!(
            line_points(3, [1]).unwrap(),
            vec![ProjPointPair::new(1, 2, 2, 1).unwrap()]
        );
        assert_eq!(
            line_points(1, [5]).unwrap(),
            vec![ProjPointPair::new(1, 1, 5, 6).unwrap()]
        );
        let p = &line_points(3, [10]).unwrap()[0];
        assert_eq!(*p, ProjPointPair::new(10, 11, 11, 10).unwrap());
        let c = chart(p).unwrap();
        assert_eq!(distance(&c), Rat::new(1, 10));
        assert!(contains(&Curve::Line(3), &c));
        // Each family satisfies its line equation and approaches Q.
        for i in 1..=3u8 {
            for p in line_points(i, 1..=50).unwrap() {
                assert!(contains(&Curve::Line(i), &chart(&p).unwrap()));
            }
        }
    }

    #[test]
    fn empirical_alpha_exact_power_law() {
        // H = d^{-2} exactly: points (n^2, 1/n).
        let pts: Vec<(i128, Rat)> = (1..=40).map(|n| (n * n, Rat::new(1, n))).collect();
        let slope = empirical_alpha(&pts).unwrap();
        assert!((slope - 2.0).abs() < 1e-9, "slope {slope}");
        assert_eq!(
            empirical_alpha(&pts[..5]),
            Err(Error::TooFewPoints { min: 10 })
        );
    }

    #[test]
    fn empirical_alpha_on_third_line() {
        let pts: Vec<(i128, Rat)> = line_points(3, 1..=1000)
            .unwrap()
            .iter()
            .map(|p| (height(p).unwrap(), distance(&chart(p).unwrap())))
            .collect();
        let slope = empirical_alpha(&pts).unwrap();
        assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
    }
}
