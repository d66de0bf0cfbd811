//! Combinatorics of complete smooth fans in the plane: positive
//! relations among rays, irreducible decompositions, character-induced
//! degree inequalities in Cox coordinates, and the admissible
//! multidegrees whose restrictive multiplicity at the distinguished
//! point is at least `N/r` — together with the rank of the lattice they
//! generate.
//!
//! Seven built-in surfaces are provided: the plane `P2`, its successive
//! blow-ups `X1`, `X2`, `X3`, the quadric `P1xP1`, and the blow-ups
//! `Y3`, `Y4` of the quadric. All angular reasoning is exact (quadrant
//! plus cross-product comparisons; no floating point).

use crate::rat::Rat;
use crate::Error;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A complete smooth fan in the plane, described by its rays. Maximal
/// cones are derived: they are exactly the angularly adjacent ray pairs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Fan {
    name: String,
    rays: Vec<(i64, i64)>,
    /// Pairs of ray indices, one per maximal cone, in angular order.
    maximal_cones: Vec<(usize, usize)>,
}

/// Serialized form of a fan: just a name and the ray list; validation
/// and cone derivation happen on construction.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FanSpec {
    pub name: String,
    pub rays: Vec<(i64, i64)>,
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    num::integer::gcd(a, b)
}

fn cross(a: (i64, i64), b: (i64, i64)) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

/// 0 for angles in [0, pi), 1 for [pi, 2 pi); exact.
fn half_plane(v: (i64, i64)) -> u8 {
    if v.1 > 0 || (v.1 == 0 && v.0 > 0) {
        0
    } else {
        1
    }
}

/// Exact angular comparison of two nonzero lattice vectors.
fn angle_cmp(a: (i64, i64), b: (i64, i64)) -> std::cmp::Ordering {
    half_plane(a)
        .cmp(&half_plane(b))
        .then_with(|| 0.cmp(&cross(a, b)))
}

impl Fan {
    /// Validates and derives the cone structure. Errors with
    /// [`Error::InvalidFan`] when a ray is zero or imprimitive, rays
    /// repeat, the rays do not cover the plane (an angular gap of pi or
    /// more), or an adjacent pair fails the smoothness determinant
    /// condition |det| = 1.
    pub fn new(name: impl Into<String>, rays: Vec<(i64, i64)>) -> Result<Fan, Error> {
        let name = name.into();
        let fail = |msg: &str| Err(Error::InvalidFan(format!("{name}: {msg}")));
        if rays.len() < 3 {
            return fail("a complete fan needs at least 3 rays");
        }
        for &(x, y) in &rays {
            if (x, y) == (0, 0) || gcd_i64(x.abs(), y.abs()) != 1 {
                return fail("rays must be primitive nonzero vectors");
            }
        }
        let mut order: Vec<usize> = (0..rays.len()).collect();
        order.sort_by(|&i, &j| angle_cmp(rays[i], rays[j]));
        for pair in order.windows(2) {
            if rays[pair[0]] == rays[pair[1]] {
                return fail("rays must be pairwise distinct");
            }
        }
        let mut maximal_cones = Vec::with_capacity(rays.len());
        for k in 0..order.len() {
            let i = order[k];
            let j = order[(k + 1) % order.len()];
            let c = cross(rays[i], rays[j]);
            if c <= 0 {
                return fail("rays leave an angular gap of pi or more (fan not complete)");
            }
            if c != 1 {
                return fail("adjacent ray pair has determinant != 1 (fan not smooth)");
            }
            maximal_cones.push((i, j));
        }
        Ok(Fan { name, rays, maximal_cones })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rays(&self) -> &[(i64, i64)] {
        &self.rays
    }

    pub fn maximal_cones(&self) -> &[(usize, usize)] {
        &self.maximal_cones
    }

    /// True iff rays `i` and `j` span a maximal cone.
    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.maximal_cones
            .iter()
            .any(|&(a, b)| (a, b) == (i, j) || (a, b) == (j, i))
    }

    pub fn spec(&self) -> FanSpec {
        FanSpec { name: self.name.clone(), rays: self.rays.clone() }
    }

    pub fn from_spec(spec: FanSpec) -> Result<Fan, Error> {
        Fan::new(spec.name, spec.rays)
    }
}

/// The seven built-in surfaces.
pub fn builtin_fan(name: &str) -> Result<Fan, Error> {
    let rays: Vec<(i64, i64)> = match name {
        "P2" => vec![(1, 0), (0, 1), (-1, -1)],
        "X1" => vec![(1, 0), (0, 1), (-1, -1), (-1, 0)],
        "X2" => vec![(1, 0), (0, 1), (-1, -1), (-1, 0), (0, -1)],
        "X3" => vec![(1, 0), (0, 1), (-1, -1), (-1, 0), (0, -1), (1, 1)],
        "P1xP1" => vec![(1, 0), (0, 1), (-1, 0), (0, -1)],
        "Y3" => vec![(1, 0), (0, 1), (-1, -1), (-1, 0), (0, -1), (1, 1), (1, -1)],
        "Y4" => vec![
            (1, 0),
            (0, 1),
            (-1, -1),
            (-1, 0),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
        ],
        other => return Err(Error::UnknownSurface(other.to_string())),
    };
    Fan::new(name, rays)
}

/// A nonzero vector of nonnegative ray coefficients summing (as a ray
/// combination) to zero; its degree is the coefficient sum.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct PositiveRelation {
    coeffs: Vec<i64>,
}

impl PositiveRelation {
    pub fn new(fan: &Fan, coeffs: Vec<i64>) -> Result<PositiveRelation, Error> {
        if coeffs.len() != fan.rays().len() || coeffs.iter().any(|&c| c < 0) {
            return Err(Error::InvalidFan("coefficient vector malformed".into()));
        }
        let (mut sx, mut sy, mut deg) = (0i64, 0i64, 0i64);
        for (c, &(x, y)) in coeffs.iter().zip(fan.rays()) {
            sx += c * x;
            sy += c * y;
            deg += c;
        }
        if (sx, sy) != (0, 0) || deg < 1 {
            return Err(Error::InvalidFan("not a positive relation".into()));
        }
        Ok(PositiveRelation { coeffs })
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    fn le_componentwise(&self, other: &PositiveRelation) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b)
    }

    fn minus(&self, other: &PositiveRelation) -> PositiveRelation {
        PositiveRelation {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

const MAX_RELATION_DEGREE: i64 = 12;

/// All positive relations of degree up to `max_degree`, sorted by
/// (degree, coefficients).
pub fn positive_relations(fan: &Fan, max_degree: i64) -> Vec<PositiveRelation> {
    assert!(
        (1..=MAX_RELATION_DEGREE).contains(&max_degree),
        "degree bound outside supported search range"
    );
    let rays = fan.rays();
    let mut out = Vec::new();
    let mut coeffs = vec![0i64; rays.len()];
    fn go(
        rays: &[(i64, i64)],
        idx: usize,
        budget: i64,
        sum: (i64, i64),
        coeffs: &mut Vec<i64>,
        out: &mut Vec<PositiveRelation>,
    ) {
        if idx == rays.len() {
            if sum == (0, 0) && coeffs.iter().any(|&c| c > 0) {
                out.push(PositiveRelation { coeffs: coeffs.clone() });
            }
            return;
        }
        for c in 0..=budget {
            coeffs[idx] = c;
            go(
                rays,
                idx + 1,
                budget - c,
                (sum.0 + c * rays[idx].0, sum.1 + c * rays[idx].1),
                coeffs,
                out,
            );
        }
        coeffs[idx] = 0;
    }
    go(rays, 0, max_degree, (0, 0), &mut coeffs, &mut out);
    out.sort_by_key(|r| (r.degree(), r.coeffs.clone()));
    out
}

/// The positive relations admitting no split into two positive
/// relations; a relation is reducible iff some strictly smaller positive
/// relation fits under it componentwise.
pub fn irreducible_relations(fan: &Fan, max_degree: i64) -> Vec<PositiveRelation> {
    let all = positive_relations(fan, max_degree);
    all.iter()
        .filter(|r| {
            !all.iter().any(|s| {
                s.degree() > 0 && s.degree() < r.degree() && s.le_componentwise(r)
            })
        })
        .cloned()
        .collect()
}

/// Expresses a positive relation as a sum of irreducible relations of
/// degree at most 4 (certificate of the generation-in-low-degree
/// property); `None` if no such decomposition exists.
pub fn decompose_certificate(
    fan: &Fan,
    rel: &PositiveRelation,
) -> Option<Vec<PositiveRelation>> {
    let irr = irreducible_relations(fan, 4);
    fn go(rest: &PositiveRelation, irr: &[PositiveRelation]) -> Option<Vec<PositiveRelation>> {
        if rest.coeffs().iter().all(|&c| c == 0) {
            return Some(Vec::new());
        }
        for p in irr {
            if p.le_componentwise(rest) {
                if let Some(mut tail) = go(&rest.minus(p), irr) {
                    tail.push(p.clone());
                    return Some(tail);
                }
            }
        }
        None
    }
    go(rel, &irr).map(|mut parts| {
        parts.reverse();
        parts
    })
}

/// A degree inequality induced by a character `m`: on a relation with
/// ray degrees `c`, the support sum `sum_i exp_i * c_i` must reach
/// `N/r`. Both orientations of a kept character class are emitted as
/// separate inequalities (support = the positive exponents of `m`; the
/// opposite sign of `m` carries the complementary support).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoxInequality {
    pub character: (i64, i64),
    /// (ray index, exponent > 0) pairs: the support that must clear N/r.
    pub support: Vec<(usize, i64)>,
    /// The complementary support (negative exponents of `m`, negated).
    pub cosupport: Vec<(usize, i64)>,
}

impl CoxInequality {
    /// The induced linear form on a ray-degree vector.
    pub fn lhs(&self, coeffs: &[i64]) -> i64 {
        self.support.iter().map(|&(i, e)| e * coeffs[i]).sum()
    }
}

/// Scans primitive characters `m` with coordinates bounded by
/// `character_bound` (deduplicated up to sign), splits the exponents
/// `<m, ray_j>` into positive and negative supports, and keeps the
/// character iff no positive-support ray is cone-adjacent to a
/// negative-support ray. Each kept class yields two inequalities, one
/// per orientation.
pub fn cox_inequalities(fan: &Fan, character_bound: i64) -> Vec<CoxInequality> {
    assert!(character_bound >= 1);
    let mut out = Vec::new();
    for m1 in -character_bound..=character_bound {
        for m2 in -character_bound..=character_bound {
            // Canonical representative of {m, -m}.
            if (m1, m2) == (0, 0)
                || gcd_i64(m1.abs(), m2.abs()) != 1
                || !(m1 > 0 || (m1 == 0 && m2 > 0))
            {
                continue;
            }
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for (j, &(x, y)) in fan.rays().iter().enumerate() {
                let e = m1 * x + m2 * y;
                if e > 0 {
                    pos.push((j, e));
                } else if e < 0 {
                    neg.push((j, -e));
                }
            }
            debug_assert!(
                !pos.is_empty() && !neg.is_empty(),
                "complete fans meet every open half-plane"
            );
            let compatible = pos
                .iter()
                .all(|&(i, _)| neg.iter().all(|&(j, _)| !fan.is_adjacent(i, j)));
            if compatible {
                out.push(CoxInequality {
                    character: (m1, m2),
                    support: pos.clone(),
                    cosupport: neg.clone(),
                });
                out.push(CoxInequality {
                    character: (-m1, -m2),
                    support: neg,
                    cosupport: pos,
                });
            }
        }
    }
    out
}

const MAX_ADMISSIBLE_DEGREE: i64 = 40;

/// Enumerates nonnegative combinations of the degree-`<= 4` irreducible
/// relations up to total degree `degree_bound`, keeping the induced
/// ray-degree vectors that satisfy every Cox inequality with right-hand
/// side `N/r` (compared by cross-multiplication). Distinct parameter
/// vectors collapsing to one relation are deduplicated.
pub fn admissible_multidegrees(
    fan: &Fan,
    r: Rat,
    degree_bound: i64,
) -> Vec<PositiveRelation> {
    assert!(r.is_positive(), "r must be positive");
    assert!(
        (1..=MAX_ADMISSIBLE_DEGREE).contains(&degree_bound),
        "degree bound outside supported search range"
    );
    let irr = irreducible_relations(fan, 4);
    let ineqs = cox_inequalities(fan, 2);
    let mut found: BTreeSet<Vec<i64>> = BTreeSet::new();
    let n_rays = fan.rays().len();
    // Depth-first over multiplicity vectors of the irreducible basis.
    fn go(
        irr: &[PositiveRelation],
        idx: usize,
        budget: i64,
        acc: &mut Vec<i64>,
        ineqs: &[CoxInequality],
        r: Rat,
        found: &mut BTreeSet<Vec<i64>>,
    ) {
        if idx == irr.len() {
            let n: i64 = acc.iter().sum();
            if n == 0 {
                return;
            }
            // sum >= N/r  <=>  r.num * sum >= N * r.den.
            let ok = ineqs
                .iter()
                .all(|q| r.num() * q.lhs(acc) as i128 >= n as i128 * r.den());
            if ok {
                found.insert(acc.clone());
            }
            return;
        }
        let d = irr[idx].degree();
        let mut mult = 0i64;
        while mult * d <= budget {
            if mult > 0 {
                for (slot, c) in acc.iter_mut().zip(irr[idx].coeffs()) {
                    *slot += c;
                }
            }
            go(irr, idx + 1, budget - mult * d, acc, ineqs, r, found);
            mult += 1;
        }
        // Undo all additions from this level.
        for (slot, c) in acc.iter_mut().zip(irr[idx].coeffs()) {
            *slot -= (mult - 1) * c;
        }
    }
    let mut acc = vec![0i64; n_rays];
    go(&irr, 0, degree_bound, &mut acc, &ineqs, r, &mut found);
    found
        .into_iter()
        .map(|coeffs| PositiveRelation { coeffs })
        .collect()
}

/// Rank of the integer lattice generated by the relation vectors
/// (rational Gaussian elimination).
pub fn lr_rank(admissibles: &[PositiveRelation]) -> Result<usize, Error> {
    if admissibles.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut rows: Vec<Vec<Rat>> = admissibles
        .iter()
        .map(|r| r.coeffs().iter().map(|&c| Rat::int(c as i128)).collect())
        .collect();
    let cols = rows[0].len();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][col].recip();
        for c in col..cols {
            rows[rank][c] = rows[rank][c] * inv;
        }
        for i in 0..rows.len() {
            if i != rank && !rows[i][col].is_zero() {
                let factor = rows[i][col];
                for c in col..cols {
                    let delta = factor * rows[rank][c];
                    rows[i][c] = rows[i][c] - delta;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(fan: &Fan, coeffs: &[i64]) -> PositiveRelation {
        PositiveRelation::new(fan, coeffs.to_vec()).unwrap()
    }

    #[test]
    fn builtin_fans_validate() {
        for name in ["P2", "X1", "X2", "X3", "P1xP1", "Y3", "Y4"] {
            let fan = builtin_fan(name).unwrap();
            assert_eq!(fan.maximal_cones().len(), fan.rays().len(), "{name}");
        }
        assert_eq!(builtin_fan("Y3").unwrap().rays().len(), 7);
        assert_eq!(builtin_fan("Y4").unwrap().rays().len(), 8);
        assert!(builtin_fan("Y4").unwrap().rays().contains(&(-1, 1)));
        assert!(matches!(builtin_fan("Z9"), Err(Error::UnknownSurface(_))));
    }

    #[test]
    fn fan_validation_rejects_bad_input() {
        assert!(matches!(
            Fan::new("imprimitive", vec![(2, 0), (0, 1), (-1, -1)]),
            Err(Error::InvalidFan(_))
        ));
        assert!(matches!(
            Fan::new("gap", vec![(1, 0), (0, 1), (1, 1)]),
            Err(Error::InvalidFan(_))
        ));
        assert!(matches!(
            Fan::new("singular", vec![(1, 0), (0, 1), (-1, -2)]),
            Err(Error::InvalidFan(_))
        ));
        assert!(matches!(
            Fan::new("repeat", vec![(1, 0), (1, 0), (0, 1), (-1, -1)]),
            Err(Error::InvalidFan(_))
        ));
    }

    #[test]
    fn y3_adjacency_structure() {
        let fan = builtin_fan("Y3").unwrap();
        // Angular order: r1, r6, r2, r4, r3, r5, r7 (1-based).
        let expected = [(0, 5), (5, 1), (1, 3), (3, 2), (2, 4), (4, 6), (6, 0)];
        for (i, j) in expected {
            assert!(fan.is_adjacent(i, j), "({i},{j})");
        }
        assert!(!fan.is_adjacent(0, 1));
        assert!(!fan.is_adjacent(2, 6));
    }

    #[test]
    fn positive_relation_examples() {
        let p1p1 = builtin_fan("P1xP1").unwrap();
        let rels = positive_relations(&p1p1, 2);
        assert_eq!(
            rels,
            vec![rel(&p1p1, &[0, 1, 0, 1]), rel(&p1p1, &[1, 0, 1, 0])]
        );
        let y3 = builtin_fan("Y3").unwrap();
        assert_eq!(positive_relations(&y3, 2).len(), 3);
        let deg4 = positive_relations(&y3, 4);
        assert!(deg4.contains(&rel(&y3, &[0, 2, 1, 0, 0, 0, 1])));
    }

    #[test]
    fn irreducible_relation_counts() {
        let counts = [
            ("P2", 1),
            ("X1", 2),
            ("X2", 3),
            ("X3", 5),
            ("P1xP1", 2),
            ("Y3", 8),
            ("Y4", 12),
        ];
        for (name, want) in counts {
            let fan = builtin_fan(name).unwrap();
            assert_eq!(irreducible_relations(&fan, 4).len(), want, "{name}");
        }
    }

    #[test]
    fn y3_irreducibles_match_known_list() {
        let y3 = builtin_fan("Y3").unwrap();
        let got: BTreeSet<PositiveRelation> =
            irreducible_relations(&y3, 4).into_iter().collect();
        let want: BTreeSet<PositiveRelation> = [
            [1, 0, 0, 1, 0, 0, 0],
            [0, 1, 0, 0, 1, 0, 0],
            [0, 0, 1, 0, 0, 1, 0],
            [1, 1, 1, 0, 0, 0, 0],
            [0, 0, 0, 1, 1, 1, 0],
            [0, 1, 0, 1, 0, 0, 1],
            [0, 2, 1, 0, 0, 0, 1],
            [0, 0, 0, 2, 0, 1, 1],
        ]
        .iter()
        .map(|c| rel(&y3, c))
        .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn relations_decompose_into_low_degree_irreducibles() {
        let y3 = builtin_fan("Y3").unwrap();
        for r in positive_relations(&y3, 8) {
            let parts = decompose_certificate(&y3, &r)
                .unwrap_or_else(|| panic!("no certificate for {r:?}"));
            let mut sum = vec![0i64; 7];
            for p in &parts {
                assert!(p.degree() <= 4);
                for (s, c) in sum.iter_mut().zip(p.coeffs()) {
                    *s += c;
                }
            }
            assert_eq!(sum, r.coeffs());
        }
    }

    #[test]
    fn cox_inequality_examples() {
        let p1p1 = builtin_fan("P1xP1").unwrap();
        let ineqs = cox_inequalities(&p1p1, 2);
        let classes: BTreeSet<(i64, i64)> =
            ineqs.iter().map(|q| q.character).collect();
        assert_eq!(
            classes,
            [(1, 0), (-1, 0), (0, 1), (0, -1)].into_iter().collect()
        );
        let y3 = builtin_fan("Y3").unwrap();
        let q = cox_inequalities(&y3, 2)
            .into_iter()
            .find(|q| q.character == (1, -1))
            .expect("character (1,-1) kept");
        assert_eq!(q.support, vec![(0, 1), (4, 1), (6, 2)]);
        assert_eq!(q.cosupport, vec![(1, 1), (3, 1)]);
        let x3 = builtin_fan("X3").unwrap();
        let q = cox_inequalities(&x3, 2)
            .into_iter()
            .find(|q| q.character == (1, 0))
            .expect("character (1,0) kept");
        assert_eq!(q.support, vec![(0, 1), (5, 1)]);
        assert_eq!(q.cosupport, vec![(2, 1), (3, 1)]);
    }

    #[test]
    fn admissible_multidegree_examples() {
        let y3 = builtin_fan("Y3").unwrap();
        let adm = admissible_multidegrees(&y3, Rat::new(5, 2), 20);
        let anti = [0i64, 1, 1, 1, 0, 1, 1];
        let want: Vec<PositiveRelation> = (1..=4)
            .map(|k| rel(&y3, &anti.map(|c| c * k)))
            .collect();
        assert_eq!(adm, want);
        assert_eq!(lr_rank(&adm).unwrap(), 1);

        let p1p1 = builtin_fan("P1xP1").unwrap();
        let adm = admissible_multidegrees(&p1p1, Rat::int(4), 16);
        let want: Vec<PositiveRelation> = (1..=4)
            .map(|k| rel(&p1p1, &[k, k, k, k]))
            .collect();
        assert_eq!(adm, want);
        assert_eq!(lr_rank(&adm).unwrap(), 1);

        let x3 = builtin_fan("X3").unwrap();
        let adm = admissible_multidegrees(&x3, Rat::int(3), 18);
        assert_eq!(adm.len(), 27);
        assert_eq!(lr_rank(&adm).unwrap(), 2);
        // The set is the slice spanned by r4+r5+r6 and r1+r2+r3.
        for a in &adm {
            let c = a.coeffs();
            assert_eq!(c[0], c[1]);
            assert_eq!(c[1], c[2]);
            assert_eq!(c[3], c[4]);
            assert_eq!(c[4], c[5]);
        }

        let x2 = builtin_fan("X2").unwrap();
        let adm = admissible_multidegrees(&x2, Rat::int(3), 9);
        let want: Vec<PositiveRelation> = (1..=3)
            .map(|k| rel(&x2, &[k, k, k, 0, 0]))
            .collect();
        assert_eq!(adm, want);
        assert_eq!(lr_rank(&adm).unwrap(), 1);

        let y4 = builtin_fan("Y4").unwrap();
        let adm = admissible_multidegrees(&y4, Rat::int(2), 16);
        let base = [0i64, 0, 1, 0, 0, 1, 1, 1];
        let want: Vec<PositiveRelation> = (1..=4)
            .map(|k| rel(&y4, &base.map(|c| c * k)))
            .collect();
        assert_eq!(adm, want);
        assert_eq!(lr_rank(&adm).unwrap(), 1);

        assert_eq!(lr_rank(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn admissibles_closed_under_addition() {
        let x3 = builtin_fan("X3").unwrap();
        let adm = admissible_multidegrees(&x3, Rat::int(3), 18);
        let set: BTreeSet<Vec<i64>> =
            adm.iter().map(|r| r.coeffs().to_vec()).collect();
        for a in &adm {
            for b in &adm {
                if a.degree() + b.degree() <= 18 {
                    let sum: Vec<i64> = a
                        .coeffs()
                        .iter()
                        .zip(b.coeffs())
                        .map(|(x, y)| x + y)
                        .collect();
                    assert!(set.contains(&sum), "{a:?} + {b:?}");
                }
            }
        }
    }

    #[test]
    fn generated_system_matches_hand_derived_y3_system() {
        // The three hand-derived inequalities for Y3 in the order
        // P1..P8 of `y3_irreducibles_match_known_list`, versus the
        // generated character inequalities evaluated on the same
        // parameter vectors: equivalent on the sampled box.
        let y3 = builtin_fan("Y3").unwrap();
        let basis: Vec<PositiveRelation> = [
            [1, 0, 0, 1, 0, 0, 0],
            [0, 1, 0, 0, 1, 0, 0],
            [0, 0, 1, 0, 0, 1, 0],
            [1, 1, 1, 0, 0, 0, 0],
            [0, 0, 0, 1, 1, 1, 0],
            [0, 1, 0, 1, 0, 0, 1],
            [0, 2, 1, 0, 0, 0, 1],
            [0, 0, 0, 2, 0, 1, 1],
        ]
        .iter()
        .map(|c| rel(&y3, c))
        .collect();
        let ineqs = cox_inequalities(&y3, 2);
        let hand = |m: &[i64; 8]| {
            m[0] + m[2] + 2 * m[6] >= 4 * m[1] + m[3] + m[4] + m[5] + 3 * m[7]
                && m[1] + m[2] + 2 * m[7] >= 4 * m[0] + m[3] + m[4] + m[5] + 3 * m[6]
                && m[0] + m[1] + 2 * (m[6] + m[7]) + 4 * m[5] >= m[3] + m[4] + 4 * m[2]
        };
        let generated = |m: &[i64; 8]| {
            let mut c = vec![0i64; 7];
            for (mi, p) in m.iter().zip(&basis) {
                for (slot, pc) in c.iter_mut().zip(p.coeffs()) {
                    *slot += mi * pc;
                }
            }
            let n: i64 = c.iter().sum();
            // r = 5/2: support sum >= 2N/5.
            ineqs.iter().all(|q| 5 * q.lhs(&c) >= 2 * n)
        };
        let check = |m: [i64; 8]| {
            assert_eq!(hand(&m), generated(&m), "{m:?}");
        };
        // Exhaustive small box.
        for a in 0..4i64 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        check([a, b, c, d, 0, 0, 0, 0]);
                        check([0, a, 0, b, 0, c, 0, d]);
                        check([a, 0, b, 0, c, 0, d, 0]);
                        check([0, 0, a, b, c, d, a, b]);
                    }
                }
            }
        }
        // Deterministic wider samples in the box m_i <= 10.
        let mut state = 0x2545f4914f6cdd1du64;
        for _ in 0..20_000 {
            let mut m = [0i64; 8];
            for slot in &mut m {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                *slot = (state % 11) as i64;
            }
            check(m);
        }
    }

    #[test]
    fn fan_spec_round_trips_through_json() {
        let fan = builtin_fan("Y3").unwrap();
        let json = serde_json::to_string(&fan.spec()).unwrap();
        let spec: FanSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(Fan::from_spec(spec).unwrap(), fan);
    }
}
