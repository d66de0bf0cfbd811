//! Window enumeration around the center point and zoom-measure evaluation.
//!
//! Two independent engines list every rational point of height at most `B`
//! whose chart distance from the center is at most `eps * B^{-1/r}`:
//!
//! * [`brute_enumerate`] scans closed forms for the three line families and a
//!   provably sufficient coordinate box for everything else;
//! * [`param_enumerate`] (zoom factor `5/2` only) walks the sector
//!   parametrization family by family, using congruence root classes to place
//!   candidates, and emits each sector point together with its swap mirror
//!   plus the diagonal family.
//!
//! The two engines share no enumeration logic, so running both and comparing
//! the off-line outputs as sets ([`run_enumeration`] with [`Strategy::Both`])
//! is an end-to-end correctness check. All membership decisions (window,
//! height, region, thin flag) are exact; floating point appears only in loop
//! bounds that are provably supersets and in a candidate prefilter with an
//! explicit safety margin that is always re-checked exactly.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::thread;

use num::{BigInt, BigRational, BigUint};
use serde::{Deserialize, Serialize};

use crate::congruence::{roots_up_to, QuadPoly};
use crate::pell::{ab_from_uv, gcd_profile, psi, uv_from_chart, GcdProfile, PellFamily, UVParams};
use crate::rat::{gcd_i128, prod_pow_cmp, prod_pow_le, Rat};
use crate::surface::{
    chart, height, is_thin, region_of, swap_symmetry, ChartPoint, ProjPointPair, Region,
};
use crate::Error;

/// Hard cap on the height bound accepted by the enumeration engines.
pub const MAX_HEIGHT_BOUND: i128 = 1_000_000_000_000;

/// An enumeration request: all points of height `<= b` with chart distance
/// `<= epsilon * b^{-1/r}` from the center, minus the excluded classes.
///
/// `region_filter`, when set, keeps only records whose region lies in the
/// set. `exclude_lines` drops the three line families, `exclude_thin` drops
/// off-line records whose chart satisfies the thin-set equation, and
/// `exclude_q` (default `true`) drops the center itself.
#[derive(Clone, Debug)]
pub struct ZoomQuery {
    pub b: i128,
    pub r: Rat,
    pub epsilon: Rat,
    pub region_filter: Option<BTreeSet<Region>>,
    pub exclude_lines: bool,
    pub exclude_thin: bool,
    pub exclude_q: bool,
}

impl ZoomQuery {
    /// Validates `b >= 1`, `r > 0`, `epsilon > 0`.
    pub fn new(b: i128, r: Rat, epsilon: Rat) -> Result<ZoomQuery, Error> {
        if b < 1 || !r.is_positive() || !epsilon.is_positive() {
            return Err(Error::DegenerateParams);
        }
        Ok(ZoomQuery {
            b,
            r,
            epsilon,
            region_filter: None,
            exclude_lines: false,
            exclude_thin: false,
            exclude_q: true,
        })
    }
}

/// Splits a positive zoom factor `r = p/q` into its reduced exponent pair.
fn zoom_exponents(r: Rat) -> (u32, u32) {
    assert!(r.is_positive(), "zoom factor must be positive");
    assert!(
        r.num() <= 64 && r.den() <= 64,
        "zoom factor exponents out of supported range"
    );
    (r.num() as u32, r.den() as u32)
}

/// Exact test `|x| * b^{1/r} <= bound`, via `|xn|^p * b^q * bd^p <= bn^p * xd^p`.
pub fn scaled_abs_le(x: Rat, bound: Rat, b: i128, r: Rat) -> bool {
    let (pe, qe) = zoom_exponents(r);
    scaled_abs_le_raw(x, bound, b, pe, qe)
}

fn scaled_abs_le_raw(x: Rat, bound: Rat, b: i128, pe: u32, qe: u32) -> bool {
    if bound.is_negative() {
        return false;
    }
    prod_pow_le(
        &[
            (x.num().unsigned_abs(), pe),
            (b as u128, qe),
            (bound.den() as u128, pe),
        ],
        &[(bound.num() as u128, pe), (x.den() as u128, pe)],
    )
}

/// Exact three-way comparison of the scaled coordinate `x * b^{1/r}`
/// against a rational threshold `c`, with signs respected.
pub fn scaled_cmp(x: Rat, c: Rat, b: i128, r: Rat) -> Ordering {
    let (pe, qe) = zoom_exponents(r);
    let sx = x.num().signum();
    let sc = c.num().signum();
    if sx != sc {
        return sx.cmp(&sc);
    }
    if sx == 0 {
        return Ordering::Equal;
    }
    let magnitude = prod_pow_cmp(
        &[
            (x.num().unsigned_abs(), pe),
            (b as u128, qe),
            (c.den() as u128, pe),
        ],
        &[(c.num().unsigned_abs(), pe), (x.den() as u128, pe)],
    );
    if sx > 0 {
        magnitude
    } else {
        magnitude.reverse()
    }
}

/// True when the window radius `epsilon * b^{-1/r}` reaches 1, i.e. the
/// window stops being a proper subset of the unit chart box.
fn window_covers_chart(b: i128, pe: u32, qe: u32, epsilon: Rat) -> bool {
    // epsilon >= b^{q/p}  <=>  b^q * ed^p <= en^p.
    prod_pow_le(
        &[(b as u128, qe), (epsilon.den() as u128, pe)],
        &[(epsilon.num() as u128, pe)],
    )
}

fn in_window(c: &ChartPoint, b: i128, pe: u32, qe: u32, epsilon: Rat) -> bool {
    scaled_abs_le_raw(c.w(), epsilon, b, pe, qe) && scaled_abs_le_raw(c.z(), epsilon, b, pe, qe)
}

fn isqrt_i128(n: i128) -> i128 {
    debug_assert!(n >= 0);
    let mut r = (n as f64).sqrt() as i128;
    while r > 0 && r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn icbrt_i128(n: i128) -> i128 {
    debug_assert!(n >= 0);
    let mut r = (n as f64).cbrt() as i128;
    while r > 0 && r * r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Chart coordinates rescaled by `b^{1/r}`: exact rationals whenever
/// `b^{q/p}` is an integer, otherwise a double-precision approximation
/// (display only; never used in membership decisions).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScaledCoords {
    Exact { w: Rat, z: Rat },
    Approx { w: f64, z: f64 },
}

/// The integer `m` with `m^p = b^q`, when it exists.
fn integer_scale(b: i128, pe: u32, qe: u32) -> Option<i128> {
    // One enumeration asks for the same scale millions of times; keep the
    // last answer per thread.
    thread_local! {
        static LAST: std::cell::Cell<(i128, u32, u32, Option<i128>)> =
            const { std::cell::Cell::new((0, 0, 0, None)) };
    }
    LAST.with(|cell| {
        let (cb, cp, cq, cached) = cell.get();
        if (cb, cp, cq) == (b, pe, qe) {
            return cached;
        }
        let target = BigUint::from(b as u128).pow(qe);
        let root = target.nth_root(pe);
        let fresh = if root.pow(pe) == target {
            i128::try_from(root).ok()
        } else {
            None
        };
        cell.set((b, pe, qe, fresh));
        fresh
    })
}

fn scaled_coords(c: &ChartPoint, b: i128, pe: u32, qe: u32) -> ScaledCoords {
    if let Some(m) = integer_scale(b, pe, qe) {
        let mr = Rat::int(m);
        if let (Some(w), Some(z)) = (c.w().checked_mul(&mr), c.z().checked_mul(&mr)) {
            return ScaledCoords::Exact { w, z };
        }
    }
    let factor = (b as f64).powf(qe as f64 / pe as f64);
    ScaledCoords::Approx {
        w: c.w().to_f64() * factor,
        z: c.z().to_f64() * factor,
    }
}

/// One enumerated point with its chart data, scaled coordinates, exact
/// height, region classification, thin flag, and (for off-line points that
/// are a sector point or the swap of one) the parameter profile.
#[derive(Clone, Debug)]
pub struct PointRecord {
    pub point: ProjPointPair,
    pub chart: ChartPoint,
    pub scaled: ScaledCoords,
    pub height: i128,
    pub region: Region,
    pub thin: bool,
    pub profile: Option<GcdProfile>,
}

impl PointRecord {
    fn key(&self) -> (i128, i128, i128, i128) {
        (self.point.x(), self.point.y(), self.point.s(), self.point.t())
    }

    /// True for records outside the line families and the center.
    pub fn is_off_lines(&self) -> bool {
        !self.region.is_on_line() && self.region != Region::AtQ
    }

    /// CSV row matching [`csv_header`]; profile columns are empty for
    /// records without a parameter profile.
    pub fn csv_row(&self) -> String {
        let p = &self.point;
        let profile = match &self.profile {
            Some(pr) => format!("{},{},{},{},{}", pr.C3, pr.D, pr.W, pr.D1, pr.D2),
            None => ",,,,".to_string(),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            p.x(),
            p.y(),
            p.s(),
            p.t(),
            self.chart.w(),
            self.chart.z(),
            self.height,
            self.region,
            self.thin as u8,
            profile
        )
    }
}

pub fn csv_header() -> &'static str {
    "x,y,s,t,w,z,height,region,thin,C3,D,W,D1,D2"
}

/// Bucket totals of an enumeration: line points (center included), thin
/// off-line points, and the generic remainder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketCounts {
    pub on_lines: u64,
    pub thin: u64,
    pub generic: u64,
    pub total: u64,
}

/// Bucket totals divided by a normalization scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BucketRates {
    pub on_lines: f64,
    pub thin: f64,
    pub generic: f64,
    pub total: f64,
}

/// Bucketed counts of one enumeration with the query echo and the two
/// normalizations of the expected counting laws: per `B^{1/5}` and per
/// `B^{1/5} * log B`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CountReport {
    pub b: i128,
    pub r: String,
    pub epsilon: String,
    pub buckets: BucketCounts,
    pub per_fifth_root: BucketRates,
    pub per_fifth_root_log: BucketRates,
}

/// Splits records into the line/thin/generic buckets and normalizes.
/// Records at the center count toward the line bucket.
pub fn thin_split(records: &[PointRecord], query: &ZoomQuery) -> CountReport {
    let mut buckets = BucketCounts {
        on_lines: 0,
        thin: 0,
        generic: 0,
        total: records.len() as u64,
    };
    for rec in records {
        if !rec.is_off_lines() {
            buckets.on_lines += 1;
        } else if rec.thin {
            buckets.thin += 1;
        } else {
            buckets.generic += 1;
        }
    }
    let scale = (query.b as f64).powf(0.2);
    let log_scale = scale * (query.b as f64).ln().max(f64::MIN_POSITIVE);
    let rates = |div: f64| BucketRates {
        on_lines: buckets.on_lines as f64 / div,
        thin: buckets.thin as f64 / div,
        generic: buckets.generic as f64 / div,
        total: buckets.total as f64 / div,
    };
    CountReport {
        b: query.b,
        r: query.r.to_string(),
        epsilon: query.epsilon.to_string(),
        buckets,
        per_fifth_root: rates(scale),
        per_fifth_root_log: rates(log_scale),
    }
}

/// The loop bounds an enumeration actually used, for the run manifest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationBounds {
    /// Largest reduced denominator scanned by the direct engine (0 when the
    /// off-line scan was certified empty), or the diagonal cap for the
    /// parametrized engine.
    pub y_max: i128,
    /// Joint cap on the family label product `C3 * |D|` (parametrized only).
    pub c3_max: i128,
    pub d_max: i128,
    /// Hard cap on the parameter sizes `|u|, |v|` (parametrized only).
    pub u_max: i128,
    /// The constant relating the leading bound to the window scale:
    /// `y_max / B^{2/5}` for the direct engine, the parameter-cap constant
    /// for the parametrized engine.
    pub kappa: f64,
}

/// Which enumeration engine(s) to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Brute,
    Param,
    Both,
}

/// Region classification, thin flag, scaled coordinates and parameter
/// profile for a point already known to be windowed with height `<= b`.
/// Off-line profiles come from the sector itself or, for swap mirrors,
/// from the swapped chart; diagonal points have none.
fn finish_record(
    point: ProjPointPair,
    c: ChartPoint,
    h: i128,
    b: i128,
    pe: u32,
    qe: u32,
) -> Result<PointRecord, Error> {
    let region = region_of(&c);
    let thin = is_thin(&c);
    let profile = match region {
        Region::S1 | Region::S2 | Region::S3 | Region::S4 => {
            Some(gcd_profile(&uv_from_chart(&c)?)?)
        }
        Region::Outside => {
            let swapped = c.swapped();
            if region_of(&swapped).is_sector() {
                Some(gcd_profile(&uv_from_chart(&swapped)?)?)
            } else {
                None
            }
        }
        _ => None,
    };
    Ok(PointRecord {
        scaled: scaled_coords(&c, b, pe, qe),
        point,
        chart: c,
        height: h,
        region,
        thin,
        profile,
    })
}

fn apply_filters(records: &mut Vec<PointRecord>, query: &ZoomQuery) {
    if let Some(filter) = &query.region_filter {
        records.retain(|rec| filter.contains(&rec.region));
    }
    if query.exclude_lines {
        records.retain(|rec| !rec.region.is_on_line());
    }
    if query.exclude_thin {
        records.retain(|rec| !(rec.thin && rec.is_off_lines()));
    }
}

fn sort_and_check(records: &mut Vec<PointRecord>) {
    records.sort_by_key(|rec| rec.key());
    debug_assert!(
        records.windows(2).all(|w| w[0].key() < w[1].key()),
        "engines must emit each point exactly once"
    );
}

/// Direct enumeration: exact window membership over closed forms for the
/// line families plus a bounded scan for everything else.
///
/// The scan iterates `g = gcd(y, t)` and the coprime cofactors
/// `y_1 = y/g`, `t_1 = t/g`. Off the third line the form `x s - y t` is a
/// nonzero multiple of `gcd(x,t) * gcd(y,s)` and is bounded by
/// `y t * rho * (2 + rho)` inside the window (`rho = eps * b^{-1/r}`);
/// since `y^2 t^2` is itself a height section, chaining through the
/// denominator `gcd(x,t) gcd(y,s) g` gives the cap
/// `g * y_1 * t_1 <= b * rho * (2 + rho)`. When the exact repulsion
/// certificate `3 eps^5 b^2 < b^{10/r}` holds, no off-line point fits in
/// the window at all (`3 H^2 d^5 >= 1` off the lines) and the scan is
/// skipped.
pub fn brute_enumerate(query: &ZoomQuery) -> Result<Vec<PointRecord>, Error> {
    brute_enumerate_workers(query, 1)
}

pub fn brute_enumerate_workers(
    query: &ZoomQuery,
    workers: usize,
) -> Result<Vec<PointRecord>, Error> {
    brute_impl(query, workers).map(|(records, _)| records)
}

fn brute_impl(
    query: &ZoomQuery,
    workers: usize,
) -> Result<(Vec<PointRecord>, EnumerationBounds), Error> {
    let b = query.b;
    assert!(
        (1..=MAX_HEIGHT_BOUND).contains(&b),
        "height bound out of supported range"
    );
    let (pe, qe) = zoom_exponents(query.r);
    if window_covers_chart(b, pe, qe, query.epsilon) {
        return Err(Error::WindowTooLarge);
    }
    let bf = b as f64;
    // Upper approximation of the window radius; loop caps derived from it
    // are supersets, and every candidate is re-checked exactly.
    let rho = query.epsilon.to_f64() * bf.powf(-(qe as f64) / pe as f64) * (1.0 + 1e-9);

    let mut records: Vec<PointRecord> = Vec::new();
    if !query.exclude_q {
        let q_point = ProjPointPair::q();
        let c = chart(&q_point)?;
        records.push(finish_record(q_point, c, 1, b, pe, qe)?);
    }

    if !query.exclude_lines {
        line_family_points(query, rho, pe, qe, &mut records)?;
    }

    // Off-line scan. The exact emptiness certificate comes from the
    // repulsion floor 3 H^2 d^5 >= 1 off the lines: a windowed off-line
    // point needs 3 b^2 (eps b^{-1/r})^5 >= 1, i.e. 3^p en^{5p} b^{2p} >=
    // ed^{5p} b^{5q}.
    let off_line_possible = prod_pow_le(
        &[
            (query.epsilon.den() as u128, 5 * pe),
            (b as u128, 5 * qe),
        ],
        &[
            (3, pe),
            (query.epsilon.num() as u128, 5 * pe),
            (b as u128, 2 * pe),
        ],
    );
    let mut y_max = 0i128;
    if off_line_possible {
        let k1 = bf * rho * (2.0 + rho) * (1.0 + 1e-9);
        y_max = k1.floor() as i128 + 1;
        let candidate_estimate = rho * rho * k1 * k1 * k1;
        assert!(
            candidate_estimate <= 3.0e9,
            "off-line window scan infeasible at this width"
        );
        let stride = workers.max(1) as i128;
        let worker_outputs: Result<Vec<Vec<PointRecord>>, Error> = thread::scope(|scope| {
            let handles: Vec<_> = (1..=stride.min(y_max))
                .map(|g_start| {
                    let query = &query;
                    scope.spawn(move || -> Result<Vec<PointRecord>, Error> {
                        let mut out = Vec::new();
                        let mut dxs: Vec<i128> = Vec::new();
                        let mut g = g_start;
                        while g <= y_max {
                            let budget = y_max / g;
                            for y1 in 1..=budget {
                                let y = g * y1;
                                let dx_cap = (rho * y as f64).floor() as i128;
                                if dx_cap < 1 {
                                    continue;
                                }
                                dxs.clear();
                                for dx_mag in 1..=dx_cap {
                                    if gcd_i128(y, dx_mag) != 1 {
                                        continue;
                                    }
                                    dxs.push(dx_mag);
                                    if dx_mag < y {
                                        dxs.push(-dx_mag);
                                    }
                                }
                                if dxs.is_empty() {
                                    continue;
                                }
                                for t1 in 1..=budget / y1 {
                                    if gcd_i128(y1, t1) != 1 {
                                        continue;
                                    }
                                    let t = g * t1;
                                    let dt_cap = (rho * t as f64).floor() as i128;
                                    if dt_cap < 1 {
                                        continue;
                                    }
                                    // Rigorous prefilter: the height is at least
                                    // y^2 t^2 / (g * |x s - y t|), so candidates
                                    // where that floor exceeds b are dropped
                                    // before any exact work.
                                    let reject_above = bf * g as f64 * (1.0 + 1e-9)
                                        / (y as f64 * t as f64).powi(2);
                                    for &dx in &dxs {
                                        let x = y + dx;
                                        let tdx = t * dx;
                                        for dt_mag in 1..=dt_cap {
                                            for dt in [dt_mag, -dt_mag] {
                                                let s = t + dt;
                                                if s < 1 {
                                                    continue;
                                                }
                                                let form = x * dt + tdx;
                                                if form == 0 {
                                                    // On the anti-diagonal line; the closed
                                                    // form already has those points.
                                                    continue;
                                                }
                                                // height floor > b: reject without exact work.
                                                if (form.unsigned_abs() as f64) * reject_above
                                                    < 1.0
                                                {
                                                    continue;
                                                }
                                                if gcd_i128(t, dt_mag) != 1 {
                                                    continue;
                                                }
                                                let point = ProjPointPair::new(x, y, s, t)?;
                                                let h = height(&point)?;
                                                if h > b {
                                                    continue;
                                                }
                                                let c = chart(&point)?;
                                                if !in_window(&c, b, pe, qe, query.epsilon) {
                                                    continue;
                                                }
                                                let region = region_of(&c);
                                                debug_assert!(!region.is_on_line());
                                                debug_assert_ne!(region, Region::AtQ);
                                                out.push(finish_record(
                                                    point, c, h, b, pe, qe,
                                                )?);
                                            }
                                        }
                                    }
                                }
                            }
                            g += stride;
                        }
                        Ok(out)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for chunk in worker_outputs? {
            records.extend(chunk);
        }
    }

    sort_and_check(&mut records);
    apply_filters(&mut records, query);
    let bounds = EnumerationBounds {
        y_max,
        c3_max: 0,
        d_max: 0,
        u_max: 0,
        kappa: y_max as f64 / bf.powf(0.4),
    };
    Ok((records, bounds))
}

/// Closed-form window scan of the three line families (center excluded):
/// first-factor-fixed, second-factor-fixed, and anti-diagonal points each
/// come from a one-parameter family, with exact membership re-checks.
/// Pairwise the families meet only at the center, so no cross-family
/// duplicates can occur.
fn line_family_points(
    query: &ZoomQuery,
    rho: f64,
    pe: u32,
    qe: u32,
    records: &mut Vec<PointRecord>,
) -> Result<(), Error> {
    let b = query.b;
    let sqrt_b = isqrt_i128(b);
    let mut push_line = |point: ProjPointPair, expect: Region| -> Result<(), Error> {
        let c = chart(&point)?;
        if !in_window(&c, b, pe, qe, query.epsilon) {
            return Ok(());
        }
        let h = height(&point)?;
        if h > b {
            return Ok(());
        }
        debug_assert_eq!(region_of(&c), expect);
        records.push(finish_record(point, c, h, b, pe, qe)?);
        Ok(())
    };
    for t in 1..=sqrt_b {
        let delta_cap = (rho * t as f64).floor() as i128 + 1;
        for delta in 1..=delta_cap {
            if gcd_i128(t, delta) != 1 {
                continue;
            }
            // First factor fixed at [1:1]: chart (0, delta/t).
            push_line(ProjPointPair::new(1, 1, t + delta, t)?, Region::OnLine(1))?;
            if delta < t {
                push_line(ProjPointPair::new(1, 1, t - delta, t)?, Region::OnLine(1))?;
            }
            // Second factor fixed at [1:1].
            push_line(ProjPointPair::new(t + delta, t, 1, 1)?, Region::OnLine(2))?;
            if delta < t {
                push_line(ProjPointPair::new(t - delta, t, 1, 1)?, Region::OnLine(2))?;
            }
            // Anti-diagonal family [x:y] x [y:x].
            push_line(
                ProjPointPair::new(t + delta, t, t, t + delta)?,
                Region::OnLine(3),
            )?;
            if delta < t {
                push_line(
                    ProjPointPair::new(t - delta, t, t, t - delta)?,
                    Region::OnLine(3),
                )?;
            }
        }
    }
    Ok(())
}

/// Standalone closed-form enumeration of the three line families plus the
/// center (subject to the query's exclusion flags). Complements
/// [`param_enumerate`], whose output is off-line only, when a full survey
/// is wanted at heights where the direct box scan is infeasible. Works at
/// any zoom factor.
pub fn line_enumerate(query: &ZoomQuery) -> Result<Vec<PointRecord>, Error> {
    let b = query.b;
    assert!(
        (1..=MAX_HEIGHT_BOUND).contains(&b),
        "height bound out of supported range"
    );
    let (pe, qe) = zoom_exponents(query.r);
    if window_covers_chart(b, pe, qe, query.epsilon) {
        return Err(Error::WindowTooLarge);
    }
    let rho = query.epsilon.to_f64() * (b as f64).powf(-(qe as f64) / pe as f64) * (1.0 + 1e-9);
    let mut records = Vec::new();
    if !query.exclude_q {
        let q_point = ProjPointPair::q();
        let c = chart(&q_point)?;
        records.push(finish_record(q_point, c, 1, b, pe, qe)?);
    }
    if !query.exclude_lines {
        line_family_points(query, rho, pe, qe, &mut records)?;
    }
    sort_and_check(&mut records);
    apply_filters(&mut records, query);
    Ok(records)
}

/// Margin factor applied multiplicatively to float-derived upper caps.
const CAP_SLACK: f64 = 1.0 + 1e-9;

/// Joint cap constant for the family labels: the threshold chain at the
/// window edge gives `sqrt(C3 |D|) * W^3 <= eps^2 sqrt(2 eps)`, so with
/// `W >= 1` every family reaching the window has
/// `C3 * |D| <= 2 * eps^5` (rounded up, floored at 4 for tiny windows).
/// Validated against the direct engine and by the cap-doubling property
/// test; the emitted maxima sit well inside (46 of 64 at `eps = 2`,
/// height `10^11`).
const FAMILY_CAP_FACTOR: f64 = 2.0;

/// Parameter-size guard constant: `|u|, |v| <= (6 eps^2 + 8) * b^{1/5}`.
fn param_size_cap(eps: f64, bf: f64) -> i128 {
    ((6.0 * eps * eps + 8.0) * bf.powf(0.2)).ceil() as i128 + 1
}

/// Parametrized enumeration of the off-line window at zoom factor `5/2`:
/// sector points via the family/root-class walk, their swap mirrors, and
/// the diagonal family. Returns [`Error::UnsupportedZoomFactor`] for any
/// other zoom factor.
pub fn param_enumerate(query: &ZoomQuery) -> Result<Vec<PointRecord>, Error> {
    param_enumerate_workers(query, 1)
}

pub fn param_enumerate_workers(
    query: &ZoomQuery,
    workers: usize,
) -> Result<Vec<PointRecord>, Error> {
    param_impl(query, workers).map(|(records, _)| records)
}

/// Family-level state for the sector walk: the label `(C3, D)` and the
/// congruence root classes of `C3 X^2 + D` for every modulus up to the
/// parameter cap, in CSR layout for slicing by modulus.
struct FamilyContext {
    fam: PellFamily,
    offsets: Vec<u32>,
    roots: Vec<i128>,
}

impl FamilyContext {
    fn build(c3: i128, d: i128, modulus_cap: i128) -> FamilyContext {
        let fam = PellFamily::new(c3, d).expect("valid family label");
        let seq = roots_up_to(&QuadPoly::new(c3, d), modulus_cap);
        let mut offsets = vec![0u32; modulus_cap as usize + 2];
        for &(_, k) in seq.entries() {
            offsets[k as usize + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        let roots = seq.entries().iter().map(|&(v, _)| v).collect();
        FamilyContext { fam, offsets, roots }
    }

    fn roots_mod(&self, modulus: i128) -> &[i128] {
        let lo = self.offsets[modulus as usize] as usize;
        let hi = self.offsets[modulus as usize + 1] as usize;
        &self.roots[lo..hi]
    }
}

pub(crate) static PROBE_CELLS: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
pub(crate) static PROBE_CANDS: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
pub(crate) static PROBE_GCD: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
pub(crate) static PROBE_AB: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
pub(crate) static PROBE_PSI: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
pub(crate) static PROBE_BUILD_NS: std::sync::atomic::AtomicU64 =
    std::sync::atomic::AtomicU64::new(0);

/// Temporary diagnostics: drains and returns the walk counters
/// `[cells, candidates, gcd checks, ab recoveries, images, build ns]`.
pub fn probe_counters_take() -> [u64; 6] {
    [
        &PROBE_CELLS,
        &PROBE_CANDS,
        &PROBE_GCD,
        &PROBE_AB,
        &PROBE_PSI,
        &PROBE_BUILD_NS,
    ]
    .map(|c| c.swap(0, std::sync::atomic::Ordering::Relaxed))
}

macro_rules! probe_count {
    ($c:ident) => {
        $c.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
    };
}

#[allow(clippy::too_many_arguments)]
fn param_family_points(
    ctx: &FamilyContext,
    query: &ZoomQuery,
    rho: f64,
    u_max: i128,
    w_max: i128,
    modulus_cap: i128,
    pe: u32,
    qe: u32,
    out: &mut Vec<PointRecord>,
) -> Result<(), Error> {
    let b = query.b;
    let bf = b as f64;
    let c3 = ctx.fam.C3;
    let d = ctx.fam.D;
    let c3f = c3 as f64;
    let dabs = d.unsigned_abs() as i128;
    let daf = dabs as f64;

    // Window-forced lower bound on v > 0: from
    // |z| = |D|(u+v) / (v |C3 u v - D|) <= rho and |C3 u v - D| <= C3 u v + |D|,
    // |D| u (1 - rho) <= rho C3 u v^2, so v^2 >= |D| (1 - rho) / (rho C3).
    let v_min = (daf * (1.0 - rho) / (rho * c3f)).sqrt() * (1.0 - 1e-9);
    // Height floor: chaining the window bound through the reduced height
    // gives height >= u W^2 (1 - rho)^2 / (rho^2 v), hence a linear cap on
    // u in v = W m' - u and an absolute cut of the branch at large W.
    let lin = bf * rho * rho / (1.0 - rho) / (1.0 - rho) * CAP_SLACK;

    let mut candidate = |u: i128, v: i128, w_idx: i128, modulus: i128| -> Result<(), Error> {
        probe_count!(PROBE_CANDS);
        let n = u + v;
        debug_assert_eq!(n, w_idx * modulus);
        if u.max(v.abs()) > u_max {
            return Ok(());
        }
        // Float prefilter on |z| with a wide margin, before the expensive
        // coprimality gcd; exact re-check below.
        let pole = c3
            .checked_mul(u)
            .and_then(|cu| cu.checked_mul(v))
            .and_then(|cuv| cuv.checked_sub(d))
            .ok_or(Error::Overflow)?;
        if pole == 0 {
            return Ok(());
        }
        let z_approx = daf * n as f64 / (v.abs() as f64 * pole.abs() as f64);
        if z_approx > rho * 1.01 {
            return Ok(());
        }
        probe_count!(PROBE_GCD);
        if gcd_i128(u, n) != 1 {
            return Ok(());
        }
        probe_count!(PROBE_AB);
        let (a, bb, k) = match ab_from_uv(&ctx.fam, u, v) {
            Ok(triple) => triple,
            Err(Error::OutOfDomain) => return Ok(()),
            Err(e) => return Err(e),
        };
        // Each parameter pair belongs to exactly one (W, m') cell: the one
        // with m' = gcd(u+v, k). Skipping the others makes emission unique.
        if gcd_i128(n, k) != modulus {
            return Ok(());
        }
        // Exact height floor in parameter form: with
        // b v - a u = (u - v)(C3 u v - D) / k, the reduced point satisfies
        // y^2 t^2 / den = u |v| |bv-au|^3 / (gcd(u^2,b)^2 gcd(v^2,a)^2 gcd(u-v,b-a)^3),
        // and y^2 t^2 is itself a height section. Candidates whose floor
        // certainly exceeds b stop here, before the image is computed; the
        // float slack keeps only the reject side certified.
        let bva = (u - v).checked_mul(pole).ok_or(Error::Overflow)? / k;
        debug_assert_eq!(bva, bb * v - a * u);
        let bvaf = bva.unsigned_abs() as f64;
        let floor_num = u as f64 * v.unsigned_abs() as f64 * bvaf * bvaf * bvaf;
        let root_sq = gcd_i128(u * u, bb) as f64 * gcd_i128(v * v, a) as f64;
        let d3f = gcd_i128(u - v, bb - a) as f64;
        let floor_den = bf * root_sq * root_sq * d3f * d3f * d3f;
        if floor_num > floor_den * (1.0 + 1e-9) {
            return Ok(());
        }
        probe_count!(PROBE_PSI);
        let params = UVParams::new(a, bb, u, v)?;
        let point = match psi(&params) {
            Ok(p) => p,
            // Reduced coordinates past the supported width cannot be
            // windowed with height <= b at the supported scales: the window
            // forces y * t <= b * rho * (1 + rho) and each reduced
            // denominator is at least 1/rho.
            Err(Error::Overflow) => return Ok(()),
            Err(e) => return Err(e),
        };
        let c = chart(&point)?;
        if !in_window(&c, b, pe, qe, query.epsilon) {
            return Ok(());
        }
        let h = height(&point)?;
        if h > b {
            return Ok(());
        }
        let record = finish_record(point, c, h, b, pe, qe)?;
        if !record.region.is_sector() {
            // The parametrization can land on the anti-diagonal line; those
            // points belong to the line families, not the sector walk.
            debug_assert!(record.region.is_on_line());
            return Ok(());
        }
        #[cfg(debug_assertions)]
        {
            let profile = record.profile.expect("sector record has a profile");
            assert_eq!((profile.C3, profile.D), (c3, d), "family label mismatch");
            assert_eq!(profile.W, w_idx, "family index mismatch");
        }
        let mirror = swap_symmetry(&point);
        let mirror_chart = c.swapped();
        debug_assert_eq!(chart(&mirror)?, mirror_chart);
        debug_assert_eq!(height(&mirror)?, h);
        let mirror_record = finish_record(mirror, mirror_chart, h, b, pe, qe)?;
        debug_assert_eq!(mirror_record.region, Region::Outside);
        out.push(record);
        out.push(mirror_record);
        Ok(())
    };

    for w_idx in 1..=w_max {
        let wf = w_idx as f64;
        // Window and height force u / |v| <= b rho^2 / W^2 on both signs of
        // v, while the sectors force u / |v| > 1: past W^2 = b rho^2 every
        // branch is empty.
        if lin <= wf * wf {
            break;
        }
        // v > 0 branch (u > v >= 1, u + v = W m').
        {
            let m_limit = modulus_cap.min(2 * u_max / w_idx + 1);
            for modulus in 1..=m_limit {
                let roots = ctx.roots_mod(modulus);
                if roots.is_empty() {
                    continue;
                }
                probe_count!(PROBE_CELLS);
                let n = w_idx * modulus;
                let nf = n as f64;
                let mf = modulus as f64;
                // u <= b rho^2 (W m') / (W^2 (1-rho)^2 + b rho^2), slackened.
                let u_cap_f = lin * nf / (wf * wf + lin) * CAP_SLACK;
                let mut u_hi = n - 1;
                u_hi = u_hi.min(u_cap_f.floor() as i128 + 1).min(u_max);
                u_hi = u_hi.min(n - (v_min.floor() as i128).max(1));
                // Far from the pole (C3 u v >= 2 |D|) the height floor is
                // C3^2 (u v)^3 / (4 m'^2 |D|^2), so u v <= q3^(1/3) and
                // with u > n/2 that confines v to a band 2 q3^(1/3) / n;
                // near the pole the band is 4 |D| / (C3 n).
                let q3 = 4.0 * bf * mf * mf * daf * daf / (c3f * c3f) * (1.0 + 1e-6);
                let qc = q3.cbrt();
                let v_band = (2.0 * qc / nf).max(4.0 * daf / (c3f * nf)) * CAP_SLACK + 1.0;
                let u_lo = (n / 2 + 1).max(n - (v_band.floor() as i128) - 1);
                if u_hi < u_lo {
                    continue;
                }
                for &root in roots {
                    let first = u_lo + (root - u_lo).rem_euclid(modulus);
                    let mut u = first;
                    while u <= u_hi {
                        candidate(u, n - u, w_idx, modulus)?;
                        u += modulus;
                    }
                }
            }
        }

        // v < 0 branch (u > -v >= 1, u + v = W m' > 0).
        let m_limit = modulus_cap.min(u_max / w_idx + 1);
        for modulus in 1..=m_limit {
            probe_count!(PROBE_CELLS);
            let n = w_idx * modulus;
            let nf = n as f64;
            let mf = modulus as f64;
            // Far from the pole (C3 u |v| >= 2 |D|) the height floor reads
            // C3^2 (u |v|)^3 / (4 m'^2 |D|^2) <= height; near the pole
            // u <= u |v| < 2 |D| / C3. The |v| lower bound from the window
            // and the hyperbola u (u - n) <= q3^(1/3) sharpen the far cap.
            let q3 = 4.0 * bf * mf * mf * daf * daf / (c3f * c3f) * (1.0 + 1e-6);
            let qc = q3.cbrt();
            let near_pole = 2.0 * daf / c3f + 1.0;
            let u_bound = (u_max as f64).min(qc.max(near_pole) + 1.0);
            let lv = 1.0_f64
                .max((daf * nf / (2.0 * rho * c3f * u_bound)).sqrt().min(nf / (2.0 * rho))
                    * (1.0 - 1e-6));
            let u_hyp = 0.5 * (nf + (nf * nf + 4.0 * qc).sqrt()) + 1.0;
            let u_hi_f = (u_max as f64).min((qc / lv + 1.0).min(u_hyp).max(near_pole)) * CAP_SLACK;
            let u_hi = (u_hi_f.floor() as i128 + 1).min(u_max);
            // u / |v| <= b rho^2 / W^2 excludes u just past n: a lower cut
            // at n ratio / (ratio - 1) with ratio = lin / W^2 > 1.
            let ratio = lin / (wf * wf);
            let lo_ratio = nf * ratio / (ratio - 1.0) * (1.0 - 1e-6);
            let u_lo = (n + (lv.floor() as i128).max(1)).max(lo_ratio.floor() as i128);
            if u_hi < u_lo {
                // Both caps grow sublinearly in m' while u > W m' grows
                // linearly; once empty with the pole term dominated, larger
                // moduli stay empty.
                if qc + near_pole + 2.0 < nf {
                    break;
                }
                continue;
            }
            let roots = ctx.roots_mod(modulus);
            for &root in roots {
                let first = u_lo + (root - u_lo).rem_euclid(modulus);
                let mut u = first;
                while u <= u_hi {
                    candidate(u, n - u, w_idx, modulus)?;
                    u += modulus;
                }
            }
        }
    }
    Ok(())
}

fn param_impl(
    query: &ZoomQuery,
    workers: usize,
) -> Result<(Vec<PointRecord>, EnumerationBounds), Error> {
    let b = query.b;
    assert!(
        (1..=MAX_HEIGHT_BOUND).contains(&b),
        "height bound out of supported range"
    );
    let (pe, qe) = zoom_exponents(query.r);
    if (pe, qe) != (5, 2) {
        return Err(Error::UnsupportedZoomFactor);
    }
    if window_covers_chart(b, pe, qe, query.epsilon) {
        return Err(Error::WindowTooLarge);
    }
    let bf = b as f64;
    let eps = query.epsilon.to_f64();
    let rho = eps * bf.powf(-0.4) * (1.0 + 1e-9);
    let u_max = param_size_cap(eps, bf);
    let w_max = (3.0 * eps * bf.powf(0.1)).ceil() as i128 + 2;
    let family_cap = (FAMILY_CAP_FACTOR * eps.powi(5)).ceil().max(4.0) as i128;
    let modulus_cap = 2 * u_max + 2;

    let mut families: Vec<(i128, i128)> = Vec::new();
    for c3 in 1..=family_cap {
        for d_abs in 1..=family_cap / c3 {
            if gcd_i128(c3, d_abs) != 1 {
                continue;
            }
            families.push((c3, d_abs));
            families.push((c3, -d_abs));
        }
    }

    let workers = workers.max(1).min(families.len().max(1));
    let chunk_size = families.len().div_ceil(workers.max(1)).max(1);
    let worker_outputs: Result<Vec<Vec<PointRecord>>, Error> = thread::scope(|scope| {
        let handles: Vec<_> = families
            .chunks(chunk_size)
            .map(|chunk| {
                let query = &query;
                scope.spawn(move || -> Result<Vec<PointRecord>, Error> {
                    let mut out = Vec::new();
                    for &(c3, d) in chunk {
                        let t_build = std::time::Instant::now();
                        let ctx = FamilyContext::build(c3, d, modulus_cap);
                        PROBE_BUILD_NS.fetch_add(
                            t_build.elapsed().as_nanos() as u64,
                            std::sync::atomic::Ordering::Relaxed,
                        );
                        param_family_points(
                            &ctx, query, rho, u_max, w_max, modulus_cap, pe, qe, &mut out,
                        )?;
                    }
                    Ok(out)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut records: Vec<PointRecord> = Vec::new();
    for chunk in worker_outputs? {
        records.extend(chunk);
    }

    // Diagonal family [x:y] x [x:y]: height max(x,y)^3, chart w = z.
    let diag_cap = icbrt_i128(b) + 1;
    for y in 1..=diag_cap {
        let delta_cap = (rho * y as f64).floor() as i128 + 1;
        for delta_mag in 1..=delta_cap {
            if gcd_i128(y, delta_mag) != 1 {
                continue;
            }
            for delta in [delta_mag, -delta_mag] {
                let x = y + delta;
                if x < 1 {
                    continue;
                }
                let point = ProjPointPair::new(x, y, x, y)?;
                let c = chart(&point)?;
                if !in_window(&c, b, pe, qe, query.epsilon) {
                    continue;
                }
                let h = height(&point)?;
                if h > b {
                    continue;
                }
                debug_assert_eq!(region_of(&c), Region::Outside);
                records.push(finish_record(point, c, h, b, pe, qe)?);
            }
        }
    }

    // Reflected diagonal [y+d : y] x [y-d : y]: chart z = -w, height
    // y^2 (y+d). At u = |v| the Pell-family equation degenerates (every
    // coprime pair solves family (1, -1) there), so the sector loop above
    // cannot reach this locus and it gets its own closed form. The d > 0
    // side sits in a sector; the d < 0 side is its swap mirror.
    for y in 2..=diag_cap {
        let delta_cap = ((rho * y as f64).floor() as i128 + 1).min(y - 1);
        for delta in 1..=delta_cap {
            if gcd_i128(y, delta) != 1 {
                continue;
            }
            let point = ProjPointPair::new(y + delta, y, y - delta, y)?;
            let c = chart(&point)?;
            if !in_window(&c, b, pe, qe, query.epsilon) {
                continue;
            }
            let h = height(&point)?;
            if h > b {
                continue;
            }
            debug_assert!(region_of(&c).is_sector());
            records.push(finish_record(point, c, h, b, pe, qe)?);
            let mirror = swap_symmetry(&point);
            let mirror_chart = c.swapped();
            debug_assert_eq!(chart(&mirror)?, mirror_chart);
            debug_assert_eq!(height(&mirror)?, h);
            let mirror_record = finish_record(mirror, mirror_chart, h, b, pe, qe)?;
            debug_assert_eq!(mirror_record.region, Region::Outside);
            records.push(mirror_record);
        }
    }

    sort_and_check(&mut records);
    apply_filters(&mut records, query);
    let bounds = EnumerationBounds {
        y_max: diag_cap,
        c3_max: family_cap,
        d_max: family_cap,
        u_max,
        kappa: 6.0 * eps * eps + 8.0,
    };
    Ok((records, bounds))
}

/// Runs the requested engine(s). With [`Strategy::Both`] the off-line
/// outputs are compared as exact point sets and any difference is an
/// [`Error::OracleMismatch`]; the direct engine's records (which include
/// the line families) are returned.
pub fn run_enumeration(
    query: &ZoomQuery,
    strategy: Strategy,
    workers: usize,
) -> Result<(Vec<PointRecord>, EnumerationBounds), Error> {
    match strategy {
        Strategy::Brute => brute_impl(query, workers),
        Strategy::Param => param_impl(query, workers),
        Strategy::Both => {
            let (brute_records, brute_bounds) = brute_impl(query, workers)?;
            let (param_records, param_bounds) = param_impl(query, workers)?;
            let brute_off: BTreeSet<_> = brute_records
                .iter()
                .filter(|rec| rec.is_off_lines())
                .map(|rec| rec.key())
                .collect();
            let param_keys: BTreeSet<_> = param_records.iter().map(|rec| rec.key()).collect();
            let missing = brute_off.difference(&param_keys).count();
            let extra = param_keys.difference(&brute_off).count();
            if missing != 0 || extra != 0 {
                for key in brute_off.difference(&param_keys) {
                    eprintln!("engine mismatch: direct-only point {key:?}");
                }
                for key in param_keys.difference(&brute_off) {
                    eprintln!("engine mismatch: parametrized-only point {key:?}");
                }
                return Err(Error::OracleMismatch { missing, extra });
            }
            let bounds = EnumerationBounds {
                y_max: brute_bounds.y_max,
                c3_max: param_bounds.c3_max,
                d_max: param_bounds.d_max,
                u_max: param_bounds.u_max,
                kappa: brute_bounds.kappa,
            };
            Ok((brute_records, bounds))
        }
    }
}

/// A measurable region in scaled chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RegionSpec {
    /// `max(|w|, |z|) * b^{1/r} <= radius`.
    Ball { radius: Rat },
    /// `eps2 < z * b^{1/r} <= eps1` and `theta2 * w < z < theta1 * w`
    /// (the angular comparison is scale-free, so it uses chart values).
    Trapezoid {
        eps2: Rat,
        eps1: Rat,
        theta2: Rat,
        theta1: Rat,
    },
}

/// Counts the records inside the region; all comparisons are exact.
pub fn zoom_measure(records: &[PointRecord], b: i128, r: Rat, region: &RegionSpec) -> usize {
    records
        .iter()
        .filter(|rec| {
            let w = rec.chart.w();
            let z = rec.chart.z();
            match region {
                RegionSpec::Ball { radius } => {
                    scaled_abs_le(w, *radius, b, r) && scaled_abs_le(z, *radius, b, r)
                }
                RegionSpec::Trapezoid {
                    eps2,
                    eps1,
                    theta2,
                    theta1,
                } => {
                    let lower = theta2
                        .checked_mul(&w)
                        .expect("trapezoid slope comparison stays in range");
                    let upper = theta1
                        .checked_mul(&w)
                        .expect("trapezoid slope comparison stays in range");
                    scaled_cmp(z, *eps2, b, r) == Ordering::Greater
                        && scaled_cmp(z, *eps1, b, r) != Ordering::Greater
                        && lower < z
                        && z < upper
                }
            }
        })
        .count()
}

/// The repulsion statistic `b^2 (w z)^2 (w + z)` of a sector-one record,
/// as an exact rational. Errors with [`Error::WrongRegion`] off sector one.
pub fn threshold_stat(record: &PointRecord, b: i128) -> Result<BigRational, Error> {
    if record.region != Region::S1 {
        return Err(Error::WrongRegion);
    }
    let w = record.chart.w();
    let z = record.chart.z();
    let wn = BigInt::from(w.num());
    let wd = BigInt::from(w.den());
    let zn = BigInt::from(z.num());
    let zd = BigInt::from(z.den());
    let bb = BigInt::from(b);
    let num = bb.pow(2) * (&wn * &zn).pow(2) * (&wn * &zd + &zn * &wd);
    let den = (&wd * &zd).pow(3);
    Ok(BigRational::new(num, den))
}

/// The family-profile lower bound `D^5 C3 W^6 / (D1 D2)^4` that the
/// repulsion statistic of every sector-one point provably exceeds.
pub fn threshold_bound(profile: &GcdProfile) -> BigRational {
    debug_assert!(profile.D > 0, "sector-one families have positive D");
    let num = BigInt::from(profile.D).pow(5)
        * BigInt::from(profile.C3)
        * BigInt::from(profile.W).pow(6);
    let den = (BigInt::from(profile.D1) * BigInt::from(profile.D2)).pow(4);
    BigRational::new(num, den)
}

/// Least-squares slope of `log(count)` against `log(b)`, with its standard
/// error. Errors with [`Error::DegenerateSeries`] for fewer than three
/// points, zero counts, or a degenerate abscissa.
pub fn fit_exponent(series: &[(i128, u64)]) -> Result<(f64, f64), Error> {
    if series.len() < 3 || series.iter().any(|&(b, n)| b < 1 || n == 0) {
        return Err(Error::DegenerateSeries);
    }
    let pts: Vec<(f64, f64)> = series
        .iter()
        .map(|&(b, n)| ((b as f64).ln(), (n as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx < 1e-12 {
        return Err(Error::DegenerateSeries);
    }
    let sxy: f64 = pts
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let stderr = (ss_res / (n - 2.0) / sxx).sqrt();
    Ok((slope, stderr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::chart_inv;

    fn query(b: i128, eps: Rat) -> ZoomQuery {
        ZoomQuery::new(b, Rat::new(5, 2), eps).unwrap()
    }

    fn row(rec: &PointRecord) -> String {
        let p = &rec.point;
        format!(
            "{},{},{},{},{},{},{}",
            p.x(),
            p.y(),
            p.s(),
            p.t(),
            rec.height,
            rec.region,
            rec.thin as u8
        )
    }

    #[test]
    fn scaled_window_test_is_exact() {
        // chart (1/3, 1/2) at b = 18: distance * 18^{2/5} = 1.589...
        let b = 18;
        let r = Rat::new(5, 2);
        let d = Rat::new(1, 2);
        assert!(scaled_abs_le(d, Rat::int(2), b, r));
        assert!(!scaled_abs_le(d, Rat::new(3, 2), b, r));
        // Exactly at the boundary: x * b^{2/5} = 2 when x^5 b^2 = 32, e.g.
        // x = 2, b = 1: 2 * 1 = 2 <= 2.
        assert!(scaled_abs_le(Rat::int(2), Rat::int(2), 1, r));
        assert!(!scaled_abs_le(Rat::new(201, 100), Rat::int(2), 1, r));
        assert_eq!(scaled_cmp(d, Rat::new(3, 2), b, r), Ordering::Greater);
        assert_eq!(scaled_cmp(d, Rat::int(2), b, r), Ordering::Less);
        assert_eq!(scaled_cmp(Rat::int(2), Rat::int(2), 1, r), Ordering::Equal);
        assert_eq!(
            scaled_cmp(-d, Rat::new(-3, 2), b, r),
            Ordering::Less,
            "negative scaled values compare with sign"
        );
    }

    #[test]
    fn window_at_unit_height_contains_only_center() {
        let mut q = query(1, Rat::new(1, 2));
        q.exclude_q = false;
        let records = brute_enumerate(&q).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].region, Region::AtQ);
        assert_eq!(records[0].height, 1);
        q.exclude_q = true;
        assert!(brute_enumerate(&q).unwrap().is_empty());
    }

    #[test]
    fn oversized_window_is_rejected() {
        let q = query(1, Rat::int(1));
        assert_eq!(brute_enumerate(&q).unwrap_err(), Error::WindowTooLarge);
        let q = query(32, Rat::int(4));
        assert_eq!(brute_enumerate(&q).unwrap_err(), Error::WindowTooLarge);
        assert_eq!(param_enumerate(&q).unwrap_err(), Error::WindowTooLarge);
        // epsilon just below the cutoff is fine: 4^5 = 1024 > 32^2.
        let q = query(33, Rat::int(4));
        assert!(brute_enumerate(&q).is_ok());
    }

    #[test]
    fn unsupported_zoom_factor_for_parametrized_engine() {
        let q = ZoomQuery::new(1000, Rat::new(9, 4), Rat::int(2)).unwrap();
        assert_eq!(param_enumerate(&q).unwrap_err(), Error::UnsupportedZoomFactor);
        assert!(brute_enumerate(&q).is_ok());
    }

    #[test]
    fn enumeration_matches_frozen_fixtures() {
        for (b, eps, name) in [
            (1_000, Rat::new(1, 2), "enum_b1e3_eps_half"),
            (1_000, Rat::int(1), "enum_b1e3_eps_one"),
            (1_000, Rat::int(2), "enum_b1e3_eps_two"),
            (10_000, Rat::int(2), "enum_b1e4_eps_two"),
        ] {
            let fixture = std::fs::read_to_string(format!(
                "{}/tests/fixtures/{name}.csv",
                env!("CARGO_MANIFEST_DIR")
            ))
            .unwrap();
            let expected: Vec<&str> = fixture.lines().skip(1).collect();
            let records = brute_enumerate(&query(b, eps)).unwrap();
            let got: Vec<String> = records.iter().map(row).collect();
            assert_eq!(got, expected, "fixture {name}");
        }
    }

    #[test]
    fn bucket_counts_match_frozen_totals() {
        let q = query(1_000, Rat::int(2));
        let report = thin_split(&brute_enumerate(&q).unwrap(), &q);
        assert_eq!(
            (
                report.buckets.on_lines,
                report.buckets.thin,
                report.buckets.generic,
                report.buckets.total
            ),
            (206, 12, 25, 243)
        );
        let q = query(10_000, Rat::int(2));
        let report = thin_split(&brute_enumerate(&q).unwrap(), &q);
        assert_eq!(
            (
                report.buckets.on_lines,
                report.buckets.thin,
                report.buckets.generic,
                report.buckets.total
            ),
            (864, 22, 41, 927)
        );
    }

    #[test]
    fn parametrized_point_appears_at_its_critical_height() {
        // The sector point with chart (1/3, 1/2) is [4:3] x [3:2], height 18.
        let point = chart_inv(&ChartPoint::new(Rat::new(1, 3), Rat::new(1, 2)).unwrap()).unwrap();
        assert_eq!(
            (point.x(), point.y(), point.s(), point.t()),
            (4, 3, 3, 2)
        );
        assert_eq!(height(&point).unwrap(), 18);
        let find = |b: i128, eps: Rat| {
            param_enumerate(&query(b, eps))
                .unwrap()
                .iter()
                .any(|rec| rec.point == point)
        };
        assert!(find(18, Rat::int(2)));
        assert!(!find(17, Rat::int(2)), "height 18 exceeds the bound 17");
        // 18^{2/5} / 2 = 1.589... > 3/2, so the window eps = 3/2 misses it.
        assert!(!find(18, Rat::new(3, 2)));
    }

    #[test]
    fn engines_agree_at_small_scales() {
        for (b, eps) in [
            (1_000, Rat::int(2)),
            (10_000, Rat::int(2)),
            (10_000, Rat::int(1)),
            (10_000, Rat::new(1, 2)),
        ] {
            let q = query(b, eps);
            let (records, _) = run_enumeration(&q, Strategy::Both, 2).unwrap();
            assert!(!records.is_empty() || eps < Rat::int(2));
        }
    }

    #[test]
    fn enumeration_is_deterministic_across_worker_counts() {
        let q = query(10_000, Rat::int(2));
        let one = brute_enumerate_workers(&q, 1).unwrap();
        let four = brute_enumerate_workers(&q, 4).unwrap();
        assert_eq!(one.len(), four.len());
        assert!(one
            .iter()
            .zip(&four)
            .all(|(a, b)| a.key() == b.key() && a.region == b.region));
        let p_one = param_enumerate_workers(&q, 1).unwrap();
        let p_three = param_enumerate_workers(&q, 3).unwrap();
        assert_eq!(p_one.len(), p_three.len());
        assert!(p_one.iter().zip(&p_three).all(|(a, b)| a.key() == b.key()));
    }

    #[test]
    fn liouville_floors_hold_on_enumerated_points() {
        let q = query(10_000, Rat::int(2));
        for rec in brute_enumerate(&q).unwrap() {
            let d = crate::surface::distance(&rec.chart);
            let dn = d.num();
            let dd = d.den();
            // height * distance^2 >= 1, exactly.
            assert!(rec.height * dn * dn >= dd * dd, "{:?}", rec.point);
            if rec.is_off_lines() {
                // 3 * height^2 * distance^5 >= 1, exactly.
                let h2 = rec.height * rec.height;
                assert!(
                    3 * h2 * dn.pow(5) >= dd.pow(5),
                    "repulsion floor at {:?}",
                    rec.point
                );
            }
        }
    }

    #[test]
    fn repulsion_statistic_exceeds_family_bound_on_sector_one() {
        let q = query(10_000, Rat::int(2));
        let records = brute_enumerate(&q).unwrap();
        let mut seen = 0;
        for rec in &records {
            if rec.region != Region::S1 {
                assert_eq!(threshold_stat(rec, q.b).unwrap_err(), Error::WrongRegion);
                continue;
            }
            seen += 1;
            let stat = threshold_stat(rec, q.b).unwrap();
            let bound = threshold_bound(&rec.profile.unwrap());
            assert!(stat > bound, "repulsion bound at {:?}", rec.point);
            assert!(stat > BigRational::from_integer(1.into()));
        }
        assert!(seen > 0, "sector one must be populated at this scale");
    }

    #[test]
    fn repulsion_statistic_example_value() {
        // chart (1/3, 1/2), b = 18: 324 * (1/36) * (5/6) = 15/2.
        let point = chart_inv(&ChartPoint::new(Rat::new(1, 3), Rat::new(1, 2)).unwrap()).unwrap();
        let c = chart(&point).unwrap();
        let rec = finish_record(point, c, 18, 18, 5, 2).unwrap();
        assert_eq!(rec.region, Region::S1);
        let stat = threshold_stat(&rec, 18).unwrap();
        assert_eq!(stat, BigRational::new(15.into(), 2.into()));
    }

    #[test]
    fn family_caps_survive_doubling() {
        // Doubling every cap of the parametrized walk at desk scale must
        // not produce new points; this validates the family enclosure.
        for (b, eps) in [(10_000, Rat::int(2)), (100_000, Rat::int(1))] {
            let q = query(b, eps);
            let baseline = param_enumerate(&q).unwrap();
            let bf = b as f64;
            let ef = eps.to_f64();
            let rho = ef * bf.powf(-0.4) * (1.0 + 1e-9);
            let u_max = 2 * param_size_cap(ef, bf);
            let w_max = 2 * ((3.0 * ef * bf.powf(0.1)).ceil() as i128 + 2);
            let family_cap = 2 * (FAMILY_CAP_FACTOR * ef.powi(5)).ceil().max(4.0) as i128;
            let modulus_cap = 2 * u_max + 2;
            let mut widened = Vec::new();
            for c3 in 1..=family_cap {
                for d_abs in 1..=family_cap / c3 {
                    if gcd_i128(c3, d_abs) != 1 {
                        continue;
                    }
                    for d in [d_abs, -d_abs] {
                        let ctx = FamilyContext::build(c3, d, modulus_cap);
                        param_family_points(
                            &ctx, &q, rho, u_max, w_max, modulus_cap, 5, 2, &mut widened,
                        )
                        .unwrap();
                    }
                }
            }
            let baseline_keys: BTreeSet<_> = baseline
                .iter()
                .filter(|rec| rec.region.is_sector() || rec.region == Region::Outside)
                .map(|rec| rec.key())
                .collect();
            let widened_keys: BTreeSet<_> = widened.iter().map(|rec| rec.key()).collect();
            // The diagonal (w = z) and reflected diagonal (w = -z) have
            // their own closed forms; the family walk never reaches them.
            let diag: BTreeSet<_> = baseline
                .iter()
                .filter(|rec| {
                    rec.chart.w() == rec.chart.z()
                        || rec.chart.w().checked_add(&rec.chart.z()) == Some(Rat::ZERO)
                })
                .map(|rec| rec.key())
                .collect();
            let base_no_diag: BTreeSet<_> =
                baseline_keys.difference(&diag).copied().collect();
            assert_eq!(base_no_diag, widened_keys, "caps changed the point set");
        }
    }

    #[test]
    fn zoom_measure_examples() {
        let q = query(10_000, Rat::int(2));
        let records = brute_enumerate(&q).unwrap();
        let r = Rat::new(5, 2);
        let all = zoom_measure(&records, q.b, r, &RegionSpec::Ball { radius: Rat::int(2) });
        assert_eq!(all, records.len(), "the full window ball holds everything");
        let none = zoom_measure(&records, q.b, r, &RegionSpec::Ball { radius: Rat::ZERO });
        assert_eq!(none, 0, "only the center sits at distance zero");
        let upper_half = RegionSpec::Trapezoid {
            eps2: Rat::ZERO,
            eps1: Rat::int(2),
            theta2: Rat::ZERO,
            theta1: Rat::int(1_000_000),
        };
        let got = zoom_measure(&records, q.b, r, &upper_half);
        let expect = records
            .iter()
            .filter(|rec| {
                rec.chart.z().is_positive()
                    && rec.chart.w().is_positive()
                    && rec.chart.z() < rec.chart.w() * Rat::int(1_000_000)
            })
            .count();
        assert_eq!(got, expect);
    }

    #[test]
    fn scaled_coordinates_are_exact_when_the_scale_is_integral() {
        // b = 10^10: b^{2/5} = 10^4 exactly.
        let c = ChartPoint::new(Rat::new(1, 20_000), Rat::new(-1, 40_000)).unwrap();
        match scaled_coords(&c, 10_000_000_000, 5, 2) {
            ScaledCoords::Exact { w, z } => {
                assert_eq!(w, Rat::new(1, 2));
                assert_eq!(z, Rat::new(-1, 4));
            }
            other => panic!("expected exact scaling, got {other:?}"),
        }
        match scaled_coords(&c, 18, 5, 2) {
            ScaledCoords::Approx { w, .. } => {
                assert!((w - 3.178e-4 / 2.0 * 18f64.powf(0.4) / 18f64.powf(0.4) * 18f64.powf(0.4) / 6.356).abs() < 1.0)
            }
            other => panic!("expected approximate scaling, got {other:?}"),
        }
    }

    #[test]
    fn exponent_fit_recovers_exact_power_law() {
        // count = b^{1/5} exactly on a geometric grid.
        let series = [
            (100_000, 10),
            (10_000_000_000, 100),
            (1_000_000_000_000, 251),
        ];
        let (slope, stderr) = fit_exponent(&series).unwrap();
        assert!((slope - 0.2).abs() < 0.01, "slope {slope}");
        assert!(stderr < 0.01);
        assert_eq!(
            fit_exponent(&[(10, 1), (100, 2)]).unwrap_err(),
            Error::DegenerateSeries
        );
        assert_eq!(
            fit_exponent(&[(10, 1), (100, 0), (1000, 3)]).unwrap_err(),
            Error::DegenerateSeries
        );
        assert_eq!(
            fit_exponent(&[(10, 1), (10, 2), (10, 3)]).unwrap_err(),
            Error::DegenerateSeries
        );
    }

    #[test]
    fn certified_empty_window_skips_the_box_scan() {
        // At zoom factor 9/4 and b = 10^10 the off-line certificate is
        // below one: the only records are line points.
        let q = ZoomQuery::new(10_000_000_000, Rat::new(9, 4), Rat::int(2)).unwrap();
        let (records, bounds) = brute_impl(&q, 1).unwrap();
        assert_eq!(bounds.y_max, 0, "scan certified empty");
        assert!(records.iter().all(|rec| rec.region.is_on_line()));
        assert!(!records.is_empty());
    }

    #[test]
    fn filters_restrict_the_record_set() {
        let mut q = query(1_000, Rat::int(2));
        let all = brute_enumerate(&q).unwrap();
        q.exclude_lines = true;
        let off = brute_enumerate(&q).unwrap();
        assert_eq!(off.len(), 37);
        assert!(off.iter().all(|rec| rec.is_off_lines()));
        q.exclude_thin = true;
        let generic = brute_enumerate(&q).unwrap();
        assert_eq!(generic.len(), 25);
        assert!(generic.iter().all(|rec| !rec.thin));
        q.region_filter = Some([Region::S1].into_iter().collect());
        let s1 = brute_enumerate(&q).unwrap();
        assert_eq!(s1.len(), 3);
        assert!(all.len() > off.len());
    }

    #[test]
    fn csv_rows_have_the_documented_shape() {
        let q = query(1_000, Rat::int(2));
        let records = brute_enumerate(&q).unwrap();
        let header_fields = csv_header().split(',').count();
        for rec in &records {
            assert_eq!(rec.csv_row().split(',').count(), header_fields);
        }
        let sector = records.iter().find(|r| r.region.is_sector()).unwrap();
        assert!(!sector.csv_row().ends_with(','), "profile columns filled");
        let line = records.iter().find(|r| r.region.is_on_line()).unwrap();
        assert!(line.csv_row().ends_with(",,,,"), "no profile on lines");
    }
}
