//! Root-counting engine for quadratic congruences `F(X) = lead*X^2 +
//! constant`: the root-count function `rho`, its summatory average, the
//! ordered sequence of rational roots `v/k`, exact star discrepancy,
//! interval counts, the split/irreducible family dichotomy, and the
//! central window-counting routine used by the zoom analysis.
//!
//! Two `rho` paths are exposed: a direct residue scan and a
//! multiplicative lift (prime powers coprime to `2*lead*constant` need a
//! single Legendre symbol; the remaining "bad" primes use layered root
//! lifting). The summatory and sequence builders share a smallest-prime-
//! factor sieve so the total cost stays near `X log X`.

use crate::pell::PellFamily;
use crate::rat::{is_square_i128, Rat};
use crate::Error;
use std::collections::HashMap;

/// `F(X) = lead * X^2 + constant`, both coefficients nonzero.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct QuadPoly {
    pub lead: i128,
    pub constant: i128,
}

impl QuadPoly {
    pub fn new(lead: i128, constant: i128) -> QuadPoly {
        assert!(lead != 0 && constant != 0, "coefficients must be nonzero");
        QuadPoly { lead, constant }
    }

    pub fn eval(&self, x: i128) -> i128 {
        self.lead
            .checked_mul(x)
            .and_then(|v| v.checked_mul(x))
            .and_then(|v| v.checked_add(self.constant))
            .expect("polynomial evaluation overflow")
    }

    /// True iff `p` divides `2 * lead * constant`: at such primes the
    /// prime-power root count is not constant in the exponent and the
    /// engine falls back to layered lifting.
    fn is_bad_prime(&self, p: i128) -> bool {
        p == 2 || self.lead % p == 0 || self.constant % p == 0
    }
}

fn mul_mod(a: i128, b: i128, m: i128) -> i128 {
    ((a as u128 * b as u128) % m as u128) as i128
}

fn pow_mod(mut base: i128, mut exp: i128, m: i128) -> i128 {
    base = base.rem_euclid(m);
    let mut acc = 1i128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Legendre symbol (a/p) for odd prime p: 0, 1, or -1.
fn legendre(a: i128, p: i128) -> i128 {
    let r = pow_mod(a, (p - 1) / 2, p);
    if r == p - 1 {
        -1
    } else {
        r
    }
}

fn inv_mod(a: i128, m: i128) -> i128 {
    // Extended Euclid; caller guarantees gcd(a, m) = 1.
    let (mut r0, mut r1) = (m, a.rem_euclid(m));
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "inverse requires coprime arguments");
    t0.rem_euclid(m)
}

/// Square root of `a` mod odd prime `p` (Tonelli–Shanks); `None` for
/// non-residues.
fn sqrt_mod_p(a: i128, p: i128) -> Option<i128> {
    let a = a.rem_euclid(p);
    if a == 0 {
        return Some(0);
    }
    if legendre(a, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while legendre(z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Direct scan: `#{0 <= k < n : n | F(k)}`.
pub fn rho_naive(f: &QuadPoly, n: i128) -> i128 {
    assert!(n >= 1);
    (0..n).filter(|&k| f.eval(k).rem_euclid(n) == 0).count() as i128
}

const PRIME_POWER_GUARD: i128 = 100_000_000;

/// Sorted roots of `F` mod `p^e`, by layered lifting from level 1: every
/// root mod `p^k` reduces to a root mod `p^(k-1)`, so candidates at each
/// level are `r + j * p^(k-1)`. Works at every prime; it is the only
/// correct general path at bad primes.
fn layered_roots(f: &QuadPoly, p: i128, e: u32) -> Vec<i128> {
    let mut modulus = 1i128;
    let mut roots: Vec<i128> = vec![0];
    for _ in 0..e {
        assert!(
            modulus <= PRIME_POWER_GUARD / p,
            "prime power beyond supported scan range"
        );
        let next = modulus * p;
        let mut lifted = Vec::new();
        for &r in &roots {
            let mut cand = r;
            for _ in 0..p {
                if f.eval(cand).rem_euclid(next) == 0 {
                    lifted.push(cand);
                }
                cand += modulus;
            }
        }
        modulus = next;
        roots = lifted;
        if roots.is_empty() {
            break;
        }
    }
    roots.sort_unstable();
    roots
}

/// Sorted roots of `F` mod `p^e` for a good prime (odd, coprime to
/// `lead * constant`): Tonelli–Shanks at level 1 and Hensel lifting
/// upward (the derivative `2*lead*r` is invertible there).
fn good_prime_roots(f: &QuadPoly, p: i128, e: u32) -> Vec<i128> {
    debug_assert!(!f.is_bad_prime(p));
    let target = (-f.constant).rem_euclid(p);
    let target = mul_mod(target, inv_mod(f.lead.rem_euclid(p), p), p);
    let Some(r) = sqrt_mod_p(target, p) else {
        return Vec::new();
    };
    debug_assert!(r != 0, "r = 0 would force p | constant");
    let mut roots = vec![r, p - r];
    let mut modulus = p;
    for _ in 1..e {
        assert!(
            modulus <= PRIME_POWER_GUARD / p,
            "prime power beyond supported range"
        );
        let next = modulus * p;
        for r in roots.iter_mut() {
            let deriv = mul_mod(2 * f.lead.rem_euclid(next), *r, next);
            let step = mul_mod(
                f.eval(*r).rem_euclid(next),
                inv_mod(deriv, next),
                next,
            );
            *r = (*r - step).rem_euclid(next);
            debug_assert_eq!(f.eval(*r).rem_euclid(next), 0);
        }
        modulus = next;
    }
    roots.sort_unstable();
    roots
}

fn prime_power_roots(f: &QuadPoly, p: i128, e: u32) -> Vec<i128> {
    if f.is_bad_prime(p) {
        layered_roots(f, p, e)
    } else {
        good_prime_roots(f, p, e)
    }
}

fn factorize(mut n: i128) -> Vec<(i128, u32)> {
    let mut out = Vec::new();
    let mut p = 2i128;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Multiplicative root count `#{0 <= k < n : n | F(k)}`: one Legendre
/// symbol per good prime power (`rho(p^e) = rho(p)` there), layered
/// lifting at primes dividing `2 * lead * constant`.
pub fn rho(f: &QuadPoly, n: i128) -> i128 {
    assert!(n >= 1);
    let mut acc = 1i128;
    for (p, e) in factorize(n) {
        let local = if f.is_bad_prime(p) {
            layered_roots(f, p, e).len() as i128
        } else {
            1 + legendre((-f.lead).checked_mul(f.constant).expect("overflow"), p)
        };
        acc *= local;
        if acc == 0 {
            return 0;
        }
    }
    acc
}

const SIEVE_GUARD: usize = 20_000_000;

/// Smallest-prime-factor table for 0..=x.
fn spf_sieve(x: usize) -> Vec<u32> {
    assert!(x <= SIEVE_GUARD, "sieve bound beyond supported range");
    let mut spf: Vec<u32> = vec![0; x + 1];
    for i in 2..=x {
        if spf[i] == 0 {
            let mut j = i;
            while j <= x {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

fn factor_via_spf(mut n: usize, spf: &[u32]) -> Vec<(i128, u32)> {
    let mut out = Vec::new();
    while n > 1 {
        let p = spf[n] as usize;
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        out.push((p as i128, e));
    }
    out
}

/// `sum_{n <= x} rho(F, n)`, via a shared smallest-prime-factor sieve
/// and per-prime-power caching (near `x log x` total work).
pub fn rho_sum(f: &QuadPoly, x: i128) -> i128 {
    assert!(x >= 1);
    let spf = spf_sieve(x as usize);
    let mut good_cache: HashMap<i128, i128> = HashMap::new();
    let mut bad_cache: HashMap<(i128, u32), i128> = HashMap::new();
    let mut total = 0i128;
    for n in 1..=x as usize {
        let mut acc = 1i128;
        for (p, e) in factor_via_spf(n, &spf) {
            let local = if f.is_bad_prime(p) {
                *bad_cache
                    .entry((p, e))
                    .or_insert_with(|| layered_roots(f, p, e).len() as i128)
            } else {
                *good_cache.entry(p).or_insert_with(|| {
                    1 + legendre((-f.lead).checked_mul(f.constant).expect("overflow"), p)
                })
            };
            acc *= local;
            if acc == 0 {
                break;
            }
        }
        total += acc;
    }
    total
}

/// The ordered rational roots `v/k` of `F` with `k <= X`: entries
/// `(v, k)` sorted by `k` ascending then `v` ascending. Modulus 1
/// contributes the single entry `(0, 1)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RootSequence {
    entries: Vec<(i128, i128)>,
}

impl RootSequence {
    pub fn entries(&self) -> &[(i128, i128)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The roots as exact rationals `v/k` in `[0, 1)`.
    pub fn fractions(&self) -> Vec<Rat> {
        self.entries.iter().map(|&(v, k)| Rat::new(v, k)).collect()
    }
}

/// Roots of `F` mod `n` (sorted), assembled from prime-power root lists
/// by Chinese remaindering.
fn roots_mod_n(
    f: &QuadPoly,
    factors: &[(i128, u32)],
    cache: &mut HashMap<(i128, u32), Vec<i128>>,
) -> Vec<i128> {
    let mut acc: Vec<i128> = vec![0];
    let mut modulus = 1i128;
    for &(p, e) in factors {
        let local = cache
            .entry((p, e))
            .or_insert_with(|| prime_power_roots(f, p, e));
        if local.is_empty() {
            return Vec::new();
        }
        let pe = p.pow(e);
        let inv = inv_mod(modulus.rem_euclid(pe), pe);
        let mut next = Vec::with_capacity(acc.len() * local.len());
        for &r0 in &acc {
            for &r1 in local.iter() {
                let diff = (r1 - r0).rem_euclid(pe);
                next.push(r0 + modulus * mul_mod(diff, inv, pe));
            }
        }
        modulus *= pe;
        acc = next;
    }
    acc.sort_unstable();
    acc
}

/// All `(v, k)` with `k <= x` and `F(v) = 0 mod k`, in the canonical
/// order; its length equals `rho_sum(F, x)`.
pub fn roots_up_to(f: &QuadPoly, x: i128) -> RootSequence {
    assert!(x >= 1);
    let spf = spf_sieve(x as usize);
    let mut cache: HashMap<(i128, u32), Vec<i128>> = HashMap::new();
    let mut entries = Vec::new();
    for k in 1..=x as usize {
        let factors = factor_via_spf(k, &spf);
        for v in roots_mod_n(f, &factors, &mut cache) {
            entries.push((v, k as i128));
        }
    }
    RootSequence { entries }
}

/// Exact star discrepancy of a finite sample in `[0, 1)`:
/// `max_i max(i/N - x_(i), x_(i) - (i-1)/N)` over the sorted sample.
pub fn star_discrepancy(samples: &[Rat]) -> Result<Rat, Error> {
    if samples.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut sorted = samples.to_vec();
    sorted.sort();
    debug_assert!(sorted[0] >= Rat::ZERO && *sorted.last().unwrap() < Rat::ONE);
    let n = sorted.len() as i128;
    let mut best = Rat::ZERO;
    for (idx, x) in sorted.iter().enumerate() {
        let i = idx as i128 + 1;
        let hi = Rat::new(i, n) - *x;
        let lo = *x - Rat::new(i - 1, n);
        best = best.max(hi).max(lo);
    }
    Ok(best)
}

/// `#{(v, k): k <= x, F(v) = 0 mod k, lo <= v/k < hi}`.
pub fn interval_count(f: &QuadPoly, x: i128, lo: Rat, hi: Rat) -> i128 {
    roots_up_to(f, x)
        .fractions()
        .into_iter()
        .filter(|r| *r >= lo && *r < hi)
        .count() as i128
}

/// True iff both `C3` and `-D` are perfect squares (the families whose
/// congruence polynomial splits over the rationals; they carry the thin
/// accumulating points).
pub fn is_split(fam: &PellFamily) -> bool {
    fam.D < 0 && is_square_i128(fam.C3) && is_square_i128(-fam.D)
}

/// Weight function descriptor for [`central_count`]: either a positive
/// constant or the scaled nodal form `G(x) = scale * x * (c - x)^2`,
/// which is positive on `(0, c)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GDescriptor {
    Const(Rat),
    ScaledNodal { scale: Rat, c: Rat },
}

impl GDescriptor {
    pub fn constant(g: Rat) -> Result<GDescriptor, Error> {
        if !g.is_positive() {
            return Err(Error::DegenerateParams);
        }
        Ok(GDescriptor::Const(g))
    }

    pub fn scaled_nodal(scale: Rat, c: Rat) -> Result<GDescriptor, Error> {
        if !scale.is_positive() || !c.is_positive() {
            return Err(Error::DegenerateParams);
        }
        Ok(GDescriptor::ScaledNodal { scale, c })
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, x: Rat) -> Rat {
        match self {
            GDescriptor::Const(g) => *g,
            GDescriptor::ScaledNodal { scale, c } => {
                let d = *c - x;
                *scale * x * d * d
            }
        }
    }
}

fn isqrt_i128(n: i128) -> i128 {
    assert!(n >= 0);
    (n as u128).isqrt() as i128
}

/// Largest `m >= 0` with `m^2 * low <= x` for a positive rational lower
/// bound `low` of `G` on the window.
fn quadratic_m_cap(low: Rat, x: i128) -> i128 {
    debug_assert!(low.is_positive());
    // m^2 <= x * den / num.
    isqrt_i128(x.checked_mul(low.den()).expect("overflow") / low.num())
}

struct CentralWindow {
    m_cap: i128,
    // For the nodal form with theta2 = 0 the value x = 0 is handled by a
    // separate divisor-finite enumeration and skipped in the main scan.
    zero_boundary: bool,
}

fn central_window(
    g: &GDescriptor,
    a: Rat,
    theta2: Rat,
    theta1: Rat,
    x: i128,
) -> Result<CentralWindow, Error> {
    match g {
        GDescriptor::Const(val) => Ok(CentralWindow {
            m_cap: quadratic_m_cap(*val, x),
            zero_boundary: false,
        }),
        GDescriptor::ScaledNodal { scale, c } => {
            // The nodal form vanishes at 0 and c; a window touching
            // either from the wrong side would make the constraint
            // vacuous for infinitely many m.
            if theta2 < Rat::ZERO || theta1 >= *c {
                return Err(Error::BadWindow);
            }
            if theta2.is_positive() {
                let low = g.eval(theta2).min(g.eval(theta1));
                Ok(CentralWindow {
                    m_cap: quadratic_m_cap(low, x),
                    zero_boundary: false,
                })
            } else {
                // A positive x = A - l/m is at least 1/(den(A) * m), so
                // m^2 G(x) >= m * scale * (c - theta1)^2 / den(A) and
                // m <= x * den(A) / (scale * (c - theta1)^2).
                let edge = *c - theta1;
                let slope_rat = *scale * edge * edge;
                let m_cap = x
                    .checked_mul(a.den())
                    .and_then(|v| v.checked_mul(slope_rat.den()))
                    .expect("overflow")
                    / slope_rat.num();
                Ok(CentralWindow {
                    m_cap,
                    zero_boundary: true,
                })
            }
        }
    }
}

/// Counts pairs `(l, m)` of nonnegative integers, `m >= 1`, with
/// `F(l) = 0 mod m`, `theta2 <= A - l/m <= theta1` (closed window), and
/// `m^2 * G(A - l/m) <= x`, scanning root progressions per modulus.
///
/// Errors with [`Error::BadWindow`] if `A < theta1`, `theta2 >= theta1`,
/// or a nodal `G` would vanish inside the window's closure on the right.
pub fn central_count(
    f: &QuadPoly,
    g: &GDescriptor,
    a: Rat,
    theta2: Rat,
    theta1: Rat,
    x: i128,
) -> Result<i128, Error> {
    if a < theta1 || theta2 >= theta1 {
        return Err(Error::BadWindow);
    }
    if x <= 0 {
        return Ok(0);
    }
    let window = central_window(g, a, theta2, theta1, x)?;
    assert!(
        window.m_cap <= SIEVE_GUARD as i128,
        "modulus range beyond supported desk scale"
    );
    let mut total = 0i128;
    if window.zero_boundary {
        // x = 0 pairs: l/m = A = p/q exactly, so (l, m) = (p j, q j) and
        // q j | F(p j) forces j | constant.
        let (p, q) = (a.num(), a.den());
        let mut j = 1i128;
        while j * j <= f.constant.abs() {
            if f.constant % j == 0 {
                for jj in [j, f.constant.abs() / j] {
                    if f.eval(p * jj).rem_euclid(q * jj) == 0 {
                        total += 1;
                    }
                }
                if j * j == f.constant.abs() {
                    total -= if f.eval(p * j).rem_euclid(q * j) == 0 { 1 } else { 0 };
                }
            }
            j += 1;
        }
    }
    if window.m_cap < 1 {
        return Ok(total);
    }
    let spf = spf_sieve(window.m_cap as usize);
    let mut cache: HashMap<(i128, u32), Vec<i128>> = HashMap::new();
    for m in 1..=window.m_cap {
        let factors = factor_via_spf(m as usize, &spf);
        let roots = roots_mod_n(f, &factors, &mut cache);
        if roots.is_empty() {
            continue;
        }
        // theta2 <= A - l/m <= theta1  <=>  m(A - theta1) <= l <= m(A - theta2).
        let lo = (a - theta1) * Rat::int(m);
        let hi = (a - theta2) * Rat::int(m);
        let lo_l = lo.ceil().max(0);
        let hi_l = hi.floor();
        for &v in &roots {
            let mut l = v + ((lo_l - v).div_euclid(m) + i128::from((lo_l - v).rem_euclid(m) != 0)) * m;
            debug_assert!(l >= lo_l && l - m < lo_l && l.rem_euclid(m) == v);
            while l <= hi_l {
                let ax = a - Rat::new(l, m);
                if !(window.zero_boundary && ax.is_zero()) {
                    let gval = g.eval(ax);
                    // m^2 * gval <= x, exactly.
                    let lhs = m
                        .checked_mul(m)
                        .and_then(|m2| m2.checked_mul(gval.num()))
                        .expect("overflow");
                    let rhs = x.checked_mul(gval.den()).expect("overflow");
                    if lhs <= rhs {
                        total += 1;
                    }
                }
                l += m;
            }
        }
    }
    Ok(total)
}

/// Reference implementation of [`central_count`]: same certified modulus
/// cap, but scans every `l` in range and tests divisibility directly.
pub fn central_count_naive(
    f: &QuadPoly,
    g: &GDescriptor,
    a: Rat,
    theta2: Rat,
    theta1: Rat,
    x: i128,
) -> Result<i128, Error> {
    if a < theta1 || theta2 >= theta1 {
        return Err(Error::BadWindow);
    }
    if x <= 0 {
        return Ok(0);
    }
    let window = central_window(g, a, theta2, theta1, x)?;
    let mut total = 0i128;
    if window.zero_boundary {
        let (p, q) = (a.num(), a.den());
        for j in 1..=f.constant.abs() {
            if f.constant % j == 0 && f.eval(p * j).rem_euclid(q * j) == 0 {
                total += 1;
            }
        }
    }
    for m in 1..=window.m_cap {
        let lo_l = ((a - theta1) * Rat::int(m)).ceil().max(0);
        let hi_l = ((a - theta2) * Rat::int(m)).floor();
        for l in lo_l..=hi_l {
            if f.eval(l).rem_euclid(m) != 0 {
                continue;
            }
            let ax = a - Rat::new(l, m);
            if window.zero_boundary && ax.is_zero() {
                continue;
            }
            let gval = g.eval(ax);
            if m * m * gval.num() <= x * gval.den() {
                total += 1;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xx_plus_1() -> QuadPoly {
        QuadPoly::new(1, 1)
    }
    fn xx_minus_1() -> QuadPoly {
        QuadPoly::new(1, -1)
    }

    #[test]
    fn rho_examples() {
        let f = xx_plus_1();
        assert_eq!(rho(&f, 5), 2);
        assert_eq!(rho(&f, 3), 0);
        assert_eq!(rho(&f, 65), 4);
        assert_eq!(rho(&xx_minus_1(), 8), 4);
        for n in [5, 3, 65, 8, 1] {
            assert_eq!(rho_naive(&f, n), rho(&f, n), "n = {n}");
        }
    }

    #[test]
    fn rho_naive_matches_fast_battery() {
        let polys = [
            xx_plus_1(),
            xx_minus_1(),
            QuadPoly::new(2, 3),
            QuadPoly::new(4, -9),
        ];
        for f in &polys {
            for n in 1..=600 {
                assert_eq!(rho_naive(f, n), rho(f, n), "{f:?} at {n}");
            }
        }
    }

    #[test]
    fn rho_prime_power_stability() {
        // rho(p^r) = rho(p) away from 2 * lead * constant.
        let f = QuadPoly::new(2, 3);
        for p in [5i128, 7, 11, 13] {
            let base = rho(&f, p);
            for r in 2..=4u32 {
                assert_eq!(rho(&f, p.pow(r)), base, "p = {p}, r = {r}");
            }
        }
    }

    #[test]
    fn rho_sum_examples() {
        assert_eq!(rho_sum(&xx_plus_1(), 10), 6);
        assert_eq!(rho_sum(&xx_plus_1(), 1000), 478);
        assert_eq!(rho_sum(&xx_minus_1(), 1000), 4776);
        assert_eq!(rho_sum(&QuadPoly::new(2, 3), 1000), 514);
        assert_eq!(rho_sum(&QuadPoly::new(4, -9), 1000), 1777);
    }

    #[test]
    fn roots_up_to_examples() {
        let seq = roots_up_to(&xx_plus_1(), 5);
        assert_eq!(seq.entries(), &[(0, 1), (1, 2), (2, 5), (3, 5)]);
        assert_eq!(seq.len() as i128, rho_sum(&xx_plus_1(), 5));
        assert_eq!(
            roots_up_to(&xx_plus_1(), 3).entries(),
            &[(0, 1), (1, 2)]
        );
        assert_eq!(
            roots_up_to(&xx_minus_1(), 4).entries(),
            &[(0, 1), (1, 2), (1, 3), (2, 3), (1, 4), (3, 4)]
        );
        // rho(65) root values via the composed lift.
        let seq = roots_up_to(&xx_plus_1(), 65);
        let at_65: Vec<i128> = seq
            .entries()
            .iter()
            .filter(|&&(_, k)| k == 65)
            .map(|&(v, _)| v)
            .collect();
        assert_eq!(at_65, vec![8, 18, 47, 57]);
    }

    #[test]
    fn root_sequence_length_matches_rho_sum() {
        for f in [xx_plus_1(), xx_minus_1(), QuadPoly::new(2, 3)] {
            assert_eq!(roots_up_to(&f, 800).len() as i128, rho_sum(&f, 800));
        }
    }

    #[test]
    fn star_discrepancy_examples() {
        assert_eq!(
            star_discrepancy(&[Rat::new(1, 2)]).unwrap(),
            Rat::new(1, 2)
        );
        assert_eq!(
            star_discrepancy(&[Rat::new(1, 4), Rat::new(3, 4)]).unwrap(),
            Rat::new(1, 4)
        );
        let equispaced: Vec<Rat> = (1..=10).map(|i| Rat::new(2 * i - 1, 20)).collect();
        assert_eq!(star_discrepancy(&equispaced).unwrap(), Rat::new(1, 20));
        assert_eq!(star_discrepancy(&[]), Err(Error::EmptySequence));
        // Frozen value for the X^2+1 root sequence up to 1000.
        let fr = roots_up_to(&xx_plus_1(), 1000).fractions();
        assert_eq!(star_discrepancy(&fr).unwrap(), Rat::new(31, 962));
    }

    #[test]
    fn interval_count_examples() {
        let f = xx_plus_1();
        assert_eq!(interval_count(&f, 5, Rat::ZERO, Rat::ONE), 4);
        assert_eq!(
            interval_count(&f, 5, Rat::new(3, 10), Rat::new(7, 10)),
            3
        );
    }

    #[test]
    fn is_split_examples() {
        assert!(is_split(&PellFamily::new(1, -1).unwrap()));
        assert!(!is_split(&PellFamily::new(1, 1).unwrap()));
        assert!(is_split(&PellFamily::new(4, -9).unwrap()));
        assert!(!is_split(&PellFamily::new(2, -1).unwrap()));
    }

    #[test]
    fn central_count_examples() {
        let f = xx_plus_1();
        let g1 = GDescriptor::constant(Rat::ONE).unwrap();
        assert_eq!(
            central_count(&f, &g1, Rat::ONE, Rat::ZERO, Rat::ONE, 25).unwrap(),
            5
        );
        assert_eq!(
            central_count(&f, &g1, Rat::ONE, Rat::ZERO, Rat::ONE, 0).unwrap(),
            0
        );
        let nodal = GDescriptor::scaled_nodal(Rat::ONE, Rat::int(2)).unwrap();
        assert_eq!(
            central_count(&f, &nodal, Rat::ONE, Rat::new(1, 4), Rat::new(3, 4), 10_000)
                .unwrap(),
            27
        );
        let g3 = GDescriptor::constant(Rat::int(3)).unwrap();
        assert_eq!(
            central_count(
                &QuadPoly::new(2, 3),
                &g3,
                Rat::new(7, 2),
                Rat::new(1, 5),
                Rat::int(2),
                500
            )
            .unwrap(),
            15
        );
        // Window validation.
        assert_eq!(
            central_count(&f, &g1, Rat::ZERO, Rat::ZERO, Rat::ONE, 25),
            Err(Error::BadWindow)
        );
        assert_eq!(
            central_count(&f, &g1, Rat::ONE, Rat::ONE, Rat::ONE, 25),
            Err(Error::BadWindow)
        );
        assert_eq!(
            central_count(&f, &nodal, Rat::ONE, Rat::ZERO, Rat::int(2), 25),
            Err(Error::BadWindow)
        );
    }

    #[test]
    fn central_count_matches_naive() {
        let polys = [xx_plus_1(), QuadPoly::new(2, 3), xx_minus_1()];
        let windows = [
            (Rat::ONE, Rat::ZERO, Rat::ONE),
            (Rat::new(7, 2), Rat::new(1, 5), Rat::int(2)),
            (Rat::new(5, 3), Rat::new(1, 6), Rat::new(4, 3)),
        ];
        let g1 = GDescriptor::constant(Rat::new(2, 3)).unwrap();
        let nodal = GDescriptor::scaled_nodal(Rat::new(1, 2), Rat::int(3)).unwrap();
        for f in &polys {
            for (a, t2, t1) in windows {
                for g in [g1, nodal] {
                    for x in [0, 7, 100, 2000] {
                        assert_eq!(
                            central_count(f, &g, a, t2, t1, x),
                            central_count_naive(f, &g, a, t2, t1, x),
                            "{f:?} {g:?} A={a} window=({t2},{t1}) x={x}"
                        );
                    }
                }
            }
        }
    }
}
