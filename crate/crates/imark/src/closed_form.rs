//! O(log n) SG evaluators for the solved families, the periodic outcome
//! formula, and generators for the threshold sequences that organize them.
//!
//! Family S = [1, t-1], D = {d}, d ≡ 1 (mod t): two interleaved threshold
//! sequences α_m = (d^{m+2}-d)/(d-1) and β_m = t·d^{m+1} + (d^{m+1}-d)/(d-1)
//! carry the top value t; between them the sequence follows fixed mod-t
//! patterns. Family S = {2}, D = {k} with k odd: thresholds b = 2k and
//! c_m (with a_m in addition when k ≡ 1 mod 4) carry the value 2; between
//! them the sequence follows fixed mod-4 patterns.

use crate::error::{Error, Result};
use crate::game::{FamilyTag, MAX_POSITION};
use crate::oracle::Outcome;

const PAT0011: [u64; 4] = [0, 0, 1, 1];
const PAT1001: [u64; 4] = [1, 0, 0, 1];

fn check_theorem1_params(t: u64, d: u64) -> Result<()> {
    if t < 2 || d < 2 || d % t != 1 {
        return Err(Error::PreconditionViolated(format!(
            "family requires t, d >= 2 and d ≡ 1 (mod t); got t={t}, d={d}"
        )));
    }
    Ok(())
}

fn check_theorem2_params(k: u64) -> Result<()> {
    if k % 4 != 3 {
        return Err(Error::PreconditionViolated(format!(
            "family requires k ≡ 3 (mod 4); got k={k}"
        )));
    }
    Ok(())
}

fn check_theorem3_params(k: u64) -> Result<()> {
    if k % 4 != 1 || k == 1 {
        return Err(Error::PreconditionViolated(format!(
            "family requires k ≡ 1 (mod 4), k > 1; got k={k}"
        )));
    }
    Ok(())
}

fn check_position(n: u64) -> Result<()> {
    if n > MAX_POSITION {
        return Err(Error::Overflow);
    }
    Ok(())
}

/// α_m = d + d² + ⋯ + d^{m+1}, computed by α_{m+1} = d(α_m + 1).
pub fn alpha(m: u32, t: u64, d: u64) -> Result<u64> {
    check_theorem1_params(t, d)?;
    let mut a = d as u128;
    for _ in 0..m {
        a = d as u128 * (a + 1);
        if a > MAX_POSITION as u128 {
            return Err(Error::Overflow);
        }
    }
    if a > MAX_POSITION as u128 {
        return Err(Error::Overflow);
    }
    Ok(a as u64)
}

/// β_m = t·d^{m+1} + (d^{m+1}-d)/(d-1), computed by β_{m+1} = d(β_m + 1).
pub fn beta(m: u32, t: u64, d: u64) -> Result<u64> {
    check_theorem1_params(t, d)?;
    let mut b = t as u128 * d as u128;
    for _ in 0..m {
        if b > MAX_POSITION as u128 {
            return Err(Error::Overflow);
        }
        b = d as u128 * (b + 1);
    }
    if b > MAX_POSITION as u128 {
        return Err(Error::Overflow);
    }
    Ok(b as u64)
}

/// Interval kind within the Theorem-1 chain
/// A_0, α_0, B_0, β_0, A_1, α_1, B_1, β_1, …
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem1Region {
    /// A_m = [β_{m-1}+1, α_m-1] (A_0 starts at 0); pattern 0,1,…,t-1 cyclic.
    A,
    AtAlpha,
    /// B_m = [α_m+1, β_m-1]; pattern 1,…,t-2,0,t-1 cyclic.
    B,
    AtBeta,
}

/// Where a position sits in the Theorem-1 chain. `start` is the first
/// position of the containing region, so `offset` = n - start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Theorem1Layout {
    pub m: u32,
    pub region: Theorem1Region,
    pub start: u64,
    pub offset: u64,
}

/// Locates n by walking the threshold recurrences upward; O(log_d n) steps.
pub fn locate_theorem1(n: u64, t: u64, d: u64) -> Result<Theorem1Layout> {
    check_theorem1_params(t, d)?;
    check_position(n)?;
    let n = n as u128;
    if n < d as u128 {
        return Ok(Theorem1Layout {
            m: 0,
            region: Theorem1Region::A,
            start: 0,
            offset: n as u64,
        });
    }
    let mut m = 0u32;
    let mut am = d as u128;
    let mut bm = t as u128 * d as u128;
    loop {
        if n == am {
            return Ok(Theorem1Layout {
                m,
                region: Theorem1Region::AtAlpha,
                start: n as u64,
                offset: 0,
            });
        }
        if n < bm {
            let start = (am + 1) as u64;
            return Ok(Theorem1Layout {
                m,
                region: Theorem1Region::B,
                start,
                offset: n as u64 - start,
            });
        }
        if n == bm {
            return Ok(Theorem1Layout {
                m,
                region: Theorem1Region::AtBeta,
                start: n as u64,
                offset: 0,
            });
        }
        let next_alpha = d as u128 * (am + 1);
        if n < next_alpha {
            let start = (bm + 1) as u64;
            return Ok(Theorem1Layout {
                m: m + 1,
                region: Theorem1Region::A,
                start,
                offset: n as u64 - start,
            });
        }
        am = next_alpha;
        bm = d as u128 * (bm + 1);
        m += 1;
    }
}

/// SG value for S = [1, t-1], D = {d}, d ≡ 1 (mod t).
pub fn sg_theorem1(n: u64, t: u64, d: u64) -> Result<u64> {
    let layout = locate_theorem1(n, t, d)?;
    Ok(match layout.region {
        Theorem1Region::A => layout.offset % t,
        // For t = 2 and m >= 1 the division option of α_m is the first
        // element of B_{m-1}, whose value is 0, not 1: both options of α_m
        // then have value 0 and the mex is 1, continuing the alternating
        // pattern instead of reaching t.
        Theorem1Region::AtAlpha => {
            if t >= 3 || layout.m == 0 {
                t
            } else {
                1
            }
        }
        Theorem1Region::B => {
            let r = layout.offset % t;
            if r + 3 <= t {
                r + 1
            } else if r == t - 2 {
                0
            } else {
                t - 1
            }
        }
        Theorem1Region::AtBeta => t,
    })
}

/// Interval kind for the S = {2}, D = {k} families (k odd).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OddKRegion {
    /// k ≡ 3 (mod 4): I_0 = [0, b-1], I_1 = [b+1, c_0-1],
    /// I_m = [c_{m-2}+1, c_{m-1}-1] for m ≥ 2.
    I(u32),
    /// k ≡ 1 (mod 4): X = [0, a_0-1], Y = [a_0+1, b-1], Z = [b+1, c_0-1],
    /// then A_m = [c_{m-1}+1, a_m-1] and C_m = [a_m+1, c_m-1].
    X,
    Y,
    Z,
    A(u32),
    C(u32),
    AtA(u32),
    AtB,
    AtC(u32),
}

/// Where a position sits in an odd-k chain; `offset` = n - `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OddKLayout {
    pub region: OddKRegion,
    pub start: u64,
    pub offset: u64,
}

fn at(region: OddKRegion, n: u128) -> OddKLayout {
    OddKLayout {
        region,
        start: n as u64,
        offset: 0,
    }
}

fn span(region: OddKRegion, start: u128, n: u128) -> OddKLayout {
    OddKLayout {
        region,
        start: start as u64,
        offset: (n - start) as u64,
    }
}

/// Locates n among the thresholds b = 2k, c_0 = 4k, c_m = k(c_{m-1}+2).
pub fn locate_theorem2(n: u64, k: u64) -> Result<OddKLayout> {
    check_theorem2_params(k)?;
    check_position(n)?;
    let n = n as u128;
    let k = k as u128;
    let b = 2 * k;
    let c0 = 4 * k;
    if n < b {
        return Ok(span(OddKRegion::I(0), 0, n));
    }
    if n == b {
        return Ok(at(OddKRegion::AtB, n));
    }
    if n < c0 {
        return Ok(span(OddKRegion::I(1), b + 1, n));
    }
    let mut m = 0u32;
    let mut c = c0;
    loop {
        if n == c {
            return Ok(at(OddKRegion::AtC(m), n));
        }
        let next = k * (c + 2);
        if n < next {
            return Ok(span(OddKRegion::I(m + 2), c + 1, n));
        }
        c = next;
        m += 1;
    }
}

/// SG value for S = {2}, D = {k}, k ≡ 3 (mod 4): 2 exactly at b and at
/// every c_m; pattern (0,0,1,1) on even-indexed intervals and (1,0,0,1)
/// on odd-indexed ones.
pub fn sg_theorem2(n: u64, k: u64) -> Result<u64> {
    let layout = locate_theorem2(n, k)?;
    Ok(match layout.region {
        OddKRegion::I(m) => {
            let pat = if m % 2 == 0 { PAT0011 } else { PAT1001 };
            pat[(layout.offset % 4) as usize]
        }
        _ => 2,
    })
}

/// Locates n among a_0 = k, b = 2k, c_0 = 4k, a_m = k(a_{m-1}+2),
/// c_m = k(c_{m-1}+2), which interleave as a_0 < b < c_0 < a_1 < c_1 < ⋯.
pub fn locate_theorem3(n: u64, k: u64) -> Result<OddKLayout> {
    check_theorem3_params(k)?;
    check_position(n)?;
    let n = n as u128;
    let k = k as u128;
    let b = 2 * k;
    let c0 = 4 * k;
    if n < k {
        return Ok(span(OddKRegion::X, 0, n));
    }
    if n == k {
        return Ok(at(OddKRegion::AtA(0), n));
    }
    if n < b {
        return Ok(span(OddKRegion::Y, k + 1, n));
    }
    if n == b {
        return Ok(at(OddKRegion::AtB, n));
    }
    if n < c0 {
        return Ok(span(OddKRegion::Z, b + 1, n));
    }
    let mut m = 1u32;
    let mut a = k;
    let mut c = c0;
    loop {
        if n == c {
            return Ok(at(OddKRegion::AtC(m - 1), n));
        }
        a = k * (a + 2);
        if n < a {
            return Ok(span(OddKRegion::A(m), c + 1, n));
        }
        if n == a {
            return Ok(at(OddKRegion::AtA(m), n));
        }
        let next_c = k * (c + 2);
        if n < next_c {
            return Ok(span(OddKRegion::C(m), a + 1, n));
        }
        c = next_c;
        m += 1;
    }
}

/// SG value for S = {2}, D = {k}, k ≡ 1 (mod 4), k > 1: 2 exactly at b
/// and at every a_m and c_m; pattern (0,0,1,1) on X and Z, (1,0,0,1)
/// everywhere else between thresholds.
pub fn sg_theorem3(n: u64, k: u64) -> Result<u64> {
    let layout = locate_theorem3(n, k)?;
    Ok(match layout.region {
        OddKRegion::X | OddKRegion::Z => PAT0011[(layout.offset % 4) as usize],
        OddKRegion::Y | OddKRegion::A(_) | OddKRegion::C(_) => {
            PAT1001[(layout.offset % 4) as usize]
        }
        _ => 2,
    })
}

/// Outcome for S = [1, t-1], D = {d}, d ≢ 1 (mod t): the P-positions are
/// exactly { qt | 0 ≤ q < d } ∪ { qt + 1 | q ≥ d }. O(1).
pub fn outcome_periodic(n: u64, t: u64, d: u64) -> Result<Outcome> {
    if t < 2 || d < 2 || d % t == 1 {
        return Err(Error::PreconditionViolated(format!(
            "family requires t, d >= 2 and d ≢ 1 (mod t); got t={t}, d={d}"
        )));
    }
    check_position(n)?;
    let q = n / t;
    let r = n % t;
    let p = (r == 0 && q < d) || (r == 1 && q >= d);
    Ok(if p { Outcome::P } else { Outcome::N })
}

/// Label of one threshold value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdLabel {
    Alpha(u32),
    Beta(u32),
    A(u32),
    B,
    C(u32),
}

impl std::fmt::Display for ThresholdLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ThresholdLabel::Alpha(m) => write!(f, "alpha_{m}"),
            ThresholdLabel::Beta(m) => write!(f, "beta_{m}"),
            ThresholdLabel::A(m) => write!(f, "a_{m}"),
            ThresholdLabel::B => write!(f, "b"),
            ThresholdLabel::C(m) => write!(f, "c_{m}"),
        }
    }
}

/// All threshold values of a solved SG family up to `limit`, labeled and
/// strictly ascending. Generation stops at the position cap.
pub fn thresholds(family: FamilyTag, limit: u64) -> Result<Vec<(ThresholdLabel, u64)>> {
    let limit = limit.min(MAX_POSITION) as u128;
    let mut out = Vec::new();
    match family {
        FamilyTag::Theorem1 { t, d } => {
            check_theorem1_params(t, d)?;
            let mut am = d as u128;
            let mut bm = t as u128 * d as u128;
            let mut m = 0u32;
            while am <= limit {
                out.push((ThresholdLabel::Alpha(m), am as u64));
                if bm > limit {
                    break;
                }
                out.push((ThresholdLabel::Beta(m), bm as u64));
                am = d as u128 * (am + 1);
                bm = d as u128 * (bm + 1);
                m += 1;
            }
        }
        FamilyTag::Theorem2 { k } => {
            check_theorem2_params(k)?;
            let k = k as u128;
            if 2 * k <= limit {
                out.push((ThresholdLabel::B, (2 * k) as u64));
            }
            let mut c = 4 * k;
            let mut m = 0u32;
            while c <= limit {
                out.push((ThresholdLabel::C(m), c as u64));
                c = k * (c + 2);
                m += 1;
            }
        }
        FamilyTag::Theorem3 { k } => {
            check_theorem3_params(k)?;
            let k = k as u128;
            if k <= limit {
                out.push((ThresholdLabel::A(0), k as u64));
            }
            if 2 * k <= limit {
                out.push((ThresholdLabel::B, (2 * k) as u64));
            }
            let mut a = k;
            let mut c = 4 * k;
            let mut m = 0u32;
            while c <= limit {
                out.push((ThresholdLabel::C(m), c as u64));
                a = k * (a + 2);
                if a > limit {
                    break;
                }
                out.push((ThresholdLabel::A(m + 1), a as u64));
                c = k * (c + 2);
                m += 1;
            }
        }
        FamilyTag::PeriodicOutcome { .. } | FamilyTag::General => {
            return Err(Error::PreconditionViolated(format!(
                "family {family} has no threshold sequences"
            )));
        }
    }
    Ok(out)
}

/// Closed-form SG dispatch for the three solved SG families.
pub fn sg_for_family(family: FamilyTag, n: u64) -> Result<u64> {
    match family {
        FamilyTag::Theorem1 { t, d } => sg_theorem1(n, t, d),
        FamilyTag::Theorem2 { k } => sg_theorem2(n, k),
        FamilyTag::Theorem3 { k } => sg_theorem3(n, k),
        _ => Err(Error::PreconditionViolated(format!(
            "no closed-form SG values for family {family}"
        ))),
    }
}
