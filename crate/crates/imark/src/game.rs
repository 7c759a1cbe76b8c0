//! Game specifications and move generation.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest pile size any operation will touch. Threshold walks and table
/// sizes stay within u64/u128 arithmetic below this cap; larger inputs are
/// rejected rather than wrapped.
pub const MAX_POSITION: u64 = 1 << 62;

/// A single-pile position: the token count.
pub type Position = u64;

/// A validated rule set: subtraction amounts S and divisors D, each stored
/// sorted ascending without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GameSpec {
    #[serde(rename = "S")]
    s: Vec<u64>,
    #[serde(rename = "D")]
    d: Vec<u64>,
}

/// The most specific solved family a spec belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyTag {
    /// S = [1, t-1], D = {d}, d ≡ 1 (mod t): SG solved by interleaved
    /// threshold sequences α and β.
    Theorem1 { t: u64, d: u64 },
    /// S = {2}, D = {k}, k ≡ 3 (mod 4): SG solved by thresholds b, c_m.
    Theorem2 { k: u64 },
    /// S = {2}, D = {k}, k ≡ 1 (mod 4), k > 1: SG solved by thresholds
    /// a_m, b, c_m.
    Theorem3 { k: u64 },
    /// S = [1, t-1], D = {d}, d ≢ 1 (mod t): outcome (not SG) is periodic.
    PeriodicOutcome { t: u64, d: u64 },
    /// No closed form known; only the oracle applies.
    General,
}

impl std::fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FamilyTag::Theorem1 { t, d } => write!(f, "theorem-1 (t={t}, d={d})"),
            FamilyTag::Theorem2 { k } => write!(f, "theorem-2 (k={k})"),
            FamilyTag::Theorem3 { k } => write!(f, "theorem-3 (k={k})"),
            FamilyTag::PeriodicOutcome { t, d } => write!(f, "periodic-outcome (t={t}, d={d})"),
            FamilyTag::General => write!(f, "general"),
        }
    }
}

impl GameSpec {
    /// Validates raw sets and normalizes them: S nonempty with every s ≥ 1,
    /// D nonempty with every d ≥ 2; both deduplicated and sorted ascending.
    pub fn new(s: &[u64], d: &[u64]) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::EmptySet("S"));
        }
        if d.is_empty() {
            return Err(Error::EmptySet("D"));
        }
        if let Some(&bad) = s.iter().find(|&&x| x == 0) {
            return Err(Error::InvalidSubtraction(bad));
        }
        if let Some(&bad) = d.iter().find(|&&x| x <= 1) {
            return Err(Error::InvalidDivisor(bad));
        }
        let mut s = s.to_vec();
        s.sort_unstable();
        s.dedup();
        let mut d = d.to_vec();
        d.sort_unstable();
        d.dedup();
        Ok(GameSpec { s, d })
    }

    pub fn subtractions(&self) -> &[u64] {
        &self.s
    }

    pub fn divisors(&self) -> &[u64] {
        &self.d
    }

    /// |S| + |D|: an upper bound on every SG value of the game, since a
    /// position never has more options than that.
    pub fn sg_bound(&self) -> u64 {
        (self.s.len() + self.d.len()) as u64
    }

    /// Legal options from pile n: n-s for s ∈ S with n-s ≥ 0, and n/d for
    /// d ∈ D dividing n, n > 0. Sorted ascending, deduplicated; every
    /// option is strictly below n.
    pub fn options(&self, n: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.s.len() + self.d.len());
        self.options_into(n, &mut out);
        out
    }

    /// Same as [`options`](Self::options) but reuses a caller buffer.
    pub fn options_into(&self, n: u64, out: &mut Vec<u64>) {
        out.clear();
        for &s in &self.s {
            if let Some(w) = n.checked_sub(s) {
                out.push(w);
            }
        }
        if n > 0 {
            for &d in &self.d {
                if n.is_multiple_of(d) {
                    out.push(n / d);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
    }

    /// The most specific solved family matching this spec, or `General`.
    pub fn classify_family(&self) -> FamilyTag {
        if let [k] = self.d[..] {
            let contiguous_from_1 = self.s.iter().enumerate().all(|(i, &s)| s == i as u64 + 1);
            if contiguous_from_1 {
                let t = self.s.len() as u64 + 1;
                return if k % t == 1 {
                    FamilyTag::Theorem1 { t, d: k }
                } else {
                    FamilyTag::PeriodicOutcome { t, d: k }
                };
            }
            if self.s == [2] {
                if k % 4 == 3 {
                    return FamilyTag::Theorem2 { k };
                }
                if k % 4 == 1 {
                    return FamilyTag::Theorem3 { k };
                }
            }
        }
        FamilyTag::General
    }

    /// Filesystem-safe identifier, used for default cache file names.
    pub fn slug(&self) -> String {
        let join = |xs: &[u64]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join("-")
        };
        format!("s{}_d{}", join(&self.s), join(&self.d))
    }
}
