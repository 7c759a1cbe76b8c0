//! Scans over built tables: gap statistics, window and lemma verification
//! for i-Mark({1},{2,3}), the SG-2 structure check for i-Mark({s},{d}),
//! oracle-vs-closed-form equivalence, and sequence export.

use std::io::Write;

use serde::Serialize;

use crate::closed_form::{outcome_periodic, sg_for_family};
use crate::error::{Error, Result};
use crate::game::{FamilyTag, GameSpec};
use crate::oracle::{Outcome, SgTable, DEFAULT_MEMORY_BUDGET};

/// Gap statistics for one SG value. A gap is the difference between
/// consecutive positions holding the value, so "every window of c
/// consecutive positions contains the value" is exactly "max gap ≤ c".
/// A value that never occurs is reported with `first` = None, not an error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapEntry {
    pub value: u64,
    pub first: Option<u64>,
    pub count: u64,
    pub max_gap: u64,
    pub max_gap_end: Option<u64>,
}

/// Gap statistics for every value 0..=sg_bound over positions 0..=N.
#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub spec: GameSpec,
    #[serde(rename = "N")]
    pub n: u64,
    pub per_value: Vec<GapEntry>,
}

struct GapTracker {
    value: u64,
    first: Option<u64>,
    last: u64,
    count: u64,
    max_gap: u64,
    max_gap_end: Option<u64>,
}

impl GapTracker {
    fn new(value: u64) -> Self {
        GapTracker {
            value,
            first: None,
            last: 0,
            count: 0,
            max_gap: 0,
            max_gap_end: None,
        }
    }

    #[inline]
    fn hit(&mut self, n: u64) {
        self.count += 1;
        if self.first.is_none() {
            self.first = Some(n);
        } else {
            let gap = n - self.last;
            if gap > self.max_gap {
                self.max_gap = gap;
                self.max_gap_end = Some(n);
            }
        }
        self.last = n;
    }

    fn entry(self) -> GapEntry {
        GapEntry {
            value: self.value,
            first: self.first,
            count: self.count,
            max_gap: self.max_gap,
            max_gap_end: self.max_gap_end,
        }
    }
}

/// Streams once over the table, collecting gap statistics for all values.
pub fn gap_scan(table: &SgTable) -> GapReport {
    let bound = table.spec().sg_bound();
    let mut trackers: Vec<GapTracker> = (0..=bound).map(GapTracker::new).collect();
    for (n, v) in table.values().enumerate() {
        trackers[v as usize].hit(n as u64);
    }
    GapReport {
        spec: table.spec().clone(),
        n: table.n_max(),
        per_value: trackers.into_iter().map(GapTracker::entry).collect(),
    }
}

/// Gap statistics for a single value ≤ sg_bound.
pub fn gap_scan_value(table: &SgTable, value: u64) -> Result<GapEntry> {
    let bound = table.spec().sg_bound();
    if value > bound {
        return Err(Error::OutOfRange {
            n: value,
            max: bound,
        });
    }
    let mut tracker = GapTracker::new(value);
    for (n, v) in table.values().enumerate() {
        if v == value {
            tracker.hit(n as u64);
        }
    }
    Ok(tracker.entry())
}

/// Result of one guaranteed-window check: every applicable position must
/// have the value within `guarantee` positions behind it; `tightest` is
/// the smallest window that would have sufficed on this prefix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowCheck {
    pub value: u64,
    pub guarantee: u64,
    pub tightest: u64,
    pub first_violation: Option<u64>,
}

fn require_div23(table: &SgTable) -> Result<()> {
    let spec = table.spec();
    if spec.subtractions() != [1] || spec.divisors() != [2, 3] {
        return Err(Error::SpecMismatch(format!(
            "check is specific to S={{1}}, D={{2,3}}, got S={:?}, D={:?}",
            spec.subtractions(),
            spec.divisors()
        )));
    }
    Ok(())
}

/// For i-Mark({1},{2,3}): verifies the guaranteed windows — a 0 within 4
/// positions behind every n ≥ 1, a 1 within 10 behind every n ≥ 2, and a
/// 2 within 49 behind every n ≥ 4.
pub fn verify_gap_theorems(table: &SgTable) -> Result<Vec<WindowCheck>> {
    require_div23(table)?;
    // (value, guaranteed window, first position the guarantee covers)
    let params: [(u64, u64, u64); 3] = [(0, 4, 1), (1, 10, 2), (2, 49, 4)];
    let mut last = [None::<u64>; 3];
    let mut tightest = [0u64; 3];
    let mut violation = [None::<u64>; 3];
    for (n, v) in table.values().enumerate() {
        let n = n as u64;
        for (i, &(value, window, from)) in params.iter().enumerate() {
            if n >= from {
                let distance = match last[i] {
                    Some(l) => n - l,
                    None => u64::MAX,
                };
                if distance > tightest[i] {
                    tightest[i] = distance;
                }
                if distance > window && violation[i].is_none() {
                    violation[i] = Some(n);
                }
            }
            if v == value {
                last[i] = Some(n);
            }
        }
    }
    Ok(params
        .iter()
        .zip(tightest)
        .zip(violation)
        .map(
            |((&(value, guarantee, _), tightest), first_violation)| WindowCheck {
                value,
                guarantee,
                tightest,
                first_violation,
            },
        )
        .collect())
}

/// Result of the residue-5 lemma scan: of the positions m ≡ 5 (mod 6)
/// whose window m-7..=m is free of the value 2, every one must have
/// SG(m) = 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub checked: u64,
    pub first_violation: Option<u64>,
}

/// For i-Mark({1},{2,3}): if m ≡ 5 (mod 6) and SG(m-i) ≠ 2 for all
/// 0 ≤ i ≤ 7, then SG(m) = 0.
pub fn verify_lemma_5mod6(table: &SgTable) -> Result<LemmaReport> {
    require_div23(table)?;
    let mut checked = 0;
    let mut first_violation = None;
    let mut m = 11;
    while m <= table.n_max() {
        let free = (0..=7).all(|i| table.sg_unchecked(m - i) != 2);
        if free {
            checked += 1;
            if table.sg_unchecked(m) != 0 && first_violation.is_none() {
                first_violation = Some(m);
            }
        }
        m += 6;
    }
    Ok(LemmaReport {
        checked,
        first_violation,
    })
}

/// Soft diagnostic over the stretches between consecutive SG-2 positions:
/// lengths of maximal constant runs of 0s and 1s, and whether every such
/// run length is a multiple of s. Informational only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunDiagnostic {
    pub longest_zero_run: u64,
    pub longest_one_run: u64,
    pub runs_multiple_of_s: bool,
}

/// Outcome of checking the conjectured SG-2 structure of i-Mark({s},{d})
/// with gcd(s,d) = 1: every position with SG value 2 should lie in
/// {sd} ∪ (a_i) ∪ (b^j_i, 1 ≤ j ≤ s-1), where a_0 = 2ds, b^j_0 = jd, and
/// both kinds of sequence grow by x ↦ d(x + s).
#[derive(Debug, Clone, Serialize)]
pub struct ConjectureReport {
    pub s: u64,
    pub d: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub sd: u64,
    pub a_seq: Vec<u64>,
    pub b_seqs: Vec<Vec<u64>>,
    pub violation_count: u64,
    /// The first violations, capped at 1000 entries; `violation_count`
    /// holds the true total.
    pub violations: Vec<u64>,
    pub runs: RunDiagnostic,
}

impl ConjectureReport {
    /// The full allowed set up to N, sorted ascending.
    pub fn allowed(&self) -> Vec<u64> {
        let mut all = vec![self.sd];
        all.extend_from_slice(&self.a_seq);
        for b in &self.b_seqs {
            all.extend_from_slice(b);
        }
        all.sort_unstable();
        all.dedup();
        all.retain(|&x| x <= self.n);
        all
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// x ↦ d(x + s) iterated from `seed`, kept within `limit`.
fn growth_sequence(seed: u128, s: u64, d: u64, limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut x = seed;
    while x <= limit as u128 {
        out.push(x as u64);
        x = d as u128 * (x + s as u128);
    }
    out
}

const VIOLATION_CAP: usize = 1000;

/// Checks the conjectured structure against a built table of the game.
pub fn check_conjecture(table: &SgTable) -> Result<ConjectureReport> {
    let spec = table.spec();
    let (s, d) = match (spec.subtractions(), spec.divisors()) {
        ([s], [d]) => (*s, *d),
        _ => {
            return Err(Error::PreconditionViolated(
                "check requires singleton S and D".into(),
            ))
        }
    };
    if gcd(s, d) != 1 {
        return Err(Error::PreconditionViolated(format!(
            "check requires gcd(s, d) = 1; got s={s}, d={d}"
        )));
    }
    let n_max = table.n_max();
    let sd = s.saturating_mul(d);
    let a_seq = growth_sequence(2 * d as u128 * s as u128, s, d, n_max);
    let b_seqs: Vec<Vec<u64>> = (1..s)
        .map(|j| growth_sequence(j as u128 * d as u128, s, d, n_max))
        .collect();

    let mut allowed: Vec<u64> = Vec::new();
    allowed.push(sd);
    allowed.extend_from_slice(&a_seq);
    for b in &b_seqs {
        allowed.extend_from_slice(b);
    }
    allowed.sort_unstable();
    allowed.dedup();

    let mut violation_count = 0u64;
    let mut violations = Vec::new();
    let mut runs = RunDiagnostic {
        longest_zero_run: 0,
        longest_one_run: 0,
        runs_multiple_of_s: true,
    };
    // run bookkeeping between consecutive SG-2 positions
    let mut seen_two = false;
    let mut run_value = u64::MAX;
    let mut run_len = 0u64;
    let close_run = |runs: &mut RunDiagnostic, value: u64, len: u64, complete: bool| {
        if len == 0 {
            return;
        }
        match value {
            0 => runs.longest_zero_run = runs.longest_zero_run.max(len),
            1 => runs.longest_one_run = runs.longest_one_run.max(len),
            _ => {}
        }
        if complete && !len.is_multiple_of(s) {
            runs.runs_multiple_of_s = false;
        }
    };

    for (n, v) in table.values().enumerate() {
        let n = n as u64;
        if v == 2 {
            if allowed.binary_search(&n).is_err() {
                violation_count += 1;
                if violations.len() < VIOLATION_CAP {
                    violations.push(n);
                }
            }
            // a run ending at an SG-2 boundary is complete only if it also
            // started at one
            close_run(&mut runs, run_value, run_len, seen_two);
            seen_two = true;
            run_value = u64::MAX;
            run_len = 0;
        } else if v == run_value {
            run_len += 1;
        } else {
            // value change mid-stretch: the finished run is complete only
            // between SG-2 boundaries
            close_run(&mut runs, run_value, run_len, seen_two);
            run_value = v;
            run_len = 1;
        }
    }
    // the trailing run is truncated by the scan limit: record length only
    close_run(&mut runs, run_value, run_len, false);

    Ok(ConjectureReport {
        s,
        d,
        n: n_max,
        sd,
        a_seq,
        b_seqs,
        violation_count,
        violations,
        runs,
    })
}

/// Compares the oracle against the matching closed form on 0..=n:
/// SG values for the three solved SG families, outcomes for the periodic
/// family. Returns the first mismatching position, or None.
pub fn equivalence_check(spec: &GameSpec, n: u64) -> Result<Option<u64>> {
    equivalence_check_with_budget(spec, n, DEFAULT_MEMORY_BUDGET)
}

pub fn equivalence_check_with_budget(spec: &GameSpec, n: u64, budget: u64) -> Result<Option<u64>> {
    let family = spec.classify_family();
    let table = SgTable::build_with_budget(spec.clone(), n, budget)?;
    match family {
        FamilyTag::General => Err(Error::SpecMismatch(
            "no closed form exists for this rule set".into(),
        )),
        FamilyTag::PeriodicOutcome { t, d } => {
            for (i, v) in table.values().enumerate() {
                let oracle = if v == 0 { Outcome::P } else { Outcome::N };
                if oracle != outcome_periodic(i as u64, t, d)? {
                    return Ok(Some(i as u64));
                }
            }
            Ok(None)
        }
        _ => {
            for (i, v) in table.values().enumerate() {
                if v != sg_for_family(family, i as u64)? {
                    return Ok(Some(i as u64));
                }
            }
            Ok(None)
        }
    }
}

/// Output shape for [`export_sequence`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    /// Header "n,sg", then one "n,v" row per position, LF endings.
    Csv,
    /// One {"n":…,"sg":…} object per line.
    JsonLines,
}

#[derive(Serialize)]
struct SequenceRow {
    n: u64,
    sg: u64,
}

/// Writes rows for positions from..=to. An empty range (from > to) emits
/// only the CSV header or nothing for JSON lines.
pub fn export_sequence(
    table: &SgTable,
    from: u64,
    to: u64,
    format: ExportFormat,
    out: &mut dyn Write,
) -> Result<()> {
    if to > table.n_max() {
        return Err(Error::OutOfRange {
            n: to,
            max: table.n_max(),
        });
    }
    // from > to yields an empty range: header only for CSV, nothing for
    // JSON lines
    match format {
        ExportFormat::Csv => {
            out.write_all(b"n,sg\n")?;
            for n in from..=to {
                writeln!(out, "{},{}", n, table.sg_unchecked(n))?;
            }
            Ok(())
        }
        ExportFormat::JsonLines => {
            for n in from..=to {
                let row = SequenceRow {
                    n,
                    sg: table.sg_unchecked(n),
                };
                serde_json::to_writer(&mut *out, &row)
                    .map_err(|e| Error::Io(std::io::Error::other(e)))?;
                out.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &[u64], d: &[u64]) -> GameSpec {
        GameSpec::new(s, d).unwrap()
    }

    fn div23_table(n: u64) -> SgTable {
        SgTable::build(spec(&[1], &[2, 3]), n).unwrap()
    }

    #[test]
    fn gap_scan_small_known_values() {
        let t = div23_table(10_000);
        let report = gap_scan(&t);
        assert_eq!(report.per_value.len(), 4);
        let v0 = &report.per_value[0];
        assert_eq!(v0.first, Some(0));
        assert_eq!(v0.max_gap, 4);
        assert_eq!(v0.max_gap_end, Some(23));
        let v2 = &report.per_value[2];
        assert_eq!(v2.first, Some(3));
        let counts: u64 = report.per_value.iter().map(|e| e.count).sum();
        assert_eq!(counts, 10_001);
    }

    #[test]
    fn gap_scan_single_value_matches_full_scan() {
        let t = div23_table(2000);
        let report = gap_scan(&t);
        for v in 0..=3 {
            assert_eq!(gap_scan_value(&t, v).unwrap(), report.per_value[v as usize]);
        }
        assert!(matches!(
            gap_scan_value(&t, 4),
            Err(Error::OutOfRange { n: 4, max: 3 })
        ));
    }

    #[test]
    fn gap_scan_reports_missing_values_as_absent() {
        // S={1}, D={2}: bound 2, but on a tiny prefix value 2 never occurs
        let t = SgTable::build(spec(&[1], &[2]), 3).unwrap();
        let report = gap_scan(&t);
        let v2 = &report.per_value[2];
        assert_eq!(v2.first, None);
        assert_eq!(v2.count, 0);
        assert_eq!(v2.max_gap, 0);
        assert_eq!(v2.max_gap_end, None);
    }

    #[test]
    fn gap_report_json_shape_is_stable() {
        let t = SgTable::build(spec(&[1], &[2]), 5).unwrap();
        let report = gap_scan(&t);
        assert_eq!(
            serde_json::to_string(&report).unwrap(),
            concat!(
                r#"{"spec":{"S":[1],"D":[2]},"N":5,"per_value":["#,
                r#"{"value":0,"first":0,"count":3,"max_gap":3,"max_gap_end":5},"#,
                r#"{"value":1,"first":1,"count":2,"max_gap":2,"max_gap_end":3},"#,
                r#"{"value":2,"first":4,"count":1,"max_gap":0,"max_gap_end":null}]}"#
            )
        );
    }

    #[test]
    fn window_checks_pass_at_small_scale() {
        let t = div23_table(50_000);
        let checks = verify_gap_theorems(&t).unwrap();
        assert!(checks.iter().all(|c| c.first_violation.is_none()));
        assert_eq!(
            checks.iter().map(|c| c.tightest).collect::<Vec<_>>(),
            vec![4, 8, 19]
        );
    }

    #[test]
    fn window_checks_require_the_right_game() {
        let t = SgTable::build(spec(&[1], &[2]), 100).unwrap();
        assert!(matches!(
            verify_gap_theorems(&t),
            Err(Error::SpecMismatch(_))
        ));
        assert!(matches!(
            verify_lemma_5mod6(&t),
            Err(Error::SpecMismatch(_))
        ));
    }

    #[test]
    fn lemma_scan_passes_and_counts() {
        let t = div23_table(100_000);
        let report = verify_lemma_5mod6(&t).unwrap();
        assert_eq!(report.first_violation, None);
        assert!(report.checked > 0);
    }

    #[test]
    fn conjecture_allowed_set_for_s2_d5() {
        let t = SgTable::build(spec(&[2], &[5]), 10_000).unwrap();
        let report = check_conjecture(&t).unwrap();
        assert_eq!(report.violation_count, 0);
        assert_eq!(report.sd, 10);
        let within: Vec<u64> = report.allowed().into_iter().filter(|&x| x <= 120).collect();
        assert_eq!(within, vec![5, 10, 20, 35, 110]);
    }

    #[test]
    fn conjecture_holds_on_coprime_odd_divisor_pairs() {
        for &(s, d) in &[(1u64, 3u64), (2, 3), (3, 5), (4, 5)] {
            let t = SgTable::build(spec(&[s], &[d]), 50_000).unwrap();
            let report = check_conjecture(&t).unwrap();
            assert_eq!(report.violation_count, 0, "s={s}, d={d}");
        }
    }

    #[test]
    fn conjecture_counterexample_for_s1_d2() {
        // SG(6) = 2 in i-Mark({1},{2}) (options 5 and 3 have values 0 and
        // 1), but the allowed set near 0 is {2, 4, 10, ...}: a genuine
        // violation of the conjectured structure, reported, not an error.
        let t = SgTable::build(spec(&[1], &[2]), 1000).unwrap();
        let report = check_conjecture(&t).unwrap();
        assert!(report.violation_count > 0);
        assert_eq!(report.violations[0], 6);
        assert_eq!(report.a_seq, vec![4, 10, 22, 46, 94, 190, 382, 766]);
        assert!(report.b_seqs.is_empty());
    }

    #[test]
    fn conjecture_counterexample_for_s3_d4() {
        let t = SgTable::build(spec(&[3], &[4]), 1000).unwrap();
        let report = check_conjecture(&t).unwrap();
        assert!(report.violation_count > 0);
        assert_eq!(report.violations[0], 16);
        assert_eq!(report.b_seqs.len(), 2);
        assert_eq!(report.b_seqs[0][0], 4);
        assert_eq!(report.b_seqs[1][0], 8);
    }

    #[test]
    fn conjecture_preconditions() {
        let t = SgTable::build(spec(&[2], &[4]), 100).unwrap();
        assert!(matches!(
            check_conjecture(&t),
            Err(Error::PreconditionViolated(_))
        ));
        let t = SgTable::build(spec(&[1], &[2, 3]), 100).unwrap();
        assert!(matches!(
            check_conjecture(&t),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn equivalence_check_solved_families() {
        assert_eq!(
            equivalence_check(&spec(&[1, 2, 3, 4], &[6]), 5000).unwrap(),
            None
        );
        assert_eq!(equivalence_check(&spec(&[2], &[7]), 5000).unwrap(), None);
        assert_eq!(equivalence_check(&spec(&[1], &[2]), 5000).unwrap(), None);
        assert!(matches!(
            equivalence_check(&spec(&[1], &[2, 3]), 100),
            Err(Error::SpecMismatch(_))
        ));
    }

    #[test]
    fn export_csv_matches_table() {
        let t = SgTable::build(spec(&[2], &[3]), 12).unwrap();
        let mut buf = Vec::new();
        export_sequence(&t, 0, 12, ExportFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let expected = "n,sg\n0,0\n1,0\n2,1\n3,1\n4,0\n5,0\n6,2\n7,1\n8,0\n9,0\n10,1\n11,1\n12,2\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn export_empty_range_is_header_only() {
        let t = SgTable::build(spec(&[2], &[3]), 12).unwrap();
        let mut buf = Vec::new();
        export_sequence(&t, 5, 4, ExportFormat::Csv, &mut buf).unwrap();
        assert_eq!(buf, b"n,sg\n");
        let mut buf = Vec::new();
        export_sequence(&t, 5, 4, ExportFormat::JsonLines, &mut buf).unwrap();
        assert!(buf.is_empty());
    }

    #[test]
    fn export_json_lines() {
        let t = SgTable::build(spec(&[1], &[3]), 6).unwrap();
        let mut buf = Vec::new();
        export_sequence(&t, 0, 6, ExportFormat::JsonLines, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().last().unwrap(), r#"{"n":6,"sg":2}"#);
        assert_eq!(text.lines().count(), 7);
    }

    #[test]
    fn export_range_checks() {
        let t = SgTable::build(spec(&[1], &[3]), 6).unwrap();
        let mut buf = Vec::new();
        assert!(matches!(
            export_sequence(&t, 0, 7, ExportFormat::Csv, &mut buf),
            Err(Error::OutOfRange { n: 7, max: 6 })
        ));
    }

    #[test]
    fn export_interval_pattern_for_t5() {
        let t = SgTable::build(spec(&[1, 2, 3, 4], &[11]), 10).unwrap();
        let values: Vec<u64> = t.values().collect();
        assert_eq!(values, vec![0, 1, 2, 3, 4, 0, 1, 2, 3, 4, 0]);
    }
}
