//! Front door for computing values: routes each query to the matching
//! closed form when one exists, and falls back to (or is forced onto)
//! the brute-force table otherwise.

use std::fmt;

use crate::closed_form::{outcome_periodic, sg_for_family};
use crate::error::{Error, Result};
use crate::game::{FamilyTag, GameSpec, Position, MAX_POSITION};
use crate::oracle::{Outcome, SgTable, DEFAULT_MEMORY_BUDGET};

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    ClosedForm,
    Oracle,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::ClosedForm => f.write_str("closed-form"),
            Source::Oracle => f.write_str("oracle"),
        }
    }
}

/// Stateful evaluator for one rule set. Keeps the oracle table it builds,
/// growing it geometrically as larger positions are queried.
#[derive(Debug)]
pub struct Evaluator {
    spec: GameSpec,
    family: FamilyTag,
    force_oracle: bool,
    budget: u64,
    table: Option<SgTable>,
}

impl Evaluator {
    pub fn new(spec: GameSpec) -> Self {
        let family = spec.classify_family();
        Evaluator {
            spec,
            family,
            force_oracle: false,
            budget: DEFAULT_MEMORY_BUDGET,
            table: None,
        }
    }

    /// Ignore closed forms and answer everything from the table.
    pub fn force_oracle(mut self, yes: bool) -> Self {
        self.force_oracle = yes;
        self
    }

    /// Cap the table's memory in bytes.
    pub fn memory_budget(mut self, bytes: u64) -> Self {
        self.budget = bytes;
        self
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn family(&self) -> FamilyTag {
        self.family
    }

    /// The table built so far, if any.
    pub fn table(&self) -> Option<&SgTable> {
        self.table.as_ref()
    }

    /// Adopt a previously built (e.g. loaded) table for this rule set.
    pub fn attach_table(&mut self, table: SgTable) -> Result<()> {
        if *table.spec() != self.spec {
            return Err(Error::SpecMismatch(format!(
                "table is for S={:?}, D={:?}, evaluator is for S={:?}, D={:?}",
                table.spec().subtractions(),
                table.spec().divisors(),
                self.spec.subtractions(),
                self.spec.divisors()
            )));
        }
        self.table = Some(table);
        Ok(())
    }

    /// SG value of position n, with the source that produced it.
    pub fn sg(&mut self, n: Position) -> Result<(u64, Source)> {
        if !self.force_oracle {
            match self.family {
                FamilyTag::Theorem1 { .. }
                | FamilyTag::Theorem2 { .. }
                | FamilyTag::Theorem3 { .. } => {
                    return Ok((sg_for_family(self.family, n)?, Source::ClosedForm));
                }
                _ => {}
            }
        }
        let table = self.ensure_table(n)?;
        Ok((table.sg(n)?, Source::Oracle))
    }

    /// Outcome of position n. For the periodic family this avoids the
    /// table entirely; otherwise it is derived from the SG value.
    pub fn outcome(&mut self, n: Position) -> Result<(Outcome, Source)> {
        if !self.force_oracle {
            if let FamilyTag::PeriodicOutcome { t, d } = self.family {
                if n > MAX_POSITION {
                    return Err(Error::OutOfRange {
                        n,
                        max: MAX_POSITION,
                    });
                }
                return Ok((outcome_periodic(n, t, d)?, Source::ClosedForm));
            }
        }
        let (v, source) = self.sg(n)?;
        let outcome = if v == 0 { Outcome::P } else { Outcome::N };
        Ok((outcome, source))
    }

    fn ensure_table(&mut self, n: Position) -> Result<&SgTable> {
        if n > MAX_POSITION {
            return Err(Error::OutOfRange {
                n,
                max: MAX_POSITION,
            });
        }
        let covered = self.table.as_ref().is_some_and(|t| t.n_max() >= n);
        if !covered {
            // grow geometrically so interleaved queries stay linear overall,
            // but fall back to the exact size if doubling blows the budget
            let target = match &self.table {
                Some(t) => n.max(t.n_max().saturating_mul(2).min(MAX_POSITION)),
                None => n,
            };
            match self.grow_to(target) {
                Ok(()) => {}
                Err(Error::ResourceLimit { .. }) if target > n => self.grow_to(n)?,
                Err(e) => return Err(e),
            }
        }
        Ok(self.table.as_ref().unwrap())
    }

    fn grow_to(&mut self, n: Position) -> Result<()> {
        match self.table.as_mut() {
            Some(t) => t.extend_with_budget(n, self.budget),
            None => {
                self.table = Some(SgTable::build_with_budget(
                    self.spec.clone(),
                    n,
                    self.budget,
                )?);
                Ok(())
            }
        }
    }
}
