//! Disjunctive sums of i-Mark games: a move picks one component and plays
//! there; the last player to move wins. The SG value of the sum is the
//! XOR of the component values, so the sum is a previous-player win
//! exactly when the XOR is 0.

use crate::error::{Error, Result};
use crate::game::{GameSpec, Position, MAX_POSITION};
use crate::oracle::{mex, Outcome, SgTable};

/// One pile: a game spec together with the current position in it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumComponent {
    pub spec: GameSpec,
    pub pile: Position,
}

/// A position in a disjunctive sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumPosition {
    components: Vec<SumComponent>,
}

/// A move in a sum: which component, and the position it moves to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub component: usize,
    pub to: Position,
}

impl SumPosition {
    pub fn new(components: Vec<SumComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptySet("sum components"));
        }
        for c in &components {
            if c.pile > MAX_POSITION {
                return Err(Error::OutOfRange {
                    n: c.pile,
                    max: MAX_POSITION,
                });
            }
        }
        Ok(SumPosition { components })
    }

    pub fn components(&self) -> &[SumComponent] {
        &self.components
    }

    /// True when no component has a move left.
    pub fn is_terminal(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.spec.options(c.pile).is_empty())
    }

    /// Applies a move after validating it is legal from this position.
    pub fn apply(&mut self, mv: Move) -> Result<()> {
        let c = self.components.get(mv.component).ok_or_else(|| {
            Error::PreconditionViolated(format!(
                "component index {} out of range (sum has {})",
                mv.component,
                self.components.len()
            ))
        })?;
        if !c.spec.options(c.pile).contains(&mv.to) {
            return Err(Error::PreconditionViolated(format!(
                "no move from {} to {} in component {}",
                c.pile, mv.to, mv.component
            )));
        }
        self.components[mv.component].pile = mv.to;
        Ok(())
    }
}

/// XOR of per-component SG values.
pub fn sum_sg(values: &[u64]) -> u64 {
    values.iter().fold(0, |acc, v| acc ^ v)
}

/// Evaluates the sum with a caller-supplied per-component SG function
/// (component index, position) → value. Returns the XOR and the outcome.
pub fn evaluate<F>(sum: &SumPosition, mut sg: F) -> Result<(u64, Outcome)>
where
    F: FnMut(usize, Position) -> Result<u64>,
{
    let mut xor = 0u64;
    for (i, c) in sum.components.iter().enumerate() {
        xor ^= sg(i, c.pile)?;
    }
    let outcome = if xor == 0 { Outcome::P } else { Outcome::N };
    Ok((xor, outcome))
}

/// Finds a move to an XOR-0 position, or None when the sum is already a
/// previous-player win. Scans components in order and options ascending,
/// returning the first winning move, so the result is deterministic.
pub fn winning_move<F>(sum: &SumPosition, mut sg: F) -> Result<Option<Move>>
where
    F: FnMut(usize, Position) -> Result<u64>,
{
    let mut values = Vec::with_capacity(sum.components.len());
    let mut xor = 0u64;
    for (i, c) in sum.components.iter().enumerate() {
        let v = sg(i, c.pile)?;
        xor ^= v;
        values.push(v);
    }
    if xor == 0 {
        return Ok(None);
    }
    for (i, c) in sum.components.iter().enumerate() {
        let target = xor ^ values[i];
        for o in c.spec.options(c.pile) {
            if sg(i, o)? == target {
                return Ok(Some(Move {
                    component: i,
                    to: o,
                }));
            }
        }
    }
    // the XOR theorem guarantees a winning move from any nonzero position
    unreachable!("nonzero XOR position must have a winning move")
}

/// Brute-force evaluation of the whole sum by dynamic programming over
/// the product graph, for validating the XOR rule on small instances.
/// `caps` bounds each component's positions; the product of (cap + 1)
/// must not exceed 10^6.
pub fn sum_oracle_small(sum: &SumPosition, caps: &[Position]) -> Result<u64> {
    if caps.len() != sum.components.len() {
        return Err(Error::PreconditionViolated(format!(
            "got {} caps for {} components",
            caps.len(),
            sum.components.len()
        )));
    }
    for (c, &cap) in sum.components.iter().zip(caps) {
        if c.pile > cap {
            return Err(Error::PreconditionViolated(format!(
                "pile {} exceeds its cap {}",
                c.pile, cap
            )));
        }
    }
    const LIMIT: u128 = 1_000_000;
    let states: u128 = caps
        .iter()
        .fold(1u128, |acc, &cap| acc.saturating_mul(cap as u128 + 1));
    if states > LIMIT {
        return Err(Error::ResourceLimit {
            needed: states.min(u64::MAX as u128) as u64,
            budget: LIMIT as u64,
        });
    }
    let states = states as usize;

    // mixed-radix encoding: index = Σ pile_i * stride_i, strides from the
    // last component inward so ascending index enumerates positions in
    // lexicographic order with every predecessor (smaller in one
    // coordinate) already computed
    let k = caps.len();
    let mut strides = vec![0usize; k];
    let mut acc = 1usize;
    for i in (0..k).rev() {
        strides[i] = acc;
        acc *= caps[i] as usize + 1;
    }

    let mut table = vec![0u16; states];
    let mut piles = vec![0u64; k];
    let mut option_values: Vec<u64> = Vec::new();
    for idx in 0..states {
        option_values.clear();
        for i in 0..k {
            let base = idx - piles[i] as usize * strides[i];
            for o in sum.components[i].spec.options(piles[i]) {
                option_values.push(table[base + o as usize * strides[i]] as u64);
            }
        }
        table[idx] = mex(&option_values) as u16;
        // increment the mixed-radix counter
        for i in (0..k).rev() {
            if piles[i] < caps[i] {
                piles[i] += 1;
                break;
            }
            piles[i] = 0;
        }
    }

    let start: usize = sum
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| c.pile as usize * strides[i])
        .sum();
    Ok(table[start] as u64)
}

/// Convenience: evaluate a sum by building an oracle table per distinct
/// spec, sized to the largest pile using that spec.
pub fn evaluate_with_tables(sum: &SumPosition) -> Result<(u64, Outcome)> {
    let tables = build_tables(sum)?;
    evaluate(sum, |i, n| tables[i].sg(n))
}

/// Convenience: winning move using per-component oracle tables.
pub fn winning_move_with_tables(sum: &SumPosition) -> Result<Option<Move>> {
    let tables = build_tables(sum)?;
    winning_move(sum, |i, n| tables[i].sg(n))
}

fn build_tables(sum: &SumPosition) -> Result<Vec<SgTable>> {
    // share one table among components with identical specs
    let mut out: Vec<Option<SgTable>> = vec![None; sum.components.len()];
    for i in 0..sum.components.len() {
        if out[i].is_some() {
            continue;
        }
        let spec = &sum.components[i].spec;
        let mut need = sum.components[i].pile;
        for j in i + 1..sum.components.len() {
            if sum.components[j].spec == *spec {
                need = need.max(sum.components[j].pile);
            }
        }
        let table = SgTable::build(spec.clone(), need)?;
        for j in (i..sum.components.len()).rev() {
            if sum.components[j].spec == *spec {
                out[j] = Some(table.clone());
            }
        }
    }
    Ok(out.into_iter().map(Option::unwrap).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(s: &[u64], d: &[u64]) -> GameSpec {
        GameSpec::new(s, d).unwrap()
    }

    fn sum_of(parts: &[(&[u64], &[u64], u64)]) -> SumPosition {
        SumPosition::new(
            parts
                .iter()
                .map(|&(s, d, pile)| SumComponent {
                    spec: spec(s, d),
                    pile,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn two_equal_piles_cancel() {
        let sum = sum_of(&[(&[1], &[2], 3), (&[1], &[2], 3)]);
        let (xor, outcome) = evaluate_with_tables(&sum).unwrap();
        assert_eq!(xor, 0);
        assert_eq!(outcome, Outcome::P);
    }

    #[test]
    fn mixed_specs_cancel_when_values_match() {
        // SG(3) = 2 in i-Mark({1},{2,3}), SG(5) = 2 in i-Mark({2},{5})
        let sum = sum_of(&[(&[1], &[2, 3], 3), (&[2], &[5], 5)]);
        let (xor, outcome) = evaluate_with_tables(&sum).unwrap();
        assert_eq!(xor, 0);
        assert_eq!(outcome, Outcome::P);
    }

    #[test]
    fn winning_move_restores_balance() {
        // values 2 and 1: move the first pile 3 → 2 (division by 2, value 1)
        let sum = sum_of(&[(&[1], &[2], 3), (&[1], &[2], 2)]);
        let mv = winning_move_with_tables(&sum).unwrap().unwrap();
        assert_eq!(
            mv,
            Move {
                component: 0,
                to: 2
            }
        );
        let mut after = sum.clone();
        after.apply(mv).unwrap();
        let (xor, _) = evaluate_with_tables(&after).unwrap();
        assert_eq!(xor, 0);
    }

    #[test]
    fn no_winning_move_from_p_positions() {
        let sum = sum_of(&[(&[1], &[2], 3), (&[1], &[2], 3)]);
        assert_eq!(winning_move_with_tables(&sum).unwrap(), None);
        let sum = sum_of(&[(&[1], &[2], 0)]);
        assert_eq!(winning_move_with_tables(&sum).unwrap(), None);
    }

    #[test]
    fn apply_validates_moves() {
        let mut sum = sum_of(&[(&[1], &[2], 3)]);
        assert!(matches!(
            sum.apply(Move {
                component: 1,
                to: 2
            }),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(matches!(
            sum.apply(Move {
                component: 0,
                to: 3
            }),
            Err(Error::PreconditionViolated(_))
        ));
        sum.apply(Move {
            component: 0,
            to: 2,
        })
        .unwrap();
        assert_eq!(sum.components()[0].pile, 2);
    }

    #[test]
    fn terminal_detection() {
        let sum = sum_of(&[(&[2], &[5], 1), (&[3], &[7], 2)]);
        assert!(sum.is_terminal());
        let sum = sum_of(&[(&[2], &[5], 1), (&[3], &[7], 3)]);
        assert!(!sum.is_terminal());
    }

    #[test]
    fn empty_sum_rejected() {
        assert!(matches!(
            SumPosition::new(Vec::new()),
            Err(Error::EmptySet("sum components"))
        ));
    }

    #[test]
    fn product_oracle_agrees_on_equal_piles() {
        let sum = sum_of(&[(&[1], &[2], 3), (&[1], &[2], 3)]);
        assert_eq!(sum_oracle_small(&sum, &[20, 20]).unwrap(), 0);
    }

    #[test]
    fn product_oracle_matches_single_component_table() {
        let table = SgTable::build(spec(&[1], &[2, 3]), 30).unwrap();
        for n in 0..=30 {
            let sum = sum_of(&[(&[1], &[2, 3], n)]);
            assert_eq!(sum_oracle_small(&sum, &[30]).unwrap(), table.sg(n).unwrap());
        }
    }

    #[test]
    fn product_oracle_matches_xor_on_a_grid() {
        let ta = SgTable::build(spec(&[1], &[2]), 12).unwrap();
        let tb = SgTable::build(spec(&[2], &[3]), 12).unwrap();
        for a in 0..=12u64 {
            for b in 0..=12u64 {
                let sum = sum_of(&[(&[1], &[2], a), (&[2], &[3], b)]);
                let direct = sum_oracle_small(&sum, &[12, 12]).unwrap();
                let xor = ta.sg(a).unwrap() ^ tb.sg(b).unwrap();
                assert_eq!(direct, xor, "piles ({a}, {b})");
            }
        }
    }

    #[test]
    fn product_oracle_guards() {
        let sum = sum_of(&[(&[1], &[2], 3), (&[1], &[2], 3)]);
        assert!(matches!(
            sum_oracle_small(&sum, &[20]),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(matches!(
            sum_oracle_small(&sum, &[2, 20]),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(matches!(
            sum_oracle_small(&sum, &[2000, 2000]),
            Err(Error::ResourceLimit { .. })
        ));
    }
}
