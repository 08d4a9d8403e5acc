//! Per-edge cost-sharing tables.
//!
//! A scheme stores the base cost `p` of an edge and the share `f(x)` paid by
//! each of `x` users for every load `1 <= x <= capacity`. Admissible tables
//! are non-increasing, never below the fair share `p/x`, and start at `p`.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeProperty {
    /// Base cost must be nonnegative.
    NonNegativeCost,
    /// `f(x) >= f(x+1)`.
    NonIncreasing,
    /// `f(x) >= p/x`.
    FairShareFloor,
    /// `f(1) = p`.
    AloneFullCost,
    /// `f(x) <= p`; implied by the others.
    CappedByCost,
    /// `x * f(x) >= p`; implied by the others.
    CoversCost,
}

/// A failed property check at load `load` (0 for whole-table properties).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub property: SchemeProperty,
    pub load: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at x={}", self.property, self.load)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostSharingScheme {
    base_cost: Rational,
    shares: Vec<Rational>,
}

impl CostSharingScheme {
    /// Wraps a table without checking it; see [`CostSharingScheme::validate`].
    pub fn from_table(base_cost: Rational, shares: Vec<Rational>) -> Self {
        CostSharingScheme { base_cost, shares }
    }

    /// Wraps a table, rejecting it if any property fails.
    pub fn try_from_table(base_cost: Rational, shares: Vec<Rational>) -> Result<Self> {
        let scheme = Self::from_table(base_cost, shares);
        let violations = scheme.validate();
        if violations.is_empty() {
            Ok(scheme)
        } else {
            Err(Error::SchemeViolation(violations))
        }
    }

    /// Fair split `f(x) = p/x`.
    pub fn ordinary(base_cost: Rational, capacity: u32) -> Self {
        let shares = (1..=capacity)
            .map(|x| &base_cost / int(i64::from(x)))
            .collect();
        CostSharingScheme { base_cost, shares }
    }

    /// Full cost `p` per user below `full_share_at` users, fair split `p/x`
    /// from there on.
    pub fn threshold(base_cost: Rational, capacity: u32, full_share_at: u32) -> Result<Self> {
        if full_share_at < 1 || full_share_at > capacity {
            return Err(Error::ParameterViolation(format!(
                "full_share_at = {full_share_at} outside 1..={capacity}"
            )));
        }
        let shares = (1..=capacity)
            .map(|x| {
                if x < full_share_at {
                    base_cost.clone()
                } else {
                    &base_cost / int(i64::from(x))
                }
            })
            .collect();
        Self::try_from_table(base_cost, shares)
    }

    pub fn base_cost(&self) -> &Rational {
        &self.base_cost
    }

    pub fn capacity(&self) -> u32 {
        self.shares.len() as u32
    }

    pub fn shares(&self) -> &[Rational] {
        &self.shares
    }

    /// `f(load)`, or `None` outside `1..=capacity`.
    pub fn share(&self, load: u32) -> Option<&Rational> {
        if load == 0 {
            None
        } else {
            self.shares.get(load as usize - 1)
        }
    }

    /// `f(1) + ... + f(load)`; `None` above capacity.
    pub fn partial_sum(&self, load: u32) -> Option<Rational> {
        if load as usize > self.shares.len() {
            return None;
        }
        Some(self.shares[..load as usize].iter().fold(Rational::zero(), |acc, f| acc + f))
    }

    pub fn is_ordinary(&self) -> bool {
        self.shares
            .iter()
            .enumerate()
            .all(|(i, f)| *f == &self.base_cost / int(i as i64 + 1))
    }

    /// Every entry and the base cost multiplied by `factor > 0`.
    pub fn scaled(&self, factor: &Rational) -> Self {
        CostSharingScheme {
            base_cost: &self.base_cost * factor,
            shares: self.shares.iter().map(|f| f * factor).collect(),
        }
    }

    /// All failed property checks; empty iff the table is admissible.
    pub fn validate(&self) -> Vec<Violation> {
        let p = &self.base_cost;
        let mut violations = Vec::new();
        if p < &Rational::zero() {
            violations.push(Violation { property: SchemeProperty::NonNegativeCost, load: 0 });
        }
        for (i, f) in self.shares.iter().enumerate() {
            let x = i + 1;
            let xr = int(x as i64);
            if let Some(next) = self.shares.get(i + 1) {
                if f < next {
                    violations.push(Violation { property: SchemeProperty::NonIncreasing, load: x });
                }
            }
            if f < &(p / &xr) {
                violations.push(Violation { property: SchemeProperty::FairShareFloor, load: x });
            }
            if x == 1 && f != p {
                violations.push(Violation { property: SchemeProperty::AloneFullCost, load: 1 });
            }
            if f > p {
                violations.push(Violation { property: SchemeProperty::CappedByCost, load: x });
            }
            if &(f * &xr) < p {
                violations.push(Violation { property: SchemeProperty::CoversCost, load: x });
            }
        }
        violations
    }
}

impl fmt::Display for CostSharingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let table: Vec<String> = self.shares.iter().map(format_rational).collect();
        write!(f, "p={} f=[{}]", format_rational(&self.base_cost), table.join(", "))
    }
}

/// Projects an arbitrary candidate table onto the admissible set: `f(1) = p`,
/// then each entry is clamped into `[p/x, min(p, f(x-1))]`.
pub fn project_table(base_cost: &Rational, candidate: &[Rational]) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::with_capacity(candidate.len());
    for (i, value) in candidate.iter().enumerate() {
        let x = int(i as i64 + 1);
        if i == 0 {
            out.push(base_cost.clone());
            continue;
        }
        let floor = base_cost / &x;
        let ceiling = out[i - 1].clone().min(base_cost.clone());
        let clamped = value.clone().max(floor).min(ceiling);
        out.push(clamped);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use proptest::prelude::*;

    #[test]
    fn ordinary_table() {
        let s = CostSharingScheme::ordinary(int(6), 3);
        assert_eq!(s.shares(), &[int(6), int(3), int(2)]);
        assert!(s.validate().is_empty());
        assert!(s.is_ordinary());
    }

    #[test]
    fn zero_cost_ordinary() {
        let s = CostSharingScheme::ordinary(int(0), 4);
        assert!(s.shares().iter().all(|f| f.is_zero()));
        assert!(s.validate().is_empty());
    }

    #[test]
    fn threshold_tables() {
        let p = ratio(101, 100);
        let s = CostSharingScheme::threshold(p.clone(), 4, 4).unwrap();
        assert_eq!(s.shares(), &[p.clone(), p.clone(), p.clone(), ratio(101, 400)]);
        assert!(!s.is_ordinary());

        let same = CostSharingScheme::threshold(int(7), 3, 1).unwrap();
        assert_eq!(same, CostSharingScheme::ordinary(int(7), 3));

        let two = CostSharingScheme::threshold(int(1), 2, 2).unwrap();
        assert_eq!(two.shares(), &[int(1), ratio(1, 2)]);

        assert!(CostSharingScheme::threshold(int(1), 2, 3).is_err());
        assert!(CostSharingScheme::threshold(int(1), 2, 0).is_err());
    }

    #[test]
    fn increasing_table_rejected() {
        let s = CostSharingScheme::from_table(int(5), vec![int(5), int(6)]);
        let v = s.validate();
        assert!(v.contains(&Violation { property: SchemeProperty::NonIncreasing, load: 1 }));
    }

    #[test]
    fn below_fair_share_rejected() {
        let s = CostSharingScheme::from_table(int(5), vec![int(5), int(2)]);
        let v = s.validate();
        assert!(v.contains(&Violation { property: SchemeProperty::FairShareFloor, load: 2 }));
        assert!(v.contains(&Violation { property: SchemeProperty::CoversCost, load: 2 }));
    }

    #[test]
    fn wrong_first_entry_rejected() {
        let s = CostSharingScheme::from_table(int(5), vec![int(4)]);
        let v = s.validate();
        assert!(v.contains(&Violation { property: SchemeProperty::AloneFullCost, load: 1 }));
        assert!(CostSharingScheme::try_from_table(int(5), vec![int(4)]).is_err());
    }

    #[test]
    fn partial_sums() {
        let s = CostSharingScheme::ordinary(int(6), 3);
        assert_eq!(s.partial_sum(0), Some(int(0)));
        assert_eq!(s.partial_sum(2), Some(int(9)));
        assert_eq!(s.partial_sum(4), None);
        assert_eq!(s.share(0), None);
        assert_eq!(s.share(4), None);
    }

    proptest! {
        #[test]
        fn projection_is_admissible(
            p_num in 0i64..50,
            p_den in 1i64..6,
            raw in proptest::collection::vec((0i64..80, 1i64..8), 0..7),
        ) {
            let p = ratio(p_num, p_den);
            let candidate: Vec<Rational> = raw.iter().map(|&(n, d)| ratio(n, d)).collect();
            let table = project_table(&p, &candidate);
            let scheme = CostSharingScheme::from_table(p, table);
            prop_assert!(scheme.validate().is_empty(), "{}", scheme);
        }

        #[test]
        fn scaling_preserves_admissibility(p_num in 0i64..30, cap in 0u32..6, k in 1i64..9, full in 1u32..6) {
            let full = full.min(cap.max(1));
            let base = if cap == 0 {
                CostSharingScheme::ordinary(int(p_num), 0)
            } else {
                CostSharingScheme::threshold(int(p_num), cap, full).unwrap()
            };
            prop_assert!(base.scaled(&ratio(k, 7)).validate().is_empty());
        }
    }
}
