//! Exact costs.
//!
//! Action costs are nonnegative rationals and heuristic values may be
//! infinite (dead ends). Databases store costs as integer multiples of a
//! common denominator ([`Scale`]) so that online evaluation is plain integer
//! addition.

use core::cmp::Ordering;
use core::fmt;
use core::iter::Sum;
use core::ops::Add;
use core::str::FromStr;

use num_integer::Integer;

/// Exact rational number used for action costs.
pub type Rational = num_rational::Ratio<i128>;

/// A nonnegative rational cost or infinity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Cost {
    Finite(Rational),
    Infinite,
}

impl Cost {
    pub const ZERO: Cost = Cost::Finite(Rational::new_raw(0, 1));
    pub const ONE: Cost = Cost::Finite(Rational::new_raw(1, 1));

    pub fn int(n: i128) -> Cost {
        Cost::Finite(Rational::from_integer(n))
    }

    pub fn ratio(numer: i128, denom: i128) -> Cost {
        Cost::Finite(Rational::new(numer, denom))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn finite(&self) -> Option<Rational> {
        match self {
            Cost::Finite(r) => Some(*r),
            Cost::Infinite => None,
        }
    }

    /// Smallest integer not below the value; infinity stays infinite.
    pub fn ceil(self) -> Cost {
        match self {
            Cost::Finite(r) => Cost::Finite(r.ceil()),
            Cost::Infinite => Cost::Infinite,
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Cost::Finite(r) => r.is_integer(),
            Cost::Infinite => false,
        }
    }
}

impl From<Rational> for Cost {
    fn from(r: Rational) -> Self {
        Cost::Finite(r)
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => a.cmp(b),
            (Cost::Finite(_), Cost::Infinite) => Ordering::Less,
            (Cost::Infinite, Cost::Finite(_)) => Ordering::Greater,
            (Cost::Infinite, Cost::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl Add<Rational> for Cost {
    type Output = Cost;

    fn add(self, rhs: Rational) -> Cost {
        self + Cost::Finite(rhs)
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, |acc, c| acc + c)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Cost::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Cost::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed cost literal {0:?}")]
pub struct ParseCostError(pub alloc::string::String);

impl FromStr for Cost {
    type Err = ParseCostError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseCostError(s.into());
        let s = s.trim();
        if s == "inf" {
            return Ok(Cost::Infinite);
        }
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: i128 = n.parse().map_err(|_| err())?;
        let d: i128 = d.parse().map_err(|_| err())?;
        if d <= 0 || n < 0 {
            return Err(err());
        }
        Ok(Cost::ratio(n, d))
    }
}

/// A cost measured in units of `1 / denom` of some [`Scale`]; `Units::INF`
/// is infinity and addition saturates to it.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Units(pub i128);

impl Units {
    pub const ZERO: Units = Units(0);
    pub const INF: Units = Units(i128::MAX);

    pub fn is_inf(self) -> bool {
        self == Units::INF
    }
}

impl Add for Units {
    type Output = Units;

    #[inline]
    fn add(self, rhs: Units) -> Units {
        Units(self.0.saturating_add(rhs.0))
    }
}

impl Sum for Units {
    fn sum<I: Iterator<Item = Units>>(iter: I) -> Units {
        iter.fold(Units::ZERO, |acc, u| acc + u)
    }
}

/// Common denominator that turns a family of rationals into integers.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Scale {
    denom: i128,
}

impl Scale {
    pub const UNIT: Scale = Scale { denom: 1 };

    /// Least common denominator of the given costs.
    pub fn for_costs<I: IntoIterator<Item = Rational>>(costs: I) -> Scale {
        let denom = costs
            .into_iter()
            .fold(1i128, |acc, c| acc.lcm(c.denom()));
        Scale { denom }
    }

    pub fn denom(&self) -> i128 {
        self.denom
    }

    /// Converts a rational whose denominator divides this scale.
    pub fn units(&self, r: Rational) -> Units {
        debug_assert!(self.denom % r.denom() == 0, "{r} not representable at scale {}", self.denom);
        Units(r.numer() * (self.denom / r.denom()))
    }

    pub fn cost(&self, u: Units) -> Cost {
        if u.is_inf() {
            Cost::Infinite
        } else {
            Cost::Finite(Rational::new(u.0, self.denom))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn display_forms() {
        assert_eq!(Cost::ratio(31, 2).to_string(), "31/2");
        assert_eq!(Cost::int(19).to_string(), "19");
        assert_eq!(Cost::Infinite.to_string(), "inf");
        assert_eq!(Cost::ratio(187, 15).to_string(), "187/15");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0", "19", "31/2", "inf"] {
            assert_eq!(s.parse::<Cost>().unwrap().to_string(), s);
        }
        assert_eq!("4/2".parse::<Cost>().unwrap(), Cost::int(2));
        assert!("1/0".parse::<Cost>().is_err());
        assert!("-1".parse::<Cost>().is_err());
        assert!("x".parse::<Cost>().is_err());
    }

    #[test]
    fn ordering_and_infinity() {
        assert!(Cost::ratio(1, 3) < Cost::ratio(1, 2));
        assert!(Cost::int(1_000_000) < Cost::Infinite);
        assert_eq!(Cost::Infinite + Cost::ONE, Cost::Infinite);
        assert_eq!(Cost::ratio(1, 3) + Cost::ratio(1, 5), Cost::ratio(8, 15));
        assert_eq!(Cost::ratio(187, 15).ceil(), Cost::int(13));
        assert_eq!(Cost::int(4).ceil(), Cost::int(4));
    }

    #[test]
    fn scale_round_trip() {
        let costs = [Rational::new(1, 3), Rational::new(1, 5), Rational::new(2, 1)];
        let scale = Scale::for_costs(costs);
        assert_eq!(scale.denom(), 15);
        let total: Units = costs.iter().map(|&c| scale.units(c)).sum();
        assert_eq!(scale.cost(total), Cost::ratio(38, 15));
        assert_eq!(scale.cost(Units::INF + Units(3)), Cost::Infinite);
    }
}
