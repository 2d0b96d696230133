use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Exact non-negative count. Serialised as a JSON number when it fits in
/// 64 bits and as a decimal string otherwise.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "Repr", try_from = "Repr")]
pub struct Count(pub BigUint);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr {
    Small(u64),
    Big(String),
}

impl From<Count> for Repr {
    fn from(c: Count) -> Self {
        match c.0.to_u64() {
            Some(v) => Repr::Small(v),
            None => Repr::Big(c.0.to_string()),
        }
    }
}

impl TryFrom<Repr> for Count {
    type Error = String;

    fn try_from(r: Repr) -> Result<Self, String> {
        match r {
            Repr::Small(v) => Ok(Count::from(v)),
            Repr::Big(s) => s.parse().map(Count).map_err(|_| format!("'{s}' is not a count")),
        }
    }
}

impl Count {
    pub fn zero() -> Self {
        Count(BigUint::zero())
    }

    pub fn to_u128(&self) -> Option<u128> {
        self.0.to_u128()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn big(&self) -> &BigUint {
        &self.0
    }

    pub fn pow(base: u64, exp: u32) -> Self {
        Count(BigUint::from(base).pow(exp))
    }
}

impl From<u128> for Count {
    fn from(v: u128) -> Self {
        Count(BigUint::from(v))
    }
}

impl From<u64> for Count {
    fn from(v: u64) -> Self {
        Count(BigUint::from(v))
    }
}

impl From<BigUint> for Count {
    fn from(v: BigUint) -> Self {
        Count(v)
    }
}

impl PartialEq<u64> for Count {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

impl PartialEq<u128> for Count {
    fn eq(&self, other: &u128) -> bool {
        self.0 == BigUint::from(*other)
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Sum that runs in `u128` and spills into a big integer on overflow.
#[derive(Clone, Debug, Default)]
pub struct Accumulator {
    small: u128,
    big: Option<BigUint>,
}

impl Accumulator {
    pub fn add(&mut self, v: u128) {
        match self.small.checked_add(v) {
            Some(s) => self.small = s,
            None => {
                let spill = BigUint::from(self.small) + BigUint::from(v);
                *self.big.get_or_insert_with(BigUint::zero) += spill;
                self.small = 0;
            }
        }
    }

    pub fn add_big(&mut self, v: &BigUint) {
        *self.big.get_or_insert_with(BigUint::zero) += v;
    }

    pub fn merge(mut self, other: Accumulator) -> Accumulator {
        self.add(other.small);
        if let Some(b) = other.big {
            self.add_big(&b);
        }
        self
    }

    pub fn finish(self) -> Count {
        match self.big {
            None => Count::from(self.small),
            Some(b) => Count(b + BigUint::from(self.small)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulator_spills_exactly() {
        let mut acc = Accumulator::default();
        acc.add(u128::MAX);
        acc.add(5);
        acc.add(u128::MAX);
        let expected = BigUint::from(u128::MAX) * 2u32 + 5u32;
        assert_eq!(acc.finish().0, expected);
    }

    #[test]
    fn merge_matches_sequential_sum() {
        let mut a = Accumulator::default();
        let mut b = Accumulator::default();
        a.add(u128::MAX - 1);
        b.add(3);
        assert_eq!(a.merge(b).finish().0, BigUint::from(u128::MAX) + 2u32);
    }

    #[test]
    fn json_form() {
        assert_eq!(serde_json::to_string(&Count::from(1024u64)).unwrap(), "1024");
        let big = Count::pow(10, 30);
        let s = serde_json::to_string(&big).unwrap();
        assert_eq!(s, "\"1000000000000000000000000000000\"");
        assert_eq!(serde_json::from_str::<Count>(&s).unwrap(), big);
        assert_eq!(serde_json::from_str::<Count>("7").unwrap(), 7u64);
    }
}
