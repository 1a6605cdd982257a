//! Binary-string addresses of quad-T charts and the closed-form metric
//! bounds that depend only on addresses.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rat::Rat;

/// A finite binary string. The empty string is the root chart.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Address {
    bits: Vec<u8>,
}

impl Address {
    pub fn root() -> Address {
        Address { bits: Vec::new() }
    }

    pub fn from_bits(bits: &[u8]) -> Address {
        assert!(bits.iter().all(|&b| b <= 1), "bits must be 0 or 1");
        Address { bits: bits.to_vec() }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_root(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn child(&self, bit: u8) -> Address {
        assert!(bit <= 1);
        let mut bits = self.bits.clone();
        bits.push(bit);
        Address { bits }
    }

    /// Parent address and the bit that was dropped, or `None` at the root.
    pub fn parent(&self) -> Option<(Address, u8)> {
        let (&last, rest) = self.bits.split_last()?;
        Some((Address { bits: rest.to_vec() }, last))
    }

    pub fn last_bit(&self) -> Option<u8> {
        self.bits.last().copied()
    }

    pub fn prefix(&self, n: usize) -> Address {
        Address { bits: self.bits[..n.min(self.bits.len())].to_vec() }
    }

    pub fn is_prefix_of(&self, other: &Address) -> bool {
        other.bits.starts_with(&self.bits)
    }

    /// Physical scale `2^{-|s|}` of the chart.
    pub fn scale(&self) -> Rat {
        Rat::pow2(-(self.len() as i64))
    }

    /// True when one address is the other with exactly one bit appended.
    pub fn is_adjacent(&self, other: &Address) -> bool {
        (self.len() + 1 == other.len() && self.is_prefix_of(other))
            || (other.len() + 1 == self.len() && other.is_prefix_of(self))
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            write!(f, "ε")
        } else {
            fmt::Display::fmt(self, f)
        }
    }
}

impl FromStr for Address {
    type Err = Error;

    fn from_str(s: &str) -> Result<Address> {
        let s = s.trim();
        if s == "ε" || s == "e" {
            return Ok(Address::root());
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("invalid address {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Address { bits })
    }
}

impl Serialize for Address {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Address {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Address, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Longest common prefix.
pub fn wedge(s: &Address, t: &Address) -> Address {
    let n = s.bits.iter().zip(&t.bits).take_while(|(a, b)| a == b).count();
    s.prefix(n)
}

/// An infinite, eventually periodic binary string: `prefix` followed by
/// `period` repeated forever.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElusiveAddress {
    head: Vec<u8>,
    period: Vec<u8>,
}

impl ElusiveAddress {
    pub fn new(head: &[u8], period: &[u8]) -> Result<ElusiveAddress> {
        if period.is_empty() {
            return Err(Error::Parse("period must be nonempty".into()));
        }
        if head.iter().chain(period).any(|&b| b > 1) {
            return Err(Error::Parse("bits must be 0 or 1".into()));
        }
        Ok(ElusiveAddress::normalized(head.to_vec(), period.to_vec()))
    }

    /// Shortest period and head, so that equal strings compare equal.
    fn normalized(mut head: Vec<u8>, period: Vec<u8>) -> ElusiveAddress {
        let n = period.len();
        let d = (1..=n).find(|&d| n.is_multiple_of(d) && (d..n).all(|i| period[i] == period[i - d])).expect("d = n repeats");
        let mut period = period[..d].to_vec();
        while head.last() == period.last() && !head.is_empty() {
            head.pop();
            period.rotate_right(1);
        }
        ElusiveAddress { head, period }
    }

    /// The constant string `bbb...`.
    pub fn constant(bit: u8) -> ElusiveAddress {
        ElusiveAddress::new(&[], &[bit]).expect("valid bit")
    }

    pub fn bit(&self, n: usize) -> u8 {
        if n < self.head.len() {
            self.head[n]
        } else {
            self.period[(n - self.head.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> Address {
        Address { bits: (0..n).map(|i| self.bit(i)).collect() }
    }

    /// The same string with bit `n` flipped.
    pub fn flip_bit(&self, n: usize) -> ElusiveAddress {
        let mut head = self.prefix(n + 1).bits;
        head[n] ^= 1;
        // rotate the period so the tail after position n is unchanged
        let tail_start = n + 1;
        let period = (0..self.period.len()).map(|i| self.bit(tail_start + i)).collect();
        ElusiveAddress::normalized(head, period)
    }

    /// Index of the first differing bit, scanning at most `budget` bits.
    pub fn first_difference(&self, other: &ElusiveAddress, budget: usize) -> Result<usize> {
        (0..budget)
            .find(|&i| self.bit(i) != other.bit(i))
            .ok_or(Error::ScanBudgetExceeded(budget))
    }
}

impl fmt::Display for ElusiveAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.head {
            write!(f, "{b}")?;
        }
        write!(f, "(")?;
        for b in &self.period {
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for ElusiveAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `head(period)`, e.g. `01(1)` for `0111...`.
impl FromStr for ElusiveAddress {
    type Err = Error;

    fn from_str(s: &str) -> Result<ElusiveAddress> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid elusive address {s:?}, expected head(period)"));
        let (head, rest) = s.split_once('(').ok_or_else(bad)?;
        let period = rest.strip_suffix(')').ok_or_else(bad)?;
        let head: Address = if head.is_empty() { Address::root() } else { head.parse()? };
        let period: Address = period.parse()?;
        ElusiveAddress::new(&head.bits, &period.bits)
    }
}

pub const DEFAULT_SCAN_BUDGET: usize = 4096;

/// The 2-adic distance `2^{-|a ∧ b|}`.
pub fn d2(a: &ElusiveAddress, b: &ElusiveAddress) -> Result<Rat> {
    d2_with_budget(a, b, DEFAULT_SCAN_BUDGET)
}

pub fn d2_with_budget(a: &ElusiveAddress, b: &ElusiveAddress, budget: usize) -> Result<Rat> {
    let k = a.first_difference(b, budget)?;
    Ok(Rat::pow2(-(k as i64)))
}

/// `(2^{|t|-|w|-1} - 1) / 2^{|t|-1}`: the lower bound on the climb from
/// `Q^w` up to `Q^t` through the intermediate quad-Ts, for `w` a proper
/// prefix of `t`.
fn climb_bound(t_len: usize, w_len: usize) -> Rat {
    debug_assert!(t_len > w_len);
    let num = Rat::pow2((t_len - w_len - 1) as i64) - Rat::one();
    num / Rat::pow2(t_len as i64 - 1)
}

/// Lower bound on the surface distance between `Q^s` and `Q^t`.
pub fn dist_lower(s: &Address, t: &Address) -> Result<Rat> {
    if s == t {
        return Err(Error::EqualAddresses);
    }
    if s.is_adjacent(t) {
        return Ok(Rat::zero());
    }
    let w = wedge(s, t);
    if &w == s {
        return Ok(climb_bound(t.len(), s.len()));
    }
    if &w == t {
        return Ok(climb_bound(s.len(), t.len()));
    }
    Ok(climb_bound(t.len(), w.len()) + climb_bound(s.len(), w.len()) + Rat::pow2(-(w.len() as i64)))
}

/// `3 * m_bar * 2^{-|s|}`, the diameter bound of the branch rooted at `Q^s`.
pub fn branch_diameter_bound(s: &Address, m_bar: &Rat) -> Rat {
    Rat::int(3) * m_bar * s.scale()
}
