use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Primitive integer direction vector. Chart transitions are translations
/// composed with positive homotheties, so a direction is global.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Direction {
    pub dx: i64,
    pub dy: i64,
}

impl Direction {
    /// Requires a primitive, nonzero vector.
    pub fn new(dx: i64, dy: i64) -> Result<Direction> {
        if dx == 0 && dy == 0 {
            return Err(Error::InvalidDirection("zero vector".into()));
        }
        if dx.gcd(&dy) != 1 {
            return Err(Error::InvalidDirection(format!("({dx},{dy}) is not primitive")));
        }
        Ok(Direction { dx, dy })
    }

    /// Divides out the gcd; returns the direction and the factor removed.
    pub fn primitive(dx: i64, dy: i64) -> Result<(Direction, i64)> {
        if dx == 0 && dy == 0 {
            return Err(Error::InvalidDirection("zero vector".into()));
        }
        let g = dx.gcd(&dy);
        Ok((Direction { dx: dx / g, dy: dy / g }, g))
    }

    pub fn reversed(self) -> Direction {
        Direction { dx: -self.dx, dy: -self.dy }
    }

    pub fn norm_sq(self) -> i64 {
        self.dx * self.dx + self.dy * self.dy
    }

    pub fn dot(self, v: (i64, i64)) -> i64 {
        self.dx * v.0 + self.dy * v.1
    }

    pub fn cross(self, other: Direction) -> i64 {
        self.dx * other.dy - self.dy * other.dx
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.dx, self.dy)
    }
}

/// Parses `dx,dy`.
impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Direction> {
        let bad = || Error::Parse(format!("invalid direction {s:?}, expected dx,dy"));
        let (a, b) = s.trim().split_once(',').ok_or_else(bad)?;
        let dx = a.trim().parse().map_err(|_| bad())?;
        let dy = b.trim().parse().map_err(|_| bad())?;
        Direction::new(dx, dy)
    }
}
