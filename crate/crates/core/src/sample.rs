//! Seeded samplers shared by the command line and the test suites. Every
//! sampler draws from a `ChaCha8Rng`, so a seed fixes all outputs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::address::{Address, ElusiveAddress, DEFAULT_SCAN_BUDGET};
use crate::atlas::{piece_of, GlobalPoint, PieceId};
use crate::direction::Direction;
use crate::rat::Rat;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Denominator for sampled coordinates; prime, so sampled points avoid the
/// dyadic grid where vertices live.
const DEN: i64 = 9973;

fn bits(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    (0..len).map(|_| rng.gen_range(0..=1)).collect()
}

pub fn address(rng: &mut ChaCha8Rng, max_len: usize) -> Address {
    let len = rng.gen_range(0..=max_len);
    Address::from_bits(&bits(rng, len))
}

/// Eventually periodic address with head ≤ 6 bits and period 1..=4 bits.
pub fn elusive(rng: &mut ChaCha8Rng) -> ElusiveAddress {
    let (h, p) = (rng.gen_range(0..=6), rng.gen_range(1..=4));
    let (head, period) = (bits(rng, h), bits(rng, p));
    ElusiveAddress::new(&head, &period).expect("period is nonempty")
}

/// Two elusive addresses that differ somewhere.
pub fn elusive_pair(rng: &mut ChaCha8Rng) -> (ElusiveAddress, ElusiveAddress) {
    loop {
        let (a, b) = (elusive(rng), elusive(rng));
        if a.first_difference(&b, DEFAULT_SCAN_BUDGET).is_ok() {
            return (a, b);
        }
    }
}

/// Primitive direction with components in `[-bound, bound]`; with `generic`
/// both components are nonzero.
pub fn direction(rng: &mut ChaCha8Rng, bound: i64, generic: bool) -> Direction {
    loop {
        let (dx, dy) = (rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
        if generic && (dx == 0 || dy == 0) {
            continue;
        }
        if let Ok(d) = Direction::new(dx, dy) {
            return d;
        }
    }
}

/// Direction with both components positive.
pub fn upward_direction(rng: &mut ChaCha8Rng, bound: i64) -> Direction {
    loop {
        let d = direction(rng, bound, true);
        if d.dx > 0 && d.dy > 0 {
            return d;
        }
    }
}

fn strictly_between(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rat {
    let k = rng.gen_range(1..DEN);
    Rat::int(lo) + Rat::new(k * (hi - lo), DEN)
}

/// Point strictly inside one of the rectangles of a random piece of a random
/// quad-T of depth ≤ `max_depth`.
pub fn interior_point(rng: &mut ChaCha8Rng, max_depth: usize) -> GlobalPoint {
    let s = address(rng, max_depth);
    let piece = PieceId::ALL[rng.gen_range(0..4)];
    let r = &piece_of(piece).rects[rng.gen_range(0..2)];
    let (x, y) = (strictly_between(rng, r.x0, r.x1), strictly_between(rng, r.y0, r.y1));
    GlobalPoint::new(s, piece, x, y)
}

/// Point strictly inside the unit square of the table.
pub fn table_point(rng: &mut ChaCha8Rng) -> [Rat; 2] {
    [strictly_between(rng, 0, 1), strictly_between(rng, 0, 1)]
}
