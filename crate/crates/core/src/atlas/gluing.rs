//! Edge identifications: solid edges within a quad-T, boundary components
//! between quad-Ts of adjacent levels, and the two self-gluings of the root.

use serde::Serialize;

use super::pieces::{canonical_pieces, find_label, EdgeLabel, IPoint, PieceId};
use crate::address::Address;
use crate::error::{Error, Result};
use crate::rat::Rat;

/// A solid edge of one piece, by piece and edge index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeRef {
    pub piece: PieceId,
    pub edge: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolidPair {
    pub label: EdgeLabel,
    pub a: EdgeRef,
    pub b: EdgeRef,
    /// Maps the lower endpoint of `a` to the upper endpoint of `b`. Never
    /// set in the canonical table; present so faulty tables can be expressed.
    pub flipped: bool,
}

/// `parent_label^s ~ child_label^{s bit}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BetweenRule {
    pub parent_label: EdgeLabel,
    pub bit: u8,
    pub child_label: EdgeLabel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GluingTable {
    pub within: Vec<SolidPair>,
    pub between: Vec<BetweenRule>,
    pub root: Vec<(EdgeLabel, EdgeLabel)>,
}

impl GluingTable {
    pub fn canonical() -> GluingTable {
        let within = EdgeLabel::all_solid()
            .map(|label| {
                let found = find_label(label);
                assert_eq!(found.len(), 2, "label {label} must occur twice");
                let r = |(piece, edge): (PieceId, usize)| EdgeRef { piece, edge };
                SolidPair { label, a: r(found[0]), b: r(found[1]), flipped: false }
            })
            .collect();
        use EdgeLabel::{Gamma as G, Sigma as S};
        let rule = |parent_label, bit, child_label| BetweenRule { parent_label, bit, child_label };
        let between = vec![
            rule(S(1), 1, G(2)),
            rule(S(6), 1, G(5)),
            rule(G(1), 1, S(2)),
            rule(G(6), 1, S(5)),
            rule(S(3), 0, G(2)),
            rule(S(4), 0, G(5)),
            rule(G(3), 0, S(2)),
            rule(G(4), 0, S(5)),
        ];
        let root = vec![(G(2), S(2)), (G(5), S(5))];
        GluingTable { within, between, root }
    }

    /// Partner of a solid edge inside the same quad-T.
    pub fn solid_partner(&self, e: EdgeRef) -> Option<(EdgeRef, bool)> {
        self.within.iter().find_map(|p| {
            if p.a == e {
                Some((p.b, p.flipped))
            } else if p.b == e {
                Some((p.a, p.flipped))
            } else {
                None
            }
        })
    }

    /// The boundary component glued to `boundary` of `Q^s`.
    pub fn neighbor(&self, s: &Address, boundary: EdgeLabel) -> Result<(Address, EdgeLabel)> {
        let missing = || Error::MissingRule(format!("({s:?}, {boundary})"));
        if !boundary.is_boundary() {
            return Err(Error::Precondition(format!("{boundary} is not a boundary label")));
        }
        if let Some(r) = self.between.iter().find(|r| r.parent_label == boundary) {
            return Ok((s.child(r.bit), r.child_label));
        }
        match s.parent() {
            None => self
                .root
                .iter()
                .find_map(|&(a, b)| {
                    if a == boundary {
                        Some(b)
                    } else if b == boundary {
                        Some(a)
                    } else {
                        None
                    }
                })
                .map(|l| (Address::root(), l))
                .ok_or_else(missing),
            Some((parent, bit)) => self
                .between
                .iter()
                .find(|r| r.child_label == boundary && r.bit == bit)
                .map(|r| (parent, r.parent_label))
                .ok_or_else(missing),
        }
    }
}

/// Chart transition across one edge: `p' = to_anchor + factor * (p - from_anchor)`
/// when not flipped, `p' = to_anchor - factor * (p - from_anchor)` when flipped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from_label: EdgeLabel,
    pub to_address: Address,
    pub to_piece: PieceId,
    pub to_edge: usize,
    pub to_label: EdgeLabel,
    pub from_anchor: IPoint,
    pub to_anchor: IPoint,
    pub factor: Rat,
    pub flipped: bool,
}

impl Transition {
    pub fn apply(&self, x: &Rat, y: &Rat) -> (Rat, Rat) {
        let dx = (x - Rat::int(self.from_anchor.0)) * &self.factor;
        let dy = (y - Rat::int(self.from_anchor.1)) * &self.factor;
        if self.flipped {
            (Rat::int(self.to_anchor.0) - dx, Rat::int(self.to_anchor.1) - dy)
        } else {
            (Rat::int(self.to_anchor.0) + dx, Rat::int(self.to_anchor.1) + dy)
        }
    }
}

impl GluingTable {
    /// Transition for leaving `Q^s` through edge `edge` of `piece`.
    pub fn transition(&self, s: &Address, piece: PieceId, edge: usize) -> Result<Transition> {
        let pieces = canonical_pieces();
        let from = &pieces[piece.index()].edges[edge];
        let (to_address, to_piece, to_edge, flipped) = if from.label.is_boundary() {
            let (addr, label) = self.neighbor(s, from.label)?;
            let found = find_label(label);
            let &(p, e) = found.first().ok_or_else(|| Error::MissingRule(label.to_string()))?;
            (addr, p, e, false)
        } else {
            let (partner, flipped) = self
                .solid_partner(EdgeRef { piece, edge })
                .ok_or_else(|| Error::MissingRule(format!("{} on {piece}", from.label)))?;
            (s.clone(), partner.piece, partner.edge, flipped)
        };
        let to = &pieces[to_piece.index()].edges[to_edge];
        let factor = Rat::pow2(to_address.len() as i64 - s.len() as i64);
        Ok(Transition {
            from_label: from.label,
            to_address,
            to_piece,
            to_edge,
            to_label: to.label,
            from_anchor: from.min_end(),
            to_anchor: if flipped { to.max_end() } else { to.min_end() },
            factor,
            flipped,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use EdgeLabel::{Gamma as G, Sigma as S};

    fn a(s: &str) -> Address {
        s.parse().unwrap()
    }

    #[test]
    fn neighbor_examples() {
        let t = GluingTable::canonical();
        let s = a("0110");
        assert_eq!(t.neighbor(&s, S(1)).unwrap(), (a("01101"), G(2)));
        assert_eq!(t.neighbor(&Address::root(), G(5)).unwrap(), (Address::root(), S(5)));
        assert_eq!(t.neighbor(&s, S(4)).unwrap(), (a("01100"), G(5)));
        assert_eq!(t.neighbor(&s, G(3)).unwrap(), (a("01100"), S(2)));
        assert_eq!(t.neighbor(&Address::root(), G(2)).unwrap(), (Address::root(), S(2)));
        assert_eq!(t.neighbor(&a("01101"), G(2)).unwrap(), (s.clone(), S(1)));
        assert_eq!(t.neighbor(&a("1"), S(5)).unwrap(), (Address::root(), G(6)));
    }

    #[test]
    fn neighbor_is_involution() {
        let t = GluingTable::canonical();
        for s in ["", "0", "1", "01", "110", "0001"] {
            let s = a(s);
            for b in EdgeLabel::all_boundary() {
                let (s2, b2) = t.neighbor(&s, b).unwrap();
                assert_eq!(t.neighbor(&s2, b2).unwrap(), (s.clone(), b), "{s:?} {b}");
            }
        }
    }

    #[test]
    fn boundary_transition_scales() {
        let t = GluingTable::canonical();
        let tr = t.transition(&Address::root(), PieceId::UL, 3).unwrap(); // σ1
        assert_eq!(tr.to_address, a("1"));
        assert_eq!(tr.to_piece, PieceId::UL);
        assert_eq!(tr.to_label, G(2));
        assert_eq!(tr.factor, Rat::int(2));
        // σ1 runs from (-1,3) to (0,3); γ2 from (2,0) to (0,0)
        assert_eq!(tr.apply(&Rat::new(-1, 2), &Rat::int(3)), (Rat::int(1), Rat::zero()));
        assert_eq!(tr.apply(&Rat::int(-1), &Rat::int(3)), (Rat::zero(), Rat::zero()));
    }

    #[test]
    fn solid_transition_is_translation() {
        let t = GluingTable::canonical();
        // E on UR (x = 0) is glued to E on UL (x = 2)
        let tr = t.transition(&a("10"), PieceId::UR, 0).unwrap();
        assert_eq!(tr.to_piece, PieceId::UL);
        assert_eq!(tr.to_address, a("10"));
        assert_eq!(tr.apply(&Rat::zero(), &Rat::new(1, 3)), (Rat::int(2), Rat::new(1, 3)));
    }
}
