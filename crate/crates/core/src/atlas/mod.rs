//! The quad-T atlas: chart geometry, gluing table, lazy chart cache,
//! point location and structural validation.

pub mod dump;
pub mod gluing;
pub mod pieces;
pub mod validate;
pub mod vertices;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::address::Address;
use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::rat::Rat;

pub use gluing::{BetweenRule, EdgeRef, GluingTable, SolidPair, Transition};
pub use pieces::{build_pieces, canonical_pieces, piece_of, Edge, EdgeLabel, OnBoundary, Piece, PieceId};
pub use validate::{validate_atlas, validate_table, ValidationReport};
pub use vertices::{boundary_loops, corner_angles, is_cone_corner, is_cone_corner_at, vertex_classes, BoundaryLoop, Corner, VertexClass};

/// A point of one piece, in that piece's unit-scale chart frame.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChartPoint {
    pub piece: PieceId,
    pub x: Rat,
    pub y: Rat,
}

impl ChartPoint {
    pub fn new(piece: PieceId, x: Rat, y: Rat) -> ChartPoint {
        ChartPoint { piece, x, y }
    }
}

/// A point of the surface: chart address plus chart coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GlobalPoint {
    pub address: Address,
    pub point: ChartPoint,
}

impl GlobalPoint {
    pub fn new(address: Address, piece: PieceId, x: Rat, y: Rat) -> GlobalPoint {
        GlobalPoint { address, point: ChartPoint { piece, x, y } }
    }

    pub fn piece(&self) -> PieceId {
        self.point.piece
    }

    /// Centroid of the upper-right square of `Q^s`, the canonical interior
    /// representative of a chart.
    pub fn chart_center(s: &Address) -> GlobalPoint {
        GlobalPoint::new(s.clone(), PieceId::UR, Rat::one(), Rat::one())
    }

    pub fn classify(&self) -> OnBoundary {
        piece_of(self.point.piece).classify(&self.point.x, &self.point.y)
    }
}

/// Parses `ADDRESS:PIECE:x,y`, e.g. `01:UR:1/2,3/4`; the root address is
/// written as an empty string or `ε`.
impl std::str::FromStr for GlobalPoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<GlobalPoint> {
        let bad = || Error::Parse(format!("invalid point {s:?}, expected ADDRESS:PIECE:x,y"));
        let mut parts = s.trim().splitn(3, ':');
        let (Some(a), Some(p), Some(xy)) = (parts.next(), parts.next(), parts.next()) else { return Err(bad()) };
        let (x, y) = xy.split_once(',').ok_or_else(bad)?;
        Ok(GlobalPoint::new(a.parse()?, p.parse()?, x.trim().parse()?, y.trim().parse()?))
    }
}

impl fmt::Display for GlobalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{}({}, {})", self.address, self.point.piece, self.point.x, self.point.y)
    }
}

/// An instantiated chart `Q^s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub address: Address,
    pub scale: Rat,
    /// Partner of each boundary component.
    pub neighbors: Vec<(EdgeLabel, Address, EdgeLabel)>,
}

/// The surface as a lazily instantiated family of charts over a gluing table.
#[derive(Debug)]
pub struct Atlas {
    table: GluingTable,
    charts: RwLock<HashMap<Address, Arc<Chart>>>,
}

impl Default for Atlas {
    fn default() -> Atlas {
        Atlas::new(GluingTable::canonical())
    }
}

impl Atlas {
    pub fn new(table: GluingTable) -> Atlas {
        Atlas { table, charts: RwLock::new(HashMap::new()) }
    }

    pub fn canonical() -> Atlas {
        Atlas::default()
    }

    pub fn table(&self) -> &GluingTable {
        &self.table
    }

    /// Chart `Q^s`, built on first use. Concurrent first uses may both build
    /// it; the first insertion wins and all callers see the same chart.
    pub fn chart(&self, s: &Address) -> Result<Arc<Chart>> {
        if let Some(c) = self.charts.read().expect("chart cache poisoned").get(s) {
            return Ok(c.clone());
        }
        let neighbors = EdgeLabel::all_boundary()
            .map(|b| self.table.neighbor(s, b).map(|(t, l)| (b, t, l)))
            .collect::<Result<Vec<_>>>()?;
        let chart = Arc::new(Chart { address: s.clone(), scale: s.scale(), neighbors });
        let mut w = self.charts.write().expect("chart cache poisoned");
        Ok(w.entry(s.clone()).or_insert(chart).clone())
    }

    pub fn instantiated(&self) -> usize {
        self.charts.read().expect("chart cache poisoned").len()
    }

    pub fn transition(&self, s: &Address, piece: PieceId, edge: usize) -> Result<Transition> {
        self.chart(s)?;
        let t = self.table.transition(s, piece, edge)?;
        self.chart(&t.to_address)?;
        Ok(t)
    }

    pub fn neighbor(&self, s: &Address, boundary: EdgeLabel) -> Result<(Address, EdgeLabel)> {
        self.table.neighbor(s, boundary)
    }

    /// Re-express a point lying on an edge in the partner chart. The heading
    /// must point out of the piece through that edge.
    pub fn cross_point(&self, p: &GlobalPoint, heading: Direction) -> Result<GlobalPoint> {
        let piece = piece_of(p.piece());
        let edge = match p.classify() {
            OnBoundary::Edge(i) => i,
            OnBoundary::Vertex(_) => return Err(Error::VertexHit(p.to_string())),
            OnBoundary::Interior => return Err(Error::NotOnEdge(p.to_string())),
        };
        if heading.dot(piece.inward_normal(edge)) >= 0 {
            return Err(Error::NotOnEdge(format!("{p} with heading {heading} does not exit")));
        }
        let t = self.transition(&p.address, p.piece(), edge)?;
        let (x, y) = t.apply(&p.point.x, &p.point.y);
        Ok(GlobalPoint::new(t.to_address, t.to_piece, x, y))
    }

    /// Shorter-label address of a point: points on a boundary component
    /// shared with the parent chart belong to the parent.
    pub fn locate(&self, p: &GlobalPoint) -> Result<Address> {
        Ok(self.canonical_point(p)?.address)
    }

    /// The representation of `p` under the shortest address; among
    /// same-address representations, the one in the smallest piece.
    pub fn canonical_point(&self, p: &GlobalPoint) -> Result<GlobalPoint> {
        let mut best = p.clone();
        let mut frontier = vec![p.clone()];
        let mut seen = vec![p.clone()];
        while let Some(q) = frontier.pop() {
            let piece = piece_of(q.piece());
            let edges: Vec<usize> = match q.classify() {
                OnBoundary::Interior => vec![],
                OnBoundary::Edge(i) => vec![i],
                OnBoundary::Vertex(v) => vec![(v + 9) % 10, v],
            };
            for e in edges {
                let t = self.table.transition(&q.address, piece.id, e)?;
                if t.to_address.len() > q.address.len() {
                    continue;
                }
                let (x, y) = t.apply(&q.point.x, &q.point.y);
                let r = GlobalPoint::new(t.to_address, t.to_piece, x, y);
                if !seen.contains(&r) {
                    let key = |g: &GlobalPoint| (g.address.len(), g.piece(), g.point.x.clone(), g.point.y.clone());
                    if key(&r) < key(&best) {
                        best = r.clone();
                    }
                    seen.push(r.clone());
                    frontier.push(r);
                }
            }
        }
        Ok(best)
    }
}

/// Chart area of the depth-`n` truncation: `sum_{k<=n} 2^k * 32 * 4^{-k}`.
pub fn partial_area(n: u32) -> Rat {
    (0..=n as i64).map(|k| Rat::pow2(k) * Rat::int(32) * Rat::pow2(-2 * k)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_round_trips_through_text() {
        let p: GlobalPoint = "01:LR:1/2,-3/4".parse().unwrap();
        assert_eq!(p, GlobalPoint::new("01".parse().unwrap(), PieceId::LR, Rat::new(1, 2), Rat::new(-3, 4)));
        let r: GlobalPoint = "ε:UR:1,1".parse().unwrap();
        assert!(r.address.is_root());
        assert!("01:UR:1".parse::<GlobalPoint>().is_err());
    }
    use proptest::prelude::*;

    fn a(s: &str) -> Address {
        s.parse().unwrap()
    }

    #[test]
    fn cross_midpoint_of_sigma1() {
        let atlas = Atlas::canonical();
        let s = a("01");
        let p = GlobalPoint::new(s.clone(), PieceId::UL, Rat::new(-1, 2), Rat::int(3));
        let q = atlas.cross_point(&p, Direction::new(0, 1).unwrap()).unwrap();
        assert_eq!(q, GlobalPoint::new(a("011"), PieceId::UL, Rat::one(), Rat::zero()));
    }

    #[test]
    fn cross_near_endpoint_doubles_chart_offset() {
        let atlas = Atlas::canonical();
        // chart distance 1/4 from the (-1,3) end of σ1
        let p = GlobalPoint::new(Address::root(), PieceId::UL, Rat::new(-3, 4), Rat::int(3));
        let q = atlas.cross_point(&p, Direction::new(1, 2).unwrap()).unwrap();
        assert_eq!(q.address, a("1"));
        assert_eq!((q.point.x.clone(), q.point.y.clone()), (Rat::new(1, 2), Rat::zero()));
        // physical offsets from the matching endpoints agree
        assert_eq!(&q.point.x * &q.address.scale(), (&p.point.x + Rat::one()) * p.address.scale());
    }

    #[test]
    fn root_gluing_is_pure_translation() {
        let atlas = Atlas::canonical();
        let p = GlobalPoint::new(Address::root(), PieceId::UL, Rat::new(5, 7), Rat::zero());
        let q = atlas.cross_point(&p, Direction::new(0, -1).unwrap()).unwrap();
        assert_eq!(q, GlobalPoint::new(Address::root(), PieceId::LL, Rat::new(5, 7), Rat::zero()));
    }

    #[test]
    fn cross_rejects_vertices_and_inward_headings() {
        let atlas = Atlas::canonical();
        let v = GlobalPoint::new(Address::root(), PieceId::UR, Rat::int(0), Rat::int(3));
        assert!(matches!(atlas.cross_point(&v, Direction::new(0, 1).unwrap()), Err(Error::VertexHit(_))));
        let p = GlobalPoint::new(Address::root(), PieceId::UR, Rat::new(1, 2), Rat::int(3));
        assert!(matches!(atlas.cross_point(&p, Direction::new(0, -1).unwrap()), Err(Error::NotOnEdge(_))));
        let i = GlobalPoint::new(Address::root(), PieceId::UR, Rat::one(), Rat::one());
        assert!(matches!(atlas.cross_point(&i, Direction::new(0, 1).unwrap()), Err(Error::NotOnEdge(_))));
    }

    #[test]
    fn locate_examples() {
        let atlas = Atlas::canonical();
        let interior = GlobalPoint::chart_center(&a("101"));
        assert_eq!(atlas.locate(&interior).unwrap(), a("101"));
        // γ2 of Q^{1011} is glued to σ1 of Q^{101}
        let shared = GlobalPoint::new(a("1011"), PieceId::UL, Rat::one(), Rat::zero());
        assert_eq!(atlas.locate(&shared).unwrap(), a("101"));
        let root_shared = GlobalPoint::new(a("0"), PieceId::UR, Rat::one(), Rat::zero());
        assert_eq!(atlas.locate(&root_shared).unwrap(), Address::root());
        // a top-boundary point of Q^{101} stays there
        let top = GlobalPoint::new(a("101"), PieceId::UR, Rat::new(5, 2), Rat::int(3));
        assert_eq!(atlas.locate(&top).unwrap(), a("101"));
    }

    #[test]
    fn lazy_instantiation_is_linear_in_depth() {
        let atlas = Atlas::canonical();
        let mut s = Address::root();
        for i in 0..12 {
            atlas.chart(&s).unwrap();
            s = s.child((i % 2) as u8);
        }
        assert_eq!(atlas.instantiated(), 12);
        atlas.chart(&a("0")).unwrap();
        assert_eq!(atlas.instantiated(), 12);
    }

    #[test]
    fn partial_area_values() {
        assert_eq!(partial_area(0), Rat::int(32));
        assert_eq!(partial_area(1), Rat::int(48));
        for n in 0..=20u32 {
            assert_eq!(partial_area(n), Rat::int(64) * (Rat::one() - Rat::pow2(-(n as i64) - 1)));
        }
    }

    fn boundary_point() -> impl Strategy<Value = (String, PieceId, usize, i64)> {
        (
            proptest::collection::vec(0u8..2, 0..6),
            0usize..4,
            0usize..10,
            1i64..64,
        )
            .prop_map(|(bits, p, e, k)| {
                let s: String = bits.iter().map(|b| char::from(b'0' + b)).collect();
                (s, PieceId::ALL[p], e, k)
            })
    }

    proptest! {
        #[test]
        fn crossing_back_is_identity((s, piece, edge, k) in boundary_point()) {
            let atlas = Atlas::canonical();
            let e = piece_of(piece).edges[edge];
            // point at parameter k/64 along the edge
            let t = Rat::new(k, 64);
            let x = Rat::int(e.start.0) + &t * Rat::int(e.end.0 - e.start.0);
            let y = Rat::int(e.start.1) + &t * Rat::int(e.end.1 - e.start.1);
            let p = GlobalPoint::new(s.parse().unwrap(), piece, x, y);
            let n = piece_of(piece).inward_normal(edge);
            let out = Direction::new(-n.0 + n.1, -n.1 + n.0).unwrap();
            let q = atlas.cross_point(&p, out).unwrap();
            let back = atlas.cross_point(&q, out.reversed()).unwrap();
            prop_assert_eq!(back, p.clone());
        }
    }
}
