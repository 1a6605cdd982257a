//! Canonical chart geometry of the four T-shaped pieces of a quad-T.
//!
//! Upper pieces occupy the 2x2 square `[0,2]x[0,2]` plus the bar
//! `[-1,3]x[2,3]`; lower pieces are the same polygon reflected by
//! `y -> -y`, so every edge identification is a translation.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PieceId {
    UL,
    UR,
    LL,
    LR,
}

impl PieceId {
    pub const ALL: [PieceId; 4] = [PieceId::UL, PieceId::UR, PieceId::LL, PieceId::LR];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_upper(self) -> bool {
        matches!(self, PieceId::UL | PieceId::UR)
    }

    /// Whether the piece is the x-mirrored copy of the billiard table.
    pub fn mirrors_x(self) -> bool {
        matches!(self, PieceId::UL | PieceId::LL)
    }

    /// Whether the piece is the y-mirrored copy of the billiard table.
    pub fn mirrors_y(self) -> bool {
        !self.is_upper()
    }
}

impl fmt::Display for PieceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for PieceId {
    type Err = Error;
    fn from_str(s: &str) -> Result<PieceId> {
        match s.trim().to_ascii_uppercase().as_str() {
            "UL" => Ok(PieceId::UL),
            "UR" => Ok(PieceId::UR),
            "LL" => Ok(PieceId::LL),
            "LR" => Ok(PieceId::LR),
            _ => Err(Error::Parse(format!("unknown piece {s:?}"))),
        }
    }
}

/// Edge labels: solid `A..N`, boundary `γ1..γ6` and `σ1..σ6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeLabel {
    Solid(u8),
    Gamma(u8),
    Sigma(u8),
}

impl EdgeLabel {
    pub fn solid(c: char) -> EdgeLabel {
        assert!(('A'..='N').contains(&c));
        EdgeLabel::Solid(c as u8 - b'A')
    }

    pub fn is_boundary(self) -> bool {
        !matches!(self, EdgeLabel::Solid(_))
    }

    pub fn all_solid() -> impl Iterator<Item = EdgeLabel> {
        (0..14).map(EdgeLabel::Solid)
    }

    pub fn all_boundary() -> impl Iterator<Item = EdgeLabel> {
        (1..=6).map(EdgeLabel::Gamma).chain((1..=6).map(EdgeLabel::Sigma))
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Solid(i) => write!(f, "{}", (b'A' + i) as char),
            EdgeLabel::Gamma(i) => write!(f, "γ{i}"),
            EdgeLabel::Sigma(i) => write!(f, "σ{i}"),
        }
    }
}

impl FromStr for EdgeLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<EdgeLabel> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unknown edge label {s:?}"));
        let num = |rest: &str| -> Result<u8> {
            let i: u8 = rest.parse().map_err(|_| bad())?;
            if (1..=6).contains(&i) {
                Ok(i)
            } else {
                Err(bad())
            }
        };
        for p in ["gamma", "γ", "g"] {
            if let Some(rest) = s.strip_prefix(p) {
                return Ok(EdgeLabel::Gamma(num(rest)?));
            }
        }
        for p in ["sigma", "σ", "s"] {
            if let Some(rest) = s.strip_prefix(p) {
                return Ok(EdgeLabel::Sigma(num(rest)?));
            }
        }
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) if ('A'..='N').contains(&c) => Ok(EdgeLabel::solid(c)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for EdgeLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for EdgeLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<EdgeLabel, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub type IPoint = (i64, i64);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub label: EdgeLabel,
    pub start: IPoint,
    pub end: IPoint,
}

impl Edge {
    pub fn is_vertical(&self) -> bool {
        self.start.0 == self.end.0
    }

    pub fn chart_length(&self) -> i64 {
        (self.end.0 - self.start.0).abs() + (self.end.1 - self.start.1).abs()
    }

    /// Lexicographically smaller endpoint, the anchor used for gluing maps.
    pub fn min_end(&self) -> IPoint {
        self.start.min(self.end)
    }

    pub fn max_end(&self) -> IPoint {
        self.start.max(self.end)
    }

    pub fn midpoint(&self) -> (Rat, Rat) {
        (
            Rat::new(self.start.0 + self.end.0, 2),
            Rat::new(self.start.1 + self.end.1, 2),
        )
    }
}

/// Axis-aligned closed rectangle `[x0,x1] x [y0,y1]` in chart units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IRect {
    pub x0: i64,
    pub x1: i64,
    pub y0: i64,
    pub y1: i64,
}

impl IRect {
    pub fn contains(&self, x: &Rat, y: &Rat) -> bool {
        *x >= Rat::int(self.x0) && *x <= Rat::int(self.x1) && *y >= Rat::int(self.y0) && *y <= Rat::int(self.y1)
    }

    pub fn area(&self) -> i64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub id: PieceId,
    pub vertices: Vec<IPoint>,
    pub edges: Vec<Edge>,
    /// Square then bar.
    pub rects: [IRect; 2],
}

/// Where a point sits relative to a piece's boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OnBoundary {
    Interior,
    Edge(usize),
    Vertex(usize),
}

const UPPER_OUTLINE: [IPoint; 10] =
    [(0, 0), (0, 2), (-1, 2), (-1, 3), (0, 3), (2, 3), (3, 3), (3, 2), (2, 2), (2, 0)];

fn piece(id: PieceId, labels: [EdgeLabel; 10]) -> Piece {
    let flip = !id.is_upper();
    let vertices: Vec<IPoint> =
        UPPER_OUTLINE.iter().map(|&(x, y)| if flip { (x, -y) } else { (x, y) }).collect();
    let edges = (0..10)
        .map(|i| Edge { label: labels[i], start: vertices[i], end: vertices[(i + 1) % 10] })
        .collect();
    let rects = if flip {
        [IRect { x0: 0, x1: 2, y0: -2, y1: 0 }, IRect { x0: -1, x1: 3, y0: -3, y1: -2 }]
    } else {
        [IRect { x0: 0, x1: 2, y0: 0, y1: 2 }, IRect { x0: -1, x1: 3, y0: 2, y1: 3 }]
    };
    Piece { id, vertices, edges, rects }
}

/// The four labeled piece polygons, indexed by `PieceId::index`.
pub fn build_pieces() -> [Piece; 4] {
    use EdgeLabel::{Gamma as G, Sigma as S};
    let l = EdgeLabel::solid;
    [
        piece(PieceId::UL, [l('D'), l('J'), l('B'), S(1), l('H'), S(3), l('G'), l('I'), l('E'), G(2)]),
        piece(PieceId::UR, [l('E'), l('F'), l('G'), S(4), l('A'), S(6), l('B'), l('C'), l('D'), G(5)]),
        piece(PieceId::LL, [l('N'), l('J'), l('M'), G(1), l('H'), G(3), l('L'), l('I'), l('K'), S(2)]),
        piece(PieceId::LR, [l('K'), l('F'), l('L'), G(4), l('A'), G(6), l('M'), l('C'), l('N'), S(5)]),
    ]
}

pub fn canonical_pieces() -> &'static [Piece; 4] {
    static PIECES: OnceLock<[Piece; 4]> = OnceLock::new();
    PIECES.get_or_init(build_pieces)
}

pub fn piece_of(id: PieceId) -> &'static Piece {
    &canonical_pieces()[id.index()]
}

fn on_segment(e: &Edge, x: &Rat, y: &Rat) -> bool {
    let (lo, hi) = (e.min_end(), e.max_end());
    if e.is_vertical() {
        *x == Rat::int(lo.0) && *y >= Rat::int(lo.1) && *y <= Rat::int(hi.1)
    } else {
        *y == Rat::int(lo.1) && *x >= Rat::int(lo.0) && *x <= Rat::int(hi.0)
    }
}

impl Piece {
    /// Twice the signed area of the outline (negative for clockwise).
    fn signed_area2(&self) -> i64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
                a.0 * b.1 - b.0 * a.1
            })
            .sum()
    }

    pub fn area(&self) -> Rat {
        Rat::new(self.signed_area2().abs(), 2)
    }

    pub fn perimeter(&self) -> i64 {
        self.edges.iter().map(Edge::chart_length).sum()
    }

    pub fn is_clockwise(&self) -> bool {
        self.signed_area2() < 0
    }

    /// Unit inward normal of edge `i`.
    pub fn inward_normal(&self, i: usize) -> IPoint {
        let e = &self.edges[i];
        let d = ((e.end.0 - e.start.0).signum(), (e.end.1 - e.start.1).signum());
        if self.is_clockwise() {
            (d.1, -d.0)
        } else {
            (-d.1, d.0)
        }
    }

    /// Interior angle at vertex `i` in quarter turns (1 = π/2).
    pub fn corner_quarters(&self, i: usize) -> i64 {
        let n = self.vertices.len();
        let (p, c, q) = (self.vertices[(i + n - 1) % n], self.vertices[i], self.vertices[(i + 1) % n]);
        let cross = (c.0 - p.0) * (q.1 - c.1) - (c.1 - p.1) * (q.0 - c.0);
        let turn = if self.is_clockwise() { -cross } else { cross };
        match turn.signum() {
            1 => 1,
            0 => 2,
            _ => 3,
        }
    }

    pub fn contains(&self, x: &Rat, y: &Rat) -> bool {
        self.rects.iter().any(|r| r.contains(x, y))
    }

    pub fn classify(&self, x: &Rat, y: &Rat) -> OnBoundary {
        if let Some(v) = self.vertices.iter().position(|&(vx, vy)| *x == Rat::int(vx) && *y == Rat::int(vy)) {
            return OnBoundary::Vertex(v);
        }
        match self.edges.iter().position(|e| on_segment(e, x, y)) {
            Some(i) => OnBoundary::Edge(i),
            None => OnBoundary::Interior,
        }
    }

    pub fn edge_index(&self, label: EdgeLabel) -> Option<usize> {
        self.edges.iter().position(|e| e.label == label)
    }
}

/// Piece and edge index carrying a given label (first occurrence for solid labels).
pub fn find_label(label: EdgeLabel) -> Vec<(PieceId, usize)> {
    canonical_pieces()
        .iter()
        .flat_map(|p| p.edges.iter().enumerate().filter(|(_, e)| e.label == label).map(move |(i, _)| (p.id, i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn label_multiset() {
        let mut counts: HashMap<EdgeLabel, usize> = HashMap::new();
        for p in canonical_pieces() {
            for e in &p.edges {
                *counts.entry(e.label).or_default() += 1;
            }
        }
        for l in EdgeLabel::all_solid() {
            assert_eq!(counts[&l], 2, "{l}");
        }
        for l in EdgeLabel::all_boundary() {
            assert_eq!(counts[&l], 1, "{l}");
        }
        assert_eq!(counts.len(), 26);
    }

    #[test]
    fn areas_and_perimeters() {
        let total: Rat = canonical_pieces().iter().map(Piece::area).sum();
        for p in canonical_pieces() {
            assert_eq!(p.area(), Rat::int(8));
            assert_eq!(p.rects.iter().map(IRect::area).sum::<i64>(), 8);
            assert_eq!(p.perimeter(), 14);
        }
        assert_eq!(total, Rat::int(32));
    }

    #[test]
    fn upper_right_outline() {
        let ur = piece_of(PieceId::UR);
        let labels: Vec<String> = ur.edges.iter().map(|e| e.label.to_string()).collect();
        assert_eq!(labels, ["E", "F", "G", "σ4", "A", "σ6", "B", "C", "D", "γ5"]);
        assert_eq!(ur.edges[1].start, (0, 2));
        assert_eq!(ur.edges[1].end, (-1, 2));
        let ll = piece_of(PieceId::LL);
        assert_eq!(ll.edges[3].start, (-1, -3));
        assert_eq!(ll.edges[3].label, EdgeLabel::Gamma(1));
    }

    #[test]
    fn edge_lengths_are_one_or_two() {
        for p in canonical_pieces() {
            for e in &p.edges {
                assert!(matches!(e.chart_length(), 1 | 2));
                assert!(e.start.0 == e.end.0 || e.start.1 == e.end.1);
            }
        }
    }

    #[test]
    fn corner_angles() {
        let ur = piece_of(PieceId::UR);
        let q: Vec<i64> = (0..10).map(|i| ur.corner_quarters(i)).collect();
        assert_eq!(q, [1, 3, 1, 1, 2, 2, 1, 1, 3, 1]);
        let ll = piece_of(PieceId::LL);
        assert_eq!((0..10).map(|i| ll.corner_quarters(i)).collect::<Vec<_>>(), q);
        // interior angles of a 10-gon sum to 8π
        assert_eq!(q.iter().sum::<i64>(), 16);
    }

    #[test]
    fn inward_normals() {
        let ur = piece_of(PieceId::UR);
        assert_eq!(ur.inward_normal(0), (1, 0)); // E, left wall of square
        assert_eq!(ur.inward_normal(9), (0, 1)); // γ5, bottom
        assert_eq!(ur.inward_normal(4), (0, -1)); // A, top
        let lr = piece_of(PieceId::LR);
        assert_eq!(lr.inward_normal(9), (0, -1)); // σ5, top of reflected square
        assert_eq!(lr.inward_normal(4), (0, 1)); // A, bottom of reflected bar
    }

    #[test]
    fn label_parsing() {
        for l in EdgeLabel::all_solid().chain(EdgeLabel::all_boundary()) {
            assert_eq!(l.to_string().parse::<EdgeLabel>().unwrap(), l);
        }
        assert_eq!("sigma3".parse::<EdgeLabel>().unwrap(), EdgeLabel::Sigma(3));
        assert_eq!("g2".parse::<EdgeLabel>().unwrap(), EdgeLabel::Gamma(2));
        assert!("O".parse::<EdgeLabel>().is_err());
        assert!("γ7".parse::<EdgeLabel>().is_err());
    }

    #[test]
    fn classify_points() {
        let ur = piece_of(PieceId::UR);
        assert_eq!(ur.classify(&Rat::int(1), &Rat::int(1)), OnBoundary::Interior);
        assert_eq!(ur.classify(&Rat::int(1), &Rat::int(2)), OnBoundary::Interior);
        assert_eq!(ur.classify(&Rat::int(0), &Rat::int(2)), OnBoundary::Vertex(1));
        assert_eq!(ur.classify(&Rat::new(-1, 2), &Rat::int(3)), OnBoundary::Edge(3));
        assert!(!ur.contains(&Rat::new(-1, 2), &Rat::int(1)));
    }
}
