//! Horizontal cylinders, the cylinder twist, cutting sequences and the
//! separation witness for twisted approaches.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use serde::Serialize;

use crate::address::Address;
use crate::atlas::pieces::IRect;
use crate::atlas::{canonical_pieces, is_cone_corner_at, piece_of, Atlas, EdgeLabel, GlobalPoint, GluingTable, OnBoundary, PieceId};
use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::rat::Rat;
use crate::tracer::{intersections, trace, Budgets, Termination, TraceRecord};

/// Horizontal shear of the twist: derivative `(1 8; 0 1)`.
pub const TWIST_SHEAR: i64 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CylinderStrip {
    pub piece: PieceId,
    pub rect: IRect,
    /// Cylinder coordinate of the strip's left side.
    pub u0: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cylinder {
    pub strips: Vec<CylinderStrip>,
    pub circumference: Rat,
    pub height: Rat,
    /// Circumference over height.
    pub modulus: Rat,
}

impl Cylinder {
    pub fn area(&self) -> Rat {
        &self.circumference * &self.height
    }

    /// Strip index and cylinder coordinates `(u, v)` of a chart point.
    pub fn coords(&self, piece: PieceId, x: &Rat, y: &Rat) -> Option<(usize, Rat, Rat)> {
        self.strips.iter().enumerate().find_map(|(k, s)| {
            (s.piece == piece && s.rect.contains(x, y))
                .then(|| (k, &s.u0 + x - Rat::int(s.rect.x0), y - Rat::int(s.rect.y0)))
        })
    }

    /// Chart point at cylinder coordinates `(u, v)`, `u` taken mod the circumference.
    pub fn point(&self, u: &Rat, v: &Rat) -> (PieceId, Rat, Rat) {
        let u = u.rem_euclid(&self.circumference);
        let s = self
            .strips
            .iter()
            .find(|s| s.u0 <= u && u < &s.u0 + Rat::int(s.rect.x1 - s.rect.x0))
            .expect("strips tile the circumference");
        (s.piece, Rat::int(s.rect.x0) + &u - &s.u0, Rat::int(s.rect.y0) + v)
    }
}

fn side_edge(piece: PieceId, x: i64, y0: i64, y1: i64) -> Result<usize> {
    piece_of(piece)
        .edges
        .iter()
        .position(|e| e.is_vertical() && e.start.0 == x && e.min_end().1 == y0 && e.max_end().1 == y1)
        .ok_or_else(|| Error::MissingRule(format!("no vertical edge x = {x} on {piece}")))
}

/// Horizontal cylinder decomposition of one quad-T, found by following the
/// vertical edge gluings of the horizontal strips.
pub fn cylinders(table: &GluingTable) -> Result<Vec<Cylinder>> {
    let strips: Vec<(PieceId, IRect)> =
        canonical_pieces().iter().flat_map(|p| p.rects.iter().map(move |r| (p.id, *r))).collect();
    let mut used = vec![false; strips.len()];
    let mut out = Vec::new();
    let root = Address::root();
    for first in 0..strips.len() {
        if used[first] {
            continue;
        }
        let mut members = Vec::new();
        let mut u = Rat::zero();
        let mut k = first;
        loop {
            if used[k] {
                if k != first {
                    return Err(Error::Precondition("horizontal strips do not close into a cylinder".into()));
                }
                break;
            }
            used[k] = true;
            let (piece, r) = strips[k];
            members.push(CylinderStrip { piece, rect: r, u0: u.clone() });
            u = u + Rat::int(r.x1 - r.x0);
            let t = table.transition(&root, piece, side_edge(piece, r.x1, r.y0, r.y1)?)?;
            let (nx, ny) = t.apply(&Rat::int(r.x1), &Rat::int(r.y0));
            k = strips
                .iter()
                .position(|(p, s)| *p == t.to_piece && Rat::int(s.x0) == nx && Rat::int(s.y0) == ny)
                .ok_or_else(|| Error::Precondition(format!("strip of {piece} is not continued across its right side")))?;
            if strips[k].1.y1 - strips[k].1.y0 != r.y1 - r.y0 {
                return Err(Error::Precondition("glued strips have different heights".into()));
            }
        }
        let height = Rat::int(strips[first].1.y1 - strips[first].1.y0);
        let modulus = &u / &height;
        out.push(Cylinder { strips: members, circumference: u, height, modulus });
    }
    Ok(out)
}

pub fn canonical_cylinders() -> &'static [Cylinder] {
    static CYL: OnceLock<Vec<Cylinder>> = OnceLock::new();
    CYL.get_or_init(|| cylinders(&GluingTable::canonical()).expect("canonical cylinders"))
}

fn shear(p: &GlobalPoint, k: i64) -> Result<GlobalPoint> {
    if let OnBoundary::Vertex(v) = p.classify() {
        if is_cone_corner_at(&p.address, p.piece(), v) {
            return Err(Error::VertexHit(p.to_string()));
        }
    }
    let (x, y) = (&p.point.x, &p.point.y);
    for c in canonical_cylinders() {
        let Some((_, u, v)) = c.coords(p.piece(), x, y) else { continue };
        if v.is_zero() || v == c.height {
            return Ok(p.clone());
        }
        let (piece, nx, ny) = c.point(&(u + &v * Rat::int(k * TWIST_SHEAR)), &v);
        return Ok(GlobalPoint::new(p.address.clone(), piece, nx, ny));
    }
    Err(Error::OutsidePiece(p.to_string()))
}

/// The cylinder twist: `(u, v) ↦ (u + 8v mod c, v)` in every cylinder of
/// every quad-T. Cylinder boundaries are fixed pointwise.
pub fn twist(p: &GlobalPoint) -> Result<GlobalPoint> {
    shear(p, 1)
}

pub fn untwist(p: &GlobalPoint) -> Result<GlobalPoint> {
    shear(p, -1)
}

/// Image of a trace under the twist, re-traced from the twisted start.
pub fn twist_trace(atlas: &Atlas, tr: &TraceRecord) -> Result<TraceRecord> {
    if tr.termination == Termination::HitSingularity {
        return Err(Error::Precondition("trace ends at a singularity".into()));
    }
    let d = tr.direction;
    let (dir, g) = Direction::primitive(d.dx + TWIST_SHEAR * d.dy, d.dy)?;
    let budgets = Budgets::new(&tr.flow_time * Rat::int(g), usize::MAX, tr.max_depth());
    trace(atlas, &twist(&tr.start)?, dir, &budgets)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CuttingSequence {
    pub entries: Vec<Address>,
}

impl CuttingSequence {
    /// Consecutive entries differ by appending or removing one bit.
    pub fn is_one_bit_steps(&self) -> bool {
        self.entries.windows(2).all(|w| {
            let (a, b) = (&w[0], &w[1]);
            (a.len() + 1 == b.len() && a.is_prefix_of(b)) || (b.len() + 1 == a.len() && b.is_prefix_of(a))
                || (a.is_root() && b.is_root())
        })
    }

    pub fn reversed(&self) -> CuttingSequence {
        CuttingSequence { entries: self.entries.iter().rev().cloned().collect() }
    }
}

pub fn cutting_sequence(tr: &TraceRecord) -> CuttingSequence {
    CuttingSequence { entries: tr.visited() }
}

/// Search window for [`eventually_equal`] on finite truncations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub max_m: usize,
    pub max_n: usize,
    /// Fewest compared entries for an alignment to count.
    pub min_overlap: usize,
}

/// Number of entries compared when aligning `w1` after `m` with `w2` after `n`.
pub fn overlap<T>(w1: &[T], w2: &[T], m: usize, n: usize) -> usize {
    w1.len().saturating_sub(m).min(w2.len().saturating_sub(n))
}

/// Whether `w1[M + n] = w2[N + n]` (1-based) for every `n > 0` where both
/// sides exist, with at least one such `n`.
pub fn aligned<T: PartialEq>(w1: &[T], w2: &[T], m: usize, n: usize) -> bool {
    let k = overlap(w1, w2, m, n);
    k > 0 && (0..k).all(|i| w1[m + i] == w2[n + i])
}

/// Lexicographically least `(M, N)` inside the window at which the two
/// truncated sequences are aligned.
pub fn eventually_equal<T: PartialEq>(w1: &[T], w2: &[T], window: Window) -> Option<(usize, usize)> {
    (0..=window.max_m)
        .flat_map(|m| (0..=window.max_n).map(move |n| (m, n)))
        .find(|&(m, n)| overlap(w1, w2, m, n) >= window.min_overlap.max(1) && aligned(w1, w2, m, n))
}

#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    /// Transversal intersections off the quad-T boundaries, per quad-T.
    pub counts: BTreeMap<Address, usize>,
    /// Fully traversed quad-Ts without an intersection.
    pub missing: Vec<Address>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    pub directions: Vec<Direction>,
    pub cutting_sequences: Vec<CuttingSequence>,
    /// Quad-Ts entered and left by every iterate.
    pub shared: Vec<Address>,
    pub pairs: Vec<PairReport>,
    pub success: bool,
}

fn on_quad_boundary(p: &GlobalPoint) -> bool {
    let piece = piece_of(p.piece());
    match p.classify() {
        OnBoundary::Interior => false,
        OnBoundary::Edge(i) => piece.edges[i].label.is_boundary(),
        OnBoundary::Vertex(v) => {
            let n = piece.edges.len();
            let b = |l: EdgeLabel| l.is_boundary();
            b(piece.edges[v].label) || b(piece.edges[(v + n - 1) % n].label)
        }
    }
}

/// Quad-Ts a cutting sequence enters and leaves again.
fn traversed(cs: &CuttingSequence) -> BTreeSet<Address> {
    let n = cs.entries.len();
    if n < 3 {
        return BTreeSet::new();
    }
    cs.entries[1..n - 1].iter().cloned().collect()
}

/// Twist iterates `tr, φ(tr), ..., φ^m(tr)` and their pairwise intersections
/// inside every quad-T all iterates fully traverse.
pub fn separation_witness(atlas: &Atlas, tr: &TraceRecord, m: usize) -> Result<SeparationReport> {
    if tr.direction.dy <= 0 {
        return Err(Error::Precondition("separation witness needs an upward trace".into()));
    }
    if tr.termination != Termination::DepthLimit {
        return Err(Error::Precondition(format!("trace must reach its depth budget, ended with {:?}", tr.termination)));
    }
    let mut iterates = vec![tr.clone()];
    for _ in 0..m {
        let next = twist_trace(atlas, iterates.last().expect("nonempty"))?;
        iterates.push(next);
    }
    let cutting_sequences: Vec<CuttingSequence> = iterates.iter().map(cutting_sequence).collect();
    let mut shared = traversed(&cutting_sequences[0]);
    for cs in &cutting_sequences[1..] {
        shared = shared.intersection(&traversed(cs)).cloned().collect();
    }
    let mut pairs = Vec::new();
    for i in 0..iterates.len() {
        for j in i + 1..iterates.len() {
            let mut counts: BTreeMap<Address, usize> = BTreeMap::new();
            for x in intersections(atlas, &iterates[i], &iterates[j])? {
                if !on_quad_boundary(&x.point) {
                    *counts.entry(x.address).or_default() += 1;
                }
            }
            let missing = shared.iter().filter(|s| !counts.contains_key(*s)).cloned().collect();
            pairs.push(PairReport { i, j, counts, missing });
        }
    }
    let success = !shared.is_empty() && pairs.iter().all(|p| p.missing.is_empty());
    Ok(SeparationReport {
        directions: iterates.iter().map(|t| t.direction).collect(),
        cutting_sequences,
        shared: shared.into_iter().collect(),
        pairs,
        success,
    })
}
