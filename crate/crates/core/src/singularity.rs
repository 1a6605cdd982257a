//! Certificates around elusive points: Cauchy approach sequences, cone
//! points accumulating at them, shrinking boundary loops, and the sector
//! obstruction for two straight approaches.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::address::{Address, ElusiveAddress};
use crate::atlas::{canonical_pieces, is_cone_corner_at, Atlas, EdgeLabel, GlobalPoint, PieceId};
use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::metric::{dist_upper_tree, m_bar};
use crate::rat::Rat;
use crate::tracer::{trace, Budgets, Termination};

/// `y_j` = chart center of `Q^{a|j}` for `j = 0..=n`, with the tail bound
/// `3 M̄ 2^-j` that dominates every later distance `d(y_j, y_k)`.
#[derive(Clone, Debug, Serialize)]
pub struct ApproachSequence {
    pub address: ElusiveAddress,
    pub points: Vec<GlobalPoint>,
    pub gap_bounds: Vec<Rat>,
}

impl ApproachSequence {
    /// Checks every pair `j < k` against the tree bound; returns the first
    /// violating pair, if any.
    pub fn first_violation(&self, atlas: &Atlas) -> Result<Option<(usize, usize)>> {
        for j in 0..self.points.len() {
            for k in j + 1..self.points.len() {
                if dist_upper_tree(atlas, &self.points[j], &self.points[k])? >= self.gap_bounds[j] {
                    return Ok(Some((j, k)));
                }
            }
        }
        Ok(None)
    }
}

fn tail_bound(j: usize) -> Rat {
    Rat::int(3) * m_bar() * Rat::pow2(-(j as i64))
}

pub fn approach_sequence(a: &ElusiveAddress, n: usize) -> ApproachSequence {
    ApproachSequence {
        address: a.clone(),
        points: (0..=n).map(|j| GlobalPoint::chart_center(&a.prefix(j))).collect(),
        gap_bounds: (0..=n).map(tail_bound).collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeWitness {
    /// Depth of the quad-T holding the cone point.
    pub k: usize,
    pub cone: GlobalPoint,
    /// Depth of the approach point it is compared against.
    pub reference_depth: usize,
    pub distance_upper: Rat,
    pub epsilon: Rat,
}

/// Extra levels between the cone's quad-T and the reference approach point.
const REFERENCE_LEVELS: usize = 16;

/// Smallest `k` with `3 M̄ 2^-k < eps`, and the reflex 6π corner of `Q^{a|k}`
/// certified within `eps` of a deep approach point.
pub fn nearest_cone_witness(atlas: &Atlas, a: &ElusiveAddress, eps: &Rat) -> Result<ConeWitness> {
    if !eps.is_positive() {
        return Err(Error::Precondition(format!("epsilon must be positive, got {eps}")));
    }
    let mut k = 0;
    while tail_bound(k) >= *eps {
        k += 1;
    }
    // (0,2) of UR: the 6π reflex corner, interior to the quad-T
    let cone = GlobalPoint::new(a.prefix(k), PieceId::UR, Rat::zero(), Rat::int(2));
    debug_assert!(is_cone_corner_at(&cone.address, PieceId::UR, 1));
    let reference_depth = k + REFERENCE_LEVELS;
    let reference = GlobalPoint::chart_center(&a.prefix(reference_depth));
    let distance_upper = dist_upper_tree(atlas, &cone, &reference)?;
    if distance_upper >= *eps {
        return Err(Error::Precondition(format!("tree bound {distance_upper} does not certify {eps}")));
    }
    Ok(ConeWitness { k, cone, reference_depth, distance_upper, epsilon: eps.clone() })
}

#[derive(Clone, Debug, Serialize)]
pub struct LoopLength {
    pub address: Address,
    pub label: EdgeLabel,
    pub length: Rat,
}

/// Physical length of every σ/γ boundary edge of every quad-T of depth ≤ n.
pub fn boundary_loop_lengths(n: usize) -> Vec<LoopLength> {
    let mut out = Vec::new();
    let mut level = vec![Address::root()];
    for _ in 0..=n {
        for s in &level {
            for p in canonical_pieces() {
                for e in p.edges.iter().filter(|e| e.label.is_boundary()) {
                    out.push(LoopLength { address: s.clone(), label: e.label, length: Rat::int(e.chart_length()) * s.scale() });
                }
            }
        }
        level = level.iter().flat_map(|s| [s.child(0), s.child(1)]).collect();
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorCone {
    pub point: GlobalPoint,
    pub vertex: usize,
    pub depth: usize,
    /// Position in the developed plane, apex at the origin.
    pub position: [Rat; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorReport {
    pub address: ElusiveAddress,
    pub apex: GlobalPoint,
    pub directions: [Direction; 2],
    /// Developed triangle: apex, end of the first side, end of the second.
    pub triangle: [[Rat; 2]; 3],
    pub height: Rat,
    pub cells_explored: usize,
    pub truncated: bool,
    pub cone: Option<SectorCone>,
}

/// Default apex: a point of the boundary curve between the root and
/// `Q^{a|1}`, on the bottom edge of the upper-right piece of `Q^{a|1}`.
pub fn default_apex(a: &ElusiveAddress) -> GlobalPoint {
    GlobalPoint::new(a.prefix(1), PieceId::UR, Rat::new(3, 5), Rat::zero())
}

const SECTOR_LENGTH: i64 = 64;
const SECTOR_CELL_LIMIT: usize = 200_000;

type P = [Rat; 2];
type F = [f64; 2];

/// Slack for the floating-point prefilters; they may only over-approximate.
const SLACK: f64 = 1e-9;

fn cross(o: &P, a: &P, b: &P) -> Rat {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

fn crossf(o: &F, a: &F, b: &F) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn to_f(p: &P) -> F {
    [p[0].to_f64(), p[1].to_f64()]
}

/// Counter-clockwise triangle, exact and approximate.
struct Tri {
    exact: [P; 3],
    approx: [F; 3],
    /// Largest |coordinate|, for scaling the slack.
    size: f64,
}

impl Tri {
    fn new(a: P, b: P, c: P) -> Tri {
        let exact = if cross(&a, &b, &c).is_negative() { [a, c, b] } else { [a, b, c] };
        let approx = [to_f(&exact[0]), to_f(&exact[1]), to_f(&exact[2])];
        let size = approx.iter().flat_map(|p| p.iter()).fold(1.0f64, |m, v| m.max(v.abs()));
        Tri { exact, approx, size }
    }

    fn strictly_inside(&self, p: &P) -> bool {
        (0..3).all(|i| cross(&self.exact[i], &self.exact[(i + 1) % 3], p).is_positive())
    }

    fn slack(&self) -> f64 {
        SLACK * self.size * self.size
    }

    fn maybe_inside(&self, p: &F) -> bool {
        (0..3).all(|i| crossf(&self.approx[i], &self.approx[(i + 1) % 3], p) > -self.slack())
    }

    /// Whether the segment may meet the open triangle (never a false negative).
    fn meets_segment(&self, a: &F, b: &F) -> bool {
        // clip t ∈ [0,1] against each half-plane f(t) = f0 + t (f1 - f0) > -slack
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for i in 0..3 {
            let (u, v) = (&self.approx[i], &self.approx[(i + 1) % 3]);
            let (f0, f1) = (crossf(u, v, a) + self.slack(), crossf(u, v, b) + self.slack());
            let df = f1 - f0;
            if df == 0.0 {
                if f0 <= 0.0 {
                    return false;
                }
            } else {
                let t = -f0 / df;
                if df > 0.0 {
                    lo = lo.max(t);
                } else {
                    hi = hi.min(t);
                }
            }
        }
        lo <= hi
    }

    /// Whether the axis-parallel rectangle may meet the open triangle.
    fn meets_rect(&self, r: &[F; 2]) -> bool {
        let c = [[r[0][0], r[0][1]], [r[1][0], r[0][1]], [r[1][0], r[1][1]], [r[0][0], r[1][1]]];
        let in_rect = |p: &F| p[0] >= r[0][0] && p[0] <= r[1][0] && p[1] >= r[0][1] && p[1] <= r[1][1];
        (0..4).any(|i| self.meets_segment(&c[i], &c[(i + 1) % 4])) || self.approx.iter().any(in_rect)
    }
}

/// Plane position of a chart point of a cell placed at `offset`.
fn place(offset: &P, scale: &Rat, x: &Rat, y: &Rat) -> P {
    [&offset[0] + scale * x, &offset[1] + scale * y]
}

/// Develops the triangle bounded by the rays from `apex` along `dir1` and
/// `dir2` and the horizontal segment at the height both rays reach, and
/// reports the first 6π cone point strictly inside it, ordered by depth,
/// then address, piece and vertex. Cells deeper than `n` are not explored,
/// and each cell is developed on one sheet only.
///
/// Both rays are traced first: if either leaves the branch of `Q^{a|1}`,
/// hits a singularity, or stops before reaching depth `n`, the result is
/// `RaysDiverge`.
pub fn sector_obstruction_witness(
    atlas: &Atlas,
    a: &ElusiveAddress,
    apex: &GlobalPoint,
    dir1: Direction,
    dir2: Direction,
    n: usize,
) -> Result<SectorReport> {
    if dir1 == dir2 {
        return Err(Error::Precondition("the two directions must differ".into()));
    }
    for d in [dir1, dir2] {
        if d.dx <= 0 || d.dy <= 0 {
            return Err(Error::Precondition(format!("direction ({},{}) must point up and to the right", d.dx, d.dy)));
        }
    }
    let branch = a.prefix(1);
    if !branch.is_prefix_of(&apex.address) {
        return Err(Error::Precondition(format!("apex {apex} is outside the branch of {branch:?}")));
    }
    let budgets = Budgets::new(Rat::int(SECTOR_LENGTH), usize::MAX, n);
    let mut rises = Vec::new();
    for d in [dir1, dir2] {
        let tr = trace(atlas, apex, d, &budgets)?;
        let tag = format!("ray ({},{})", d.dx, d.dy);
        if let Some(s) = tr.visited().iter().find(|s| !branch.is_prefix_of(s)) {
            return Err(Error::RaysDiverge(format!("{tag} leaves the branch of {branch:?} into {s:?}")));
        }
        if tr.termination != Termination::DepthLimit {
            return Err(Error::RaysDiverge(format!(
                "{tag} stops ({:?}) at depth {} before reaching depth {n}",
                tr.termination,
                tr.max_depth()
            )));
        }
        // physical rise: flow time is physical, so rise = t * dy
        rises.push(&tr.flow_time * Rat::int(d.dy));
    }
    let height = rises[0].clone().min(rises[1].clone());
    let side = |d: Direction| -> P {
        let t = &height / Rat::int(d.dy);
        [&t * Rat::int(d.dx), height.clone()]
    };
    let corners = [[Rat::zero(), Rat::zero()], side(dir1), side(dir2)];
    let tri = Tri::new(corners[0].clone(), corners[1].clone(), corners[2].clone());

    // flood fill of cells meeting the open triangle; each surface cell is
    // placed once, so past a cone point only one sheet is developed
    let s0 = apex.address.scale();
    let origin = [-(&s0 * &apex.point.x), -(&s0 * &apex.point.y)];
    let mut seen: HashSet<(Address, PieceId)> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut cones: Vec<SectorCone> = Vec::new();
    let mut truncated = false;
    seen.insert((apex.address.clone(), apex.piece()));
    queue.push_back((apex.address.clone(), apex.piece(), origin));
    while let Some((s, piece, off)) = queue.pop_front() {
        if seen.len() > SECTOR_CELL_LIMIT {
            truncated = true;
            break;
        }
        let sc = s.scale();
        let poly = &canonical_pieces()[piece.index()];
        let (offf, scf) = (to_f(&off), sc.to_f64());
        let placef = |x: i64, y: i64| [offf[0] + scf * x as f64, offf[1] + scf * y as f64];
        for (v, &(vx, vy)) in poly.vertices.iter().enumerate() {
            if !is_cone_corner_at(&s, piece, v) || !tri.maybe_inside(&placef(vx, vy)) {
                continue;
            }
            let pos = place(&off, &sc, &Rat::int(vx), &Rat::int(vy));
            if tri.strictly_inside(&pos) {
                cones.push(SectorCone {
                    point: GlobalPoint::new(s.clone(), piece, Rat::int(vx), Rat::int(vy)),
                    vertex: v,
                    depth: s.len(),
                    position: pos,
                });
            }
        }
        for (i, e) in poly.edges.iter().enumerate() {
            if !tri.meets_segment(&placef(e.start.0, e.start.1), &placef(e.end.0, e.end.1)) {
                continue;
            }
            let (ex, ey) = (Rat::int(e.start.0), Rat::int(e.start.1));
            let a0 = place(&off, &sc, &ex, &ey);
            let t = atlas.transition(&s, piece, i)?;
            if t.to_address.len() > n {
                truncated = true;
                continue;
            }
            let (px, py) = t.apply(&ex, &ey);
            let sc2 = t.to_address.scale();
            let off2 = [&a0[0] - &sc2 * &px, &a0[1] - &sc2 * &py];
            let q = &canonical_pieces()[t.to_piece.index()];
            let (o2, s2) = (to_f(&off2), sc2.to_f64());
            let rects: Vec<[F; 2]> = q
                .rects
                .iter()
                .map(|r| {
                    [
                        [o2[0] + s2 * r.x0 as f64, o2[1] + s2 * r.y0 as f64],
                        [o2[0] + s2 * r.x1 as f64, o2[1] + s2 * r.y1 as f64],
                    ]
                })
                .collect();
            if !rects.iter().any(|r| tri.meets_rect(r)) {
                continue;
            }
            if seen.insert((t.to_address.clone(), t.to_piece)) {
                queue.push_back((t.to_address, t.to_piece, off2));
            }
        }
    }
    cones.sort_by(|x, y| {
        (x.depth, &x.point.address, x.point.piece(), x.vertex).cmp(&(y.depth, &y.point.address, y.point.piece(), y.vertex))
    });
    Ok(SectorReport {
        address: a.clone(),
        apex: apex.clone(),
        directions: [dir1, dir2],
        triangle: corners,
        height,
        cells_explored: seen.len(),
        truncated,
        cone: cones.into_iter().next(),
    })
}
