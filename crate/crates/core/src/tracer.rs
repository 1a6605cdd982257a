//! Exact straight-line flow on the surface.
//!
//! A trace advances a ray segment by segment inside one piece polygon at a
//! time, crossing edges through the atlas. Parameters are *flow time*: the
//! chart displacement over flow time `t` in `Q^s` is `2^{|s|} t (dx, dy)`,
//! so the Euclidean length of a trace is `flow_time * |(dx, dy)|`, which is
//! `flow_time` itself for axis directions.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::address::Address;
use crate::atlas::{piece_of, Atlas, EdgeLabel, GlobalPoint, OnBoundary, PieceId};
use crate::direction::Direction;
use crate::error::{Error, Result};
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Flow-time budget.
    pub max_length: Rat,
    pub max_crossings: usize,
    pub max_depth: usize,
}

impl Budgets {
    pub fn new(max_length: Rat, max_crossings: usize, max_depth: usize) -> Budgets {
        Budgets { max_length, max_crossings, max_depth }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    LengthBudget,
    CrossingBudget,
    DepthLimit,
    HitSingularity,
    ClosedUp,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub address: Address,
    pub piece: PieceId,
    pub entry: [Rat; 2],
    pub exit: [Rat; 2],
}

impl Segment {
    /// Chart parameter `t` with `exit = entry + t (dx, dy)`.
    fn chart_param(&self, dir: Direction) -> Rat {
        if dir.dx != 0 {
            (&self.exit[0] - &self.entry[0]) / Rat::int(dir.dx)
        } else {
            (&self.exit[1] - &self.entry[1]) / Rat::int(dir.dy)
        }
    }

    pub fn flow_time(&self, dir: Direction) -> Rat {
        self.chart_param(dir) * self.address.scale()
    }

    pub fn midpoint(&self) -> (Rat, Rat) {
        let h = Rat::new(1, 2);
        ((&self.entry[0] + &self.exit[0]) * &h, (&self.entry[1] + &self.exit[1]) * &h)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub from_label: EdgeLabel,
    pub to_label: EdgeLabel,
    pub from: Address,
    pub to: Address,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub start: GlobalPoint,
    pub direction: Direction,
    pub segments: Vec<Segment>,
    pub crossings: Vec<Crossing>,
    pub flow_time: Rat,
    pub termination: Termination,
}

impl TraceRecord {
    /// Exact squared Euclidean length.
    pub fn length_sq(&self) -> Rat {
        &self.flow_time * &self.flow_time * Rat::int(self.direction.norm_sq())
    }

    pub fn length_f64(&self) -> f64 {
        self.flow_time.to_f64() * (self.direction.norm_sq() as f64).sqrt()
    }

    pub fn end(&self) -> GlobalPoint {
        match self.segments.last() {
            Some(s) => GlobalPoint::new(s.address.clone(), s.piece, s.exit[0].clone(), s.exit[1].clone()),
            None => self.start.clone(),
        }
    }

    pub fn max_depth(&self) -> usize {
        self.segments.iter().map(|s| s.address.len()).max().unwrap_or(self.start.address.len())
    }

    /// Quad-T addresses in visiting order, consecutive repeats collapsed.
    pub fn visited(&self) -> Vec<Address> {
        let mut out: Vec<Address> = Vec::new();
        for s in &self.segments {
            if out.last() != Some(&s.address) {
                out.push(s.address.clone());
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }
}

fn point_at(p: &(Rat, Rat), dir: Direction, t: &Rat) -> (Rat, Rat) {
    (&p.0 + t * Rat::int(dir.dx), &p.1 + t * Rat::int(dir.dy))
}

/// Smallest chart parameter `t > 0` at which the ray from `(x, y)` meets the
/// boundary of `piece`.
fn first_hit(piece: PieceId, p: &(Rat, Rat), dir: Direction) -> Option<Rat> {
    let mut best: Option<Rat> = None;
    for e in &piece_of(piece).edges {
        let (lo, hi) = (e.min_end(), e.max_end());
        let (t, other, d_other, range) = if e.is_vertical() {
            if dir.dx == 0 {
                continue;
            }
            ((Rat::int(lo.0) - &p.0) / Rat::int(dir.dx), &p.1, dir.dy, (lo.1, hi.1))
        } else {
            if dir.dy == 0 {
                continue;
            }
            ((Rat::int(lo.1) - &p.1) / Rat::int(dir.dy), &p.0, dir.dx, (lo.0, hi.0))
        };
        if !t.is_positive() {
            continue;
        }
        let c = other + &t * Rat::int(d_other);
        if c < Rat::int(range.0) || c > Rat::int(range.1) {
            continue;
        }
        if best.as_ref().is_none_or(|b| &t < b) {
            best = Some(t);
        }
    }
    best
}

/// Chart parameter at which `q` lies on the ray segment `[p, p + t_max d]`.
fn param_on(p: &(Rat, Rat), dir: Direction, q: &(Rat, Rat), t_max: &Rat) -> Option<Rat> {
    let (ux, uy) = (&q.0 - &p.0, &q.1 - &p.1);
    if ux.clone() * Rat::int(dir.dy) != uy.clone() * Rat::int(dir.dx) {
        return None;
    }
    let t = if dir.dx != 0 { ux / Rat::int(dir.dx) } else { uy / Rat::int(dir.dy) };
    (!t.is_negative() && &t <= t_max).then_some(t)
}

pub fn trace(atlas: &Atlas, start: &GlobalPoint, dir: Direction, budgets: &Budgets) -> Result<TraceRecord> {
    let piece = piece_of(start.piece());
    if !piece.contains(&start.point.x, &start.point.y) {
        return Err(Error::OutsidePiece(start.to_string()));
    }
    let mut rec = TraceRecord {
        start: start.clone(),
        direction: dir,
        segments: Vec::new(),
        crossings: Vec::new(),
        flow_time: Rat::zero(),
        termination: Termination::LengthBudget,
    };
    let mut cur = start.clone();
    match start.classify() {
        OnBoundary::Vertex(_) => return Err(Error::StartOnVertex),
        OnBoundary::Edge(i) if dir.dot(piece.inward_normal(i)) < 0 => {
            if budgets.max_crossings == 0 {
                rec.termination = Termination::CrossingBudget;
                return Ok(rec);
            }
            let next = atlas.cross_point(&cur, dir)?;
            if next.address.len() > budgets.max_depth {
                rec.termination = Termination::DepthLimit;
                return Ok(rec);
            }
            rec.crossings.push(Crossing {
                from_label: piece.edges[i].label,
                to_label: crossing_label(&next),
                from: cur.address.clone(),
                to: next.address.clone(),
            });
            cur = next;
        }
        _ => {}
    }
    let origin = cur.clone();

    loop {
        let p = (cur.point.x.clone(), cur.point.y.clone());
        let t_hit = first_hit(cur.piece(), &p, dir).expect("a ray inside a bounded piece leaves it");
        let scale = cur.address.scale();
        let remaining_chart = (&budgets.max_length - &rec.flow_time) / &scale;

        // closed-up wins ties with the budget and with edge hits
        let same_chart = !rec.segments.is_empty() && cur.address == origin.address && cur.piece() == origin.piece();
        let o = (origin.point.x.clone(), origin.point.y.clone());
        if same_chart {
            if let Some(t) = param_on(&p, dir, &o, &t_hit.clone().min(remaining_chart.clone())) {
                push_segment(&mut rec, &cur, &p, point_at(&p, dir, &t), &t, &scale);
                rec.termination = Termination::ClosedUp;
                return Ok(rec);
            }
        }
        if remaining_chart <= t_hit {
            let q = point_at(&p, dir, &remaining_chart);
            push_segment(&mut rec, &cur, &p, q, &remaining_chart, &scale);
            rec.termination = Termination::LengthBudget;
            return Ok(rec);
        }
        let q = point_at(&p, dir, &t_hit);
        push_segment(&mut rec, &cur, &p, q.clone(), &t_hit, &scale);
        let exit = GlobalPoint::new(cur.address.clone(), cur.piece(), q.0, q.1);
        let edge = match exit.classify() {
            OnBoundary::Edge(i) => i,
            OnBoundary::Vertex(_) => {
                rec.termination = Termination::HitSingularity;
                return Ok(rec);
            }
            OnBoundary::Interior => unreachable!("hit point lies on the boundary"),
        };
        if rec.crossings.len() >= budgets.max_crossings {
            rec.termination = Termination::CrossingBudget;
            return Ok(rec);
        }
        let next = atlas.cross_point(&exit, dir)?;
        if next.address.len() > budgets.max_depth {
            rec.termination = Termination::DepthLimit;
            return Ok(rec);
        }
        rec.crossings.push(Crossing {
            from_label: piece_of(exit.piece()).edges[edge].label,
            to_label: crossing_label(&next),
            from: exit.address.clone(),
            to: next.address.clone(),
        });
        cur = next;
    }
}

fn crossing_label(p: &GlobalPoint) -> EdgeLabel {
    match p.classify() {
        OnBoundary::Edge(i) => piece_of(p.piece()).edges[i].label,
        _ => unreachable!("crossing image of an edge point lies on an edge"),
    }
}

fn push_segment(rec: &mut TraceRecord, cur: &GlobalPoint, p: &(Rat, Rat), q: (Rat, Rat), t: &Rat, scale: &Rat) {
    rec.flow_time = &rec.flow_time + t * scale;
    rec.segments.push(Segment {
        address: cur.address.clone(),
        piece: cur.piece(),
        entry: [p.0.clone(), p.1.clone()],
        exit: [q.0, q.1],
    });
}

/// Trace back from the end of `tr` with the opposite direction for the same
/// flow time.
pub fn reverse(atlas: &Atlas, tr: &TraceRecord) -> Result<TraceRecord> {
    if tr.termination == Termination::HitSingularity {
        return Err(Error::Precondition("cannot reverse a trace ending at a singularity".into()));
    }
    let depth = tr.max_depth().max(tr.start.address.len());
    let budgets = Budgets::new(tr.flow_time.clone(), tr.crossings.len(), depth);
    let mut r = trace(atlas, &tr.end(), tr.direction.reversed(), &budgets)?;
    if tr.termination == Termination::ClosedUp {
        // a closed orbit reversed closes up at the same flow time
        if r.end() == r.start || atlas.canonical_point(&r.end())? == atlas.canonical_point(&r.start)? {
            r.termination = Termination::ClosedUp;
        }
    }
    Ok(r)
}

/// A transversal intersection of two traces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intersection {
    pub point: GlobalPoint,
    pub address: Address,
}

/// Transversal intersection points of two traces, each reported once in
/// its canonical chart, sorted by quad-T address.
pub fn intersections(atlas: &Atlas, a: &TraceRecord, b: &TraceRecord) -> Result<Vec<Intersection>> {
    if a.direction.cross(b.direction) == 0 {
        return Ok(Vec::new());
    }
    let mut by_chart: HashMap<(&Address, PieceId), Vec<&Segment>> = HashMap::new();
    for s in &b.segments {
        by_chart.entry((&s.address, s.piece)).or_default().push(s);
    }
    let (da, db) = (a.direction, b.direction);
    let den = Rat::int(da.cross(db));
    let mut found: BTreeMap<(Address, PieceId, Rat, Rat), GlobalPoint> = BTreeMap::new();
    for sa in &a.segments {
        let Some(cands) = by_chart.get(&(&sa.address, sa.piece)) else { continue };
        let ta_max = sa.chart_param(da);
        for sb in cands {
            let tb_max = sb.chart_param(db);
            // entry_a + ta da = entry_b + tb db
            let wx = &sb.entry[0] - &sa.entry[0];
            let wy = &sb.entry[1] - &sa.entry[1];
            let ta = (wx.clone() * Rat::int(db.dy) - wy.clone() * Rat::int(db.dx)) / &den;
            let tb = (wx * Rat::int(da.dy) - wy * Rat::int(da.dx)) / &den;
            if ta.is_negative() || ta > ta_max || tb.is_negative() || tb > tb_max {
                continue;
            }
            let (x, y) = point_at(&(sa.entry[0].clone(), sa.entry[1].clone()), da, &ta);
            let g = atlas.canonical_point(&GlobalPoint::new(sa.address.clone(), sa.piece, x, y))?;
            let key = (g.address.clone(), g.piece(), g.point.x.clone(), g.point.y.clone());
            found.entry(key).or_insert(g);
        }
    }
    Ok(found.into_values().map(|g| Intersection { address: g.address.clone(), point: g }).collect())
}
