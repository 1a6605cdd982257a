//! Certified distance brackets, the quad-T diameter constant, metric
//! comparison against the 2-adic metric, and box-counting dimension.
//!
//! Upper bounds are lengths of explicit paths. Graph weights are Euclidean
//! chart lengths rounded *up* to units of `2^-40`, so every reported value
//! stays an upper bound on the true length of the path it describes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::address::{d2, dist_lower, wedge, Address, ElusiveAddress};
use crate::atlas::pieces::IPoint;
use crate::atlas::{canonical_pieces, piece_of, Atlas, GlobalPoint, GluingTable, PieceId};
use crate::error::{Error, Result};
use crate::rat::Rat;

/// Certified diameter bound of one quad-T in chart units: two legs, each at
/// most half the perimeter (14 / 2) of a piece.
pub const M_BAR: i64 = 14;

const FRAC_BITS: u32 = 40;
const INF: u64 = u64::MAX / 4;

pub fn m_bar() -> Rat {
    Rat::int(M_BAR)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiameterEstimate {
    pub m_bar: Rat,
    /// Largest graph distance between waypoints of one quad-T.
    pub m_hat: Rat,
    pub density: usize,
}

pub fn certified_m() -> DiameterEstimate {
    certified_m_at(8)
}

pub fn certified_m_at(k: usize) -> DiameterEstimate {
    let g = quad_graph(k, false);
    let max = g.dist.iter().copied().filter(|&d| d < INF).max().unwrap_or(0);
    DiameterEstimate { m_bar: m_bar(), m_hat: fixed_to_rat(max as u128, 0), density: k }
}

fn fixed_to_rat(v: u128, extra_bits: u32) -> Rat {
    Rat::from_big(BigInt::from(v), BigInt::from(1u8) << (FRAC_BITS + extra_bits) as usize)
}

/// Addresses on the tree path from `s` up to `s ∧ t` and down to `t`.
pub fn tree_path(s: &Address, t: &Address) -> Vec<Address> {
    let w = wedge(s, t);
    let mut path: Vec<Address> = (w.len()..=s.len()).rev().map(|n| s.prefix(n)).collect();
    path.extend((w.len() + 1..=t.len()).map(|n| t.prefix(n)));
    path
}

/// Tree-route upper bound: `M_BAR * 2^-|u|` for every quad-T `u` on the
/// tree path between the quad-Ts of `p` and `q`.
pub fn dist_upper_tree(atlas: &Atlas, p: &GlobalPoint, q: &GlobalPoint) -> Result<Rat> {
    let (p, q) = (atlas.canonical_point(p)?, atlas.canonical_point(q)?);
    if p == q {
        return Ok(Rat::zero());
    }
    Ok(tree_path(&p.address, &q.address).iter().map(|u| m_bar() * u.scale()).sum())
}

/// Waypoint graph of one quad-T at density `k`: `k + 1` evenly spaced points
/// on every edge, identified across the solid gluings (and, for the root,
/// its two self-gluings), with all-pairs shortest paths.
pub struct QuadGraph {
    pub k: usize,
    /// Node of each `(piece, k*x, k*y)` waypoint.
    index: HashMap<(PieceId, i64, i64), usize>,
    /// Waypoints of each piece with their node.
    by_piece: [Vec<(usize, IPoint)>; 4],
    n: usize,
    dist: Vec<u64>,
}

impl QuadGraph {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn d(&self, a: usize, b: usize) -> u64 {
        self.dist[a * self.n + b]
    }

    fn node(&self, piece: PieceId, x: &Rat, y: &Rat) -> Option<usize> {
        let k = Rat::int(self.k as i64);
        let (sx, sy) = (x * &k, y * &k);
        if !sx.is_integer() || !sy.is_integer() {
            return None;
        }
        let (sx, sy) = (sx.floor().to_i64()?, sy.floor().to_i64()?);
        self.index.get(&(piece, sx, sy)).copied()
    }
}

fn waypoints(k: usize) -> [Vec<IPoint>; 4] {
    let k = k as i64;
    canonical_pieces().each_ref().map(|p| {
        let mut pts = Vec::new();
        for e in &p.edges {
            for j in 0..=k {
                let pt = (k * e.start.0 + j * (e.end.0 - e.start.0), k * e.start.1 + j * (e.end.1 - e.start.1));
                if !pts.contains(&pt) {
                    pts.push(pt);
                }
            }
        }
        pts
    })
}

/// Whether the closed segment `ab` stays inside the closed piece polygon.
pub fn segment_inside(piece: PieceId, a: (&Rat, &Rat), b: (&Rat, &Rat)) -> bool {
    let [sq, bar] = piece_of(piece).rects;
    let in_sq = |x: &Rat, y: &Rat| sq.contains(x, y);
    let in_bar = |x: &Rat, y: &Rat| bar.contains(x, y);
    if (in_sq(a.0, a.1) && in_sq(b.0, b.1)) || (in_bar(a.0, a.1) && in_bar(b.0, b.1)) {
        return true;
    }
    let (lo, hi) = if in_sq(a.0, a.1) && in_bar(b.0, b.1) {
        (a, b)
    } else if in_bar(a.0, a.1) && in_sq(b.0, b.1) {
        (b, a)
    } else {
        return false;
    };
    // the square and bar meet along the line y = mid; cross it inside the square's side
    let mid = Rat::int(if piece.is_upper() { sq.y1 } else { sq.y0 });
    if lo.1 == hi.1 {
        return false;
    }
    let t = (&mid - lo.1) / (hi.1 - lo.1);
    let cx = lo.0 + &t * (hi.0 - lo.0);
    cx >= Rat::int(sq.x0) && cx <= Rat::int(sq.x1)
}

fn fixed_len_int(dx: i64, dy: i64, k: usize) -> u64 {
    let n = ((dx * dx + dy * dy) as u128) << (2 * FRAC_BITS);
    let r = n.sqrt();
    let r = if r * r < n { r + 1 } else { r };
    r.div_ceil(k as u128) as u64
}

/// Euclidean chart length rounded up to units of `2^-40`.
fn fixed_len(a: (&Rat, &Rat), b: (&Rat, &Rat)) -> u64 {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    let r = (&dx * &dx + &dy * &dy).sqrt_upper(FRAC_BITS) * Rat::pow2(FRAC_BITS as i64);
    debug_assert!(r.is_integer());
    r.floor().to_u64().expect("chart lengths are small")
}

fn build_graph(k: usize, root: bool) -> QuadGraph {
    let table = GluingTable::canonical();
    let pts = waypoints(k);
    let kr = Rat::int(k as i64);
    let mut keys: Vec<(PieceId, i64, i64)> = Vec::new();
    for p in PieceId::ALL {
        keys.extend(pts[p.index()].iter().map(|&(x, y)| (p, x, y)));
    }
    let pos: HashMap<(PieceId, i64, i64), usize> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let mut parent: Vec<usize> = (0..keys.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    let here = Address::root();
    for piece in canonical_pieces() {
        for (i, e) in piece.edges.iter().enumerate() {
            if e.label.is_boundary() && !root {
                continue;
            }
            let t = table.transition(&here, piece.id, i).expect("canonical table is total");
            if t.to_address != here {
                continue;
            }
            for j in 0..=k as i64 {
                let k64 = k as i64;
                let (x, y) = (k64 * e.start.0 + j * (e.end.0 - e.start.0), k64 * e.start.1 + j * (e.end.1 - e.start.1));
                let (ix, iy) = t.apply(&(Rat::int(x) / &kr), &(Rat::int(y) / &kr));
                let key = (t.to_piece, (ix * &kr).floor().to_i64().expect("small"), (iy * &kr).floor().to_i64().expect("small"));
                let (a, b) = (pos[&(piece.id, x, y)], pos[&key]);
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut node_of_root: HashMap<usize, usize> = HashMap::new();
    let mut index = HashMap::new();
    let mut by_piece: [Vec<(usize, IPoint)>; 4] = Default::default();
    for (i, &key) in keys.iter().enumerate() {
        let r = find(&mut parent, i);
        let next = node_of_root.len();
        let node = *node_of_root.entry(r).or_insert(next);
        index.insert(key, node);
        by_piece[key.0.index()].push((node, (key.1, key.2)));
    }
    let n = node_of_root.len();
    let mut dist = vec![INF; n * n];
    for i in 0..n {
        dist[i * n + i] = 0;
    }
    for p in PieceId::ALL {
        let list = &by_piece[p.index()];
        let rats: Vec<(Rat, Rat)> = list.iter().map(|&(_, (x, y))| (Rat::int(x) / &kr, Rat::int(y) / &kr)).collect();
        for a in 0..list.len() {
            for b in a + 1..list.len() {
                if !segment_inside(p, (&rats[a].0, &rats[a].1), (&rats[b].0, &rats[b].1)) {
                    continue;
                }
                let (pa, pb) = (list[a].1, list[b].1);
                let w = fixed_len_int(pa.0 - pb.0, pa.1 - pb.1, k);
                let (na, nb) = (list[a].0, list[b].0);
                if w < dist[na * n + nb] {
                    dist[na * n + nb] = w;
                    dist[nb * n + na] = w;
                }
            }
        }
    }
    for m in 0..n {
        for i in 0..n {
            let dim = dist[i * n + m];
            if dim >= INF {
                continue;
            }
            for j in 0..n {
                let c = dim + dist[m * n + j];
                if c < dist[i * n + j] {
                    dist[i * n + j] = c;
                }
            }
        }
    }
    QuadGraph { k, index, by_piece, n, dist }
}

type GraphCache = Mutex<HashMap<(usize, bool), Arc<QuadGraph>>>;

/// Cached waypoint graph; the root quad-T has its own because of its self-gluings.
pub fn quad_graph(k: usize, root: bool) -> Arc<QuadGraph> {
    static CACHE: OnceLock<GraphCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(g) = cache.lock().expect("graph cache poisoned").get(&(k, root)) {
        return g.clone();
    }
    let g = Arc::new(build_graph(k, root));
    cache.lock().expect("graph cache poisoned").entry((k, root)).or_insert(g).clone()
}

/// Fixed-point lengths from a point to every node of its quad-T graph.
fn spread_from(g: &QuadGraph, p: &GlobalPoint) -> Vec<u64> {
    let kr = Rat::int(g.k as i64);
    let mut out = vec![INF; g.n];
    for &(node, (x, y)) in &g.by_piece[p.piece().index()] {
        let (nx, ny) = (Rat::int(x) / &kr, Rat::int(y) / &kr);
        if !segment_inside(p.piece(), (&p.point.x, &p.point.y), (&nx, &ny)) {
            continue;
        }
        let w = fixed_len((&p.point.x, &p.point.y), (&nx, &ny));
        for (z, best) in out.iter_mut().enumerate() {
            *best = (*best).min(w + g.d(node, z));
        }
    }
    out
}

/// Node pairs `(in Q^u, in Q^v)` on the boundary components shared by adjacent quad-Ts.
fn interface(table: &GluingTable, u: &Address, v: &Address, gu: &QuadGraph, gv: &QuadGraph) -> Result<Vec<(usize, usize)>> {
    let k = gu.k as i64;
    let kr = Rat::int(k);
    let mut out = Vec::new();
    for piece in canonical_pieces() {
        for (i, e) in piece.edges.iter().enumerate() {
            if !e.label.is_boundary() || &table.neighbor(u, e.label)?.0 != v {
                continue;
            }
            let t = table.transition(u, piece.id, i)?;
            for j in 0..=k {
                let (x, y) = (
                    Rat::int(k * e.start.0 + j * (e.end.0 - e.start.0)) / &kr,
                    Rat::int(k * e.start.1 + j * (e.end.1 - e.start.1)) / &kr,
                );
                let (ix, iy) = t.apply(&x, &y);
                let a = gu.node(piece.id, &x, &y).expect("waypoint");
                let b = gv.node(t.to_piece, &ix, &iy).ok_or_else(|| Error::Precondition("waypoints do not match across a boundary".into()))?;
                out.push((a, b));
            }
        }
    }
    Ok(out)
}

/// Waypoint-graph upper bound at density `k`, routed through the quad-Ts on
/// the tree path. Always at most [`dist_upper_tree`].
pub fn dist_upper_graph(atlas: &Atlas, p: &GlobalPoint, q: &GlobalPoint, k: usize) -> Result<Rat> {
    if k == 0 {
        return Err(Error::Precondition("waypoint density must be positive".into()));
    }
    let (p, q) = (atlas.canonical_point(p)?, atlas.canonical_point(q)?);
    if p == q {
        return Ok(Rat::zero());
    }
    let path = tree_path(&p.address, &q.address);
    let deep = path.iter().map(Address::len).max().unwrap_or(0) as u32;
    let shift = |u: &Address| deep - u.len() as u32;
    let graphs: Vec<Arc<QuadGraph>> = path.iter().map(|u| quad_graph(k, u.is_root())).collect();

    let mut best = u128::MAX;
    if p.address == q.address
        && p.piece() == q.piece()
        && segment_inside(p.piece(), (&p.point.x, &p.point.y), (&q.point.x, &q.point.y))
    {
        best = (fixed_len((&p.point.x, &p.point.y), (&q.point.x, &q.point.y)) as u128) << shift(&p.address);
    }

    let to_wide = |v: u64, s: u32| if v >= INF { u128::MAX } else { (v as u128) << s };
    let mut cur: Vec<u128> = spread_from(&graphs[0], &p).into_iter().map(|v| to_wide(v, shift(&path[0]))).collect();
    for i in 0..path.len() - 1 {
        let (gu, gv) = (&graphs[i], &graphs[i + 1]);
        let mut hop = vec![u128::MAX; gv.n];
        for (a, b) in interface(atlas.table(), &path[i], &path[i + 1], gu, gv)? {
            hop[b] = hop[b].min(cur[a]);
        }
        let s = shift(&path[i + 1]);
        let mut next = vec![u128::MAX; gv.n];
        for (y, &hy) in hop.iter().enumerate() {
            if hy == u128::MAX {
                continue;
            }
            for (z, nz) in next.iter_mut().enumerate() {
                let c = hy.saturating_add(to_wide(gv.d(y, z), s));
                if c < *nz {
                    *nz = c;
                }
            }
        }
        cur = next;
    }
    let g = graphs.last().expect("nonempty path");
    let back = spread_from(g, &q);
    let s = shift(&q.address);
    for (z, &c) in cur.iter().enumerate() {
        if c != u128::MAX && back[z] < INF {
            best = best.min(c + ((back[z] as u128) << s));
        }
    }
    if best == u128::MAX {
        return Err(Error::Precondition("no waypoint route between the points".into()));
    }
    Ok(fixed_to_rat(best, deep))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceBracket {
    pub lower: Rat,
    pub upper: Rat,
    pub lower_method: &'static str,
    pub upper_method: &'static str,
}

/// Lower bound from the quad-T addresses, upper bound from the waypoint graph.
pub fn bracket(atlas: &Atlas, p: &GlobalPoint, q: &GlobalPoint, k: usize) -> Result<DistanceBracket> {
    let (s, t) = (atlas.locate(p)?, atlas.locate(q)?);
    let lower = if s == t { Rat::zero() } else { dist_lower(&s, &t)? };
    let upper = dist_upper_graph(atlas, p, q, k)?;
    Ok(DistanceBracket { lower, upper, lower_method: "quad-t-separation", upper_method: "waypoint-graph" })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MetricRow {
    pub a: ElusiveAddress,
    pub b: ElusiveAddress,
    pub wedge_len: usize,
    pub d2: Rat,
    pub lower: Rat,
    pub tree_upper: Rat,
    /// `d2 <= lower` and `tree_upper <= 3 M_BAR d2`.
    pub holds: bool,
}

/// Checks `d2 <= d <= 3 M d2` on chart-center representatives of the
/// depth-`n` truncations.
pub fn compare_metrics(atlas: &Atlas, pairs: &[(ElusiveAddress, ElusiveAddress)], n: usize) -> Result<Vec<MetricRow>> {
    pairs
        .iter()
        .map(|(a, b)| {
            let k = a.first_difference(b, n)?;
            let (s, t) = (a.prefix(n), b.prefix(n));
            let d = d2(a, b)?;
            let lower = dist_lower(&s, &t)?;
            let tree_upper = dist_upper_tree(atlas, &GlobalPoint::chart_center(&s), &GlobalPoint::chart_center(&t))?;
            let holds = d <= lower && tree_upper <= Rat::int(3) * m_bar() * &d;
            Ok(MetricRow { a: a.clone(), b: b.clone(), wedge_len: k, d2: d, lower, tree_upper, holds })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricChoice {
    D2,
    DUpper,
}

impl std::str::FromStr for MetricChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<MetricChoice> {
        match s {
            "d2" => Ok(MetricChoice::D2),
            "d-upper" | "upper" => Ok(MetricChoice::DUpper),
            _ => Err(Error::Parse(format!("unknown metric {s:?}, expected d2 or d-upper"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    pub metric: MetricChoice,
    pub scales: Vec<u32>,
    pub counts: Vec<u64>,
    /// Approximate: least-squares slope of `log2 N(2^-k)` against `k`.
    pub slope: f64,
    pub residual: f64,
}

/// Least-squares slope and root-mean-square residual.
pub fn regression(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if xs.len() < 2 || sxx == 0.0 {
        return Err(Error::DegenerateRegression("need at least two distinct scales".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    Ok((slope, (rss / n).sqrt()))
}

/// Measured diameter of the branch below `0^j`: the largest tree-route
/// distance between chart centers of the branch down to three levels below.
pub fn measured_branch_diameter(atlas: &Atlas, j: usize) -> Result<Rat> {
    let top = Address::from_bits(&vec![0; j]);
    let mut reps = vec![top.clone()];
    for extra in 1..=3usize {
        for code in 0..(1u32 << extra) {
            let mut s = top.clone();
            for b in (0..extra).rev() {
                s = s.child(((code >> b) & 1) as u8);
            }
            reps.push(s);
        }
    }
    let mut best = Rat::zero();
    for (i, a) in reps.iter().enumerate() {
        for b in &reps[i + 1..] {
            let d = dist_upper_tree(atlas, &GlobalPoint::chart_center(a), &GlobalPoint::chart_center(b))?;
            best = best.max(d);
        }
    }
    Ok(best)
}

/// Box-counting dimension of the elusive set with address cylinders as covers.
pub fn box_dimension(atlas: &Atlas, metric: MetricChoice, kmin: u32, kmax: u32) -> Result<DimensionReport> {
    if kmin > kmax || kmax > 48 {
        return Err(Error::Precondition(format!("scale range {kmin}..={kmax} must be nonempty and at most 48")));
    }
    let scales: Vec<u32> = (kmin..=kmax).collect();
    let counts: Vec<u64> = match metric {
        // a d2-ball of radius 2^-k is exactly one depth-k cylinder
        MetricChoice::D2 => scales.iter().map(|&k| 1u64 << k).collect(),
        MetricChoice::DUpper => {
            // depth-j cylinders cover at scale 2^-k once their diameter is at most 2^-k;
            // branch diameters at depth >= 1 scale exactly by 2^-j
            let mut out = Vec::new();
            for &k in &scales {
                let eps = Rat::pow2(-(k as i64));
                let mut j = k as usize;
                while measured_branch_diameter(atlas, j.max(1))? > eps {
                    j += 1;
                }
                out.push(1u64 << j);
            }
            out
        }
    };
    let xs: Vec<f64> = scales.iter().map(|&k| k as f64).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).log2()).collect();
    let (slope, residual) = regression(&xs, &ys)?;
    Ok(DimensionReport { metric, scales, counts, slope, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gp(s: &str, piece: PieceId, x: Rat, y: Rat) -> GlobalPoint {
        GlobalPoint::new(s.parse().unwrap(), piece, x, y)
    }

    #[test]
    fn m_hat_within_m_bar() {
        let est = certified_m();
        assert_eq!(est.m_bar, Rat::int(14));
        assert!(est.m_hat.is_positive() && est.m_hat <= est.m_bar, "{:?}", est.m_hat);
    }

    #[test]
    fn visibility_in_t_shape() {
        let r = Rat::int;
        assert!(segment_inside(PieceId::UR, (&r(1), &r(0)), (&r(0), &r(3))));
        assert!(!segment_inside(PieceId::UR, (&r(0), &r(0)), (&r(-1), &r(3))));
        // from the square's bottom-right corner to the far left of the bar top
        assert!(!segment_inside(PieceId::UR, (&r(2), &r(0)), (&Rat::new(-1, 1), &Rat::new(5, 2))));
        assert!(segment_inside(PieceId::LL, (&r(1), &r(0)), (&r(2), &r(-3))));
        assert!(!segment_inside(PieceId::LL, (&r(0), &r(0)), (&r(3), &Rat::new(-5, 2))));
    }

    #[test]
    fn straight_line_in_one_piece() {
        let atlas = Atlas::canonical();
        let p = gp("1", PieceId::UR, Rat::new(1, 2), Rat::new(1, 2));
        let q = gp("1", PieceId::UR, Rat::new(3, 2), Rat::new(1, 2));
        // chart distance 1 at scale 1/2
        let d = dist_upper_graph(&atlas, &p, &q, 2).unwrap();
        assert_eq!(d, Rat::new(1, 2));
        assert_eq!(dist_upper_graph(&atlas, &p, &p, 2).unwrap(), Rat::zero());
    }

    #[test]
    fn tree_bounds() {
        let atlas = Atlas::canonical();
        let s: Address = "0110".parse().unwrap();
        let p = gp("0110", PieceId::UR, Rat::new(1, 3), Rat::new(1, 3));
        let q = gp("0110", PieceId::LL, Rat::new(1, 3), Rat::new(-5, 2));
        assert_eq!(dist_upper_tree(&atlas, &p, &q).unwrap(), m_bar() * s.scale());
        let deep0 = GlobalPoint::chart_center(&"01100101".parse().unwrap());
        let deep1 = GlobalPoint::chart_center(&"0111001".parse().unwrap());
        let b = dist_upper_tree(&atlas, &deep0, &deep1).unwrap();
        assert!(b <= Rat::int(3) * m_bar() * Rat::pow2(-3));
        assert_eq!(dist_upper_tree(&atlas, &p, &p).unwrap(), Rat::zero());
    }

    #[test]
    fn graph_below_tree_and_monotone() {
        let atlas = Atlas::canonical();
        let p = GlobalPoint::chart_center(&"010".parse().unwrap());
        let q = gp("0111", PieceId::LR, Rat::new(1, 3), Rat::new(-7, 3));
        let tree = dist_upper_tree(&atlas, &p, &q).unwrap();
        let g4 = dist_upper_graph(&atlas, &p, &q, 4).unwrap();
        let g8 = dist_upper_graph(&atlas, &p, &q, 8).unwrap();
        assert!(g8 <= g4 && g4 <= tree, "{g8:?} {g4:?} {tree:?}");
        let lower = dist_lower(&"010".parse().unwrap(), &"0111".parse().unwrap()).unwrap();
        assert!(lower <= g8);
    }

    #[test]
    fn compare_examples() {
        let atlas = Atlas::canonical();
        let zeros = ElusiveAddress::constant(0);
        let ones = ElusiveAddress::constant(1);
        let split5 = zeros.flip_bit(5);
        let rows = compare_metrics(&atlas, &[(zeros.clone(), ones), (zeros, split5)], 12).unwrap();
        assert_eq!(rows[0].d2, Rat::one());
        assert!(rows[0].lower >= Rat::one());
        assert_eq!(rows[1].d2, Rat::new(1, 32));
        assert!(rows.iter().all(|r| r.holds));
    }

    #[test]
    fn d2_dimension_is_one() {
        let atlas = Atlas::canonical();
        let r = box_dimension(&atlas, MetricChoice::D2, 1, 16).unwrap();
        assert!((r.slope - 1.0).abs() < 1e-12);
        assert_eq!(r.counts[15], 1 << 16);
        assert!(matches!(box_dimension(&atlas, MetricChoice::D2, 3, 3), Err(Error::DegenerateRegression(_))));
    }

    #[test]
    fn upper_dimension_near_one() {
        let atlas = Atlas::canonical();
        let r = box_dimension(&atlas, MetricChoice::DUpper, 4, 12).unwrap();
        assert!(r.slope >= 0.85 && r.slope <= 1.15, "{}", r.slope);
    }
}
