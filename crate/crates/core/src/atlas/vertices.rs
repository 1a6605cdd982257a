//! Vertex classes (cone points) of the depth-n truncated surface and the
//! boundary loops that pass through them.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::gluing::GluingTable;
use super::pieces::{canonical_pieces, EdgeLabel, PieceId};
use crate::address::Address;
use crate::error::Result;
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Corner {
    pub address: Address,
    pub piece: PieceId,
    pub vertex: usize,
    /// Interior angle in quarter turns.
    pub quarters: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexClass {
    pub members: Vec<Corner>,
    /// Total angle as a multiple of π.
    pub total_angle: Rat,
}

impl VertexClass {
    pub fn quarters(&self) -> i64 {
        self.members.iter().map(|c| c.quarters).sum()
    }

    pub fn is_regular(&self) -> bool {
        self.quarters() == 4
    }

    /// Cone angle 6π.
    pub fn is_six_pi(&self) -> bool {
        self.quarters() == 12
    }

    pub fn contains(&self, address: &Address, piece: PieceId, vertex: usize) -> bool {
        self.members.iter().any(|c| &c.address == address && c.piece == piece && c.vertex == vertex)
    }

    /// Shortest address among the members.
    pub fn min_depth(&self) -> usize {
        self.members.iter().map(|c| c.address.len()).min().unwrap_or(0)
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut j = i;
        while self.0[j] != r {
            let next = self.0[j];
            self.0[j] = r;
            j = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub(crate) fn addresses_up_to(depth: usize) -> Vec<Address> {
    let mut out = vec![Address::root()];
    let mut i = 0;
    while i < out.len() {
        if out[i].len() < depth {
            let (a, b) = (out[i].child(0), out[i].child(1));
            out.push(a);
            out.push(b);
        }
        i += 1;
    }
    out
}

/// All corners of the depth-`depth` truncation grouped into classes.
/// `complete` is false for classes touching a gluing that leaves the truncation.
pub(crate) struct Complex {
    pub addresses: Vec<Address>,
    pub index: HashMap<Address, usize>,
    pub class_of: Vec<usize>,
    pub classes: BTreeMap<usize, (VertexClass, bool)>,
}

impl Complex {
    pub fn node(&self, s: &Address, piece: PieceId, vertex: usize) -> Option<usize> {
        self.index.get(s).map(|&a| a * 40 + piece.index() * 10 + vertex)
    }

    pub fn class(&self, s: &Address, piece: PieceId, vertex: usize) -> Option<&(VertexClass, bool)> {
        self.node(s, piece, vertex).and_then(|n| self.classes.get(&self.class_of[n]))
    }
}

pub(crate) fn build_complex(table: &GluingTable, depth: usize) -> Result<Complex> {
    let pieces = canonical_pieces();
    let addresses = addresses_up_to(depth);
    let index: HashMap<Address, usize> = addresses.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
    let n = addresses.len() * 40;
    let mut uf = UnionFind((0..n).collect());
    let mut incomplete = vec![false; n];
    let node = |a: usize, p: PieceId, v: usize| a * 40 + p.index() * 10 + v;

    for (ai, s) in addresses.iter().enumerate() {
        for piece in pieces {
            for (i, e) in piece.edges.iter().enumerate() {
                let (v0, v1) = (i, (i + 1) % 10);
                let t = match table.transition(s, piece.id, i) {
                    Ok(t) => t,
                    Err(_) => {
                        incomplete[node(ai, piece.id, v0)] = true;
                        incomplete[node(ai, piece.id, v1)] = true;
                        continue;
                    }
                };
                let Some(&bi) = index.get(&t.to_address) else {
                    incomplete[node(ai, piece.id, v0)] = true;
                    incomplete[node(ai, piece.id, v1)] = true;
                    continue;
                };
                let partner = &pieces[t.to_piece.index()];
                for (v, pt) in [(v0, e.start), (v1, e.end)] {
                    let (x, y) = t.apply(&Rat::int(pt.0), &Rat::int(pt.1));
                    let w = partner.vertices.iter().position(|&(px, py)| Rat::int(px) == x && Rat::int(py) == y);
                    match w {
                        Some(w) => uf.union(node(ai, piece.id, v), node(bi, t.to_piece, w)),
                        None => incomplete[node(ai, piece.id, v)] = true,
                    }
                }
            }
        }
    }

    let class_of: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
    let mut groups: BTreeMap<usize, (Vec<Corner>, bool)> = BTreeMap::new();
    for (i, &root) in class_of.iter().enumerate() {
        let (a, rest) = (i / 40, i % 40);
        let piece = PieceId::ALL[rest / 10];
        let vertex = rest % 10;
        let entry = groups.entry(root).or_default();
        entry.0.push(Corner {
            address: addresses[a].clone(),
            piece,
            vertex,
            quarters: pieces[piece.index()].corner_quarters(vertex),
        });
        entry.1 |= incomplete[i];
    }
    let classes = groups
        .into_iter()
        .map(|(root, (members, inc))| {
            let q: i64 = members.iter().map(|c| c.quarters).sum();
            (root, (VertexClass { members, total_angle: Rat::new(q, 2) }, !inc))
        })
        .collect();
    Ok(Complex { addresses, index, class_of, classes })
}

/// Vertex classes of the depth-`depth` truncation whose members are all
/// interior to it.
pub fn vertex_classes(table: &GluingTable, depth: usize) -> Result<Vec<VertexClass>> {
    let complex = build_complex(table, depth)?;
    Ok(complex.classes.into_values().filter(|(_, complete)| *complete).map(|(c, _)| c).collect())
}

/// Total angle (multiple of π) of the class of each polygon corner of
/// `Q^probe`, computed on a truncation deep enough to close every class.
pub fn corner_angles(table: &GluingTable, probe: &Address) -> Result<[[Rat; 10]; 4]> {
    let complex = build_complex(table, probe.len() + 2)?;
    let mut out: [[Rat; 10]; 4] = Default::default();
    for piece in PieceId::ALL {
        for (v, angle) in out[piece.index()].iter_mut().enumerate() {
            let (class, complete) = complex.class(probe, piece, v).expect("probe indexed");
            if !complete {
                return Err(crate::error::Error::MissingRule(format!("class of {piece} vertex {v} is open")));
            }
            *angle = class.total_angle.clone();
        }
    }
    Ok(out)
}

/// Whether a corner of `Q^s` is a cone point (total angle above 2π). All
/// non-root quad-Ts share one pattern; the root's self-gluings give it its own.
pub fn is_cone_corner_at(s: &Address, piece: PieceId, vertex: usize) -> bool {
    static ANGLES: std::sync::OnceLock<[[[Rat; 10]; 4]; 2]> = std::sync::OnceLock::new();
    let a = ANGLES.get_or_init(|| {
        let t = GluingTable::canonical();
        [
            corner_angles(&t, &Address::root()).expect("canonical table is complete"),
            corner_angles(&t, &Address::from_bits(&[1])).expect("canonical table is complete"),
        ]
    });
    a[usize::from(!s.is_root())][piece.index()][vertex] != Rat::int(2)
}

/// [`is_cone_corner_at`] for a non-root quad-T.
pub fn is_cone_corner(piece: PieceId, vertex: usize) -> bool {
    is_cone_corner_at(&Address::from_bits(&[1]), piece, vertex)
}

/// Boundary components of `Q^s` leading to its children, chained through
/// regular (2π) endpoints into closed loops.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryLoop {
    pub address: Address,
    pub segments: Vec<EdgeLabel>,
    /// Total angles (multiples of π) of the distinct non-regular classes on the loop.
    pub singular_angles: Vec<Rat>,
    /// Whether the chain closes up (every regular endpoint shared by two segments).
    pub closed: bool,
}

impl BoundaryLoop {
    /// A closed loop through exactly one cone point of angle 6π.
    pub fn has_single_cone_point(&self) -> bool {
        self.closed && self.singular_angles == [Rat::int(6)]
    }
}

pub fn boundary_loops(table: &GluingTable, depth: usize) -> Result<Vec<BoundaryLoop>> {
    let complex = build_complex(table, depth)?;
    let pieces = canonical_pieces();
    let mut out = Vec::new();
    for s in complex.addresses.iter().filter(|s| s.len() < depth) {
        // (label, start class, end class) of each upward boundary segment
        let mut segs = Vec::new();
        for piece in pieces {
            for (i, e) in piece.edges.iter().enumerate() {
                if !e.label.is_boundary() {
                    continue;
                }
                let (to, _) = table.neighbor(s, e.label)?;
                if to.len() <= s.len() {
                    continue;
                }
                let c0 = complex.class_of[complex.node(s, piece.id, i).expect("indexed")];
                let c1 = complex.class_of[complex.node(s, piece.id, (i + 1) % 10).expect("indexed")];
                segs.push((e.label, c0, c1));
            }
        }
        let regular = |c: usize| complex.classes[&c].0.is_regular();
        let mut used = vec![false; segs.len()];
        for start in 0..segs.len() {
            if used[start] {
                continue;
            }
            // flood over segments sharing a regular endpoint
            let mut comp = vec![start];
            used[start] = true;
            let mut k = 0;
            while k < comp.len() {
                let (_, a, b) = segs[comp[k]];
                for c in [a, b].into_iter().filter(|&c| regular(c)) {
                    for (j, seg) in segs.iter().enumerate() {
                        if !used[j] && (seg.1 == c || seg.2 == c) {
                            used[j] = true;
                            comp.push(j);
                        }
                    }
                }
                k += 1;
            }
            let mut endpoint_uses: BTreeMap<usize, usize> = BTreeMap::new();
            for &j in &comp {
                *endpoint_uses.entry(segs[j].1).or_default() += 1;
                *endpoint_uses.entry(segs[j].2).or_default() += 1;
            }
            let closed = endpoint_uses.iter().all(|(&c, &uses)| uses % 2 == 0 || !regular(c))
                && endpoint_uses.iter().filter(|(&c, _)| !regular(c)).all(|(_, &u)| u % 2 == 0);
            let singular: BTreeSet<usize> = endpoint_uses.keys().copied().filter(|&c| !regular(c)).collect();
            out.push(BoundaryLoop {
                address: s.clone(),
                segments: comp.iter().map(|&j| segs[j].0).collect(),
                singular_angles: singular.iter().map(|c| complex.classes[c].0.total_angle.clone()).collect(),
                closed,
            });
        }
    }
    Ok(out)
}
