//! Mechanical consistency checks on a gluing table.

use std::collections::BTreeMap;

use serde::Serialize;

use super::gluing::{EdgeRef, GluingTable};
use super::pieces::{canonical_pieces, EdgeLabel};
use super::vertices::{addresses_up_to, vertex_classes};
use super::Atlas;
use crate::rat::Rat;

/// Truncation depth used by [`validate_atlas`].
pub const VALIDATION_DEPTH: usize = 3;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub depth: usize,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &'static str, violations: Vec<String>) -> Check {
    Check { name, passed: violations.is_empty(), violations }
}

pub fn validate_atlas(atlas: &Atlas) -> ValidationReport {
    validate_table(atlas.table(), VALIDATION_DEPTH)
}

pub fn validate_table(table: &GluingTable, depth: usize) -> ValidationReport {
    let pieces = canonical_pieces();
    let addresses = addresses_up_to(depth);
    let mut checks = Vec::new();

    // label multiset: each solid label on exactly two edges, each covered by one pair
    let mut v = Vec::new();
    let mut counts: BTreeMap<EdgeLabel, usize> = BTreeMap::new();
    for p in pieces {
        for e in &p.edges {
            *counts.entry(e.label).or_default() += 1;
        }
    }
    for l in EdgeLabel::all_solid() {
        if counts.get(&l) != Some(&2) {
            v.push(format!("solid label {l} occurs {} times", counts.get(&l).unwrap_or(&0)));
        }
    }
    for l in EdgeLabel::all_boundary() {
        if counts.get(&l) != Some(&1) {
            v.push(format!("boundary label {l} occurs {} times", counts.get(&l).unwrap_or(&0)));
        }
    }
    for p in pieces {
        for (i, e) in p.edges.iter().enumerate() {
            if e.label.is_boundary() {
                continue;
            }
            let r = EdgeRef { piece: p.id, edge: i };
            let n = table.within.iter().filter(|sp| sp.a == r || sp.b == r).count();
            if n != 1 {
                v.push(format!("{} on {} is in {n} pairs", e.label, p.id));
            }
        }
    }
    checks.push(check("label_multiset", v));

    // involution and totality over the truncation
    let mut v = Vec::new();
    for s in &addresses {
        for p in pieces {
            for i in 0..p.edges.len() {
                let t = match table.transition(s, p.id, i) {
                    Ok(t) => t,
                    Err(e) => {
                        v.push(format!("{} on {}^{s:?}: {e}", p.edges[i].label, p.id));
                        continue;
                    }
                };
                match table.transition(&t.to_address, t.to_piece, t.to_edge) {
                    Ok(back) if &back.to_address == s && back.to_piece == p.id && back.to_edge == i => {}
                    Ok(back) => v.push(format!(
                        "{} on {}^{s:?} returns to {} on {}^{:?}",
                        p.edges[i].label, p.id, back.to_label, back.to_piece, back.to_address
                    )),
                    Err(e) => v.push(format!("{} on {}^{s:?}: partner has no rule ({e})", p.edges[i].label, p.id)),
                }
            }
        }
    }
    checks.push(check("involution_totality", v));

    // parallel, equal physical length, endpoints onto endpoints, opposite normals
    let (mut par, mut len, mut ends, mut normals) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for s in &addresses {
        for p in pieces {
            for (i, e) in p.edges.iter().enumerate() {
                let Ok(t) = table.transition(s, p.id, i) else { continue };
                let q = &pieces[t.to_piece.index()];
                let f = &q.edges[t.to_edge];
                let tag = || format!("{} on {}^{s:?} ~ {} on {}^{:?}", e.label, p.id, f.label, q.id, t.to_address);
                let (ua, ub) = ((e.end.0 - e.start.0, e.end.1 - e.start.1), (f.end.0 - f.start.0, f.end.1 - f.start.1));
                if ua.0 * ub.1 - ua.1 * ub.0 != 0 {
                    par.push(tag());
                }
                let phys = |l: i64, a: &crate::address::Address| Rat::int(l) * a.scale();
                if phys(e.chart_length(), s) != phys(f.chart_length(), &t.to_address) {
                    len.push(tag());
                }
                let img = |pt: (i64, i64)| t.apply(&Rat::int(pt.0), &Rat::int(pt.1));
                let mut got = [img(e.start), img(e.end)];
                let mut want = [f.start, f.end].map(|pt| (Rat::int(pt.0), Rat::int(pt.1)));
                got.sort();
                want.sort();
                if got != want {
                    ends.push(tag());
                }
                // the derivative of the transition must carry the inward normal
                // of this edge to the outward normal of its partner
                let (na, nb) = (p.inward_normal(i), q.inward_normal(t.to_edge));
                let sign = if t.flipped { -1 } else { 1 };
                if (sign * na.0, sign * na.1) != (-nb.0, -nb.1) {
                    normals.push(tag());
                }
            }
        }
    }
    checks.push(check("parallel", par));
    checks.push(check("equal_length", len));
    checks.push(check("endpoints", ends));
    checks.push(check("opposite_normals", normals));

    let area: Rat = pieces.iter().map(|p| p.area()).sum();
    let v = if area == Rat::int(32) { vec![] } else { vec![format!("quad-T chart area {area}")] };
    checks.push(check("area", v));

    let v = match vertex_classes(table, depth) {
        Ok(classes) => classes
            .iter()
            .filter(|c| c.total_angle != Rat::int(2) && c.total_angle != Rat::int(6))
            .map(|c| {
                let m = &c.members[0];
                format!("class of {}^{:?} vertex {} has angle {}π", m.piece, m.address, m.vertex, c.total_angle)
            })
            .collect(),
        Err(e) => vec![e.to_string()],
    };
    checks.push(check("angle_spectrum", v));

    let passed = checks.iter().all(|c| c.passed);
    ValidationReport { depth, passed, checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use EdgeLabel::{Gamma as G, Sigma as S};

    #[test]
    fn canonical_table_passes() {
        let r = validate_atlas(&Atlas::canonical());
        assert!(r.passed, "{r:#?}");
        assert_eq!(r.checks.len(), 8);
    }

    #[test]
    fn reversed_pair_fails_normal_check() {
        let mut t = GluingTable::canonical();
        t.within[3].flipped = true;
        let r = validate_table(&t, 2);
        assert!(!r.passed);
        assert!(!r.check("opposite_normals").unwrap().passed);
        assert!(r.check("label_multiset").unwrap().passed);
    }

    #[test]
    fn missing_root_rule_fails_totality() {
        let mut t = GluingTable::canonical();
        t.root.retain(|&(a, b)| (a, b) != (G(5), S(5)));
        let r = validate_table(&t, 2);
        let c = r.check("involution_totality").unwrap();
        assert!(!c.passed);
        assert!(c.violations.iter().any(|m| m.contains("γ5")), "{c:?}");
    }

    #[test]
    fn wrong_child_bit_fails() {
        let mut t = GluingTable::canonical();
        t.between[0].bit = 0;
        assert!(!validate_table(&t, 2).passed);
    }
}
