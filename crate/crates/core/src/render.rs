//! SVG drawings: the net of quad-T charts and the billiard table, with
//! optional trace overlays.

use std::fmt::Write;

use crate::address::Address;
use crate::atlas::{canonical_pieces, PieceId};
use crate::billiard::{build_table, BilliardTrace};
use crate::tracer::TraceRecord;

const PX: f64 = 80.0;
const MARGIN: f64 = 10.0;

/// Net layout: row `k` holds the `2^k` quad-Ts of depth `k`, each drawn at
/// scale `2^-k` as UL|UR over LL|LR.
struct Net {
    rows: usize,
}

impl Net {
    fn width(&self) -> f64 {
        9.0
    }

    fn height(&self) -> f64 {
        (0..self.rows).map(|k| 7.0 * 0.5f64.powi(k as i32)).sum()
    }

    fn place(&self, s: &Address, piece: PieceId, x: f64, y: f64) -> (f64, f64) {
        let k = s.len();
        let r = 0.5f64.powi(k as i32);
        let index = s.bits().iter().fold(0usize, |acc, &b| acc * 2 + b as usize) as f64;
        let row_y: f64 = (0..k).map(|j| 7.0 * 0.5f64.powi(j as i32)).sum();
        let dx = if matches!(piece, PieceId::UL | PieceId::LL) { 1.0 } else { 5.0 };
        (index * 9.0 * r + r * (x + dx), row_y + r * (y + 3.0))
    }
}

fn header(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}">"#,
        w * PX + 2.0 * MARGIN,
        h * PX + 2.0 * MARGIN,
        w * PX + 2.0 * MARGIN,
        h * PX + 2.0 * MARGIN
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
}

/// Plane point to SVG pixels, flipping y.
fn px(h: f64, p: (f64, f64)) -> (f64, f64) {
    (MARGIN + p.0 * PX, MARGIN + (h - p.1) * PX)
}

fn polyline(out: &mut String, pts: &[(f64, f64)], attrs: &str) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = writeln!(out, r#"<polyline points="{}" {attrs}/>"#, coords.join(" "));
}

fn addresses(n: usize) -> Vec<Address> {
    let mut out = vec![Address::root()];
    let mut level = vec![Address::root()];
    for _ in 0..n {
        level = level.iter().flat_map(|s| [s.child(0), s.child(1)]).collect();
        out.extend(level.iter().cloned());
    }
    out
}

/// Net of the charts of depth ≤ n; σ/γ edges in blue, labels up to depth 1.
pub fn render_net(n: usize, overlay: Option<&TraceRecord>) -> String {
    let net = Net { rows: n + 1 };
    let h = net.height();
    let mut out = String::new();
    header(&mut out, net.width(), h);
    for s in addresses(n) {
        for p in canonical_pieces() {
            for e in &p.edges {
                let a = px(h, net.place(&s, p.id, e.start.0 as f64, e.start.1 as f64));
                let b = px(h, net.place(&s, p.id, e.end.0 as f64, e.end.1 as f64));
                let color = if e.label.is_boundary() { "#1f5fbf" } else { "#444" };
                polyline(&mut out, &[a, b], &format!(r#"stroke="{color}" stroke-width="1" fill="none""#));
                if s.len() <= 1 {
                    let size = 11.0 * 0.5f64.powi(s.len() as i32);
                    let _ = writeln!(
                        out,
                        r#"<text x="{:.2}" y="{:.2}" font-size="{size:.1}" text-anchor="middle" fill="{color}">{}</text>"#,
                        (a.0 + b.0) / 2.0,
                        (a.1 + b.1) / 2.0,
                        e.label
                    );
                }
            }
        }
    }
    if let Some(tr) = overlay {
        for seg in tr.segments.iter().filter(|seg| seg.address.len() <= n) {
            let a = px(h, net.place(&seg.address, seg.piece, seg.entry[0].to_f64(), seg.entry[1].to_f64()));
            let b = px(h, net.place(&seg.address, seg.piece, seg.exit[0].to_f64(), seg.exit[1].to_f64()));
            polyline(&mut out, &[a, b], r##"stroke="#d62728" stroke-width="1.5" fill="none""##);
        }
    }
    out.push_str("</svg>\n");
    out
}

/// The table `T_n` with an optional billiard path.
pub fn render_table(n: usize, overlay: Option<&BilliardTrace>) -> String {
    let table = build_table(n);
    // T_n lies in [-1, 2] x [0, 3]
    let (w, h, x0) = (3.0, 3.0, -1.0);
    let shift = |p: (f64, f64)| (p.0 - x0, p.1);
    let mut out = String::new();
    header(&mut out, w, h);
    for t in &table.ts {
        for [a, b] in t.rects() {
            let (a, b) = (shift((a[0].to_f64(), a[1].to_f64())), shift((b[0].to_f64(), b[1].to_f64())));
            let pts = [(a.0, a.1), (b.0, a.1), (b.0, b.1), (a.0, b.1), (a.0, a.1)].map(|p| px(h, p));
            polyline(&mut out, &pts, r##"stroke="#444" stroke-width="1" fill="#f4f4f4""##);
        }
    }
    if let Some(b) = overlay {
        for seg in &b.segments {
            let a = px(h, shift((seg.start[0].to_f64(), seg.start[1].to_f64())));
            let c = px(h, shift((seg.end[0].to_f64(), seg.end[1].to_f64())));
            polyline(&mut out, &[a, c], r##"stroke="#d62728" stroke-width="1.5" fill="none""##);
        }
    }
    out.push_str("</svg>\n");
    out
}
