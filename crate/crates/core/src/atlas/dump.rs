//! JSON dump of the chart geometry and gluings of one quad-T.

use serde::Serialize;

use super::gluing::GluingTable;
use super::pieces::{canonical_pieces, EdgeLabel, IPoint, PieceId};
use crate::address::Address;
use crate::error::Result;
use crate::rat::Rat;

#[derive(Clone, Debug, Serialize)]
pub struct EdgeDump {
    pub label: EdgeLabel,
    pub endpoints: [IPoint; 2],
    pub partner: PartnerDump,
    /// Offset `b` of the chart map `p ↦ scale·p + b` into the partner chart.
    pub translation: [Rat; 2],
    pub scale: Rat,
}

#[derive(Clone, Debug, Serialize)]
pub struct PartnerDump {
    pub address: Address,
    pub piece: PieceId,
    pub label: EdgeLabel,
}

#[derive(Clone, Debug, Serialize)]
pub struct PieceDump {
    pub piece: PieceId,
    pub vertices: Vec<IPoint>,
    pub edges: Vec<EdgeDump>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AtlasDump {
    pub address: Address,
    pub physical_scale: Rat,
    pub pieces: Vec<PieceDump>,
}

pub fn dump(table: &GluingTable, s: &Address) -> Result<AtlasDump> {
    let mut pieces = Vec::new();
    for p in canonical_pieces() {
        let mut edges = Vec::new();
        for (i, e) in p.edges.iter().enumerate() {
            let t = table.transition(s, p.id, i)?;
            let (bx, by) = t.apply(&Rat::zero(), &Rat::zero());
            edges.push(EdgeDump {
                label: e.label,
                endpoints: [e.start, e.end],
                partner: PartnerDump { address: t.to_address.clone(), piece: t.to_piece, label: t.to_label },
                translation: [bx, by],
                scale: t.factor.clone(),
            });
        }
        pieces.push(PieceDump { piece: p.id, vertices: p.vertices.to_vec(), edges });
    }
    Ok(AtlasDump { address: s.clone(), physical_scale: s.scale(), pieces })
}
