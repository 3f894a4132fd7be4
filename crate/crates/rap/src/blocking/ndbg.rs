use super::BlockingTable;
use crate::geom2d::{norm_angle, EPS_ANG, TAU};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellKind {
    /// A single arrangement vertex (an arc endpoint of some `D(p, q)`).
    Vertex,
    /// An open arc between consecutive arrangement vertices.
    Arc,
    /// The whole circle, when no pair blocks anywhere.
    Full,
}

/// One cell of the direction arrangement with its representative angle.
#[derive(Clone, Copy, Debug)]
pub struct Cell {
    pub kind: CellKind,
    pub start: f64,
    pub end: f64,
    pub representative: f64,
}

/// The arrangement of all blocked-arc endpoints on the circle of directions.
/// Within each cell the blocking relation (hence the DBG of any subassembly)
/// is constant; vertex cells capture grazing directions.
#[derive(Clone, Debug)]
pub struct Ndbg {
    endpoints: Vec<f64>,
    cells: Vec<Cell>,
}

impl Ndbg {
    pub fn endpoints(&self) -> &[f64] {
        &self.endpoints
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }
}

/// Collects arc endpoints from every ordered pair, dedupes them on the
/// angular grid, and builds alternating vertex/arc cells. With no endpoints
/// at all the arrangement is one Full cell with representative 0.
pub fn build_ndbg(t: &BlockingTable) -> Ndbg {
    let mut endpoints: Vec<f64> = Vec::new();
    let n = t.n();
    for p in 0..n {
        for q in 0..n {
            if p != q {
                endpoints.extend(t.entry(p, q).endpoint_angles());
            }
        }
    }
    endpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
    endpoints.dedup_by(|a, b| (*a - *b).abs() <= EPS_ANG * 0.5);
    // Wraparound dedupe: an endpoint at ~2*pi equals one at ~0.
    if endpoints.len() >= 2 {
        let first = endpoints[0];
        let last = *endpoints.last().unwrap();
        if (TAU - last + first).abs() <= EPS_ANG * 0.5 {
            endpoints.pop();
        }
    }
    if endpoints.is_empty() {
        return Ndbg {
            endpoints,
            cells: vec![Cell {
                kind: CellKind::Full,
                start: 0.0,
                end: TAU,
                representative: 0.0,
            }],
        };
    }
    let k = endpoints.len();
    let mut cells = Vec::with_capacity(2 * k);
    for i in 0..k {
        let a = endpoints[i];
        let b = endpoints[(i + 1) % k];
        cells.push(Cell {
            kind: CellKind::Vertex,
            start: a,
            end: a,
            representative: a,
        });
        let span = if k == 1 { TAU } else { norm_angle(b - a) };
        let span = if span == 0.0 { TAU } else { span };
        cells.push(Cell {
            kind: CellKind::Arc,
            start: a,
            end: b,
            representative: norm_angle(a + 0.5 * span),
        });
    }
    Ndbg { endpoints, cells }
}
