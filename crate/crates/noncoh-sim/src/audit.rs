//! JSON views of the core objects for audit and plotting: dispersion
//! matrices as sparse integer triples, constellations as labeled point
//! lists, and codebook reports.

use noncoh_core::alphabets::Constellation;
use noncoh_core::design_analysis::CodebookReport;
use noncoh_core::stcodes::{CodeKind, IntMat, STCode};
use serde_json::{json, Value};

/// Entry encoding for dispersion matrices: every entry lives in
/// {0, ±1, ±j}; zeros are omitted, ±1 map to ±1 and ±j map to ±2.
fn entry_code(re: i32, im: i32) -> Option<i64> {
    match (re, im) {
        (0, 0) => None,
        (r, 0) => Some(r as i64),
        (0, i) => Some(2 * i as i64),
        _ => unreachable!("dispersion entries are 0, ±1, or ±j"),
    }
}

fn int_mat_to_json(m: &IntMat) -> Value {
    let mut triples = Vec::new();
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let g = m.get(r, c);
            if let Some(v) = entry_code(g.re, g.im) {
                triples.push(json!([r, c, v]));
            }
        }
    }
    json!({ "rows": m.rows(), "cols": m.cols(), "triples": triples })
}

fn kind_name(kind: CodeKind) -> &'static str {
    match kind {
        CodeKind::Alamouti => "alamouti",
        CodeKind::Th4 => "th4",
        CodeKind::Mdc4 => "mdc4",
        CodeKind::Mdc8 => "mdc8",
    }
}

/// Serializes a block code: per-symbol real/imaginary dispersion matrices
/// as (row, col, value) triples with the encoding documented in the
/// output itself.
pub fn code_to_json(code: &STCode) -> Value {
    let k = code.symbols_per_block();
    json!({
        "kind": kind_name(code.kind()),
        "antennas": code.antennas(),
        "time_slots": code.time_slots(),
        "symbols_per_block": k,
        "normalization_p": code.p(),
        "entry_encoding": "triples [row, col, v]: v=±1 for ±1, v=±2 for ±j; zeros omitted",
        "u": (0..k).map(|i| int_mat_to_json(code.u(i))).collect::<Vec<_>>(),
        "q": (0..k).map(|i| int_mat_to_json(code.q(i))).collect::<Vec<_>>(),
    })
}

/// Serializes a constellation as points, labels, and construction
/// metadata.
pub fn constellation_to_json(c: &Constellation) -> Value {
    let meta = c.meta();
    json!({
        "size": c.size(),
        "bits_per_symbol": c.bits_per_symbol(),
        "avg_energy": c.avg_energy(),
        "points": c.points().iter().map(|p| json!([p.re, p.im])).collect::<Vec<_>>(),
        "labels": c.labels(),
        "ring_ratio": meta.ring_ratio,
        "rotation_deg": meta.rotation.map(f64::to_degrees),
        "re_levels": meta.re_levels,
        "im_levels": meta.im_levels,
        "radii": meta.radii,
    })
}

/// Serializes a pairwise-distance report.
pub fn report_to_json(r: &CodebookReport) -> Value {
    json!({
        "codebook_size": r.size,
        "min_rank": r.min_rank,
        "min_rank_pair": [r.min_rank_pair.0, r.min_rank_pair.1],
        "diversity_order": r.diversity_order,
        "coding_gain": r.coding_gain,
        "coding_gain_pair": [r.coding_gain_pair.0, r.coding_gain_pair.1],
        "min_distance_sq": r.diversity_sum,
        "min_distance_pair": [r.diversity_sum_pair.0, r.diversity_sum_pair.1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use noncoh_core::alphabets;
    use noncoh_core::cxmat::CMatrix;
    use noncoh_core::stcodes::make_code;
    use noncoh_core::Complex64;

    fn mat_from_json(v: &Value) -> CMatrix {
        let rows = v["rows"].as_u64().unwrap() as usize;
        let cols = v["cols"].as_u64().unwrap() as usize;
        let mut m = CMatrix::zeros(rows, cols);
        for t in v["triples"].as_array().unwrap() {
            let (r, c, code) = (
                t[0].as_u64().unwrap() as usize,
                t[1].as_u64().unwrap() as usize,
                t[2].as_i64().unwrap(),
            );
            let x = match code {
                1 => Complex64::new(1.0, 0.0),
                -1 => Complex64::new(-1.0, 0.0),
                2 => Complex64::new(0.0, 1.0),
                -2 => Complex64::new(0.0, -1.0),
                other => panic!("unexpected entry code {other}"),
            };
            m.set(r, c, x);
        }
        m
    }

    #[test]
    fn triples_reconstruct_every_dispersion_matrix() {
        for kind in [CodeKind::Alamouti, CodeKind::Th4, CodeKind::Mdc4, CodeKind::Mdc8] {
            let code = make_code(kind);
            let v = code_to_json(&code);
            for i in 0..code.symbols_per_block() {
                let u = mat_from_json(&v["u"][i]);
                let q = mat_from_json(&v["q"][i]);
                assert_eq!(u.max_abs_diff(&code.u(i).to_cmatrix()), 0.0);
                assert_eq!(q.max_abs_diff(&code.q(i).to_cmatrix()), 0.0);
            }
        }
    }

    #[test]
    fn constellation_json_carries_points_and_labels() {
        let c = alphabets::build(&alphabets::BuildSpec::Dapsk { q_p: 8, q_a: 2, a: 2.1 }).unwrap();
        let v = constellation_to_json(&c);
        assert_eq!(v["size"], 16);
        assert_eq!(v["points"].as_array().unwrap().len(), 16);
        assert_eq!(v["labels"].as_array().unwrap().len(), 16);
        assert!((v["avg_energy"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!((v["ring_ratio"].as_f64().unwrap() - 2.1).abs() < 1e-12);
    }
}
