//! Path persistence: columnar CSV plus a JSON metadata header.

use crate::path::WalkPath;
use serde_json::json;
use std::io::Write;

/// Writes `i,x1..xd,new,jump` rows (jump is empty for row 0).
pub fn dump_path_csv<W: Write>(path: &WalkPath, w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["i".to_string()];
    for c in 1..=path.d {
        header.push(format!("x{c}"));
    }
    header.push("new".into());
    header.push("jump".into());
    out.write_record(&header)?;
    for i in 0..=path.n() {
        let mut row = vec![i.to_string()];
        for &x in path.pos(i) {
            row.push(x.to_string());
        }
        row.push(if path.new_vertex[i] { "1" } else { "0" }.to_string());
        row.push(if i == 0 {
            String::new()
        } else {
            path.jumps[i - 1].to_string()
        });
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Metadata record for a dumped path; `params` is caller-supplied context
/// (model parameters, master seed) serialized alongside the walk identity.
pub fn path_metadata(path: &WalkPath, params: serde_json::Value) -> serde_json::Value {
    json!({
        "ell": path.ell,
        "stream_id": path.stream_id,
        "n": path.n(),
        "d": path.d,
        "start": path.start,
        "params": params,
    })
}
