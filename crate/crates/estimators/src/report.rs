//! Uniform report envelopes for estimator output.

use serde::Serialize;
use serde_json::{json, Value};

/// Wraps an estimator's result in the common report envelope: inputs, seed,
/// the estimate payload, and an optional pass/fail verdict against the
/// configured tolerance.
pub fn estimator_report<T: Serialize>(
    name: &str,
    inputs: Value,
    seed: Option<u64>,
    estimate: &T,
    pass: Option<bool>,
) -> Value {
    json!({
        "estimator": name,
        "inputs": inputs,
        "seed": seed,
        "estimate": serde_json::to_value(estimate).expect("serializable estimate"),
        "pass": pass,
    })
}

/// CSV companion for (x, y) series plots.
pub fn series_csv<W: std::io::Write>(
    w: W,
    header: (&str, &str),
    series: impl IntoIterator<Item = (f64, f64)>,
) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([header.0, header.1])?;
    for (x, y) in series {
        wtr.write_record([x.to_string(), y.to_string()])?;
    }
    wtr.flush()?;
    Ok(())
}
