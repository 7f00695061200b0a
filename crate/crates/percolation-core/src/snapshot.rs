//! Environment snapshot files.
//!
//! Text format: one header line
//! `LRPENV 1 d=<d> s=<s> beta=<b> L=<L> nn=<0|1> norm=<2|inf> seed=<u64>`
//! (free-boundary environments append ` bnd=free`), then one line per long
//! edge, `x1 … xd  y1 … yd` with the two endpoint coordinate groups separated
//! by a double space, in lexicographic order. Floats use shortest round-trip
//! formatting, so save → load is bit-exact.

use std::io::{BufRead, Write};

use crate::env::Environment;
use crate::error::PercError;
use crate::lattice::unflatten;
use crate::params::{Boundary, ModelParams, Norm};

pub fn save_environment<W: Write>(env: &Environment, mut w: W) -> Result<(), PercError> {
    let p = &env.params;
    let norm = match p.norm {
        Norm::L2 => "2",
        Norm::Linf => "inf",
    };
    write!(
        w,
        "LRPENV 1 d={} s={} beta={} L={} nn={} norm={} seed={}",
        p.d,
        p.s,
        p.beta,
        p.l,
        if p.nn_prob_one { 1 } else { 0 },
        norm,
        env.seed
    )?;
    if p.boundary == Boundary::Free {
        write!(w, " bnd=free")?;
    }
    writeln!(w)?;
    let d = p.d;
    let mut cu = [0i64; 3];
    let mut cv = [0i64; 3];
    for (u, v) in env.long_edges() {
        unflatten(u, d, p.l, &mut cu[..d]);
        unflatten(v, d, p.l, &mut cv[..d]);
        let us: Vec<String> = cu[..d].iter().map(|c| c.to_string()).collect();
        let vs: Vec<String> = cv[..d].iter().map(|c| c.to_string()).collect();
        writeln!(w, "{}  {}", us.join(" "), vs.join(" "))?;
    }
    Ok(())
}

pub fn load_environment<R: BufRead>(r: R) -> Result<Environment, PercError> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| PercError::Parse("empty snapshot".into()))??;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("LRPENV") || tokens.next() != Some("1") {
        return Err(PercError::Parse("bad magic/version".into()));
    }
    let mut d = None;
    let mut s = None;
    let mut beta = None;
    let mut l = None;
    let mut nn = None;
    let mut norm = None;
    let mut seed = None;
    let mut boundary = Boundary::Torus;
    for tok in tokens {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| PercError::Parse(format!("bad header token {tok:?}")))?;
        let parse = |what: &str| PercError::Parse(format!("bad {what} value {v:?}"));
        match k {
            "d" => d = Some(v.parse::<usize>().map_err(|_| parse("d"))?),
            "s" => s = Some(v.parse::<f64>().map_err(|_| parse("s"))?),
            "beta" => beta = Some(v.parse::<f64>().map_err(|_| parse("beta"))?),
            "L" => l = Some(v.parse::<i64>().map_err(|_| parse("L"))?),
            "nn" => nn = Some(v == "1"),
            "norm" => {
                norm = Some(match v {
                    "2" => Norm::L2,
                    "inf" => Norm::Linf,
                    _ => return Err(parse("norm")),
                })
            }
            "seed" => seed = Some(v.parse::<u64>().map_err(|_| parse("seed"))?),
            "bnd" => {
                if v == "free" {
                    boundary = Boundary::Free;
                }
            }
            _ => return Err(PercError::Parse(format!("unknown header key {k:?}"))),
        }
    }
    let missing = |what: &str| PercError::Parse(format!("missing header key {what}"));
    let params = ModelParams {
        d: d.ok_or_else(|| missing("d"))?,
        s: s.ok_or_else(|| missing("s"))?,
        beta: beta.ok_or_else(|| missing("beta"))?,
        nn_prob_one: nn.ok_or_else(|| missing("nn"))?,
        l: l.ok_or_else(|| missing("L"))?,
        boundary,
        norm: norm.ok_or_else(|| missing("norm"))?,
    };
    let seed = seed.ok_or_else(|| missing("seed"))?;
    let d = params.d;
    let mut edges = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let nums: Vec<i64> = line
            .split_whitespace()
            .map(|t| t.parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| PercError::Parse(format!("bad edge line {line:?}")))?;
        if nums.len() != 2 * d {
            return Err(PercError::Parse(format!(
                "edge line has {} coordinates, want {}",
                nums.len(),
                2 * d
            )));
        }
        let u = crate::lattice::flatten(&nums[..d], params.l);
        let v = crate::lattice::flatten(&nums[d..], params.l);
        edges.push((u, v));
    }
    Environment::from_parts(params, seed, edges)
}
