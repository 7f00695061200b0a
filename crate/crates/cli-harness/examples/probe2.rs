use exploration::run_exploration;
use percolation_core::ModelParams;
use rayon::prelude::*;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let l: u64 = args[1].parse().unwrap();
    let k: u32 = args[2].parse().unwrap();
    let rho: u64 = args[3].parse().unwrap();
    let seeds: u64 = args[4].parse().unwrap();
    let walks: u64 = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(8);
    let params = ModelParams::new(1, 1.8, 1.0, l as i64);
    let q_grid = [0.25, 0.5, 0.75];
    let t0 = Instant::now();
    let (ok, bsum) = (0..seeds).into_par_iter().map(|e| {
        match run_exploration(&params, 3000 + e, k, walks, None, Some(rho), &q_grid) {
            Ok(r) => (r.transcript.coupling_success() as u64, r.transcript.b_counts),
            Err(err) => { eprintln!("seed {e}: {err}"); (0, [0;7]) }
        }
    }).reduce(|| (0, [0u64;7]), |a, b| {
        let mut c = a.1; for i in 0..7 { c[i] += b.1[i]; }
        (a.0 + b.0, c)
    });
    println!("L={l} k={k} rho={rho} walks={walks}: {ok}/{seeds} b={:?} [{:?}]", &bsum[1..], t0.elapsed());
}
