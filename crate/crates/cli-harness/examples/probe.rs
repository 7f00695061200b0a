use exploration::run_exploration;
use percolation_core::ModelParams;
use rayon::prelude::*;
use std::time::Instant;

fn main() {
    let params = ModelParams::new(1, 1.8, 1.0, 1 << 17);
    let q_grid = [0.25, 0.5, 0.75];
    let seeds: u64 = 40;
    for k in [8u32, 10, 12] {
        let t0 = Instant::now();
        let rho = (2f64.powf(k as f64 / 0.8).round() as u64).max(2);
        let ok: u64 = (0..seeds).into_par_iter().map(|e| {
            match run_exploration(&params, 1000 + e, k, 8, None, Some(rho), &q_grid) {
                Ok(r) => r.transcript.coupling_success() as u64,
                Err(err) => { eprintln!("seed {e} k {k}: {err}"); 0 }
            }
        }).sum();
        println!("k={k} rho={rho}: {ok}/{seeds} = {:.3} [{:?}]", ok as f64 / seeds as f64, t0.elapsed());
    }
}
