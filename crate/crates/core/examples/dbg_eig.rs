use spinlat_core::eigensolver::{lowest_eigenpairs_with, SolverConfig};
use spinlat_core::hamiltonian::{build, FieldParams};
use spinlat_core::lattice::ladder_on_circle;
use std::time::Instant;

fn main() {
    for n in [12usize, 16] {
        let g = ladder_on_circle(n).unwrap();
        let t0 = Instant::now();
        let mut warm: Option<Vec<f64>> = None;
        let mut best = (f64::INFINITY, 0.0);
        let mut total_mv = 0;
        let mut gamma = 3.0;
        while gamma > 0.35 {
            let h = build(&g, FieldParams::new(1.0, gamma).unwrap()).unwrap();
            let mut cfg = SolverConfig::new(1e-8, 7);
            cfg.warm_start = warm.take();
            let s = match lowest_eigenpairs_with(&h, 4, &cfg) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("FAIL N={n} gamma={gamma:.2}: {e}");
                    std::env::set_var("SPINLAT_EIG_DEBUG", "1");
                    let _ = lowest_eigenpairs_with(&h, 4, &cfg);
                    return;
                }
            };
            let d13 = s.eigenvalues[2] - s.eigenvalues[0];
            if d13 < best.0 {
                best = (d13, gamma);
            }
            warm = Some(s.eigenvectors[0].clone());
            total_mv += s.iterations;
            gamma -= 0.05;
        }
        println!(
            "N={n}: d13 min {:.6} at gamma={:.2}, total time {:?}, total mv {total_mv}",
            best.0, best.1, t0.elapsed()
        );
    }
}
