use spinlat_core::eigensolver::{lowest_eigenpairs_with, dense_eigenvalues, SolverConfig};
use spinlat_core::hamiltonian::{build, FieldParams};
use spinlat_core::lattice::ladder_on_circle;

fn main() {
    let g = ladder_on_circle(12).unwrap();
    let h = build(&g, FieldParams::new(1.0, 0.6).unwrap()).unwrap();
    let cfg = SolverConfig::new(1e-10, 7);
    std::env::set_var("SPINLAT_EIG_DEBUG", "1");
    let r = lowest_eigenpairs_with(&h, 4, &cfg);
    eprintln!("result: {:?}", r.map(|s| s.eigenvalues));
    let d = dense_eigenvalues(&h).unwrap();
    eprintln!("dense: {:?}", &d[..6]);
}
