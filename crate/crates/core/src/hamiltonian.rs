//! Matrix-free Hamiltonian
//!
//!   H = sum_<i,j> sigma^z_i sigma^z_j + B sum_i sigma^z_i + Gamma sum_i sigma^x_i
//!
//! on the 2^N computational basis. Bit i of a basis index is spin i, with
//! bit 0 meaning z = +1 and bit 1 meaning z = -1. The ZZ and B terms form a
//! precomputed diagonal; the Gamma term couples `s` to `s ^ (1 << i)`.

use crate::error::{Error, Result};
use crate::lattice::Graph;
use rayon::prelude::*;

/// Longitudinal (B) and transverse (Gamma) field strengths; the coupling is
/// fixed to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    pub b: f64,
    pub gamma: f64,
}

impl FieldParams {
    pub fn new(b: f64, gamma: f64) -> Result<Self> {
        if !b.is_finite() || !gamma.is_finite() {
            return Err(Error::invalid("field parameters must be finite"));
        }
        Ok(FieldParams { b, gamma })
    }
}

/// Memory budget: diagonals beyond 2^24 need an explicit override.
pub const SPIN_BUDGET: usize = 24;

pub struct HamiltonianOperator {
    graph: Graph,
    params: FieldParams,
    diag: Vec<f64>,
}

/// Build the operator for `g` at fields `p` (budget `n <= SPIN_BUDGET`).
pub fn build(g: &Graph, p: FieldParams) -> Result<HamiltonianOperator> {
    build_with_budget(g, p, SPIN_BUDGET)
}

pub fn build_with_budget(g: &Graph, p: FieldParams, max_spins: usize) -> Result<HamiltonianOperator> {
    let n = g.n();
    if n > max_spins {
        return Err(Error::budget(format!(
            "n={n} spins exceeds budget {max_spins} (2^{n} diagonal)"
        )));
    }
    if n >= usize::BITS as usize {
        return Err(Error::budget(format!("n={n} exceeds the address space")));
    }
    let dim = 1usize << n;
    let edge_masks: Vec<usize> = g
        .edges()
        .iter()
        .map(|&(a, b)| (1usize << a) | (1usize << b))
        .collect();
    let nf = n as f64;
    let ef = g.num_edges() as f64;
    let mut diag = vec![0.0f64; dim];
    diag.par_chunks_mut(1 << 14).enumerate().for_each(|(c, chunk)| {
        let base = c << 14;
        for (off, d) in chunk.iter_mut().enumerate() {
            let s = base + off;
            let mut opposite = 0u32;
            for &m in &edge_masks {
                opposite += u32::from((s & m).count_ones() == 1);
            }
            // sum_edges z_i z_j = E - 2 * (#opposite)
            let zz = ef - 2.0 * opposite as f64;
            // sum_i z_i = N - 2 * popcount
            let mag = nf - 2.0 * (s as u64).count_ones() as f64;
            *d = zz + p.b * mag;
        }
    });
    Ok(HamiltonianOperator {
        graph: g.clone(),
        params: p,
        diag,
    })
}

impl HamiltonianOperator {
    pub fn spins(&self) -> usize {
        self.graph.n()
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn params(&self) -> FieldParams {
        self.params
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// `|spectrum| <= 3N/2 + |B| N + |Gamma| N`.
    pub fn spectral_bound(&self) -> f64 {
        let n = self.spins() as f64;
        self.graph.num_edges() as f64 + self.params.b.abs() * n + self.params.gamma.abs() * n
    }

    /// y = H x.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y)?;
        Ok(y)
    }

    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.dim() || y.len() != self.dim() {
            return Err(Error::invalid(format!(
                "state vector length {} does not match dim {}",
                x.len(),
                self.dim()
            )));
        }
        let n = self.spins();
        let gamma = self.params.gamma;
        let diag = &self.diag;
        let work = |base: usize, chunk: &mut [f64]| {
            for (off, out) in chunk.iter_mut().enumerate() {
                let s = base + off;
                let mut acc = diag[s] * x[s];
                if gamma != 0.0 {
                    let mut flip = 0.0;
                    for i in 0..n {
                        flip += x[s ^ (1usize << i)];
                    }
                    acc += gamma * flip;
                }
                *out = acc;
            }
        };
        if self.dim() >= 1 << 12 {
            y.par_chunks_mut(1 << 12)
                .enumerate()
                .for_each(|(c, chunk)| work(c << 12, chunk));
        } else {
            work(0, y);
        }
        Ok(())
    }
}

/// Derivative of the Hamiltonian along a schedule path:
/// dH/ds = db * sum_i sigma^z_i + dgamma * sum_i sigma^x_i.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleDerivative {
    pub db: f64,
    pub dgamma: f64,
}

impl ScheduleDerivative {
    pub fn new(db: f64, dgamma: f64) -> Result<Self> {
        if !db.is_finite() || !dgamma.is_finite() {
            return Err(Error::invalid("schedule derivative must be finite"));
        }
        Ok(ScheduleDerivative { db, dgamma })
    }
}

/// y = (dH/ds) x on `n_spins` spins.
pub fn apply_derivative(d: &ScheduleDerivative, n_spins: usize, x: &[f64]) -> Result<Vec<f64>> {
    let dim = 1usize << n_spins;
    if x.len() != dim {
        return Err(Error::invalid(format!(
            "state vector length {} does not match 2^{n_spins}",
            x.len()
        )));
    }
    let nf = n_spins as f64;
    let mut y = vec![0.0; dim];
    let work = |base: usize, chunk: &mut [f64]| {
        for (off, out) in chunk.iter_mut().enumerate() {
            let s = base + off;
            let mag = nf - 2.0 * (s as u64).count_ones() as f64;
            let mut acc = d.db * mag * x[s];
            if d.dgamma != 0.0 {
                let mut flip = 0.0;
                for i in 0..n_spins {
                    flip += x[s ^ (1usize << i)];
                }
                acc += d.dgamma * flip;
            }
            *out = acc;
        }
    };
    if dim >= 1 << 12 {
        y.par_chunks_mut(1 << 12)
            .enumerate()
            .for_each(|(c, chunk)| work(c << 12, chunk));
    } else {
        work(0, &mut y);
    }
    Ok(y)
}

/// Dense materialization for oracle tests (n <= 12).
pub fn dense_matrix(h: &HamiltonianOperator) -> Result<Vec<f64>> {
    let n = h.spins();
    if n > 12 {
        return Err(Error::budget(format!(
            "dense materialization limited to n <= 12, got {n}"
        )));
    }
    let dim = h.dim();
    let mut a = vec![0.0; dim * dim];
    for s in 0..dim {
        a[s * dim + s] = h.diag[s];
        for i in 0..n {
            let t = s ^ (1usize << i);
            a[s * dim + t] += h.params.gamma;
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{classical_ground, ladder_on_circle, Graph};
    use crate::linalg::par_dot;
    use rand::Rng;
    use rand::SeedableRng;

    fn random_state(dim: usize, seed: u64) -> Vec<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn diag_single_edge() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let h = build(&g, FieldParams::new(0.0, 0.0).unwrap()).unwrap();
        assert_eq!(h.diag(), &[1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn diag_field_only() {
        let g = Graph::new(3, Vec::<(usize, usize)>::new()).unwrap();
        let h = build(&g, FieldParams::new(1.0, 0.0).unwrap()).unwrap();
        assert_eq!(h.diag(), &[3.0, 1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -3.0]);
    }

    #[test]
    fn min_diag_is_classical_ground() {
        let g = ladder_on_circle(16).unwrap();
        let h = build(&g, FieldParams::new(1.0, 0.0).unwrap()).unwrap();
        let min = h.diag().iter().cloned().fold(f64::INFINITY, f64::min);
        let (e0, _) = classical_ground(&g, 1.0).unwrap();
        assert_eq!(min, e0);
    }

    #[test]
    fn apply_gamma_zero_is_elementwise() {
        let g = ladder_on_circle(8).unwrap();
        let h = build(&g, FieldParams::new(0.7, 0.0).unwrap()).unwrap();
        let x = random_state(h.dim(), 3);
        let y = h.apply(&x).unwrap();
        for s in 0..h.dim() {
            assert_eq!(y[s], h.diag()[s] * x[s]);
        }
    }

    #[test]
    fn uniform_state_is_sigma_x_eigenstate() {
        let g = Graph::new(4, Vec::<(usize, usize)>::new()).unwrap();
        let gamma = 0.9;
        let h = build(&g, FieldParams::new(0.0, gamma).unwrap()).unwrap();
        let x = vec![0.25; 16];
        let y = h.apply(&x).unwrap();
        for s in 0..16 {
            assert!((y[s] - 4.0 * gamma * x[s]).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_dense_oracle() {
        let g = ladder_on_circle(8).unwrap();
        for (seed, (b, gamma)) in [(0.3, 1.1), (1.0, 0.0), (-0.5, 2.0)].into_iter().enumerate() {
            let h = build(&g, FieldParams::new(b, gamma).unwrap()).unwrap();
            let a = dense_matrix(&h).unwrap();
            let dim = h.dim();
            let x = random_state(dim, seed as u64);
            let y = h.apply(&x).unwrap();
            for s in 0..dim {
                let want: f64 = (0..dim).map(|t| a[s * dim + t] * x[t]).sum();
                assert!((y[s] - want).abs() <= 1e-12, "s={s}");
            }
        }
    }

    #[test]
    fn derivative_matches_dense_and_identities() {
        let n = 6;
        let dim = 1 << n;
        let x = random_state(dim, 9);
        // db only on |0...0>
        let d = ScheduleDerivative::new(1.0, 0.0).unwrap();
        let mut basis0 = vec![0.0; dim];
        basis0[0] = 1.0;
        let y = apply_derivative(&d, n, &basis0).unwrap();
        assert_eq!(y[0], n as f64);
        assert!(y[1..].iter().all(|&v| v == 0.0));
        // dgamma equals a zero-edge hamiltonian with B=0, Gamma=1
        let d = ScheduleDerivative::new(0.0, 1.0).unwrap();
        let g = Graph::new(n, Vec::<(usize, usize)>::new()).unwrap();
        let h = build(&g, FieldParams::new(0.0, 1.0).unwrap()).unwrap();
        let ya = apply_derivative(&d, n, &x).unwrap();
        let yb = h.apply(&x).unwrap();
        assert_eq!(ya, yb);
    }

    #[test]
    fn hermitian_inner_products() {
        let g = ladder_on_circle(10).unwrap();
        let h = build(&g, FieldParams::new(0.8, 1.3).unwrap()).unwrap();
        let x = random_state(h.dim(), 4);
        let y = random_state(h.dim(), 5);
        let hx = h.apply(&x).unwrap();
        let hy = h.apply(&y).unwrap();
        let a = par_dot(&x, &hy);
        let b = par_dot(&hx, &y);
        let scale = par_dot(&x, &x).sqrt() * par_dot(&y, &y).sqrt();
        assert!((a - b).abs() <= 1e-10 * scale);
    }

    #[test]
    fn z2_parity_exact_at_b_zero() {
        let g = ladder_on_circle(8).unwrap();
        let h = build(&g, FieldParams::new(0.0, 1.7).unwrap()).unwrap();
        let dim = h.dim();
        let x = random_state(dim, 6);
        let mask = dim - 1;
        let px: Vec<f64> = (0..dim).map(|s| x[s ^ mask]).collect();
        let h_px = h.apply(&px).unwrap();
        let hx = h.apply(&x).unwrap();
        let p_hx: Vec<f64> = (0..dim).map(|s| hx[s ^ mask]).collect();
        assert_eq!(h_px, p_hx); // bitwise: the term order is permuted identically
    }

    #[test]
    fn linearity() {
        let g = ladder_on_circle(8).unwrap();
        let h = build(&g, FieldParams::new(0.4, 0.9).unwrap()).unwrap();
        let x = random_state(h.dim(), 7);
        let y = random_state(h.dim(), 8);
        let (a, b) = (0.37, -1.21);
        let combo: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| a * xi + b * yi).collect();
        let lhs = h.apply(&combo).unwrap();
        let hx = h.apply(&x).unwrap();
        let hy = h.apply(&y).unwrap();
        for s in 0..h.dim() {
            let rhs = a * hx[s] + b * hy[s];
            assert!((lhs[s] - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn budget_enforced() {
        let g = ladder_on_circle(8).unwrap();
        assert!(build_with_budget(&g, FieldParams::new(0.0, 0.0).unwrap(), 6).is_err());
    }

    #[test]
    fn spectral_bound_contains_diag() {
        let g = ladder_on_circle(12).unwrap();
        let h = build(&g, FieldParams::new(1.5, 2.5).unwrap()).unwrap();
        let bound = h.spectral_bound();
        for &d in h.diag() {
            assert!(d.abs() <= bound);
        }
    }
}
