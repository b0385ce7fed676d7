//! Ground-state observables: reduced density matrices, entanglement entropy,
//! Schmidt rank, majorization cumulants, and the adiabatic matrix-element
//! ratio.
//!
//! Bit convention matches the Hamiltonian: bit i of a basis index is spin i.
//! For a block A, the kept bits pack in ascending vertex order into the row
//! index of the reduced matrix; the complement packs likewise into the
//! traced index.

use crate::error::{Error, Result};
use crate::eigensolver::{degeneracy_tolerance, SpectrumResult};
use crate::hamiltonian::{apply_derivative, HamiltonianOperator, ScheduleDerivative};
use crate::linalg::{par_dot, sym_eigen};
use rayon::prelude::*;

/// Reduced density matrix on a vertex block: real symmetric, unit trace.
#[derive(Debug, Clone)]
pub struct ReducedDensityMatrix {
    block: Vec<usize>,
    dim: usize,
    mat: Vec<f64>,
}

impl ReducedDensityMatrix {
    pub fn block(&self) -> &[usize] {
        &self.block
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.mat[i * self.dim + j]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.mat
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = sym_eigen(&self.mat, self.dim, false)?;
        let mut v = eig.values;
        v.reverse();
        Ok(v)
    }

    /// Trace and symmetry diagnostics for validation.
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }
}

/// Partial trace of `|psi><psi|` keeping the given block.
///
/// `rho[a, a'] = sum_b psi[(a,b)] psi[(a',b)]` with `(a, b)` interleaving
/// block bits and complement bits into the full basis index.
pub fn reduced_density(psi: &[f64], block: &[usize], n: usize) -> Result<ReducedDensityMatrix> {
    if psi.len() != 1usize << n {
        return Err(Error::invalid(format!(
            "state length {} does not match 2^{n}",
            psi.len()
        )));
    }
    let norm = par_dot(psi, psi).sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::invalid(format!("state norm {norm} is not 1")));
    }
    let mut block = block.to_vec();
    block.sort_unstable();
    block.dedup();
    if block.is_empty() || block.len() >= n {
        return Err(Error::invalid(
            "block must be a non-empty proper subset of the vertices",
        ));
    }
    if *block.last().unwrap() >= n {
        return Err(Error::invalid("block vertex out of range"));
    }
    let comp: Vec<usize> = (0..n).filter(|v| !block.contains(v)).collect();
    let ka = block.len();
    let kb = comp.len();
    let da = 1usize << ka;
    let db = 1usize << kb;

    // gather psi into an (a, b)-indexed matrix, then rho = M M^T
    let mut m = vec![0.0f64; da * db];
    m.par_chunks_mut(db).enumerate().for_each(|(a, row)| {
        let mut sa = 0usize;
        for (bit, &v) in block.iter().enumerate() {
            if (a >> bit) & 1 == 1 {
                sa |= 1 << v;
            }
        }
        for (b, out) in row.iter_mut().enumerate() {
            let mut s = sa;
            for (bit, &v) in comp.iter().enumerate() {
                if (b >> bit) & 1 == 1 {
                    s |= 1 << v;
                }
            }
            *out = psi[s];
        }
    });
    let mut rho = vec![0.0f64; da * da];
    rho.par_chunks_mut(da).enumerate().for_each(|(i, row)| {
        let mi = &m[i * db..(i + 1) * db];
        for (j, out) in row.iter_mut().enumerate() {
            let mj = &m[j * db..(j + 1) * db];
            *out = mi.iter().zip(mj).map(|(x, y)| x * y).sum();
        }
    });
    Ok(ReducedDensityMatrix {
        block,
        dim: da,
        mat: rho,
    })
}

/// Von Neumann entropy in bits; tiny negative eigenvalues in
/// `[-1e-10, 0)` clamp to zero.
pub fn entropy(rho: &ReducedDensityMatrix) -> Result<f64> {
    let mut s = 0.0f64;
    for lam in rho.eigenvalues()? {
        if lam < -1e-10 {
            return Err(Error::NumericalValidity(format!(
                "density-matrix eigenvalue {lam} below -1e-10"
            )));
        }
        if lam > 0.0 {
            s -= lam * lam.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Number of eigenvalues above `tol`.
pub fn schmidt_rank(rho: &ReducedDensityMatrix, tol: f64) -> Result<usize> {
    if tol <= 0.0 {
        return Err(Error::invalid("schmidt_rank tolerance must be positive"));
    }
    Ok(rho.eigenvalues()?.into_iter().filter(|&l| l > tol).count())
}

pub const SCHMIDT_RANK_TOL: f64 = 1e-10;

/// Majorization cumulants: partial sums of a probability vector sorted
/// descending. Non-decreasing with non-increasing increments, `c_m <= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantSeries {
    values: Vec<f64>,
}

impl CumulantSeries {
    fn from_sorted_probs(top: &[f64]) -> Self {
        let mut c = Vec::with_capacity(top.len());
        let mut acc = 0.0;
        for &p in top {
            acc += p;
            c.push(acc);
        }
        CumulantSeries { values: c }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// First `m` cumulants of the ground-state probabilities in the z-basis,
/// by partial top-m selection (no full sort).
pub fn ground_cumulants(psi: &[f64], m: usize) -> Result<CumulantSeries> {
    let norm = par_dot(psi, psi).sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::invalid(format!("state norm {norm} is not 1")));
    }
    if m == 0 || m > psi.len() {
        return Err(Error::invalid(format!(
            "cumulant count {m} outside 1..={}",
            psi.len()
        )));
    }
    // min-heap of the m largest probabilities
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let mut heap: BinaryHeap<Reverse<OrdF64>> = BinaryHeap::with_capacity(m + 1);
    for &x in psi {
        let p = x * x;
        if heap.len() < m {
            heap.push(Reverse(OrdF64(p)));
        } else if p > heap.peek().unwrap().0 .0 {
            heap.pop();
            heap.push(Reverse(OrdF64(p)));
        }
    }
    let mut top: Vec<f64> = heap.into_iter().map(|r| r.0 .0).collect();
    top.sort_by(|a, b| b.total_cmp(a));
    Ok(CumulantSeries::from_sorted_probs(&top))
}

#[derive(PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// First `m` cumulants of the descending eigenvalues of `rho`.
pub fn rho_cumulants(rho: &ReducedDensityMatrix, m: usize) -> Result<CumulantSeries> {
    if m == 0 || m > rho.dim() {
        return Err(Error::invalid(format!(
            "cumulant count {m} outside 1..={}",
            rho.dim()
        )));
    }
    let evs = rho.eigenvalues()?;
    let top: Vec<f64> = evs.into_iter().take(m).map(|l| l.max(0.0)).collect();
    Ok(CumulantSeries::from_sorted_probs(&top))
}

/// `|<e_target| dH/ds |e_1>|`, the adiabatic-condition numerator.
/// `target` indexes eigenstates from 1 (the ground state).
pub fn adiabatic_numerator(
    d: &ScheduleDerivative,
    n_spins: usize,
    s: &SpectrumResult,
    target: usize,
) -> Result<f64> {
    if target < 1 || target > s.eigenvalues.len() {
        return Err(Error::invalid(format!(
            "target {target} outside 1..={}",
            s.eigenvalues.len()
        )));
    }
    let dh_ground = apply_derivative(d, n_spins, &s.eigenvectors[0])?;
    Ok(par_dot(&s.eigenvectors[target - 1], &dh_ground).abs())
}

/// Adiabatic ratio `|<e_target| dH/ds |e_1>| / (E_target - E_1)^2`.
/// Undefined (errors) when the gap is inside the degeneracy tolerance.
pub fn adiabatic_ratio(
    h: &HamiltonianOperator,
    d: &ScheduleDerivative,
    s: &SpectrumResult,
    target: usize,
) -> Result<f64> {
    if target < 2 || target > s.eigenvalues.len() {
        return Err(Error::invalid(format!(
            "target {target} outside 2..={}",
            s.eigenvalues.len()
        )));
    }
    let gap = s.eigenvalues[target - 1] - s.eigenvalues[0];
    if gap <= degeneracy_tolerance(s.eigenvalues[0]) {
        return Err(Error::DegenerateGap { gap });
    }
    let num = adiabatic_numerator(d, h.spins(), s, target)?;
    Ok(num / (gap * gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn normalized(mut v: Vec<f64>) -> Vec<f64> {
        let n = par_dot(&v, &v).sqrt();
        for x in &mut v {
            *x /= n;
        }
        v
    }

    fn random_state(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        normalized((0..1usize << n).map(|_| rng.gen_range(-1.0..1.0)).collect())
    }

    fn ghz(n: usize) -> Vec<f64> {
        let mut v = vec![0.0; 1 << n];
        let r = 0.5f64.sqrt();
        v[0] = r;
        v[(1 << n) - 1] = r;
        v
    }

    #[test]
    fn product_state_rank_one() {
        let n = 5;
        let mut psi = vec![0.0; 1 << n];
        psi[0] = 1.0;
        for block in [vec![0], vec![1, 3], vec![0, 2, 4]] {
            let rho = reduced_density(&psi, &block, n).unwrap();
            assert!((rho.trace() - 1.0).abs() < 1e-12);
            assert_eq!(entropy(&rho).unwrap(), 0.0);
            assert_eq!(schmidt_rank(&rho, SCHMIDT_RANK_TOL).unwrap(), 1);
        }
    }

    #[test]
    fn ghz_half_block() {
        let n = 6;
        let psi = ghz(n);
        let rho = reduced_density(&psi, &[0, 1, 2], n).unwrap();
        // diagonal 1/2 on |000> and |111>
        assert!((rho.entry(0, 0) - 0.5).abs() < 1e-12);
        assert!((rho.entry(7, 7) - 0.5).abs() < 1e-12);
        assert!((entropy(&rho).unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(schmidt_rank(&rho, SCHMIDT_RANK_TOL).unwrap(), 2);
        let c = rho_cumulants(&rho, 2).unwrap();
        assert!((c.values()[0] - 0.5).abs() < 1e-12);
        assert!((c.values()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_brute_force_oracle() {
        // rho[a,a'] from the full outer product, summing over every pair of
        // basis states that agree on the complement
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [4usize, 6, 8] {
            for trial in 0..4 {
                let psi = random_state(n, 100 * n as u64 + trial);
                let size = rng.gen_range(1..n);
                let mut block: Vec<usize> = (0..n).collect();
                for _ in 0..(n - size) {
                    let i = rng.gen_range(0..block.len());
                    block.remove(i);
                }
                let rho = reduced_density(&psi, &block, n).unwrap();
                let da = 1usize << block.len();
                let comp: Vec<usize> = (0..n).filter(|v| !block.contains(v)).collect();
                let mut oracle = vec![0.0f64; da * da];
                for s in 0..1usize << n {
                    for t in 0..1usize << n {
                        // complement bits must agree
                        if comp.iter().any(|&v| (s >> v) & 1 != (t >> v) & 1) {
                            continue;
                        }
                        let mut a = 0usize;
                        let mut ap = 0usize;
                        for (bit, &v) in block.iter().enumerate() {
                            a |= ((s >> v) & 1) << bit;
                            ap |= ((t >> v) & 1) << bit;
                        }
                        oracle[a * da + ap] += psi[s] * psi[t];
                    }
                }
                for i in 0..da * da {
                    assert!(
                        (rho.matrix()[i] - oracle[i]).abs() <= 1e-12,
                        "n={n} trial={trial}"
                    );
                }
            }
        }
    }

    #[test]
    fn entropy_bounds_and_maximally_mixed() {
        // maximally mixed on k qubits out of a 2k GHZ-like pair state
        let k = 3;
        let n = 2 * k;
        // |psi> = 2^{-k/2} sum_a |a>|a> : tracing half gives I/2^k
        let mut psi = vec![0.0; 1 << n];
        let amp = (1.0 / (1u64 << k) as f64).sqrt();
        for a in 0..1usize << k {
            psi[a | (a << k)] = amp;
        }
        let rho = reduced_density(&psi, &[0, 1, 2], n).unwrap();
        let s = entropy(&rho).unwrap();
        assert!((s - k as f64).abs() < 1e-10);
        let c = rho_cumulants(&rho, 1 << k).unwrap();
        for (l, v) in c.values().iter().enumerate() {
            assert!((v - (l + 1) as f64 / (1 << k) as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn schmidt_symmetry_and_spectra_match() {
        for n in [4usize, 6, 8] {
            let psi = random_state(n, n as u64);
            let block: Vec<usize> = (0..n / 2).collect();
            let comp: Vec<usize> = (n / 2..n).collect();
            let ra = reduced_density(&psi, &block, n).unwrap();
            let rb = reduced_density(&psi, &comp, n).unwrap();
            let sa = entropy(&ra).unwrap();
            let sb = entropy(&rb).unwrap();
            assert!((sa - sb).abs() < 1e-8, "n={n}");
            let ea = ra.eigenvalues().unwrap();
            let eb = rb.eigenvalues().unwrap();
            for (x, y) in ea.iter().zip(eb.iter()) {
                assert!((x - y).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rejects_bad_blocks_and_norms() {
        let psi = random_state(4, 9);
        assert!(reduced_density(&psi, &[], 4).is_err());
        assert!(reduced_density(&psi, &[0, 1, 2, 3], 4).is_err());
        let mut bad = psi.clone();
        bad[0] += 0.5;
        assert!(reduced_density(&bad, &[0], 4).is_err());
        assert!(ground_cumulants(&bad, 3).is_err());
    }

    #[test]
    fn ground_cumulants_uniform_and_basis() {
        let n = 6;
        let dim = 1usize << n;
        let psi = vec![(1.0 / dim as f64).sqrt(); dim];
        let c = ground_cumulants(&psi, 5).unwrap();
        for (l, v) in c.values().iter().enumerate() {
            assert!((v - (l + 1) as f64 / dim as f64).abs() < 1e-12);
        }
        let mut basis = vec![0.0; dim];
        basis[17] = 1.0;
        let c = ground_cumulants(&basis, 1).unwrap();
        assert!((c.values()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ground_cumulants_match_full_sort_exactly() {
        for n in [6usize, 8, 10] {
            let psi = random_state(n, 7 * n as u64);
            let mut probs: Vec<f64> = psi.iter().map(|x| x * x).collect();
            probs.sort_by(|a, b| b.total_cmp(a));
            let mut acc = 0.0;
            let expect: Vec<f64> = probs.iter().take(5).map(|p| {
                acc += p;
                acc
            }).collect();
            let c = ground_cumulants(&psi, 5).unwrap();
            assert_eq!(c.values(), &expect[..], "n={n}");
        }
    }

    #[test]
    fn cumulants_invariant_under_relabeling() {
        use rand::seq::SliceRandom;
        let n = 8;
        let psi = random_state(n, 21);
        let c0 = ground_cumulants(&psi, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut perm: Vec<usize> = (0..1 << n).collect();
        perm.shuffle(&mut rng);
        let shuffled: Vec<f64> = perm.iter().map(|&i| psi[i]).collect();
        let c1 = ground_cumulants(&shuffled, 5).unwrap();
        assert_eq!(c0, c1);
    }

    #[test]
    fn cumulant_series_invariants() {
        for n in [6usize, 8] {
            let psi = random_state(n, 31 * n as u64);
            let c = ground_cumulants(&psi, 8).unwrap();
            let v = c.values();
            assert!(v.last().unwrap() <= &(1.0 + 1e-9));
            for w in v.windows(2) {
                assert!(w[1] >= w[0] - 1e-15); // non-decreasing
            }
            for w in v.windows(3) {
                // increments non-increasing (descending probabilities)
                assert!(w[2] - w[1] <= w[1] - w[0] + 1e-12);
            }
        }
    }

    #[test]
    fn adiabatic_zero_derivative() {
        use crate::eigensolver::lowest_eigenpairs;
        use crate::hamiltonian::{build, FieldParams};
        use crate::lattice::ladder_on_circle;
        let g = ladder_on_circle(8).unwrap();
        let h = build(&g, FieldParams::new(1.0, 2.5).unwrap()).unwrap();
        let s = lowest_eigenpairs(&h, 3, 1e-10, 1).unwrap();
        let d = ScheduleDerivative::new(0.0, 0.0).unwrap();
        let r = adiabatic_ratio(&h, &d, &s, 3).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn adiabatic_degenerate_gap_errors() {
        use crate::eigensolver::lowest_eigenpairs;
        use crate::hamiltonian::{build, FieldParams};
        use crate::lattice::Graph;
        // two decoupled spins at B=0: degenerate levels
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let h = build(&g, FieldParams::new(0.0, 0.0).unwrap()).unwrap();
        let s = lowest_eigenpairs(&h, 2, 1e-10, 1).unwrap();
        let d = ScheduleDerivative::new(0.0, -1.0).unwrap();
        assert!(matches!(
            adiabatic_ratio(&h, &d, &s, 2),
            Err(Error::DegenerateGap { .. })
        ));
    }
}
