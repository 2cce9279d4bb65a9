//! Linear-algebra stage: rank, pivot set, kernel basis, `q` on the kernel
//! basis, and one particular solution `z_a`.
//!
//! `q` restricted to `Ker(A)` is linear with values in `{0, 2}`, so the
//! condition `q(x) = 2 zᵀx (mod 4)` only needs to hold on a basis. `z_a`
//! is found by solving `kernel[j] · z = q(kernel[j]) / 2` over GF(2).

use serde::{Deserialize, Serialize};

use crate::error::{HlfError, Result};
use crate::gf2::{self, BitVector};
use crate::instance::HlfInstance;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaSummary {
    pub n: usize,
    pub rank: usize,
    /// 0-based, strictly increasing.
    pub pivots: Vec<usize>,
    pub kernel: Vec<BitVector>,
    /// `q(kernel[j])`, always 0 or 2.
    pub q_basis: Vec<u8>,
    pub z_a: BitVector,
}

#[derive(Serialize, Deserialize)]
struct ClaWire {
    r: usize,
    #[serde(rename = "P")]
    pivots: Vec<usize>,
    kernel: Vec<BitVector>,
    z_a: BitVector,
}

impl ClaSummary {
    /// `{"r", "P", "kernel", "z_a"}` with 1-based pivot positions.
    pub fn to_json(&self) -> String {
        let wire = ClaWire {
            r: self.rank,
            pivots: self.pivots.iter().map(|p| p + 1).collect(),
            kernel: self.kernel.clone(),
            z_a: self.z_a.clone(),
        };
        serde_json::to_string(&wire).expect("summary serializes")
    }

    /// Reads a summary back and re-derives `q_basis` from `inst`.
    pub fn from_json(text: &str, inst: &HlfInstance) -> Result<Self> {
        let wire: ClaWire =
            serde_json::from_str(text).map_err(|e| HlfError::Parse(e.to_string()))?;
        let n = inst.n();
        if wire.z_a.len() != n {
            return Err(HlfError::DimensionMismatch {
                expected: n,
                found: wire.z_a.len(),
            });
        }
        if wire.pivots.len() != wire.r || wire.kernel.len() + wire.r != n {
            return Err(HlfError::Parse(
                "rank, pivots and kernel sizes disagree".into(),
            ));
        }
        let pivots = wire
            .pivots
            .iter()
            .map(|&p| {
                if p == 0 || p > n {
                    Err(HlfError::IndexOutOfRange { index: p, len: n })
                } else {
                    Ok(p - 1)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let q_basis = wire
            .kernel
            .iter()
            .map(|v| gf2::quad_form_mod4(inst.matrix(), v))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            rank: wire.r,
            pivots,
            kernel: wire.kernel,
            q_basis,
            z_a: wire.z_a,
        })
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel.len()
    }
}

/// Runs the linear-algebra stage on `inst`.
pub fn run_cla(inst: &HlfInstance) -> Result<ClaSummary> {
    let a = inst.matrix();
    let n = inst.n();
    let elim = gf2::rank_and_pivots(a);
    let kernel = gf2::kernel_from_rref(&elim);
    let q_basis = kernel
        .iter()
        .map(|v| gf2::quad_form_mod4(a, v))
        .collect::<Result<Vec<_>>>()?;
    if q_basis.iter().any(|q| q % 2 == 1) {
        return Err(HlfError::OddQuadraticForm);
    }
    let rhs = BitVector::from_bools(&q_basis.iter().map(|&q| q == 2).collect::<Vec<_>>());
    let z_a = gf2::solve_affine(&kernel, &rhs, n)?.ok_or(HlfError::InconsistentSystem)?;
    Ok(ClaSummary {
        n,
        rank: elim.rank,
        pivots: elim.pivots,
        kernel,
        q_basis,
        z_a,
    })
}

/// Checks that `q` is additive mod 4 on every pair of kernel vectors and
/// takes only the values 0 and 2 on each of them.
pub fn verify_q_linearity(inst: &HlfInstance, kernel: &[BitVector]) -> bool {
    let a = inst.matrix();
    let Ok(q) = kernel
        .iter()
        .map(|v| gf2::quad_form_mod4(a, v))
        .collect::<Result<Vec<_>>>()
    else {
        return false;
    };
    if q.iter().any(|&v| v % 2 == 1) {
        return false;
    }
    for i in 0..kernel.len() {
        for j in i + 1..kernel.len() {
            let Ok(sum) = gf2::quad_form_mod4(a, &kernel[i].xor(&kernel[j])) else {
                return false;
            };
            if sum != (q[i] + q[j]) % 4 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn grid(side: usize, b: &str) -> HlfInstance {
        HlfInstance::grid(side, bv(b)).unwrap()
    }

    fn random_b(rng: &mut impl Rng, n: usize) -> BitVector {
        BitVector::from_bools(&(0..n).map(|_| rng.gen()).collect::<Vec<_>>())
    }

    /// Rank by greedily growing a column set, one column at a time, with a
    /// separate insertion-basis representation (leading-bit reduction).
    fn greedy_column_rank(inst: &HlfInstance) -> usize {
        let n = inst.n();
        let mut basis: Vec<(usize, BitVector)> = Vec::new();
        for j in 0..n {
            let mut c = inst.matrix().column(j);
            for (lead, b) in &basis {
                if c.get(*lead) {
                    c.xor_assign(b);
                }
            }
            let lead = c.ones_iter().next();
            if let Some(lead) = lead {
                for (_, b) in basis.iter_mut() {
                    if b.get(lead) {
                        b.xor_assign(&c);
                    }
                }
                basis.push((lead, c));
            }
        }
        basis.len()
    }

    #[test]
    fn grid_2x2_zero_diagonal() {
        let cla = run_cla(&grid(2, "0000")).unwrap();
        assert_eq!(cla.rank, 2);
        assert_eq!(cla.pivots, vec![0, 1]);
        assert_eq!(cla.z_a, bv("0000"));
        for (v, &q) in cla.kernel.iter().zip(&cla.q_basis) {
            assert_eq!((2 * cla.z_a.dot(v) as u8) % 4, q);
        }
    }

    #[test]
    fn grid_2x2_full_rank() {
        let cla = run_cla(&grid(2, "1111")).unwrap();
        assert_eq!(cla.rank, 4);
        assert!(cla.kernel.is_empty());
        assert_eq!(cla.z_a, bv("0000"));
    }

    #[test]
    fn grid_4x4_rank() {
        assert_eq!(run_cla(&grid(4, &"0".repeat(16))).unwrap().rank, 12);
    }

    #[test]
    fn q_linearity_examples() {
        let inst = grid(2, "0000");
        let kernel = vec![bv("1001"), bv("0110")];
        assert_eq!(gf2::quad_form_mod4(inst.matrix(), &bv("1111")).unwrap(), 0);
        assert!(verify_q_linearity(&inst, &kernel));
        assert!(verify_q_linearity(&inst, &[]));
    }

    #[test]
    fn q_linearity_on_random_grids() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for side in 1..=5 {
            for _ in 0..40 {
                let inst = HlfInstance::grid(side, random_b(&mut rng, side * side)).unwrap();
                let cla = run_cla(&inst).unwrap();
                assert!(verify_q_linearity(&inst, &cla.kernel), "{inst:?}");
            }
        }
    }

    #[test]
    fn z_a_solves_the_full_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let side = rng.gen_range(1..=6);
            let inst = HlfInstance::grid(side, random_b(&mut rng, side * side)).unwrap();
            let cla = run_cla(&inst).unwrap();
            assert_eq!(cla.rank, greedy_column_rank(&inst));
            let dim = cla.kernel_dim();
            assert!(dim <= 20);
            // walk the whole span
            let mut x = BitVector::zeros(inst.n());
            for t in 0u64..(1 << dim) {
                if t > 0 {
                    x.xor_assign(&cla.kernel[t.trailing_zeros() as usize]);
                }
                let q = gf2::quad_form_mod4(inst.matrix(), &x).unwrap();
                assert!(q == 0 || q == 2);
                assert_eq!(q, 2 * cla.z_a.dot(&x) as u8);
            }
        }
    }

    #[test]
    fn general_instances_rank_cross_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let n = rng.gen_range(1..=30);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(0.2) {
                        edges.push((i, j));
                    }
                }
            }
            let inst = HlfInstance::from_edges(n, &edges, random_b(&mut rng, n)).unwrap();
            let cla = run_cla(&inst).unwrap();
            assert_eq!(cla.rank, greedy_column_rank(&inst));
            for v in &cla.kernel {
                assert!(gf2::mat_vec(inst.matrix(), v).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn json_round_trip_and_determinism() {
        let inst = grid(3, "000000001");
        let a = run_cla(&inst).unwrap();
        let b = run_cla(&inst).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let json = a.to_json();
        assert!(json.contains("\"r\":7"));
        assert_eq!(ClaSummary::from_json(&json, &inst).unwrap(), a);
        assert!(ClaSummary::from_json(&json, &grid(2, "0000")).is_err());
    }
}
