//! Independent checks on the solver output.
//!
//! * a brute-force oracle that scans every candidate `z` against a kernel
//!   found by scanning every `x`;
//! * a dense statevector simulation of the graph-state circuit
//!   `H^n · Π S_i^{b_i} · Π CZ_ij · H^n |0…0⟩`, whose support is the
//!   solution set and whose nonzero amplitudes all have magnitude `2^{-r/2}`;
//! * the strict-dependence test on vertex subsets and the grid rank bounds.
//!
//! Gate conventions: `H = [[1, 1], [1, −1]]/√2`, `S = diag(1, i)`,
//! `CZ = diag(1, 1, 1, −1)`. Amplitude index bit `n − 1 − k` holds qubit
//! `k`, so the first character of a bit string is the most significant bit.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::cla::{run_cla, verify_q_linearity};
use crate::cpc::SolutionSpace;
use crate::error::{HlfError, Result};
use crate::gf2::{self, BitVector};
use crate::instance::HlfInstance;

/// Largest kernel dimension [`check_solution`] walks exhaustively.
pub const EXHAUSTIVE_KERNEL_DIM: usize = 24;
/// Largest `n` for the brute-force oracle.
pub const BRUTE_FORCE_MAX_N: usize = 20;
/// Largest `n` for the statevector oracle (16 MiB of amplitudes).
pub const STATEVECTOR_MAX_N: usize = 20;

const NORM_TOL: f64 = 1e-12;

/// True iff `2 (z · x) ≡ q(x) (mod 4)` for every `x` in `Ker(A)`.
///
/// The kernel span is walked exhaustively up to dimension
/// [`EXHAUSTIVE_KERNEL_DIM`]; beyond that only the basis is checked, which
/// is sound once `q` has been verified linear on the basis.
pub fn check_solution(inst: &HlfInstance, z: &BitVector) -> Result<bool> {
    let a = inst.matrix();
    if z.len() != inst.n() {
        return Err(HlfError::DimensionMismatch {
            expected: inst.n(),
            found: z.len(),
        });
    }
    let kernel = gf2::kernel_basis(a);
    let holds = |x: &BitVector| -> Result<bool> {
        let q = gf2::quad_form_mod4(a, x)?;
        Ok(q == 2 * z.dot(x) as u8)
    };
    if kernel.len() <= EXHAUSTIVE_KERNEL_DIM {
        let mut x = BitVector::zeros(inst.n());
        for t in 1u64..(1 << kernel.len()) {
            x.xor_assign(&kernel[t.trailing_zeros() as usize]);
            if !holds(&x)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    if !verify_q_linearity(inst, &kernel) {
        return Err(HlfError::KernelTooLarge { dim: kernel.len() });
    }
    for v in &kernel {
        if !holds(v)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every `z ∈ {0,1}^n` that satisfies the HLF condition, found by scanning
/// all candidates. Shares no code with the elimination path.
pub fn brute_force_solutions(inst: &HlfInstance) -> Result<BTreeSet<BitVector>> {
    let n = inst.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(HlfError::SizeCapExceeded {
            n,
            cap: BRUTE_FORCE_MAX_N,
            what: "brute-force",
        });
    }
    // bit k of a mask is vertex k
    let rows: Vec<u32> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| inst.matrix().get(i, j))
                .fold(0u32, |m, j| m | (1 << j))
        })
        .collect();
    let q_of = |x: u32| -> u32 {
        let mut total = 0u32;
        for (i, row) in rows.iter().enumerate() {
            for j in 0..n {
                if (row >> j) & 1 == 1 && (x >> i) & 1 == 1 && (x >> j) & 1 == 1 {
                    total += 1;
                }
            }
        }
        total % 4
    };
    let kernel: Vec<(u32, u32)> = (0u32..1 << n)
        .filter(|&x| rows.iter().all(|&r| (r & x).count_ones() % 2 == 0))
        .map(|x| (x, q_of(x)))
        .collect();
    let mut out = BTreeSet::new();
    for z in 0u32..1 << n {
        if kernel
            .iter()
            .all(|&(x, q)| 2 * ((z & x).count_ones() % 2) == q)
        {
            out.insert(BitVector::from_u64(n, z as u64));
        }
    }
    Ok(out)
}

/// Dense `2^n`-amplitude state.
#[derive(Clone, Debug)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n: usize) -> Result<Self> {
        if n > STATEVECTOR_MAX_N {
            return Err(HlfError::SizeCapExceeded {
                n,
                cap: STATEVECTOR_MAX_N,
                what: "statevector",
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    #[inline]
    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n - 1 - qubit)
    }

    /// Amplitude of basis string `z`.
    pub fn amplitude(&self, z: &BitVector) -> Complex64 {
        self.amps[self.index_of(z)]
    }

    fn index_of(&self, z: &BitVector) -> usize {
        z.ones_iter().fold(0, |idx, k| idx | self.mask(k))
    }

    fn basis_string(&self, idx: usize) -> BitVector {
        let mut z = BitVector::zeros(self.n);
        for k in 0..self.n {
            if idx & self.mask(k) != 0 {
                z.set(k, true);
            }
        }
        z
    }

    pub fn h(&mut self, qubit: usize) {
        let m = self.mask(qubit);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for idx in 0..self.amps.len() {
            if idx & m == 0 {
                let (a, b) = (self.amps[idx], self.amps[idx | m]);
                self.amps[idx] = (a + b) * s;
                self.amps[idx | m] = (a - b) * s;
            }
        }
    }

    pub fn s(&mut self, qubit: usize) {
        let m = self.mask(qubit);
        for (idx, a) in self.amps.iter_mut().enumerate() {
            if idx & m != 0 {
                *a *= Complex64::i();
            }
        }
    }

    pub fn cz(&mut self, q1: usize, q2: usize) {
        let m = self.mask(q1) | self.mask(q2);
        for (idx, a) in self.amps.iter_mut().enumerate() {
            if idx & m == m {
                *a = -*a;
            }
        }
    }

    pub fn norm(&self) -> f64 {
        // compensated sum; 2^20 terms would otherwise drift near 1e-12
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for p in self.amps.iter().map(Complex64::norm_sqr) {
            let t = sum + p;
            comp += if sum.abs() >= p.abs() {
                (sum - t) + p
            } else {
                (p - t) + sum
            };
            sum = t;
        }
        (sum + comp).sqrt()
    }

    fn check_norm(&self, layer: &str) -> Result<()> {
        let dev = (self.norm() - 1.0).abs();
        if dev > NORM_TOL {
            return Err(HlfError::Domain(format!(
                "state norm drifted by {dev:e} after {layer}"
            )));
        }
        Ok(())
    }
}

/// Simulates the graph-state circuit for `inst` and returns the final state.
pub fn statevector_run(inst: &HlfInstance) -> Result<StateVector> {
    let n = inst.n();
    let mut sv = StateVector::zero_state(n)?;
    for q in 0..n {
        sv.h(q);
    }
    sv.check_norm("first Hadamard layer")?;
    for (i, j) in inst.edges() {
        sv.cz(i, j);
    }
    sv.check_norm("CZ layers")?;
    for q in inst.b().ones_iter() {
        sv.s(q);
    }
    sv.check_norm("S layer")?;
    for q in 0..n {
        sv.h(q);
    }
    sv.check_norm("final Hadamard layer")?;
    Ok(sv)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportReport {
    pub support: BTreeSet<BitVector>,
    /// Mean magnitude over the support (0 when empty).
    pub amp_magnitude: f64,
    pub max_deviation: f64,
}

/// Basis strings whose amplitude magnitude exceeds `tol`.
pub fn support_of(state: &StateVector, tol: f64) -> SupportReport {
    let hits: Vec<(usize, f64)> = state
        .amps
        .iter()
        .enumerate()
        .map(|(i, a)| (i, a.norm()))
        .filter(|&(_, m)| m > tol)
        .collect();
    let mean = if hits.is_empty() {
        0.0
    } else {
        hits.iter().map(|h| h.1).sum::<f64>() / hits.len() as f64
    };
    let max_deviation = hits.iter().map(|h| (h.1 - mean).abs()).fold(0.0, f64::max);
    SupportReport {
        support: hits.iter().map(|&(i, _)| state.basis_string(i)).collect(),
        amp_magnitude: mean,
        max_deviation,
    }
}

/// Measures `state` in the computational basis until every string of
/// magnitude above `tol` has appeared; returns the number of draws.
pub fn sample_until_complete(state: &StateVector, tol: f64, rng: &mut impl Rng) -> usize {
    let mut cdf = Vec::with_capacity(state.amps.len());
    let mut acc = 0.0;
    for a in &state.amps {
        acc += a.norm_sqr();
        cdf.push(acc);
    }
    let targets: BTreeSet<usize> = (0..state.amps.len())
        .filter(|&i| state.amps[i].norm() > tol)
        .collect();
    let mut seen = BTreeSet::new();
    let mut draws = 0;
    while seen.len() < targets.len() {
        let u: f64 = rng.gen::<f64>() * acc;
        let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        draws += 1;
        if targets.contains(&idx) {
            seen.insert(idx);
        }
    }
    draws
}

/// Whether the rows selected by `vertices` add to zero, decided on the
/// graph: every vertex connected to the set (self-loops count for `b_v =
/// 1`) must have even degree with respect to it.
pub fn strict_dependence(inst: &HlfInstance, vertices: &[usize]) -> Result<bool> {
    let n = inst.n();
    let mut in_set = vec![false; n];
    for &v in vertices {
        if v >= n {
            return Err(HlfError::IndexOutOfRange { index: v, len: n });
        }
        in_set[v] = true;
    }
    let mut degree = vec![0usize; n];
    let mut connected = BTreeSet::new();
    for v in (0..n).filter(|&v| in_set[v]) {
        for l in inst.neighbors(v) {
            degree[l] += 1;
            connected.insert(l);
        }
        if inst.b().get(v) {
            degree[v] += 1;
            connected.insert(v);
        }
    }
    Ok(connected.iter().all(|&l| degree[l].is_multiple_of(2)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankBoundReport {
    pub n: usize,
    pub r: usize,
    pub lower: usize,
    pub within: bool,
    pub first_rows_independent: bool,
}

/// Rank of the `side × side` grid instance with diagonal `b`, checked
/// against the interval `[n − side, n]`, plus independence of rows
/// `1 .. n − side`.
pub fn rank_bound_check(side: usize, b: &BitVector) -> Result<RankBoundReport> {
    if side < 2 {
        return Err(HlfError::Domain("rank bound check needs N >= 2".into()));
    }
    let inst = HlfInstance::grid(side, b.clone())?;
    let n = inst.n();
    let lower = n - side;
    let rows = inst.matrix().rows();
    let r = gf2::rank_of_rows(rows);
    Ok(RankBoundReport {
        n,
        r,
        lower,
        within: (lower..=n).contains(&r),
        first_rows_independent: gf2::rank_of_rows(&rows[..lower]) == lower,
    })
}

/// Outcome of the cross-oracle check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub agrees: bool,
    pub set_size: u64,
    pub r: usize,
    /// `None` when the instance is too large for the statevector oracle.
    pub amp_magnitude: Option<f64>,
    pub max_deviation: Option<f64>,
}

/// Magnitude tolerance for the uniform-amplitude check.
pub const UNIFORMITY_TOL: f64 = 1e-9;

/// Cross-checks the enumerator against the brute-force and statevector
/// oracles when `n <= 20`, and against the algebraic checks otherwise.
pub fn verify_instance(
    inst: &HlfInstance,
    tol: f64,
    cap: usize,
    rng: &mut impl Rng,
) -> Result<VerifyReport> {
    let cla = run_cla(inst)?;
    let space = SolutionSpace::with_cap(inst, &cla, cap)?;
    let n = inst.n();
    if n <= BRUTE_FORCE_MAX_N.min(STATEVECTOR_MAX_N) {
        let enumerated: BTreeSet<BitVector> = space.iter().map(|(_, z)| z).collect();
        let brute = brute_force_solutions(inst)?;
        let sv = statevector_run(inst)?;
        let report = support_of(&sv, tol);
        let expected_mag = 2f64.powf(-(cla.rank as f64) / 2.0);
        let uniform = report
            .support
            .iter()
            .all(|z| (sv.amplitude(z).norm() - expected_mag).abs() <= UNIFORMITY_TOL);
        let agrees = enumerated.len() as u64 == space.total()
            && enumerated == brute
            && enumerated == report.support
            && uniform;
        return Ok(VerifyReport {
            agrees,
            set_size: enumerated.len() as u64,
            r: cla.rank,
            amp_magnitude: Some(report.amp_magnitude),
            max_deviation: Some(report.max_deviation),
        });
    }
    // algebraic route: z_a is a solution, q is linear on the kernel, the
    // pivot columns are independent (so all 2^r outputs are distinct), and
    // a sample of streamed outputs passes the definition check
    let columns: Vec<BitVector> = cla
        .pivots
        .iter()
        .map(|&p| inst.matrix().column(p))
        .collect();
    let mut agrees = check_solution(inst, &cla.z_a)?
        && verify_q_linearity(inst, &cla.kernel)
        && gf2::rank_of_rows(&columns) == cla.rank;
    for _ in 0..256 {
        if !agrees {
            break;
        }
        let t = rng.gen_range(0..space.total());
        agrees = check_solution(inst, &space.solution_at(t))?;
    }
    Ok(VerifyReport {
        agrees,
        set_size: space.total(),
        r: cla.rank,
        amp_magnitude: None,
        max_deviation: None,
    })
}
