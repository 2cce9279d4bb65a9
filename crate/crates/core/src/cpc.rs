//! The constant-depth classical circuit and the solution enumerator.
//!
//! Two evaluation paths live here. [`eval_circuit`] pushes one input `R`
//! through the layered netlist gate by gate: ROU layers, then the Toffoli
//! layer, then the final CNOT layer controlled by `z_a`. The enumerator
//! skips the netlist and walks `Col(A)` directly: ordering the pivot
//! substring `R^(r)` by reflected Gray code means consecutive outputs differ
//! by one pivot column, so each solution costs a single row XOR.

use std::io::{self, Write};

use rand::Rng;

use crate::cla::ClaSummary;
use crate::error::{HlfError, Result};
use crate::gf2::{self, BitMatrix, BitVector};
use crate::instance::HlfInstance;

/// Largest rank enumerated unless the caller raises the cap.
pub const DEFAULT_RANK_CAP: usize = 34;

#[inline]
pub fn gray(t: u64) -> u64 {
    t ^ (t >> 1)
}

/// Compiled netlist: ROU layers, one Toffoli layer, one final CNOT layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredCircuit {
    pub n: usize,
    /// Each layer is a matching on wire groups (0-based).
    pub rou_layers: Vec<Vec<(usize, usize)>>,
    pub toffoli_controls: BitVector,
    pub final_controls: BitVector,
}

impl LayeredCircuit {
    /// Netlist for `inst` with the final CNOT layer disabled.
    pub fn from_instance(inst: &HlfInstance) -> Self {
        Self {
            n: inst.n(),
            rou_layers: inst.edge_coloring().layers,
            toffoli_controls: inst.b().clone(),
            final_controls: BitVector::zeros(inst.n()),
        }
    }

    /// Gate layers including the Toffoli and final CNOT layers.
    pub fn depth(&self) -> usize {
        self.rou_layers.len() + 2
    }

    /// Pipeline stages before the final controlled layer (ROU + Toffoli).
    pub fn pipeline_depth(&self) -> usize {
        self.rou_layers.len() + 1
    }

    pub fn gate_count(&self) -> usize {
        self.rou_layers.iter().map(Vec::len).sum::<usize>() + 2 * self.n
    }

    /// No wire group is touched twice inside a ROU layer.
    pub fn layers_are_matchings(&self) -> bool {
        self.rou_layers.iter().all(|layer| {
            let mut seen = vec![false; self.n];
            layer.iter().all(|&(i, j)| {
                let ok = i != j && i < self.n && j < self.n && !seen[i] && !seen[j];
                if ok {
                    seen[i] = true;
                    seen[j] = true;
                }
                ok
            })
        })
    }
}

/// Builds the circuit for `inst` using the stage-one output `cla`.
pub fn compile_cpc(inst: &HlfInstance, cla: &ClaSummary) -> Result<LayeredCircuit> {
    if cla.n != inst.n() || cla.z_a.len() != inst.n() {
        return Err(HlfError::DimensionMismatch {
            expected: inst.n(),
            found: cla.z_a.len(),
        });
    }
    let mut circuit = LayeredCircuit::from_instance(inst);
    circuit.final_controls = cla.z_a.clone();
    Ok(circuit)
}

/// Wire values: black `r`, red `y`, purple control `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireState {
    pub r: BitVector,
    pub y: BitVector,
    pub b: BitVector,
}

impl WireState {
    /// Fresh state with `y = 0`.
    pub fn new(r: BitVector, b: BitVector) -> Result<Self> {
        if r.len() != b.len() {
            return Err(HlfError::DimensionMismatch {
                expected: b.len(),
                found: r.len(),
            });
        }
        let y = BitVector::zeros(r.len());
        Ok(Self { r, y, b })
    }

    /// ROU on groups `i`, `j`: `y_i ^= R_j`, `y_j ^= R_i`.
    pub fn apply_rou(&mut self, i: usize, j: usize) -> Result<()> {
        let n = self.r.len();
        for v in [i, j] {
            if v >= n {
                return Err(HlfError::IndexOutOfRange { index: v, len: n });
            }
        }
        if i == j {
            return Err(HlfError::Domain(format!(
                "ROU needs two distinct wire groups, got {i} twice"
            )));
        }
        let (ri, rj) = (self.r.get(i), self.r.get(j));
        if rj {
            self.y.flip(i);
        }
        if ri {
            self.y.flip(j);
        }
        Ok(())
    }

    /// `y_i ^= b_i · R_i` on every group.
    pub fn apply_toffoli_layer(&mut self) {
        for i in 0..self.r.len() {
            if self.b.get(i) && self.r.get(i) {
                self.y.flip(i);
            }
        }
    }

    /// Final CNOT layer: returns `y ^ controls`.
    pub fn apply_cnot_layer(&self, controls: &BitVector) -> BitVector {
        let mut z = self.y.clone();
        for i in 0..z.len() {
            if controls.get(i) {
                z.flip(i);
            }
        }
        z
    }
}

/// Gate-level evaluation. Returns `(y, z)`: `y` before and `z` after the
/// final CNOT layer.
pub fn eval_circuit(c: &LayeredCircuit, r: &BitVector) -> Result<(BitVector, BitVector)> {
    if r.len() != c.n {
        return Err(HlfError::DimensionMismatch {
            expected: c.n,
            found: r.len(),
        });
    }
    let mut state = WireState::new(r.clone(), c.toffoli_controls.clone())?;
    for layer in &c.rou_layers {
        for &(i, j) in layer {
            state.apply_rou(i, j)?;
        }
    }
    state.apply_toffoli_layer();
    let z = state.apply_cnot_layer(&c.final_controls);
    Ok((state.y, z))
}

/// Compares gate-level `y` with `A · R` on `trials` random inputs.
pub fn check_circuit_matvec(inst: &HlfInstance, trials: usize, rng: &mut impl Rng) -> bool {
    check_circuit_against(
        &LayeredCircuit::from_instance(inst),
        inst.matrix(),
        trials,
        rng,
    )
}

/// Same check against an explicit circuit, e.g. a mutated one.
pub fn check_circuit_against(
    c: &LayeredCircuit,
    a: &BitMatrix,
    trials: usize,
    rng: &mut impl Rng,
) -> bool {
    let n = a.n();
    (0..trials).all(|_| {
        let bits: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
        matches_matvec(c, a, &BitVector::from_bools(&bits))
    })
}

/// Exhaustive version over all `2^n` inputs (`n <= 24`).
pub fn check_circuit_exhaustive(c: &LayeredCircuit, a: &BitMatrix) -> bool {
    let n = a.n();
    assert!(n <= 24, "exhaustive circuit check limited to n <= 24");
    (0u64..1 << n).all(|x| matches_matvec(c, a, &BitVector::from_u64(n, x)))
}

fn matches_matvec(c: &LayeredCircuit, a: &BitMatrix, r: &BitVector) -> bool {
    match (eval_circuit(c, r), gf2::mat_vec(a, r)) {
        (Ok((y, _)), Ok(expected)) => y == expected,
        _ => false,
    }
}

/// Order-independent digest of a set of solutions.
///
/// Each solution is hashed; hashes are combined by wrapping addition and
/// by XOR. Both combinations are associative and commutative, so digests
/// of disjoint chunks merge in any order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Digest {
    pub count: u64,
    pub sum: u64,
    pub xor: u64,
}

#[inline]
fn mix64(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

#[inline]
fn hash_words(words: &[u64]) -> u64 {
    words.iter().fold(0x9e37_79b9_7f4a_7c15, |h, &w| {
        mix64(h ^ w).wrapping_add(0x9e37_79b9_7f4a_7c15)
    })
}

impl Digest {
    #[inline]
    pub fn add(&mut self, solution: &BitVector) {
        self.add_hash(hash_words(solution.words()));
    }

    #[inline]
    fn add_hash(&mut self, h: u64) {
        self.count += 1;
        self.sum = self.sum.wrapping_add(h);
        self.xor ^= h;
    }

    pub fn merge(self, other: Digest) -> Digest {
        Digest {
            count: self.count + other.count,
            sum: self.sum.wrapping_add(other.sum),
            xor: self.xor ^ other.xor,
        }
    }

    pub fn hex(&self) -> String {
        format!("{:016x}{:016x}", self.sum, self.xor)
    }
}

/// The affine space `z_a ⊕ Col(A)`, enumerable by Gray code.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    n: usize,
    columns: Vec<BitVector>,
    z_a: BitVector,
}

impl SolutionSpace {
    pub fn new(inst: &HlfInstance, cla: &ClaSummary) -> Result<Self> {
        Self::with_cap(inst, cla, DEFAULT_RANK_CAP)
    }

    /// Refuses ranks above `cap`, and always above 63.
    pub fn with_cap(inst: &HlfInstance, cla: &ClaSummary, cap: usize) -> Result<Self> {
        if cla.n != inst.n() {
            return Err(HlfError::DimensionMismatch {
                expected: inst.n(),
                found: cla.n,
            });
        }
        let cap = cap.min(63);
        if cla.rank > cap {
            return Err(HlfError::RankCapExceeded { r: cla.rank, cap });
        }
        let columns = cla
            .pivots
            .iter()
            .map(|&p| inst.matrix().column(p))
            .collect();
        Ok(Self {
            n: inst.n(),
            columns,
            z_a: cla.z_a.clone(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.columns.len()
    }

    /// `2^r`.
    pub fn total(&self) -> u64 {
        1u64 << self.columns.len()
    }

    fn check_range(&self, start: u64, count: u64) -> Result<()> {
        let total = self.total();
        match start.checked_add(count) {
            Some(end) if end <= total => Ok(()),
            _ => Err(HlfError::ChunkOutOfRange {
                start,
                count,
                total,
            }),
        }
    }

    /// Solution at index `t`: `z_a` XOR the pivot columns selected by `gray(t)`.
    pub fn solution_at(&self, t: u64) -> BitVector {
        let mut z = self.z_a.clone();
        let g = gray(t);
        for (i, c) in self.columns.iter().enumerate() {
            if (g >> i) & 1 == 1 {
                z.xor_assign(c);
            }
        }
        z
    }

    pub fn iter(&self) -> Solutions<'_> {
        self.chunk(0, self.total()).expect("full range is valid")
    }

    /// Items `start .. start + count` of the full Gray-code stream.
    pub fn chunk(&self, start: u64, count: u64) -> Result<Solutions<'_>> {
        self.check_range(start, count)?;
        Ok(Solutions {
            space: self,
            current: self.solution_at(start),
            next: start,
            end: start + count,
        })
    }

    /// Calls `f(t, z)` for each item of the chunk without allocating.
    pub fn for_each_in(
        &self,
        start: u64,
        count: u64,
        mut f: impl FnMut(u64, &BitVector),
    ) -> Result<()> {
        self.check_range(start, count)?;
        if count == 0 {
            return Ok(());
        }
        let mut z = self.solution_at(start);
        let end = start + count;
        let mut t = start;
        loop {
            f(t, &z);
            t += 1;
            if t == end {
                return Ok(());
            }
            z.xor_assign(&self.columns[t.trailing_zeros() as usize]);
        }
    }

    pub fn digest_chunk(&self, start: u64, count: u64) -> Result<Digest> {
        self.check_range(start, count)?;
        let mut d = Digest::default();
        if count == 0 {
            return Ok(d);
        }
        if self.n <= 64 {
            // single-word fast path
            let cols: Vec<u64> = self.columns.iter().map(BitVector::as_u64).collect();
            let mut z = self.solution_at(start).as_u64();
            let end = start + count;
            let mut t = start;
            loop {
                d.add_hash(hash_words(std::slice::from_ref(&z)));
                t += 1;
                if t == end {
                    break;
                }
                z ^= cols[t.trailing_zeros() as usize];
            }
        } else {
            self.for_each_in(start, count, |_, z| d.add(z))?;
        }
        Ok(d)
    }

    /// Contiguous split of `[0, 2^r)` into `chunks` near-equal ranges.
    pub fn partition(&self, chunks: usize) -> Vec<(u64, u64)> {
        let total = self.total();
        let k = (chunks.max(1) as u64).min(total);
        (0..k)
            .map(|i| {
                let start = total * i / k;
                let end = total * (i + 1) / k;
                (start, end - start)
            })
            .collect()
    }

    /// Digest of the whole space, one scoped thread per chunk.
    pub fn digest_parallel(&self, chunks: usize) -> Digest {
        let parts = self.partition(chunks);
        if parts.len() == 1 {
            let (s, c) = parts[0];
            return self.digest_chunk(s, c).expect("partition ranges are valid");
        }
        std::thread::scope(|scope| {
            let handles: Vec<_> = parts
                .iter()
                .map(|&(s, c)| {
                    scope
                        .spawn(move || self.digest_chunk(s, c).expect("partition ranges are valid"))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("enumeration worker panicked"))
                .fold(Digest::default(), Digest::merge)
        })
    }
}

/// Streams `(index, z)` pairs of one chunk in Gray-code order.
pub struct Solutions<'a> {
    space: &'a SolutionSpace,
    current: BitVector,
    next: u64,
    end: u64,
}

impl Iterator for Solutions<'_> {
    type Item = (u64, BitVector);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let t = self.next;
        let item = (t, self.current.clone());
        self.next += 1;
        if self.next < self.end {
            self.current
                .xor_assign(&self.space.columns[self.next.trailing_zeros() as usize]);
        }
        Some(item)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Solutions<'_> {}

/// All solutions under the default rank cap.
pub fn enumerate_solutions(inst: &HlfInstance, cla: &ClaSummary) -> Result<Vec<BitVector>> {
    let space = SolutionSpace::new(inst, cla)?;
    Ok(space.iter().map(|(_, z)| z).collect())
}

/// Solutions with indices in `[start, start + count)`.
pub fn enumerate_chunk(
    inst: &HlfInstance,
    cla: &ClaSummary,
    start: u64,
    count: u64,
) -> Result<Vec<BitVector>> {
    let space = SolutionSpace::new(inst, cla)?;
    let out = space.chunk(start, count)?.map(|(_, z)| z).collect();
    Ok(out)
}

/// One bit string per line.
pub fn write_text<W: Write>(out: &mut W, z: &BitVector) -> io::Result<()> {
    let mut line = Vec::with_capacity(z.len() + 1);
    line.extend((0..z.len()).map(|i| if z.get(i) { b'1' } else { b'0' }));
    line.push(b'\n');
    out.write_all(&line)
}

/// Packed little-endian `u64` words; bit 1 of `z` is the least significant
/// bit of word 0.
pub fn write_binary<W: Write>(out: &mut W, z: &BitVector) -> io::Result<()> {
    for w in z.words() {
        out.write_all(&w.to_le_bytes())?;
    }
    Ok(())
}

/// Reads back records written by [`write_binary`].
pub fn read_binary(bytes: &[u8], n: usize) -> Result<Vec<BitVector>> {
    let stride = n.div_ceil(64) * 8;
    if stride == 0 || !bytes.len().is_multiple_of(stride) {
        return Err(HlfError::Parse(format!(
            "binary stream length {} is not a multiple of {stride}",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(stride)
        .map(|rec| {
            let words = rec
                .chunks_exact(8)
                .map(|b| u64::from_le_bytes(b.try_into().unwrap()))
                .collect();
            BitVector::from_words(n, words)
        })
        .collect())
}
