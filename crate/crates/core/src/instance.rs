//! Problem instances: the symmetric matrix `A`, its diagonal string `b`,
//! and optional grid metadata.
//!
//! Vertices are 0-based inside the crate. Every external form (JSON
//! documents, the `grid:N:b` shorthand, CLI output) uses 1-based vertex
//! numbers, with grid vertices numbered row-major from the top-left.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HlfError, Result};
use crate::gf2::{BitMatrix, BitVector};

/// An HLF instance over a symmetric binary matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct HlfInstance {
    matrix: BitMatrix,
    b: BitVector,
    grid_side: Option<usize>,
}

impl fmt::Debug for HlfInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.grid_side {
            Some(side) => write!(f, "HlfInstance(grid:{side}:{})", self.b),
            None => write!(
                f,
                "HlfInstance(n={}, b={}, edges={})",
                self.n(),
                self.b,
                self.edges().len()
            ),
        }
    }
}

/// Edges of the all-connected `side × side` grid, `(i, j)` with `i < j`.
fn grid_edges(side: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for row in 0..side {
        for col in 0..side {
            let v = row * side + col;
            if col + 1 < side {
                edges.push((v, v + 1));
            }
            if row + 1 < side {
                edges.push((v, v + side));
            }
        }
    }
    edges.sort_unstable();
    edges
}

impl HlfInstance {
    /// All-connected `side × side` grid with diagonal `b`.
    pub fn grid(side: usize, b: BitVector) -> Result<Self> {
        if side == 0 {
            return Err(HlfError::Domain("grid side must be at least 1".into()));
        }
        let n = side * side;
        if b.len() != n {
            return Err(HlfError::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let mut matrix = BitMatrix::zeros(n);
        for (i, j) in grid_edges(side) {
            matrix.set(i, j, true);
            matrix.set(j, i, true);
        }
        for i in b.ones_iter() {
            matrix.set(i, i, true);
        }
        Ok(Self {
            matrix,
            b,
            grid_side: Some(side),
        })
    }

    /// Instance from an arbitrary symmetric matrix; `b` is its diagonal.
    pub fn general(matrix: BitMatrix) -> Result<Self> {
        if let Some((i, j)) = matrix.first_asymmetry() {
            return Err(HlfError::NotSymmetric {
                row: i + 1,
                col: j + 1,
            });
        }
        let b = matrix.diagonal();
        Ok(Self {
            matrix,
            b,
            grid_side: None,
        })
    }

    /// Instance from an edge list (0-based, `i != j`) and a diagonal.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], b: BitVector) -> Result<Self> {
        if b.len() != n {
            return Err(HlfError::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let mut matrix = BitMatrix::zeros(n);
        for &(i, j) in edges {
            for v in [i, j] {
                if v >= n {
                    return Err(HlfError::IndexOutOfRange {
                        index: v + 1,
                        len: n,
                    });
                }
            }
            if i == j {
                return Err(HlfError::Parse(format!(
                    "self-loop edge ({0}, {0}); use b for the diagonal",
                    i + 1
                )));
            }
            matrix.set(i, j, true);
            matrix.set(j, i, true);
        }
        for i in b.ones_iter() {
            matrix.set(i, i, true);
        }
        Ok(Self {
            matrix,
            b,
            grid_side: None,
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn b(&self) -> &BitVector {
        &self.b
    }

    pub fn grid_side(&self) -> Option<usize> {
        self.grid_side
    }

    /// Off-diagonal edges `(i, j)`, `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in self.matrix.row(i).ones_iter().filter(|&j| j > i) {
                edges.push((i, j));
            }
        }
        edges
    }

    /// Neighbors of `v`, excluding `v` itself.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.matrix.row(v).ones_iter().filter(move |&j| j != v)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n())
            .map(|v| self.neighbors(v).count())
            .max()
            .unwrap_or(0)
    }

    /// Edge layers in which every layer is a matching.
    ///
    /// Grid instances use a fixed four-colour scheme (horizontal edges
    /// starting in odd columns, then even columns, then vertical edges
    /// starting in odd rows, then even rows; 1-based) with empty layers
    /// dropped. Other instances get first-fit greedy colouring over the
    /// lexicographic edge order, which uses at most `2Δ − 1` layers.
    pub fn edge_coloring(&self) -> EdgeColoring {
        match self.grid_side {
            Some(side) => {
                let mut layers = vec![Vec::new(); 4];
                for (i, j) in self.edges() {
                    let (row, col) = (i / side, i % side);
                    // 0-based parity, so `col % 2 == 0` is an odd 1-based column
                    let layer = if j == i + 1 {
                        if col % 2 == 0 {
                            0
                        } else {
                            1
                        }
                    } else if row % 2 == 0 {
                        2
                    } else {
                        3
                    };
                    layers[layer].push((i, j));
                }
                layers.retain(|l| !l.is_empty());
                EdgeColoring { layers }
            }
            None => {
                let n = self.n();
                let mut layers: Vec<Vec<(usize, usize)>> = Vec::new();
                let mut used: Vec<Vec<bool>> = Vec::new();
                for (i, j) in self.edges() {
                    let slot = used.iter().position(|u| !u[i] && !u[j]).unwrap_or_else(|| {
                        layers.push(Vec::new());
                        used.push(vec![false; n]);
                        layers.len() - 1
                    });
                    used[slot][i] = true;
                    used[slot][j] = true;
                    layers[slot].push((i, j));
                }
                EdgeColoring { layers }
            }
        }
    }

    /// Parses either the `grid:N:b` shorthand or a JSON instance document.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if let Some(rest) = trimmed.strip_prefix("grid:") {
            let (side, b) = rest
                .split_once(':')
                .ok_or_else(|| HlfError::Parse("expected grid:N:b".into()))?;
            let side: usize = side
                .trim()
                .parse()
                .map_err(|_| HlfError::Parse(format!("invalid grid side {side:?}")))?;
            let b: BitVector = b.parse()?;
            if b.len() != side * side {
                return Err(HlfError::GridSizeMismatch { side, n: b.len() });
            }
            return Self::grid(side, b);
        }
        let doc: InstanceDocument =
            serde_json::from_str(trimmed).map_err(|e| HlfError::Parse(e.to_string()))?;
        doc.into_instance()
    }

    /// Loads from `grid:N:b` shorthand or a path to a JSON document.
    pub fn load(spec: &str) -> Result<Self> {
        if spec.trim_start().starts_with("grid:") {
            return Self::parse(spec);
        }
        let text = std::fs::read_to_string(Path::new(spec))
            .map_err(|e| HlfError::Parse(format!("cannot read {spec}: {e}")))?;
        Self::parse(&text)
    }

    pub fn to_document(&self) -> InstanceDocument {
        InstanceDocument {
            n: self.n(),
            grid_side: self.grid_side,
            b: self.b.clone(),
            edges: Some(
                self.edges()
                    .into_iter()
                    .map(|(i, j)| [i + 1, j + 1])
                    .collect(),
            ),
            matrix: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("instance serializes")
    }
}

/// JSON form of an instance.
///
/// Either `edges` (1-based unordered pairs) or `matrix` (one bit string
/// per row) describes the off-diagonal part. When `matrix` is used its
/// diagonal must equal `b` and it must be symmetric.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub n: usize,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub grid_side: Option<usize>,
    pub b: BitVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<BitVector>>,
}

impl InstanceDocument {
    pub fn into_instance(self) -> Result<HlfInstance> {
        let n = self.n;
        if n == 0 {
            return Err(HlfError::Parse("n must be positive".into()));
        }
        if self.b.len() != n {
            return Err(HlfError::DimensionMismatch {
                expected: n,
                found: self.b.len(),
            });
        }
        if let Some(side) = self.grid_side {
            if side * side != n {
                return Err(HlfError::GridSizeMismatch { side, n });
            }
        }
        let inst = match (self.edges, self.matrix) {
            (Some(_), Some(_)) => {
                return Err(HlfError::Parse(
                    "give either edges or matrix, not both".into(),
                ))
            }
            (Some(edges), None) => {
                let mut zero_based = Vec::with_capacity(edges.len());
                for [i, j] in edges {
                    if let Some(v) = [i, j].into_iter().find(|&v| v == 0 || v > n) {
                        return Err(HlfError::IndexOutOfRange { index: v, len: n });
                    }
                    if i == j {
                        if self.b.get(i - 1) {
                            continue;
                        }
                        return Err(HlfError::DiagonalMismatch { index: i });
                    }
                    zero_based.push((i - 1, j - 1));
                }
                HlfInstance::from_edges(n, &zero_based, self.b.clone())?
            }
            (None, Some(rows)) => {
                let matrix = BitMatrix::from_rows(rows)?;
                if matrix.n() != n {
                    return Err(HlfError::DimensionMismatch {
                        expected: n,
                        found: matrix.n(),
                    });
                }
                let inst = HlfInstance::general(matrix)?;
                if let Some(i) = (0..n).find(|&i| inst.b.get(i) != self.b.get(i)) {
                    return Err(HlfError::DiagonalMismatch { index: i + 1 });
                }
                inst
            }
            (None, None) => HlfInstance::from_edges(n, &[], self.b.clone())?,
        };
        match self.grid_side {
            Some(side) => {
                let grid = HlfInstance::grid(side, self.b)?;
                if grid.matrix != inst.matrix {
                    return Err(HlfError::NotAGrid { side });
                }
                Ok(grid)
            }
            None => Ok(inst),
        }
    }
}

/// Partition of the off-diagonal edges into matchings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoring {
    pub layers: Vec<Vec<(usize, usize)>>,
}

impl EdgeColoring {
    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    /// True when no vertex appears twice in any layer.
    pub fn is_proper(&self, n: usize) -> bool {
        self.layers.iter().all(|layer| {
            let mut seen = vec![false; n];
            layer.iter().all(|&(i, j)| {
                let ok = i != j && !seen[i] && !seen[j];
                seen[i] = true;
                seen[j] = true;
                ok
            })
        })
    }
}
