//! Occupancy images of solution sets.
//!
//! The first `⌈n/2⌉` bits of a solution select the column and the last
//! `⌊n/2⌋` bits select the row, both read with the earliest bit most
//! significant. Images are written as portable bitmaps (P1 text or P4
//! packed); a set cell is a 1 (black) pixel.

use std::collections::BTreeSet;

use crate::error::{HlfError, Result};
use crate::gf2::BitVector;

/// Largest `n` that can be rendered (a 2^12 × 2^12 image).
pub const MAX_PLOT_N: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridImage {
    pub width: usize,
    pub height: usize,
    /// Row-major occupancy, `cells[row * width + col]`.
    pub cells: Vec<bool>,
}

fn split(n: usize) -> (usize, usize) {
    (n.div_ceil(2), n / 2)
}

impl GridImage {
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_PLOT_N {
            return Err(HlfError::SizeCapExceeded {
                n,
                cap: MAX_PLOT_N,
                what: "plot",
            });
        }
        let (cb, rb) = split(n);
        let (width, height) = (1 << cb, 1 << rb);
        Ok(Self {
            width,
            height,
            cells: vec![false; width * height],
        })
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.cells[row * self.width + col]
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn to_pbm_plain(&self) -> String {
        let mut out = format!("P1\n{} {}\n", self.width, self.height);
        for row in self.cells.chunks(self.width) {
            let line: Vec<&str> = row.iter().map(|&c| if c { "1" } else { "0" }).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn to_pbm_raw(&self) -> Vec<u8> {
        let mut out = format!("P4\n{} {}\n", self.width, self.height).into_bytes();
        for row in self.cells.chunks(self.width) {
            for byte in row.chunks(8) {
                let v = byte
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (k, &c)| acc | ((c as u8) << (7 - k)));
                out.push(v);
            }
        }
        out
    }

    /// Parses P1 or P4 data.
    pub fn from_pbm(data: &[u8]) -> Result<Self> {
        let bad = |m: &str| HlfError::Parse(format!("bad PBM: {m}"));
        let mut pos = 0;
        let mut token = || -> Option<String> {
            loop {
                while pos < data.len() && data[pos].is_ascii_whitespace() {
                    pos += 1;
                }
                if pos < data.len() && data[pos] == b'#' {
                    while pos < data.len() && data[pos] != b'\n' {
                        pos += 1;
                    }
                    continue;
                }
                break;
            }
            let start = pos;
            while pos < data.len() && !data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            (pos > start).then(|| String::from_utf8_lossy(&data[start..pos]).into_owned())
        };
        let magic = token().ok_or_else(|| bad("missing magic"))?;
        let width: usize = token()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("width"))?;
        let height: usize = token()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("height"))?;
        let mut cells = Vec::with_capacity(width * height);
        match magic.as_str() {
            "P1" => {
                // plain PBM digits need not be separated
                while cells.len() < width * height {
                    let t = token().ok_or_else(|| bad("truncated raster"))?;
                    for ch in t.chars() {
                        match ch {
                            '0' => cells.push(false),
                            '1' => cells.push(true),
                            _ => return Err(bad("raster character")),
                        }
                    }
                }
                cells.truncate(width * height);
            }
            "P4" => {
                let start = pos + 1;
                let stride = width.div_ceil(8);
                let raster = data
                    .get(start..start + stride * height)
                    .ok_or_else(|| bad("truncated raster"))?;
                for row in raster.chunks(stride) {
                    for col in 0..width {
                        cells.push((row[col / 8] >> (7 - col % 8)) & 1 == 1);
                    }
                }
            }
            other => return Err(bad(&format!("unsupported magic {other}"))),
        }
        Ok(Self {
            width,
            height,
            cells,
        })
    }

    /// Recovers the solution set from an image of `n`-bit strings.
    pub fn to_solutions(&self, n: usize) -> Result<BTreeSet<BitVector>> {
        let (cb, rb) = split(n);
        if self.width != 1 << cb || self.height != 1 << rb {
            return Err(HlfError::DimensionMismatch {
                expected: 1 << cb,
                found: self.width,
            });
        }
        let mut out = BTreeSet::new();
        for row in 0..self.height {
            for col in 0..self.width {
                if self.get(col, row) {
                    let mut z = BitVector::zeros(n);
                    for k in 0..cb {
                        z.set(k, (col >> (cb - 1 - k)) & 1 == 1);
                    }
                    for k in 0..rb {
                        z.set(cb + k, (row >> (rb - 1 - k)) & 1 == 1);
                    }
                    out.insert(z);
                }
            }
        }
        Ok(out)
    }
}

/// Renders a solution set as an occupancy grid.
pub fn render_distribution_grid<'a>(
    solutions: impl IntoIterator<Item = &'a BitVector>,
    n: usize,
) -> Result<GridImage> {
    let mut img = GridImage::empty(n)?;
    let (cb, rb) = split(n);
    for z in solutions {
        if z.len() != n {
            return Err(HlfError::DimensionMismatch {
                expected: n,
                found: z.len(),
            });
        }
        let col = (0..cb).fold(0usize, |acc, k| (acc << 1) | z.get(k) as usize);
        let row = (0..rb).fold(0usize, |acc, k| (acc << 1) | z.get(cb + k) as usize);
        img.cells[row * img.width + col] = true;
    }
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn fig3a_pattern() {
        let sols = [bv("0000"), bv("0110"), bv("1001"), bv("1111")];
        let img = render_distribution_grid(&sols, 4).unwrap();
        assert_eq!((img.width, img.height), (4, 4));
        let set: Vec<(usize, usize)> = (0..4)
            .flat_map(|r| (0..4).map(move |c| (c, r)))
            .filter(|&(c, r)| img.get(c, r))
            .collect();
        // (col, row): (00,00), (01,10), (10,01), (11,11)
        let mut expected = vec![(0, 0), (1, 2), (2, 1), (3, 3)];
        expected.sort_by_key(|&(c, r)| (r, c));
        assert_eq!(set, expected);
        assert_eq!(
            img.to_pbm_plain(),
            "P1\n4 4\n1 0 0 0\n0 0 1 0\n0 1 0 0\n0 0 0 1\n"
        );
    }

    #[test]
    fn empty_and_full() {
        let empty: Vec<BitVector> = Vec::new();
        assert_eq!(render_distribution_grid(&empty, 4).unwrap().count(), 0);
        let all: Vec<BitVector> = (0..16).map(|x| BitVector::from_u64(4, x)).collect();
        assert_eq!(render_distribution_grid(&all, 4).unwrap().count(), 16);
    }

    #[test]
    fn odd_length_shape_and_errors() {
        let img = GridImage::empty(5).unwrap();
        assert_eq!((img.width, img.height), (8, 4));
        assert!(render_distribution_grid(&[bv("000")], 4).is_err());
        assert!(GridImage::empty(25).is_err());
        assert!(GridImage::from_pbm(b"P2\n1 1\n0\n").is_err());
    }

    proptest! {
        #[test]
        fn render_round_trips(n in 1usize..=10, seeds in proptest::collection::vec(any::<u64>(), 0..40)) {
            let set: BTreeSet<BitVector> = seeds.iter().map(|&s| BitVector::from_u64(n, s)).collect();
            let img = render_distribution_grid(&set, n).unwrap();
            let plain = GridImage::from_pbm(img.to_pbm_plain().as_bytes()).unwrap();
            let raw = GridImage::from_pbm(&img.to_pbm_raw()).unwrap();
            prop_assert_eq!(&plain, &img);
            prop_assert_eq!(&raw, &img);
            prop_assert_eq!(img.to_solutions(n).unwrap(), set);
        }
    }
}
