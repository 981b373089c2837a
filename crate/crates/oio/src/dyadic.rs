//! Dyadic pieces `W_{k,l}` of a discretized operator: the kernel times
//! `Φ(2^k |x|) Φ(2^l |y|)` on each sign quadrant.

use std::ops::Range;

use num_complex::Complex64;
use oio_core::cutoff::DyadicPartition;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::grid::Grid1D;
use crate::norms::schur_bound;
use crate::operator::DiscretizedOperator;

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicPiece {
    /// `|x| ≈ 2^{−k}`, `|y| ≈ 2^{−l}`.
    pub k: i32,
    pub l: i32,
    /// Signs of `(x, y)`.
    pub quadrant: (i8, i8),
    pub rows: Range<usize>,
    pub cols: Range<usize>,
    /// Sub-block on `rows × cols` of the parent grids.
    pub op: DiscretizedOperator,
}

impl DyadicPiece {
    pub fn schur(&self) -> f64 {
        schur_bound(&self.op).value
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicDecomposition {
    pub pieces: Vec<DyadicPiece>,
    /// Frobenius bound on `‖op − Σ W_{k,l}‖₂` in continuum scaling.
    pub reconstruction_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PieceSummary {
    pub k: i32,
    pub l: i32,
    pub quadrant: (i8, i8),
    pub rows: usize,
    pub cols: usize,
    pub schur: f64,
    /// `schur · 2^{(k+l)/2}`.
    pub normalized_schur: f64,
}

impl DyadicDecomposition {
    pub fn summaries(&self) -> Vec<PieceSummary> {
        self.pieces
            .iter()
            .map(|p| {
                let schur = p.schur();
                PieceSummary {
                    k: p.k,
                    l: p.l,
                    quadrant: p.quadrant,
                    rows: p.rows.len(),
                    cols: p.cols.len(),
                    schur,
                    normalized_schur: schur * 2f64.powf(0.5 * (p.k + p.l) as f64),
                }
            })
            .collect()
    }
}

/// Smallest `K` with `Φ(2^K |x|)` reaching the innermost grid point.
pub fn covering_truncation(grid: &Grid1D) -> i32 {
    let inner = grid.points().into_iter().map(f64::abs).filter(|t| *t > 0.0).fold(f64::INFINITY, f64::min);
    (-inner.log2()).ceil().max(0.0) as i32 + 1
}

/// One dyadic band: the `(k, index range, weights)` of grid points with sign `s` and `Φ(2^k|t|) ≠ 0`.
fn bands(grid: &Grid1D, partition: &DyadicPartition, truncation: i32, sign: i8) -> Vec<(i32, Range<usize>, Vec<f64>)> {
    let pts = grid.points();
    let mut out = Vec::new();
    for j in partition.j_lo.max(-truncation)..=partition.j_hi {
        let mut lo = usize::MAX;
        let mut hi = 0;
        for (i, &t) in pts.iter().enumerate() {
            if t * sign as f64 > 0.0 && partition.phi_j(j, t.abs()) != 0.0 {
                lo = lo.min(i);
                hi = i + 1;
            }
        }
        if lo < hi {
            let w = pts[lo..hi].iter().map(|t| if t * sign as f64 > 0.0 { partition.phi_j(j, t.abs()) } else { 0.0 }).collect();
            out.push((-j, lo..hi, w));
        }
    }
    out
}

pub fn dyadic_pieces(op: &DiscretizedOperator, partition: &DyadicPartition, truncation: i32) -> Result<DyadicDecomposition> {
    if truncation < 0 {
        return Err(LabError::Invalid("truncation must be nonnegative".into()));
    }
    let (r, c) = (op.rows(), op.cols());
    let mut residual: Vec<Complex64> = op.entries().to_vec();
    let mut pieces = Vec::new();
    for sx in [1i8, -1] {
        let row_bands = bands(&op.row_grid, partition, truncation, sx);
        for sy in [1i8, -1] {
            let col_bands = bands(&op.col_grid, partition, truncation, sy);
            for (k, rows, wr) in &row_bands {
                for (l, cols, wc) in &col_bands {
                    let mut entries = Vec::with_capacity(rows.len() * cols.len());
                    for (a, i) in rows.clone().enumerate() {
                        let row = op.row(i);
                        for (b, jj) in cols.clone().enumerate() {
                            let v = row[jj] * (wr[a] * wc[b]);
                            residual[i * c + jj] -= v;
                            entries.push(v);
                        }
                    }
                    let row_grid = op.row_grid.cells(rows.start, rows.end)?;
                    let col_grid = op.col_grid.cells(cols.start, cols.end)?;
                    let sub = DiscretizedOperator::from_entries(row_grid, col_grid, entries, op.meta.clone())?;
                    pieces.push(DyadicPiece { k: *k, l: *l, quadrant: (sx, sy), rows: rows.clone(), cols: cols.clone(), op: sub });
                }
            }
        }
    }
    debug_assert_eq!(residual.len(), r * c);
    let fro = residual.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let scale = (op.row_grid.weight() / op.col_grid.weight()).sqrt();
    Ok(DyadicDecomposition { pieces, reconstruction_error: scale * fro })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::operator_norm_l2;
    use crate::operator::{discretize_t, ResolutionPolicy};
    use oio_core::cutoff::SmoothCutoff;
    use oio_core::HomogeneousPhase;

    fn op(phase: &str, lambda: f64) -> DiscretizedOperator {
        let s = HomogeneousPhase::parse(phase).unwrap();
        let c = SmoothCutoff::tensor_bump((0.0, 0.0), (0.9, 0.9));
        discretize_t(&s, &c, lambda, &ResolutionPolicy::default()).unwrap()
    }

    #[test]
    fn full_partition_reconstructs() {
        let t = op("x^2*y^2", 64.0);
        let part = DyadicPartition::new(-20, 0).unwrap();
        let k = covering_truncation(&t.row_grid).max(covering_truncation(&t.col_grid));
        let d = dyadic_pieces(&t, &part, k).unwrap();
        assert!(d.reconstruction_error < 1e-10, "{}", d.reconstruction_error);
        let short = dyadic_pieces(&t, &part, 2).unwrap();
        assert!(short.reconstruction_error > 1e-3);
    }

    #[test]
    fn piece_support_is_dyadic_box() {
        let t = op("x^2*y^2", 64.0);
        let part = DyadicPartition::new(-20, 0).unwrap();
        let d = dyadic_pieces(&t, &part, 6).unwrap();
        let p = d.pieces.iter().find(|p| p.k == 3 && p.l == 1 && p.quadrant == (1, -1)).unwrap();
        for x in p.op.row_grid.points() {
            assert!(x > 0.0 && x > 2f64.powi(-4) - 1e-12 && x < 2f64.powi(-2) + 1e-12);
        }
        for y in p.op.col_grid.points() {
            assert!(y < 0.0 && -y > 0.25 - 1e-12 && -y < 1.0 + 1e-12);
        }
    }

    #[test]
    fn schur_scales_with_box_size() {
        let t = op("x*y", 16.0);
        let part = DyadicPartition::new(-20, 0).unwrap();
        let d = dyadic_pieces(&t, &part, 5).unwrap();
        let inner: Vec<_> = d.summaries().into_iter().filter(|s| s.k >= 2 && s.l >= 2).collect();
        assert!(!inner.is_empty());
        let hi = inner.iter().map(|s| s.normalized_schur).fold(0.0, f64::max);
        let lo = inner.iter().map(|s| s.normalized_schur).fold(f64::MAX, f64::min);
        assert!(hi / lo < 2.0, "{lo} {hi}");
        for p in d.pieces.iter().take(8) {
            let sv = operator_norm_l2(&p.op, 1e-8).unwrap().value;
            assert!(sv <= p.schur() * (1.0 + 1e-9));
        }
    }
}
