//! Polynomial-twisted sharp function
//! `f♯_E(x) = sup_{Q ∋ x} avg_Q |f − f_Q^E|`, `f_Q^E(x) = e^{iP(x_Q,x)} avg_Q(e^{−iP(x_Q,·)} f)`.

use std::ops::Range;

use num_complex::Complex64;
use oio_core::BivariatePolynomial;

use crate::error::{LabError, Result};
use crate::grid::{Grid1D, GridFunction};
use crate::operator::row_coefficients;

/// A cube given by a range of grid cells.
pub type CellCube = Range<usize>;

/// Every dyadic-aligned run of `2^m` cells with `2^m ≥ min_cells`.
pub fn dyadic_cubes(grid: &Grid1D, min_cells: usize) -> Vec<CellCube> {
    let mut out = Vec::new();
    let mut len = min_cells.max(1).next_power_of_two();
    while len <= grid.count {
        out.extend((0..grid.count / len).map(|i| i * len..(i + 1) * len));
        len *= 2;
    }
    out
}

/// Every run of `len` consecutive cells.
pub fn sliding_cubes(grid: &Grid1D, len: usize) -> Vec<CellCube> {
    if len == 0 || len > grid.count {
        return Vec::new();
    }
    (0..=grid.count - len).map(|i| i..i + len).collect()
}

fn phase_row(p: &BivariatePolynomial, grid: &Grid1D, cube: &CellCube) -> Vec<f64> {
    let x_q = 0.5 * (grid.point(cube.start) + grid.point(cube.end - 1));
    let mut row = Vec::new();
    row_coefficients(&p.to_f64_terms(), x_q, &mut row);
    grid.points()[cube.clone()].iter().map(|&y| row.iter().rev().fold(0.0, |acc, c| acc * y + c)).collect()
}

/// `avg_Q |f − f_Q^E|` for one cube.
pub fn oscillation(f: &GridFunction<Complex64>, p: &BivariatePolynomial, cube: &CellCube) -> f64 {
    let phases = phase_row(p, &f.grid, cube);
    let vals = &f.values[cube.clone()];
    let n = vals.len() as f64;
    let avg: Complex64 = vals.iter().zip(&phases).map(|(v, t)| v * Complex64::from_polar(1.0, -t)).sum::<Complex64>() / n;
    vals.iter().zip(&phases).map(|(v, t)| (v - Complex64::from_polar(1.0, *t) * avg).norm()).sum::<f64>() / n
}

pub fn sharp_function_e(f: &GridFunction<Complex64>, p: &BivariatePolynomial, cubes: &[CellCube]) -> Result<GridFunction<f64>> {
    let mut out = vec![0.0f64; f.grid.count];
    for q in cubes {
        if q.start >= q.end || q.end > f.grid.count {
            return Err(LabError::Invalid(format!("cube {q:?} is not inside the grid")));
        }
        let o = oscillation(f, p, q);
        for v in &mut out[q.clone()] {
            *v = v.max(o);
        }
    }
    Ok(GridFunction { grid: f.grid, values: out })
}

/// The untwisted sharp function.
pub fn sharp_function(f: &GridFunction<Complex64>, cubes: &[CellCube]) -> Result<GridFunction<f64>> {
    sharp_function_e(f, &BivariatePolynomial::zero(), cubes)
}

/// Largest `f♯(x) − 2 f♯_E(x)` over the grid; `≤ 0` when the comparison holds.
pub fn comparison_excess(f: &GridFunction<Complex64>, p: &BivariatePolynomial, cubes: &[CellCube]) -> Result<f64> {
    let e = sharp_function_e(f, p, cubes)?;
    let c = sharp_function(f, cubes)?;
    Ok(c.values.iter().zip(&e.values).map(|(a, b)| a - 2.0 * b).fold(f64::MIN, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> Grid1D {
        Grid1D::new(1.0, 3.0, 64).unwrap()
    }

    #[test]
    fn twisted_exponential_has_zero_oscillation() {
        let g = grid();
        let p = BivariatePolynomial::parse("x*y").unwrap();
        let whole = vec![0..g.count];
        let x_q = 2.0;
        let f = GridFunction::sample(g, |y| Complex64::from_polar(1.0, x_q * y));
        let e = sharp_function_e(&f, &p, &whole).unwrap();
        assert!(e.values.iter().all(|v| *v < 1e-14));
        // The untwisted sharp function does see the oscillation, so `f♯ ≤ 2 f♯_E` fails here.
        let c = sharp_function(&f, &whole).unwrap();
        assert!(c.values[0] > 0.5);
        assert!(comparison_excess(&f, &p, &whole).unwrap() > 0.5);
    }

    #[test]
    fn constants_vanish() {
        let g = grid();
        let f = GridFunction::sample(g, |_| Complex64::new(2.0, -1.0));
        let s = sharp_function(&f, &dyadic_cubes(&g, 2)).unwrap();
        assert!(s.values.iter().all(|v| *v < 1e-15));
    }

    #[test]
    fn cube_families() {
        let g = Grid1D::new(0.0, 1.0, 8).unwrap();
        assert_eq!(dyadic_cubes(&g, 2).len(), 4 + 2 + 1);
        assert_eq!(sliding_cubes(&g, 3).len(), 6);
        let f = GridFunction::sample(g, |y| Complex64::new(y, 0.0));
        assert!(sharp_function(&f, &[0..9]).is_err());
    }

    #[test]
    fn oscillation_of_a_step() {
        // f = 0 on half the cube and 1 on the other: avg |f − 1/2| = 1/2.
        let g = Grid1D::new(0.0, 1.0, 8).unwrap();
        let f = GridFunction::sample(g, |y| Complex64::new(if y < 0.5 { 0.0 } else { 1.0 }, 0.0));
        assert!((oscillation(&f, &BivariatePolynomial::zero(), &(0..8)) - 0.5).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn comparison_holds_when_twist_is_constant_in_y(
            vals in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 32),
            coeff in -3i64..3,
        ) {
            let g = Grid1D::new(-1.0, 1.0, 32).unwrap();
            let f = GridFunction { grid: g, values: vals.iter().map(|&(a, b)| Complex64::new(a, b)).collect() };
            let p = BivariatePolynomial::parse(&format!("{coeff}*x^3")).unwrap();
            let mut cubes = dyadic_cubes(&g, 2);
            cubes.extend(sliding_cubes(&g, 5));
            prop_assert!(comparison_excess(&f, &p, &cubes).unwrap() <= 1e-12);
        }

        #[test]
        fn twisted_sharp_function_is_modulation_invariant(
            vals in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 32),
        ) {
            // With P = y², f and e^{iy²} f share the classical sharp function of e^{−iy²} f.
            let g = Grid1D::new(-1.0, 1.0, 32).unwrap();
            let f = GridFunction { grid: g, values: vals.iter().map(|&(a, b)| Complex64::new(a, b)).collect() };
            let p = BivariatePolynomial::parse("y^2").unwrap();
            let demod = GridFunction { grid: g, values: f.values.iter().zip(g.points()).map(|(v, y)| v * Complex64::from_polar(1.0, -y * y)).collect() };
            let cubes = dyadic_cubes(&g, 4);
            let a = sharp_function_e(&f, &p, &cubes).unwrap();
            let b = sharp_function(&demod, &cubes).unwrap();
            for (u, v) in a.values.iter().zip(&b.values) {
                prop_assert!((u - v).abs() < 1e-12);
            }
        }
    }
}
