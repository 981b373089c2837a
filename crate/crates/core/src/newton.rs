//! Reduced Newton polyhedron of a polynomial phase.
//!
//! A monomial `x^k y^l` with `kl ≠ 0` contributes the point `(k, l)`; the
//! polyhedron is the convex hull of the quadrants `{(s, t) : s ≥ k, t ≥ l}`.
//! Its vertices form a convex staircase with strictly decreasing `l`.

use alloc::vec::Vec;

use crate::bivariate::BivariatePolynomial;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NewtonPolyhedron {
    vertices: Vec<(u32, u32)>,
}

fn cross(o: (u32, u32), a: (u32, u32), b: (u32, u32)) -> i64 {
    let (ox, oy) = (o.0 as i64, o.1 as i64);
    (a.0 as i64 - ox) * (b.1 as i64 - oy) - (a.1 as i64 - oy) * (b.0 as i64 - ox)
}

impl NewtonPolyhedron {
    pub fn from_points(points: &[(u32, u32)]) -> Result<Self> {
        let mut pts: Vec<(u32, u32)> = points.iter().copied().filter(|&(k, l)| k > 0 && l > 0).collect();
        if pts.is_empty() {
            return Err(Error::NoMixedTerms);
        }
        pts.sort_unstable();
        pts.dedup();
        let mut stair: Vec<(u32, u32)> = Vec::new();
        for p in pts {
            if stair.last().map_or(true, |last| p.1 < last.1) {
                stair.push(p);
            }
        }
        let mut hull: Vec<(u32, u32)> = Vec::new();
        for p in stair {
            while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        Ok(Self { vertices: hull })
    }

    pub fn vertices(&self) -> &[(u32, u32)] {
        &self.vertices
    }

    pub fn is_vertex(&self, k: u32, l: u32) -> bool {
        self.vertices.contains(&(k, l))
    }

    /// Membership of a lattice point in the polyhedron.
    pub fn contains(&self, k: u32, l: u32) -> bool {
        let v = &self.vertices;
        let last = v[v.len() - 1];
        if k < v[0].0 {
            return false;
        }
        if k >= last.0 {
            return l >= last.1;
        }
        v.windows(2)
            .find(|w| w[0].0 <= k && k <= w[1].0)
            .is_some_and(|w| cross(w[0], w[1], (k, l)) >= 0)
    }
}

pub fn reduced_newton_polyhedron(poly: &BivariatePolynomial) -> Result<NewtonPolyhedron> {
    let pts: Vec<(u32, u32)> = poly.terms().map(|(&k, _)| k).collect();
    NewtonPolyhedron::from_points(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn newton(text: &str) -> Result<NewtonPolyhedron> {
        reduced_newton_polyhedron(&BivariatePolynomial::parse(text).unwrap())
    }

    #[test]
    fn examples() {
        assert_eq!(newton("x^3*y + x*y^3").unwrap().vertices(), &[(1, 3), (3, 1)]);
        assert_eq!(newton("x^2*y^2").unwrap().vertices(), &[(2, 2)]);
        assert_eq!(newton("x^3*y + x^2*y^2 + x*y^3").unwrap().vertices(), &[(1, 3), (3, 1)]);
        assert_eq!(newton("x^4 + y^4"), Err(Error::NoMixedTerms));
        // dominated and interior points drop out
        assert_eq!(newton("x*y^4 + x^3*y^3 + x^2*y + x^5*y").unwrap().vertices(), &[(1, 4), (2, 1)]);
        assert_eq!(newton("x*y^6 + x^2*y^2 + x^6*y").unwrap().vertices(), &[(1, 6), (2, 2), (6, 1)]);
    }

    #[test]
    fn membership() {
        let n = newton("x*y^6 + x^2*y^2 + x^6*y").unwrap();
        assert!(n.contains(2, 2) && n.contains(7, 7) && n.contains(4, 2));
        assert!(!n.contains(1, 5) && !n.contains(3, 1));
    }

    /// Brute-force oracle: a generator is a vertex iff no other generator
    /// dominates it and it does not lie on or above a chord between a
    /// generator to its left and one to its right.
    fn oracle_vertices(points: &[(u32, u32)]) -> Vec<(u32, u32)> {
        let pts: Vec<(i64, i64)> =
            points.iter().filter(|p| p.0 > 0 && p.1 > 0).map(|&(a, b)| (a as i64, b as i64)).collect();
        let mut out = Vec::new();
        for &p in &pts {
            let dominated = pts.iter().any(|&q| q != p && q.0 <= p.0 && q.1 <= p.1);
            let above_chord = pts.iter().any(|&a| {
                pts.iter().any(|&b| {
                    a.0 < p.0 && p.0 < b.0 && (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= 0
                })
            });
            if !dominated && !above_chord {
                out.push((p.0 as u32, p.1 as u32));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    proptest! {
        #[test]
        fn hull_matches_oracle(points in proptest::collection::vec((0u32..9, 0u32..9), 1..12)) {
            let got = NewtonPolyhedron::from_points(&points);
            let want = oracle_vertices(&points);
            if want.is_empty() {
                prop_assert_eq!(got, Err(Error::NoMixedTerms));
            } else {
                let got = got.unwrap();
                prop_assert_eq!(got.vertices().to_vec(), want);
                for w in got.vertices().windows(2) {
                    prop_assert!(w[0].0 < w[1].0 && w[0].1 > w[1].1);
                }
                for &(k, l) in &points {
                    if k > 0 && l > 0 {
                        prop_assert!(got.contains(k, l));
                    }
                }
            }
        }
    }

    #[test]
    fn vertex_helpers() {
        let n = newton("x^3*y + x*y^3").unwrap();
        assert!(n.is_vertex(1, 3) && !n.is_vertex(2, 2));
    }
}
