//! Extending boundary maps of a simplex over its interior by coning from
//! the barycenter.
//!
//! Each `x` in a rank-`r` simplex is written as `x = t b + sum_{j in J} t_j v_j`
//! with `t = r min_i s_i`. The filled map sends `x` to
//! `t g(x0) + (1 - t) g(y)`, where `y` is the radial projection of `x` onto
//! the face spanned by `J`, and `x0` is a fixed boundary anchor.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Simplex};
use crate::plmap::{MapEval, PLMap};
use crate::scalar::{serde_scalar, serde_scalars, Scalar};
use crate::simplicial::SimplicialComplex;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct ConeDecomposition<S: Scalar> {
    #[serde(with = "serde_scalar")]
    pub t: S,
    /// Vertex indices with positive residual coefficient.
    pub j: Vec<usize>,
    /// `t_j` for `j` in `J`, same order.
    #[serde(with = "serde_scalars")]
    pub coefficients: Vec<S>,
    #[serde(with = "serde_scalars")]
    pub barycentric: Vec<S>,
}

impl<S: Scalar> ConeDecomposition<S> {
    /// Indices attaining the minimal barycentric coordinate.
    pub fn minimal_indices(&self) -> Vec<usize> {
        let m = self.barycentric.iter().cloned().fold(S::one(), S::min_of);
        (0..self.barycentric.len())
            .filter(|&i| self.barycentric[i].approx_eq(&m))
            .collect()
    }

    /// All index sets that give a valid decomposition of the same point: the
    /// strict residual set plus any proper choice of tied minimal indices.
    pub fn admissible_index_sets(&self) -> Vec<Vec<usize>> {
        let mins = self.minimal_indices();
        let base: BTreeSet<usize> = self.j.iter().copied().collect();
        let k = mins.len();
        let mut out = Vec::new();
        for mask in 0u32..(1 << k) {
            if mask.count_ones() as usize == k {
                continue;
            }
            let mut set = base.clone();
            set.extend((0..k).filter(|b| mask & (1 << b) != 0).map(|b| mins[b]));
            out.push(set.into_iter().collect());
        }
        out
    }

    /// Point `sum_{j in J} t_j v_j / (1 - t)` on the face spanned by `J`;
    /// `None` when `t = 1`.
    pub fn projection(&self, simplex: &Simplex<S>, j: &[usize]) -> Option<Point<S>> {
        let rest = S::one() - self.t.clone();
        if rest.is_negligible() {
            return None;
        }
        let m = self.barycentric.iter().cloned().fold(S::one(), S::min_of);
        let pts: Vec<&Point<S>> = j.iter().map(|&i| &simplex.vertices()[i]).collect();
        let w: Vec<S> = j
            .iter()
            .map(|&i| (self.barycentric[i].clone() - m.clone()) / rest.clone())
            .collect();
        Some(Point::combination(&pts, &w))
    }
}

/// Decomposes `x` in `simplex` as a cone point over the barycenter.
pub fn cone_decomposition<S: Scalar>(
    simplex: &Simplex<S>,
    x: &Point<S>,
) -> Result<ConeDecomposition<S>> {
    let s = simplex
        .barycentric_coordinates(x)?
        .inside()
        .ok_or_else(|| Error::input(format!("point {x} is not in the simplex")))?;
    let r = S::from_count(simplex.rank());
    let m = s.iter().cloned().fold(S::one(), S::min_of);
    let t = r * m.clone();
    let j: Vec<usize> = (0..s.len())
        .filter(|&i| (s[i].clone() - m.clone()).is_strictly_positive())
        .collect();
    let coefficients = j.iter().map(|&i| s[i].clone() - m.clone()).collect();
    Ok(ConeDecomposition {
        t,
        j,
        coefficients,
        barycentric: s,
    })
}

/// Evaluation record: `value = t g(anchor) + (1 - t) g(y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct FillCertificate<S: Scalar> {
    #[serde(with = "serde_scalar")]
    pub t: S,
    pub anchor_value: Point<S>,
    pub y: Option<Point<S>>,
    pub y_value: Option<Point<S>>,
    pub value: Point<S>,
}

impl<S: Scalar> FillCertificate<S> {
    /// Checks the segment identity.
    pub fn verify(&self) -> bool {
        match &self.y_value {
            None => self.t.approx_eq(&S::one()) && self.value.approx_eq(&self.anchor_value),
            Some(gy) => gy.lerp(&self.anchor_value, &self.t).approx_eq(&self.value),
        }
    }
}

/// The filled extension of a boundary map over a simplex.
#[derive(Clone, Debug)]
pub struct Filling<S: Scalar, G> {
    simplex: Simplex<S>,
    anchor: Point<S>,
    gamma: G,
}

impl<S: Scalar, G: MapEval<S>> Filling<S, G> {
    /// Anchors at the first vertex.
    pub fn new(simplex: Simplex<S>, gamma: G) -> Result<Self> {
        let anchor = simplex.vertices()[0].clone();
        Self::with_anchor(simplex, anchor, gamma)
    }

    pub fn with_anchor(simplex: Simplex<S>, anchor: Point<S>, gamma: G) -> Result<Self> {
        if simplex.rank() < 2 {
            return Err(Error::input("cannot fill a point: its boundary is empty"));
        }
        if !simplex.on_boundary(&anchor) {
            return Err(Error::input(format!(
                "anchor {anchor} is not on the boundary"
            )));
        }
        Ok(Filling {
            simplex,
            anchor,
            gamma,
        })
    }

    pub fn simplex(&self) -> &Simplex<S> {
        &self.simplex
    }

    pub fn anchor(&self) -> &Point<S> {
        &self.anchor
    }

    pub fn boundary_map(&self) -> &G {
        &self.gamma
    }

    pub fn eval_certified(&self, x: &Point<S>) -> Result<FillCertificate<S>> {
        let dec = cone_decomposition(&self.simplex, x)?;
        self.eval_with_index_set(&dec, &dec.j)
    }

    /// Evaluates using a specific admissible index set.
    pub fn eval_with_index_set(
        &self,
        dec: &ConeDecomposition<S>,
        j: &[usize],
    ) -> Result<FillCertificate<S>> {
        let anchor_value = self.gamma.eval(&self.anchor)?;
        match dec.projection(&self.simplex, j) {
            None => Ok(FillCertificate {
                t: dec.t.clone(),
                value: anchor_value.clone(),
                anchor_value,
                y: None,
                y_value: None,
            }),
            Some(y) => {
                let gy = self.gamma.eval(&y)?;
                let value = gy.lerp(&anchor_value, &dec.t);
                Ok(FillCertificate {
                    t: dec.t.clone(),
                    anchor_value,
                    y: Some(y),
                    y_value: Some(gy),
                    value,
                })
            }
        }
    }
}

impl<S: Scalar, G: MapEval<S>> MapEval<S> for Filling<S, G> {
    fn target_dim(&self) -> usize {
        self.gamma.target_dim()
    }

    fn eval(&self, x: &Point<S>) -> Result<Point<S>> {
        Ok(self.eval_certified(x)?.value)
    }
}

/// The cone from the barycenter of `simplex` over a triangulation of its
/// boundary. The barycenter is appended as the last vertex.
pub fn cone_complex<S: Scalar>(
    simplex: &Simplex<S>,
    boundary: &SimplicialComplex<S>,
) -> Result<SimplicialComplex<S>> {
    let mut vertices = boundary.vertices().to_vec();
    let apex = vertices.len();
    vertices.push(simplex.barycenter());
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for t in boundary.maximal_simplices() {
        let mut c = boundary.simplices()[t].clone();
        c.push(apex);
        cells.push(c);
    }
    SimplicialComplex::new(vertices, cells)
}

/// Exact PL form of the filling of a PL boundary map: linear on every cone
/// cell from the barycenter over the boundary triangulation.
pub fn bake_filling<S: Scalar>(simplex: &Simplex<S>, gamma: &PLMap<S>) -> Result<PLMap<S>> {
    let filling = Filling::new(simplex.clone(), gamma)?;
    let cone = cone_complex(simplex, gamma.domain())?;
    PLMap::bake(cone, &filling)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type P = Point<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn triangle() -> Simplex<Rational> {
        Simplex::new(vec![
            P::from_i64(&[0, 0]),
            P::from_i64(&[1, 0]),
            P::from_i64(&[0, 1]),
        ])
        .unwrap()
    }

    #[test]
    fn decomposition_examples() {
        let d = triangle();
        let b = cone_decomposition(&d, &d.barycenter()).unwrap();
        assert_eq!(b.t, q(1, 1));
        assert!(b.j.is_empty());
        let v = cone_decomposition(&d, &P::from_i64(&[1, 0])).unwrap();
        assert_eq!(v.t, q(0, 1));
        assert_eq!(
            (v.j.clone(), v.coefficients.clone()),
            (vec![1], vec![q(1, 1)])
        );
        let x = cone_decomposition(&d, &P::from_ratios(&[(1, 2), (1, 4)])).unwrap();
        assert_eq!(x.t, q(3, 4));
        assert_eq!(
            (x.j.clone(), x.coefficients.clone()),
            (vec![1], vec![q(1, 4)])
        );
        assert!(cone_decomposition(&d, &P::from_i64(&[1, 1])).is_err());
    }

    #[test]
    fn interval_midpoint_takes_anchor_value() {
        let d = Simplex::new(vec![P::from_i64(&[0]), P::from_i64(&[1])]).unwrap();
        let boundary = SimplicialComplex::boundary_of(&d).unwrap();
        let gamma =
            PLMap::new(boundary, vec![P::from_i64(&[5, 1]), P::from_i64(&[-3, 2])]).unwrap();
        let f = Filling::new(d, &gamma).unwrap();
        assert_eq!(
            f.eval(&P::from_ratios(&[(1, 2)])).unwrap(),
            P::from_i64(&[5, 1])
        );
        assert_eq!(
            f.eval(&P::from_ratios(&[(1, 4)])).unwrap(),
            P::from_i64(&[5, 1])
        );
        // halfway between barycenter and the far end
        assert_eq!(
            f.eval(&P::from_ratios(&[(3, 4)])).unwrap(),
            P::from_i64(&[1, 1]) + P::from_ratios(&[(0, 1), (1, 2)])
        );
    }

    #[test]
    fn rejects_points_and_interior_anchor() {
        let p = Simplex::new(vec![P::from_i64(&[0])]).unwrap();
        let g = crate::plmap::FnMap::new(1, |x: &P| Ok(x.clone()));
        assert!(Filling::new(p, &g).is_err());
        let d = triangle();
        assert!(Filling::with_anchor(d.clone(), d.barycenter(), &g).is_err());
    }

    #[test]
    fn baked_filling_matches_evaluator() {
        let d = triangle();
        let boundary = SimplicialComplex::boundary_of(&d)
            .unwrap()
            .barycentric_subdivide();
        let values = boundary
            .vertices()
            .iter()
            .map(|v| {
                P::new(vec![
                    v[0].clone() * v[1].clone(),
                    v[0].clone() - v[1].clone(),
                ])
            })
            .collect();
        let gamma = PLMap::new(boundary, values).unwrap();
        let baked = bake_filling(&d, &gamma).unwrap();
        let f = Filling::new(d, &gamma).unwrap();
        for (a, b) in [(1, 7), (2, 9), (1, 3), (3, 5), (1, 10)] {
            let x = P::from_ratios(&[(a, 11), (b, 13)]);
            assert_eq!(baked.eval(&x).unwrap(), f.eval(&x).unwrap());
        }
    }
}
