//! Piecewise-linear maps on simplicial complexes and a common evaluation trait.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{solve_linear, Point};
use crate::scalar::Scalar;
use crate::simplicial::SimplicialComplex;

/// Something that can be evaluated pointwise.
pub trait MapEval<S: Scalar>: Send + Sync {
    fn target_dim(&self) -> usize;
    fn eval(&self, x: &Point<S>) -> Result<Point<S>>;
}

impl<S: Scalar, M: MapEval<S> + ?Sized> MapEval<S> for Arc<M> {
    fn target_dim(&self) -> usize {
        (**self).target_dim()
    }
    fn eval(&self, x: &Point<S>) -> Result<Point<S>> {
        (**self).eval(x)
    }
}

impl<S: Scalar, M: MapEval<S> + ?Sized> MapEval<S> for &M {
    fn target_dim(&self) -> usize {
        (**self).target_dim()
    }
    fn eval(&self, x: &Point<S>) -> Result<Point<S>> {
        (**self).eval(x)
    }
}

/// A map given by a closure.
pub struct FnMap<S: Scalar, F> {
    target_dim: usize,
    f: F,
    _marker: std::marker::PhantomData<fn() -> S>,
}

impl<S: Scalar, F> FnMap<S, F>
where
    F: Fn(&Point<S>) -> Result<Point<S>> + Send + Sync,
{
    pub fn new(target_dim: usize, f: F) -> Self {
        FnMap {
            target_dim,
            f,
            _marker: std::marker::PhantomData,
        }
    }
}

impl<S: Scalar, F> MapEval<S> for FnMap<S, F>
where
    F: Fn(&Point<S>) -> Result<Point<S>> + Send + Sync,
{
    fn target_dim(&self) -> usize {
        self.target_dim
    }
    fn eval(&self, x: &Point<S>) -> Result<Point<S>> {
        (self.f)(x)
    }
}

/// Uniform grid over bounding boxes of maximal simplices.
#[derive(Clone, Debug)]
struct Locator {
    lo: Vec<f64>,
    cell: Vec<f64>,
    counts: Vec<usize>,
    buckets: HashMap<Vec<usize>, Vec<usize>>,
}

const SLACK: f64 = 1e-7;

impl Locator {
    fn build<S: Scalar>(complex: &SimplicialComplex<S>, tops: &[usize]) -> Self {
        let dim = complex.ambient_dim();
        let boxes: Vec<(Vec<f64>, Vec<f64>)> = tops
            .iter()
            .map(|&t| {
                let vs = &complex.simplices()[t];
                let mut lo = vec![f64::INFINITY; dim];
                let mut hi = vec![f64::NEG_INFINITY; dim];
                for &v in vs {
                    for (k, c) in complex.vertex(v).to_f64().into_iter().enumerate() {
                        lo[k] = lo[k].min(c - SLACK);
                        hi[k] = hi[k].max(c + SLACK);
                    }
                }
                (lo, hi)
            })
            .collect();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for (a, b) in &boxes {
            for k in 0..dim {
                lo[k] = lo[k].min(a[k]);
                hi[k] = hi[k].max(b[k]);
            }
        }
        // about tops^(1/dim) cells per axis, capped to keep the key space small
        let per_axis =
            ((tops.len() as f64).powf(1.0 / dim.max(1) as f64).ceil() as usize).clamp(1, 64);
        let counts = vec![per_axis; dim];
        let cell: Vec<f64> = (0..dim)
            .map(|k| ((hi[k] - lo[k]) / per_axis as f64).max(1e-12))
            .collect();
        let mut loc = Locator {
            lo,
            cell,
            counts,
            buckets: HashMap::new(),
        };
        for (i, (a, b)) in boxes.iter().enumerate() {
            let ca = loc.cell_of(a);
            let cb = loc.cell_of(b);
            let mut key = ca.clone();
            loop {
                loc.buckets.entry(key.clone()).or_default().push(tops[i]);
                // odometer over the box of cells
                let mut k = 0;
                while k < dim {
                    if key[k] < cb[k] {
                        key[k] += 1;
                        break;
                    }
                    key[k] = ca[k];
                    k += 1;
                }
                if k == dim {
                    break;
                }
            }
        }
        loc
    }

    fn cell_of(&self, x: &[f64]) -> Vec<usize> {
        x.iter()
            .enumerate()
            .map(|(k, &c)| {
                let i = ((c - self.lo[k]) / self.cell[k]).floor();
                (i.max(0.0) as usize).min(self.counts[k] - 1)
            })
            .collect()
    }

    fn candidates(&self, x: &[f64]) -> &[usize] {
        self.buckets
            .get(&self.cell_of(x))
            .map_or(&[], Vec::as_slice)
    }
}

/// A simplexwise-linear map `|K| -> S^N` given by its vertex values.
#[derive(Clone, Debug)]
pub struct PLMap<S: Scalar> {
    domain: Arc<SimplicialComplex<S>>,
    values: Vec<Point<S>>,
    tops: Vec<usize>,
    locator: Arc<Locator>,
}

impl<S: Scalar> PLMap<S> {
    pub fn new(domain: SimplicialComplex<S>, values: Vec<Point<S>>) -> Result<Self> {
        Self::on_shared(Arc::new(domain), values)
    }

    pub fn on_shared(domain: Arc<SimplicialComplex<S>>, values: Vec<Point<S>>) -> Result<Self> {
        if values.len() != domain.vertices().len() {
            return Err(Error::input(format!(
                "map has {} vertex values for {} vertices",
                values.len(),
                domain.vertices().len()
            )));
        }
        let n = values.first().map_or(0, Point::dim);
        for v in &values {
            v.check_dim(n)?;
        }
        let tops = domain.maximal_simplices();
        let locator = Arc::new(Locator::build(&domain, &tops));
        Ok(PLMap {
            domain,
            values,
            tops,
            locator,
        })
    }

    /// Samples `f` at the vertices of `domain`.
    pub fn bake(domain: SimplicialComplex<S>, f: &(impl MapEval<S> + ?Sized)) -> Result<Self> {
        let values = domain
            .vertices()
            .iter()
            .map(|v| f.eval(v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(domain, values)
    }

    pub fn domain(&self) -> &SimplicialComplex<S> {
        &self.domain
    }

    pub fn shared_domain(&self) -> Arc<SimplicialComplex<S>> {
        Arc::clone(&self.domain)
    }

    pub fn values(&self) -> &[Point<S>] {
        &self.values
    }

    pub fn value(&self, vertex: usize) -> &Point<S> {
        &self.values[vertex]
    }

    /// Finds a maximal simplex containing `x` and its barycentric coordinates.
    pub fn locate(&self, x: &Point<S>) -> Option<(usize, Vec<S>)> {
        let xf = x.to_f64();
        let hit = |&t: &usize| {
            self.domain
                .simplex(t)
                .barycentric_coordinates(x)
                .ok()?
                .inside()
                .map(|c| (t, c))
        };
        self.locator
            .candidates(&xf)
            .iter()
            .find_map(hit)
            .or_else(|| self.tops.iter().find_map(hit))
    }

    /// Linear part and offset on one simplex: `f(x) = A x + b` for `x` in it.
    /// Only meaningful for full-dimensional simplices; others return `None`.
    pub fn affine_part(&self, simplex: usize) -> Option<(Vec<Vec<S>>, Point<S>)> {
        let s = &self.domain.simplices()[simplex];
        let d = self.domain.ambient_dim();
        if s.len() != d + 1 {
            return None;
        }
        let v0 = self.domain.vertex(s[0]);
        let edges: Vec<Point<S>> = s[1..].iter().map(|&v| self.domain.vertex(v) - v0).collect();
        let f0 = &self.values[s[0]];
        let n = f0.dim();
        // E^T A^T = F^T row by row
        let mut rows = vec![vec![S::zero(); d]; n];
        for (j, row) in rows.iter_mut().enumerate() {
            let m: Vec<Vec<S>> = edges.iter().map(|e| e.coords().to_vec()).collect();
            let rhs: Vec<S> = s[1..]
                .iter()
                .map(|&v| self.values[v][j].clone() - f0[j].clone())
                .collect();
            *row = solve_linear(m, rhs)?;
        }
        let offset: Vec<S> = (0..n)
            .map(|j| {
                let ax = rows[j]
                    .iter()
                    .zip(v0.coords())
                    .fold(S::zero(), |a, (r, c)| a + r.clone() * c.clone());
                f0[j].clone() - ax
            })
            .collect();
        Some((rows, Point::new(offset)))
    }

    /// Upper bound on the euclidean Lipschitz constant on every simplex
    /// (Frobenius norm of the simplexwise linear part).
    pub fn lipschitz_bound(&self) -> S {
        let mut best = S::zero();
        for &t in &self.tops {
            best = S::max_of(best, self.frobenius_sq(t));
        }
        best.sqrt_upper()
    }

    /// `|L|_F^2 = tr(F^T G^{-1} F)` with edge Gram matrix `G` and image edges `F`.
    fn frobenius_sq(&self, t: usize) -> S {
        let s = &self.domain.simplices()[t];
        if s.len() < 2 {
            return S::zero();
        }
        let v0 = self.domain.vertex(s[0]);
        let f0 = &self.values[s[0]];
        let e: Vec<Point<S>> = s[1..].iter().map(|&v| self.domain.vertex(v) - v0).collect();
        let f: Vec<Point<S>> = s[1..].iter().map(|&v| &self.values[v] - f0).collect();
        let g: Vec<Vec<S>> = e
            .iter()
            .map(|a| e.iter().map(|b| a.dot(b)).collect())
            .collect();
        let mut total = S::zero();
        for j in 0..f0.dim() {
            let col: Vec<S> = f.iter().map(|p| p[j].clone()).collect();
            let y = solve_linear(g.clone(), col.clone()).expect("nondegenerate simplex");
            total = total
                + y.into_iter()
                    .zip(col)
                    .fold(S::zero(), |a, (yi, ci)| a + yi * ci);
        }
        total
    }

    /// Pointwise `sum_i c_i f_i` for maps on the same domain.
    pub fn lincomb(terms: &[(S, &PLMap<S>)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::input("empty linear combination"))?
            .1;
        let mut values = vec![Point::zeros(first.target_dim()); first.values.len()];
        for (c, m) in terms {
            if !Arc::ptr_eq(&m.domain, &first.domain) && m.values.len() != first.values.len() {
                return Err(Error::input(
                    "linear combination of maps on different domains",
                ));
            }
            for (acc, v) in values.iter_mut().zip(&m.values) {
                *acc = acc.clone() + v.scale(c);
            }
        }
        Self::on_shared(Arc::clone(&first.domain), values)
    }

    /// The same map on a subdivision of the domain.
    pub fn refine_to(&self, sub: Arc<SimplicialComplex<S>>) -> Result<Self> {
        let values = sub
            .vertices()
            .iter()
            .map(|v| self.eval(v))
            .collect::<Result<Vec<_>>>()?;
        Self::on_shared(sub, values)
    }

    /// Union of coordinate supports of all vertex values.
    pub fn support(&self) -> std::collections::BTreeSet<usize> {
        self.values.iter().flat_map(|v| v.support()).collect()
    }
}

impl<S: Scalar> MapEval<S> for PLMap<S> {
    fn target_dim(&self) -> usize {
        self.values.first().map_or(0, Point::dim)
    }

    fn eval(&self, x: &Point<S>) -> Result<Point<S>> {
        x.check_dim(self.domain.ambient_dim())?;
        let (t, coeffs) = self
            .locate(x)
            .ok_or_else(|| Error::input(format!("point {x} is outside the domain")))?;
        let s = &self.domain.simplices()[t];
        let pts: Vec<&Point<S>> = s.iter().map(|&v| &self.values[v]).collect();
        Ok(Point::combination(&pts, &coeffs))
    }
}

/// Vertex values of a map on a complex given elsewhere.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct MapFile<S: Scalar> {
    pub values: Vec<Point<S>>,
}

/// A self-contained PL map: maximal simplices plus vertex values.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct PLMapFile<S: Scalar> {
    pub vertices: Vec<Point<S>>,
    pub simplices: Vec<Vec<usize>>,
    pub values: Vec<Point<S>>,
}

impl<S: Scalar> PLMapFile<S> {
    pub fn from_map(f: &PLMap<S>) -> Self {
        let d = f.domain();
        PLMapFile {
            vertices: d.vertices().to_vec(),
            simplices: d
                .maximal_simplices()
                .into_iter()
                .map(|i| d.simplices()[i].clone())
                .collect(),
            values: f.values().to_vec(),
        }
    }

    pub fn into_map(self) -> Result<PLMap<S>> {
        PLMap::new(
            SimplicialComplex::new(self.vertices, self.simplices)?,
            self.values,
        )
    }
}
