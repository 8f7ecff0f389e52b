//! Finite geometric simplicial complexes, barycentric subdivision on flags,
//! subcomplex carriers and staircase triangulations of prisms.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{affinely_independent, Point, Simplex};
use crate::lp::{minimize, LpOutcome};
use crate::scalar::Scalar;

/// A finite simplicial complex stored as a vertex table plus index tuples.
///
/// Every simplex lists its vertices in the canonical global order
/// (lexicographic on coordinates, ties by table index), and the simplex list
/// is closed under taking faces.
#[derive(Clone, Debug)]
pub struct SimplicialComplex<S: Scalar> {
    vertices: Vec<Point<S>>,
    simplices: Vec<Vec<usize>>,
    lookup: HashMap<Vec<usize>, usize>,
    order: Vec<usize>,
    /// Float bounding box per simplex, a prefilter for point location.
    boxes: Vec<(Vec<f64>, Vec<f64>)>,
}

fn global_order<S: Scalar>(vertices: &[Point<S>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vertices.len()).collect();
    idx.sort_by(|&a, &b| {
        vertices[a]
            .partial_cmp(&vertices[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut rank = vec![0; vertices.len()];
    for (r, &i) in idx.iter().enumerate() {
        rank[i] = r;
    }
    rank
}

fn nonempty_subsets(s: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let n = s.len();
    (1u32..(1 << n)).map(move |mask| {
        (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| s[i])
            .collect()
    })
}

impl<S: Scalar> SimplicialComplex<S> {
    /// Builds the face closure of the given simplices.
    pub fn new(vertices: Vec<Point<S>>, simplices: Vec<Vec<usize>>) -> Result<Self> {
        let dim = vertices
            .first()
            .ok_or_else(|| Error::input("complex without vertices"))?
            .dim();
        for v in &vertices {
            v.check_dim(dim)?;
        }
        for s in &simplices {
            if s.is_empty() {
                return Err(Error::input("empty simplex"));
            }
            if let Some(&bad) = s.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::input(format!("vertex index {bad} out of range")));
            }
            let set: BTreeSet<usize> = s.iter().copied().collect();
            if set.len() != s.len() {
                return Err(Error::input("repeated vertex in simplex"));
            }
            let pts: Vec<Point<S>> = s.iter().map(|&i| vertices[i].clone()).collect();
            if !affinely_independent(&pts) {
                return Err(Error::input(format!("simplex {s:?} is affinely dependent")));
            }
        }
        Ok(Self::from_parts(vertices, simplices))
    }

    fn from_parts(vertices: Vec<Point<S>>, simplices: Vec<Vec<usize>>) -> Self {
        let order = global_order(&vertices);
        let mut all = BTreeSet::new();
        for s in simplices {
            let mut s = s;
            s.sort_by_key(|&i| order[i]);
            for f in nonempty_subsets(&s) {
                all.insert(f);
            }
        }
        let mut simplices: Vec<Vec<usize>> = all.into_iter().collect();
        simplices.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let lookup = simplices
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let float: Vec<Vec<f64>> = vertices.iter().map(Point::to_f64).collect();
        let boxes = simplices
            .iter()
            .map(|s| {
                let d = float[s[0]].len();
                let lo = (0..d)
                    .map(|k| s.iter().map(|&v| float[v][k]).fold(f64::INFINITY, f64::min))
                    .collect();
                let hi = (0..d)
                    .map(|k| {
                        s.iter()
                            .map(|&v| float[v][k])
                            .fold(f64::NEG_INFINITY, f64::max)
                    })
                    .collect();
                (lo, hi)
            })
            .collect();
        SimplicialComplex {
            vertices,
            simplices,
            lookup,
            order,
            boxes,
        }
    }

    /// The complex of all faces of one simplex.
    pub fn from_simplex(simplex: &Simplex<S>) -> Self {
        let n = simplex.rank();
        Self::from_parts(simplex.vertices().to_vec(), vec![(0..n).collect()])
    }

    /// The proper faces of one simplex (a triangulation of its boundary).
    pub fn boundary_of(simplex: &Simplex<S>) -> Result<Self> {
        let n = simplex.rank();
        if n < 2 {
            return Err(Error::input("a point has empty boundary"));
        }
        let facets = (0..n)
            .map(|skip| (0..n).filter(|&i| i != skip).collect())
            .collect();
        Ok(Self::from_parts(simplex.vertices().to_vec(), facets))
    }

    pub fn vertices(&self) -> &[Point<S>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Point<S> {
        &self.vertices[i]
    }

    pub fn ambient_dim(&self) -> usize {
        self.vertices[0].dim()
    }

    /// All simplices, faces first (sorted by rank, then indices).
    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn index_of(&self, simplex: &[usize]) -> Option<usize> {
        let mut s = simplex.to_vec();
        s.sort_by_key(|&i| self.order[i]);
        self.lookup.get(&s).copied()
    }

    pub fn simplex(&self, idx: usize) -> Simplex<S> {
        Simplex::new_unchecked(
            self.simplices[idx]
                .iter()
                .map(|&i| self.vertices[i].clone())
                .collect(),
        )
    }

    pub fn rank(&self) -> usize {
        self.simplices.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Position of each vertex in the canonical global order.
    pub fn vertex_order(&self) -> &[usize] {
        &self.order
    }

    /// Simplices that are not a proper face of another simplex.
    pub fn maximal_simplices(&self) -> Vec<usize> {
        let mut covered = vec![false; self.simplices.len()];
        for s in &self.simplices {
            if s.len() < 2 {
                continue;
            }
            for skip in 0..s.len() {
                let facet: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                if let Some(&f) = self.lookup.get(&facet) {
                    covered[f] = true;
                }
            }
        }
        (0..self.simplices.len()).filter(|&i| !covered[i]).collect()
    }

    pub fn simplices_of_rank(&self, rank: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.simplices.len()).filter(move |&i| self.simplices[i].len() == rank)
    }

    /// Indices of proper faces of simplex `idx`.
    pub fn proper_faces(&self, idx: usize) -> Vec<usize> {
        let s = &self.simplices[idx];
        nonempty_subsets(s)
            .filter(|f| f.len() < s.len())
            .filter_map(|f| self.lookup.get(&f).copied())
            .collect()
    }

    /// Indices of simplices having `idx` as a face (including itself).
    pub fn cofaces(&self, idx: usize) -> Vec<usize> {
        let s: BTreeSet<usize> = self.simplices[idx].iter().copied().collect();
        (0..self.simplices.len())
            .filter(|&j| s.iter().all(|v| self.simplices[j].contains(v)))
            .collect()
    }

    pub fn max_diameter_sq(&self) -> S {
        self.maximal_simplices()
            .into_iter()
            .map(|i| self.simplex(i).diameter_sq())
            .fold(S::zero(), S::max_of)
    }

    /// Simplices of rank at most `max_rank`, on the same vertex table.
    pub fn skeleton(&self, max_rank: usize) -> Self {
        let keep: Vec<Vec<usize>> = self
            .simplices
            .iter()
            .filter(|s| s.len() <= max_rank)
            .cloned()
            .collect();
        Self::from_parts(self.vertices.clone(), keep)
    }

    /// First simplex (lowest rank first) containing `x`, with coordinates.
    pub fn locate(&self, x: &Point<S>) -> Option<(usize, Vec<S>)> {
        let xf = x.to_f64();
        let near = |(lo, hi): &(Vec<f64>, Vec<f64>)| {
            xf.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| {
                let slack = 1e-9 * (1.0 + v.abs());
                *v >= l - slack && *v <= h + slack
            })
        };
        (0..self.simplices.len())
            .filter(|&i| near(&self.boxes[i]))
            .find_map(|i| {
                self.simplex(i)
                    .barycentric_coordinates(x)
                    .ok()?
                    .inside()
                    .map(|c| (i, c))
            })
    }

    pub fn contains_point(&self, x: &Point<S>) -> bool {
        self.maximal_simplices()
            .into_iter()
            .any(|i| self.simplex(i).contains(x))
    }

    pub fn barycentric_subdivide(&self) -> Self {
        self.barycentric_subdivide_with_origin().0
    }

    /// `bsd(self)` together with, for every new simplex, the index of the
    /// simplex of `self` whose relative interior contains its interior.
    pub fn barycentric_subdivide_with_origin(&self) -> (Self, Vec<usize>) {
        let n_old = self.vertices.len();
        let mut vertices = self.vertices.clone();
        // new vertex id per old simplex
        let mut bary_id = vec![0usize; self.simplices.len()];
        for (i, s) in self.simplices.iter().enumerate() {
            if s.len() == 1 {
                bary_id[i] = s[0];
            } else {
                bary_id[i] = vertices.len();
                vertices.push(self.simplex(i).barycenter());
            }
        }
        debug_assert!(vertices.len() >= n_old);
        let mut chains: Vec<(Vec<usize>, usize)> = Vec::new();
        for top in 0..self.simplices.len() {
            let mut stack = vec![vec![top]];
            while let Some(chain) = stack.pop() {
                let last = *chain.last().unwrap();
                for f in self.proper_faces(last) {
                    let mut c = chain.clone();
                    c.push(f);
                    stack.push(c);
                }
                chains.push((chain.iter().map(|&s| bary_id[s]).collect(), top));
            }
        }
        let origin_of: HashMap<Vec<usize>, usize> = {
            let order = global_order(&vertices);
            chains
                .iter()
                .map(|(c, top)| {
                    let mut c = c.clone();
                    c.sort_by_key(|&i| order[i]);
                    (c, *top)
                })
                .collect()
        };
        let complex = Self::from_parts(vertices, chains.into_iter().map(|(c, _)| c).collect());
        let origin = complex.simplices.iter().map(|s| origin_of[s]).collect();
        (complex, origin)
    }

    /// Smallest `m` with every simplex of `bsd^m` of diameter `< delta`.
    pub fn subdivide_until(&self, delta: &S) -> Result<(usize, Self)> {
        let (m, sub) = self.subdivide_until_tracked(delta, None)?;
        Ok((m, sub.complex))
    }

    /// Like [`SimplicialComplex::subdivide_until`] but keeps origin tracking;
    /// `cap` overrides the a-priori iteration bound.
    pub fn subdivide_until_tracked(
        &self,
        delta: &S,
        cap: Option<usize>,
    ) -> Result<(usize, Subdivision<S>)> {
        if !delta.is_strictly_positive() {
            return Err(Error::input("subdivision threshold must be positive"));
        }
        let bound = cap.unwrap_or_else(|| self.subdivision_bound(delta));
        let delta_sq = delta.clone() * delta.clone();
        let mut sub = Subdivision::identity(self.clone());
        for m in 0..=bound {
            if sub.complex.max_diameter_sq() < delta_sq {
                return Ok((m, sub));
            }
            if m < bound {
                sub = sub.refine();
            }
        }
        Err(Error::resolution(format!(
            "diameters not below threshold after {bound} subdivisions"
        )))
    }

    /// `ceil(log(delta/D) / log((r-1)/r))` from the diameter contraction estimate.
    pub fn subdivision_bound(&self, delta: &S) -> usize {
        let d = self.max_diameter_sq().to_f64_lossy().sqrt();
        let r = self.rank() as f64;
        let delta = delta.to_f64_lossy();
        if d < delta || r < 2.0 {
            return 0;
        }
        let ratio = (r - 1.0) / r;
        ((delta / d).ln() / ratio.ln()).ceil().max(0.0) as usize + 1
    }

    /// Staircase triangulation of `|self| x [0,1]` in one extra coordinate.
    pub fn triangulate_prism(&self) -> Prism<S> {
        self.triangulate_prism_layers(1)
    }

    /// `layers` stacked staircase prisms at heights `k / layers`.
    pub fn triangulate_prism_layers(&self, layers: usize) -> Prism<S> {
        let layers = layers.max(1);
        let n = self.vertices.len();
        let step = S::one() / S::from_count(layers);
        let mut vertices = Vec::with_capacity(n * (layers + 1));
        for k in 0..=layers {
            let h = step.clone() * S::from_count(k);
            vertices.extend(self.vertices.iter().map(|v| v.extended(h.clone())));
        }
        let mut cells = Vec::new();
        for k in 0..layers {
            let (lo, hi) = (k * n, (k + 1) * n);
            for s in &self.simplices {
                // s is already in global order
                for i in 0..s.len() {
                    let mut cell: Vec<usize> = s[..=i].iter().map(|&v| v + lo).collect();
                    cell.extend(s[i..].iter().map(|&v| v + hi));
                    cells.push(cell);
                }
            }
        }
        let complex = Self::from_parts(vertices, cells);
        Prism {
            complex,
            base_vertices: n,
            layers,
        }
    }

    /// Exhaustive check that the intersection of any two simplices is a
    /// common face (or empty), and that vertices are distinct.
    pub fn validate_geometry(&self) -> Result<()> {
        for i in 0..self.vertices.len() {
            for j in i + 1..self.vertices.len() {
                if self.vertices[i].approx_eq(&self.vertices[j]) {
                    return Err(Error::input(format!("vertices {i} and {j} coincide")));
                }
            }
        }
        let tops = self.maximal_simplices();
        let boxes: Vec<(Point<S>, Point<S>)> = tops.iter().map(|&t| self.bbox(t)).collect();
        for a in 0..tops.len() {
            for b in a + 1..tops.len() {
                if boxes_disjoint(&boxes[a], &boxes[b]) {
                    continue;
                }
                if !self.meet_in_common_face(tops[a], tops[b]) {
                    return Err(Error::input(format!(
                        "simplices {:?} and {:?} intersect outside a common face",
                        self.simplices[tops[a]], self.simplices[tops[b]]
                    )));
                }
            }
        }
        Ok(())
    }

    fn bbox(&self, idx: usize) -> (Point<S>, Point<S>) {
        let s = &self.simplices[idx];
        let dim = self.ambient_dim();
        let mut lo = self.vertices[s[0]].coords().to_vec();
        let mut hi = lo.clone();
        for &v in &s[1..] {
            for k in 0..dim {
                let c = &self.vertices[v][k];
                if *c < lo[k] {
                    lo[k] = c.clone();
                }
                if *c > hi[k] {
                    hi[k] = c.clone();
                }
            }
        }
        (Point::new(lo), Point::new(hi))
    }

    fn meet_in_common_face(&self, a: usize, b: usize) -> bool {
        let sa = &self.simplices[a];
        let sb = &self.simplices[b];
        let dim = self.ambient_dim();
        let p = sa.len();
        let q = sb.len();
        let mut rows = Vec::with_capacity(dim + 2);
        for k in 0..dim {
            let mut row = Vec::with_capacity(p + q);
            row.extend(sa.iter().map(|&v| self.vertices[v][k].clone()));
            row.extend(sb.iter().map(|&v| -self.vertices[v][k].clone()));
            rows.push(row);
        }
        let mut ones_a = vec![S::one(); p];
        ones_a.extend(vec![S::zero(); q]);
        let mut ones_b = vec![S::zero(); p];
        ones_b.extend(vec![S::one(); q]);
        rows.push(ones_a);
        rows.push(ones_b);
        let mut rhs = vec![S::zero(); dim];
        rhs.push(S::one());
        rhs.push(S::one());
        let cost: Vec<S> = sa
            .iter()
            .map(|v| if sb.contains(v) { S::zero() } else { -S::one() })
            .chain(std::iter::repeat_n(S::zero(), q))
            .collect();
        match minimize(&rows, &rhs, &cost) {
            LpOutcome::Infeasible => true,
            LpOutcome::Optimal { value, .. } => {
                let common = sa.iter().any(|v| sb.contains(v));
                common && value.is_negligible()
            }
            LpOutcome::Unbounded => false,
        }
    }
}

fn boxes_disjoint<S: Scalar>(a: &(Point<S>, Point<S>), b: &(Point<S>, Point<S>)) -> bool {
    (0..a.0.dim()).any(|k| a.1[k] < b.0[k] || b.1[k] < a.0[k])
}

/// A complex together with the origin of each simplex in some base complex.
#[derive(Clone, Debug)]
pub struct Subdivision<S: Scalar> {
    pub complex: SimplicialComplex<S>,
    /// `origin[i]`: smallest base simplex containing simplex `i`.
    pub origin: Vec<usize>,
    pub level: usize,
}

impl<S: Scalar> Subdivision<S> {
    pub fn identity(complex: SimplicialComplex<S>) -> Self {
        let origin = (0..complex.len()).collect();
        Subdivision {
            complex,
            origin,
            level: 0,
        }
    }

    pub fn refine(&self) -> Self {
        let (complex, local) = self.complex.barycentric_subdivide_with_origin();
        let origin = local.into_iter().map(|o| self.origin[o]).collect();
        Subdivision {
            complex,
            origin,
            level: self.level + 1,
        }
    }

    /// Pulls a carrier of the base complex back to this subdivision.
    pub fn pull_back(&self, carrier: &SubcomplexCarrier) -> SubcomplexCarrier {
        SubcomplexCarrier {
            simplices: (0..self.complex.len())
                .filter(|&i| carrier.simplices.contains(&self.origin[i]))
                .collect(),
        }
    }
}

/// A subcomplex given by its (face-closed) set of simplex indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubcomplexCarrier {
    pub simplices: BTreeSet<usize>,
}

impl SubcomplexCarrier {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The face closure of the listed simplices.
    pub fn from_simplices<S: Scalar>(
        complex: &SimplicialComplex<S>,
        simplices: &[usize],
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &s in simplices {
            if s >= complex.len() {
                return Err(Error::input(format!("simplex index {s} out of range")));
            }
            set.insert(s);
            set.extend(complex.proper_faces(s));
        }
        Ok(SubcomplexCarrier { simplices: set })
    }

    pub fn from_vertex_tuples<S: Scalar>(
        complex: &SimplicialComplex<S>,
        tuples: &[Vec<usize>],
    ) -> Result<Self> {
        let idx: Vec<usize> = tuples
            .iter()
            .map(|t| {
                complex
                    .index_of(t)
                    .ok_or_else(|| Error::input(format!("{t:?} is not a simplex of the complex")))
            })
            .collect::<Result<_>>()?;
        Self::from_simplices(complex, &idx)
    }

    pub fn whole<S: Scalar>(complex: &SimplicialComplex<S>) -> Self {
        SubcomplexCarrier {
            simplices: (0..complex.len()).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn contains_simplex(&self, idx: usize) -> bool {
        self.simplices.contains(&idx)
    }

    pub fn contains_vertex<S: Scalar>(&self, complex: &SimplicialComplex<S>, v: usize) -> bool {
        complex
            .index_of(&[v])
            .is_some_and(|i| self.simplices.contains(&i))
    }

    pub fn contains_point<S: Scalar>(&self, complex: &SimplicialComplex<S>, x: &Point<S>) -> bool {
        self.simplices
            .iter()
            .any(|&i| complex.simplex(i).contains(x))
    }

    pub fn union(&self, other: &Self) -> Self {
        SubcomplexCarrier {
            simplices: self.simplices.union(&other.simplices).copied().collect(),
        }
    }

    /// Checks face closure against the complex.
    pub fn validate<S: Scalar>(&self, complex: &SimplicialComplex<S>) -> Result<()> {
        for &s in &self.simplices {
            if s >= complex.len() {
                return Err(Error::input(format!("simplex index {s} out of range")));
            }
            if let Some(f) = complex
                .proper_faces(s)
                .into_iter()
                .find(|f| !self.simplices.contains(f))
            {
                return Err(Error::input(format!(
                    "carrier is not face-closed: missing face {f}"
                )));
            }
        }
        Ok(())
    }

    pub fn vertex_indices<S: Scalar>(&self, complex: &SimplicialComplex<S>) -> BTreeSet<usize> {
        self.simplices
            .iter()
            .flat_map(|&s| complex.simplices()[s].iter().copied())
            .collect()
    }
}

/// `|base| x [0,1]` triangulated by staircases; vertex `i` of the base
/// becomes `i + k * base_vertices` at height `k / layers`.
#[derive(Clone, Debug)]
pub struct Prism<S: Scalar> {
    pub complex: SimplicialComplex<S>,
    pub base_vertices: usize,
    pub layers: usize,
}

impl<S: Scalar> Prism<S> {
    fn base_index(&self, v: usize) -> usize {
        v % self.base_vertices
    }

    /// The carrier of `C x [0,1]` for a carrier `C` of the base complex.
    pub fn prism_carrier(
        &self,
        base: &SimplicialComplex<S>,
        carrier: &SubcomplexCarrier,
    ) -> SubcomplexCarrier {
        let simplices = (0..self.complex.len())
            .filter(|&i| {
                let proj: BTreeSet<usize> = self.complex.simplices()[i]
                    .iter()
                    .map(|&v| self.base_index(v))
                    .collect();
                let proj: Vec<usize> = proj.into_iter().collect();
                base.index_of(&proj)
                    .is_some_and(|b| carrier.contains_simplex(b))
            })
            .collect();
        SubcomplexCarrier { simplices }
    }

    /// The carrier of `|base| x {0,1}`.
    pub fn ends_carrier(&self) -> SubcomplexCarrier {
        let n = self.base_vertices;
        let simplices = (0..self.complex.len())
            .filter(|&i| {
                let s = &self.complex.simplices()[i];
                s.iter().all(|&v| v < n) || s.iter().all(|&v| v >= n * self.layers)
            })
            .collect();
        SubcomplexCarrier { simplices }
    }
}

/// Vertex table + simplex list file format.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct ComplexFile<S: Scalar> {
    pub vertices: Vec<Point<S>>,
    pub simplices: Vec<Vec<usize>>,
}

impl<S: Scalar> ComplexFile<S> {
    pub fn into_complex(self) -> Result<SimplicialComplex<S>> {
        SimplicialComplex::new(self.vertices, self.simplices)
    }

    /// Writes maximal simplices only.
    pub fn from_complex(c: &SimplicialComplex<S>) -> Self {
        ComplexFile {
            vertices: c.vertices().to_vec(),
            simplices: c
                .maximal_simplices()
                .into_iter()
                .map(|i| c.simplices()[i].clone())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type P = Point<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn interval() -> SimplicialComplex<Rational> {
        SimplicialComplex::new(vec![P::from_i64(&[0]), P::from_i64(&[1])], vec![vec![0, 1]])
            .unwrap()
    }

    fn triangle() -> SimplicialComplex<Rational> {
        SimplicialComplex::new(
            vec![
                P::from_i64(&[0, 0]),
                P::from_i64(&[1, 0]),
                P::from_i64(&[0, 1]),
            ],
            vec![vec![0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn closure_counts() {
        assert_eq!(triangle().len(), 7);
        assert_eq!(triangle().rank(), 3);
        assert_eq!(triangle().maximal_simplices().len(), 1);
    }

    #[test]
    fn interval_subdivision_splits_at_midpoint() {
        let b = interval().barycentric_subdivide();
        let tops = b.maximal_simplices();
        assert_eq!(tops.len(), 2);
        let mut lens: Vec<Rational> = tops.iter().map(|&t| b.simplex(t).diameter_sq()).collect();
        lens.sort();
        assert_eq!(lens, vec![q(1, 4), q(1, 4)]);
        assert!(b.vertices().contains(&P::from_ratios(&[(1, 2)])));
    }

    #[test]
    fn triangle_subdivision_max_diameter() {
        let b = triangle().barycentric_subdivide();
        let tops: Vec<usize> = b.simplices_of_rank(3).collect();
        assert_eq!(tops.len(), 6);
        assert_eq!(b.max_diameter_sq(), q(5, 9));
        assert_eq!(b.rank(), 3);
        b.validate_geometry().unwrap();
    }

    #[test]
    fn subdivide_until_examples() {
        let (m, c) = interval().subdivide_until(&q(3, 10)).unwrap();
        assert_eq!(m, 2);
        assert_eq!(c.simplices_of_rank(2).count(), 4);
        let (m, c) = interval().subdivide_until(&q(2, 1)).unwrap();
        assert_eq!(m, 0);
        assert_eq!(c.len(), interval().len());
        let (m, _) = triangle().subdivide_until(&q(4, 5)).unwrap();
        assert_eq!(m, 1);
        assert!(interval().subdivide_until(&q(0, 1)).is_err());
        assert!(interval().subdivide_until(&q(-1, 1)).is_err());
    }

    #[test]
    fn layered_prism_of_square_boundary() {
        let sq = SimplicialComplex::new(
            vec![
                P::from_i64(&[0, 0]),
                P::from_i64(&[1, 0]),
                P::from_i64(&[1, 1]),
                P::from_i64(&[0, 1]),
            ],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        )
        .unwrap();
        let p = sq.triangulate_prism_layers(3);
        assert_eq!(p.complex.simplices_of_rank(3).count(), 24);
        p.complex.validate_geometry().unwrap();
        let ends = p.ends_carrier();
        assert_eq!(ends.vertex_indices(&p.complex).len(), 8);
        let column = p.prism_carrier(
            &sq,
            &SubcomplexCarrier::from_vertex_tuples(&sq, &[vec![0]]).unwrap(),
        );
        assert_eq!(column.vertex_indices(&p.complex).len(), 4);
    }

    #[test]
    fn prism_of_interval_is_two_triangles() {
        let p = interval().triangulate_prism();
        assert_eq!(p.complex.simplices_of_rank(3).count(), 2);
        p.complex.validate_geometry().unwrap();
        let area: Rational = p
            .complex
            .simplices_of_rank(3)
            .map(|i| p.complex.simplex(i).volume().unwrap())
            .fold(q(0, 1), |a, b| a + b);
        assert_eq!(area, q(1, 1));
    }

    #[test]
    fn prism_of_triangle_has_three_tetrahedra() {
        let p = triangle().triangulate_prism();
        let tets: Vec<usize> = p.complex.simplices_of_rank(4).collect();
        assert_eq!(tets.len(), 3);
        let vol = tets
            .iter()
            .map(|&i| p.complex.simplex(i).volume().unwrap())
            .fold(q(0, 1), |a, b| a + b);
        assert_eq!(vol, q(1, 2));
        p.complex.validate_geometry().unwrap();
    }

    #[test]
    fn vertex_prism_is_an_edge() {
        let base = triangle();
        let p = base.triangulate_prism();
        let v = base.index_of(&[1]).unwrap();
        let c = SubcomplexCarrier::from_simplices(&base, &[v]).unwrap();
        let pc = p.prism_carrier(&base, &c);
        assert!(p
            .complex
            .index_of(&[1, 1 + 3])
            .is_some_and(|e| pc.contains_simplex(e)));
        assert_eq!(pc.simplices.len(), 3);
        let ends = p.ends_carrier();
        assert_eq!(ends.simplices.len(), 14);
        ends.validate(&p.complex).unwrap();
    }

    #[test]
    fn overlapping_simplices_are_rejected() {
        let c = SimplicialComplex::new(
            vec![
                P::from_i64(&[0, 0]),
                P::from_i64(&[2, 0]),
                P::from_i64(&[0, 2]),
                P::from_i64(&[1, 1]),
                P::from_i64(&[3, 3]),
            ],
            vec![vec![0, 1, 2], vec![3, 4]],
        )
        .unwrap();
        assert!(c.validate_geometry().is_err());
        let ok = SimplicialComplex::new(
            vec![
                P::from_i64(&[0, 0]),
                P::from_i64(&[2, 0]),
                P::from_i64(&[0, 2]),
                P::from_i64(&[2, 2]),
            ],
            vec![vec![0, 1, 2], vec![1, 2, 3]],
        )
        .unwrap();
        ok.validate_geometry().unwrap();
    }

    #[test]
    fn carrier_pull_back_through_subdivision() {
        let base = triangle();
        let edge = base.index_of(&[0, 1]).unwrap();
        let c = SubcomplexCarrier::from_simplices(&base, &[edge]).unwrap();
        let sub = Subdivision::identity(base).refine();
        let pulled = sub.pull_back(&c);
        pulled.validate(&sub.complex).unwrap();
        // two half-edges, three vertices
        assert_eq!(pulled.simplices.len(), 5);
        assert!(pulled.contains_point(&sub.complex, &P::from_ratios(&[(1, 3), (0, 1)])));
        assert!(!pulled.contains_point(&sub.complex, &P::from_ratios(&[(1, 3), (1, 3)])));
    }
}
