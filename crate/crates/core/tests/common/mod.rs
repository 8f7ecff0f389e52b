//! Generators and independent oracles shared by the property and
//! acceptance tests. The oracles deliberately avoid the crate's own
//! linear algebra, hull and quotient code.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeSet, VecDeque};

use num_traits::{One, Signed, Zero};
use rand::Rng;
use wellfilled::invariants::{ComponentModel, LoopModel};
use wellfilled::{ExactComplex, ExactPoint, ExactSimplex, MapEval, PLMap, Rational, Scalar};

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// Uniform rational in `[-bound, bound]` with denominator `denom`.
pub fn rand_q(rng: &mut impl Rng, bound: i64, denom: i64) -> Rational {
    q(rng.random_range(-bound * denom..=bound * denom), denom)
}

pub fn random_point(rng: &mut impl Rng, dim: usize, bound: i64, denom: i64) -> ExactPoint {
    ExactPoint::new((0..dim).map(|_| rand_q(rng, bound, denom)).collect())
}

/// A non-degenerate simplex with `rank` vertices in `Q^dim`.
pub fn random_simplex(rng: &mut impl Rng, rank: usize, dim: usize) -> ExactSimplex {
    loop {
        let pts: Vec<ExactPoint> = (0..rank).map(|_| random_point(rng, dim, 4, 4)).collect();
        if let Ok(s) = ExactSimplex::new(pts) {
            return s;
        }
    }
}

/// Random positive weights summing to one.
pub fn random_weights(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    let raw: Vec<i64> = (0..n).map(|_| rng.random_range(1..=20)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| q(w, total)).collect()
}

pub fn combination(points: &[ExactPoint], weights: &[Rational]) -> ExactPoint {
    let dim = points[0].dim();
    let mut c = vec![Rational::zero(); dim];
    for (p, w) in points.iter().zip(weights) {
        for (k, ck) in c.iter_mut().enumerate() {
            *ck += p[k].clone() * w;
        }
    }
    ExactPoint::new(c)
}

/// Reduced row echelon solve of `a x = b` (any shape); `None` when
/// inconsistent, free variables set to zero otherwise.
pub fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].clone().recip();
        for k in 0..cols {
            a[r][k] *= &inv;
        }
        b[r] *= &inv;
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..cols {
                    let v = a[r][k].clone() * &f;
                    a[i][k] -= v;
                }
                let v = b[r].clone() * &f;
                b[i] -= v;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if b[r..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = b[i].clone();
    }
    Some(x)
}

/// Barycentric coordinates of `x` in an affinely independent vertex list.
pub fn barycentric(vertices: &[ExactPoint], x: &ExactPoint) -> Option<Vec<Rational>> {
    let dim = x.dim();
    let mut a: Vec<Vec<Rational>> = (0..dim)
        .map(|k| vertices.iter().map(|v| v[k].clone()).collect())
        .collect();
    a.push(vec![Rational::one(); vertices.len()]);
    let mut b: Vec<Rational> = x.coords().to_vec();
    b.push(Rational::one());
    solve(a, b)
}

pub fn in_simplex(vertices: &[ExactPoint], x: &ExactPoint) -> bool {
    barycentric(vertices, x).is_some_and(|l| l.iter().all(|v| !v.is_negative()))
}

/// Determinant by cofactor expansion (small matrices only).
pub fn det(m: &[Vec<Rational>]) -> Rational {
    match m.len() {
        0 => Rational::one(),
        1 => m[0][0].clone(),
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<Rational>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(k, _)| k != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = m[0][j].clone() * det(&minor);
                if j % 2 == 0 {
                    term
                } else {
                    -term
                }
            })
            .fold(Rational::zero(), |a, b| a + b),
    }
}

/// Volume of `inner` relative to `outer` (same affine hull), via the
/// barycentric coordinates of the inner vertices.
pub fn relative_volume(outer: &[ExactPoint], inner: &[ExactPoint]) -> Rational {
    let coords: Vec<Vec<Rational>> = inner
        .iter()
        .map(|v| barycentric(outer, v).expect("inner vertex in the affine hull"))
        .collect();
    volume_from_barycentric(&coords.iter().collect::<Vec<_>>())
}

/// Relative volume of a simplex given the barycentric coordinates of its
/// vertices with respect to the outer simplex.
pub fn volume_from_barycentric(coords: &[&Vec<Rational>]) -> Rational {
    let rows: Vec<Vec<Rational>> = coords[1..]
        .iter()
        .map(|l| {
            l[1..]
                .iter()
                .zip(&coords[0][1..])
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    det(&rows).abs()
}

pub fn dist_sq(a: &ExactPoint, b: &ExactPoint) -> Rational {
    (0..a.dim())
        .map(|k| (a[k].clone() - &b[k]) * (a[k].clone() - &b[k]))
        .fold(Rational::zero(), |s, v| s + v)
}

pub fn diameter_sq(vertices: &[ExactPoint]) -> Rational {
    let mut best = Rational::zero();
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            best = best.max(dist_sq(&vertices[i], &vertices[j]));
        }
    }
    best
}

/// Hull membership in `Q^3` from supporting planes through point triples;
/// sets that do not span space must be affinely independent.
pub fn hull_oracle_3d(points: &[ExactPoint], x: &ExactPoint) -> bool {
    let spans = points.len() >= 4 && {
        let rows: Vec<Vec<Rational>> = points[1..]
            .iter()
            .map(|p| (0..3).map(|k| p[k].clone() - &points[0][k]).collect())
            .collect();
        rank(rows) == 3
    };
    if !spans {
        return in_simplex(points, x);
    }
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let u: Vec<Rational> = (0..3)
                    .map(|c| points[j][c].clone() - &points[i][c])
                    .collect();
                let v: Vec<Rational> = (0..3)
                    .map(|c| points[k][c].clone() - &points[i][c])
                    .collect();
                let normal = [
                    u[1].clone() * &v[2] - u[2].clone() * &v[1],
                    u[2].clone() * &v[0] - u[0].clone() * &v[2],
                    u[0].clone() * &v[1] - u[1].clone() * &v[0],
                ];
                if normal.iter().all(Zero::is_zero) {
                    continue;
                }
                let side = |p: &ExactPoint| {
                    (0..3)
                        .map(|c| normal[c].clone() * (p[c].clone() - &points[i][c]))
                        .fold(Rational::zero(), |a, b| a + b)
                };
                let signs: Vec<Rational> = points.iter().map(side).collect();
                let facet_up = signs.iter().all(|s| !s.is_negative());
                let facet_down = signs.iter().all(|s| !s.is_positive());
                let sx = side(x);
                if (facet_up && sx.is_negative()) || (facet_down && sx.is_positive()) {
                    return false;
                }
            }
        }
    }
    true
}

pub fn rank(mut m: Vec<Vec<Rational>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            let f = m[i][c].clone() / &m[r][c];
            for k in c..cols {
                let v = m[r][k].clone() * &f;
                m[i][k] -= v;
            }
        }
        r += 1;
    }
    r
}

/// A random finite direct system: a forest rooted at the last index plus
/// optional extra edges. Returns element counts and generating maps; the
/// caller discards candidates the crate rejects.
pub struct RandomSystem {
    pub sizes: Vec<usize>,
    pub edges: Vec<(usize, usize, Vec<usize>)>,
}

impl RandomSystem {
    pub fn generate(
        rng: &mut impl Rng,
        max_indices: usize,
        max_size: usize,
        extra_edges: usize,
    ) -> Self {
        let k = rng.random_range(1..=max_indices);
        let sizes: Vec<usize> = (0..k).map(|_| rng.random_range(1..=max_size)).collect();
        let mut edges = Vec::new();
        let map = |rng: &mut dyn rand::RngCore, from: usize, to: usize| {
            (0..sizes[from])
                .map(|_| rng.random_range(0..sizes[to]))
                .collect::<Vec<_>>()
        };
        for i in 0..k.saturating_sub(1) {
            let p = rng.random_range(i + 1..k);
            edges.push((i, p, map(rng, i, p)));
        }
        for _ in 0..extra_edges {
            if k < 3 {
                break;
            }
            let i = rng.random_range(0..k - 2);
            let j = rng.random_range(i + 1..k);
            if edges.iter().any(|e| e.0 == i && e.1 == j) {
                continue;
            }
            edges.push((i, j, map(rng, i, j)));
        }
        RandomSystem { sizes, edges }
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.sizes.len()).map(|i| format!("X{i}")).collect()
    }

    pub fn elements(&self) -> Vec<Vec<String>> {
        self.sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| (0..n).map(|x| format!("x{i}_{x}")).collect())
            .collect()
    }

    /// `reach[a][b]` = the composite `X_a -> X_b` along some path of
    /// generating edges (identity on the diagonal).
    pub fn composites(&self) -> Vec<Vec<Option<Vec<usize>>>> {
        let k = self.sizes.len();
        let mut reach: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; k]; k];
        for a in 0..k {
            reach[a][a] = Some((0..self.sizes[a]).collect());
            let mut stack = vec![a];
            while let Some(b) = stack.pop() {
                for (f, t, m) in &self.edges {
                    if *f == b && reach[a][*t].is_none() {
                        let via = reach[a][b].clone().unwrap();
                        reach[a][*t] = Some(via.iter().map(|&x| m[x]).collect());
                        stack.push(*t);
                    }
                }
            }
        }
        reach
    }

    /// Brute-force quotient: `(a, x) ~ (b, y)` when some common upper bound
    /// identifies them, closed transitively. Returns `same[u][v]` over the
    /// tagged union in index-major order.
    pub fn brute_force_relation(&self) -> Vec<Vec<bool>> {
        let k = self.sizes.len();
        let reach = self.composites();
        let offsets: Vec<usize> = self
            .sizes
            .iter()
            .scan(0, |acc, &n| {
                let o = *acc;
                *acc += n;
                Some(o)
            })
            .collect();
        let total: usize = self.sizes.iter().sum();
        let mut rel = vec![vec![false; total]; total];
        for a in 0..k {
            for b in 0..k {
                for g in 0..k {
                    let (Some(fa), Some(fb)) = (&reach[a][g], &reach[b][g]) else {
                        continue;
                    };
                    for x in 0..self.sizes[a] {
                        for y in 0..self.sizes[b] {
                            if fa[x] == fb[y] {
                                rel[offsets[a] + x][offsets[b] + y] = true;
                            }
                        }
                    }
                }
            }
        }
        for m in 0..total {
            for u in 0..total {
                if rel[u][m] {
                    for v in 0..total {
                        if rel[m][v] {
                            rel[u][v] = true;
                        }
                    }
                }
            }
        }
        rel
    }
}

/// Random PL map on the boundary of `s` into `Q^target`.
pub fn random_boundary_map(rng: &mut impl Rng, s: &ExactSimplex, target: usize) -> PLMap<Rational> {
    let b = ExactComplex::boundary_of(s).unwrap();
    let values = (0..b.vertices().len())
        .map(|_| random_point(rng, target, 3, 3))
        .collect();
    PLMap::new(b, values).unwrap()
}

/// The filled value computed straight from the cone formula: `x = t b + (1 - t) y`
/// with `t = rank * min barycentric`, `b` the barycenter and `y` on the boundary.
pub fn filled_value(s: &ExactSimplex, g: &PLMap<Rational>, x: &ExactPoint) -> ExactPoint {
    let l = barycentric(s.vertices(), x).unwrap();
    let m = l
        .iter()
        .cloned()
        .fold(Rational::one(), |a, b| if b < a { b } else { a });
    let t = Rational::from_count(l.len()) * m.clone();
    let anchor = g.eval(&s.vertices()[0]).unwrap();
    if t == Rational::one() {
        return anchor;
    }
    let rest = Rational::one() - t.clone();
    let w: Vec<Rational> = l.iter().map(|v| (v.clone() - &m) / &rest).collect();
    let y = combination(s.vertices(), &w);
    let gy = g.eval(&y).unwrap();
    combination(&[anchor, gy], &[t, rest])
}

/// At most six points of `Q^3` that span space or are affinely independent.
pub fn point_set_3d(rng: &mut impl Rng) -> Vec<ExactPoint> {
    loop {
        let n = rng.random_range(1..=6);
        let pts: Vec<ExactPoint> = (0..n).map(|_| random_point(rng, 3, 3, 2)).collect();
        let rows: Vec<Vec<Rational>> = pts[1..]
            .iter()
            .map(|p| (0..3).map(|k| p[k].clone() - &pts[0][k]).collect())
            .collect();
        let rk = if n == 1 { 0 } else { rank(rows) };
        if rk == 3 || rk == n - 1 {
            return pts;
        }
    }
}

/// A probe that is a hull point, a midpoint of two points, or random.
pub fn hull_probe(rng: &mut impl Rng, pts: &[ExactPoint]) -> ExactPoint {
    match rng.random_range(0..3) {
        0 => {
            let k = rng.random_range(1..=pts.len());
            let chosen: Vec<ExactPoint> = (0..k)
                .map(|_| pts[rng.random_range(0..pts.len())].clone())
                .collect();
            let w = random_weights(rng, k);
            combination(&chosen, &w)
        }
        1 => random_point(rng, 3, 3, 4),
        _ => {
            let a = pts[rng.random_range(0..pts.len())].clone();
            let b = pts[rng.random_range(0..pts.len())].clone();
            combination(&[a, b], &[q(1, 2), q(1, 2)])
        }
    }
}

/// Points reachable from `start` in an undirected graph, by breadth-first search.
pub fn bfs_component(
    points: &[ExactPoint],
    edges: &[(usize, usize)],
    start: &ExactPoint,
) -> BTreeSet<String> {
    let Some(s) = points.iter().position(|p| p == start) else {
        return BTreeSet::new();
    };
    let mut seen = vec![false; points.len()];
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for &(a, b) in edges {
            let v = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    (0..points.len())
        .filter(|&i| seen[i])
        .map(|i| points[i].to_string())
        .collect()
}

/// Winding from the summed turning angle of the edges.
pub fn angle_winding(l: &LoopModel<Rational>) -> i64 {
    let (i, j) = l.axis;
    let mut total = 0.0;
    for w in l.points.windows(2) {
        let a = w[0][i].to_f64_lossy().atan2(w[0][j].to_f64_lossy());
        let b = w[1][i].to_f64_lossy().atan2(w[1][j].to_f64_lossy());
        let mut d = a - b;
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        total += d;
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}

/// Whether the ambient component of the basepoint equals the union of its
/// step components, with the size of the ambient component.
pub fn pi0_union_oracle(m: &ComponentModel<Rational>) -> (bool, usize) {
    let ambient = bfs_component(&m.ambient.points, &m.ambient.edges, &m.basepoint);
    let union: BTreeSet<String> = m
        .steps
        .iter()
        .flat_map(|(_, g)| bfs_component(&g.points, &g.edges, &m.basepoint))
        .collect();
    (!ambient.is_empty() && ambient == union, ambient.len())
}
