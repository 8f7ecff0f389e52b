//! Direct systems over finite directed posets: colimits of finite sets with
//! stored equality witnesses, universal maps out of them, and two tractable
//! families of abelian chains.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{determinant, solve_linear};
use crate::scalar::Rational;

/// A bonding map `X_from -> X_to` given by element indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bonding {
    pub from: String,
    pub to: String,
    pub map: Vec<usize>,
}

/// File form of a direct system of finite sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSystemFile {
    /// Index labels; each maps to its element names.
    pub objects: Vec<(String, Vec<String>)>,
    /// Generating bonding maps; the order is their reflexive-transitive closure.
    pub bonding: Vec<Bonding>,
}

/// A validated direct system of finite sets over a finite directed poset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectSystemOfSets {
    labels: Vec<String>,
    elements: Vec<Vec<String>>,
    /// `maps[a][b]` = `phi_{b,a}` when `a <= b`.
    maps: Vec<Vec<Option<Vec<usize>>>>,
}

impl DirectSystemOfSets {
    pub fn from_file(file: &SetSystemFile) -> Result<Self> {
        let labels: Vec<String> = file.objects.iter().map(|(l, _)| l.clone()).collect();
        let elements: Vec<Vec<String>> = file.objects.iter().map(|(_, e)| e.clone()).collect();
        let pos = |l: &str| {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| Error::input(format!("unknown index {l:?}")))
        };
        let mut edges = Vec::new();
        for b in &file.bonding {
            let (f, t) = (pos(&b.from)?, pos(&b.to)?);
            edges.push((f, t, b.map.clone()));
        }
        Self::new(labels, elements, edges)
    }

    /// Builds the system from generating maps `(from, to, map)`, deriving
    /// composites and checking functoriality and directedness.
    pub fn new(
        labels: Vec<String>,
        elements: Vec<Vec<String>>,
        edges: Vec<(usize, usize, Vec<usize>)>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 || elements.len() != n {
            return Err(Error::input("need one element list per index"));
        }
        let mut out: Vec<Vec<(usize, Vec<usize>)>> = vec![Vec::new(); n];
        for (f, t, m) in edges {
            if f >= n || t >= n {
                return Err(Error::input("bonding index out of range"));
            }
            if m.len() != elements[f].len() || m.iter().any(|&y| y >= elements[t].len()) {
                return Err(Error::input(format!(
                    "bonding {} -> {} has the wrong shape",
                    labels[f], labels[t]
                )));
            }
            if f == t && m.iter().enumerate().any(|(i, &y)| i != y) {
                return Err(Error::input(format!(
                    "bonding {0} -> {0} is not the identity",
                    labels[f]
                )));
            }
            out[f].push((t, m));
        }
        let mut maps: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; n]; n];
        for a in 0..n {
            maps[a][a] = Some((0..elements[a].len()).collect());
            let mut queue = VecDeque::from([a]);
            while let Some(b) = queue.pop_front() {
                let base = maps[a][b].clone().expect("reached");
                for (c, m) in &out[b] {
                    let composed: Vec<usize> = base.iter().map(|&x| m[x]).collect();
                    match &maps[a][*c] {
                        Some(existing) if *existing != composed => {
                            return Err(Error::input(format!(
                                "bonding maps {} -> {} disagree along different paths",
                                labels[a], labels[*c]
                            )));
                        }
                        Some(_) => {}
                        None => {
                            maps[a][*c] = Some(composed);
                            queue.push_back(*c);
                        }
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && maps[a][b].is_some() && maps[b][a].is_some() {
                    return Err(Error::input(format!(
                        "indices {} and {} form a cycle",
                        labels[a], labels[b]
                    )));
                }
            }
        }
        let sys = DirectSystemOfSets {
            labels,
            elements,
            maps,
        };
        sys.check_directed()?;
        Ok(sys)
    }

    fn check_directed(&self) -> Result<()> {
        let n = self.len();
        for a in 0..n {
            for b in a + 1..n {
                if self.upper_bounds(a, b).next().is_none() {
                    return Err(Error::input(format!(
                        "indices {} and {} have no common upper bound",
                        self.labels[a], self.labels[b]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn elements(&self, a: usize) -> &[String] {
        &self.elements[a]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.maps[a][b].is_some()
    }

    /// `phi_{b,a}`.
    pub fn bonding(&self, a: usize, b: usize) -> Option<&[usize]> {
        self.maps[a][b].as_deref()
    }

    pub fn upper_bounds(&self, a: usize, b: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&c| self.leq(a, c) && self.leq(b, c))
    }

    /// Re-checks `phi_{c,b} o phi_{b,a} = phi_{c,a}` on every chain.
    pub fn check_functoriality(&self) -> Result<()> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if let (Some(ab), Some(bc), Some(ac)) =
                        (&self.maps[a][b], &self.maps[b][c], &self.maps[a][c])
                    {
                        if ab.iter().map(|&x| bc[x]).ne(ac.iter().copied()) {
                            return Err(Error::input("bonding maps are not functorial"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_file(&self) -> SetSystemFile {
        let objects = self
            .labels
            .iter()
            .cloned()
            .zip(self.elements.iter().cloned())
            .collect();
        let mut bonding = Vec::new();
        for a in 0..self.len() {
            for b in 0..self.len() {
                if a != b {
                    if let Some(m) = &self.maps[a][b] {
                        bonding.push(Bonding {
                            from: self.labels[a].clone(),
                            to: self.labels[b].clone(),
                            map: m.clone(),
                        });
                    }
                }
            }
        }
        SetSystemFile { objects, bonding }
    }
}

/// An element `x` of `X_index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Tagged {
    pub index: usize,
    pub element: usize,
}

/// `phi_{gamma,a}(x) = phi_{gamma,b}(y)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub left: Tagged,
    pub right: Tagged,
    pub gamma: usize,
}

impl Witness {
    pub fn verify(&self, sys: &DirectSystemOfSets) -> bool {
        match (
            sys.bonding(self.left.index, self.gamma),
            sys.bonding(self.right.index, self.gamma),
        ) {
            (Some(f), Some(g)) => f[self.left.element] == g[self.right.element],
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetColimit {
    /// Classes as sorted lists of tagged elements, ordered by first member.
    pub classes: Vec<Vec<Tagged>>,
    /// `class_of[index][element]`: the limit map `mu_index`.
    pub class_of: Vec<Vec<usize>>,
    /// One witness per union performed.
    pub witnesses: Vec<Witness>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Quotient of the tagged union by eventual equality.
pub fn set_colimit(sys: &DirectSystemOfSets) -> SetColimit {
    let n = sys.len();
    let mut offset = vec![0; n + 1];
    for a in 0..n {
        offset[a + 1] = offset[a] + sys.elements(a).len();
    }
    let mut uf = UnionFind {
        parent: (0..offset[n]).collect(),
    };
    let mut witnesses = Vec::new();
    for a in 0..n {
        for g in 0..n {
            if a == g {
                continue;
            }
            if let Some(m) = sys.bonding(a, g) {
                for (x, &y) in m.iter().enumerate() {
                    if uf.union(offset[a] + x, offset[g] + y) {
                        witnesses.push(Witness {
                            left: Tagged {
                                index: a,
                                element: x,
                            },
                            right: Tagged {
                                index: g,
                                element: y,
                            },
                            gamma: g,
                        });
                    }
                }
            }
        }
    }
    let mut root_class: BTreeMap<usize, usize> = BTreeMap::new();
    let mut classes: Vec<Vec<Tagged>> = Vec::new();
    let mut class_of = vec![Vec::new(); n];
    for a in 0..n {
        for x in 0..sys.elements(a).len() {
            let r = uf.find(offset[a] + x);
            let next = classes.len();
            let c = *root_class.entry(r).or_insert(next);
            if c == classes.len() {
                classes.push(Vec::new());
            }
            classes[c].push(Tagged {
                index: a,
                element: x,
            });
            class_of[a].push(c);
        }
    }
    SetColimit {
        classes,
        class_of,
        witnesses,
    }
}

impl SetColimit {
    pub fn class(&self, t: Tagged) -> usize {
        self.class_of[t.index][t.element]
    }

    /// A fresh witness for `a ~ b`, if they are identified.
    pub fn witness(&self, sys: &DirectSystemOfSets, a: Tagged, b: Tagged) -> Option<Witness> {
        sys.upper_bounds(a.index, b.index)
            .map(|g| Witness {
                left: a,
                right: b,
                gamma: g,
            })
            .find(|w| w.verify(sys))
    }

    /// Every class is non-empty and every stored witness re-verifies.
    pub fn verify(&self, sys: &DirectSystemOfSets) -> bool {
        self.classes.iter().all(|c| !c.is_empty()) && self.witnesses.iter().all(|w| w.verify(sys))
    }
}

/// A compatible family `lambda_a: X_a -> T` into a finite target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cone {
    pub target: Vec<String>,
    /// `maps[a][x]` = index of `lambda_a(x)` in `target`.
    pub maps: Vec<Vec<usize>>,
}

impl Cone {
    /// The colimit's own limit maps.
    pub fn from_colimit(c: &SetColimit) -> Self {
        Cone {
            target: (0..c.classes.len()).map(|i| format!("class{i}")).collect(),
            maps: c.class_of.clone(),
        }
    }

    pub fn check(&self, sys: &DirectSystemOfSets) -> Result<()> {
        if self.maps.len() != sys.len() {
            return Err(Error::input("cone needs one map per index"));
        }
        for a in 0..sys.len() {
            if self.maps[a].len() != sys.elements(a).len()
                || self.maps[a].iter().any(|&t| t >= self.target.len())
            {
                return Err(Error::input(format!(
                    "cone map at {} has the wrong shape",
                    sys.labels()[a]
                )));
            }
            for b in 0..sys.len() {
                if let Some(m) = sys.bonding(a, b) {
                    if let Some(x) = (0..m.len()).find(|&x| self.maps[b][m[x]] != self.maps[a][x]) {
                        return Err(Error::input(format!(
                            "cone is not compatible: {} in {} vs its image in {}",
                            sys.elements(a)[x],
                            sys.labels()[a],
                            sys.labels()[b]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniversalMapReport {
    /// `psi[class]` = target index.
    pub psi: Vec<usize>,
    pub surjective: bool,
    pub injective: bool,
    /// Target elements not hit.
    pub missed: Vec<usize>,
    /// Pairs of classes with the same image.
    pub collisions: Vec<(usize, usize)>,
}

impl UniversalMapReport {
    pub fn bijective(&self) -> bool {
        self.surjective && self.injective
    }
}

/// The induced map out of the colimit.
pub fn universal_map(
    sys: &DirectSystemOfSets,
    colimit: &SetColimit,
    cone: &Cone,
) -> Result<UniversalMapReport> {
    cone.check(sys)?;
    let mut psi = Vec::with_capacity(colimit.classes.len());
    for class in &colimit.classes {
        let v = cone.maps[class[0].index][class[0].element];
        if let Some(t) = class.iter().find(|t| cone.maps[t.index][t.element] != v) {
            return Err(Error::input(format!(
                "cone is not constant on the class of {}",
                sys.elements(t.index)[t.element]
            )));
        }
        psi.push(v);
    }
    let mut hit = vec![None; cone.target.len()];
    let mut collisions = Vec::new();
    for (c, &v) in psi.iter().enumerate() {
        match hit[v] {
            Some(prev) => collisions.push((prev, c)),
            None => hit[v] = Some(c),
        }
    }
    let missed: Vec<usize> = (0..hit.len()).filter(|&v| hit[v].is_none()).collect();
    Ok(UniversalMapReport {
        surjective: missed.is_empty(),
        injective: collisions.is_empty(),
        psi,
        missed,
        collisions,
    })
}

/// First `(index, element)` where `psi o mu_a != lambda_a`, if any.
pub fn factorization_failure(colimit: &SetColimit, cone: &Cone, psi: &[usize]) -> Option<Tagged> {
    colimit
        .class_of
        .iter()
        .enumerate()
        .flat_map(|(a, row)| row.iter().enumerate().map(move |(x, &c)| (a, x, c)))
        .find(|&(a, x, c)| psi[c] != cone.maps[a][x])
        .map(|(a, x, _)| Tagged {
            index: a,
            element: x,
        })
}

pub type IntMatrix = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum AbelianMode {
    /// Bondings from level `from` on are invertible over the integers.
    EventuallyStable { from: usize },
    /// Injective bondings; elements compared by pushing down to the lowest level.
    NormalForm,
}

/// A chain `Z^{k_0} -> Z^{k_1} -> ...`; `bonding[i]` is `k_{i+1} x k_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianChain {
    pub ranks: Vec<usize>,
    pub bonding: Vec<IntMatrix>,
    pub mode: AbelianMode,
}

/// An element of the colimit: a vector at some level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainElement {
    pub level: usize,
    pub vector: Vec<i64>,
}

fn to_q(m: &IntMatrix) -> Vec<Vec<Rational>> {
    m.iter()
        .map(|r| {
            r.iter()
                .map(|&v| Rational::from_integer(BigInt::from(v)))
                .collect()
        })
        .collect()
}

fn apply(m: &IntMatrix, v: &[i64]) -> Result<Vec<i64>> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .try_fold(0i64, |acc, (a, b)| {
                    a.checked_mul(*b).and_then(|p| acc.checked_add(p))
                })
                .ok_or_else(|| Error::input("integer overflow in bonding"))
        })
        .collect()
}

fn rank_q(m: &IntMatrix) -> usize {
    crate::geometry::matrix_rank(to_q(m))
}

impl AbelianChain {
    pub fn validate(&self) -> Result<()> {
        if self.ranks.is_empty() || self.bonding.len() + 1 != self.ranks.len() {
            return Err(Error::input(
                "need one bonding matrix between consecutive levels",
            ));
        }
        for (i, m) in self.bonding.iter().enumerate() {
            if m.len() != self.ranks[i + 1] || m.iter().any(|r| r.len() != self.ranks[i]) {
                return Err(Error::input(format!("bonding {i} has the wrong shape")));
            }
        }
        match &self.mode {
            AbelianMode::EventuallyStable { from } => {
                for (i, m) in self.bonding.iter().enumerate().skip(*from) {
                    let square = self.ranks[i] == self.ranks[i + 1];
                    if !square || !determinant(to_q(m)).abs().is_one() {
                        return Err(Error::input(format!(
                            "bonding {i} is not invertible over the integers"
                        )));
                    }
                }
            }
            AbelianMode::NormalForm => {
                for (i, m) in self.bonding.iter().enumerate() {
                    if rank_q(m) != self.ranks[i] {
                        return Err(Error::input(format!("bonding {i} is not injective")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn top(&self) -> usize {
        self.ranks.len() - 1
    }

    /// Image of `v` from `level` at level `to >= level`.
    pub fn push(&self, e: &ChainElement, to: usize) -> Result<ChainElement> {
        if to < e.level || to > self.top() || e.vector.len() != self.ranks[e.level] {
            return Err(Error::input("cannot push element to that level"));
        }
        let mut v = e.vector.clone();
        for m in &self.bonding[e.level..to] {
            v = apply(m, &v)?;
        }
        Ok(ChainElement {
            level: to,
            vector: v,
        })
    }

    /// Integer preimage one level down, if any.
    fn pull(&self, e: &ChainElement) -> Option<ChainElement> {
        if e.level == 0 {
            return None;
        }
        let m = to_q(&self.bonding[e.level - 1]);
        let k = self.ranks[e.level - 1];
        // least squares normal equations are exact for injective m
        let mt: Vec<Vec<Rational>> = (0..k)
            .map(|j| m.iter().map(|r| r[j].clone()).collect())
            .collect();
        let gram: Vec<Vec<Rational>> = mt
            .iter()
            .map(|a| {
                mt.iter()
                    .map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum())
                    .collect()
            })
            .collect();
        let rhs: Vec<Rational> = mt
            .iter()
            .map(|a| {
                a.iter()
                    .zip(&e.vector)
                    .map(|(x, &y)| x * Rational::from_integer(BigInt::from(y)))
                    .sum()
            })
            .collect();
        let sol = solve_linear(gram, rhs)?;
        if sol.iter().any(|x| !x.is_integer()) {
            return None;
        }
        let v: Vec<i64> = sol
            .iter()
            .map(|x| i64::try_from(x.to_integer()).ok())
            .collect::<Option<_>>()?;
        let back = apply(&self.bonding[e.level - 1], &v).ok()?;
        (back == e.vector).then_some(ChainElement {
            level: e.level - 1,
            vector: v,
        })
    }

    /// Lowest-level representative (normal-form mode).
    pub fn normal_form(&self, e: &ChainElement) -> ChainElement {
        let mut cur = e.clone();
        while let Some(down) = self.pull(&cur) {
            cur = down;
        }
        cur
    }

    pub fn equal(&self, a: &ChainElement, b: &ChainElement) -> Result<bool> {
        match self.mode {
            AbelianMode::NormalForm => Ok(self.normal_form(a) == self.normal_form(b)),
            AbelianMode::EventuallyStable { .. } => {
                let top = self.top();
                Ok(self.push(a, top)? == self.push(b, top)?)
            }
        }
    }

    pub fn add(&self, a: &ChainElement, b: &ChainElement) -> Result<ChainElement> {
        let level = a.level.max(b.level);
        let (x, y) = (self.push(a, level)?, self.push(b, level)?);
        let v = x
            .vector
            .iter()
            .zip(&y.vector)
            .map(|(p, q)| {
                p.checked_add(*q)
                    .ok_or_else(|| Error::input("integer overflow"))
            })
            .collect::<Result<Vec<_>>>()?;
        let sum = ChainElement { level, vector: v };
        Ok(match self.mode {
            AbelianMode::NormalForm => self.normal_form(&sum),
            AbelianMode::EventuallyStable { .. } => sum,
        })
    }

    /// Stable rank and, for each stable level, the integer isomorphism to the top.
    pub fn stable_isomorphisms(&self) -> Result<(usize, Vec<(usize, IntMatrix)>)> {
        let AbelianMode::EventuallyStable { from } = self.mode else {
            return Err(Error::input("chain is not in eventually-stable mode"));
        };
        let top = self.top();
        let mut out = Vec::new();
        for level in from..=top {
            let k = self.ranks[level];
            let mut cols: Vec<Vec<i64>> = Vec::with_capacity(k);
            for j in 0..k {
                let e: Vec<i64> = (0..k).map(|i| i64::from(i == j)).collect();
                cols.push(self.push(&ChainElement { level, vector: e }, top)?.vector);
            }
            let m: IntMatrix = (0..self.ranks[top])
                .map(|i| cols.iter().map(|c| c[i]).collect())
                .collect();
            out.push((level, m));
        }
        Ok((self.ranks[top], out))
    }
}
