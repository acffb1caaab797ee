//! Lattice polytopes in dimension at most 4: convex hulls, volumes, Minkowski
//! sums and mixed volumes.
//!
//! Everything is exact integer arithmetic. Hulls come from facet enumeration
//! over point subsets, run on a candidate set that grows until its hull
//! contains every input point. Volumes are computed from a pulling
//! triangulation built out of the facet lattice, so `m! * volume` is an exact
//! integer.
//!
//! Mixed volumes use the Bernstein normalization `MV(K, ..., K) = m! vol(K)`,
//! under which the mixed volume of Newton polytopes counts solutions of a
//! generic sparse system in the torus.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::MultiPoly;

pub type LatticePoint = Vec<i64>;

pub const MAX_DIM: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePolytope {
    dim: usize,
    /// Extreme points, sorted lexicographically.
    vertices: Vec<LatticePoint>,
    #[serde(skip)]
    affine_dim: usize,
}

impl LatticePolytope {
    /// Convex hull of a nonempty point set.
    pub fn from_points(dim: usize, points: &[LatticePoint]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("empty point set".into()));
        }
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "ambient dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        let unique: Vec<LatticePoint> = points
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let affine_dim = affine_dimension(&unique);
        let vertices = extreme_points(&unique, affine_dim);
        Ok(Self {
            dim,
            vertices,
            affine_dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim == self.dim
    }

    /// `m! * volume`, an exact integer; zero for lower-dimensional hulls.
    pub fn normalized_volume(&self) -> i128 {
        if !self.is_full_dimensional() {
            return 0;
        }
        let facets = facet_vertex_sets(&self.vertices);
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let simplices = pulling_triangulation(&self.vertices, &all, self.dim, &facets);
        simplices
            .iter()
            .map(|s| {
                let base = &self.vertices[s[0]];
                let rows: Vec<Vec<i128>> = s[1..]
                    .iter()
                    .map(|&i| {
                        self.vertices[i]
                            .iter()
                            .zip(base)
                            .map(|(a, b)| i128::from(a - b))
                            .collect()
                    })
                    .collect();
                determinant(rows).abs()
            })
            .sum()
    }

    pub fn volume(&self) -> f64 {
        self.normalized_volume() as f64 / factorial(self.dim) as f64
    }

    /// `k * P`.
    pub fn dilate(&self, k: i64) -> Self {
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| x * k).collect())
            .collect();
        Self {
            dim: self.dim,
            vertices,
            affine_dim: if k == 0 { 0 } else { self.affine_dim },
        }
    }

    /// The degree-`d` standard simplex `conv(0, d e_1, ..., d e_m)`.
    pub fn simplex(dim: usize, d: i64) -> Self {
        let mut pts = vec![vec![0; dim]];
        for i in 0..dim {
            let mut p = vec![0; dim];
            p[i] = d;
            pts.push(p);
        }
        Self::from_points(dim, &pts).expect("valid simplex")
    }

    /// The unit cube `[0, 1]^m`.
    pub fn unit_cube(dim: usize) -> Self {
        let pts: Vec<LatticePoint> = (0..1u32 << dim)
            .map(|mask| (0..dim).map(|i| i64::from((mask >> i) & 1)).collect())
            .collect();
        Self::from_points(dim, &pts).expect("valid cube")
    }
}

pub fn newton_polytope(f: &MultiPoly) -> Result<LatticePolytope> {
    let pts: Vec<LatticePoint> = f
        .support()?
        .iter()
        .map(|e| e.entries().iter().map(|&a| i64::from(a)).collect())
        .collect();
    LatticePolytope::from_points(f.nvars(), &pts)
}

pub fn minkowski_sum(p: &LatticePolytope, q: &LatticePolytope) -> Result<LatticePolytope> {
    if p.dim != q.dim {
        return Err(Error::DimensionMismatch {
            expected: p.dim,
            got: q.dim,
        });
    }
    let mut pts = Vec::with_capacity(p.vertices.len() * q.vertices.len());
    for v in &p.vertices {
        for w in &q.vertices {
            pts.push(v.iter().zip(w).map(|(a, b)| a + b).collect());
        }
    }
    LatticePolytope::from_points(p.dim, &pts)
}

/// Bernstein-normalized mixed volume by inclusion-exclusion,
/// `MV(K_1..K_m) = sum over nonempty S of (-1)^(m-|S|) vol(sum_{i in S} K_i)`.
pub fn mixed_volume(ks: &[LatticePolytope]) -> Result<f64> {
    let m = ks.len();
    if m == 0 {
        return Err(Error::InvalidArgument("no polytopes given".into()));
    }
    if let Some(k) = ks.iter().find(|k| k.dim != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: k.dim,
        });
    }
    // sums[mask] = Minkowski sum of the polytopes selected by mask
    let mut sums: Vec<Option<LatticePolytope>> = vec![None; 1 << m];
    let mut total: i128 = 0;
    for mask in 1usize..1 << m {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let sum = match &sums[rest] {
            None => ks[low].clone(),
            Some(r) => minkowski_sum(r, &ks[low])?,
        };
        let sign = if (m - mask.count_ones() as usize).is_multiple_of(2) { 1 } else { -1 };
        total += sign * sum.normalized_volume();
        sums[mask] = Some(sum);
    }
    Ok(total as f64 / factorial(m) as f64)
}

/// Mikhalkin's `alpha(V)`: the mixed volume with each polytope repeated twice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Alpha {
    pub value: f64,
    /// Some input polytope has a lower-dimensional hull.
    pub lower_dimensional: bool,
}

pub fn mikhalkin_alpha(deltas: &[LatticePolytope]) -> Result<Alpha> {
    let n = deltas.len();
    if !(1..=2).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "half-dimension {n} not supported (1 or 2)"
        )));
    }
    let doubled: Vec<LatticePolytope> = deltas
        .iter()
        .flat_map(|d| [d.clone(), d.clone()])
        .collect();
    Ok(Alpha {
        value: mixed_volume(&doubled)?,
        lower_dimensional: deltas.iter().any(|d| !d.is_full_dimensional()),
    })
}

/// Dimension of the affine hull of a point set (0 for a single point).
pub fn affine_dimension(points: &[LatticePoint]) -> usize {
    match points.split_first() {
        None => 0,
        Some((base, rest)) => {
            let rows: Vec<Vec<i128>> = rest
                .iter()
                .map(|p| p.iter().zip(base).map(|(a, b)| i128::from(a - b)).collect())
                .collect();
            row_echelon(rows).0
        }
    }
}

fn factorial(n: usize) -> i128 {
    (1..=n as i128).product()
}

/// Fraction-free row reduction; returns `(rank, pivot columns)`.
fn row_echelon(mut rows: Vec<Vec<i128>>) -> (usize, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut pivots = Vec::new();
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot_row = rows[rank].clone();
        for r in rows.iter_mut().skip(rank + 1) {
            let f = r[col];
            if f == 0 {
                continue;
            }
            for (x, &y) in r.iter_mut().zip(&pivot_row) {
                *x = *x * pivot_row[col] - f * y;
            }
            let g = r.iter().fold(0, |g, &x| gcd(g, x.abs()));
            if g > 1 {
                r.iter_mut().for_each(|x| *x /= g);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    (rank, pivots)
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact determinant by Bareiss elimination.
fn determinant(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Normal of the hyperplane through `m` points in `R^m` (generalized cross
/// product of the edge vectors); zero when the points are dependent.
fn hyperplane_normal(pts: &[&LatticePoint]) -> Vec<i128> {
    let m = pts[0].len();
    let edges: Vec<Vec<i128>> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(pts[0]).map(|(a, b)| i128::from(a - b)).collect())
        .collect();
    (0..m)
        .map(|j| {
            let minor: Vec<Vec<i128>> = edges
                .iter()
                .map(|e| e.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, &x)| x).collect())
                .collect();
            let d = determinant(minor);
            if j % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

struct Facet {
    normal: Vec<i128>,
    members: Vec<usize>,
}

/// Facets of a full-dimensional point configuration, each with the indices of
/// the points lying on it.
fn facets(points: &[LatticePoint]) -> Vec<Facet> {
    let m = points[0].len();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for combo in Combinations::new(points.len(), m) {
        let sel: Vec<&LatticePoint> = combo.iter().map(|&i| &points[i]).collect();
        let mut normal = hyperplane_normal(&sel);
        if normal.iter().all(|&x| x == 0) {
            continue;
        }
        let g = normal.iter().fold(0, |g, &x| gcd(g, x.abs()));
        normal.iter_mut().for_each(|x| *x /= g);
        let offset = dot(&normal, sel[0]);
        let side: Vec<i128> = points.iter().map(|p| dot(&normal, p) - offset).collect();
        let (pos, neg) = (side.iter().any(|&s| s > 0), side.iter().any(|&s| s < 0));
        if pos && neg {
            continue;
        }
        if pos {
            normal.iter_mut().for_each(|x| *x = -*x);
        }
        if !seen.insert(normal.clone()) {
            continue;
        }
        let members = side
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 0)
            .map(|(i, _)| i)
            .collect();
        out.push(Facet { normal, members });
    }
    out
}

fn dot(n: &[i128], p: &[i64]) -> i128 {
    n.iter().zip(p).map(|(a, &b)| a * i128::from(b)).sum()
}

fn facet_vertex_sets(vertices: &[LatticePoint]) -> Vec<Vec<usize>> {
    facets(vertices).into_iter().map(|f| f.members).collect()
}

/// Extreme points of a (deduplicated, sorted) point set with affine dimension `k`.
fn extreme_points(points: &[LatticePoint], k: usize) -> Vec<LatticePoint> {
    if k == 0 {
        return vec![points[0].clone()];
    }
    let m = points[0].len();
    if k < m {
        // Coordinates projecting the affine hull bijectively onto R^k.
        let base = &points[0];
        let rows: Vec<Vec<i128>> = points[1..]
            .iter()
            .map(|p| p.iter().zip(base).map(|(a, b)| i128::from(a - b)).collect())
            .collect();
        let (_, pivots) = row_echelon(rows);
        let projected: Vec<LatticePoint> = points
            .iter()
            .map(|p| pivots.iter().map(|&c| p[c]).collect())
            .collect();
        let keep = extreme_indices_full(&projected);
        return keep.into_iter().map(|i| points[i].clone()).collect();
    }
    extreme_indices_full(points)
        .into_iter()
        .map(|i| points[i].clone())
        .collect()
}

fn extreme_indices_full(points: &[LatticePoint]) -> Vec<usize> {
    let m = points[0].len();
    if m == 1 {
        let lo = (0..points.len()).min_by_key(|&i| points[i][0]).unwrap();
        let hi = (0..points.len()).max_by_key(|&i| points[i][0]).unwrap();
        let mut v = vec![lo, hi];
        v.sort_unstable();
        v.dedup();
        return v;
    }
    if points.len() <= 2 * m + 4 {
        return exhaustive_extreme(points);
    }
    // grow a candidate set until every point lies inside its hull
    let mut cand = directional_maximizers(points);
    loop {
        let idx: Vec<usize> = cand.iter().copied().collect();
        let sub: Vec<LatticePoint> = idx.iter().map(|&i| points[i].clone()).collect();
        if affine_dimension(&sub) < m {
            return exhaustive_extreme(points);
        }
        let mut grew = false;
        for f in facets(&sub) {
            let offset = dot(&f.normal, &sub[f.members[0]]);
            let far = (0..points.len())
                .map(|i| (dot(&f.normal, &points[i]) - offset, i))
                .filter(|&(h, _)| h > 0)
                .max_by_key(|&(h, i)| (h, std::cmp::Reverse(i)));
            if let Some((_, i)) = far {
                grew |= cand.insert(i);
            }
        }
        if !grew {
            return exhaustive_extreme(&sub).into_iter().map(|j| idx[j]).collect();
        }
    }
}

/// Indices of maximizers of `<c, p>` for every `c` in `{-1, 0, 1}^m`.
fn directional_maximizers(points: &[LatticePoint]) -> BTreeSet<usize> {
    let m = points[0].len();
    let mut out = BTreeSet::new();
    for code in 0..3usize.pow(m as u32) {
        let c: Vec<i128> = (0..m).map(|j| (code / 3usize.pow(j as u32) % 3) as i128 - 1).collect();
        if c.iter().all(|&x| x == 0) {
            continue;
        }
        if let Some(i) = (0..points.len()).max_by_key(|&i| (dot(&c, &points[i]), std::cmp::Reverse(i))) {
            out.insert(i);
        }
    }
    out
}

fn exhaustive_extreme(points: &[LatticePoint]) -> Vec<usize> {
    let m = points[0].len();
    let fs = facets(points);
    (0..points.len())
        .filter(|&i| {
            let normals: Vec<Vec<i128>> = fs
                .iter()
                .filter(|f| f.members.contains(&i))
                .map(|f| f.normal.clone())
                .collect();
            row_echelon(normals).0 == m
        })
        .collect()
}

/// Simplices (as vertex index lists) of the pulling triangulation of the face
/// spanned by `face`, which has affine dimension `k`.
fn pulling_triangulation(
    vertices: &[LatticePoint],
    face: &[usize],
    k: usize,
    facets: &[Vec<usize>],
) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![face[0]]];
    }
    let apex = face[0];
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for f in facets {
        let sub: Vec<usize> = face.iter().copied().filter(|i| f.contains(i)).collect();
        if sub.len() == face.len() || sub.contains(&apex) || sub.is_empty() {
            continue;
        }
        let pts: Vec<LatticePoint> = sub.iter().map(|&i| vertices[i].clone()).collect();
        if affine_dimension(&pts) != k - 1 || !seen.insert(sub.clone()) {
            continue;
        }
        for mut s in pulling_triangulation(vertices, &sub, k - 1, facets) {
            s.insert(0, apex);
            out.push(s);
        }
    }
    out
}

/// Lexicographic `k`-subsets of `0..n`.
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            idx: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn poly(nvars: usize, exps: &[&[u32]]) -> MultiPoly {
        MultiPoly::from_real_terms(nvars, exps.iter().map(|e| (e.to_vec(), 1.0))).unwrap()
    }

    fn square() -> LatticePolytope {
        LatticePolytope::unit_cube(2)
    }

    #[test]
    fn pruned_hull_matches_exhaustive() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..60 {
            let m = 2 + trial % 3;
            let pts: Vec<LatticePoint> = (0..rng.random_range(12..30))
                .map(|_| (0..m).map(|_| rng.random_range(0..5)).collect())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            if affine_dimension(&pts) < m {
                continue;
            }
            assert_eq!(extreme_indices_full(&pts), exhaustive_extreme(&pts), "trial {trial}");
        }
    }

    #[test]
    fn newton_polytope_examples() {
        // dense degree 3 in two variables
        let mut terms = Vec::new();
        for a in 0..=3u32 {
            for b in 0..=3 - a {
                terms.push((vec![a, b], Complex64::new(1.0, 0.0)));
            }
        }
        let dense = MultiPoly::from_terms(2, crate::poly::Field::Complex, terms).unwrap();
        let p = newton_polytope(&dense).unwrap();
        assert_eq!(p.vertices(), &[vec![0, 0], vec![0, 3], vec![3, 0]]);

        let seg = newton_polytope(&poly(2, &[&[1, 1], &[0, 0]])).unwrap();
        assert_eq!(seg.vertices(), &[vec![0, 0], vec![1, 1]]);
        assert!(!seg.is_full_dimensional());
        assert_eq!(seg.volume(), 0.0);

        let sq = newton_polytope(&poly(2, &[&[1, 0], &[0, 1], &[1, 1], &[0, 0]])).unwrap();
        assert_eq!(sq, square());

        assert!(newton_polytope(&MultiPoly::zero(2, crate::poly::Field::Real)).is_err());
    }

    #[test]
    fn interior_and_edge_points_are_not_vertices() {
        let pts = vec![
            vec![0, 0],
            vec![2, 0],
            vec![0, 2],
            vec![1, 0],
            vec![1, 1],
            vec![0, 1],
            vec![2, 2],
        ];
        let p = LatticePolytope::from_points(2, &pts).unwrap();
        assert_eq!(p.vertices(), &[vec![0, 0], vec![0, 2], vec![2, 0], vec![2, 2]]);
        let collinear =
            LatticePolytope::from_points(3, &[vec![0, 0, 0], vec![1, 1, 1], vec![3, 3, 3]]).unwrap();
        assert_eq!(collinear.vertices(), &[vec![0, 0, 0], vec![3, 3, 3]]);
        assert_eq!(collinear.affine_dim(), 1);
    }

    #[test]
    fn minkowski_examples() {
        let s2 = minkowski_sum(&square(), &square()).unwrap();
        assert_eq!(s2, square().dilate(2));
        let origin = LatticePolytope::from_points(2, &[vec![0, 0]]).unwrap();
        assert_eq!(minkowski_sum(&square(), &origin).unwrap(), square());
        let tri = LatticePolytope::simplex(2, 1);
        let pent = minkowski_sum(&tri, &square()).unwrap();
        assert_eq!(
            pent.vertices(),
            &[vec![0, 0], vec![0, 2], vec![1, 2], vec![2, 0], vec![2, 1]]
        );
        assert!(minkowski_sum(&square(), &LatticePolytope::unit_cube(3)).is_err());
    }

    #[test]
    fn volume_examples() {
        for d in 1..=4 {
            assert_eq!(LatticePolytope::simplex(2, d).volume(), (d * d) as f64 / 2.0);
        }
        assert_eq!(square().volume(), 1.0);
        assert_eq!(LatticePolytope::unit_cube(3).volume(), 1.0);
        assert_eq!(LatticePolytope::unit_cube(4).volume(), 1.0);
        assert_eq!(LatticePolytope::simplex(4, 1).normalized_volume(), 1);
        assert_eq!(LatticePolytope::simplex(3, 2).normalized_volume(), 8);
        let pent = minkowski_sum(&LatticePolytope::simplex(2, 1), &square()).unwrap();
        assert_eq!(pent.volume(), 3.5);
    }

    #[test]
    fn mixed_volume_examples() {
        for d in 1..=3 {
            let t = LatticePolytope::simplex(2, d);
            assert_eq!(mixed_volume(&[t.clone(), t]).unwrap(), (d * d) as f64);
        }
        assert_eq!(mixed_volume(&[square(), square()]).unwrap(), 2.0);
        for m in 2..=4 {
            let ks = vec![LatticePolytope::simplex(m, 1); m];
            assert_eq!(mixed_volume(&ks).unwrap(), 1.0);
        }
        assert!(mixed_volume(&[square()]).is_err());
    }

    #[test]
    fn mikhalkin_alpha_examples() {
        let a = mikhalkin_alpha(&[LatticePolytope::simplex(2, 3)]).unwrap();
        assert_eq!(a.value, 9.0);
        assert!(!a.lower_dimensional);
        assert_eq!(mikhalkin_alpha(&[square()]).unwrap().value, 2.0);
        let s = LatticePolytope::simplex(4, 1);
        assert_eq!(mikhalkin_alpha(&[s.clone(), s]).unwrap().value, 1.0);
        let seg = LatticePolytope::from_points(2, &[vec![0, 0], vec![1, 1]]).unwrap();
        let a = mikhalkin_alpha(&[seg]).unwrap();
        assert_eq!(a.value, 0.0);
        assert!(a.lower_dimensional);
    }

    #[test]
    fn affine_dimension_counts_rank() {
        assert_eq!(affine_dimension(&[vec![1, 2]]), 0);
        assert_eq!(affine_dimension(&[vec![0, 0], vec![1, 1], vec![2, 2]]), 1);
        assert_eq!(affine_dimension(&[vec![0, 0], vec![1, 0], vec![0, 1]]), 2);
    }

    #[test]
    fn combinations_enumerate_all() {
        assert_eq!(Combinations::new(5, 2).count(), 10);
        assert_eq!(Combinations::new(4, 4).count(), 1);
        assert_eq!(Combinations::new(3, 4).count(), 0);
    }
}
