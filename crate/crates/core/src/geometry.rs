//! Rational simplices, barycentric coordinates and normal frames.
//!
//! Vertices are stored sorted by global id, so local label `i` always refers
//! to the `i`-th smallest id and sub-simplices can be named by id tuples.

use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{dot, fmt_q, primitive, q, random_q, sub_vec, Rationals, Q};
use crate::error::{Error, Result};
use crate::linalg::{dense_to_sparse, factorize};

pub type Point = Vec<Q>;

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    ids: Vec<usize>,
    vertices: Vec<Point>,
    /// `grads[i]` is the constant gradient of `λ_i`.
    grads: Vec<Vec<Q>>,
}

fn solve_square(m: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let f = factorize(&Rationals, dense_to_sparse(&Rationals, m), m.len());
    if !f.is_nonsingular() {
        return None;
    }
    f.solve(&Rationals, b)
}

impl Simplex {
    /// Builds a simplex from global ids and coordinates; the vertices are
    /// reordered by ascending id.
    pub fn new(ids: Vec<usize>, vertices: Vec<Point>) -> Result<Self> {
        let n = ids.len();
        if n == 0 || vertices.len() != n {
            return Err(Error::Geometry("need d+1 ids and d+1 vertices".into()));
        }
        let d = n - 1;
        if vertices.iter().any(|v| v.len() != d) {
            return Err(Error::Geometry(format!("vertices of a {d}-simplex need {d} coordinates")));
        }
        let mut pairs: Vec<(usize, Point)> = ids.into_iter().zip(vertices).collect();
        pairs.sort_by_key(|p| p.0);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Geometry("duplicate vertex id".into()));
        }
        let (ids, vertices): (Vec<usize>, Vec<Point>) = pairs.into_iter().unzip();
        let grads = Self::gradients(&vertices)?;
        Ok(Self { ids, vertices, grads })
    }

    fn gradients(vertices: &[Point]) -> Result<Vec<Vec<Q>>> {
        let d = vertices.len() - 1;
        if d == 0 {
            return Ok(vec![Vec::new()]);
        }
        let edges: Vec<Vec<Q>> = (1..=d).map(|i| sub_vec(&vertices[i], &vertices[0])).collect();
        let f = factorize(&Rationals, dense_to_sparse(&Rationals, &edges), d);
        if !f.is_nonsingular() {
            return Err(Error::Geometry("degenerate simplex".into()));
        }
        let mut grads = vec![vec![Q::zero(); d]; d + 1];
        for i in 1..=d {
            let mut e = vec![Q::zero(); d];
            e[i - 1] = Q::one();
            grads[i] = f.solve(&Rationals, &e).expect("nonsingular");
        }
        grads[0] = (0..d)
            .map(|j| -(1..=d).fold(Q::zero(), |acc, i| acc + &grads[i][j]))
            .collect();
        Ok(grads)
    }

    pub fn reference(d: usize) -> Self {
        let mut vs = vec![vec![Q::zero(); d]];
        for i in 0..d {
            let mut v = vec![Q::zero(); d];
            v[i] = Q::one();
            vs.push(v);
        }
        Self::new((0..=d).collect(), vs).expect("reference simplex")
    }

    /// A random nondegenerate simplex with small rational coordinates.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        loop {
            let vs: Vec<Point> = (0..=d)
                .map(|_| (0..d).map(|_| random_q(rng, 6)).collect())
                .collect();
            if let Ok(s) = Self::new((0..=d).collect(), vs) {
                return s;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Point {
        &self.vertices[i]
    }

    pub fn grad(&self, i: usize) -> &[Q] {
        &self.grads[i]
    }

    /// Local label of a global id.
    pub fn local(&self, id: usize) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    pub fn global(&self, labels: &[usize]) -> Vec<usize> {
        labels.iter().map(|&i| self.ids[i]).collect()
    }

    pub fn barycentric(&self, x: &[Q]) -> Result<Vec<Q>> {
        if x.len() != self.dim() {
            return Err(Error::Geometry("point has the wrong dimension".into()));
        }
        let rel = sub_vec(x, &self.vertices[0]);
        let mut lam: Vec<Q> = self.grads.iter().map(|g| dot(g, &rel)).collect();
        lam[0] = Q::one() - lam[1..].iter().fold(Q::zero(), |a, b| a + b);
        Ok(lam)
    }

    /// `dλ_i(v)` for every `i`; the entries sum to zero.
    pub fn bary_direction(&self, v: &[Q]) -> Vec<Q> {
        self.grads.iter().map(|g| dot(g, v)).collect()
    }

    pub fn cartesian(&self, lambda: &[Q]) -> Point {
        let d = self.dim();
        let mut x = vec![Q::zero(); d];
        for (l, v) in lambda.iter().zip(&self.vertices) {
            for j in 0..d {
                x[j] += l * &v[j];
            }
        }
        x
    }

    pub fn centroid(&self, labels: &[usize]) -> Point {
        let w = Q::new(1.into(), (labels.len() as i64).into());
        let mut lam = vec![Q::zero(); self.dim() + 1];
        for &i in labels {
            lam[i] = w.clone();
        }
        self.cartesian(&lam)
    }

    /// Edge vectors `x_j - x_{Δ_0}` spanning the tangent space of `Δ̄`.
    pub fn tangent(&self, delta: &[usize]) -> Vec<Vec<Q>> {
        delta[1..]
            .iter()
            .map(|&j| sub_vec(&self.vertices[j], &self.vertices[delta[0]]))
            .collect()
    }

    pub fn subsimplex(&self, delta: &[usize]) -> Result<SubsimplexRef> {
        let mut local = delta.to_vec();
        local.sort_unstable();
        local.dedup();
        if local.is_empty() || local.len() != delta.len() || local.iter().any(|&i| i > self.dim()) {
            return Err(Error::Geometry(format!("bad sub-simplex {delta:?}")));
        }
        Ok(SubsimplexRef {
            ids: self.global(&local),
            codim: self.dim() + 1 - local.len(),
            local,
        })
    }

    /// Orthogonal (unnormalized) basis of the normal space of `Δ̄`.
    ///
    /// Built by projecting the standard basis vectors off the tangent space
    /// and off the vectors already accepted, then scaling each to a primitive
    /// integer vector. The result depends on the point set of `Δ̄` only, so
    /// every element containing `Δ̄` produces the same frame.
    pub fn canonical_frame(&self, delta: &[usize]) -> Result<NormalFrame> {
        let d = self.dim();
        let want = d + 1 - delta.len();
        if delta.is_empty() {
            return Err(Error::Geometry("frame needs a nonempty sub-simplex".into()));
        }
        let mut ortho = gram_schmidt(&self.tangent(delta));
        let mut vectors = Vec::with_capacity(want);
        for j in 0..d {
            if vectors.len() == want {
                break;
            }
            let mut e = vec![Q::zero(); d];
            e[j] = Q::one();
            let w = project_off(&e, &ortho);
            if w.iter().all(|x| x.is_zero()) {
                continue;
            }
            let w = primitive(&w);
            ortho.push(w.clone());
            vectors.push(w);
        }
        debug_assert_eq!(vectors.len(), want);
        Ok(NormalFrame {
            kind: FrameKind::Perpendicular,
            vectors,
        })
    }

    /// Canonical frame for `N = complement(Δ)`; errors when `N` is the full set.
    pub fn perpendicular_frame(&self, n_set: &[usize]) -> Result<NormalFrame> {
        if n_set.len() > self.dim() {
            return Err(Error::Geometry("N must be a proper subset".into()));
        }
        let delta: Vec<usize> = (0..=self.dim()).filter(|i| !n_set.contains(i)).collect();
        self.canonical_frame(&delta)
    }

    /// Component of `centroid(Δ̄) - x_i` orthogonal to the tangent space of `Δ̄`.
    pub fn outer_normal(&self, delta: &[usize], i: usize) -> Result<Vec<Q>> {
        if delta.contains(&i) {
            return Err(Error::Geometry(format!("vertex {i} belongs to the sub-simplex")));
        }
        let v = sub_vec(&self.centroid(delta), &self.vertices[i]);
        let w = project_off(&v, &gram_schmidt(&self.tangent(delta)));
        Ok(primitive(&w))
    }

    pub fn outer_frame(&self, delta: &[usize]) -> Result<NormalFrame> {
        let n_set: Vec<usize> = (0..=self.dim()).filter(|i| !delta.contains(i)).collect();
        let vectors = n_set
            .iter()
            .map(|&i| self.outer_normal(delta, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(NormalFrame {
            kind: FrameKind::OuterFacewise,
            vectors,
        })
    }

    /// Vectors `v_i` (`i ∈ N`) orthogonal to `Δ̄` with `dλ_j(v_i) = δ_ij` for `j ∈ N`.
    pub fn lambda_dual_vectors(&self, n_set: &[usize]) -> Result<Vec<Vec<Q>>> {
        let frame = self.perpendicular_frame(n_set)?.vectors;
        let m = n_set.len();
        let mat: Vec<Vec<Q>> = n_set
            .iter()
            .map(|&j| frame.iter().map(|f| dot(&self.grads[j], f)).collect())
            .collect();
        let mut out = Vec::with_capacity(m);
        for col in 0..m {
            let mut e = vec![Q::zero(); m];
            e[col] = Q::one();
            let a = solve_square(&mat, &e).ok_or_else(|| Error::Geometry("singular normal system".into()))?;
            let mut v = vec![Q::zero(); self.dim()];
            for (ak, f) in a.iter().zip(&frame) {
                for (vj, fj) in v.iter_mut().zip(f) {
                    *vj += ak * fj;
                }
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Squared `t`-dimensional measure of `Δ̄`: `det(T Tᵀ) / (t!)²` with `T`
    /// the matrix of tangent edge vectors. Zero when degenerate.
    pub fn gram_measure_sq(&self, delta: &[usize]) -> Q {
        let t = self.tangent(delta);
        if t.is_empty() {
            return Q::one();
        }
        let g: Vec<Vec<Q>> = t.iter().map(|a| t.iter().map(|b| dot(a, b)).collect()).collect();
        let f = factorize(&Rationals, dense_to_sparse(&Rationals, &g), g.len());
        let det = f.determinant(&Rationals);
        let fact = (1..=t.len() as i64).fold(Q::one(), |a, i| a * q(i));
        det / (&fact * &fact)
    }
}

/// Orthogonalizes without normalizing; zero vectors are dropped.
pub fn gram_schmidt(vs: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut out: Vec<Vec<Q>> = Vec::new();
    for v in vs {
        let w = project_off(v, &out);
        if w.iter().any(|x| !x.is_zero()) {
            out.push(w);
        }
    }
    out
}

/// `v` minus its projection onto the span of the mutually orthogonal `basis`.
pub fn project_off(v: &[Q], basis: &[Vec<Q>]) -> Vec<Q> {
    let mut w = v.to_vec();
    for b in basis {
        let c = dot(&w, b) / dot(b, b);
        for (wi, bi) in w.iter_mut().zip(b) {
            *wi -= &c * bi;
        }
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameKind {
    Perpendicular,
    OuterFacewise,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalFrame {
    pub kind: FrameKind,
    pub vectors: Vec<Vec<Q>>,
}

impl NormalFrame {
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.vectors.iter().map(|v| v.iter().map(fmt_q).collect()).collect()
    }
}

/// A sub-simplex of a parent element, by local labels and global ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubsimplexRef {
    pub ids: Vec<usize>,
    pub local: Vec<usize>,
    pub codim: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qr;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pt(v: &[i64]) -> Point {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn barycentric_basics() {
        let s = Simplex::reference(2);
        assert_eq!(s.barycentric(&pt(&[1, 0])).unwrap(), pt(&[0, 1, 0]));
        let c = s.centroid(&[0, 1, 2]);
        assert_eq!(s.barycentric(&c).unwrap(), vec![qr(1, 3); 3]);
        let out = s.barycentric(&pt(&[2, 2])).unwrap();
        assert!(out.iter().any(|l| l < &Q::zero()));
        assert_eq!(out.iter().fold(Q::zero(), |a, b| a + b), Q::one());
    }

    #[test]
    fn frames_on_reference_simplices() {
        let s = Simplex::reference(2);
        let f = s.perpendicular_frame(&[2]).unwrap();
        assert_eq!(f.vectors, vec![pt(&[0, 1])]);
        assert_eq!(s.outer_normal(&[0, 1], 2).unwrap(), pt(&[0, -1]));
        let seg = Simplex::new(vec![0, 1], vec![pt(&[0]), pt(&[3])]).unwrap();
        assert_eq!(seg.outer_normal(&[0], 1).unwrap(), pt(&[-1]));

        let t = Simplex::reference(3);
        let f = t.canonical_frame(&[0, 1]).unwrap().vectors;
        assert_eq!(f.len(), 2);
        let edge = sub_vec(t.vertex(1), t.vertex(0));
        assert!(dot(&f[0], &f[1]).is_zero());
        assert!(f.iter().all(|v| dot(v, &edge).is_zero()));
        let m = t.outer_normal(&[0, 1], 2).unwrap();
        assert!(dot(&m, &edge).is_zero());
        let face_normal = pt(&[0, 0, 1]);
        assert!(dot(&m, &face_normal).is_zero());
    }

    #[test]
    fn frame_agrees_across_neighbours() {
        let a = Simplex::new(vec![0, 1, 2], vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])]).unwrap();
        let b = Simplex::new(vec![1, 2, 3], vec![pt(&[1, 0]), pt(&[0, 1]), pt(&[1, 1])]).unwrap();
        let fa = a.canonical_frame(&[1, 2]).unwrap();
        let fb = b.canonical_frame(&[0, 1]).unwrap();
        assert_eq!(fa, fb);
    }

    #[test]
    fn measures() {
        let seg = Simplex::new(vec![0, 1], vec![pt(&[0]), pt(&[1])]).unwrap();
        assert_eq!(seg.gram_measure_sq(&[0, 1]), q(1));
        assert_eq!(Simplex::reference(2).gram_measure_sq(&[0, 1, 2]), qr(1, 4));
    }

    #[test]
    fn degenerate_is_rejected() {
        assert!(Simplex::new(vec![0, 1, 2], vec![pt(&[0, 0]), pt(&[1, 1]), pt(&[2, 2])]).is_err());
        assert!(Simplex::new(vec![0, 0, 2], vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])]).is_err());
    }

    fn shoelace_sq(s: &Simplex) -> Q {
        let v = s.vertices();
        let a = (&v[1][0] - &v[0][0]) * (&v[2][1] - &v[0][1]) - (&v[2][0] - &v[0][0]) * (&v[1][1] - &v[0][1]);
        let half = a / q(2);
        &half * &half
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn random_triangle_area_matches_shoelace(seed in any::<u64>()) {
            let s = Simplex::random(2, &mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(s.gram_measure_sq(&[0, 1, 2]), shoelace_sq(&s));
        }

        #[test]
        fn affine_identities(seed in any::<u64>(), d in 1usize..=3) {
            let s = Simplex::random(d, &mut ChaCha8Rng::seed_from_u64(seed));
            for i in 0..=d {
                let lam = s.barycentric(s.vertex(i)).unwrap();
                for (j, l) in lam.iter().enumerate() {
                    prop_assert_eq!(l.clone(), if i == j { q(1) } else { q(0) });
                }
                for j in 0..=d {
                    if j == i { continue; }
                    let e = sub_vec(s.vertex(j), s.vertex(i));
                    prop_assert_eq!(dot(s.grad(i), &e), q(-1));
                    for l in 0..=d {
                        if l != i && l != j {
                            let e2 = sub_vec(s.vertex(j), s.vertex(l));
                            prop_assert_eq!(dot(s.grad(i), &e2), q(0));
                        }
                    }
                }
            }
        }

        #[test]
        fn frames_are_orthogonal_and_normal(seed in any::<u64>(), d in 1usize..=3, mask in 1u32..15) {
            let s = Simplex::random(d, &mut ChaCha8Rng::seed_from_u64(seed));
            let delta: Vec<usize> = (0..=d).filter(|i| mask & (1 << i) != 0).collect();
            prop_assume!(!delta.is_empty() && delta.len() <= d);
            let f = s.canonical_frame(&delta).unwrap().vectors;
            prop_assert_eq!(f.len(), d + 1 - delta.len());
            let tan = s.tangent(&delta);
            for (a, u) in f.iter().enumerate() {
                for t in &tan {
                    prop_assert!(dot(u, t).is_zero());
                }
                for w in &f[a + 1..] {
                    prop_assert!(dot(u, w).is_zero());
                }
            }
            let n_set: Vec<usize> = (0..=d).filter(|i| !delta.contains(i)).collect();
            let vs = s.lambda_dual_vectors(&n_set).unwrap();
            for (a, v) in vs.iter().enumerate() {
                for t in &tan {
                    prop_assert!(dot(v, t).is_zero());
                }
                for (b, &j) in n_set.iter().enumerate() {
                    prop_assert_eq!(dot(s.grad(j), v), if a == b { q(1) } else { q(0) });
                }
            }
            for &i in &n_set {
                let m = s.outer_normal(&delta, i).unwrap();
                for t in &tan {
                    prop_assert!(dot(&m, t).is_zero());
                }
                let toward = sub_vec(&s.centroid(&delta), s.vertex(i));
                prop_assert!(dot(&m, &toward) > Q::zero());
            }
        }
    }
}
