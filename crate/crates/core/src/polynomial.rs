//! Homogeneous polynomials in barycentric coordinates.
//!
//! A [`BaryPoly`] of degree `k` on labels `L` is `Σ c_α Π λ_{L_j}^{α_j}` with
//! `|α| = k` for every stored term. Lower-degree input is lifted with
//! `Σ λ = 1`, so the representation of a function in `P_k` is unique.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::arith::{dot, factorial, q, random_q, sub_vec, Q};
use crate::error::{Error, Result};
use crate::geometry::Simplex;
use crate::multiindex::{sigma, MultiIndex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaryPoly {
    labels: Vec<usize>,
    degree: u32,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl BaryPoly {
    pub fn zero(labels: Vec<usize>, degree: u32) -> Self {
        Self {
            labels,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(labels: Vec<usize>, c: Q) -> Self {
        let mut p = Self::zero(labels, 0);
        p.add_term(vec![0; p.labels.len()], c);
        p
    }

    pub fn monomial(labels: Vec<usize>, alpha: &MultiIndex) -> Self {
        let mut p = Self::zero(labels, alpha.degree());
        assert_eq!(alpha.len(), p.labels.len(), "exponent length");
        p.add_term(alpha.0.clone(), Q::one());
        p
    }

    /// `Σ c_j λ_{L_j}`.
    pub fn linear(labels: Vec<usize>, coeffs: &[Q]) -> Self {
        let n = labels.len();
        let mut p = Self::zero(labels, 1);
        for (j, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[j] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    /// Builds from explicit terms; all exponents must share one degree.
    pub fn from_terms(labels: Vec<usize>, degree: u32, terms: impl IntoIterator<Item = (MultiIndex, Q)>) -> Result<Self> {
        let mut p = Self::zero(labels, degree);
        for (a, c) in terms {
            if a.len() != p.labels.len() || a.degree() != degree {
                return Err(Error::Mismatch(format!("term {a} does not fit degree {degree}")));
            }
            p.add_term(a.0, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Vec<u32>, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, alpha: &[u32]) -> Q {
        self.terms.get(alpha).cloned().unwrap_or_else(Q::zero)
    }

    /// Coefficients in the monomial basis `Σ(|L|-1, degree)` (descending lex).
    pub fn coefficients(&self) -> Vec<Q> {
        sigma(self.labels.len(), self.degree)
            .into_iter()
            .map(|a| self.coeff(&a.0))
            .collect()
    }

    fn same_labels(&self, other: &Self) -> Result<()> {
        if self.labels != other.labels {
            return Err(Error::Mismatch(format!(
                "labels {:?} vs {:?}",
                self.labels, other.labels
            )));
        }
        Ok(())
    }

    /// Multiplies by `(Σ λ)^{target - degree}`.
    pub fn raise_degree(&self, target: u32) -> Self {
        assert!(target >= self.degree, "cannot lower the degree");
        let mut p = self.clone();
        let n = self.labels.len();
        for _ in self.degree..target {
            let mut next = Self::zero(self.labels.clone(), p.degree + 1);
            for (e, c) in &p.terms {
                for j in 0..n {
                    let mut f = e.clone();
                    f[j] += 1;
                    next.add_term(f, c.clone());
                }
            }
            p = next;
        }
        p
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_labels(other)?;
        let deg = self.degree.max(other.degree);
        let mut out = self.raise_degree(deg);
        for (e, c) in other.raise_degree(deg).terms {
            out.add_term(e, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&q(-1)))
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut out = Self::zero(self.labels.clone(), self.degree);
        if !s.is_zero() {
            for (e, c) in &self.terms {
                out.terms.insert(e.clone(), c * s);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_labels(other)?;
        let mut out = Self::zero(self.labels.clone(), self.degree + other.degree);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let e: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::constant(self.labels.clone(), Q::one());
        for _ in 0..n {
            out = out.mul(self).expect("same labels");
        }
        out
    }

    /// Formal `∂/∂λ_{L_j}` of the homogeneous form.
    pub fn partial(&self, j: usize) -> Self {
        let mut out = Self::zero(self.labels.clone(), self.degree.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[j] > 0 {
                let mut f = e.clone();
                f[j] -= 1;
                out.add_term(f, c * q(e[j] as i64));
            }
        }
        out
    }

    /// `Σ_j c_j ∂/∂λ_{L_j}`. With `c = dλ(v)` (so `Σ c = 0`) this is the
    /// directional derivative along `v`, independent of the homogenization.
    pub fn derivative_along(&self, c: &[Q]) -> Self {
        assert_eq!(c.len(), self.labels.len());
        let mut out = Self::zero(self.labels.clone(), self.degree.saturating_sub(1));
        for (e, coef) in &self.terms {
            for (j, cj) in c.iter().enumerate() {
                if e[j] > 0 && !cj.is_zero() {
                    let mut f = e.clone();
                    f[j] -= 1;
                    out.add_term(f, coef * cj * q(e[j] as i64));
                }
            }
        }
        out
    }

    /// Derivative along a Cartesian vector; the labels must be those of the whole simplex.
    pub fn directional_derivative(&self, simplex: &Simplex, v: &[Q]) -> Result<Self> {
        if self.labels.len() != simplex.dim() + 1 {
            return Err(Error::Mismatch("directional derivative needs an element polynomial".into()));
        }
        Ok(self.derivative_along(&simplex.bary_direction(v)))
    }

    /// Restriction to the face spanned by `sub` (labels of `self`): every
    /// other coordinate is set to zero.
    pub fn trace(&self, sub: &[usize]) -> Result<Self> {
        let pos: Vec<usize> = sub
            .iter()
            .map(|l| {
                self.labels
                    .iter()
                    .position(|x| x == l)
                    .ok_or_else(|| Error::Mismatch(format!("label {l} not present")))
            })
            .collect::<Result<_>>()?;
        let mut out = Self::zero(sub.to_vec(), self.degree);
        for (e, c) in &self.terms {
            let kept: u32 = pos.iter().map(|&p| e[p]).sum();
            if kept == self.degree {
                out.add_term(pos.iter().map(|&p| e[p]).collect(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn relabel(&self, labels: Vec<usize>) -> Self {
        assert_eq!(labels.len(), self.labels.len());
        Self {
            labels,
            degree: self.degree,
            terms: self.terms.clone(),
        }
    }

    pub fn evaluate(&self, lambda: &[Q]) -> Q {
        assert_eq!(lambda.len(), self.labels.len());
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (l, &k) in lambda.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(l.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn evaluate_f64(&self, lambda: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let cf = c.to_f64().unwrap_or(f64::NAN);
                e.iter().zip(lambda).fold(cf, |acc, (&k, l)| acc * l.powi(k as i32))
            })
            .sum()
    }

    /// `(1/|S|) ∫_S p q` over the face spanned by the labels.
    pub fn normalized_moment(&self, other: &Self) -> Result<Q> {
        self.same_labels(other)?;
        let t = self.labels.len() as u32 - 1;
        let mut acc = Q::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let e: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                acc += ca * cb * monomial_mean(&e, t);
            }
        }
        Ok(acc)
    }
}

/// `(1/|S|) ∫_S Π λ^e = t! Π e_i! / (t + |e|)!` on a `t`-simplex.
pub fn monomial_mean(e: &[u32], t: u32) -> Q {
    let num: BigInt = e.iter().fold(factorial(t), |acc, &k| acc * factorial(k));
    let den = factorial(t + e.iter().sum::<u32>());
    Q::new(num, den)
}

/// The scaled normal coordinates of `Δ̄`: `ν_i(x) = n_i·(x - x_c) / |n_i|²`
/// for the canonical frame `n_i`, expressed over the element's labels.
pub fn normal_coordinates(simplex: &Simplex, delta: &[usize]) -> Result<Vec<BaryPoly>> {
    let frame = simplex.canonical_frame(delta)?.vectors;
    let labels: Vec<usize> = (0..=simplex.dim()).collect();
    let xc = simplex.vertex(delta[0]).clone();
    Ok(frame
        .iter()
        .map(|n| {
            let nn = dot(n, n);
            let coeffs: Vec<Q> = (0..=simplex.dim())
                .map(|j| dot(n, &sub_vec(simplex.vertex(j), &xc)) / &nn)
                .collect();
            BaryPoly::linear(labels.clone(), &coeffs)
        })
        .collect())
}

/// `Λ_nor β = Π_{i∈N} ν_i^{β_i} Π_{j∈Δ} λ_j^{β_j}` with `N = complement(Δ)`;
/// the `ν` factors follow the order of `N`.
pub fn lambda_nor(simplex: &Simplex, delta: &[usize], beta: &MultiIndex) -> Result<BaryPoly> {
    let labels: Vec<usize> = (0..=simplex.dim()).collect();
    let nu = normal_coordinates(simplex, delta)?;
    let n_set: Vec<usize> = labels.iter().copied().filter(|i| !delta.contains(i)).collect();
    let mut delta_part = vec![0u32; labels.len()];
    for &j in delta {
        delta_part[j] = beta.0[j];
    }
    let mut p = BaryPoly::monomial(labels, &MultiIndex(delta_part));
    for (k, &i) in n_set.iter().enumerate() {
        p = p.mul(&nu[k].pow(beta.0[i]))?;
    }
    Ok(p)
}

/// `∂^{|θ|} / Π ∂λ_i^{θ_i}` for `i ∈ N`, realized along the vectors `v_i`
/// normal to `Δ̄ = complement(N)` with `dλ_j(v_i) = δ_ij` on `N`.
pub fn lambda_derivative(p: &BaryPoly, simplex: &Simplex, n_set: &[usize], theta: &[u32]) -> Result<BaryPoly> {
    let vs = simplex.lambda_dual_vectors(n_set)?;
    let mut out = p.clone();
    for (v, &t) in vs.iter().zip(theta) {
        let c = simplex.bary_direction(v);
        for _ in 0..t {
            out = out.derivative_along(&c);
        }
    }
    Ok(out)
}

/// A polynomial in global Cartesian coordinates `x_1..x_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianPoly {
    dim: usize,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl CartesianPoly {
    pub fn new(dim: usize, terms: impl IntoIterator<Item = (Vec<u32>, Q)>) -> Result<Self> {
        let mut map: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::Mismatch(format!("exponent {e:?} for dimension {dim}")));
            }
            *map.entry(e).or_insert_with(Q::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Self { dim, terms: map })
    }

    /// Random coefficients on every monomial of total degree at most `degree`.
    pub fn random<R: Rng + ?Sized>(dim: usize, degree: u32, rng: &mut R) -> Self {
        let mut terms = Vec::new();
        for k in 0..=degree {
            for a in sigma(dim + 1, k) {
                terms.push((a.0[1..].to_vec(), random_q(rng, 9)));
            }
        }
        Self::new(dim, terms).expect("dimensions agree")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Q)> {
        self.terms.iter()
    }

    pub fn evaluate(&self, x: &[Q]) -> Q {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(c.clone(), |acc, (&k, xi)| acc * num_traits::pow(xi.clone(), k as usize))
            })
            .fold(Q::zero(), |a, b| a + b)
    }

    pub fn partial(&self, j: usize) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[j] > 0 {
                let mut f = e.clone();
                f[j] -= 1;
                *terms.entry(f).or_insert_with(Q::zero) += c * q(e[j] as i64);
            }
        }
        terms.retain(|_, c: &mut Q| !c.is_zero());
        Self { dim: self.dim, terms }
    }

    pub fn directional(&self, v: &[Q]) -> Self {
        let mut out = Self {
            dim: self.dim,
            terms: BTreeMap::new(),
        };
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            for (e, c) in self.partial(j).terms {
                *out.terms.entry(e).or_insert_with(Q::zero) += c * vj;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    /// The same function written in the barycentric coordinates of `simplex`.
    pub fn to_bary(&self, simplex: &Simplex) -> Result<BaryPoly> {
        if simplex.dim() != self.dim {
            return Err(Error::Mismatch("dimension mismatch".into()));
        }
        let labels: Vec<usize> = (0..=self.dim).collect();
        let coords: Vec<BaryPoly> = (0..self.dim)
            .map(|j| {
                let c: Vec<Q> = simplex.vertices().iter().map(|v| v[j].clone()).collect();
                BaryPoly::linear(labels.clone(), &c)
            })
            .collect();
        let terms: Vec<(&[u32], &Q)> = self.terms.iter().map(|(e, c)| (e.as_slice(), c)).collect();
        let p = horner(&terms, 0, &coords, &labels)?;
        Ok(p.raise_degree(self.degree().max(p.degree())))
    }
}

/// Nested Horner evaluation in the variables `var..`, so every product is by a linear form.
fn horner(terms: &[(&[u32], &Q)], var: usize, coords: &[BaryPoly], labels: &[usize]) -> Result<BaryPoly> {
    if var == coords.len() {
        let c: Q = terms.iter().map(|(_, c)| (*c).clone()).sum();
        return Ok(BaryPoly::constant(labels.to_vec(), c));
    }
    let top = terms.iter().map(|(e, _)| e[var]).max().unwrap_or(0);
    let mut acc = BaryPoly::zero(labels.to_vec(), 0);
    for p in (0..=top).rev() {
        if p < top {
            acc = acc.mul(&coords[var])?;
        }
        let group: Vec<(&[u32], &Q)> = terms.iter().filter(|(e, _)| e[var] == p).copied().collect();
        if !group.is_empty() {
            acc = acc.add(&horner(&group, var + 1, coords, labels)?)?;
        }
    }
    Ok(acc)
}

/// Mixed directional derivatives of a function at rational points.
pub trait DerivativeOracle: Sync {
    /// `∂^m u / ∂v_1 ... ∂v_m` at `x`, with `dirs = [v_1, ..., v_m]`.
    fn derivative(&self, x: &[Q], dirs: &[Vec<Q>]) -> Q;
}

impl DerivativeOracle for CartesianPoly {
    fn derivative(&self, x: &[Q], dirs: &[Vec<Q>]) -> Q {
        let mut p = self.clone();
        for v in dirs {
            p = p.directional(v);
        }
        p.evaluate(x)
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FiniteDifferenceReport {
    pub samples: usize,
    pub step: f64,
    /// `max |exact - fd| / max(|exact|, 1)` over all samples.
    pub max_relative_error: f64,
}

/// Compares `∂p/∂v` at barycentric points with the central difference
/// `(p(x + hv) - p(x - hv)) / 2h` in floating point.
pub fn finite_difference_check(
    simplex: &Simplex,
    polys: &[BaryPoly],
    directions: &[Vec<Q>],
    points: &[Vec<Q>],
    step: f64,
) -> Result<FiniteDifferenceReport> {
    let mut worst = 0f64;
    let mut samples = 0;
    for p in polys {
        for v in directions {
            let exact = p.directional_derivative(simplex, v)?;
            let c: Vec<f64> = simplex.bary_direction(v).iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
            for x in points {
                let lam: Vec<f64> = x.iter().map(|t| t.to_f64().unwrap_or(f64::NAN)).collect();
                let shift = |s: f64| -> Vec<f64> { lam.iter().zip(&c).map(|(l, ci)| l + s * ci).collect() };
                let fd = (p.evaluate_f64(&shift(step)) - p.evaluate_f64(&shift(-step))) / (2.0 * step);
                let e = exact.evaluate(x).to_f64().unwrap_or(f64::NAN);
                let rel = (e - fd).abs() / e.abs().max(1.0);
                worst = if rel.is_nan() { f64::INFINITY } else { worst.max(rel) };
                samples += 1;
            }
        }
    }
    Ok(FiniteDifferenceReport {
        samples,
        step,
        max_relative_error: worst,
    })
}
