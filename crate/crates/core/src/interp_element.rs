//! The C^r interpolation element: outer-normal derivatives at Lagrange nodes.
//!
//! Each `α ∈ Σ(d,k)` is classified by the dual decomposition into `N'`, `Δ'`
//! and placed at the node with `λ_j = (R'_(Δ)(α)_j + 1) / (S + |Δ'|)` on `Δ'`.
//! The DOF is `Π_{i∈N'} ∂^{α_i} u / ∂m_i^{α_i}` there, where `m_i` is the
//! outer normal of `Δ̄'` inside `Δ̄' ∪ {i}`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{q, Q};
use crate::dof::{check_unisolvent, Certificate, Functional, Mode, Solver, Target};
use crate::error::{Error, Result};
use crate::fe_element::check_params;
use crate::geometry::Simplex;
use crate::linalg::factorize;
use crate::multiindex::{
    classify_dual_on, dual_node_shift, restrict, sigma, Classification, MultiIndex, SmoothnessVector,
};
use crate::polynomial::{BaryPoly, DerivativeOracle};
use crate::{arith::Rationals, dof::vandermonde};

/// The Lagrange node of `α` (indexed by `labels`) as barycentric weights on
/// those labels, together with its dual classification.
pub fn lagrange_node(alpha: &MultiIndex, labels: &[usize], r: &SmoothnessVector) -> Result<(Classification, Vec<Q>)> {
    let c = classify_dual_on(alpha, labels, r)?;
    let shifted = dual_node_shift(alpha, labels, r)?;
    let s: u32 = shifted.degree();
    let den = q((s as usize + c.delta_set.len()) as i64);
    let mut node = vec![Q::zero(); labels.len()];
    for (j, lab) in c.delta_set.iter().enumerate() {
        let pos = labels.iter().position(|x| x == lab).expect("label");
        node[pos] = q(shifted.0[j] as i64 + 1) / &den;
    }
    Ok((c, node))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InterpDofInfo {
    pub alpha: MultiIndex,
    /// Local labels of `N'(α)`.
    #[serde(rename = "N")]
    pub n_set: Vec<usize>,
    pub n: u32,
    /// Global ids of `Δ'(α)`, the sub-simplex carrying the node.
    pub owner: Vec<usize>,
    /// Barycentric node coordinates, rendered as `p/q`.
    #[serde(serialize_with = "ser_qs")]
    pub node: Vec<Q>,
}

fn ser_qs<S: serde::Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::arith::fmt_q))
}

fn directions(simplex: &Simplex, delta: &[usize], n_set: &[usize], exps: &[u32]) -> Result<Vec<Vec<Q>>> {
    let mut dirs = Vec::new();
    for (&i, &e) in n_set.iter().zip(exps) {
        let m = simplex.outer_normal(delta, i)?;
        dirs.extend(std::iter::repeat_n(m, e as usize));
    }
    Ok(dirs)
}

#[derive(Debug, Clone)]
pub struct InterpElement {
    pub simplex: Simplex,
    pub r: SmoothnessVector,
    pub k: u32,
    pub info: Vec<InterpDofInfo>,
    pub functionals: Vec<Functional>,
}

impl InterpElement {
    pub fn new(simplex: Simplex, r: SmoothnessVector, k: u32) -> Result<Self> {
        let (info, functionals) = build_dofs_interp(&simplex, &r, k)?;
        Ok(Self {
            simplex,
            r,
            k,
            info,
            functionals,
        })
    }

    pub fn len(&self) -> usize {
        self.functionals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functionals.is_empty()
    }

    pub fn check_unisolvent(&self, mode: Mode, seed: u64) -> Result<Certificate> {
        check_unisolvent(self.simplex.dim(), self.k, &self.functionals, mode, seed)
    }

    pub fn solver(&self) -> Result<Solver> {
        Solver::new(self.simplex.dim(), self.k, &self.functionals)
    }

    /// DOF values of a polynomial of any degree.
    pub fn values(&self, u: &BaryPoly) -> Result<Vec<Q>> {
        self.functionals.iter().map(|f| f.apply(u)).collect()
    }

    pub fn values_oracle(&self, u: &dyn DerivativeOracle) -> Result<Vec<Q>> {
        self.functionals.iter().map(|f| f.apply_oracle(&self.simplex, u)).collect()
    }

    /// `I_K u = Σ ψ_α(u) p_α`.
    pub fn interpolate(&self, solver: &Solver, u: &BaryPoly) -> Result<BaryPoly> {
        solver.solve(&self.values(u)?)
    }

    pub fn interpolate_oracle(&self, solver: &Solver, u: &dyn DerivativeOracle) -> Result<BaryPoly> {
        solver.solve(&self.values_oracle(u)?)
    }
}

/// One `ψ_α` per `α ∈ Σ(d,k)`, in enumeration order.
pub fn build_dofs_interp(simplex: &Simplex, r: &SmoothnessVector, k: u32) -> Result<(Vec<InterpDofInfo>, Vec<Functional>)> {
    let d = simplex.dim();
    check_params(d, r, k)?;
    let labels: Vec<usize> = (0..=d).collect();
    let mut info = Vec::new();
    let mut functionals = Vec::new();
    for alpha in sigma(d + 1, k) {
        let (c, node) = lagrange_node(&alpha, &labels, r)?;
        let exps = restrict(&alpha, &labels, &c.n_set).0;
        let dirs = directions(simplex, &c.delta_set, &c.n_set, &exps)?;
        functionals.push(Functional::new(simplex, &c.delta_set, dirs, Target::Point { lambda: node.clone() }));
        info.push(InterpDofInfo {
            alpha,
            n_set: c.n_set,
            n: c.n,
            owner: simplex.global(&c.delta_set),
            node,
        });
    }
    Ok((info, functionals))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceDofInfo {
    pub beta: MultiIndex,
    /// Local labels of `N'(β)` inside the facet.
    #[serde(rename = "N")]
    pub n_set: Vec<usize>,
    /// Global ids of `Δ'(β)`.
    pub owner: Vec<usize>,
    #[serde(serialize_with = "ser_qs")]
    pub node: Vec<Q>,
}

/// `Ψ_{I,l}`: facet DOFs for `∂^l u / ∂n^l` on the facet opposite vertex `I`.
#[derive(Debug, Clone)]
pub struct TraceDofSet {
    /// Local label of the vertex opposite the facet.
    pub i_local: usize,
    /// Global ids of the facet.
    pub facet: Vec<usize>,
    pub l: u32,
    pub normal: Vec<Q>,
    pub info: Vec<TraceDofInfo>,
    pub functionals: Vec<Functional>,
}

/// Builds `Ψ_{I,l}` with facet smoothness `p_l = (r_2 - l, ..., r_d - l)` and
/// degree `k - l`. `normal` defaults to the outward facet normal.
pub fn trace_dof_set(
    simplex: &Simplex,
    i_local: usize,
    l: u32,
    r: &SmoothnessVector,
    k: u32,
    normal: Option<Vec<Q>>,
) -> Result<TraceDofSet> {
    let d = simplex.dim();
    check_params(d, r, k)?;
    if d == 0 || i_local > d {
        return Err(Error::Precondition(format!("no facet opposite vertex {i_local}")));
    }
    if l as i64 > r.get(1) {
        return Err(Error::Precondition(format!("trace order {l} exceeds r_1 = {}", r.get(1))));
    }
    let facet: Vec<usize> = (0..=d).filter(|&j| j != i_local).collect();
    let normal = match normal {
        Some(n) => n,
        None => simplex.outer_normal(&facet, i_local)?,
    };
    let p = r.tail(1, l as i64);
    let mut info = Vec::new();
    let mut functionals = Vec::new();
    for beta in sigma(d, k - l) {
        let (c, face_node) = lagrange_node(&beta, &facet, &p)?;
        let mut node = vec![Q::zero(); d + 1];
        for (pos, &lab) in facet.iter().enumerate() {
            node[lab] = face_node[pos].clone();
        }
        let exps = restrict(&beta, &facet, &c.n_set).0;
        let mut dirs = directions(simplex, &c.delta_set, &c.n_set, &exps)?;
        dirs.extend(std::iter::repeat_n(normal.clone(), l as usize));
        functionals.push(Functional::new(simplex, &c.delta_set, dirs, Target::Point { lambda: node.clone() }));
        info.push(TraceDofInfo {
            beta,
            n_set: c.n_set,
            owner: simplex.global(&c.delta_set),
            node,
        });
    }
    Ok(TraceDofSet {
        i_local,
        facet: simplex.global(&facet),
        l,
        normal,
        info,
        functionals,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RepresentationReport {
    /// Rank of all `ψ_α` stacked with `Ψ_{I,l}`; equals the element dimension.
    pub stacked_rank: usize,
    pub dim: usize,
    /// Facet functionals not in the span of their predicted `ψ_α` subset.
    pub failures: Vec<MultiIndex>,
}

impl RepresentationReport {
    pub fn ok(&self) -> bool {
        self.stacked_rank == self.dim && self.failures.is_empty()
    }
}

/// The `α` whose `ψ_α` represent the facet functional of `β`: equal to `β` on
/// `Δ'(β)`, at least `β` on `N'(β) ∪ {I}`, with `|α| = k`.
pub fn representing_set(beta: &TraceDofInfo, i_local: usize, d: usize, k: u32) -> Vec<usize> {
    let labels: Vec<usize> = (0..=d).collect();
    let facet: Vec<usize> = labels.iter().copied().filter(|&j| j != i_local).collect();
    let mut beta_full = vec![0u32; d + 1];
    for (pos, &lab) in facet.iter().enumerate() {
        beta_full[lab] = beta.beta.0[pos];
    }
    let free: Vec<usize> = beta.n_set.iter().copied().chain([i_local]).collect();
    sigma(d + 1, k)
        .into_iter()
        .enumerate()
        .filter(|(_, a)| {
            labels.iter().all(|&j| {
                if free.contains(&j) {
                    a.0[j] >= beta_full[j]
                } else {
                    a.0[j] == beta_full[j]
                }
            })
        })
        .map(|(i, _)| i)
        .collect()
}

/// Certifies that every functional of `Ψ_{I,l}` is a combination of the
/// `ψ_α` in its representing set.
pub fn check_representation(el: &InterpElement, ts: &TraceDofSet) -> Result<RepresentationReport> {
    let d = el.simplex.dim();
    let rows = vandermonde(&Rationals, d, el.k, &el.functionals)?;
    let trace_rows = vandermonde(&Rationals, d, el.k, &ts.functionals)?;
    let dim = rows.len();
    let mut stacked = rows.clone();
    stacked.extend(trace_rows.iter().cloned());
    let stacked_rank = factorize(&Rationals, stacked, dim).rank();
    let mut failures = Vec::new();
    for (info, row) in ts.info.iter().zip(&trace_rows) {
        let subset: Vec<_> = representing_set(info, ts.i_local, d, el.k)
            .into_iter()
            .map(|i| rows[i].clone())
            .collect();
        let base = factorize(&Rationals, subset.clone(), dim).rank();
        let mut with = subset;
        with.push(row.clone());
        if factorize(&Rationals, with, dim).rank() != base {
            failures.push(info.beta.clone());
        }
    }
    Ok(RepresentationReport {
        stacked_rank,
        dim,
        failures,
    })
}

/// Writes `p = λ_i^{t0+1} u_1` when `p` and its first `t0` normal
/// derivatives vanish on the facet `λ_i = 0`. `i` is a position in `p`'s labels.
pub fn factor_power(p: &BaryPoly, i: usize, t0: u32) -> Result<BaryPoly> {
    if t0 >= p.degree() {
        return Err(Error::Precondition(format!("t0 = {t0} must be below the degree {}", p.degree())));
    }
    if let Some(first) = p.terms().map(|(e, _)| e[i]).filter(|&e| e <= t0).min() {
        return Err(Error::Precondition(format!(
            "normal derivative of order {first} does not vanish on the facet"
        )));
    }
    let labels = p.labels().to_vec();
    let deg = p.degree() - t0 - 1;
    BaryPoly::from_terms(
        labels,
        deg,
        p.terms().map(|(e, c)| {
            let mut f = e.clone();
            f[i] -= t0 + 1;
            (MultiIndex(f), c.clone())
        }),
    )
}

/// Whether every node lies in the closed element.
pub fn nodes_in_closure(info: &[InterpDofInfo]) -> bool {
    info.iter().all(|i| {
        i.node.iter().all(|x| *x >= Q::zero() && *x <= Q::one()) && i.node.iter().cloned().sum::<Q>() == Q::one()
    })
}
