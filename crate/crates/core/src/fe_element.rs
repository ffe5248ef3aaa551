//! The C^r conforming element: moments of frame-normal derivatives.
//!
//! For a sub-simplex `Δ̄` of codimension `m` with canonical normal frame
//! `n_1..n_m`, every `θ` with `|θ| ≤ r_m` and every `σ ∈ Σ₀^{(q)}(Δ, k-|θ|)`,
//! `q_t = r_{t+m} - |θ|`, contributes
//!
//! `u ↦ (1/|Δ̄|) <(∂^{|θ|} u / Π ∂n_i^{θ_i})|_Δ̄, Λ^Δσ>`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{Rationals, Q};
use crate::dof::{check_unisolvent, vandermonde, Certificate, Functional, Mode, Solver, Target};
use crate::error::{Error, Result};
use crate::geometry::Simplex;
use crate::linalg::{factorize, SparseRow};
use crate::multiindex::{
    classify_primal, enumerate_sigma0, q_vector, restrict, sigma, validate_assumption, MultiIndex, SmoothnessVector,
};
use crate::polynomial::{lambda_nor, monomial_mean, BaryPoly};

/// Nonempty local label sets of a `d`-simplex, in lexicographic order.
pub fn subsimplices(d: usize) -> Vec<Vec<usize>> {
    let n = d + 1;
    let mut out: Vec<Vec<usize>> = (1u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    out.sort();
    out
}

pub(crate) fn check_params(d: usize, r: &SmoothnessVector, k: u32) -> Result<()> {
    if r.dim() != d {
        return Err(Error::InvalidSmoothness(format!("r has {} entries, expected {d}", r.dim())));
    }
    if !validate_assumption(r, k as i64) {
        return Err(Error::Assumption {
            r: r.0.clone(),
            k: k as i64,
            reason: crate::multiindex::assumption_violation(r, k as i64).unwrap_or_default(),
        });
    }
    Ok(())
}

fn complement(d: usize, set: &[usize]) -> Vec<usize> {
    (0..=d).filter(|i| !set.contains(i)).collect()
}

fn repeat_directions(vectors: &[Vec<Q>], exps: &[u32]) -> Vec<Vec<Q>> {
    vectors
        .iter()
        .zip(exps)
        .flat_map(|(v, &e)| std::iter::repeat_n(v.clone(), e as usize))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeDofInfo {
    /// Global ids of the owning sub-simplex.
    pub owner: Vec<usize>,
    #[serde(skip)]
    pub owner_local: Vec<usize>,
    pub codim: usize,
    /// Derivative exponents over the owner's normal frame.
    pub theta: MultiIndex,
    /// Weight exponents over the owner's vertices.
    pub weight: MultiIndex,
}

impl FeDofInfo {
    /// Identifies the same functional on any element containing the owner.
    pub fn key(&self) -> (Vec<usize>, Vec<u32>, Vec<u32>) {
        (self.owner.clone(), self.theta.0.clone(), self.weight.0.clone())
    }
}

#[derive(Debug, Clone)]
pub struct FeElement {
    pub simplex: Simplex,
    pub r: SmoothnessVector,
    pub k: u32,
    pub info: Vec<FeDofInfo>,
    pub functionals: Vec<Functional>,
}

impl FeElement {
    pub fn new(simplex: Simplex, r: SmoothnessVector, k: u32) -> Result<Self> {
        let (info, functionals) = build_dofs(&simplex, &r, k)?;
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

    pub fn dual_basis(&self) -> Result<Vec<BaryPoly>> {
        self.solver()?.nodal_basis()
    }
}

/// The frame-moment DOFs, ordered by owner, then `|θ|`, then `θ`, then weight.
pub fn build_dofs(simplex: &Simplex, r: &SmoothnessVector, k: u32) -> Result<(Vec<FeDofInfo>, Vec<Functional>)> {
    let d = simplex.dim();
    check_params(d, r, k)?;
    let mut info = Vec::new();
    let mut functionals = Vec::new();
    for delta in subsimplices(d) {
        let m = d + 1 - delta.len();
        let max_order = if m == 0 { 0 } else { r.get(m) };
        if max_order < 0 {
            continue;
        }
        let frame = if m == 0 {
            Vec::new()
        } else {
            simplex.canonical_frame(&delta)?.vectors
        };
        for t in 0..=max_order as u32 {
            let q = q_vector(r, m, t as i64);
            let weights = enumerate_sigma0(&delta, (k - t) as i64, &q)?;
            if weights.is_empty() {
                continue;
            }
            for theta in sigma(m, t) {
                let dirs = repeat_directions(&frame, &theta.0);
                for w in &weights {
                    let weight = BaryPoly::monomial(delta.clone(), w);
                    functionals.push(Functional::new(
                        simplex,
                        &delta,
                        dirs.clone(),
                        Target::Moment {
                            support: delta.clone(),
                            weight,
                        },
                    ));
                    info.push(FeDofInfo {
                        owner: simplex.global(&delta),
                        owner_local: delta.clone(),
                        codim: m,
                        theta: theta.clone(),
                        weight: w.clone(),
                    });
                }
            }
        }
    }
    Ok((info, functionals))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhiDofInfo {
    pub alpha: MultiIndex,
    /// Local labels of `N(α)`.
    #[serde(rename = "N")]
    pub n_set: Vec<usize>,
    pub n: u32,
}

/// The `φ_α` DOFs: λ-derivatives `∂^{n(α)} / Π_{N(α)} ∂λ_i^{α_i}` tested
/// against `Λ^Δ α` on `Δ̄(α)`, one per `α ∈ Σ(d,k)`.
pub fn phi_alpha_dofs(simplex: &Simplex, r: &SmoothnessVector, k: u32) -> Result<(Vec<PhiDofInfo>, Vec<Functional>)> {
    let d = simplex.dim();
    check_params(d, r, k)?;
    let mut info = Vec::new();
    let mut functionals = Vec::new();
    for alpha in sigma(d + 1, k) {
        let c = classify_primal(&alpha, r)?;
        let dirs = if c.n_set.is_empty() {
            Vec::new()
        } else {
            let vs = simplex.lambda_dual_vectors(&c.n_set)?;
            repeat_directions(&vs, &restrict(&alpha, &standard(d), &c.n_set).0)
        };
        let weight = BaryPoly::monomial(c.delta_set.clone(), &restrict(&alpha, &standard(d), &c.delta_set));
        functionals.push(Functional::new(
            simplex,
            &c.delta_set,
            dirs,
            Target::Moment {
                support: c.delta_set.clone(),
                weight,
            },
        ));
        info.push(PhiDofInfo {
            alpha,
            n_set: c.n_set,
            n: c.n,
        });
    }
    Ok((info, functionals))
}

fn standard(d: usize) -> Vec<usize> {
    (0..=d).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockRank {
    #[serde(rename = "N")]
    pub n_set: Vec<usize>,
    pub n: u32,
    /// Present for a slice with fixed weight exponents.
    pub sigma: Option<MultiIndex>,
    pub size: usize,
    pub rank_phi: usize,
    pub rank_frame: usize,
    pub rank_stacked: usize,
}

impl BlockRank {
    pub fn ok(&self) -> bool {
        self.rank_phi == self.size && self.rank_frame == self.size && self.rank_stacked == self.size
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub blocks: Vec<BlockRank>,
    pub slices: Vec<BlockRank>,
    pub ok: bool,
}

impl EquivalenceReport {
    pub fn first_failure(&self) -> Option<&BlockRank> {
        self.blocks.iter().chain(&self.slices).find(|b| !b.ok())
    }
}

type GroupKey = (Vec<usize>, u32, Option<Vec<u32>>);
type RowPair = (Vec<SparseRow<Q>>, Vec<SparseRow<Q>>);

fn group_rank(rows: &BTreeMap<GroupKey, RowPair>, ncols: usize) -> Vec<BlockRank> {
    rows.iter()
        .map(|((n_set, n, sigma), (phi, frame))| {
            let mut stacked = phi.clone();
            stacked.extend(frame.iter().cloned());
            BlockRank {
                n_set: n_set.clone(),
                n: *n,
                sigma: sigma.clone().map(MultiIndex),
                size: phi.len().max(frame.len()),
                rank_phi: factorize(&Rationals, phi.clone(), ncols).rank(),
                rank_frame: factorize(&Rationals, frame.clone(), ncols).rank(),
                rank_stacked: factorize(&Rationals, stacked, ncols).rank(),
            }
        })
        .collect()
}

/// Certifies that on every block `Σ_{N,n}` and every slice of it with fixed
/// `Δ`-part, the λ-derivative DOFs and the frame DOFs span the same space.
pub fn equivalence_check(simplex: &Simplex, r: &SmoothnessVector, k: u32) -> Result<EquivalenceReport> {
    let d = simplex.dim();
    let (phi_info, phi) = phi_alpha_dofs(simplex, r, k)?;
    let (fe_info, fe) = build_dofs(simplex, r, k)?;
    let phi_rows = vandermonde(&Rationals, d, k, &phi)?;
    let fe_rows = vandermonde(&Rationals, d, k, &fe)?;
    let ncols = phi_rows.len();

    let mut blocks: BTreeMap<GroupKey, RowPair> = BTreeMap::new();
    let mut slices = blocks.clone();
    for (i, row) in phi_info.iter().zip(phi_rows) {
        let delta = complement(d, &i.n_set);
        let sigma = restrict(&i.alpha, &standard(d), &delta).0;
        blocks.entry((i.n_set.clone(), i.n, None)).or_default().0.push(row.clone());
        slices.entry((i.n_set.clone(), i.n, Some(sigma))).or_default().0.push(row);
    }
    for (i, row) in fe_info.iter().zip(fe_rows) {
        let n_set = complement(d, &i.owner_local);
        let n = i.theta.degree();
        blocks.entry((n_set.clone(), n, None)).or_default().1.push(row.clone());
        slices.entry((n_set, n, Some(i.weight.0.clone()))).or_default().1.push(row);
    }
    let blocks = group_rank(&blocks, ncols);
    let slices = group_rank(&slices, ncols);
    let ok = blocks.iter().chain(&slices).all(BlockRank::ok);
    Ok(EquivalenceReport { blocks, slices, ok })
}

/// `(N, n)` precedes-or-equals `(N', n')`: `N' ⊊ N`, or `N = N'` and `n ≤ n'`.
pub fn class_preceq(a: (&[usize], u32), b: (&[usize], u32)) -> bool {
    let (na, xa) = a;
    let (nb, xb) = b;
    if na == nb {
        return xa <= xb;
    }
    nb.len() < na.len() && nb.iter().all(|i| na.contains(i))
}

/// A refined class `(N, n)`.
pub type ClassKey = (Vec<usize>, u32);

#[derive(Debug, Clone, Serialize)]
pub struct TriangularityReport {
    /// Classes in the order used for rows and columns.
    pub classes: Vec<ClassKey>,
    /// Off-diagonal blocks required to vanish.
    pub zero_blocks: usize,
    /// Required-zero blocks that did not vanish, as `(row class, column class)`.
    pub violations: Vec<(ClassKey, ClassKey)>,
    /// Diagonal blocks match `c_θ` times the weight Gram matrix.
    pub diagonal_matches: bool,
    /// Every Gram matrix on the diagonal is positive definite.
    pub gram_positive_definite: bool,
    pub rank: usize,
    pub size: usize,
}

impl TriangularityReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.diagonal_matches && self.gram_positive_definite && self.rank == self.size
    }
}

fn positive_definite(mut a: Vec<Vec<Q>>) -> bool {
    let n = a.len();
    for p in 0..n {
        if a[p][p] <= Q::zero() {
            return false;
        }
        let (top, rest) = a.split_at_mut(p + 1);
        let pivot = &top[p];
        for row in rest.iter_mut() {
            let f = &row[p] / &pivot[p];
            for (x, y) in row[p..].iter_mut().zip(&pivot[p..]) {
                *x -= &f * y;
            }
        }
    }
    true
}

/// The frame-DOF matrix in the `Λ_nor` basis, checked against the block
/// structure of the unisolvency argument.
pub fn block_triangularity(simplex: &Simplex, r: &SmoothnessVector, k: u32) -> Result<TriangularityReport> {
    let d = simplex.dim();
    let labels = standard(d);
    let (info, fe) = build_dofs(simplex, r, k)?;
    let rows = vandermonde(&Rationals, d, k, &fe)?;
    let basis = sigma(d + 1, k);
    let size = basis.len();

    let mut col_class = Vec::with_capacity(size);
    let mut columns: Vec<Vec<Q>> = Vec::with_capacity(size);
    for beta in &basis {
        let c = classify_primal(beta, r)?;
        columns.push(lambda_nor(simplex, &c.delta_set, beta)?.coefficients());
        col_class.push((c.n_set, c.n));
    }
    let row_class: Vec<ClassKey> = info
        .iter()
        .map(|i| (complement(d, &i.owner_local), i.theta.degree()))
        .collect();

    let m: Vec<Vec<Q>> = rows
        .iter()
        .map(|row| {
            (0..size)
                .map(|j| row.iter().fold(Q::zero(), |acc, (c, v)| acc + v * &columns[j][*c]))
                .collect()
        })
        .collect();

    let mut classes: Vec<ClassKey> = row_class.clone();
    classes.sort_by(|a, b| (std::cmp::Reverse(a.0.len()), a.1, &a.0).cmp(&(std::cmp::Reverse(b.0.len()), b.1, &b.0)));
    classes.dedup();

    let mut zero_blocks = 0;
    let mut violations = Vec::new();
    for rc in &classes {
        for cc in &classes {
            if class_preceq((&cc.0, cc.1), (&rc.0, rc.1)) {
                continue;
            }
            zero_blocks += 1;
            let nonzero = (0..size).any(|i| {
                row_class[i] == *rc && (0..size).any(|j| col_class[j] == *cc && !m[i][j].is_zero())
            });
            if nonzero {
                violations.push((rc.clone(), cc.clone()));
            }
        }
    }

    let mut diagonal_matches = true;
    #[allow(clippy::type_complexity)]
    let mut grams: BTreeMap<(Vec<usize>, Vec<u32>), (Vec<MultiIndex>, Vec<usize>)> = BTreeMap::new();
    for (i, fi) in info.iter().enumerate() {
        let n_set = &row_class[i].0;
        let delta = &fi.owner_local;
        let c_theta = fi.theta.0.iter().fold(Q::one(), |acc, &t| acc * Q::from(crate::arith::factorial(t)));
        for (j, beta) in basis.iter().enumerate() {
            if col_class[j] != row_class[i] {
                continue;
            }
            let theta_b = restrict(beta, &labels, n_set);
            let sigma_b = restrict(beta, &labels, delta);
            let want = if theta_b == fi.theta {
                let e: Vec<u32> = sigma_b.0.iter().zip(&fi.weight.0).map(|(a, b)| a + b).collect();
                &c_theta * monomial_mean(&e, delta.len() as u32 - 1)
            } else {
                Q::zero()
            };
            if m[i][j] != want {
                diagonal_matches = false;
            }
        }
        let g = grams.entry((n_set.clone(), fi.theta.0.clone())).or_default();
        g.0.push(fi.weight.clone());
        g.1.push(delta.len());
    }
    let gram_positive_definite = grams.values().all(|(ws, t)| {
        let t = t[0] as u32 - 1;
        let g: Vec<Vec<Q>> = ws
            .iter()
            .map(|a| {
                ws.iter()
                    .map(|b| {
                        let e: Vec<u32> = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
                        monomial_mean(&e, t)
                    })
                    .collect()
            })
            .collect();
        positive_definite(g)
    });

    let rank = factorize(&Rationals, crate::linalg::dense_to_sparse(&Rationals, &m), size).rank();
    Ok(TriangularityReport {
        classes,
        zero_blocks,
        violations,
        diagonal_matches,
        gram_positive_definite,
        rank,
        size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, random_q};
    use crate::multiindex::{counts_by_codim, Kind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sv(v: &[i64]) -> SmoothnessVector {
        SmoothnessVector::new(v.to_vec()).unwrap()
    }

    fn per_codim(el: &FeElement) -> Vec<usize> {
        let mut out = vec![0; el.simplex.dim() + 1];
        for i in &el.info {
            out[i.codim] += 1;
        }
        out
    }

    #[test]
    fn subsimplex_order() {
        assert_eq!(
            subsimplices(2),
            vec![vec![0], vec![0, 1], vec![0, 1, 2], vec![0, 2], vec![1], vec![1, 2], vec![2]]
        );
    }

    #[test]
    fn counts_match_class_sizes() {
        for (d, r, k) in [(1, vec![1], 3), (2, vec![1, 2], 5), (2, vec![2, 4], 9), (3, vec![1, 2, 4], 9), (2, vec![0, 0], 1)] {
            let r = sv(&r);
            let el = FeElement::new(Simplex::reference(d), r.clone(), k).unwrap();
            let table = counts_by_codim(d, k as i64, &r, Kind::Primal).unwrap();
            assert_eq!(el.len() as u64, table.total);
            let want: Vec<usize> = table.rows.iter().map(|row| row.total as usize).collect();
            assert_eq!(per_codim(&el), want);
        }
    }

    #[test]
    fn golden_counts_large() {
        let el = FeElement::new(Simplex::reference(3), sv(&[4, 8, 16]), 33).unwrap();
        assert_eq!(el.len(), 7140);
        assert_eq!(per_codim(&el), vec![544, 1280, 1440, 3876]);
    }

    #[test]
    fn argyris_layout() {
        let el = FeElement::new(Simplex::reference(2), sv(&[1, 2]), 5).unwrap();
        assert_eq!(per_codim(&el), vec![0, 3, 18]);
        let edge: Vec<&FeDofInfo> = el.info.iter().filter(|i| i.codim == 1).collect();
        assert!(edge.iter().all(|i| i.theta.0 == vec![1] && i.weight.degree() == 4));
    }

    #[test]
    fn hermite_basis_matches_closed_form() {
        let el = FeElement::new(Simplex::reference(1), sv(&[1]), 3).unwrap();
        assert_eq!(el.len(), 4);
        let basis = el.dual_basis().unwrap();
        // In x = λ_1 on [0,1]: h00 = 1 - 3x² + 2x³, h10 = x - 2x² + x³, h01 = 3x² - 2x³, h11 = x³ - x².
        let x = |v: Q| vec![q(1) - &v, v];
        let h = [
            |t: &Q| q(1) - q(3) * t * t + q(2) * t * t * t,
            |t: &Q| t - q(2) * t * t + t * t * t,
            |t: &Q| q(3) * t * t - q(2) * t * t * t,
            |t: &Q| t * t * t - t * t,
        ];
        // DOF order: vertex 0 (value, derivative), then vertex 1.
        let order = [0, 1, 2, 3];
        for (j, p) in basis.iter().enumerate() {
            for s in 0..5 {
                let t = crate::arith::qr(s, 4);
                assert_eq!(p.evaluate(&x(t.clone())), h[order[j]](&t), "basis {j}");
            }
        }
    }

    #[test]
    fn dual_basis_is_kronecker_and_reproduces() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = Simplex::random(2, &mut rng);
        let el = FeElement::new(s, sv(&[1, 2]), 5).unwrap();
        let basis = el.dual_basis().unwrap();
        for (i, f) in el.functionals.iter().enumerate() {
            for (j, p) in basis.iter().enumerate() {
                let want = if i == j { q(1) } else { q(0) };
                assert_eq!(f.apply(p).unwrap(), want);
            }
        }
        let labels: Vec<usize> = (0..3).collect();
        let u = BaryPoly::from_terms(labels.clone(), 5, sigma(3, 5).into_iter().map(|a| (a, random_q(&mut rng, 7)))).unwrap();
        let mut rebuilt = BaryPoly::zero(labels.clone(), 5);
        for (f, p) in el.functionals.iter().zip(&basis) {
            rebuilt = rebuilt.add(&p.scale(&f.apply(&u).unwrap())).unwrap();
        }
        assert_eq!(rebuilt, u);
        let one = BaryPoly::constant(labels, q(1));
        let pt = vec![crate::arith::qr(1, 5), crate::arith::qr(1, 3), crate::arith::qr(7, 15)];
        let sum = el
            .functionals
            .iter()
            .zip(&basis)
            .fold(Q::zero(), |acc, (f, p)| acc + f.apply(&one).unwrap() * p.evaluate(&pt));
        assert_eq!(sum, q(1));
    }

    #[test]
    fn vertex_dof_vanishes_on_higher_normal_part() {
        let s = Simplex::reference(2);
        let el = FeElement::new(s, sv(&[2, 4]), 9).unwrap();
        // Vertex 0 DOFs with |θ| = t see only monomials with λ_1 + λ_2 power ≤ t.
        for (i, f) in el.info.iter().zip(&el.functionals) {
            if i.owner_local != vec![0] {
                continue;
            }
            let t = i.theta.degree();
            let beta = MultiIndex(vec![9 - t - 1, t + 1, 0]);
            assert_eq!(f.apply(&BaryPoly::monomial((0..3).collect(), &beta)).unwrap(), q(0));
        }
    }

    #[test]
    fn unisolvent_small_battery() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (d, r, k) in [(1, vec![1], 3), (2, vec![1, 2], 5), (2, vec![2, 4], 9), (2, vec![0, 0], 1)] {
            for s in [Simplex::reference(d), Simplex::random(d, &mut rng)] {
                let el = FeElement::new(s, sv(&r), k).unwrap();
                let cert = el.check_unisolvent(Mode::Exact, 0).unwrap();
                assert!(cert.nonsingular, "{d} {r:?} {k}");
                let cert = el.check_unisolvent(Mode::Modular, 3).unwrap();
                assert!(cert.nonsingular && !cert.exact_fallback);
            }
        }
    }

    #[test]
    fn equivalence_blocks_invertible() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (d, r, k) in [(2, vec![2, 4], 9), (2, vec![1, 2], 5), (3, vec![1, 2, 4], 9)] {
            let s = Simplex::random(d, &mut rng);
            let rep = equivalence_check(&s, &sv(&r), k).unwrap();
            assert!(rep.ok, "{:?}", rep.first_failure());
            let interior: Vec<&BlockRank> = rep.blocks.iter().filter(|b| b.n_set.is_empty()).collect();
            assert!(interior.iter().all(|b| b.n == 0));
        }
    }

    #[test]
    fn triangular_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for s in [Simplex::reference(2), Simplex::random(2, &mut rng)] {
            let rep = block_triangularity(&s, &sv(&[2, 4]), 9).unwrap();
            assert!(rep.zero_blocks > 0);
            assert!(rep.ok(), "{:?}", rep.violations);
        }
        let rep = block_triangularity(&Simplex::reference(3), &sv(&[1, 2, 4]), 9).unwrap();
        assert!(rep.ok());
    }

    #[test]
    fn preceq_relation() {
        assert!(class_preceq((&[0, 1], 3), (&[0], 0)));
        assert!(!class_preceq((&[0], 0), (&[0, 1], 3)));
        assert!(class_preceq((&[0], 1), (&[0], 2)));
        assert!(!class_preceq((&[0], 2), (&[1], 2)));
        assert!(class_preceq((&[0], 1), (&[], 0)));
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(matches!(
            FeElement::new(Simplex::reference(2), sv(&[1, 3]), 6),
            Err(Error::Assumption { .. })
        ));
        assert!(FeElement::new(Simplex::reference(2), sv(&[1]), 6).is_err());
    }
}
