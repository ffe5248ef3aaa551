//! Linear functionals on `P_k(K)` and the matrices built from them.
//!
//! Every DOF in this crate is one of two shapes:
//!
//! * a normalized moment `(1/|S|) <(D u)|_S, w>` over a sub-simplex `S`;
//! * a point value `(D u)(x)`;
//!
//! where `D` is a product of directional derivatives. A functional can be
//! applied to a [`BaryPoly`] directly, or compiled into a sparse row over the
//! monomial basis `Λα, α ∈ Σ(d,k)` in any [`Field`].

use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{fmt_q, Field, PrimeField, Rationals, Q};
use crate::error::{Error, Result};
use crate::geometry::Simplex;
use crate::linalg::{factorize, Factorization, SparseRow};
use crate::multiindex::{sigma, MultiIndex};
use crate::polynomial::{BaryPoly, DerivativeOracle};

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    /// Normalized moment against `weight`, a polynomial over the local labels `support`.
    Moment { support: Vec<usize>, weight: BaryPoly },
    /// Evaluation at a barycentric point.
    Point { lambda: Vec<Q> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    /// Global ids of the owning sub-simplex.
    pub owner: Vec<usize>,
    /// Cartesian derivative directions, applied in order.
    pub directions: Vec<Vec<Q>>,
    /// The same directions as barycentric differentials `dλ(v)`.
    pub bary_directions: Vec<Vec<Q>>,
    pub target: Target,
}

impl Functional {
    pub fn new(simplex: &Simplex, owner_local: &[usize], directions: Vec<Vec<Q>>, target: Target) -> Self {
        let bary_directions = directions.iter().map(|v| simplex.bary_direction(v)).collect();
        Self {
            owner: simplex.global(owner_local),
            directions,
            bary_directions,
            target,
        }
    }

    pub fn order(&self) -> usize {
        self.directions.len()
    }

    /// Exact value on an element polynomial.
    pub fn apply(&self, p: &BaryPoly) -> Result<Q> {
        let mut d = p.clone();
        for c in &self.bary_directions {
            d = d.derivative_along(c);
        }
        match &self.target {
            Target::Moment { support, weight } => d.trace(support)?.relabel(weight.labels().to_vec()).normalized_moment(weight),
            Target::Point { lambda } => Ok(d.evaluate(lambda)),
        }
    }

    /// Value on a function given through its derivatives. Point functionals only.
    pub fn apply_oracle(&self, simplex: &Simplex, u: &dyn DerivativeOracle) -> Result<Q> {
        match &self.target {
            Target::Point { lambda } => Ok(u.derivative(&simplex.cartesian(lambda), &self.directions)),
            Target::Moment { .. } => Err(Error::Precondition(
                "moment functionals need a polynomial argument".into(),
            )),
        }
    }

    /// `Π_j (Σ_i c_ij ∂_i) = Σ_γ a_γ ∂^γ` as a map `γ -> a_γ`.
    fn derivative_expansion(&self, n: usize) -> BTreeMap<Vec<u32>, Q> {
        let mut acc: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
        acc.insert(vec![0; n], Q::one());
        for c in &self.bary_directions {
            let mut next: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
            for (g, a) in &acc {
                for (j, cj) in c.iter().enumerate() {
                    if cj.is_zero() {
                        continue;
                    }
                    let mut h = g.clone();
                    h[j] += 1;
                    *next.entry(h).or_insert_with(Q::zero) += a * cj;
                }
            }
            next.retain(|_, v| !v.is_zero());
            acc = next;
        }
        acc
    }

    /// The row `(self(Λβ))_β` over the compiler's monomial basis.
    pub fn compile<F: Field>(&self, ctx: &RowCompiler<'_, F>) -> Result<SparseRow<F::Elem>> {
        let f = ctx.field;
        let n = ctx.d + 1;
        let m = self.order() as u32;
        if m > ctx.k {
            return Ok(Vec::new());
        }
        let rest = ctx.k - m;
        let image = |v: &Q| f.image(v).ok_or_else(|| Error::Precondition("coefficient has no image in the field".into()));

        // Values of the target on Λρ, with ρ supported on `support`.
        #[allow(clippy::type_complexity)]
        let (support, values): (Vec<usize>, Vec<(Vec<u32>, F::Elem)>) = match &self.target {
            Target::Moment { support, weight } => {
                let t = support.len() as u32 - 1;
                let wt: Vec<(Vec<u32>, F::Elem)> = weight
                    .terms()
                    .map(|(e, c)| Ok((e.clone(), image(c)?)))
                    .collect::<Result<_>>()?;
                let vals = sigma(support.len(), rest)
                    .into_iter()
                    .map(|rho| {
                        let mut acc = f.zero();
                        for (mu, w) in &wt {
                            let e: Vec<u32> = rho.0.iter().zip(mu).map(|(a, b)| a + b).collect();
                            acc = f.add(&acc, &f.mul(w, &ctx.mean(&e, t)));
                        }
                        (rho.0, acc)
                    })
                    .collect();
                (support.clone(), vals)
            }
            Target::Point { lambda } => {
                let support: Vec<usize> = (0..n).filter(|&i| !lambda[i].is_zero()).collect();
                let lam: Vec<F::Elem> = support.iter().map(|&i| image(&lambda[i])).collect::<Result<_>>()?;
                let vals = sigma(support.len(), rest)
                    .into_iter()
                    .map(|rho| {
                        let mut acc = f.one();
                        for (l, &e) in lam.iter().zip(&rho.0) {
                            for _ in 0..e {
                                acc = f.mul(&acc, l);
                            }
                        }
                        (rho.0, acc)
                    })
                    .collect();
                (support, vals)
            }
        };

        let mut dense = vec![f.zero(); ctx.columns.len()];
        for (gamma, a) in self.derivative_expansion(n) {
            let a = image(&a)?;
            for (rho, val) in &values {
                if f.is_zero(val) {
                    continue;
                }
                let mut beta = gamma.clone();
                for (p, &i) in support.iter().enumerate() {
                    beta[i] += rho[p];
                }
                // ∂^γ Λβ = β!/(β-γ)! Λ(β-γ), and β - γ = ρ.
                let mut coef = f.mul(&a, val);
                for &b in &beta[..n] {
                    coef = f.mul(&coef, &ctx.fact[b as usize]);
                }
                for &e in &rho[..support.len()] {
                    coef = f.mul(&coef, &ctx.inv_fact[e as usize]);
                }
                let col = ctx.columns[&beta];
                dense[col] = f.add(&dense[col], &coef);
            }
        }
        Ok(dense
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !f.is_zero(v))
            .collect())
    }
}

/// Shared tables for compiling functionals on one `(d, k)`.
pub struct RowCompiler<'a, F: Field> {
    pub field: &'a F,
    pub d: usize,
    pub k: u32,
    pub basis: Vec<MultiIndex>,
    columns: HashMap<Vec<u32>, usize>,
    fact: Vec<F::Elem>,
    inv_fact: Vec<F::Elem>,
}

impl<'a, F: Field> RowCompiler<'a, F> {
    pub fn new(field: &'a F, d: usize, k: u32) -> Self {
        let basis = sigma(d + 1, k);
        let columns = basis.iter().enumerate().map(|(i, a)| (a.0.clone(), i)).collect();
        let top = (k as usize + d) * 2 + 2;
        let mut fact = vec![field.one()];
        for i in 1..=top {
            let next = field.mul(&fact[i - 1], &field.int(i as i64));
            fact.push(next);
        }
        let inv_fact = fact
            .iter()
            .map(|x| field.inv(x).expect("field characteristic exceeds the degree"))
            .collect();
        Self {
            field,
            d,
            k,
            basis,
            columns,
            fact,
            inv_fact,
        }
    }

    pub fn ncols(&self) -> usize {
        self.basis.len()
    }

    pub fn column(&self, alpha: &[u32]) -> Option<usize> {
        self.columns.get(alpha).copied()
    }

    /// `t! Π e_i! / (t + |e|)!`.
    fn mean(&self, e: &[u32], t: u32) -> F::Elem {
        let f = self.field;
        let mut acc = self.fact[t as usize].clone();
        for &x in e {
            acc = f.mul(&acc, &self.fact[x as usize]);
        }
        let total = t + e.iter().sum::<u32>();
        f.mul(&acc, &self.inv_fact[total as usize])
    }

    pub fn compile_all(&self, functionals: &[Functional]) -> Result<Vec<SparseRow<F::Elem>>> {
        functionals.par_iter().map(|fl| fl.compile(self)).collect()
    }
}

/// The DOF-by-monomial matrix `V[i][j] = dof_i(Λα_j)`.
pub fn vandermonde<F: Field>(field: &F, d: usize, k: u32, functionals: &[Functional]) -> Result<Vec<SparseRow<F::Elem>>> {
    RowCompiler::new(field, d, k).compile_all(functionals)
}

/// Applies compiled rows to a coefficient vector over the same monomial basis.
pub fn apply_rows(rows: &[SparseRow<Q>], coeffs: &[Q]) -> Vec<Q> {
    rows.par_iter()
        .map(|row| row.iter().fold(Q::zero(), |acc, (c, v)| acc + v * &coeffs[*c]))
        .collect()
}

/// The same matrix through [`Functional::apply`]; slow, used as a cross-check.
pub fn vandermonde_direct(d: usize, k: u32, functionals: &[Functional]) -> Result<Vec<Vec<Q>>> {
    let labels: Vec<usize> = (0..=d).collect();
    let basis: Vec<BaryPoly> = sigma(d + 1, k)
        .iter()
        .map(|a| BaryPoly::monomial(labels.clone(), a))
        .collect();
    functionals
        .par_iter()
        .map(|fl| basis.iter().map(|p| fl.apply(p)).collect())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Modular,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "modular" => Ok(Mode::Modular),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

/// Outcome of a unisolvency check.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub mode: Mode,
    pub size: usize,
    pub rank: usize,
    pub nonsingular: bool,
    /// Exact determinant of the DOF-by-monomial matrix, when computed over the rationals.
    pub determinant: Option<String>,
    /// Primes tried in modular mode.
    pub primes: Vec<u64>,
    /// Set when modular attempts were inconclusive and the exact route decided.
    pub exact_fallback: bool,
    /// A nonzero polynomial annihilated by every DOF, as `(α, coefficient)` pairs.
    pub kernel: Option<Vec<(MultiIndex, String)>>,
}

const MODULAR_ATTEMPTS: usize = 3;

fn square_check(d: usize, k: u32, functionals: &[Functional]) -> Result<usize> {
    let n = sigma(d + 1, k).len();
    if functionals.len() != n {
        return Err(Error::Precondition(format!(
            "{} functionals for a space of dimension {n}",
            functionals.len()
        )));
    }
    Ok(n)
}

pub fn check_unisolvent(d: usize, k: u32, functionals: &[Functional], mode: Mode, seed: u64) -> Result<Certificate> {
    let n = square_check(d, k, functionals)?;
    if mode == Mode::Modular {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut primes = Vec::new();
        for _ in 0..MODULAR_ATTEMPTS {
            let field = PrimeField::random(&mut rng);
            primes.push(field.modulus());
            let Ok(rows) = vandermonde(&field, d, k, functionals) else {
                continue;
            };
            let rank = factorize(&field, rows, n).rank();
            if rank == n {
                return Ok(Certificate {
                    mode,
                    size: n,
                    rank,
                    nonsingular: true,
                    determinant: None,
                    primes,
                    exact_fallback: false,
                    kernel: None,
                });
            }
        }
        let mut cert = exact_certificate(d, k, functionals, n)?;
        cert.mode = mode;
        cert.primes = primes;
        cert.exact_fallback = true;
        return Ok(cert);
    }
    exact_certificate(d, k, functionals, n)
}

fn exact_certificate(d: usize, k: u32, functionals: &[Functional], n: usize) -> Result<Certificate> {
    let rows = vandermonde(&Rationals, d, k, functionals)?;
    let fact = factorize(&Rationals, rows, n);
    let rank = fact.rank();
    let det = fact.determinant(&Rationals);
    let kernel = fact.kernel_vector(&Rationals).map(|x| {
        let basis = sigma(d + 1, k);
        x.into_iter()
            .zip(basis)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, a)| (a, fmt_q(&c)))
            .collect()
    });
    Ok(Certificate {
        mode: Mode::Exact,
        size: n,
        rank,
        nonsingular: rank == n,
        determinant: Some(fmt_q(&det)),
        primes: Vec::new(),
        exact_fallback: false,
        kernel,
    })
}

/// An exact factorization of the DOF matrix, reusable for many right-hand sides.
pub struct Solver {
    d: usize,
    k: u32,
    basis: Vec<MultiIndex>,
    fact: Factorization<Q>,
}

impl Solver {
    pub fn new(d: usize, k: u32, functionals: &[Functional]) -> Result<Self> {
        let n = square_check(d, k, functionals)?;
        let rows = vandermonde(&Rationals, d, k, functionals)?;
        let fact = factorize(&Rationals, rows, n);
        if !fact.is_nonsingular() {
            return Err(Error::Singular { size: n, rank: fact.rank() });
        }
        Ok(Self {
            d,
            k,
            basis: sigma(d + 1, k),
            fact,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The unique `p ∈ P_k` with `dof_i(p) = values[i]`.
    pub fn solve(&self, values: &[Q]) -> Result<BaryPoly> {
        if values.len() != self.dim() {
            return Err(Error::Precondition(format!("{} values for {} DOFs", values.len(), self.dim())));
        }
        let x = self.fact.solve(&Rationals, values).expect("nonsingular system is consistent");
        self.to_poly(x)
    }

    fn to_poly(&self, coeffs: Vec<Q>) -> Result<BaryPoly> {
        BaryPoly::from_terms(
            (0..=self.d).collect(),
            self.k,
            self.basis.iter().cloned().zip(coeffs).filter(|(_, c)| !c.is_zero()),
        )
    }

    /// The nodal basis `p_j` with `dof_i(p_j) = δ_ij`.
    pub fn nodal_basis(&self) -> Result<Vec<BaryPoly>> {
        let n = self.dim();
        (0..n)
            .into_par_iter()
            .map(|j| {
                let mut e = vec![Q::zero(); n];
                e[j] = Q::one();
                self.solve(&e)
            })
            .collect()
    }
}
