//! Two-element patches and exact jump checks across the shared facet.

use std::collections::HashMap;
use std::str::FromStr;

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{dot, q, qr, random_q, sub_vec, Q};
use crate::arith::Rationals;
use crate::dof::{apply_rows, vandermonde, Functional};
use crate::error::{Error, Result};
use crate::fe_element::FeElement;
use crate::geometry::Simplex;
use crate::interp_element::{trace_dof_set, InterpElement, TraceDofSet};
use crate::multiindex::SmoothnessVector;
use crate::polynomial::{BaryPoly, CartesianPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Fe,
    Interp,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fe" => Ok(Family::Fe),
            "interp" => Ok(Family::Interp),
            _ => Err(Error::Parse(format!("unknown family {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Patch {
    pub plus: Simplex,
    pub minus: Simplex,
    /// Global ids of the shared facet.
    pub facet: Vec<usize>,
    /// Facet normal pointing from `K⁺` into `K⁻`.
    pub normal: Vec<Q>,
}

pub fn build_patch(plus: Simplex, minus: Simplex) -> Result<Patch> {
    let d = plus.dim();
    if minus.dim() != d {
        return Err(Error::Patch("elements have different dimensions".into()));
    }
    let facet: Vec<usize> = plus.ids().iter().copied().filter(|id| minus.ids().contains(id)).collect();
    if facet.len() != d {
        return Err(Error::Patch(format!("elements share {} vertices, expected {d}", facet.len())));
    }
    for id in &facet {
        let a = plus.vertex(plus.local(*id).expect("shared"));
        let b = minus.vertex(minus.local(*id).expect("shared"));
        if a != b {
            return Err(Error::Patch(format!("vertex {id} has different coordinates on the two sides")));
        }
    }
    let fp: Vec<usize> = facet.iter().map(|id| plus.local(*id).expect("shared")).collect();
    let mut normal = plus.canonical_frame(&fp)?.vectors.remove(0);
    let xc = plus.vertex(fp[0]).clone();
    let apex = |s: &Simplex| {
        let i = (0..=d).find(|&i| !facet.contains(&s.ids()[i])).expect("apex");
        dot(&normal, &sub_vec(s.vertex(i), &xc))
    };
    let (sp, sm) = (apex(&plus), apex(&minus));
    if sp.is_zero() || sm.is_zero() || (sp > Q::zero()) == (sm > Q::zero()) {
        return Err(Error::Patch("elements lie on the same side of the shared facet".into()));
    }
    if sm < Q::zero() {
        normal = normal.iter().map(|x| -x).collect();
    }
    Ok(Patch {
        plus,
        minus,
        facet,
        normal,
    })
}

impl Patch {
    pub fn dim(&self) -> usize {
        self.plus.dim()
    }

    fn side(&self, plus: bool) -> &Simplex {
        if plus {
            &self.plus
        } else {
            &self.minus
        }
    }

    fn facet_local(&self, plus: bool) -> Vec<usize> {
        let s = self.side(plus);
        self.facet.iter().map(|id| s.local(*id).expect("shared")).collect()
    }

    fn apex_local(&self, plus: bool) -> usize {
        let s = self.side(plus);
        (0..=self.dim()).find(|&i| !self.facet.contains(&s.ids()[i])).expect("apex")
    }

    /// A random patch: a random simplex and its mirror-like neighbour across
    /// the facet opposite its first vertex.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        loop {
            let plus = Simplex::random(d, rng);
            let facet: Vec<usize> = (1..=d).collect();
            let out = plus.outer_normal(&facet, 0).expect("facet");
            let c = plus.centroid(&facet);
            let t = crate::arith::qr(rng.random_range(1..=5), rng.random_range(1..=5));
            let mut apex: Vec<Q> = c.iter().zip(&out).map(|(a, b)| a + &t * b).collect();
            for x in apex.iter_mut() {
                *x += random_q(rng, 2) / q(8);
            }
            let mut ids: Vec<usize> = facet.clone();
            ids.push(d + 1);
            let mut verts: Vec<Vec<Q>> = facet.iter().map(|&i| plus.vertex(i).clone()).collect();
            verts.push(apex);
            if let Ok(minus) = Simplex::new(ids, verts) {
                if let Ok(p) = build_patch(plus, minus) {
                    return p;
                }
            }
        }
    }

    /// `trace_F(∂^t u⁺/∂n^t) - trace_F(∂^t u⁻/∂n^t)` for `t = 0..=t_max`, over the facet's global ids.
    pub fn jumps(&self, u_plus: &BaryPoly, u_minus: &BaryPoly, t_max: u32) -> Result<Vec<BaryPoly>> {
        jump_check(u_plus, u_minus, self, t_max)
    }
}

pub fn jump_check(u_plus: &BaryPoly, u_minus: &BaryPoly, patch: &Patch, t_max: u32) -> Result<Vec<BaryPoly>> {
    let (fp, fm) = (patch.facet_local(true), patch.facet_local(false));
    let mut a = u_plus.clone();
    let mut b = u_minus.clone();
    let mut out = Vec::new();
    for t in 0..=t_max {
        if t > 0 {
            a = a.directional_derivative(&patch.plus, &patch.normal)?;
            b = b.directional_derivative(&patch.minus, &patch.normal)?;
        }
        let ta = a.trace(&fp)?.relabel(patch.facet.clone());
        let tb = b.trace(&fm)?.relabel(patch.facet.clone());
        out.push(ta.sub(&tb)?);
    }
    Ok(out)
}

/// Matched functionals on the two sides. For the fe family the indices point
/// into the elements' DOF lists; for the interp family into the concatenated
/// trace sets `Ψ_{I,0}, ..., Ψ_{I,r_1}` of each side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SharedPair {
    pub plus: usize,
    pub minus: usize,
    /// Facet-normal order for trace functionals.
    pub l: Option<u32>,
    /// `+1` or `-1`: `dof⁺ = sign · dof⁻` on a continuous function.
    pub sign: i64,
    pub owner: Vec<usize>,
}

fn fe_pairs(plus: &FeElement, minus: &FeElement, facet: &[usize]) -> Result<Vec<SharedPair>> {
    let on_facet = |o: &[usize]| o.iter().all(|id| facet.contains(id));
    let index: HashMap<_, usize> = minus
        .info
        .iter()
        .enumerate()
        .filter(|(_, i)| on_facet(&i.owner))
        .map(|(j, i)| (i.key(), j))
        .collect();
    let mut pairs = Vec::new();
    for (j, i) in plus.info.iter().enumerate().filter(|(_, i)| on_facet(&i.owner)) {
        let m = *index
            .get(&i.key())
            .ok_or_else(|| Error::Patch(format!("no partner for DOF on {:?}", i.owner)))?;
        pairs.push(SharedPair {
            plus: j,
            minus: m,
            l: None,
            sign: 1,
            owner: i.owner.clone(),
        });
    }
    if pairs.len() != index.len() {
        return Err(Error::Patch("shared DOF sets differ in size".into()));
    }
    Ok(pairs)
}

/// Trace sets of one side for every order `0..=r_1`, each with the outward facet normal.
pub fn side_trace_sets(patch: &Patch, plus: bool, r: &SmoothnessVector, k: u32) -> Result<Vec<TraceDofSet>> {
    let s = patch.side(plus);
    (0..=r.get(1).max(-1))
        .map(|l| trace_dof_set(s, patch.apex_local(plus), l as u32, r, k, None))
        .collect()
}

fn interp_pairs(patch: &Patch, r: &SmoothnessVector, k: u32) -> Result<Vec<SharedPair>> {
    let tp = side_trace_sets(patch, true, r, k)?;
    let tm = side_trace_sets(patch, false, r, k)?;
    let mut pairs = Vec::new();
    let mut offset = 0;
    for (a, b) in tp.iter().zip(&tm) {
        if a.info.len() != b.info.len() {
            return Err(Error::Patch("trace sets differ in size".into()));
        }
        for (j, (ia, ib)) in a.info.iter().zip(&b.info).enumerate() {
            if ia.beta != ib.beta
                || ia.owner != ib.owner
                || patch.plus.cartesian(&ia.node) != patch.minus.cartesian(&ib.node)
            {
                return Err(Error::Patch(format!("trace nodes of {} do not coincide", ia.beta)));
            }
            pairs.push(SharedPair {
                plus: offset + j,
                minus: offset + j,
                l: Some(a.l),
                sign: if a.l % 2 == 0 { 1 } else { -1 },
                owner: ia.owner.clone(),
            });
        }
        offset += a.info.len();
    }
    Ok(pairs)
}

pub fn shared_dof_map(patch: &Patch, r: &SmoothnessVector, k: u32, family: Family) -> Result<Vec<SharedPair>> {
    match family {
        Family::Fe => {
            let plus = FeElement::new(patch.plus.clone(), r.clone(), k)?;
            let minus = FeElement::new(patch.minus.clone(), r.clone(), k)?;
            fe_pairs(&plus, &minus, &patch.facet)
        }
        Family::Interp => interp_pairs(patch, r, k),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderVerdict {
    pub order: u32,
    /// Trials whose jump at this order is the zero polynomial.
    pub zero_trials: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuityReport {
    pub family: Family,
    pub trials: usize,
    pub seed: u64,
    pub shared: usize,
    pub r1: i64,
    /// One verdict per order `0..=r_1 + 1`.
    pub orders: Vec<OrderVerdict>,
    /// For the interp family: `Ψ⁺(u⁺) = ±Ψ⁻(u⁻)` held on every matched pair.
    pub trace_pairs_consistent: Option<bool>,
    /// The first `(trial, order)` with a nonzero jump at an order `≤ r_1`.
    pub first_failure: Option<(usize, u32)>,
}

impl ContinuityReport {
    /// Zero jumps up to `r_1` in every trial.
    pub fn continuous(&self) -> bool {
        self.first_failure.is_none() && self.trace_pairs_consistent != Some(false)
    }

    /// Some trial has a nonzero jump at order `r_1 + 1`.
    pub fn sharp(&self) -> bool {
        self.orders.last().is_some_and(|o| o.zero_trials < self.trials)
    }
}

fn small_rational<R: Rng + ?Sized>(rng: &mut R) -> Q {
    qr(rng.random_range(-100..=100), rng.random_range(1..=100))
}

/// Randomized patch tests: jumps of every order up to `r_1 + 1`.
///
/// fe: random DOF values with the shared ones copied across.
/// interp: one random global polynomial of degree `k + 2` interpolated on each side.
pub fn continuity_trials(
    patch: &Patch,
    r: &SmoothnessVector,
    k: u32,
    family: Family,
    trials: usize,
    seed: u64,
) -> Result<ContinuityReport> {
    let r1 = r.get(1);
    let t_max = (r1 + 1).max(0) as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut zero = vec![0usize; t_max as usize + 1];
    let mut first_failure = None;
    let mut trace_ok = None;
    let shared;

    let mut record = |trial: usize, jumps: &[BaryPoly]| {
        for (t, j) in jumps.iter().enumerate() {
            if j.is_zero() {
                zero[t] += 1;
            } else if (t as i64) <= r1 && first_failure.is_none() {
                first_failure = Some((trial, t as u32));
            }
        }
    };

    match family {
        Family::Fe => {
            let plus = FeElement::new(patch.plus.clone(), r.clone(), k)?;
            let minus = FeElement::new(patch.minus.clone(), r.clone(), k)?;
            let pairs = fe_pairs(&plus, &minus, &patch.facet)?;
            shared = pairs.len();
            let (sp, sm) = (plus.solver()?, minus.solver()?);
            for trial in 0..trials {
                let vp: Vec<Q> = (0..plus.len()).map(|_| small_rational(&mut rng)).collect();
                let mut vm: Vec<Q> = (0..minus.len()).map(|_| small_rational(&mut rng)).collect();
                for p in &pairs {
                    vm[p.minus] = vp[p.plus].clone();
                }
                let jumps = jump_check(&sp.solve(&vp)?, &sm.solve(&vm)?, patch, t_max)?;
                record(trial, &jumps);
            }
        }
        Family::Interp => {
            let plus = InterpElement::new(patch.plus.clone(), r.clone(), k)?;
            let minus = InterpElement::new(patch.minus.clone(), r.clone(), k)?;
            let pairs = interp_pairs(patch, r, k)?;
            shared = pairs.len();
            let deg = k + 2;
            let compile = |fs: &[Functional]| vandermonde(&Rationals, patch.dim(), deg, fs);
            let tp: Vec<_> = side_trace_sets(patch, true, r, k)?.into_iter().flat_map(|t| t.functionals).collect();
            let tm: Vec<_> = side_trace_sets(patch, false, r, k)?.into_iter().flat_map(|t| t.functionals).collect();
            let (rp, rm) = (compile(&plus.functionals)?, compile(&minus.functionals)?);
            let tp = vandermonde(&Rationals, patch.dim(), k, &tp)?;
            let tm = vandermonde(&Rationals, patch.dim(), k, &tm)?;
            let (sp, sm) = (plus.solver()?, minus.solver()?);
            let mut consistent = true;
            for trial in 0..trials {
                let u = CartesianPoly::random(patch.dim(), deg, &mut rng);
                let bp = u.to_bary(&patch.plus)?.raise_degree(deg).coefficients();
                let bm = u.to_bary(&patch.minus)?.raise_degree(deg).coefficients();
                let up = sp.solve(&apply_rows(&rp, &bp))?;
                let um = sm.solve(&apply_rows(&rm, &bm))?;
                let vp = apply_rows(&tp, &up.coefficients());
                let vm = apply_rows(&tm, &um.coefficients());
                for p in &pairs {
                    if vp[p.plus] != q(p.sign) * &vm[p.minus] {
                        consistent = false;
                    }
                }
                let jumps = jump_check(&up, &um, patch, t_max)?;
                record(trial, &jumps);
            }
            trace_ok = Some(consistent);
        }
    }

    Ok(ContinuityReport {
        family,
        trials,
        seed,
        shared,
        r1,
        orders: zero
            .into_iter()
            .enumerate()
            .map(|(t, z)| OrderVerdict {
                order: t as u32,
                zero_trials: z,
            })
            .collect(),
        trace_pairs_consistent: trace_ok,
        first_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(v: &[i64]) -> SmoothnessVector {
        SmoothnessVector::new(v.to_vec()).unwrap()
    }

    fn pt(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    fn square() -> Patch {
        let a = Simplex::new(vec![0, 1, 2], vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[1, 1])]).unwrap();
        let b = Simplex::new(vec![0, 2, 3], vec![pt(&[0, 0]), pt(&[1, 1]), pt(&[0, 1])]).unwrap();
        build_patch(a, b).unwrap()
    }

    #[test]
    fn patch_construction() {
        let p = square();
        assert_eq!(p.facet, vec![0, 2]);
        assert!(dot(&p.normal, &pt(&[-1, 1])) > Q::zero());
        let t1 = Simplex::new(vec![0, 1, 2, 3], vec![pt(&[0, 0, 0]), pt(&[1, 0, 0]), pt(&[0, 1, 0]), pt(&[0, 0, 1])]).unwrap();
        let t2 = Simplex::new(vec![1, 2, 3, 4], vec![pt(&[1, 0, 0]), pt(&[0, 1, 0]), pt(&[0, 0, 1]), pt(&[1, 1, 1])]).unwrap();
        assert!(build_patch(t1.clone(), t2).is_ok());
        let t3 = Simplex::new(vec![0, 1, 5, 6], vec![pt(&[0, 0, 0]), pt(&[1, 0, 0]), pt(&[0, -1, 0]), pt(&[0, 0, -1])]).unwrap();
        assert!(matches!(build_patch(t1.clone(), t3), Err(Error::Patch(_))));
        let same = Simplex::new(vec![0, 1, 2, 7], vec![pt(&[0, 0, 0]), pt(&[1, 0, 0]), pt(&[0, 1, 0]), pt(&[1, 1, 2])]).unwrap();
        assert!(matches!(build_patch(t1, same), Err(Error::Patch(_))));
    }

    #[test]
    fn frames_agree_across_patch() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = Patch::random(3, &mut rng);
        let fp: Vec<usize> = p.facet.iter().map(|id| p.plus.local(*id).unwrap()).collect();
        let fm: Vec<usize> = p.facet.iter().map(|id| p.minus.local(*id).unwrap()).collect();
        for size in 1..=3 {
            for sub in crate::fe_element::subsimplices(2).into_iter().filter(|s| s.len() == size) {
                let a: Vec<usize> = sub.iter().map(|&i| fp[i]).collect();
                let b: Vec<usize> = sub.iter().map(|&i| fm[i]).collect();
                assert_eq!(p.plus.canonical_frame(&a).unwrap(), p.minus.canonical_frame(&b).unwrap());
            }
        }
    }

    #[test]
    fn argyris_shares_thirteen() {
        let pairs = shared_dof_map(&square(), &sv(&[1, 2]), 5, Family::Fe).unwrap();
        assert_eq!(pairs.len(), 13);
        let lagrange = shared_dof_map(&square(), &sv(&[0, 0]), 3, Family::Fe).unwrap();
        assert_eq!(lagrange.len(), 4);
        let interp = shared_dof_map(&square(), &sv(&[1, 2]), 5, Family::Interp).unwrap();
        assert!(interp.iter().any(|p| p.sign == -1));
    }

    #[test]
    fn global_polynomial_has_no_jumps() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = Patch::random(2, &mut rng);
        let u = CartesianPoly::random(2, 4, &mut rng);
        let jumps = jump_check(&u.to_bary(&p.plus).unwrap(), &u.to_bary(&p.minus).unwrap(), &p, 4).unwrap();
        assert!(jumps.iter().all(BaryPoly::is_zero));
    }

    #[test]
    fn fe_and_interp_patches() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (d, r, k) in [(1, vec![1], 3), (2, vec![1, 2], 5)] {
            let p = Patch::random(d, &mut rng);
            for family in [Family::Fe, Family::Interp] {
                let rep = continuity_trials(&p, &sv(&r), k, family, 4, 11).unwrap();
                assert!(rep.continuous(), "{family:?} {rep:?}");
                assert!(rep.sharp(), "{family:?} {rep:?}");
            }
        }
    }

    #[test]
    fn trials_are_reproducible() {
        let p = square();
        let a = continuity_trials(&p, &sv(&[1, 2]), 5, Family::Fe, 2, 5).unwrap();
        let b = continuity_trials(&p, &sv(&[1, 2]), 5, Family::Fe, 2, 5).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
