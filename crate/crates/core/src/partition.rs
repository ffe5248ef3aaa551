//! Exhaustive checks of the primal and dual decompositions of `Σ(d,k)`:
//! uniqueness of `N(α)`, the refined partition, the restriction bijections
//! and the dual embedding.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::Result;
use crate::multiindex::{
    classify, classify_dual_on, dual_shift, embed_dual, enumerate_sigma, enumerate_sigma0, extend_from, q_vector,
    refined_enumerate, restrict, s_value, sigma, standard_labels, IndexSet, Kind, MultiIndex, Slice,
    SmoothnessVector,
};

#[derive(Debug, Clone, Serialize)]
pub struct PartitionCheck {
    pub name: &'static str,
    pub cases: usize,
    /// First counterexample, if any.
    pub witness: Option<String>,
}

impl PartitionCheck {
    pub fn ok(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    pub d: usize,
    pub k: u32,
    pub r: SmoothnessVector,
    pub checks: Vec<PartitionCheck>,
}

impl PartitionReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(PartitionCheck::ok)
    }
}

struct Tally {
    name: &'static str,
    cases: usize,
    witness: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            witness: None,
        }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    fn done(self) -> PartitionCheck {
        PartitionCheck {
            name: self.name,
            cases: self.cases,
            witness: self.witness,
        }
    }
}

fn subsets(labels: &[usize], size: usize) -> Vec<IndexSet> {
    (0u32..(1 << labels.len()))
        .filter(|m| m.count_ones() as usize == size)
        .map(|m| (0..labels.len()).filter(|i| m & (1 << i) != 0).map(|i| labels[i]).collect())
        .collect()
}

fn subset_sum(alpha: &MultiIndex, set: &[usize]) -> i64 {
    set.iter().map(|&i| alpha.0[i] as i64).sum()
}

/// `N(α)` by brute force over all subsets.
fn brute_class(alpha: &MultiIndex, r: &SmoothnessVector, kind: Kind) -> Vec<IndexSet> {
    let labels = standard_labels(alpha.len());
    let hits = |t: usize| -> Vec<IndexSet> {
        subsets(&labels, t)
            .into_iter()
            .filter(|n| subset_sum(alpha, n) <= r.get(t))
            .collect()
    };
    let d = r.dim();
    match kind {
        Kind::Primal => (1..=d).rev().map(hits).find(|h| !h.is_empty()).unwrap_or_else(|| vec![vec![]]),
        Kind::Dual => {
            let mut last = vec![vec![]];
            for t in 1..=d {
                let h = hits(t);
                if h.is_empty() {
                    break;
                }
                last = h;
            }
            last
        }
    }
}

/// Every `t < |θ|` has `t` entries of `θ` summing to at most `r_t`.
fn dual_admissible(theta: &MultiIndex, r: &SmoothnessVector) -> bool {
    let mut v = theta.0.clone();
    v.sort_unstable();
    let mut acc = 0i64;
    for t in 1..v.len() {
        acc += v[t - 1] as i64;
        if acc > r.get(t) {
            return false;
        }
    }
    true
}

fn as_labels(alpha: &MultiIndex, set: &[usize]) -> MultiIndex {
    MultiIndex(set.iter().map(|&i| alpha.0[i]).collect())
}

/// Runs every decomposition check for one `(r, k)`.
pub fn partition_suite(r: &SmoothnessVector, k: u32) -> Result<PartitionReport> {
    let d = r.dim();
    let labels = standard_labels(d + 1);
    let all = enumerate_sigma(&labels, k as i64)?;
    let mut checks = Vec::new();

    for (kind, name) in [(Kind::Primal, "unique N (primal)"), (Kind::Dual, "unique N (dual)")] {
        let mut t = Tally::new(name);
        for alpha in &all {
            let c = classify(alpha, &labels, r, kind)?;
            let hits = brute_class(alpha, r, kind);
            t.check(hits.len() == 1 && hits[0] == c.n_set, || format!("{alpha}: candidates {hits:?}, classified {:?}", c.n_set));
        }
        checks.push(t.done());
    }

    for (kind, name) in [(Kind::Primal, "refined partition (primal)"), (Kind::Dual, "refined partition (dual)")] {
        let mut t = Tally::new(name);
        let mut seen: BTreeMap<MultiIndex, (IndexSet, u32)> = BTreeMap::new();
        for size in 0..=d {
            for n_set in subsets(&labels, size) {
                let n_max = if size == 0 { 0 } else { r.get(size).max(0) as u32 + 1 };
                for n in 0..=n_max {
                    for alpha in refined_enumerate(&n_set, n, &labels, k as i64, r, kind, &Slice::None)? {
                        let prev = seen.insert(alpha.clone(), (n_set.clone(), n));
                        t.check(prev.is_none(), || format!("{alpha} lies in two classes"));
                    }
                }
            }
        }
        t.check(seen.len() == all.len(), || format!("classes cover {} of {}", seen.len(), all.len()));
        checks.push(t.done());
    }

    let mut rd = Tally::new("R_Delta bijective");
    let mut rn = Tally::new("R_N bijective");
    for size in 0..=d {
        for n_set in subsets(&labels, size) {
            let delta: IndexSet = labels.iter().copied().filter(|l| !n_set.contains(l)).collect();
            let n_max = if size == 0 { 0 } else { r.get(size) };
            for n in 0..=n_max.max(0) as u32 {
                if n as i64 > k as i64 {
                    continue;
                }
                let class = refined_enumerate(&n_set, n, &labels, k as i64, r, Kind::Primal, &Slice::None)?;
                let q = q_vector(r, size, n as i64);
                let sig0: BTreeSet<MultiIndex> =
                    enumerate_sigma0(&delta, k as i64 - n as i64, &q)?.into_iter().collect();
                let thetas: Vec<MultiIndex> = sigma(size, n);
                for theta in &thetas {
                    let image: Vec<MultiIndex> = class
                        .iter()
                        .filter(|a| as_labels(a, &n_set) == *theta)
                        .map(|a| restrict(a, &labels, &delta))
                        .collect();
                    let set: BTreeSet<MultiIndex> = image.iter().cloned().collect();
                    rd.check(set.len() == image.len() && set == sig0, || {
                        format!("N={n_set:?} n={n} θ={theta}: image {} vs Σ₀ {}", image.len(), sig0.len())
                    });
                    for s in &sig0 {
                        let back = extend_from(theta, s, &n_set, &labels, r);
                        rd.check(back.is_ok(), || format!("extend_from({theta}, {s}) on N={n_set:?} failed"));
                    }
                }
                let want: BTreeSet<MultiIndex> = thetas.into_iter().collect();
                for s in &sig0 {
                    let image: Vec<MultiIndex> = class
                        .iter()
                        .filter(|a| as_labels(a, &delta) == *s)
                        .map(|a| restrict(a, &labels, &n_set))
                        .collect();
                    let set: BTreeSet<MultiIndex> = image.iter().cloned().collect();
                    rn.check(set.len() == image.len() && set == want, || {
                        format!("N={n_set:?} n={n} σ={s}: image {} vs Σ(N,n) {}", image.len(), want.len())
                    });
                }
            }
        }
    }
    checks.push(rd.done());
    checks.push(rn.done());

    let mut rp = Tally::new("R'_Delta bijective");
    for size in 0..=d {
        let q = SmoothnessVector(r.0[..size.saturating_sub(1)].to_vec());
        for n_set in subsets(&labels, size) {
            let delta: IndexSet = labels.iter().copied().filter(|l| !n_set.contains(l)).collect();
            let n_max = if size == 0 { 0 } else { r.get(size).max(0) as u32 };
            for n in 0..=n_max {
                let class = refined_enumerate(&n_set, n, &labels, k as i64, r, Kind::Dual, &Slice::None)?;
                let s = s_value(d, k as i64, size, n, r);
                let shift = dual_shift(r, size, n);
                let target: BTreeSet<MultiIndex> = if s < 0 {
                    BTreeSet::new()
                } else {
                    sigma(delta.len(), s as u32).into_iter().collect()
                };
                let mut by_theta: BTreeMap<MultiIndex, Vec<MultiIndex>> = BTreeMap::new();
                for a in &class {
                    let shifted = MultiIndex(delta.iter().map(|&i| (a.0[i] as i64 - shift) as u32).collect());
                    by_theta.entry(as_labels(a, &n_set)).or_default().push(shifted);
                }
                let admissible: BTreeSet<MultiIndex> = if s < 0 {
                    BTreeSet::new()
                } else {
                    sigma(size, n).into_iter().filter(|t| dual_admissible(t, &q)).collect()
                };
                let observed: BTreeSet<MultiIndex> = by_theta.keys().cloned().collect();
                rp.check(observed == admissible, || {
                    format!("N={n_set:?} n={n}: {} θ-slices, expected {}", observed.len(), admissible.len())
                });
                for (theta, image) in &by_theta {
                    let set: BTreeSet<MultiIndex> = image.iter().cloned().collect();
                    rp.check(set.len() == image.len() && set == target, || {
                        format!("N={n_set:?} n={n} θ={theta}: image {} vs Σ(Δ,{s}) {}", image.len(), target.len())
                    });
                }
            }
        }
    }
    checks.push(rp.done());

    let mut em = Tally::new("embed_dual classification");
    for i in 0..=d {
        let face: IndexSet = labels.iter().copied().filter(|&x| x != i).collect();
        for l in 0..=r.get(1).max(-1).min(k as i64) {
            let l = l as u32;
            let p = r.tail(1, l as i64);
            for beta in sigma(d, k - l) {
                let cb = classify_dual_on(&beta, &face, &p)?;
                let mut support = cb.n_set.clone();
                support.push(i);
                support.sort_unstable();
                for theta in sigma(support.len(), l) {
                    let alpha = embed_dual(&beta, &theta, i, &labels, r, l)?;
                    let ca = classify_dual_on(&alpha, &labels, r)?;
                    em.check(ca.n_set == support && ca.n == cb.n + l, || {
                        format!("β={beta} θ={theta} I={i}: α={alpha} has N'={:?}, n'={}", ca.n_set, ca.n)
                    });
                }
            }
        }
    }
    checks.push(em.done());

    Ok(PartitionReport {
        d,
        k,
        r: r.clone(),
        checks,
    })
}
