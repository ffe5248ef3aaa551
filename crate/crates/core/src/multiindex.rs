//! Multi-indices on a simplex and their primal and dual decompositions.
//!
//! A multi-index `α` lives on an index set `D` of vertex labels; position `j`
//! of `α.0` belongs to label `D[j]`. Everything that returns index sets
//! returns labels, so classes computed on a face transfer to the element
//! that owns it.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type IndexSet = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

/// `r = (r_1, ..., r_d)`, indexed from one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SmoothnessVector(pub Vec<i64>);

impl SmoothnessVector {
    /// Checks the entry constraints only: every entry is at least −1 and
    /// negative entries form a leading prefix.
    pub fn new(r: Vec<i64>) -> Result<Self> {
        if let Some(bad) = r.iter().find(|&&v| v < -1) {
            return Err(Error::InvalidSmoothness(format!("entry {bad} is below -1")));
        }
        if r.windows(2).any(|w| w[0] >= 0 && w[1] < 0) {
            return Err(Error::InvalidSmoothness(
                "negative entries must form a leading prefix".into(),
            ));
        }
        Ok(Self(r))
    }

    /// Parses a comma separated list such as `"1,2"`. An empty string is the empty vector.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Self::new(Vec::new());
        }
        let r = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad smoothness entry {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(r)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `r_t` for `1 <= t <= d`.
    pub fn get(&self, t: usize) -> i64 {
        self.0[t - 1]
    }

    /// The entrywise shift `r - c`.
    pub fn shifted(&self, c: i64) -> Self {
        Self(self.0.iter().map(|v| v - c).collect())
    }

    /// `(r_{m+1} - c, ..., r_d - c)`.
    pub fn tail(&self, m: usize, c: i64) -> Self {
        Self(self.0[m..].iter().map(|v| v - c).collect())
    }
}

impl fmt::Display for SmoothnessVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Why `(r, k)` fails the standing assumption, or `None` if it holds.
pub fn assumption_violation(r: &SmoothnessVector, k: i64) -> Option<String> {
    if let Some(bad) = r.0.iter().find(|&&v| v < -1) {
        return Some(format!("entry {bad} is below -1"));
    }
    if r.0.windows(2).any(|w| w[0] >= 0 && w[1] < 0) {
        return Some("negative entries must form a leading prefix".into());
    }
    for t in 1..r.dim() {
        if r.get(t + 1) < 2 * r.get(t) {
            return Some(format!("r_{} < 2·r_{}", t + 1, t));
        }
    }
    match r.0.last() {
        Some(&rd) if k < 2 * rd + 1 => Some(format!("k < 2·r_d+1 ({k} < {})", 2 * rd + 1)),
        None if k < 0 => Some("k < 0".into()),
        _ => None,
    }
}

pub fn validate_assumption(r: &SmoothnessVector, k: i64) -> bool {
    assumption_violation(r, k).is_none()
}

fn require_assumption(r: &SmoothnessVector, k: i64) -> Result<()> {
    match assumption_violation(r, k) {
        None => Ok(()),
        Some(reason) => Err(Error::Assumption {
            r: r.0.clone(),
            k,
            reason,
        }),
    }
}

/// All `α` of length `len` with `|α| = k`, in descending lexicographic order.
pub fn sigma(len: usize, k: u32) -> Vec<MultiIndex> {
    fn rec(len: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if len == 1 {
            prefix.push(k);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for v in (0..=k).rev() {
            prefix.push(v);
            rec(len - 1, k - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if len > 0 {
        rec(len, k, &mut Vec::with_capacity(len), &mut out);
    } else if k == 0 {
        out.push(MultiIndex(Vec::new()));
    }
    out
}

pub fn enumerate_sigma(d_set: &[usize], k: i64) -> Result<Vec<MultiIndex>> {
    if d_set.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    if k < 0 {
        return Err(Error::Precondition(format!("negative degree {k}")));
    }
    Ok(sigma(d_set.len(), k as u32))
}

pub fn binomial(n: i64, k: i64) -> u64 {
    if k < 0 || n < k || n < 0 {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Positions of `α` sorted by (value, position).
fn ascending_positions(alpha: &[u32]) -> Vec<usize> {
    let mut pos: Vec<usize> = (0..alpha.len()).collect();
    pos.sort_by_key(|&i| (alpha[i], i));
    pos
}

/// Prefix sums of the sorted entries: `out[t]` is the sum of the `t` smallest.
fn smallest_sums(alpha: &[u32], order: &[usize]) -> Vec<i64> {
    let mut out = vec![0i64; alpha.len() + 1];
    for (t, &p) in order.iter().enumerate() {
        out[t + 1] = out[t] + alpha[p] as i64;
    }
    out
}

/// Membership in `Σ₀^{(q)}`: the `t` smallest entries sum to more than `q_t`
/// for every `1 <= t < len`.
pub fn in_sigma0(alpha: &[u32], q: &[i64]) -> bool {
    let order = ascending_positions(alpha);
    let sums = smallest_sums(alpha, &order);
    (1..alpha.len()).all(|t| sums[t] > q[t - 1])
}

pub fn enumerate_sigma0(d_set: &[usize], k: i64, q: &[i64]) -> Result<Vec<MultiIndex>> {
    if q.len() + 1 != d_set.len() {
        return Err(Error::Precondition(format!(
            "threshold vector has length {} for an index set of size {}",
            q.len(),
            d_set.len()
        )));
    }
    Ok(enumerate_sigma(d_set, k)?
        .into_iter()
        .filter(|a| in_sigma0(&a.0, q))
        .collect())
}

/// `q_t = r_{t+m} - c` for `t = 1..d-m`.
pub fn q_vector(r: &SmoothnessVector, m: usize, c: i64) -> Vec<i64> {
    r.tail(m, c).0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Primal,
    Dual,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Primal => write!(f, "primal"),
            Kind::Dual => write!(f, "dual"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub alpha: MultiIndex,
    pub kind: Kind,
    pub s: usize,
    #[serde(rename = "N")]
    pub n_set: IndexSet,
    #[serde(rename = "Delta")]
    pub delta_set: IndexSet,
    pub n: u32,
    pub delta: u32,
}

impl Classification {
    fn build(alpha: &MultiIndex, labels: &[usize], kind: Kind, chosen: &[usize]) -> Self {
        let mut n_pos: Vec<usize> = chosen.to_vec();
        n_pos.sort_unstable();
        let n_set: IndexSet = n_pos.iter().map(|&p| labels[p]).collect();
        let delta_pos: Vec<usize> = (0..alpha.len()).filter(|p| !n_pos.contains(p)).collect();
        let delta_set: IndexSet = delta_pos.iter().map(|&p| labels[p]).collect();
        let n = n_pos.iter().map(|&p| alpha.0[p]).sum();
        let delta = delta_pos.iter().map(|&p| alpha.0[p]).sum();
        Self {
            alpha: alpha.clone(),
            kind,
            s: n_pos.len(),
            n_set,
            delta_set,
            n,
            delta,
        }
    }

    /// Positions (within the classified index set) of the members of `N`.
    pub fn n_positions(&self, labels: &[usize]) -> Vec<usize> {
        self.n_set
            .iter()
            .map(|l| labels.iter().position(|x| x == l).expect("label"))
            .collect()
    }

    pub fn delta_positions(&self, labels: &[usize]) -> Vec<usize> {
        self.delta_set
            .iter()
            .map(|l| labels.iter().position(|x| x == l).expect("label"))
            .collect()
    }
}

fn check_shape(alpha: &MultiIndex, labels: &[usize], r: &SmoothnessVector) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    if alpha.len() != labels.len() {
        return Err(Error::InvalidMultiIndex(format!(
            "{alpha} has {} entries for {} labels",
            alpha.len(),
            labels.len()
        )));
    }
    if r.dim() + 1 != labels.len() {
        return Err(Error::InvalidSmoothness(format!(
            "r has {} entries, expected {}",
            r.dim(),
            labels.len() - 1
        )));
    }
    require_assumption(r, alpha.degree() as i64)
}

fn uniqueness_guard(
    alpha: &MultiIndex,
    labels: &[usize],
    order: &[usize],
    sums: &[i64],
    s: usize,
    threshold: i64,
) -> Result<()> {
    if s == 0 || s >= alpha.len() {
        return Ok(());
    }
    let runner_up = sums[s] - alpha.0[order[s - 1]] as i64 + alpha.0[order[s]] as i64;
    if runner_up <= threshold {
        let first: Vec<usize> = order[..s].iter().map(|&p| labels[p]).collect();
        let mut second: Vec<usize> = order[..s - 1].iter().map(|&p| labels[p]).collect();
        second.push(labels[order[s]]);
        return Err(Error::NonUniqueClass {
            alpha: alpha.0.clone(),
            candidates: vec![first, second],
        });
    }
    Ok(())
}

/// Primal class: the largest `s` for which some `s` entries sum to at most `r_s`.
pub fn classify_primal_on(alpha: &MultiIndex, labels: &[usize], r: &SmoothnessVector) -> Result<Classification> {
    check_shape(alpha, labels, r)?;
    let order = ascending_positions(&alpha.0);
    let sums = smallest_sums(&alpha.0, &order);
    for s in (1..labels.len()).rev() {
        if sums[s] <= r.get(s) {
            uniqueness_guard(alpha, labels, &order, &sums, s, r.get(s))?;
            return Ok(Classification::build(alpha, labels, Kind::Primal, &order[..s]));
        }
    }
    Ok(Classification::build(alpha, labels, Kind::Primal, &[]))
}

/// Dual class: the largest `s` such that for every `t <= s` some `t` entries
/// sum to at most `r_t`.
pub fn classify_dual_on(alpha: &MultiIndex, labels: &[usize], r: &SmoothnessVector) -> Result<Classification> {
    check_shape(alpha, labels, r)?;
    let order = ascending_positions(&alpha.0);
    let sums = smallest_sums(&alpha.0, &order);
    let s = (1..labels.len()).take_while(|&t| sums[t] <= r.get(t)).last().unwrap_or(0);
    if s > 0 {
        uniqueness_guard(alpha, labels, &order, &sums, s, r.get(s))?;
    }
    Ok(Classification::build(alpha, labels, Kind::Dual, &order[..s]))
}

pub fn standard_labels(len: usize) -> IndexSet {
    (0..len).collect()
}

pub fn classify_primal(alpha: &MultiIndex, r: &SmoothnessVector) -> Result<Classification> {
    classify_primal_on(alpha, &standard_labels(alpha.len()), r)
}

pub fn classify_dual(alpha: &MultiIndex, r: &SmoothnessVector) -> Result<Classification> {
    classify_dual_on(alpha, &standard_labels(alpha.len()), r)
}

pub fn classify(alpha: &MultiIndex, labels: &[usize], r: &SmoothnessVector, kind: Kind) -> Result<Classification> {
    match kind {
        Kind::Primal => classify_primal_on(alpha, labels, r),
        Kind::Dual => classify_dual_on(alpha, labels, r),
    }
}

/// Optional slicing of a refined class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slice {
    None,
    /// Fix the entries on `N` (in label order).
    Theta(MultiIndex),
    /// Fix the entries on `Δ` (in label order).
    Sigma(MultiIndex),
}

/// `Σ_{N,n}` (or its dual counterpart) on `D`, optionally sliced.
pub fn refined_enumerate(
    n_set: &[usize],
    n: u32,
    d_set: &[usize],
    k: i64,
    r: &SmoothnessVector,
    kind: Kind,
    slice: &Slice,
) -> Result<Vec<MultiIndex>> {
    if !n_set.is_empty() && n as i64 > r.get(n_set.len()) {
        return Ok(Vec::new());
    }
    if n_set.is_empty() && n != 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for alpha in enumerate_sigma(d_set, k)? {
        let c = classify(&alpha, d_set, r, kind)?;
        if c.n_set != n_set || c.n != n {
            continue;
        }
        let keep = match slice {
            Slice::None => true,
            Slice::Theta(theta) => restrict(&alpha, d_set, n_set).0 == theta.0,
            Slice::Sigma(sigma) => restrict(&alpha, d_set, &c.delta_set).0 == sigma.0,
        };
        if keep {
            out.push(alpha);
        }
    }
    Ok(out)
}

/// Entries of `α` on the labels `sub` (in label order).
pub fn restrict(alpha: &MultiIndex, labels: &[usize], sub: &[usize]) -> MultiIndex {
    MultiIndex(
        sub.iter()
            .map(|l| alpha.0[labels.iter().position(|x| x == l).expect("label in index set")])
            .collect(),
    )
}

/// `R_(Δ)`: the entries of `α` on its primal `Δ(α)`.
pub fn restrict_to_delta(alpha: &MultiIndex, labels: &[usize], r: &SmoothnessVector) -> Result<MultiIndex> {
    let c = classify_primal_on(alpha, labels, r)?;
    if c.delta_set.len() == labels.len() {
        return Err(Error::Precondition(format!("{alpha} has an empty N")));
    }
    Ok(restrict(alpha, labels, &c.delta_set))
}

/// `R_(N)`: the entries of `α` on its primal `N(α)`.
pub fn restrict_to_n(alpha: &MultiIndex, labels: &[usize], r: &SmoothnessVector) -> Result<MultiIndex> {
    let c = classify_primal_on(alpha, labels, r)?;
    Ok(restrict(alpha, labels, &c.n_set))
}

/// Assembles `α` from `θ` on `N` and `σ` on `Δ = D \ N`, and checks that it
/// lands in `Σ_{N,|θ|}` with `σ ∈ Σ₀^{(q)}(Δ, k - |θ|)`.
pub fn extend_from(
    theta: &MultiIndex,
    sigma: &MultiIndex,
    n_set: &[usize],
    labels: &[usize],
    r: &SmoothnessVector,
) -> Result<MultiIndex> {
    let delta: IndexSet = labels.iter().copied().filter(|l| !n_set.contains(l)).collect();
    if theta.len() != n_set.len() || sigma.len() != delta.len() || n_set.len() + delta.len() != labels.len() {
        return Err(Error::InvalidMultiIndex("θ/σ do not match N/Δ".into()));
    }
    let n = theta.degree();
    if !n_set.is_empty() && n as i64 > r.get(n_set.len()) {
        return Err(Error::InvalidMultiIndex(format!("|θ| = {n} exceeds r_{}", n_set.len())));
    }
    let q = q_vector(r, n_set.len(), n as i64);
    if !in_sigma0(&sigma.0, &q) {
        return Err(Error::InvalidMultiIndex(format!("σ = {sigma} is not in Σ₀^{q:?}")));
    }
    let mut alpha = vec![0u32; labels.len()];
    for (pos, l) in labels.iter().enumerate() {
        if let Some(i) = n_set.iter().position(|x| x == l) {
            alpha[pos] = theta.0[i];
        } else {
            let i = delta.iter().position(|x| x == l).expect("label");
            alpha[pos] = sigma.0[i];
        }
    }
    let alpha = MultiIndex(alpha);
    let c = classify_primal_on(&alpha, labels, r)?;
    if c.n_set != n_set || c.n != n {
        return Err(Error::InvalidMultiIndex(format!(
            "{alpha} classifies as N={:?}, n={}",
            c.n_set, c.n
        )));
    }
    Ok(alpha)
}

/// The dual node shift `r_{|N|+1} - n + 1`; zero for the vertex class, where
/// the node is forced onto the vertex.
pub fn dual_shift(r: &SmoothnessVector, card_n: usize, n: u32) -> i64 {
    if card_n >= r.dim() {
        0
    } else {
        r.get(card_n + 1) - n as i64 + 1
    }
}

/// `S(d, k, N, n) = k - n - (d + 1 - |N|)(r_{|N|+1} - n + 1)`.
pub fn s_value(d: usize, k: i64, card_n: usize, n: u32, r: &SmoothnessVector) -> i64 {
    k - n as i64 - (d + 1 - card_n) as i64 * dual_shift(r, card_n, n)
}

/// `R'_(Δ)`: the dual `Δ'`-entries shifted down by `r_{|N'|+1} - n' + 1`.
pub fn dual_node_shift(alpha: &MultiIndex, labels: &[usize], r: &SmoothnessVector) -> Result<MultiIndex> {
    let c = classify_dual_on(alpha, labels, r)?;
    let shift = dual_shift(r, c.s, c.n);
    let sub = restrict(alpha, labels, &c.delta_set);
    let shifted: Vec<u32> = sub
        .0
        .iter()
        .map(|&v| {
            let w = v as i64 - shift;
            debug_assert!(w >= 0, "dual entry below its shift");
            w as u32
        })
        .collect();
    Ok(MultiIndex(shifted))
}

/// Rebuilds `α` on `D = (D \ {I})` plus `I` from `β` on `D \ {I}` and `θ` on
/// `N'(β) ∪ {I}` with `|θ| = l`, where `β` is dual-classified for `p_l`.
pub fn embed_dual(
    beta: &MultiIndex,
    theta: &MultiIndex,
    i_label: usize,
    labels: &[usize],
    r: &SmoothnessVector,
    l: u32,
) -> Result<MultiIndex> {
    if r.dim() == 0 {
        return Err(Error::Precondition("embedding needs d >= 1".into()));
    }
    if l as i64 > r.get(1) {
        return Err(Error::Precondition(format!("l = {l} exceeds r_1 = {}", r.get(1))));
    }
    let face: IndexSet = labels.iter().copied().filter(|&x| x != i_label).collect();
    if face.len() + 1 != labels.len() {
        return Err(Error::Precondition(format!("{i_label} is not a label")));
    }
    let p = r.tail(1, l as i64);
    let cb = classify_dual_on(beta, &face, &p)?;
    let mut support = cb.n_set.clone();
    support.push(i_label);
    support.sort_unstable();
    if theta.len() != support.len() || theta.degree() != l {
        return Err(Error::Precondition(format!(
            "θ must be a degree-{l} index on {support:?}"
        )));
    }
    let mut alpha = vec![0u32; labels.len()];
    for (pos, lab) in labels.iter().enumerate() {
        if *lab != i_label {
            alpha[pos] = beta.0[face.iter().position(|x| x == lab).expect("label")];
        }
        if let Some(j) = support.iter().position(|x| x == lab) {
            alpha[pos] += theta.0[j];
        }
    }
    Ok(MultiIndex(alpha))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderCount {
    /// `n`: the total derivative order.
    pub order: u32,
    /// Number of derivative multi-exponents of that order.
    pub num_theta: u64,
    /// Number of multi-indices per derivative multi-exponent on one sub-simplex.
    pub per_theta: u64,
    /// Count per sub-simplex at this order.
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodimCount {
    pub codim: usize,
    pub subsimplices: u64,
    pub per_subsimplex: u64,
    pub total: u64,
    pub orders: Vec<OrderCount>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub d: usize,
    pub k: i64,
    pub r: SmoothnessVector,
    pub kind: Kind,
    pub rows: Vec<CodimCount>,
    pub total: u64,
}

impl CountTable {
    pub fn per_subsimplex(&self, codim: usize) -> u64 {
        self.rows[codim].per_subsimplex
    }
}

/// Class sizes grouped by codimension `|N|` and order `n`, by classifying
/// every multi-index.
pub fn counts_by_codim(d: usize, k: i64, r: &SmoothnessVector, kind: Kind) -> Result<CountTable> {
    if r.dim() != d {
        return Err(Error::InvalidSmoothness(format!("r has {} entries, expected {d}", r.dim())));
    }
    require_assumption(r, k)?;
    let labels = standard_labels(d + 1);
    let mut by: BTreeMap<(usize, u32), u64> = BTreeMap::new();
    for alpha in enumerate_sigma(&labels, k)? {
        let c = classify(&alpha, &labels, r, kind)?;
        *by.entry((c.s, c.n)).or_default() += 1;
    }
    let mut rows = Vec::new();
    let mut total = 0;
    for m in 0..=d {
        let subs = binomial(d as i64 + 1, m as i64);
        let mut orders = Vec::new();
        let mut per = 0;
        for (&(s, n), &cnt) in by.range((m, 0)..=(m, u32::MAX)) {
            debug_assert_eq!(s, m);
            debug_assert_eq!(cnt % subs, 0, "class sizes are symmetric over sub-simplices");
            let count = cnt / subs;
            let num_theta = if m == 0 { 1 } else { binomial(n as i64 + m as i64 - 1, m as i64 - 1) };
            orders.push(OrderCount {
                order: n,
                num_theta,
                per_theta: count / num_theta,
                count,
            });
            per += count;
        }
        total += per * subs;
        rows.push(CodimCount {
            codim: m,
            subsimplices: subs,
            per_subsimplex: per,
            total: per * subs,
            orders,
        });
    }
    Ok(CountTable {
        d,
        k,
        r: r.clone(),
        kind,
        rows,
        total,
    })
}
