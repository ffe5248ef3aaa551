//! Conforming simplicial meshes, global dimension counts and the 2D de Rham identity.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{dot, fmt_q, parse_q, sub_vec, Q};
use crate::error::{Error, Result};
use crate::fe_element::subsimplices;
use crate::geometry::{Point, Simplex};
use crate::multiindex::{assumption_violation, binomial, counts_by_codim, Kind, SmoothnessVector};

#[derive(Debug, Deserialize)]
struct RawMesh {
    dim: usize,
    vertices: Vec<Vec<serde_json::Value>>,
    cells: Vec<Vec<usize>>,
}

fn coordinate(v: &serde_json::Value) -> Result<Q> {
    match v {
        serde_json::Value::String(s) => parse_q(s),
        serde_json::Value::Number(n) if n.is_i64() => Ok(Q::from_integer(n.as_i64().expect("i64").into())),
        other => Err(Error::Parse(format!("coordinate {other} is not an integer or \"p/q\" string"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub dim: usize,
    pub vertices: Vec<Point>,
    /// Vertex ids of each cell, ascending.
    pub cells: Vec<Vec<usize>>,
    /// `faces[j]`: the distinct `j`-dimensional sub-simplices as sorted id tuples.
    faces: Vec<BTreeSet<Vec<usize>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeshInfo {
    pub dim: usize,
    /// Number of sub-simplices of each dimension `0..=dim`.
    pub counts: Vec<usize>,
    pub euler_characteristic: i64,
}

pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let raw: RawMesh = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let vertices = raw
        .vertices
        .iter()
        .map(|v| v.iter().map(coordinate).collect::<Result<Vec<Q>>>())
        .collect::<Result<Vec<_>>>()?;
    Mesh::new(raw.dim, vertices, raw.cells)
}

impl Mesh {
    pub fn new(dim: usize, vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<Self> {
        let mut cells: Vec<Vec<usize>> = cells
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        cells.sort();
        let mut mesh = Self {
            dim,
            vertices,
            cells,
            faces: Vec::new(),
        };
        mesh.validate()?;
        mesh.faces = (0..=dim).map(|_| BTreeSet::new()).collect();
        for c in &mesh.cells {
            for sub in subsimplices(dim) {
                let ids: Vec<usize> = sub.iter().map(|&i| c[i]).collect();
                mesh.faces[ids.len() - 1].insert(ids);
            }
        }
        Ok(mesh)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dim": self.dim,
            "vertices": self.vertices.iter().map(|v| v.iter().map(fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "cells": self.cells,
        })
    }

    pub fn simplex(&self, cell: usize) -> Result<Simplex> {
        let ids = self.cells[cell].clone();
        let verts = ids.iter().map(|&i| self.vertices[i].clone()).collect();
        Simplex::new(ids, verts)
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim;
        if !(1..=3).contains(&d) {
            return Err(Error::Mesh(format!("dimension {d} is not supported (1 to 3)")));
        }
        if self.cells.is_empty() {
            return Err(Error::Mesh("no cells".into()));
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if v.len() != d {
                return Err(Error::Mesh(format!("vertex {i} has {} coordinates", v.len())));
            }
        }
        let mut seen = BTreeMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if let Some(j) = seen.insert(v.clone(), i) {
                return Err(Error::Mesh(format!("vertices {j} and {i} coincide")));
            }
        }
        let mut used = vec![false; self.vertices.len()];
        for (ci, c) in self.cells.iter().enumerate() {
            if c.len() != d + 1 {
                return Err(Error::Mesh(format!("cell {ci} has {} vertices", c.len())));
            }
            if c.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Mesh(format!("cell {ci} repeats a vertex id")));
            }
            for &id in c {
                if id >= self.vertices.len() {
                    return Err(Error::Mesh(format!("cell {ci} refers to missing vertex {id}")));
                }
                used[id] = true;
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::Mesh(format!("vertex {i} belongs to no cell")));
        }
        if self.cells.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Mesh("duplicate cell".into()));
        }
        let simplices: Vec<Simplex> = (0..self.cells.len())
            .map(|i| self.simplex(i).map_err(|e| Error::Mesh(format!("cell {i}: {e}"))))
            .collect::<Result<_>>()?;

        let mut facet_cells: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for c in &self.cells {
            for skip in 0..=d {
                let f: Vec<usize> = c.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &v)| v).collect();
                *facet_cells.entry(f).or_default() += 1;
            }
        }
        if let Some((f, n)) = facet_cells.iter().find(|(_, &n)| n > 2) {
            return Err(Error::Mesh(format!("facet {f:?} is shared by {n} cells")));
        }

        for (ci, s) in simplices.iter().enumerate() {
            for (vi, v) in self.vertices.iter().enumerate() {
                if self.cells[ci].contains(&vi) {
                    continue;
                }
                let lam = s.barycentric(v)?;
                if lam.iter().all(|x| *x >= Q::zero()) {
                    return Err(Error::Mesh(format!("vertex {vi} lies in the closure of cell {ci}")));
                }
            }
        }
        for a in 0..simplices.len() {
            for b in a + 1..simplices.len() {
                if interiors_overlap(&simplices[a], &simplices[b]) {
                    return Err(Error::Mesh(format!("cells {a} and {b} overlap")));
                }
            }
        }
        Ok(())
    }

    /// Number of sub-simplices of each dimension.
    pub fn counts(&self) -> Vec<usize> {
        self.faces.iter().map(BTreeSet::len).collect()
    }

    pub fn faces(&self, dim: usize) -> &BTreeSet<Vec<usize>> {
        &self.faces[dim]
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts()
            .iter()
            .enumerate()
            .map(|(j, &c)| if j % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    pub fn info(&self) -> MeshInfo {
        MeshInfo {
            dim: self.dim,
            counts: self.counts(),
            euler_characteristic: self.euler_characteristic(),
        }
    }
}

/// Candidate separating directions for two simplices of dimension ≤ 3.
fn separating_axes(a: &Simplex, b: &Simplex) -> Vec<Vec<Q>> {
    let d = a.dim();
    let mut axes: Vec<Vec<Q>> = Vec::new();
    for s in [a, b] {
        for i in 0..=d {
            axes.push(s.grad(i).to_vec());
        }
    }
    if d == 3 {
        let edges = |s: &Simplex| {
            let mut out = Vec::new();
            for i in 0..4 {
                for j in i + 1..4 {
                    out.push(sub_vec(s.vertex(j), s.vertex(i)));
                }
            }
            out
        };
        for u in edges(a) {
            for v in edges(b) {
                let c = vec![
                    &u[1] * &v[2] - &u[2] * &v[1],
                    &u[2] * &v[0] - &u[0] * &v[2],
                    &u[0] * &v[1] - &u[1] * &v[0],
                ];
                if c.iter().any(|x| !x.is_zero()) {
                    axes.push(c);
                }
            }
        }
    }
    axes
}

/// Open interiors intersect; touching along shared boundary does not count.
fn interiors_overlap(a: &Simplex, b: &Simplex) -> bool {
    let range = |s: &Simplex, axis: &[Q]| {
        let p: Vec<Q> = s.vertices().iter().map(|v| dot(v, axis)).collect();
        let lo = p.iter().min().expect("vertices").clone();
        let hi = p.iter().max().expect("vertices").clone();
        (lo, hi)
    };
    separating_axes(a, b).iter().all(|axis| {
        let (alo, ahi) = range(a, axis);
        let (blo, bhi) = range(b, axis);
        ahi > blo && bhi > alo
    })
}

/// Global dimension of the conforming space: the per-sub-simplex class counts
/// times the number of sub-simplices of each dimension.
pub fn global_dim(mesh: &Mesh, r: &SmoothnessVector, k: u32) -> Result<u64> {
    let table = counts_by_codim(mesh.dim, k as i64, r, Kind::Primal)?;
    let counts = mesh.counts();
    Ok((0..=mesh.dim)
        .map(|m| table.per_subsimplex(m) * counts[mesh.dim - m] as u64)
        .sum())
}

/// Per-vertex, per-edge and per-cell counts of the 2D element in closed form.
pub fn closed_form_2d(r: &SmoothnessVector, k: u32) -> Result<(u64, u64, u64)> {
    if r.dim() != 2 {
        return Err(Error::InvalidSmoothness("closed form needs two entries".into()));
    }
    let (r1, r2, k) = (r.get(1), r.get(2), k as i64);
    let a_v = binomial(r2 + 2, 2) as i64;
    let a_e = if r1 < 0 {
        0
    } else {
        (k - 2 * r2 - 1) * (r1 + 1) + binomial(r1 + 1, 2) as i64
    };
    let interior = binomial(k + 2, 2) as i64 - 3 * a_v - 3 * a_e;
    Ok((a_v as u64, a_e as u64, interior as u64))
}

pub fn global_dim_closed_form_2d(mesh: &Mesh, r: &SmoothnessVector, k: u32) -> Result<u64> {
    if mesh.dim != 2 {
        return Err(Error::Mesh("closed form applies to 2D meshes".into()));
    }
    let (a_v, a_e, a_f) = closed_form_2d(r, k)?;
    let c = mesh.counts();
    Ok(a_v * c[0] as u64 + a_e * c[1] as u64 + a_f * c[2] as u64)
}

#[derive(Debug, Clone, Serialize)]
pub struct DerhamLeg {
    pub name: &'static str,
    pub r: SmoothnessVector,
    pub k: u32,
    pub dim: u64,
    /// Copies of the space in the sequence (`2` for the vector-valued middle space).
    pub multiplicity: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DerhamReport {
    pub legs: Vec<DerhamLeg>,
    /// `D(r,k) - 2 D(r',k-1) + D(r'',k-2)`.
    pub alternating_sum: i64,
    pub euler_characteristic: i64,
    pub matches: bool,
}

/// The dimension count of the 2D complex `C^r -> (C^{r-1})^2 -> C^{r-2}`.
pub fn derham_check(mesh: &Mesh, r: &SmoothnessVector, k: u32) -> Result<DerhamReport> {
    if mesh.dim != 2 {
        return Err(Error::Mesh("the de Rham count is defined for 2D meshes".into()));
    }
    if r.dim() != 2 {
        return Err(Error::InvalidSmoothness(format!("r has {} entries, expected 2", r.dim())));
    }
    if k < 2 {
        return Err(Error::Precondition("k must be at least 2".into()));
    }
    let mut legs = Vec::new();
    for (name, shift, mult) in [("r", 0i64, 1u64), ("r'", 1, 2), ("r''", 2, 1)] {
        let rs = SmoothnessVector::new(r.shifted(shift).0).map_err(|e| {
            Error::Precondition(format!("leg {name}: {e}"))
        })?;
        let ks = k - shift as u32;
        if let Some(reason) = assumption_violation(&rs, ks as i64) {
            return Err(Error::Assumption {
                r: rs.0.clone(),
                k: ks as i64,
                reason: format!("leg {name}: {reason}"),
            });
        }
        let dim = global_dim(mesh, &rs, ks)?;
        legs.push(DerhamLeg {
            name,
            r: rs,
            k: ks,
            dim,
            multiplicity: mult,
        });
    }
    let alternating_sum = legs[0].dim as i64 - 2 * legs[1].dim as i64 + legs[2].dim as i64;
    let euler_characteristic = mesh.euler_characteristic();
    Ok(DerhamReport {
        legs,
        alternating_sum,
        euler_characteristic,
        matches: alternating_sum == euler_characteristic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQUARE2: &str = r#"{"dim":2,"vertices":[[0,0],[1,0],[1,1],[0,1]],"cells":[[0,1,2],[0,2,3]]}"#;

    fn grid(n: usize) -> Mesh {
        let mut verts = Vec::new();
        for j in 0..=n {
            for i in 0..=n {
                verts.push(vec![Q::from_integer((i as i64).into()), Q::from_integer((j as i64).into())]);
            }
        }
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut cells = Vec::new();
        for j in 0..n {
            for i in 0..n {
                cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                cells.push(vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        Mesh::new(2, verts, cells).unwrap()
    }

    fn sv(v: &[i64]) -> SmoothnessVector {
        SmoothnessVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn parse_square_and_tet() {
        let m = parse_mesh(SQUARE2).unwrap();
        assert_eq!(m.counts(), vec![4, 5, 2]);
        assert_eq!(m.euler_characteristic(), 1);
        let tet = parse_mesh(r#"{"dim":3,"vertices":[["0","0","0"],["1","0","0"],["0","1","0"],["0","0","1/2"]],"cells":[[3,2,1,0]]}"#).unwrap();
        assert_eq!(tet.counts(), vec![4, 6, 4, 1]);
        assert_eq!(tet.to_json()["vertices"][3][2], "1/2");
    }

    #[test]
    fn rejects_bad_meshes() {
        let cases = [
            (r#"{"dim":2,"vertices":[[0,0],[2,0],[0,2],[1,1],[2,2]],"cells":[[0,1,2],[1,3,4]]}"#, "closure"),
            (r#"{"dim":2,"vertices":[[0,0],[6,0],[3,6],[0,4],[6,4],[3,-2]],"cells":[[0,1,2],[3,4,5]]}"#, "overlap"),
            (r#"{"dim":2,"vertices":[[0,0],[1,0],[2,0]],"cells":[[0,1,2]]}"#, "degenerate"),
            (r#"{"dim":2,"vertices":[[0,0],[1,0],[0,1],[0,0]],"cells":[[0,1,2],[1,2,3]]}"#, "coincide"),
            (r#"{"dim":2,"vertices":[[0,0],[1,0],[0,1]],"cells":[[0,1,5]]}"#, "missing"),
            (r#"{"dim":2,"vertices":[[0,0],[1,0],[0,1]],"cells":[[0,1,2],[2,1,0]]}"#, "duplicate"),
            (r#"{"dim":2,"vertices":[[0,0],[1,0],[0,1],[0,-1],[1,2]],"cells":[[0,1,2],[0,1,3],[0,1,4]]}"#, "shared by 3"),
        ];
        for (text, what) in cases {
            let err = parse_mesh(text).unwrap_err().to_string();
            assert!(err.contains(what), "{what}: {err}");
        }
    }

    #[test]
    fn overlapping_tetrahedra() {
        let text = r#"{"dim":3,"vertices":[[0,0,0],[4,0,0],[0,4,0],[0,0,4],[1,1,1],[5,1,1],[1,5,1],[1,1,5]],"cells":[[0,1,2,3],[4,5,6,7]]}"#;
        assert!(parse_mesh(text).is_err());
        let ok = r#"{"dim":3,"vertices":[[0,0,0],[1,0,0],[0,1,0],[0,0,1],[1,1,1]],"cells":[[0,1,2,3],[1,2,3,4]]}"#;
        assert_eq!(parse_mesh(ok).unwrap().counts(), vec![5, 9, 7, 2]);
    }

    #[test]
    fn global_dims_on_square() {
        let m = parse_mesh(SQUARE2).unwrap();
        assert_eq!(global_dim(&m, &sv(&[1, 2]), 5).unwrap(), 29);
        assert_eq!(global_dim(&m, &sv(&[0, 1]), 4).unwrap(), 23);
        assert_eq!(global_dim(&m, &sv(&[-1, 0]), 3).unwrap(), 18);
        let tri = parse_mesh(r#"{"dim":2,"vertices":[[0,0],[1,0],[0,1]],"cells":[[0,1,2]]}"#).unwrap();
        assert_eq!(global_dim(&tri, &sv(&[2, 4]), 9).unwrap(), 55);
    }

    #[test]
    fn closed_form_agrees_with_class_counts() {
        let meshes = [parse_mesh(SQUARE2).unwrap(), grid(2), grid(3)];
        for (r, k) in [(vec![1, 2], 5), (vec![1, 2], 6), (vec![2, 4], 9), (vec![2, 4], 10), (vec![0, 1], 4), (vec![-1, 0], 3), (vec![0, 0], 2), (vec![1, 3], 8)] {
            for m in &meshes {
                assert_eq!(
                    global_dim_closed_form_2d(m, &sv(&r), k).unwrap(),
                    global_dim(m, &sv(&r), k).unwrap(),
                    "{r:?} {k}"
                );
            }
        }
    }

    #[test]
    fn derham_identity() {
        let m = parse_mesh(SQUARE2).unwrap();
        let rep = derham_check(&m, &sv(&[1, 2]), 5).unwrap();
        let dims: Vec<u64> = rep.legs.iter().map(|l| l.dim).collect();
        assert_eq!(dims, vec![29, 23, 18]);
        assert_eq!(rep.alternating_sum, 1);
        assert!(rep.matches);
        for (r, k) in [(vec![1, 2], 5), (vec![1, 2], 6), (vec![2, 4], 9), (vec![2, 4], 10)] {
            let rep = derham_check(&grid(2), &sv(&r), k).unwrap();
            assert_eq!((rep.alternating_sum, rep.euler_characteristic), (1, 1));
        }
        let err = derham_check(&m, &sv(&[0, 0]), 2).unwrap_err().to_string();
        assert!(err.contains("leg r''"), "{err}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn order_independent(seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let base = grid(2);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut cells = base.cells.clone();
            cells.shuffle(&mut rng);
            for c in cells.iter_mut() {
                c.shuffle(&mut rng);
            }
            let again = Mesh::new(2, base.vertices.clone(), cells).unwrap();
            prop_assert_eq!(&again, &base);
            let round = parse_mesh(&again.to_json().to_string()).unwrap();
            prop_assert_eq!(round, base);
        }
    }
}
