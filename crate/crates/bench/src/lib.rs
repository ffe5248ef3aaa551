//! Benchmark fixtures shared by the criterion targets.

use crfem::{Simplex, SmoothnessVector};

pub fn config(r: &[i64], k: u32) -> (Simplex, SmoothnessVector, u32) {
    let r = SmoothnessVector::new(r.to_vec()).expect("valid smoothness vector");
    (Simplex::reference(r.dim()), r, k)
}
