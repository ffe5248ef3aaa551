//! One pass/fail line per acceptance criterion. Exits nonzero if any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crfem::arith::{q, random_q, Rationals};
use crfem::dof::{apply_rows, vandermonde};
use crfem::fe_element::block_triangularity;
use crfem::mesh::derham_check;
use crfem::multiindex::sigma;
use crfem::partition::partition_suite;
use crfem::polynomial::finite_difference_check;
use crfem::{
    continuity_trials, parse_mesh, BaryPoly, CartesianPoly, Family, FeElement, InterpElement, Mode, Patch, Simplex,
    SmoothnessVector, Q,
};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures");

fn sv(v: &[i64]) -> SmoothnessVector {
    SmoothnessVector::new(v.to_vec()).unwrap()
}

fn battery() -> Vec<(usize, SmoothnessVector, u32)> {
    vec![(1, sv(&[1]), 3), (2, sv(&[1, 2]), 5), (2, sv(&[2, 4]), 9), (3, sv(&[1, 2, 4]), 9)]
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn golden_counts() -> Outcome {
    let out = crfem_cli::run(["crfem", "counts", "--d", "3", "--k", "33", "--r", "4,8,16"]);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    let rows = v["result"]["rows"].as_array().unwrap();
    let totals: Vec<u64> = rows.iter().map(|r| r["total"].as_u64().unwrap()).collect();
    let series: Vec<u64> = rows[1]["orders"].as_array().unwrap().iter().map(|o| o["count"].as_u64().unwrap()).collect();
    let total = v["result"]["total"].as_u64().unwrap();
    outcome(
        out.code == 0 && totals == [544, 1280, 1440, 3876] && total == 7140 && series == [28, 45, 63, 82, 102],
        format!("interior/face/edge/vertex {totals:?}, total {total}, face series {series:?}"),
    )
}

fn simplices(d: usize, rng: &mut ChaCha8Rng) -> Vec<Simplex> {
    let mut out = vec![Simplex::reference(d)];
    out.extend((0..3).map(|_| Simplex::random(d, rng)));
    out
}

fn unisolvency_exact() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    for (d, r, k) in battery() {
        for s in simplices(d, &mut rng) {
            let fe = FeElement::new(s.clone(), r.clone(), k).unwrap().check_unisolvent(Mode::Exact, 0).unwrap();
            let ip = InterpElement::new(s, r.clone(), k).unwrap().check_unisolvent(Mode::Exact, 0).unwrap();
            let nonzero = |c: &crfem::Certificate| c.nonsingular && c.determinant.as_deref().is_some_and(|x| x != "0");
            if !nonzero(&fe) || !nonzero(&ip) {
                return outcome(false, format!("singular at d={d} r={r} k={k}"));
            }
            checked += 2;
        }
    }
    outcome(true, format!("{checked} exact determinants nonzero"))
}

fn large_modular() -> Outcome {
    let r = sv(&[2, 4, 8]);
    let s = Simplex::reference(3);
    let fe = FeElement::new(s.clone(), r.clone(), 17).unwrap().check_unisolvent(Mode::Modular, 1).unwrap();
    let ip = InterpElement::new(s, r, 17).unwrap().check_unisolvent(Mode::Modular, 1).unwrap();
    outcome(
        fe.nonsingular && ip.nonsingular && fe.size == 1140 && fe.rank == 1140 && ip.rank == 1140,
        format!("fe rank {}/{} mod {:?}, interp rank {}/{} mod {:?}", fe.rank, fe.size, fe.primes, ip.rank, ip.size, ip.primes),
    )
}

fn triangularity() -> Outcome {
    let rep = block_triangularity(&Simplex::reference(2), &sv(&[2, 4]), 9).unwrap();
    outcome(
        rep.ok(),
        format!(
            "{} classes, {} predicted zero blocks, {} violations, diagonal Gram blocks {}",
            rep.classes.len(),
            rep.zero_blocks,
            rep.violations.len(),
            if rep.diagonal_matches && rep.gram_positive_definite { "match" } else { "differ" }
        ),
    )
}

fn continuity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut lines = Vec::new();
    for (d, r, k) in battery() {
        let patch = Patch::random(d, &mut rng);
        for family in [Family::Fe, Family::Interp] {
            let rep = continuity_trials(&patch, &r, k, family, 20, 100 + d as u64).unwrap();
            if !rep.continuous() || !rep.sharp() {
                return outcome(false, format!("{family:?} d={d} r={r} k={k}: {:?}", rep.first_failure));
            }
            let last = rep.orders.last().unwrap();
            lines.push(format!("{r}/{k} {family:?} {}/20 zero at order {}", last.zero_trials, last.order));
        }
    }
    outcome(true, format!("zero jumps up to r_1 in all trials; {}", lines.join(", ")))
}

fn reproduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut total = 0;
    for (d, r, k) in battery() {
        let el = InterpElement::new(Simplex::random(d, &mut rng), r.clone(), k).unwrap();
        let rows = vandermonde(&Rationals, d, k, &el.functionals).unwrap();
        let solver = el.solver().unwrap();
        let labels: Vec<usize> = (0..=d).collect();
        for _ in 0..100 {
            let u = BaryPoly::from_terms(labels.clone(), k, sigma(d + 1, k).into_iter().map(|a| (a, random_q(&mut rng, 50)))).unwrap();
            if solver.solve(&apply_rows(&rows, &u.coefficients())).unwrap() != u {
                return outcome(false, format!("I_K u != u at d={d} r={r} k={k}"));
            }
            total += 1;
        }
        let patch = Patch::random(d, &mut rng);
        let rep = continuity_trials(&patch, &r, k, Family::Interp, 5, 7).unwrap();
        if !rep.continuous() {
            return outcome(false, format!("degree k+2 interpolant jumps at d={d} r={r} k={k}: {:?}", rep.first_failure));
        }
    }
    outcome(true, format!("{total} exact reproductions; degree k+2 patch interpolants C^(r_1)"))
}

fn partition() -> Outcome {
    let mut cases = 0;
    for (_, r, _) in battery() {
        let kmin = 2 * r.get(r.dim()) as u32 + 1;
        for k in kmin..=kmin + 2 {
            let rep = partition_suite(&r, k).unwrap();
            if let Some(c) = rep.checks.iter().find(|c| !c.ok()) {
                return outcome(false, format!("r={r} k={k} {}: {}", c.name, c.witness.clone().unwrap_or_default()));
            }
            cases += rep.checks.iter().map(|c| c.cases).sum::<usize>();
        }
    }
    outcome(true, format!("{cases} cases across uniqueness, partition, bijection and embedding checks"))
}

fn derham() -> Outcome {
    let mut details = Vec::new();
    for name in ["square2.json", "square8.json", "lshape.json"] {
        let mesh = parse_mesh(&std::fs::read_to_string(format!("{FIXTURES}/{name}")).unwrap()).unwrap();
        for (r, k) in [(sv(&[1, 2]), 5), (sv(&[2, 4]), 9)] {
            let rep = derham_check(&mesh, &r, k).unwrap();
            let dims: Vec<u64> = rep.legs.iter().map(|l| l.dim).collect();
            if !rep.matches || rep.alternating_sum != 1 {
                return outcome(false, format!("{name} r={r} k={k}: dims {dims:?}, sum {}", rep.alternating_sum));
            }
            if name == "square2.json" && k == 5 && dims != [29, 23, 18] {
                return outcome(false, format!("square dims {dims:?}"));
            }
            details.push(format!("{name} {dims:?}"));
        }
    }
    outcome(true, format!("alternating sum 1 = V-E+F on every mesh; {}", details.join(", ")))
}

fn finite_differences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let s = Simplex::random(3, &mut rng);
    let polys: Vec<BaryPoly> = (0..10).map(|_| CartesianPoly::random(3, 4, &mut rng).to_bary(&s).unwrap()).collect();
    let points: Vec<Vec<Q>> = (0..5)
        .map(|_| {
            let w: Vec<Q> = (0..4).map(|_| q(rng.random_range(1..=9))).collect();
            let sum: Q = w.iter().cloned().sum();
            w.into_iter().map(|x| x / &sum).collect()
        })
        .collect();
    let dirs: Vec<Vec<Q>> = (0..3).map(|_| (0..3).map(|_| random_q(&mut rng, 3)).collect()).collect();
    let rep = finite_difference_check(&s, &polys, &dirs, &points, 1e-4).unwrap();
    outcome(
        rep.max_relative_error <= 1e-6,
        format!("{} samples, max relative error {:.2e}", rep.samples, rep.max_relative_error),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("golden counts", Duration::from_secs(10), golden_counts),
        ("unisolvency battery (exact)", Duration::from_secs(120), unisolvency_exact),
        ("large smoke (modular)", Duration::from_secs(600), large_modular),
        ("block triangularity", Duration::from_secs(300), triangularity),
        ("continuity patch tests", Duration::from_secs(300), continuity),
        ("interpolation reproduction and smoothness", Duration::from_secs(300), reproduction),
        ("bijection/partition suite", Duration::from_secs(180), partition),
        ("de Rham dimension identity", Duration::from_secs(60), derham),
        ("finite difference cross-check", Duration::from_secs(10), finite_differences),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let ok = out.ok && elapsed <= *limit;
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name} ({:.2}s, limit {}s): {}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs(),
            out.detail
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
