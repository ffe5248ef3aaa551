use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crfem::arith::Rationals;
use crfem::dof::vandermonde;
use crfem::multiindex::{counts_by_codim, sigma};
use crfem::{continuity_trials, CartesianPoly, Family, FeElement, InterpElement, Kind, Mode, Patch};
use crfem_bench::config;

fn construction(c: &mut Criterion) {
    let mut g = c.benchmark_group("construct");
    for (r, k) in [(vec![1, 2], 5), (vec![2, 4], 9), (vec![1, 2, 4], 9)] {
        let (s, r, k) = config(&r, k);
        let id = format!("{r}/{k}");
        g.bench_with_input(BenchmarkId::new("fe", &id), &(), |b, _| {
            b.iter(|| FeElement::new(s.clone(), r.clone(), k).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("interp", &id), &(), |b, _| {
            b.iter(|| InterpElement::new(s.clone(), r.clone(), k).unwrap())
        });
    }
    g.finish();
}

fn unisolvency(c: &mut Criterion) {
    let mut g = c.benchmark_group("unisolvency");
    g.sample_size(10);
    for (r, k, mode) in [(vec![2, 4], 9, Mode::Exact), (vec![1, 2, 4], 9, Mode::Exact), (vec![2, 4, 8], 17, Mode::Modular)] {
        let (s, r, k) = config(&r, k);
        let fe = FeElement::new(s, r.clone(), k).unwrap();
        g.bench_function(format!("fe {r}/{k} {mode:?}"), |b| b.iter(|| fe.check_unisolvent(mode, 1).unwrap()));
    }
    g.finish();
}

fn rows_and_counts(c: &mut Criterion) {
    let (s, r, k) = config(&[1, 2, 4], 9);
    let el = InterpElement::new(s, r, k).unwrap();
    c.bench_function("vandermonde interp (1,2,4)/9", |b| b.iter(|| vandermonde(&Rationals, 3, 9, &el.functionals).unwrap()));
    let r = crfem::SmoothnessVector::new(vec![4, 8, 16]).unwrap();
    c.bench_function("counts (4,8,16)/33", |b| b.iter(|| counts_by_codim(3, 33, &r, Kind::Primal).unwrap()));
    c.bench_function("sigma(4, 33)", |b| b.iter(|| sigma(4, 33).len()));
}

fn patches(c: &mut Criterion) {
    let mut g = c.benchmark_group("continuity");
    g.sample_size(10);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let patch = Patch::random(2, &mut rng);
    let (_, r, k) = config(&[1, 2], 5);
    for family in [Family::Fe, Family::Interp] {
        g.bench_function(format!("{family:?} (1,2)/5 x5"), |b| {
            b.iter(|| continuity_trials(&patch, &r, k, family, 5, 3).unwrap())
        });
    }
    let s = patch.plus.clone();
    let u = CartesianPoly::random(2, 9, &mut rng);
    g.bench_function("to_bary degree 9", |b| b.iter(|| u.to_bary(&s).unwrap()));
    g.finish();
}

criterion_group!(benches, construction, unisolvency, rows_and_counts, patches);
criterion_main!(benches);
