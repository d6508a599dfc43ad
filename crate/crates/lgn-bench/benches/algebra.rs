use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lgn_bench::algebra;
use lgn_core::corpus::{random_element, random_word};
use lgn_core::lgn::{defining_relations, evaluate_relation, normal_form};
use lgn_core::torus::composition_series_report;
use lgn_core::Mode;

fn rewriting(c: &mut Criterion) {
    let mut g = c.benchmark_group("normal_form");
    for (gg, n) in [(0, 1), (1, 0), (2, 0)] {
        let alg = algebra(gg, n, Mode::Generic);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let words: Vec<_> = (0..32).map(|_| random_word(&mut rng, alg.surface(), 6)).collect();
        g.bench_function(format!("words_len6_{gg}_{n}"), |b| {
            b.iter(|| {
                for w in &words {
                    black_box(normal_form(&alg, w).unwrap());
                }
            })
        });
    }
    g.finish();
}

fn multiplication(c: &mut Criterion) {
    let mut g = c.benchmark_group("mul");
    for mode in [Mode::Generic, Mode::Restricted(3)] {
        let alg = algebra(1, 1, mode);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pairs: Vec<_> = (0..16)
            .map(|_| {
                (
                    random_element(&mut rng, &alg, 3, 3).unwrap(),
                    random_element(&mut rng, &alg, 3, 3).unwrap(),
                )
            })
            .collect();
        g.bench_function(format!("elements_(1,1)_{mode}"), |b| {
            b.iter(|| {
                for (x, y) in &pairs {
                    black_box(x.mul(y).unwrap());
                }
            })
        });
    }
    g.finish();
}

fn relations(c: &mut Criterion) {
    let alg = algebra(1, 0, Mode::Generic);
    let rels = defining_relations(alg.surface(), Mode::Generic).unwrap();
    c.bench_function("relations_(1,0)", |b| {
        b.iter(|| {
            for r in &rels {
                black_box(evaluate_relation(&alg, r).unwrap());
            }
        })
    });
}

fn torus(c: &mut Criterion) {
    c.bench_function("torus_report_p3", |b| {
        b.iter(|| black_box(composition_series_report(3).unwrap()))
    });
}

criterion_group!(benches, rewriting, multiplication, relations, torus);
criterion_main!(benches);
