use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use serrelab_core::dsl::{elaborate, parse, parse_word};
use serrelab_core::stallings::fold;
use serrelab_core::towers::separation_experiment;
use serrelab_core::words::are_conjugate;
use serrelab_core::Alphabet;

const DOC: &str = "
alphabet F { x, y }
graph H { vertex F = free F; edge t : F.([x, y]) -- F.([x, y]); }
tower T { base F; level abelian attach [x, y] rank 1 names (c, t); }
";

fn words(c: &mut Criterion) {
    let f = Alphabet::new("F", ["a", "b"]).unwrap();
    let u = parse_word(&f, "(a b^-1 a^2 b^3 a^-1 b)^12 a^5 b").unwrap();
    let x = parse_word(&f, "(b a^-2)^9 b^4").unwrap();
    let v = u.conjugate_by(&x).unwrap();
    c.bench_function("free conjugacy, length 120", |b| b.iter(|| are_conjugate(black_box(&u), black_box(&v), true)));
    let big = parse_word(&f, "a^123456789012345678901234567890 b a^-98765432109876543210 b^-1").unwrap();
    let bigx = big.conjugate_by(&x).unwrap();
    c.bench_function("free conjugacy, huge exponents", |b| b.iter(|| are_conjugate(black_box(&bigx), black_box(&big), false)));
}

fn stallings(c: &mut Criterion) {
    let f = Alphabet::new("F", ["a", "b"]).unwrap();
    let gens: Vec<_> = ["a^3 b a^-1 b^2", "b^-2 a^-1 b^2 a", "(a b)^5 a^-3", "b a^4 b^-1 a^-2 b^3"]
        .iter()
        .map(|s| parse_word(&f, s).unwrap())
        .collect();
    c.bench_function("fold four generators", |b| b.iter(|| fold(&f, black_box(&gens))));
    let h = fold(&f, &gens).unwrap();
    c.bench_function("malnormality", |b| b.iter(|| black_box(&h).malnormality()));
}

fn graphs_of_groups(c: &mut Criterion) {
    let ws = elaborate(&parse(DOC).unwrap()).unwrap();
    let g = &ws.graphs["H"];
    let p = &g.presentation().alphabet;
    let el = |s: &str| g.word_to_loop(&parse_word(p, s).unwrap()).unwrap();
    let (u, x) = (el("t x y t^-1 x^2 t y^-1"), el("x t y^2 t^-1"));
    let v = g.conjugate_path(&u, &x);
    c.bench_function("hnn conjugacy", |b| b.iter(|| g.are_conjugate(black_box(&v), black_box(&u), false)));
}

fn towers(c: &mut Criterion) {
    let ws = elaborate(&parse(DOC).unwrap()).unwrap();
    let t = &ws.towers["T"];
    let p = t.top().presentation().alphabet.clone();
    let set: Vec<_> = ["x t x t^-1", "y t^2", "x y t^-1", "t x^2 y"]
        .iter()
        .map(|s| t.element(&parse_word(&p, s).unwrap()).unwrap())
        .collect();
    c.bench_function("separation scan, N up to 16", |b| b.iter(|| separation_experiment(t, black_box(&set), 16, &[0], "bench", 0)));
}

criterion_group!(benches, words, stallings, graphs_of_groups, towers);
criterion_main!(benches);
