use std::collections::HashMap;

use super::*;
use crate::homs::FreeHom;
use crate::words::{commutator, Word};

fn free(name: &str, gens: &[&str]) -> VertexGroup {
    VertexGroup::Free(Alphabet::new(name, gens.iter().copied()).unwrap())
}

fn word(g: &VertexGroup, s: &[(usize, i64)]) -> Element {
    Element::Free(Word::from_syllables(g.names(), s.iter().map(|&(i, e)| (i, e.into()))))
}

/// F(x, y) with a stable letter `t` commuting with `w`.
fn hnn(w: &[(usize, i64)]) -> GraphOfGroups {
    let f = free("F", &["x", "y"]);
    let w = word(&f, w);
    GraphOfGroups::new(
        "H",
        vec![Vertex { name: "F".into(), group: f }],
        vec![Edge {
            name: "t".into(),
            from: EdgeEnd { vertex: 0, attach: w.clone() },
            to: EdgeEnd { vertex: 0, attach: w },
            tree: false,
            trivial: false,
        }],
        0,
    )
    .unwrap()
}

fn amalgam() -> GraphOfGroups {
    let a = free("A", &["a", "b"]);
    let c = free("C", &["c", "d"]);
    let ea = a.generator(0);
    let ec = c.generator(0);
    GraphOfGroups::new(
        "AC",
        vec![Vertex { name: "A".into(), group: a }, Vertex { name: "C".into(), group: c }],
        vec![Edge {
            name: "e".into(),
            from: EdgeEnd { vertex: 0, attach: ea },
            to: EdgeEnd { vertex: 1, attach: ec },
            tree: true,
            trivial: false,
        }],
        0,
    )
    .unwrap()
}

fn loop_of(g: &GraphOfGroups, s: &str) -> PathWord {
    let p = g.presentation();
    let names: Vec<&str> = p.alphabet.generators().iter().map(String::as_str).collect();
    let mut syl = Vec::new();
    for tok in s.split_whitespace() {
        let (n, e) = match tok.split_once('^') {
            Some((n, e)) => (n, e.parse::<i64>().unwrap()),
            None => (tok, 1),
        };
        syl.push((names.iter().position(|&m| m == n).unwrap(), e.into()));
    }
    g.word_to_loop(&Word::from_syllables(&p.alphabet, syl)).unwrap()
}

const COMM: &[(usize, i64)] = &[(0, 1), (1, 1), (0, -1), (1, -1)];

#[test]
fn validation() {
    assert!(hnn(COMM).vertices().len() == 1);
    let f = free("F", &["x", "y"]);
    let err = GraphOfGroups::new(
        "bad",
        vec![Vertex { name: "F".into(), group: f.clone() }],
        vec![Edge {
            name: "t".into(),
            from: EdgeEnd { vertex: 0, attach: f.identity() },
            to: EdgeEnd { vertex: 0, attach: f.generator(0) },
            tree: false,
            trivial: false,
        }],
        0,
    )
    .unwrap_err();
    assert!(err.to_string().contains("edge `t`"));
    let err = GraphOfGroups::new(
        "disconnected",
        vec![Vertex { name: "A".into(), group: f.clone() }, Vertex { name: "B".into(), group: free("G", &["p"]) }],
        vec![],
        0,
    )
    .unwrap_err();
    assert!(err.to_string().contains("disconnected"));
}

#[test]
fn britton_pinches() {
    let g = hnn(COMM);
    let w3 = loop_of(&g, "x y x^-1 y^-1 x y x^-1 y^-1 x y x^-1 y^-1");
    let pinched = loop_of(&g, "t^-1 x y x^-1 y^-1 x y x^-1 y^-1 x y x^-1 y^-1 t");
    assert_eq!(pinched.syllable_length(), 0);
    assert!(g.paths_equal(&pinched, &w3));

    let stuck = loop_of(&g, "t^-1 x t");
    assert_eq!(stuck.syllable_length(), 2);
    assert_eq!(g.normal_form(&stuck), stuck);

    let prod = g.concat(&loop_of(&g, "t^-1 x t"), &loop_of(&g, "t^-1 y t"));
    assert_eq!(g.normal_form(&prod), loop_of(&g, "t^-1 x y t"));
}

#[test]
fn presentations() {
    let g = amalgam();
    let p = g.presentation();
    assert_eq!(p.alphabet.generators(), &["a", "b", "c", "d"]);
    assert_eq!(p.relators.len(), 1);
    assert_eq!(p.relators[0].to_string(), "a c^-1");

    let h = hnn(COMM);
    let p = h.presentation();
    assert_eq!(p.alphabet.generators(), &["x", "y", "t"]);
    let t = Word::generator(&p.alphabet, 2);
    let w = h.element_word(0, &h.edges()[0].from.attach);
    assert_eq!(p.relators, vec![commutator(&t, &w).unwrap()]);
}

#[test]
fn loops_round_trip() {
    let g = amalgam();
    let p = g.presentation();
    let w = Word::from_syllables(&p.alphabet, [(0, 2.into()), (3, 1.into()), (1, (-1).into()), (2, 1.into())]);
    let l = g.word_to_loop(&w).unwrap();
    let back = g.loop_to_word(&l).unwrap();
    assert!(g.paths_equal(&g.word_to_loop(&back).unwrap(), &l));
    // `a = c` in the amalgam.
    assert!(g.word_is_trivial(&Word::from_syllables(&p.alphabet, [(0, 1.into()), (2, (-1).into())])).unwrap());
}

#[test]
fn classification() {
    let g = hnn(COMM);
    assert!(matches!(g.classify(&loop_of(&g, "t^-1 x y x^-1 y^-1 t")), Classification::Elliptic { .. }));
    assert!(matches!(g.classify(&loop_of(&g, "t x")), Classification::Hyperbolic { .. }));
    assert!(matches!(g.classify(&loop_of(&g, "t^-1 x t y")), Classification::Hyperbolic { .. }));
    // y is outside the edge group, but the loop is conjugate to y itself.
    let y = Element::Free(Word::generator(g.group(0).names(), 1));
    assert_eq!(g.classify(&loop_of(&g, "x t y t^-1 x^-1")), Classification::Elliptic { vertex: 0, element: y });
}

#[test]
fn conjugacy_examples() {
    let g = hnn(&[(0, 1), (1, 1)]);
    let left = loop_of(&g, "t x t^-1");
    let right = loop_of(&g, "x y x y^-1 x^-1");
    let r = g.are_conjugate(&left, &right, false).unwrap();
    assert!(r.conjugate);
    let x = r.certificate.unwrap();
    assert!(g.paths_equal(&g.conjugate_path(&right, &x), &left));
    // t·w⁻¹ is one valid conjugator.
    let tw = loop_of(&g, "t y^-1 x^-1");
    assert!(g.paths_equal(&g.conjugate_path(&right, &tw), &left));

    let h = hnn(COMM);
    let a = loop_of(&h, "x t y^2 t^-1 x^-1 t");
    let c = loop_of(&h, "y x t^-1");
    let conj = g_conj(&h, &a, &c);
    let r = h.are_conjugate(&conj, &a, false).unwrap();
    assert!(r.conjugate);

    assert!(!h.are_conjugate(&loop_of(&h, "x"), &loop_of(&h, "y"), false).unwrap().conjugate);
    assert!(!h.are_conjugate(&loop_of(&h, "x"), &loop_of(&h, "t x"), true).unwrap().conjugate);
    let r = h.are_conjugate(&loop_of(&h, "x^-1"), &loop_of(&h, "t x t^-1"), true).unwrap();
    assert!(r.conjugate && r.inverse);
}

fn g_conj(g: &GraphOfGroups, p: &PathWord, x: &PathWord) -> PathWord {
    g.conjugate_path(p, x)
}

#[test]
fn amalgam_elliptic_orbit() {
    let g = amalgam();
    // a lives in A, c in C, and they are identified.
    let a = loop_of(&g, "a^3");
    let c = loop_of(&g, "d c^3 d^-1");
    assert!(g.are_conjugate(&a, &c, false).unwrap().conjugate);
    assert!(!g.are_conjugate(&loop_of(&g, "b"), &loop_of(&g, "d"), false).unwrap().conjugate);
}

#[test]
fn strictness() {
    let g = amalgam();
    let p = g.presentation();
    let target = Alphabet::new("T", ["x", "y"]).unwrap();
    let x = Word::generator(&target, 0);
    let y = Word::generator(&target, 1);
    let good = FreeHom::new(&p.alphabet, &target, vec![x.clone(), y.clone(), x.clone(), x.powi(2)]).unwrap();
    let rep = g.check_strict(&good, &[0]).unwrap();
    assert!(rep.edge_groups_injective && rep.qh_images_nonabelian);
    assert!(!rep.nonqh_envelopes_injective);
    let collapse = FreeHom::new(&p.alphabet, &target, vec![Word::identity(&target); 4]).unwrap();
    let rep = g.check_strict(&collapse, &[]).unwrap();
    assert!(!rep.edge_groups_injective && !rep.strict);
    let qh = FreeHom::new(&p.alphabet, &target, vec![y.clone(), y.powi(2), y.clone(), x.clone()]).unwrap();
    assert!(!g.check_strict(&qh, &[0]).unwrap().qh_images_nonabelian);
    let bad = FreeHom::new(&p.alphabet, &target, vec![x.clone(), y.clone(), y.clone(), x]).unwrap();
    assert!(matches!(g.check_strict(&bad, &[]), Err(GogError::RelationViolated(_))));
}

#[test]
fn vertex_twist_extends() {
    let h = hnn(COMM);
    let f = h.group(0).clone();
    // Conjugation by x on F; the end conjugators are both x.
    let xw = word(&f, &[(0, 1)]);
    let images = (0..2).map(|i| f.mul(&f.mul(&xw, &f.generator(i)), &f.inv(&xw))).collect();
    let twist = VertexTwist {
        vertex: 0,
        images,
        end_conjugators: HashMap::from([((0, true), xw.clone()), ((0, false), xw)]),
    };
    let hom = h.extend_vertex_twist(&twist).unwrap();
    assert_eq!(hom.image(2).to_string(), "x t x^-1");
    let st = h.stable_twist(0, 2).unwrap();
    h.check_endomorphism(&st).unwrap();
}
