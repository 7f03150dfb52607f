use super::*;
use crate::words::primitive_root;

const SAMPLE: &str = "
alphabet F { x, y }   # free group of rank 2
word u in F = [x,y]
word w in F = (x y)^3
hom f : F -> F { x => x y, y => y^-1 }
graph X {
  vertex V = free F;
  vertex A = abelian 2 (c, t);
  edge e : V.(u) -- A.(1,0) tree;
  base V
}
tower T { base F; level abelian attach [x,y] rank 1 names (c, t) }
task separate T set { x, y } max 16 seed 7
task c1 : conj F left x y right y x pm
";

#[test]
fn parses_sample() {
    let doc = parse(SAMPLE).unwrap();
    assert_eq!(doc.decls.len(), 8);
    assert_eq!(doc.line(0), Some(2));
    let names: Vec<&str> = doc.decls.iter().map(Decl::name).collect();
    assert_eq!(names, ["F", "u", "w", "f", "X", "T", "separate_T", "c1"]);
    let ws = elaborate(&doc).unwrap();
    assert_eq!(ws.words["u"].to_string(), "x y x^-1 y^-1");
    assert_eq!(primitive_root(&ws.words["w"]).1, Exponent::from(3));
    assert_eq!(ws.homs["f"].image(1).to_string(), "y^-1");
    assert_eq!(ws.graphs["X"].presentation().relators.len(), 2);
    assert_eq!(ws.towers["T"].height(), 1);
    assert!(matches!(&ws.tasks[0].spec, TaskSpec::Separate { set, .. } if set.len() == 2));
}

#[test]
fn round_trip() {
    let doc = parse(SAMPLE).unwrap();
    let text = render(&doc);
    let again = parse(&text).unwrap();
    assert_eq!(doc, again);
    assert_eq!(render(&again), text);
}

#[test]
fn large_exponents() {
    let f = Alphabet::new("F", ["a", "b"]).unwrap();
    let w = parse_word(&f, "a^123456789012345678901234567890 b^-3").unwrap();
    assert_eq!(w.syllables().len(), 2);
    assert_eq!(parse_word(&f, &w.to_string()).unwrap(), w);
}

#[test]
fn errors_have_positions() {
    let e = parse("alphabet F { x, y }\nword w in G = x").unwrap_err();
    assert_eq!((e.line, e.col), (2, 11));
    assert_eq!(e.expected, ["declared alphabet"]);
    let e = parse("alphabet F { x y }").unwrap_err();
    assert_eq!((e.line, e.col, e.found.as_str()), (1, 16, "`y`"));
    let e = parse("alphabet F { x }\nalphabet F { y }").unwrap_err();
    assert_eq!((e.line, e.col), (2, 10));
    let f = Alphabet::new("F", ["a"]).unwrap();
    assert!(parse_word(&f, "a b").is_err());
    assert!(parse_word(&f, "a ^").is_err());
    assert!(parse("alphabet F { word }").is_err());
}

#[test]
fn graph_export_round_trips() {
    let ws = elaborate(&parse(SAMPLE).unwrap()).unwrap();
    let g = &ws.graphs["X"];
    let doc = export_graph(g);
    let back = elaborate(&parse(&render(&doc)).unwrap()).unwrap();
    assert_eq!(&back.graphs["X"], g);
    let t = &ws.towers["T"];
    let back = elaborate(&parse(&render(&t.to_document())).unwrap()).unwrap();
    assert_eq!(back.towers["T"].top(), t.top());
}
