use proptest::prelude::*;

use programport::dsl::{parse_program, serialize, type_check, ConceptToken, ProgramNode, SemanticType};

fn word() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["red", "blue", "box", "hexagon", "daxy", "letter-l", "left", "pile_of"]).prop_map(String::from)
}

fn object() -> impl Strategy<Value = ProgramNode> {
    let leaf = Just(ProgramNode::Scene).boxed();
    leaf.prop_recursive(5, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), word()).prop_map(|(c, w)| ProgramNode::filter(c, ConceptToken::property(w).unwrap())),
            (inner.clone(), inner.clone(), word())
                .prop_map(|(t, r, w)| ProgramNode::relate(t, r, ConceptToken::relation(w).unwrap())),
            (inner.clone(), inner).prop_map(|(a, b)| ProgramNode::union(a, b)),
        ]
    })
}

fn goal() -> impl Strategy<Value = ProgramNode> {
    (object(), object(), word()).prop_map(|(o, r, w)| ProgramNode::goal(o, r, ConceptToken::relation(w).unwrap()))
}

fn plan() -> impl Strategy<Value = ProgramNode> {
    let single = (prop::collection::vec(goal(), 1..3), word())
        .prop_map(|(g, a)| ProgramNode::do_(g, ConceptToken::action(a).unwrap()))
        .boxed();
    single.prop_recursive(2, 4, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| ProgramNode::concat(a, b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn plans_round_trip(p in plan()) {
        let text = serialize(&p);
        prop_assert_eq!(parse_program(&text).unwrap(), p.clone());
        prop_assert_eq!(type_check(&p).unwrap(), SemanticType::Plan);
        prop_assert_eq!(p.to_string(), text);
    }

    #[test]
    fn objects_round_trip(o in object()) {
        prop_assert_eq!(parse_program(&serialize(&o)).unwrap(), o.clone());
        prop_assert_eq!(type_check(&o).unwrap(), SemanticType::Object);
    }
}

#[test]
fn fixed_spellings() {
    let red = ProgramNode::filter(ProgramNode::Scene, ConceptToken::property("red").unwrap());
    let blue = ProgramNode::filter(ProgramNode::Scene, ConceptToken::property("blue").unwrap());
    assert_eq!(serialize(&ProgramNode::union(red, blue)), "objunion(filter(red), filter(blue))");
    let golden = "do(goal(filter(filter(hexagon), blue), filter(filter(box), orange), in), pack)";
    assert_eq!(serialize(&parse_program(golden).unwrap()), golden);
}
