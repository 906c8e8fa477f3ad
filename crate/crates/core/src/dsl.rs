//! The typed manipulation-program language.
//!
//! Programs are trees of seven operations: `scene`, `filter`, `relate`,
//! `goal`, `do`, `objunion` and `actionconcat`. Object-valued nodes denote
//! spatial grounding maps, `goal` denotes a distribution over placement poses,
//! and `do` produces end-effector control parameters.
//!
//! The canonical text form writes operation names in lowercase with
//! comma-separated arguments, concept words bare, and elides the innermost
//! `scene()` of a filter chain:
//!
//! ```text
//! do(goal(filter(filter(hexagon), blue), filter(filter(box), orange), in), pack)
//! ```

use std::fmt;

use thiserror::Error;

/// The six value types of the language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemanticType {
    Object,
    ObjProp,
    ObjRel,
    Goal,
    Plan,
    Action,
}

impl SemanticType {
    pub const ALL: [SemanticType; 6] = [
        SemanticType::Object,
        SemanticType::ObjProp,
        SemanticType::ObjRel,
        SemanticType::Goal,
        SemanticType::Plan,
        SemanticType::Action,
    ];
}

impl fmt::Display for SemanticType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SemanticType::Object => "Object",
            SemanticType::ObjProp => "ObjProp",
            SemanticType::ObjRel => "ObjRel",
            SemanticType::Goal => "Goal",
            SemanticType::Plan => "Plan",
            SemanticType::Action => "Action",
        };
        f.write_str(s)
    }
}

/// Role of a concept word inside a program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConceptKind {
    Property,
    Relation,
    Action,
}

impl ConceptKind {
    /// The semantic type a concept of this kind inhabits.
    pub fn semantic_type(self) -> SemanticType {
        match self {
            ConceptKind::Property => SemanticType::ObjProp,
            ConceptKind::Relation => SemanticType::ObjRel,
            ConceptKind::Action => SemanticType::Action,
        }
    }
}

impl fmt::Display for ConceptKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConceptKind::Property => "property",
            ConceptKind::Relation => "relation",
            ConceptKind::Action => "action",
        })
    }
}

/// A single language concept (`blue`, `in`, `pack`) together with its role.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConceptToken {
    word: String,
    kind: ConceptKind,
}

impl ConceptToken {
    pub fn new(word: impl Into<String>, kind: ConceptKind) -> Result<Self, DslError> {
        let word = word.into();
        if !is_concept_word(&word) {
            return Err(DslError::InvalidConcept(word));
        }
        Ok(ConceptToken { word, kind })
    }

    pub fn property(word: impl Into<String>) -> Result<Self, DslError> {
        Self::new(word, ConceptKind::Property)
    }

    pub fn relation(word: impl Into<String>) -> Result<Self, DslError> {
        Self::new(word, ConceptKind::Relation)
    }

    pub fn action(word: impl Into<String>) -> Result<Self, DslError> {
        Self::new(word, ConceptKind::Action)
    }

    pub fn word(&self) -> &str {
        &self.word
    }

    pub fn kind(&self) -> ConceptKind {
        self.kind
    }

    pub fn with_word(&self, word: impl Into<String>) -> Result<Self, DslError> {
        Self::new(word, self.kind)
    }
}

/// Nonempty, lowercase, no whitespace, and not one of the reserved
/// characters of the surface syntax.
pub fn is_concept_word(word: &str) -> bool {
    !word.is_empty()
        && word.chars().all(|c| {
            !c.is_whitespace() && !c.is_uppercase() && !matches!(c, '(' | ')' | ',' | '.' | '\\' | 'λ')
        })
}

/// A node of a manipulation program.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProgramNode {
    Scene,
    Filter {
        child: Box<ProgramNode>,
        prop: ConceptToken,
    },
    Relate {
        target: Box<ProgramNode>,
        reference: Box<ProgramNode>,
        rel: ConceptToken,
    },
    Goal {
        object: Box<ProgramNode>,
        reference: Box<ProgramNode>,
        rel: ConceptToken,
    },
    Do {
        goals: Vec<ProgramNode>,
        action: ConceptToken,
    },
    ObjUnion(Box<ProgramNode>, Box<ProgramNode>),
    ActionConcat(Box<ProgramNode>, Box<ProgramNode>),
}

/// Operation names in the order of the operation table.
pub const OPERATIONS: [&str; 7] = ["scene", "filter", "relate", "do", "goal", "objunion", "actionconcat"];

impl ProgramNode {
    pub fn filter(child: ProgramNode, prop: ConceptToken) -> Self {
        ProgramNode::Filter { child: Box::new(child), prop }
    }

    pub fn relate(target: ProgramNode, reference: ProgramNode, rel: ConceptToken) -> Self {
        ProgramNode::Relate {
            target: Box::new(target),
            reference: Box::new(reference),
            rel,
        }
    }

    pub fn goal(object: ProgramNode, reference: ProgramNode, rel: ConceptToken) -> Self {
        ProgramNode::Goal {
            object: Box::new(object),
            reference: Box::new(reference),
            rel,
        }
    }

    pub fn do_(goals: Vec<ProgramNode>, action: ConceptToken) -> Self {
        ProgramNode::Do { goals, action }
    }

    pub fn union(a: ProgramNode, b: ProgramNode) -> Self {
        ProgramNode::ObjUnion(Box::new(a), Box::new(b))
    }

    pub fn concat(a: ProgramNode, b: ProgramNode) -> Self {
        ProgramNode::ActionConcat(Box::new(a), Box::new(b))
    }

    /// Operation name as written in the surface syntax.
    pub fn op_name(&self) -> &'static str {
        match self {
            ProgramNode::Scene => "scene",
            ProgramNode::Filter { .. } => "filter",
            ProgramNode::Relate { .. } => "relate",
            ProgramNode::Goal { .. } => "goal",
            ProgramNode::Do { .. } => "do",
            ProgramNode::ObjUnion(..) => "objunion",
            ProgramNode::ActionConcat(..) => "actionconcat",
        }
    }

    /// Declared signature: argument types (program children first, then the
    /// concept slot) and result type.
    pub fn signature(&self) -> (Vec<SemanticType>, SemanticType) {
        use SemanticType::*;
        match self {
            ProgramNode::Scene => (vec![], Object),
            ProgramNode::Filter { .. } => (vec![Object, ObjProp], Object),
            ProgramNode::Relate { .. } => (vec![Object, Object, ObjRel], Object),
            ProgramNode::Goal { .. } => (vec![Object, Object, ObjRel], Goal),
            ProgramNode::Do { goals, .. } => {
                let mut args = vec![Goal; goals.len().max(1)];
                args.push(Action);
                (args, Plan)
            }
            ProgramNode::ObjUnion(..) => (vec![Object, Object], Object),
            ProgramNode::ActionConcat(..) => (vec![Plan, Plan], Plan),
        }
    }

    /// Program-valued children in argument order.
    pub fn children(&self) -> Vec<&ProgramNode> {
        match self {
            ProgramNode::Scene => vec![],
            ProgramNode::Filter { child, .. } => vec![child],
            ProgramNode::Relate { target, reference, .. } => vec![target, reference],
            ProgramNode::Goal { object, reference, .. } => vec![object, reference],
            ProgramNode::Do { goals, .. } => goals.iter().collect(),
            ProgramNode::ObjUnion(a, b) | ProgramNode::ActionConcat(a, b) => vec![a, b],
        }
    }

    /// The concept argument, if the operation has one.
    pub fn concept(&self) -> Option<&ConceptToken> {
        match self {
            ProgramNode::Filter { prop, .. } => Some(prop),
            ProgramNode::Relate { rel, .. } | ProgramNode::Goal { rel, .. } => Some(rel),
            ProgramNode::Do { action, .. } => Some(action),
            _ => None,
        }
    }

    /// All concept tokens in pre-order.
    pub fn concepts(&self) -> Vec<&ConceptToken> {
        let mut out = Vec::new();
        self.collect_concepts(&mut out);
        out
    }

    fn collect_concepts<'a>(&'a self, out: &mut Vec<&'a ConceptToken>) {
        for child in self.children() {
            child.collect_concepts(out);
        }
        if let Some(c) = self.concept() {
            out.push(c);
        }
    }

    /// Rewrites every concept token through `f`.
    pub fn map_concepts(&self, f: &mut impl FnMut(&ConceptToken) -> ConceptToken) -> ProgramNode {
        match self {
            ProgramNode::Scene => ProgramNode::Scene,
            ProgramNode::Filter { child, prop } => ProgramNode::filter(child.map_concepts(f), f(prop)),
            ProgramNode::Relate { target, reference, rel } => {
                ProgramNode::relate(target.map_concepts(f), reference.map_concepts(f), f(rel))
            }
            ProgramNode::Goal { object, reference, rel } => {
                ProgramNode::goal(object.map_concepts(f), reference.map_concepts(f), f(rel))
            }
            ProgramNode::Do { goals, action } => {
                ProgramNode::do_(goals.iter().map(|g| g.map_concepts(f)).collect(), f(action))
            }
            ProgramNode::ObjUnion(a, b) => ProgramNode::union(a.map_concepts(f), b.map_concepts(f)),
            ProgramNode::ActionConcat(a, b) => ProgramNode::concat(a.map_concepts(f), b.map_concepts(f)),
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("type mismatch at {path}: expected {expected}, found {found}")]
    TypeMismatch {
        path: String,
        expected: SemanticType,
        found: SemanticType,
    },
    #[error("arity error at {path}: {message}")]
    Arity { path: String, message: String },
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("invalid concept word {0:?}")]
    InvalidConcept(String),
}

/// Formats a node path as a dotted index list; the root is `root`.
pub fn path_string(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// Computes the semantic type of `node`, checking every child against the
/// slot it occupies.
pub fn type_check(node: &ProgramNode) -> Result<SemanticType, DslError> {
    let mut path = Vec::new();
    check_at(node, &mut path)
}

fn check_at(node: &ProgramNode, path: &mut Vec<usize>) -> Result<SemanticType, DslError> {
    if let ProgramNode::Do { goals, .. } = node {
        if goals.is_empty() {
            return Err(DslError::Arity {
                path: path_string(path),
                message: "do requires at least one goal".into(),
            });
        }
    }
    let (args, result) = node.signature();
    for (i, child) in node.children().into_iter().enumerate() {
        path.push(i);
        let found = check_at(child, path)?;
        if found != args[i] {
            return Err(DslError::TypeMismatch {
                path: path_string(path),
                expected: args[i],
                found,
            });
        }
        path.pop();
    }
    if let Some(concept) = node.concept() {
        let expected = *args.last().expect("concept slot");
        let found = concept.kind().semantic_type();
        if found != expected {
            return Err(DslError::TypeMismatch {
                path: format!("{}:concept", path_string(path)),
                expected,
                found,
            });
        }
    }
    Ok(result)
}

/// Canonical surface form.
pub fn serialize(node: &ProgramNode) -> String {
    let mut out = String::new();
    write_node(node, &mut out);
    out
}

fn write_node(node: &ProgramNode, out: &mut String) {
    match node {
        ProgramNode::Scene => out.push_str("scene()"),
        ProgramNode::Filter { child, prop } => {
            out.push_str("filter(");
            if **child != ProgramNode::Scene {
                write_node(child, out);
                out.push_str(", ");
            }
            out.push_str(prop.word());
            out.push(')');
        }
        ProgramNode::Relate { target: a, reference: b, rel: c } | ProgramNode::Goal { object: a, reference: b, rel: c } => {
            out.push_str(node.op_name());
            out.push('(');
            write_node(a, out);
            out.push_str(", ");
            write_node(b, out);
            out.push_str(", ");
            out.push_str(c.word());
            out.push(')');
        }
        ProgramNode::Do { goals, action } => {
            out.push_str("do(");
            for g in goals {
                write_node(g, out);
                out.push_str(", ");
            }
            out.push_str(action.word());
            out.push(')');
        }
        ProgramNode::ObjUnion(a, b) | ProgramNode::ActionConcat(a, b) => {
            out.push_str(node.op_name());
            out.push('(');
            write_node(a, out);
            out.push_str(", ");
            write_node(b, out);
            out.push(')');
        }
    }
}

impl fmt::Display for ProgramNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize(self))
    }
}

impl std::str::FromStr for ProgramNode {
    type Err = DslError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_program(s)
    }
}

/// Parses canonical surface text and type-checks the result.
pub fn parse_program(text: &str) -> Result<ProgramNode, DslError> {
    let sexpr = SExpr::parse(text)?;
    let node = sexpr.to_node()?;
    type_check(&node)?;
    Ok(node)
}

/// Untyped surface tree shared by the program parser and the lexicon's
/// template parser.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum SExpr {
    Word { text: String, pos: usize },
    Call { head: String, args: Vec<SExpr>, pos: usize },
}

impl SExpr {
    pub(crate) fn parse(text: &str) -> Result<SExpr, DslError> {
        let mut p = SurfaceParser { src: text, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("trailing input"));
        }
        Ok(e)
    }

    pub(crate) fn pos(&self) -> usize {
        match self {
            SExpr::Word { pos, .. } | SExpr::Call { pos, .. } => *pos,
        }
    }

    fn word(&self) -> Result<&str, DslError> {
        match self {
            SExpr::Word { text, .. } => Ok(text),
            SExpr::Call { head, pos, .. } => Err(DslError::Syntax {
                position: *pos,
                message: format!("expected a concept word, found {head}(...)"),
            }),
        }
    }

    fn to_node(&self) -> Result<ProgramNode, DslError> {
        let (head, args, pos) = match self {
            SExpr::Call { head, args, pos } => (head.as_str(), args, *pos),
            SExpr::Word { text, pos } => {
                return Err(DslError::Syntax {
                    position: *pos,
                    message: format!("expected an operation, found bare word {text:?}"),
                })
            }
        };
        let arity = |want: &str| DslError::Syntax {
            position: pos,
            message: format!("{head} expects {want} argument(s), found {}", args.len()),
        };
        let concept = |e: &SExpr, kind| -> Result<ConceptToken, DslError> {
            let w = e.word()?;
            ConceptToken::new(w, kind).map_err(|_| DslError::Syntax {
                position: e.pos(),
                message: format!("invalid concept word {w:?}"),
            })
        };
        match head {
            "scene" => {
                if !args.is_empty() {
                    return Err(arity("0"));
                }
                Ok(ProgramNode::Scene)
            }
            "filter" => match args.as_slice() {
                [prop] => Ok(ProgramNode::filter(ProgramNode::Scene, concept(prop, ConceptKind::Property)?)),
                [child, prop] => Ok(ProgramNode::filter(child.to_node()?, concept(prop, ConceptKind::Property)?)),
                _ => Err(arity("1 or 2")),
            },
            "relate" | "goal" => match args.as_slice() {
                [a, b, rel] => {
                    let (a, b, rel) = (a.to_node()?, b.to_node()?, concept(rel, ConceptKind::Relation)?);
                    Ok(if head == "relate" {
                        ProgramNode::relate(a, b, rel)
                    } else {
                        ProgramNode::goal(a, b, rel)
                    })
                }
                _ => Err(arity("3")),
            },
            "do" => {
                if args.len() < 2 {
                    return Err(arity("at least 2"));
                }
                let (action, goals) = args.split_last().expect("nonempty");
                let goals = goals.iter().map(SExpr::to_node).collect::<Result<Vec<_>, _>>()?;
                Ok(ProgramNode::do_(goals, concept(action, ConceptKind::Action)?))
            }
            "objunion" | "actionconcat" => match args.as_slice() {
                [a, b] => {
                    let (a, b) = (a.to_node()?, b.to_node()?);
                    Ok(if head == "objunion" {
                        ProgramNode::union(a, b)
                    } else {
                        ProgramNode::concat(a, b)
                    })
                }
                _ => Err(arity("2")),
            },
            other => Err(DslError::Syntax {
                position: pos,
                message: format!("unknown operation {other:?}"),
            }),
        }
    }
}

struct SurfaceParser<'a> {
    src: &'a str,
    pos: usize,
}

impl SurfaceParser<'_> {
    fn error(&self, message: &str) -> DslError {
        DslError::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn ident(&mut self) -> Result<String, DslError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || matches!(c, '(' | ')' | ',') {
                break;
            }
            self.pos += c.len_utf8();
        }
        if start == self.pos {
            return Err(self.error("expected identifier"));
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn expr(&mut self) -> Result<SExpr, DslError> {
        self.skip_ws();
        let pos = self.pos;
        let text = self.ident()?;
        self.skip_ws();
        if self.peek() != Some('(') {
            return Ok(SExpr::Word { text, pos });
        }
        self.pos += 1;
        let mut args = Vec::new();
        self.skip_ws();
        if self.peek() == Some(')') {
            self.pos += 1;
            return Ok(SExpr::Call { head: text, args, pos });
        }
        loop {
            args.push(self.expr()?);
            self.skip_ws();
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(')') => {
                    self.pos += 1;
                    return Ok(SExpr::Call { head: text, args, pos });
                }
                _ => return Err(self.error("expected ',' or ')'")),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prop(w: &str) -> ConceptToken {
        ConceptToken::property(w).unwrap()
    }

    pub(crate) fn hexagon_program() -> ProgramNode {
        ProgramNode::do_(
            vec![ProgramNode::goal(
                ProgramNode::filter(ProgramNode::filter(ProgramNode::Scene, prop("hexagon")), prop("blue")),
                ProgramNode::filter(ProgramNode::filter(ProgramNode::Scene, prop("box")), prop("orange")),
                ConceptToken::relation("in").unwrap(),
            )],
            ConceptToken::action("pack").unwrap(),
        )
    }

    const HEXAGON_TEXT: &str = "do(goal(filter(filter(hexagon), blue), filter(filter(box), orange), in), pack)";

    #[test]
    fn scene_is_object() {
        assert_eq!(type_check(&ProgramNode::Scene), Ok(SemanticType::Object));
        assert_eq!(serialize(&ProgramNode::Scene), "scene()");
        assert_eq!(parse_program("scene()"), Ok(ProgramNode::Scene));
    }

    #[test]
    fn hexagon_program_is_a_plan() {
        let p = hexagon_program();
        assert_eq!(type_check(&p), Ok(SemanticType::Plan));
        assert_eq!(serialize(&p), HEXAGON_TEXT);
        assert_eq!(parse_program(HEXAGON_TEXT), Ok(p));
    }

    #[test]
    fn filter_in_goal_slot_is_rejected() {
        let bad = ProgramNode::do_(
            vec![ProgramNode::filter(ProgramNode::Scene, prop("red"))],
            ConceptToken::action("pack").unwrap(),
        );
        match type_check(&bad) {
            Err(DslError::TypeMismatch { path, expected, found }) => {
                assert_eq!(path, "0");
                assert_eq!(expected, SemanticType::Goal);
                assert_eq!(found, SemanticType::Object);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn concept_kind_must_match_slot() {
        let bad = ProgramNode::filter(ProgramNode::Scene, ConceptToken::relation("in").unwrap());
        assert!(matches!(type_check(&bad), Err(DslError::TypeMismatch { .. })));
    }

    #[test]
    fn union_serializes_with_elided_scene() {
        let u = ProgramNode::union(
            ProgramNode::filter(ProgramNode::Scene, prop("red")),
            ProgramNode::filter(ProgramNode::Scene, prop("blue")),
        );
        let text = serialize(&u);
        assert_eq!(text, "objunion(filter(red), filter(blue))");
        assert_eq!(parse_program(&text).unwrap(), u);
    }

    #[test]
    fn explicit_scene_inside_filter_parses_to_same_tree() {
        let a = parse_program("filter(scene(), red)").unwrap();
        let b = parse_program("filter(red)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn do_without_goals_is_rejected() {
        assert!(matches!(parse_program("do(pack)"), Err(DslError::Syntax { .. })));
        let empty = ProgramNode::do_(vec![], ConceptToken::action("pack").unwrap());
        assert!(matches!(type_check(&empty), Err(DslError::Arity { .. })));
    }

    #[test]
    fn malformed_text_reports_position() {
        match parse_program("filter(filter(red), ") {
            Err(DslError::Syntax { position, .. }) => assert!(position >= 19),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_program("filter(red))").is_err());
        assert!(parse_program("frobnicate(red)").is_err());
        assert!(parse_program("filter(Red)").is_err());
    }

    #[test]
    fn relate_and_concat_spelling() {
        let text = "actionconcat(do(goal(relate(filter(box), filter(star), left), scene(), on), pack), \
                    do(goal(filter(ring), filter(zone), into), push))";
        let p = parse_program(text).unwrap();
        assert_eq!(type_check(&p), Ok(SemanticType::Plan));
        assert_eq!(serialize(&p), text.split_whitespace().collect::<Vec<_>>().join(" "));
    }

    #[test]
    fn every_operation_has_one_variant() {
        let samples = [
            ProgramNode::Scene,
            ProgramNode::filter(ProgramNode::Scene, prop("red")),
            ProgramNode::relate(ProgramNode::Scene, ProgramNode::Scene, ConceptToken::relation("left").unwrap()),
            ProgramNode::do_(
                vec![ProgramNode::goal(ProgramNode::Scene, ProgramNode::Scene, ConceptToken::relation("in").unwrap())],
                ConceptToken::action("pack").unwrap(),
            ),
            ProgramNode::goal(ProgramNode::Scene, ProgramNode::Scene, ConceptToken::relation("in").unwrap()),
            ProgramNode::union(ProgramNode::Scene, ProgramNode::Scene),
            ProgramNode::concat(hexagon_program(), hexagon_program()),
        ];
        let names: Vec<_> = samples.iter().map(|s| s.op_name()).collect();
        assert_eq!(names, OPERATIONS);
        use SemanticType::*;
        let expected = [Object, Object, Object, Plan, Goal, Object, Plan];
        for (s, t) in samples.iter().zip(expected) {
            assert_eq!(type_check(s).unwrap(), t, "{}", s);
            assert_eq!(s.signature().1, t);
        }
    }

    #[test]
    fn concept_word_validation() {
        assert!(ConceptToken::property("").is_err());
        assert!(ConceptToken::property("two words").is_err());
        assert!(ConceptToken::property("Blue").is_err());
        assert!(ConceptToken::property("letter-l").is_ok());
    }
}
