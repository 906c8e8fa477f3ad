//! Semantic templates: lambda terms over program constructors.
//!
//! Template text uses the program surface syntax plus `\x.` (or `λx.`)
//! binders and `f(a)` application, e.g. `\o.\g.do(g(o), pack)`.

use std::collections::BTreeSet;
use std::fmt;

use super::category::TermType;
use super::CcgError;
use crate::dsl::{ConceptKind, ConceptToken, ProgramNode, SemanticType};

/// Word position inside a constructor; `Hole` marks an abstracted word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Word(String),
    Hole,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Word(w) => f.write_str(w),
            Slot::Hole => f.write_str("_"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SemanticTemplate {
    Var(String),
    Lam(String, Box<SemanticTemplate>),
    App(Box<SemanticTemplate>, Box<SemanticTemplate>),
    Scene,
    Filter(Box<SemanticTemplate>, Slot),
    Relate(Box<SemanticTemplate>, Box<SemanticTemplate>, Slot),
    Goal(Box<SemanticTemplate>, Box<SemanticTemplate>, Slot),
    Do(Vec<SemanticTemplate>, Slot),
    Union(Box<SemanticTemplate>, Box<SemanticTemplate>),
    Concat(Box<SemanticTemplate>, Box<SemanticTemplate>),
}

use SemanticTemplate as T;

fn bx(t: SemanticTemplate) -> Box<SemanticTemplate> {
    Box::new(t)
}

impl SemanticTemplate {
    pub fn lam(var: &str, body: SemanticTemplate) -> Self {
        T::Lam(var.to_string(), bx(body))
    }

    pub fn app(f: SemanticTemplate, a: SemanticTemplate) -> Self {
        T::App(bx(f), bx(a))
    }

    pub fn union(a: SemanticTemplate, b: SemanticTemplate) -> Self {
        T::Union(bx(a), bx(b))
    }

    pub fn concat(a: SemanticTemplate, b: SemanticTemplate) -> Self {
        T::Concat(bx(a), bx(b))
    }

    /// Embeds a program as a closed template.
    pub fn from_program(node: &ProgramNode) -> Self {
        let w = |c: &ConceptToken| Slot::Word(c.word().to_string());
        match node {
            ProgramNode::Scene => T::Scene,
            ProgramNode::Filter { child, prop } => T::Filter(bx(Self::from_program(child)), w(prop)),
            ProgramNode::Relate { target, reference, rel } => {
                T::Relate(bx(Self::from_program(target)), bx(Self::from_program(reference)), w(rel))
            }
            ProgramNode::Goal { object, reference, rel } => {
                T::Goal(bx(Self::from_program(object)), bx(Self::from_program(reference)), w(rel))
            }
            ProgramNode::Do { goals, action } => T::Do(goals.iter().map(Self::from_program).collect(), w(action)),
            ProgramNode::ObjUnion(a, b) => T::union(Self::from_program(a), Self::from_program(b)),
            ProgramNode::ActionConcat(a, b) => T::concat(Self::from_program(a), Self::from_program(b)),
        }
    }

    /// Converts a fully reduced, closed template without holes into a program.
    pub fn to_program(&self) -> Option<ProgramNode> {
        let c = |s: &Slot, kind| match s {
            Slot::Word(w) => ConceptToken::new(w.clone(), kind).ok(),
            Slot::Hole => None,
        };
        Some(match self {
            T::Var(_) | T::Lam(..) | T::App(..) => return None,
            T::Scene => ProgramNode::Scene,
            T::Filter(child, s) => ProgramNode::filter(child.to_program()?, c(s, ConceptKind::Property)?),
            T::Relate(a, b, s) => ProgramNode::relate(a.to_program()?, b.to_program()?, c(s, ConceptKind::Relation)?),
            T::Goal(a, b, s) => ProgramNode::goal(a.to_program()?, b.to_program()?, c(s, ConceptKind::Relation)?),
            T::Do(goals, s) => ProgramNode::do_(
                goals.iter().map(|g| g.to_program()).collect::<Option<Vec<_>>>()?,
                c(s, ConceptKind::Action)?,
            ),
            T::Union(a, b) => ProgramNode::union(a.to_program()?, b.to_program()?),
            T::Concat(a, b) => ProgramNode::concat(a.to_program()?, b.to_program()?),
        })
    }

    fn children_mut(&mut self) -> Vec<&mut SemanticTemplate> {
        match self {
            T::Var(_) | T::Scene => vec![],
            T::Lam(_, b) | T::Filter(b, _) => vec![b],
            T::App(a, b) | T::Relate(a, b, _) | T::Goal(a, b, _) | T::Union(a, b) | T::Concat(a, b) => vec![a, b],
            T::Do(gs, _) => gs.iter_mut().collect(),
        }
    }

    fn children(&self) -> Vec<&SemanticTemplate> {
        match self {
            T::Var(_) | T::Scene => vec![],
            T::Lam(_, b) | T::Filter(b, _) => vec![b],
            T::App(a, b) | T::Relate(a, b, _) | T::Goal(a, b, _) | T::Union(a, b) | T::Concat(a, b) => vec![a, b],
            T::Do(gs, _) => gs.iter().collect(),
        }
    }

    fn slot_mut(&mut self) -> Option<&mut Slot> {
        match self {
            T::Filter(_, s) | T::Relate(_, _, s) | T::Goal(_, _, s) | T::Do(_, s) => Some(s),
            _ => None,
        }
    }

    fn slot(&self) -> Option<&Slot> {
        match self {
            T::Filter(_, s) | T::Relate(_, _, s) | T::Goal(_, _, s) | T::Do(_, s) => Some(s),
            _ => None,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            T::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            T::Lam(v, b) => {
                bound.push(v.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Words occupying constructor slots, in pre-order.
    pub fn words(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_words(&mut out);
        out
    }

    fn collect_words<'a>(&'a self, out: &mut Vec<&'a str>) {
        if let Some(Slot::Word(w)) = self.slot() {
            out.push(w);
        }
        for c in self.children() {
            c.collect_words(out);
        }
    }

    /// Replaces every slot word with a hole and renames binders canonically,
    /// so templates differing only in their word (or variable names) compare
    /// equal.
    pub fn abstracted(&self) -> SemanticTemplate {
        let mut t = self.canonical();
        t.for_each_slot(&mut |s| *s = Slot::Hole);
        t
    }

    /// Abstracts the slots naming the entry's own `word`. A template whose
    /// single slot spells the word differently (`blocks` ↦ `filter(block)`)
    /// has that slot abstracted; any other template is only canonicalized.
    pub fn abstracted_for(&self, word: &str) -> SemanticTemplate {
        let mut t = self.canonical();
        let words = self.words();
        if words.contains(&word) {
            t.for_each_slot(&mut |s| {
                if *s == Slot::Word(word.to_string()) {
                    *s = Slot::Hole;
                }
            });
        } else if words.len() == 1 {
            t.for_each_slot(&mut |s| *s = Slot::Hole);
        }
        t
    }

    /// Fills every hole with `word`.
    pub fn instantiate(&self, word: &str) -> SemanticTemplate {
        let mut t = self.clone();
        t.for_each_slot(&mut |s| {
            if *s == Slot::Hole {
                *s = Slot::Word(word.to_string());
            }
        });
        t
    }

    pub fn has_holes(&self) -> bool {
        self.slot() == Some(&Slot::Hole) || self.children().iter().any(|c| c.has_holes())
    }

    fn for_each_slot(&mut self, f: &mut impl FnMut(&mut Slot)) {
        if let Some(s) = self.slot_mut() {
            f(s);
        }
        for c in self.children_mut() {
            c.for_each_slot(f);
        }
    }

    /// Alpha-renames binders by lambda depth (`x`, `y`, `z`, `w`, `v4`, ...).
    pub fn canonical(&self) -> SemanticTemplate {
        self.rename_binders(&mut Vec::new())
    }

    fn rename_binders(&self, scope: &mut Vec<(String, String)>) -> SemanticTemplate {
        match self {
            T::Var(v) => match scope.iter().rev().find(|(old, _)| old == v) {
                Some((_, new)) => T::Var(new.clone()),
                None => T::Var(v.clone()),
            },
            T::Lam(v, b) => {
                let depth = scope.len();
                let name = match depth {
                    0 => "x".to_string(),
                    1 => "y".to_string(),
                    2 => "z".to_string(),
                    3 => "w".to_string(),
                    d => format!("v{d}"),
                };
                scope.push((v.clone(), name.clone()));
                let body = b.rename_binders(scope);
                scope.pop();
                T::Lam(name, bx(body))
            }
            other => {
                let mut copy = other.clone();
                let originals = other.children();
                for (dst, src) in copy.children_mut().into_iter().zip(originals) {
                    *dst = src.rename_binders(scope);
                }
                copy
            }
        }
    }

    /// Capture-avoiding substitution of `value` for free `var`.
    pub fn substitute(&self, var: &str, value: &SemanticTemplate) -> SemanticTemplate {
        let value_free = value.free_vars();
        self.subst(var, value, &value_free)
    }

    fn subst(&self, var: &str, value: &SemanticTemplate, value_free: &BTreeSet<String>) -> SemanticTemplate {
        match self {
            T::Var(v) if v == var => value.clone(),
            T::Var(_) => self.clone(),
            T::Lam(v, _) if v == var => self.clone(),
            T::Lam(v, b) => {
                if value_free.contains(v) {
                    let mut avoid = b.free_vars();
                    avoid.extend(value_free.iter().cloned());
                    avoid.insert(var.to_string());
                    let fresh = (0..)
                        .map(|i| format!("{v}{i}"))
                        .find(|n| !avoid.contains(n))
                        .expect("fresh name");
                    let renamed = b.substitute(v, &T::Var(fresh.clone()));
                    T::Lam(fresh, bx(renamed.subst(var, value, value_free)))
                } else {
                    T::Lam(v.clone(), bx(b.subst(var, value, value_free)))
                }
            }
            other => {
                let mut copy = other.clone();
                let originals = other.children();
                for (dst, src) in copy.children_mut().into_iter().zip(originals) {
                    *dst = src.subst(var, value, value_free);
                }
                copy
            }
        }
    }

    /// Beta normal form.
    pub fn normalize(&self) -> SemanticTemplate {
        match self {
            T::App(f, a) => {
                let f = f.normalize();
                let a = a.normalize();
                match f {
                    T::Lam(v, body) => body.substitute(&v, &a).normalize(),
                    f => T::app(f, a),
                }
            }
            T::Var(_) | T::Scene => self.clone(),
            other => {
                let mut copy = other.clone();
                let originals = other.children();
                for (dst, src) in copy.children_mut().into_iter().zip(originals) {
                    *dst = src.normalize();
                }
                copy
            }
        }
    }

    /// Checks the template against `expected`; variables are typed by their
    /// binders.
    pub fn check(&self, expected: &TermType) -> Result<(), CcgError> {
        check(self, expected, &mut Vec::new())
    }

    /// Parses template text.
    pub fn parse(text: &str) -> Result<SemanticTemplate, CcgError> {
        let mut p = TemplateParser {
            chars: text.chars().collect(),
            pos: 0,
            text,
        };
        let raw = p.template()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(p.error("trailing input"));
        }
        resolve(&raw, &mut Vec::new(), text)
    }
}

fn base(t: SemanticType) -> TermType {
    TermType::Base(t)
}

fn check(term: &SemanticTemplate, expected: &TermType, env: &mut Vec<(String, TermType)>) -> Result<(), CcgError> {
    if let T::Lam(v, body) = term {
        return match expected {
            TermType::Arrow(arg, res) => {
                env.push((v.clone(), (**arg).clone()));
                let r = check(body, res, env);
                env.pop();
                r
            }
            TermType::Base(_) => Err(CcgError::TemplateType(format!("lambda {term} checked against {expected}"))),
        };
    }
    let found = infer(term, env)?;
    if &found == expected {
        Ok(())
    } else {
        Err(CcgError::TemplateType(format!("{term} has type {found}, expected {expected}")))
    }
}

fn infer(term: &SemanticTemplate, env: &mut Vec<(String, TermType)>) -> Result<TermType, CcgError> {
    use SemanticType::*;
    Ok(match term {
        T::Var(v) => env
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|(_, t)| t.clone())
            .ok_or_else(|| CcgError::TemplateType(format!("unbound variable {v}")))?,
        T::Lam(..) => return Err(CcgError::TemplateType(format!("cannot infer the type of {term}"))),
        T::App(f, a) => match infer(f, env)? {
            TermType::Arrow(arg, res) => {
                check(a, &arg, env)?;
                *res
            }
            other => return Err(CcgError::TemplateType(format!("{f} of type {other} applied to an argument"))),
        },
        T::Scene => base(Object),
        T::Filter(c, _) => {
            check(c, &base(Object), env)?;
            base(Object)
        }
        T::Relate(a, b, _) | T::Goal(a, b, _) => {
            check(a, &base(Object), env)?;
            check(b, &base(Object), env)?;
            base(if matches!(term, T::Relate(..)) { Object } else { Goal })
        }
        T::Do(goals, _) => {
            if goals.is_empty() {
                return Err(CcgError::TemplateType("do requires at least one goal".into()));
            }
            for g in goals {
                check(g, &base(Goal), env)?;
            }
            base(Plan)
        }
        T::Union(a, b) => {
            check(a, &base(Object), env)?;
            check(b, &base(Object), env)?;
            base(Object)
        }
        T::Concat(a, b) => {
            check(a, &base(Plan), env)?;
            check(b, &base(Plan), env)?;
            base(Plan)
        }
    })
}

impl fmt::Display for SemanticTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            T::Var(v) => f.write_str(v),
            T::Lam(v, b) => write!(f, "\\{v}.{b}"),
            T::App(fun, a) => match **fun {
                T::Lam(..) => write!(f, "({fun})({a})"),
                _ => write!(f, "{fun}({a})"),
            },
            T::Scene => f.write_str("scene()"),
            T::Filter(c, s) => {
                if **c == T::Scene {
                    write!(f, "filter({s})")
                } else {
                    write!(f, "filter({c}, {s})")
                }
            }
            T::Relate(a, b, s) => write!(f, "relate({a}, {b}, {s})"),
            T::Goal(a, b, s) => write!(f, "goal({a}, {b}, {s})"),
            T::Do(gs, s) => {
                f.write_str("do(")?;
                for g in gs {
                    write!(f, "{g}, ")?;
                }
                write!(f, "{s})")
            }
            T::Union(a, b) => write!(f, "objunion({a}, {b})"),
            T::Concat(a, b) => write!(f, "actionconcat({a}, {b})"),
        }
    }
}

/// Surface tree before names are resolved into variables, words and
/// constructors.
#[derive(Debug)]
enum Raw {
    Lam(String, Box<Raw>),
    Ident(String),
    Call(Box<Raw>, Vec<Raw>),
}

struct TemplateParser<'a> {
    chars: Vec<char>,
    pos: usize,
    text: &'a str,
}

impl TemplateParser<'_> {
    fn error(&self, m: &str) -> CcgError {
        CcgError::TemplateSyntax(format!("{:?} at {}: {m}", self.text, self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn ident(&mut self) -> Result<String, CcgError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || matches!(c, '(' | ')' | ',' | '.' | '\\' | 'λ') {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected identifier"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn template(&mut self) -> Result<Raw, CcgError> {
        self.skip_ws();
        if matches!(self.peek(), Some('\\') | Some('λ')) {
            self.pos += 1;
            let v = self.ident()?;
            self.skip_ws();
            if self.peek() != Some('.') {
                return Err(self.error("expected '.' after binder"));
            }
            self.pos += 1;
            let body = self.template()?;
            return Ok(Raw::Lam(v, Box::new(body)));
        }
        let mut head = self.primary()?;
        loop {
            self.skip_ws();
            if self.peek() != Some('(') {
                return Ok(head);
            }
            self.pos += 1;
            let mut args = Vec::new();
            self.skip_ws();
            if self.peek() == Some(')') {
                self.pos += 1;
            } else {
                loop {
                    args.push(self.template()?);
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.error("expected ',' or ')'")),
                    }
                }
            }
            head = Raw::Call(Box::new(head), args);
        }
    }

    fn primary(&mut self) -> Result<Raw, CcgError> {
        self.skip_ws();
        if self.peek() == Some('(') {
            self.pos += 1;
            let inner = self.template()?;
            self.skip_ws();
            if self.peek() != Some(')') {
                return Err(self.error("expected ')'"));
            }
            self.pos += 1;
            return Ok(inner);
        }
        Ok(Raw::Ident(self.ident()?))
    }
}

const CONSTRUCTORS: [&str; 7] = ["scene", "filter", "relate", "goal", "do", "objunion", "actionconcat"];

fn resolve(raw: &Raw, scope: &mut Vec<String>, text: &str) -> Result<SemanticTemplate, CcgError> {
    let err = |m: String| CcgError::TemplateSyntax(format!("{text:?}: {m}"));
    match raw {
        Raw::Lam(v, body) => {
            scope.push(v.clone());
            let b = resolve(body, scope, text);
            scope.pop();
            Ok(T::Lam(v.clone(), bx(b?)))
        }
        Raw::Ident(name) => {
            if scope.contains(name) {
                Ok(T::Var(name.clone()))
            } else {
                Err(err(format!("bare word {name:?} outside a concept slot")))
            }
        }
        Raw::Call(head, args) => {
            if let Raw::Ident(name) = &**head {
                if !scope.contains(name) && CONSTRUCTORS.contains(&name.as_str()) {
                    return resolve_constructor(name, args, scope, text);
                }
            }
            let mut f = resolve(head, scope, text)?;
            if args.is_empty() {
                return Err(err("application without arguments".into()));
            }
            for a in args {
                f = T::app(f, resolve(a, scope, text)?);
            }
            Ok(f)
        }
    }
}

fn resolve_constructor(
    name: &str,
    args: &[Raw],
    scope: &mut Vec<String>,
    text: &str,
) -> Result<SemanticTemplate, CcgError> {
    let err = |m: String| CcgError::TemplateSyntax(format!("{text:?}: {m}"));
    let slot = |r: &Raw, scope: &Vec<String>| -> Result<Slot, CcgError> {
        match r {
            Raw::Ident(w) if w == "_" => Ok(Slot::Hole),
            Raw::Ident(w) if !scope.contains(w) && crate::dsl::is_concept_word(w) => Ok(Slot::Word(w.clone())),
            _ => Err(err(format!("{name}: concept slot must be a word"))),
        }
    };
    let arity = || err(format!("{name}: wrong number of arguments ({})", args.len()));
    match name {
        "scene" => {
            if args.is_empty() {
                Ok(T::Scene)
            } else {
                Err(arity())
            }
        }
        "filter" => match args {
            [w] => Ok(T::Filter(bx(T::Scene), slot(w, scope)?)),
            [c, w] => Ok(T::Filter(bx(resolve(c, scope, text)?), slot(w, scope)?)),
            _ => Err(arity()),
        },
        "relate" | "goal" => match args {
            [a, b, w] => {
                let (a, b, w) = (resolve(a, scope, text)?, resolve(b, scope, text)?, slot(w, scope)?);
                Ok(if name == "relate" {
                    T::Relate(bx(a), bx(b), w)
                } else {
                    T::Goal(bx(a), bx(b), w)
                })
            }
            _ => Err(arity()),
        },
        "do" => {
            if args.len() < 2 {
                return Err(arity());
            }
            let (w, goals) = args.split_last().expect("nonempty");
            let goals = goals.iter().map(|g| resolve(g, scope, text)).collect::<Result<Vec<_>, _>>()?;
            Ok(T::Do(goals, slot(w, scope)?))
        }
        "objunion" | "actionconcat" => match args {
            [a, b] => {
                let (a, b) = (resolve(a, scope, text)?, resolve(b, scope, text)?);
                Ok(if name == "objunion" { T::union(a, b) } else { T::concat(a, b) })
            }
            _ => Err(arity()),
        },
        _ => unreachable!("constructor list"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccg::SyntacticCategory;

    fn t(s: &str) -> SemanticTemplate {
        SemanticTemplate::parse(s).unwrap()
    }

    #[test]
    fn parse_display_round_trip() {
        for s in [
            "\\x.filter(x, blue)",
            "\\x.\\y.do(y(x), pack)",
            "\\x.x",
            "filter(hexagon)",
            "\\x.\\y.relate(y, x, left)",
            "goal(filter(star), scene(), on)",
        ] {
            assert_eq!(t(s).to_string(), s);
        }
        assert_eq!(t("λx.filter(x, blue)"), t("\\x.filter(x, blue)"));
        assert_eq!(t("filter(scene(), hexagon)"), t("filter(hexagon)"));
    }

    #[test]
    fn parse_errors() {
        assert!(SemanticTemplate::parse("\\x.filter(x, y)").is_ok());
        assert!(SemanticTemplate::parse("\\x.filter(x, x)").is_err());
        assert!(SemanticTemplate::parse("blue").is_err());
        assert!(SemanticTemplate::parse("\\x.").is_err());
        assert!(SemanticTemplate::parse("filter(a, b, c)").is_err());
    }

    #[test]
    fn beta_reduction_applies_modifier() {
        let red = t("\\x.filter(x, blue)");
        let noun = t("filter(scene(), hexagon)");
        let r = SemanticTemplate::app(red, noun).normalize();
        assert_eq!(r.to_string(), "filter(filter(hexagon), blue)");
        assert!(r.to_program().is_some());
    }

    #[test]
    fn higher_order_reduction() {
        let pack = t("\\o.\\g.do(g(o), pack)");
        let obj = t("filter(star)");
        let pp = SemanticTemplate::app(t("\\r.\\o.goal(o, r, in)"), t("filter(box)")).normalize();
        let s = SemanticTemplate::app(SemanticTemplate::app(pack, obj), pp).normalize();
        assert_eq!(s.to_string(), "do(goal(filter(star), filter(box), in), pack)");
    }

    #[test]
    fn substitution_avoids_capture() {
        // Substituting a free x under a binder named x must rename the binder.
        let body = SemanticTemplate::lam("x", SemanticTemplate::app(SemanticTemplate::Var("y".into()), SemanticTemplate::Var("x".into())));
        let r = body.substitute("y", &SemanticTemplate::Var("x".into()));
        match &r {
            SemanticTemplate::Lam(v, inner) => {
                assert_ne!(v, "x");
                assert_eq!(inner.to_string(), format!("x({v})"));
            }
            other => panic!("{other}"),
        }
        assert_eq!(r.free_vars().into_iter().collect::<Vec<_>>(), ["x"]);
    }

    #[test]
    fn abstraction_groups_by_shape() {
        let a = t("\\x.filter(x, blue)").abstracted();
        let b = t("\\q.filter(q, red)").abstracted();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "\\x.filter(x, _)");
        assert_eq!(a.instantiate("daxy").to_string(), "\\x.filter(x, daxy)");
        assert!(a.has_holes());
        let rel = t("\\x.relate(x, filter(box), left)");
        assert_eq!(rel.abstracted_for("left").to_string(), "\\x.relate(x, filter(box), _)");
        assert_eq!(t("filter(block)").abstracted_for("blocks").to_string(), "filter(_)");
        assert_eq!(t("\\q.q").abstracted_for("the").to_string(), "\\x.x");
    }

    #[test]
    fn type_checking_against_categories() {
        let cat = |s: &str| s.parse::<SyntacticCategory>().unwrap().semantic_type();
        assert!(t("\\x.filter(x, blue)").check(&cat("N/N")).is_ok());
        assert!(t("\\x.filter(x, blue)").check(&cat("N")).is_err());
        assert!(t("\\o.\\g.do(g(o), pack)").check(&cat("(S/PP)/NP")).is_ok());
        assert!(t("\\r.\\o.goal(o, r, in)").check(&cat("PP/NP")).is_ok());
        assert!(t("\\r.\\t.relate(t, r, left)").check(&cat("(NP\\NP)/NP")).is_ok());
        assert!(t("\\r.\\o.goal(o, r, in)").check(&cat("N/N")).is_err());
        assert!(t("filter(box)").check(&cat("N")).is_ok());
    }
}
