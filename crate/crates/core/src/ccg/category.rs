use std::fmt;
use std::str::FromStr;

use super::CcgError;
use crate::dsl::SemanticType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Primitive {
    N,
    NP,
    S,
    PP,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// `X/Y`: takes its argument from the right.
    Forward,
    /// `X\Y`: takes its argument from the left.
    Backward,
}

/// A CCG category: a primitive or a functor `result/argument`,
/// `result\argument`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SyntacticCategory {
    Primitive(Primitive),
    Complex {
        result: Box<SyntacticCategory>,
        direction: Direction,
        argument: Box<SyntacticCategory>,
    },
}

/// Type of a semantic template: a base program type or a function.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermType {
    Base(SemanticType),
    Arrow(Box<TermType>, Box<TermType>),
}

impl TermType {
    pub fn arrow(a: TermType, b: TermType) -> Self {
        TermType::Arrow(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for TermType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermType::Base(t) => write!(f, "{t}"),
            TermType::Arrow(a, b) => match **a {
                TermType::Arrow(..) => write!(f, "({a}) -> {b}"),
                _ => write!(f, "{a} -> {b}"),
            },
        }
    }
}

impl SyntacticCategory {
    pub const N: SyntacticCategory = SyntacticCategory::Primitive(Primitive::N);
    pub const NP: SyntacticCategory = SyntacticCategory::Primitive(Primitive::NP);
    pub const S: SyntacticCategory = SyntacticCategory::Primitive(Primitive::S);
    pub const PP: SyntacticCategory = SyntacticCategory::Primitive(Primitive::PP);

    pub fn forward(result: SyntacticCategory, argument: SyntacticCategory) -> Self {
        SyntacticCategory::Complex {
            result: Box::new(result),
            direction: Direction::Forward,
            argument: Box::new(argument),
        }
    }

    pub fn backward(result: SyntacticCategory, argument: SyntacticCategory) -> Self {
        SyntacticCategory::Complex {
            result: Box::new(result),
            direction: Direction::Backward,
            argument: Box::new(argument),
        }
    }

    pub fn is_primitive(&self) -> bool {
        matches!(self, SyntacticCategory::Primitive(_))
    }

    /// Category-to-type homomorphism: N and NP denote objects, S plans, PP a
    /// goal still waiting for the object it constrains; functors map to
    /// functions.
    pub fn semantic_type(&self) -> TermType {
        match self {
            SyntacticCategory::Primitive(Primitive::N | Primitive::NP) => TermType::Base(SemanticType::Object),
            SyntacticCategory::Primitive(Primitive::S) => TermType::Base(SemanticType::Plan),
            SyntacticCategory::Primitive(Primitive::PP) => TermType::arrow(
                TermType::Base(SemanticType::Object),
                TermType::Base(SemanticType::Goal),
            ),
            SyntacticCategory::Complex { result, argument, .. } => {
                TermType::arrow(argument.semantic_type(), result.semantic_type())
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            SyntacticCategory::Primitive(_) => 0,
            SyntacticCategory::Complex { result, argument, .. } => 1 + result.depth().max(argument.depth()),
        }
    }
}

impl fmt::Display for SyntacticCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SyntacticCategory::Primitive(p) => write!(f, "{p:?}"),
            SyntacticCategory::Complex {
                result,
                direction,
                argument,
            } => {
                let slash = match direction {
                    Direction::Forward => '/',
                    Direction::Backward => '\\',
                };
                let wrap = |c: &SyntacticCategory| {
                    if c.is_primitive() {
                        c.to_string()
                    } else {
                        format!("({c})")
                    }
                };
                write!(f, "{}{}{}", wrap(result), slash, wrap(argument))
            }
        }
    }
}

impl FromStr for SyntacticCategory {
    type Err = CcgError;

    /// Slashes associate to the left: `S/PP/NP` is `(S/PP)/NP`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let cat = parse_cat(&chars, &mut pos).map_err(|m| CcgError::Category(format!("{s:?}: {m}")))?;
        if pos != chars.len() {
            return Err(CcgError::Category(format!("{s:?}: trailing input")));
        }
        Ok(cat)
    }
}

fn parse_cat(chars: &[char], pos: &mut usize) -> Result<SyntacticCategory, String> {
    let mut left = parse_atom(chars, pos)?;
    while *pos < chars.len() && matches!(chars[*pos], '/' | '\\') {
        let direction = if chars[*pos] == '/' {
            Direction::Forward
        } else {
            Direction::Backward
        };
        *pos += 1;
        let right = parse_atom(chars, pos)?;
        left = SyntacticCategory::Complex {
            result: Box::new(left),
            direction,
            argument: Box::new(right),
        };
    }
    Ok(left)
}

fn parse_atom(chars: &[char], pos: &mut usize) -> Result<SyntacticCategory, String> {
    if *pos < chars.len() && chars[*pos] == '(' {
        *pos += 1;
        let inner = parse_cat(chars, pos)?;
        if *pos >= chars.len() || chars[*pos] != ')' {
            return Err("unbalanced parenthesis".into());
        }
        *pos += 1;
        return Ok(inner);
    }
    let start = *pos;
    while *pos < chars.len() && chars[*pos].is_ascii_alphabetic() {
        *pos += 1;
    }
    let name: String = chars[start..*pos].iter().collect();
    let p = match name.as_str() {
        "N" => Primitive::N,
        "NP" => Primitive::NP,
        "S" => Primitive::S,
        "PP" => Primitive::PP,
        "" => return Err(format!("expected a category at {start}")),
        other => return Err(format!("unknown primitive category {other:?}")),
    };
    Ok(SyntacticCategory::Primitive(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let c: SyntacticCategory = "S/PP/NP".parse().unwrap();
        assert_eq!(
            c,
            SyntacticCategory::forward(
                SyntacticCategory::forward(SyntacticCategory::S, SyntacticCategory::PP),
                SyntacticCategory::NP
            )
        );
        assert_eq!(c.to_string(), "(S/PP)/NP");
        assert_eq!(c, "(S/PP)/NP".parse().unwrap());
        let r: SyntacticCategory = "(NP\\NP)/NP".parse().unwrap();
        assert_eq!(r.to_string(), "(NP\\NP)/NP");
        assert_eq!("N/N".parse::<SyntacticCategory>().unwrap().to_string(), "N/N");
        assert!("N/".parse::<SyntacticCategory>().is_err());
        assert!("(N/N".parse::<SyntacticCategory>().is_err());
        assert!("Q".parse::<SyntacticCategory>().is_err());
    }

    #[test]
    fn type_homomorphism() {
        let obj = TermType::Base(SemanticType::Object);
        assert_eq!(SyntacticCategory::N.semantic_type(), obj);
        assert_eq!(
            "N/N".parse::<SyntacticCategory>().unwrap().semantic_type(),
            TermType::arrow(obj.clone(), obj.clone())
        );
        let pp = TermType::arrow(obj.clone(), TermType::Base(SemanticType::Goal));
        assert_eq!(SyntacticCategory::PP.semantic_type(), pp);
        assert_eq!(
            "(S/PP)/NP".parse::<SyntacticCategory>().unwrap().semantic_type(),
            TermType::arrow(obj, TermType::arrow(pp, TermType::Base(SemanticType::Plan)))
        );
    }
}
