use std::collections::BTreeMap;
use std::path::Path;

use super::category::SyntacticCategory;
use super::term::SemanticTemplate;
use super::CcgError;

/// The lexicon shipped with the crate.
pub const DEFAULT_LEXICON: &str = include_str!("default.lex");

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub word: String,
    pub category: SyntacticCategory,
    /// Closed, beta-normal, and typed by `category.semantic_type()`.
    pub template: SemanticTemplate,
    pub weight: f64,
}

impl LexiconEntry {
    pub fn new(
        word: impl Into<String>,
        category: SyntacticCategory,
        template: SemanticTemplate,
        weight: f64,
    ) -> Result<Self, CcgError> {
        let word = word.into();
        if word.is_empty() || word.chars().any(|c| c.is_whitespace() || c.is_uppercase()) {
            return Err(CcgError::TemplateSyntax(format!("invalid lexicon word {word:?}")));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(CcgError::TemplateType(format!("{word}: weight must be positive, got {weight}")));
        }
        if !template.is_closed() {
            return Err(CcgError::TemplateType(format!("{word}: template {template} has free variables")));
        }
        if template.has_holes() {
            return Err(CcgError::TemplateType(format!("{word}: template {template} has unfilled slots")));
        }
        template.check(&category.semantic_type())?;
        Ok(LexiconEntry {
            word,
            category,
            template: template.normalize().canonical(),
            weight,
        })
    }
}

/// Word-indexed entries. Multiword names are stored joined by `_`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<LexiconEntry>>,
}

impl Lexicon {
    pub fn from_entries(entries: impl IntoIterator<Item = LexiconEntry>) -> Self {
        let mut lex = Lexicon::default();
        for e in entries {
            lex.insert(e);
        }
        lex
    }

    pub fn insert(&mut self, entry: LexiconEntry) {
        self.entries.entry(entry.word.clone()).or_default().push(entry);
    }

    /// Parses the line format `word<TAB>category<TAB>template[<TAB>weight]`.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, CcgError> {
        let mut lex = Lexicon::default();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |message: String| CcgError::Lexicon { line: line_no, message };
            let fields: Vec<&str> = trimmed.split('\t').map(str::trim).filter(|f| !f.is_empty()).collect();
            if !(3..=4).contains(&fields.len()) {
                return Err(err(format!("expected 3 or 4 tab-separated fields, found {}", fields.len())));
            }
            let category: SyntacticCategory = fields[1].parse().map_err(|e: CcgError| err(e.to_string()))?;
            let template = SemanticTemplate::parse(fields[2]).map_err(|e| err(e.to_string()))?;
            let weight = match fields.get(3) {
                Some(w) => w.parse::<f64>().map_err(|e| err(format!("weight {w:?}: {e}")))?,
                None => 1.0,
            };
            let entry = LexiconEntry::new(fields[0], category, template, weight).map_err(|e| err(e.to_string()))?;
            lex.insert(entry);
        }
        if lex.entries.is_empty() {
            return Err(CcgError::Lexicon { line: 0, message: "lexicon has no entries".into() });
        }
        Ok(lex)
    }

    pub fn from_path(path: &Path) -> Result<Self, CcgError> {
        let text = std::fs::read_to_string(path).map_err(|e| CcgError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn default_lexicon() -> Self {
        Self::parse(DEFAULT_LEXICON).expect("bundled lexicon is valid")
    }

    pub fn entries(&self, word: &str) -> &[LexiconEntry] {
        self.entries.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    /// Sorted vocabulary.
    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn all_entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values().flatten()
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Vocabulary entries spanning several surface tokens, split on `_`,
    /// longest first.
    pub fn multiword_phrases(&self) -> Vec<Vec<&str>> {
        let mut out: Vec<Vec<&str>> = self
            .vocabulary()
            .filter(|w| w.contains('_'))
            .map(|w| w.split('_').filter(|p| !p.is_empty()).collect::<Vec<_>>())
            .filter(|p| p.len() > 1)
            .collect();
        out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_lexicon_loads() {
        let lex = Lexicon::default_lexicon();
        assert!(lex.contains("hexagon"));
        assert!(!lex.contains("daxy"));
        for w in lex.vocabulary() {
            let n = lex.entries(w).len();
            assert!((1..=2).contains(&n), "{w} has {n} entries");
        }
        let blue = &lex.entries("blue")[0];
        assert_eq!(blue.category.to_string(), "N/N");
        assert_eq!(blue.template.to_string(), "\\x.filter(x, blue)");
    }

    #[test]
    fn rejects_ill_typed_entries() {
        let bad = Lexicon::parse("blue\tN\t\\x.filter(x, blue)\n");
        assert!(matches!(bad, Err(CcgError::Lexicon { line: 1, .. })));
        let bad = Lexicon::parse("# c\n\nblue\tN/N\t\\x.filter(x, blue)\t0\n");
        assert!(matches!(bad, Err(CcgError::Lexicon { line: 3, .. })));
        let bad = Lexicon::parse("blue\tN/N\t\\x.filter(y, blue)\n");
        assert!(bad.is_err());
        assert!(Lexicon::parse("# only comments\n").is_err());
    }

    #[test]
    fn weights_and_multiwords() {
        let lex = Lexicon::parse("big\tN/N\t\\x.filter(x, big)\t2.5\nporcelain_plate\tN\tfilter(porcelain_plate)\n").unwrap();
        assert_eq!(lex.entries("big")[0].weight, 2.5);
        assert_eq!(lex.multiword_phrases(), vec![vec!["porcelain", "plate"]]);
    }
}
