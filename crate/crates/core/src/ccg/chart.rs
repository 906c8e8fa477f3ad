use std::collections::{BTreeMap, HashSet};

use super::category::{Direction, SyntacticCategory, TermType};
use super::lexicon::Lexicon;
use super::term::SemanticTemplate;
use super::tokenize::tokenize;
use super::CcgError;
use crate::dsl::{type_check, ProgramNode, SemanticType};

/// The coordinating word handled by the chart rather than the lexicon.
pub const CONJUNCTION: &str = "and";

/// Items kept per chart cell.
pub const BEAM_WIDTH: usize = 64;

/// A chart item's grammatical content. `conjunct` marks `and X`, which can
/// only combine leftward with a plain `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constituent {
    pub category: SyntacticCategory,
    pub template: SemanticTemplate,
    pub conjunct: bool,
}

impl Constituent {
    pub fn new(category: SyntacticCategory, template: SemanticTemplate) -> Self {
        Constituent {
            category,
            template,
            conjunct: false,
        }
    }
}

fn reduce(t: SemanticTemplate) -> SemanticTemplate {
    t.normalize().canonical()
}

/// Applies forward application, backward application, or coordination of a
/// plain constituent with a conjunct of the same category.
pub fn combine(left: &Constituent, right: &Constituent) -> Option<Constituent> {
    if left.conjunct {
        return None;
    }
    if right.conjunct {
        if left.category != right.category {
            return None;
        }
        let template = match left.category.semantic_type() {
            TermType::Base(SemanticType::Object) => SemanticTemplate::union(left.template.clone(), right.template.clone()),
            TermType::Base(SemanticType::Plan) => SemanticTemplate::concat(left.template.clone(), right.template.clone()),
            _ => return None,
        };
        return Some(Constituent::new(left.category.clone(), reduce(template)));
    }
    if let SyntacticCategory::Complex {
        result,
        direction: Direction::Forward,
        argument,
    } = &left.category
    {
        if **argument == right.category {
            let t = SemanticTemplate::app(left.template.clone(), right.template.clone());
            return Some(Constituent::new((**result).clone(), reduce(t)));
        }
    }
    if let SyntacticCategory::Complex {
        result,
        direction: Direction::Backward,
        argument,
    } = &right.category
    {
        if **argument == left.category {
            let t = SemanticTemplate::app(right.template.clone(), left.template.clone());
            return Some(Constituent::new((**result).clone(), reduce(t)));
        }
    }
    None
}

/// `and` followed by `c`: a conjunct, for categories denoting objects or
/// plans.
pub fn conjoin(c: &Constituent) -> Option<Constituent> {
    if c.conjunct {
        return None;
    }
    match c.category.semantic_type() {
        TermType::Base(SemanticType::Object | SemanticType::Plan) => Some(Constituent {
            conjunct: true,
            ..c.clone()
        }),
        _ => None,
    }
}

/// A guess for an out-of-vocabulary word.
#[derive(Debug, Clone, PartialEq)]
pub struct OovAssignment {
    pub word: String,
    pub category: SyntacticCategory,
    pub template: SemanticTemplate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub root_category: SyntacticCategory,
    pub program: ProgramNode,
    /// Σ ln(entry weight) + Σ ln(prior) over OOV assignments.
    pub log_score: f64,
    pub oov_assignments: Vec<OovAssignment>,
}

/// Per category, abstract templates with probabilities, most likely first.
pub type SemanticPrior = BTreeMap<SyntacticCategory, Vec<(SemanticTemplate, f64)>>;

/// Weight-proportional distribution of abstracted templates within each
/// category of `lexicon`.
pub fn semantic_prior(lexicon: &Lexicon) -> SemanticPrior {
    let mut mass: BTreeMap<SyntacticCategory, BTreeMap<String, (SemanticTemplate, f64)>> = BTreeMap::new();
    for e in lexicon.all_entries() {
        let t = e.template.abstracted_for(&e.word);
        let slot = mass
            .entry(e.category.clone())
            .or_default()
            .entry(t.to_string())
            .or_insert((t, 0.0));
        slot.1 += e.weight;
    }
    mass.into_iter()
        .map(|(cat, groups)| {
            let total: f64 = groups.values().map(|(_, w)| w).sum();
            let mut dist: Vec<(SemanticTemplate, f64)> = groups.into_values().map(|(t, w)| (t, w / total)).collect();
            dist.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.to_string().cmp(&b.0.to_string())));
            (cat, dist)
        })
        .collect()
}

#[derive(Debug, Clone)]
struct Item {
    c: Constituent,
    score: f64,
    oov: Vec<OovAssignment>,
    key: String,
}

impl Item {
    fn new(c: Constituent, score: f64, oov: Vec<OovAssignment>) -> Self {
        let key = format!("{}|{}|{}", c.category, c.conjunct, c.template);
        Item { c, score, oov, key }
    }
}

fn prune(mut items: Vec<Item>) -> Vec<Item> {
    items.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.key.cmp(&b.key)));
    let mut seen = HashSet::new();
    items.retain(|it| seen.insert(it.key.clone()));
    items.truncate(BEAM_WIDTH);
    items
}

/// Lexical items for one token. An OOV token gets every category of the
/// prior, or only `restrict` when given.
fn leaf_items(
    token: &str,
    lexicon: &Lexicon,
    prior: &SemanticPrior,
    restrict: Option<&SyntacticCategory>,
) -> Vec<Item> {
    if token == CONJUNCTION {
        return Vec::new();
    }
    if lexicon.contains(token) {
        return lexicon
            .entries(token)
            .iter()
            .map(|e| Item::new(Constituent::new(e.category.clone(), e.template.clone()), e.weight.ln(), vec![]))
            .collect();
    }
    let mut out = Vec::new();
    for (cat, dist) in prior {
        if restrict.is_some_and(|r| r != cat) {
            continue;
        }
        for (t, p) in dist {
            let template = t.instantiate(token);
            let assignment = OovAssignment {
                word: token.to_string(),
                category: cat.clone(),
                template: template.clone(),
            };
            out.push(Item::new(Constituent::new(cat.clone(), template), p.ln(), vec![assignment]));
        }
    }
    prune(out)
}

/// CKY over `tokens`; returns the items spanning the whole input.
fn run_chart(
    tokens: &[String],
    lexicon: &Lexicon,
    prior: &SemanticPrior,
    restrict: Option<(&str, &SyntacticCategory)>,
) -> Vec<Item> {
    let n = tokens.len();
    // cells[i][len - 1] spans tokens[i..i + len].
    let mut cells: Vec<Vec<Vec<Item>>> = vec![vec![Vec::new(); n]; n];
    for (i, tok) in tokens.iter().enumerate() {
        let r = restrict.filter(|(w, _)| w == tok).map(|(_, c)| c);
        cells[i][0] = leaf_items(tok, lexicon, prior, r);
    }
    for len in 2..=n {
        for i in 0..=n - len {
            let mut items = Vec::new();
            for split in 1..len {
                let (left, right) = (&cells[i][split - 1], &cells[i + split][len - split - 1]);
                for l in left {
                    for r in right {
                        if let Some(c) = combine(&l.c, &r.c) {
                            let mut oov = l.oov.clone();
                            oov.extend(r.oov.iter().cloned());
                            items.push(Item::new(c, l.score + r.score, oov));
                        }
                    }
                }
            }
            if tokens[i] == CONJUNCTION {
                for r in &cells[i + 1][len - 2] {
                    if let Some(c) = conjoin(&r.c) {
                        items.push(Item::new(c, r.score, r.oov.clone()));
                    }
                }
            }
            cells[i][len - 1] = prune(items);
        }
    }
    if n == 0 {
        Vec::new()
    } else {
        std::mem::take(&mut cells[0][n - 1])
    }
}

fn derivations(items: Vec<Item>, k: usize) -> Vec<Derivation> {
    let mut out: Vec<(String, Derivation)> = items
        .into_iter()
        .filter(|it| it.c.category == SyntacticCategory::S && !it.c.conjunct)
        .filter_map(|it| {
            let program = it.c.template.to_program()?;
            if type_check(&program).ok()? != SemanticType::Plan {
                return None;
            }
            Some((
                program.to_string(),
                Derivation {
                    root_category: it.c.category,
                    program,
                    log_score: it.score,
                    oov_assignments: it.oov,
                },
            ))
        })
        .collect();
    out.sort_by(|a, b| b.1.log_score.total_cmp(&a.1.log_score).then_with(|| a.0.cmp(&b.0)));
    let mut seen = HashSet::new();
    out.retain(|(s, _)| seen.insert(s.clone()));
    out.into_iter().take(k).map(|(_, d)| d).collect()
}

/// Up to `k` complete derivations rooted in `S`, best first; ties go to the
/// lexicographically smaller program text. Unknown words are bootstrapped
/// jointly inside the chart.
pub fn parse(tokens: &[String], lexicon: &Lexicon, k: usize) -> Result<Vec<Derivation>, CcgError> {
    if tokens.is_empty() {
        return Err(CcgError::NoParse(Vec::new()));
    }
    let prior = semantic_prior(lexicon);
    let out = derivations(run_chart(tokens, lexicon, &prior, None), k.max(1));
    if out.is_empty() {
        return Err(CcgError::NoParse(tokens.to_vec()));
    }
    Ok(out)
}

/// Tokenizes `text` and parses it.
pub fn parse_text(text: &str, lexicon: &Lexicon, k: usize) -> Result<Vec<Derivation>, CcgError> {
    parse(&tokenize(text, lexicon), lexicon, k)
}

/// Candidate `(category, template, ln prior)` triples for the unknown `word`
/// in the sentence `tokens`: every prior template of each category under
/// which the whole sentence parses. Sorted by prior, then category text.
pub fn bootstrap_oov(
    word: &str,
    tokens: &[String],
    lexicon: &Lexicon,
) -> Result<Vec<(SyntacticCategory, SemanticTemplate, f64)>, CcgError> {
    if lexicon.contains(word) || word == CONJUNCTION {
        return Err(CcgError::InVocabulary(word.to_string()));
    }
    if !tokens.iter().any(|t| t == word) {
        return Err(CcgError::EmptyCandidates(word.to_string()));
    }
    let prior = semantic_prior(lexicon);
    let mut out = Vec::new();
    for (cat, dist) in &prior {
        if derivations(run_chart(tokens, lexicon, &prior, Some((word, cat))), 1).is_empty() {
            continue;
        }
        out.extend(dist.iter().map(|(t, p)| (cat.clone(), t.instantiate(word), p.ln())));
    }
    if out.is_empty() {
        return Err(CcgError::EmptyCandidates(word.to_string()));
    }
    out.sort_by(|a, b| b.2.total_cmp(&a.2).then_with(|| a.0.to_string().cmp(&b.0.to_string())));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> Lexicon {
        Lexicon::default_lexicon()
    }

    fn c(cat: &str, t: &str) -> Constituent {
        Constituent::new(cat.parse().unwrap(), SemanticTemplate::parse(t).unwrap().canonical())
    }

    #[test]
    fn forward_application() {
        let r = combine(&c("N/N", "\\x.filter(x, blue)"), &c("N", "filter(scene(), hexagon)")).unwrap();
        assert_eq!(r.category, SyntacticCategory::N);
        assert_eq!(r.template.to_string(), "filter(filter(hexagon), blue)");
    }

    #[test]
    fn backward_application() {
        let left = c("NP", "filter(box)");
        let right = c("NP\\NP", "\\t.relate(t, filter(star), left)");
        let r = combine(&left, &right).unwrap();
        assert_eq!(r.template.to_string(), "relate(filter(box), filter(star), left)");
    }

    #[test]
    fn no_rule_for_adjacent_nouns() {
        assert!(combine(&c("N", "filter(red)"), &c("N", "filter(blue)")).is_none());
    }

    #[test]
    fn coordination() {
        let conj = conjoin(&c("N", "filter(blue)")).unwrap();
        let r = combine(&c("N", "filter(red)"), &conj).unwrap();
        assert_eq!(r.template.to_string(), "objunion(filter(red), filter(blue))");
        assert!(conjoin(&c("N/N", "\\x.filter(x, blue)")).is_none());
        assert!(combine(&c("NP", "filter(red)"), &conj).is_none());
    }

    #[test]
    fn golden_parse() {
        let d = parse_text("pack the blue hexagon in the orange box", &lex(), 5).unwrap();
        assert_eq!(
            d[0].program.to_string(),
            "do(goal(filter(filter(hexagon), blue), filter(filter(box), orange), in), pack)"
        );
        assert_eq!(d[0].log_score, 0.0);
        assert!(d[0].oov_assignments.is_empty());
    }

    #[test]
    fn daxy_is_a_modifier() {
        let d = parse_text("pack the daxy shape into the box", &lex(), 5).unwrap();
        let top = &d[0];
        assert_eq!(top.oov_assignments.len(), 1);
        assert_eq!(top.oov_assignments[0].category.to_string(), "N/N");
        assert_eq!(top.oov_assignments[0].template.to_string(), "\\x.filter(x, daxy)");
        assert_eq!(top.program.to_string(), "do(goal(filter(filter(shape), daxy), filter(box), into), pack)");
    }

    #[test]
    fn scrambled_sentence_has_no_parse() {
        assert!(matches!(parse_text("box pack the", &lex(), 5), Err(CcgError::NoParse(_))));
        assert!(matches!(parse(&[], &lex(), 5), Err(CcgError::NoParse(_))));
    }

    #[test]
    fn nested_relations_prefer_right_attachment() {
        let d = parse_text("pack the hexagon into the brown box left of the star right of the diamond", &lex(), 5).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(
            d[0].program.to_string(),
            "do(goal(filter(hexagon), relate(filter(filter(box), brown), relate(filter(star), filter(diamond), right), left), into), pack)"
        );
    }

    #[test]
    fn coordinated_plans() {
        let d = parse_text("pack the star in the box and push the block into the zone", &lex(), 5).unwrap();
        assert!(d[0].program.to_string().starts_with("actionconcat(do("));
        let d = parse_text("pack the red block and the blue block in the box", &lex(), 5).unwrap();
        assert!(d[0].program.to_string().contains("objunion("));
    }

    #[test]
    fn verb_slot_bootstrap() {
        let toks: Vec<String> = "gromp the block into the box".split(' ').map(String::from).collect();
        let cands = bootstrap_oov("gromp", &toks, &lex()).unwrap();
        assert_eq!(cands[0].0.to_string(), "(S/PP)/NP");
        assert_eq!(cands[0].1.to_string(), "\\x.\\y.do(y(x), gromp)");
        assert_eq!(cands[0].2, 0.0);
        assert!(matches!(bootstrap_oov("box", &toks, &lex()), Err(CcgError::InVocabulary(_))));
    }

    #[test]
    fn daxy_bootstrap_candidates() {
        let toks: Vec<String> = "pack the daxy shape into the box".split(' ').map(String::from).collect();
        let cands = bootstrap_oov("daxy", &toks, &lex()).unwrap();
        assert!(cands.iter().all(|c| c.0.to_string() == "N/N"));
        assert_eq!(cands[0].1.to_string(), "\\x.filter(x, daxy)");
    }

    #[test]
    fn prior_counts() {
        let text = "a\tN/N\t\\x.filter(x, a)\nb\tN/N\t\\x.filter(x, b)\nc\tN/N\t\\x.filter(x, c)\n\
                    l\tN/N\t\\x.relate(x, filter(box), l)\nt\tN\tfilter(t)\n";
        let prior = semantic_prior(&Lexicon::parse(text).unwrap());
        let nn = &prior[&"N/N".parse().unwrap()];
        assert_eq!(nn.len(), 2);
        assert_eq!(nn[0].0.to_string(), "\\x.filter(x, _)");
        assert!((nn[0].1 - 0.75).abs() < 1e-12);
        assert!((nn[1].1 - 0.25).abs() < 1e-12);
        assert!(!prior.contains_key(&SyntacticCategory::S));
        for dist in prior.values() {
            assert!((dist.iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}
