use super::lexicon::Lexicon;

/// Lowercases and removes punctuation. `-` and `_` survive only between two
/// alphanumeric characters (`letter-l`, `porcelain_plate`).
pub fn normalize_text(text: &str) -> String {
    let chars: Vec<char> = text.chars().flat_map(char::to_lowercase).collect();
    let mut out = String::with_capacity(chars.len());
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            out.push(c);
        } else if c.is_whitespace() {
            out.push(' ');
        } else if matches!(c, '-' | '_') {
            let prev = i > 0 && chars[i - 1].is_alphanumeric();
            let next = chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
            if prev && next {
                out.push(c);
            }
        }
    }
    out
}

/// Splits normalized text on whitespace and joins runs of tokens that spell a
/// multiword vocabulary entry (greedy, longest match first) with `_`.
pub fn tokenize(text: &str, lexicon: &Lexicon) -> Vec<String> {
    let raw: Vec<String> = normalize_text(text).split_whitespace().map(str::to_string).collect();
    let phrases = lexicon.multiword_phrases();
    let mut out = Vec::with_capacity(raw.len());
    let mut i = 0;
    while i < raw.len() {
        let hit = phrases
            .iter()
            .find(|p| i + p.len() <= raw.len() && p.iter().zip(&raw[i..]).all(|(a, b)| *a == b));
        match hit {
            Some(p) => {
                out.push(p.join("_"));
                i += p.len();
            }
            None => {
                out.push(raw[i].clone());
                i += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_punctuation_and_case() {
        let lex = Lexicon::default_lexicon();
        assert_eq!(
            tokenize("Pack the Blue hexagon, in the orange box!", &lex),
            ["pack", "the", "blue", "hexagon", "in", "the", "orange", "box"]
        );
        assert_eq!(tokenize("the letter-l -", &lex), ["the", "letter-l"]);
        assert!(tokenize("  ", &lex).is_empty());
    }

    #[test]
    fn joins_multiword_names() {
        let lex = Lexicon::parse(
            "porcelain_plate\tN\tfilter(porcelain_plate)\nporcelain_plate_set\tN\tfilter(set)\nthe\tNP/N\t\\x.x\n",
        )
        .unwrap();
        assert_eq!(tokenize("the porcelain plate", &lex), ["the", "porcelain_plate"]);
        assert_eq!(tokenize("the porcelain plate set", &lex), ["the", "porcelain_plate_set"]);
        assert_eq!(tokenize("porcelain", &lex), ["porcelain"]);
    }
}
