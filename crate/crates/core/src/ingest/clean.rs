//! Comment body cleaning and tokenization.
//!
//! Pipeline per whitespace-delimited token:
//!
//! 1. lowercase;
//! 2. drop the token if it contains `http` (links are caught intact, before
//!    punctuation is stripped);
//! 3. drop the token if it is a listed HTML artifact (also with a trailing
//!    `;`, the usual entity spelling);
//! 4. strip every Unicode punctuation character and every ASCII symbol,
//!    plus U+200B ZERO WIDTH SPACE. Apostrophes disappear without splitting,
//!    so `don't` becomes `dont`. Hyphens are removed the same way unless
//!    [`HyphenMode::Split`] is selected;
//! 5. drop the token if the stripped form is a listed artifact (this is how
//!    `&#x200B;` is caught) or empty.
//!
//! Characters that are still uppercase after lowercasing (letterlike symbols
//! such as `ℍ` have no lowercase mapping) are removed as well.

use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HyphenMode {
    /// `well-known` → `wellknown`
    #[default]
    Remove,
    /// `well-known` → `well`, `known`
    Split,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CleanConfig {
    pub artifacts: Vec<String>,
    pub hyphens: HyphenMode,
}

impl Default for CleanConfig {
    fn default() -> Self {
        Self {
            artifacts: vec!["&gt".into(), "x200b".into(), "&amp".into()],
            hyphens: HyphenMode::Remove,
        }
    }
}

/// Tokens of one comment after cleaning.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenStream {
    pub comment_id: String,
    pub tokens: Vec<String>,
}

const ZERO_WIDTH_SPACE: char = '\u{200B}';

fn is_punctuation(c: char) -> bool {
    use GeneralCategory::*;
    c.is_ascii_punctuation()
        || c == ZERO_WIDTH_SPACE
        || matches!(
            get_general_category(c),
            ConnectorPunctuation
                | DashPunctuation
                | OpenPunctuation
                | ClosePunctuation
                | InitialPunctuation
                | FinalPunctuation
                | OtherPunctuation
        )
}

fn is_dash(c: char) -> bool {
    c == '-' || get_general_category(c) == GeneralCategory::DashPunctuation
}

/// Reusable cleaner; owns the lowercased artifact list.
#[derive(Debug, Clone)]
pub struct Cleaner {
    artifacts: Vec<String>,
    hyphens: HyphenMode,
}

impl Default for Cleaner {
    fn default() -> Self {
        Self::new(&CleanConfig::default())
    }
}

impl Cleaner {
    pub fn new(config: &CleanConfig) -> Self {
        Self {
            artifacts: config.artifacts.iter().map(|a| a.to_lowercase()).collect(),
            hyphens: config.hyphens,
        }
    }

    fn is_artifact(&self, tok: &str) -> bool {
        let bare = tok.strip_suffix(';').unwrap_or(tok);
        self.artifacts.iter().any(|a| a == tok || a == bare)
    }

    fn push_stripped(&self, piece: &str, out: &mut Vec<String>) {
        let stripped: String = piece
            .chars()
            .filter(|&c| !is_punctuation(c) && !c.is_uppercase())
            .collect();
        // "ht-tp" only spells http once stripped
        if !stripped.is_empty() && !stripped.contains("http") && !self.artifacts.contains(&stripped)
        {
            out.push(stripped);
        }
    }

    /// Appends the cleaned tokens of `body` to `out`.
    pub fn tokenize_into(&self, body: &str, out: &mut Vec<String>) {
        for raw in body.split_whitespace() {
            let tok = raw.to_lowercase();
            if tok.contains("http") || self.is_artifact(&tok) {
                continue;
            }
            match self.hyphens {
                HyphenMode::Remove => self.push_stripped(&tok, out),
                HyphenMode::Split => {
                    for piece in tok.split(is_dash) {
                        self.push_stripped(piece, out);
                    }
                }
            }
        }
    }

    pub fn tokenize(&self, body: &str) -> Vec<String> {
        let mut out = Vec::new();
        self.tokenize_into(body, &mut out);
        out
    }
}

/// Cleans one comment body with the given artifact list.
pub fn clean_text(body: &str, config: &CleanConfig) -> Vec<String> {
    Cleaner::new(config).tokenize(body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn clean(s: &str) -> Vec<String> {
        clean_text(s, &CleanConfig::default())
    }

    #[test]
    fn drops_links_and_artifacts() {
        assert_eq!(
            clean("Check this http://x.com &gt NOW!"),
            ["check", "this", "now"]
        );
    }

    #[test]
    fn apostrophes_removed_without_split() {
        assert_eq!(clean("You're a don't"), ["youre", "a", "dont"]);
        assert_eq!(clean("you\u{2019}re"), ["youre"]);
    }

    #[test]
    fn empty_body() {
        assert!(clean("").is_empty());
        assert!(clean(" \t\n").is_empty());
    }

    #[test]
    fn entity_spellings_of_artifacts() {
        assert_eq!(
            clean("&gt; quoted &amp; more &#x200B; x200b"),
            ["quoted", "more"]
        );
        assert_eq!(clean("a\u{200B}b \u{200B}"), ["ab"]);
    }

    #[test]
    fn http_substring_anywhere() {
        assert_eq!(clean("(https://a.b) HTTP www.x.com"), ["wwwxcom"]);
    }

    #[test]
    fn hyphen_modes() {
        assert_eq!(clean("well-known"), ["wellknown"]);
        let split = CleanConfig {
            hyphens: HyphenMode::Split,
            ..Default::default()
        };
        assert_eq!(clean_text("well-known — x", &split), ["well", "known", "x"]);
    }

    #[test]
    fn symbols_and_unicode_punctuation() {
        assert_eq!(
            clean("$5 «quote» 100% a+b ¿que?"),
            ["5", "quote", "100", "ab", "que"]
        );
    }

    #[test]
    fn letterlike_uppercase_removed() {
        assert_eq!(clean("ℍello"), ["ello"]);
    }

    proptest! {
        #[test]
        fn output_obeys_token_invariants(body in "\\PC{0,80}", extra in "[A-Za-z'&;!.\\- ]{0,30}") {
            let cfg = CleanConfig::default();
            let text = format!("{body} {extra}");
            for tok in clean_text(&text, &cfg) {
                prop_assert!(!tok.is_empty());
                prop_assert!(!tok.contains("http"));
                prop_assert!(!tok.chars().any(is_punctuation), "{:?}", tok);
                prop_assert!(!tok.chars().any(char::is_uppercase), "{:?}", tok);
                prop_assert!(!tok.chars().any(char::is_whitespace));
                prop_assert!(!cfg.artifacts.contains(&tok));
            }
        }
    }
}
