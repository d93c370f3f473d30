//! Tweet cleaning.
//!
//! Two pipelines over raw social-media text:
//!
//! * [`clean_basic`] deletes `@mentions` and URLs and collapses whitespace.
//! * [`clean_rich`] replaces mentions with the word `username`, URLs with
//!   `url`, and known emoji with their short textual names.
//!
//! Both are total functions (any Unicode in, possibly-empty string out),
//! idempotent, and applied per row by [`clean_dataset`]. Case is left
//! untouched here; lowercasing is a tokenizer concern.

use alloc::string::String;
use alloc::vec::Vec;

use crate::emoji;

/// A labelled tweet as ingested, before any cleaning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTweet {
    pub text: String,
    pub label: String,
}

/// A labelled tweet after cleaning. The text contains no mention or URL
/// pattern, no doubled whitespace, and no leading/trailing whitespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanTweet {
    pub text: String,
    pub label: String,
}

/// Which cleaning pipeline to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CleanMode {
    Basic,
    Rich,
}

impl CleanMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CleanMode::Basic => "basic",
            CleanMode::Rich => "rich",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "basic" => Some(CleanMode::Basic),
            "rich" => Some(CleanMode::Rich),
            _ => None,
        }
    }
}

/// Row counts reported by [`clean_dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CleanSummary {
    pub total: usize,
    /// Rows whose text became empty after cleaning (kept in the output).
    pub emptied: usize,
}

/// Deletes mentions (`@` plus one or more non-whitespace characters) and
/// URLs (`http://`, `https://`, or `www.` up to the next whitespace), then
/// collapses whitespace runs to single spaces and trims.
pub fn clean_basic(raw: &str) -> String {
    collapse_whitespace(&strip_entities(raw, CleanMode::Basic))
}

/// Replaces mentions with `username`, URLs with `url`, and table emoji
/// with their short names; drops ZWJ and variation selectors; collapses
/// whitespace and trims.
pub fn clean_rich(raw: &str) -> String {
    collapse_whitespace(&strip_entities(raw, CleanMode::Rich))
}

/// Applies the selected cleaner to the text given mode.
pub fn clean_text(raw: &str, mode: CleanMode) -> String {
    match mode {
        CleanMode::Basic => clean_basic(raw),
        CleanMode::Rich => clean_rich(raw),
    }
}

/// Cleans every row, passing labels through unchanged and preserving
/// order. Rows that clean to the empty string are kept and counted in the
/// summary.
pub fn clean_dataset(rows: &[RawTweet], mode: CleanMode) -> (Vec<CleanTweet>, CleanSummary) {
    let mut emptied = 0;
    let cleaned = rows
        .iter()
        .map(|row| {
            let text = clean_text(&row.text, mode);
            if text.is_empty() {
                emptied += 1;
            }
            CleanTweet {
                text,
                label: row.label.clone(),
            }
        })
        .collect();
    (
        cleaned,
        CleanSummary {
            total: rows.len(),
            emptied,
        },
    )
}

fn strip_entities(raw: &str, mode: CleanMode) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut i = 0;
    while i < raw.len() {
        let rest = &raw[i..];

        // Mention: '@' followed by at least one non-whitespace character.
        // A bare '@' is ordinary text.
        if let Some(after) = rest.strip_prefix('@') {
            let run = non_space_run_len(after);
            if run > 0 {
                if mode == CleanMode::Rich {
                    out.push_str(" username ");
                }
                i += 1 + run;
                continue;
            }
        }

        if rest.starts_with("http://") || rest.starts_with("https://") || rest.starts_with("www.") {
            let run = non_space_run_len(rest);
            if mode == CleanMode::Rich {
                out.push_str(" url ");
            }
            i += run;
            continue;
        }

        let c = rest.chars().next().expect("non-empty rest");
        if mode == CleanMode::Rich {
            if let Some(name) = emoji::short_name(c) {
                out.push(' ');
                out.push_str(name);
                out.push(' ');
            } else if matches!(c, '\u{200D}' | '\u{FE0E}' | '\u{FE0F}') {
                // Zero-width joiners and variation selectors would otherwise
                // glue onto a replacement word and pollute the token.
            } else {
                out.push(c);
            }
        } else {
            out.push(c);
        }
        i += c.len_utf8();
    }
    out
}

/// Byte length of the leading run of non-whitespace characters.
fn non_space_run_len(s: &str) -> usize {
    let mut len = 0;
    for c in s.chars() {
        if c.is_whitespace() {
            break;
        }
        len += c.len_utf8();
    }
    len
}

/// Normalizes every whitespace character to an ASCII space, collapses
/// runs, and trims both ends.
fn collapse_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut pending = false;
    for c in s.chars() {
        if c.is_whitespace() {
            if !out.is_empty() {
                pending = true;
            }
        } else {
            if pending {
                out.push(' ');
                pending = false;
            }
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn contains_mention(s: &str) -> bool {
        for (i, c) in s.char_indices() {
            if c == '@' {
                if let Some(next) = s[i + 1..].chars().next() {
                    if !next.is_whitespace() {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn contains_url(s: &str) -> bool {
        s.contains("http://") || s.contains("https://") || s.contains("www.")
    }

    #[test]
    fn basic_deletes_mentions_and_urls() {
        assert_eq!(clean_basic("@john check https://t.co/x now"), "check now");
    }

    #[test]
    fn basic_is_noop_on_clean_text() {
        assert_eq!(clean_basic("hello world"), "hello world");
    }

    #[test]
    fn basic_collapses_whitespace_only_to_empty() {
        assert_eq!(clean_basic("   "), "");
    }

    #[test]
    fn basic_handles_all_url_forms() {
        assert_eq!(clean_basic("a http://x b"), "a b");
        assert_eq!(clean_basic("a https://x/y?z=1 b"), "a b");
        assert_eq!(clean_basic("a www.example.com b"), "a b");
    }

    #[test]
    fn basic_keeps_bare_at_sign() {
        assert_eq!(clean_basic("meet @ noon"), "meet @ noon");
    }

    #[test]
    fn basic_deletes_mid_token_entities() {
        assert_eq!(clean_basic("a@b c"), "a c");
        assert_eq!(clean_basic("foohttp://x bar"), "foo bar");
    }

    #[test]
    fn rich_replaces_mention_url_emoji() {
        assert_eq!(
            clean_rich("@john check https://t.co/x 😀"),
            "username check url grinning_face"
        );
    }

    #[test]
    fn rich_is_noop_without_entities() {
        assert_eq!(clean_rich("no entities here"), "no entities here");
    }

    #[test]
    fn rich_two_mentions() {
        assert_eq!(clean_rich("@a @b"), "username username");
    }

    #[test]
    fn rich_adjacent_emoji_stay_separate_words() {
        assert_eq!(clean_rich("😀😀"), "grinning_face grinning_face");
    }

    #[test]
    fn rich_drops_variation_selector() {
        // U+2764 U+FE0F is the common "red heart" sequence.
        assert_eq!(clean_rich("x \u{2764}\u{FE0F} y"), "x red_heart y");
    }

    #[test]
    fn rich_leaves_unknown_emoji_untouched() {
        // U+1FAE0 (melting face) is not in the table.
        assert_eq!(clean_rich("a \u{1FAE0} b"), "a \u{1FAE0} b");
    }

    #[test]
    fn dataset_preserves_order_and_labels() {
        let rows = [
            RawTweet {
                text: String::from("first tweet"),
                label: String::from("hate"),
            },
            RawTweet {
                text: String::from("second tweet"),
                label: String::from("non-hate"),
            },
        ];
        let (cleaned, summary) = clean_dataset(&rows, CleanMode::Basic);
        assert_eq!(cleaned.len(), 2);
        assert_eq!(cleaned[0].text, "first tweet");
        assert_eq!(cleaned[0].label, "hate");
        assert_eq!(cleaned[1].label, "non-hate");
        assert_eq!(summary.total, 2);
        assert_eq!(summary.emptied, 0);
    }

    #[test]
    fn dataset_flags_emptied_rows() {
        let rows = [RawTweet {
            text: String::from("@x"),
            label: String::from("hate"),
        }];
        let (cleaned, summary) = clean_dataset(&rows, CleanMode::Basic);
        assert_eq!(cleaned[0].text, "");
        assert_eq!(summary.emptied, 1);
    }

    #[test]
    fn dataset_rich_emoji_lookup() {
        let rows = [RawTweet {
            text: String::from("😀"),
            label: String::from("hate"),
        }];
        let (cleaned, summary) = clean_dataset(&rows, CleanMode::Rich);
        assert_eq!(cleaned[0].text, "grinning_face");
        assert_eq!(summary.emptied, 0);
    }

    /// Strings that look like tweets: words, mentions, URLs, emoji, and
    /// assorted whitespace.
    fn tweet_strategy() -> impl Strategy<Value = String> {
        let piece = prop_oneof![
            "[a-zA-Z0-9'#!.,]{1,8}",
            "@[a-zA-Z0-9_]{1,6}",
            Just(String::from("@")),
            Just(String::from("http://t.co/abc")),
            Just(String::from("https://ex.am/p?q=1")),
            Just(String::from("www.site.org")),
            Just(String::from("😀")),
            Just(String::from("🔥")),
            Just(String::from("\u{2764}\u{FE0F}")),
            "\\PC{0,4}",
        ];
        let sep = prop_oneof![
            Just(String::from(" ")),
            Just(String::from("  ")),
            Just(String::from("\t")),
            Just(String::from("\n")),
            Just(String::from("")),
        ];
        proptest::collection::vec((piece, sep), 0..8).prop_map(|parts| {
            let mut s = String::new();
            for (p, sep) in parts {
                s.push_str(&p);
                s.push_str(&sep);
            }
            s
        })
    }

    proptest! {
        #[test]
        fn cleaning_is_idempotent(s in tweet_strategy()) {
            let basic = clean_basic(&s);
            prop_assert_eq!(clean_basic(&basic), basic.clone());
            let rich = clean_rich(&s);
            prop_assert_eq!(clean_rich(&rich), rich.clone());
        }

        #[test]
        fn output_matches_no_entity_pattern(s in tweet_strategy()) {
            for out in [clean_basic(&s), clean_rich(&s)] {
                prop_assert!(!contains_mention(&out), "mention in {out:?}");
                prop_assert!(!contains_url(&out), "url in {out:?}");
                prop_assert!(!out.starts_with(' ') && !out.ends_with(' '));
                prop_assert!(!out.contains("  "));
                prop_assert!(out.chars().all(|c| !c.is_whitespace() || c == ' '));
            }
        }

        #[test]
        fn basic_invents_no_text(s in tweet_strategy()) {
            // Deletion-only cleaning: every output token is a substring of
            // the input.
            let out = clean_basic(&s);
            for token in out.split(' ').filter(|t| !t.is_empty()) {
                prop_assert!(s.contains(token), "token {token:?} not in input {s:?}");
            }
        }
    }
}
