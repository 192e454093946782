//! Deterministic, language-portable tokenizer.
//!
//! Rules: lowercase, split on Unicode whitespace, peel leading/trailing
//! punctuation into separate tokens, and split a trailing "n't" into its
//! own token so it can act as a negation trigger.

/// Splits `text` into lowercased tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        push_chunk_tokens(&chunk.to_lowercase(), &mut tokens);
    }
    tokens
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn push_chunk_tokens(chunk: &str, tokens: &mut Vec<String>) {
    let chars: Vec<char> = chunk.chars().collect();
    let mut start = 0;
    while start < chars.len() && !is_word_char(chars[start]) {
        start += 1;
    }
    let mut end = chars.len();
    while end > start && !is_word_char(chars[end - 1]) {
        end -= 1;
    }

    // leading punctuation, one token per character
    for &c in &chars[..start] {
        tokens.push(c.to_string());
    }

    if end > start {
        let core: String = chars[start..end].iter().collect();
        if let Some(stem) = core.strip_suffix("n't") {
            if !stem.is_empty() {
                tokens.push(stem.to_string());
                tokens.push("n't".to_string());
            } else {
                tokens.push(core);
            }
        } else {
            tokens.push(core);
        }
    }

    for &c in &chars[end..] {
        tokens.push(c.to_string());
    }
}
