//! Prompt templates.
//!
//! Templates are plain-text files under `prompts/`, compiled in. Changing a
//! template changes model behavior, so the tests pin each file by SHA-256;
//! bump [`PROMPT_VERSION`] together with the hashes.

use alloc::string::String;

pub const PROMPT_VERSION: u32 = 1;

pub const RIGOR_TABLE: &str = include_str!("../prompts/rigor_table.txt");
pub const TEXT_SENTENCE: &str = include_str!("../prompts/text_sentence.txt");
pub const TURTLE_REPAIR: &str = include_str!("../prompts/turtle_repair.txt");
pub const KG_EXTRACT: &str = include_str!("../prompts/kg_extract.txt");
pub const KG_REPAIR: &str = include_str!("../prompts/kg_repair.txt");
pub const ANSWER: &str = include_str!("../prompts/answer.txt");

/// Fills `{{key}}` placeholders in a single pass; substituted text is never
/// rescanned. Unknown placeholders are left as they are.
pub fn render(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find("{{") {
        out.push_str(&rest[..open]);
        let after = &rest[open + 2..];
        match after.find("}}") {
            Some(close) => {
                let key = &after[..close];
                match vars.iter().find(|(k, _)| *k == key) {
                    Some((_, v)) => out.push_str(v),
                    None => {
                        out.push_str("{{");
                        out.push_str(key);
                        out.push_str("}}");
                    }
                }
                rest = &after[close + 2..];
            }
            None => {
                out.push_str(&rest[open..]);
                rest = "";
            }
        }
    }
    out.push_str(rest);
    out
}
