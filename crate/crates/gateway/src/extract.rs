use serde::{Deserialize, Serialize};

use crate::GatewayError;

const MARKER: &str = "heuristic description:";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub description: String,
    pub code_block: String,
    pub raw: String,
}

/// Byte offset of the description marker and the description text after it.
fn find_description(text: &str) -> Option<(usize, usize, String)> {
    let lower = text.to_ascii_lowercase();
    let at = lower.find(MARKER)?;
    let line_end = text[at..].find('\n').map_or(text.len(), |i| at + i);
    let desc = text[at + MARKER.len()..line_end].trim().trim_matches(|c| matches!(c, '\'' | '"' | '`')).trim();
    Some((at, line_end, desc.to_string()))
}

/// Contents of the first ``` fence; an unterminated fence runs to the end.
fn first_fence(text: &str) -> Option<&str> {
    let open = text.find("```")?;
    let after = &text[open + 3..];
    // skip a language tag on the opening line
    let body_start = after.find('\n').map_or(after.len(), |i| i + 1);
    let body = &after[body_start..];
    Some(match body.find("```") {
        Some(close) => &body[..close],
        None => body,
    })
}

/// Pulls a heuristic out of a model response: the first fenced block wins;
/// without fences, everything after the description line is taken.
pub fn extract_heuristic(response: &str) -> Result<ExtractionResult, GatewayError> {
    let description = find_description(response);
    let code = match first_fence(response) {
        Some(block) => block.trim().to_string(),
        None => match &description {
            Some((_, line_end, _)) => response[*line_end..].trim().to_string(),
            None => String::new(),
        },
    };
    if code.is_empty() {
        let why = if response.trim().is_empty() { "response is empty" } else { "no fenced block or description line" };
        return Err(GatewayError::Extraction(why.into()));
    }
    Ok(ExtractionResult {
        description: description.map(|d| d.2).unwrap_or_default(),
        code_block: code,
        raw: response.to_string(),
    })
}
