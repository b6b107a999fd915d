//! Prompt template checks shared by the gateway tests and the acceptance
//! harness.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use autohd_core::domains::DomainId;
use autohd_gateway::prompts::proposal_prompt;

pub fn gateway_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../gateway")
}

/// Line-level wording changes that accompany the format paragraph swap.
pub const WORDING: [(&str, &str); 4] = [
    ("as a python comment. Start the python comment", "as a # comment. Start the comment"),
    ("as a python comment. Start the comment", "as a # comment. Start the comment"),
    ("as python comment. Start the python comment", "as a # comment. Start the comment"),
    ("Return your response as python code.", "Return your response as one fenced code block."),
];

/// Removes the implementation-format paragraph: from the line that starts
/// with one of `starts` up to the closing "Do not give" line.
pub fn without_format_paragraph(text: &str, starts: &[&str]) -> String {
    let begin = starts.iter().find_map(|s| text.find(s)).expect("format paragraph start");
    let end = text.find("Do not give additional explanations.").expect("format paragraph end");
    format!("{}{}", &text[..begin], &text[end..])
}

/// Every shipped template equals its source text once the format paragraph
/// and the wording table are applied.
pub fn templates_match_sources() -> Result<String, String> {
    let dir = gateway_dir();
    let sources = dir.join("tests/golden/source");
    let read = |p: PathBuf| fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()));
    let mut checked = 0;
    for kind in ["proposal", "evolution"] {
        for d in DomainId::ALL {
            let name = format!("{kind}_{d}.txt");
            let mut source = read(sources.join(&name))?;
            for (from, to) in WORDING {
                source = source.replace(from, to);
            }
            let template = read(dir.join("prompts").join(&name))?;
            if without_format_paragraph(&template, &["Next, write", "Thirdly, write"])
                != without_format_paragraph(&source, &["Next, implement", "Thirdly, implement"])
            {
                return Err(format!("{name} differs outside the format paragraph"));
            }
            checked += 1;
        }
    }
    if read(sources.join("evolution_types.txt"))? != read(dir.join("prompts/evolution_types.txt"))? {
        return Err("evolution_types.txt differs".into());
    }
    Ok(format!("{checked} templates plus the evolution type list"))
}

/// Rendered proposal prompts byte-match the committed goldens.
pub fn proposal_goldens_match() -> Result<String, String> {
    for d in DomainId::ALL {
        let path = gateway_dir().join(format!("tests/golden/proposal_{d}.txt"));
        let expected = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        if expected != proposal_prompt(d) {
            return Err(format!("proposal prompt for {d} differs from {}", path.display()));
        }
    }
    Ok(format!("{} proposal prompts", DomainId::ALL.len()))
}
