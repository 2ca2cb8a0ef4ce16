/// Word prefixes that suggest a comment talks about licensing.
const CUES: &[&str] = &["licens", "licenc", "copyright", "permission", "warrant", "redistribut"];

/// Whether `text` contains a license cue word.
pub fn has_license_cue(text: &str) -> bool {
    text.split(|c: char| !c.is_alphanumeric())
        .map(str::to_lowercase)
        .any(|w| CUES.iter().any(|c| w.starts_with(c)))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Syntax {
    Hash,
    CLike,
}

fn syntax_for(ext: &str) -> Syntax {
    match ext.to_ascii_lowercase().as_str() {
        "py" | "sh" | "rb" | "pl" | "r" | "toml" | "yaml" | "yml" => Syntax::Hash,
        _ => Syntax::CLike,
    }
}

/// The comment block at the top of a source file, with comment markers
/// removed. Blank lines may appear inside the block; the first line of code
/// ends it. A shebang or encoding line at the very top is skipped, and a
/// leading docstring counts as a comment in Python.
pub fn leading_comment_block(text: &str, ext: &str) -> Option<String> {
    let syntax = syntax_for(ext);
    let mut out: Vec<String> = Vec::new();
    let mut in_block = false;
    let mut docstring: Option<&str> = None;
    let mut first = true;
    for raw in text.lines() {
        let line = raw.trim();
        if first && line.starts_with("#!") {
            first = false;
            continue;
        }
        first = false;
        if let Some(q) = docstring {
            match line.find(q) {
                Some(at) => {
                    out.push(line[..at].to_string());
                    docstring = None;
                }
                None => out.push(line.to_string()),
            }
            continue;
        }
        if in_block {
            match line.find("*/") {
                Some(at) => {
                    out.push(strip_star(&line[..at]));
                    in_block = false;
                }
                None => out.push(strip_star(line)),
            }
            continue;
        }
        if line.is_empty() {
            out.push(String::new());
            continue;
        }
        match syntax {
            Syntax::Hash => {
                if let Some(rest) = line.strip_prefix('#') {
                    if rest.contains("-*- coding") || rest.trim_start().starts_with("coding:") {
                        continue;
                    }
                    out.push(rest.trim_start_matches('#').trim().to_string());
                } else if let Some(q) = ["\"\"\"", "'''"].into_iter().find(|q| line.starts_with(q)) {
                    let rest = &line[3..];
                    match rest.find(q) {
                        Some(at) => out.push(rest[..at].to_string()),
                        None => {
                            out.push(rest.to_string());
                            docstring = Some(q);
                        }
                    }
                } else {
                    break;
                }
            }
            Syntax::CLike => {
                if let Some(rest) = line.strip_prefix("//") {
                    out.push(rest.trim_start_matches(['/', '!']).trim().to_string());
                } else if let Some(rest) = line.strip_prefix("/*") {
                    let rest = rest.trim_start_matches(['*', '!']);
                    match rest.find("*/") {
                        Some(at) => out.push(rest[..at].trim().to_string()),
                        None => {
                            out.push(rest.trim().to_string());
                            in_block = true;
                        }
                    }
                } else {
                    break;
                }
            }
        }
    }
    while out.last().is_some_and(|l| l.trim().is_empty()) {
        out.pop();
    }
    while out.first().is_some_and(|l| l.trim().is_empty()) {
        out.remove(0);
    }
    let block = out.join("\n");
    (!block.trim().is_empty()).then_some(block)
}

fn strip_star(line: &str) -> String {
    let l = line.trim();
    l.strip_prefix('*').unwrap_or(l).trim().to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_block() {
        let src = "/*\n * Copyright (c) 2020 X\n *\n * Permission is hereby granted.\n */\n#include <stdio.h>\n/* later */\n";
        let b = leading_comment_block(src, "c").unwrap();
        assert_eq!(b, "Copyright (c) 2020 X\n\nPermission is hereby granted.");
        assert!(has_license_cue(&b));
    }

    #[test]
    fn line_comments_and_code() {
        let src = "// TODO: refactor\nfn main() {}\n// Licensed under MIT\n";
        let b = leading_comment_block(src, "rs").unwrap();
        assert_eq!(b, "TODO: refactor");
        assert!(!has_license_cue(&b));
        assert!(leading_comment_block("fn main() {}\n// Copyright\n", "rs").is_none());
    }

    #[test]
    fn python_header() {
        let src = "#!/usr/bin/env python\n# -*- coding: utf-8 -*-\n# Copyright 2020 Y\n# Licensed under the MIT License\nimport os\n";
        assert_eq!(leading_comment_block(src, "py").unwrap(), "Copyright 2020 Y\nLicensed under the MIT License");
        let doc = "\"\"\"Module.\n\nRedistribution is permitted.\n\"\"\"\nimport os\n";
        assert!(leading_comment_block(doc, "py").unwrap().contains("Redistribution"));
    }
}
