//! Converts a bracket-annotated corpus to the TSV training format.
//!
//! `cargo run -p lidetect-core --example bracket_to_tsv -- labeled.txt > labeled.tsv`

use std::process::ExitCode;

use lidetect_core::term_id::{read_bracketed, write_tsv};

fn main() -> ExitCode {
    let Some(path) = std::env::args().nth(1) else {
        eprintln!("usage: bracket_to_tsv <corpus.txt>");
        return ExitCode::from(2);
    };
    let raw = match std::fs::read_to_string(&path) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{path}: {e}");
            return ExitCode::from(2);
        }
    };
    match read_bracketed(&raw) {
        Ok(sentences) => {
            print!("{}", write_tsv(&sentences));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{path}: {e}");
            ExitCode::FAILURE
        }
    }
}
