//! Explain why a literal is a possible answer over an inconsistent KB.
//!
//! Usage: `cargo run -p psaf --example explain -- <kb-file> <literal>`

use std::process::ExitCode;

use psaf::dialogue::attempt_dialogue;
use psaf::logic::{parse_kb, Formula};
use psaf::render::render_text;
use psaf::semantics::{AcceptanceMode, SemanticsKind};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let [_, path, query] = args.as_slice() else {
        eprintln!("usage: explain <kb-file> <literal>");
        return ExitCode::from(2);
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{path}: {e}");
            return ExitCode::from(2);
        }
    };
    let run = || -> Result<bool, Box<dyn std::error::Error>> {
        let kb = parse_kb(&text)?;
        let phi = Formula::parse(query)?;
        let mode = AcceptanceMode::Credulous(SemanticsKind::Preferred);
        let g = attempt_dialogue(&kb, &phi, mode)?;
        let ok = g.classification.successful_for(mode);
        println!("{phi} is {}a possible answer", if ok { "" } else { "not " });
        print!("{}", render_text(&g.dialogue, &g.tree, mode));
        Ok(ok)
    };
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
