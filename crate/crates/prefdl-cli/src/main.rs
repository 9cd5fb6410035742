//! Command line front end: interactive REPL and batch runner.
//!
//! Exit codes: 0 success, 1 engine error, 2 parse error, 3 resource cap.
//! In batch mode every command runs (a failing command leaves the session
//! unchanged) and the exit code reports the first error encountered.

use std::io::{BufRead, IsTerminal, Write};
use std::process::ExitCode;

use clap::Parser;
use prefdl::session::{run_script, state_from_theory_file, Command, Output, Session};

#[derive(Parser)]
#[command(
    name = "prefdl",
    about = "Preference default theories: extensions, accepted conclusions, belief revision",
    version
)]
struct Args {
    /// Theory file or saved session to load before anything else
    #[arg(long)]
    theory: Option<String>,
    /// Run the commands in this file instead of an interactive session
    #[arg(long)]
    script: Option<String>,
    /// Emit one JSON document per command instead of human-readable text
    #[arg(long)]
    machine: bool,
}

fn print_output(out: &Output, machine: bool) {
    if machine {
        println!("{}", out.machine_line());
    } else {
        println!("{}", out.human);
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut session = Session::new();

    if let Some(path) = &args.theory {
        match state_from_theory_file(path) {
            Ok(state) => session = Session::with_state(state),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }

    let mut first_error: Option<i32> = None;
    let mut track = |out: &Output| {
        if let (None, Some(code)) = (first_error, out.error) {
            first_error = Some(code.exit_code());
        }
    };

    if let Some(path) = &args.script {
        let script = match std::fs::read_to_string(path) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: cannot read {path}: {e}");
                return ExitCode::from(2);
            }
        };
        for out in run_script(&mut session, &script) {
            print_output(&out, args.machine);
            track(&out);
        }
        return exit_with(first_error);
    }

    // interactive session on stdin
    let interactive = std::io::stdin().is_terminal();
    let stdin = std::io::stdin();
    let mut lines = stdin.lock().lines();
    loop {
        if interactive {
            print!("prefdl> ");
            std::io::stdout().flush().ok();
        }
        let Some(Ok(line)) = lines.next() else { break };
        match Command::parse(&line) {
            Ok(None) => {}
            Ok(Some(cmd)) => {
                let out = session.execute(&cmd);
                print_output(&out, args.machine);
                track(&out);
                if out.quit {
                    break;
                }
            }
            Err(msg) => {
                let out = Output {
                    command: "parse".into(),
                    error: Some(prefdl::session::ErrorCode::Parse),
                    data: serde_json::json!({ "code": "parse-error", "message": msg }),
                    human: format!("error: {msg}"),
                    quit: false,
                };
                print_output(&out, args.machine);
                track(&out);
            }
        }
    }
    exit_with(first_error)
}

fn exit_with(first_error: Option<i32>) -> ExitCode {
    match first_error {
        None => ExitCode::SUCCESS,
        Some(code) => ExitCode::from(code as u8),
    }
}
