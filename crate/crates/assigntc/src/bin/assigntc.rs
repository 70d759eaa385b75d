// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::process::ExitCode;

use assigntc::cli::{run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = match run(cli, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr.lock(), "error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
