use clap::Parser;
use k3ls::{run, Cli, UsageError};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version print to stdout and exit 0; real parse
            // failures are usage errors.
            err.print().ok();
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            std::process::exit(code);
        }
    };
    match run(&cli) {
        Ok(text) => {
            if let Some(path) = &cli.output {
                if let Err(err) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {err}", path.display());
                    std::process::exit(2);
                }
            } else {
                print!("{text}");
            }
        }
        Err(err) => {
            if err.downcast_ref::<UsageError>().is_some() {
                eprintln!("{err}");
                std::process::exit(1);
            }
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}
