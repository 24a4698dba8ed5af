use clap::Parser;
use lca_cli::{render, run, Cli, Command};

fn main() {
    let cli = Cli::parse();
    let report = run(&cli);
    print!("{}", render(&cli, &report));
    if let Some(e) = &report.error {
        eprintln!("lca: {e}");
    }
    if let (Some(path), false) = (&cli.out, matches!(cli.command, Command::Induce { .. })) {
        if let Err(e) = std::fs::write(path, report.to_json() + "\n") {
            eprintln!("lca: cannot write {}: {e}", path.display());
            std::process::exit(2);
        }
    }
    std::process::exit(report.exit_status);
}
