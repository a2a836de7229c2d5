use clap::Parser;
use submatrix_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    if let Err(e) = submatrix_cli::run(cli, &mut stdout.lock()) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
