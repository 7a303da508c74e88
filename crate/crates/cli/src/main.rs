use clap::Parser;

fn main() {
    let cli = qoper_cli::Cli::parse();
    std::process::exit(qoper_cli::run(&cli));
}
