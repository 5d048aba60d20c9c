use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = bcf_cli::args::Cli::parse();
    if let Err(err) = bcf_cli::run(cli) {
        eprintln!("bcf: {err:#}");
        std::process::exit(1);
    }
}
