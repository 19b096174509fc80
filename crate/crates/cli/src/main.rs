use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = dimer_cli::Cli::parse();
    match dimer_cli::run(&cli) {
        Ok(manifest) => {
            println!("{} artifacts written for {}", manifest.artifacts.len(), manifest.command);
        }
        Err(e) => {
            eprintln!("{}", e.line());
            std::process::exit(e.exit_code());
        }
    }
}
