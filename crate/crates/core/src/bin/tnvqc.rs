use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = tnvqc::cli::Cli::parse();
    if let Err(e) = tnvqc::cli::init_thread_pool().and_then(|_| tnvqc::cli::run(cli)) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
