fn main() {
    std::process::exit(cascade_discord_cli::run_cli(std::env::args_os()));
}
