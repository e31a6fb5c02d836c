fn main() {
    std::process::exit(advice_games_cli::run());
}
