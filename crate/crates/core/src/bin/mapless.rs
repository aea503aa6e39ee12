fn main() {
    std::process::exit(mapless_planner::cli::dispatch(std::env::args_os()));
}
