fn main() {
    std::process::exit(cdoa_loc::cli_run());
}
