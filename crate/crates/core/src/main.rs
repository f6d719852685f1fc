fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(nc_hydrogen::cli::run(std::env::args_os()))
}
