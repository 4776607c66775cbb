fn main() { std::process::exit(tcpair::cli::run()); }
