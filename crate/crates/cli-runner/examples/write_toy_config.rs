//! Prints the toy configuration with every default spelled out.
fn main() {
    let text = cli_runner::output::to_json(&cli_runner::Config::toy1()).expect("config serializes");
    print!("{text}");
}
