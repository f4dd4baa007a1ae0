//! Runs a verification suite over every enumerated instance and prints the
//! summary, or the JSON report with `--json`.
//!
//! `cargo run --release --example verify_suite -- charts 4`

use leveltree::enumerate::EnumSpec;
use leveltree::suite::{run_enumerated, Suite};

fn main() -> leveltree::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let json = args.iter().any(|a| a == "--json");
    let rest: Vec<&String> = args.iter().filter(|a| *a != "--json").collect();
    let suite: Suite = rest.first().map_or(Ok(Suite::Charts), |s| s.parse())?;
    let max_edges = rest.get(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let report = run_enumerated(&EnumSpec::new(max_edges, 2), suite)?;
    if json {
        println!("{}", report.to_json(false));
    } else {
        print!("{}", report.summary());
    }
    Ok(())
}
