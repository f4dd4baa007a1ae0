//! Prints the chart of the two-level example tree on every stratum.

use leveltree::chart::ChartFrame;
use leveltree::fixtures::{fig2, fig2_special};
use leveltree::monomial::Mark;

fn main() -> leveltree::Result<()> {
    let t = fig2();
    let special = fig2_special(&t);
    let frame = ChartFrame::new(t, special, vec![], Mark::Plain)?;
    print!("{}", frame.report()?);
    Ok(())
}
