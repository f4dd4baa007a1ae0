//! Blowup bookkeeping for the worked example: traverse sections of γ̄, the
//! pullbacks of the Y_k, the ideal transforms, and the ψ₂ reconstruction.

use leveltree::blowup::{blowup_data, bundle_identity, ideal_transform_check, psi2_level_tree, yk_pullback, BlowupSchedule};
use leveltree::chart::{ChartFrame, TwistedChart};
use leveltree::fixtures::{fig2, fig2_special};
use leveltree::level::is_equivalent;
use leveltree::monomial::Mark;

fn main() -> leveltree::Result<()> {
    let t = fig2();
    let tree = t.tree();
    let schedule = BlowupSchedule::new(&t.base)?;
    for (k, s) in &schedule.sections {
        let names: Vec<&str> = s.iter().map(|e| tree.name(*e)).collect();
        println!("step {k}: section {{{}}}", names.join(", "));
    }
    let frame = ChartFrame::new(t.clone(), fig2_special(&t), vec![], Mark::Plain)?;
    let chart = TwistedChart::new(frame.clone());
    for k in 1..=tree.edge_count() {
        let (d, v) = yk_pullback(&chart, k)?;
        println!("Y_{k} pulls back to the divisor of {d} ({} checks, ok {})", v.checked, v.ok());
    }
    for step in 1..=tree.edge_count() {
        let s = ideal_transform_check(&frame, step)?;
        println!("ideal transform at step {}: factor {}, ok {}", s.step, s.factor, s.verdict.ok());
    }
    println!("bundle identity ok: {}", bundle_identity(&frame)?.ok());
    let data = blowup_data(&t)?;
    let back = psi2_level_tree(&t.base, &data)?;
    println!("ψ₂ gives {back}, equivalent to t: {}", is_equivalent(&back, &t) && is_equivalent(&t, &back));
    Ok(())
}
