//! Transition maps between twisted charts: every choice of special vertices,
//! a change of modular parameters by units f_e, and recentering at each
//! stratum.

use leveltree::chart::ChartFrame;
use leveltree::level::{all_specials, LevelTree};

fn main() -> leveltree::Result<()> {
    // three weighted leaves under b so level -2 has a choice of special vertex
    let t = LevelTree::build(
        "o",
        &[("a", "o", 1, -2), ("b", "o", 0, -1), ("c", "b", 1, -2), ("d", "b", 1, -2), ("e", "b", 1, -2)],
        0,
    )?;
    let frame = ChartFrame::with_default_special(t.clone(), vec!["j".into()])?;
    let specials = all_specials(&t, frame.level_data());
    let mut checked = 0;
    for sp in &specials {
        let v = frame.verify_special_vertex_transition(sp)?;
        assert!(v.ok(), "{:?}", v.failures);
        checked += v.checked;
    }
    println!("special vertex transitions: {} choices, {checked} identities", specials.len());
    for with_f in [false, true] {
        let v = frame.verify_parameter_transition(with_f)?;
        println!("parameter transition (units f_e: {with_f}): {} identities, ok {}", v.checked, v.ok());
    }
    for sub in frame.partition().subsets() {
        let v = frame.verify_stratum_transition(&sub)?;
        println!("stratum transition at I = {}: {} identities, ok {}", sub.display(t.tree()), v.checked, v.ok());
    }
    Ok(())
}
