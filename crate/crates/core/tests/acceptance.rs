//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always reach stdout. The
//! process fails only on unexpected outcomes. Two lines are expected to print
//! FAIL: criterion 3 for the literal 𝕀₋ identity (see `literal_minus_identity`)
//! and criterion 6 for trees off the stable locus (see `unstable_failures`).

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use leveltree::blowup::{blowup_data, ideal_transform_check, is_stable, psi2_level_tree, yk_pullback};
use leveltree::chart::{ChartFrame, TwistedChart};
use leveltree::contraction::index_identities;
use leveltree::enumerate::{gen_instances, EnumSpec};
use leveltree::fixtures::{fig1, fig1_special, fig2, fig2_special};
use leveltree::level::{ascent_sequence, is_equivalent, lvl, LevelTree};
use leveltree::monomial::{Mark, Monomial};
use leveltree::suite::{run_on, RunReport, Suite};

const GOLDEN: &str = include_str!("golden/fig2_chart.txt");

struct Line {
    n: usize,
    pass: bool,
    expected_pass: bool,
    text: String,
}

fn emit(lines: &mut Vec<Line>, n: usize, pass: bool, expected_pass: bool, text: String) {
    println!("{} criterion {n}: {text}", if pass { "PASS" } else { "FAIL" });
    lines.push(Line { n, pass, expected_pass, text });
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn ops(r: &RunReport) -> String {
    r.operations
        .iter()
        .map(|(op, s)| format!("{op} {}/{}", s.instances - s.failed_instances, s.instances))
        .collect::<Vec<_>>()
        .join(", ")
}

fn m(s: &str) -> Monomial {
    s.parse().unwrap()
}

fn criterion_1(lines: &mut Vec<Line>) {
    let start = Instant::now();
    let t = fig2();
    let special = fig2_special(&t);
    let frame = ChartFrame::new(t, special, vec![], Mark::Plain).unwrap();
    let report = frame.report().unwrap();
    let elapsed = start.elapsed();
    // hand-transcribed values of the worked example, independent of the golden file
    let expected = [
        "  zeta_a = eps(-1) * eps(-2)",
        "  zeta_b = eps(-1)",
        "  zeta_c = eps(-2) * u_c",
        "  zeta_d = eps(-2) * u_d",
        "I = {} -> ",
        "  zeta zeta_a=0, zeta_b=0, zeta_c=0, zeta_d=0",
        "  level -1: [a: 0, b: 1]",
        "  level -2: [a: 1, c: u_c, d: u_d]",
        "  zeta zeta_a=0, zeta_b=eps(-1), zeta_c=0, zeta_d=0",
        "  level -2: [a: 1, c: u_c * eps(-1)^-1, d: u_d * eps(-1)^-1]",
        "  zeta zeta_a=0, zeta_b=0, zeta_c=eps(-2) * u_c, zeta_d=eps(-2) * u_d",
        "  level -1: [a: eps(-2), b: 1]",
        "  zeta zeta_a=eps(-1) * eps(-2), zeta_b=eps(-1), zeta_c=eps(-2) * u_c, zeta_d=eps(-2) * u_d",
    ];
    let missing: Vec<&str> = expected.iter().copied().filter(|l| !report.lines().any(|r| r.starts_with(l))).collect();
    let pass = report == GOLDEN && missing.is_empty() && elapsed < Duration::from_secs(1);
    emit(
        lines,
        1,
        pass,
        true,
        format!(
            "worked-example chart matches golden file: {}, transcribed values present: {}, {}",
            report == GOLDEN,
            missing.is_empty(),
            secs(elapsed)
        ),
    );
}

fn criterion_2(lines: &mut Vec<Line>) {
    let t = fig1();
    let ld = t.level_data().unwrap();
    let sp = fig1_special(&t);
    let sharp: Vec<_> = [-1, -2, -3].iter().map(|i| ld.sharp(lvl(*i)).unwrap()).collect();
    let a3 = ascent_sequence(&t, &sp, lvl(-3)).unwrap();
    let a1 = ascent_sequence(&t, &sp, lvl(-1)).unwrap();
    let pass = sharp == vec![lvl(0), lvl(-1), lvl(-2)] && a3 == vec![lvl(-3), lvl(-2), lvl(0)] && a1 == vec![lvl(-1), lvl(0)];
    let show = |v: &[leveltree::level::Level]| v.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",");
    emit(
        lines,
        2,
        pass,
        true,
        format!("sharp(-1,-2,-3) = ({}), ascent(-3) = [{}], ascent(-1) = [{}]", show(&sharp), show(&a3), show(&a1)),
    );
}

/// Every failure of the literal identities is the documented one: `m`,
/// `𝕀₊`, `𝕀ₘ` and the completed `𝕀₋` hold, only the literal `𝕀₋` fails.
fn literal_minus_identity(trees: &[LevelTree]) -> (usize, usize, usize) {
    trees
        .par_iter()
        .map(|t| {
            let mut total = 0;
            let mut documented = 0;
            let mut other = 0;
            for sub in t.level_data().unwrap().index_partition().subsets() {
                let ids = index_identities(t, &sub).unwrap();
                if ids.as_stated() {
                    continue;
                }
                total += 1;
                if ids.completed() && !ids.minus {
                    documented += 1;
                } else {
                    other += 1;
                }
            }
            (total, documented, other)
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2))
}

fn criterion_3(lines: &mut Vec<Line>, trees: &[LevelTree]) -> RunReport {
    let r = run_on(trees, Suite::Contraction);
    let others_clean = r.operations.iter().all(|(op, s)| op == "contract.index_identities" || s.failed_instances == 0);
    let (total, documented, other) = literal_minus_identity(trees);
    let pass = r.ok() && r.elapsed < Duration::from_secs(120);
    let expected = others_clean && other == 0 && total == documented && r.elapsed < Duration::from_secs(120);
    emit(
        lines,
        3,
        pass,
        // failing for the documented reason only is the expected outcome
        if expected { pass } else { !pass },
        format!(
            "{} instances; {}; literal 𝕀₋ identity fails for {total} (t, I) pairs, all with the completed identity holding ({documented}), other failures {other}; {}",
            r.instances,
            ops(&r),
            secs(r.elapsed)
        ),
    );
    r
}

fn suite_line(lines: &mut Vec<Line>, n: usize, r: &RunReport, budget: u64, note: &str) {
    let pass = r.ok() && r.elapsed < Duration::from_secs(budget);
    emit(lines, n, pass, true, format!("{} instances; {}{note}; {}", r.instances, ops(r), secs(r.elapsed)));
}

/// Failing blowup identities on one unstable tree: Y_k pullback, ideal
/// transform, ψ₂ round trip.
fn unstable_failures(t: &LevelTree) -> (bool, bool, bool) {
    let n = t.tree().edge_count();
    let frame = ChartFrame::with_default_special(t.clone(), vec![]).unwrap();
    let chart = TwistedChart::new(frame.clone());
    let yk = (1..=n.max(1)).any(|k| !yk_pullback(&chart, k).is_ok_and(|(_, v)| v.ok()));
    let ideal = (1..=n + 1).any(|k| !ideal_transform_check(&frame, k).is_ok_and(|s| s.verdict.ok()));
    let back = blowup_data(t).and_then(|d| psi2_level_tree(&t.base, &d));
    let psi2 = !matches!(back, Ok(b) if is_equivalent(&b, t) && is_equivalent(t, &b));
    (yk, ideal, psi2)
}

fn criterion_6(lines: &mut Vec<Line>, trees: &[LevelTree]) -> RunReport {
    let r = run_on(trees, Suite::Blowup);
    let t = fig2();
    let chart = TwistedChart::new(ChartFrame::new(t.clone(), fig2_special(&t), vec![], Mark::Plain).unwrap());
    let values: Vec<Monomial> = (1..=3).map(|k| yk_pullback(&chart, k).unwrap().0).collect();
    let fig2_ok = values == vec![m("1"), m("eps(-1)"), m("eps(-1) * eps(-2)")];
    let unstable: Vec<(bool, bool, bool)> = trees.par_iter().filter(|t| !is_stable(&t.base)).map(unstable_failures).collect();
    let count = |f: fn(&(bool, bool, bool)) -> bool| unstable.iter().filter(|x| f(x)).count();
    let (yk, ideal, psi2) = (count(|x| x.0), count(|x| x.1), count(|x| x.2));
    let any = count(|x| x.0 || x.1 || x.2);
    let stable = r.operations.get("blowup.yk_pullback").map_or(0, |s| s.instances);
    let in_budget = r.elapsed < Duration::from_secs(120);
    let pass = r.ok() && fig2_ok && any == 0 && in_budget;
    // the expected outcome: everything holds on stable trees, failures only off the stable locus
    let stable_clean = r.ok() && fig2_ok && in_budget;
    emit(
        lines,
        6,
        pass,
        if stable_clean { pass } else { !pass },
        format!(
            "{} instances; {}; worked-example Y_1..Y_3 = 1, eps(-1), eps(-1) * eps(-2): {fig2_ok}; all checks hold on the {stable} stable instances; \
             on the {} unstable instances Y_k fails for {yk}, ideal transform for {ideal}, ψ₂ round trip for {psi2} ({any} distinct); {}",
            r.instances,
            ops(&r),
            unstable.len(),
            secs(r.elapsed)
        ),
    );
    r
}

fn main() -> ExitCode {
    let mut lines = vec![];
    criterion_1(&mut lines);
    criterion_2(&mut lines);

    let five = gen_instances(&EnumSpec::new(5, 2)).unwrap();
    let four: Vec<LevelTree> = five.iter().filter(|t| t.tree().edge_count() <= 4).cloned().collect();

    let contraction = criterion_3(&mut lines, &five);
    let charts = run_on(&five, Suite::Charts);
    suite_line(&mut lines, 4, &charts, 300, "");
    let transitions = run_on(&four, Suite::Transitions);
    suite_line(&mut lines, 5, &transitions, 300, " (instances with ≤ 4 edges)");
    let blowup = criterion_6(&mut lines, &five);
    let remark = run_on(&five, Suite::Remark);
    suite_line(&mut lines, 7, &remark, 300, " (instances with 𝕀₊ nonempty)");

    let first: Vec<String> = [&contraction, &charts, &transitions, &blowup, &remark].iter().map(|r| r.to_json(false)).collect();
    let second: Vec<String> = [
        run_on(&five, Suite::Contraction),
        run_on(&five, Suite::Charts),
        run_on(&four, Suite::Transitions),
        run_on(&five, Suite::Blowup),
        run_on(&five, Suite::Remark),
    ]
    .iter()
    .map(|r| r.to_json(false))
    .collect();
    let bytes: usize = first.iter().map(String::len).sum();
    emit(&mut lines, 8, first == second, true, format!("two full runs give byte-identical JSON reports ({bytes} bytes)"));

    let unexpected: Vec<&Line> = lines.iter().filter(|l| l.pass != l.expected_pass).collect();
    for l in &unexpected {
        println!("unexpected outcome for criterion {}: {}", l.n, l.text);
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
