//! Evaluates TSB 1, TSB 2 and THB 0 under all five load cases at default
//! resolution and prints one line per case.

use tia_core::geometry::{HexBlockParams, SineBlockParams};
use tia_core::pipeline::{all_cases, evaluate_many, DesignPoint};

fn main() {
    let points = [
        ("TSB1", DesignPoint::Sine(SineBlockParams::tsb1())),
        ("TSB2", DesignPoint::Sine(SineBlockParams::tsb2())),
        ("THB0", DesignPoint::Hex(HexBlockParams::thb0())),
    ];
    println!("{:<5} {:<7} {:<11} {:>10} {:>11} {:>11} {:>7} {:>8} {:>8} {:>9} {:>6}",
        "block", "bvp", "class", "z*", "γmax", "γmin", "area%", "p_eff", "p_max", "residual", "sec");
    for (name, point) in points {
        let res = point.default_resolution().expect("default resolution");
        for row in evaluate_many(&point, &res, &all_cases(0.01)) {
            let o = |v: Option<f64>, p: usize| v.map(|x| format!("{x:.p$}")).unwrap_or_else(|| "-".into());
            let e = |v: Option<f64>| v.map(|x| format!("{x:.2e}")).unwrap_or_else(|| "-".into());
            println!(
                "{:<5} {:<7} {:<11} {:>10} {:>11} {:>11} {:>7} {:>8} {:>8} {:>9} {:>6.2}{}",
                name,
                row.bvp,
                row.classification.map(|c| c.to_string()).unwrap_or_else(|| "-".into()),
                e(row.z_star),
                e(row.gamma_max),
                e(row.gamma_min),
                o(row.effective_area_pct, 1),
                o(row.p_eff_bar, 3),
                o(row.p_max_bar, 3),
                e(row.residual),
                row.wall_clock_s,
                row.error.map(|e| format!("  ERROR {e}")).unwrap_or_default(),
            );
        }
    }
}
