use gaugeforge_core::domain::GridDomain;
use gaugeforge_core::elliptic::Multigrid;
use gaugeforge_core::pipeline::{boundary_field, observed_orders, run_gauge, run_solve};

use super::{build_potential, Context};
use crate::error::{CliError, Result};
use crate::report::{write_json, Csv, JsonObject};

const COLUMNS: [&str; 4] = [
    "residual_A",
    "equivalence_error",
    "conservation_residual",
    "conservation_residual_core",
];

/// Reruns gauge and solves at each configured resolution and fits orders.
pub fn study(ctx: &Context) -> Result<()> {
    let cfg = &ctx.cfg;
    let kind = cfg.builtin_boundary().ok_or_else(|| {
        CliError::Config("study needs a built-in boundary kind (linear or trig)".into())
    })?;
    if cfg.study.grids.len() < 2 {
        return Err(CliError::Config(
            "study.grids needs at least two resolutions".into(),
        ));
    }
    ctx.ensure_output_dir()?;
    let mut header = vec!["N", "h"];
    header.extend(COLUMNS);
    header.push("dist_A_On");
    let mut table = Csv::new(&header);
    let mut series: [Vec<f64>; 4] = Default::default();
    for &points in &cfg.study.grids {
        let dom = GridDomain::ball(cfg.m, points)?;
        let pre = Multigrid::new(&dom);
        let om = build_potential(cfg, &dom)?;
        let run = run_gauge(&pre, &dom, &om, &cfg.pipeline())?;
        let g = boundary_field(&dom, cfg.n, kind);
        let s = run_solve(&pre, &dom, &om, &run.triple.a, &g, cfg.solver.tol)?;
        let vals = [
            run.verification.residual_a,
            s.equivalence_error,
            s.conservation_residual,
            s.conservation_residual_core,
        ];
        for (col, x) in series.iter_mut().zip(vals) {
            col.push(x);
        }
        let mut row = vec![points as f64, dom.spacing()];
        row.extend(vals);
        row.push(run.verification.dist_a_on);
        table.push(&row);
        eprintln!(
            "study: N = {points}: residual_A {:.3e}, equivalence {:.3e} ({:.2} s gauge)",
            vals[0], vals[1], run.wall_time
        );
    }
    table.write(&ctx.output("study.csv"))?;

    let mut orders = JsonObject::new();
    let mut monotone = JsonObject::new();
    for (name, col) in COLUMNS.iter().zip(&series) {
        orders = orders.nums(name, &observed_orders(col));
        monotone = monotone.set(name, col.windows(2).all(|w| w[1] < w[0]));
    }
    let grids: Vec<f64> = cfg.study.grids.iter().map(|&g| g as f64).collect();
    let mut values = JsonObject::new();
    for (name, col) in COLUMNS.iter().zip(&series) {
        values = values.nums(name, col);
    }
    let out = JsonObject::new()
        .nums("grids", &grids)
        .set("values", values.into_value())
        .set("orders", orders.into_value())
        .set("monotone", monotone.into_value())
        .into_value();
    write_json(&ctx.output("study.json"), &out)?;
    Ok(())
}
