use serde_json::Value;

use gaugeforge_core::elliptic::Multigrid;
use gaugeforge_core::gauge::AntisymmetricPotential;
use gaugeforge_core::pipeline::{run_gauge, GaugeRun};

use super::Context;
use crate::error::{CliError, Result};
use crate::gfld::{self, identity_fill};
use crate::report::{numbers, write_json, Csv, JsonObject};

/// Runs the gauge pipeline on the stored potential, or on rescaled copies of it
/// when `study.sweep` lists target norms.
pub fn gauge(ctx: &Context) -> Result<()> {
    let om = ctx.load_omega()?;
    ctx.ensure_output_dir()?;
    let pre = Multigrid::new(&ctx.dom);
    if ctx.cfg.study.sweep.is_empty() {
        single(ctx, &pre, &om)
    } else {
        sweep(ctx, &pre, &om)
    }
}

fn single(ctx: &Context, pre: &Multigrid, om: &AntisymmetricPotential) -> Result<()> {
    let run = run_gauge(pre, &ctx.dom, om, &ctx.cfg.pipeline())?;
    let n = om.n();
    let fill = identity_fill(n);
    let zero = vec![0.0; n * n];
    let t = &run.triple;
    gfld::write(&ctx.output("U.gfld"), &ctx.dom, n, &t.u, &zero)?;
    gfld::write(&ctx.output("P.gfld"), &ctx.dom, n, &t.p, &fill)?;
    gfld::write(&ctx.output("Q.gfld"), &ctx.dom, n, &t.q, &fill)?;
    gfld::write(&ctx.output("A.gfld"), &ctx.dom, n, &t.a, &fill)?;
    write_json(
        &ctx.output("verification.json"),
        &verification_json(ctx, om, &run),
    )?;
    eprintln!(
        "gauge: residual_A = {:.3e}, dist_A_On = {:.3e}, {:.2} s",
        run.verification.residual_a, run.verification.dist_a_on, run.wall_time
    );
    Ok(())
}

pub(crate) fn verification_json(
    ctx: &Context,
    om: &AntisymmetricPotential,
    run: &GaugeRun,
) -> Value {
    let v = &run.verification;
    let tr = &run.trace;
    let cont = ctx.cfg.continuation();
    let w2 = run
        .triple
        .diagnostics
        .w2_proxy_norms
        .iter()
        .fold(JsonObject::new(), |o, (k, x)| o.num(k, *x))
        .into_value();
    JsonObject::new()
        .num("omega_norm", om.l_half_m_norm)
        .num("residual_A", v.residual_a)
        .num("residual_P", run.triple.diagnostics.residual_p)
        .num("dist_A_On", v.dist_a_on)
        .num("dist_Q_On", v.dist_q_on)
        .num("gradient_energy", v.gradient_energy)
        .num("dist_Q_ratio", v.dist_q_ratio)
        .num("q_proxy", v.q_proxy)
        .num("q_proxy_ratio", v.q_proxy_ratio)
        .num("harnack_ratio", v.harnack_ratio)
        .num("max_QtX_sq", v.max_qtx_sq)
        .num("min_subharmonic", v.min_subharmonic)
        .num("S_symmetry_defect", v.s_symmetry_defect)
        .num("coefficient_min_eigenvalue", v.coefficient_min_eigenvalue)
        .num("coefficient_symmetry_defect", v.coefficient_symmetry_defect)
        .set("samples", v.samples)
        .num(
            "eps0_monitor",
            tr.gradient_energy.last().copied().unwrap_or(0.0),
        )
        .num("eps0_threshold", cont.eps0_monitor)
        .num(
            "eps1_monitor",
            tr.second_order_norm.last().copied().unwrap_or(0.0),
        )
        .num("eps1_threshold", cont.eps1_monitor)
        .set("steps", cont.steps)
        .set(
            "newton_residuals",
            Value::Array(tr.newton_residuals.iter().map(|r| numbers(r)).collect()),
        )
        .nums("step_gradient_energy", &tr.gradient_energy)
        .nums("step_second_order_norm", &tr.second_order_norm)
        .nums("step_second_order_ratio", &tr.second_order_ratio)
        .set("newton_iterations", tr.newton_iterations)
        .set("linear_iterations", tr.linear_iterations)
        .set("q_solve_iterations", run.q_report.solve.iterations)
        .set("w2_proxy_norms", w2)
        .into_value()
}

const SWEEP_HEADER: [&str; 10] = [
    "target_norm",
    "converged",
    "residual_A",
    "dist_A_On",
    "gradient_energy",
    "energy_2_over_m",
    "dist_energy_ratio",
    "max_QtX_sq",
    "min_subharmonic",
    "newton_iterations",
];

fn sweep(ctx: &Context, pre: &Multigrid, base: &AntisymmetricPotential) -> Result<()> {
    let mut csv = Csv::new(&SWEEP_HEADER);
    let mut rows = Vec::new();
    let mut first_failure: Option<CliError> = None;
    let expo = 2.0 / ctx.cfg.m as f64;
    for &target in &ctx.cfg.study.sweep {
        let mut om = base.clone();
        om.rescale(&ctx.dom, target)?;
        let row = match run_gauge(pre, &ctx.dom, &om, &ctx.cfg.pipeline()) {
            Ok(run) => {
                let v = &run.verification;
                let e = v.gradient_energy.powf(expo);
                let ratio = if e > 0.0 { v.dist_a_on / e } else { f64::NAN };
                let r = [
                    target,
                    1.0,
                    v.residual_a,
                    v.dist_a_on,
                    v.gradient_energy,
                    e,
                    ratio,
                    v.max_qtx_sq,
                    v.min_subharmonic,
                    run.trace.newton_iterations as f64,
                ];
                rows.push(verification_json(ctx, &om, &run));
                r
            }
            Err(err) => {
                eprintln!("gauge: target_norm {target}: {err}");
                rows.push(
                    JsonObject::new()
                        .num("omega_norm", target)
                        .set("error", err.to_string())
                        .into_value(),
                );
                first_failure.get_or_insert(err.into());
                let mut r = [f64::NAN; 10];
                r[0] = target;
                r[1] = 0.0;
                r
            }
        };
        csv.push(&row);
    }
    csv.write(&ctx.output("sweep.csv"))?;
    write_json(
        &ctx.output("sweep.json"),
        &JsonObject::new()
            .nums("target_norms", &ctx.cfg.study.sweep)
            .set("rows", Value::Array(rows))
            .into_value(),
    )?;
    eprintln!(
        "gauge: sweep of {} norms -> {}",
        csv.len(),
        ctx.output("sweep.csv").display()
    );
    match first_failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
