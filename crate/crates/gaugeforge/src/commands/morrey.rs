use serde_json::Value;

use gaugeforge_core::subcritical::{decay_experiment, integrability_report};

use super::Context;
use crate::error::Result;
use crate::report::{numbers, write_json, Csv, JsonObject};

const PROFILE_RADII: [f64; 4] = [0.0625, 0.125, 0.25, 0.5];

/// Local decay experiment and integrability table for the stored direct solution.
pub fn morrey(ctx: &Context) -> Result<()> {
    let cfg = &ctx.cfg;
    let dom = &ctx.dom;
    let om = ctx.load_omega()?;
    let n = om.n();
    let a = ctx.load_gauge_matrix("A.gfld", n)?;
    let v = ctx.load_state("v_direct.gfld", n)?;
    ctx.ensure_output_dir()?;
    let centers = cfg.centers();
    let rep = decay_experiment(
        dom,
        &a,
        &v,
        &centers,
        &cfg.experiment.radii,
        cfg.experiment.lambda,
        cfg.solver.tol,
    )?;

    let mut header: Vec<String> = (0..cfg.m).map(|d| format!("x{d}")).collect();
    header.extend(
        [
            "radius",
            "w_r",
            "w_lr",
            "ratio",
            "xi_r",
            "xi_lr",
            "harmonic_ratio",
            "phi_r",
            "a_inv_max",
            "grad_a_energy",
            "phi_bound_const",
            "slack",
            "harmonic_defect",
        ]
        .map(String::from),
    );
    let mut decay = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for r in &rep.rows {
        let mut row = r.center.clone();
        row.extend([
            r.radius,
            r.w_r,
            r.w_lr,
            r.ratio,
            r.xi_r,
            r.xi_lr,
            r.harmonic_ratio,
            r.phi_r,
            r.a_inv_max,
            r.grad_a_energy,
            r.phi_bound_const,
            r.slack,
            r.harmonic_defect,
        ]);
        decay.push(&row);
    }
    decay.write(&ctx.output("decay.csv"))?;

    let bound_ok = rep.rows.iter().all(|r| r.ratio <= 0.5 + r.slack);
    let summary = JsonObject::new()
        .num("lambda", rep.lambda)
        .num("lambda_pow_m", rep.lambda.powi(cfg.m as i32))
        .num("exponent", rep.exponent)
        .set(
            "centers",
            Value::Array(rep.centers.iter().map(|c| numbers(c)).collect()),
        )
        .nums("radii", &rep.radii)
        .nums("ratios", &rep.ratios())
        .nums("harmonic_ratios", &rep.harmonic_ratios())
        .nums("phi_bound_consts", &rep.phi_bound_consts())
        .num("max_ratio", rep.ratios().into_iter().fold(0.0, f64::max))
        .set("ratio_within_half_plus_slack", bound_ok)
        .num("gamma_hat", rep.gamma_hat)
        .nums("gamma_per_center", &rep.gamma_per_center)
        .into_value();
    write_json(&ctx.output("decay.json"), &summary)?;

    let integ = integrability_report(dom, &v, &cfg.exponents(), &PROFILE_RADII)?;
    let mut table = Csv::new(&["p", "norm_half_ball"]);
    for &(p, x) in &integ.norms {
        table.push(&[p, x]);
    }
    table.write(&ctx.output("integrability.csv"))?;
    let mut profile = Csv::new(&["radius", "scaled_laplacian_mass"]);
    for &(r, x) in &integ.profile {
        profile.push(&[r, x]);
    }
    profile.write(&ctx.output("profile.csv"))?;
    eprintln!(
        "morrey: {} rows, max ratio {:.4}, gamma_hat {:.3}",
        decay.len(),
        rep.ratios().into_iter().fold(0.0, f64::max),
        rep.gamma_hat
    );
    Ok(())
}
