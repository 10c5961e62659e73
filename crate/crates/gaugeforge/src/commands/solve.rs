use gaugeforge_core::elliptic::{Multigrid, SolveReport};
use gaugeforge_core::pipeline::run_solve;

use super::Context;
use crate::error::Result;
use crate::gfld;
use crate::report::{write_json, JsonObject};

/// Solves `−Δv = Ωv` directly and in conservation form with the stored gauge `A`.
pub fn solve(ctx: &Context) -> Result<()> {
    let om = ctx.load_omega()?;
    let n = om.n();
    let a = ctx.load_gauge_matrix("A.gfld", n)?;
    let g = ctx.boundary_data(n)?;
    ctx.ensure_output_dir()?;
    let pre = Multigrid::new(&ctx.dom);
    let s = run_solve(&pre, &ctx.dom, &om, &a, &g, ctx.cfg.solver.tol)?;
    let zero = vec![0.0; n];
    gfld::write(
        &ctx.output("v_direct.gfld"),
        &ctx.dom,
        n,
        &s.direct.v,
        &zero,
    )?;
    gfld::write(
        &ctx.output("v_conservation.gfld"),
        &ctx.dom,
        n,
        &s.conservation.v,
        &zero,
    )?;
    let report = JsonObject::new()
        .num("equivalence_error", s.equivalence_error)
        .num("conservation_residual", s.conservation_residual)
        .num("conservation_residual_core", s.conservation_residual_core)
        .set("direct", solve_json(&s.direct.report))
        .set("conservation", solve_json(&s.conservation.report))
        .num("omega_norm", om.l_half_m_norm)
        .into_value();
    write_json(&ctx.output("solve.json"), &report)?;
    eprintln!(
        "solve: equivalence error {:.3e}, conservation residual {:.3e}",
        s.equivalence_error, s.conservation_residual
    );
    Ok(())
}

fn solve_json(r: &SolveReport) -> serde_json::Value {
    JsonObject::new()
        .set("iterations", r.iterations)
        .num("relative_residual", r.relative_residual)
        .set("converged", r.converged)
        .into_value()
}
