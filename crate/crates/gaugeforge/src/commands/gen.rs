use gaugeforge_core::domain::{lp_norm, BallSpec};

use super::{build_potential, kind_name, Context};
use crate::error::Result;
use crate::gfld;
use crate::report::{write_json, JsonObject};

/// Writes `omega.gfld` and `omega.json` into the output directory.
pub fn gen(ctx: &Context) -> Result<()> {
    let cfg = &ctx.cfg;
    let dom = &ctx.dom;
    let om = build_potential(cfg, dom)?;
    ctx.ensure_output_dir()?;
    let path = ctx.output("omega.gfld");
    gfld::write(&path, dom, cfg.n, &om.omega, &vec![0.0; cfg.n * cfg.n])?;

    let half = cfg.m as f64 / 2.0;
    let meta = JsonObject::new()
        .set("kind", kind_name(cfg.omega.kind))
        .set("seed", cfg.omega.seed)
        .set("m", cfg.m)
        .set("n", cfg.n)
        .set("N", cfg.points)
        .set("smoothness_passes", cfg.omega.smoothness_passes)
        .num("target_norm", cfg.omega.target_norm)
        .num("measured_norm", om.l_half_m_norm)
        .num("norm_exponent", half)
        .num("l2_norm", lp_norm(dom, &om.omega, 2.0, BallSpec::Whole)?)
        .num("antisymmetry_defect", om.omega.max_antisymmetry_defect())
        .into_value();
    write_json(&ctx.output("omega.json"), &meta)?;
    eprintln!(
        "gen: {} potential, |Omega|_L^{half} = {:.6e} -> {}",
        kind_name(cfg.omega.kind),
        om.l_half_m_norm,
        path.display()
    );
    Ok(())
}
