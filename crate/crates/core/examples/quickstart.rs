//! Tail contribution of Y when X exceeds its power-distorted risk level.

use codrisk::distortion::Distortion;
use codrisk::riskcore::{BivariateModel, Engine};

fn main() -> codrisk::error::Result<()> {
    let model: BivariateModel = "gumbel:2,gamma:0.5,1,gamma:1.5,1".parse()?;
    let g = Distortion::power(0.3)?;
    let engine = Engine::default();

    let u = engine.threshold_quantile(&g, &model.marginal_x)?;
    println!("u_g = {u:.6}");
    for h in ["var:0.95", "es:0.9", "power:0.5", "dualpower:3"] {
        let h: Distortion = h.parse()?;
        let cod = engine.cod(&model, &g, &h)?;
        let delta = engine.delta_cod(&model, &g, &h)?;
        println!(
            "{:>12}  CoD {:>10.6}  dCoD {:>10.6}",
            h.to_string(),
            cod.value,
            delta.value
        );
    }
    Ok(())
}
