//! Writes a coarse SFF interest landscape over (Jx, Jy) through the campaign
//! runner: fingerprint, resolved config and landscape.csv land in the output
//! directory (first argument, default `sff-landscape-out`).

use std::f64::consts::PI;

use floquet_discovery::campaign::{linspace, run_campaign, CampaignConfig, CampaignKind};

fn main() -> floquet_discovery::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "sff-landscape-out".into());
    let mut cfg = CampaignConfig {
        kind: CampaignKind::SffLandscape,
        seed: 5,
        out: out.into(),
        ..CampaignConfig::default()
    };
    cfg.sff_landscape.n = 4;
    cfg.sff_landscape.n_real = 60;
    cfg.sff_landscape.jx_values = linspace(0.4 * PI, 1.6 * PI, 7);
    cfg.sff_landscape.jy_values = linspace(0.4 * PI, 1.6 * PI, 7);
    let dir = run_campaign(&cfg)?;
    let csv = std::fs::read_to_string(dir.join("landscape.csv"))?;
    let best = csv
        .lines()
        .skip(1)
        .filter_map(|l| {
            let v: Vec<f64> = l.split(',').filter_map(|x| x.parse().ok()).collect();
            (v.len() == 4).then_some(v)
        })
        .max_by(|a, b| a[2].total_cmp(&b[2]))
        .expect("non-empty landscape");
    println!("wrote {}", dir.display());
    println!("grid maximum f = {:.5} at Jx = {:.3}π, Jy = {:.3}π", best[2], best[0] / PI, best[1] / PI);
    Ok(())
}
