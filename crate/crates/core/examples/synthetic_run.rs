//! Full pipeline on synthetic stroke-layout data.
//!
//! ```text
//! cargo run --release -p tabforge --example synthetic_run -- [rows] [regime] [resample] [out]
//! ```

use std::time::Instant;

use tabforge::report::{run_stages, summary, RunConfig, Stage};
use tabforge::tabular::synthetic_stroke_csv;
use tabforge::tuning::{RegimeKind, ResampleMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().collect();
    let rows: usize = args.get(1).map_or(Ok(5110), |s| s.parse())?;
    let regime: RegimeKind = args.get(2).map_or(Ok(RegimeKind::CvWithGrid), |s| s.parse())?;
    let resample: ResampleMode = args.get(3).map_or(Ok(ResampleMode::FoldSafe), |s| s.parse())?;
    let out = args.get(4).cloned().unwrap_or_else(|| "synthetic_out".into());

    std::fs::create_dir_all(&out)?;
    let data = format!("{out}/synthetic.csv");
    std::fs::write(&data, synthetic_stroke_csv(rows, 7))?;
    let mut cfg = RunConfig::default();
    cfg.data.path = data.into();
    cfg.run.out_dir = out.into();
    cfg.run.regime = regime;
    cfg.run.resample = resample;

    let t = Instant::now();
    let regimes = if args.iter().any(|a| a == "--all") {
        RegimeKind::ALL.to_vec()
    } else {
        vec![regime]
    };
    let bundle = run_stages(&cfg, Stage::Evaluate, &regimes)?;
    print!("{}", summary(&bundle));
    println!("elapsed {:.1}s", t.elapsed().as_secs_f64());
    Ok(())
}
