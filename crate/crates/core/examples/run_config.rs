//! The experiment harness driven from a config string, as the binary does
//! with `--config`.

use conftree::bench::{cmd_run, ExperimentConfig};

fn main() -> conftree::Result<()> {
    let dir = std::env::temp_dir().join("conftree-example");
    let mut config = ExperimentConfig::parse("target = u2\nalg = both\nmax_leaves = 2000\nstride = 50\n")?;
    config.set("out", &dir.display().to_string())?;
    for out in cmd_run(&config)? {
        let last = out.trace.last().unwrap();
        println!("{}: {} steps, {} leaves, err {:e}", out.algorithm, last.n, last.leaves, last.err);
        for f in out.files {
            println!("  {}", f.display());
        }
    }
    Ok(())
}
