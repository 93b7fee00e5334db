//! Writes the data behind the height-profile and jump-law figures as CSV
//! files in the given directory (default: the current one). Pass a smaller
//! ℓ as the second argument for a quick run.

use std::path::PathBuf;
use tasep::simulate::{decay_field, figure_canonical, figure_continuous, figure_discrete, figure_jump_law};

fn main() -> tasep::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| ".".into()));
    let ell: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(500);
    let write = |name: &str, body: String| -> tasep::Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| tasep::Error::Io(e.to_string()))?;
        println!("wrote {}", path.display());
        Ok(())
    };
    let t = ell as f64;
    write("continuous.csv", figure_continuous(ell, t, 1))?;
    write("discrete.csv", figure_discrete(ell, t, 0.1, 2)?)?;
    write("canonical.csv", figure_canonical(ell, 2 * ell, 3)?)?;
    let (csv, tv) = figure_jump_law(&decay_field(), 0.5, 1.0, 100_000, 4, 0)?;
    write("jump_law.csv", csv)?;
    println!("jump law TV distance {:.4}", tv);
    Ok(())
}
