//! Parses a scene file, prints its canonical form and runs its jobs.
//!
//! `cargo run --example scene_runner -- crates/core/examples/scenes/example1.toml`

use isophote::io::{parse_scene, run_scene, serialize_scene, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scenes/example1.toml").to_string());
    let text = std::fs::read_to_string(&path)?;
    let config = parse_scene(&text)?;
    println!("{}", serialize_scene(&config));
    let out = run_scene(
        &config,
        &RunOptions {
            out_root: Some(std::env::temp_dir().join("isophote-scenes")),
            seed: 7,
        },
    )?;
    print!("{}", out.report.to_text());
    println!("artifacts in {}", out.out_dir.display());
    Ok(())
}
