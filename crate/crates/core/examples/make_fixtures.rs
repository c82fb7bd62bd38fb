//! Regenerates the oracle fixtures: `cargo run -p kwb-core --example make_fixtures [-- DIR]`.

mod fixtures;

use std::path::PathBuf;

fn main() {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"));
    std::fs::create_dir_all(&dir).expect("create fixture directory");
    for (name, file) in fixtures::all() {
        kwb_core::oracle::write(&file, &dir.join(name)).expect("write fixture");
        println!("{name}");
    }
}
