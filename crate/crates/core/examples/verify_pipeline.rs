//! Drives the same batch runner as the binary, in-process, and writes each
//! output into a scratch directory.

use xmjacobi::runner::run_with_io;

fn main() {
    let dir = std::env::temp_dir().join("xmjacobi-example");
    std::fs::create_dir_all(&dir).expect("scratch dir");
    let runs: [&[&str]; 4] = [
        &["xmjacobi", "spectrum", "--m", "2", "--format", "json"],
        &["xmjacobi", "smatrix", "--m", "2", "--k-min", "0.1", "--k-max", "5", "--k-step", "0.1"],
        &["xmjacobi", "verify", "--g", "1", "--h", "10", "--m", "2"],
        &["xmjacobi", "verify", "--max-phase-diff", "1e-12"],
    ];
    for args in runs {
        let mut stderr = Vec::new();
        let code = run_with_io(args.iter().copied(), &mut std::io::sink(), &mut stderr, Some(&dir));
        print!("{:<60} exit {code}", args[1..].join(" "));
        if !stderr.is_empty() {
            print!("  {}", String::from_utf8_lossy(&stderr).trim());
        }
        println!();
    }
    println!("outputs in {}", dir.display());
}
