//! Drives the command-line entry point in-process: a four-curve block
//! threshold CSV with its SVG plot, written to the system temp directory.

fn main() {
    let dir = std::env::temp_dir();
    let csv = dir.join("ptlab_block_curves.csv");
    let svg = dir.join("ptlab_block_curves.svg");
    let args = [
        "ptlab", "threshold", "--model", "block", "--zeta", "0.25,0.5,0.75,1.0", "--delta", "1e-3:0.5",
        "--points", "200", "--out", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
    ];
    let code = ptlab::cli::run(args, &mut std::io::stdout(), &mut std::io::stderr());
    println!("exit {code}; wrote {} and {}", csv.display(), svg.display());
}
