// Metric definition files: write one, load it, and drive the command-line
// front end in-process.

use projmob::cli::{run, MetricFile};

fn main() {
    let text = r#"{
        "schema": 1,
        "name": "hyperbolic-plane",
        "coordinates": ["x", "y"],
        "metric": [["1/y^2"], ["0", "1/y^2"]],
        "sample_box": [[-1, 1], [0.5, 2]],
        "excluded": ["y"],
        "solutions": [{"name": "dx2", "components": [["1/y^2"], ["0", "0"]]}]
    }"#;
    let file = MetricFile::from_json(text).unwrap();
    let loaded = file.load().unwrap();
    println!("loaded `{}` in dimension {}", loaded.name, loaded.metric.dim());

    let path = std::env::temp_dir().join("projmob-example-h2.json");
    std::fs::write(&path, file.to_json()).unwrap();
    let p = path.to_str().unwrap();
    for args in [
        vec!["projmob", "check", p],
        vec!["projmob", "mobility", "catalog:sphere2"],
        vec!["projmob", "enumerate", "--dim", "5", "--signature", "lorentzian"],
    ] {
        let out = run(&args);
        println!("$ {} -> exit {}", args[1..].join(" "), out.code);
        let report: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        for key in ["einstein", "scal", "dimension", "label", "values"] {
            if let Some(v) = report.get(key) {
                println!("  {key}: {v}");
            }
        }
    }
    let _ = std::fs::remove_file(&path);
}
