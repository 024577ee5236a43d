//! Drive the command pipeline from a config string, as the binary does.

use photoassoc::config::RunConfig;
use photoassoc::pipeline::{run, Command};

const CONFIG: &str = r#"
[run]
label = "pipeline example"

[pulse]
rise_end_ps = 1.0
plateau_end_ps = 4.0
fall_end_ps = 5.0
end_ps = 5.0

[propagation]
dt_flat_ps = 0.05
snapshots_ps = [2.5]

[times]
detunings_cm = [67.4]
beat_rows = [[-144.05, -142.43, 0.22]]
"#;

fn main() -> photoassoc::Result<()> {
    let cfg = RunConfig::from_toml_str(CONFIG)?;
    let root = std::env::temp_dir().join(format!("photoassoc-example-{}", std::process::id()));
    for cmd in [Command::Calibrate, Command::Times, Command::Impulsive] {
        let rep = run(cmd, &cfg, &root.join(cmd.name()))?;
        println!("== {} -> {}", cmd.name(), rep.dir.display());
        for line in &rep.summary {
            println!("   {line}");
        }
        println!("   files: {}", rep.files.join(", "));
    }
    std::fs::remove_dir_all(&root)?;
    Ok(())
}
