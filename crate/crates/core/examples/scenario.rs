//! Scenario files: load a bundled one, tweak it, write it back and run a
//! command on it in-process.

use ckptopt::cli::{run_command, Command, RunOptions};
use ckptopt::scenario::{bundled, emit, load_scenario, Sweep, SweepVar, BUNDLED};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let names: Vec<&str> = BUNDLED.iter().map(|(n, _)| *n).collect();
    println!("bundled: {}", names.join(", "));

    let mut s = bundled("fig3")?;
    s.name = "fig3-keep2".into();
    if let Some(policy) = s.policy.as_mut() {
        policy.keep = 2;
    }
    let text = emit(&s)?;
    println!("{text}");
    assert_eq!(load_scenario(&text)?, s);

    let opts = RunOptions {
        sweep: Some(Sweep::new(SweepVar::T, 4000.0, 12_000.0, 5, false)?),
        ..RunOptions::default()
    };
    let mut out = Vec::new();
    let code = run_command(Command::Risk, &s, &opts, &mut out)?;
    print!("{}", String::from_utf8(out)?);
    println!("exit {code}");
    Ok(())
}
