//! Resolving a minimal JSON configuration: unknown keys are rejected by
//! name, everything else is filled from defaults and can be written back.

use floquet_discovery::config::{parse_config_str, to_json};

fn main() -> floquet_discovery::Result<()> {
    let cfg = parse_config_str(r#"{"kind": "psff-demo", "seed": 11, "psff_demo": {"n": 8}}"#)?;
    println!("{}", to_json(&cfg)?);

    match parse_config_str(r#"{"kind": "psff-demo", "psff_demo": {"shot": 10}}"#) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
