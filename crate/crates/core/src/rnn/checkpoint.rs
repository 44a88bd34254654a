//! Plain-text weight checkpoints.
//!
//! ```text
//! wrnn-checkpoint 1
//! [config]
//! inputs=36
//! ...
//! [weights]
//! <one CSV row of p+N+1 weights per neuron>
//! [mask]            (optional)
//! <one row of 0/1 characters per neuron>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{Activation, ActivationKind, Result, RnnConfig, RnnError, RnnState};
use crate::kv::KeyValues;

const MAGIC: &str = "wrnn-checkpoint 1";

pub fn write_checkpoint(state: &RnnState, path: impl AsRef<Path>) -> Result<()> {
    let cfg = state.config();
    let mut kv = KeyValues::new();
    kv.push("inputs", cfg.inputs)
        .push("neurons", cfg.neurons)
        .push("beta", format!("{:?}", cfg.beta))
        .push("eta", format!("{:?}", cfg.eta))
        .push("activation", cfg.activation)
        .push(
            "clip",
            cfg.clip.map_or("none".to_string(), |c| format!("{c:?}")),
        )
        .push(
            "activations",
            state
                .activations()
                .iter()
                .map(|a| a.kind.name())
                .collect::<Vec<_>>()
                .join(","),
        );
    let mut out = format!("{MAGIC}\n[config]\n{}[weights]\n", kv.to_text());
    for row in state.weights().chunks_exact(cfg.width()) {
        let cells: Vec<String> = row.iter().map(|w| format!("{w:?}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    if let Some(mask) = state.mask() {
        out.push_str("[mask]\n");
        for row in mask.chunks_exact(cfg.width()) {
            for &m in row {
                out.push(if m { '1' } else { '0' });
            }
            out.push('\n');
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_checkpoint(path: impl AsRef<Path>) -> Result<RnnState> {
    let text = std::fs::read_to_string(path)?;
    let bad = |msg: &str| RnnError::Checkpoint(msg.to_string());
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(MAGIC) {
        return Err(bad("missing header line"));
    }
    let mut section = "";
    let mut config = String::new();
    let mut weights = Vec::new();
    let mut mask: Option<Vec<bool>> = None;
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            section = line;
            if section == "[mask]" {
                mask = Some(Vec::new());
            }
            continue;
        }
        match section {
            "[config]" => {
                let _ = writeln!(config, "{line}");
            }
            "[weights]" => {
                for cell in line.split(',') {
                    weights.push(cell.trim().parse::<f64>().map_err(|_| bad("bad weight"))?);
                }
            }
            "[mask]" => {
                let m = mask.as_mut().expect("set on section start");
                for ch in line.chars() {
                    match ch {
                        '0' => m.push(false),
                        '1' => m.push(true),
                        _ => return Err(bad("bad mask character")),
                    }
                }
            }
            _ => return Err(bad("content outside a section")),
        }
    }
    let kv = KeyValues::parse(&config).map_err(RnnError::Checkpoint)?;
    let field = |k: &str| kv.get(k).ok_or_else(|| RnnError::Checkpoint(format!("missing `{k}`")));
    let num = |k: &str| -> Result<f64> {
        field(k)?
            .parse()
            .map_err(|_| RnnError::Checkpoint(format!("bad `{k}`")))
    };
    let count = |k: &str| -> Result<usize> {
        field(k)?
            .parse()
            .map_err(|_| RnnError::Checkpoint(format!("bad `{k}`")))
    };
    let clip = match field("clip")? {
        "none" => None,
        _ => Some(num("clip")?),
    };
    let cfg = RnnConfig {
        inputs: count("inputs")?,
        neurons: count("neurons")?,
        beta: num("beta")?,
        eta: num("eta")?,
        activation: field("activation")?.parse()?,
        clip,
    };
    let activations = field("activations")?
        .split(',')
        .map(|k| Ok(Activation::new(k.parse::<ActivationKind>()?, cfg.beta)))
        .collect::<Result<Vec<_>>>()?;
    RnnState::from_weights(&cfg, weights, mask, activations)
}
