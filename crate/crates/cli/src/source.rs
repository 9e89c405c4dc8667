//! Graph sources: an edge-list file path, or `gen:<model>:<key=value,...>`.
//!
//! Models: `gnp:n,p`, `grid:w,h`, `star:k`, `cycle:k`, `path:k`,
//! `complete:k`, `hubs:hubs,leaves,p`, `karytree:k,depth,p`,
//! `tiered:tiers=a/b/c,p`.

use std::collections::BTreeMap;
use std::path::Path;

use ftconn_core::graph::{generate, load_edge_list, Graph, Model};
use sha2::{Digest, Sha256};

use crate::CliError;

pub fn parse_model(spec: &str) -> Result<Model, CliError> {
    let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
    let mut kv = BTreeMap::new();
    for part in args.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| CliError::Usage(format!("expected key=value, got `{part}`")))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &str| kv.get(k).ok_or_else(|| CliError::Usage(format!("model `{name}` needs `{k}`")));
    let int = |k: &str| -> Result<usize, CliError> { get(k)?.parse().map_err(|_| CliError::Usage(format!("`{k}` must be an integer"))) };
    let float = |k: &str| -> Result<f64, CliError> { get(k)?.parse().map_err(|_| CliError::Usage(format!("`{k}` must be a number"))) };
    let float_or = |k: &str, d: f64| if kv.contains_key(k) { float(k) } else { Ok(d) };
    Ok(match name {
        "gnp" => Model::Gnp { n: int("n")?, p: float("p")? },
        "grid" => Model::Grid { w: int("w")?, h: int("h")? },
        "star" => Model::Star { k: int("k")? },
        "cycle" => Model::Cycle { k: int("k")? },
        "path" => Model::Path { k: int("k")? },
        "complete" => Model::Complete { k: int("k")? },
        "hubs" => Model::Hubs { hubs: int("hubs")?, leaves: int("leaves")?, p: float("p")? },
        "karytree" => Model::KaryTree { k: int("k")?, depth: int("depth")?, p: float_or("p", 0.0)? },
        "tiered" => Model::Tiered {
            tiers: get("tiers")?
                .split('/')
                .map(|t| t.parse().map_err(|_| CliError::Usage("tiers must be integers separated by `/`".into())))
                .collect::<Result<_, _>>()?,
            p: float("p")?,
        },
        other => return Err(CliError::Usage(format!("unknown model `{other}`"))),
    })
}

/// Loads or generates the graph named by `source`.
pub fn load_graph(source: &str, seed: u64) -> Result<Graph, CliError> {
    if let Some(spec) = source.strip_prefix("gen:") {
        let model = parse_model(spec)?;
        return generate(&model, seed).map_err(|e| CliError::Usage(e.to_string()));
    }
    let text = std::fs::read_to_string(Path::new(source)).map_err(|e| CliError::io(source, e))?;
    load_edge_list(&text).map_err(|e| CliError::Input(format!("{source}: {e}")))
}

/// SHA-256 of the canonical edge list.
pub fn fingerprint(g: &Graph) -> [u8; 32] {
    Sha256::digest(g.to_edge_list().as_bytes()).into()
}
