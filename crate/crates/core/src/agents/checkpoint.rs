use std::path::Path;

use super::AgentError;
use crate::numerics::DenseNet;

pub const MANIFEST_FILE: &str = "manifest.txt";

/// Writes one checkpoint file per network plus a manifest of `role file` lines.
pub fn write_manifest(dir: &Path, kind: &str, nets: &[(&str, &DenseNet)]) -> Result<(), AgentError> {
    std::fs::create_dir_all(dir)?;
    let mut manifest = format!("agent {kind}\n");
    for (role, net) in nets {
        let file = format!("{role}.net");
        net.save(&dir.join(&file))?;
        manifest.push_str(&format!("{role} {file}\n"));
    }
    std::fs::write(dir.join(MANIFEST_FILE), manifest)?;
    Ok(())
}

/// Kind tag on the first manifest line.
pub fn manifest_kind(dir: &Path) -> Result<String, AgentError> {
    let manifest = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&manifest)
        .map_err(|e| AgentError::Checkpoint(format!("{}: {e}", manifest.display())))?;
    text.lines()
        .next()
        .and_then(|l| l.strip_prefix("agent "))
        .map(|k| k.trim().to_string())
        .ok_or_else(|| AgentError::Checkpoint("manifest lacks an `agent` line".into()))
}

/// Loads the networks for `roles`, in that order.
pub fn read_manifest(dir: &Path, kind: &str, roles: &[&str]) -> Result<Vec<DenseNet>, AgentError> {
    let manifest = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&manifest)
        .map_err(|e| AgentError::Checkpoint(format!("{}: {e}", manifest.display())))?;
    let mut lines = text.lines();
    match lines.next().and_then(|l| l.strip_prefix("agent ")) {
        Some(k) if k == kind => {}
        other => {
            return Err(AgentError::Checkpoint(format!(
                "expected agent `{kind}`, found {:?}",
                other.unwrap_or("nothing")
            )))
        }
    }
    let entries: Vec<(&str, &str)> = lines.filter_map(|l| l.split_once(' ')).collect();
    roles
        .iter()
        .map(|role| {
            let file = entries
                .iter()
                .find(|(r, _)| r == role)
                .map(|(_, f)| *f)
                .ok_or_else(|| AgentError::Checkpoint(format!("manifest has no `{role}` entry")))?;
            let path = dir.join(file);
            if !path.is_file() {
                return Err(AgentError::Checkpoint(format!("missing network file {}", path.display())));
            }
            DenseNet::load(&path).map_err(|e| AgentError::Checkpoint(format!("{}: {e}", path.display())))
        })
        .collect()
}
