mod batch;
mod evaluate;
mod features;
mod register;
mod synth;

pub use batch::cmd_batch;
pub use evaluate::cmd_evaluate;
pub use features::cmd_features;
pub use register::cmd_register;
pub use synth::cmd_synth;

use std::path::Path;

use anyhow::{Context, Result};

pub(crate) fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}
