//! Headless front end for morphplay: scene validation, scripted replay,
//! the reference transform oracle and the WebSocket sync server.
//!
//! Exit codes: 0 success, 1 domain error, 2 environment or I/O error.

pub mod client;
pub mod oracle;
pub mod replay;
pub mod server;

use std::path::{Path, PathBuf};

use morphplay_core::scene::{bundled_house, load_scene, Scene};
use thiserror::Error;

/// Environment variable naming a directory searched for scene documents.
pub const SCENE_DIR_ENV: &str = "MORPHPLAY_SCENE_DIR";

/// Name under which the built-in house scene is always available.
pub const BUNDLED_SCENE_NAME: &str = "house";

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: invalid scene, script, flags or a golden mismatch.
    #[error("{0}")]
    Domain(String),
    /// The environment got in the way: unreadable files, sockets.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

/// Where a scene argument resolved to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SceneSource {
    File(PathBuf),
    Bundled,
}

/// Resolves a scene argument: an existing path wins, then
/// `$MORPHPLAY_SCENE_DIR/<arg>` (with or without `.json`), then the
/// bundled house for `house` or `house.json`.
pub fn resolve_scene(arg: &str, scene_dir: Option<&Path>) -> Result<SceneSource, CliError> {
    let direct = PathBuf::from(arg);
    if direct.exists() {
        return Ok(SceneSource::File(direct));
    }
    if let Some(dir) = scene_dir {
        for candidate in [dir.join(arg), dir.join(format!("{arg}.json"))] {
            if candidate.is_file() {
                return Ok(SceneSource::File(candidate));
            }
        }
    }
    if arg == BUNDLED_SCENE_NAME || arg == format!("{BUNDLED_SCENE_NAME}.json") {
        return Ok(SceneSource::Bundled);
    }
    Err(CliError::Io(format!("cannot find scene `{arg}`")))
}

/// Resolves and loads a scene, honouring [`SCENE_DIR_ENV`].
pub fn load_scene_arg(arg: &str) -> Result<Scene, CliError> {
    let dir = std::env::var_os(SCENE_DIR_ENV).map(PathBuf::from);
    match resolve_scene(arg, dir.as_deref())? {
        SceneSource::Bundled => Ok(bundled_house()),
        SceneSource::File(path) => {
            let bytes = std::fs::read(&path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            load_scene(&bytes).map_err(|e| CliError::Domain(e.to_string()))
        }
    }
}

/// One-line summary printed by `validate`.
pub fn validation_summary(scene: &Scene) -> String {
    format!(
        "parts: {}, rotatable: {}, translatable: {}",
        scene.parts().len(),
        scene.rotatable_index().len(),
        scene.translatable_parts().count()
    )
}

/// Reads a file, or standard input for `-`.
pub fn read_input(arg: &str) -> Result<String, CliError> {
    if arg == "-" {
        std::io::read_to_string(std::io::stdin())
            .map_err(|e| CliError::Io(format!("cannot read standard input: {e}")))
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::Io(format!("cannot read {arg}: {e}")))
    }
}
