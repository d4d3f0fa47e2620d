//! File formats: JSON scenes, binary volumes and PPM projections.

mod ppm;
mod scene;
mod volume;

pub use ppm::{project, write_ppm, Axis, Image, ProjectionMode};
pub use scene::{
    load_frames, load_scene, save_scene, CharacteristicSpec, DisplaySpec, FrameSpec, LightSpec,
    LightUpdateSpec, MediumEdit, ObjectPoseSpec, ObjectSpec, ObserverSpec, PoseSpec, SceneFile,
    ShadeSpec, TransmittanceMode, WorldSpec, MAX_OBJECT_ID,
};
pub use volume::{decode_volume, encode_volume, read_volume, write_volume, MAGIC};

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Writes `bytes` to `path` via a temporary file in the same directory, so that readers never
/// see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut builder = tempfile::Builder::new();
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        builder.permissions(std::fs::Permissions::from_mode(0o644));
    }
    let mut tmp = builder.tempfile_in(dir).map_err(with_path(dir))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| with_path(path)(e.error))?;
    Ok(())
}

pub(crate) fn with_path(path: &Path) -> impl FnOnce(std::io::Error) -> crate::Error + '_ {
    move |e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into()
}
