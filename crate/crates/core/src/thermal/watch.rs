use std::fs;
use std::path::{Path, PathBuf};

use super::ThermalError;

/// Extension of frame files picked up from a capture directory.
pub const FRAME_EXTENSION: &str = "pgm";

/// The frame file whose name sorts last in `dir`.
///
/// The camera names captures with increasing sequence numbers, so the newest
/// frame is the last one in a lexicographic listing. Files with any other
/// extension are ignored.
pub fn latest_frame_in_directory(dir: &Path) -> Result<PathBuf, ThermalError> {
    let mut latest: Option<(std::ffi::OsString, PathBuf)> = None;
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let path = entry.path();
        let is_frame = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case(FRAME_EXTENSION));
        if !is_frame || !entry.file_type()?.is_file() {
            continue;
        }
        let name = entry.file_name();
        if latest.as_ref().is_none_or(|(best, _)| name > *best) {
            latest = Some((name, path));
        }
    }
    latest
        .map(|(_, p)| p)
        .ok_or_else(|| ThermalError::NoFrames {
            dir: dir.display().to_string(),
            ext: FRAME_EXTENSION,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn touch(dir: &Path, name: &str) {
        fs::write(dir.join(name), b"").unwrap();
    }

    #[test]
    fn picks_last_in_listing_order() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "frame_0002.pgm");
        touch(dir.path(), "frame_0001.pgm");
        let latest = latest_frame_in_directory(dir.path()).unwrap();
        assert_eq!(latest.file_name().unwrap(), "frame_0002.pgm");
    }

    #[test]
    fn empty_directory_has_no_frames() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            latest_frame_in_directory(dir.path()),
            Err(ThermalError::NoFrames { .. })
        ));
    }

    #[test]
    fn other_extensions_are_ignored() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "a.pgm");
        touch(dir.path(), "notes.txt");
        fs::create_dir(dir.path().join("z.pgm")).unwrap();
        let latest = latest_frame_in_directory(dir.path()).unwrap();
        assert_eq!(latest.file_name().unwrap(), "a.pgm");
    }
}
