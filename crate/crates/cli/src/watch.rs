use std::collections::HashSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use thermfuse::pipeline::RunConfig;
use thermfuse::thermal::{latest_frame_in_directory, ThermalError};
use thermfuse::Hotspot;

use crate::commands::{locate, read_frame, HOTSPOT_HEADER};
use crate::CliError;

/// Tracks which frames in a capture directory have already been handled.
///
/// Only the newest frame is considered on each poll. Frames that arrive and
/// are superseded between two polls are skipped.
#[derive(Debug)]
pub struct Watcher {
    dir: PathBuf,
    seen: HashSet<OsString>,
}

impl Watcher {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            seen: HashSet::new(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Looks for a new latest frame and hands it to `process`.
    ///
    /// Returns the frame path when `process` succeeded. A frame whose
    /// processing fails is not marked as seen, so a file caught mid-write is
    /// retried on the next poll.
    pub fn poll_once<T, E>(
        &mut self,
        mut process: impl FnMut(&Path) -> Result<T, E>,
    ) -> Result<Option<(PathBuf, T)>, PollError<E>> {
        let latest = match latest_frame_in_directory(&self.dir) {
            Ok(p) => p,
            Err(ThermalError::NoFrames { .. }) => return Ok(None),
            Err(e) => return Err(PollError::Listing(e)),
        };
        let name = latest.file_name().map(OsString::from).unwrap_or_default();
        if self.seen.contains(&name) {
            return Ok(None);
        }
        let out = process(&latest).map_err(PollError::Process)?;
        self.seen.insert(name);
        Ok(Some((latest, out)))
    }

    pub fn processed(&self) -> usize {
        self.seen.len()
    }
}

#[derive(Debug)]
pub enum PollError<E> {
    Listing(ThermalError),
    Process(E),
}

pub fn run_watch(
    cfg: &RunConfig,
    max_polls: Option<u64>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    cfg.require_intrinsics()?;
    cfg.require_threshold()?;
    let depth = cfg.require_depth()?;
    let dir = cfg.require_input()?.clone();
    if !dir.is_dir() {
        return Err(CliError::Failed(format!(
            "{} is not a directory",
            dir.display()
        )));
    }
    let interval = cfg.interval_or_default();
    let mut watcher = Watcher::new(dir);
    writeln!(stdout, "frame,{HOTSPOT_HEADER}")?;
    stdout.flush()?;

    let mut polls = 0u64;
    loop {
        let result = watcher.poll_once(|path| -> Result<Vec<Hotspot>, CliError> {
            locate(cfg, &read_frame(path)?, depth)
        });
        match result {
            Ok(Some((path, hotspots))) => {
                let name = path
                    .file_name()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned();
                let mut table = Vec::new();
                crate::commands::write_hotspots(&hotspots, &mut table)?;
                // drop the per-frame header; the stream has its own
                for row in String::from_utf8_lossy(&table).lines().skip(1) {
                    writeln!(stdout, "{name},{row}")?;
                }
                stdout.flush()?;
                log::info!("{name}: {} hotspot(s)", hotspots.len());
            }
            Ok(None) => {}
            Err(PollError::Listing(e)) => return Err(e.into()),
            Err(PollError::Process(CliError::Failed(m))) => {
                writeln!(stderr, "warning: {m}")?;
            }
            Err(PollError::Process(e)) => return Err(e),
        }
        polls += 1;
        if max_polls.is_some_and(|m| polls >= m) {
            return Ok(());
        }
        std::thread::sleep(interval);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn each_frame_is_processed_once() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = Watcher::new(dir.path());
        let ok = |p: &Path| -> Result<PathBuf, ()> { Ok(p.to_path_buf()) };

        assert!(w.poll_once(ok).unwrap().is_none());
        fs::write(dir.path().join("f001.pgm"), b"").unwrap();
        assert!(w.poll_once(ok).unwrap().is_some());
        assert!(w.poll_once(ok).unwrap().is_none());
        fs::write(dir.path().join("f002.pgm"), b"").unwrap();
        fs::write(dir.path().join("notes.txt"), b"").unwrap();
        let (p, _) = w.poll_once(ok).unwrap().unwrap();
        assert!(p.ends_with("f002.pgm"));
        assert!(w.poll_once(ok).unwrap().is_none());
        assert_eq!(w.processed(), 2);
    }

    #[test]
    fn failed_frames_are_retried() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.pgm"), b"").unwrap();
        let mut w = Watcher::new(dir.path());
        assert!(matches!(
            w.poll_once(|_| Err::<(), _>("partial")),
            Err(PollError::Process("partial"))
        ));
        assert!(w.poll_once(|_| Ok::<_, ()>(())).unwrap().is_some());
        assert_eq!(w.processed(), 1);
    }
}
