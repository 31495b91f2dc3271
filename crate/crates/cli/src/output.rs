use gpt_corners::{Error, Result};
use serde::Serialize;
use std::cell::RefCell;
use std::path::{Path, PathBuf};

/// Output directory that remembers what was written, for the summary on stdout.
pub struct OutDir {
    dir: PathBuf,
    written: RefCell<Vec<String>>,
}

impl OutDir {
    pub fn new(dir: PathBuf) -> Self {
        OutDir {
            dir,
            written: RefCell::new(Vec::new()),
        }
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<()> {
        std::fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(name);
        std::fs::write(&path, contents)?;
        self.written.borrow_mut().push(path.display().to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    /// Print the list of written files as JSON.
    pub fn finish(&self) -> Result<()> {
        println!(
            "{}",
            serde_json::json!({ "written": *self.written.borrow() })
        );
        Ok(())
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}
