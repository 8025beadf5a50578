//! Artifact emission: stdout, or files in an output directory written via rename.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

/// One named output file.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub body: String,
}

impl Artifact {
    pub fn json<T: Serialize>(name: &str, value: &T) -> serde_json::Result<Self> {
        let mut body = serde_json::to_string_pretty(value)?;
        body.push('\n');
        Ok(Artifact {
            name: name.to_string(),
            body,
        })
    }

    pub fn csv(name: &str, body: Vec<u8>) -> Self {
        Artifact {
            name: name.to_string(),
            body: String::from_utf8(body).expect("csv writer emits UTF-8"),
        }
    }
}

/// Write each artifact to a temporary file in `dir` and rename it into place.
pub fn write_atomic(dir: &Path, artifacts: &[Artifact]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for a in artifacts {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(a.body.as_bytes())?;
        #[cfg(unix)]
        {
            use std::os::unix::fs::PermissionsExt;
            tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
        }
        tmp.as_file().sync_all()?;
        tmp.persist(dir.join(&a.name)).map_err(|e| e.error)?;
    }
    Ok(())
}

pub fn write_stdout(artifacts: &[Artifact]) -> std::io::Result<()> {
    let mut out = std::io::stdout().lock();
    for a in artifacts {
        out.write_all(a.body.as_bytes())?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn files_land_with_their_names() {
        let dir = tempfile::tempdir().unwrap();
        let arts = [Artifact::csv("a.csv", b"x,value\n".to_vec()), Artifact::json("b.json", &[1, 2]).unwrap()];
        write_atomic(dir.path(), &arts).unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("a.csv")).unwrap(), "x,value\n");
        let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 2);
    }
}
