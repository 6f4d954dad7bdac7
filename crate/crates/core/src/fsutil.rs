use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Writes via a sibling temp file and rename so readers never see a partial file.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(Error::at_path(parent))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    let mut file = fs::File::create(tmp).map_err(Error::at_path(tmp))?;
    file.write_all(bytes).map_err(Error::at_path(tmp))?;
    file.sync_all().map_err(Error::at_path(tmp))?;
    fs::rename(tmp, path).map_err(Error::at_path(path))?;
    Ok(())
}
