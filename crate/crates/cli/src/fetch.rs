//! SuiteSparse download and cache.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Duration;

use flate2::read::GzDecoder;
use submatrix_core::sparse::read_matrix_market;

use crate::CliError;

pub const DEFAULT_BASE_URL: &str = "https://sparse.tamu.edu";
pub const BASE_URL_ENV: &str = "SM_SUITESPARSE_URL";

/// Flag value, then `SM_SUITESPARSE_URL`, then the default host.
pub fn resolve_base_url(flag: Option<&str>) -> String {
    flag.map(str::to_string)
        .or_else(|| std::env::var(BASE_URL_ENV).ok().filter(|s| !s.is_empty()))
        .unwrap_or_else(|| DEFAULT_BASE_URL.to_string())
        .trim_end_matches('/')
        .to_string()
}

pub fn archive_url(base: &str, group: &str, name: &str) -> String {
    format!("{}/MM/{group}/{name}.tar.gz", base.trim_end_matches('/'))
}

pub fn cached_path(cache_dir: &Path, name: &str) -> PathBuf {
    cache_dir.join(format!("{name}.mtx"))
}

/// Returns the cached `.mtx` path, downloading and unpacking it first if it
/// is not in the cache yet. A cache hit never touches the network.
pub fn fetch_matrix(group: &str, name: &str, cache_dir: &Path, base_url: &str) -> Result<PathBuf, CliError> {
    let target = cached_path(cache_dir, name);
    if target.is_file() {
        return Ok(target);
    }
    let url = archive_url(base_url, group, name);
    let archive = download(&url)?;
    let mtx = extract_mtx(&archive, name)?;
    read_matrix_market(mtx.as_slice())
        .map_err(|e| CliError::Corrupt(format!("{name}.mtx from {url}: {e}")))?;

    fs::create_dir_all(cache_dir)?;
    let partial = cache_dir.join(format!(".{name}.mtx.partial"));
    fs::write(&partial, &mtx)?;
    fs::rename(&partial, &target)?;
    Ok(target)
}

fn download(url: &str) -> Result<Vec<u8>, CliError> {
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(600))
        .connect_timeout(Duration::from_secs(20))
        .build()
        .map_err(|e| CliError::Network(format!("{url}: {e}")))?;
    let resp = client
        .get(url)
        .send()
        .map_err(|e| CliError::Network(format!("{url}: {e}")))?;
    let status = resp.status();
    if !status.is_success() {
        return Err(CliError::Network(format!("{url}: server returned {status}")));
    }
    resp.bytes()
        .map(|b| b.to_vec())
        .map_err(|e| CliError::Network(format!("{url}: {e}")))
}

/// Pulls `{name}.mtx` out of a SuiteSparse `.tar.gz`; the archive usually
/// stores it as `{name}/{name}.mtx` next to auxiliary files.
pub fn extract_mtx(archive: &[u8], name: &str) -> Result<Vec<u8>, CliError> {
    let wanted = format!("{name}.mtx");
    let mut tar = tar::Archive::new(GzDecoder::new(archive));
    let entries = tar
        .entries()
        .map_err(|e| CliError::Corrupt(format!("bad archive: {e}")))?;
    for entry in entries {
        let mut entry = entry.map_err(|e| CliError::Corrupt(format!("bad archive: {e}")))?;
        let path = entry
            .path()
            .map_err(|e| CliError::Corrupt(format!("bad archive path: {e}")))?
            .into_owned();
        if path.file_name().and_then(|f| f.to_str()) == Some(wanted.as_str()) {
            let mut out = Vec::new();
            entry
                .read_to_end(&mut out)
                .map_err(|e| CliError::Corrupt(format!("bad archive: {e}")))?;
            return Ok(out);
        }
    }
    Err(CliError::Corrupt(format!("archive has no {wanted}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn url_layout() {
        assert_eq!(
            archive_url("https://example.org/", "JGD_Trefethen", "Trefethen_2000"),
            "https://example.org/MM/JGD_Trefethen/Trefethen_2000.tar.gz"
        );
        assert_eq!(resolve_base_url(Some("http://x/")), "http://x");
    }

    #[test]
    fn garbage_archive_is_corrupt() {
        assert!(matches!(extract_mtx(b"not gzip", "x"), Err(CliError::Corrupt(_))));
    }
}
