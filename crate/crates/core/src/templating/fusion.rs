use std::collections::BTreeMap;

use thiserror::Error;

use crate::nanovc::{ContentArea, RepoPath};

/// Fusion region markers. They sit inside whatever comment syntax the host
/// language uses; the scanner matches the marker text anywhere in a line.
const OPEN_MARK: &[u8] = b"<~region:";
const CLOSE_MARK: &[u8] = b"<~/region:";
const MARK_END: &[u8] = b"~>";

/// Key of one extracted partial body: `(file path, region name)`.
pub type PartialKey = (RepoPath, String);

/// Map from `(path, region)` to the partial body bytes, exclusive of the
/// marker lines.
pub type PartialSet = BTreeMap<PartialKey, Vec<u8>>;

/// Region markers in a file were malformed.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FusionError {
    #[error("unbalanced region in `{path}`: {reason}")]
    UnbalancedRegion { path: RepoPath, reason: String },
    #[error("duplicate region `{name}` in `{path}`")]
    DuplicateRegion { path: RepoPath, name: String },
}

/// Orphan partials and per-file notes produced by [`fuse`]. Never fatal.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct FuseReport {
    /// Partials whose `(path, region)` matched no generated region.
    pub orphans: Vec<PartialKey>,
    /// Generated files whose markers could not be scanned and were left
    /// untouched.
    pub warnings: Vec<String>,
}

struct RegionSpan {
    name: String,
    /// Byte offset just past the open-marker line (including its newline).
    body_start: usize,
    /// Byte offset of the start of the close-marker line.
    body_end: usize,
}

fn find_marker(line: &[u8]) -> Option<(bool, String)> {
    // Close first: the open pattern is a prefix-free sibling (`<~region:` vs
    // `<~/region:`), so order only matters for malformed lines with both.
    for (is_close, mark) in [(true, CLOSE_MARK), (false, OPEN_MARK)] {
        if let Some(pos) = line.windows(mark.len()).position(|w| w == mark) {
            let rest = &line[pos + mark.len()..];
            let end = rest
                .windows(MARK_END.len())
                .position(|w| w == MARK_END)?;
            let name = String::from_utf8_lossy(&rest[..end]).into_owned();
            return Some((is_close, name));
        }
    }
    None
}

fn valid_region_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Scan one file for flat, uniquely-named regions.
fn scan_regions(path: &RepoPath, content: &[u8]) -> Result<Vec<RegionSpan>, FusionError> {
    let unbalanced = |reason: String| FusionError::UnbalancedRegion {
        path: path.clone(),
        reason,
    };
    let mut regions: Vec<RegionSpan> = Vec::new();
    let mut open: Option<(String, usize)> = None;
    let mut at = 0usize;
    while at < content.len() {
        let line_end = content[at..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|p| at + p + 1)
            .unwrap_or(content.len());
        let line = &content[at..line_end];
        match find_marker(line) {
            Some((false, name)) => {
                if !valid_region_name(&name) {
                    return Err(unbalanced(format!("malformed region name `{name}`")));
                }
                if let Some((open_name, _)) = &open {
                    return Err(unbalanced(format!(
                        "open marker `{name}` inside open region `{open_name}`"
                    )));
                }
                if regions.iter().any(|r| r.name == name) {
                    return Err(FusionError::DuplicateRegion {
                        path: path.clone(),
                        name,
                    });
                }
                open = Some((name, line_end));
            }
            Some((true, name)) => match open.take() {
                Some((open_name, body_start)) if open_name == name => {
                    regions.push(RegionSpan {
                        name,
                        body_start,
                        body_end: at,
                    });
                }
                Some((open_name, _)) => {
                    return Err(unbalanced(format!(
                        "close marker `{name}` does not match open region `{open_name}`"
                    )))
                }
                None => {
                    return Err(unbalanced(format!("close marker `{name}` without open")))
                }
            },
            None => {}
        }
        at = line_end;
    }
    if let Some((name, _)) = open {
        return Err(unbalanced(format!("region `{name}` is never closed")));
    }
    Ok(regions)
}

/// Names of the regions marked in a piece of template or generated text.
pub fn region_names(text: &str) -> Vec<String> {
    let path = RepoPath::new("x").expect("static path");
    scan_regions(&path, text.as_bytes())
        .map(|rs| rs.into_iter().map(|r| r.name).collect())
        .unwrap_or_default()
}

/// Extract every region body from a set of hand-authored partial files.
pub fn extract_partials(files: &ContentArea) -> Result<PartialSet, FusionError> {
    let mut out = PartialSet::new();
    for (path, content) in files.iter() {
        for region in scan_regions(path, content)? {
            out.insert(
                (path.clone(), region.name),
                content[region.body_start..region.body_end].to_vec(),
            );
        }
    }
    Ok(out)
}

/// Splice partial bodies into the matching regions of generated files.
///
/// Markers are retained so the output can be re-fused; regions with no
/// matching partial keep their generated default body; partials that match
/// nothing are reported as orphans.
pub fn fuse(generated: &ContentArea, partials: &PartialSet) -> (ContentArea, FuseReport) {
    let mut report = FuseReport::default();
    let mut used: BTreeMap<&PartialKey, bool> =
        partials.keys().map(|k| (k, false)).collect();
    let mut out = ContentArea::new();
    for (path, content) in generated.iter() {
        let regions = match scan_regions(path, content) {
            Ok(regions) => regions,
            Err(e) => {
                report.warnings.push(e.to_string());
                out.insert(path.clone(), content);
                continue;
            }
        };
        let mut fused = Vec::with_capacity(content.len());
        let mut cursor = 0usize;
        for region in &regions {
            let key = (path.clone(), region.name.clone());
            if let Some(body) = partials.get(&key) {
                fused.extend_from_slice(&content[cursor..region.body_start]);
                fused.extend_from_slice(body);
                cursor = region.body_end;
                if let Some(flag) = used.get_mut(&key) {
                    *flag = true;
                }
            }
        }
        fused.extend_from_slice(&content[cursor..]);
        out.insert(path.clone(), fused);
    }
    report.orphans = used
        .into_iter()
        .filter(|(_, used)| !used)
        .map(|(k, _)| k.clone())
        .collect();
    (out, report)
}
