//! CSV persistence of oracle node tables.
//!
//! One file per (family, alpha, npts). The layout matches the CLI's node
//! output: a `# laguerre-difmat v1, ...` header line, a column line
//! `index,node,coeff`, then one row per node. Values carry 34 significant
//! digits.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::difmat::{Family, OracleNodes};
use crate::dw::DoubleWord;
use crate::roots::OracleError;

pub const DIGITS: usize = 34;

pub fn file_name(family: Family, alpha: f64, npts: usize) -> String {
    format!("nodes_{}_alpha{}_npts{}.csv", family.tag(), alpha, npts)
}

pub fn path_for(dir: &Path, family: Family, alpha: f64, npts: usize) -> PathBuf {
    dir.join(file_name(family, alpha, npts))
}

pub fn header(family: Family, alpha: f64, npts: usize, order: usize) -> String {
    format!(
        "# laguerre-difmat v1, family={}, alpha={}, npts={}, order={}",
        family.tag(),
        alpha,
        npts,
        order
    )
}

pub fn write_nodes(dir: &Path, on: &OracleNodes) -> Result<PathBuf, OracleError> {
    fs::create_dir_all(dir)?;
    let path = path_for(dir, on.family, on.alpha, on.npts);
    let mut out = String::new();
    out.push_str(&header(on.family, on.alpha, on.npts, 0));
    out.push('\n');
    out.push_str("index,node,coeff\n");
    for (i, (x, c)) in on.nodes.iter().zip(&on.coeffs).enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            i,
            x.to_sci_string(DIGITS),
            c.to_sci_string(DIGITS)
        ));
    }
    let mut f = fs::File::create(&path)?;
    f.write_all(out.as_bytes())?;
    Ok(path)
}

/// Parses the `key=value` pairs of a header line.
pub fn parse_header(line: &str) -> Option<Vec<(String, String)>> {
    let rest = line.strip_prefix("# laguerre-difmat v1")?;
    Some(
        rest.split(',')
            .filter_map(|kv| {
                let (k, v) = kv.trim().split_once('=')?;
                Some((k.trim().to_string(), v.trim().to_string()))
            })
            .collect(),
    )
}

pub fn read_nodes(dir: &Path, family: Family, alpha: f64, npts: usize) -> Result<OracleNodes, OracleError> {
    let path = path_for(dir, family, alpha, npts);
    let text = fs::read_to_string(&path)?;
    let bad = |m: &str| OracleError::Format(format!("{}: {m}", path.display()));
    let mut lines = text.lines();
    let head = parse_header(lines.next().ok_or_else(|| bad("empty file"))?).ok_or_else(|| bad("missing header"))?;
    let get = |k: &str| head.iter().find(|(kk, _)| kk == k).map(|(_, v)| v.as_str());
    if get("family") != Some(family.tag()) || get("npts") != Some(npts.to_string().as_str()) {
        return Err(bad("header does not match request"));
    }
    if lines.next() != Some("index,node,coeff") {
        return Err(bad("missing column line"));
    }
    let mut nodes = Vec::with_capacity(npts);
    let mut coeffs = Vec::with_capacity(npts);
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let mut cols = line.split(',');
        let _idx = cols.next();
        let x: DoubleWord = cols
            .next()
            .ok_or_else(|| bad("short row"))?
            .parse()
            .map_err(|_| bad("bad node"))?;
        let c: DoubleWord = cols
            .next()
            .ok_or_else(|| bad("short row"))?
            .parse()
            .map_err(|_| bad("bad coeff"))?;
        nodes.push(x);
        coeffs.push(c);
    }
    if nodes.len() != npts {
        return Err(bad("row count does not match npts"));
    }
    Ok(OracleNodes {
        family,
        alpha,
        npts,
        nodes,
        coeffs,
    })
}

/// Reads the table if cached, otherwise computes and stores it.
pub fn load_or_build(dir: &Path, family: Family, alpha: f64, npts: usize) -> Result<OracleNodes, OracleError> {
    match read_nodes(dir, family, alpha, npts) {
        Ok(on) => Ok(on),
        Err(_) => {
            let on = crate::difmat::oracle_nodes(family, alpha, npts)?;
            write_nodes(dir, &on)?;
            Ok(on)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_keeps_31_digits() {
        let dir = tempfile::tempdir().unwrap();
        let on = crate::difmat::oracle_nodes(Family::GaussRadau, 1.0, 12).unwrap();
        write_nodes(dir.path(), &on).unwrap();
        let back = read_nodes(dir.path(), Family::GaussRadau, 1.0, 12).unwrap();
        for (a, b) in on
            .nodes
            .iter()
            .zip(&back.nodes)
            .chain(on.coeffs.iter().zip(&back.coeffs))
        {
            let scale = a.hi.abs().max(1e-300);
            assert!((*a - *b).to_f64().abs() <= 1e-31 * scale);
        }
        assert!(read_nodes(dir.path(), Family::GaussRadau, 1.0, 13).is_err());
    }
}
