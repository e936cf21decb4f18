//! Files: atomic writes, JSON for maps and graphs, CSV for growth tables.

#[cfg(not(target_arch = "wasm32"))]
use std::io::Write;
#[cfg(not(target_arch = "wasm32"))]
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::analysis::{GrowthRow, GrowthTable};
use crate::error::{Error, Result};

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers never see a partial file.
#[cfg(not(target_arch = "wasm32"))]
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::schema("$", e.to_string()))
}

/// Parses JSON, reporting the line and column of the first problem.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::schema(format!("line {}, column {}", e.line(), e.column()), e.to_string())
    })
}

pub fn growth_table_to_csv(t: &GrowthTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &t.rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn growth_table_from_csv(text: &str) -> Result<GrowthTable> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers().map_err(|e| Error::schema("header", e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["graph_id", "root", "n", "ball_size"] {
        return Err(Error::schema("header", "expected columns graph_id,root,n,ball_size"));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.deserialize::<GrowthRow>().enumerate() {
        rows.push(rec.map_err(|e| Error::schema(format!("rows[{i}]"), e.to_string()))?);
    }
    GrowthTable::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::growth_table;
    use crate::element::PLMap;
    use crate::schreier::orbital_ball;

    #[test]
    fn csv_round_trip() {
        let g = orbital_ball(&"1/3".parse().unwrap(), 6).unwrap();
        let roots: Vec<usize> = g.complete_centers(3).take(4).collect();
        let t = growth_table(&g, "orbit:1/3", &roots, 3).unwrap();
        let text = growth_table_to_csv(&t).unwrap();
        assert!(text.starts_with("graph_id,root,n,ball_size\n"));
        assert_eq!(growth_table_from_csv(&text).unwrap(), t);
    }

    #[test]
    fn csv_rejects_bad_rows() {
        let bad = "graph_id,root,n,ball_size\ng,1/2,0,1\ng,1/2,1,0\n";
        assert!(matches!(growth_table_from_csv(bad), Err(Error::Schema { .. })));
        let bad = "graph_id,root,n,size\ng,1/2,0,1\n";
        assert!(growth_table_from_csv(bad).is_err());
        let bad = "graph_id,root,n,ball_size\ng,1/2,zero,1\n";
        assert!(matches!(growth_table_from_csv(bad), Err(Error::Schema { .. })));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.json");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, to_json(&PLMap::x0()).unwrap().as_bytes()).unwrap();
        let back: PLMap = from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(back, PLMap::x0());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn json_errors_have_locations() {
        let err = from_json::<PLMap>("{\"points\": [[\"0\",\"0\"],[\"1\",\"1\"]], \"slopes\": [\"x\"]}").unwrap_err();
        assert!(matches!(err, Error::Schema { .. }));
    }
}
