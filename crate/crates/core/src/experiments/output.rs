use std::fs;
use std::io::Write;
use std::path::Path;

use super::ber::BerCurve;
use super::papr::PaprCcdf;
use super::room::HeatMap;
use crate::error::Result;

/// A header row plus records, serialized as RFC 4180 CSV.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| crate::Error::Io(e.to_string()))
    }

    pub fn ber(curves: &[&BerCurve]) -> Self {
        let mut t = Self::new(&[
            "scheme",
            "snr_per_bit_db",
            "ber",
            "bits",
            "errors",
            "unreliable",
        ]);
        for c in curves {
            for p in &c.points {
                t.push(vec![
                    c.scheme.clone(),
                    p.snr_per_bit_db.to_string(),
                    p.ber.to_string(),
                    p.bits.to_string(),
                    p.errors.to_string(),
                    p.unreliable.to_string(),
                ]);
            }
        }
        t
    }

    pub fn papr(curves: &[PaprCcdf]) -> Self {
        let mut t = Self::new(&["label", "n", "frames", "threshold_db", "ccdf"]);
        for c in curves {
            for (g, p) in c.thresholds_db.iter().zip(&c.ccdf) {
                t.push(vec![
                    c.label.clone(),
                    c.n.to_string(),
                    c.frames_simulated.to_string(),
                    g.to_string(),
                    p.to_string(),
                ]);
            }
        }
        t
    }

    /// One row per cell; `columns` names each map in order.
    pub fn heatmaps(columns: &[&str], maps: &[&HeatMap]) -> Self {
        let mut header = vec!["x_m", "y_m"];
        header.extend_from_slice(columns);
        let mut t = Self::new(&header);
        let cells: Vec<Vec<(f64, f64, f64)>> = maps.iter().map(|m| m.cells().collect()).collect();
        for i in 0..cells[0].len() {
            let (x, y, _) = cells[0][i];
            let mut row = vec![x.to_string(), y.to_string()];
            row.extend(cells.iter().map(|c| c[i].2.to_string()));
            t.push(row);
        }
        t
    }
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let mut f = fs::File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotes_and_crlf() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.push(vec!["x,y".into(), "say \"hi\"".into()]);
        assert_eq!(
            t.to_bytes().unwrap(),
            b"a,b\r\n\"x,y\",\"say \"\"hi\"\"\"\r\n"
        );
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
