//! CSV and key-value writers. Doubles are printed in the shortest decimal
//! form that reads back to the same value.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::diagnostics::TimeSeriesLog;
use crate::error::{Error, Result};
use crate::state::State;

/// Shortest round-trip representation of `x`.
#[inline]
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.display().to_string(), source }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
    }
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

pub const SNAPSHOT_HEADER: &str = "x,p,u,c,v";

/// Snapshot rows `x,p,u,c,v[,omega]`.
pub fn write_snapshot<W: Write>(mut w: W, x: &[f64], cells: &[State], omega: Option<&[f64]>) -> std::io::Result<()> {
    match omega {
        Some(_) => writeln!(w, "{SNAPSHOT_HEADER},omega")?,
        None => writeln!(w, "{SNAPSHOT_HEADER}")?,
    }
    for (i, (x, q)) in x.iter().zip(cells).enumerate() {
        write!(w, "{:?},{:?},{:?},{:?},{:?}", x, q.p, q.u, q.c, q.v)?;
        match omega {
            Some(om) => writeln!(w, ",{:?}", om[i])?,
            None => writeln!(w)?,
        }
    }
    w.flush()
}

pub fn write_snapshot_file(path: &Path, x: &[f64], cells: &[State], omega: Option<&[f64]>) -> Result<()> {
    let f = create(path)?;
    write_snapshot(f, x, cells, omega).map_err(io_err(path))
}

pub fn write_log<W: Write>(mut w: W, log: &TimeSeriesLog) -> std::io::Result<()> {
    writeln!(w, "{}", TimeSeriesLog::HEADER)?;
    for r in &log.rows {
        writeln!(
            w,
            "{:?},{:?},{:?},{:?},{:?},{},{:?}",
            r.t, r.dt, r.energy, r.mass_c, r.smax, r.newton_iters, r.l2_c_omega
        )?;
    }
    w.flush()
}

pub fn write_log_file(path: &Path, log: &TimeSeriesLog) -> Result<()> {
    let f = create(path)?;
    write_log(f, log).map_err(io_err(path))
}

/// Flat `key = value` metadata, one pair per line, in the given order.
pub fn write_metadata_file(path: &Path, pairs: &[(String, String)]) -> Result<()> {
    let mut f = create(path)?;
    let mut body = String::new();
    for (k, v) in pairs {
        body.push_str(&format!("{k} = {v}\n"));
    }
    f.write_all(body.as_bytes()).and_then(|_| f.flush()).map_err(io_err(path))
}

pub fn write_text_file(path: &Path, text: &str) -> Result<()> {
    let mut f = create(path)?;
    f.write_all(text.as_bytes()).and_then(|_| f.flush()).map_err(io_err(path))
}

/// Column-major numeric CSV with a header line, as written by this module.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().position(|c| c == name).map(|k| self.data[k].as_slice())
    }
}

pub fn read_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let bad = |msg: String| Error::Io {
        path: path.display().to_string(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, msg),
    };
    let mut lines = text.lines();
    let columns: Vec<String> = lines.next().unwrap_or("").split(',').map(str::to_string).collect();
    let mut data = vec![Vec::new(); columns.len()];
    for (ln, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(bad(format!("line {} has {} fields, expected {}", ln + 2, fields.len(), columns.len())));
        }
        for (col, s) in data.iter_mut().zip(fields) {
            col.push(s.parse().map_err(|e| bad(format!("line {}: {e}", ln + 2)))?);
        }
    }
    Ok(Table { columns, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0, 123456.789, f64::MIN_POSITIVE] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(1.0), "1.0");
    }

    #[test]
    fn snapshot_layout_and_read_back() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/snap.csv");
        let cells = [State::new(0.0, 1.0, 2.0, 3.0), State::new(-0.5, 0.25, 1e-9, 4.0)];
        write_snapshot_file(&path, &[0.1, 0.2], &cells, Some(&[7.0, 8.0])).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "x,p,u,c,v,omega\n0.1,0.0,1.0,2.0,3.0,7.0\n0.2,-0.5,0.25,1e-9,4.0,8.0\n");
        let t = read_table(&path).unwrap();
        assert_eq!(t.column("c").unwrap(), &[2.0, 1e-9]);
        assert!(t.column("nope").is_none());
    }

    #[test]
    fn metadata_is_key_value() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("summary.txt");
        write_metadata_file(&path, &[("scenario".into(), "spinodal".into()), ("n".into(), "1000".into())]).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "scenario = spinodal\nn = 1000\n");
    }
}
