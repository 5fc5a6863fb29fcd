use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};

/// Formats a float with 17 significant digits, enough to round-trip any f64
/// so reruns can be compared byte for byte.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// In-memory CSV builder. Rows are validated against the header width and
/// the whole artifact is written atomically with LF line endings.
pub struct CsvWriter {
    header: Vec<String>,
    lines: Vec<String>,
}

impl CsvWriter {
    pub fn new(columns: &[&str]) -> Self {
        CsvWriter {
            header: columns.iter().map(|s| s.to_string()).collect(),
            lines: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) -> Result<()> {
        if cells.len() != self.header.len() {
            return Err(HarnessError::Config(format!(
                "csv row has {} cells, header has {}",
                cells.len(),
                self.header.len()
            )));
        }
        for c in &cells {
            if c.contains(',') || c.contains('\n') {
                return Err(HarnessError::Config(format!("csv cell '{c}' needs quoting")));
            }
        }
        self.lines.push(cells.join(","));
        Ok(())
    }

    pub fn to_string(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        }
        std::fs::write(path, self.to_string()).map_err(|e| HarnessError::io(path, e))
    }
}

/// A parsed CSV file: header row plus rectangular string cells.
pub struct CsvTable {
    path: PathBuf,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header_line) = lines.next().ok_or_else(|| HarnessError::Csv {
            path: path.to_path_buf(),
            line: 1,
            msg: "empty file".into(),
        })?;
        let header: Vec<String> = header_line.split(',').map(|s| s.to_string()).collect();
        let mut rows = Vec::new();
        for (idx, line) in lines {
            if line.is_empty() {
                continue;
            }
            let cells: Vec<String> = line.split(',').map(|s| s.to_string()).collect();
            if cells.len() != header.len() {
                return Err(HarnessError::Csv {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    msg: format!("expected {} cells, got {}", header.len(), cells.len()),
                });
            }
            rows.push(cells);
        }
        Ok(CsvTable { path: path.to_path_buf(), header, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header.iter().position(|h| h == name).ok_or_else(|| HarnessError::Csv {
            path: self.path.clone(),
            line: 1,
            msg: format!("missing column '{name}'"),
        })
    }

    pub fn cell(&self, row: usize, col: usize) -> &str {
        &self.rows[row][col]
    }

    pub fn f64(&self, row: usize, col: usize) -> Result<f64> {
        let raw = self.cell(row, col);
        raw.parse().map_err(|_| HarnessError::Csv {
            path: self.path.clone(),
            line: row + 2,
            msg: format!("'{raw}' is not a number"),
        })
    }
}
