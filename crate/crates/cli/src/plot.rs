use std::io;
use std::path::Path;

/// Writes named columns as a CSV with a header row. No rendering happens here.
pub fn emit_plot_data(header: &[&str], columns: &[Vec<f64>], path: &Path) -> io::Result<()> {
    if header.len() != columns.len() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "one header name per column"));
    }
    let rows = columns.first().map_or(0, Vec::len);
    if columns.iter().any(|c| c.len() != rows) {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "columns differ in length"));
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| format!("{:e}", c[i])))?;
    }
    w.flush()
}
