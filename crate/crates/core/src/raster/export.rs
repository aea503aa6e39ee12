//! Portable graymap and CSV exports.
//!
//! Graymaps are binary `P5` files with `maxval` 255, one per channel, written
//! north-up (the last grid row is the first image row). CSV exports list only
//! non-zero cells as `channel,row,col,x,y,value`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{BevRaster, Channel, GridGeometry};
use crate::error::Result;

/// Writes one layer in `[0, 1]` as an 8-bit graymap.
pub fn write_pgm(path: &Path, geometry: &GridGeometry, values: &[f32], comment: &str) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n# {comment}\n{} {}\n255\n", geometry.cols, geometry.rows)?;
    let mut row_buf = vec![0u8; geometry.cols];
    for r in (0..geometry.rows).rev() {
        for (c, px) in row_buf.iter_mut().enumerate() {
            let v = values[geometry.index(r, c)].clamp(0.0, 1.0);
            *px = (v * 255.0).round() as u8;
        }
        w.write_all(&row_buf)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<stem>_<channel>.pgm` for each channel and returns the paths.
pub fn export_raster_pgm(raster: &BevRaster, dir: &Path, stem: &str, comment: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (i, ch) in Channel::ALL.iter().enumerate() {
        let path = dir.join(format!("{stem}_{i}_{}.pgm", ch.name()));
        write_pgm(&path, &raster.geometry, raster.channel(*ch), comment)?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn export_raster_csv(raster: &BevRaster, path: &Path, header_comment: &str) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# {header_comment}")?;
    writeln!(w, "channel,row,col,x,y,value")?;
    let g = raster.geometry;
    for ch in Channel::ALL {
        let data = raster.channel(ch);
        for r in 0..g.rows {
            for c in 0..g.cols {
                let v = data[g.index(r, c)];
                if v != 0.0 {
                    let p = g.cell_center(r, c);
                    writeln!(w, "{},{r},{c},{:.3},{:.3},{v}", ch.name(), p[0], p[1])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}
