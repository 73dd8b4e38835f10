//! Field output: CSV for analysis, legacy VTK for visualization tools.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::config::OutputFormat;
use crate::error::{Error, Result};
use crate::euler::{conserved_to_primitive, ConservedState, GasModel, PrimitiveState};
use crate::mesh::{Grid, NodeClass};

pub const CSV_HEADER: &str = "x,y,rho,u,v,p,class";

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Primitive state per node; unused nodes carry `placeholder`.
fn primitives(
    grid: &Grid,
    u: &[ConservedState],
    gas: GasModel,
    placeholder: PrimitiveState,
) -> Result<Vec<PrimitiveState>> {
    (0..grid.len())
        .map(|k| {
            if grid.class_at(k) == NodeClass::UnusedExterior {
                Ok(placeholder)
            } else {
                conserved_to_primitive(u[k], gas).map_err(|e| e.at_node(grid.coords(k)))
            }
        })
        .collect()
}

/// Write the field in `format` to `path`. Unused nodes are written with
/// `placeholder` (the free stream).
pub fn write_field(
    grid: &Grid,
    u: &[ConservedState],
    gas: GasModel,
    placeholder: PrimitiveState,
    format: OutputFormat,
    path: &Path,
) -> Result<()> {
    let prims = primitives(grid, u, gas, placeholder)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    match format {
        OutputFormat::Csv => write_csv(grid, &prims, &mut w),
        OutputFormat::VtkLegacy => write_vtk(grid, &prims, &mut w),
    }
    .and_then(|_| w.flush())
    .map_err(io_err(path))
}

fn write_csv(grid: &Grid, prims: &[PrimitiveState], w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for (k, p) in prims.iter().enumerate() {
        let (i, j) = grid.coords(k);
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            grid.x(i),
            grid.y(j),
            p.rho,
            p.u,
            p.v,
            p.p,
            grid.class_at(k).code()
        )?;
    }
    Ok(())
}

fn write_vtk(grid: &Grid, prims: &[PrimitiveState], w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "cartwing field")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET STRUCTURED_POINTS")?;
    writeln!(w, "DIMENSIONS {} {} 1", grid.width(), grid.height())?;
    writeln!(w, "ORIGIN {:.16e} {:.16e} 0", grid.x(0), grid.y(0))?;
    writeln!(w, "SPACING {:.16e} {:.16e} 1", grid.hx, grid.hy)?;
    writeln!(w, "POINT_DATA {}", prims.len())?;
    for (name, f) in [("density", 0usize), ("pressure", 1)] {
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for p in prims {
            writeln!(w, "{:.16e}", if f == 0 { p.rho } else { p.p })?;
        }
    }
    writeln!(w, "SCALARS class int 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for k in 0..prims.len() {
        writeln!(w, "{}", grid.class_at(k).code())?;
    }
    writeln!(w, "VECTORS velocity double")?;
    for p in prims {
        writeln!(w, "{:.16e} {:.16e} 0", p.u, p.v)?;
    }
    Ok(())
}

/// One CSV row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsvRow {
    pub x: f64,
    pub y: f64,
    pub state: PrimitiveState,
    pub class: u8,
}

/// Read a CSV written by [`write_field`].
pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut rows = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if n == 0 {
            if line != CSV_HEADER {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("unexpected CSV header `{line}`"),
                });
            }
            continue;
        }
        let bad = || Error::Parse {
            line: n + 1,
            message: format!("malformed CSV row `{line}`"),
        };
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(bad());
        }
        let v = cols[..6]
            .iter()
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        rows.push(CsvRow {
            x: v[0],
            y: v[1],
            state: PrimitiveState::new(v[2], v[3], v[4], v[5]),
            class: cols[6].parse().map_err(|_| bad())?,
        });
    }
    Ok(rows)
}
