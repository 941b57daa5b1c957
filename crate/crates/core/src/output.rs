//! Versioned delimited-text outputs and their readers.
//!
//! Every file starts with the schema line `# floeflow-v1`. Floats are
//! written in shortest round-trip form, so reading a file back yields the
//! same bits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::{ConcentrationGrid, DiagnosticsRecord};
use crate::error::{FloeError, Result};
use crate::model::{Domain, Ensemble, Floe, Vec2};

pub const SCHEMA: &str = "# floeflow-v1";

pub const PARTICLE_COLUMNS: &str = "id,r,h,x,y,u,v";

pub const DIAGNOSTICS_COLUMNS: &str = "step,t,M0,M1x,M1y,M2v,M2x,M2,momentum_residual,energy_residual,velocity_mismatch,momentum_relative,energy_relative,energy_defect,momentum_residual_max,energy_residual_max";

pub const GRID_COLUMNS: &str = "t,nx,ny,half_width";

pub const AGREEMENT_COLUMNS: &str = "t,l1,pearson,particle_area,hydro_area";

/// Shortest round-trip decimal, switching to exponent form for very large
/// or small magnitudes.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(",")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| FloeError::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| FloeError::io(path, e))
}

fn write_all(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes()).map_err(|e| FloeError::io(path, e))?;
    w.flush().map_err(|e| FloeError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write_all(path, text)
}

pub fn particle_snapshot_text(e: &Ensemble) -> String {
    let mut s = format!(
        "{SCHEMA}\n# particles t={} half_width={}\n{PARTICLE_COLUMNS}\n",
        fmt_f64(e.t),
        fmt_f64(e.domain.half_width)
    );
    for (i, f) in e.floes.iter().enumerate() {
        s.push_str(&format!("{i},{}\n", join(&[f.r, f.h, f.x.x, f.x.y, f.v.x, f.v.y])));
    }
    s
}

pub fn write_particle_snapshot(path: &Path, e: &Ensemble) -> Result<()> {
    write_all(path, &particle_snapshot_text(e))
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> FloeError {
    FloeError::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn parse_floats(path: &Path, line_no: usize, line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|e| parse_err(path, line_no, format!("bad number {tok:?}: {e}")))
        })
        .collect()
}

fn check_schema(path: &Path, first: Option<&str>) -> Result<()> {
    match first {
        Some(l) if l.trim_end() == SCHEMA => Ok(()),
        _ => Err(parse_err(path, 1, format!("missing schema line {SCHEMA:?}"))),
    }
}

/// `key=value` pairs of a `# name k=v ...` comment line.
fn meta_value(path: &Path, line_no: usize, line: &str, key: &str) -> Result<f64> {
    line.split_whitespace()
        .find_map(|tok| tok.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| parse_err(path, line_no, format!("missing {key}=")))?
        .parse::<f64>()
        .map_err(|e| parse_err(path, line_no, format!("bad {key}: {e}")))
}

pub fn parse_particle_snapshot(text: &str, path: &Path) -> Result<Ensemble> {
    let mut lines = text.lines();
    check_schema(path, lines.next())?;
    let meta = lines
        .next()
        .ok_or_else(|| parse_err(path, 2, "missing metadata line"))?;
    let t = meta_value(path, 2, meta, "t")?;
    let l = meta_value(path, 2, meta, "half_width")?;
    if lines.next().map(str::trim_end) != Some(PARTICLE_COLUMNS) {
        return Err(parse_err(path, 3, format!("expected header {PARTICLE_COLUMNS:?}")));
    }
    let mut floes = Vec::new();
    for (k, line) in lines.enumerate() {
        let line_no = k + 4;
        if line.trim().is_empty() {
            continue;
        }
        let v = parse_floats(path, line_no, line)?;
        if v.len() != 7 {
            return Err(parse_err(path, line_no, format!("expected 7 columns, got {}", v.len())));
        }
        let f = Floe::new(v[1], v[2], Vec2::new(v[3], v[4]), Vec2::new(v[5], v[6]))
            .map_err(|e| parse_err(path, line_no, e.to_string()))?;
        floes.push(f);
    }
    let domain = Domain::new(l).map_err(|e| parse_err(path, 2, e.to_string()))?;
    Ensemble::new(floes, domain, t).map_err(|e| parse_err(path, 4, e.to_string()))
}

pub fn read_particle_snapshot(path: &Path) -> Result<Ensemble> {
    let text = std::fs::read_to_string(path).map_err(|e| FloeError::io(path, e))?;
    parse_particle_snapshot(&text, path)
}

/// Grid file: schema line, a comment naming the field, the header
/// `t,nx,ny,half_width` with its value row, then `ny` rows of `nx` values
/// (row `j` is the `j`-th cell row from the bottom, `y = -L` side first).
pub fn grid_text(name: &str, t: f64, g: &ConcentrationGrid) -> String {
    let mut s = format!(
        "{SCHEMA}\n# grid {name}\n{GRID_COLUMNS}\n{},{},{},{}\n",
        fmt_f64(t),
        g.nx,
        g.ny,
        fmt_f64(g.half_width)
    );
    for j in 0..g.ny {
        s.push_str(&join(&g.values[j * g.nx..(j + 1) * g.nx]));
        s.push('\n');
    }
    s
}

pub fn write_grid(path: &Path, name: &str, t: f64, g: &ConcentrationGrid) -> Result<()> {
    write_all(path, &grid_text(name, t, g))
}

/// Parses a grid file into its time and values.
pub fn parse_grid(text: &str, path: &Path) -> Result<(f64, ConcentrationGrid)> {
    let mut lines = text.lines();
    check_schema(path, lines.next())?;
    lines
        .next()
        .ok_or_else(|| parse_err(path, 2, "missing grid name line"))?;
    if lines.next().map(str::trim_end) != Some(GRID_COLUMNS) {
        return Err(parse_err(path, 3, format!("expected header {GRID_COLUMNS:?}")));
    }
    let meta = lines
        .next()
        .ok_or_else(|| parse_err(path, 4, "missing grid metadata row"))?;
    let m = parse_floats(path, 4, meta)?;
    if m.len() != 4 || m[1] < 1.0 || m[2] < 1.0 || m[1].fract() != 0.0 || m[2].fract() != 0.0 {
        return Err(parse_err(
            path,
            4,
            "metadata row must be t,nx,ny,half_width with nx, ny >= 1",
        ));
    }
    let (nx, ny) = (m[1] as usize, m[2] as usize);
    let mut values = Vec::with_capacity(nx * ny);
    let mut rows = 0;
    for (k, line) in lines.enumerate() {
        let line_no = k + 5;
        if line.trim().is_empty() {
            continue;
        }
        let row = parse_floats(path, line_no, line)?;
        if row.len() != nx {
            return Err(parse_err(
                path,
                line_no,
                format!("expected {nx} values, got {}", row.len()),
            ));
        }
        values.extend(row);
        rows += 1;
    }
    if rows != ny {
        return Err(parse_err(path, 5 + rows, format!("expected {ny} rows, got {rows}")));
    }
    Ok((
        m[0],
        ConcentrationGrid {
            nx,
            ny,
            half_width: m[3],
            values,
        },
    ))
}

pub fn read_grid(path: &Path) -> Result<(f64, ConcentrationGrid)> {
    let text = std::fs::read_to_string(path).map_err(|e| FloeError::io(path, e))?;
    parse_grid(&text, path)
}

pub fn diagnostics_row(step: u64, r: &DiagnosticsRecord) -> String {
    let m = &r.moments;
    format!(
        "{step},{}",
        join(&[
            r.t,
            m.m0,
            m.m1.x,
            m.m1.y,
            m.m2v,
            m.m2x,
            m.m2,
            r.momentum_residual,
            r.energy_residual,
            r.velocity_mismatch,
            r.momentum_relative,
            r.energy_relative,
            r.energy_defect,
            r.running.momentum_max,
            r.running.energy_max,
        ])
    )
}

/// Row-at-a-time CSV writer, flushed after each row so the file can be
/// tailed during a run.
pub struct CsvSink {
    path: PathBuf,
    w: BufWriter<File>,
}

impl CsvSink {
    pub fn create(path: &Path, columns: &str) -> Result<Self> {
        let mut w = create(path)?;
        writeln!(w, "{SCHEMA}\n{columns}").map_err(|e| FloeError::io(path, e))?;
        Ok(CsvSink {
            path: path.to_path_buf(),
            w,
        })
    }

    pub fn row(&mut self, line: &str) -> Result<()> {
        writeln!(self.w, "{line}").map_err(|e| FloeError::io(&self.path, e))?;
        self.w.flush().map_err(|e| FloeError::io(&self.path, e))
    }
}

/// Normalized L1 distance `sum|a - b| / sum|a|` between two grids.
pub fn normalized_l1(a: &ConcentrationGrid, b: &ConcentrationGrid) -> Result<f64> {
    same_shape(a, b)?;
    let num: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).sum();
    let den: f64 = a.values.iter().map(|x| x.abs()).sum();
    if den == 0.0 {
        return Err(FloeError::invalid("normalized L1 of an all-zero reference grid"));
    }
    Ok(num / den)
}

/// Pearson correlation of the cell values.
pub fn pearson(a: &ConcentrationGrid, b: &ConcentrationGrid) -> Result<f64> {
    same_shape(a, b)?;
    let n = a.values.len() as f64;
    let ma = a.values.iter().sum::<f64>() / n;
    let mb = b.values.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.values.iter().zip(&b.values) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(FloeError::invalid("correlation undefined for a constant grid"));
    }
    Ok(sab / (saa * sbb).sqrt())
}

fn same_shape(a: &ConcentrationGrid, b: &ConcentrationGrid) -> Result<()> {
    if (a.nx, a.ny) != (b.nx, b.ny) || a.values.len() != b.values.len() {
        return Err(FloeError::invalid(format!(
            "grid shapes differ: {}x{} vs {}x{}",
            a.nx, a.ny, b.nx, b.ny
        )));
    }
    Ok(())
}
