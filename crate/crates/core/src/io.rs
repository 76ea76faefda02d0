//! Dataset loaders (CSV, idx) and artifact writers (embedding CSV, fuzzy
//! graph CSV, SVG scatter plot).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{Dataset, Edge, Embedding, FuzzyGraph};
use crate::error::{Error, Result};

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Loads a rectangular numeric CSV table.
///
/// The first row is taken as a header when any of its cells is not a
/// number. `label_column` names a header column, or gives a 0-based column
/// index; its values become integer classes numbered in order of first
/// appearance, and the column is excluded from the coordinates. Row order is
/// preserved.
pub fn load_csv(path: impl AsRef<Path>, label_column: Option<&str>) -> Result<Dataset> {
    let path = path.as_ref();
    let bytes = read(path)?;
    parse_csv(&bytes, label_column).map_err(|e| match e {
        Error::Data(msg) => Error::data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub(crate) fn parse_csv(bytes: &[u8], label_column: Option<&str>) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut records = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::data(format!("row {}: {e}", row + 1)))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push(rec);
    }
    let Some(first) = records.first() else {
        return Err(Error::data("empty file"));
    };
    let has_header = first.iter().any(|c| c.parse::<f64>().is_err());
    let header: Option<Vec<String>> = has_header.then(|| first.iter().map(str::to_owned).collect());
    let width = first.len();
    let data_rows = &records[usize::from(has_header)..];
    if data_rows.is_empty() {
        return Err(Error::data("no data rows"));
    }

    let label_idx = match label_column {
        None => None,
        Some(name) => {
            let by_name = header.as_ref().and_then(|h| h.iter().position(|c| c == name));
            match by_name.or_else(|| name.parse::<usize>().ok().filter(|&i| i < width)) {
                Some(i) => Some(i),
                None => return Err(Error::data(format!("label column {name:?} not found"))),
            }
        }
    };

    let dim = width - usize::from(label_idx.is_some());
    if dim == 0 {
        return Err(Error::data("no feature columns"));
    }
    let mut points = Vec::with_capacity(data_rows.len() * dim);
    let mut labels = Vec::with_capacity(data_rows.len());
    let mut classes: HashMap<String, i64> = HashMap::new();
    let line_offset = 1 + usize::from(has_header);
    for (r, rec) in data_rows.iter().enumerate() {
        if rec.len() != width {
            return Err(Error::data(format!(
                "row {} has {} columns, expected {width}",
                r + line_offset,
                rec.len()
            )));
        }
        for (c, cell) in rec.iter().enumerate() {
            if Some(c) == label_idx {
                let next = classes.len() as i64;
                labels.push(*classes.entry(cell.to_owned()).or_insert(next));
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| {
                let col = header
                    .as_ref()
                    .map_or_else(|| c.to_string(), |h| format!("{c} ({})", h[c]));
                Error::data(format!(
                    "row {}, column {col}: {cell:?} is not numeric",
                    r + line_offset
                ))
            })?;
            points.push(v);
        }
    }
    let data = Dataset::new(points, dim)?;
    if label_idx.is_some() {
        data.with_labels(labels)
    } else {
        Ok(data)
    }
}

fn idx_header(bytes: &[u8], what: &str) -> Result<(u8, Vec<usize>, usize)> {
    if bytes.len() < 4 || bytes[0] != 0 || bytes[1] != 0 {
        return Err(Error::data(format!("{what}: not an idx file")));
    }
    let (ty, ndims) = (bytes[2], bytes[3] as usize);
    let offset = 4 + 4 * ndims;
    if ndims == 0 || bytes.len() < offset {
        return Err(Error::data(format!("{what}: truncated idx header")));
    }
    let dims = (0..ndims)
        .map(|d| u32::from_be_bytes(bytes[4 + 4 * d..8 + 4 * d].try_into().unwrap()) as usize)
        .collect();
    Ok((ty, dims, offset))
}

fn idx_values(bytes: &[u8], ty: u8, count: usize, what: &str) -> Result<Vec<f64>> {
    let size = match ty {
        0x08 | 0x09 => 1,
        0x0B => 2,
        0x0C | 0x0D => 4,
        0x0E => 8,
        _ => return Err(Error::data(format!("{what}: unsupported idx type 0x{ty:02x}"))),
    };
    if bytes.len() != count * size {
        return Err(Error::data(format!(
            "{what}: expected {} payload bytes, found {}",
            count * size,
            bytes.len()
        )));
    }
    let out = bytes
        .chunks_exact(size)
        .map(|c| match ty {
            0x08 => c[0] as f64,
            0x09 => c[0] as i8 as f64,
            0x0B => i16::from_be_bytes([c[0], c[1]]) as f64,
            0x0C => i32::from_be_bytes(c.try_into().unwrap()) as f64,
            0x0D => f32::from_be_bytes(c.try_into().unwrap()) as f64,
            _ => f64::from_be_bytes(c.try_into().unwrap()),
        })
        .collect();
    Ok(out)
}

/// Loads an idx (MNIST-format) tensor as one point per leading index, with
/// optional labels from a 1-D idx file. Unsigned byte data is scaled to `[0, 1]`.
pub fn load_idx(images: impl AsRef<Path>, labels: Option<&Path>) -> Result<Dataset> {
    let images = images.as_ref();
    let bytes = read(images)?;
    let what = images.display().to_string();
    let (ty, dims, offset) = idx_header(&bytes, &what)?;
    let n = dims[0];
    let dim: usize = dims[1..].iter().product::<usize>().max(1);
    let mut values = idx_values(&bytes[offset..], ty, n * dim, &what)?;
    if ty == 0x08 {
        values.iter_mut().for_each(|v| *v /= 255.0);
    }
    let data = Dataset::new(values, dim)?;
    let Some(labels) = labels else { return Ok(data) };
    let lbytes = read(labels)?;
    let lwhat = labels.display().to_string();
    let (lty, ldims, loffset) = idx_header(&lbytes, &lwhat)?;
    if ldims.len() != 1 || ldims[0] != n {
        return Err(Error::data(format!(
            "{lwhat}: expected {n} labels, header says {ldims:?}"
        )));
    }
    let lv = idx_values(&lbytes[loffset..], lty, n, &lwhat)?;
    data.with_labels(lv.into_iter().map(|v| v as i64).collect())
}

/// Serialises a tensor in idx format (unsigned bytes).
pub fn write_idx_u8(path: impl AsRef<Path>, dims: &[u32], values: &[u8]) -> Result<()> {
    let mut out = vec![0, 0, 0x08, dims.len() as u8];
    for d in dims {
        out.extend_from_slice(&d.to_be_bytes());
    }
    out.extend_from_slice(values);
    write(path.as_ref(), out)
}

/// Uniform random subsample without replacement, keeping original order.
pub fn subsample(data: &Dataset, max_points: usize, seed: u64) -> Result<Dataset> {
    if data.n_points() <= max_points {
        return Ok(data.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = sample(&mut rng, data.n_points(), max_points).into_vec();
    rows.sort_unstable();
    data.select(&rows)
}

/// `id,y_1,…,y_n` with shortest round-trip decimal values.
pub fn embedding_csv(emb: &Embedding, ids: &[String]) -> String {
    let mut s = String::from("id");
    for c in 1..=emb.dim() {
        let _ = write!(s, ",y_{c}");
    }
    s.push('\n');
    for (i, id) in ids.iter().enumerate().take(emb.n_points()) {
        s.push_str(id);
        for v in emb.point(i) {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

pub fn write_embedding_csv(path: impl AsRef<Path>, emb: &Embedding, ids: &[String]) -> Result<()> {
    write(path.as_ref(), embedding_csv(emb, ids))
}

/// Parses an embedding CSV back into ids and row-major coordinates.
pub fn read_embedding_csv(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<f64>, usize)> {
    let path = path.as_ref();
    let text = String::from_utf8(read(path)?).map_err(|e| Error::data(e.to_string()))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::data("empty embedding file"))?;
    let dim = header.split(',').count() - 1;
    let (mut ids, mut coords) = (Vec::new(), Vec::new());
    for (r, line) in lines.enumerate() {
        let mut cells = line.split(',');
        ids.push(cells.next().unwrap_or_default().to_owned());
        let before = coords.len();
        for cell in cells {
            coords.push(
                cell.parse::<f64>()
                    .map_err(|_| Error::data(format!("row {}: bad value {cell:?}", r + 2)))?,
            );
        }
        if coords.len() - before != dim {
            return Err(Error::data(format!("row {} is ragged", r + 2)));
        }
    }
    Ok((ids, coords, dim))
}

/// `i,j,weight` rows in edge order.
pub fn fuzzy_graph_csv(graph: &FuzzyGraph) -> String {
    let mut s = String::from("i,j,weight\n");
    for e in graph.edges() {
        let _ = writeln!(s, "{},{},{}", e.i, e.j, e.weight);
    }
    s
}

pub fn write_fuzzy_graph_csv(path: impl AsRef<Path>, graph: &FuzzyGraph) -> Result<()> {
    write(path.as_ref(), fuzzy_graph_csv(graph))
}

pub fn read_fuzzy_graph_csv(path: impl AsRef<Path>, n_vertices: usize) -> Result<FuzzyGraph> {
    let path = path.as_ref();
    let text = String::from_utf8(read(path)?).map_err(|e| Error::data(e.to_string()))?;
    let mut edges = Vec::new();
    for (r, line) in text.lines().enumerate().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let bad = || Error::data(format!("row {}: malformed edge {line:?}", r + 1));
        if cells.len() != 3 {
            return Err(bad());
        }
        edges.push(Edge {
            i: cells[0].parse().map_err(|_| bad())?,
            j: cells[1].parse().map_err(|_| bad())?,
            weight: cells[2].parse().map_err(|_| bad())?,
        });
    }
    FuzzyGraph::from_edges(n_vertices, edges)
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/// Scatter plot of the first two embedding components, one `<circle>` per
/// point, coloured by label when given.
pub fn embedding_svg(emb: &Embedding, labels: Option<&[i64]>) -> String {
    const SIZE: f64 = 600.0;
    const MARGIN: f64 = 20.0;
    let coord = |i: usize, c: usize| if c < emb.dim() { emb.point(i)[c] } else { 0.0 };
    let range = |c: usize| {
        (0..emb.n_points()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            (lo.min(coord(i, c)), hi.max(coord(i, c)))
        })
    };
    let (x_range, y_range) = (range(0), range(1));
    let scale = |v: f64, (lo, hi): (f64, f64)| {
        if hi > lo {
            MARGIN + (v - lo) / (hi - lo) * (SIZE - 2.0 * MARGIN)
        } else {
            SIZE / 2.0
        }
    };
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for i in 0..emb.n_points() {
        let colour = match labels.map(|l| l[i]) {
            Some(l) if l >= 0 => PALETTE[l as usize % PALETTE.len()],
            _ => "#999999",
        };
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{colour}" fill-opacity="0.8"/>"#,
            scale(coord(i, 0), x_range),
            SIZE - scale(coord(i, 1), y_range)
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_embedding_svg(path: impl AsRef<Path>, emb: &Embedding, labels: Option<&[i64]>) -> Result<()> {
    write(path.as_ref(), embedding_svg(emb, labels))
}
