//! CSV formats.
//!
//! Network files are long form with header `t,i,j,y`, 1-based node indices
//! `i > j`, and `y` one of `0`, `1`, `NA`. Slots without a row are missing. An
//! optional first line `# nodes: a,b,...` carries node labels. Returns files have
//! header `t,label_1,...,label_V`; `NA` or an empty field is a missing return.
//!
//! Real numbers are written with Rust's shortest round-trip formatting, so a file
//! written here reads back to the same bits.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::{self, File};
use std::io::Write;
use std::path::Path;

use dlsm_core::net::{pair_count, pair_nodes};
use dlsm_core::{DynamicNetwork, ReturnsTable, TimeGrid};

use crate::error::{CliError, CliResult};

const LABEL_PREFIX: &str = "# nodes:";

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes())
}

fn record_err(path: &Path, e: csv::Error) -> CliError {
    CliError::data(path, format!("malformed CSV: {e}"))
}

fn check_header(path: &Path, rdr: &mut csv::Reader<&[u8]>, expected: &[&str]) -> CliResult<()> {
    let header = rdr.headers().map_err(|e| record_err(path, e))?;
    let got: Vec<&str> = header.iter().collect();
    if got != expected {
        return Err(CliError::data(
            path,
            format!("expected header `{}`, found `{}`", expected.join(","), got.join(",")),
        ));
    }
    Ok(())
}

fn parse_real(path: &Path, line: u64, field: &str, what: &str) -> CliResult<f64> {
    match field.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(CliError::data(path, format!("line {line}: invalid {what} `{field}`"))),
    }
}

fn parse_node(path: &Path, line: u64, field: &str) -> CliResult<usize> {
    match field.parse::<usize>() {
        Ok(i) if i >= 1 => Ok(i),
        _ => Err(CliError::data(path, format!("line {line}: invalid node index `{field}`"))),
    }
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

/// One `t,i,j,<value>` row with 0-based nodes.
struct SlotRow {
    t: f64,
    i: usize,
    j: usize,
    field: String,
    line: u64,
}

fn read_slot_rows(path: &Path, text: &str, value_col: &str) -> CliResult<Vec<SlotRow>> {
    let mut rdr = csv_reader(text);
    check_header(path, &mut rdr, &["t", "i", "j", value_col])?;
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| record_err(path, e))?;
        let line = line_of(&rec);
        let t = parse_real(path, line, &rec[0], "time")?;
        let i = parse_node(path, line, &rec[1])?;
        let j = parse_node(path, line, &rec[2])?;
        if i <= j {
            return Err(CliError::data(path, format!("line {line}: entry ({i},{j}) is not in the lower triangle")));
        }
        if !seen.insert((t.to_bits(), i, j)) {
            return Err(CliError::data(path, format!("line {line}: duplicate entry (t={t}, i={i}, j={j})")));
        }
        rows.push(SlotRow { t, i: i - 1, j: j - 1, field: rec[3].to_string(), line });
    }
    Ok(rows)
}

fn split_labels(text: &str) -> (Option<Vec<String>>, &str) {
    match text.strip_prefix(LABEL_PREFIX) {
        Some(rest) => {
            let (first, body) = rest.split_once('\n').unwrap_or((rest, ""));
            let labels = first.trim().split(',').map(|s| s.trim().to_string()).collect();
            (Some(labels), body)
        }
        None => (None, text),
    }
}

pub fn read_network(path: &Path) -> CliResult<DynamicNetwork> {
    let text = read_text(path)?;
    let (labels, body) = split_labels(&text);
    let rows = read_slot_rows(path, body, "y")?;
    if rows.is_empty() {
        return Err(CliError::data(path, "network file has no entries"));
    }
    let max_node = rows.iter().map(|r| r.i + 1).max().unwrap_or(0);
    let nodes = match &labels {
        Some(l) if l.len() < max_node => {
            return Err(CliError::data(path, format!("node index {max_node} exceeds the {} labels", l.len())))
        }
        Some(l) => l.len(),
        None => max_node,
    };
    let times: BTreeSet<u64> = rows.iter().map(|r| r.t.to_bits()).collect();
    let mut times: Vec<f64> = times.into_iter().map(f64::from_bits).collect();
    times.sort_by(f64::total_cmp);
    let position: HashMap<u64, usize> = times.iter().enumerate().map(|(k, t)| (t.to_bits(), k)).collect();
    let grid = TimeGrid::new(times).map_err(|e| CliError::data(path, e.to_string()))?;

    let mut net = DynamicNetwork::empty(nodes, grid).map_err(|e| CliError::data(path, e.to_string()))?;
    for r in &rows {
        let y = match r.field.as_str() {
            "0" => Some(false),
            "1" => Some(true),
            "NA" => None,
            other => return Err(CliError::data(path, format!("line {}: value `{other}` is not 0, 1 or NA", r.line))),
        };
        net.set(r.i, r.j, position[&r.t.to_bits()], y).map_err(|e| CliError::data(path, e.to_string()))?;
    }
    if let Some(l) = labels {
        net = net.with_labels(l).map_err(|e| CliError::data(path, e.to_string()))?;
    }
    Ok(net)
}

fn write_rows<I, R>(path: &Path, prefix: Option<&str>, header: &[&str], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut file = File::create(path).map_err(|e| CliError::io(path, e))?;
    if let Some(p) = prefix {
        writeln!(file, "{p}").map_err(|e| CliError::io(path, e))?;
    }
    let mut w = csv::Writer::from_writer(file);
    let wrap = |e: csv::Error| CliError::data(path, format!("cannot write CSV: {e}"));
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(row).map_err(wrap)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Writes every slot, missing ones as `NA`.
pub fn write_network(net: &DynamicNetwork, path: &Path) -> CliResult<()> {
    let prefix = match net.labels() {
        Some(labels) => {
            if labels.iter().any(|l| l.contains(',') || l.contains('\n')) {
                return Err(CliError::data(path, "node labels must not contain commas or newlines"));
            }
            Some(format!("{LABEL_PREFIX} {}", labels.join(",")))
        }
        None => None,
    };
    let p = net.pairs();
    let rows = net.slots().iter().enumerate().map(|(s, y)| {
        let (i, j) = pair_nodes(s % p);
        let y = match y {
            Some(true) => "1",
            Some(false) => "0",
            None => "NA",
        };
        vec![net.grid().times()[s / p].to_string(), (i + 1).to_string(), (j + 1).to_string(), y.to_string()]
    });
    write_rows(path, prefix.as_deref(), &["t", "i", "j", "y"], rows)
}

pub fn read_returns(path: &Path) -> CliResult<ReturnsTable> {
    let text = read_text(path)?;
    let mut rdr = csv_reader(&text);
    let header = rdr.headers().map_err(|e| record_err(path, e))?.clone();
    if header.get(0) != Some("t") {
        return Err(CliError::data(path, "returns header must start with `t`"));
    }
    let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut times = Vec::new();
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| record_err(path, e))?;
        let line = line_of(&rec);
        times.push(parse_real(path, line, &rec[0], "time")?);
        let row = rec
            .iter()
            .skip(1)
            .map(|f| match f {
                "" | "NA" => Ok(None),
                f => parse_real(path, line, f, "return").map(Some),
            })
            .collect::<CliResult<Vec<_>>>()?;
        values.push(row);
    }
    let grid = TimeGrid::new(times).map_err(|e| CliError::data(path, e.to_string()))?;
    ReturnsTable::new(grid, labels, values).map_err(|e| CliError::data(path, e.to_string()))
}

/// `t,i,j,<column>` rows for every slot of a `nodes`-node series on `grid`.
pub fn write_slot_values(path: &Path, column: &str, nodes: usize, grid: &TimeGrid, values: &[f64]) -> CliResult<()> {
    let p = pair_count(nodes);
    let rows = values.iter().enumerate().map(|(s, v)| {
        let (i, j) = pair_nodes(s % p);
        vec![grid.times()[s / p].to_string(), (i + 1).to_string(), (j + 1).to_string(), v.to_string()]
    });
    write_rows(path, None, &["t", "i", "j", column], rows)
}

/// `t,i,j,lower,upper` rows.
pub fn write_slot_intervals(path: &Path, nodes: usize, grid: &TimeGrid, intervals: &[(f64, f64)]) -> CliResult<()> {
    let p = pair_count(nodes);
    let rows = intervals.iter().enumerate().map(|(s, (lo, hi))| {
        let (i, j) = pair_nodes(s % p);
        vec![grid.times()[s / p].to_string(), (i + 1).to_string(), (j + 1).to_string(), lo.to_string(), hi.to_string()]
    });
    write_rows(path, None, &["t", "i", "j", "lower", "upper"], rows)
}

/// `(t bits, i, j)` with 0-based nodes.
pub type SlotKey = (u64, usize, usize);
pub type SlotTable = HashMap<SlotKey, f64>;

/// Reads a `t,i,j,<column>` table of reals.
pub fn read_slot_values(path: &Path, column: &str) -> CliResult<SlotTable> {
    let text = read_text(path)?;
    read_slot_rows(path, &text, column)?
        .into_iter()
        .map(|r| Ok(((r.t.to_bits(), r.i, r.j), parse_real(path, r.line, &r.field, column)?)))
        .collect()
}

/// Reads a `t,i,j,lower,upper` table.
pub fn read_slot_intervals(path: &Path) -> CliResult<HashMap<SlotKey, (f64, f64)>> {
    let text = read_text(path)?;
    let mut rdr = csv_reader(&text);
    check_header(path, &mut rdr, &["t", "i", "j", "lower", "upper"])?;
    let mut out = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| record_err(path, e))?;
        let line = line_of(&rec);
        let t = parse_real(path, line, &rec[0], "time")?;
        let i = parse_node(path, line, &rec[1])?;
        let j = parse_node(path, line, &rec[2])?;
        let lo = parse_real(path, line, &rec[3], "lower bound")?;
        let hi = parse_real(path, line, &rec[4], "upper bound")?;
        out.insert((t.to_bits(), i - 1, j - 1), (lo, hi));
    }
    Ok(out)
}

/// `draw,t,value` rows, one per draw and time.
pub fn write_trace(path: &Path, grid: &TimeGrid, draws: impl Iterator<Item = (usize, Vec<f64>)>) -> CliResult<()> {
    let rows = draws.flat_map(|(d, values)| {
        grid.times()
            .iter()
            .zip(values)
            .map(move |(t, v)| vec![d.to_string(), t.to_string(), v.to_string()])
            .collect::<Vec<_>>()
    });
    write_rows(path, None, &["draw", "t", "value"], rows)
}

/// Generic table with a header and already formatted cells.
pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<()> {
    write_rows(path, None, header, rows)
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}
