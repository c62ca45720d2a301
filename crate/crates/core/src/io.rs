//! Snapshot CSVs and run records as JSON lines.
//!
//! Every CSV starts with a comment line `# <kind> v<version> key=value …` carrying the metadata
//! needed to rebuild the state, followed by a header row and one row per cell or sample.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BlowupSummary, PlanarState, RadialState, RunRecord, ScenarioConfig, SchemeMeta, StepDiagnostics, Termination};
use crate::scalar::{lit, to_f64, Real};
use crate::separated::SeparatedTrajectory;

pub const FORMAT_VERSION: u32 = 1;

pub const RADIAL_COLUMNS: [&str; 4] = ["r", "h", "U", "V"];
pub const PLANAR_COLUMNS: [&str; 5] = ["x", "y", "h", "hu", "hv"];
pub const TRAJECTORY_COLUMNS: [&str; 6] = ["t", "g", "xi", "eta", "theta", "kappa"];

fn write_preamble<W: Write>(out: &mut W, kind: &str, meta: &[(&str, String)]) -> Result<()> {
    write!(out, "# {kind} v{FORMAT_VERSION}")?;
    for (k, v) in meta {
        write!(out, " {k}={v}")?;
    }
    writeln!(out)?;
    Ok(())
}

fn write_rows<W: Write>(out: W, columns: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns)?;
    for row in rows {
        w.write_record(row.iter().map(|x| x.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Parsed CSV: preamble metadata and numeric rows.
struct Table {
    meta: BTreeMap<String, String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn meta_f64(&self, key: &str) -> Result<f64> {
        self.meta
            .get(key)
            .ok_or_else(|| Error::Malformed(format!("missing '{key}' in header comment")))?
            .parse()
            .map_err(|_| Error::Malformed(format!("'{key}' in header comment is not a number")))
    }

    fn meta_usize(&self, key: &str) -> Result<usize> {
        self.meta
            .get(key)
            .ok_or_else(|| Error::Malformed(format!("missing '{key}' in header comment")))?
            .parse()
            .map_err(|_| Error::Malformed(format!("'{key}' in header comment is not a count")))
    }
}

fn read_table<R: BufRead>(mut input: R, kind: &str, columns: &[&str]) -> Result<Table> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    let mut words = first.trim_end().split_whitespace();
    if words.next() != Some("#") || words.next() != Some(kind) {
        return Err(Error::Malformed(format!("expected a '# {kind}' header comment")));
    }
    let version = words.next().unwrap_or("");
    if version != format!("v{FORMAT_VERSION}") {
        return Err(Error::Malformed(format!("unsupported {kind} version '{version}'")));
    }
    let meta = words
        .map(|w| {
            w.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::Malformed(format!("bad header field '{w}'")))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(columns.iter().copied()) {
        return Err(Error::Malformed(format!("expected columns {columns:?}, got {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| f.trim().parse::<f64>().map_err(|_| Error::Malformed(format!("non-numeric field '{f}'"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table { meta, rows })
}

pub fn write_radial_csv<T: Real, W: Write>(s: &RadialState<T>, mut out: W) -> Result<()> {
    write_preamble(&mut out, "rsw-radial-snapshot", &[("t", to_f64(s.t).to_string()), ("h_bar", to_f64(s.h_bar).to_string())])?;
    write_rows(
        out,
        &RADIAL_COLUMNS,
        (0..s.len()).map(|i| vec![to_f64(s.r_centers[i]), to_f64(s.h[i]), to_f64(s.u[i]), to_f64(s.v[i])]),
    )
}

pub fn read_radial_csv<T: Real, R: BufRead>(input: R) -> Result<RadialState<T>> {
    let table = read_table(input, "rsw-radial-snapshot", &RADIAL_COLUMNS)?;
    let col = |c: usize| table.rows.iter().map(|r| lit::<T>(r[c])).collect::<Vec<T>>();
    let s = RadialState {
        r_centers: col(0),
        h: col(1),
        u: col(2),
        v: col(3),
        h_bar: lit(table.meta_f64("h_bar")?),
        t: lit(table.meta_f64("t")?),
    };
    s.audit()?;
    Ok(s)
}

pub fn write_planar_csv<T: Real, W: Write>(s: &PlanarState<T>, mut out: W) -> Result<()> {
    let meta = [
        ("t", to_f64(s.t).to_string()),
        ("h_bar", to_f64(s.h_bar).to_string()),
        ("nx", s.nx.to_string()),
        ("ny", s.ny.to_string()),
        ("dx", to_f64(s.dx).to_string()),
        ("dy", to_f64(s.dy).to_string()),
        ("x0", to_f64(s.x0).to_string()),
        ("y0", to_f64(s.y0).to_string()),
    ];
    write_preamble(&mut out, "rsw-planar-snapshot", &meta)?;
    let rows = (0..s.ny).flat_map(|j| {
        (0..s.nx).map(move |i| {
            let k = s.index(i, j);
            vec![to_f64(s.x(i)), to_f64(s.y(j)), to_f64(s.h[k]), to_f64(s.hu[k]), to_f64(s.hv[k])]
        })
    });
    write_rows(out, &PLANAR_COLUMNS, rows)
}

pub fn read_planar_csv<T: Real, R: BufRead>(input: R) -> Result<PlanarState<T>> {
    let table = read_table(input, "rsw-planar-snapshot", &PLANAR_COLUMNS)?;
    let (nx, ny) = (table.meta_usize("nx")?, table.meta_usize("ny")?);
    if table.rows.len() != nx * ny {
        return Err(Error::Malformed(format!("expected {} rows, found {}", nx * ny, table.rows.len())));
    }
    let col = |c: usize| table.rows.iter().map(|r| lit::<T>(r[c])).collect::<Vec<T>>();
    let s = PlanarState {
        nx,
        ny,
        dx: lit(table.meta_f64("dx")?),
        dy: lit(table.meta_f64("dy")?),
        x0: lit(table.meta_f64("x0")?),
        y0: lit(table.meta_f64("y0")?),
        h: col(2),
        hu: col(3),
        hv: col(4),
        h_bar: lit(table.meta_f64("h_bar")?),
        t: lit(table.meta_f64("t")?),
    };
    s.audit()?;
    Ok(s)
}

/// Writes the stored samples of a separated trajectory; `κ` is `NaN` on the tangent branch.
pub fn write_trajectory_csv<T: Real, W: Write>(traj: &SeparatedTrajectory<T>, mut out: W) -> Result<()> {
    write_preamble(&mut out, "rsw-separated-trajectory", &[("regime", traj.regime.name().to_string())])?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_COLUMNS)?;
    for i in 0..traj.len() {
        let s = traj.state(i);
        let th = traj.theta_at(i);
        let kappa = if th != T::zero() {
            to_f64(crate::separated::kappa_from_theta(s.xi, th)).to_string()
        } else {
            f64::NAN.to_string()
        };
        w.write_record([
            to_f64(s.t).to_string(),
            to_f64(s.g).to_string(),
            to_f64(s.xi).to_string(),
            to_f64(s.eta).to_string(),
            to_f64(th).to_string(),
            kappa,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Samples read back from a trajectory CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryTable {
    pub regime: String,
    /// Rows in [`TRAJECTORY_COLUMNS`] order.
    pub rows: Vec<Vec<f64>>,
}

pub fn read_trajectory_csv<R: BufRead>(input: R) -> Result<TrajectoryTable> {
    let table = read_table(input, "rsw-separated-trajectory", &TRAJECTORY_COLUMNS)?;
    let regime = table
        .meta
        .get("regime")
        .cloned()
        .ok_or_else(|| Error::Malformed("missing 'regime' in header comment".into()))?;
    Ok(TrajectoryTable { regime, rows: table.rows })
}

/// Writes a plain numeric series (sweeps, phase-portrait samples) under a named header comment.
pub fn write_series_csv<W: Write>(mut out: W, kind: &str, columns: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    if rows.iter().any(|r| r.len() != columns.len()) {
        return Err(Error::InvalidArgument(format!("every row needs {} values", columns.len())));
    }
    write_preamble(&mut out, kind, &[])?;
    write_rows(out, columns, rows.iter().cloned())
}

pub fn read_series_csv<R: BufRead>(input: R, kind: &str, columns: &[&str]) -> Result<Vec<Vec<f64>>> {
    Ok(read_table(input, kind, columns)?.rows)
}

/// One line of a JSON-lines run record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RecordLine {
    Header { version: u32, config: ScenarioConfig, scheme: SchemeMeta },
    Step(StepDiagnostics),
    Termination {
        termination: Termination,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        blowup: Option<BlowupSummary>,
    },
}

/// Writes `record` as a header line, one line per output time and a closing termination line.
pub fn write_record_jsonl<W: Write>(record: &RunRecord, mut out: W) -> Result<()> {
    let header = RecordLine::Header { version: FORMAT_VERSION, config: record.config.clone(), scheme: record.scheme.clone() };
    serde_json::to_writer(&mut out, &header)?;
    writeln!(out)?;
    for d in &record.diagnostics {
        serde_json::to_writer(&mut out, &RecordLine::Step(d.clone()))?;
        writeln!(out)?;
    }
    let tail = RecordLine::Termination { termination: record.termination.clone(), blowup: record.blowup.clone() };
    serde_json::to_writer(&mut out, &tail)?;
    writeln!(out)?;
    Ok(())
}

pub fn read_record_jsonl<R: BufRead>(input: R) -> Result<RunRecord> {
    let mut header = None;
    let mut diagnostics = Vec::new();
    let mut tail = None;
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<RecordLine>(&line)? {
            RecordLine::Header { version, config, scheme } => {
                if version != FORMAT_VERSION {
                    return Err(Error::Malformed(format!("unsupported record version {version}")));
                }
                if n != 0 {
                    return Err(Error::Malformed("header must be the first line".into()));
                }
                header = Some((config, scheme));
            }
            RecordLine::Step(d) => {
                if tail.is_some() {
                    return Err(Error::Malformed(format!("step after termination on line {}", n + 1)));
                }
                diagnostics.push(d);
            }
            RecordLine::Termination { termination, blowup } => tail = Some((termination, blowup)),
        }
    }
    let (config, scheme) = header.ok_or_else(|| Error::Malformed("record has no header line".into()))?;
    let (termination, blowup) = tail.ok_or_else(|| Error::Malformed("record has no termination line".into()))?;
    Ok(RunRecord { config, scheme, diagnostics, termination, blowup })
}
