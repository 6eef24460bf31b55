//! Versioned run records and their JSON, CSV and SVG renderings.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use velavg::harness::VerificationReport;

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::plot::Plot;

pub const SCHEMA: &str = "velavg-report";
pub const SCHEMA_VERSION: u32 = 1;

/// Direction of a pass condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    AtMost,
    AtLeast,
    /// The value is a 0/1 flag that must be 1.
    Holds,
}

/// One pass/fail decision of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), value, bound: Bound::AtMost, threshold, passed: value <= threshold }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check { name: name.into(), value, bound: Bound::AtLeast, threshold, passed: value >= threshold }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            bound: Bound::Holds,
            threshold: 1.0,
            passed: ok,
        }
    }
}

/// Everything a run produced.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: Command,
    pub passed: bool,
    pub exit_code: i32,
    pub checks: Vec<Check>,
    pub reports: Vec<VerificationReport>,
    pub config: RunConfig,
    #[serde(skip)]
    pub plots: Vec<Plot>,
}

impl RunReport {
    pub fn new(command: Command, config: RunConfig) -> Self {
        RunReport {
            schema: SCHEMA,
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            passed: true,
            exit_code: 0,
            checks: Vec::new(),
            reports: Vec::new(),
            config,
            plots: Vec::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Fixes `passed` and `exit_code` from the checks; a run without checks fails.
    pub fn finish(&mut self) {
        self.passed = !self.checks.is_empty() && self.checks.iter().all(|c| c.passed);
        self.exit_code = if self.passed { 0 } else { 1 };
    }
}

/// Formats every float with 17 significant digits; layout as `PrettyFormatter`.
struct Fixed17(PrettyFormatter<'static>);

impl Formatter for Fixed17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write!(w, "{:.16e}", v as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes with 17 significant digits per float; non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Fixed17(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| CliError::io(format!("json: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Long-format table `report,row,quantity,value,text` with CRLF line ends.
///
/// Report-level quantities have an empty `row`; labels fill `text`.
pub fn to_csv(run: &RunReport) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    let io_err = |e: csv::Error| CliError::io(format!("csv: {e}"));
    w.write_record(["report", "row", "quantity", "value", "text"]).map_err(io_err)?;
    for c in &run.checks {
        let passed = if c.passed { "pass" } else { "fail" };
        w.write_record(["checks", &c.name, "value", &num(c.value), passed]).map_err(io_err)?;
        w.write_record(["checks", &c.name, "threshold", &num(c.threshold), passed]).map_err(io_err)?;
    }
    for r in &run.reports {
        for (k, v) in &r.quantities {
            w.write_record([r.check.as_str(), "", k, &num(*v), ""]).map_err(io_err)?;
        }
        for row in &r.rows {
            for (k, v) in &row.values {
                w.write_record([r.check.as_str(), &row.key, k, &num(*v), ""]).map_err(io_err)?;
            }
            for (k, t) in &row.labels {
                w.write_record([r.check.as_str(), &row.key, k, "", t]).map_err(io_err)?;
            }
        }
    }
    w.into_inner().map_err(|e| CliError::io(format!("csv: {e}")))
}

/// Output formats of [`emit_report`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Formats {
    pub json: bool,
    pub csv: bool,
    pub svg: bool,
}

/// Writes `path` through a temporary file in the same directory and a rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().ok_or_else(|| CliError::io(format!("{} has no parent", path.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Renders the requested formats into `dir` as `<command>.json`, `<command>.csv`
/// and `<command>-<plot>.svg`, returning the written paths.
///
/// Everything is rendered before the first write, and each file appears only
/// once complete.
pub fn emit_report(run: &RunReport, formats: Formats, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if run.reports.is_empty() {
        return Err(CliError::io("no reports to emit"));
    }
    let stem = run.command.name();
    let mut files: Vec<(PathBuf, Vec<u8>)> = Vec::new();
    if formats.json {
        files.push((dir.join(format!("{stem}.json")), to_json(run)?));
    }
    if formats.csv {
        files.push((dir.join(format!("{stem}.csv")), to_csv(run)?));
    }
    if formats.svg {
        for p in &run.plots {
            files.push((dir.join(format!("{stem}-{}.svg", p.name)), p.render()?.into_bytes()));
        }
    }
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(files.len());
    for (path, bytes) in files {
        write_atomic(&path, &bytes)?;
        written.push(path);
    }
    Ok(written)
}
