//! Check records, reports and their JSON encoding.

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

/// How a record's measured value is compared with its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    /// Pass when the value is at most the tolerance.
    AtMost,
    /// Pass when the value exceeds the tolerance (negative controls).
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub check: String,
    /// The relation the check exercises.
    pub relation: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub expect: Expect,
    pub pass: bool,
    pub samples: usize,
}

impl Record {
    pub fn at_most(check: &str, relation: &str, max_residual: f64, tolerance: f64, samples: usize) -> Self {
        Record {
            check: check.into(),
            relation: relation.into(),
            max_residual,
            tolerance,
            expect: Expect::AtMost,
            // NaN fails
            pass: max_residual <= tolerance,
            samples,
        }
    }

    pub fn above(check: &str, relation: &str, value: f64, threshold: f64, samples: usize) -> Self {
        Record {
            check: check.into(),
            relation: relation.into(),
            max_residual: value,
            tolerance: threshold,
            expect: Expect::Above,
            pass: value > threshold,
            samples,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub verdict: Verdict,
    pub records: Vec<Record>,
    /// Named numeric results (fitted coefficients, histories, ...).
    pub data: BTreeMap<String, Vec<f64>>,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Report { command: command.into(), seed, verdict: Verdict::Pass, records: Vec::new(), data: BTreeMap::new() }
    }

    pub fn push(&mut self, record: Record) {
        if !record.pass {
            self.verdict = Verdict::Fail;
        }
        self.records.push(record);
    }

    pub fn put(&mut self, key: &str, values: Vec<f64>) {
        self.data.insert(key.into(), values);
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn record(&self, check: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.check == check)
    }

    /// Pretty JSON with every float at 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision::default());
        self.serialize(&mut ser).expect("report serializes");
        out.push(b'\n');
        String::from_utf8(out).expect("JSON is UTF-8")
    }
}

/// Pretty-printing formatter writing floats as `d.dddddddddddddddde±x`.
#[derive(Default)]
pub struct FullPrecision<'a> {
    inner: serde_json::ser::PrettyFormatter<'a>,
}

macro_rules! forward {
    ($($name:ident),*) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
                self.inner.$name(w)
            }
        )*
    };
}

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    forward!(begin_array, end_array, end_array_value, begin_object, end_object, begin_object_value, end_object_value);
}
