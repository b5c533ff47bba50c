//! Report records and their JSON, CSV and text renderings.

use std::fmt;
use std::io::{self, Write};

use clap::ValueEnum;
use gcl_core::Valuation;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Error,
}

impl Status {
    pub fn from_pass(pass: bool) -> Status {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
            Status::Error => "error",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One report line: fields in insertion order plus an outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    fields: Map<String, Value>,
    status: Status,
}

impl Record {
    pub fn new(command: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), command.into());
        Record { fields, status: Status::Pass }
    }

    pub fn field(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.insert(key.into(), value.into());
        self
    }

    /// Appends `status` and `pass` as the last two fields.
    pub fn finish(mut self, status: Status) -> Self {
        self.status = status;
        self.fields.insert("status".into(), status.as_str().into());
        self.fields.insert("pass".into(), (status == Status::Pass).into());
        self
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }
}

/// Decimal string, so values never pass through floating point.
pub fn big(x: impl ToString) -> Value {
    Value::String(x.to_string())
}

/// Integer exponent, or the string `"inf"` for a zero difference.
pub fn valuation(v: Valuation) -> Value {
    match v {
        Valuation::Finite(e) => e.into(),
        Valuation::Infinite => "inf".into(),
    }
}

pub fn opt(v: Option<Value>) -> Value {
    v.unwrap_or(Value::Null)
}

/// Flat cell rendering shared by CSV and text.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(xs) => xs.iter().map(cell).collect::<Vec<_>>().join(";"),
        Value::Object(m) => m.iter().map(|(k, v)| format!("{k}={}", cell(v))).collect::<Vec<_>>().join(";"),
        other => other.to_string(),
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

impl Summary {
    pub fn of(records: &[Record]) -> Summary {
        let mut s = Summary { total: records.len(), ..Summary::default() };
        for r in records {
            match r.status {
                Status::Pass => s.pass += 1,
                Status::Skipped => s.skipped += 1,
                Status::Fail | Status::Error => s.fail += 1,
            }
        }
        s
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "summary: total={} pass={} fail={} skipped={}", self.total, self.pass, self.fail, self.skipped)
    }
}

/// Writes all records in order. CSV headers come from the first record.
pub fn write_records(out: &mut dyn Write, records: &[Record], format: Format) -> io::Result<()> {
    match format {
        Format::Json => {
            for r in records {
                serde_json::to_writer(&mut *out, &r.fields)?;
                out.write_all(b"\n")?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if let Some(first) = records.first() {
                w.write_record(first.fields.keys())?;
            }
            for r in records {
                w.write_record(r.fields.values().map(cell))?;
            }
            w.flush()?;
        }
        Format::Text => {
            for r in records {
                let line: Vec<String> = r.fields.iter().map(|(k, v)| format!("{k}={}", cell(v))).collect();
                writeln!(out, "{}", line.join(" "))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<Record> {
        vec![
            Record::new("seq").field("n", 0).field("value", big(1)).finish(Status::Pass),
            Record::new("seq").field("n", 1).field("value", big("-5/4")).finish(Status::Fail),
        ]
    }

    #[test]
    fn json_keeps_field_order() {
        let mut buf = Vec::new();
        write_records(&mut buf, &sample(), Format::Json).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            r#"{"command":"seq","n":0,"value":"1","status":"pass","pass":true}"#
        );
    }

    #[test]
    fn csv_and_text() {
        let mut buf = Vec::new();
        write_records(&mut buf, &sample(), Format::Csv).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "command,n,value,status,pass\nseq,0,1,pass,true\nseq,1,-5/4,fail,false\n");
        let mut buf = Vec::new();
        write_records(&mut buf, &sample()[..1], Format::Text).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "command=seq n=0 value=1 status=pass pass=true\n");
    }

    #[test]
    fn summary_counts() {
        let s = Summary::of(&sample());
        assert_eq!(s, Summary { total: 2, pass: 1, fail: 1, skipped: 0 });
        assert_eq!(s.to_string(), "summary: total=2 pass=1 fail=1 skipped=0");
    }
}
