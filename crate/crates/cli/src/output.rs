//! CSV and JSONL encoders. Every float is written with 17 significant
//! digits so that files round-trip exactly.

use crate::CliError;

/// 17 significant digits in scientific notation; `-0` is written as `0`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{:.16e}", x + 0.0)
    }
}

/// Short form for reports.
pub fn short(x: f64) -> String {
    format!("{}", x + 0.0)
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// CSV document with a single header row.
pub struct Csv {
    writer: csv::Writer<Vec<u8>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Csv { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn finish(self) -> Result<Vec<u8>, CliError> {
        self.writer.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
    }
}

/// One JSON object, fields in insertion order.
pub struct Record {
    body: String,
}

impl Record {
    pub fn new(kind: &str) -> Self {
        let mut r = Record { body: String::from("{") };
        r.str("kind", kind);
        r
    }

    fn key(&mut self, k: &str) {
        if self.body.len() > 1 {
            self.body.push(',');
        }
        self.body.push_str(&serde_json::to_string(k).expect("string"));
        self.body.push(':');
    }

    pub fn str(&mut self, k: &str, v: &str) -> &mut Self {
        self.key(k);
        self.body.push_str(&serde_json::to_string(v).expect("string"));
        self
    }

    pub fn num(&mut self, k: &str, v: f64) -> &mut Self {
        self.key(k);
        self.body.push_str(&json_num(v));
        self
    }

    pub fn opt(&mut self, k: &str, v: Option<f64>) -> &mut Self {
        match v {
            Some(v) => self.num(k, v),
            None => {
                self.key(k);
                self.body.push_str("null");
                self
            }
        }
    }

    pub fn int(&mut self, k: &str, v: i64) -> &mut Self {
        self.key(k);
        self.body.push_str(&v.to_string());
        self
    }

    pub fn bool(&mut self, k: &str, v: bool) -> &mut Self {
        self.key(k);
        self.body.push_str(if v { "true" } else { "false" });
        self
    }

    pub fn nums(&mut self, k: &str, v: &[f64]) -> &mut Self {
        self.key(k);
        let items: Vec<String> = v.iter().map(|&x| json_num(x)).collect();
        self.body.push('[');
        self.body.push_str(&items.join(","));
        self.body.push(']');
        self
    }

    pub fn line(&self) -> String {
        format!("{}}}\n", self.body)
    }
}

fn json_num(v: f64) -> String {
    if v.is_finite() {
        num(v)
    } else {
        "null".into()
    }
}

#[derive(Default)]
pub struct Jsonl {
    buf: String,
}

impl Jsonl {
    pub fn push(&mut self, r: &Record) {
        self.buf.push_str(&r.line());
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf.into_bytes()
    }
}
