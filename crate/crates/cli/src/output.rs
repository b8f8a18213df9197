use crate::cache::write_atomic;
use crate::error::{CliError, CliResult};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

pub const SCHEMA: u32 = 1;

/// A CSV table with `#`-prefixed metadata lines above the header.
#[derive(Debug, Default)]
pub struct Csv {
    meta: Vec<(String, String)>,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&'static str]) -> Self {
        Csv { header: header.to_vec(), ..Default::default() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        let bytes = w.into_inner().expect("in-memory flush");
        out.push_str(std::str::from_utf8(&bytes).expect("cells are UTF-8"));
        out
    }
}

/// Shortest round-trip text of a float.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

pub fn flag(b: bool) -> String {
    u8::from(b).to_string()
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON wrapped with the schema version and command name.
pub fn json<T: Serialize>(command: &str, body: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(&Envelope { schema: SCHEMA, command, body })
        .map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn emit(text: &str, dest: Option<&Path>) -> CliResult<()> {
    match dest {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
