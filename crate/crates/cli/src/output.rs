//! Plain-text writers. Reals are printed with 15 significant digits.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use condeng::{CMatrix, C64};

use crate::error::{CliError, Result};

pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.14e}")
    }
}

/// Comma-separated table with a header row.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            text: header.join(",") + "\n",
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// `key = value` lines; the result is valid TOML.
#[derive(Default)]
pub struct Kv {
    text: String,
}

impl Kv {
    fn put(&mut self, key: &str, value: String) {
        let _ = writeln!(self.text, "{key} = {value}");
    }

    pub fn int(&mut self, key: &str, v: usize) {
        self.put(key, v.to_string());
    }

    pub fn real(&mut self, key: &str, v: f64) {
        self.put(key, num(v));
    }

    pub fn text(&mut self, key: &str, v: &str) {
        self.put(key, format!("{v:?}"));
    }

    pub fn ints(&mut self, key: &str, v: &[usize]) {
        let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        self.put(key, format!("[{}]", items.join(", ")));
    }

    pub fn reals(&mut self, key: &str, v: &[f64]) {
        let items: Vec<String> = v.iter().map(|&x| num(x)).collect();
        self.put(key, format!("[{}]", items.join(", ")));
    }

    /// Complex numbers as `[[re, im], ...]`.
    pub fn complexes(&mut self, key: &str, v: &[C64]) {
        let items: Vec<String> = v.iter().map(|z| format!("[{}, {}]", num(z.re), num(z.im))).collect();
        self.put(key, format!("[{}]", items.join(", ")));
    }

    /// Row-major nested arrays of the real and imaginary parts.
    pub fn matrix(&mut self, key: &str, m: &CMatrix) {
        let part = |f: fn(&C64) -> f64| {
            let rows: Vec<String> = (0..m.nrows())
                .map(|i| {
                    let row: Vec<String> = (0..m.ncols()).map(|j| num(f(&m[(i, j)]))).collect();
                    format!("[{}]", row.join(", "))
                })
                .collect();
            format!("[{}]", rows.join(", "))
        };
        self.put(&format!("{key}_re"), part(|z| z.re));
        self.put(&format!("{key}_im"), part(|z| z.im));
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Writes to `path`, or to standard output when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(num(0.25), "2.50000000000000e-1");
        assert_eq!(num(-3.0), "-3.00000000000000e0");
        assert_eq!(num(f64::NAN), "nan");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn kv_is_toml() {
        let mut kv = Kv::default();
        kv.int("n", 3);
        kv.real("p", 0.125);
        kv.text("name", "a \"b\"");
        kv.complexes("z", &[C64::new(1.0, -2.0)]);
        kv.matrix("y", &CMatrix::identity(2, 2));
        let parsed: toml::Table = toml::from_str(&kv.finish()).unwrap();
        assert_eq!(parsed["n"].as_integer(), Some(3));
        assert_eq!(parsed["p"].as_float(), Some(0.125));
        assert_eq!(parsed["name"].as_str(), Some("a \"b\""));
        assert_eq!(parsed["y_re"][1][1].as_float(), Some(1.0));
        assert_eq!(parsed["z"][0][1].as_float(), Some(-2.0));
    }

    #[test]
    fn csv_rows() {
        let mut t = Csv::new(&["a", "b"]);
        t.row(&["1".into(), num(0.5)]);
        assert_eq!(t.finish(), "a,b\n1,5.00000000000000e-1\n");
    }
}
