//! CSV and JSON emission. CSV numbers carry 17 significant digits so every
//! f64 round-trips; the first line names the format version and command.

use std::fmt::Write as _;

use serde::Serialize;

pub const CSV_VERSION: u32 = 1;
pub const JSON_VERSION: u32 = 1;

/// 17 significant digits.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub struct Csv {
    out: String,
}

impl Csv {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        let mut out = format!("# quartic-csv v{CSV_VERSION} {command}\n");
        out.push_str(&columns.join(","));
        out.push('\n');
        Self { out }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.out.push_str(&cells.join(","));
        self.out.push('\n');
    }

    pub fn comment(&mut self, text: &str) {
        let _ = writeln!(self.out, "# {text}");
    }

    pub fn finish(self) -> String {
        self.out
    }
}

#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema_version: u32,
    pub command: &'static str,
    #[serde(flatten)]
    pub body: T,
}

pub fn json<T: Serialize>(command: &'static str, body: T) -> String {
    let mut s = serde_json::to_string_pretty(&Envelope { schema_version: JSON_VERSION, command, body }).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 487.479_890_964_551_9, -2.5e-300, 6.02e23] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert_eq!(s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }

    #[test]
    fn csv_header_is_versioned() {
        let mut c = Csv::new("solve", &["n", "mu"]);
        c.row(&["0".into(), num(1.0)]);
        let text = c.finish();
        assert!(text.starts_with("# quartic-csv v1 solve\nn,mu\n0,1.0000000000000000e0\n"));
    }
}
