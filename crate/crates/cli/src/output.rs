use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// Six significant digits, two-digit signed exponent: `1.85900e+01`.
pub fn sci(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    format!("{mantissa}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
}

pub fn sci_opt(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

pub fn open(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::validation(format!("cannot create {}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// CSV with a leading `# config: {json}` comment line and a header row.
pub fn write_csv<C: Serialize>(out: Option<&Path>, config: &C, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = open(out)?;
    let json = serde_json::to_string(config).map_err(|e| CliError::numerical(e.to_string()))?;
    let mut body = format!("# config: {json}\n{}\n", header.join(","));
    for r in rows {
        body.push_str(&r.iter().map(|f| quote(f)).collect::<Vec<_>>().join(","));
        body.push('\n');
    }
    w.write_all(body.as_bytes()).and_then(|_| w.flush()).map_err(|e| CliError::numerical(format!("write failed: {e}")))
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut w = open(out)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::numerical(e.to_string()))?;
    writeln!(w, "{text}").and_then(|_| w.flush()).map_err(|e| CliError::numerical(format!("write failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scientific_format() {
        assert_eq!(sci(18.59), "1.85900e+01");
        assert_eq!(sci(3.867e-11), "3.86700e-11");
        assert_eq!(sci(0.0), "0.00000e+00");
        assert_eq!(sci(-2.5e100), "-2.50000e+100");
    }

    #[test]
    fn quoting() {
        assert_eq!(quote("a,b"), "\"a,b\"");
        assert_eq!(quote("say \"x\""), "\"say \"\"x\"\"\"");
        assert_eq!(quote("plain"), "plain");
    }
}
