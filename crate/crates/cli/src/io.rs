//! Output formatting and sequence-file I/O for the harness.
//!
//! CSV numbers carry 12 significant digits in a printf-%g style layout
//! (fixed point for moderate exponents, scientific otherwise), so files
//! are plot-ready, diff-able, and byte-stable across runs.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use entrate::{Alphabet, Sample, SymbolSequence};

const SIG_DIGITS: usize = 12;

/// Format with 12 significant digits, %g-style: fixed notation when the
/// decimal exponent is in [-4, 12), scientific otherwise, trailing zeros
/// trimmed.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    // Round to 12 significant digits first, then place the point.
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), SIG_DIGITS);

    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if (-4..SIG_DIGITS as i32).contains(&exp) {
        if exp >= 0 {
            let split = exp as usize + 1;
            out.push_str(&digits[..split]);
            let frac = digits[split..].trim_end_matches('0');
            if !frac.is_empty() {
                out.push('.');
                out.push_str(frac);
            }
        } else {
            out.push_str("0.");
            for _ in 0..(-exp - 1) {
                out.push('0');
            }
            out.push_str(digits.trim_end_matches('0'));
        }
    } else {
        let frac = digits[1..].trim_end_matches('0');
        out.push_str(&digits[..1]);
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
        let _ = write!(out, "e{exp}");
    }
    out
}

/// Optional value: empty CSV field when absent.
pub fn format_opt(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_default()
}

pub fn format_flag(b: Option<bool>) -> String {
    match b {
        Some(true) => "1".to_string(),
        Some(false) => "0".to_string(),
        None => String::new(),
    }
}

/// Minimal CSV assembly: plain comma joins with a header row. Fields here
/// never contain commas or quotes.
pub struct CsvTable {
    buf: String,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Self { buf }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }

    pub fn write_to(self, path: &Path) -> io::Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        fs::write(path, self.buf)
    }
}

/// Render a sample one sequence per line: contiguous digits for alphabets
/// of at most 10 symbols, whitespace-separated integers otherwise.
pub fn render_sample(sample: &Sample) -> String {
    let digit_form = sample.alphabet().size() <= 10;
    let mut out = String::new();
    for p in sample.points() {
        if digit_form {
            for &s in p.symbols() {
                out.push(char::from_digit(s, 10).expect("symbol < 10"));
            }
        } else {
            let mut first = true;
            for &s in p.symbols() {
                if !first {
                    out.push(' ');
                }
                let _ = write!(out, "{s}");
                first = false;
            }
        }
        out.push('\n');
    }
    out
}

/// Parse error for sequence files, carrying the 1-based line number.
#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Read a sequence file: one sequence per line, equal lengths, alphabet
/// inferred from the symbols present. Lines with whitespace are parsed as
/// integer lists, otherwise as contiguous digit characters. If `depth` is
/// given, every line is truncated to its first `depth` symbols.
pub fn parse_sequences(text: &str, depth: Option<usize>) -> Result<Sample, ParseError> {
    let mut rows: Vec<Vec<u32>> = Vec::new();
    let mut expected_len: Option<usize> = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            return Err(ParseError {
                line: lineno,
                message: "empty line".into(),
            });
        }
        let symbols: Vec<u32> = if line.contains(char::is_whitespace) {
            line.split_whitespace()
                .map(|tok| {
                    tok.parse::<u32>().map_err(|_| ParseError {
                        line: lineno,
                        message: format!("invalid symbol {tok:?}"),
                    })
                })
                .collect::<Result<_, _>>()?
        } else {
            line.chars()
                .map(|c| {
                    c.to_digit(10).ok_or_else(|| ParseError {
                        line: lineno,
                        message: format!("non-symbol character {c:?}"),
                    })
                })
                .collect::<Result<_, _>>()?
        };
        match expected_len {
            None => expected_len = Some(symbols.len()),
            Some(len) if len != symbols.len() => {
                return Err(ParseError {
                    line: lineno,
                    message: format!("ragged line: {} symbols, expected {len}", symbols.len()),
                });
            }
            _ => {}
        }
        rows.push(symbols);
    }
    if rows.is_empty() {
        return Err(ParseError {
            line: 0,
            message: "file contains no sequences".into(),
        });
    }
    let full_len = expected_len.unwrap();
    if let Some(d) = depth {
        if d == 0 {
            return Err(ParseError {
                line: 0,
                message: "depth must be at least 1".into(),
            });
        }
        if d > full_len {
            return Err(ParseError {
                line: 1,
                message: format!("lines have {full_len} symbols, fewer than depth {d}"),
            });
        }
        for row in &mut rows {
            row.truncate(d);
        }
    }

    let max_symbol = rows.iter().flatten().copied().max().unwrap_or(0);
    let alphabet = Alphabet::new((max_symbol as usize + 1).max(2)).map_err(|e| ParseError {
        line: 0,
        message: e.to_string(),
    })?;
    let points = rows
        .into_iter()
        .enumerate()
        .map(|(idx, symbols)| {
            SymbolSequence::new(symbols, &alphabet).map_err(|e| ParseError {
                line: idx + 1,
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Sample::new(points, alphabet).map_err(|e| ParseError {
        line: 0,
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_sig_layouts() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(-2.5), "-2.5");
        assert_eq!(format_sig(std::f64::consts::LOG2_E), "1.44269504089");
        assert_eq!(format_sig(110.25), "110.25");
        assert_eq!(format_sig(0.0001), "0.0001");
        assert_eq!(format_sig(3.8574996959278356e-22), "3.85749969593e-22");
        assert_eq!(format_sig(1e15), "1e15");
        assert_eq!(format_sig(123456789012345.0), "1.23456789012e14");
        assert_eq!(format_sig(-0.00012345), "-0.00012345");
    }

    #[test]
    fn format_sig_round_trips_to_12_digits() {
        for x in [
            0.3864270079195311,
            7.667294275447326,
            1.0 / 3.0,
            2f64.ln(),
            6.02e23,
            -9.1e-31,
        ] {
            let s = format_sig(x);
            let back: f64 = s.parse().unwrap();
            assert!(
                ((back - x) / x).abs() < 1e-11,
                "{x} -> {s} -> {back}"
            );
        }
    }

    #[test]
    fn render_and_parse_digit_form() {
        let alphabet = Alphabet::new(2).unwrap();
        let points = vec![
            SymbolSequence::new(vec![0, 0, 1], &alphabet).unwrap(),
            SymbolSequence::new(vec![1, 1, 1], &alphabet).unwrap(),
        ];
        let sample = Sample::new(points, alphabet).unwrap();
        let text = render_sample(&sample);
        assert_eq!(text, "001\n111\n");
        let parsed = parse_sequences(&text, None).unwrap();
        assert_eq!(parsed.num_points(), 2);
        assert_eq!(parsed.point(0).symbols(), &[0, 0, 1]);
    }

    #[test]
    fn render_and_parse_integer_form() {
        let alphabet = Alphabet::new(12).unwrap();
        let points = vec![
            SymbolSequence::new(vec![0, 11, 3], &alphabet).unwrap(),
            SymbolSequence::new(vec![10, 1, 2], &alphabet).unwrap(),
        ];
        let sample = Sample::new(points, alphabet).unwrap();
        let text = render_sample(&sample);
        assert_eq!(text, "0 11 3\n10 1 2\n");
        let parsed = parse_sequences(&text, None).unwrap();
        assert_eq!(parsed.point(1).symbols(), &[10, 1, 2]);
        assert_eq!(parsed.alphabet().size(), 12);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = parse_sequences("001\n01\n", None).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("ragged"));

        let err = parse_sequences("001\n0a1\n", None).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("non-symbol"));

        let err = parse_sequences("0 1\n1 x\n", None).unwrap_err();
        assert_eq!(err.line, 2);

        let err = parse_sequences("001\n", None).unwrap_err();
        assert!(err.message.contains("at least 2"));

        let err = parse_sequences("001\n010\n", Some(4)).unwrap_err();
        assert!(err.message.contains("fewer than depth"));
    }

    #[test]
    fn parse_truncates_to_depth() {
        let sample = parse_sequences("0011\n0101\n1100\n", Some(2)).unwrap();
        assert_eq!(sample.depth(), 2);
        assert_eq!(sample.point(2).symbols(), &[1, 1]);
    }

    #[test]
    fn single_symbol_file_gets_minimum_alphabet() {
        let sample = parse_sequences("000\n000\n000\n", None).unwrap();
        assert_eq!(sample.alphabet().size(), 2);
    }
}
