//! Artifact formatting: numbers, headers with a configuration hash, point
//! CSV files and SVG plots.

use std::io::{Read, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::plane::{rational_to_f64, CodePoint, PointSource};

pub const TOOL: &str = "codestat";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A float rounded to 15 significant digits, printed in shortest form.
pub fn fmt_f64(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.14e}").parse().expect("valid float text");
    format!("{rounded:?}")
}

/// `"num/den"`, always with a denominator.
pub fn fmt_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("not a rational number: {text:?}"));
    let (num, den) = match text.trim().split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (text.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Hex SHA-256 of the configuration arguments.
pub fn config_hash<S: AsRef<str>>(args: &[S]) -> String {
    let mut h = Sha256::new();
    for a in args {
        h.update(a.as_ref().as_bytes());
        h.update([0u8]);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// `# codestat <version> config=<hash>`.
pub fn header_comment(config: &str) -> String {
    format!("# {TOOL} {VERSION} config={config}")
}

/// The `meta` object attached to JSON artifacts.
pub fn json_meta(config: &str) -> serde_json::Value {
    serde_json::json!({ "tool": TOOL, "version": VERSION, "config": config })
}

#[derive(Debug, Serialize, Deserialize)]
struct PointRow {
    n: Option<usize>,
    size: Option<String>,
    d: Option<usize>,
    q: Option<u32>,
    #[serde(rename = "R_num")]
    r_num: String,
    #[serde(rename = "R_den")]
    r_den: String,
    delta_num: String,
    delta_den: String,
    tag: String,
}

/// Writes `n,size,d,q,R_num,R_den,delta_num,delta_den,tag` after a header
/// comment.
pub fn write_points_csv<W: Write>(mut out: W, config: &str, points: &[CodePoint]) -> Result<()> {
    writeln!(out, "{}", header_comment(config))?;
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        let src = p.source.as_ref();
        w.serialize(PointRow {
            n: src.map(|s| s.n),
            size: src.map(|s| s.size.to_string()),
            d: src.map(|s| s.d),
            q: src.map(|s| s.q),
            r_num: p.rate.numer().to_string(),
            r_den: p.rate.denom().to_string(),
            delta_num: p.delta.numer().to_string(),
            delta_den: p.delta.denom().to_string(),
            tag: p.tag.clone(),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a point CSV; `#` lines are comments and code columns may be empty.
pub fn read_points_csv<R: Read>(input: R) -> Result<Vec<CodePoint>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let mut points = Vec::new();
    for row in reader.deserialize() {
        let row: PointRow = row?;
        let rate = parse_rational(&format!("{}/{}", row.r_num, row.r_den))?;
        let delta = parse_rational(&format!("{}/{}", row.delta_num, row.delta_den))?;
        let mut p = CodePoint::new(rate, delta)?.with_tag(row.tag);
        if let (Some(n), Some(size), Some(d), Some(q)) = (row.n, row.size, row.d, row.q) {
            let size = size
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad size {size:?}")))?;
            p.source = Some(PointSource { q, n, size, d });
        }
        points.push(p);
    }
    Ok(points)
}

/// A deterministic SVG plot of the `(δ, R)` square, δ horizontal.
pub struct SvgPlot {
    body: Vec<String>,
}

const SIZE: f64 = 480.0;
const MARGIN: f64 = 48.0;

fn sx(delta: f64) -> f64 {
    MARGIN + delta * SIZE
}

fn sy(rate: f64) -> f64 {
    MARGIN + (1.0 - rate) * SIZE
}

fn coord(x: f64) -> String {
    format!("{x:.3}")
}

impl SvgPlot {
    pub fn new() -> Self {
        let mut body = Vec::new();
        let (x0, y0, x1, y1) = (sx(0.0), sy(0.0), sx(1.0), sy(1.0));
        body.push(format!(
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            coord(x0),
            coord(y1),
            coord(x1 - x0),
            coord(y0 - y1)
        ));
        for i in 0..=4 {
            let t = i as f64 / 4.0;
            body.push(format!(
                r#"<text x="{}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
                coord(sx(t)),
                coord(y0 + 16.0),
                t
            ));
            body.push(format!(
                r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{}</text>"#,
                coord(x0 - 6.0),
                coord(sy(t) + 4.0),
                t
            ));
        }
        body.push(format!(
            r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">δ</text>"#,
            coord(sx(0.5)),
            coord(y0 + 34.0)
        ));
        body.push(format!(
            r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">R</text>"#,
            coord(x0 - 32.0),
            coord(sy(0.5))
        ));
        SvgPlot { body }
    }

    /// A polyline through `(δ, R)` pairs.
    pub fn polyline(&mut self, points: &[(f64, f64)], color: &str, label: &str) {
        let pts: Vec<String> = points
            .iter()
            .map(|&(d, r)| format!("{},{}", coord(sx(d)), coord(sy(r))))
            .collect();
        self.body.push(format!(
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"><title>{label}</title></polyline>"#,
            pts.join(" ")
        ));
    }

    pub fn points(&mut self, points: &[CodePoint], color: &str) {
        for p in points {
            self.body.push(format!(
                r#"<circle cx="{}" cy="{}" r="2.5" fill="{color}"/>"#,
                coord(sx(rational_to_f64(&p.delta))),
                coord(sy(rational_to_f64(&p.rate)))
            ));
        }
    }

    pub fn render(&self, config: &str) -> String {
        let side = SIZE + 2.0 * MARGIN;
        let mut s = String::new();
        s.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{side}\" height=\"{side}\" viewBox=\"0 0 {side} {side}\">\n"
        ));
        s.push_str(&format!("<!-- {TOOL} {VERSION} config={config} -->\n"));
        for line in &self.body {
            s.push_str(line);
            s.push('\n');
        }
        s.push_str("</svg>\n");
        s
    }
}

impl Default for SvgPlot {
    fn default() -> Self {
        SvgPlot::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting() {
        assert_eq!(fmt_f64(1.0), "1.0");
        assert_eq!(fmt_f64(8.0 / 7.0), "1.14285714285714");
        assert_eq!(fmt_f64(0.1 + 0.2), "0.3");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn rationals() {
        let r = parse_rational("2/6").unwrap();
        assert_eq!(fmt_rational(&r), "1/3");
        assert_eq!(fmt_rational(&parse_rational("3").unwrap()), "3/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn point_csv_round_trip() {
        let c = crate::code::Code::from_strs(2, &["00000", "11100"]).unwrap();
        let p = CodePoint::from_code(&c, "a").unwrap();
        let bare = CodePoint::from_ratios((1, 2), (1, 4)).unwrap().with_tag("b");
        let mut buf = Vec::new();
        write_points_csv(&mut buf, "x", &[p.clone(), bare.clone()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# codestat "));
        assert!(text.contains("n,size,d,q,R_num,R_den,delta_num,delta_den,tag"));
        let back = read_points_csv(&buf[..]).unwrap();
        assert_eq!(back, vec![p.clone(), bare]);
        assert_eq!(back[0].source, p.source);
        assert_eq!(back[1].tag, "b");
    }

    #[test]
    fn config_hash_is_stable() {
        assert_eq!(config_hash(&["a", "b"]), config_hash(&["a", "b"]));
        assert_ne!(config_hash(&["ab"]), config_hash(&["a", "b"]));
    }
}
