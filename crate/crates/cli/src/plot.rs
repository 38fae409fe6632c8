//! BER-versus-users curves from simulator CSV, rendered as a self-contained SVG.

use std::fmt::Write as _;

use meppm::simulator::CSV_HEADER;

use crate::CliError;

const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const DASHES: [&str; 3] = ["", "6,4", "2,3"];

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 560.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 440.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    /// `(N, BER)` in file order.
    pub points: Vec<(f64, f64)>,
}

fn col(name: &str) -> usize {
    CSV_HEADER
        .iter()
        .position(|&h| h == name)
        .expect("known column")
}

/// Groups rows by `(scheme, P0_W)` in order of first appearance. Rows of failed points
/// (empty `ber`) are skipped.
pub fn read_series(text: &str) -> Result<Vec<Series>, CliError> {
    let bad = |msg: String| CliError::Invalid(format!("csv: {msg}"));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(bad(format!(
            "unexpected header, expected {}",
            CSV_HEADER.join(",")
        )));
    }
    let (scheme, n, p0, ber) = (col("scheme"), col("N"), col("P0_W"), col("ber"));
    let mut keys: Vec<(String, String)> = Vec::new();
    let mut series: Vec<Series> = Vec::new();
    let mut rows = 0;
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        rows += 1;
        let line = i + 2;
        if rec.get(ber).unwrap_or("").is_empty() {
            continue;
        }
        let num = |c: usize| -> Result<f64, CliError> {
            let field = rec.get(c).unwrap_or("");
            field.parse::<f64>().map_err(|_| {
                bad(format!(
                    "line {line}: bad number {field:?} in {}",
                    CSV_HEADER[c]
                ))
            })
        };
        let point = (num(n)?, num(ber)?);
        let power = num(p0)?;
        let key = (rec[scheme].to_string(), rec[p0].to_string());
        match keys.iter().position(|k| *k == key) {
            Some(k) => series[k].points.push(point),
            None => {
                series.push(Series {
                    label: format!("{}, P0 = {power:e} W", key.0),
                    points: vec![point],
                });
                keys.push(key);
            }
        }
    }
    if rows == 0 {
        return Err(bad("no data rows".into()));
    }
    if series.is_empty() {
        return Err(bad("every row is a failed point".into()));
    }
    Ok(series)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Log-scale BER against N. Zero BER sits on the bottom axis, a decade below the data.
pub fn render_svg(series: &[Series]) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut zeros = false;
    for &(x, y) in all {
        zeros |= y <= 0.0;
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        if y > 0.0 {
            lo = lo.min(y.log10().floor());
            hi = hi.max(y.log10().ceil());
        }
    }
    if !lo.is_finite() {
        (lo, hi) = (-6.0, 0.0);
    } else if zeros {
        lo -= 1.0;
    }
    if hi <= lo {
        hi = lo + 1.0;
    }
    if xmax <= xmin {
        xmin -= 0.5;
        xmax += 0.5;
    }
    let px = |x: f64| LEFT + (x - xmin) / (xmax - xmin) * (RIGHT - LEFT);
    let py = |y: f64| {
        let v = if y > 0.0 { y.log10().max(lo) } else { lo };
        BOTTOM - (v - lo) / (hi - lo) * (BOTTOM - TOP)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        RIGHT - LEFT,
        BOTTOM - TOP
    );

    for d in lo as i32..=hi as i32 {
        let y = BOTTOM - (f64::from(d) - lo) / (hi - lo) * (BOTTOM - TOP);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{RIGHT}" y2="{y:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end">1e{d}</text>"##,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let span = (xmax - xmin).ceil().max(1.0);
    let step = (span / 16.0).ceil().max(1.0);
    let mut x = xmin.ceil();
    while x <= xmax {
        let sx = px(x);
        let _ = writeln!(
            svg,
            r#"<line x1="{sx:.2}" y1="{BOTTOM}" x2="{sx:.2}" y2="{}" stroke="black"/><text x="{sx:.2}" y="{}" text-anchor="middle">{x}</text>"#,
            BOTTOM + 5.0,
            BOTTOM + 18.0
        );
        x += step;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">active users N</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 40.0
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate(22 {}) rotate(-90)" text-anchor="middle">bit error rate</text>"#,
        (TOP + BOTTOM) / 2.0
    );

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let dash = DASHES[(i / COLORS.len()) % DASHES.len()];
        let dash_attr = if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        };
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series" points="{}" fill="none" stroke="{color}" stroke-width="1.8"{dash_attr}/>"#,
            pts.join(" ")
        );
        for &(x, y) in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                px(x),
                py(y)
            );
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.8"{dash_attr}/><text x="{}" y="{}">{}</text>"#,
            RIGHT + 15.0,
            RIGHT + 40.0,
            RIGHT + 46.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_text(rows: &[&str]) -> String {
        let mut t = CSV_HEADER.join(",");
        t.push('\n');
        for r in rows {
            t.push_str(r);
            t.push('\n');
        }
        t
    }

    const ROW_C1: &str =
        "cmeppm,67,33,16,67,13,3,1,0.0000001,0.0000001,0.8,200000000,1,1000,100,0.1,0.05";
    const ROW_C2: &str = "cmeppm,67,33,16,67,13,3,2,0.0000001,0.0000001,0.8,200000000,2,1000,0,0,0";
    const ROW_D1: &str =
        "dmeppm2,67,33,16,,,,1,0.0000001,0.0000001,0.8,200000000,3,1000,10,0.01,0.005";

    #[test]
    fn groups_by_scheme_and_power() {
        let s = read_series(&csv_text(&[ROW_C1, ROW_D1, ROW_C2])).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].points, vec![(1.0, 0.05), (2.0, 0.0)]);
        assert_eq!(s[1].label, "dmeppm2, P0 = 1e-7 W");
        let svg = render_svg(&s);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_series(&csv_text(&[])).is_err());
        assert!(read_series("a,b\n1,2\n").is_err());
        let broken = ROW_C1.replace(",1,0.0000001", ",x,0.0000001");
        assert!(read_series(&csv_text(&[&broken])).is_err());
    }

    #[test]
    fn single_point_renders() {
        let s = read_series(&csv_text(&[ROW_D1])).unwrap();
        let svg = render_svg(&s);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(!svg.contains("NaN"));
    }
}
