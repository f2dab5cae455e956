//! Text renderers: CSV with shortest round-trip floats, and small SVG plots.

use std::fmt::Write as _;

/// Shortest decimal string that parses back to exactly `v`.
pub fn num(v: f64) -> String {
    ryu::Buffer::new().format(v).to_owned()
}

/// CSV with a header row and LF line endings.
pub fn csv<I>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(num).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Maps data coordinates onto an SVG canvas with `z` pointing up.
struct Canvas {
    x_range: (f64, f64),
    z_range: (f64, f64),
    width: f64,
    height: f64,
    margin: f64,
}

impl Canvas {
    fn new(x_range: (f64, f64), z_range: (f64, f64), width: f64, height: f64) -> Self {
        Self {
            x_range,
            z_range,
            width,
            height,
            margin: 20.0,
        }
    }

    fn px(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range;
        self.margin + (x - lo) / (hi - lo) * (self.width - 2.0 * self.margin)
    }

    fn pz(&self, z: f64) -> f64 {
        let (lo, hi) = self.z_range;
        self.height - self.margin - (z - lo) / (hi - lo) * (self.height - 2.0 * self.margin)
    }

    fn open(&self, out: &mut String) {
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
            w = self.width,
            h = self.height
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    }

    fn polyline(&self, out: &mut String, points: impl Iterator<Item = (f64, f64)>, style: &str) {
        let coords: Vec<String> = points
            .map(|(x, z)| format!("{:.3},{:.3}", self.px(x), self.pz(z)))
            .collect();
        let _ = writeln!(out, r#"<polyline points="{}" {style}/>"#, coords.join(" "));
    }

    fn level(&self, out: &mut String, z: f64, label: &str) {
        let _ = writeln!(
            out,
            r##"<line x1="{:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="#888" stroke-dasharray="4 3"/>"##,
            self.px(self.x_range.0),
            self.px(self.x_range.1),
            y = self.pz(z)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" font-size="11" font-family="monospace">{label}</text>"#,
            self.px(self.x_range.0) + 4.0,
            self.pz(z) - 3.0
        );
    }
}

/// One wavelength of the free surface with the analytic crest and trough levels.
pub fn profile_svg(samples: &[(f64, f64)], wavelength: f64, crest: f64, trough: f64) -> String {
    let pad = 0.15 * (crest - trough).max(f64::MIN_POSITIVE);
    let canvas = Canvas::new((0.0, wavelength), (trough - pad, crest + pad), 800.0, 300.0);
    let mut out = String::new();
    canvas.open(&mut out);
    canvas.level(&mut out, crest, &format!("crest {}", num(crest)));
    canvas.level(&mut out, trough, &format!("trough {}", num(trough)));
    canvas.polyline(
        &mut out,
        samples.iter().copied(),
        r##"fill="none" stroke="#1f5fa8" stroke-width="1.5""##,
    );
    out.push_str("</svg>\n");
    out
}

/// A particle path together with its fitted circle.
pub fn trace_svg(samples: &[(f64, f64, f64)], center: (f64, f64), radius: f64) -> String {
    let r = radius.max(f64::MIN_POSITIVE) * 1.2;
    let canvas = Canvas::new(
        (center.0 - r, center.0 + r),
        (center.1 - r, center.1 + r),
        400.0,
        400.0,
    );
    let mut out = String::new();
    canvas.open(&mut out);
    let _ = writeln!(
        out,
        r##"<circle cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="#888" stroke-dasharray="4 3"/>"##,
        canvas.px(center.0),
        canvas.pz(center.1),
        canvas.px(center.0 + radius) - canvas.px(center.0)
    );
    canvas.polyline(
        &mut out,
        samples.iter().map(|s| (s.1, s.2)),
        r##"fill="none" stroke="#1f5fa8" stroke-width="1.5""##,
    );
    let _ = writeln!(
        out,
        r##"<circle cx="{:.3}" cy="{:.3}" r="2" fill="#c0392b"/>"##,
        canvas.px(center.0),
        canvas.pz(center.1)
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Parses CSV written by [`csv`] back into its header and numeric rows.
    pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or("empty input")?
            .split(',')
            .map(str::to_owned)
            .collect::<Vec<_>>();
        let rows = lines
            .enumerate()
            .map(|(i, line)| {
                let row = line
                    .split(',')
                    .map(|cell| cell.parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| format!("line {}: {e}", i + 2))?;
                if row.len() != header.len() {
                    return Err(format!("line {}: expected {} columns", i + 2, header.len()));
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok((header, rows))
    }

    #[test]
    fn csv_round_trips_exactly() {
        let rows = vec![vec![0.1, -1e-300], vec![std::f64::consts::PI, 6.02e23]];
        let text = csv(&["x", "eta"], rows.clone());
        let (header, parsed) = parse_csv(&text).unwrap();
        assert_eq!(header, ["x", "eta"]);
        assert_eq!(parsed, rows);
        assert_eq!(csv(&["x", "eta"], parsed), text);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn ragged_rows_are_rejected() {
        assert!(parse_csv("x,eta\n1,2\n3\n").is_err());
        assert!(parse_csv("x\nfoo\n").is_err());
    }

    #[test]
    fn svg_is_well_formed() {
        let svg = profile_svg(&[(0.0, 1.0), (1.0, -1.0)], 2.0, 1.0, -1.0);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}
