//! Deterministic, self-contained SVG line plots.

use std::fmt::Write as _;

use crate::report::Table;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x: String,
    pub y: Vec<String>,
    /// One curve per distinct value of this column, for the first y column.
    pub group_by: Option<String>,
    pub log_x: bool,
    pub log_y: bool,
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 56.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n\
         <line x1=\"{PAD}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{PAD}\" y1=\"{PAD}\" x2=\"{PAD}\" y2=\"{}\" stroke=\"black\"/>\n",
        W / 2.0,
        escape(title),
        H - PAD,
        W - PAD,
        H - PAD,
        H - PAD
    );
}

/// Placeholder for commands that produce no plot.
pub const EMPTY: &str = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"80\">\n<text x=\"20\" y=\"45\" font-family=\"sans-serif\" font-size=\"14\">no data</text>\n</svg>\n";

pub fn emit_svg(table: &Table, spec: &PlotSpec) -> Result<String, String> {
    let xi = table.column(&spec.x).ok_or_else(|| format!("no column {:?}", spec.x))?;
    let mut yis = Vec::new();
    for y in &spec.y {
        yis.push(table.column(y).ok_or_else(|| format!("no column {y:?}"))?);
    }
    let gi = match &spec.group_by {
        Some(g) => Some(table.column(g).ok_or_else(|| format!("no column {g:?}"))?),
        None => None,
    };
    for r in &table.rows {
        for &i in std::iter::once(&xi).chain(&yis) {
            if r[i].as_f64().is_none() {
                return Err(format!("column {:?} is not numeric", table.columns[i]));
            }
        }
    }
    let tx = |v: f64| if spec.log_x { v.log10() } else { v };
    let ty = |v: f64| if spec.log_y { v.log10() } else { v };

    // Series: (label, points).
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    match gi {
        Some(g) => {
            let y = yis[0];
            for r in &table.rows {
                let key = match &r[g] {
                    crate::report::Cell::Text(s) => s.clone(),
                    c => c.as_f64().map(crate::report::fmt_f64).unwrap_or_default(),
                };
                let pt = (tx(r[xi].as_f64().unwrap()), ty(r[y].as_f64().unwrap()));
                match series.iter_mut().find(|s| s.0 == key) {
                    Some(s) => s.1.push(pt),
                    None => series.push((key, vec![pt])),
                }
            }
            for s in &mut series {
                s.0 = format!("{} = {}", table.columns[g], s.0);
            }
        }
        None => {
            for &y in &yis {
                let pts =
                    table.rows.iter().map(|r| (tx(r[xi].as_f64().unwrap()), ty(r[y].as_f64().unwrap()))).collect();
                series.push((table.columns[y].clone(), pts));
            }
        }
    }
    for s in &mut series {
        s.1.retain(|p| p.0.is_finite() && p.1.is_finite());
    }
    let mut out = String::new();
    header(&mut out, &spec.title);
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.1.iter().copied()).collect();
    if all.is_empty() {
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">no data</text>",
            W / 2.0,
            H / 2.0
        );
        out.push_str("</svg>\n");
        return Ok(out);
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let label = |v: f64, log: bool| if log { format!("1e{v:.2}") } else { format!("{v:.4}") };
    let _ = writeln!(
        out,
        "<text x=\"{PAD}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\">{}</text>\n\
         <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{}</text>\n\
         <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{}</text>\n\
         <text x=\"{}\" y=\"{PAD}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{}</text>\n\
         <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
        H - PAD + 14.0,
        label(x0, spec.log_x),
        W - PAD,
        H - PAD + 14.0,
        label(x1, spec.log_x),
        PAD - 4.0,
        H - PAD,
        label(y0, spec.log_y),
        PAD - 4.0,
        label(y1, spec.log_y),
        W / 2.0,
        H - 16.0,
        escape(&spec.x)
    );
    for (k, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.3},{:.3}", px(x), py(y))).collect();
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            path.join(" ")
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"10\" fill=\"{color}\" text-anchor=\"end\">{}</text>",
            W - PAD,
            PAD + 12.0 * (k as f64 + 1.0),
            escape(name)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> PlotSpec {
        PlotSpec { title: "t".into(), x: "k".into(), y: vec!["v".into()], group_by: None, log_x: true, log_y: true }
    }

    #[test]
    fn empty_table_has_label() {
        let t = Table::new("t", &["k", "v"]);
        assert!(emit_svg(&t, &spec()).unwrap().contains("no data"));
    }

    #[test]
    fn rejects_text_columns() {
        let mut t = Table::new("t", &["k", "v"]);
        t.push(vec![1u64.into(), "x".into()]);
        assert!(emit_svg(&t, &spec()).is_err());
    }

    #[test]
    fn deterministic() {
        let mut t = Table::new("t", &["k", "v"]);
        for k in 1..20u64 {
            t.push(vec![k.into(), (1.0 / k as f64).into()]);
        }
        assert_eq!(emit_svg(&t, &spec()).unwrap(), emit_svg(&t, &spec()).unwrap());
    }
}
