use std::path::Path;
use std::str::FromStr;

use crate::csv::CsvTable;
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Mean annealing cost against iteration, linear axes.
    Anneal,
    /// Trotter number against system size per bound family, log-log axes.
    Compare,
}

impl FromStr for PlotKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "anneal" => Ok(PlotKind::Anneal),
            "compare" => Ok(PlotKind::Compare),
            other => Err(HarnessError::Config(format!(
                "unknown plot kind '{other}', expected anneal or compare"
            ))),
        }
    }
}

pub fn render_plot(csv: &Path, kind: PlotKind, out: &Path) -> Result<()> {
    let table = CsvTable::read(csv)?;
    let svg = match kind {
        PlotKind::Anneal => render_anneal(&table)?,
        PlotKind::Compare => render_compare(&table)?,
    };
    if let Some(dir) = out.parent() {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    std::fs::write(out, svg).map_err(|e| HarnessError::io(out, e))
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [(&str, &str); 7] = [
    ("lloyd", "#1f77b4"),
    ("commutator", "#ff7f0e"),
    ("random_input", "#2ca02c"),
    ("observation", "#d62728"),
    ("empirical", "#9467bd"),
    ("kernel_exact", "#8c564b"),
    ("principal_integral", "#e377c2"),
];

fn color_for(series: &str, index: usize) -> &'static str {
    PALETTE
        .iter()
        .find(|(name, _)| *name == series)
        .map(|(_, c)| *c)
        .unwrap_or(PALETTE[index % PALETTE.len()].1)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    body: String,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn new(mut x_range: (f64, f64), mut y_range: (f64, f64)) -> Frame {
        if x_range.0 == x_range.1 {
            x_range = (x_range.0 - 0.5, x_range.1 + 0.5);
        }
        if y_range.0 == y_range.1 {
            y_range = (y_range.0 - 0.5, y_range.1 + 0.5);
        }
        let mut f = Frame {
            body: String::new(),
            x_min: x_range.0,
            x_max: x_range.1,
            y_min: y_range.0,
            y_max: y_range.1,
        };
        let (x0, y0) = (LEFT, HEIGHT - BOTTOM);
        let (x1, y1) = (WIDTH - RIGHT, TOP);
        f.body.push_str(&format!(
            "<path d=\"M {x0:.2} {y1:.2} L {x0:.2} {y0:.2} L {x1:.2} {y0:.2}\" \
             fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n"
        ));
        f
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        let h = HEIGHT - TOP - BOTTOM;
        HEIGHT - BOTTOM - (y - self.y_min) / (self.y_max - self.y_min) * h
    }

    fn x_tick(&mut self, x: f64, label: &str) {
        let px = self.px(x);
        let py = HEIGHT - BOTTOM;
        self.body.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{py:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" \
             stroke=\"#333333\" stroke-width=\"1\"/>\n",
            py + 5.0
        ));
        self.body.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            py + 18.0,
            escape(label)
        ));
    }

    fn y_tick(&mut self, y: f64, label: &str) {
        let py = self.py(y);
        self.body.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{LEFT:.2}\" y2=\"{py:.2}\" \
             stroke=\"#333333\" stroke-width=\"1\"/>\n",
            LEFT - 5.0
        ));
        self.body.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            LEFT - 8.0,
            py + 4.0,
            escape(label)
        ));
    }

    fn series(&mut self, points: &[(f64, f64)], color: &str) {
        if points.is_empty() {
            return;
        }
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        self.body.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            coords.join(" ")
        ));
        for &(x, y) in points {
            let (px, py) = (self.px(x), self.py(y));
            self.body.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" \
                 stroke=\"{color}\" stroke-width=\"3\"/>\n",
                px - 2.0,
                px + 2.0
            ));
        }
    }

    fn axis_labels(&mut self, x_label: &str, y_label: &str) {
        let cx = LEFT + (WIDTH - LEFT - RIGHT) / 2.0;
        self.body.push_str(&format!(
            "<text x=\"{cx:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            HEIGHT - 15.0,
            escape(x_label)
        ));
        self.body.push_str(&format!(
            "<text x=\"18\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" \
             transform=\"rotate(-90 18 {:.2})\">{}</text>\n",
            TOP + (HEIGHT - TOP - BOTTOM) / 2.0,
            TOP + (HEIGHT - TOP - BOTTOM) / 2.0,
            escape(y_label)
        ));
    }

    fn legend(&mut self, entries: &[(String, &str)]) {
        let x = WIDTH - RIGHT + 20.0;
        for (i, (name, color)) in entries.iter().enumerate() {
            let y = TOP + 15.0 + 18.0 * i as f64;
            self.body.push_str(&format!(
                "<line x1=\"{x:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
                 stroke=\"{color}\" stroke-width=\"2\"/>\n",
                x + 18.0
            ));
            self.body.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">{}</text>\n",
                x + 24.0,
                y + 4.0,
                escape(name)
            ));
        }
    }

    fn no_data(&mut self) {
        self.body.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\">no data</text>\n",
            LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
            TOP + (HEIGHT - TOP - BOTTOM) / 2.0
        ));
    }

    fn finish(self, title: &str) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<text x=\"{:.2}\" y=\"20\" font-size=\"13\" \
             text-anchor=\"middle\">{}</text>\n<g>\n{}</g>\n</svg>\n",
            LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
            escape(title),
            self.body
        )
    }
}

/// Evenly spaced tick positions including both endpoints.
fn linear_ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Shortest representation that round-trips the value.
fn num_label(v: f64) -> String {
    format!("{v}")
}

pub fn render_anneal(table: &CsvTable) -> Result<String> {
    let iter_col = table.column("iter")?;
    let cost_col = table.column("mean_cost")?;
    let best_col = table.column("mean_best")?;
    let mut cost_series = Vec::new();
    let mut best_series = Vec::new();
    for row in 0..table.len() {
        let it = table.f64(row, iter_col)?;
        cost_series.push((it, table.f64(row, cost_col)?));
        best_series.push((it, table.f64(row, best_col)?));
    }
    let all: Vec<(f64, f64)> = cost_series.iter().chain(&best_series).copied().collect();
    if all.is_empty() {
        let mut f = Frame::new((0.0, 1.0), (0.0, 1.0));
        f.axis_labels("iteration", "mean cost");
        f.no_data();
        return Ok(f.finish("annealed observation cost"));
    }
    let x_max = all.iter().map(|p| p.0).fold(f64::MIN, f64::max);
    let y_min = all.iter().map(|p| p.1).fold(f64::MAX, f64::min);
    let y_max = all.iter().map(|p| p.1).fold(f64::MIN, f64::max);
    let pad = 0.05 * (y_max - y_min).max(f64::MIN_POSITIVE);
    let mut f = Frame::new((0.0, x_max.max(1.0)), (y_min - pad, y_max + pad));
    for x in linear_ticks(0.0, x_max.max(1.0), 5) {
        f.x_tick(x, &num_label(x.round()));
    }
    for y in linear_ticks(y_min - pad, y_max + pad, 5) {
        f.y_tick(y, &num_label((y * 1e6).round() / 1e6));
    }
    f.series(&cost_series, color_for("current", 0));
    f.series(&best_series, color_for("best", 3));
    f.axis_labels("iteration", "mean cost");
    f.legend(&[("current".into(), color_for("current", 0)), ("best".into(), color_for("best", 3))]);
    Ok(f.finish("annealed observation cost"))
}

pub fn render_compare(table: &CsvTable) -> Result<String> {
    let n_col = table.column("n")?;
    let family_col = table.column("family")?;
    let r_col = table.column("r_star")?;
    let capped_col = table.column("capped")?;
    let mut families: Vec<String> = Vec::new();
    let mut series: Vec<Vec<(f64, f64)>> = Vec::new();
    for row in 0..table.len() {
        if table.cell(row, capped_col) == "true" || table.cell(row, r_col).is_empty() {
            continue;
        }
        let fam = table.cell(row, family_col).to_string();
        let idx = match families.iter().position(|f| *f == fam) {
            Some(i) => i,
            None => {
                families.push(fam);
                series.push(Vec::new());
                families.len() - 1
            }
        };
        let n = table.f64(row, n_col)?;
        let r = table.f64(row, r_col)?;
        if !(n > 0.0) || !(r > 0.0) {
            return Err(HarnessError::Config(format!(
                "log-log plot needs positive data, got ({n}, {r})"
            )));
        }
        series[idx].push((n.log10(), r.log10()));
    }
    if series.iter().all(|s| s.is_empty()) {
        let mut f = Frame::new((0.0, 1.0), (0.0, 1.0));
        f.axis_labels("system size n", "Trotter number");
        f.no_data();
        return Ok(f.finish("Trotter number by bound family"));
    }
    let all: Vec<(f64, f64)> = series.iter().flatten().copied().collect();
    let x_min = all.iter().map(|p| p.0).fold(f64::MAX, f64::min);
    let x_max = all.iter().map(|p| p.0).fold(f64::MIN, f64::max);
    let y_min = all.iter().map(|p| p.1).fold(f64::MAX, f64::min);
    let y_max = all.iter().map(|p| p.1).fold(f64::MIN, f64::max);
    let mut f = Frame::new((x_min - 0.02, x_max + 0.02), (y_min - 0.2, y_max + 0.2));
    let n_lo = 10f64.powf(x_min).round().max(1.0) as i64;
    let n_hi = 10f64.powf(x_max).round() as i64;
    for n in n_lo..=n_hi {
        let lx = (n as f64).log10();
        if lx >= x_min - 1e-9 && lx <= x_max + 1e-9 {
            f.x_tick(lx, &num_label(n as f64));
        }
    }
    let mut d = y_min.floor() as i64;
    while d as f64 <= y_max + 1.0 {
        if (d as f64) >= y_min - 1.0 {
            f.y_tick(d as f64, &num_label(10f64.powi(d as i32)));
        }
        d += 1;
    }
    let mut legend = Vec::new();
    for (i, fam) in families.iter().enumerate() {
        if series[i].is_empty() {
            continue;
        }
        let color = color_for(fam, i);
        f.series(&series[i], color);
        legend.push((fam.clone(), color));
    }
    f.axis_labels("system size n", "Trotter number");
    f.legend(&legend);
    Ok(f.finish("Trotter number by bound family"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn element_names(svg: &str) -> Vec<String> {
        let mut names = Vec::new();
        let bytes = svg.as_bytes();
        for (i, &b) in bytes.iter().enumerate() {
            if b == b'<' && i + 1 < bytes.len() && bytes[i + 1] != b'/' {
                let rest = &svg[i + 1..];
                let name: String = rest
                    .chars()
                    .take_while(|c| c.is_ascii_alphanumeric() || *c == '-')
                    .collect();
                if !name.is_empty() {
                    names.push(name);
                }
            }
        }
        names
    }

    fn assert_allowed_elements(svg: &str) {
        let allowed = ["svg", "g", "path", "polyline", "text", "line"];
        for name in element_names(svg) {
            assert!(allowed.contains(&name.as_str()), "unexpected element <{name}>");
        }
    }

    #[test]
    fn anneal_plot_uses_allowed_subset() {
        let table = CsvTable::parse(
            Path::new("mem.csv"),
            "iter,mean_cost,mean_best\n0,1.0,1.0\n1,0.8,0.8\n2,0.9,0.8\n",
        )
        .unwrap();
        let svg = render_anneal(&table).unwrap();
        assert_allowed_elements(&svg);
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("iteration"));
        assert!(!svg.contains("no data"));
    }

    #[test]
    fn empty_anneal_plot_reports_no_data() {
        let table = CsvTable::parse(Path::new("mem.csv"), "iter,mean_cost,mean_best\n").unwrap();
        let svg = render_anneal(&table).unwrap();
        assert_allowed_elements(&svg);
        assert!(svg.contains("no data"));
        assert!(svg.contains("<path"));
    }

    #[test]
    fn compare_plot_draws_one_series_per_family_and_skips_capped() {
        let text = "n,family,r_star,capped\n\
                    4,lloyd,100.0,false\n\
                    5,lloyd,200.0,false\n\
                    6,lloyd,,true\n\
                    4,observation,10.0,false\n\
                    5,observation,20.0,false\n";
        let table = CsvTable::parse(Path::new("mem.csv"), text).unwrap();
        let svg = render_compare(&table).unwrap();
        assert_allowed_elements(&svg);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("lloyd"));
        assert!(svg.contains("observation"));
    }

    #[test]
    fn empty_compare_plot_reports_no_data() {
        let table =
            CsvTable::parse(Path::new("mem.csv"), "n,family,r_star,capped\n4,lloyd,,true\n")
                .unwrap();
        let svg = render_compare(&table).unwrap();
        assert!(svg.contains("no data"));
        assert_allowed_elements(&svg);
    }

    #[test]
    fn text_content_is_escaped() {
        let text = "n,family,r_star,capped\n4,a<b&c,10.0,false\n5,a<b&c,12.0,false\n";
        let table = CsvTable::parse(Path::new("mem.csv"), text).unwrap();
        let svg = render_compare(&table).unwrap();
        assert!(svg.contains("a&lt;b&amp;c"));
        assert!(!svg.contains("a<b&c"));
    }

    #[test]
    fn plot_kind_parses() {
        assert_eq!(PlotKind::from_str("anneal").unwrap(), PlotKind::Anneal);
        assert_eq!(PlotKind::from_str("compare").unwrap(), PlotKind::Compare);
        assert!(PlotKind::from_str("pie").is_err());
    }
}
