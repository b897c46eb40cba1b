//! Deterministic SVG barcode rendering: one panel per barcode, bars
//! ordered by birth, extension baselines highlighted and offsets
//! dashed.

use std::collections::BTreeMap;
use std::fmt::Write;

use barbridge_core::persistence::PersistenceResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mark {
    Plain,
    Baseline,
    Offset,
}

pub struct Panel<'a> {
    pub title: String,
    pub res: &'a PersistenceResult,
    /// Marks by bar id; unmarked bars render plain.
    pub marks: BTreeMap<usize, Mark>,
}

const PANEL_W: f64 = 360.0;
const MARGIN: f64 = 36.0;
const BAR_H: f64 = 5.0;
const BAR_GAP: f64 = 5.0;
const HEADER: f64 = 40.0;

fn fmt(x: f64) -> String {
    format!("{x:.3}")
}

pub fn render(panels: &[Panel]) -> String {
    let max_bars = panels
        .iter()
        .map(|p| p.res.bars().len())
        .max()
        .unwrap_or(0)
        .max(1);
    let height = HEADER + max_bars as f64 * (BAR_H + BAR_GAP) + MARGIN;
    let width = MARGIN + panels.len() as f64 * (PANEL_W + MARGIN);
    let mut s = String::new();
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        fmt(width),
        fmt(height),
        fmt(width),
        fmt(height)
    );
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");
    for (i, panel) in panels.iter().enumerate() {
        let x0 = MARGIN + i as f64 * (PANEL_W + MARGIN);
        render_panel(&mut s, panel, x0, height);
    }
    s.push_str("</svg>\n");
    s
}

fn render_panel(s: &mut String, panel: &Panel, x0: f64, height: f64) {
    let res = panel.res;
    let values = res.scale().values();
    let lo = values.first().copied().unwrap_or(0.0).min(0.0);
    let hi = values.last().copied().unwrap_or(1.0);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let to_x = |v: f64| x0 + (v - lo) / span * (PANEL_W * 0.92);
    let right = x0 + PANEL_W;
    let _ = write!(
        s,
        "<text x=\"{}\" y=\"20\" font-family=\"monospace\" font-size=\"13\">{}</text>\n",
        fmt(x0),
        panel.title
    );
    let _ = write!(
        s,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#888888\" stroke-width=\"1\"/>\n",
        fmt(x0),
        fmt(height - MARGIN),
        fmt(right),
        fmt(height - MARGIN)
    );
    // Bars sorted by (birth, dim, id).
    let mut bars: Vec<_> = res.bars().iter().collect();
    bars.sort_by_key(|b| (b.birth, b.dim, b.id));
    for (row, bar) in bars.iter().enumerate() {
        let y = HEADER + row as f64 * (BAR_H + BAR_GAP);
        let xb = to_x(res.scale().value(bar.birth).unwrap());
        let xd = res.scale().value(bar.death).map(to_x).unwrap_or(right);
        let mark = panel.marks.get(&bar.id).copied().unwrap_or(Mark::Plain);
        let (stroke, dash) = match mark {
            Mark::Plain => ("#4a6fa5", ""),
            Mark::Baseline => ("#d1495b", ""),
            Mark::Offset => ("#e8a33d", " stroke-dasharray=\"4 3\""),
        };
        let _ = write!(
            s,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"{}\"{}><title>bar {} dim {}</title></line>\n",
            fmt(xb),
            fmt(y),
            fmt(xd.max(xb + 1.0)),
            fmt(y),
            stroke,
            fmt(BAR_H),
            dash,
            bar.id,
            bar.dim
        );
    }
}
