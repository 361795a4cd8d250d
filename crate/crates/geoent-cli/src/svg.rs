//! Hand-emitted SVG line chart: fixed 800x600 viewBox, linear axes, legend,
//! 6-significant-digit tick labels. No plotting dependency, so the bytes are
//! a pure function of the data and stable across runs.

use geoent::symmetric::{Fig2Row, FamilyKind};
use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 630.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 540.0;

const PALETTE: [&str; 6] = [
    "#2e7d32", "#c62828", "#1565c0", "#8e24aa", "#ef6c00", "#00838f",
];

fn format_sig6(value: f64) -> String {
    if value == 0.0 {
        return "0.00000".into();
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{value:.decimals$}")
}

fn x_pos(q: f64, qmin: f64, qmax: f64) -> f64 {
    if qmax == qmin {
        (LEFT + RIGHT) / 2.0
    } else {
        LEFT + (q - qmin) / (qmax - qmin) * (RIGHT - LEFT)
    }
}

fn y_pos(v: f64) -> f64 {
    BOTTOM - v.clamp(0.0, 1.0) * (BOTTOM - TOP)
}

pub fn line_chart(rows: &[Fig2Row], families: &[FamilyKind], qmin: usize, qmax: usize) -> String {
    let (fmin, fmax) = (qmin as f64, qmax as f64);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"monospace\" font-size=\"14\">"
    );
    let _ = writeln!(out, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"28\" text-anchor=\"middle\" font-size=\"18\">entanglement vs q</text>",
        (LEFT + RIGHT) / 2.0
    );

    // Axes.
    let _ = writeln!(
        out,
        "<line x1=\"{LEFT:.2}\" y1=\"{BOTTOM:.2}\" x2=\"{RIGHT:.2}\" y2=\"{BOTTOM:.2}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        out,
        "<line x1=\"{LEFT:.2}\" y1=\"{TOP:.2}\" x2=\"{LEFT:.2}\" y2=\"{BOTTOM:.2}\" stroke=\"black\"/>"
    );

    // y ticks at 0, 0.2, ..., 1.
    for i in 0..=5 {
        let v = i as f64 * 0.2;
        let y = y_pos(v);
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{LEFT:.2}\" y2=\"{y:.2}\" stroke=\"black\"/>",
            LEFT - 6.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            LEFT - 10.0,
            y + 5.0,
            format_sig6(v)
        );
    }

    // x ticks at integer q, thinned if the span is wide.
    let span = qmax - qmin;
    let stride = (span / 12).max(1);
    let mut q = qmin;
    while q <= qmax {
        let x = x_pos(q as f64, fmin, fmax);
        let _ = writeln!(
            out,
            "<line x1=\"{x:.2}\" y1=\"{BOTTOM:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            BOTTOM + 6.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{q}</text>",
            BOTTOM + 24.0
        );
        q += stride;
    }
    let _ = writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">q</text>",
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 48.0
    );
    let _ = writeln!(
        out,
        "<text x=\"24\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 24 {:.2})\">entanglement</text>",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );

    // One polyline per family, colors in series order.
    for (idx, kind) in families.iter().enumerate() {
        let label = kind.label();
        let color = PALETTE[idx % PALETTE.len()];
        let points: Vec<String> = rows
            .iter()
            .filter(|row| row.family == label)
            .map(|row| {
                format!(
                    "{:.2},{:.2}",
                    x_pos(row.q as f64, fmin, fmax),
                    y_pos(row.entanglement)
                )
            })
            .collect();
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>",
            points.join(" ")
        );
        let ly = TOP + 20.0 + idx as f64 * 24.0;
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            RIGHT + 16.0,
            RIGHT + 46.0
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\">{label}</text>",
            RIGHT + 52.0,
            ly + 5.0
        );
    }
    out.push_str("</svg>\n");
    out
}
