//! Self-contained SVG rendering for small automata and scatter plots.
//!
//! States are laid out in columns by BFS depth from the initial state and
//! filled on the same log-scaled significance gradient the DOT export uses.
//! Good for demo-sized automata; callers should cap the state count.

use std::fmt::Write as _;

use apnfa_core::dot::{heat, heat_color};
use apnfa_core::labelling::Labeling;
use apnfa_core::nfa::Nfa;

const NODE_R: f64 = 16.0;
const COL_GAP: f64 = 110.0;
const ROW_GAP: f64 = 64.0;
const MARGIN: f64 = 40.0;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Shorten a byte-class label for an edge.
fn class_label(class: &apnfa_core::ByteClass) -> String {
    let printable: Vec<u8> = class.iter().take(5).collect();
    if class.len() >= 200 {
        return "*".to_string();
    }
    if printable.len() as u32 == class.len() && printable.iter().all(|b| b.is_ascii_graphic()) {
        let chars: String = printable.iter().map(|&b| b as char).collect();
        return chars;
    }
    let spec = class.to_string();
    if spec.len() > 14 {
        format!("{}…", &spec[..13])
    } else {
        spec
    }
}

/// Renders the automaton as a standalone SVG element.
pub fn render_nfa(nfa: &Nfa, labeling: Option<&Labeling>) -> String {
    let n = nfa.num_states();
    let depths = nfa.bfs_depths();
    let max_depth = depths.iter().flatten().copied().max().unwrap_or(0) as usize;
    // unreachable states go to one extra column
    let column = |q: usize| depths[q].map_or(max_depth + 1, |d| d as usize);
    let mut columns: Vec<Vec<usize>> = vec![Vec::new(); max_depth + 2];
    for q in 0..n {
        columns[column(q)].push(q);
    }
    let tallest = columns.iter().map(Vec::len).max().unwrap_or(1);
    let width = MARGIN * 2.0 + COL_GAP * (columns.len().saturating_sub(1)) as f64;
    let height = MARGIN * 2.0 + ROW_GAP * tallest.saturating_sub(1) as f64;

    let mut pos = vec![(0.0f64, 0.0f64); n];
    for (c, states) in columns.iter().enumerate() {
        let x = MARGIN + c as f64 * COL_GAP;
        let y0 = (height - ROW_GAP * states.len().saturating_sub(1) as f64) / 2.0;
        for (r, &q) in states.iter().enumerate() {
            pos[q] = (x, y0 + r as f64 * ROW_GAP);
        }
    }

    let max_count = labeling.map_or(0, |l| l.counts().iter().copied().max().unwrap_or(0));
    let mut svg = String::new();
    write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width:.0} {height:.0}\" \
         font-family=\"monospace\" font-size=\"11\">"
    )
    .unwrap();
    svg.push_str(
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" \
         markerWidth=\"6\" markerHeight=\"6\" orient=\"auto-start-reverse\">\
         <path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#555\"/></marker></defs>",
    );

    // edges under nodes
    for (src, dst, class) in nfa.transitions() {
        let label = escape(&class_label(class));
        let (x1, y1) = pos[src];
        let (x2, y2) = pos[dst];
        if src == dst {
            write!(
                svg,
                "<path d=\"M {sx:.1} {sy:.1} C {c1x:.1} {c1y:.1}, {c2x:.1} {c2y:.1}, {ex:.1} {ey:.1}\" \
                 fill=\"none\" stroke=\"#555\" marker-end=\"url(#arrow)\"/>\
                 <text x=\"{tx:.1}\" y=\"{ty:.1}\" text-anchor=\"middle\" fill=\"#333\">{label}</text>",
                sx = x1 - NODE_R * 0.5,
                sy = y1 - NODE_R * 0.87,
                c1x = x1 - NODE_R * 1.8,
                c1y = y1 - NODE_R * 2.8,
                c2x = x1 + NODE_R * 1.8,
                c2y = y1 - NODE_R * 2.8,
                ex = x1 + NODE_R * 0.5,
                ey = y1 - NODE_R * 0.87,
                tx = x1,
                ty = y1 - NODE_R * 2.6,
            )
            .unwrap();
        } else {
            // straight edge shortened to the node borders, slight curve for
            // backward edges
            let (dx, dy) = (x2 - x1, y2 - y1);
            let len = (dx * dx + dy * dy).sqrt().max(1.0);
            let (ux, uy) = (dx / len, dy / len);
            let (sx, sy) = (x1 + ux * NODE_R, y1 + uy * NODE_R);
            let (ex, ey) = (x2 - ux * NODE_R, y2 - uy * NODE_R);
            let bend = if x2 < x1 || (x2 - x1).abs() < 1.0 {
                28.0
            } else {
                10.0
            };
            let (mx, my) = ((sx + ex) / 2.0 - uy * bend, (sy + ey) / 2.0 + ux * bend);
            write!(
                svg,
                "<path d=\"M {sx:.1} {sy:.1} Q {mx:.1} {my:.1} {ex:.1} {ey:.1}\" \
                 fill=\"none\" stroke=\"#555\" marker-end=\"url(#arrow)\"/>\
                 <text x=\"{lx:.1}\" y=\"{ly:.1}\" text-anchor=\"middle\" fill=\"#333\">{label}</text>",
                lx = mx,
                ly = my - 4.0,
            )
            .unwrap();
        }
    }

    // initial-state marker
    let (ix, iy) = pos[nfa.initial()];
    write!(
        svg,
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#555\" \
         marker-end=\"url(#arrow)\"/>",
        ix - NODE_R - 26.0,
        iy,
        ix - NODE_R - 2.0,
        iy
    )
    .unwrap();

    for (q, &(x, y)) in pos.iter().enumerate() {
        let fill = match labeling {
            Some(l) => heat_color(heat(l.count_of(q), max_count)),
            None => "#e8e8e8".to_string(),
        };
        let title = match labeling {
            Some(l) => format!("q{q}: significance {}", l.count_of(q)),
            None => format!("q{q}"),
        };
        write!(
            svg,
            "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"{NODE_R}\" fill=\"{fill}\" \
             stroke=\"#222\"><title>{title}</title></circle>"
        )
        .unwrap();
        if nfa.is_final(q) {
            write!(
                svg,
                "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"{:.1}\" fill=\"none\" stroke=\"#222\"/>",
                NODE_R - 3.5
            )
            .unwrap();
        }
        write!(
            svg,
            "<text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">q{q}</text>",
            y + 4.0
        )
        .unwrap();
    }
    svg.push_str("</svg>");
    svg
}

/// Scatter plot of candidates on (cost, acceptance probability); frontier
/// points are highlighted.
pub fn render_scatter(points: &[(String, f64, f64, bool)]) -> String {
    const W: f64 = 460.0;
    const H: f64 = 320.0;
    const PAD: f64 = 48.0;
    let max_cost = points.iter().map(|p| p.1).fold(1.0f64, f64::max);
    let mut svg = String::new();
    write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W} {H}\" \
         font-family=\"monospace\" font-size=\"11\">"
    )
    .unwrap();
    write!(
        svg,
        "<line x1=\"{PAD}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#333\"/>\
         <line x1=\"{PAD}\" y1=\"{:.1}\" x2=\"{PAD}\" y2=\"{:.1}\" stroke=\"#333\"/>\
         <text x=\"{:.1}\" y=\"{:.1}\">cost (LUTs)</text>\
         <text x=\"6\" y=\"{:.1}\">prob</text>",
        H - PAD,
        W - 10.0,
        H - PAD,
        H - PAD,
        10.0,
        W / 2.0 - 30.0,
        H - 12.0,
        PAD - 24.0,
    )
    .unwrap();
    for (id, cost, prob, on_frontier) in points {
        let x = PAD + (cost / max_cost) * (W - PAD - 20.0);
        let y = (H - PAD) - prob * (H - PAD - 20.0);
        let (fill, r) = if *on_frontier {
            ("#d62728", 5.0)
        } else {
            ("#9aa0a6", 3.5)
        };
        write!(
            svg,
            "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"{r}\" fill=\"{fill}\">\
             <title>{}: {cost:.1} LUTs, prob {prob:.4}</title></circle>",
            escape(id)
        )
        .unwrap();
    }
    svg.push_str("</svg>");
    svg
}
