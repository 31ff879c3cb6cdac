//! SVG and TikZ drawings of snake graphs and triangulations.

use std::fmt::Write;

use crate::snake::SnakeGraph;
use crate::surface::{Edge, Triangulation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Svg,
    Tikz,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "svg" => Ok(Format::Svg),
            "tikz" => Ok(Format::Tikz),
            _ => Err(format!("unknown format {:?} (expected svg or tikz)", s)),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Style {
    Plain,
    Highlight,
    Extra,
}

struct Scene {
    segments: Vec<((f64, f64), (f64, f64), Style, Option<String>)>,
    texts: Vec<((f64, f64), String)>,
}

impl Scene {
    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut pts = self.segments.iter().flat_map(|(a, b, _, _)| [*a, *b]).chain(self.texts.iter().map(|(p, _)| *p));
        let Some(first) = pts.next() else {
            return (0.0, 0.0, 0.0, 0.0);
        };
        pts.fold((first.0, first.1, first.0, first.1), |(x0, y0, x1, y1), (x, y)| {
            (x0.min(x), y0.min(y), x1.max(x), y1.max(y))
        })
    }
}

fn graph_scene(g: &SnakeGraph, labels: &dyn Fn(usize) -> String) -> Scene {
    let mut scene = Scene { segments: Vec::new(), texts: Vec::new() };
    for (i, e) in g.edges.iter().enumerate() {
        let style = if g.minimal.contains(&i) {
            Style::Highlight
        } else if g.extra_edge == Some(i) {
            Style::Extra
        } else {
            Style::Plain
        };
        scene.segments.push((g.points[e.a], g.points[e.b], style, Some(labels(i))));
    }
    for t in &g.tiles {
        let (sx, sy) = t.corners.iter().fold((0.0, 0.0), |(x, y), &c| (x + g.points[c].0, y + g.points[c].1));
        scene.texts.push(((sx / 4.0, sy / 4.0), format!("{}", t.diagonal + 1)));
    }
    scene
}

/// Draws the graph with the minimal matching in bold and the extra edge
/// dashed. Edge labels come from `labels`.
pub fn render_graph(g: &SnakeGraph, labels: &dyn Fn(usize) -> String, format: Format) -> String {
    emit(&graph_scene(g, labels), format)
}

/// Schematic picture of a triangulation: its triangles side by side with
/// their edge labels.
pub fn render_triangulation(t: &Triangulation, format: Format) -> String {
    let mut scene = Scene { segments: Vec::new(), texts: Vec::new() };
    let h = 3f64.sqrt() / 2.0;
    for (i, tri) in t.triangles.iter().enumerate() {
        let ox = 1.5 * i as f64;
        let corners = [(ox, 0.0), (ox + 1.0, 0.0), (ox + 0.5, h)];
        for (p, e) in tri.iter().enumerate() {
            let style = match e {
                Edge::Arc(a) if Some(*a) == t.tau_n => Style::Highlight,
                Edge::Arc(_) => Style::Plain,
                Edge::Boundary(_) => Style::Extra,
            };
            scene.segments.push((corners[p], corners[(p + 1) % 3], style, Some(t.label(*e).to_string())));
        }
        let tag = if t.basepoint_triangle == Some(i) { format!("Δ{} •", i) } else { format!("Δ{}", i) };
        scene.texts.push(((ox + 0.5, h / 3.0), tag));
    }
    emit(&scene, format)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn emit(scene: &Scene, format: Format) -> String {
    match format {
        Format::Svg => svg(scene),
        Format::Tikz => tikz(scene),
    }
}

const SCALE: f64 = 60.0;
const MARGIN: f64 = 20.0;

fn svg(scene: &Scene) -> String {
    let (x0, y0, x1, y1) = scene.bounds();
    let w = (x1 - x0) * SCALE + 2.0 * MARGIN;
    let h = (y1 - y0) * SCALE + 2.0 * MARGIN;
    let tx = |x: f64| (x - x0) * SCALE + MARGIN;
    let ty = |y: f64| (y1 - y) * SCALE + MARGIN;
    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.1}\" height=\"{:.1}\" viewBox=\"0 0 {:.1} {:.1}\">",
        w, h, w, h
    )
    .unwrap();
    for (a, b, style, label) in &scene.segments {
        let attrs = match style {
            Style::Plain => "stroke=\"black\" stroke-width=\"1.5\"",
            Style::Highlight => "stroke=\"crimson\" stroke-width=\"4\"",
            Style::Extra => "stroke=\"black\" stroke-width=\"1.5\" stroke-dasharray=\"5,3\"",
        };
        writeln!(
            out,
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" {}/>",
            tx(a.0),
            ty(a.1),
            tx(b.0),
            ty(b.1),
            attrs
        )
        .unwrap();
        if let Some(l) = label {
            writeln!(
                out,
                "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" fill=\"steelblue\" text-anchor=\"middle\">{}</text>",
                tx((a.0 + b.0) / 2.0),
                ty((a.1 + b.1) / 2.0) - 3.0,
                escape(l)
            )
            .unwrap();
        }
    }
    for (p, s) in &scene.texts {
        writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
            tx(p.0),
            ty(p.1) + 5.0,
            escape(s)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn tikz(scene: &Scene) -> String {
    let mut out = String::from("\\begin{tikzpicture}[scale=1.2]\n");
    for (a, b, style, label) in &scene.segments {
        let opts = match style {
            Style::Plain => "thin",
            Style::Highlight => "red, line width=2pt",
            Style::Extra => "dashed",
        };
        let node = match label {
            Some(l) => format!(" node[midway, above, font=\\tiny, blue] {{{}}}", l),
            None => String::new(),
        };
        writeln!(out, "  \\draw[{}] ({:.3},{:.3}) --{} ({:.3},{:.3});", opts, a.0, a.1, node, b.0, b.1).unwrap();
    }
    for (p, s) in &scene.texts {
        writeln!(out, "  \\node at ({:.3},{:.3}) {{{}}};", p.0, p.1, s.replace('•', "$\\bullet$").replace('Δ', "$\\Delta$")).unwrap();
    }
    out.push_str("\\end{tikzpicture}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::running;
    use crate::snake::{build_orbit_graph, build_snake};
    use crate::surface::{ArcSpec, OrbitSpec};

    fn arc(cross: &[&str], bp: bool) -> ArcSpec {
        ArcSpec { cross: cross.iter().map(|s| s.to_string()).collect(), hints: None, to_basepoint: bp }
    }

    #[test]
    fn one_tile_is_a_four_cycle() {
        let t = running();
        let g = build_snake(&t, &t.validate_arc(&arc(&["4"], false)).unwrap()).unwrap();
        let svg = render_graph(&g, &|e| g.edges[e].label.render(&t), Format::Svg);
        assert_eq!(svg.matches("<line").count(), 4);
        let tikz = render_graph(&g, &|e| g.edges[e].label.render(&t), Format::Tikz);
        assert_eq!(tikz.matches("\\draw").count(), 4);
        assert_eq!(tikz.matches("line width").count(), 2);
    }

    #[test]
    fn empty_graph_draws_nothing() {
        let g = SnakeGraph {
            points: vec![],
            edges: vec![],
            tiles: vec![],
            extra_edge: None,
            crossings: vec![],
            minimal: vec![],
            exempt: None,
            rank: 0,
        };
        let s = render_graph(&g, &|_| String::new(), Format::Svg);
        assert!(s.starts_with("<svg") && !s.contains("<line"));
        assert!(render_graph(&g, &|_| String::new(), Format::Tikz).contains("tikzpicture"));
    }

    #[test]
    fn orbit_graph_shows_extra_edge() {
        let t = running();
        let o = t
            .orbit_from_spec(&OrbitSpec { kind: "Two".into(), gamma1: arc(&["4", "5"], true), gamma2: Some(arc(&["1", "3", "4", "5"], true)) })
            .unwrap();
        let g = build_orbit_graph(&t, &o).unwrap();
        let a = render_graph(&g, &|e| g.edges[e].label.render(&t), Format::Svg);
        assert_eq!(a, render_graph(&g, &|e| g.edges[e].label.render(&t), Format::Svg));
        assert!(a.contains("stroke-dasharray"));
        assert!(render_triangulation(&t, Format::Tikz).contains("$\\bullet$"));
    }
}
