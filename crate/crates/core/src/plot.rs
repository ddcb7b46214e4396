//! Deterministic SVG rendering of planar scenes.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geom::{NormSpec, Point, Polyline};
use crate::obstacle::{Instance, Shape};
use crate::reroute::{Piece, PieceTag};

const WIDTH: f64 = 800.0;
const OUTLINE_SAMPLES: usize = 256;

/// Renders the region, the obstacles, an optional input polyline (gray) and
/// an optional route. Collar detours are overlaid in red.
pub fn render_svg(
    inst: &Instance<f64>,
    input: Option<&Polyline<f64>>,
    route: Option<(&Polyline<f64>, &[Piece])>,
) -> Result<String> {
    if inst.dim != 2 {
        return Err(Error::Unsupported(format!(
            "plots need d = 2, instance has d = {}",
            inst.dim
        )));
    }
    let (x0, y0) = (inst.region.lo[0], inst.region.lo[1]);
    let (w, h) = (inst.region.hi[0] - x0, inst.region.hi[1] - y0);
    let pad = 0.02 * w.max(h);
    let sw = w.max(h) / 400.0;
    // Flip y.
    let fy = |y: f64| 0.0 - y;

    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.6}" height="{:.6}" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        WIDTH,
        WIDTH * (h + 2.0 * pad) / (w + 2.0 * pad),
        x0 - pad,
        fy(y0 + h) - pad,
        w + 2.0 * pad,
        h + 2.0 * pad
    )
    .unwrap();
    writeln!(
        s,
        r##"<rect class="region" x="{:.6}" y="{:.6}" width="{:.6}" height="{:.6}" fill="none" stroke="#000000" stroke-width="{:.6}"/>"##,
        x0,
        fy(y0 + h),
        w,
        h,
        sw
    )
    .unwrap();

    for ob in &inst.obstacles {
        let style = format!(r##"fill="#d0d0d0" stroke="#404040" stroke-width="{sw:.6}""##);
        match &ob.shape {
            Shape::Ball { center, radius } if inst.norm.is_euclidean() => {
                writeln!(
                    s,
                    r#"<circle class="obstacle" data-id="{}" cx="{:.6}" cy="{:.6}" r="{:.6}" {style}/>"#,
                    ob.id,
                    center[0],
                    fy(center[1]),
                    radius
                )
                .unwrap();
            }
            Shape::Ball { center, radius } => {
                let d = outline(center, *radius, &inst.norm);
                writeln!(
                    s,
                    r#"<path class="obstacle" data-id="{}" d="{d}" {style}/>"#,
                    ob.id
                )
                .unwrap();
            }
            Shape::Box(b) => {
                writeln!(
                    s,
                    r#"<rect class="obstacle" data-id="{}" x="{:.6}" y="{:.6}" width="{:.6}" height="{:.6}" {style}/>"#,
                    ob.id,
                    b.lo[0],
                    fy(b.hi[1]),
                    b.hi[0] - b.lo[0],
                    b.hi[1] - b.lo[1]
                )
                .unwrap();
            }
        }
    }

    if let Some(p) = input {
        writeln!(
            s,
            r##"<path class="input" d="{}" fill="none" stroke="#909090" stroke-width="{:.6}" stroke-dasharray="{:.6}"/>"##,
            path_data(p.vertices()),
            sw,
            4.0 * sw
        )
        .unwrap();
    }
    if let Some((r, pieces)) = route {
        writeln!(
            s,
            r##"<path class="route" d="{}" fill="none" stroke="#1f4fbf" stroke-width="{:.6}"/>"##,
            path_data(r.vertices()),
            1.5 * sw
        )
        .unwrap();
        for p in pieces {
            if let PieceTag::CollarArc { obstacle, .. } = p.tag {
                let v = r
                    .vertices()
                    .get(p.start..=p.end)
                    .ok_or_else(|| Error::Input("route piece indices out of range".into()))?;
                writeln!(
                    s,
                    r##"<path class="collar" data-obstacle="{obstacle}" d="{}" fill="none" stroke="#d01010" stroke-width="{:.6}"/>"##,
                    path_data(v),
                    1.5 * sw
                )
                .unwrap();
            }
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn path_data(v: &[Point<f64>]) -> String {
    let mut d = String::new();
    for (i, p) in v.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        if i > 0 {
            d.push(' ');
        }
        write!(d, "{cmd}{:.6},{:.6}", p[0], 0.0 - p[1]).unwrap();
    }
    d
}

fn outline(c: &Point<f64>, r: f64, norm: &NormSpec<f64>) -> String {
    let pts: Vec<Point<f64>> = (0..OUTLINE_SAMPLES)
        .map(|k| {
            let a = std::f64::consts::TAU * k as f64 / OUTLINE_SAMPLES as f64;
            let u = Point::raw(vec![a.cos(), a.sin()]);
            c.add_scaled(&u, r / norm.of(&u))
        })
        .collect();
    let mut d = path_data(&pts);
    d.push_str(" Z");
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::obstacle::{AaBox, Obstacle, TolerancePolicy};
    use crate::reroute::assemble_route;

    fn pt(c: &[f64]) -> Point<f64> {
        Point::new(c.to_vec()).unwrap()
    }

    fn inst(obs: Vec<Obstacle<f64>>) -> Instance<f64> {
        let u = AaBox::new(pt(&[-10.0, -10.0]), pt(&[10.0, 10.0])).unwrap();
        Instance::new(NormSpec::euclidean(), u, obs, TolerancePolicy::default()).unwrap()
    }

    #[test]
    fn empty_scene_has_only_region() {
        let s = render_svg(&inst(vec![]), None, None).unwrap();
        assert_eq!(s.matches("<rect").count(), 1);
        assert!(!s.contains("<circle") && !s.contains("<path"));
    }

    #[test]
    fn one_ball_with_route() {
        let i = inst(vec![Obstacle::ball(0, pt(&[0.0, 0.0]), 1.0)]);
        let p = Polyline::new(vec![pt(&[-3.0, 0.0]), pt(&[3.0, 0.0])]).unwrap();
        let r = assemble_route(p.first(), p.last(), &p, &i).unwrap();
        let s = render_svg(&i, Some(&p), Some((&r.path, &r.pieces))).unwrap();
        assert_eq!(s.matches("<circle").count(), 1);
        let route = s.lines().find(|l| l.contains(r#"class="route""#)).unwrap();
        assert!(route.matches('L').count() >= 3);
        assert!(s.contains(r#"class="collar""#));
        assert_eq!(
            s,
            render_svg(&i, Some(&p), Some((&r.path, &r.pieces))).unwrap()
        );
    }

    #[test]
    fn non_planar_rejected() {
        let u = AaBox::new(pt(&[-1.0, -1.0, -1.0]), pt(&[1.0, 1.0, 1.0])).unwrap();
        let i =
            Instance::new(NormSpec::euclidean(), u, vec![], TolerancePolicy::default()).unwrap();
        assert!(matches!(
            render_svg(&i, None, None),
            Err(Error::Unsupported(_))
        ));
    }
}
