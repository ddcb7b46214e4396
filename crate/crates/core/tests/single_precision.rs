use polyconn::geom::{NormSpec, Point, Polyline};
use polyconn::obstacle::{AaBox, Instance, Obstacle, TolerancePolicy};
use polyconn::reroute::assemble_route;
use polyconn::verify::verify_route;

fn pt(c: &[f32]) -> Point<f32> {
    Point::new(c.to_vec()).unwrap()
}

#[test]
fn routes_in_f32() {
    let tol = TolerancePolicy {
        class_eps: 1e-4,
        t_eps: 1e-5,
        sep: 1e-3,
    };
    let u = AaBox::new(pt(&[-10.0, -10.0]), pt(&[10.0, 10.0])).unwrap();
    for norm in [NormSpec::P(2.0), NormSpec::P(3.0), NormSpec::Max] {
        let obs = vec![
            Obstacle::ball(0, pt(&[0.0, 0.0]), 1.0),
            Obstacle::ball(1, pt(&[4.0, 0.5]), 1.5),
        ];
        let inst = Instance::new(norm, u.clone(), obs, tol).unwrap();
        let p = Polyline::new(vec![pt(&[-3.0, 0.1]), pt(&[2.0, -0.2]), pt(&[8.0, 0.3])]).unwrap();
        let r = assemble_route(p.first(), p.last(), &p, &inst).unwrap();
        assert!(!r.is_untouched());
        assert_eq!(r.path.first(), p.first());
        assert_eq!(r.path.last(), p.last());
        assert!(verify_route(&r.path, &inst, 0.01).unwrap().pass);
    }
}
