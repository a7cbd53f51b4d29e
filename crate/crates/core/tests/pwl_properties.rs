use hjhalf_core::random::InstanceGenerator;
use hjhalf_core::{crossings, PiecewiseLinear};

#[test]
fn envelope_is_idempotent_and_below() {
    let mut g = InstanceGenerator::new(99);
    for _ in 0..1000 {
        let h = g.coercive_hamiltonian();
        let env = h.decreasing_envelope().unwrap();
        assert_eq!(env.decreasing_envelope().unwrap().simplified(), env.simplified());
        assert!(env.is_non_increasing());
        for p in g.samples(50, -20.0, 20.0) {
            assert!(env.eval(p) <= h.eval(p) + 1e-12);
        }
    }
}

#[test]
fn csv_round_trip_is_exact() {
    let mut g = InstanceGenerator::new(5);
    for _ in 0..200 {
        let h = g.coercive_hamiltonian();
        assert_eq!(PiecewiseLinear::from_csv_str(&h.to_csv()).unwrap(), h);
    }
}

#[test]
fn crossings_are_roots() {
    let mut g = InstanceGenerator::new(6);
    for _ in 0..300 {
        let (h, f) = (g.coercive_hamiltonian(), g.boundary_flux());
        for p in crossings(&f, &h) {
            let scale = 1.0 + h.eval(p).abs();
            assert!((f.eval(p) - h.eval(p)).abs() <= 1e-9 * scale, "at {p}");
        }
    }
}

#[test]
fn bln_flux_is_continuous_and_anchored() {
    let mut g = InstanceGenerator::new(8);
    for _ in 0..300 {
        let h = g.coercive_hamiltonian();
        let p0 = g.uniform(-6.0, 6.0);
        let f = h.bln_flux(p0).unwrap();
        assert!(f.is_non_increasing(), "p0 = {p0}\nH = {h:?}\nF = {f:?}");
        assert!((f.eval(p0) - h.eval(p0)).abs() <= 1e-12);
        for &x in f.xs() {
            assert!((f.eval(x - 1e-12) - f.eval(x + 1e-12)).abs() <= 1e-9);
        }
    }
}
