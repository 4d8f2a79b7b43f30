use causal_tunnel_demo::{pair_curve, profiles, Scatter};

#[test]
fn profiles_share_the_grid() {
    let p = profiles(false, 256, 2.5, 1.0).unwrap();
    assert_eq!(p.x.len(), 256);
    for v in [&p.barrier, &p.intervention, &p.packet, &p.intervened] {
        assert_eq!(v.len(), 256);
    }
    let dx = p.x[1] - p.x[0];
    let norm: f64 = p.intervened.iter().sum::<f64>() * dx;
    assert!((norm - 1.0).abs() < 1e-10, "{norm}");
    assert!(p.leakage < 1e-3);
}

#[test]
fn scatter_difference_stays_in_the_cone() {
    // Beyond the barrier and short of the wrapped cone image near x = 24.5.
    for kg in [false, true] {
        let mut s = Scatter::new(kg, 256, 2.5, 1e3, 2e-3).unwrap();
        s.advance(5000);
        assert!((s.time() - 10.0).abs() < 1e-12);
        let (rho, rho_t) = s.densities().unwrap();
        let (_, hi) = s.cone();
        let x = s.positions();
        let edge = causal_tunnel_demo::demo_barrier(&causal_tunnel::Lattice::new(50.0, 256).unwrap(), 2.5).right_edge();
        let diff: Vec<f64> = rho.iter().zip(&rho_t).map(|(a, b)| (a - b).abs()).collect();
        let outside = x
            .iter()
            .zip(&diff)
            .filter(|(x, _)| **x > hi.max(edge) && **x < 20.0)
            .map(|(_, d)| *d)
            .fold(0.0, f64::max);
        let inside = diff.iter().copied().fold(0.0, f64::max);
        assert!(inside > 1e-3, "{inside}");
        assert!(outside < 1e-4 * inside, "{outside} vs {inside}");
    }
}

#[test]
fn pair_curve_grows_above_threshold_only() {
    let klein = pair_curve(false, 2.5, 4.0, 4).unwrap();
    assert_eq!(klein.len(), 5);
    assert_eq!(klein[0], (0.0, 0.0));
    assert!((klein[4].0 - 4.0).abs() < 1e-12);
    assert!(klein[4].1 > 1e-2, "{:?}", klein);
    let free = pair_curve(false, 0.0, 2.0, 2).unwrap();
    assert!(free.iter().all(|(_, n)| n.abs() < 1e-10), "{:?}", free);
}
