use super::*;
use crate::domain::{lp_norm, BallSpec};
use crate::math::log2;

fn linear_data(dom: &GridDomain, n: usize) -> Field {
    let mut g = Field::vector(dom, n);
    g.set_boundary_fn(dom, |x, o| {
        for (j, oj) in o.iter_mut().enumerate() {
            *oj = (j + 1) as f64 + x[j % x.len()];
        }
    });
    g
}

#[test]
fn zero_potential_reproduces_linear_data() {
    let dom = GridDomain::ball(3, 17).unwrap();
    let g = linear_data(&dom, 2);
    let s = solve_direct(&dom, &AntisymmetricPotential::zero(&dom, 2), &g, 1e-12).unwrap();
    assert_eq!(s.source, StateSource::Direct);
    for i in 0..dom.num_interior() {
        let x = dom.coords(i);
        assert!((s.v.node(i)[0] - 1.0 - x[0]).abs() < 1e-9);
        assert!((s.v.node(i)[1] - 2.0 - x[1]).abs() < 1e-9);
    }
}

#[test]
fn manufactured_family_solves_the_system() {
    // oracle: fourth-order central differences of the closed form, independent
    // of the grid operators
    let mf = Manufactured::new(&[0.6, 0.0, 0.8], &[0.0, 1.0, 0.0]).unwrap();
    assert_eq!(mf.k_dot_l(), 0.0);
    let mf = Manufactured::new(&[0.6, 0.8, 0.0], &[0.8, 0.0, 0.6]).unwrap();
    let om = mf.omega_matrix();
    let e = 1e-2;
    for x in [[0.1, -0.3, 0.2], [0.5, 0.2, -0.4], [0.0, 0.0, 0.0]] {
        let mut lap = [0.0; 2];
        for d in 0..3 {
            let at = |t: f64| {
                let mut y = x;
                y[d] += t;
                mf.value(&y)
            };
            let (p2, p1, c, m1, m2) = (at(2.0 * e), at(e), at(0.0), at(-e), at(-2.0 * e));
            for j in 0..2 {
                lap[j] +=
                    (-p2[j] + 16.0 * p1[j] - 30.0 * c[j] + 16.0 * m1[j] - m2[j]) / (12.0 * e * e);
            }
        }
        let v = mf.value(&x);
        let ov = om.mul_vec(&v);
        for j in 0..2 {
            assert!((lap[j] + ov[j]).abs() < 1e-7, "{x:?}: {lap:?} vs {ov:?}");
        }
    }
    assert!(Manufactured::new(&[1.0, 0.0], &[0.0, 2.0]).is_err());
}

#[test]
fn manufactured_solution_converges_at_second_order() {
    let mf = Manufactured::new(&[0.6, 0.8, 0.0], &[0.8, 0.0, 0.6]).unwrap();
    let mut errs = Vec::new();
    for n in [9, 17, 33] {
        let dom = GridDomain::ball(3, n).unwrap();
        let exact = mf.field(&dom);
        let om = mf.potential(&dom).unwrap();
        let s = solve_direct(&dom, &om, &exact, 1e-12).unwrap();
        errs.push(relative_l2(&dom, &s.v, &exact));
    }
    for w in errs.windows(2) {
        let order = log2(w[0] / w[1]);
        assert!(order >= 1.8, "errors {errs:?}");
    }
}

#[test]
fn direct_solve_is_linear_in_the_data() {
    let dom = GridDomain::ball(3, 17).unwrap();
    let om = AntisymmetricPotential::random(&dom, 3, 5, 0.3, 2).unwrap();
    let tol = 1e-10;
    let g = linear_data(&dom, 3);
    let v1 = solve_direct(&dom, &om, &g, tol).unwrap().v;
    let v2 = solve_direct(&dom, &om, &g.scaled(2.0), tol).unwrap().v;
    let d = lp_norm(&dom, &v2.sub(&v1.scaled(2.0)), 2.0, BallSpec::Whole).unwrap();
    let s = lp_norm(&dom, &v2, 2.0, BallSpec::Whole).unwrap();
    assert!(d <= 10.0 * tol * s, "{d:e}");
}

#[test]
fn zero_data_gives_zero() {
    let dom = GridDomain::ball(3, 9).unwrap();
    let om = AntisymmetricPotential::random(&dom, 2, 1, 0.1, 1).unwrap();
    let s = solve_direct(&dom, &om, &Field::vector(&dom, 2), 1e-10).unwrap();
    assert!(s.v.interior().iter().all(|&x| x == 0.0));
    let a = Field::identity(&dom, 2);
    let c = solve_conservation(&dom, &a, &Field::vector(&dom, 2), 1e-10).unwrap();
    assert!(c.v.interior().iter().all(|&x| x == 0.0));
}

#[test]
fn identity_gauge_conservation_is_the_laplacian() {
    let dom = GridDomain::ball(3, 17).unwrap();
    let a = Field::identity(&dom, 2);
    let v = Field::from_fn(&dom, 2, 1, |x, o| {
        o[0] = x[0] * x[1];
        o[1] = x[1] * x[1] - x[2] * x[2] + 0.5;
    });
    assert!(conservation_residual(&dom, &a, &v) < 1e-12);
    let c = solve_conservation(&dom, &a, &v, 1e-12).unwrap();
    assert_eq!(c.source, StateSource::Conservation);
    assert!(relative_l2(&dom, &c.v, &v) < 1e-10);
}

fn smooth_gauge(dom: &GridDomain) -> Field {
    Field::from_fn(dom, 2, 2, |x, o| {
        o.copy_from_slice(&[
            1.0 + 0.3 * x[0] * x[0],
            0.2 * x[1],
            -0.2 * x[1],
            1.0 + 0.1 * x[2] * x[2],
        ]);
    })
}

#[test]
fn conservation_operator_is_second_order_consistent() {
    // v harmonic, so Δ(Av) − 2div(∇A·v) = −(ΔA)v with ΔA = diag(0.6, 0.2)
    let mut errs = Vec::new();
    for n in [17, 33] {
        let dom = GridDomain::ball(3, n).unwrap();
        let a = smooth_gauge(&dom);
        let v = Field::from_fn(&dom, 2, 1, |x, o| {
            o[0] = x[0] * x[1];
            o[1] = x[1] * x[1] - x[2] * x[2];
        });
        let t = conservation_operator(&dom, &a, &v);
        let h = dom.spacing();
        let mut err: f64 = 0.0;
        for i in 0..dom.num_interior() {
            if dom.distance_to_boundary(i) > 2.0 * h {
                let vi = v.node(i);
                err = err
                    .max((t.node(i)[0] + 0.6 * vi[0]).abs() + (t.node(i)[1] + 0.2 * vi[1]).abs());
            }
        }
        errs.push(err);
    }
    let order = log2(errs[0] / errs[1]);
    assert!((order - 2.0).abs() < 0.1, "{errs:?}");
}

#[test]
fn conservation_solve_zeroes_the_operator() {
    let dom = GridDomain::ball(3, 17).unwrap();
    let a = smooth_gauge(&dom);
    let g = linear_data(&dom, 2);
    let c = solve_conservation(&dom, &a, &g, 1e-12).unwrap();
    let t = conservation_operator(&dom, &a, &c.v);
    let scale = lp_norm(&dom, &c.v, 1.0, BallSpec::Whole).unwrap();
    let res = lp_norm(&dom, &t, 1.0, BallSpec::Whole).unwrap();
    assert!(res <= 1e-8 * scale, "{res:e}");
}

#[test]
fn line_interpolation_is_exact_for_cubics() {
    let dom = GridDomain::ball(3, 17).unwrap();
    let cubic = |x: &[f64]| x[0] * x[0] * x[0] - 2.0 * x[1] * x[0] + x[2];
    let f = Field::from_fn(&dom, 1, 1, |x, o| o[0] = cubic(x));
    let h = dom.spacing();
    let mut out = [0.0; 1];
    let mut checked = 0;
    for i in 0..dom.num_interior() {
        if dom.distance_to_boundary(i) > 3.0 * h {
            for k in [0, 1, 3] {
                morrey::line_value_for_tests(&dom, &f, i, k, 0.37, &mut out);
                let mut y = [0.0; 3];
                y.copy_from_slice(dom.coords(i));
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                y[k / 2] += sign * 0.37 * h;
                assert!((out[0] - cubic(&y)).abs() < 1e-12);
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn flat_gauge_gives_trivial_decomposition() {
    let dom = GridDomain::ball(3, 33).unwrap();
    let a = Field::identity(&dom, 2);
    let g = linear_data(&dom, 2);
    let v = solve_direct(&dom, &AntisymmetricPotential::zero(&dom, 2), &g, 1e-12)
        .unwrap()
        .v;
    let d = local_decomposition(&dom, &a, &v, &[0.1, 0.0, -0.1], 0.25, 1e-10).unwrap();
    assert!(d.phi.interior().iter().all(|&x| x == 0.0));
    assert_eq!(d.xi, d.w);
    assert!(d.harmonic_defect() < 1e-9);
    assert!(local_decomposition(&dom, &a, &v, &[0.0, 0.0, 0.0], 0.05, 1e-10).is_err());
    assert!(local_decomposition(&dom, &a, &v, &[0.9, 0.0, 0.0], 0.25, 1e-10).is_err());
}

#[test]
fn harmonic_decay_and_gamma_for_flat_gauge() {
    let dom = GridDomain::ball(3, 33).unwrap();
    let a = Field::identity(&dom, 2);
    let g = linear_data(&dom, 2);
    let v = solve_direct(&dom, &AntisymmetricPotential::zero(&dom, 2), &g, 1e-12)
        .unwrap()
        .v;
    let centers = alloc::vec![alloc::vec![0.0, 0.0, 0.0], alloc::vec![0.25, -0.125, 0.0]];
    let rep = decay_experiment(&dom, &a, &v, &centers, &[0.125, 0.25], 0.5, 1e-10).unwrap();
    assert_eq!(rep.rows.len(), 4);
    for row in &rep.rows {
        assert!(row.harmonic_ratio <= 0.125 * (1.0 + row.slack), "{row:?}");
        assert!(row.ratio <= 0.5 + row.slack);
        assert_eq!(row.phi_bound_const, 0.0);
    }
    // the fitting window [4h, 1/4] is empty at N = 33
    assert_eq!(rep.gamma_hat, 0.0);
    assert!(decay_experiment(&dom, &a, &v, &centers, &[0.25], 1.0, 1e-10).is_err());
}

#[test]
fn bounded_solution_has_gamma_near_m_minus_two() {
    let dom = GridDomain::ball(3, 65).unwrap();
    let g = linear_data(&dom, 2);
    let v = solve_direct(&dom, &AntisymmetricPotential::zero(&dom, 2), &g, 1e-10)
        .unwrap()
        .v;
    for c in [[0.0, 0.0, 0.0], [0.25, -0.125, 0.0]] {
        let gamma = fit_gamma(&dom, &v, &c, 3.0);
        assert!((gamma - 1.0).abs() < 0.15, "{gamma}");
    }
}

#[test]
fn integrability_of_zero_and_bounded_data() {
    let dom = GridDomain::ball(3, 17).unwrap();
    let z = Field::vector(&dom, 2);
    let rep = integrability_report(&dom, &z, &default_exponents(3), &[0.125, 0.25]).unwrap();
    assert!(rep.norms.iter().all(|&(_, n)| n == 0.0));
    assert!(rep.profile.iter().all(|&(_, n)| n == 0.0));
    assert_eq!(default_exponents(3), alloc::vec![3.0, 3.5, 6.0]);
    let v = linear_data(&dom, 2);
    let v = solve_direct(&dom, &AntisymmetricPotential::zero(&dom, 2), &v, 1e-12)
        .unwrap()
        .v;
    let rep = integrability_report(&dom, &v, &default_exponents(3), &[0.25]).unwrap();
    let bound = 3.0 * crate::math::unit_ball_volume(3);
    assert!(rep.norms.iter().all(|&(_, n)| n > 0.0 && n < bound));
}

#[test]
fn least_squares_recovers_a_line() {
    let xs = [0.0, 1.0, 2.0, 3.0];
    let ys = [1.0, 3.5, 6.0, 8.5];
    assert!((morrey::least_squares_slope(&xs, &ys) - 2.5).abs() < 1e-14);
}
