use std::f64::consts::PI;

use mwright::greens::{delta_surrogate, green_density, recommended_halfwidth, solve_volterra, variance_law, GreenSpec};
use mwright::GridFunction;

fn gaussian(x: f64, var: f64) -> f64 {
    (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

fn l1_distance(u: &GridFunction, exact: impl Fn(f64) -> f64) -> f64 {
    let diff = u.with_values(u.xs().iter().zip(u.ys()).map(|(&x, &y)| (y - exact(x)).abs()).collect(), "").unwrap();
    diff.trapezoid()
}

fn second_moment(u: &GridFunction) -> f64 {
    u.weighted_trapezoid(|x| x * x)
}

#[test]
fn heat_equation_matches_gaussian_convolution() {
    let spec = GreenSpec::new(1.0, 1.0, 1.0).unwrap();
    let sd0 = 0.05;
    let hw = recommended_halfwidth(spec, 0.5, 1e-12, 10.0 * sd0).unwrap();
    let u0 = GridFunction::sample(-hw, hw, 800, |x| gaussian(x, sd0 * sd0), "gaussian").unwrap();
    let u = solve_volterra(&u0, spec, 0.5, 512, hw).unwrap();
    let err = l1_distance(&u, |x| gaussian(x, sd0 * sd0 + 1.0));
    assert!(err < 1e-3, "L1 error {err}");
}

#[test]
fn fractional_variance_gain() {
    let spec = GreenSpec::new(0.5, 0.5, 1.0).unwrap();
    let sd0 = 0.05;
    let t = 0.5;
    let hw = recommended_halfwidth(spec, t, 1e-12, 10.0 * sd0).unwrap();
    let u0 = GridFunction::sample(-hw, hw, 800, |x| gaussian(x, sd0 * sd0), "gaussian").unwrap();
    let u = solve_volterra(&u0, spec, t, 512, hw).unwrap();
    let gain = second_moment(&u) - second_moment(&u0);
    let want = variance_law(spec, t).unwrap();
    assert!((gain / want - 1.0).abs() < 0.01, "gain {gain} vs {want}");
    assert!((u.trapezoid() - 1.0).abs() < 1e-6);
}

#[test]
fn refinement_reduces_error_against_green_function() {
    let spec = GreenSpec::new(0.75, 0.75, 1.0).unwrap();
    let t = 1.0;
    let hw = recommended_halfwidth(spec, t, 1e-10, 0.5).unwrap();
    let mut prev = f64::INFINITY;
    for &(nx, nt) in &[(201, 64), (401, 128), (801, 256)] {
        let u0 = delta_surrogate(hw, nx).unwrap();
        let u = solve_volterra(&u0, spec, t, nt, hw).unwrap();
        let err = l1_distance(&u, |x| green_density(spec, x, t).unwrap());
        assert!(err < prev, "nx={nx}: {err} vs {prev}");
        prev = err;
    }
    assert!(prev < 0.05, "{prev}");
}
