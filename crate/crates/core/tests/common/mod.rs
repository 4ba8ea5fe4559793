//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

/// Composite 16-point Gauss-Legendre on `[a, b]` split into `panels`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 8] = [
        0.0950125098376374,
        0.2816035507792589,
        0.4580167776572274,
        0.6178762444026438,
        0.7554044083550030,
        0.8656312023878318,
        0.9445750230732326,
        0.9894009349916499,
    ];
    const W: [f64; 8] = [
        0.1894506104550685,
        0.1826034150449236,
        0.1691565193950025,
        0.1495959888165767,
        0.1246289712555339,
        0.0951585116824928,
        0.0622535239386479,
        0.0271524594117541,
    ];
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for k in 0..panels {
        let m = a + (k as f64 + 0.5) * h;
        for i in 0..8 {
            s += W[i] * (f(m - 0.5 * h * X[i]) + f(m + 0.5 * h * X[i]));
        }
    }
    0.5 * h * s
}

/// Cavity pressure (MPa) of an incompressible neo-Hookean tube in plane
/// strain, reference radii `ra < rb`, whose bore has inflated to `a`.
pub fn cylinder_pressure(mu: f64, ra: f64, rb: f64, a: f64) -> f64 {
    let b = (rb * rb + a * a - ra * ra).sqrt();
    let f = |r: f64| {
        let r0sq = r * r - a * a + ra * ra;
        let l2 = r * r / r0sq;
        mu * (l2 - 1.0 / l2) / r
    };
    integrate(f, a, b, 64)
}

/// Deformed bore radius at cavity pressure `p` (MPa), by bisection.
pub fn cylinder_bore_radius(mu: f64, ra: f64, rb: f64, p: f64) -> f64 {
    let (mut lo, mut hi) = (ra, 4.0 * ra);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cylinder_pressure(mu, ra, rb, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Periodic `(p_max, p_min)` of a chamber driven by a fill/vent square wave,
/// found by stepping the ODE `dp/dt = (s − p)/τ_fill` or `−p/τ_vent` with the
/// exact exponential over `dt` until the cycle repeats.
pub fn brute_force_swing(plant: &pneusoft::pneumatics::PneumaticPlant, f: f64, duty: f64, dt: f64) -> (f64, f64) {
    let period = 1.0 / f;
    let n_fill = (duty * period / dt).round() as usize;
    let n_vent = ((1.0 - duty) * period / dt).round() as usize;
    let s = plant.supply_pressure;
    let (kf, kv) = ((-dt / plant.tau_fill).exp(), (-dt / plant.tau_vent).exp());
    let mut p = 0.0;
    let mut prev = (f64::NAN, f64::NAN);
    for _ in 0..10_000 {
        for _ in 0..n_fill {
            p = s + (p - s) * kf;
        }
        let hi = p;
        for _ in 0..n_vent {
            p *= kv;
        }
        if (hi - prev.0).abs() < 1e-12 * s && (p - prev.1).abs() < 1e-12 * s {
            return (hi, p);
        }
        prev = (hi, p);
    }
    prev
}
