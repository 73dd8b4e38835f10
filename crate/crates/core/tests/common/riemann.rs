//! Exact solution of the one-dimensional Riemann problem for an ideal gas,
//! used as an independent oracle for shock-tube runs.

#[derive(Clone, Copy, Debug)]
pub struct Side {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

/// Pressure function of one side and its derivative with respect to `p`.
fn wave(p: f64, s: Side, gamma: f64) -> (f64, f64) {
    let c = (gamma * s.p / s.rho).sqrt();
    if p > s.p {
        let a = 2.0 / ((gamma + 1.0) * s.rho);
        let b = (gamma - 1.0) / (gamma + 1.0) * s.p;
        let q = (a / (p + b)).sqrt();
        ((p - s.p) * q, q * (1.0 - 0.5 * (p - s.p) / (p + b)))
    } else {
        let e = (gamma - 1.0) / (2.0 * gamma);
        let f = 2.0 * c / (gamma - 1.0) * ((p / s.p).powf(e) - 1.0);
        (
            f,
            (p / s.p).powf(-(gamma + 1.0) / (2.0 * gamma)) / (s.rho * c),
        )
    }
}

/// Star-region pressure and velocity by Newton iteration.
pub fn star_state(l: Side, r: Side, gamma: f64) -> (f64, f64) {
    let mut p = 0.5 * (l.p + r.p);
    for _ in 0..100 {
        let (fl, dl) = wave(p, l, gamma);
        let (fr, dr) = wave(p, r, gamma);
        let next = (p - (fl + fr + r.u - l.u) / (dl + dr)).max(1e-12);
        let done = (next - p).abs() < 1e-14 * p;
        p = next;
        if done {
            break;
        }
    }
    let (fl, _) = wave(p, l, gamma);
    let (fr, _) = wave(p, r, gamma);
    (p, 0.5 * (l.u + r.u) + 0.5 * (fr - fl))
}

/// Solution `(rho, u, p)` at similarity coordinate `xi = x / t`.
pub fn sample(l: Side, r: Side, gamma: f64, xi: f64) -> (f64, f64, f64) {
    let (ps, us) = star_state(l, r, gamma);
    let g1 = (gamma - 1.0) / (gamma + 1.0);
    if xi <= us {
        let c = (gamma * l.p / l.rho).sqrt();
        if ps > l.p {
            let speed = l.u
                - c * ((gamma + 1.0) / (2.0 * gamma) * ps / l.p + (gamma - 1.0) / (2.0 * gamma))
                    .sqrt();
            if xi < speed {
                (l.rho, l.u, l.p)
            } else {
                (l.rho * (ps / l.p + g1) / (g1 * ps / l.p + 1.0), us, ps)
            }
        } else {
            let cs = c * (ps / l.p).powf((gamma - 1.0) / (2.0 * gamma));
            if xi < l.u - c {
                (l.rho, l.u, l.p)
            } else if xi > us - cs {
                (l.rho * (ps / l.p).powf(1.0 / gamma), us, ps)
            } else {
                let k = 2.0 / (gamma + 1.0) + g1 / c * (l.u - xi);
                let u = 2.0 / (gamma + 1.0) * (c + (gamma - 1.0) / 2.0 * l.u + xi);
                (
                    l.rho * k.powf(2.0 / (gamma - 1.0)),
                    u,
                    l.p * k.powf(2.0 * gamma / (gamma - 1.0)),
                )
            }
        }
    } else {
        let c = (gamma * r.p / r.rho).sqrt();
        if ps > r.p {
            let speed = r.u
                + c * ((gamma + 1.0) / (2.0 * gamma) * ps / r.p + (gamma - 1.0) / (2.0 * gamma))
                    .sqrt();
            if xi > speed {
                (r.rho, r.u, r.p)
            } else {
                (r.rho * (ps / r.p + g1) / (g1 * ps / r.p + 1.0), us, ps)
            }
        } else {
            let cs = c * (ps / r.p).powf((gamma - 1.0) / (2.0 * gamma));
            if xi > r.u + c {
                (r.rho, r.u, r.p)
            } else if xi < us + cs {
                (r.rho * (ps / r.p).powf(1.0 / gamma), us, ps)
            } else {
                let k = 2.0 / (gamma + 1.0) - g1 / c * (r.u - xi);
                let u = 2.0 / (gamma + 1.0) * (-c + (gamma - 1.0) / 2.0 * r.u + xi);
                (
                    r.rho * k.powf(2.0 / (gamma - 1.0)),
                    u,
                    r.p * k.powf(2.0 * gamma / (gamma - 1.0)),
                )
            }
        }
    }
}

/// Normal-shock density and pressure ratios for upstream Mach number `m`.
pub fn normal_shock_ratios(m: f64, gamma: f64) -> (f64, f64) {
    let m2 = m * m;
    (
        (gamma + 1.0) * m2 / ((gamma - 1.0) * m2 + 2.0),
        1.0 + 2.0 * gamma / (gamma + 1.0) * (m2 - 1.0),
    )
}

/// Mach number behind a normal shock with upstream Mach number `m`.
pub fn normal_shock_downstream_mach(m: f64, gamma: f64) -> f64 {
    let m2 = m * m;
    ((1.0 + 0.5 * (gamma - 1.0) * m2) / (gamma * m2 - 0.5 * (gamma - 1.0))).sqrt()
}
