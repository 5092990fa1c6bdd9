//! Exponential-integral family and log-gamma.

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// E1(x) = ∫_x^∞ e^{-t}/t dt for x > 0.
pub fn e1(x: f64) -> f64 {
    assert!(x > 0.0, "e1 requires x > 0, got {x}");
    if x <= 1.0 {
        // -γ - ln x + Σ (-1)^{k+1} x^k / (k k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        // modified Lentz on the continued fraction e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Ei(x) = -PV∫_{-x}^∞ e^{-t}/t dt, for x != 0.
pub fn ei(x: f64) -> f64 {
    assert!(x != 0.0, "ei is singular at 0");
    if x < 0.0 {
        return -e1(-x);
    }
    if x <= 40.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= x / k as f64;
            let add = term / k as f64;
            sum += add;
            if add < 1e-17 * sum {
                break;
            }
        }
        EULER_GAMMA + x.ln() + sum
    } else {
        let mut sum = 1.0;
        let mut term = 1.0;
        for k in 1..40 {
            let next = term * k as f64 / x;
            if next > term {
                break;
            }
            term = next;
            sum += term;
            if term < 1e-17 {
                break;
            }
        }
        x.exp() / x * sum
    }
}

/// Hyperbolic sine integral Shi(x) = ∫_0^x sinh(t)/t dt.
pub fn shi(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let ax = x.abs();
    let v = if ax <= 8.0 {
        let x2 = ax * ax;
        let mut term = ax;
        let mut sum = ax;
        let mut k = 1.0_f64;
        loop {
            term *= x2 / ((2.0 * k) * (2.0 * k + 1.0));
            let add = term / (2.0 * k + 1.0);
            sum += add;
            if add < 1e-17 * sum {
                break;
            }
            k += 1.0;
        }
        sum
    } else {
        0.5 * (ei(ax) + e1(ax))
    };
    v.copysign(x)
}

/// Hyperbolic cosine integral Chi(x) = γ + ln x + ∫_0^x (cosh t − 1)/t dt, x > 0.
pub fn chi(x: f64) -> f64 {
    assert!(x > 0.0, "chi requires x > 0, got {x}");
    if x <= 8.0 {
        let x2 = x * x;
        let mut term = 1.0;
        let mut sum = 0.0;
        let mut k = 1.0_f64;
        loop {
            term *= x2 / ((2.0 * k - 1.0) * (2.0 * k));
            let add = term / (2.0 * k);
            sum += add;
            if add < 1e-17 * sum.max(1e-300) {
                break;
            }
            k += 1.0;
        }
        EULER_GAMMA + x.ln() + sum
    } else {
        0.5 * (ei(x) - e1(x))
    }
}

/// ln Γ(x) for x > 0 (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    assert!(x > 0.0);
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// ln C(n, k).
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    if k == 0 || k == n {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}
