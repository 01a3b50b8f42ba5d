//! Aggregated interior storage: two parallel series-RC branches fitted to
//! the summed surplus admittance of all envelope parts at periods of 24 h
//! and 1 h.

use num_complex::Complex64;

use super::WallError;
use crate::linalg::solve_in_place;
use crate::{OMEGA_1H, OMEGA_24H};

/// A conductance in series with a capacitance to the combined node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    /// Conductance, W/K.
    pub conductance: f64,
    /// Capacitance, J/K.
    pub capacitance: f64,
}

impl Branch {
    /// Series-RC admittance `i w C L / (L + i w C)`, W/K.
    pub fn admittance(&self, omega: f64) -> Complex64 {
        let (l, c) = (self.conductance, self.capacitance);
        if l == 0.0 || c == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let iwc = Complex64::new(0.0, omega * c);
        iwc * l / (l + iwc)
    }
}

/// Two parallel storage branches; capacitors block steady flow, so the
/// network admittance vanishes at DC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchNetwork {
    /// Slow branch first (larger capacitance).
    pub branches: [Branch; 2],
}

impl BranchNetwork {
    pub fn zero() -> Self {
        BranchNetwork {
            branches: [Branch { conductance: 0.0, capacitance: 0.0 }; 2],
        }
    }

    pub fn admittance(&self, omega: f64) -> Complex64 {
        self.branches[0].admittance(omega) + self.branches[1].admittance(omega)
    }
}

/// Exact single-branch fit to one complex admittance: from
/// `1/Y = 1/L - i/(w C)`, valid while the phase of `y` lies in (0, 90) deg.
fn single_branch_fit(y: Complex64, omega: f64) -> Option<Branch> {
    let inv = y.inv();
    if inv.re <= 0.0 || inv.im >= 0.0 {
        return None;
    }
    Some(Branch {
        conductance: 1.0 / inv.re,
        capacitance: -1.0 / (omega * inv.im),
    })
}

fn residual(p: &[f64; 4], y24: Complex64, y1: Complex64) -> [f64; 4] {
    let b1 = Branch { conductance: p[0].exp(), capacitance: p[1].exp() };
    let b2 = Branch { conductance: p[2].exp(), capacitance: p[3].exp() };
    let s24 = b1.admittance(OMEGA_24H) + b2.admittance(OMEGA_24H);
    let s1 = b1.admittance(OMEGA_1H) + b2.admittance(OMEGA_1H);
    [s24.re - y24.re, s24.im - y24.im, s1.re - y1.re, s1.im - y1.im]
}

fn norm4(f: &[f64; 4]) -> f64 {
    f.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Fits the two-branch network so its admittance equals the targets at both
/// frequencies. Newton iteration on log-parametrized `(L1, C1, L2, C2)`
/// (positivity by construction) with Levenberg damping; the initial guess
/// fits branch 1 to the 24 h target alone and branch 2 to the 1 h residual.
pub fn fit_branch_network(y24: Complex64, y1: Complex64) -> Result<BranchNetwork, WallError> {
    let scale = y24.norm().max(y1.norm());
    if scale < 1e-12 {
        return Ok(BranchNetwork::zero());
    }
    for (y, name) in [(y24, "24 h"), (y1, "1 h")] {
        let phase = y.arg();
        if !(-1e-12..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&phase) {
            let _ = name;
            return Err(WallError::PhaseOutOfRange { phase_deg: phase.to_degrees() });
        }
    }

    let guess = initial_guess(y24, y1);
    let mut p = guess;
    let mut f = residual(&p, y24, y1);
    let mut lambda = 1e-3;
    let tol = 1e-12 * scale;
    let max_iter = 100;
    for _ in 0..max_iter {
        if norm4(&f) < tol {
            break;
        }
        // forward-difference jacobian in log space
        let mut j = [0.0f64; 16];
        let h = 1e-7;
        for col in 0..4 {
            let mut pp = p;
            pp[col] += h;
            let fp = residual(&pp, y24, y1);
            for row in 0..4 {
                j[row * 4 + col] = (fp[row] - f[row]) / h;
            }
        }
        // damped step: (J^T J + lambda I) d = -J^T f
        let mut improved = false;
        for _ in 0..40 {
            let mut jtj = [0.0f64; 16];
            let mut jtf = [0.0f64; 4];
            for r in 0..4 {
                for c in 0..4 {
                    let mut s = 0.0;
                    for k in 0..4 {
                        s += j[k * 4 + r] * j[k * 4 + c];
                    }
                    jtj[r * 4 + c] = s;
                }
                jtj[r * 4 + r] += lambda;
                let mut s = 0.0;
                for k in 0..4 {
                    s += j[k * 4 + r] * f[k];
                }
                jtf[r] = -s;
            }
            if solve_in_place(&mut jtj, &mut jtf, 4).is_err() {
                lambda *= 10.0;
                continue;
            }
            let pn = [p[0] + jtf[0], p[1] + jtf[1], p[2] + jtf[2], p[3] + jtf[3]];
            let fn_ = residual(&pn, y24, y1);
            if norm4(&fn_) < norm4(&f) {
                p = pn;
                f = fn_;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    if norm4(&f) >= 1e-8 * scale {
        return Err(WallError::NonConvergence {
            iterations: max_iter,
            residual: norm4(&f) / scale,
        });
    }
    let mut branches = [
        Branch { conductance: p[0].exp(), capacitance: p[1].exp() },
        Branch { conductance: p[2].exp(), capacitance: p[3].exp() },
    ];
    // canonical order: slow branch (larger capacitance) first
    if branches[0].capacitance < branches[1].capacitance {
        branches.swap(0, 1);
    }
    Ok(BranchNetwork { branches })
}

fn initial_guess(y24: Complex64, y1: Complex64) -> [f64; 4] {
    let b1 = single_branch_fit(y24, OMEGA_24H).unwrap_or(Branch {
        conductance: y24.norm().max(1e-6),
        capacitance: y24.norm().max(1e-6) / OMEGA_24H,
    });
    let r = y1 - b1.admittance(OMEGA_1H);
    let b2 = single_branch_fit(r, OMEGA_1H)
        .or_else(|| single_branch_fit(y1 * 0.5, OMEGA_1H))
        .unwrap_or(Branch {
            conductance: y1.norm().max(1e-6),
            capacitance: y1.norm().max(1e-6) / OMEGA_1H,
        });
    [
        b1.conductance.ln(),
        b1.capacitance.ln(),
        b2.conductance.ln(),
        b2.capacitance.ln(),
    ]
}
