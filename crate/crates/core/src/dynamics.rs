//! `dc/dt = r̃(c)`: formation rate, its Jacobian, an adaptive Dormand–Prince
//! integrator and conservation checks along trajectories.

use std::io::{self, Write};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinetics::PowerLawSystem;
use crate::matrix::to_f64;
use crate::network::GeneralizedNetwork;
use crate::subspace::SubspaceBasis;

pub fn formation_rate(net: &GeneralizedNetwork, rates: &[f64], c: &[f64]) -> Result<Vec<f64>> {
    PowerLawSystem::new(net, rates)?.formation_rate(c)
}

pub fn rate_jacobian(net: &GeneralizedNetwork, rates: &[f64], c: &[f64]) -> Result<DMatrix<f64>> {
    PowerLawSystem::new(net, rates)?.jacobian(c)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Header `t,<species>` then one row per step, 17 significant digits.
    pub fn write_csv<W: Write>(&self, species: &[&str], mut out: W) -> io::Result<()> {
        writeln!(out, "t,{}", species.join(","))?;
        for (t, c) in self.times.iter().zip(&self.states) {
            write!(out, "{t:.16e}")?;
            for x in c {
                write!(out, ",{x:.16e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Step {
    y: Vec<f64>,
    f_end: Vec<f64>,
    err: Vec<f64>,
}

/// One Dormand–Prince step from `(y, f0 = r̃(y))`. Fails if a stage leaves
/// the nonnegative orthant.
fn dp_step(sys: &PowerLawSystem, y: &[f64], f0: &[f64], h: f64) -> Result<Step> {
    let n = y.len();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    k.push(f0.to_vec());
    let mut stage = vec![0.0; n];
    for (s, a) in A.iter().enumerate().skip(1) {
        for i in 0..n {
            stage[i] = y[i] + h * (0..s).map(|j| a[j] * k[j][i]).sum::<f64>();
        }
        k.push(sys.formation_rate(&stage)?);
    }
    // Stage 7 is evaluated at the fifth-order solution (first same as last).
    let err = (0..n)
        .map(|i| h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>())
        .collect();
    Ok(Step {
        y: stage,
        f_end: k.pop().expect("seven stages"),
        err,
    })
}

fn error_norm(err: &[f64], y0: &[f64], y1: &[f64], rtol: f64, atol: f64) -> f64 {
    if err.is_empty() {
        return 0.0;
    }
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = atol + rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (sum / err.len() as f64).sqrt()
}

fn check_initial(sys: &PowerLawSystem, c0: &[f64], t_end: f64) -> Result<()> {
    if c0.len() != sys.species_count() {
        return Err(Error::DimensionMismatch {
            expected: sys.species_count(),
            found: c0.len(),
        });
    }
    if let Some(index) = c0.iter().position(|&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::NegativeConcentration { index });
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "final time must be positive, got {t_end}"
        )));
    }
    Ok(())
}

/// Adaptive integration on `[0, t_end]` with PI step control. Steps that
/// produce a negative component are rejected and retried at half length.
pub fn integrate(
    net: &GeneralizedNetwork,
    rates: &[f64],
    c0: &[f64],
    t_end: f64,
    rtol: f64,
    atol: f64,
) -> Result<Trajectory> {
    let sys = PowerLawSystem::new(net, rates)?;
    check_initial(&sys, c0, t_end)?;
    if !(rtol > 0.0 && atol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    let h_min = 1e-14 * t_end;
    const SAFETY: f64 = 0.9;
    const ALPHA: f64 = 0.17;
    const BETA: f64 = 0.04;

    let mut t = 0.0;
    let mut y = c0.to_vec();
    let mut f = sys.formation_rate(&y)?;
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![y.clone()],
        rejected_steps: 0,
    };

    let scale: Vec<f64> = y.iter().map(|x| atol + rtol * x.abs()).collect();
    let d0 = rms_scaled(&y, &scale);
    let d1 = rms_scaled(&f, &scale);
    let mut h = if d1 <= 1e-10 || d0 <= 1e-10 {
        1e-6 * t_end
    } else {
        0.01 * d0 / d1
    }
    .min(t_end);
    let mut err_prev: f64 = 1e-4;
    let mut rejected_last = false;

    while t < t_end {
        if t + h >= t_end || t_end - (t + h) < h_min {
            h = t_end - t;
        }
        if h < h_min {
            return Err(Error::StepUnderflow { t, h_min });
        }
        let attempt = dp_step(&sys, &y, &f, h);
        let step = match attempt {
            Ok(s) if s.y.iter().all(|&x| x >= 0.0) => s,
            Ok(s) if s.y.iter().any(|x| !x.is_finite()) => {
                return Err(Error::NonFiniteState { t: t + h });
            }
            Ok(_) | Err(Error::NegativeConcentration { .. }) => {
                traj.rejected_steps += 1;
                rejected_last = true;
                h *= 0.5;
                continue;
            }
            Err(e) => return Err(e),
        };
        let err = error_norm(&step.err, &y, &step.y, rtol, atol);
        if !err.is_finite() {
            return Err(Error::NonFiniteState { t: t + h });
        }
        if err <= 1.0 {
            t = if h == t_end - t { t_end } else { t + h };
            y = step.y;
            f = step.f_end;
            traj.times.push(t);
            traj.states.push(y.clone());
            let mut factor = if err == 0.0 {
                10.0
            } else {
                SAFETY * err.powf(-ALPHA) * err_prev.powf(BETA)
            };
            factor = factor.clamp(0.2, 10.0);
            if rejected_last {
                factor = factor.min(1.0);
            }
            h *= factor;
            err_prev = err.max(1e-4);
            rejected_last = false;
        } else {
            traj.rejected_steps += 1;
            rejected_last = true;
            h *= (SAFETY * err.powf(-0.2)).max(0.2);
        }
    }
    Ok(traj)
}

fn rms_scaled(x: &[f64], scale: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    (x.iter().zip(scale).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / x.len() as f64).sqrt()
}

/// `steps` equal Dormand–Prince steps without error control; used to
/// measure the order of the method.
pub fn integrate_fixed(
    net: &GeneralizedNetwork,
    rates: &[f64],
    c0: &[f64],
    t_end: f64,
    steps: usize,
) -> Result<Vec<f64>> {
    let sys = PowerLawSystem::new(net, rates)?;
    check_initial(&sys, c0, t_end)?;
    let h = t_end / steps.max(1) as f64;
    let mut y = c0.to_vec();
    let mut f = sys.formation_rate(&y)?;
    for _ in 0..steps.max(1) {
        let s = dp_step(&sys, &y, &f, h)?;
        y = s.y;
        f = s.f_end;
    }
    Ok(y)
}

/// For every basis vector `vⁱ` of `S⊥`, `max_t |⟨c(t) − c(0), vⁱ⟩|`.
pub fn conservation_residuals(traj: &Trajectory, sperp: &SubspaceBasis) -> Vec<f64> {
    let Some(c0) = traj.states.first() else {
        return vec![0.0; sperp.dim()];
    };
    sperp
        .vectors()
        .iter()
        .map(|v| {
            let v: Vec<f64> = v.iter().map(to_f64).collect();
            traj.states
                .iter()
                .map(|c| {
                    c.iter()
                        .zip(c0)
                        .zip(&v)
                        .map(|((a, b), w)| (a - b) * w)
                        .sum::<f64>()
                        .abs()
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_network;
    use crate::subspace::{orthogonal_complement, stoichiometric_subspace};

    const EX2: &str = "A + B <=> C\nA + B ~ A + B\nC ~ 2B + C";

    #[test]
    fn formation_rate_vanishes_at_balance() {
        let net = parse_network(EX2).unwrap();
        assert_eq!(formation_rate(&net, &[1.0, 1.0], &[1.0; 3]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn constant_exponents_give_zero_jacobian() {
        let net = parse_network("A -> B\nA ~ 0").unwrap();
        let j = rate_jacobian(&net, &[2.0], &[1.0, 1.0]).unwrap();
        assert!(j.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn decay_matches_exponential() {
        let net = parse_network("A -> B").unwrap();
        let traj = integrate(&net, &[1.0], &[1.0, 0.0], 2.0, 1e-10, 1e-12).unwrap();
        let c = traj.final_state();
        assert!((c[0] - (-2.0f64).exp()).abs() < 1e-8);
        assert!((c[0] + c[1] - 1.0).abs() < 1e-12);
        assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*traj.times.last().unwrap(), 2.0);
    }

    #[test]
    fn equilibrium_stays_put() {
        let net = parse_network(EX2).unwrap();
        let traj = integrate(&net, &[1.0, 1.0], &[1.0; 3], 10.0, 1e-8, 1e-10).unwrap();
        for c in &traj.states {
            for x in c {
                assert!((x - 1.0).abs() < 1e-10);
            }
        }
        let sperp = orthogonal_complement(&stoichiometric_subspace(&net));
        assert!(conservation_residuals(&traj, &sperp).iter().all(|&r| r == 0.0));
    }

    #[test]
    fn corrupted_trajectory_is_flagged() {
        let net = parse_network("A + B <=> C").unwrap();
        let sperp = orthogonal_complement(&stoichiometric_subspace(&net));
        let traj = Trajectory {
            times: vec![0.0, 1.0],
            states: vec![vec![1.0, 1.0, 1.0], vec![1.5, 1.0, 1.0]],
            rejected_steps: 0,
        };
        assert!(conservation_residuals(&traj, &sperp).iter().any(|&r| r > 0.1));
    }

    #[test]
    fn fixed_step_order_at_least_four() {
        // A ⇌ B with unit rates: A(t) = 1/2 + e^{−2t}/2 from A(0) = 1.
        let net = parse_network("A <=> B").unwrap();
        let exact = 0.5 + 0.5 * (-2.0f64).exp();
        let err = |steps| {
            let y = integrate_fixed(&net, &[1.0, 1.0], &[1.0, 0.0], 1.0, steps).unwrap();
            (y[0] - exact).abs()
        };
        let (e1, e2) = (err(10), err(20));
        assert!((e1 / e2).log2() >= 4.0, "observed order {}", (e1 / e2).log2());
    }

    #[test]
    fn csv_layout() {
        let traj = Trajectory {
            times: vec![0.0, 0.5],
            states: vec![vec![1.0, 2.0], vec![0.25, 3.0]],
            rejected_steps: 0,
        };
        let mut buf = Vec::new();
        traj.write_csv(&["A", "B"], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,A,B");
        assert_eq!(lines[2], "5.0000000000000000e-1,2.5000000000000000e-1,3.0000000000000000e0");
    }

    #[test]
    fn rejects_bad_input() {
        let net = parse_network("A -> B").unwrap();
        assert!(integrate(&net, &[1.0], &[-1.0, 0.0], 1.0, 1e-6, 1e-9).is_err());
        assert!(integrate(&net, &[1.0], &[1.0, 0.0], 0.0, 1e-6, 1e-9).is_err());
    }
}
