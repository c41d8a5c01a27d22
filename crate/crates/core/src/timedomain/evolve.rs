use num_complex::Complex64;

use super::{Evolution, FieldHistory, GridSpec};
use crate::domain::{MediumProfile, PulseSpec};
use crate::error::{invalid, Error, Result};

type Mat2 = [[Complex64; 2]; 2];

/// `exp(τM)` for the local coupling matrix `M = [[0, ig], [ig, −γ]]`, in
/// closed form `e^{−γτ/2}[cosh(sτ)·I + sinh(sτ)/s·(M + γ/2·I)]` with
/// `s² = γ²/4 − g²`. The excitation amplitude decays at `γ = Γ/2`.
pub fn local_propagator(g: f64, gamma: f64, tau: f64) -> [[Complex64; 2]; 2] {
    let s2 = 0.25 * gamma * gamma - g * g;
    let (c, sh) = if s2 >= 0.0 {
        let s = s2.sqrt();
        let x = s * tau;
        let sh = if x < 1e-4 { tau * (1.0 + x * x / 6.0) } else { x.sinh() / s };
        (x.cosh(), sh)
    } else {
        let w = (-s2).sqrt();
        let x = w * tau;
        let sh = if x < 1e-4 { tau * (1.0 - x * x / 6.0) } else { x.sin() / w };
        (x.cos(), sh)
    };
    let e = (-0.5 * gamma * tau).exp();
    let off = Complex64::new(0.0, e * g * sh);
    [
        [Complex64::new(e * (c + 0.5 * gamma * sh), 0.0), off],
        [off, Complex64::new(e * (c - 0.5 * gamma * sh), 0.0)],
    ]
}

fn adjoint(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

fn apply(props: &[Mat2], alpha: &mut [Complex64], beta: &mut [Complex64]) {
    for ((m, a), b) in props.iter().zip(alpha.iter_mut()).zip(beta.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = m[0][0] * x + m[0][1] * y;
        *b = m[1][0] * x + m[1][1] * y;
    }
}

/// Adjoint half-steps of the local coupling for each cell.
pub(super) fn backward_props(grid: &GridSpec) -> Vec<Mat2> {
    grid.coupling
        .iter()
        .map(|&g| adjoint(&local_propagator(g, 0.5, 0.5 * grid.step)))
        .collect()
}

/// One backward step on the leading `alpha.len()` cells: adjoint half-step,
/// inverse shift with `inflow` entering the last cell, adjoint half-step.
/// Returns the amplitude leaving through the first cell.
pub(super) fn step_back(props: &[Mat2], alpha: &mut [Complex64], beta: &mut [Complex64], inflow: Complex64) -> Complex64 {
    let m = alpha.len();
    apply(props, alpha, beta);
    let exit = alpha[0];
    alpha.copy_within(1..m, 0);
    alpha[m - 1] = inflow;
    apply(props, alpha, beta);
    exit
}

fn sum_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// Forward no-jump evolution of the pulse through the medium, run until the
/// remaining excitation has decayed below the grid's tail tolerance.
pub fn integrate_forward(pulse: &PulseSpec, medium: &MediumProfile, grid: &GridSpec) -> Result<FieldHistory> {
    if pulse.sigma().is_none() {
        return Err(Error::Unsupported("the time-domain engine integrates Gaussian pulses only".into()));
    }
    if (grid.length - medium.length()).abs() > 1e-12 * medium.length() {
        return Err(invalid("grid and medium lengths differ"));
    }
    let m = grid.cells;
    let h = grid.step;
    let props: Vec<Mat2> = grid.coupling.iter().map(|&g| local_propagator(g, 0.5, 0.5 * h)).collect();
    let input = grid.input_series(pulse);
    let mut pending: f64 = h * sum_sqr(&input);

    let mut alpha = vec![Complex64::default(); m];
    let mut beta = vec![Complex64::default(); m];
    let mut hist_a = alpha.clone();
    let mut hist_b = beta.clone();
    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut norm = vec![pending];
    let mut scattered = vec![0.0];
    let mut exited = 0.0;
    let mut peak_excitation: f64 = 0.0;
    let mut prev_excitation = 0.0;

    for n in 0.. {
        if n >= grid.max_steps {
            return Err(Error::Numeric(format!(
                "excitation did not decay below {} of its peak within {} steps",
                grid.tail_tolerance, grid.max_steps
            )));
        }
        let inflow = input.get(n).copied().unwrap_or_default();
        apply(&props, &mut alpha, &mut beta);
        let out = alpha[m - 1];
        alpha.copy_within(0..m - 1, 1);
        alpha[0] = inflow;
        apply(&props, &mut alpha, &mut beta);

        pending -= h * inflow.norm_sqr();
        exited += h * out.norm_sqr();
        left.push(inflow);
        right.push(out);
        hist_a.extend_from_slice(&alpha);
        hist_b.extend_from_slice(&beta);

        let photon = h * sum_sqr(&alpha);
        let excitation = h * sum_sqr(&beta);
        norm.push(photon + excitation + pending.max(0.0) + exited);
        let last = scattered[scattered.len() - 1];
        scattered.push(last + 0.5 * h * (prev_excitation + excitation));
        prev_excitation = excitation;
        peak_excitation = peak_excitation.max(excitation);

        let input_done = n + 1 >= input.len() + m;
        if input_done
            && excitation <= grid.tail_tolerance * peak_excitation
            && photon <= grid.tail_tolerance * peak_excitation.max(f64::MIN_POSITIVE)
        {
            break;
        }
    }

    let p_t = exited + h * sum_sqr(&alpha);
    log::debug!("forward run: {} steps, P_T = {p_t}", norm.len() - 1);
    Ok(FieldHistory {
        evolution: Evolution::Forward,
        grid: grid.clone(),
        alpha: hist_a,
        beta: hist_b,
        left,
        right,
        norm,
        aux: scattered,
        p_t,
    })
}

/// Backward evolution post-selected on transmission: starts from
/// `α← = α→/√P_T`, `β← = 0` at the final slice and runs the adjoint step
/// back to the first slice. Also records the overlap with the forward state.
pub fn integrate_backward(forward: &FieldHistory, p_t: f64, grid: &GridSpec) -> Result<FieldHistory> {
    if !(p_t > 0.0 && p_t.is_finite()) {
        return Err(invalid(format!("transmission probability must be positive, got {p_t}")));
    }
    if forward.evolution != Evolution::Forward {
        return Err(invalid("backward evolution needs a forward history"));
    }
    if !grid.same_as(&forward.grid) {
        return Err(invalid("grid does not match the forward history"));
    }
    let m = grid.cells;
    let h = grid.step;
    let steps = forward.steps();
    let props = backward_props(grid);
    let scale = p_t.sqrt().recip();

    let mut alpha: Vec<Complex64> = forward.alpha_slice(steps).iter().map(|a| a * scale).collect();
    let mut beta = vec![Complex64::default(); m];
    let right: Vec<Complex64> = forward.right.iter().map(|a| a * scale).collect();
    let mut left = vec![Complex64::default(); steps];

    let mut hist_a = vec![Complex64::default(); (steps + 1) * m];
    let mut hist_b = vec![Complex64::default(); (steps + 1) * m];
    let mut norm = vec![0.0; steps + 1];
    let mut overlap = vec![0.0; steps + 1];

    // Norm of the right-hand free region not yet re-entered, and of the
    // left-hand region already left, at the current slice.
    let mut right_pending: f64 = h * right.iter().map(|a| a.norm_sqr()).sum::<f64>();
    let mut left_exited = 0.0;
    // Overlap contributions of the free regions.
    let mut right_overlap: Complex64 = right
        .iter()
        .zip(&forward.right)
        .map(|(b, f)| b.conj() * f)
        .sum::<Complex64>()
        * h;
    let mut left_overlap = Complex64::default();

    let mut record = |n: usize, alpha: &[Complex64], beta: &[Complex64], rp: f64, le: f64, ro: Complex64, lo: Complex64| {
        hist_a[n * m..(n + 1) * m].copy_from_slice(alpha);
        hist_b[n * m..(n + 1) * m].copy_from_slice(beta);
        norm[n] = h * (sum_sqr(alpha) + sum_sqr(beta)) + rp + le;
        let fa = forward.alpha_slice(n);
        let fb = forward.beta_slice(n);
        let cells: Complex64 = alpha
            .iter()
            .zip(fa)
            .chain(beta.iter().zip(fb))
            .map(|(b, f)| b.conj() * f)
            .sum();
        overlap[n] = (cells * h + ro + lo).re;
    };

    record(steps, &alpha, &beta, right_pending, left_exited, right_overlap, left_overlap);
    for n in (0..steps).rev() {
        let exit = step_back(&props, &mut alpha, &mut beta, right[n]);

        left[n] = exit;
        right_pending -= h * right[n].norm_sqr();
        left_exited += h * exit.norm_sqr();
        right_overlap -= right[n].conj() * forward.right[n] * h;
        left_overlap += exit.conj() * forward.left[n] * h;
        record(n, &alpha, &beta, right_pending.max(0.0), left_exited, right_overlap, left_overlap);
    }

    Ok(FieldHistory {
        evolution: Evolution::Backward,
        grid: grid.clone(),
        alpha: hist_a,
        beta: hist_b,
        left,
        right,
        norm,
        aux: overlap,
        p_t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{make_gaussian_pulse, make_uniform_medium};
    use crate::spectral;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn run(od0: f64, sigma: f64, cells: usize, length: f64) -> (PulseSpec, MediumProfile, GridSpec, FieldHistory) {
        let p = make_gaussian_pulse(sigma, 0.0).unwrap();
        let m = make_uniform_medium(od0, length).unwrap();
        let g = GridSpec::new(&p, &m, cells).unwrap();
        let f = integrate_forward(&p, &m, &g).unwrap();
        (p, m, g, f)
    }

    /// Dense-matrix exponential by a long Taylor series with scaling and
    /// squaring.
    fn expm_oracle(a: Mat2) -> Mat2 {
        let mul = |x: &Mat2, y: &Mat2| -> Mat2 {
            let mut r = [[Complex64::default(); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
                }
            }
            r
        };
        let squarings = 10;
        let s = 1.0 / f64::from(1 << squarings);
        let a = a.map(|row| row.map(|v| v * s));
        let mut term = [[Complex64::new(1.0, 0.0), Complex64::default()], [Complex64::default(), Complex64::new(1.0, 0.0)]];
        let mut sum = term;
        for k in 1..30 {
            term = mul(&term, &a).map(|row| row.map(|v| v / k as f64));
            for i in 0..2 {
                for j in 0..2 {
                    sum[i][j] += term[i][j];
                }
            }
        }
        for _ in 0..squarings {
            sum = mul(&sum, &sum);
        }
        sum
    }

    proptest! {
        #[test]
        fn propagator_matches_series(g in 0.0f64..3.0, tau in 1e-4f64..2.0) {
            let i = Complex64::new(0.0, 1.0);
            let a = [[Complex64::default(), i * g], [i * g, Complex64::new(-0.5, 0.0)]];
            let exact = expm_oracle(a.map(|r| r.map(|v| v * tau)));
            let p = local_propagator(g, 0.5, tau);
            for r in 0..2 {
                for c in 0..2 {
                    prop_assert!((p[r][c] - exact[r][c]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn propagator_critical_coupling() {
        let a = local_propagator(0.25, 0.5, 0.3);
        let b = local_propagator(0.25 + 1e-9, 0.5, 0.3);
        for r in 0..2 {
            for c in 0..2 {
                assert!((a[r][c] - b[r][c]).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn empty_medium_is_exact_advection() {
        let (p, _, g, f) = run(0.0, 1.0, 200, 2.0);
        for n in [0, 100, 500, f.steps()] {
            for (j, a) in f.alpha_slice(n).iter().enumerate() {
                // Cell j at slice n holds the input sample that entered j + 1
                // steps earlier, taken at time t_n − z_j.
                let k = n as i64 - 1 - j as i64;
                let expect = if k >= 0 && (k as usize) < g.input_len() {
                    let t = g.time(n) - g.z(j);
                    assert!((t - (g.time(k as usize) + 0.5 * g.step())).abs() < 1e-9);
                    p.time_amplitude(t).unwrap()
                } else {
                    Complex64::default()
                };
                assert!((a - expect).norm() < 1e-12, "n {n} j {j}");
            }
            assert!(f.beta_slice(n).iter().all(|b| b.norm() == 0.0));
        }
        assert!((f.p_t - 1.0).abs() < 1e-12);
        let b = integrate_backward(&f, f.p_t, &g).unwrap();
        for n in [0, 300, f.steps()] {
            for (x, y) in b.alpha_slice(n).iter().zip(f.alpha_slice(n)) {
                assert!((x - y).norm() < 1e-12);
            }
            assert!(b.beta_slice(n).iter().all(|v| v.norm() < 1e-300));
        }
    }

    #[test]
    fn transmission_matches_spectral() {
        let (p, m, _, f) = run(2.0, 1.0, 200, 2.0);
        let (p_t, _) = spectral::transmission_probability(&p, &m).unwrap();
        assert!((f.p_t / p_t - 1.0).abs() < 1e-3, "{} vs {p_t}", f.p_t);
    }

    #[test]
    fn norm_decays_and_bookkeeping_holds() {
        let (_, _, _, f) = run(2.0, 1.0, 200, 2.0);
        for w in f.norm.windows(2) {
            assert!(w[1] <= w[0] + 1e-15);
        }
        assert!(f.bookkeeping_error() < 1e-4, "{}", f.bookkeeping_error());
        assert!(f.excitation(f.steps()) < 1e-8 * (0..=f.steps()).map(|n| f.excitation(n)).fold(0.0, f64::max));
    }

    #[test]
    fn backward_norm_and_overlap() {
        let (_, _, g, f) = run(2.0, 1.0, 200, 2.0);
        let b = integrate_backward(&f, f.p_t, &g).unwrap();
        for w in b.norm.windows(2) {
            assert!(w[1] >= w[0] - 1e-15);
        }
        let reference = b.aux[b.steps()];
        assert_relative_eq!(reference, f.p_t.sqrt(), max_relative = 1e-12);
        for &o in &b.aux {
            assert!((o - reference).abs() < 1e-6 * reference);
        }
    }

    #[test]
    fn backward_ratio_in_frequency_domain() {
        let (_, m, g, f) = run(2.0, 1.0, 200, 2.0);
        let b = integrate_backward(&f, f.p_t, &g).unwrap();
        let j = 150;
        let gz = m.g(g.z(j));
        let i = Complex64::new(0.0, 1.0);
        for w in [-0.5, 0.0, 0.7] {
            let (mut ta, mut tb) = (Complex64::default(), Complex64::default());
            for n in 0..=b.steps() {
                let ph = Complex64::from_polar(1.0, -w * g.time(n));
                ta += b.alpha_slice(n)[j] * ph;
                tb += b.beta_slice(n)[j] * ph;
            }
            let ratio = tb / ta;
            let expect = i * gz / Complex64::new(-0.5, w);
            assert!((ratio - expect).norm() < 1e-2 * expect.norm(), "{w}: {ratio} vs {expect}");
        }
    }

    #[test]
    fn backward_rejects_bad_probability() {
        let (_, _, g, f) = run(0.5, 1.0, 200, 2.0);
        assert!(matches!(integrate_backward(&f, 0.0, &g), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn excitation_outside_medium_is_zero() {
        // β is only ever stored on medium cells; the boundary series carry
        // photon amplitude alone.
        let (_, _, g, f) = run(1.0, 1.0, 200, 2.0);
        assert_eq!(f.beta.len(), (f.steps() + 1) * g.cells());
    }
}
