//! Adaptive Dormand-Prince 5(4) integrator with output points and stop events.

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step magnitude; 0 picks 1e-3 of the span.
    pub h_init: f64,
    /// Smallest step magnitude relative to |t| before giving up.
    pub h_min_rel: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, h_init: 0.0, h_min_rel: 1e-14, max_steps: 2_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop<E> {
    Completed,
    Event(E),
    StepUnderflow,
    MaxSteps,
}

#[derive(Debug, Clone)]
pub struct OdeRun<const D: usize, E> {
    /// Values at the output points actually reached, in order.
    pub outputs: Vec<[f64; D]>,
    pub stop: Stop<E>,
    pub t_last: f64,
    pub y_last: [f64; D],
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Integrates `y' = f(t, y)` from `t0` through the monotone list `outputs`
/// (all on the same side of `t0`). `event` is checked after every accepted
/// step and stops the run when it returns `Some`.
pub fn integrate<const D: usize, E, F, G>(
    mut f: F,
    t0: f64,
    y0: [f64; D],
    outputs: &[f64],
    opts: &OdeOptions,
    mut event: G,
) -> OdeRun<D, E>
where
    F: FnMut(f64, &[f64; D]) -> [f64; D],
    G: FnMut(f64, &[f64; D]) -> Option<E>,
{
    let mut run = OdeRun { outputs: Vec::with_capacity(outputs.len()), stop: Stop::Completed, t_last: t0, y_last: y0 };
    let Some(&t_final) = outputs.last() else {
        return run;
    };
    let dir = if t_final >= t0 { 1.0 } else { -1.0 };
    let span = (t_final - t0).abs();
    let mut h = if opts.h_init > 0.0 { opts.h_init } else { 1e-3 * span.max(1e-300) };
    let (mut t, mut y) = (t0, y0);
    let mut next = 0;
    while next < outputs.len() && (outputs[next] - t) * dir <= 0.0 {
        run.outputs.push(y);
        next += 1;
    }
    let mut k = [[0.0; D]; 7];
    k[0] = f(t, &y);
    let mut steps = 0;
    while next < outputs.len() {
        if steps >= opts.max_steps {
            run.stop = Stop::MaxSteps;
            break;
        }
        let target = outputs[next];
        let mut step = h.min((target - t).abs());
        let hit_target = step == (target - t).abs();
        if step <= opts.h_min_rel * t.abs().max(1e-300) {
            run.stop = Stop::StepUnderflow;
            break;
        }
        step *= dir;
        for s in 1..7 {
            let mut ys = y;
            for d in 0..D {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * k[j][d];
                }
                ys[d] += step * acc;
            }
            k[s] = f(t + C[s] * step, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        let mut finite = true;
        for d in 0..D {
            let (mut a5, mut a4) = (0.0, 0.0);
            for s in 0..7 {
                a5 += B5[s] * k[s][d];
                a4 += B4[s] * k[s][d];
            }
            y5[d] = y[d] + step * a5;
            let sc = opts.atol + opts.rtol * y[d].abs().max(y5[d].abs());
            let e = (step * (a5 - a4) / sc).abs();
            finite &= y5[d].is_finite() && e.is_finite();
            err = err.max(e);
        }
        steps += 1;
        if !finite {
            h = step.abs() * 0.2;
            continue;
        }
        if err <= 1.0 {
            t = if hit_target { target } else { t + step };
            y = y5;
            k[0] = k[6];
            let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = if hit_target { h.max(step.abs() * grow) } else { step.abs() * grow };
            while next < outputs.len() && (outputs[next] - t) * dir <= 0.0 {
                run.outputs.push(y);
                next += 1;
            }
            if let Some(e) = event(t, &y) {
                run.stop = Stop::Event(e);
                break;
            }
        } else {
            h = step.abs() * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    run.t_last = t;
    run.y_last = y;
    run
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let pts: Vec<f64> = (1..=10).map(|i| i as f64 * 0.1).collect();
        let run = integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], &pts, &OdeOptions::default(), |_, _| None::<()>);
        assert_eq!(run.stop, Stop::Completed);
        for (t, y) in pts.iter().zip(&run.outputs) {
            assert!((y[0] - t.exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn backward_oscillator() {
        let run = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [0.0, 1.0],
            &[-3.0],
            &OdeOptions::default(),
            |_, _| None::<()>,
        );
        assert!((run.outputs[0][0] - (-3f64).sin()).abs() < 1e-9);
    }

    #[test]
    fn event_stops_blowup() {
        // y' = y^2 blows up at t = 1
        let run = integrate(
            |_, y: &[f64; 1]| [y[0] * y[0]],
            0.0,
            [1.0],
            &[2.0],
            &OdeOptions::default(),
            |_, y| (y[0] > 1e8).then_some("overflow"),
        );
        assert_eq!(run.stop, Stop::Event("overflow"));
        assert!((run.t_last - 1.0).abs() < 1e-6);
    }
}
