//! Nelder–Mead simplex minimization in two dimensions.

#[derive(Debug, Clone, Copy)]
pub struct Minimum {
    pub point: [f64; 2],
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Minimizes `f` from `start`, with the initial simplex spanning `step` along
/// each axis. Stops when the spread of simplex values falls below `f_tol`
/// and the simplex is smaller than `x_tol`, or after `max_evals` evaluations.
pub fn nelder_mead<F>(
    mut f: F,
    start: [f64; 2],
    step: f64,
    f_tol: f64,
    x_tol: f64,
    max_evals: usize,
) -> Minimum
where
    F: FnMut([f64; 2]) -> f64,
{
    let mut simplex = [
        start,
        [start[0] + step, start[1]],
        [start[0], start[1] + step],
    ];
    let mut values = simplex.map(&mut f);
    let mut evals = 3;
    let mut converged = false;

    while evals < max_evals {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);

        let spread = values[2] - values[0];
        let size = simplex[1..]
            .iter()
            .map(|p| (p[0] - simplex[0][0]).abs().max((p[1] - simplex[0][1]).abs()))
            .fold(0.0, f64::max);
        if spread <= f_tol && size <= x_tol {
            converged = true;
            break;
        }

        let centroid = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let along = |t: f64| {
            [
                centroid[0] + t * (simplex[2][0] - centroid[0]),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };

        let reflected = along(-1.0);
        let fr = f(reflected);
        evals += 1;
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(expanded);
            evals += 1;
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
            continue;
        }
        if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[2] {
            let c = along(-0.5);
            (c, f(c))
        } else {
            let c = along(0.5);
            (c, f(c))
        };
        evals += 1;
        if fc < values[2].min(fr) {
            simplex[2] = contracted;
            values[2] = fc;
            continue;
        }
        // shrink toward the best vertex
        for i in 1..3 {
            simplex[i] = [
                simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0]),
                simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1]),
            ];
            values[i] = f(simplex[i]);
        }
        evals += 2;
    }

    let best = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    Minimum {
        point: simplex[best],
        value: values[best],
        evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_rosenbrock_minimum() {
        let m = nelder_mead(
            |[x, y]| (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2),
            [-1.2, 1.0],
            0.1,
            1e-14,
            1e-8,
            5000,
        );
        assert!(m.converged);
        assert!((m.point[0] - 1.0).abs() < 1e-4 && (m.point[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn respects_evaluation_budget() {
        let m = nelder_mead(|[x, y]| x.sin() + y.cos(), [0.0, 0.0], 1.0, 0.0, 0.0, 40);
        assert!(!m.converged);
        assert!(m.evals <= 42);
    }
}
