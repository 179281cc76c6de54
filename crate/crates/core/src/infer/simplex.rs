//! Nelder-Mead downhill simplex.

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    /// Initial edge length along each axis.
    pub step: f64,
    /// Stop when every vertex lies within this distance of the best one.
    pub diameter_tol: f64,
    pub max_evals: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            step: 0.5,
            diameter_tol: 1e-8,
            max_evals: 100_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Affine combination `base + coef * (base - other)`.
fn along(base: &[f64], other: &[f64], coef: f64) -> Vec<f64> {
    base.iter()
        .zip(other)
        .map(|(b, o)| b + coef * (b - o))
        .collect()
}

/// Minimize `f` from `start`. Non-finite objective values are treated as `+inf`.
pub fn minimize<F>(mut f: F, start: &[f64], opts: &SimplexOptions) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut vertices: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    vertices.push((start.to_vec(), eval(start, &mut evals)));
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += opts.step;
        let fv = eval(&v, &mut evals);
        vertices.push((v, fv));
    }

    let mut converged = false;
    while evals < opts.max_evals {
        vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &vertices[0].0;
        let diameter = vertices[1..]
            .iter()
            .map(|(v, _)| distance(v, best))
            .fold(0.0, f64::max);
        if diameter < opts.diameter_tol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; dim];
        for (v, _) in &vertices[..dim] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / dim as f64;
            }
        }
        let (worst, f_worst) = vertices[dim].clone();
        let f_best = vertices[0].1;
        let f_second = vertices[dim - 1].1;

        let reflected = along(&centroid, &worst, REFLECT);
        let f_reflected = eval(&reflected, &mut evals);
        if f_reflected < f_best {
            let expanded = along(&centroid, &worst, EXPAND);
            let f_expanded = eval(&expanded, &mut evals);
            vertices[dim] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < f_second {
            vertices[dim] = (reflected, f_reflected);
            continue;
        }
        let (contracted, f_contracted) = if f_reflected < f_worst {
            let c = along(&centroid, &worst, CONTRACT * REFLECT);
            let fc = eval(&c, &mut evals);
            (c, fc)
        } else {
            let c = along(&centroid, &worst, -CONTRACT);
            let fc = eval(&c, &mut evals);
            (c, fc)
        };
        if f_contracted < f_reflected.min(f_worst) {
            vertices[dim] = (contracted, f_contracted);
            continue;
        }
        let best = vertices[0].0.clone();
        for (v, fv) in vertices.iter_mut().skip(1) {
            for (x, b) in v.iter_mut().zip(&best) {
                *x = b + SHRINK * (*x - b);
            }
            *fv = eval(v, &mut evals);
        }
    }

    vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, value) = vertices.swap_remove(0);
    SimplexResult {
        point,
        value,
        evals,
        converged,
    }
}
