use crate::error::{Error, Result};

/// Highest supported spline degree.
pub const MAX_DEGREE: usize = 10;
const MAX_NODES: usize = MAX_DEGREE + 3;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `(1/r!) ∂^r/∂t^r (x - t)_+^ℓ`.
///
/// For the zeroth power the step is right-continuous in `x`, except in
/// `left_limit` mode where `x == t` yields 0.
fn tpf_taylor(x: f64, t: f64, degree: usize, order: usize, left_limit: bool) -> f64 {
    if order > degree {
        return 0.0;
    }
    let p = degree - order;
    let d = x - t;
    let base = if p == 0 {
        if d > 0.0 || (d == 0.0 && !left_limit) {
            1.0
        } else {
            0.0
        }
    } else if d > 0.0 {
        d.powi(p as i32)
    } else {
        0.0
    };
    let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * binomial(degree, order) * base
}

/// Divided difference `[z_0, …, z_m](x - ·)_+^ℓ` over the second argument.
///
/// The nodes may be given in any order; coincident nodes are handled through
/// the Hermite (derivative) limit. A node repeated more than `ℓ + 1` times
/// makes the difference undefined. `left_limit` evaluates the limit from the
/// left in `x`, used at the right end of the domain.
pub fn truncated_power_dd(nodes: &[f64], x: f64, degree: usize, left_limit: bool) -> Result<f64> {
    let m = nodes.len();
    if m == 0 || m > MAX_NODES {
        return Err(Error::Config(format!(
            "divided difference needs 1..={MAX_NODES} nodes, got {m}"
        )));
    }
    let mut z = [0.0f64; MAX_NODES];
    z[..m].copy_from_slice(nodes);
    let z = &mut z[..m];
    z.sort_by(f64::total_cmp);

    let mut run = 1;
    for i in 1..m {
        if z[i] == z[i - 1] {
            run += 1;
            if run > degree + 1 {
                return Err(Error::Multiplicity {
                    node: z[i],
                    count: run,
                    order: m - 1,
                    max: degree + 1,
                });
            }
        } else {
            run = 1;
        }
    }

    let mut col = [0.0f64; MAX_NODES];
    for i in 0..m {
        col[i] = tpf_taylor(x, z[i], degree, 0, left_limit);
    }
    for r in 1..m {
        for i in 0..m - r {
            let dz = z[i + r] - z[i];
            col[i] = if dz == 0.0 {
                tpf_taylor(x, z[i], degree, r, left_limit)
            } else {
                (col[i + 1] - col[i]) / dz
            };
        }
    }
    Ok(col[0])
}
