//! Simultaneous complex root finding for primitive integer polynomials.
//!
//! Aberth-Ehrlich sweeps from Newton-polygon starting points, followed by a
//! certification pass built on the Gerschgorin containment: with pairwise
//! distinct z_i and Weierstrass corrections W_i = P(z_i)/(a_d ∏_{j≠i}
//! (z_i - z_j)), every root of P lies in ∪_i D(z_i, d·|W_i|), and a
//! connected component made of m disks holds exactly m roots counted with
//! multiplicity. Computed radii are inflated by rigorous Horner evaluation
//! error bounds, and overlapping disks are merged so the radius reported
//! for each root encloses a true root. A precision ladder retries with
//! more bits when the certified radii miss the target.

use num_traits::ToPrimitive;
use rug::ops::CompleteRound;
use rug::{Complex, Float};

use crate::poly::IntPolynomial;
use crate::Integer;

/// Converged roots with certified data. `radii[i]` bounds the distance from
/// `roots[i]` to a true root of the input (multiplicities respected across
/// merged disk clusters), and `residuals[i]` bounds |P(roots[i])|.
pub(crate) struct RootComputation {
    pub roots: Vec<Complex>,
    pub radii: Vec<Float>,
    pub residuals: Vec<Float>,
    /// Working precision of the accepted pass, in bits.
    pub precision: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct NonConvergence {
    /// Largest working precision tried before giving up.
    pub precision: u32,
}

/// log2 of a nonzero big integer's absolute value, to f64 accuracy.
pub(crate) fn log2_magnitude(n: &Integer) -> f64 {
    let bits = n.bits();
    if bits <= 53 {
        let v: f64 = match n.to_f64() {
            Some(v) => v.abs(),
            None => return bits as f64,
        };
        return v.log2();
    }
    let shifted = n.magnitude() >> (bits - 53);
    let top: f64 = shifted.to_string().parse().unwrap_or(f64::MAX);
    (bits - 53) as f64 + top.log2()
}

pub(crate) fn big_to_rug(n: &Integer) -> rug::Integer {
    rug::Integer::from_str_radix(&n.to_str_radix(16), 16).expect("hex digits are valid")
}

fn coeff_float(n: &Integer, prec: u32) -> Float {
    Float::with_val(prec, big_to_rug(n))
}

/// Upper convex hull of (i, y_i) over the nonzero coefficients, then one
/// circle of starting points per hull edge: an edge from (i₁, y₁) to
/// (i₂, y₂) contributes i₂ - i₁ points of radius 2^((y₁-y₂)/(i₂-i₁)).
fn newton_polygon_initials(coeffs: &[Integer], prec: u32) -> Vec<Complex> {
    let d = coeffs.len() - 1;
    let pts: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, a)| !num_traits::Zero::is_zero(*a))
        .map(|(i, a)| (i, log2_magnitude(a)))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &(x, y) in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // Pop while the middle point lies on or below the chord.
            if (x2 - x1) as f64 * (y - y1) - (y2 - y1) * (x - x1) as f64 >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    let mut out = Vec::with_capacity(d);
    for pair in hull.windows(2) {
        let (i1, y1) = pair[0];
        let (i2, y2) = pair[1];
        let m = i2 - i1;
        let radius = ((y1 - y2) / m as f64).exp2().clamp(1e-280, 1e280);
        for j in 0..m {
            let theta = std::f64::consts::TAU * (j as f64 + 0.5) / m as f64
                + std::f64::consts::TAU * i1 as f64 / d as f64
                + 0.4;
            out.push(Complex::with_val(
                prec,
                (radius * theta.cos(), radius * theta.sin()),
            ));
        }
    }
    debug_assert_eq!(out.len(), d);
    out
}

/// P(z) and P'(z) by simultaneous Horner, plus upper bounds on the absolute
/// evaluation errors. The bounds use the scale sum Σ|a_i||z|^i computed in
/// low precision with a 4x safety margin over the standard running-error
/// estimate.
fn horner(
    coeffs: &[Complex],
    mags: &[Float],
    z: &Complex,
    w: u32,
) -> (Complex, Complex, Float, Float) {
    let d = coeffs.len() - 1;
    let mut p = coeffs[d].clone();
    let mut dp = Complex::with_val(w, 0);
    for a in coeffs[..d].iter().rev() {
        dp = dp * z + &p;
        p = p * z + a;
    }
    let az = Float::with_val(64, z.abs_ref());
    let mut scale = mags[d].clone();
    let mut dscale = Float::with_val(64, 0);
    for m in mags[..d].iter().rev() {
        dscale = dscale * &az + &scale;
        scale = scale * &az + m;
    }
    let unit = Float::with_val(64, 2f64.powi(-(w as i32)));
    let err_p = (8 * d + 16) as f64 * scale * &unit;
    let err_dp = (8 * d + 16) as f64 * dscale * unit;
    (p, dp, err_p, err_dp)
}

/// One Jacobi-style Aberth sweep. Returns the largest correction made to an
/// unlocked root, and locks roots whose correction is below the threshold.
fn sweep(
    zs: &mut [Complex],
    locked: &mut [bool],
    coeffs: &[Complex],
    mags: &[Float],
    w: u32,
    lock_bits: u32,
) -> Float {
    let n = zs.len();
    let mut max_corr = Float::with_val(64, 0);
    let lock_scale = Float::with_val(64, 2f64.powi(-(lock_bits as i32)));
    for i in 0..n {
        if locked[i] {
            continue;
        }
        let (p, dp, err_p, _) = horner(coeffs, mags, &zs[i], w);
        let p_abs = Float::with_val(64, p.abs_ref());
        // Residual already at the evaluation noise floor: stop moving.
        if p_abs <= Float::with_val(64, 4) * &err_p {
            locked[i] = true;
            continue;
        }
        if Float::with_val(64, dp.abs_ref()).is_zero() {
            perturb(&mut zs[i], i, w);
            continue;
        }
        let newton = Complex::with_val(w, &p / &dp);
        let mut s = Complex::with_val(w, 0);
        let mut collision = false;
        for j in 0..n {
            if j == i {
                continue;
            }
            let diff = (&zs[i] - &zs[j]).complete((w, w));
            if diff.is_zero() {
                collision = true;
                break;
            }
            s += diff.recip();
        }
        if collision {
            perturb(&mut zs[i], i, w);
            continue;
        }
        let denom = Complex::with_val(w, 1) - (&newton * &s).complete((w, w));
        let step = if Float::with_val(64, denom.abs_ref()).is_zero() {
            newton
        } else {
            Complex::with_val(w, &newton / &denom)
        };
        let corr = Float::with_val(64, step.abs_ref());
        zs[i] -= step;
        let scale = Float::with_val(64, zs[i].abs_ref()).max(&Float::with_val(64, 1));
        if corr <= scale * &lock_scale {
            locked[i] = true;
        }
        if corr > max_corr {
            max_corr = corr;
        }
    }
    max_corr
}

/// Deterministic nudge used when two iterates collide or a derivative
/// vanishes; magnitude is far above the noise floor but below any target
/// accuracy at the entry precision.
fn perturb(z: &mut Complex, i: usize, w: u32) {
    let eps = Float::with_val(w, 2f64.powi(-((w / 3) as i32)));
    let re = Float::with_val(w, &eps * (i + 1) as f64);
    *z += Complex::with_val(w, (re, eps));
}

struct Certified {
    radii: Vec<Float>,
    residuals: Vec<Float>,
}

/// Gerschgorin radii d·|P(z_i)| / (|a_d|·∏_{j≠i}|z_i - z_j|), inflated by
/// the evaluation error bound and a rounding slop factor. None when two
/// centers coincide (certification needs distinct z_i).
fn certify(zs: &[Complex], coeffs: &[Complex], mags: &[Float], w: u32) -> Option<Certified> {
    let n = zs.len();
    let d = n as f64;
    let lead = &mags[mags.len() - 1];
    let mut radii = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    // Relative rounding slop for the n-term product, with margin.
    let slop =
        Float::with_val(64, 1) + Float::with_val(64, 2f64.powi(-(w as i32))) * (8.0 * d + 16.0);
    for i in 0..n {
        let (p, _, err_p, _) = horner(coeffs, mags, &zs[i], w);
        let residual = Float::with_val(64, p.abs_ref()) + &err_p;
        let mut log_prod = Float::with_val(64, lead.clone().log2());
        for j in 0..n {
            if j == i {
                continue;
            }
            let diff = (&zs[i] - &zs[j]).complete((w, w));
            let a = Float::with_val(64, diff.abs_ref());
            if a.is_zero() {
                return None;
            }
            log_prod += a.log2();
        }
        // radius = d·residual / prod, via logs so the product cannot
        // overflow; exp2 saturates safely at the Float range.
        let log_radius = (Float::with_val(64, d * residual.clone()) * &slop).log2() - &log_prod;
        radii.push(log_radius.exp2());
        residuals.push(residual);
    }
    Some(Certified { radii, residuals })
}

/// Merges overlapping certified disks and returns, for each root, the
/// radius of a disk around it that encloses its whole component.
fn enclosing_radii(zs: &[Complex], radii: &[Float]) -> Vec<Float> {
    let n = zs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = Float::with_val(64, (&zs[i] - &zs[j]).complete((64, 64)).abs_ref());
            let sum = (&radii[i] + &radii[j]).complete(64);
            if dist <= sum {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut out = radii.to_vec();
    for i in 0..n {
        for j in 0..n {
            if i == j || find(&mut parent, i) != find(&mut parent, j) {
                continue;
            }
            let dist = Float::with_val(64, (&zs[i] - &zs[j]).complete((64, 64)).abs_ref());
            let reach = dist + &radii[j];
            if reach > out[i] {
                out[i] = reach;
            }
        }
    }
    out
}

fn raise_precision(zs: &mut [Complex], w: u32) {
    for z in zs.iter_mut() {
        z.set_prec(w);
    }
}

/// Full pipeline: deflate zero roots, converge the rest, certify, and merge.
/// `initials` (when its length matches the deflated degree) skips the
/// global search phase, which is how preimage chains warm-start each level
/// from square roots of the previous one.
pub(crate) fn find_roots(
    p: &IntPolynomial,
    requested: u32,
    initials: Option<Vec<Complex>>,
) -> Result<RootComputation, NonConvergence> {
    let all = p.coeffs();
    let zeros = all
        .iter()
        .take_while(|a| num_traits::Zero::is_zero(*a))
        .count();
    let coeffs_int: Vec<Integer> = all[zeros..].to_vec();
    let d = coeffs_int.len() - 1;
    let target_bits = (requested / 2).clamp(48, 192);
    let zero_entry = |out: &mut RootComputation| {
        for _ in 0..zeros {
            out.roots.push(Complex::with_val(requested, 0));
            out.radii.push(Float::with_val(64, 0));
            out.residuals.push(Float::with_val(64, 0));
        }
    };
    if d == 0 {
        let mut out = RootComputation {
            roots: Vec::new(),
            radii: Vec::new(),
            residuals: Vec::new(),
            precision: requested,
        };
        zero_entry(&mut out);
        return Ok(out);
    }

    // Precision plan from the coefficient sizes and a root-magnitude bound.
    let logs: Vec<f64> = coeffs_int.iter().map(log2_magnitude).collect();
    let l1_bits = logs.iter().cloned().fold(f64::MIN, f64::max) + (d as f64 + 1.0).log2();
    let log_r = 1.0
        + (0..d)
            .filter(|&i| !num_traits::Zero::is_zero(&coeffs_int[i]))
            .map(|i| (logs[i] - logs[d]) / (d - i) as f64)
            .fold(0.0f64, f64::max);
    let eval_bits = (l1_bits + d as f64 * log_r.max(0.0)).ceil() as u32 + 16;
    let mut w = eval_bits + target_bits + 128;

    let to_complex = |ints: &[Integer], prec: u32| -> (Vec<Complex>, Vec<Float>) {
        let cs: Vec<Complex> = ints
            .iter()
            .map(|a| Complex::with_val(prec, coeff_float(a, prec)))
            .collect();
        let ms: Vec<Float> = ints.iter().map(|a| coeff_float(a, 64).abs()).collect();
        (cs, ms)
    };

    let mut zs = match initials {
        Some(init) if init.len() == d => {
            let mut zs = init;
            raise_precision(&mut zs, w);
            zs
        }
        _ => {
            // Global phase at modest precision from Newton-polygon circles.
            let w1 = 192.max(l1_bits.ceil() as u32 + 48);
            let (coeffs1, mags1) = to_complex(&coeffs_int, w1);
            let mut zs = newton_polygon_initials(&coeffs_int, w1);
            let mut locked = vec![false; d];
            for _ in 0..400 {
                let corr = sweep(&mut zs, &mut locked, &coeffs1, &mags1, w1, 60);
                if locked.iter().all(|&l| l) || corr < Float::with_val(64, 2f64.powi(-64)) {
                    break;
                }
            }
            raise_precision(&mut zs, w);
            zs
        }
    };

    // Refinement ladder: polish at full precision, certify, and retry with
    // half again as many bits while the certified radii miss the target.
    let target = Float::with_val(64, 2f64.powi(-(target_bits as i32)));
    for _attempt in 0..3 {
        let (coeffs_c, mags) = to_complex(&coeffs_int, w);
        let lock_bits = (target_bits + 48).min(w - 64);
        let mut locked = vec![false; d];
        for _ in 0..64 {
            let corr = sweep(&mut zs, &mut locked, &coeffs_c, &mags, w, lock_bits);
            if locked.iter().all(|&l| l)
                || corr < Float::with_val(64, 2f64.powi(-(lock_bits as i32)))
            {
                break;
            }
        }
        if let Some(cert) = certify(&zs, &coeffs_c, &mags, w) {
            let worst = cert
                .radii
                .iter()
                .fold(Float::with_val(64, 0), |acc, r| acc.max(r));
            if worst <= target {
                let radii = enclosing_radii(&zs, &cert.radii);
                let mut out = RootComputation {
                    roots: Vec::new(),
                    radii: Vec::new(),
                    residuals: Vec::new(),
                    precision: w,
                };
                zero_entry(&mut out);
                out.roots.extend(zs);
                out.radii.extend(radii);
                out.residuals.extend(cert.residuals);
                return Ok(out);
            }
        }
        w = w + w / 2 + 256;
        raise_precision(&mut zs, w);
    }
    Err(NonConvergence { precision: w })
}
