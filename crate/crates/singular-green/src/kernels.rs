//! Green-kernel catalog.
//!
//! All kernels satisfy the two-sided model estimate
//! `G(x, y) ~ |x-y|^(2s-N) (delta(x)/|x-y| ^ 1)^gamma (delta(y)/|x-y| ^ 1)^gamma`
//! with interior order `s` and boundary exponent `gamma`:
//!
//! - `Synthetic`: the right-hand side of the estimate taken verbatim as a
//!   kernel (constants 1), with `gamma` free in `(0, 1]`;
//! - `RflInterval` / `RflBallRadial`: the classical closed-form kernel of the
//!   restricted fractional Laplacian on a ball (interval in 1D), `gamma = s`;
//! - `SflInterval`: truncated eigenfunction expansion of the spectral
//!   fractional Laplacian on the interval, `gamma = 1` (verification only:
//!   the solvers reject it because `gamma >= 2s` at `s < 1/2`).
//!
//! Evaluation goes through [`PairGeometry`] so that boundary distances far
//! below machine epsilon keep full relative precision.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma as gamma_fn;
use std::sync::OnceLock;

use crate::geometry::{Domain, PairGeometry};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    RflInterval,
    RflBallRadial,
    SflInterval,
    Synthetic,
}

/// A fully validated kernel description.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub s: f64,
    pub gamma: f64,
    pub dim: usize,
    /// Eigenfunction truncation; meaningful for the spectral family only.
    pub truncation: usize,
}

pub const DEFAULT_SFL_TRUNCATION: usize = 4096;

impl KernelSpec {
    pub fn rfl_interval(s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "rfl_interval requires s in (0, 1/2), got {s}"
            )));
        }
        Ok(KernelSpec {
            family: KernelFamily::RflInterval,
            s,
            gamma: s,
            dim: 1,
            truncation: 0,
        })
    }

    pub fn rfl_ball(s: f64, dim: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidParameter(format!(
                "rfl_ball_radial requires dim 2 or 3, got {dim}"
            )));
        }
        if !(s > 0.0 && s < 1.0 && (dim as f64) > 2.0 * s) {
            return Err(Error::InvalidParameter(format!(
                "rfl_ball_radial requires s in (0, 1) with dim > 2s, got s={s}, dim={dim}"
            )));
        }
        Ok(KernelSpec {
            family: KernelFamily::RflBallRadial,
            s,
            gamma: s,
            dim,
            truncation: 0,
        })
    }

    pub fn sfl_interval(s: f64, truncation: usize) -> Result<Self> {
        if !(s > 0.0 && s < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "sfl_interval requires s in (0, 1/2), got {s}"
            )));
        }
        if truncation == 0 {
            return Err(Error::InvalidParameter("sfl truncation must be positive".into()));
        }
        Ok(KernelSpec {
            family: KernelFamily::SflInterval,
            s,
            gamma: 1.0,
            dim: 1,
            truncation,
        })
    }

    pub fn synthetic(s: f64, gamma: f64) -> Result<Self> {
        if !(s > 0.0 && s < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "synthetic requires s in (0, 1/2), got {s}"
            )));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "synthetic requires gamma in (0, 1], got {gamma}"
            )));
        }
        Ok(KernelSpec {
            family: KernelFamily::Synthetic,
            s,
            gamma,
            dim: 1,
            truncation: 0,
        })
    }

    /// Build from raw fields, enforcing the family invariants.
    pub fn new(
        family: KernelFamily,
        s: f64,
        gamma: Option<f64>,
        dim: Option<usize>,
        truncation: Option<usize>,
    ) -> Result<Self> {
        match family {
            KernelFamily::RflInterval => Self::rfl_interval(s),
            KernelFamily::RflBallRadial => Self::rfl_ball(s, dim.unwrap_or(2)),
            KernelFamily::SflInterval => {
                Self::sfl_interval(s, truncation.unwrap_or(DEFAULT_SFL_TRUNCATION))
            }
            KernelFamily::Synthetic => {
                let gamma = gamma.ok_or_else(|| {
                    Error::InvalidParameter("synthetic kernel needs an explicit gamma".into())
                })?;
                Self::synthetic(s, gamma)
            }
        }
    }

    pub fn domain(&self) -> Domain {
        match self.family {
            KernelFamily::RflBallRadial => Domain::RadialBall(self.dim),
            _ => Domain::Interval,
        }
    }

    /// Truncation tail size `lambda_K^(-s)` for the spectral family.
    pub fn truncation_tail(&self) -> Option<f64> {
        match self.family {
            KernelFamily::SflInterval => {
                let lam = (self.truncation as f64 * std::f64::consts::PI).powi(2);
                Some(lam.powf(-self.s))
            }
            _ => None,
        }
    }

    pub fn is_synthetic(&self) -> bool {
        self.family == KernelFamily::Synthetic
    }

    /// Kernel value at two distinct interior points.
    ///
    /// For the radial-ball family the coordinates are radii of two points on a
    /// common ray through the origin; the angular reduction lives in
    /// [`radial_average`].
    pub fn kernel_value(&self, x: f64, y: f64) -> f64 {
        assert!(x != y, "kernel diagonal is handled by the operator module");
        self.value_from_geometry(&PairGeometry::from_points(&self.domain(), x, y))
    }

    /// Kernel value from exact pair geometry (the assembly path).
    pub fn value_from_geometry(&self, geom: &PairGeometry) -> f64 {
        match self.family {
            KernelFamily::Synthetic => model_from_geometry(self.s, self.gamma, 1, geom),
            KernelFamily::RflInterval => rfl_from_geometry(self.s, 1, geom),
            KernelFamily::RflBallRadial => rfl_from_geometry(self.s, self.dim, geom),
            KernelFamily::SflInterval => sfl_from_geometry(self.s, self.truncation, geom),
        }
    }

    /// Limit of `kernel_value * |x-y|^(N-2s)` as `y -> x` at fixed interior `x`
    /// (given through its boundary distance). This is the bounded remainder
    /// used by the diagonal correction.
    pub fn diagonal_remainder(&self, delta_x: f64) -> f64 {
        match self.family {
            KernelFamily::Synthetic => 1.0,
            KernelFamily::RflInterval | KernelFamily::RflBallRadial => {
                bgr_kappa(self.dim, self.s) * bgr_complete(self.dim, self.s)
            }
            // Finite truncation caps the on-diagonal blow-up of the spectral
            // kernel; probe the prefactor at a resolved separation instead.
            KernelFamily::SflInterval => {
                let h = 1e-6_f64.min(0.25 * delta_x);
                let geom = PairGeometry {
                    dist: h,
                    delta_x,
                    delta_y: delta_x - h,
                    side_x: 1,
                    side_y: 1,
                };
                sfl_from_geometry(self.s, self.truncation, &geom) * h.powf(1.0 - 2.0 * self.s)
            }
        }
    }
}

/// Right-hand side of the two-sided kernel estimate with constants 1.
pub fn model_value(s: f64, gamma: f64, dim: usize, x: f64, y: f64, domain: &Domain) -> f64 {
    model_from_geometry(s, gamma, dim, &PairGeometry::from_points(domain, x, y))
}

fn model_from_geometry(s: f64, gamma: f64, dim: usize, geom: &PairGeometry) -> f64 {
    let r = geom.dist;
    r.powf(2.0 * s - dim as f64)
        * (geom.delta_x / r).min(1.0).powf(gamma)
        * (geom.delta_y / r).min(1.0).powf(gamma)
}

/// Closed-form restricted-fractional-Laplacian kernel on the unit ball,
/// evaluated at collinear points; `1 - x^2` is carried as `delta (2 - delta)`.
fn rfl_from_geometry(s: f64, dim: usize, geom: &PairGeometry) -> f64 {
    let r = geom.dist;
    let px = geom.delta_x * (2.0 - geom.delta_x);
    let py = geom.delta_y * (2.0 - geom.delta_y);
    let r0 = px * py / (r * r);
    bgr_kappa(dim, s) * r.powf(2.0 * s - dim as f64) * bgr_incomplete(dim, s, r0)
}

/// `kappa_{N,s} = Gamma(N/2) / (2^{2s} pi^{N/2} Gamma(s)^2)`.
pub fn bgr_kappa(dim: usize, s: f64) -> f64 {
    let n2 = dim as f64 / 2.0;
    gamma_fn(n2)
        / (2.0_f64.powf(2.0 * s) * std::f64::consts::PI.powf(n2) * gamma_fn(s) * gamma_fn(s))
}

/// `int_0^inf t^(s-1) (1+t)^(-N/2) dt = Beta(s, N/2 - s)`, finite for `N > 2s`.
pub fn bgr_complete(dim: usize, s: f64) -> f64 {
    let n2 = dim as f64 / 2.0;
    gamma_fn(s) * gamma_fn(n2 - s) / gamma_fn(n2)
}

/// Incomplete integral `int_0^{r0} t^(s-1) (1+t)^(-N/2) dt`.
///
/// Series expansion of `(1+t)^(-N/2)` for small upper limits, a fixed
/// Gauss-Legendre panel away from the endpoint singularity, and the
/// complete-integral complement for `r0 > 1`.
pub fn bgr_incomplete(dim: usize, s: f64, r0: f64) -> f64 {
    if r0 <= 0.0 {
        return 0.0;
    }
    let n2 = dim as f64 / 2.0;
    if r0 <= 1.0 {
        head_integral(n2, s, r0)
    } else {
        // tail substitution u = 1/t turns the range [r0, inf) into (0, 1/r0]
        // with the same head form at exponent N/2 - s
        bgr_complete(dim, s) - head_integral(n2, n2 - s, 1.0 / r0)
    }
}

/// `int_0^x u^(c-1) (1+u)^(-N/2) du` for `x <= 1`, to near machine precision.
fn head_integral(n2: f64, c: f64, x: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&x));
    if x <= 0.5 {
        head_series(n2, c, x)
    } else {
        head_series(n2, c, 0.5) + gauss_panel(0.5, x, |t| t.powf(c - 1.0) * (1.0 + t).powf(-n2))
    }
}

/// Binomial series for the head integral at `x <= 1/2`.
fn head_series(n2: f64, c: f64, x: f64) -> f64 {
    let mut coef = 1.0; // binom(-n2, k), iteratively
    let mut power = x.powf(c);
    let mut sum = power / c;
    for k in 1..200 {
        coef *= (-n2 - (k as f64 - 1.0)) / k as f64;
        power *= x;
        let term = coef * power / (c + k as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() && k > 4 {
            break;
        }
    }
    sum
}

/// Spectral interval kernel: truncated Dirichlet eigen-expansion of the unit
/// interval `(0,1)` composed with the affine map from `(-1,1)`. The map sends
/// a point at boundary distance `delta` on side `+1` to `1 - delta/2` and on
/// side `-1` to `delta/2`; the sines are folded so the tiny argument is used
/// directly.
fn sfl_from_geometry(s: f64, truncation: usize, geom: &PairGeometry) -> f64 {
    // sin(k pi u) at u = delta/2 (left) or u = 1 - delta/2 (right, folded)
    let sin_k = |k: usize, side: i8, delta: f64| -> f64 {
        let a = (k as f64 * std::f64::consts::PI * 0.5 * delta).sin();
        if side > 0 && k % 2 == 0 {
            -a
        } else {
            a
        }
    };
    let mut sum = 0.0;
    for k in 1..=truncation {
        let kpi = k as f64 * std::f64::consts::PI;
        sum += kpi.powf(-2.0 * s)
            * 2.0
            * sin_k(k, geom.side_x, geom.delta_x)
            * sin_k(k, geom.side_y, geom.delta_y);
    }
    sum
}

/// Spherical average of the ball kernel over directions of the second point:
/// `(1/|S^(N-1)|) int_{S^(N-1)} G(r e1, rho w) dw`, with the radii given
/// through their boundary distances.
///
/// The integrand peaks at angle 0 with width `|r - rho| / sqrt(r rho)`; a sinh
/// substitution flattens the peak and panel counts double until the value
/// settles.
pub fn radial_average(spec: &KernelSpec, delta_r: f64, delta_rho: f64) -> f64 {
    assert_eq!(spec.family, KernelFamily::RflBallRadial);
    let dim = spec.dim;
    let s = spec.s;
    let kappa = bgr_kappa(dim, s);
    let r = 1.0 - delta_r;
    let rho = 1.0 - delta_rho;
    let gap = (delta_r - delta_rho).abs();
    let p = delta_r * (2.0 - delta_r) * delta_rho * (2.0 - delta_rho);
    let g_of_theta = |theta: f64| -> f64 {
        let half = (0.5 * theta).sin();
        let d2 = gap * gap + 4.0 * r * rho * half * half;
        let d = d2.sqrt();
        let r0 = p / d2;
        let base = kappa * d.powf(2.0 * s - dim as f64) * bgr_incomplete(dim, s, r0);
        match dim {
            2 => base / std::f64::consts::PI,
            _ => 0.5 * base * theta.sin(),
        }
    };

    let width = (gap / (r * rho).sqrt()).max(1e-300);
    let vmax = (std::f64::consts::PI / width).asinh();
    let transformed = |v: f64| {
        let theta = width * v.sinh();
        g_of_theta(theta.min(std::f64::consts::PI)) * width * v.cosh()
    };

    let mut panels = (vmax / 1.5).ceil() as usize + 1;
    let mut prev = composite_gauss(0.0, vmax, panels, &transformed);
    for _ in 0..6 {
        panels *= 2;
        let next = composite_gauss(0.0, vmax, panels, &transformed);
        let settled = (next - prev).abs() <= 1e-10 * next.abs().max(1e-300);
        prev = next;
        if settled {
            break;
        }
    }
    prev
}

/// Ratio scan of an exact kernel against the model estimate.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SandwichReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub samples: usize,
}

/// Sample `samples` random interior pairs and report the extreme ratios
/// `kernel_value / model_value`. Both must be positive and finite for the
/// kernel to satisfy the two-sided estimate on the sample.
pub fn sandwich_check(spec: &KernelSpec, samples: usize, seed: u64) -> SandwichReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = spec.domain();
    let (lo, hi) = match domain {
        Domain::Interval => (-1.0, 1.0),
        Domain::RadialBall(_) => (0.0, 1.0),
    };
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = 0.0_f64;
    let mut taken = 0;
    while taken < samples {
        let x: f64 = rng.gen_range(lo..hi);
        let y: f64 = rng.gen_range(lo..hi);
        if (x - y).abs() < 1e-9 || domain.delta(x) <= 0.0 || domain.delta(y) <= 0.0 {
            continue;
        }
        let ratio =
            spec.kernel_value(x, y) / model_value(spec.s, spec.gamma, spec.dim, x, y, &domain);
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        taken += 1;
    }
    SandwichReport {
        min_ratio,
        max_ratio,
        samples,
    }
}

// ---------------------------------------------------------------------------
// Gauss-Legendre plumbing
// ---------------------------------------------------------------------------

const GAUSS_ORDER: usize = 20;

fn gauss_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(GAUSS_ORDER))
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1],
/// via Newton iteration on the Legendre recurrence.
fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Single Gauss-Legendre panel on `[a, b]`.
pub fn gauss_panel(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (nodes, weights) = gauss_rule();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        sum += w * f(mid + half * x);
    }
    sum * half
}

/// Composite Gauss-Legendre rule with `panels` equal panels on `[a, b]`.
pub fn composite_gauss(a: f64, b: f64, panels: usize, f: &impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| gauss_panel(a + i as f64 * h, a + (i + 1) as f64 * h, f))
        .sum()
}
