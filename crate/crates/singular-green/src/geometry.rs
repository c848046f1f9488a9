//! Domains, boundary-graded quadrature grids, and grid functions.
//!
//! Two geometries are supported: the interval `(-1, 1)` and the unit ball in
//! dimension 2 or 3 reduced to its radial coordinate. Both use the distance
//! function `delta(x) = 1 - |x|` and the log normalizer `d = 2 diam = 4`.
//!
//! Grids are built from a boundary-graded partition: uniform points are mapped
//! through `t -> 1 - (1 - t)^g` on each half-interval (or on `[0, 1]` for the
//! radial coordinate), so cell widths near the boundary shrink like
//! `delta^(1 - 1/g)` times the uniform spacing. Nodes never touch the boundary.
//!
//! Strong grading drives boundary distances far below machine epsilon relative
//! to the absolute coordinate, so the grid keeps each node's distance `delta`
//! and side as primary data; absolute coordinates are derived and only used
//! where the boundary layer cannot hurt them. All pairwise distances and cell
//! moments are computed in distance space through [`Grid::pair`] and the cell
//! accessors.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Geometry of the computational domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "dim")]
pub enum Domain {
    /// The interval `(-1, 1)`.
    Interval,
    /// The unit ball in `R^dim` (`dim` is 2 or 3), reduced to the radius.
    RadialBall(usize),
}

impl Domain {
    /// Distance to the complement of the domain.
    pub fn delta(&self, x: f64) -> f64 {
        match self {
            Domain::Interval => 1.0 - x.abs(),
            Domain::RadialBall(_) => 1.0 - x,
        }
    }

    /// Twice the diameter; normalizer inside critical logarithms.
    pub fn log_normalizer(&self) -> f64 {
        4.0
    }

    /// Ambient dimension.
    pub fn ambient_dim(&self) -> usize {
        match self {
            Domain::Interval => 1,
            Domain::RadialBall(n) => *n,
        }
    }

    /// Lebesgue measure of the domain.
    pub fn measure(&self) -> f64 {
        match self {
            Domain::Interval => 2.0,
            Domain::RadialBall(2) => std::f64::consts::PI,
            Domain::RadialBall(3) => 4.0 * std::f64::consts::PI / 3.0,
            Domain::RadialBall(n) => panic!("unsupported ball dimension {n}"),
        }
    }

    /// Surface measure of the unit sphere bounding the ball.
    pub fn sphere_measure(&self) -> f64 {
        match self {
            Domain::Interval => 2.0,
            Domain::RadialBall(2) => 2.0 * std::f64::consts::PI,
            Domain::RadialBall(3) => 4.0 * std::f64::consts::PI,
            Domain::RadialBall(n) => panic!("unsupported ball dimension {n}"),
        }
    }

    /// Whether `x` lies in the boundary strip `{ delta < eta }`.
    pub fn in_boundary_strip(&self, x: f64, eta: f64) -> bool {
        self.delta(x) < eta
    }

    fn validate(&self) -> Result<()> {
        if let Domain::RadialBall(n) = self {
            if *n != 2 && *n != 3 {
                return Err(Error::InvalidParameter(format!(
                    "ball dimension must be 2 or 3, got {n}"
                )));
            }
        }
        Ok(())
    }
}

/// Exact relative position of two grid nodes, in distance space.
#[derive(Clone, Copy, Debug)]
pub struct PairGeometry {
    /// Separation `|x - y|`.
    pub dist: f64,
    /// Boundary distance of the first point.
    pub delta_x: f64,
    /// Boundary distance of the second point.
    pub delta_y: f64,
    /// Side carrying the first point (-1 left, +1 right/radial).
    pub side_x: i8,
    /// Side carrying the second point.
    pub side_y: i8,
}

impl PairGeometry {
    /// Build from absolute coordinates (adequate away from the boundary layer).
    pub fn from_points(domain: &Domain, x: f64, y: f64) -> Self {
        let (sx, sy) = match domain {
            Domain::Interval => (
                if x < 0.0 { -1 } else { 1 },
                if y < 0.0 { -1 } else { 1 },
            ),
            Domain::RadialBall(_) => (1, 1),
        };
        PairGeometry {
            dist: (x - y).abs(),
            delta_x: domain.delta(x),
            delta_y: domain.delta(y),
            side_x: sx,
            side_y: sy,
        }
    }
}

/// Separation of two boundary-distance levels on given sides of the interval
/// (or radii of the ball, where both sides are +1).
pub fn side_distance(side_a: i8, delta_a: f64, side_b: i8, delta_b: f64) -> f64 {
    if side_a == side_b {
        (delta_a - delta_b).abs()
    } else {
        2.0 - delta_a - delta_b
    }
}

/// Boundary-graded quadrature grid.
///
/// Nodes are strictly interior; weights are positive and sum to the domain
/// measure (radial weights carry the `rho^(N-1) |S^(N-1)|` factor so radial
/// sums integrate over the ball). Cell `i` owns node `i`; its extent is stored
/// as the pair of boundary distances of its edges.
#[derive(Clone, Debug)]
pub struct Grid {
    pub domain: Domain,
    pub grading: f64,
    /// Absolute node coordinates; lossy within machine epsilon of the boundary.
    pub nodes: Vec<f64>,
    /// Node distances to the boundary (primary data).
    pub deltas: Vec<f64>,
    /// Side of each node: -1 for the left interval half, +1 otherwise.
    pub sides: Vec<i8>,
    pub weights: Vec<f64>,
    /// Per-cell boundary distances `(inner, outer)` of the two edges, with
    /// `inner > outer >= 0`; the cell is `{ delta in [outer, inner] }` on the
    /// node's side.
    pub cells: Vec<(f64, f64)>,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn min_delta(&self) -> f64 {
        self.deltas.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Exact pair geometry of two nodes.
    pub fn pair(&self, i: usize, j: usize) -> PairGeometry {
        PairGeometry {
            dist: side_distance(self.sides[i], self.deltas[i], self.sides[j], self.deltas[j]),
            delta_x: self.deltas[i],
            delta_y: self.deltas[j],
            side_x: self.sides[i],
            side_y: self.sides[j],
        }
    }

    /// Distance from node `i` to the point at boundary distance `e` on side `side`.
    pub fn distance_to_level(&self, i: usize, side: i8, e: f64) -> f64 {
        side_distance(self.sides[i], self.deltas[i], side, e)
    }

    /// Quadrature sum of sampled values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Weighted inner product of two sampled functions.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(a)
            .zip(b)
            .map(|((w, x), y)| w * x * y)
            .sum()
    }

    fn validate(&self) -> Result<()> {
        let m = self.nodes.len();
        if self.weights.len() != m
            || self.deltas.len() != m
            || self.sides.len() != m
            || self.cells.len() != m
        {
            return Err(Error::Invariant("grid arrays disagree in length".into()));
        }
        for i in 1..m {
            if side_distance(self.sides[i], self.deltas[i], self.sides[i - 1], self.deltas[i - 1])
                <= 0.0
            {
                return Err(Error::Invariant("grid nodes not strictly separated".into()));
            }
        }
        if self.deltas.iter().any(|&d| d <= 0.0) {
            return Err(Error::Invariant("grid node touches the boundary".into()));
        }
        if self.weights.iter().any(|&w| w <= 0.0 || !w.is_finite()) {
            return Err(Error::Invariant("nonpositive quadrature weight".into()));
        }
        if self.cells.iter().any(|&(inner, outer)| inner <= outer || outer < 0.0) {
            return Err(Error::Invariant("degenerate grid cell".into()));
        }
        let total: f64 = kahan_sum(&self.weights);
        let target = self.domain.measure();
        if ((total - target) / target).abs() > 1e-12 {
            return Err(Error::Invariant(format!(
                "weights sum to {total}, expected {target}"
            )));
        }
        Ok(())
    }
}

fn kahan_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for &v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Default grading exponent for a boundary layer of strength `gamma`.
pub fn default_grading(gamma: f64) -> f64 {
    (2.0 / gamma).max(3.0)
}

/// Build a boundary-graded grid with `m` cells.
///
/// On the interval the partition is symmetric about 0 with `m / 2` cells per
/// half (`m` must be even); nodes are cell midpoints. On the radial ball the
/// partition grades toward `r = 1` and nodes are the `rho^(N-1)`-weighted cell
/// centroids, which keeps degree-1 integration against the radial measure exact.
pub fn build_graded_grid(domain: Domain, m: usize, grading: f64) -> Result<Grid> {
    domain.validate()?;
    if m < 2 {
        return Err(Error::InvalidParameter(format!("grid size {m} too small")));
    }
    if !(grading >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "grading exponent {grading} must be >= 1"
        )));
    }

    let grid = match domain {
        Domain::Interval => {
            if m % 2 != 0 {
                return Err(Error::InvalidParameter(format!(
                    "interval grid size {m} must be even"
                )));
            }
            let half = m / 2;
            // Boundary distances of the partition edges on one half:
            // d_k = (1 - k/half)^g, from d_0 = 1 (center) to d_half = 0.
            let dist_edges: Vec<f64> = (0..=half)
                .map(|k| (1.0 - k as f64 / half as f64).powf(grading))
                .collect();

            let mut nodes = Vec::with_capacity(m);
            let mut deltas = Vec::with_capacity(m);
            let mut sides = Vec::with_capacity(m);
            let mut weights = Vec::with_capacity(m);
            let mut cells = Vec::with_capacity(m);

            // Left half, ordered by increasing x: boundary cell first.
            for k in (1..=half).rev() {
                let (inner, outer) = (dist_edges[k - 1], dist_edges[k]);
                let d = 0.5 * (inner + outer);
                deltas.push(d);
                sides.push(-1);
                nodes.push(d - 1.0);
                weights.push(inner - outer);
                cells.push((inner, outer));
            }
            // Right half: center cell first.
            for k in 1..=half {
                let (inner, outer) = (dist_edges[k - 1], dist_edges[k]);
                let d = 0.5 * (inner + outer);
                deltas.push(d);
                sides.push(1);
                nodes.push(1.0 - d);
                weights.push(inner - outer);
                cells.push((inner, outer));
            }
            Grid {
                domain,
                grading,
                nodes,
                deltas,
                sides,
                weights,
                cells,
            }
        }
        Domain::RadialBall(n) => {
            let dist_edges: Vec<f64> = (0..=m)
                .map(|k| (1.0 - k as f64 / m as f64).powf(grading))
                .collect();
            let surface = domain.sphere_measure();

            let mut nodes = Vec::with_capacity(m);
            let mut deltas = Vec::with_capacity(m);
            let mut sides = Vec::with_capacity(m);
            let mut weights = Vec::with_capacity(m);
            let mut cells = Vec::with_capacity(m);

            for k in 1..=m {
                let (inner, outer) = (dist_edges[k - 1], dist_edges[k]);
                let m0 = radial_cell_mass(n, inner, outer);
                let d = radial_cell_centroid_delta(n, inner, outer, m0);
                deltas.push(d);
                sides.push(1);
                nodes.push(1.0 - d);
                weights.push(surface * m0);
                cells.push((inner, outer));
            }
            Grid {
                domain,
                grading,
                nodes,
                deltas,
                sides,
                weights,
                cells,
            }
        }
    };

    grid.validate()?;
    Ok(grid)
}

/// `int rho^(N-1) drho` over the cell `{delta in [outer, inner]}`, written in
/// boundary distance (`rho = 1 - delta`) with the cell width factored out to
/// avoid cancellation.
pub fn radial_cell_mass(n: usize, inner: f64, outer: f64) -> f64 {
    let (a, b) = (outer, inner);
    let w = b - a;
    match n {
        2 => w * (1.0 - 0.5 * (a + b)),
        3 => w * (1.0 - (a + b) + (a * a + a * b + b * b) / 3.0),
        _ => panic!("unsupported ball dimension {n}"),
    }
}

/// Boundary distance of the `rho^(N-1)`-weighted centroid of the cell.
fn radial_cell_centroid_delta(n: usize, inner: f64, outer: f64, m0: f64) -> f64 {
    let (a, b) = (outer, inner);
    let w = b - a;
    let s1 = 0.5 * (a + b);
    let s2 = (a * a + a * b + b * b) / 3.0;
    let s3 = 0.25 * (a + b) * (a * a + b * b);
    let m1 = match n {
        2 => w * (s1 - s2),
        3 => w * (s1 - 2.0 * s2 + s3),
        _ => unreachable!(),
    };
    m1 / m0
}

/// A function sampled at the nodes of a grid.
#[derive(Clone, Debug)]
pub struct GridFunction {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
    pub label: Option<String>,
}

impl GridFunction {
    pub fn from_values(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invariant("grid function has non-finite value".into()));
        }
        Ok(GridFunction {
            grid,
            values,
            label: None,
        })
    }

    /// Sample a function of the boundary distance.
    pub fn from_delta_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.deltas.iter().map(|&d| f(d)).collect();
        Self::from_values(grid, values)
    }

    /// Sample a function of the absolute coordinate.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes.iter().map(|&x| f(x)).collect();
        Self::from_values(grid, values)
    }

    pub fn constant(grid: Arc<Grid>, c: f64) -> Self {
        let values = vec![c; grid.len()];
        GridFunction {
            grid,
            values,
            label: None,
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn integrate(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    /// Largest sup-norm gap to another function on the same grid.
    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

/// Sample `delta^(-beta)` on the grid. Negative `beta` gives positive powers.
pub fn delta_power(grid: &Arc<Grid>, beta: f64) -> GridFunction {
    let values = grid.deltas.iter().map(|&d| d.powf(-beta)).collect();
    GridFunction {
        grid: Arc::clone(grid),
        values,
        label: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_four_node_interval() {
        let g = build_graded_grid(Domain::Interval, 4, 1.0).unwrap();
        assert_eq!(g.nodes, vec![-0.75, -0.25, 0.25, 0.75]);
        assert_eq!(g.weights, vec![0.5, 0.5, 0.5, 0.5]);
    }

    #[test]
    fn weights_sum_to_measure() {
        for grading in [1.0, 3.0, 6.0, 12.0] {
            let g = build_graded_grid(Domain::Interval, 1024, grading).unwrap();
            assert_relative_eq!(
                kahan_sum(&g.weights),
                2.0,
                max_relative = 1e-12
            );
        }

        let b2 = build_graded_grid(Domain::RadialBall(2), 300, 4.0).unwrap();
        assert_relative_eq!(
            kahan_sum(&b2.weights),
            std::f64::consts::PI,
            max_relative = 1e-12
        );

        let b3 = build_graded_grid(Domain::RadialBall(3), 300, 4.0).unwrap();
        assert_relative_eq!(
            kahan_sum(&b3.weights),
            4.0 * std::f64::consts::PI / 3.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn min_delta_matches_grading_map() {
        // Innermost cell of the graded partition is one uniform step mapped
        // through the grading; the midpoint node sits half a cell inside.
        let g = build_graded_grid(Domain::Interval, 1024, 3.0).unwrap();
        let expected = 0.5 * (1.0_f64 / 512.0).powi(3);
        assert_relative_eq!(g.min_delta(), expected, max_relative = 1e-12);

        // Strong grading goes far below machine epsilon without degenerating.
        let g12 = build_graded_grid(Domain::Interval, 1024, 12.0).unwrap();
        let expected12 = 0.5 * (1.0_f64 / 512.0).powi(12);
        assert_relative_eq!(g12.min_delta(), expected12, max_relative = 1e-12);
        assert!(g12.min_delta() > 0.0);
    }

    #[test]
    fn interval_grid_is_symmetric() {
        let g = build_graded_grid(Domain::Interval, 64, 2.5).unwrap();
        let m = g.len();
        for i in 0..m {
            assert_relative_eq!(g.deltas[i], g.deltas[m - 1 - i], epsilon = 1e-15);
            assert_relative_eq!(g.weights[i], g.weights[m - 1 - i], epsilon = 1e-15);
            assert_eq!(g.sides[i], -g.sides[m - 1 - i]);
        }
    }

    #[test]
    fn pair_distances_split_by_side() {
        let g = build_graded_grid(Domain::Interval, 64, 8.0).unwrap();
        // same side: difference of boundary distances
        let p = g.pair(0, 1);
        assert_relative_eq!(p.dist, (g.deltas[1] - g.deltas[0]).abs(), epsilon = 1e-18);
        // opposite sides: through the center, no cancellation
        let p = g.pair(0, 63);
        assert_relative_eq!(p.dist, 2.0 - g.deltas[0] - g.deltas[63], epsilon = 1e-15);
        // distances stay positive even when absolute coordinates collapse
        let harsh = build_graded_grid(Domain::Interval, 1024, 12.0).unwrap();
        assert!(harsh.pair(0, 1).dist > 0.0);
        assert_eq!(harsh.nodes[0], -1.0); // absolute coordinate defeated...
        assert!(harsh.deltas[0] > 0.0); // ...but the distance survives
    }

    #[test]
    fn degree_one_exactness_per_cell() {
        // Midpoint nodes on the interval and weighted centroids on the ball
        // integrate affine functions exactly against the cell measure.
        let g = build_graded_grid(Domain::Interval, 32, 2.0).unwrap();
        for i in 0..g.len() {
            let (inner, outer) = g.cells[i];
            // in distance space on the node's side: f(delta) = delta + 3
            let exact = (inner - outer) * (0.5 * (inner + outer) + 3.0);
            let quad = g.weights[i] * (g.deltas[i] + 3.0);
            assert_relative_eq!(quad, exact, max_relative = 1e-13);
        }

        let b3 = build_graded_grid(Domain::RadialBall(3), 16, 2.0).unwrap();
        let surf = 4.0 * std::f64::consts::PI;
        for i in 0..b3.len() {
            let (inner, outer) = b3.cells[i];
            let (a, b) = (1.0 - inner, 1.0 - outer); // radial extent
            // integral of (rho + 3) rho^2 over the cell, times |S^2|
            let exact = surf * ((b.powi(4) - a.powi(4)) / 4.0 + (b.powi(3) - a.powi(3)));
            let quad = b3.weights[i] * (1.0 - b3.deltas[i] + 3.0);
            assert_relative_eq!(quad, exact, max_relative = 1e-12);
        }
    }

    #[test]
    fn refinement_consistency_of_delta_gamma_integral() {
        // integral of delta^gamma over (-1,1) = 2/(gamma+1)
        let gamma = 0.4;
        let exact = 2.0 / (gamma + 1.0);
        let coarse = build_graded_grid(Domain::Interval, 256, 3.0).unwrap();
        let fine = build_graded_grid(Domain::Interval, 512, 3.0).unwrap();
        let quad = |g: &Grid| {
            g.integrate(
                &g.deltas
                    .iter()
                    .map(|d| d.powf(gamma))
                    .collect::<Vec<_>>(),
            )
        };
        let (ec, ef) = ((quad(&coarse) - exact).abs(), (quad(&fine) - exact).abs());
        assert!(ef < ec / 3.0, "no second-order decay: {ec} -> {ef}");
    }

    #[test]
    fn delta_power_values() {
        let g = Arc::new(build_graded_grid(Domain::Interval, 16, 1.0).unwrap());
        let ones = delta_power(&g, 0.0);
        assert!(ones.values.iter().all(|&v| v == 1.0));

        // beta = -gamma gives delta^gamma
        let f = delta_power(&g, -0.5);
        for (v, d) in f.values.iter().zip(&g.deltas) {
            assert_relative_eq!(*v, d.sqrt(), max_relative = 1e-14);
        }
    }

    #[test]
    fn integrability_threshold_under_refinement() {
        // For beta < gamma + 1 the weighted integral of delta^(-beta) against
        // delta^gamma stabilizes under refinement (exact value 2/(gamma+1-beta)).
        let (gamma, beta) = (0.5, 1.2);
        let exact = 2.0 / (gamma + 1.0 - beta);
        let mut errs = Vec::new();
        for m in [256, 512, 1024] {
            let g = Arc::new(build_graded_grid(Domain::Interval, m, 12.0).unwrap());
            let vals: Vec<f64> = g
                .deltas
                .iter()
                .map(|d| d.powf(-beta) * d.powf(gamma))
                .collect();
            errs.push((g.integrate(&vals) - exact).abs());
        }
        assert!(errs[2] < errs[1] && errs[1] < errs[0]);
        assert!(errs[2] < 1e-4 * exact.abs());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_graded_grid(Domain::Interval, 1, 2.0).is_err());
        assert!(build_graded_grid(Domain::Interval, 16, 0.5).is_err());
        assert!(build_graded_grid(Domain::Interval, 15, 2.0).is_err());
        assert!(build_graded_grid(Domain::RadialBall(5), 16, 2.0).is_err());
    }
}
