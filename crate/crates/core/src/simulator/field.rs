//! Substrate fields on a uniform square grid with implicit sources, decay and LOD diffusion.

use super::SimError;
use crate::linalg::Tridiagonal;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// Fixed value on the outer boundary.
    Dirichlet(f64),
    /// Zero flux.
    Neumann,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec {
    pub name: &'static str,
    /// microns²/min
    pub diffusion: f64,
    /// 1/min
    pub decay: f64,
    pub boundary: Boundary,
}

/// Voxel-centred square grid covering `[-half_width, half_width]²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub dx: f64,
    pub half_width: f64,
}

impl Grid {
    pub fn new(half_width: f64, dx: f64) -> Self {
        Self { n: (2.0 * half_width / dx).round() as usize, dx, half_width }
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn axis_index(&self, v: f64) -> usize {
        let i = ((v + self.half_width) / self.dx).floor();
        if i <= 0.0 {
            0
        } else {
            (i as usize).min(self.n - 1)
        }
    }

    /// `(column, row)` of the voxel containing a point, clamped to the grid.
    pub fn cell_of(&self, p: [f64; 2]) -> (usize, usize) {
        (self.axis_index(p[0]), self.axis_index(p[1]))
    }

    pub fn voxel_of(&self, p: [f64; 2]) -> usize {
        let (i, j) = self.cell_of(p);
        j * self.n + i
    }

    pub fn centre(&self, voxel: usize) -> [f64; 2] {
        let (i, j) = (voxel % self.n, voxel / self.n);
        [-self.half_width + self.dx * (i as f64 + 0.5), -self.half_width + self.dx * (j as f64 + 0.5)]
    }
}

#[derive(Debug, Clone)]
struct Implicit1d {
    solver: Tridiagonal<f64>,
    /// Coefficient `D dt / dx²`.
    r: f64,
}

impl Implicit1d {
    fn new(n: usize, r: f64, boundary: Boundary) -> Result<Self, SimError> {
        let off = vec![-r; n];
        let mut diag = vec![1.0 + 2.0 * r; n];
        if boundary == Boundary::Neumann {
            diag[0] = 1.0 + r;
            diag[n - 1] = 1.0 + r;
        }
        let solver = Tridiagonal::new(&off, &diag, &off).map_err(|e| SimError::Parameter(e.to_string()))?;
        Ok(Self { solver, r })
    }
}

/// One scalar field with its prefactored diffusion operator.
#[derive(Debug, Clone)]
pub struct Field {
    pub spec: FieldSpec,
    pub values: Vec<f64>,
    operator: Option<Implicit1d>,
    /// False while the field is identically zero, letting steps skip it exactly.
    active: bool,
}

impl Field {
    pub fn new(spec: FieldSpec, grid: &Grid, initial: f64, dt: f64) -> Result<Self, SimError> {
        if !(dt > 0.0) {
            return Err(SimError::Parameter(format!("diffusion dt must be positive, got {dt}")));
        }
        let r = spec.diffusion * dt / (grid.dx * grid.dx);
        let operator = if r > 0.0 && grid.n > 1 { Some(Implicit1d::new(grid.n, r, spec.boundary)?) } else { None };
        let boundary_nonzero = matches!(spec.boundary, Boundary::Dirichlet(b) if b != 0.0);
        Ok(Self { spec, values: vec![initial; grid.len()], operator, active: initial != 0.0 || boundary_nonzero })
    }

    pub fn is_active(&self) -> bool {
        self.active
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `ρ ← (ρ + dt·num) / (1 + dt·den)` per voxel, the implicit form of secretion toward a
    /// target (`num = Σ w S T`, `den = Σ w (S + U)`) together with uptake.
    pub fn apply_sources(&mut self, num: &[f64], den: &[f64], dt: f64) {
        if !self.active && num.iter().all(|&v| v == 0.0) {
            return;
        }
        self.active = true;
        for ((v, &a), &b) in self.values.iter_mut().zip(num).zip(den) {
            if a != 0.0 || b != 0.0 {
                *v = (*v + dt * a) / (1.0 + dt * b);
            }
        }
    }

    /// `ρ ← ρ / (1 + dt·λ)`.
    pub fn decay(&mut self, dt: f64) {
        if !self.active || self.spec.decay == 0.0 {
            return;
        }
        let f = 1.0 / (1.0 + dt * self.spec.decay);
        self.values.iter_mut().for_each(|v| *v *= f);
    }

    /// Implicit diffusion split into a sweep along rows, then along columns.
    pub fn diffuse(&mut self, n: usize) {
        let Some(op) = self.operator.as_ref().filter(|_| self.active) else {
            return;
        };
        let edge = match self.spec.boundary {
            Boundary::Dirichlet(b) => op.r * b,
            Boundary::Neumann => 0.0,
        };
        for row in 0..n {
            let o = row * n;
            self.values[o] += edge;
            self.values[o + n - 1] += edge;
            op.solver.solve_strided(&mut self.values, o, 1);
        }
        for col in 0..n {
            self.values[col] += edge;
            self.values[col + (n - 1) * n] += edge;
            op.solver.solve_strided(&mut self.values, col, n);
        }
    }

    /// Central-difference gradient at a voxel, one-sided at the grid edges.
    pub fn gradient(&self, grid: &Grid, voxel: usize) -> [f64; 2] {
        let n = grid.n;
        let (i, j) = (voxel % n, voxel / n);
        let at = |i: usize, j: usize| self.values[j * n + i];
        let d = |lo: usize, hi: usize, fl: f64, fh: f64| if hi > lo { (fh - fl) / ((hi - lo) as f64 * grid.dx) } else { 0.0 };
        let (il, ih) = (i.saturating_sub(1), (i + 1).min(n - 1));
        let (jl, jh) = (j.saturating_sub(1), (j + 1).min(n - 1));
        [d(il, ih, at(il, j), at(ih, j)), d(jl, jh, at(i, jl), at(i, jh))]
    }
}

pub const OXYGEN: usize = 0;
pub const C1: usize = 1;
pub const C2: usize = 2;
pub const DRUG: usize = 3;

/// Oxygen, the two chemoattractants and the drug.
#[derive(Debug, Clone)]
pub struct Microenvironment {
    pub grid: Grid,
    pub fields: Vec<Field>,
}

impl Microenvironment {
    pub fn new(grid: Grid, fields: Vec<Field>) -> Self {
        Self { grid, fields }
    }

    /// One substep: sources, then decay, then diffusion, for every field.
    /// `sources[f]` holds the `(num, den)` voxel arrays for field `f`.
    pub fn step(&mut self, sources: &[(Vec<f64>, Vec<f64>)], dt: f64) -> Result<(), SimError> {
        if !(dt > 0.0) {
            return Err(SimError::Parameter(format!("dt must be positive, got {dt}")));
        }
        let n = self.grid.n;
        for (field, (num, den)) in self.fields.iter_mut().zip(sources) {
            field.apply_sources(num, den, dt);
            field.decay(dt);
            field.diffuse(n);
        }
        Ok(())
    }

    /// Fails on a NaN or clearly negative value; clamps round-off negatives to zero.
    pub fn check(&mut self, step: usize) -> Result<(), SimError> {
        for f in &mut self.fields {
            for v in &mut f.values {
                if v.is_nan() || *v < -1e-9 {
                    return Err(SimError::Numeric { field: f.spec.name, step, value: *v });
                }
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(d: f64, decay: f64, boundary: Boundary) -> FieldSpec {
        FieldSpec { name: "u", diffusion: d, decay, boundary }
    }

    #[test]
    fn uniform_neumann_is_fixed_point() {
        let grid = Grid::new(100.0, 20.0);
        let mut f = Field::new(spec(1000.0, 0.0, Boundary::Neumann), &grid, 3.5, 0.5).unwrap();
        for _ in 0..10 {
            f.diffuse(grid.n);
        }
        assert!(f.values.iter().all(|v| (v - 3.5).abs() < 1e-12));
    }

    #[test]
    fn dirichlet_uniform_at_boundary_value_is_fixed_point() {
        let grid = Grid::new(100.0, 20.0);
        let mut f = Field::new(spec(6000.0, 0.0, Boundary::Dirichlet(38.0)), &grid, 38.0, 0.1).unwrap();
        f.diffuse(grid.n);
        assert!(f.values.iter().all(|v| (v - 38.0).abs() < 1e-12));
    }

    #[test]
    fn decay_exact() {
        let grid = Grid::new(40.0, 20.0);
        let mut f = Field::new(spec(0.0, 0.1, Boundary::Neumann), &grid, 2.0, 0.5).unwrap();
        f.values[1] = 7.0;
        let before = f.values.clone();
        f.decay(0.5);
        for (a, b) in f.values.iter().zip(before) {
            assert_eq!(*a, b / (1.0 + 0.5 * 0.1));
        }
    }

    #[test]
    fn zero_field_stays_inactive() {
        let grid = Grid::new(40.0, 20.0);
        let mut f = Field::new(spec(1000.0, 0.01, Boundary::Neumann), &grid, 0.0, 0.1).unwrap();
        let zeros = vec![0.0; grid.len()];
        f.apply_sources(&zeros, &vec![1.0; grid.len()], 0.1);
        assert!(!f.is_active());
        let mut num = zeros.clone();
        num[2] = 1.0;
        f.apply_sources(&num, &num, 0.1);
        assert!(f.is_active());
        assert!((f.values[2] - 0.1 / 1.1).abs() < 1e-15);
    }

    #[test]
    fn gradient_of_linear_ramp() {
        let grid = Grid::new(60.0, 20.0);
        let mut f = Field::new(spec(0.0, 0.0, Boundary::Neumann), &grid, 0.0, 1.0).unwrap();
        for v in 0..grid.len() {
            let [x, y] = grid.centre(v);
            f.values[v] = 2.0 * x - 0.5 * y;
        }
        for v in 0..grid.len() {
            let g = f.gradient(&grid, v);
            assert!((g[0] - 2.0).abs() < 1e-12 && (g[1] + 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn voxel_lookup_clamps() {
        let grid = Grid::new(300.0, 20.0);
        assert_eq!(grid.n, 30);
        assert_eq!(grid.voxel_of([-300.0, -300.0]), 0);
        assert_eq!(grid.voxel_of([300.0, 300.0]), 899);
        assert_eq!(grid.voxel_of([0.0, 0.0]), 15 * 30 + 15);
        assert_eq!(grid.centre(0), [-290.0, -290.0]);
    }
}
