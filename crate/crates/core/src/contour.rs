//! Marching squares on a regular grid, optionally periodic.
//!
//! Crossings are placed on grid edges by linear interpolation. A vertex value
//! of exactly zero counts as positive. Saddle cells are resolved by the sign
//! of the field at the cell center.

use std::collections::HashMap;

use crate::num::Real;

/// Samples of a scalar field on `nx × ny` vertices, row-major in `y`.
#[derive(Debug, Clone)]
pub struct SampledGrid<T> {
    pub nx: usize,
    pub ny: usize,
    pub origin: [T; 2],
    pub spacing: [T; 2],
    pub periodic: bool,
    pub values: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline<T> {
    pub points: Vec<[T; 2]>,
    /// Last point connects back to the first.
    pub closed: bool,
}

impl<T: Real> SampledGrid<T> {
    /// Samples `f` on the `cells × cells` periodic grid of the unit torus.
    pub fn unit_torus(cells: usize, f: impl Fn([T; 2]) -> T) -> Self {
        let h = T::one() / T::lit(cells as f64);
        let mut values = Vec::with_capacity(cells * cells);
        for j in 0..cells {
            for i in 0..cells {
                values.push(f([T::lit(i as f64) * h, T::lit(j as f64) * h]));
            }
        }
        Self {
            nx: cells,
            ny: cells,
            origin: [T::zero(); 2],
            spacing: [h, h],
            periodic: true,
            values,
        }
    }

    /// Samples `f` on the closed rectangle `[lo, hi]` with `nx × ny` vertices.
    pub fn rectangle(lo: [T; 2], hi: [T; 2], nx: usize, ny: usize, f: impl Fn([T; 2]) -> T) -> Self {
        assert!(nx >= 2 && ny >= 2);
        let sx = (hi[0] - lo[0]) / T::lit((nx - 1) as f64);
        let sy = (hi[1] - lo[1]) / T::lit((ny - 1) as f64);
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f([
                    lo[0] + T::lit(i as f64) * sx,
                    lo[1] + T::lit(j as f64) * sy,
                ]));
            }
        }
        Self {
            nx,
            ny,
            origin: lo,
            spacing: [sx, sy],
            periodic: false,
            values,
        }
    }

    fn at(&self, i: usize, j: usize) -> T {
        self.values[(j % self.ny) * self.nx + (i % self.nx)]
    }

    fn positive(&self, i: usize, j: usize) -> bool {
        self.at(i, j) >= T::zero()
    }

    fn vertex(&self, i: T, j: T) -> [T; 2] {
        [
            self.origin[0] + i * self.spacing[0],
            self.origin[1] + j * self.spacing[1],
        ]
    }

    fn cells(&self) -> (usize, usize) {
        if self.periodic {
            (self.nx, self.ny)
        } else {
            (self.nx - 1, self.ny - 1)
        }
    }

    fn h_edge(&self, i: usize, j: usize) -> usize {
        2 * ((j % self.ny) * self.nx + (i % self.nx))
    }

    fn v_edge(&self, i: usize, j: usize) -> usize {
        self.h_edge(i, j) + 1
    }

    fn crossing(&self, edge: usize) -> [T; 2] {
        let vid = edge / 2;
        let (i, j) = (vid % self.nx, vid / self.nx);
        let (di, dj) = if edge.is_multiple_of(2) { (1, 0) } else { (0, 1) };
        let v0 = self.at(i, j);
        let v1 = self.at(i + di, j + dj);
        let t = v0 / (v0 - v1);
        let (fi, fj) = (T::lit(i as f64), T::lit(j as f64));
        let mut p = if di == 1 {
            self.vertex(fi + t, fj)
        } else {
            self.vertex(fi, fj + t)
        };
        if self.periodic {
            let period = [
                self.spacing[0] * T::lit(self.nx as f64),
                self.spacing[1] * T::lit(self.ny as f64),
            ];
            for k in 0..2 {
                let rel = (p[k] - self.origin[k]) / period[k];
                p[k] = self.origin[k] + (rel - rel.floor()) * period[k];
            }
        }
        p
    }

    /// Extracts the zero level set. `center` is used to split saddle cells;
    /// without it the mean of the four corners is used.
    pub fn march(&self, center: Option<&dyn Fn([T; 2]) -> T>) -> Vec<Polyline<T>> {
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut link = |a: usize, b: usize| {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        };
        let half = T::lit(0.5);
        let (cx, cy) = self.cells();
        for j in 0..cy {
            for i in 0..cx {
                let sa = self.positive(i, j);
                let sb = self.positive(i + 1, j);
                let sc = self.positive(i + 1, j + 1);
                let sd = self.positive(i, j + 1);
                let bottom = self.h_edge(i, j);
                let right = self.v_edge(i + 1, j);
                let top = self.h_edge(i, j + 1);
                let left = self.v_edge(i, j);
                let mut crossed = [None; 4];
                let mut k = 0;
                for (hit, e) in [(sa != sb, bottom), (sb != sc, right), (sd != sc, top), (sa != sd, left)] {
                    if hit {
                        crossed[k] = Some(e);
                        k += 1;
                    }
                }
                match k {
                    0 => {}
                    2 => link(crossed[0].unwrap(), crossed[1].unwrap()),
                    4 => {
                        let mid = self.vertex(T::lit(i as f64) + half, T::lit(j as f64) + half);
                        let cval = match center {
                            Some(f) => f(mid),
                            None => {
                                (self.at(i, j) + self.at(i + 1, j) + self.at(i + 1, j + 1) + self.at(i, j + 1))
                                    * T::lit(0.25)
                            }
                        };
                        if (cval >= T::zero()) == sa {
                            link(bottom, right);
                            link(top, left);
                        } else {
                            link(bottom, left);
                            link(right, top);
                        }
                    }
                    _ => unreachable!("odd number of sign changes around a cell"),
                }
            }
        }

        let mut nodes: Vec<usize> = adj.keys().copied().collect();
        nodes.sort_unstable();
        let mut visited: HashMap<usize, bool> = nodes.iter().map(|&e| (e, false)).collect();
        let mut out = Vec::new();

        let walk = |start: usize, visited: &mut HashMap<usize, bool>| -> Vec<usize> {
            let mut chain = vec![start];
            visited.insert(start, true);
            let mut cur = start;
            loop {
                let next = adj[&cur].iter().copied().find(|e| !visited[e]);
                match next {
                    Some(e) => {
                        visited.insert(e, true);
                        chain.push(e);
                        cur = e;
                    }
                    None => break,
                }
            }
            chain
        };

        // open chains start at boundary crossings
        for &e in &nodes {
            if adj[&e].len() == 1 && !visited[&e] {
                let chain = walk(e, &mut visited);
                out.push(Polyline {
                    points: chain.into_iter().map(|e| self.crossing(e)).collect(),
                    closed: false,
                });
            }
        }
        for &e in &nodes {
            if !visited[&e] {
                let chain = walk(e, &mut visited);
                out.push(Polyline {
                    points: chain.into_iter().map(|e| self.crossing(e)).collect(),
                    closed: true,
                });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn single_circle_closes() {
        let g = SampledGrid::rectangle([-1.0, -1.0], [1.0, 1.0], 41, 41, |p: [f64; 2]| {
            p[0] * p[0] + p[1] * p[1] - 0.25
        });
        let lines = g.march(None);
        assert_eq!(lines.len(), 1);
        assert!(lines[0].closed);
        for p in &lines[0].points {
            let r = p[0].hypot(p[1]);
            assert!((r - 0.5).abs() < 0.01, "r = {r}");
        }
    }

    #[test]
    fn open_chain_in_rectangle() {
        let g = SampledGrid::rectangle([0.0, 0.0], [1.0, 1.0], 11, 11, |p: [f64; 2]| p[0] - 0.33);
        let lines = g.march(None);
        assert_eq!(lines.len(), 1);
        assert!(!lines[0].closed);
        assert_eq!(lines[0].points.len(), 11);
        assert!(lines[0].points.iter().all(|p| (p[0] - 0.33).abs() < 1e-12));
    }

    #[test]
    fn periodic_lines_wrap_around() {
        // two non-contractible vertical curves
        let g = SampledGrid::unit_torus(32, |p: [f64; 2]| (TAU * (p[0] + 0.1 * (TAU * p[1]).sin())).cos());
        let lines = g.march(None);
        assert_eq!(lines.len(), 2);
        assert!(lines.iter().all(|l| l.closed));
        for l in &lines {
            assert!(l.points.iter().all(|p| (0.0..1.0).contains(&p[0]) && (0.0..1.0).contains(&p[1])));
        }
    }

    #[test]
    fn saddle_uses_center_sign() {
        // corners + - + - with xy-type saddle
        let f = |p: [f64; 2]| (p[0] - 0.5) * (p[1] - 0.5) + 0.01;
        let g = SampledGrid::rectangle([0.0, 0.0], [1.0, 1.0], 2, 2, f);
        let lines_center = g.march(Some(&f));
        assert_eq!(lines_center.len(), 2);
        let f_neg = |p: [f64; 2]| (p[0] - 0.5) * (p[1] - 0.5) - 0.01;
        let g2 = SampledGrid::rectangle([0.0, 0.0], [1.0, 1.0], 2, 2, f_neg);
        let a = g.march(Some(&f));
        let b = g2.march(Some(&f_neg));
        // the pairing of edges flips with the center sign
        let endpoints = |ls: &Vec<Polyline<f64>>| {
            let mut v: Vec<_> = ls.iter().map(|l| (l.points[0], l.points[1])).collect();
            v.sort_by(|x, y| x.partial_cmp(y).unwrap());
            v
        };
        assert_ne!(endpoints(&a), endpoints(&b));
    }
}
