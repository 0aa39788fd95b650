//! Scalar and vector fields on the torus.
//!
//! A `VertexField` stores one real per vertex. A `VectorField` stores `d`
//! reals per vertex in forward-gradient layout: component `i` lives on the
//! oriented edge `{x, x + e_i}` and is stored at `i * L^d + idx(x)`, the same
//! flat layout as an environment's edge array.

use std::ops::{Index, IndexMut};

#[derive(Debug, Clone, PartialEq)]
pub struct VertexField {
    values: Vec<f64>,
}

impl VertexField {
    pub fn zeros(n: usize) -> Self {
        VertexField {
            values: vec![0.0; n],
        }
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        VertexField { values }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        VertexField {
            values: vec![c; n],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / self.len() as f64
    }

    /// Subtract the mean in place (the torus gauge fix).
    pub fn project_mean_zero(&mut self) {
        let m = self.mean();
        for v in &mut self.values {
            *v -= m;
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn dot(&self, other: &VertexField) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn scaled(&self, s: f64) -> VertexField {
        VertexField {
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn sub(&self, other: &VertexField) -> VertexField {
        debug_assert_eq!(self.len(), other.len());
        VertexField {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Index<usize> for VertexField {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

impl IndexMut<usize> for VertexField {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.values[i]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    values: Vec<f64>,
    components: usize,
    vertices: usize,
}

impl VectorField {
    pub fn zeros(components: usize, vertices: usize) -> Self {
        VectorField {
            values: vec![0.0; components * vertices],
            components,
            vertices,
        }
    }

    pub fn from_vec(components: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len() % components, 0);
        let vertices = values.len() / components;
        VectorField {
            values,
            components,
            vertices,
        }
    }

    #[inline]
    pub fn components(&self) -> usize {
        self.components
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn at(&self, dir: usize, vertex: usize) -> f64 {
        self.values[dir * self.vertices + vertex]
    }

    #[inline]
    pub fn set(&mut self, dir: usize, vertex: usize, v: f64) {
        self.values[dir * self.vertices + vertex] = v;
    }

    pub fn component(&self, dir: usize) -> &[f64] {
        &self.values[dir * self.vertices..(dir + 1) * self.vertices]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Euclidean norm of the d-vector at one vertex.
    pub fn norm_at(&self, vertex: usize) -> f64 {
        (0..self.components)
            .map(|dir| {
                let v = self.at(dir, vertex);
                v * v
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn dot(&self, other: &VectorField) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn sub(&self, other: &VectorField) -> VectorField {
        debug_assert_eq!(self.len(), other.len());
        VectorField {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
            components: self.components,
            vertices: self.vertices,
        }
    }
}
