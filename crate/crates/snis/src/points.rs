//! Flat row-major storage for n points in d dimensions. One allocation
//! regardless of d, so million-sample 1-d runs stay cheap.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    data: Vec<f64>,
    dim: usize,
}

impl Points {
    pub fn new(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "must be positive"));
        }
        if data.len() % dim != 0 {
            return Err(Error::invalid("data", format!("length {} not divisible by dim {dim}", data.len())));
        }
        Ok(Points { data, dim })
    }

    pub fn from_scalars(values: Vec<f64>) -> Self {
        Points { data: values, dim: 1 }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// The raw coordinates for d = 1.
    pub fn scalars(&self) -> Result<&[f64]> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: self.dim });
        }
        Ok(&self.data)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Column `j` gathered into a fresh vector.
    pub fn column(&self, j: usize) -> Result<Vec<f64>> {
        if j >= self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: j });
        }
        Ok(self.data.iter().skip(j).step_by(self.dim).copied().collect())
    }

    pub fn push_row(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: row.len() });
        }
        self.data.extend_from_slice(row);
        Ok(())
    }

    pub fn with_capacity(n: usize, dim: usize) -> Self {
        Points { data: Vec::with_capacity(n * dim), dim }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_and_columns() {
        let p = Points::new(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 2).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.row(1), &[3.0, 4.0]);
        assert_eq!(p.column(1).unwrap(), vec![2.0, 4.0, 6.0]);
        assert!(Points::new(vec![1.0; 5], 2).is_err());
    }

    #[test]
    fn scalars_requires_dim_one() {
        let p = Points::from_scalars(vec![0.5, 0.25]);
        assert_eq!(p.scalars().unwrap(), &[0.5, 0.25]);
        let q = Points::new(vec![0.0; 4], 2).unwrap();
        assert!(q.scalars().is_err());
    }
}
