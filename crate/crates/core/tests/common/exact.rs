//! Exact rational matrices for operator oracles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(x: f64) -> Q {
    BigRational::from_float(x).expect("finite")
}

pub fn qi(x: i64) -> Q {
    BigRational::from_integer(BigInt::from(x))
}

pub fn f(x: &Q) -> f64 {
    x.to_f64().expect("representable")
}

#[derive(Clone, Debug)]
pub struct Mat {
    pub r: usize,
    pub c: usize,
    pub d: Vec<Q>,
}

impl Mat {
    pub fn zeros(r: usize, c: usize) -> Self {
        Self { r, c, d: vec![Q::zero(); r * c] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.d[i * n + i] = Q::one();
        }
        m
    }

    pub fn col(v: &[f64]) -> Self {
        Self { r: v.len(), c: 1, d: v.iter().map(|x| q(*x)).collect() }
    }

    pub fn row(v: &[f64]) -> Self {
        Self { r: 1, c: v.len(), d: v.iter().map(|x| q(*x)).collect() }
    }

    pub fn diag(v: &[Q]) -> Self {
        let mut m = Self::zeros(v.len(), v.len());
        for (i, x) in v.iter().enumerate() {
            m.d[i * v.len() + i] = x.clone();
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &Q {
        &self.d[i * self.c + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Q) {
        self.d[i * self.c + j] = x;
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.c, o.r);
        let mut out = Mat::zeros(self.r, o.c);
        for i in 0..self.r {
            for k in 0..self.c {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.c {
                    let b = o.at(k, j);
                    if !b.is_zero() {
                        out.d[i * o.c + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Mat) -> Mat {
        assert!(self.r == o.r && self.c == o.c);
        Mat { r: self.r, c: self.c, d: self.d.iter().zip(&o.d).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        self.add(&o.scale(&-Q::one()))
    }

    pub fn scale(&self, a: &Q) -> Mat {
        Mat { r: self.r, c: self.c, d: self.d.iter().map(|x| x * a).collect() }
    }

    pub fn scalar(&self) -> Q {
        assert!(self.r == 1 && self.c == 1);
        self.d[0].clone()
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Mat {
        assert_eq!(self.r, self.c);
        let n = self.r;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let p = (col..n).find(|&i| !a.at(i, col).is_zero()).expect("singular matrix");
            if p != col {
                for j in 0..n {
                    a.d.swap(p * n + j, col * n + j);
                    inv.d.swap(p * n + j, col * n + j);
                }
            }
            let piv = a.at(col, col).clone();
            for j in 0..n {
                a.d[col * n + j] = &a.d[col * n + j] / &piv;
                inv.d[col * n + j] = &inv.d[col * n + j] / &piv;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let fac = a.at(i, col).clone();
                if fac.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = &fac * a.at(col, j);
                    a.d[i * n + j] -= t;
                    let t = &fac * inv.at(col, j);
                    inv.d[i * n + j] -= t;
                }
            }
        }
        inv
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.d.iter().map(f).collect()
    }
}
