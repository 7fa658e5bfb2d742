//! Truncated Taylor-series arithmetic ("jets"), used to apply the operator
//! `(1/sinh ρ) ∂_ρ` exactly when climbing the odd-dimension heat-kernel
//! recursion. Coefficients are Taylor coefficients `f^(k)(x₀)/k!`.

#[derive(Debug, Clone)]
pub(crate) struct Jet {
    c: Vec<f64>,
}

impl Jet {
    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet { c }
    }

    pub fn variable(x0: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x0;
        if order >= 1 {
            c[1] = 1.0;
        }
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let n = self.order().min(other.order());
        let mut c = vec![0.0; n + 1];
        for k in 0..=n {
            for j in 0..=k {
                c[k] += self.c[j] * other.c[k - j];
            }
        }
        Jet { c }
    }

    pub fn div(&self, other: &Jet) -> Jet {
        let n = self.order().min(other.order());
        let mut c = vec![0.0; n + 1];
        for k in 0..=n {
            let mut acc = self.c[k];
            for j in 1..=k {
                acc -= other.c[j] * c[k - j];
            }
            c[k] = acc / other.c[0];
        }
        Jet { c }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet { c: self.c.iter().map(|x| s * x).collect() }
    }

    pub fn add(&self, other: &Jet) -> Jet {
        let n = self.order().min(other.order());
        Jet { c: (0..=n).map(|k| self.c[k] + other.c[k]).collect() }
    }

    /// `exp(self)` via the standard convolution recurrence.
    pub fn exp(&self) -> Jet {
        let n = self.order();
        let mut c = vec![0.0; n + 1];
        c[0] = self.c[0].exp();
        for k in 1..=n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * c[k - j];
            }
            c[k] = acc / k as f64;
        }
        Jet { c }
    }

    /// `(sinh(self), cosh(self))` via the coupled recurrences.
    pub fn sinh_cosh(&self) -> (Jet, Jet) {
        let n = self.order();
        let mut s = vec![0.0; n + 1];
        let mut c = vec![0.0; n + 1];
        s[0] = self.c[0].sinh();
        c[0] = self.c[0].cosh();
        for k in 1..=n {
            let mut acc_s = 0.0;
            let mut acc_c = 0.0;
            for j in 1..=k {
                acc_s += j as f64 * self.c[j] * c[k - j];
                acc_c += j as f64 * self.c[j] * s[k - j];
            }
            s[k] = acc_s / k as f64;
            c[k] = acc_c / k as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    /// Taylor coefficients of the derivative; the order drops by one.
    pub fn derivative(&self) -> Jet {
        let n = self.order();
        Jet { c: (1..=n).map(|k| k as f64 * self.c[k]).collect() }
    }

    pub fn truncate(&self, order: usize) -> Jet {
        Jet { c: self.c[..=order.min(self.order())].to_vec() }
    }

    /// Divide by the expansion variable: drops the constant coefficient,
    /// which the caller guarantees vanishes. Exact for jets centered at a
    /// root of the function.
    pub fn shift_down(&self) -> Jet {
        Jet { c: self.c[1..].to_vec() }
    }

    /// Evaluate the truncated series at offset `dx` from the center.
    pub fn eval(&self, dx: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &ck| acc * dx + ck)
    }
}
