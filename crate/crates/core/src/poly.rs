use std::fmt;

/// Polynomial in `t` with nonnegative integer coefficients, indexed by power.
/// Used for f-polynomials (cell counts) and Poincaré polynomials (Betti
/// numbers).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<u64>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    /// Polynomial with the given `(power, coefficient)` terms.
    pub fn from_terms(terms: &[(usize, u64)]) -> Self {
        let mut p = IntPolynomial::zero();
        for &(k, c) in terms {
            p.add_to(k, c);
        }
        p
    }

    pub fn coeff(&self, power: usize) -> u64 {
        self.coeffs.get(power).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn add_to(&mut self, power: usize, c: u64) {
        if c == 0 {
            return;
        }
        if self.coeffs.len() <= power {
            self.coeffs.resize(power + 1, 0);
        }
        self.coeffs[power] += c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Sum of coefficients, i.e. the value at `t = 1`.
    pub fn total(&self) -> u64 {
        self.coeffs.iter().sum()
    }

    /// Value at `t = -1`, the Euler characteristic.
    pub fn euler_characteristic(&self) -> i64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    pub fn sum(&self, other: &IntPolynomial) -> IntPolynomial {
        let mut out = self.clone();
        for (k, &c) in other.coeffs.iter().enumerate() {
            out.add_to(k, c);
        }
        out
    }

    /// Fiber-graph label style: `9t^0+14t^1+4t^2`, unit coefficients elided.
    pub fn fiber_label(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| {
                if c == 1 {
                    format!("t^{k}")
                } else {
                    format!("{c}t^{k}")
                }
            })
            .collect();
        terms.join("+")
    }
}

/// Poincaré-line style: `1 + t^1`, `2t^1`, `0`.
impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (k, c) {
                (0, c) => write!(f, "{c}")?,
                (k, 1) => write!(f, "t^{k}")?,
                (k, c) => write!(f, "{c}t^{k}")?,
            }
        }
        Ok(())
    }
}
