use crate::scalar::Real;

/// Declared tolerance carried through every comparison.
///
/// With `relative == false` (the default) thresholds are `eps * max(1, scale)`;
/// with `relative == true` they are `eps * scale`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance<T> {
    pub eps: T,
    pub relative: bool,
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self { eps: T::lit(T::DEFAULT_EPS), relative: false }
    }
}

impl<T: Real> Tolerance<T> {
    pub fn new(eps: T) -> crate::Result<Self> {
        if !(eps > T::zero()) || !eps.is_finite() {
            return Err(crate::Error::InvalidTolerance(eps.to_f64_lossy()));
        }
        Ok(Self { eps, relative: false })
    }

    pub fn relative(mut self, relative: bool) -> Self {
        self.relative = relative;
        self
    }

    /// Threshold below which a quantity measured at `scale` counts as zero.
    pub fn threshold(&self, scale: T) -> T {
        if self.relative {
            self.eps * scale.abs()
        } else {
            self.eps * scale.abs().max(T::one())
        }
    }

    /// The "within 10 eps" acceptance band used for residual checks.
    pub fn slack(&self, scale: T) -> T {
        T::lit(10.0) * self.threshold(scale)
    }

    pub fn accepts(&self, residual: T, scale: T) -> bool {
        residual <= self.slack(scale)
    }

    /// Band for decisions whose true values are separated by a gap of order one
    /// (characters on diagonal matrix units are integers).
    pub fn gap_band(&self, scale: T) -> T {
        self.eps.sqrt() * (T::one() + scale.abs())
    }
}
