use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("{name} must lie strictly between 0 and 1, got {value}")]
    OutOfRange { name: &'static str, value: f64 },
}

/// Query parameters and the quantities derived from them.
///
/// `eps_h` is the per-level attention threshold; it also gates which residues
/// are pushed during the final stage. `max_levels` bounds the depth at which
/// any attention node can exist and `n_walks` is the sampling budget used to
/// pick the actual depth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryParams {
    c: f64,
    sqrt_c: f64,
    eps: f64,
    delta: f64,
    eps_h: f64,
    max_levels: usize,
    n_walks: u64,
    seed: u64,
}

fn check(name: &'static str, value: f64) -> Result<(), ParamError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(ParamError::OutOfRange { name, value })
    }
}

impl QueryParams {
    pub fn new(c: f64, eps: f64, delta: f64, seed: u64) -> Result<Self, ParamError> {
        check("c", c)?;
        check("eps", eps)?;
        check("delta", delta)?;
        let sqrt_c = c.sqrt();
        let eps_h = (1.0 - sqrt_c) / (3.0 * sqrt_c) * eps;
        Ok(Self::assemble(c, eps, delta, eps_h, seed))
    }

    /// Replaces the attention threshold, recomputing the level cap and walk
    /// budget from it. Used to reproduce hand-built fixtures whose threshold
    /// does not correspond to any `eps < 1`.
    pub fn with_attention_threshold(self, eps_h: f64) -> Result<Self, ParamError> {
        check("eps_h", eps_h)?;
        Ok(Self::assemble(self.c, self.eps, self.delta, eps_h, self.seed))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn assemble(c: f64, eps: f64, delta: f64, eps_h: f64, seed: u64) -> Self {
        let sqrt_c = c.sqrt();
        let max_levels = ((1.0 / eps_h).ln() / (1.0 / sqrt_c).ln()).floor().max(0.0) as usize;
        let per_half = ((1.0 / ((1.0 - sqrt_c) * eps_h * delta)).ln() / (eps_h * eps_h)).ceil();
        let n_walks = (2.0 * per_half).max(2.0) as u64;
        QueryParams {
            c,
            sqrt_c,
            eps,
            delta,
            eps_h,
            max_levels,
            n_walks,
            seed,
        }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn sqrt_c(&self) -> f64 {
        self.sqrt_c
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eps_h(&self) -> f64 {
        self.eps_h
    }

    /// Deepest level at which an attention node can occur.
    pub fn max_levels(&self) -> usize {
        self.max_levels
    }

    pub fn n_walks(&self) -> u64 {
        self.n_walks
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Upper bound on the number of attention occurrences over all levels.
    pub fn attention_bound(&self) -> usize {
        (self.sqrt_c / ((1.0 - self.sqrt_c) * self.eps_h)).floor() as usize
    }
}

pub fn derive_params(c: f64, eps: f64, delta: f64, seed: u64) -> Result<QueryParams, ParamError> {
    QueryParams::new(c, eps, delta, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn derived_values_for_c06() {
        // Frozen from an independent evaluation of the closed forms.
        let p = derive_params(0.6, 0.02, 1e-4, 0).unwrap();
        assert_relative_eq!(p.eps_h(), 0.0019399629915720373, max_relative = 1e-14);
        assert_eq!(p.max_levels(), 24);
        assert_eq!(p.attention_bound(), 1771);
        assert_eq!(p.n_walks(), 9_005_176);

        let p = derive_params(0.6, 0.05, 1e-4, 0).unwrap();
        assert_eq!(p.max_levels(), 20);
        assert_eq!(p.attention_bound(), 708);
        assert_eq!(p.n_walks(), 1_362_918);

        let p = derive_params(0.6, 0.01, 1e-4, 0).unwrap();
        assert_eq!(p.max_levels(), 27);
        assert_eq!(p.attention_bound(), 3542);
    }

    #[test]
    fn threshold_formula_is_exact() {
        for &(c, eps) in &[(0.6, 0.02), (0.8, 0.1), (0.25, 0.5)] {
            let p = derive_params(c, eps, 0.01, 0).unwrap();
            let s = f64::sqrt(c);
            assert_eq!(p.eps_h(), (1.0 - s) / (3.0 * s) * eps);
            assert!(p.n_walks() >= 2);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(derive_params(0.6, 1.0, 0.01, 0).is_err());
        assert!(derive_params(0.0, 0.1, 0.01, 0).is_err());
        assert!(derive_params(0.6, 0.1, 1.5, 0).is_err());
        assert!(derive_params(f64::NAN, 0.1, 0.1, 0).is_err());
    }

    #[test]
    fn custom_threshold() {
        let p = derive_params(0.6, 0.05, 0.01, 0)
            .unwrap()
            .with_attention_threshold(0.12)
            .unwrap();
        assert_eq!(p.eps_h(), 0.12);
        // (sqrt 0.6)^8 = 0.1296 >= 0.12 > (sqrt 0.6)^9
        assert_eq!(p.max_levels(), 8);
    }
}
