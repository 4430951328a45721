use rand::distr::Distribution;
use rand::Rng;
use rand_distr::StandardNormal;

use super::GaussianHoleParams;

impl GaussianHoleParams {
    /// Draws one variate and reports how many proposals it took.
    ///
    /// Proposals come from `N(0, λ₀²)` and are accepted with probability
    /// `1 − K·exp(−x²(1/2λ₁² − 1/2λ₀²))`, which is exactly the ratio of the
    /// target density to its Gaussian envelope.
    pub fn sample_counted<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, u32) {
        let l0 = self.lambda0();
        if self.is_gaussian() {
            let z: f64 = rng.sample(StandardNormal);
            return (l0 * z, 1);
        }
        let l1 = self.lambda1();
        let rate = 0.5 / (l1 * l1) - 0.5 / (l0 * l0);
        let mut proposals = 0;
        loop {
            proposals += 1;
            let z: f64 = rng.sample(StandardNormal);
            let x = l0 * z;
            let accept = 1.0 - self.k() * libm::exp(-x * x * rate);
            if rng.random::<f64>() < accept {
                return (x, proposals);
            }
        }
    }
}

impl Distribution<f64> for GaussianHoleParams {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_counted(rng).0
    }
}
