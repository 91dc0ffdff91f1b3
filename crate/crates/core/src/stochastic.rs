//! Random streams and Weibull failure-time sampling.
//!
//! Every draw comes from a ChaCha8 stream keyed by `(seed, stream id)`, so a
//! draw is a pure function of `(seed, stream id, counter)`. An iteration owns
//! one lifetime stream and one CMS stream per component; iterations never
//! share state, and execution order cannot change any value.
//!
//! Draw budget: one uniform per interarrival sample, one per CMS check of a
//! monitored component whose next mission would fail. Checks of components
//! with `p_cms == 0` consume nothing.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SamplingError;

/// Smallest uniform draw, `2^-53`; zero is remapped to it.
pub const MIN_UNIFORM: f64 = 1.0 / (1u64 << 53) as f64;

const COMPONENT_BITS: u32 = 23;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamPurpose {
    Lifetime = 0,
    Cms = 1,
}

/// Stream id for iteration `h`, purpose and zero-based component index.
pub fn stream_id(iteration: u64, purpose: StreamPurpose, component: usize) -> u64 {
    debug_assert!(component < 1 << COMPONENT_BITS);
    (iteration << (COMPONENT_BITS + 1)) | ((purpose as u64) << COMPONENT_BITS) | component as u64
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    counter: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream {
            seed,
            stream,
            counter: 0,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Number of uniforms drawn so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Uniform on `(0, 1)` with 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        self.counter += 1;
        let k = self.rng.next_u64() >> 11;
        if k == 0 {
            MIN_UNIFORM
        } else {
            k as f64 * MIN_UNIFORM
        }
    }
}

/// Per-iteration set of streams: one lifetime and one CMS stream per
/// component.
#[derive(Debug, Clone)]
pub struct IterationStreams {
    lifetime: Vec<RngStream>,
    cms: Vec<RngStream>,
}

impl IterationStreams {
    /// Streams for one-based iteration `h`.
    pub fn new(seed: u64, iteration: u64, n_components: usize) -> Self {
        let make = |purpose| {
            (0..n_components)
                .map(|i| RngStream::new(seed, stream_id(iteration, purpose, i)))
                .collect()
        };
        IterationStreams {
            lifetime: make(StreamPurpose::Lifetime),
            cms: make(StreamPurpose::Cms),
        }
    }

    #[inline]
    pub fn lifetime(&mut self, component: usize) -> f64 {
        self.lifetime[component].uniform()
    }

    #[inline]
    pub fn cms(&mut self, component: usize) -> f64 {
        self.cms[component].uniform()
    }
}

fn check_params(scale: f64, shape: f64) -> Result<(), SamplingError> {
    if scale > 0.0 && shape > 0.0 && scale.is_finite() && shape.is_finite() {
        Ok(())
    } else {
        Err(SamplingError::Parameters { scale, shape })
    }
}

/// `1 - exp(-(t/scale)^shape)`.
pub fn weibull_cdf(t: f64, scale: f64, shape: f64) -> Result<f64, SamplingError> {
    check_params(scale, shape)?;
    if t < 0.0 || t.is_nan() {
        return Err(SamplingError::NegativeTime(t));
    }
    Ok(-(-(t / scale).powf(shape)).exp_m1())
}

/// Survival function `exp(-(t/scale)^shape)`.
pub fn weibull_survival(t: f64, scale: f64, shape: f64) -> Result<f64, SamplingError> {
    weibull_cdf(t, scale, shape).map(|_| (-(t / scale).powf(shape)).exp())
}

fn clamp_open(u: f64) -> f64 {
    u.clamp(MIN_UNIFORM, 1.0 - f64::EPSILON / 2.0)
}

/// First failure interarrival `F^{-1}(1 - U) = scale * (-ln U)^(1/shape)`.
pub fn sample_first_interarrival(scale: f64, shape: f64, u: f64) -> f64 {
    let u = clamp_open(u);
    scale * (-u.ln()).powf(shape.recip())
}

/// Interarrival for a component with repair age `repair_age`, drawn from
/// the residual life conditioned on survival to that age:
/// `F^{-1}(1 - U * (1 - F(R))) - R`.
///
/// Evaluated as `R * ((1 + y/x)^(1/shape) - 1)` with `x = (R/scale)^shape`,
/// `y = -ln U`, which stays accurate when the residual is small relative to
/// `R`.
pub fn sample_conditional_interarrival(scale: f64, shape: f64, repair_age: f64, u: f64) -> f64 {
    let u = clamp_open(u);
    let x = (repair_age / scale).powf(shape);
    if repair_age <= 0.0 || x == 0.0 {
        return sample_first_interarrival(scale, shape, u);
    }
    let y = -u.ln();
    let t = repair_age * ((y / x).ln_1p() / shape).exp_m1();
    // Float floor: keep the interarrival strictly positive.
    t.max(f64::MIN_POSITIVE)
}

/// CMS detection: true iff `U < p_cms`.
#[inline]
pub fn cms_detects(p_cms: f64, u: f64) -> bool {
    u < p_cms
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cdf_fixed_points() {
        assert_eq!(weibull_cdf(0.0, 92440.0, 1.2).unwrap(), 0.0);
        assert_relative_eq!(
            weibull_cdf(500.0, 500.0, 3.0).unwrap(),
            1.0 - (-1.0f64).exp(),
            max_relative = 1e-15
        );
        // Reference from an independent 50-digit evaluation of the closed form.
        assert_relative_eq!(
            weibull_cdf(10_000.0, 92_440.0, 1.2).unwrap(),
            0.066_988_249_175_259,
            max_relative = 1e-10
        );
        assert_eq!(
            weibull_cdf(-1.0, 1.0, 1.0),
            Err(SamplingError::NegativeTime(-1.0))
        );
        assert!(weibull_cdf(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn first_interarrival_matches_bisection_on_cdf() {
        let t = sample_first_interarrival(92_440.0, 1.2, 0.5);
        // Bisection on F(t) = 1 - U.
        let (mut lo, mut hi) = (0.0f64, 1e7f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if weibull_cdf(mid, 92_440.0, 1.2).unwrap() < 0.5 {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert_relative_eq!(t, lo, max_relative = 1e-9);
        assert!((t - 68_100.0).abs() < 50.0, "{t}");
    }

    #[test]
    fn first_interarrival_limits() {
        let near_one = sample_first_interarrival(92_440.0, 1.2, 1.0 - 1e-15);
        assert!(near_one > 0.0 && near_one < 1e-6);
        assert!(sample_first_interarrival(1.0, 1.2, 1.0) > 0.0);
        assert!(sample_first_interarrival(1.0, 1.2, 0.0).is_finite());
    }

    #[test]
    fn conditional_reduces_to_first_at_zero_age() {
        for &u in &[0.01, 0.5, 0.93] {
            assert_eq!(
                sample_conditional_interarrival(92_440.0, 1.2, 0.0, u),
                sample_first_interarrival(92_440.0, 1.2, u)
            );
        }
    }

    #[test]
    fn conditional_matches_literal_formula() {
        let (a, b, r, u) = (92_440.0, 1.2, 10_000.0, 0.5);
        let target = 1.0 - u * (1.0 - weibull_cdf(r, a, b).unwrap());
        let literal = a * (-(1.0 - target).ln()).powf(1.0 / b) - r;
        let t = sample_conditional_interarrival(a, b, r, u);
        assert_relative_eq!(t, literal, max_relative = 1e-9);
        assert!((t - 63_800.0).abs() < 150.0, "{t}");
    }

    #[test]
    fn conditional_is_strictly_decreasing_in_u() {
        let mut prev = f64::INFINITY;
        for k in 1..1000 {
            let t = sample_conditional_interarrival(280.0, 1.2, 500.0, k as f64 / 1000.0);
            assert!(t < prev);
            prev = t;
        }
    }

    #[test]
    fn cms_boundaries() {
        assert!(cms_detects(1.0, 0.999_999));
        assert!(!cms_detects(0.0, MIN_UNIFORM));
        assert!(!cms_detects(0.5, 0.5));
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = RngStream::new(42, stream_id(7, StreamPurpose::Lifetime, 3));
        let mut b = RngStream::new(42, stream_id(7, StreamPurpose::Lifetime, 3));
        let mut c = RngStream::new(42, stream_id(7, StreamPurpose::Cms, 3));
        let xs: Vec<f64> = (0..16).map(|_| a.uniform()).collect();
        let ys: Vec<f64> = (0..16).map(|_| b.uniform()).collect();
        let zs: Vec<f64> = (0..16).map(|_| c.uniform()).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
        assert_eq!(a.counter(), 16);
        assert!(xs.iter().all(|&u| u > 0.0 && u < 1.0));
    }

    #[test]
    fn stream_ids_do_not_collide() {
        let mut seen = std::collections::HashSet::new();
        for h in 1..50u64 {
            for p in [StreamPurpose::Lifetime, StreamPurpose::Cms] {
                for i in 0..80 {
                    assert!(seen.insert(stream_id(h, p, i)));
                }
            }
        }
    }
}
