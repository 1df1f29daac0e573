//! Scalar math used throughout the crate, routed through `libm` when the
//! `std` feature is off so the core stays `no_std`-compatible.

/// `f64` operations that `core` does not provide.
pub trait F64Ext {
    fn ln_(self) -> f64;
    fn log2_(self) -> f64;
    fn log10_(self) -> f64;
    fn sqrt_(self) -> f64;
    fn powf_(self, e: f64) -> f64;
    fn powi_(self, e: i32) -> f64;
    fn cos_(self) -> f64;
    fn sin_(self) -> f64;
    fn abs_(self) -> f64;
}

#[cfg(any(feature = "std", test))]
impl F64Ext for f64 {
    #[inline]
    fn ln_(self) -> f64 {
        self.ln()
    }
    #[inline]
    fn log2_(self) -> f64 {
        self.log2()
    }
    #[inline]
    fn log10_(self) -> f64 {
        self.log10()
    }
    #[inline]
    fn sqrt_(self) -> f64 {
        self.sqrt()
    }
    #[inline]
    fn powf_(self, e: f64) -> f64 {
        self.powf(e)
    }
    #[inline]
    fn powi_(self, e: i32) -> f64 {
        self.powi(e)
    }
    #[inline]
    fn cos_(self) -> f64 {
        self.cos()
    }
    #[inline]
    fn sin_(self) -> f64 {
        self.sin()
    }
    #[inline]
    fn abs_(self) -> f64 {
        self.abs()
    }
}

#[cfg(not(any(feature = "std", test)))]
impl F64Ext for f64 {
    #[inline]
    fn ln_(self) -> f64 {
        libm::log(self)
    }
    #[inline]
    fn log2_(self) -> f64 {
        libm::log2(self)
    }
    #[inline]
    fn log10_(self) -> f64 {
        libm::log10(self)
    }
    #[inline]
    fn sqrt_(self) -> f64 {
        libm::sqrt(self)
    }
    #[inline]
    fn powf_(self, e: f64) -> f64 {
        libm::pow(self, e)
    }
    #[inline]
    fn powi_(self, e: i32) -> f64 {
        libm::pow(self, e as f64)
    }
    #[inline]
    fn cos_(self) -> f64 {
        libm::cos(self)
    }
    #[inline]
    fn sin_(self) -> f64 {
        libm::sin(self)
    }
    #[inline]
    fn abs_(self) -> f64 {
        libm::fabs(self)
    }
}

/// dBm to watts.
#[inline]
pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf_((dbm - 30.0) / 10.0)
}

/// log2(1 + x) guarded against tiny negative arguments from rounding.
#[inline]
pub fn log2_1p(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (1.0 + x).log2_()
    }
}

pub const TWO_PI: f64 = 2.0 * core::f64::consts::PI;
