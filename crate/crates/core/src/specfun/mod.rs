//! Special functions and numerical integration.

mod erf;
mod faddeeva;
mod gamma;
mod pcf;
pub mod quad;

pub use erf::{erf, erf_inv, erfc, erfc_inv, erfcx, ln_erfc};
pub use faddeeva::{erfc_complex, faddeeva_w};
pub use gamma::{digamma, gamma, gamma_p, gamma_q, ln_gamma, trigamma};
pub use pcf::{ln_pcf_d_neg, pcf_d, pcf_d_neg};
pub use quad::{integrate, Quadrature, QuadratureResult};
