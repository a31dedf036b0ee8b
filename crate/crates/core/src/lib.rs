//! Volume-fraction bounds for two-phase bodies with complex conductivities.
//!
//! The pipeline runs from a boundary trace (or analytic forward solution)
//! through the null-Lagrangian averages to four nested bounding procedures:
//! elementary bounds, ellipse admissibility, improved elementary bounds, and
//! the rotated-field ellipse admissibility.
//!
//! ```
//! use num_complex::Complex64;
//! use voltbound_core::forward::{FourierBC, LayeredDiskGeometry, solve_layered_disk};
//! use voltbound_core::measurement::{derive_constants, PhaseConductivities};
//! use voltbound_core::bounds::elementary_bounds;
//!
//! let cond = PhaseConductivities::new(Complex64::new(3.0, 8.0), Complex64::new(8.0, 6.0)).unwrap();
//! let geom = LayeredDiskGeometry::new(vec![2.0, 3.0, 5.0], vec![1, 2, 1]).unwrap();
//! let u = [Complex64::new(-2.0, 1.0), Complex64::new(0.6, -1.4)];
//! let sol = solve_layered_disk(&geom, &cond, &FourierBC::affine(u, 5.0)).unwrap();
//! let consts = derive_constants(&cond, &sol.exact_moments().measurement).unwrap();
//! let (lo, hi) = elementary_bounds(&consts).unwrap();
//! assert!(lo <= 0.8 && 0.8 <= hi);
//! ```

pub mod bounds;
pub mod error;
pub mod forward;
pub mod measurement;
pub mod quadrature;
pub mod scan;

pub use error::{BoundsError, ForwardError, MeasurementError, QuadratureError, ScanError};
pub use measurement::REL_TOL;
