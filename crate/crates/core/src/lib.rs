//! Right triangles with rational sides and a fixed squarefree area class,
//! studied through rational points on `E_t: Y^2 = X^3 - t^2 X`.

pub mod cli;
mod decimal;
pub mod elliptic;
pub mod error;
pub mod io;
mod jacobian;
pub mod ntheory;
pub mod regression;
pub mod search;
pub mod triangles;
pub mod tunnell;

pub use error::{Error, Result};
