//! Limit cycles of the discontinuous Liénard system
//! `x' = y, y' = -x - ε (f(x) y + sgn(y) g(x))`.

pub mod averaging;
pub mod cli;
pub mod design;
pub mod exactnum;
pub mod pipeline;
pub mod poly;
pub mod simulator;
